"""
Profile ODE Checks
==================

Closed-form checks on the outer profile F of u = 2∂x²F(Θ) (KP) or
u = ∂x F(Θ) (mKdV):

- log:     F(1), F'(1), F''(1), F'''(1) = 0, 1, -1, 2; ρ = F'' + F'² ≡ 0;
           F'''' + 6F''² ≡ 0; and the general identity
           ρ'' - 2F'ρ' + 4F''ρ = F'''' + 6F''² for any smooth F
- arctan2: F(0) = 0 and h = F'/2 = 1/(1 + s²) solves h'' + (3/s)h' + 8h³ = 0

Symbolic simplification is done with sympy; each identity is also sampled
on s_range as a floating sanity check.
"""

import logging
from typing import Any, Dict, Tuple

import numpy as np
import sympy as sp

logger = logging.getLogger(__name__)

s = sp.Symbol('s', positive=True)

PROFILE_FUNCTIONS = {
    'log': sp.log(s),
    'arctan2': 2 * sp.atan(s),
}

SAMPLE_POINTS = 101
SAMPLE_TOLERANCE = 1e-10


def _check(expr: sp.Expr, s_range: Tuple[float, float]) -> Dict[str, Any]:
    """Symbolic zero test plus a sampled max |expr| on s_range."""
    simplified = sp.simplify(expr)
    grid = np.linspace(s_range[0], s_range[1], SAMPLE_POINTS)
    values = np.broadcast_to(sp.lambdify(s, expr, 'numpy')(grid), grid.shape)
    sampled = float(np.max(np.abs(values)))
    return {
        'expr': str(simplified),
        'symbolic_zero': simplified == 0,
        'sampled_max_abs': sampled,
        'passed': simplified == 0 and sampled <= SAMPLE_TOLERANCE,
    }


def rho_identity() -> sp.Expr:
    """ρ'' - 2F'ρ' + 4F''ρ - (F'''' + 6F''²) for a generic F; simplifies to 0."""
    F = sp.Function('F')(s)
    d1, d2 = sp.diff(F, s), sp.diff(F, s, 2)
    rho = d2 + d1 ** 2
    lhs = sp.diff(rho, s, 2) - 2 * d1 * sp.diff(rho, s) + 4 * d2 * rho
    return sp.expand(lhs - (sp.diff(F, s, 4) + 6 * d2 ** 2))


def profile_checks(profile: str, s_range: Tuple[float, float] = (0.5, 5.0)) -> Dict[str, Any]:
    """
    Run the closed-form checks for a profile.

    Args:
        profile: 'log' or 'arctan2'
        s_range: sampling interval, inside (0, inf)

    Returns:
        {'profile', 's_range', 'checks': {name: {...,'passed'}}, 'passed'}

    Raises:
        ValueError: unknown profile or s_range not inside (0, inf)
    """
    if profile not in PROFILE_FUNCTIONS:
        available = ', '.join(PROFILE_FUNCTIONS.keys())
        raise ValueError(f"Unknown profile '{profile}'. Available: {available}")
    if not 0 < s_range[0] < s_range[1]:
        raise ValueError(f"s_range must satisfy 0 < min < max (got {s_range})")

    F = PROFILE_FUNCTIONS[profile]
    checks: Dict[str, Dict[str, Any]] = {}

    if profile == 'log':
        values = [sp.diff(F, s, n).subs(s, 1) if n else F.subs(s, 1) for n in range(4)]
        expected = [0, 1, -1, 2]
        checks['initial_conditions'] = {
            'expr': [str(v) for v in values],
            'expected': expected,
            'passed': [sp.nsimplify(v) for v in values] == expected,
        }
        checks['rho'] = _check(sp.diff(F, s, 2) + sp.diff(F, s) ** 2, s_range)
        checks['fourth_order'] = _check(sp.diff(F, s, 4) + 6 * sp.diff(F, s, 2) ** 2, s_range)
        identity = sp.simplify(rho_identity())
        checks['rho_ode_identity'] = {'expr': str(identity), 'passed': identity == 0}
    else:
        h = sp.simplify(sp.diff(F, s) / 2)
        checks['origin'] = {'expr': str(F.subs(s, 0)), 'passed': F.subs(s, 0) == 0}
        checks['h_closed_form'] = _check(h - 1 / (1 + s ** 2), s_range)
        checks['h_at_one'] = {'expr': str(h.subs(s, 1)), 'passed': h.subs(s, 1) == sp.Rational(1, 2)}
        checks['h_equation'] = _check(sp.diff(h, s, 2) + 3 / s * sp.diff(h, s) + 8 * h ** 3, s_range)

    passed = all(bool(c['passed']) for c in checks.values())
    logger.info("Profile %s checks: %s", profile, 'passed' if passed else 'FAILED')
    return {
        'profile': profile,
        's_range': list(s_range),
        'checks': checks,
        'passed': passed,
    }

"""
KP Phase Functionals
====================

The differential functionals that classify KP-II phases, all returned in
cleared polynomial form so that "vanishes wherever Θ > 0" becomes an exact
zero test in the ring:

- heat(Θ)  = Θ_y - Θ_xx
- airy(Θ)  = Θ_t - Θ_xxx
- ΘW_x(Θ)  = ΘΘ_xxxx - Θ_xx²
- ΘW_y(Θ)  = ΘΘ_yy - Θ_y²
- Θ²𝒯(Θ)  and the Θ²-cleared KP residual for the profile F = log

Each call returns an OperatorResult recording the model and the power of
Θ that was multiplied through.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

from src.algebra.expalg import KP_VARS, ExpPoly, VarSet

logger = logging.getLogger(__name__)

MODELS = ('KP', 'KdV', 'mKdV', 'ZK', 'mZK')
SUPPORTED_PROFILES = ('log',)


class OperatorError(ValueError):
    """Raised when an operator is applied to the wrong variable set or profile."""
    pass


@dataclass(frozen=True)
class OperatorResult:
    """
    Cleared operator output.

    Attributes:
        name: operator name as used on the command line
        expr: the cleared expression
        cleared_by: power of the clearing factor multiplied through
        model: one of MODELS
        clearing: 'theta' (powers of Θ) or 'one_plus_theta_sq' (powers of 1 + Θ²)
    """

    name: str
    expr: ExpPoly
    cleared_by: int
    model: str = 'KP'
    clearing: str = 'theta'

    @property
    def is_zero(self) -> bool:
        return self.expr.is_zero()

    def summary(self) -> Dict[str, object]:
        return {
            'name': self.name,
            'model': self.model,
            'cleared_by': self.cleared_by,
            'clearing': self.clearing,
            'zero': self.is_zero,
            'terms': len(self.expr),
        }


def require_vars(theta: ExpPoly, vars: VarSet, model: str) -> None:
    if theta.vars != vars:
        raise OperatorError(
            f"{model} operators need variables {vars.names}, got {theta.vars.names}"
        )


def _result(name: str, expr: ExpPoly, cleared_by: int) -> OperatorResult:
    logger.debug("%s: %d terms (cleared by Θ^%d)", name, len(expr), cleared_by)
    return OperatorResult(name=name, expr=expr, cleared_by=cleared_by, model='KP')


def heat_expr(theta: ExpPoly) -> ExpPoly:
    return theta.diff('y') - theta.diff('x', 2)


def airy_expr(theta: ExpPoly) -> ExpPoly:
    return theta.diff('t') - theta.diff('x', 3)


def heat(theta: ExpPoly) -> OperatorResult:
    """H(Θ) = Θ_y - Θ_xx."""
    require_vars(theta, KP_VARS, 'KP')
    return _result('heat', heat_expr(theta), 0)


def airy(theta: ExpPoly) -> OperatorResult:
    """Ai(Θ) = Θ_t - Θ_xxx."""
    require_vars(theta, KP_VARS, 'KP')
    return _result('airy', airy_expr(theta), 0)


def cleared_wronskian(theta: ExpPoly, var: str, order: int) -> ExpPoly:
    """Θ ∂^{2·order}Θ - (∂^order Θ)² in one variable."""
    derivative = theta.diff(var, order)
    return theta * theta.diff(var, 2 * order) - derivative * derivative


def wx_cleared(theta: ExpPoly) -> OperatorResult:
    """ΘW_x(Θ) = ΘΘ_xxxx - Θ_xx²."""
    require_vars(theta, KP_VARS, 'KP')
    return _result('wx', cleared_wronskian(theta, 'x', 2), 1)


def wy_cleared(theta: ExpPoly) -> OperatorResult:
    """ΘW_y(Θ) = ΘΘ_yy - Θ_y²."""
    require_vars(theta, KP_VARS, 'KP')
    return _result('wy', cleared_wronskian(theta, 'y', 1), 1)


def t_operator_cleared(theta: ExpPoly) -> OperatorResult:
    """
    Θ²𝒯(Θ) for F = log:

        4Θ_x Ai - 4Θ ∂x Ai + 3Θ(H_y + H_xx) - 3H(Θ_y + Θ_xx)

    Identical to kp_residual_cleared for every ring element; the two are
    kept separate because they group the KP equation differently.
    """
    require_vars(theta, KP_VARS, 'KP')
    ai = airy_expr(theta)
    h = heat_expr(theta)
    expr = (
        4 * theta.diff('x') * ai
        - 4 * theta * ai.diff('x')
        + 3 * theta * (h.diff('y') + h.diff('x', 2))
        - 3 * h * (theta.diff('y') + theta.diff('x', 2))
    )
    return _result('T', expr, 2)


def kp_residual_cleared(theta: ExpPoly) -> OperatorResult:
    """
    Θ² times the KP-II equation for u = 2∂x² log Θ:

        4Θ_x Ai - 4Θ ∂x Ai + 3Θ(Θ_yy - Θ_xxxx) + 3(Θ_xx² - Θ_y²)

    Zero exactly when u solves KP-II wherever Θ > 0.
    """
    require_vars(theta, KP_VARS, 'KP')
    ai = airy_expr(theta)
    theta_xx = theta.diff('x', 2)
    theta_y = theta.diff('y')
    expr = (
        4 * theta.diff('x') * ai
        - 4 * theta * ai.diff('x')
        + 3 * theta * (theta.diff('y', 2) - theta.diff('x', 4))
        + 3 * (theta_xx * theta_xx - theta_y * theta_y)
    )
    return _result('kp_residual', expr, 2)


def wf_terms(theta: ExpPoly, model_F: str = 'log') -> Tuple[ExpPoly, ExpPoly]:
    """
    (ΘW^F_x, ΘW^F_y) for a symbolic profile.

    Only F = log is symbolic; there F'(Θ) = 1/Θ and the pair coincides with
    (wx_cleared, wy_cleared).

    Raises:
        OperatorError: any other profile
    """
    if model_F not in SUPPORTED_PROFILES:
        raise OperatorError(
            f"Unsupported symbolic profile '{model_F}'. Available: {', '.join(SUPPORTED_PROFILES)}"
        )
    return wx_cleared(theta).expr, wy_cleared(theta).expr


def log_numerator(theta: ExpPoly) -> OperatorResult:
    """
    ΘΘ_xx - Θ_x², i.e. Θ² ∂x² log Θ.

    Works over any variable set containing x. Zero exactly when
    Θ = e^{a x + b} with a, b independent of x, the kernel of the log ansatz.
    """
    return OperatorResult(
        name='log_numerator',
        expr=cleared_wronskian(theta, 'x', 1),
        cleared_by=2,
        model='KP' if theta.vars == KP_VARS else 'KdV',
    )


KP_OPERATORS: Dict[str, Callable[[ExpPoly], OperatorResult]] = {
    'heat': heat,
    'airy': airy,
    'wx': wx_cleared,
    'wy': wy_cleared,
    'T': t_operator_cleared,
    'kp_residual': kp_residual_cleared,
}

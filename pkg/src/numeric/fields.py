"""
Field Evaluation
================

Evaluates u from a phase in double precision. Derivatives of Θ are taken
exactly in the ring and only then evaluated, so u itself carries no
discretization error:

- log profile (KP, KdV):      u = 2∂x² log Θ = 2(ΘΘ_xx - Θ_x²)/Θ²
- arctan2 profile (mKdV):     u = 2∂x arctan Θ = 2Θ_x/(1 + Θ²)

Exponential sums are evaluated with a per-point shift by their largest
exponent so ratios stay finite far from the crest. Closed-form mKdV phases
with irrational or trigonometric data (breather, rational 2-soliton) are
evaluated directly through a numerator/denominator pair.

Usage:
    sample = eval_field(line_soliton(1, 1, Fraction(-1, 2), 1).theta, 'log', default_grid(), 'KP')
    export_csv(sample, 'fig1_left.csv')
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.algebra.expalg import KDV_VARS, KP_VARS, ExpPoly, Rational, as_fraction, eval_terms, max_exponent
from src.analysis.operators import cleared_wronskian
from src.numeric.grids import Grid

logger = logging.getLogger(__name__)

PROFILES = ('log', 'arctan2')
FIELD_MODELS = ('KP', 'KdV', 'mKdV')

FieldFunction = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


class FieldError(ValueError):
    """Raised for non-positive phases under the log profile and non-finite samples."""
    pass


def _check_profile(profile: str) -> None:
    if profile not in PROFILES:
        raise FieldError(f"Unknown profile '{profile}'. Available: {', '.join(PROFILES)}")


def _coords(theta: ExpPoly, t, x, y) -> Dict[str, np.ndarray]:
    if theta.vars == KP_VARS:
        return {'t': t, 'x': x, 'y': y}
    if theta.vars == KDV_VARS:
        return {'t': t, 'x': x}
    raise FieldError(f"Fields are defined for phases over {KP_VARS.names} or {KDV_VARS.names}")


def phase_field(theta: ExpPoly, profile: str = 'log') -> FieldFunction:
    """
    Pointwise field u(t, x, y) of a ring phase. Phases over (t, x) ignore y.

    Raises:
        FieldError: unknown profile, or Θ <= 0 at an evaluation point under log
    """
    _check_profile(profile)
    theta_x = theta.diff('x')
    numerator = cleared_wronskian(theta, 'x', 1)

    def log_field(t, x, y):
        coords = _coords(theta, t, x, y)
        shift = max_exponent(theta, coords)
        scaled = eval_terms(theta, coords, shift)
        if np.any(scaled <= 0):
            raise FieldError(
                f"log profile needs Θ > 0; found {int(np.sum(scaled <= 0))} non-positive samples"
            )
        return 2.0 * eval_terms(numerator, coords, 2.0 * shift) / scaled ** 2

    def arctan_field(t, x, y):
        coords = _coords(theta, t, x, y)
        shift = np.maximum(max_exponent(theta, coords), 0.0)
        scaled = eval_terms(theta, coords, shift)
        scaled_x = eval_terms(theta_x, coords, shift)
        damp = np.exp(-shift)
        return 2.0 * scaled_x * damp / (damp * damp + scaled * scaled)

    return log_field if profile == 'log' else arctan_field


def _ratio_field(n, d, n_x, d_x) -> np.ndarray:
    """u = 2(N_x D - N D_x)/(N² + D²), i.e. 2∂x arctan(N/D)."""
    return 2.0 * (n_x * d - n * d_x) / (n * n + d * d)


def breather(alpha: float, beta: float) -> FieldFunction:
    """
    mKdV breather with phase (β/α) sin(α(x+δt)) / cosh(β(x+γt)),
    δ = (3β² - α²)/4 and γ = (β² - 3α²)/4.
    """
    if alpha <= 0 or beta <= 0:
        raise FieldError(f"breather needs alpha, beta > 0 (got {alpha}, {beta})")
    delta = (3 * beta ** 2 - alpha ** 2) / 4
    gamma = (beta ** 2 - 3 * alpha ** 2) / 4

    def u(t, x, y):
        xi = x + delta * t
        zeta = x + gamma * t
        n = (beta / alpha) * np.sin(alpha * xi)
        n_x = beta * np.cos(alpha * xi)
        d = np.cosh(beta * zeta)
        d_x = beta * np.sinh(beta * zeta)
        return _ratio_field(n, d, n_x, d_x)

    return u


def mkdv_rational_two_soliton(c1: float, c2: float) -> FieldFunction:
    """
    mKdV 2-soliton with phase (e^{η1} + e^{η2}) / (1 - ρ² e^{η1+η2}),
    η_i = k_i x + k_i³ t / 4, k_i = √c_i, ρ = (k1 - k2)/(k1 + k2).
    """
    if c1 <= 0 or c2 <= 0:
        raise FieldError(f"mKdV 2-soliton needs c1, c2 > 0 (got {c1}, {c2})")
    k1, k2 = np.sqrt(c1), np.sqrt(c2)
    rho2 = ((k1 - k2) / (k1 + k2)) ** 2

    def u(t, x, y):
        eta1 = k1 * x + k1 ** 3 * t / 4
        eta2 = k2 * x + k2 ** 3 * t / 4
        shift = np.maximum.reduce([eta1, eta2, eta1 + eta2, np.zeros_like(eta1)])
        e1, e2, e12 = np.exp(eta1 - shift), np.exp(eta2 - shift), np.exp(eta1 + eta2 - shift)
        n = e1 + e2
        n_x = k1 * e1 + k2 * e2
        d = np.exp(-shift) - rho2 * e12
        d_x = -rho2 * (k1 + k2) * e12
        return _ratio_field(n, d, n_x, d_x)

    return u


def kdv_profile(k: float) -> FieldFunction:
    """Q_k = 2k² sech²(kx + k³t): the vertical KP soliton, constant in y."""
    def u(t, x, y):
        return 2.0 * k ** 2 / np.cosh(k * x + k ** 3 * t) ** 2 + 0.0 * y

    return u


def line_soliton_profile(a1: Rational, a2: Rational, k1: Rational, k2: Rational) -> FieldFunction:
    """½(k1 - k2)² sech²(½(θ1 - θ2) + ½ log(a1/a2))."""
    a1, a2, k1, k2 = (float(as_fraction(v)) for v in (a1, a2, k1, k2))
    amplitude = 0.5 * (k1 - k2) ** 2
    offset = 0.5 * np.log(a1 / a2)

    def u(t, x, y):
        phase = 0.5 * ((k1 - k2) * x + (k1 ** 2 - k2 ** 2) * y + (k1 ** 3 - k2 ** 3) * t) + offset
        return amplitude / np.cosh(phase) ** 2

    return u


def axes_for_model(grid: Grid, model: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(t, x, y) node arrays; for KdV and mKdV the grid's second axis is time."""
    if model not in FIELD_MODELS:
        raise FieldError(f"Unknown model '{model}'. Available: {', '.join(FIELD_MODELS)}")
    X, Y = grid.mesh()
    if model == 'KP':
        return np.full_like(X, grid.t0), X, Y
    return Y, X, np.zeros_like(X)


@dataclass
class FieldSample:
    grid: Grid
    values: np.ndarray
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        bad = int(np.sum(~np.isfinite(self.values)))
        if bad:
            raise FieldError(f"{bad} non-finite samples in field {self.meta.get('phase', '')}")

    @property
    def max(self) -> float:
        return float(np.max(self.values))

    def to_frame(self) -> pd.DataFrame:
        """One row per node, y-major: columns x, y, u."""
        X, Y = self.grid.mesh()
        return pd.DataFrame({
            'x': X.ravel(),
            'y': Y.ravel(),
            'u': self.values.ravel(),
        })

    def summary(self) -> Dict[str, Any]:
        iy, ix = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return {
            **self.meta,
            'grid': self.grid.to_dict(),
            'max_u': float(self.values[iy, ix]),
            'argmax': [float(self.grid.x[ix]), float(self.grid.y[iy])],
            'min_u': float(np.min(self.values)),
            'mean_u': float(np.mean(self.values)),
        }


def sample_field(u: FieldFunction, grid: Grid, model: str = 'KP',
                 meta: Optional[Dict[str, Any]] = None) -> FieldSample:
    t, x, y = axes_for_model(grid, model)
    values = np.asarray(u(t, x, y), dtype=float)
    return FieldSample(grid=grid, values=values, meta=dict(meta or {}, model=model))


def eval_field(theta: Union[ExpPoly, FieldFunction], profile: str, grid: Grid,
               model: str = 'KP', meta: Optional[Dict[str, Any]] = None) -> FieldSample:
    """
    Sample u on the grid.

    Args:
        theta: ring phase, or a closed-form field function
        profile: 'log' or 'arctan2'
        grid: node set
        model: 'KP', 'KdV' or 'mKdV'

    Raises:
        FieldError: non-positive Θ under log, non-finite values, bad model
    """
    _check_profile(profile)
    u = phase_field(theta, profile) if isinstance(theta, ExpPoly) else theta
    sample = sample_field(u, grid, model, dict(meta or {}, profile=profile))
    logger.info("Sampled %s field on %dx%d grid: max u = %.6g", model, *grid.shape, sample.max)
    return sample


def export_csv(sample: FieldSample, path: Union[str, Path]) -> None:
    """
    Write header `x,y,u` and one row per node in y-major order.

    Raises:
        OSError: the file cannot be written; the message names the path
    """
    path = Path(path)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        sample.to_frame().to_csv(path, index=False, float_format='%.17g', lineterminator='\n')
    except OSError as exc:
        raise OSError(f"export_csv: cannot write '{path}': {exc.strerror or exc}") from exc
    logger.info("Wrote %d rows to %s", sample.values.size, path)

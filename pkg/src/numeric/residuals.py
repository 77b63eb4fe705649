"""
Finite-Difference PDE Residuals
===============================

Cross-checks symbolic verdicts numerically. The field u is evaluated
pointwise at stencil offsets around every interior grid node and the PDE
is assembled from second-order central differences:

- KP:   -4u_tx + u_xxxx + 6(u_x² + u u_xx) + 3u_yy
- KdV:  -4u_t + u_xxx + 6u u_x
- mKdV: -4u_t + u_xxx + 6u² u_x

The residual of an exact solution shrinks like h², so a check passes when
the max residual is within max(floor, C·h²) and the observed order between
h and h/2 is 2 ± 0.3. A non-solution keeps an O(1) residual and an order
near 0.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from src.algebra.expalg import ExpPoly
from src.numeric.fields import FieldError, FieldFunction, axes_for_model, phase_field
from src.numeric.grids import DEFAULT_STEP, Grid

logger = logging.getLogger(__name__)

# C is calibrated so that max(floor, C·h²) admits the O(h²) truncation error
# of the gallery phases at h = 0.05 on [-10, 10]²
MODEL_TOLERANCES: Dict[str, Dict[str, float]] = {
    'KP': {'C': 400.0, 'floor': 1e-6},
    'KdV': {'C': 100.0, 'floor': 1e-6},
    'mKdV': {'C': 100.0, 'floor': 1e-6},
}

ORDER_TARGET = 2.0
ORDER_WINDOW = 0.3


class StencilError(FieldError):
    """Raised when the stencil does not fit inside the grid."""
    pass


def get_tolerance(model: str, h: float) -> float:
    if model not in MODEL_TOLERANCES:
        available = ', '.join(MODEL_TOLERANCES.keys())
        raise ValueError(f"Unknown model '{model}'. Available: {available}")
    config = MODEL_TOLERANCES[model]
    return max(config['floor'], config['C'] * h * h)


def pde_residual(u: FieldFunction, model: str, t: np.ndarray, x: np.ndarray,
                 y: np.ndarray, h: float) -> np.ndarray:
    """Pointwise central-difference residual of the model equation at (t, x, y)."""
    def at(dt=0.0, dx=0.0, dy=0.0):
        return u(t + dt * h, x + dx * h, y + dy * h)

    u0 = at()
    up, um = at(dx=1), at(dx=-1)
    u_x = (up - um) / (2 * h)
    u_xx = (up - 2 * u0 + um) / h ** 2
    upp, umm = at(dx=2), at(dx=-2)
    u_xxx = (upp - 2 * up + 2 * um - umm) / (2 * h ** 3)

    if model == 'KP':
        u_xxxx = (upp - 4 * up + 6 * u0 - 4 * um + umm) / h ** 4
        u_yy = (at(dy=1) - 2 * u0 + at(dy=-1)) / h ** 2
        u_tx = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h ** 2)
        return -4 * u_tx + u_xxxx + 6 * (u_x ** 2 + u0 * u_xx) + 3 * u_yy

    u_t = (at(dt=1) - at(dt=-1)) / (2 * h)
    if model == 'KdV':
        return -4 * u_t + u_xxx + 6 * u0 * u_x
    if model == 'mKdV':
        return -4 * u_t + u_xxx + 6 * u0 ** 2 * u_x
    raise FieldError(f"Unknown model '{model}'. Available: {', '.join(MODEL_TOLERANCES.keys())}")


def max_residual(u: FieldFunction, model: str, grid: Grid, h: float) -> float:
    """
    Max |residual| over nodes at least 2h from the grid edge.

    Raises:
        StencilError: h <= 0 or no node has room for the stencil
    """
    if h <= 0:
        raise StencilError(f"step must be positive (got {h})")
    mask = grid.interior_mask(2 * h)
    if not mask.any():
        raise StencilError(f"step {h} leaves no interior node on grid {grid.to_dict()}")
    t, x, y = axes_for_model(grid, model)
    residual = pde_residual(u, model, t[mask], x[mask], y[mask], h)
    if not np.all(np.isfinite(residual)):
        raise FieldError(f"non-finite residual at step {h}")
    return float(np.max(np.abs(residual)))


@dataclass
class ResidualReport:
    model: str
    profile: str
    h: float
    residual_h: float
    residual_h2: float
    order: Optional[float]
    tolerance: float
    passed: bool
    grid: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'max_residual': self.residual_h,
            'max_residual_half_step': self.residual_h2,
            'order': self.order,
            'h': self.h,
            'tolerance': self.tolerance,
            'order_window': [ORDER_TARGET - ORDER_WINDOW, ORDER_TARGET + ORDER_WINDOW],
            'passed': self.passed,
            'grid': self.grid,
            'model': self.model,
            'profile': self.profile,
        }


def observed_order(r_h: float, r_h2: float) -> Optional[float]:
    if r_h <= 0 or r_h2 <= 0:
        return None
    return float(np.log2(r_h / r_h2))


def fd_residual(theta: Union[ExpPoly, FieldFunction], model: str = 'KP', grid: Optional[Grid] = None,
                h: float = DEFAULT_STEP, profile: str = 'log',
                tolerance: Optional[float] = None) -> ResidualReport:
    """
    Residual of the model PDE at steps h and h/2, with the observed order.

    Args:
        theta: ring phase (evaluated with `profile`) or closed-form field
        model: 'KP', 'KdV' or 'mKdV'
        grid: node set, the default 201x201 grid on [-10, 10]² when omitted
        h: finite-difference step
        profile: 'log' or 'arctan2', used when theta is a ring phase
        tolerance: overrides max(floor, C·h²)

    Returns:
        ResidualReport; passed when the residual is within tolerance and the
        order lies in 2 ± 0.3, or when both residuals are below the floor
    """
    if grid is None:
        grid = Grid()
    u = phase_field(theta, profile) if isinstance(theta, ExpPoly) else theta
    tol = get_tolerance(model, h) if tolerance is None else tolerance
    r_h = max_residual(u, model, grid, h)
    r_h2 = max_residual(u, model, grid, h / 2)
    order = observed_order(r_h, r_h2)
    floor = MODEL_TOLERANCES[model]['floor']
    converged = order is not None and abs(order - ORDER_TARGET) <= ORDER_WINDOW
    passed = r_h <= tol and (converged or max(r_h, r_h2) <= floor)
    logger.info("%s residual: h=%g -> %.3e, h/2 -> %.3e, order %s, passed=%s",
                model, h, r_h, r_h2, 'n/a' if order is None else f'{order:.3f}', passed)
    return ResidualReport(
        model=model,
        profile=profile,
        h=h,
        residual_h=r_h,
        residual_h2=r_h2,
        order=order,
        tolerance=tol,
        passed=passed,
        grid=grid.to_dict(),
    )


def convergence_study(theta: Union[ExpPoly, FieldFunction], model: str, grid: Grid,
                      steps: Sequence[float], profile: str = 'log') -> Dict[str, Any]:
    """Residuals over a sequence of steps and the least-squares slope in log-log."""
    u = phase_field(theta, profile) if isinstance(theta, ExpPoly) else theta
    residuals: List[float] = [max_residual(u, model, grid, h) for h in steps]
    positive = [(h, r) for h, r in zip(steps, residuals) if r > 0]
    order = None
    if len(positive) >= 2:
        fit = np.polyfit(np.log([h for h, _ in positive]), np.log([r for _, r in positive]), 1)
        order = float(fit[0])
    return {'model': model, 'steps': list(steps), 'residuals': residuals, 'order': order}

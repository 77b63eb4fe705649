"""
Sampling Grids
==============

Rectangular node sets on which fields are sampled and PDE residuals are
checked. For KP the two axes are (x, y) at a fixed time t0; for the
(1+1)-dimensional KdV and mKdV models the second axis is time.
"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np

Axis = Tuple[float, float, int]

DEFAULT_GRID: Dict[str, Any] = {
    't0': 0.0,
    'x_range': (-10.0, 10.0, 201),
    'y_range': (-10.0, 10.0, 201),
}

DEFAULT_STEP = 0.05

MIN_NODES = 8


class GridError(ValueError):
    """Raised for degenerate grid specifications."""
    pass


@dataclass(frozen=True)
class Grid:
    t0: float = DEFAULT_GRID['t0']
    x_range: Axis = DEFAULT_GRID['x_range']
    y_range: Axis = DEFAULT_GRID['y_range']

    def __post_init__(self):
        for name, (low, high, count) in (('x', self.x_range), ('y', self.y_range)):
            if int(count) < MIN_NODES:
                raise GridError(f"{name}-axis needs at least {MIN_NODES} nodes (got {count})")
            if not low < high:
                raise GridError(f"{name}-axis range is degenerate ({low} >= {high})")

    @property
    def x(self) -> np.ndarray:
        low, high, count = self.x_range
        return np.linspace(low, high, int(count))

    @property
    def y(self) -> np.ndarray:
        low, high, count = self.y_range
        return np.linspace(low, high, int(count))

    @property
    def spacing(self) -> Tuple[float, float]:
        return (
            (self.x_range[1] - self.x_range[0]) / (self.x_range[2] - 1),
            (self.y_range[1] - self.y_range[0]) / (self.y_range[2] - 1),
        )

    @property
    def shape(self) -> Tuple[int, int]:
        """(rows, columns) = (y nodes, x nodes)."""
        return int(self.y_range[2]), int(self.x_range[2])

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Row-major node coordinates: row index runs over y, column index over x."""
        return np.meshgrid(self.x, self.y, indexing='xy')

    def interior_mask(self, margin: float) -> np.ndarray:
        """Nodes at least `margin` away from every edge."""
        X, Y = self.mesh()
        eps = 1e-12
        return (
            (X - self.x_range[0] >= margin - eps)
            & (self.x_range[1] - X >= margin - eps)
            & (Y - self.y_range[0] >= margin - eps)
            & (self.y_range[1] - Y >= margin - eps)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            't0': self.t0,
            'x_range': [self.x_range[0], self.x_range[1], int(self.x_range[2])],
            'y_range': [self.y_range[0], self.y_range[1], int(self.y_range[2])],
        }


def default_grid() -> Grid:
    return Grid(**DEFAULT_GRID)


def parse_grid(text: str, t0: float = 0.0) -> Grid:
    """
    Parse 'xmin,xmax,nx,ymin,ymax,ny' into a Grid.

    Raises:
        GridError: wrong field count or non-numeric fields
    """
    parts = [p.strip() for p in text.split(',')]
    if len(parts) != 6:
        raise GridError(f"Grid must be 'xmin,xmax,nx,ymin,ymax,ny' (got {text!r})")
    try:
        x0, x1, y0, y1 = float(parts[0]), float(parts[1]), float(parts[3]), float(parts[4])
        nx, ny = int(parts[2]), int(parts[5])
    except ValueError as exc:
        raise GridError(f"Non-numeric grid field in {text!r}") from exc
    return Grid(t0=t0, x_range=(x0, x1, nx), y_range=(y0, y1, ny))

"""B-spline bases on time grids (clamped, equally spaced knots)."""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline

from .errors import ValidationError
from .grids import TimeGrid


@dataclass(frozen=True)
class BSplineBasis:
    """`count` B-spline functions of a given order evaluated on a grid.

    Knots are equally spaced over [t_1, t_T] and clamped (each boundary knot
    repeated `order` times), so the basis is a partition of unity on the grid.
    """

    grid: TimeGrid
    order: int
    count: int
    knots: np.ndarray
    eval: np.ndarray  # T x count

    @property
    def degree(self) -> int:
        return self.order - 1

    def evaluate(self, points) -> np.ndarray:
        """Evaluate all basis functions at arbitrary points inside the domain."""
        x = np.asarray(points, dtype=float)
        return BSpline.design_matrix(x, self.knots, self.degree).toarray()


def build_basis(grid: TimeGrid, count: int = 12, order: int = 4) -> BSplineBasis:
    """Clamped B-spline basis with `count` functions of the given order."""
    if order < 1:
        raise ValidationError("order must be >= 1")
    if count < order:
        raise ValidationError(f"need count >= order, got count={count} order={order}")
    a, b = float(grid.points[0]), float(grid.points[-1])
    interior = np.linspace(a, b, count - order + 2)[1:-1]
    knots = np.concatenate([np.full(order, a), interior, np.full(order, b)])
    ev = BSpline.design_matrix(grid.points, knots, order - 1).toarray()
    return BSplineBasis(grid=grid, order=order, count=count, knots=knots, eval=ev)

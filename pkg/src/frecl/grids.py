"""Discretized functional-data containers: time grids, curve sets, datasets.

Curves are sampled on a shared grid of strictly increasing time points.
Integrals over the domain are approximated with trapezoidal quadrature
weights, so the L2 norm of a sampled curve f is (sum_q w_q f(t_q)^2)^(1/2).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


def trapezoid_weights(points) -> np.ndarray:
    """Trapezoidal quadrature weights for strictly increasing points.

    w_1 = (t_2-t_1)/2, w_T = (t_T-t_{T-1})/2, interior w_q = (t_{q+1}-t_{q-1})/2.
    The weights sum to t_T - t_1 and integrate affine functions exactly.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or pts.size < 2:
        raise ValidationError("need at least 2 time points")
    if not np.all(np.diff(pts) > 0):
        raise ValidationError("time points must be strictly increasing")
    w = np.empty_like(pts)
    w[0] = (pts[1] - pts[0]) / 2.0
    w[-1] = (pts[-1] - pts[-2]) / 2.0
    w[1:-1] = (pts[2:] - pts[:-2]) / 2.0
    return w


@dataclass(frozen=True)
class TimeGrid:
    """Observation time points with quadrature weights."""

    points: np.ndarray
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if self.weights is None:
            object.__setattr__(self, "weights", trapezoid_weights(pts))
        else:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != pts.shape:
                raise ValidationError("weights must match points")
            if np.any(w <= 0):
                raise ValidationError("quadrature weights must be positive")
            object.__setattr__(self, "weights", w)
        if pts.size < 2 or not np.all(np.diff(pts) > 0):
            raise ValidationError("grid needs >= 2 strictly increasing points")
        self.points.flags.writeable = False
        self.weights.flags.writeable = False

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def span(self) -> float:
        return float(self.points[-1] - self.points[0])

    @classmethod
    def regular(cls, start: float, stop: float, count: int) -> "TimeGrid":
        return cls(np.linspace(start, stop, count))


def curve_norm(curve, grid: TimeGrid, kind: str = "L2") -> float:
    """Quadrature norm of a sampled curve: L2 or L1."""
    f = np.asarray(curve, dtype=float)
    if f.shape != grid.points.shape:
        raise ValidationError(f"curve length {f.shape} != grid size {grid.size}")
    kind = kind.upper()
    if kind == "L2":
        return float(np.sqrt(np.sum(grid.weights * f * f)))
    if kind == "L1":
        return float(np.sum(grid.weights * np.abs(f)))
    raise ValidationError(f"unknown norm kind {kind!r}")


def curve_norms(values: np.ndarray, grid: TimeGrid, kind: str = "L2") -> np.ndarray:
    """Row-wise quadrature norms of an m x T array."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or v.shape[1] != grid.size:
        raise ValidationError("values must be m x T for this grid")
    kind = kind.upper()
    if kind == "L2":
        return np.sqrt((v * v) @ grid.weights)
    if kind == "L1":
        return np.abs(v) @ grid.weights
    raise ValidationError(f"unknown norm kind {kind!r}")


@dataclass(frozen=True)
class CurveSet:
    """m curves sampled on one shared grid; values is m x T, row = one curve."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValidationError("values must be a 2-D array (m x T)")
        if v.shape[1] != self.grid.size:
            raise ValidationError(
                f"curves have {v.shape[1]} points but grid has {self.grid.size}"
            )
        if not np.all(np.isfinite(v)):
            raise ValidationError("curve values must be finite (no NaN/inf)")
        object.__setattr__(self, "values", v)
        self.values.flags.writeable = False

    @property
    def n_curves(self) -> int:
        return self.values.shape[0]

    def subset(self, indices) -> "CurveSet":
        return CurveSet(self.grid, self.values[np.asarray(indices, dtype=np.intp)])


@dataclass(frozen=True)
class FunctionalDataset:
    """A response curve set Y and p predictor curve sets X_1..X_p.

    All curve sets share the observation count m; each variable may carry
    its own grid.
    """

    response: CurveSet
    predictors: tuple
    ids: tuple

    def __post_init__(self):
        preds = tuple(self.predictors)
        object.__setattr__(self, "predictors", preds)
        m = self.response.n_curves
        for j, x in enumerate(preds):
            if x.n_curves != m:
                raise ValidationError(f"predictor {j + 1} has {x.n_curves} rows, response has {m}")
        if self.ids is None:
            object.__setattr__(self, "ids", tuple(f"obs{i + 1}" for i in range(m)))
        else:
            ids = tuple(str(i) for i in self.ids)
            if len(ids) != m:
                raise ValidationError("ids length must equal observation count")
            object.__setattr__(self, "ids", ids)

    @property
    def n_obs(self) -> int:
        return self.response.n_curves

    @property
    def n_predictors(self) -> int:
        return len(self.predictors)

    def subset(self, indices) -> "FunctionalDataset":
        idx = np.asarray(indices, dtype=np.intp)
        return FunctionalDataset(
            response=self.response.subset(idx),
            predictors=tuple(x.subset(idx) for x in self.predictors),
            ids=tuple(self.ids[i] for i in idx),
        )

"""Curve preprocessing: centering, loess smoothing, replicate collapsing, filtering."""

import numpy as np

from .errors import ValidationError
from .grids import CurveSet, TimeGrid


def center_curves(cs: CurveSet) -> CurveSet:
    """Subtract the pointwise grand mean curve from every row."""
    if cs.n_curves < 1:
        raise ValidationError("cannot center an empty curve set")
    mean = cs.values.mean(axis=0)
    return CurveSet(cs.grid, cs.values - mean)


def loess_matrix(points, eval_points, span: float = 0.75, degree: int = 2) -> np.ndarray:
    """Linear smoother matrix S so that S @ y is the loess fit of y.

    Local weighted polynomial regression with tricube weights over the
    span-nearest neighbors of each evaluation point. Because the smoother
    is linear in y for a fixed design, one matrix serves every curve on
    the grid.
    """
    x = np.asarray(points, dtype=float)
    xe = np.asarray(eval_points, dtype=float)
    n = x.size
    if not 0 < span <= 1:
        raise ValidationError("span must be in (0, 1]")
    if degree < 0:
        raise ValidationError("degree must be >= 0")
    r = int(np.ceil(span * n))
    if r >= n:
        r = n - 1
    if r < degree + 1:
        raise ValidationError(
            f"span {span} gives {r} local points; need >= {degree + 1} for degree {degree}"
        )
    smoother = np.zeros((xe.size, n))
    for i, x0 in enumerate(xe):
        dist = np.abs(x - x0)
        h = np.sort(dist)[r]
        u = np.minimum(dist / h, 1.0)
        w = (1.0 - u**3) ** 3
        # local polynomial centered at x0 for conditioning; the fit at x0
        # is the intercept row of the weighted normal-equations solve
        basis = np.vander(x - x0, degree + 1, increasing=True)
        wb = w[:, None] * basis
        gram = basis.T @ wb
        try:
            coef_map = np.linalg.solve(gram, wb.T)
        except np.linalg.LinAlgError:
            coef_map = np.linalg.pinv(gram) @ wb.T
        smoother[i] = coef_map[0]
    return smoother


def loess_smooth(
    cs: CurveSet,
    span: float = 0.75,
    degree: int = 2,
    midpoints: bool = False,
) -> CurveSet:
    """Smooth every curve with a loess fit evaluated at the grid points.

    With midpoints=True the smoothed curves are also evaluated at interval
    midpoints, densifying the grid from T to 2T-1 points.
    """
    pts = cs.grid.points
    if midpoints:
        mids = (pts[:-1] + pts[1:]) / 2.0
        eval_pts = np.sort(np.concatenate([pts, mids]))
        out_grid = TimeGrid(eval_pts)
    else:
        eval_pts = pts
        out_grid = cs.grid
    smoother = loess_matrix(pts, eval_pts, span=span, degree=degree)
    return CurveSet(out_grid, cs.values @ smoother.T)


def median_collapse(replicates) -> np.ndarray:
    """Pointwise median over replicate measurements.

    `replicates` is a sequence with one entry per time point, each entry the
    replicate values observed there (counts may differ across points). An
    even count yields the mean of the two central order statistics.
    """
    out = np.empty(len(replicates))
    for q, vals in enumerate(replicates):
        v = np.asarray(vals, dtype=float)
        if v.size == 0:
            raise ValidationError(f"no replicates at time point {q}")
        out[q] = np.median(v)
    return out


def expression_filter(season_sets, threshold: float = 5.0, min_points: int = 20) -> np.ndarray:
    """Indices of rows expressed above `threshold` in >= `min_points` time
    points in every season.

    `season_sets` is a sequence of CurveSets (or m x T arrays) sharing the
    row count m. Returns the sorted retained row indices (possibly empty).
    """
    arrays = [s.values if isinstance(s, CurveSet) else np.asarray(s, dtype=float) for s in season_sets]
    if not arrays:
        raise ValidationError("need at least one season")
    m = arrays[0].shape[0]
    keep = np.ones(m, dtype=bool)
    for a in arrays:
        if a.shape[0] != m:
            raise ValidationError("all seasons must share the row count")
        keep &= (a > threshold).sum(axis=1) >= min_points
    return np.flatnonzero(keep)

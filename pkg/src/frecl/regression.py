"""Function-on-function linear regression with multiple functional predictors.

The model for one cluster,

    Y(t) = b0(t) + sum_j integral b_j(t, s) X_j(s) ds + noise,

is fitted by penalized least squares after expanding b0 on a B-spline basis
and each surface b_j on the tensor product of the response-grid basis with a
basis on predictor j's grid. The discretized integral uses each grid's
quadrature weights, and the loss weights squared errors by the response-grid
weights so it approximates the integrated squared error.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .basis import BSplineBasis, build_basis
from .errors import NumericalError, ValidationError
from .grids import CurveSet, FunctionalDataset, TimeGrid, curve_norm

PENALTY_KINDS = ("ridge", "second-difference")


@dataclass(frozen=True)
class FitConfig:
    """Penalized least-squares settings for the regression fitter."""

    lam: float = 1e-2
    basis_count: int = 12
    basis_order: int = 4
    penalty: str = "ridge"

    def __post_init__(self):
        if self.lam < 0:
            raise ValidationError("lam must be >= 0")
        if self.penalty not in PENALTY_KINDS:
            raise ValidationError(f"penalty must be one of {PENALTY_KINDS}")


@dataclass(frozen=True)
class RegressionCoefficients:
    """One cluster's fitted functional parameters in basis-coefficient form.

    intercept: d coefficients of b0 on the response basis.
    surfaces: p arrays, surfaces[j][a, b] multiplying B_a(t) * B_b(s) in b_j(t, s).
    """

    intercept: np.ndarray
    surfaces: tuple
    response_basis: BSplineBasis
    predictor_bases: tuple

    @property
    def coef_matrix(self) -> np.ndarray:
        """d x (1 + sum d_j) matrix [intercept | S_1 | ... | S_p]."""
        return np.hstack([self.intercept[:, None], *self.surfaces])

    def to_vector(self) -> np.ndarray:
        """Flatten in design_block column order: intercept, then each surface row-major."""
        return np.concatenate([self.intercept] + [s.ravel() for s in self.surfaces])


def predictor_scores(predictors, predictor_bases, n_obs: int = 1) -> np.ndarray:
    """m x (1 + sum d_j) matrix [1 | Z_1 | ... | Z_p].

    Z_j[i, b] = sum_s w_s B_b(t_s) X_ij(t_s) is predictor j's quadrature
    inner product with each of its basis functions. `n_obs` sizes the
    intercept column when there are no predictors.
    """
    blocks = []
    for x, eb in zip(predictors, predictor_bases):
        vals = x.values if isinstance(x, CurveSet) else np.atleast_2d(np.asarray(x, dtype=float))
        if vals.shape[1] != eb.grid.size:
            raise ValidationError("predictor curves do not match their basis grid")
        blocks.append((vals * eb.grid.weights) @ eb.eval)
    m = blocks[0].shape[0] if blocks else n_obs
    return np.hstack([np.ones((m, 1))] + blocks)


def design_block(predictors_i, response_basis: BSplineBasis, predictor_bases) -> np.ndarray:
    """Per-time-point feature matrix for one observation (T x n_coefficients).

    Row r concatenates the response-basis values [B_a(t_r)]_a with, for each
    predictor j, the block [B_a(t_r) * z_jb]_(a,b); its inner product with
    RegressionCoefficients.to_vector() is the discretized conditional
    expectation at t_r.
    """
    u = predictor_scores([np.asarray(x, dtype=float)[None, :] for x in predictors_i], predictor_bases)[0]
    et = response_basis.eval
    d = response_basis.count
    cols = [et]
    offset = 1
    for eb in predictor_bases:
        z = u[offset : offset + eb.count]
        cols.append((et[:, :, None] * z[None, None, :]).reshape(et.shape[0], d * eb.count))
        offset += eb.count
    return np.hstack(cols)


def _solve_kron_ridge(a: np.ndarray, s: np.ndarray, rhs: np.ndarray, lam: float) -> np.ndarray:
    """Solve (kron(a, s) + lam*I) vec(C) = vec(rhs) for C.

    Both factors are symmetric PSD, so their eigendecompositions diagonalize
    the system exactly: the solve reduces to an elementwise division in the
    joint eigenbasis.
    """
    va, qa = np.linalg.eigh(a)
    vs, qs = np.linalg.eigh(s)
    va = np.clip(va, 0.0, None)  # both factors are PSD up to roundoff
    vs = np.clip(vs, 0.0, None)
    denom = np.outer(va, vs) + lam
    if np.min(denom) <= 0 or (lam == 0 and np.min(denom) < 1e-13 * np.max(denom)):
        raise NumericalError("singular normal equations at lam=0; use lam > 0")
    return qa @ ((qa.T @ rhs @ qs) / denom) @ qs.T


def _second_diff_penalty(n: int) -> np.ndarray:
    if n < 3:
        return np.zeros((n, n))
    d2 = np.zeros((n - 2, n))
    for i in range(n - 2):
        d2[i, i : i + 3] = (1.0, -2.0, 1.0)
    return d2.T @ d2


def _penalty_matrix(cfg: FitConfig, d: int, pred_counts) -> np.ndarray:
    c = 1 + sum(pred_counts)
    if cfg.penalty == "ridge":
        return np.eye(d * c)
    # second differences along t for every coefficient column, plus along s
    # within each surface block; coefficients are laid out (a-major, column-minor)
    pt = _second_diff_penalty(d)
    s2 = np.zeros((c, c))
    offset = 1
    for dj in pred_counts:
        s2[offset : offset + dj, offset : offset + dj] = _second_diff_penalty(dj)
        offset += dj
    return np.kron(pt, np.eye(c)) + np.kron(np.eye(d), s2)


def fit(data: FunctionalDataset, cfg: FitConfig = FitConfig()) -> RegressionCoefficients:
    """Fit the regression model to the observations of one cluster.

    Minimizes sum_i sum_r w_r (Y_i(t_r) - Phi_i(t_r))^2 + lam * Penalty over
    all basis coefficients via the penalized normal equations.
    """
    if data.n_obs < 1:
        raise ValidationError("cannot fit an empty cluster")
    rb = build_basis(data.response.grid, cfg.basis_count, cfg.basis_order)
    pbs = tuple(build_basis(x.grid, cfg.basis_count, cfg.basis_order) for x in data.predictors)

    et, w = rb.eval, data.response.grid.weights
    u = predictor_scores(data.predictors, pbs, n_obs=data.n_obs)
    d, c = rb.count, u.shape[1]
    # normal equations factor over the time and observation axes:
    # G = kron(E' W E, U' U), rhs = vec(E' W Y' U)
    a = et.T @ (w[:, None] * et)
    s = u.T @ u
    rhs_mat = et.T @ (w[:, None] * data.response.values.T) @ u
    if cfg.penalty == "ridge":
        cmat = _solve_kron_ridge(a, s, rhs_mat, cfg.lam)
    else:
        lhs = np.kron(a, s) + cfg.lam * _penalty_matrix(cfg, d, [b.count for b in pbs])
        try:
            coef = scipy.linalg.cho_solve(scipy.linalg.cho_factor(lhs), rhs_mat.ravel())
        except np.linalg.LinAlgError:
            if cfg.lam == 0:
                raise NumericalError("singular normal equations at lam=0; use lam > 0") from None
            coef = np.linalg.lstsq(lhs, rhs_mat.ravel(), rcond=None)[0]
        cmat = coef.reshape(d, c)
    surfaces, offset = [], 1
    for eb in pbs:
        surfaces.append(cmat[:, offset : offset + eb.count])
        offset += eb.count
    return RegressionCoefficients(
        intercept=cmat[:, 0],
        surfaces=tuple(surfaces),
        response_basis=rb,
        predictor_bases=pbs,
    )


def predict(coeffs: RegressionCoefficients, predictors_i) -> np.ndarray:
    """Predicted response curve for one observation, on the response grid."""
    u = predictor_scores(
        [np.asarray(x, dtype=float)[None, :] for x in predictors_i], coeffs.predictor_bases
    )[0]
    return coeffs.response_basis.eval @ (coeffs.coef_matrix @ u)


def predict_all(coeffs: RegressionCoefficients, predictors, n_obs: int = 1) -> np.ndarray:
    """Predicted response curves for every observation (m x T)."""
    u = predictor_scores(predictors, coeffs.predictor_bases, n_obs=n_obs)
    return u @ coeffs.coef_matrix.T @ coeffs.response_basis.eval.T


def residual_norm(y, yhat, grid: TimeGrid, kind: str = "L2") -> float:
    """Norm of the fitted residual curve y - yhat."""
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    if y.shape != yhat.shape:
        raise ValidationError("y and yhat must have equal length")
    return curve_norm(y - yhat, grid, kind)

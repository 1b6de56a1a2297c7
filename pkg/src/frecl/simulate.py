"""Synthetic benchmark generator: known partition, cluster-specific regression
operators, random predictor curves, i.i.d. or AR(1) functional noise.

Response curves follow the cluster-mixture regression model

    Y_i(t_r) = b0_k(t_r) + sum_j sum_s w_s b_jk(t_r, t_s) X_ij(t_s) + eps_i(t_r)

with k the true cluster of observation i. Surfaces come either from a smooth
parametric family (tunable cluster separation) or from explicit basis
coefficients (exactly representable by the fitter's basis).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .clustering import Partition, random_initial_partition
from .errors import ValidationError
from .grids import CurveSet, FunctionalDataset, TimeGrid


@dataclass(frozen=True)
class NoiseSpec:
    """Functional error term: i.i.d. or lag-1 autoregressive over the grid."""

    kind: str = "iid"
    sigma2: float = 1.0
    rho: float = 0.5

    def __post_init__(self):
        if self.kind not in ("iid", "ar1"):
            raise ValidationError("noise kind must be 'iid' or 'ar1'")
        if self.sigma2 < 0:
            raise ValidationError("sigma2 must be >= 0")
        if self.kind == "ar1" and not abs(self.rho) < 1:
            raise ValidationError("ar1 requires |rho| < 1")


@dataclass(frozen=True)
class BetaSpec:
    """Grid-evaluated regression operators, one bundle per cluster.

    intercepts[k] is b0_k on the response grid; surfaces[k][j] is b_jk
    evaluated on (response grid x predictor-j grid).
    """

    response_grid: TimeGrid
    predictor_grids: tuple
    intercepts: tuple
    surfaces: tuple

    def __post_init__(self):
        if len(self.intercepts) != len(self.surfaces):
            raise ValidationError("need one intercept and one surface bundle per cluster")
        t = self.response_grid.size
        for b0, surfs in zip(self.intercepts, self.surfaces):
            if np.asarray(b0).shape != (t,):
                raise ValidationError("intercept curves must live on the response grid")
            if len(surfs) != len(self.predictor_grids):
                raise ValidationError("each cluster needs one surface per predictor")
            for s, g in zip(surfs, self.predictor_grids):
                if np.asarray(s).shape != (t, g.size):
                    raise ValidationError("surfaces must be (response x predictor) grid arrays")

    @property
    def n_clusters(self) -> int:
        return len(self.intercepts)

    @property
    def n_predictors(self) -> int:
        return len(self.predictor_grids)

    def separation(self) -> float:
        """Smallest quadrature L2 operator distance between two clusters."""
        wt = self.response_grid.weights
        best = np.inf
        for k in range(self.n_clusters):
            for kk in range(k + 1, self.n_clusters):
                d2 = np.sum(wt * (self.intercepts[k] - self.intercepts[kk]) ** 2)
                for j, g in enumerate(self.predictor_grids):
                    diff = self.surfaces[k][j] - self.surfaces[kk][j]
                    d2 += float(wt @ (diff * diff) @ g.weights)
                best = min(best, np.sqrt(d2))
        return float(best) if self.n_clusters > 1 else np.inf


def parametric_beta(
    grid: TimeGrid,
    n_clusters: int,
    n_predictors: int,
    amplitude: float = 0.25,
    gain_spread: float = 0.7,
    bump: float = 0.15,
    bump_width: float | None = None,
    intercept_scale: float = 0.0,
) -> BetaSpec:
    """Smooth surface family whose clusters differ in phase and harmonic gains.

    b_jk(t, s) = amplitude * sum_h h * g_hjk * cos(2*pi*h*(t - s)/P + phase_hjk)
                 + bump_jk * exp(-(t - s)^2 / (2 * tau^2)),   h = 1, 2, 3

    Per-cluster parameters are spread over the circle, so clusters crowd
    together (and the problem gets harder) as n_clusters grows. Each kernel
    harmonic transfers the matching harmonic of the predictor with a
    cluster-specific gain and phase; the h weighting offsets the 1/h decay of
    the predictor spectrum so every channel carries cluster signal. A pure
    rotation family is avoided on purpose: its continuous symmetry riddles
    the residual landscape with equivalent spurious optima.
    """
    t = grid.points
    period = grid.span
    tau = period / 8.0 if bump_width is None else bump_width
    diff = t[:, None] - t[None, :]
    ridge = np.exp(-(diff**2) / (2.0 * tau**2))
    pj = max(n_predictors, 1)
    intercepts, surfaces = [], []
    for k in range(n_clusters):
        angle = 2 * np.pi * k / n_clusters
        intercepts.append(intercept_scale * np.sin(2 * np.pi * t / period + angle))
        surfs = []
        for j in range(n_predictors):
            surf = bump * np.cos(angle + np.pi * j / 2.0) * ridge
            for h in (1, 2, 3):
                gain = 1.0 + gain_spread * np.cos(angle + 2 * np.pi * (h - 1) / 3.0 + np.pi * j / pj)
                phase = (-1.0) ** h * angle + np.pi * (h - 1) / 3.0 + np.pi * j / (2 * pj)
                surf = surf + amplitude * h * gain * np.cos(2 * np.pi * h * diff / period + phase)
            surfs.append(surf)
        surfaces.append(tuple(surfs))
    return BetaSpec(
        response_grid=grid,
        predictor_grids=tuple(grid for _ in range(n_predictors)),
        intercepts=tuple(intercepts),
        surfaces=tuple(surfaces),
    )


def beta_from_coefficients(models) -> BetaSpec:
    """Grid-evaluate fitted regression coefficient bundles (one per cluster)."""
    ms = list(models)
    if not ms:
        raise ValidationError("need at least one coefficient bundle")
    rb = ms[0].response_basis
    pbs = ms[0].predictor_bases
    intercepts, surfaces = [], []
    for m in ms:
        intercepts.append(rb.eval @ m.intercept)
        surfaces.append(tuple(rb.eval @ s @ eb.eval.T for s, eb in zip(m.surfaces, pbs)))
    return BetaSpec(
        response_grid=rb.grid,
        predictor_grids=tuple(eb.grid for eb in pbs),
        intercepts=tuple(intercepts),
        surfaces=tuple(surfaces),
    )


@dataclass(frozen=True)
class SimSpec:
    """Everything needed to generate one synthetic dataset."""

    m: int
    grid: TimeGrid
    beta: BetaSpec
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    predictor_source: str = "fourier"
    pool: tuple = ()  # curve pool per predictor, for resampling
    harmonics: int = 4
    seed: int | None = None

    def __post_init__(self):
        if self.m < self.beta.n_clusters:
            raise ValidationError("need m >= number of clusters")
        if self.predictor_source not in ("fourier", "pool"):
            raise ValidationError("predictor_source must be 'fourier' or 'pool'")
        if self.predictor_source == "pool" and len(self.pool) != self.beta.n_predictors:
            raise ValidationError("pool mode needs one curve pool per predictor")

    @property
    def n_clusters(self) -> int:
        return self.beta.n_clusters

    @property
    def n_predictors(self) -> int:
        return self.beta.n_predictors


def draw_true_partition(m: int, k: int, rng) -> Partition:
    """Random ground-truth partition with non-empty clusters."""
    return random_initial_partition(m, k, rng)


def sample_predictors(spec: SimSpec, rng) -> list:
    """Predictor curve sets carrying no cluster signal.

    fourier mode: X(t) = sum_h u_h cos(2*pi*h*t/P) + v_h sin(2*pi*h*t/P) with
    u_h, v_h ~ N(0, h^-2) and P the grid span. pool mode resamples whole
    observations (one shared row draw across predictors) with replacement.
    """
    rng = np.random.default_rng(rng)
    out = []
    if spec.predictor_source == "pool":
        pools = [p.values if isinstance(p, CurveSet) else np.asarray(p, dtype=float) for p in spec.pool]
        for p in pools:
            if p.shape[0] == 0:
                raise ValidationError("empty curve pool")
        rows = rng.integers(0, pools[0].shape[0], size=spec.m)
        return [CurveSet(g, p[rows]) for p, g in zip(pools, spec.beta.predictor_grids)]
    h = np.arange(1, spec.harmonics + 1)
    for g in spec.beta.predictor_grids:
        angles = 2 * np.pi * np.outer(h, g.points) / g.span
        u = rng.standard_normal((spec.m, h.size)) / h
        v = rng.standard_normal((spec.m, h.size)) / h
        out.append(CurveSet(g, u @ np.cos(angles) + v @ np.sin(angles)))
    return out


def ar1_noise(t: int, rho: float, sigma2: float, rng) -> np.ndarray:
    """Stationary AR(1) error curve: eps_1 ~ N(0, sigma2/(1-rho^2)), then
    eps_q = rho*eps_(q-1) + N(0, sigma2)."""
    return _ar1_matrix(1, t, rho, sigma2, np.random.default_rng(rng))[0]


def _ar1_matrix(m: int, t: int, rho: float, sigma2: float, rng) -> np.ndarray:
    if not abs(rho) < 1:
        raise ValidationError("ar1 requires |rho| < 1")
    start = rng.standard_normal(m) * np.sqrt(sigma2 / (1.0 - rho**2))
    innov = rng.standard_normal((m, t - 1)) * np.sqrt(sigma2)
    x = np.concatenate([start[:, None], innov], axis=1)
    return lfilter([1.0], [1.0, -rho], x, axis=1)


@dataclass(frozen=True)
class SimData:
    """Generated dataset with its ground truth and diagnostics."""

    dataset: FunctionalDataset
    truth: Partition
    beta: BetaSpec
    clean_response: np.ndarray  # noiseless m x T signal


def generate(spec: SimSpec) -> SimData:
    """Generate (dataset, true partition, operators used) from the mixture model."""
    rng = np.random.default_rng(spec.seed)
    truth = draw_true_partition(spec.m, spec.n_clusters, rng)
    predictors = sample_predictors(spec, rng)
    t = spec.grid.size
    clean = np.empty((spec.m, t))
    for k in range(spec.n_clusters):
        idx = truth.members(k)
        if idx.size == 0:
            continue
        phi = np.tile(spec.beta.intercepts[k], (idx.size, 1))
        for j, x in enumerate(predictors):
            wj = spec.beta.predictor_grids[j].weights
            phi += (x.values[idx] * wj) @ spec.beta.surfaces[k][j].T
        clean[idx] = phi
    if spec.noise.kind == "ar1":
        eps = _ar1_matrix(spec.m, t, spec.noise.rho, spec.noise.sigma2, rng)
    else:
        eps = rng.standard_normal((spec.m, t)) * np.sqrt(spec.noise.sigma2)
    dataset = FunctionalDataset(
        response=CurveSet(spec.grid, clean + eps),
        predictors=tuple(predictors),
        ids=tuple(f"g{i + 1}" for i in range(spec.m)),
    )
    return SimData(dataset=dataset, truth=truth, beta=spec.beta, clean_response=clean)


def sigma2_for_snr(clean: np.ndarray, grid: TimeGrid, snr: float, noise: NoiseSpec) -> float:
    """Innovation variance making mean ||signal||^2 / E||eps||^2 equal `snr`.

    E||eps||^2 under the grid quadrature is span*sigma2 for i.i.d. noise and
    span*sigma2/(1-rho^2) for stationary AR(1).
    """
    power = float(np.mean((clean * clean) @ grid.weights))
    scale = grid.span if noise.kind == "iid" else grid.span / (1.0 - noise.rho**2)
    return power / (snr * scale)

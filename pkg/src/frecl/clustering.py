"""Iterative regression-clustering runs: fit per cluster, reassign by residual norm.

A run alternates fitting one regression model per non-empty cluster with
reallocating every observation to the model under which its residual norm is
smallest. Empty clusters are dropped after each reallocation. A run stops when
two consecutive reallocations produce the same partition (converged), when a
2-cycle is detected, or when the iteration budget is exhausted.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .grids import FunctionalDataset, curve_norms
from .regression import FitConfig, fit, predict_all

NORM_KINDS = ("L1", "L2")


@dataclass(frozen=True)
class Partition:
    """Assignment of m observations to clusters; labels are 0-based.

    `n_clusters` is the declared cluster count and may exceed the number of
    labels actually present (empty clusters are representable).
    """

    labels: np.ndarray
    n_clusters: int

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", lab)
        if lab.ndim != 1 or lab.size == 0:
            raise ValidationError("labels must be a non-empty 1-D array")
        if lab.min() < 0 or lab.max() >= self.n_clusters:
            raise ValidationError("labels must lie in [0, n_clusters)")
        self.labels.flags.writeable = False

    @property
    def n_obs(self) -> int:
        return self.labels.size

    def non_empty(self) -> int:
        return int(np.unique(self.labels).size)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.labels == k)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_clusters)

    def canonical(self) -> "Partition":
        """Relabel clusters by first appearance and drop empty ones."""
        _, first_pos, inverse = np.unique(self.labels, return_index=True, return_inverse=True)
        order = np.argsort(np.argsort(first_pos))
        return Partition(order[inverse], int(first_pos.size))

    def same_as(self, other: "Partition") -> bool:
        """Equality up to cluster relabeling."""
        a, b = self.canonical().labels, other.canonical().labels
        return a.shape == b.shape and bool(np.array_equal(a, b))


@dataclass(frozen=True)
class RunConfig:
    """Settings for a single clustering run."""

    n_clusters: int
    max_iterations: int = 300
    norm_kind: str = "L2"
    fit: FitConfig = field(default_factory=FitConfig)
    seed: int | None = None

    def __post_init__(self):
        if self.n_clusters < 1:
            raise ValidationError("n_clusters must be >= 1")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        object.__setattr__(self, "norm_kind", self.norm_kind.upper())
        if self.norm_kind not in NORM_KINDS:
            raise ValidationError(f"norm_kind must be one of {NORM_KINDS}")


@dataclass(frozen=True)
class RunResult:
    """Outcome of one run."""

    partition: Partition
    iterations: int
    converged: bool
    mse_trace: np.ndarray
    k_trace: np.ndarray
    partition_trace: tuple = ()


def random_initial_partition(m: int, k: int, rng) -> Partition:
    """Random partition of m observations into k non-empty clusters.

    Every observation gets a uniform label, then one seed observation per
    cluster (drawn without replacement) enforces non-emptiness.
    """
    if not 1 <= k <= m:
        raise ValidationError(f"need 1 <= k <= m, got k={k} m={m}")
    rng = np.random.default_rng(rng)
    labels = rng.integers(0, k, size=m)
    seeds = rng.choice(m, size=k, replace=False)
    labels[seeds] = np.arange(k)
    return Partition(labels, k)


def fit_cluster_models(dataset: FunctionalDataset, partition: Partition, fit_cfg: FitConfig):
    """One fitted model per non-empty cluster, in cluster-label order."""
    return [
        fit(dataset.subset(partition.members(k)), fit_cfg)
        for k in np.unique(partition.labels)
    ]


def residual_matrix(dataset: FunctionalDataset, models, norm_kind: str = "L2") -> np.ndarray:
    """m x K matrix of residual norms of every observation under every model."""
    cols = []
    for model in models:
        yhat = predict_all(model, dataset.predictors, n_obs=dataset.n_obs)
        cols.append(curve_norms(dataset.response.values - yhat, dataset.response.grid, norm_kind))
    return np.column_stack(cols)


def reassign(dataset: FunctionalDataset, models, norm_kind: str = "L2") -> Partition:
    """Reallocate each observation to its best-fitting model.

    Ties break toward the smallest cluster index.
    """
    if not models:
        raise ValidationError("need at least one fitted model")
    resid = residual_matrix(dataset, models, norm_kind)
    return Partition(np.argmin(resid, axis=1), len(models))


def frecl_run(
    dataset: FunctionalDataset,
    cfg: RunConfig,
    rng=None,
    track_partitions: bool = False,
) -> RunResult:
    """One full fit/reassign run from a random initial partition.

    The convergence flag means the last two partitions of the run (including
    the initial one when the budget is a single iteration) are equal up to
    relabeling; a detected 2-cycle stops the run unconverged.
    """
    if cfg.n_clusters > dataset.n_obs:
        raise ValidationError("n_clusters cannot exceed the number of observations")
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    current = random_initial_partition(dataset.n_obs, cfg.n_clusters, rng).canonical()
    history = [current]
    mse_trace, k_trace, partition_trace = [], [], []
    converged = False
    iterations = 0
    for _ in range(cfg.max_iterations):
        models = fit_cluster_models(dataset, current, cfg.fit)
        resid = residual_matrix(dataset, models, cfg.norm_kind)
        labels = np.argmin(resid, axis=1)
        new = Partition(labels, len(models)).canonical()
        iterations += 1
        mse_trace.append(float(np.mean(resid[np.arange(dataset.n_obs), labels] ** 2)))
        k_trace.append(new.n_clusters)
        if track_partitions:
            partition_trace.append(new)
        history.append(new)
        current = new
        if iterations >= 2 and history[-1].same_as(history[-2]):
            converged = True
            break
        if iterations >= 2 and history[-1].same_as(history[-3]):
            break  # 2-cycle: stop without convergence
    else:
        converged = history[-1].same_as(history[-2])
    return RunResult(
        partition=current,
        iterations=iterations,
        converged=converged,
        mse_trace=np.asarray(mse_trace),
        k_trace=np.asarray(k_trace, dtype=int),
        partition_trace=tuple(partition_trace),
    )


def mse_of_partition(
    dataset: FunctionalDataset,
    partition: Partition,
    fit_cfg: FitConfig = FitConfig(),
    norm_kind: str = "L2",
) -> float:
    """Mean over all observations of the squared residual norm under the
    model refitted to their own cluster."""
    if dataset.n_obs == 0:
        raise ValidationError("empty dataset")
    total = 0.0
    for k in np.unique(partition.labels):
        idx = partition.members(k)
        sub = dataset.subset(idx)
        model = fit(sub, fit_cfg)
        yhat = predict_all(model, sub.predictors, n_obs=sub.n_obs)
        r = curve_norms(sub.response.values - yhat, sub.response.grid, norm_kind)
        total += float(np.sum(r**2))
    return total / dataset.n_obs


def elbow_table(dataset: FunctionalDataset, k_values, cfg: RunConfig, n_runs: int = 100, master_seed=None):
    """(requested K, final non-empty K, MSE) per candidate K, for elbow plots.

    Each row runs the full consensus pipeline at that K and reports the MSE of
    the final partition under refitted models.
    """
    from .consensus import frecl_consensus

    if not k_values:
        raise ValidationError("k_values must be non-empty")
    rows = []
    for k in k_values:
        run_cfg = RunConfig(
            n_clusters=int(k),
            max_iterations=cfg.max_iterations,
            norm_kind=cfg.norm_kind,
            fit=cfg.fit,
            seed=cfg.seed,
        )
        result = frecl_consensus(dataset, run_cfg, n_runs=n_runs, master_seed=master_seed)
        final = result.partition
        rows.append((int(k), final.non_empty(), mse_of_partition(dataset, final, cfg.fit, cfg.norm_kind)))
    return rows

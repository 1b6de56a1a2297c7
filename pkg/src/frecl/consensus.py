"""Consensus aggregation of repeated clustering runs.

Launches L independent runs, accumulates co-membership indicators of the
convergent ones into a consensus count matrix B, and clusters the rows of B
with k-means to produce the final partition.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .clustering import Partition, RunConfig, frecl_run
from .errors import NumericalError, ValidationError
from .grids import FunctionalDataset
from .kmeans import kmeans
from .metrics import adjusted_rand_index


def comembership(partition: Partition) -> np.ndarray:
    """m x m binary matrix, entry (i, j) = 1 iff i and j share a cluster."""
    labels = partition.labels
    return (labels[:, None] == labels[None, :]).astype(np.int64)


@dataclass(frozen=True)
class ConsensusMatrix:
    """Integer co-clustering counts accumulated over convergent runs."""

    counts: np.ndarray
    runs_used: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", c)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValidationError("consensus counts must be square")


def accumulate(memberships) -> ConsensusMatrix:
    """Elementwise sum of co-membership matrices."""
    mats = [np.asarray(a, dtype=np.int64) for a in memberships]
    if not mats:
        raise ValidationError("need at least one co-membership matrix")
    shape = mats[0].shape
    for a in mats:
        if a.shape != shape:
            raise ValidationError("co-membership matrices must share dimensions")
    total = np.zeros(shape, dtype=np.int64)
    for a in mats:
        total += a
    return ConsensusMatrix(counts=total, runs_used=len(mats))


def kmeans_rows(matrix, k: int, n_restarts: int = 10, rng=None) -> Partition:
    """K-means on the rows of a consensus matrix (raw counts, Euclidean)."""
    counts = matrix.counts if isinstance(matrix, ConsensusMatrix) else np.asarray(matrix)
    result = kmeans(counts.astype(float), k, n_restarts=n_restarts, rng=rng)
    return Partition(result.labels, k)


@dataclass(frozen=True)
class RunSummary:
    """Per-run diagnostics within a consensus experiment."""

    run: int
    converged: bool
    iterations: int
    mse: float
    ari_to_final: float


@dataclass(frozen=True)
class ConsensusResult:
    partition: Partition
    matrix: ConsensusMatrix
    runs: tuple

    @property
    def n_convergent(self) -> int:
        return sum(1 for r in self.runs if r.converged)


def frecl_consensus(
    dataset: FunctionalDataset,
    cfg: RunConfig,
    n_runs: int = 100,
    master_seed=None,
    n_restarts: int = 10,
    threads: int = 1,
) -> ConsensusResult:
    """Run `n_runs` independent clustering runs and aggregate by consensus.

    Non-convergent runs are discarded; if none converge this raises
    NumericalError. Per-run seeds derive from `master_seed` (falling back to
    cfg.seed), so the output does not depend on the execution order of runs.
    """
    if n_runs < 1:
        raise ValidationError("n_runs must be >= 1")
    seed_root = np.random.SeedSequence(cfg.seed if master_seed is None else master_seed)
    children = seed_root.spawn(n_runs + 1)

    def one_run(i):
        return frecl_run(dataset, cfg, rng=np.random.default_rng(children[i]))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_run, range(n_runs)))
    else:
        results = [one_run(i) for i in range(n_runs)]

    convergent = [r for r in results if r.converged]
    if not convergent:
        raise NumericalError(f"no convergent runs out of {n_runs}")
    matrix = accumulate([comembership(r.partition) for r in convergent])
    final = kmeans_rows(matrix, cfg.n_clusters, n_restarts=n_restarts, rng=np.random.default_rng(children[-1]))
    summaries = tuple(
        RunSummary(
            run=i,
            converged=r.converged,
            iterations=r.iterations,
            mse=float(r.mse_trace[-1]),
            ari_to_final=adjusted_rand_index(r.partition, final) if r.converged else float("nan"),
        )
        for i, r in enumerate(results)
    )
    return ConsensusResult(partition=final, matrix=matrix, runs=summaries)

import numpy as np
import pytest

from frecl import (
    ConsensusMatrix,
    NumericalError,
    Partition,
    RunConfig,
    ValidationError,
    accumulate,
    adjusted_rand_index,
    comembership,
    frecl_consensus,
    frecl_run,
    kmeans_rows,
)
from frecl.kmeans import kmeans


class TestComembership:
    def test_all_in_one(self):
        a = comembership(Partition(np.zeros(4, dtype=int), 1))
        assert np.all(a == 1)

    def test_singletons(self):
        a = comembership(Partition(np.arange(5), 5))
        assert np.array_equal(a, np.eye(5, dtype=int))

    def test_pairs(self):
        a = comembership(Partition(np.array([0, 0, 1]), 2))
        assert a[0, 1] == 1 and a[0, 2] == 0 and a[1, 2] == 0
        assert np.array_equal(a, a.T) and np.all(np.diag(a) == 1)


class TestAccumulate:
    def test_single_input(self):
        a = comembership(Partition(np.array([0, 1, 0]), 2))
        b = accumulate([a])
        assert b.runs_used == 1 and np.array_equal(b.counts, a)

    def test_identical_inputs_scale(self):
        a = comembership(Partition(np.array([0, 1, 0]), 2))
        b = accumulate([a] * 5)
        assert b.runs_used == 5 and np.array_equal(b.counts, 5 * a)

    def test_disagreeing_pairwise_counts(self):
        p1 = Partition(np.array([0, 0, 1]), 2)
        p2 = Partition(np.array([0, 1, 1]), 2)
        b = accumulate([comembership(p1), comembership(p2)])
        assert b.counts[0, 1] == 1 and b.counts[1, 2] == 1 and b.counts[0, 2] == 0
        assert np.all(np.diag(b.counts) == 2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            accumulate([np.eye(3, dtype=int), np.eye(4, dtype=int)])

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            accumulate([])


class TestKmeansRows:
    def test_recovers_partition_from_identical_runs(self, rng):
        labels = rng.integers(0, 3, 30)
        labels[:3] = [0, 1, 2]
        truth = Partition(labels, 3)
        b = accumulate([comembership(truth)] * 7)
        got = kmeans_rows(b, 3, rng=rng)
        assert adjusted_rand_index(truth, got) == 1.0

    def test_k_one(self, rng):
        b = ConsensusMatrix(np.eye(6, dtype=int), 1)
        assert np.all(kmeans_rows(b, 1, rng=rng).labels == 0)

    def test_k_equals_m_distinct_rows(self, rng):
        counts = np.eye(5, dtype=int) * 4
        got = kmeans_rows(ConsensusMatrix(counts, 4), 5, rng=rng)
        assert got.non_empty() == 5

    def test_scaling_invariance(self):
        labels = np.array([0, 0, 1, 1, 2, 2])
        b1 = accumulate([comembership(Partition(labels, 3))] * 2)
        b2 = accumulate([comembership(Partition(labels, 3))] * 20)
        a1 = kmeans_rows(b1, 3, rng=np.random.default_rng(0))
        a2 = kmeans_rows(b2, 3, rng=np.random.default_rng(0))
        assert adjusted_rand_index(a1, a2) == 1.0


class TestKmeansEngine:
    def test_inertia_trace_non_increasing(self, rng):
        for seed in range(5):
            x = np.random.default_rng(seed).standard_normal((60, 4))
            res = kmeans(x, 4, n_restarts=1, rng=np.random.default_rng(seed))
            assert np.all(np.diff(res.inertia_trace) <= 1e-9)

    def test_more_clusters_than_distinct_rows(self):
        x = np.tile(np.array([[0.0, 0.0], [1.0, 1.0]]), (3, 1))
        res = kmeans(x, 4, rng=np.random.default_rng(1))
        assert np.unique(res.labels).size <= 2
        assert res.inertia < 1e-12

    def test_validation(self, rng):
        with pytest.raises(ValidationError):
            kmeans(np.ones((3, 2)), 4, rng=rng)
        with pytest.raises(ValidationError):
            kmeans(np.ones(5), 2, rng=rng)


class TestFreclConsensus:
    def test_single_run_consistency(self, separable_sim):
        cfg = RunConfig(n_clusters=2, seed=3)
        single = frecl_run(separable_sim.dataset, cfg, rng=np.random.default_rng(np.random.SeedSequence(99).spawn(2)[0]))
        cons = frecl_consensus(separable_sim.dataset, cfg, n_runs=1, master_seed=99)
        assert single.converged
        assert cons.partition.same_as(single.partition)

    def test_agreeing_runs_return_their_partition(self, separable_sim):
        # master_seed 6 makes all six runs land on the same partition
        cfg = RunConfig(n_clusters=2, seed=1)
        cons = frecl_consensus(separable_sim.dataset, cfg, n_runs=6, master_seed=6)
        aris = [r.ari_to_final for r in cons.runs if r.converged]
        assert all(a == 1.0 for a in aris)
        assert adjusted_rand_index(separable_sim.truth, cons.partition) == 1.0

    def test_reproducible_and_thread_invariant(self, separable_sim):
        cfg = RunConfig(n_clusters=2, seed=1)
        a = frecl_consensus(separable_sim.dataset, cfg, n_runs=8, master_seed=7, threads=1)
        b = frecl_consensus(separable_sim.dataset, cfg, n_runs=8, master_seed=7, threads=4)
        assert np.array_equal(a.matrix.counts, b.matrix.counts)
        assert np.array_equal(a.partition.labels, b.partition.labels)
        assert [r.iterations for r in a.runs] == [r.iterations for r in b.runs]

    def test_zero_convergent_runs_fail(self, separable_sim):
        cfg = RunConfig(n_clusters=3, max_iterations=1, seed=2)
        with pytest.raises(NumericalError):
            frecl_consensus(separable_sim.dataset, cfg, n_runs=4, master_seed=11)

    def test_diagnostics_cover_all_runs(self, separable_sim):
        cfg = RunConfig(n_clusters=2, seed=1)
        cons = frecl_consensus(separable_sim.dataset, cfg, n_runs=5, master_seed=13)
        assert len(cons.runs) == 5
        assert cons.n_convergent == sum(r.converged for r in cons.runs)
        assert all(np.isfinite(r.mse) for r in cons.runs)

import numpy as np
import pytest

from frecl import (
    FitConfig,
    NoiseSpec,
    Partition,
    RunConfig,
    SimSpec,
    ValidationError,
    adjusted_rand_index,
    beta_from_coefficients,
    build_basis,
    elbow_table,
    frecl_run,
    generate,
    mse_of_partition,
    random_initial_partition,
    reassign,
)
from frecl.clustering import fit_cluster_models, residual_matrix
from frecl.grids import curve_norms
from frecl.regression import RegressionCoefficients, predict_all


class TestPartition:
    def test_canonical_relabels_by_first_appearance(self):
        p = Partition(np.array([2, 2, 0, 1, 0]), 3)
        assert p.canonical().labels.tolist() == [0, 0, 1, 2, 1]

    def test_canonical_drops_empty(self):
        p = Partition(np.array([0, 3, 3]), 5)
        c = p.canonical()
        assert c.n_clusters == 2 and c.labels.tolist() == [0, 1, 1]

    def test_same_as_up_to_relabeling(self):
        a = Partition(np.array([0, 0, 1, 2]), 3)
        b = Partition(np.array([5, 5, 0, 1]), 6)
        assert a.same_as(b)
        assert not a.same_as(Partition(np.array([0, 1, 1, 2]), 3))

    def test_label_range_checked(self):
        with pytest.raises(ValidationError):
            Partition(np.array([0, 3]), 3)


class TestRandomInitialPartition:
    def test_k_equals_m_gives_singletons(self, rng):
        p = random_initial_partition(7, 7, rng)
        assert sorted(p.labels.tolist()) == list(range(7))

    def test_k_one(self, rng):
        assert np.all(random_initial_partition(12, 1, rng).labels == 0)

    def test_never_empty(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            p = random_initial_partition(100, 3, rng)
            assert p.non_empty() == 3

    def test_k_above_m_rejected(self, rng):
        with pytest.raises(ValidationError):
            random_initial_partition(3, 4, rng)

    def test_deterministic_per_seed(self):
        a = random_initial_partition(50, 4, np.random.default_rng(9))
        b = random_initial_partition(50, 4, np.random.default_rng(9))
        assert np.array_equal(a.labels, b.labels)


class TestReassign:
    def test_single_model_lumps_everything(self, separable_sim):
        models = fit_cluster_models(separable_sim.dataset, Partition(np.zeros(80, dtype=int), 1), FitConfig())
        p = reassign(separable_sim.dataset, models)
        assert np.all(p.labels == 0)

    def test_exact_model_wins(self, separable_sim):
        ds = separable_sim.dataset
        truth = separable_sim.truth
        models = fit_cluster_models(ds, truth, FitConfig())
        p = reassign(ds, models)
        assert adjusted_rand_index(truth, p) == 1.0

    def test_tie_breaks_to_smallest_index(self, separable_sim):
        ds = separable_sim.dataset
        model = fit_cluster_models(ds, Partition(np.zeros(80, dtype=int), 1), FitConfig())[0]
        p = reassign(ds, [model, model])  # identical models force ties
        assert np.all(p.labels == 0)

    def test_no_models_rejected(self, separable_sim):
        with pytest.raises(ValidationError):
            reassign(separable_sim.dataset, [])


class TestFreclRun:
    def test_k1_converges_after_second_iteration(self, separable_sim):
        r = frecl_run(separable_sim.dataset, RunConfig(n_clusters=1, seed=0))
        assert r.converged and r.iterations == 2
        assert adjusted_rand_index(r.partition, r.partition) == 1.0

    def test_recovers_noiseless_two_clusters(self, separable_sim):
        r = frecl_run(separable_sim.dataset, RunConfig(n_clusters=2, seed=3))
        assert r.converged
        assert adjusted_rand_index(separable_sim.truth, r.partition) == 1.0

    def test_single_iteration_budget(self, separable_sim):
        r = frecl_run(separable_sim.dataset, RunConfig(n_clusters=2, max_iterations=1, seed=3))
        assert r.iterations == 1 and not r.converged
        r1 = frecl_run(separable_sim.dataset, RunConfig(n_clusters=1, max_iterations=1, seed=3))
        assert r1.iterations == 1 and r1.converged  # all-in-one start reproduces itself

    def test_reassignment_never_increases_cost_under_current_models(self, separable_sim):
        ds = separable_sim.dataset
        rng = np.random.default_rng(5)
        current = random_initial_partition(ds.n_obs, 2, rng).canonical()
        for _ in range(6):
            models = fit_cluster_models(ds, current, FitConfig())
            resid = residual_matrix(ds, models)
            before = float(np.sum(resid[np.arange(ds.n_obs), current.labels] ** 2))
            new = reassign(ds, models)
            after = float(np.sum(resid[np.arange(ds.n_obs), new.labels] ** 2))
            assert after <= before + 1e-9
            if new.canonical().same_as(current):
                break
            current = new.canonical()

    def test_k_trace_non_increasing(self, separable_sim):
        for seed in range(5):
            r = frecl_run(separable_sim.dataset, RunConfig(n_clusters=4, seed=seed))
            assert np.all(np.diff(r.k_trace) <= 0)

    def test_converged_is_a_fixed_point(self, separable_sim):
        ds = separable_sim.dataset
        r = frecl_run(ds, RunConfig(n_clusters=2, seed=3))
        assert r.converged
        models = fit_cluster_models(ds, r.partition, FitConfig())
        again = reassign(ds, models)
        assert again.same_as(r.partition)

    def test_deterministic(self, separable_sim):
        cfg = RunConfig(n_clusters=3, seed=77)
        a = frecl_run(separable_sim.dataset, cfg)
        b = frecl_run(separable_sim.dataset, cfg)
        assert np.array_equal(a.partition.labels, b.partition.labels)
        assert a.iterations == b.iterations and np.allclose(a.mse_trace, b.mse_trace)

    def test_k_above_m_rejected(self, separable_sim):
        with pytest.raises(ValidationError):
            frecl_run(separable_sim.dataset.subset(range(3)), RunConfig(n_clusters=4, seed=0))

    def test_partition_trace_tracking(self, separable_sim):
        r = frecl_run(separable_sim.dataset, RunConfig(n_clusters=2, seed=3), track_partitions=True)
        assert len(r.partition_trace) == r.iterations
        assert r.partition_trace[-1].same_as(r.partition)


class TestMseOfPartition:
    def test_near_zero_for_representable_truth(self, rng, grid24):
        d = 5
        rb = build_basis(grid24, d, 4)
        bundles = [
            RegressionCoefficients(
                intercept=rng.standard_normal(d),
                surfaces=(rng.standard_normal((d, d)) * 0.1,),
                response_basis=rb,
                predictor_bases=(rb,),
            )
            for _ in range(2)
        ]
        sim = generate(
            SimSpec(m=60, grid=grid24, beta=beta_from_coefficients(bundles), noise=NoiseSpec("iid", 0.0), seed=3)
        )
        mse = mse_of_partition(sim.dataset, sim.truth, FitConfig(lam=1e-9, basis_count=d, basis_order=4))
        assert mse < 1e-6

    def test_lumping_separable_clusters_raises_mse(self, separable_sim):
        ds, truth = separable_sim.dataset, separable_sim.truth
        cfg = FitConfig()
        lumped = mse_of_partition(ds, Partition(np.zeros(ds.n_obs, dtype=int), 1), cfg)
        split = mse_of_partition(ds, truth, cfg)
        assert lumped > split

    def test_exchangeable_data_is_partition_invariant(self, grid24, rng):
        from frecl import CurveSet, FunctionalDataset

        row_y = rng.standard_normal(24)
        row_x = rng.standard_normal(24)
        ds = FunctionalDataset(
            CurveSet(grid24, np.tile(row_y, (8, 1))),
            (CurveSet(grid24, np.tile(row_x, (8, 1))),),
            None,
        )
        cfg = FitConfig(lam=0.1)
        a = mse_of_partition(ds, Partition(np.array([0, 0, 0, 0, 1, 1, 1, 1]), 2), cfg)
        b = mse_of_partition(ds, Partition(np.array([0, 1, 0, 1, 0, 1, 0, 1]), 2), cfg)
        assert abs(a - b) < 1e-9 * max(1.0, abs(a))


class TestElbowTable:
    def test_single_k(self, separable_sim):
        rows = elbow_table(separable_sim.dataset, [1], RunConfig(n_clusters=1, seed=0), n_runs=2)
        assert len(rows) == 1 and rows[0][0] == 1 and rows[0][1] == 1

    def test_mse_drops_at_true_k(self, separable_sim):
        rows = elbow_table(separable_sim.dataset, [1, 2, 3], RunConfig(n_clusters=1, seed=0), n_runs=5)
        mses = [r[2] for r in rows]
        # the drop into the true K=2 dwarfs the one beyond it
        assert (mses[0] - mses[1]) > 5 * abs(mses[1] - mses[2])

    def test_duplicate_k_values_kept(self, separable_sim):
        rows = elbow_table(separable_sim.dataset, [1, 1], RunConfig(n_clusters=1, seed=0), n_runs=2)
        assert len(rows) == 2 and rows[0] == rows[1]

    def test_empty_k_values_rejected(self, separable_sim):
        with pytest.raises(ValidationError):
            elbow_table(separable_sim.dataset, [], RunConfig(n_clusters=1, seed=0))

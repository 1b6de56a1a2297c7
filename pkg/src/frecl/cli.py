"""Command-line driver.

Subcommands: simulate, cluster, elbow, metrics, baseline, trace. Every
command is deterministic given its inputs and --seed. Exit codes: 0 success,
2 input/validation error, 3 numerical failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .clustering import RunConfig, frecl_run, mse_of_partition
from .consensus import frecl_consensus
from .errors import NumericalError, ValidationError
from .fpca import oracle_sweep
from .grids import TimeGrid
from .io import (
    default_output_dir,
    load_dataset,
    load_json_config,
    load_manifest,
    read_curves,
    read_partition,
    write_consensus,
    write_curves,
    write_partition,
    write_table,
)
from .metrics import adjusted_rand_index, rand_index, tpr_tnr
from .regression import FitConfig
from .simulate import NoiseSpec, SimSpec, generate, parametric_beta


def _out_dir(args) -> Path:
    out = Path(args.out_dir) if args.out_dir else default_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    return out


def _build_grid(raw) -> TimeGrid:
    if isinstance(raw, dict) and "points" in raw:
        return TimeGrid(np.asarray(raw["points"], dtype=float))
    if isinstance(raw, dict) and {"start", "stop", "count"} <= set(raw):
        return TimeGrid.regular(float(raw["start"]), float(raw["stop"]), int(raw["count"]))
    raise ValidationError("grid must give 'points' or 'start'/'stop'/'count'")


def _build_sim_spec(raw: dict, seed: int) -> SimSpec:
    for key in ("m", "p", "k", "grid"):
        if key not in raw:
            raise ValidationError(f"simulation spec needs '{key}'")
    grid = _build_grid(raw["grid"])
    beta = parametric_beta(grid, int(raw["k"]), int(raw["p"]), **raw.get("beta", {}))
    noise = NoiseSpec(**raw.get("noise", {"kind": "iid", "sigma2": 1.0}))
    pred = raw.get("predictors", {})
    source = pred.get("source", "fourier")
    pool = ()
    if source == "pool":
        files = pred.get("files", [])
        pool = tuple(read_curves(f)[1] for f in files)
    return SimSpec(
        m=int(raw["m"]),
        grid=grid,
        beta=beta,
        noise=noise,
        predictor_source=source,
        pool=pool,
        harmonics=int(pred.get("harmonics", 4)),
        seed=seed,
    )


def _fit_config(cfg: dict, args) -> FitConfig:
    def pick(name, default):
        val = getattr(args, name.replace("-", "_"), None)
        return val if val is not None else cfg.get(name, default)

    return FitConfig(
        lam=float(pick("lam", 1e-2)),
        basis_count=int(pick("basis_count", 12)),
        basis_order=int(pick("basis_order", 4)),
        penalty=str(pick("penalty", "ridge")),
    )


def _run_config(cfg: dict, args, k=None) -> RunConfig:
    def pick(name, default):
        val = getattr(args, name.replace("-", "_"), None)
        return val if val is not None else cfg.get(name, default)

    k = k if k is not None else pick("k", None)
    if k is None:
        raise ValidationError("config needs 'k' (or pass --k)")
    return RunConfig(
        n_clusters=int(k),
        max_iterations=int(pick("max_iterations", 300)),
        norm_kind=str(pick("norm", "L2")),
        fit=_fit_config(cfg, args),
        seed=args.seed,
    )


def cmd_simulate(args) -> int:
    raw = load_json_config(args.spec)
    spec = _build_sim_spec(raw, args.seed)
    sim = generate(spec)
    out = _out_dir(args)
    write_curves(out / "response.csv", sim.dataset.ids, sim.dataset.response)
    for j, x in enumerate(sim.dataset.predictors, start=1):
        write_curves(out / f"predictor_{j}.csv", sim.dataset.ids, x)
    write_partition(out / "truth.csv", sim.dataset.ids, sim.truth.labels)
    manifest = {
        "response": "response.csv",
        "predictors": [f"predictor_{j}.csv" for j in range(1, spec.n_predictors + 1)],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {spec.m} observations ({spec.n_predictors} predictors, k={spec.n_clusters}) to {out}")
    return 0


def cmd_cluster(args) -> int:
    cfg = load_json_config(args.config) if args.config else {}
    run_cfg = _run_config(cfg, args)
    dataset = load_dataset(load_manifest(args.manifest))
    n_runs = int(cfg.get("runs", 100) if args.runs is None else args.runs)
    restarts = int(cfg.get("restarts", 10) if args.restarts is None else args.restarts)
    result = frecl_consensus(
        dataset, run_cfg, n_runs=n_runs, master_seed=args.seed, n_restarts=restarts, threads=args.threads
    )
    out = _out_dir(args)
    write_partition(out / "assignments.csv", dataset.ids, result.partition.labels)
    write_consensus(out / "consensus.csv", dataset.ids, result.matrix.counts)
    write_table(
        out / "runs.csv",
        ["run", "converged", "iterations", "mse", "ari_to_final"],
        [(r.run, int(r.converged), r.iterations, r.mse, r.ari_to_final) for r in result.runs],
    )
    print(f"{result.n_convergent}/{n_runs} convergent runs; "
          f"final partition has {result.partition.non_empty()} clusters; outputs in {out}")
    return 0


def cmd_elbow(args) -> int:
    cfg = load_json_config(args.config) if args.config else {}
    if args.k_values:
        k_values = [int(v) for v in args.k_values.split(",")]
    elif "k_values" in cfg:
        k_values = [int(v) for v in cfg["k_values"]]
    else:
        raise ValidationError("elbow needs k_values (config key or --k-values)")
    dataset = load_dataset(load_manifest(args.manifest))
    n_runs = int(cfg.get("runs", 100) if args.runs is None else args.runs)
    rows = []
    for k in k_values:
        run_cfg = _run_config(cfg, args, k=k)
        result = frecl_consensus(dataset, run_cfg, n_runs=n_runs, master_seed=args.seed, threads=args.threads)
        final = result.partition
        mse = mse_of_partition(dataset, final, run_cfg.fit, run_cfg.norm_kind)
        rows.append((k, final.non_empty(), float(mse)))
        print(f"k={k}: final clusters={final.non_empty()} mse={mse!r}")
    out = _out_dir(args)
    write_table(out / "elbow.csv", ["k_requested", "k_final", "mse"], rows)
    return 0


def cmd_metrics(args) -> int:
    ids_a, labels_a = read_partition(args.partition_a)
    ids_b, labels_b = read_partition(args.partition_b)
    if len(ids_a) != len(ids_b):
        raise ValidationError(
            f"partitions differ in length ({len(ids_a)} vs {len(ids_b)})"
        )
    if ids_a != ids_b:
        raise ValidationError("partition files carry different observation ids")
    ari = adjusted_rand_index(labels_a, labels_b)
    ri = rand_index(labels_a, labels_b)
    tpr, tnr = tpr_tnr(labels_a, labels_b)
    print(f"ari={ari!r}")
    print(f"ri={ri!r}")
    print(f"tpr={tpr!r}")
    print(f"tnr={tnr!r}")
    out_path = Path(args.out) if args.out else _out_dir(args) / "metrics.csv"
    write_table(out_path, ["ari", "ri", "tpr", "tnr"], [(float(ari), float(ri), float(tpr), float(tnr))])
    return 0


def cmd_baseline(args) -> int:
    cfg = load_json_config(args.config) if args.config else {}
    run_cfg = _run_config(cfg, args)
    dataset = load_dataset(load_manifest(args.manifest))
    truth_ids, truth_labels = read_partition(args.truth)
    if list(truth_ids) != list(dataset.ids):
        raise ValidationError("truth partition ids do not match the dataset")
    from .clustering import Partition

    truth = Partition(truth_labels, int(truth_labels.max()) + 1)
    curves = [dataset.response, *dataset.predictors] if args.use_predictors else dataset.response
    sweep = oracle_sweep(curves, run_cfg.n_clusters, truth, rng=args.seed)
    out = _out_dir(args)
    write_table(
        out / "baseline.csv",
        ["s", "ari", "best"],
        [(s, float(a), int(s == sweep.best_s)) for s, a in sweep.rows],
    )
    print(f"best s={sweep.best_s} with ari={sweep.ari!r}; outputs in {out}")
    return 0


def cmd_trace(args) -> int:
    cfg = load_json_config(args.config) if args.config else {}
    run_cfg = _run_config(cfg, args)
    dataset = load_dataset(load_manifest(args.manifest))
    truth_ids, truth_labels = read_partition(args.truth)
    if list(truth_ids) != list(dataset.ids):
        raise ValidationError("truth partition ids do not match the dataset")
    n_runs = int(cfg.get("runs", 100) if args.runs is None else args.runs)
    children = np.random.SeedSequence(args.seed).spawn(n_runs)
    rows = []
    for run in range(n_runs):
        result = frecl_run(dataset, run_cfg, rng=np.random.default_rng(children[run]), track_partitions=True)
        for it, (part, mse, k) in enumerate(
            zip(result.partition_trace, result.mse_trace, result.k_trace), start=1
        ):
            rows.append((run, it, float(adjusted_rand_index(truth_labels, part.labels)), float(mse), int(k)))
    out = _out_dir(args)
    write_table(out / "trace.csv", ["run", "iteration", "ari", "mse", "n_clusters"], rows)
    print(f"wrote {len(rows)} trace rows over {n_runs} runs to {out}")
    return 0


def _add_common(sub, seed_required: bool):
    sub.add_argument("--seed", type=int, required=seed_required, default=None if seed_required else 0)
    sub.add_argument("--out-dir", help="output directory (default: $FRECL_OUTPUT_DIR or .)")


def _add_run_options(sub):
    sub.add_argument("--k", type=int, help="number of clusters")
    sub.add_argument("--runs", type=int, help="number of consensus runs")
    sub.add_argument("--norm", choices=["L1", "L2"], dest="norm", default=None)
    sub.add_argument("--lam", type=float, help="ridge strength")
    sub.add_argument("--basis-count", type=int)
    sub.add_argument("--basis-order", type=int)
    sub.add_argument("--penalty", choices=["ridge", "second-difference"])
    sub.add_argument("--max-iterations", type=int)
    sub.add_argument("--restarts", type=int, help="k-means restarts on the consensus matrix")
    sub.add_argument("--threads", type=int, default=1, help="worker cap for the consensus runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frecl",
        description="Cluster functional observations by their regression relationship.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="generate a synthetic benchmark dataset")
    p.add_argument("spec", help="JSON simulation spec")
    _add_common(p, seed_required=True)
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("cluster", help="consensus clustering of a dataset")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", help="JSON run configuration")
    _add_common(p, seed_required=True)
    _add_run_options(p)
    p.set_defaults(func=cmd_cluster)

    p = subs.add_parser("elbow", help="MSE against the number of clusters")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config")
    p.add_argument("--k-values", help="comma-separated cluster counts")
    _add_common(p, seed_required=False)
    _add_run_options(p)
    p.set_defaults(func=cmd_elbow)

    p = subs.add_parser("metrics", help="agreement measures between two partitions")
    p.add_argument("partition_a")
    p.add_argument("partition_b")
    p.add_argument("--out", help="metrics CSV path (default <out-dir>/metrics.csv)")
    _add_common(p, seed_required=False)
    p.set_defaults(func=cmd_metrics)

    p = subs.add_parser("baseline", help="principal-component clustering oracle sweep")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config")
    p.add_argument("--truth", required=True, help="ground-truth partition CSV")
    p.add_argument("--use-predictors", action="store_true", help="concatenate predictor scores with the response's")
    _add_common(p, seed_required=False)
    _add_run_options(p)
    p.set_defaults(func=cmd_baseline)

    p = subs.add_parser("trace", help="per-iteration ARI/MSE traces across runs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config")
    p.add_argument("--truth", required=True, help="ground-truth partition CSV")
    _add_common(p, seed_required=False)
    _add_run_options(p)
    p.set_defaults(func=cmd_trace)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

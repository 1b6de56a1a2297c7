"""File formats: curve CSVs with the grid embedded in the header, partition
CSVs, consensus-count CSVs, and JSON manifests/configs.

Curve CSV: header ``id,t_<v1>,...,t_<vT>`` with the time value of each column
embedded in its name; one row per observation. Floats are written with repr,
so reading a file and rewriting it reproduces it byte for byte.

Partition CSV: header ``id,cluster`` with integer labels starting at 1.
"""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .grids import CurveSet, FunctionalDataset, TimeGrid
from .preprocess import center_curves, expression_filter, loess_smooth, median_collapse


def _fmt(x) -> str:
    return repr(float(x))


def write_curves(path, ids, curves: CurveSet) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("id," + ",".join(f"t_{_fmt(t)}" for t in curves.grid.points) + "\n")
        for i, row in zip(ids, curves.values):
            fh.write(str(i) + "," + ",".join(_fmt(v) for v in row) + "\n")


def read_curves(path):
    """Returns (ids, CurveSet); the grid comes from the header."""
    with open(path, newline="") as fh:
        header = fh.readline().strip().split(",")
        if len(header) < 3 or header[0] != "id" or not all(h.startswith("t_") for h in header[1:]):
            raise ValidationError(f"{path}: expected header id,t_<v1>,...,t_<vT>")
        try:
            points = np.array([float(h[2:]) for h in header[1:]])
        except ValueError:
            raise ValidationError(f"{path}: non-numeric time value in header") from None
        ids, rows = [], []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(header):
                raise ValidationError(f"{path}:{lineno}: expected {len(header)} fields")
            ids.append(parts[0])
            try:
                rows.append([float(v) for v in parts[1:]])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: non-numeric curve value") from None
    if not rows:
        raise ValidationError(f"{path}: no observations")
    return ids, CurveSet(TimeGrid(points), np.asarray(rows))


def write_partition(path, ids, labels) -> None:
    labels = np.asarray(labels)
    with open(path, "w", newline="") as fh:
        fh.write("id,cluster\n")
        for i, lab in zip(ids, labels):
            fh.write(f"{i},{int(lab) + 1}\n")


def read_partition(path):
    """Returns (ids, 0-based labels)."""
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != "id,cluster":
            raise ValidationError(f"{path}: expected header id,cluster")
        ids, labels = [], []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != 2:
                raise ValidationError(f"{path}:{lineno}: expected id,cluster")
            ids.append(parts[0])
            try:
                lab = int(parts[1])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: cluster must be an integer") from None
            if lab < 1:
                raise ValidationError(f"{path}:{lineno}: cluster labels start at 1")
            labels.append(lab - 1)
    if not labels:
        raise ValidationError(f"{path}: no observations")
    return ids, np.asarray(labels, dtype=np.int64)


def write_consensus(path, ids, counts) -> None:
    counts = np.asarray(counts)
    with open(path, "w", newline="") as fh:
        fh.write("id," + ",".join(str(i) for i in ids) + "\n")
        for i, row in zip(ids, counts):
            fh.write(str(i) + "," + ",".join(str(int(v)) for v in row) + "\n")


def write_table(path, header, rows) -> None:
    """Generic CSV writer; floats via repr, everything else via str."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


@dataclass(frozen=True)
class LoessOptions:
    span: float = 0.75
    degree: int = 2
    midpoints: bool = False


@dataclass(frozen=True)
class FilterOptions:
    threshold: float = 5.0
    min_points: int = 20


@dataclass(frozen=True)
class DatasetManifest:
    """Where the curves live and how to preprocess them.

    Preprocessing runs per variable in pipeline order: collapse replicate rows
    sharing an id (pointwise median), expression-filter across all variables,
    center, loess-smooth.
    """

    response: str
    predictors: tuple
    grid: object = "from-header"  # or explicit list of time points
    collapse_replicates: bool = False
    filter: FilterOptions | None = None
    center: bool = False
    loess: LoessOptions | None = None
    base_dir: Path = field(default_factory=Path)

    def path(self, p) -> Path:
        return self.base_dir / p


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    if "response" not in raw or "predictors" not in raw:
        raise ValidationError(f"{path}: manifest needs 'response' and 'predictors'")
    loess = raw.get("loess")
    filt = raw.get("filter")
    return DatasetManifest(
        response=raw["response"],
        predictors=tuple(raw["predictors"]),
        grid=raw.get("grid", "from-header"),
        collapse_replicates=bool(raw.get("collapse_replicates", False)),
        filter=FilterOptions(**filt) if isinstance(filt, dict) else (FilterOptions() if filt else None),
        center=bool(raw.get("center", False)),
        loess=LoessOptions(**loess) if isinstance(loess, dict) else (LoessOptions() if loess else None),
        base_dir=path.parent,
    )


def _collapse_rows(ids, values):
    order = list(dict.fromkeys(ids))
    index = {k: [] for k in order}
    for pos, i in enumerate(ids):
        index[i].append(pos)
    out = np.vstack(
        [median_collapse([values[rows, q] for q in range(values.shape[1])]) for rows in (index[k] for k in order)]
    )
    return order, out


def load_dataset(manifest: DatasetManifest) -> FunctionalDataset:
    """Read every referenced curve file and apply the manifest's preprocessing."""
    paths = [manifest.path(manifest.response)] + [manifest.path(p) for p in manifest.predictors]
    loaded = []
    for p in paths:
        if not Path(p).exists():
            raise ValidationError(f"missing curve file: {p}")
        loaded.append(read_curves(p))
    if manifest.grid != "from-header":
        want = np.asarray(manifest.grid, dtype=float)
        for p, (_, cs) in zip(paths, loaded):
            if cs.grid.size != want.size or not np.allclose(cs.grid.points, want):
                raise ValidationError(f"{p}: grid does not match the manifest's explicit grid")
    ids0 = loaded[0][0]
    for p, (ids, _) in zip(paths[1:], loaded[1:]):
        if ids != ids0:
            raise ValidationError(f"{p}: observation ids do not match {paths[0]}")
    sets = [cs for _, cs in loaded]
    ids = list(ids0)
    if manifest.collapse_replicates:
        collapsed = [CurveSet(cs.grid, _collapse_rows(ids, cs.values)[1]) for cs in sets]
        ids, sets = list(dict.fromkeys(ids)), collapsed
    if manifest.filter is not None:
        keep = expression_filter(sets, manifest.filter.threshold, manifest.filter.min_points)
        if keep.size == 0:
            raise ValidationError("expression filter removed every observation")
        ids = [ids[i] for i in keep]
        sets = [cs.subset(keep) for cs in sets]
    if manifest.center:
        sets = [center_curves(cs) for cs in sets]
    if manifest.loess is not None:
        lo = manifest.loess
        sets = [loess_smooth(cs, span=lo.span, degree=lo.degree, midpoints=lo.midpoints) for cs in sets]
    return FunctionalDataset(response=sets[0], predictors=tuple(sets[1:]), ids=tuple(ids))


def load_json_config(path) -> dict:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: config must be a flat JSON object")
    return raw


def default_output_dir() -> Path:
    return Path(os.environ.get("FRECL_OUTPUT_DIR", "."))

"""Functional regression clustering.

Clusters multivariate functional observations (a response curve plus one or
more predictor curves per observation) by the function-on-function linear
relationship linking them: each cluster is defined by its own regression
operator, runs alternate per-cluster fits with residual-norm reallocation,
and repeated runs are aggregated by consensus clustering.
"""

from .basis import BSplineBasis, build_basis
from .clustering import (
    Partition,
    RunConfig,
    RunResult,
    elbow_table,
    frecl_run,
    mse_of_partition,
    random_initial_partition,
    reassign,
)
from .consensus import (
    ConsensusMatrix,
    ConsensusResult,
    accumulate,
    comembership,
    frecl_consensus,
    kmeans_rows,
)
from .errors import NumericalError, ValidationError
from .fpca import FpcaModel, fpca, fpca_kmeans, oracle_sweep
from .grids import CurveSet, FunctionalDataset, TimeGrid, curve_norm, trapezoid_weights
from .metrics import PairCounts, adjusted_rand_index, pair_counts, rand_index, tpr_tnr
from .preprocess import center_curves, expression_filter, loess_smooth, median_collapse
from .regression import (
    FitConfig,
    RegressionCoefficients,
    design_block,
    fit,
    predict,
    predict_all,
    residual_norm,
)
from .simulate import (
    BetaSpec,
    NoiseSpec,
    SimData,
    SimSpec,
    ar1_noise,
    beta_from_coefficients,
    draw_true_partition,
    generate,
    parametric_beta,
    sample_predictors,
    sigma2_for_snr,
)

__version__ = "0.1.0"

__all__ = [
    "BSplineBasis",
    "BetaSpec",
    "ConsensusMatrix",
    "ConsensusResult",
    "CurveSet",
    "FitConfig",
    "FpcaModel",
    "FunctionalDataset",
    "NoiseSpec",
    "NumericalError",
    "PairCounts",
    "Partition",
    "RegressionCoefficients",
    "RunConfig",
    "RunResult",
    "SimData",
    "SimSpec",
    "TimeGrid",
    "ValidationError",
    "accumulate",
    "adjusted_rand_index",
    "ar1_noise",
    "beta_from_coefficients",
    "build_basis",
    "center_curves",
    "comembership",
    "curve_norm",
    "design_block",
    "draw_true_partition",
    "elbow_table",
    "expression_filter",
    "fit",
    "fpca",
    "fpca_kmeans",
    "frecl_consensus",
    "frecl_run",
    "generate",
    "kmeans_rows",
    "loess_smooth",
    "median_collapse",
    "mse_of_partition",
    "oracle_sweep",
    "pair_counts",
    "parametric_beta",
    "predict",
    "predict_all",
    "rand_index",
    "random_initial_partition",
    "reassign",
    "residual_norm",
    "sample_predictors",
    "sigma2_for_snr",
    "tpr_tnr",
    "trapezoid_weights",
]

"""Outlier detection and robust regression for density-valued data."""

from .curves import (
    CdfFn,
    DensityFn,
    GridCurve,
    QuantileFn,
    cdf_and_quantile,
    clear_uniform,
    density_from_values,
    differentiate,
    integrate,
    mean_of,
    median_of,
    mix_uniform,
    mode_of,
)
from .transforms import (
    ClrCurve,
    LqdCurve,
    WarpResult,
    bayes_distance,
    clr,
    clr_batch,
    h_centralize,
    inverse_lqd,
    l2_distance,
    lqd,
    nlqd,
    phase_distance,
)
from .boxplot import BoxplotParams, boxplot_detect, mad, percentile
from .detect import (
    DetectionReport,
    NodeConfig,
    default_node_configs,
    distance_scores,
    fdo_outlyingness,
    node_detect,
    qf_fdo_detect,
    tree_detect,
)
from .multidetect import MultiReport, ParamGrid, RunRecord, consolidate, \
    filter_unstable, multi_detect, run_grid
from .regression import (
    FpcaBasis,
    RegressionModel,
    WeightVector,
    design_weights,
    fit,
    fpca,
    gcv_select,
    predict,
    sigma_heuristic,
)
from .regoutlier import (
    RegDetectParams,
    detect_regression_outliers,
    residual_bayes,
    residual_lqd,
)
from .simulate import (
    RandomStream,
    exchange_contaminate,
    gen_beta_sorted,
    gen_pairs,
    gen_scenario_pdfs,
    gen_sinusoid_dataset,
    insert_contaminate,
    insert_outliers,
)
from .metrics import Metrics, detection_metrics, iae
from .experiments import ExperimentSpec, run_experiment

__version__ = "0.1.0"

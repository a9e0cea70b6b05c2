"""DIVI: feature-gated variational mixture clustering with split-only
structure growth, plus oracle baselines, metrics, synthetic benchmark
generators, and a reproduction harness.
"""

from ._backend import BACKEND
from .baselines import BaselineResult, diag_gmm_fit, kmeans_fit
from .bench import ExperimentConfig, ResultRow, run_benchmark, run_sweep
from .datagen import (
    Dataset,
    destandardize,
    gen_correlated,
    gen_heavy_tailed,
    gen_matched,
    standardize,
)
from .gradients import GradientBundle, finite_difference_check, objective_gradients
from .io import SnapshotError, load_model, read_dataset, save_model, write_dataset
from .metrics import (
    active_dimensions,
    adjusted_rand_index,
    feature_f1,
    normalized_mutual_info,
)
from .model import (
    GateSample,
    ModelParams,
    PriorMode,
    PriorSpec,
    gate_kl,
    gated_component_log_density,
    gaussian_log_pdf,
    marginal_log_likelihood,
    mixture_weights,
    objective,
    sample_relaxed_gates,
)
from .prior import FeatureScores, build_prior, gaussian_llr, kruskal_wallis, rough_kmeans
from .trainer import (
    AdamState,
    FitResult,
    NonFiniteObjectiveError,
    SplitEvent,
    TrainConfig,
    adam_step,
    anneal_temperature,
    cluster_diagnostics,
    default_split_threshold,
    fit,
    hard_assignments,
    split_component,
)

from ._version import __version__

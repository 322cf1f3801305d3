"""selkit: statistically enhanced learning toolkit.

Extractors that turn raw processes, images, text and match records into
statistical covariates (SEL levels 1-3), from-scratch learners to consume
them, model explanation reports, and a reproducible Monte Carlo harness
that measures the predictive uplift of the constructed features.

Hot numeric kernels run from a compiled extension when it is built, with a
NumPy fallback otherwise; ``selkit.backend_name()`` reports which is active.
"""

from .backend import backend_name
from .core import (
    Column,
    Dataset,
    Process,
    SelLevel,
    SplitSpec,
    read_csv,
    split,
    standardize,
    unstandardize,
    write_csv,
)
from .errors import SelkitError
from .estimate import (
    CauchyFit,
    LinearFit,
    MatchRecord,
    StrengthTable,
    cauchy_mle,
    cauchy_mle_batch,
    empirical_mean_feature,
    fit_strengths,
    mean_goals_strength,
    ols,
    recency_weight,
    two_stage_least_squares,
)
from .explain import (
    ImportanceReport,
    PdpCurve,
    partial_dependence,
    permutation_importance,
)
from .extract import (
    Channel,
    ColorHistogram,
    MomentSummary,
    TfidfMatrix,
    color_histogram,
    ewma,
    histogram_moments,
    moments,
    quantiles,
    tfidf,
    window_to_alpha,
)
from .learn import (
    ForestModel,
    GbtModel,
    LassoModel,
    Leaf,
    Split,
    TreeModel,
    TreeNode,
    fit_forest,
    fit_gbt,
    fit_lasso,
    fit_tree,
    load_model,
    predict,
    rmse,
    save_model,
)
from .pnm import RasterImage, read_pnm, write_pnm
from .rng import RngStream, sample_cauchy, sample_normal
from .simbench import (
    BenchmarkReport,
    GbtConfig,
    SimConfig,
    SimInstance,
    fixture_p10,
    generate_fixture_instance,
    generate_instance,
    run_benchmark,
    run_rep,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

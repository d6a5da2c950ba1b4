"""Monthly electric energy consumption forecasting with a feedforward network."""
from .dataset import (
    Dataset,
    MonthlyRecord,
    NormalizationParams,
    Sample,
    SampleSet,
    denormalize,
    featurize,
    fit_normalizer,
    fit_sample_normalizer,
    generate_synthetic,
    normalize,
    parse_csv,
    raw_samples,
    read_csv,
    scale_samples,
)
from .metrics import MetricsReport, SeriesPair, compute_report, mae, mape, mse, rmse_paper, rmse_standard
from .network import (
    Network,
    NetworkConfig,
    TrainConfig,
    TrainReport,
    compute_gradients,
    finite_diff_gradient,
    forward,
    init_network,
    load_model,
    predict,
    save_model,
    train,
)
from .pipeline import ForecastTable, RunConfig, emit_plot_data, load_fixture_tables, recursive_forecast
from .validation import CrossValReport, FoldPlan, aggregate_folds, cross_validate, make_folds, two_fold_validate

__version__ = "0.1.0"

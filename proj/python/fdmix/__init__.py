"""Mixed full/half-duplex small-cell network: analytic engine and simulator."""

from ._core import (
    Config,
    ConfigError,
    FdmixError,
    InvalidParameter,
    NumericalError,
    TooFewSamples,
    __version__,
    benchmark,
    ccdf,
    config_keys,
    mean_rate,
    metrics,
    nearest_distance_cdf,
    nearest_distance_pdf,
    simulate,
    sweep,
    tabulate_ccdf,
    thd_baseline,
    threshold_grid,
)

__all__ = [
    "Config",
    "ConfigError",
    "FdmixError",
    "InvalidParameter",
    "NumericalError",
    "TooFewSamples",
    "__version__",
    "benchmark",
    "ccdf",
    "config_keys",
    "mean_rate",
    "metrics",
    "nearest_distance_cdf",
    "nearest_distance_pdf",
    "simulate",
    "sweep",
    "tabulate_ccdf",
    "thd_baseline",
    "threshold_grid",
]

"""Imputation-based randomization tests for experiments with interference."""

from ._core import (
    Contrast,
    Design,
    Imputer,
    IrtError,
    Network,
    __version__,
    build_network,
    cluster_network,
    clustered_study,
    diff_in_means,
    exact_frt_pvalue,
    exposure_three_level,
    frt_pvalue_mc,
    irt_pvalue,
    kernel_bandwidth,
    lr_expectation_curve,
    run_config,
    spatial_network,
)

__all__ = [
    "Contrast",
    "Design",
    "Imputer",
    "IrtError",
    "Network",
    "__version__",
    "build_network",
    "cluster_network",
    "clustered_study",
    "diff_in_means",
    "exact_frt_pvalue",
    "exposure_three_level",
    "frt_pvalue_mc",
    "irt_pvalue",
    "kernel_bandwidth",
    "lr_expectation_curve",
    "run_config",
    "spatial_network",
]

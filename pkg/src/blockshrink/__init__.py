"""Block-thresholded wavelet regression for known random designs.

The package fits a regression function observed at random design points by
reweighted empirical wavelet coefficients and blockwise keep-or-kill
thresholding, and ships a Monte Carlo harness that verifies the estimator's
risk-decay exponents and coefficient concentration behaviour.
"""

__version__ = "0.1.0"

from .basis import (
    CoefficientTree,
    WaveletBasis,
    concentration_ratio,
    evaluate_tree,
    exact_coefficients,
    make_basis,
    midpoint_grid,
    synthesize,
)
from .besov import (
    BesovBall,
    RateSpec,
    TestFunction,
    besov_seminorm,
    make_test_function,
    rate_spec,
)
from .design import (
    DesignDensity,
    Sample,
    density_from_spec,
    generate_sample,
    linear_tilt_design,
    piecewise_design,
    read_sample_csv,
    sample_design,
    uniform_design,
    write_sample_csv,
)
from .estimator import (
    BlockGrid,
    Estimate,
    block_grid,
    block_statistic,
    blockshrink,
    empirical_coefficients,
    empirical_detail_level,
    term_threshold,
)
from .harness import (
    ConcentrationReport,
    ExperimentConfig,
    MomentReport,
    RiskReport,
    calibrate_threshold,
    check_concentration,
    check_moment_bound,
    fit_rate,
    lp_risk,
    replication_seed,
    run_rate_experiment,
    wilson_upper,
)

__all__ = [name for name in dir() if not name.startswith("_")]

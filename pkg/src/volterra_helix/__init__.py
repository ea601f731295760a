"""Gaussian Volterra processes: incremental variances, regime table,
path simulation and empirical exponent checks."""

from .analyze import (
    BoundCheckResult,
    FitResult,
    IncrementTable,
    MCConfig,
    asymptotic_ratio_check,
    bound_check,
    fit_exponent,
    log_correction_check,
    scan_increments,
)
from .errors import (
    AccuracyError,
    ConditioningError,
    DataError,
    DomainError,
    NumericalError,
    RegimeError,
    ValidationError,
    VolterraError,
)
from .moments import (
    MomentBreakdown,
    covariance,
    g1,
    g2,
    incremental_variance,
    mandelbrot_constant,
    mandelbrot_constant_numeric,
    variance,
)
from .numerics import beta_fn, gamma_fn, integrate_finite, integrate_semi_infinite
from .processes import WIENER, Interval, ProcessKind, ProcessSpec, kernel_eval, make_process
from .simulate import PathEnsemble, TimeGrid, sample_paths
from .theory import AsymptoticPrediction, RegimeReport, asymptotic_increment, classify_regime

__version__ = "0.1.0"

"""Empirical checks of the regime table: exponent fits, bound constants,
log-correction ratios and the small-lag asymptotic ratio."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._parallel import ordered_map
from .errors import DataError, DomainError, RegimeError
from .moments import incremental_variance
from .numerics import DEFAULT_TOL
from .processes import Interval, ProcessSpec
from .simulate import TimeGrid, empirical_incremental_variance, sample_paths
from .theory import EXACT, GENERALIZED, LOG_CORRECTED, RegimeReport, asymptotic_increment, classify_regime

QUADRATURE = "quadrature"
MONTE_CARLO = "monte_carlo"

DEFAULT_LAG_COUNT = 12
DEFAULT_LAG_RATIO = 0.5


@dataclass(frozen=True)
class MCConfig:
    n_paths: int = 10_000
    seed: int = 0


@dataclass(frozen=True)
class IncrementTable:
    spec: ProcessSpec
    anchor: float
    lags: tuple
    sigma: tuple
    method: str = QUADRATURE
    std_errors: tuple = ()

    def __post_init__(self):
        lags = tuple(float(h) for h in self.lags)
        sigma = tuple(float(x) for x in self.sigma)
        errs = tuple(float(x) for x in self.std_errors) or (0.0,) * len(lags)
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "std_errors", errs)
        if self.method not in (QUADRATURE, MONTE_CARLO):
            raise DomainError(f"unknown table method {self.method!r}")
        if not (len(lags) == len(sigma) == len(errs)):
            raise DomainError("lags, sigma and std_errors must have equal length")
        if any(h <= 0.0 for h in lags) or any(b >= a for a, b in zip(lags, lags[1:])):
            raise DomainError("lags must be positive and strictly decreasing")
        if any(not (x >= 0.0) or not math.isfinite(x) for x in sigma):
            raise DomainError("sigma entries must be finite and non-negative")

    def rows(self):
        return [
            {"h": h, "sigma": s, "variance": s * s, "std_error": e}
            for h, s, e in zip(self.lags, self.sigma, self.std_errors)
        ]


@dataclass(frozen=True)
class FitResult:
    rho_hat: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class BoundCheckResult:
    c1_hat: float
    c2_hat: float
    mesh_size: int
    h_min: float
    h_max: float
    rho_lower: float = field(default=float("nan"))
    rho_upper: float = field(default=float("nan"))


def ladder(h_max: float, lag_count: int, lag_ratio: float) -> list[float]:
    if not h_max > 0.0:
        raise DomainError(f"h_max must be positive, got {h_max}")
    if not 0.0 < lag_ratio < 1.0:
        raise DomainError(f"lag_ratio must lie in (0, 1), got {lag_ratio}")
    if lag_count < 4:
        raise DomainError(f"lag_count must be >= 4, got {lag_count}")
    return [h_max * lag_ratio**k for k in range(lag_count)]


def default_h_max(interval: Interval) -> float:
    return 1e-2 * (interval.t2 - interval.t1)


def scan_increments(
    spec: ProcessSpec,
    anchor: float,
    lag_count: int = DEFAULT_LAG_COUNT,
    lag_ratio: float = DEFAULT_LAG_RATIO,
    h_max: float = 1e-2,
    method: str = QUADRATURE,
    mc_config: Optional[MCConfig] = None,
    tol: float = DEFAULT_TOL,
) -> IncrementTable:
    """Tabulate ``||U(anchor + h) - U(anchor)||_2`` on a geometric lag ladder."""
    anchor = float(anchor)
    if not anchor >= 0.0:
        raise DomainError(f"anchor must be >= 0, got {anchor}")
    lags = ladder(h_max, lag_count, lag_ratio)

    if method == QUADRATURE:
        def sigma_at(h):
            return math.sqrt(incremental_variance(spec, anchor, anchor + h, tol).total)

        sigma = ordered_map(sigma_at, lags)
        return IncrementTable(spec, anchor, tuple(lags), tuple(sigma), QUADRATURE)

    if method != MONTE_CARLO:
        raise DomainError(f"unknown method {method!r}")
    cfg = mc_config or MCConfig()
    points = [anchor + h for h in reversed(lags)]
    if anchor > 0.0:
        points = [anchor] + points
    ens = sample_paths(spec, TimeGrid(tuple(points)), cfg.n_paths, cfg.seed, tol)
    base = 0 if anchor > 0.0 else -1
    offset = 1 if anchor > 0.0 else 0
    sigma, errs = [], []
    n = len(lags)
    for k in range(n):
        # lags[k] sits at position n - 1 - k among the increasing points
        est, se = empirical_incremental_variance(ens, base, offset + n - 1 - k)
        s = math.sqrt(est)
        sigma.append(s)
        errs.append(se / (2.0 * s) if s > 0.0 else 0.0)
    return IncrementTable(spec, anchor, tuple(lags), tuple(sigma), MONTE_CARLO, tuple(errs))


def fit_exponent(table: IncrementTable) -> FitResult:
    """Least-squares slope of ``log sigma`` against ``log h``."""
    if len(table.lags) < 4:
        raise DataError("exponent fit needs at least 4 lags")
    sigma = np.asarray(table.sigma)
    if np.any(sigma <= 0.0):
        raise DataError("increment table contains a zero sigma; log-log fit undefined")
    x = np.log(np.asarray(table.lags))
    y = np.log(sigma)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(float(slope), float(intercept), float(min(max(r2, 0.0), 1.0)))


def bound_check(table: IncrementTable, report: RegimeReport) -> BoundCheckResult:
    """Empirical two-sided constants ``min sigma/h^rho1`` and ``max sigma/h^rho2``."""
    if report.regime not in (EXACT, GENERALIZED):
        hint = "; use log_correction_check" if report.regime == LOG_CORRECTED else ""
        raise RegimeError(f"bound_check does not apply to regime {report.regime!r}{hint}")
    h = np.asarray(table.lags)
    s = np.asarray(table.sigma)
    c1 = float(np.min(s / h**report.rho_lower))
    c2 = float(np.max(s / h**report.rho_upper))
    return BoundCheckResult(c1, c2, len(h), float(h.min()), float(h.max()), report.rho_lower, report.rho_upper)


def _table_interval(table: IncrementTable) -> Interval:
    return Interval(table.anchor, table.anchor + table.lags[0])


def log_correction_check(table: IncrementTable, check_regime: bool = True) -> tuple[float, float]:
    """Extremes of ``sigma^2 / (h^2 (1 + |log h|))`` over the ladder."""
    if check_regime:
        regime = classify_regime(table.spec, _table_interval(table)).regime
        if regime != LOG_CORRECTED:
            raise RegimeError(f"log_correction_check needs the log-corrected regime, got {regime!r}")
    h = np.asarray(table.lags)
    ratios = np.asarray(table.sigma) ** 2 / (h**2 * (1.0 + np.abs(np.log(h))))
    return float(ratios.min()), float(ratios.max())


def asymptotic_ratio_check(spec: ProcessSpec, anchor: float, table: IncrementTable) -> list[float]:
    """Per-lag ``sigma^2 / (C(alpha) anchor^-gamma h^(2 alpha + 1))``; tends to 1 as h decreases."""
    pred = asymptotic_increment(spec, anchor)
    return [s * s / pred.predict(h) for h, s in zip(table.lags, table.sigma)]


@dataclass(frozen=True)
class ExponentReport:
    table: IncrementTable
    fit: FitResult
    regime: RegimeReport
    within: Optional[bool]


def exponent_report(
    spec: ProcessSpec,
    interval: Interval,
    anchor: Optional[float] = None,
    lag_count: int = DEFAULT_LAG_COUNT,
    lag_ratio: float = DEFAULT_LAG_RATIO,
    h_max: Optional[float] = None,
    tolerance: float = 0.02,
    method: str = QUADRATURE,
    mc_config: Optional[MCConfig] = None,
    tol: float = DEFAULT_TOL,
) -> ExponentReport:
    """Scan, fit and compare the slope with the theoretical exponent(s).

    ``within`` is ``None`` when the regime gives no exponent to compare with.
    """
    anchor = interval.midpoint if anchor is None else float(anchor)
    h_max = default_h_max(interval) if h_max is None else float(h_max)
    table = scan_increments(spec, anchor, lag_count, lag_ratio, h_max, method, mc_config, tol)
    fit = fit_exponent(table)
    report = classify_regime(spec, interval)
    within = None
    if report.rho_lower is not None:
        lo = min(report.rho_lower, report.rho_upper) - tolerance
        hi = max(report.rho_lower, report.rho_upper) + tolerance
        within = bool(lo <= fit.rho_hat <= hi)
    return ExponentReport(table, fit, report, within)


def within_std_errors(values: Sequence[float], reference: Sequence[float], errors: Sequence[float], k: float = 3.0) -> bool:
    return all(abs(v - r) <= k * e for v, r, e in zip(values, reference, errors))

"""Acceptance suite: eleven numbered checks of the whole toolkit.

Each check returns a :class:`CriterionResult`; ``run_all`` runs a selection
in order. The CLI ``verify`` command and the test suite both call into here.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .analyze import (
    asymptotic_ratio_check,
    default_h_max,
    fit_exponent,
    log_correction_check,
    scan_increments,
)
from .errors import ValidationError
from .moments import (
    g1,
    g2,
    incremental_variance,
    mandelbrot_constant,
    mandelbrot_constant_numeric,
)
from .numerics import beta_fn, integrate_finite, lower
from .processes import WIENER, Interval, ProcessKind, make_process
from .simulate import TimeGrid, empirical_incremental_variance, sample_paths
from .theory import EXACT, GENERALIZED, LOG_CORRECTED, UNCOVERED, classify_regime

MC_SEED = 20240917


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _c1_constant():
    worst = 0.0
    for k in range(19):
        a = round(-0.45 + 0.05 * k, 10)
        worst = max(worst, abs(mandelbrot_constant(a) - mandelbrot_constant_numeric(a, 1e-10)))
    return worst <= 1e-8, f"max |analytic - numeric| = {worst:.3e} (limit 1e-8)"


def _c2_beta_variance():
    worst = 0.0
    for a in (-0.4, -0.2, 0.0, 0.4, 0.8):
        for g in (0.0, 0.2, 0.4, 0.6, 0.8):
            for t in (0.5, 1.0, 2.0):
                # split at t/2 and reflect the right half so both singularities sit at 0
                def left(u, a=a, g=g, t=t):
                    return u ** (-g) * (t - u) ** (2 * a)

                def right(v, a=a, g=g, t=t):
                    return v ** (2 * a) * (t - v) ** (-g)

                quad = (
                    integrate_finite(left, 0.0, t / 2, lower(-g), 1e-12, abs_tol=0.0).value
                    + integrate_finite(right, 0.0, t / 2, lower(2 * a), 1e-12, abs_tol=0.0).value
                )
                exact = beta_fn(1 - g, 1 + 2 * a) * t ** (2 * a + 1 - g)
                worst = max(worst, abs(quad / exact - 1.0))
    return worst <= 1e-8, f"max relative deviation over 75 points = {worst:.3e} (limit 1e-8)"


def _c3_scaling():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(20):
        a = rng.uniform(-0.45, 1.5)
        g = rng.uniform(0.0, 0.9)
        s = rng.uniform(0.05, 3.0)
        h = 10 ** rng.uniform(-3, 0.3)
        spec = make_process("U2", a, g)
        total = incremental_variance(spec, s, s + h).total
        r = s / h
        scaled = h ** (2 * a + 1 - g) * (g1(r, a, g) + g2(r, a, g))
        worst = max(worst, abs(total / scaled - 1.0))
    return worst <= 1e-8, f"max relative deviation over 20 draws = {worst:.3e} (limit 1e-8)"


def _c4_g_limits():
    r = 1e4
    worst2 = worst1 = 0.0
    for a in (-0.25, 0.25):
        lim2 = 1.0 / (2 * a + 1)
        lim1 = mandelbrot_constant(a) - lim2
        for g in (0.2, 0.6):
            worst2 = max(worst2, abs(r**g * g2(r, a, g) - lim2) / lim2)
            worst1 = max(worst1, abs(r**g * g1(r, a, g) - lim1) / abs(lim1))
    ok = worst2 <= 1e-3 and worst1 <= 1e-2
    return ok, f"g2 rel dev {worst2:.2e} (limit 1e-3), g1 rel dev {worst1:.2e} (limit 1e-2)"


def _c5_asymptotics():
    ratios = []
    for a, g in ((0.25, 0.4), (-0.25, 0.2)):
        spec = make_process("U2", a, g)
        for s in (1.0, 2.0):
            table = scan_increments(spec, s, lag_count=4, lag_ratio=0.1, h_max=1e-1)
            ratios.append(asymptotic_ratio_check(spec, s, table)[-1])
    ok = all(0.98 <= x <= 1.02 for x in ratios)
    return ok, "ratios at h=1e-4: " + ", ".join(f"{x:.5f}" for x in ratios)


def _exact_cases():
    cases = []
    for a in (-0.3, 0.3):
        cases.append((make_process("U1", a, lam=1.0), Interval(0.0, 1.0), 0.5))
    for a in (-0.3, 0.3, 0.8):
        cases.append((make_process("U2", a, 0.4), Interval(1.0, 2.0), 1.5))
    for kind in ("U4", "U5"):
        for a in (-0.3, 0.3, 0.8):
            cases.append((make_process(kind, a, lam=1.0), Interval(0.0, 1.0), 0.5))
    cases.append((make_process("V", 0.3, 0.4), Interval(1.0, 2.0), 1.5))
    cases.append((make_process("U3", 1.0), Interval(0.0, 1.0), 0.5))
    return cases


def _c6_exponents():
    worst, where = 0.0, ""
    for spec, interval, anchor in _exact_cases():
        report = classify_regime(spec, interval)
        if report.regime != EXACT:
            return False, f"{spec.kind.value} alpha={spec.alpha} classified {report.regime}, expected exact"
        table = scan_increments(spec, anchor, h_max=default_h_max(interval))
        dev = abs(fit_exponent(table).rho_hat - report.rho_lower)
        if dev > worst:
            worst, where = dev, f"{spec.kind.value} alpha={spec.alpha}"
    return worst <= 0.02, f"{len(_exact_cases())} cases, max |rho_hat - rho| = {worst:.4f} at {where} (limit 0.02)"


def _c7_origin():
    worst = 0.0
    for a, g in ((0.25, 0.4), (0.7, 0.4), (1.2, 0.4)):
        table = scan_increments(make_process("U2", a, g), 0.0, h_max=1e-2)
        worst = max(worst, abs(fit_exponent(table).rho_hat - (2 * a + 1 - g) / 2))
    return worst <= 0.01, f"max |rho_hat - (2a+1-g)/2| = {worst:.3e} (limit 0.01)"


def _c8_log_corrected():
    spreads = []
    for spec in (make_process("U2", 0.5, 0.4), make_process("U1", 0.5, lam=1.0)):
        # 21 lags log-spaced from 1e-2 down to 1e-6
        table = scan_increments(spec, 1.0, lag_count=21, lag_ratio=10**-0.2, h_max=1e-2)
        lo, hi = log_correction_check(table)
        spreads.append(hi / lo)
    ok = all(x <= 4.0 for x in spreads)
    return ok, "ratio_max/ratio_min: " + ", ".join(f"{x:.3f}" for x in spreads) + " (limit 4)"


def _c9_monte_carlo():
    grid = TimeGrid.uniform(1.0, 8)
    worst = 0.0
    for spec in (WIENER, make_process("U2", 0.25, 0.4), make_process("U4", 0.3, lam=1.0)):
        ens = sample_paths(spec, grid, 10_000, MC_SEED)
        prev = 0.0
        for j, t in enumerate(grid.points):
            est, se = empirical_incremental_variance(ens, j - 1, j)
            exact = incremental_variance(spec, prev, t).total
            worst = max(worst, abs(est - exact) / se)
            prev = t
    return worst <= 3.0, f"max |empirical - quadrature| / SE = {worst:.3f} over 24 increments (limit 3)"


def _c10_structure():
    worst_anchor = 0.0
    for kind in ("U4", "U5"):
        for a in (-0.3, 0.3, 0.8):
            spec = make_process(kind, a, lam=1.0)
            for h in (0.01, 0.5):
                vals = [incremental_variance(spec, s, s + h).total for s in (0.0, 0.5, 1.0, 5.0)]
                worst_anchor = max(worst_anchor, (max(vals) - min(vals)) / min(vals))
    worst_sum = 0.0
    for a, g in ((-0.2, 0.4), (0.3, 0.4), (0.6, 0.4)):
        for s in (1.0, 1.5):
            h = 0.1
            u6 = incremental_variance(make_process("U6", a, g), s, s + h)
            v = incremental_variance(make_process("V", a, g), s, s + h).total
            u2 = incremental_variance(make_process("U2", a, g), s, s + h).total
            worst_sum = max(worst_sum, abs(u6.total - (v + u2)) / u6.total)
    ok = worst_anchor <= 1e-8 and worst_sum == 0.0
    return ok, f"anchor spread {worst_anchor:.2e} (limit 1e-8), |U6 - (V + U2)| rel {worst_sum:.1e}"


# ---------------------------------------------------------------------------
# independent copy of the regime table, written as ordered rules


def _reference_regime(kind: str, a: float, g: float, t1: float):
    """(tag, rho1, rho2) from a separately maintained rule list."""
    eps = 1e-12
    on = lambda x, y: abs(x - y) <= eps  # noqa: E731
    away = t1 > 0
    if kind == "Wiener":
        return EXACT, 0.5, 0.5
    if kind == "U3":
        rules = [
            (on(a, 1.0), (EXACT, 0.5, 0.5)),
            (a < 1.0, (GENERALIZED, 1.0, a)),
            (a < 2.0 and not on(a, 2.0), (GENERALIZED, a, 1.0)),
            (True, (GENERALIZED, a / 2, 0.5)),
        ]
    elif kind == "V":
        rules = [(away, (EXACT, 1.0, 1.0)), (True, (UNCOVERED, None, None))]
    elif kind == "U6":
        rules = [
            (not away, (UNCOVERED, None, None)),
            (on(a, 0.5), (LOG_CORRECTED, 1.0, 1.0)),
            (a < 0.5, (EXACT, a + 0.5, a + 0.5)),
            (a < 0.5 + g / 2 and not on(a, 0.5 + g / 2), (EXACT, 1.0, 1.0)),
            (True, (UNCOVERED, None, None)),
        ]
    elif kind == "U2" and not away:
        lo, hi = -0.5 + g / 2, 0.5 + g / 2
        rules = [
            (g > 0 and (a < lo or on(a, lo)), (UNCOVERED, None, None)),
            (a < hi and not on(a, hi), (GENERALIZED, a + 0.5, a + (1 - g) / 2)),
            (a < 1.0 and not on(a, 1.0), (GENERALIZED, a + 0.5, a)),
            (True, (GENERALIZED, a + 0.5, 1.0)),
        ]
    else:  # U1, U4, U5 anywhere; U2 away from the origin
        rules = [
            (on(a, 0.5), (LOG_CORRECTED, 1.0, 1.0)),
            (a < 0.5, (EXACT, a + 0.5, a + 0.5)),
            (kind == "U1" and not away, (GENERALIZED, a + 0.5, 1.0)),
            (True, (EXACT, 1.0, 1.0)),
        ]
    tag, r1, r2 = next(out for cond, out in rules if cond)
    if tag == GENERALIZED and on(r1, r2):
        tag = EXACT
    return tag, r1, r2


_BOUNDARY_ALPHAS = (-0.499, -0.3, 0.0, 0.2, 0.5, 0.7, 1.0, 1.5, 2.0, 2.5)
_BOUNDARY_GAMMAS = (0.0, 0.2, 0.4, 0.6)


def _sweep_points(kind: str, rng: np.random.Generator, n: int = 200):
    """Boundary cases first, then random draws, alternating T1 = 0 and T1 > 0."""
    cand = []
    for g in _BOUNDARY_GAMMAS:
        for a in _BOUNDARY_ALPHAS + (0.5 + g / 2, -0.5 + g / 2):
            cand.append((a, g))
    while len(cand) < 4 * n:
        cand.append((rng.uniform(-0.5, 3.0), rng.choice([0.0, rng.uniform(0.0, 1.0)])))
    out = []
    for a, g in cand:
        uses_gamma = kind in ("U2", "U6", "V")
        uses_lam = kind in ("U1", "U4", "U5")
        try:
            spec = make_process(
                kind,
                0.0 if kind == "Wiener" else a,
                g if uses_gamma else 0.0,
                1.0 if uses_lam else 0.0,
            )
        except ValidationError:
            continue
        t1 = 0.0 if len(out) % 2 == 0 else 0.5
        out.append((spec, t1))
        if len(out) == n:
            break
    return out


def _c11_regime_table():
    rng = np.random.default_rng(11)
    mismatches, total = [], 0
    for kind in ProcessKind:
        for spec, t1 in _sweep_points(kind.value, rng):
            total += 1
            got = classify_regime(spec, Interval(t1, t1 + 1.0))
            want = _reference_regime(kind.value, spec.alpha, spec.gamma, t1)
            same = got.regime == want[0] and all(
                (x is None and y is None) or (x is not None and y is not None and math.isclose(x, y, abs_tol=1e-15))
                for x, y in zip((got.rho_lower, got.rho_upper), want[1:])
            )
            if not same:
                mismatches.append((kind.value, spec.alpha, spec.gamma, t1, got.regime, want[0]))
    detail = f"{total} points across {len(ProcessKind)} kinds, {len(mismatches)} mismatches"
    if mismatches:
        detail += f"; first {mismatches[0]}"
    return not mismatches, detail


CRITERIA: dict[int, tuple[str, Callable[[], tuple[bool, str]]]] = {
    1: ("constant identity", _c1_constant),
    2: ("closed-form variance", _c2_beta_variance),
    3: ("scaling identity", _c3_scaling),
    4: ("g-limits", _c4_g_limits),
    5: ("exact asymptotics", _c5_asymptotics),
    6: ("exponent recovery (exact regimes)", _c6_exponents),
    7: ("generalized regimes at the origin", _c7_origin),
    8: ("log-corrected borderline", _c8_log_corrected),
    9: ("Monte Carlo consistency", _c9_monte_carlo),
    10: ("stationarity and decomposition", _c10_structure),
    11: ("regime-table conformance", _c11_regime_table),
}


def run_criterion(number: int) -> CriterionResult:
    name, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failure of that criterion, not of the suite
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - start)


def run_all(only: Optional[Iterable[int]] = None, echo: Optional[Callable[[str], None]] = None) -> list[CriterionResult]:
    numbers = sorted(CRITERIA) if only is None else sorted(set(only))
    results = []
    for n in numbers:
        if n not in CRITERIA:
            raise ValidationError(f"no acceptance criterion numbered {n}")
        res = run_criterion(n)
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_helix.analyze import (
    MCConfig,
    IncrementTable,
    asymptotic_ratio_check,
    bound_check,
    exponent_report,
    fit_exponent,
    ladder,
    log_correction_check,
    scan_increments,
)
from volterra_helix.errors import DataError, DomainError, RegimeError
from volterra_helix.moments import incremental_variance
from volterra_helix.processes import WIENER, Interval, make_process
from volterra_helix.theory import EXACT, RegimeReport, classify_regime

LAGS = tuple(1e-2 * 0.5**k for k in range(10))


def _table(sigma, spec=WIENER, anchor=1.0, lags=LAGS):
    return IncrementTable(spec, anchor, lags, tuple(sigma))


def test_ladder():
    assert ladder(1.0, 4, 0.5) == [1.0, 0.5, 0.25, 0.125]
    for args in [(0.0, 4, 0.5), (1.0, 3, 0.5), (1.0, 4, 1.0)]:
        with pytest.raises(DomainError):
            ladder(*args)


def test_table_invariants():
    with pytest.raises(DomainError):
        IncrementTable(WIENER, 1.0, (1.0, 2.0), (1.0, 1.0))
    with pytest.raises(DomainError):
        IncrementTable(WIENER, 1.0, (1.0, 0.5), (1.0,))
    with pytest.raises(DomainError):
        IncrementTable(WIENER, 1.0, (1.0, 0.5), (1.0, float("nan")))
    t = _table([1.0] * len(LAGS))
    assert t.std_errors == (0.0,) * len(LAGS) and t.rows()[0]["variance"] == 1.0


def test_wiener_scan_is_sqrt_h():
    t = scan_increments(WIENER, 1.0, lag_count=6, lag_ratio=0.3, h_max=0.5)
    # exact up to the rounding of anchor + h
    np.testing.assert_allclose(t.sigma, np.sqrt(t.lags), rtol=1e-10)


def test_u2_scan_matches_moments():
    spec = make_process("U2", 0.25, 0.4)
    t = scan_increments(spec, 1.0, lag_count=5)
    for h, s in zip(t.lags, t.sigma):
        assert s * s == pytest.approx(incremental_variance(spec, 1.0, 1.0 + h).total, rel=1e-14)


def test_scan_rejects_bad_input():
    with pytest.raises(DomainError):
        scan_increments(WIENER, -1.0)
    with pytest.raises(DomainError):
        scan_increments(WIENER, 1.0, method="bogus")


def test_monte_carlo_scan_within_three_se():
    spec = make_process("U2", 0.25, 0.4)
    quad = scan_increments(spec, 1.0, lag_count=5, h_max=0.2)
    mc = scan_increments(spec, 1.0, lag_count=5, h_max=0.2, method="monte_carlo", mc_config=MCConfig(10_000, 0))
    assert mc.method == "monte_carlo"
    for q, m, se in zip(quad.sigma, mc.sigma, mc.std_errors):
        assert abs(q - m) <= 3 * se


def test_monte_carlo_scan_from_origin():
    mc = scan_increments(WIENER, 0.0, lag_count=4, h_max=1.0, method="monte_carlo", mc_config=MCConfig(10_000, 0))
    for h, s, se in zip(mc.lags, mc.sigma, mc.std_errors):
        assert abs(s - math.sqrt(h)) <= 3 * se


@given(st.floats(0.05, 2.0), st.floats(0.1, 10.0))
def test_fit_exact_on_pure_power(rho, c):
    t = _table([c * h**rho for h in LAGS])
    fit = fit_exponent(t)
    assert fit.rho_hat == pytest.approx(rho, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(c), abs=1e-10)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_example_power_table():
    fit = fit_exponent(_table([2 * h**0.8 for h in LAGS]))
    assert fit.rho_hat == pytest.approx(0.8, abs=1e-12) and fit.r_squared == pytest.approx(1.0)


def test_fit_wiener_quadrature():
    assert fit_exponent(scan_increments(WIENER, 1.0)).rho_hat == pytest.approx(0.5, abs=1e-10)


def test_fit_u1_example():
    t = scan_increments(make_process("U1", 0.3, lam=1.0), 0.5, h_max=0.01)
    assert fit_exponent(t).rho_hat == pytest.approx(0.8, abs=0.02)


def test_fit_degenerate_table():
    with pytest.raises(DataError):
        fit_exponent(_table([0.0] + [1.0] * (len(LAGS) - 1)))
    with pytest.raises(DataError):
        fit_exponent(_table([1.0, 1.0, 1.0], lags=LAGS[:3]))


@given(st.lists(st.floats(1e-3, 1e3), min_size=4, max_size=10))
@settings(max_examples=50)
def test_r_squared_in_unit_interval(values):
    fit = fit_exponent(_table(values, lags=LAGS[: len(values)]))
    assert 0.0 <= fit.r_squared <= 1.0


def test_bound_check_examples():
    report = RegimeReport(EXACT, 0.8, 0.8, False, "synthetic")
    res = bound_check(_table([2 * h**0.8 for h in LAGS]), report)
    assert res.c1_hat == pytest.approx(2.0) and res.c2_hat == pytest.approx(2.0)
    assert res.mesh_size == len(LAGS) and res.h_max == LAGS[0] and res.h_min == LAGS[-1]
    w = bound_check(scan_increments(WIENER, 1.0), classify_regime(WIENER, Interval(0, 1)))
    assert (w.c1_hat, w.c2_hat) == (pytest.approx(1.0), pytest.approx(1.0))


def test_bound_check_u2_alpha_07_bounded():
    spec = make_process("U2", 0.7, 0.4)
    interval = Interval(1.0, 2.0)
    res = bound_check(scan_increments(spec, 1.5), classify_regime(spec, interval))
    assert 0 < res.c1_hat <= res.c2_hat < math.inf
    assert res.c1_hat <= res.c2_hat * res.h_max ** (res.rho_upper - res.rho_lower)


@pytest.mark.parametrize(
    "spec, anchor",
    [
        (make_process("U2", 0.3, 0.4), 1.5),
        (make_process("U4", -0.3, lam=1.0), 0.5),
        (make_process("U1", 0.8, lam=1.0), 0.5),
    ],
    ids=["U2", "U4", "U1"],
)
def test_bound_constants_stable_under_refinement(spec, anchor):
    report = classify_regime(spec, Interval(anchor - 0.4, anchor + 0.4))
    coarse = bound_check(scan_increments(spec, anchor, lag_count=8, lag_ratio=0.25), report)
    fine = bound_check(scan_increments(spec, anchor, lag_count=15, lag_ratio=0.5), report)
    assert fine.c1_hat <= coarse.c1_hat * (1 + 1e-9)
    assert fine.c2_hat >= coarse.c2_hat * (1 - 1e-9)
    assert fine.c1_hat >= 0.99 * coarse.c1_hat and fine.c2_hat <= 1.01 * coarse.c2_hat


def test_bound_check_rejects_other_regimes():
    spec = make_process("U2", 0.5, 0.4)
    t = scan_increments(spec, 1.5)
    with pytest.raises(RegimeError):
        bound_check(t, classify_regime(spec, Interval(1, 2)))
    with pytest.raises(RegimeError):
        bound_check(t, classify_regime(make_process("V", 0.3, 0.4), Interval(0, 1)))


def test_log_correction_synthetic():
    spec = make_process("U2", 0.5, 0.4)
    sigma = [math.sqrt(3 * h * h * (1 + abs(math.log(h)))) for h in LAGS]
    lo, hi = log_correction_check(_table(sigma, spec=spec))
    assert (lo, hi) == (pytest.approx(3.0), pytest.approx(3.0))


@pytest.mark.parametrize("spec", [make_process("U2", 0.5, 0.4), make_process("U1", 0.5, lam=1.0)], ids=["U2", "U1"])
def test_log_correction_bounded_ratio(spec):
    t = scan_increments(spec, 1.0, lag_count=21, lag_ratio=10**-0.2, h_max=1e-2)
    assert t.lags[-1] == pytest.approx(1e-6)
    lo, hi = log_correction_check(t)
    assert 0 < lo and hi / lo <= 4


def test_log_correction_wrong_regime():
    with pytest.raises(RegimeError):
        log_correction_check(scan_increments(make_process("U2", 0.3, 0.4), 1.0))


def test_asymptotic_ratios():
    ones = asymptotic_ratio_check(make_process("U2", 0.0, 0.0), 1.0, scan_increments(make_process("U2", 0.0, 0.0), 1.0))
    assert ones == pytest.approx([1.0] * 12, rel=1e-10)
    for a, g, s, h in [(0.25, 0.4, 1.0, 1e-4), (-0.25, 0.2, 2.0, 1e-5)]:
        spec = make_process("U2", a, g)
        t = scan_increments(spec, s, lag_count=4, lag_ratio=math.sqrt(0.1), h_max=h * 10**1.5)
        assert t.lags[-1] == pytest.approx(h)
        assert 0.98 <= asymptotic_ratio_check(spec, s, t)[-1] <= 1.02


def test_asymptotic_ratios_approach_one():
    spec = make_process("U2", 0.25, 0.4)
    ratios = asymptotic_ratio_check(spec, 1.0, scan_increments(spec, 1.0, lag_ratio=0.1, lag_count=6, h_max=0.1))
    dev = [abs(r - 1) for r in ratios]
    assert dev == sorted(dev, reverse=True)


def test_asymptotic_out_of_regime():
    spec = make_process("U1", 0.3, lam=1.0)
    with pytest.raises(RegimeError):
        asymptotic_ratio_check(spec, 1.0, scan_increments(spec, 1.0))


EXACT_CASES = [
    (make_process("U1", -0.3, lam=1.0), Interval(0, 1)),
    (make_process("U2", 0.8, 0.4), Interval(1, 2)),
    (make_process("U5", 0.3, lam=1.0), Interval(0, 1)),
    (make_process("U6", 0.3, 0.4), Interval(1, 2)),
    (make_process("U6", 0.6, 0.4), Interval(1, 2)),
    (make_process("V", -0.2, 0.4), Interval(1, 2)),
]


@pytest.mark.parametrize("spec, interval", EXACT_CASES, ids=lambda x: getattr(getattr(x, "kind", None), "value", ""))
def test_exact_regime_exponent_recovered(spec, interval):
    rep = exponent_report(spec, interval)
    assert rep.regime.regime == EXACT
    assert rep.fit.rho_hat == pytest.approx(rep.regime.rho_lower, abs=0.02)
    assert rep.within


@pytest.mark.parametrize("alpha, gamma", [(0.25, 0.4), (0.7, 0.4), (1.2, 0.4), (0.1, 0.8)])
def test_generalized_at_origin(alpha, gamma):
    spec = make_process("U2", alpha, gamma)
    rep = exponent_report(spec, Interval(0.0, 1.0), anchor=0.0)
    assert rep.fit.rho_hat == pytest.approx((2 * alpha + 1 - gamma) / 2, abs=0.01)
    assert rep.regime.rho_upper - 0.02 <= rep.fit.rho_hat <= rep.regime.rho_lower + 0.02


def test_uncovered_report_has_no_verdict():
    rep = exponent_report(make_process("V", 0.3, 0.4), Interval(0.0, 1.0), anchor=1.0)
    assert rep.within is None

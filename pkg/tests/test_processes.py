import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from volterra_helix.errors import DomainError, ValidationError
from volterra_helix.processes import (
    WIENER,
    Interval,
    ProcessKind,
    ProcessSpec,
    kernel_eval,
    make_process,
    truncated_power,
)


def test_valid_u1():
    spec = make_process("u1", 0.3, lam=1.0)
    assert spec.kind is ProcessKind.U1 and spec.alpha == 0.3


@pytest.mark.parametrize(
    "kind, alpha, gamma, lam",
    [
        ("V", 0.0, 0.5, 0.0),
        ("U2", -0.6, 0.2, 0.0),
        ("V", 0.8, 0.5, 0.0),
        ("U1", 0.3, 0.0, 0.0),
        ("U1", 0.3, 0.2, 1.0),
        ("U3", 0.0, 0.0, 0.0),
        ("U2", 0.3, 1.0, 0.0),
        ("U4", 0.3, 0.0, -1.0),
        ("Wiener", 0.1, 0.0, 0.0),
        ("U7", 0.1, 0.0, 0.0),
        ("U2", float("nan"), 0.0, 0.0),
    ],
)
def test_invalid_specs(kind, alpha, gamma, lam):
    with pytest.raises(ValidationError):
        make_process(kind, alpha, gamma, lam)


def test_validation_is_a_value_error():
    with pytest.raises(ValueError):
        make_process("V", 0.0, 0.5)


def test_spec_dict_uses_lambda_key():
    assert make_process("U4", 0.3, lam=2.0).to_dict() == {"kind": "U4", "alpha": 0.3, "gamma": 0.0, "lambda": 2.0}


def test_interval_validation():
    assert Interval(1.0, 2.0).midpoint == 1.5
    for t1, t2 in [(-1.0, 1.0), (1.0, 1.0), (0.0, float("inf"))]:
        with pytest.raises(ValidationError):
            Interval(t1, t2)


def test_truncated_power():
    assert truncated_power(-1.0, 0.3) == 0.0
    assert truncated_power(4.0, 0.5) == 2.0
    assert truncated_power(0.0, 0.5) == 0.0
    with pytest.raises(DomainError):
        truncated_power(0.0, -0.2)


def test_kernel_examples():
    assert kernel_eval(make_process("U3", 1.0), 2.0, 1.0) == 1.0
    assert kernel_eval(make_process("U1", 0.0, lam=1.0), 3.0, 1.0) == pytest.approx(math.exp(-1))
    expected = math.exp(-1) * 2**0.3 - math.exp(-0.5)
    assert kernel_eval(make_process("U4", 0.3, lam=0.5), 1.0, -1.0) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("alpha", [-0.3, 0.3, 0.8])
@pytest.mark.parametrize("t, u", [(1.0, -2.0), (1.0, 0.4), (2.5, -0.1)])
def test_u5_kernel_matches_mpmath(alpha, t, u):
    spec = make_process("U5", alpha, lam=1.3)
    assert kernel_eval(spec, t, u) == pytest.approx(float(oracles.kernel("U5", alpha, 0, 1.3, t, u)), rel=1e-11)


@given(
    st.sampled_from(["U4", "U5"]),
    st.floats(-0.45, 1.5),
    st.floats(0.2, 3.0),
    st.floats(0.05, 2.0),
    st.floats(0.05, 2.0),
    st.floats(-3.0, 3.0),
)
@settings(max_examples=60, deadline=None)
def test_tempered_kernel_difference_is_translation_invariant(kind, alpha, lam, s, h, shift):
    spec = make_process(kind, alpha, lam=lam)
    t = s + h
    u = -0.37 * s  # strictly below both times
    base = kernel_eval(spec, t, u) - kernel_eval(spec, s, u)
    moved = kernel_eval(spec, t + shift + 5, u + shift + 5) - kernel_eval(spec, s + shift + 5, u + shift + 5)
    assert moved == pytest.approx(base, abs=1e-12, rel=1e-10)


@given(st.floats(-0.45, 0.6), st.floats(0.0, 0.9), st.floats(0.1, 3.0), st.floats(0.01, 0.99))
@settings(max_examples=60, deadline=None)
def test_u6_kernel_decomposes(alpha, gamma, t, frac):
    if alpha >= 0.5 + gamma / 2 or alpha == 0.0:
        return
    u6 = make_process("U6", alpha, gamma)
    v = make_process("V", alpha, gamma)
    u2 = make_process("U2", alpha, gamma)
    neg, pos = -frac * 3, frac * t
    assert kernel_eval(u6, t, neg) == pytest.approx(kernel_eval(v, t, neg), abs=1e-12)
    assert kernel_eval(u6, t, pos) == pytest.approx(kernel_eval(u2, t, pos), abs=1e-12)


@given(st.floats(0.01, 10.0), st.floats(0.001, 0.999))
def test_u3_alpha_one_is_wiener_kernel(t, frac):
    assert kernel_eval(make_process("U3", 1.0), t, frac * t) == 1.0 == kernel_eval(WIENER, t, frac * t)


def test_kernel_domain_errors():
    with pytest.raises(DomainError):
        kernel_eval(make_process("U2", 0.3, 0.2), 1.0, 1.5)
    with pytest.raises(DomainError):
        kernel_eval(make_process("U4", 0.3, lam=1.0), 1.0, 1.0)
    with pytest.raises(DomainError):
        kernel_eval(make_process("V", 0.3, 0.2), 1.0, 0.5)
    with pytest.raises(DomainError):
        kernel_eval(make_process("U4", -0.3, lam=1.0), 1.0, 0.0)


def test_kind_parsing():
    assert ProcessKind.parse("wiener") is ProcessKind.WIENER
    assert ProcessSpec("u2", 0.1, 0.2).kind is ProcessKind.U2
    assert ProcessKind.U4.zero_started is False and ProcessKind.U3.zero_started is True

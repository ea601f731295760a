"""Special functions and singularity-aware quadrature.

All integrands passed to :func:`integrate_finite` and
:func:`integrate_semi_infinite` must be vectorized: they are called with
numpy arrays of arbitrary shape and must return an array of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import AccuracyError, DomainError

DEFAULT_TOL = 1e-10
MAX_EVALUATIONS = 1_000_000

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

_GL_ORDER = 20
_GL_NODES, _GL_WEIGHTS = leggauss(_GL_ORDER)


def _lanczos(x: float) -> float:
    if x < 0.5:
        # reflection
        return math.pi / (math.sin(math.pi * x) * _lanczos(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    # split the power so t**(x+0.5) does not overflow before exp(-t) is applied
    half = t ** (0.5 * (x + 0.5))
    return _SQRT_2PI * half * math.exp(-t) * half * acc


def gamma_fn(x: float) -> float:
    """Euler's gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"gamma_fn requires a finite x > 0, got {x!r}")
    if x > 171.6:
        raise DomainError(f"gamma_fn({x}) overflows double precision")
    if x < 10.0:
        return _lanczos(x)
    # the Lanczos power term loses ~x*log(x)*eps; shift into [9, 10) instead
    n = int(x - 9.0)
    y = x - n
    out = _lanczos(y)
    for k in range(n):
        out *= y + k
    return out


def log_gamma_fn(x: float) -> float:
    """Logarithm of the gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"log_gamma_fn requires a finite x > 0, got {x!r}")
    if x < 100.0:
        return math.log(_lanczos(x))
    y = x - 1.0
    acc = _LANCZOS_COEF[0] + sum(c / (y + k) for k, c in enumerate(_LANCZOS_COEF) if k)
    t = y + _LANCZOS_G + 0.5
    return math.log(_SQRT_2PI) + (y + 0.5) * math.log(t) - t + math.log(acc)


def beta_fn(a: float, b: float) -> float:
    """Euler's beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b)."""
    a, b = float(a), float(b)
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"beta_fn requires a, b > 0, got ({a!r}, {b!r})")
    if a + b < 170.0:
        return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b)
    return math.exp(log_gamma_fn(a) + log_gamma_fn(b) - log_gamma_fn(a + b))


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
        )


@dataclass(frozen=True)
class EndpointSingularity:
    """Power-law endpoint behaviour ``(distance to endpoint) ** exponent``."""

    location: str = "none"
    exponent: float = 0.0

    def __post_init__(self):
        if self.location not in ("lower", "upper", "none"):
            raise DomainError(f"unknown singularity location {self.location!r}")
        if not (-1.0 < self.exponent <= 0.0):
            raise DomainError(
                f"singularity exponent must lie in (-1, 0], got {self.exponent!r}"
            )


NO_SINGULARITY = EndpointSingularity()

SingSpec = Union[None, EndpointSingularity, Iterable[EndpointSingularity]]


def lower(exponent: float) -> EndpointSingularity:
    """Lower-endpoint singularity; exponents above 0 are treated as regular."""
    return EndpointSingularity("lower", min(float(exponent), 0.0))


def upper(exponent: float) -> EndpointSingularity:
    """Upper-endpoint singularity; exponents above 0 are treated as regular."""
    return EndpointSingularity("upper", min(float(exponent), 0.0))


def _normalize_sing(sing: SingSpec) -> tuple[float, float]:
    if sing is None:
        return 0.0, 0.0
    if isinstance(sing, EndpointSingularity):
        sing = (sing,)
    lo = hi = 0.0
    for s in sing:
        if s.location == "lower":
            lo = min(lo, s.exponent)
        elif s.location == "upper":
            hi = min(hi, s.exponent)
    return lo, hi


def _mapped(f, a: float, length: float, exponent: float, side: str):
    """Integrand on w in [0, 1] with the endpoint power singularity removed."""
    q = 1.0 / (1.0 + exponent)

    def g(w):
        d = length * w**q if q != 1.0 else length * w
        x = a + d if side == "lower" else a - d
        with np.errstate(all="ignore"):
            y = np.asarray(f(x), dtype=float)
            if q != 1.0:
                y = y * (length * q) * w ** (q - 1.0)
            else:
                y = y * length
        bad = ~np.isfinite(y)
        if bad.any():
            # only the node that collapsed onto the singular endpoint may be non-finite
            at_end = (d == 0.0) | (x == a)
            if np.any(bad & ~at_end):
                raise DomainError("integrand returned a non-finite value inside the interval")
            y = np.where(bad, 0.0, y)
        return y

    return g


def _panels(g, lo: np.ndarray, hi: np.ndarray):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    y = g(x)
    return half * (y @ _GL_WEIGHTS), half * (np.abs(y) @ _GL_WEIGHTS)


def _adaptive_unit(g, tol: float, abs_tol: float, budget: int) -> QuadResult:
    """Adaptive bisection of [0, 1] with a 20-point Gauss-Legendre panel rule.

    Each panel carries its coarse value and the sum over its two halves; the
    difference is the panel error estimate.
    """
    n = _GL_ORDER
    lo = np.array([0.0])
    hi = np.array([1.0])
    coarse, _ = _panels(g, lo, hi)
    mids = 0.5 * (lo + hi)
    halves, habs = _panels(g, np.concatenate([lo, mids]), np.concatenate([mids, hi]))
    left, right = halves[:1], halves[1:]
    labs, rabs = habs[:1], habs[1:]
    evals = 3 * n
    while True:
        fine = left + right
        err = np.abs(coarse - fine)
        total = float(fine.sum())
        err_total = float(err.sum())
        target = max(tol * abs(total), abs_tol)
        roundoff = 64.0 * np.finfo(float).eps * float((labs + rabs).sum())
        if err_total <= target or err_total <= roundoff:
            return QuadResult(total, err_total, evals)
        width = hi - lo
        splittable = width > 64.0 * np.finfo(float).eps * np.maximum(np.abs(hi), 1e-300)
        share = max(target, roundoff) / len(err)
        split = splittable & ((err > share) | (err >= 0.5 * err.max()))
        split &= err > 0.0
        if not split.any():
            if err_total <= 10.0 * max(target, roundoff):
                return QuadResult(total, err_total, evals)
            raise AccuracyError(
                f"quadrature stalled: error {err_total:.3e} > target {target:.3e}",
                QuadResult(total, err_total, evals),
            )
        m = int(split.sum())
        if evals + 4 * n * m > budget:
            raise AccuracyError(
                f"evaluation budget of {budget} exhausted "
                f"(error {err_total:.3e} > target {target:.3e})",
                QuadResult(total, err_total, evals),
            )
        s_lo, s_hi = lo[split], hi[split]
        s_mid = 0.5 * (s_lo + s_hi)
        q1, q3 = 0.5 * (s_lo + s_mid), 0.5 * (s_mid + s_hi)
        quarters, qabs = _panels(
            g,
            np.concatenate([s_lo, q1, s_mid, q3]),
            np.concatenate([q1, s_mid, q3, s_hi]),
        )
        evals += 4 * n * m
        keep = ~split
        lo = np.concatenate([lo[keep], s_lo, s_mid])
        hi = np.concatenate([hi[keep], s_mid, s_hi])
        coarse = np.concatenate([coarse[keep], left[split], right[split]])
        left = np.concatenate([left[keep], quarters[:m], quarters[2 * m:3 * m]])
        right = np.concatenate([right[keep], quarters[m:2 * m], quarters[3 * m:]])
        labs = np.concatenate([labs[keep], qabs[:m], qabs[2 * m:3 * m]])
        rabs = np.concatenate([rabs[keep], qabs[m:2 * m], qabs[3 * m:]])


def integrate_finite(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    sing: SingSpec = None,
    tol: float = DEFAULT_TOL,
    *,
    abs_tol: Optional[float] = None,
    budget: int = MAX_EVALUATIONS,
) -> QuadResult:
    """Integrate ``f`` over ``[a, b]``.

    ``sing`` declares power-law endpoint singularities, either a single
    :class:`EndpointSingularity` or a sequence (one per endpoint). A singular
    endpoint with exponent ``p`` is removed by the substitution
    ``x - a = (b - a) * w ** (1 / (1 + p))`` before adaptive refinement; when
    both endpoints are singular the interval is split at its midpoint.

    Convergence criterion is ``error <= max(tol * |value|, abs_tol)``;
    ``abs_tol`` defaults to ``tol``. Pass ``abs_tol=0`` for a purely relative
    tolerance.

    Upper-endpoint singularities are evaluated at ``b - d``, which loses
    accuracy when ``d`` falls below the spacing of floats near ``b``. Callers
    that need full accuracy there should reflect the variable so the
    singularity sits at a lower endpoint of 0.
    """
    a, b = float(a), float(b)
    if not (a < b):
        raise DomainError(f"integrate_finite requires a < b, got [{a}, {b}]")
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    abs_tol = tol if abs_tol is None else float(abs_tol)
    p_lo, p_hi = _normalize_sing(sing)
    length = b - a
    if p_lo < 0.0 and p_hi < 0.0:
        m = a + 0.5 * length
        half_tol = 0.5 * abs_tol
        r1 = _adaptive_unit(_mapped(f, a, m - a, p_lo, "lower"), tol, half_tol, budget)
        r2 = _adaptive_unit(
            _mapped(f, b, b - m, p_hi, "upper"), tol, half_tol, budget - r1.evaluations
        )
        return r1 + r2
    if p_hi < 0.0:
        return _adaptive_unit(_mapped(f, b, length, p_hi, "upper"), tol, abs_tol, budget)
    return _adaptive_unit(_mapped(f, a, length, p_lo, "lower"), tol, abs_tol, budget)


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    tail_exponent: float,
    tol: float = DEFAULT_TOL,
    *,
    sing: SingSpec = None,
    tail_constant: Optional[float] = None,
    decay_rate: Optional[float] = None,
    scale: float = 1.0,
    abs_tol: Optional[float] = None,
    budget: int = MAX_EVALUATIONS,
) -> QuadResult:
    """Integrate ``f`` over ``[a, inf)`` by truncation at a point ``U``.

    With ``|f(u)| <= C * u ** tail_exponent`` the truncation point satisfies
    ``C * U ** (tail_exponent + 1) / |tail_exponent + 1| <= tau`` where
    ``tau = max(tol * |head|, abs_tol) / 2`` and ``head`` is the integral over
    ``[a, a + scale]``. ``C`` is ``tail_constant`` when given, otherwise it is
    estimated from samples of ``f`` on a doubling ladder (only reliable when
    ``f`` is evaluated without cancellation at large ``u``).

    With ``decay_rate`` set, ``f`` is taken to decay like
    ``exp(-decay_rate * u)`` times a power and
    ``U = a + max(1, 4 * log(1 / tol) / decay_rate)``.

    The returned error estimate includes the tail bound.
    """
    if not tail_exponent < -1.0:
        raise DomainError(
            f"tail_exponent must be < -1 for a convergent tail, got {tail_exponent!r}"
        )
    a = float(a)
    abs_tol = tol if abs_tol is None else float(abs_tol)
    scale = float(scale)
    if decay_rate is not None:
        if not decay_rate > 0.0:
            raise DomainError("decay_rate must be positive")
        cut = a + max(1.0, 4.0 * math.log(1.0 / tol) / decay_rate)
        body = integrate_finite(f, a, cut, sing, tol, abs_tol=0.5 * abs_tol, budget=budget)
        with np.errstate(all="ignore"):
            f_cut = abs(float(np.asarray(f(np.array([cut])))[0]))
        tail = 2.0 * f_cut / decay_rate if math.isfinite(f_cut) else 0.0
        return QuadResult(body.value, body.error_estimate + tail, body.evaluations + 1)

    p = float(tail_exponent)
    head = integrate_finite(f, a, a + scale, sing, tol, abs_tol=0.5 * abs_tol, budget=budget)
    n_probe = 0
    if tail_constant is None:
        tail_constant, n_probe = _estimate_tail_constant(f, a, p, scale)
    if tail_constant <= 0.0:
        return QuadResult(head.value, head.error_estimate, head.evaluations + n_probe)
    tau = 0.5 * max(tol * abs(head.value), abs_tol)
    if tau <= 0.0:
        raise DomainError("a zero tolerance admits no finite truncation point")
    log_cut = (math.log(tail_constant) - math.log(abs(p + 1.0) * tau)) / abs(p + 1.0)
    if log_cut > math.log(1e300):
        raise AccuracyError(f"truncation point exceeds 1e300 for tail exponent {p}", head)
    cut = max(a + 2.0 * scale, math.exp(log_cut))
    tail = tail_constant * cut ** (p + 1.0) / abs(p + 1.0)

    # log map on [a + scale, cut]: algebraic decay becomes exponential decay
    def g(y):
        x = a + scale * np.exp(y)
        return f(x) * (scale * np.exp(y))

    body = integrate_finite(
        g,
        0.0,
        math.log((cut - a) / scale),
        None,
        tol,
        abs_tol=0.5 * abs_tol,
        budget=budget - head.evaluations,
    )
    total = head + body
    return QuadResult(
        total.value, total.error_estimate + tail, total.evaluations + n_probe
    )


def _estimate_tail_constant(f, a: float, p: float, scale: float) -> tuple[float, int]:
    base = max(abs(a), scale, 1.0)
    ks = np.arange(0, 997)
    u = a + base * np.exp2(ks.astype(float))
    u = u[np.isfinite(u) & (u < 1e300)]
    with np.errstate(all="ignore"):
        vals = np.abs(np.asarray(f(u), dtype=float)) * u ** (-p)
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return 0.0, int(u.size)
    return 2.0 * float(vals[3:].max() if vals.size > 3 else vals.max()), int(u.size)


def power_diff(x, h: float, alpha: float):
    """``(x + h) ** alpha - x ** alpha`` without cancellation, for ``x >= 0``.

    At ``x == 0`` returns ``h ** alpha`` for ``alpha > 0``, ``0`` for
    ``alpha == 0`` and ``-inf`` for ``alpha < 0``.
    """
    x = np.asarray(x, dtype=float)
    if alpha == 0.0:
        return np.zeros_like(x)
    with np.errstate(all="ignore"):
        safe = np.where(x > 0.0, x, 1.0)
        val = safe**alpha * np.expm1(alpha * np.log1p(h / safe))
    at_zero = h**alpha if alpha > 0.0 else -np.inf
    return np.where(x > 0.0, val, at_zero)


def combine(results: Sequence[QuadResult]) -> QuadResult:
    out = QuadResult(0.0, 0.0, 0)
    for r in results:
        out = out + r
    return out

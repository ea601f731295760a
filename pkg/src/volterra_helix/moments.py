"""Second-moment structure: variances, increments, covariances.

For the zero-started kinds the incremental variance splits as
``J1 + J2`` where ``J1`` collects the kernel difference on ``[0, s]`` and
``J2`` the fresh noise on ``[s, t]``. The minus-infinity kinds ``U4``/``U5``
have stationary increments and are evaluated in the lag ``h = t - s`` only;
``V`` contributes ``J4``; ``U6`` is the independent sum ``V + U2``.

Every quadrature here runs with a purely relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from .errors import AccuracyError, DomainError
from .numerics import (
    DEFAULT_TOL,
    QuadResult,
    beta_fn,
    combine,
    gamma_fn,
    integrate_finite,
    integrate_semi_infinite,
    lower,
    power_diff,
)
from .processes import ProcessKind, ProcessSpec, kappa_array

_ZERO = QuadResult(0.0, 0.0, 0)
_GL16_X, _GL16_W = leggauss(16)


@dataclass(frozen=True)
class IncrementQuery:
    spec: ProcessSpec
    s: float
    t: float

    def __post_init__(self):
        if not (0.0 <= self.s <= self.t) or not math.isfinite(self.t):
            raise DomainError(f"increment query requires 0 <= s <= t, got s={self.s}, t={self.t}")


@dataclass(frozen=True)
class MomentBreakdown:
    """``total`` is ``j1 + j2`` (zero-started, U4, U5), ``j4`` (V) or
    ``j4 + j1 + j2`` (U6)."""

    j1: float
    j2: float
    j4: float
    total: float
    method: str
    error_estimate: float = 0.0

    def to_dict(self) -> dict:
        return {
            "j1": self.j1,
            "j2": self.j2,
            "j4": self.j4,
            "total": self.total,
            "method": self.method,
            "error_estimate": self.error_estimate,
        }


def _quad(f, a, b, sing, tol) -> QuadResult:
    return integrate_finite(f, a, b, sing, tol, abs_tol=0.0)


# ---------------------------------------------------------------------------
# scaling functions and the constant C(alpha)


def _check_ag(alpha: float, gamma: float) -> None:
    if not alpha > -0.5:
        raise DomainError(f"alpha must exceed -1/2, got {alpha}")
    if not 0.0 <= gamma < 1.0:
        raise DomainError(f"gamma must lie in [0, 1), got {gamma}")


def g1_quad(r: float, alpha: float, gamma: float, tol: float = DEFAULT_TOL) -> QuadResult:
    """``int_0^r (r-z)^(-gamma) [(1+z)^alpha - z^alpha]^2 dz``."""
    _check_ag(alpha, gamma)
    if not r > 0.0:
        raise DomainError(f"g1 requires r > 0, got {r}")
    if alpha == 0.0:
        return _ZERO
    half = 0.5 * r

    def near_zero(z):
        return (r - z) ** (-gamma) * power_diff(z, 1.0, alpha) ** 2

    def near_r(y):
        return y ** (-gamma) * power_diff(r - y, 1.0, alpha) ** 2

    return _quad(near_zero, 0.0, half, lower(2 * alpha), tol) + _quad(
        near_r, 0.0, r - half, lower(-gamma), tol
    )


def g1(r: float, alpha: float, gamma: float, tol: float = DEFAULT_TOL) -> float:
    return g1_quad(r, alpha, gamma, tol).value


def g2_quad(r: float, alpha: float, gamma: float, tol: float = DEFAULT_TOL) -> QuadResult:
    """``int_0^1 (z+r)^(-gamma) (1-z)^(2 alpha) dz``."""
    _check_ag(alpha, gamma)
    if not r >= 0.0:
        raise DomainError(f"g2 requires r >= 0, got {r}")

    def near_zero(z):
        return (z + r) ** (-gamma) * (1.0 - z) ** (2 * alpha)

    def near_one(y):
        return (1.0 + r - y) ** (-gamma) * y ** (2 * alpha)

    sing0 = lower(-gamma) if r == 0.0 else None
    return _quad(near_zero, 0.0, 0.5, sing0, tol) + _quad(near_one, 0.0, 0.5, lower(2 * alpha), tol)


def g2(r: float, alpha: float, gamma: float, tol: float = DEFAULT_TOL) -> float:
    return g2_quad(r, alpha, gamma, tol).value


def mandelbrot_constant(alpha: float) -> float:
    """``Gamma(alpha+1)^2 / (Gamma(2 alpha+2) cos(pi alpha))`` for ``|alpha| < 1/2``."""
    if not -0.5 < alpha < 0.5:
        raise DomainError(f"C(alpha) requires |alpha| < 1/2, got {alpha}")
    return gamma_fn(alpha + 1.0) ** 2 / (gamma_fn(2.0 * alpha + 2.0) * math.cos(math.pi * alpha))


def mandelbrot_constant_numeric(alpha: float, tol: float = DEFAULT_TOL) -> float:
    """``int_0^inf [(1+z)^alpha - z^alpha]^2 dz + 1/(2 alpha + 1)`` by quadrature."""
    if not -0.5 < alpha < 0.5:
        raise DomainError(f"C(alpha) requires |alpha| < 1/2, got {alpha}")
    if alpha == 0.0:
        return 1.0

    def f(z):
        return power_diff(z, 1.0, alpha) ** 2

    res = integrate_semi_infinite(
        f, 0.0, 2 * alpha - 2, tol, sing=lower(2 * alpha), tail_constant=alpha**2
    )
    return res.value + 1.0 / (2 * alpha + 1)


# ---------------------------------------------------------------------------
# per-kind increment pieces; each returns (J1, J2) or J4 as QuadResults


def _u2_pieces(s, h, alpha, gamma, tol):
    if s == 0.0:
        j1 = _ZERO
    elif alpha == 0.0:
        j1 = _ZERO
    else:
        # int_0^s (s-z)^(-gamma) [(h+z)^alpha - z^alpha]^2 dz, split at s/2
        def j1_lo(z):
            return (s - z) ** (-gamma) * power_diff(z, h, alpha) ** 2

        def j1_hi(y):
            return y ** (-gamma) * power_diff(s - y, h, alpha) ** 2

        half = 0.5 * s
        j1 = _quad(j1_lo, 0.0, half, lower(2 * alpha), tol) + _quad(
            j1_hi, 0.0, s - half, lower(-gamma), tol
        )

    # int_0^h (s+u)^(-gamma) (h-u)^(2 alpha) du, split at h/2
    def j2_lo(u):
        return (s + u) ** (-gamma) * (h - u) ** (2 * alpha)

    def j2_hi(v):
        return (s + h - v) ** (-gamma) * v ** (2 * alpha)

    half = 0.5 * h
    j2 = _quad(j2_lo, 0.0, half, lower(-gamma) if s == 0.0 else None, tol) + _quad(
        j2_hi, 0.0, h - half, lower(2 * alpha), tol
    )
    return j1, j2


def _u1_pieces(s, h, alpha, lam, tol):
    t = s + h
    if s == 0.0 or alpha == 0.0:
        j1 = _ZERO
    else:
        def j1_f(v):
            return np.exp(-2 * lam * (s - v)) * power_diff(v, h, alpha) ** 2

        j1 = _quad(j1_f, 0.0, s, lower(2 * alpha), tol)

    def j2_f(v):
        return np.exp(-2 * lam * (t - v)) * v ** (2 * alpha)

    j2 = _quad(j2_f, 0.0, h, lower(2 * alpha), tol)
    return j1, j2


def _u3_pieces(s, h, alpha, tol):
    # u = s*exp(-y) on [0, s] and u = t*exp(-y) on [s, t]
    t = s + h
    beta = 0.5 * (alpha - 1.0)
    if s == 0.0:
        def full(y):
            return np.exp(-y) * y ** (alpha - 1.0)

        j2 = integrate_semi_infinite(
            full, 0.0, -2.0, tol, sing=lower(alpha - 1.0), decay_rate=1.0, abs_tol=0.0
        )
        return _ZERO, QuadResult(t * j2.value, t * j2.error_estimate, j2.evaluations)
    c = math.log1p(h / s)
    if beta == 0.0:
        j1 = _ZERO
    else:
        def j1_f(y):
            return np.exp(-y) * power_diff(y, c, beta) ** 2

        j1 = integrate_semi_infinite(
            j1_f, 0.0, -2.0, tol, sing=lower(2 * beta), decay_rate=1.0, abs_tol=0.0
        )
        j1 = QuadResult(s * j1.value, s * j1.error_estimate, j1.evaluations)

    def j2_f(y):
        return np.exp(-y) * y ** (alpha - 1.0)

    j2 = _quad(j2_f, 0.0, c, lower(alpha - 1.0), tol)
    return j1, QuadResult(t * j2.value, t * j2.error_estimate, j2.evaluations)


def _kappa_increment(a: np.ndarray, h: float, alpha: float, lam: float) -> np.ndarray:
    """``int_a^(a+h) exp(-lam y) y^alpha dy`` for ``a >= 0``, vectorized.

    Far from the origin (``a >= 4h``) a 16-point Gauss-Legendre rule is exact
    to rounding; near it the regularized incomplete gamma function is used.
    """
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    far = a >= 4.0 * h
    if far.any():
        af = a[far]
        nodes = af[:, None] + 0.5 * h * (_GL16_X[None, :] + 1.0)
        out[far] = 0.5 * h * (kappa_array(nodes, alpha, lam) @ _GL16_W)
    near = ~far
    if near.any():
        an = a[near]
        shape = alpha + 1.0
        scale = gamma_fn(shape) * lam ** (-shape)
        x0, x1 = lam * an, lam * (an + h)
        upper_branch = x0 > shape
        lower_diff = special.gammainc(shape, x1) - special.gammainc(shape, x0)
        upper_diff = special.gammaincc(shape, x0) - special.gammaincc(shape, x1)
        out[near] = scale * np.where(upper_branch, upper_diff, lower_diff)
    return out


def _tempered_pieces(kind, h, alpha, lam, tol):
    """Stationary-increment kinds: memory part over ``v > 0`` plus fresh part on ``(0, h)``."""
    second = kind is ProcessKind.U5

    def memory(v):
        v = np.asarray(v, dtype=float)
        with np.errstate(all="ignore"):
            d = np.exp(-lam * v) * v**alpha * np.expm1(alpha * np.log1p(h / v) - lam * h)
            if second:
                flat = v.ravel()
                d = d + lam * _kappa_increment(flat, h, alpha, lam).reshape(v.shape)
        return d * d

    def fresh(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            d = kappa_array(x, alpha, lam)
            if second:
                d = d + lam ** (-alpha) * gamma_fn(alpha + 1.0) * special.gammainc(alpha + 1.0, lam * x)
        return d * d

    j1 = integrate_semi_infinite(
        memory, 0.0, -2.0, tol, sing=lower(2 * alpha), decay_rate=2.0 * lam, abs_tol=0.0
    )
    j2 = _quad(fresh, 0.0, h, lower(2 * alpha), tol)
    return j1, j2


def _v_piece(s, h, alpha, gamma, tol):
    """``J4 = int_0^inf u^(-gamma) [(t+u)^alpha - (s+u)^alpha]^2 du``."""
    if alpha == 0.0:
        return _ZERO
    tail = 2 * alpha - 2 - gamma
    if not tail < -1.0:
        raise DomainError(
            f"V part diverges: requires alpha < 1/2 + gamma/2, got alpha={alpha}, gamma={gamma}"
        )
    edge = -gamma if s > 0.0 else -gamma + min(2 * alpha, 0.0)
    if not edge > -1.0:
        raise DomainError(
            "V(t) has infinite variance from the origin when 2*alpha - gamma <= -1 "
            f"(alpha={alpha}, gamma={gamma})"
        )

    def f(u):
        return u ** (-gamma) * power_diff(s + u, h, alpha) ** 2

    return integrate_semi_infinite(
        f,
        0.0,
        tail,
        tol,
        sing=lower(edge),
        tail_constant=alpha**2 * h**2,
        scale=s + h,
        abs_tol=0.0,
    )


# ---------------------------------------------------------------------------
# public moment operations


def incremental_variance(
    spec: ProcessSpec, s: float, t: float, tol: float = DEFAULT_TOL
) -> MomentBreakdown:
    """``E(U(t) - U(s))^2`` with its decomposition."""
    q = IncrementQuery(spec, float(s), float(t))
    s, t = q.s, q.t
    h = t - s
    kind, a, g, lam = spec.kind, spec.alpha, spec.gamma, spec.lam
    if h == 0.0:
        return MomentBreakdown(0.0, 0.0, 0.0, 0.0, "closed_form")
    if kind is ProcessKind.WIENER:
        return MomentBreakdown(0.0, h, 0.0, h, "closed_form")

    j1 = j2 = j4 = _ZERO
    try:
        if kind is ProcessKind.U1:
            j1, j2 = _u1_pieces(s, h, a, lam, tol)
        elif kind is ProcessKind.U2:
            j1, j2 = _u2_pieces(s, h, a, g, tol)
        elif kind is ProcessKind.U3:
            j1, j2 = _u3_pieces(s, h, a, tol)
        elif kind in (ProcessKind.U4, ProcessKind.U5):
            j1, j2 = _tempered_pieces(kind, h, a, lam, tol)
        elif kind is ProcessKind.V:
            j4 = _v_piece(s, h, a, g, tol)
        elif kind is ProcessKind.U6:
            j4 = _v_piece(s, h, a, g, tol)
            j1, j2 = _u2_pieces(s, h, a, g, tol)
        else:
            raise AssertionError(kind)
    except AccuracyError as exc:
        partial = MomentBreakdown(
            j1.value, j2.value, j4.value, j1.value + j2.value + j4.value, "quadrature",
            j1.error_estimate + j2.error_estimate + j4.error_estimate,
        )
        raise AccuracyError(str(exc), partial) from exc

    err = combine([j1, j2, j4]).error_estimate
    if kind is ProcessKind.V:
        return MomentBreakdown(0.0, 0.0, j4.value, j4.value, "quadrature", err)
    if kind is ProcessKind.U6:
        total = j4.value + (j1.value + j2.value)
        return MomentBreakdown(j1.value, j2.value, j4.value, total, "sum_of_components", err)
    return MomentBreakdown(j1.value, j2.value, 0.0, j1.value + j2.value, "quadrature", err)


def variance(spec: ProcessSpec, t: float, tol: float = DEFAULT_TOL) -> float:
    """``E U(t)^2``; closed forms for U2, U3 and the Wiener process."""
    t = float(t)
    if not t > 0.0 or not math.isfinite(t):
        raise DomainError(f"variance requires t > 0, got {t}")
    kind, a, g, lam = spec.kind, spec.alpha, spec.gamma, spec.lam
    if kind is ProcessKind.WIENER:
        return t
    if kind is ProcessKind.U2:
        return beta_fn(1.0 - g, 1.0 + 2 * a) * t ** (2 * a + 1 - g)
    if kind is ProcessKind.U3:
        return gamma_fn(a) * t
    if kind is ProcessKind.U1:
        # e^{-2 lam t} int_0^t e^{2 lam u} u^{2 alpha} du, folded to avoid overflow
        def f(u):
            return np.exp(-2 * lam * (t - u)) * u ** (2 * a)

        return _quad(f, 0.0, t, lower(2 * a), tol).value
    return incremental_variance(spec, 0.0, t, tol).total


def covariance(spec: ProcessSpec, s: float, t: float, tol: float = DEFAULT_TOL) -> float:
    """``E U(s) U(t)`` by polarization of the incremental variance."""
    s, t = float(s), float(t)
    if not (s > 0.0 and t > 0.0):
        raise DomainError(f"covariance requires s, t > 0, got ({s}, {t})")
    lo, hi = min(s, t), max(s, t)
    if lo == hi:
        return variance(spec, lo, tol)
    inc = incremental_variance(spec, lo, hi, tol).total
    return 0.5 * (variance(spec, lo, tol) + variance(spec, hi, tol) - inc)

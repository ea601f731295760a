"""Regime oracle: theoretical (generalized) quasihelix exponents.

Exponents refer to the L2 norm of an increment, ``||U(t) - U(s)||_2``. A
local ``(rho1, rho2)``-generalized quasihelix on ``[T1, T2]`` satisfies
``C1 |t-s|^rho1 <= ||U(t)-U(s)||_2 <= C2 |t-s|^rho2``.

``classify_regime`` only reports what the catalogued results state; outside
their hypotheses it answers ``uncovered``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import RegimeError
from .moments import mandelbrot_constant
from .processes import Interval, ProcessKind, ProcessSpec

EXACT = "exact_quasihelix"
GENERALIZED = "generalized"
LOG_CORRECTED = "log_corrected"
UNCOVERED = "uncovered"
REGIMES = (EXACT, GENERALIZED, LOG_CORRECTED, UNCOVERED)

# parameters within this distance of a table boundary count as on it
BOUNDARY_EPS = 1e-12


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    rho_lower: Optional[float]
    rho_upper: Optional[float]
    requires_t1_positive: bool
    source: str

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "rho_lower": self.rho_lower,
            "rho_upper": self.rho_upper,
            "requires_t1_positive": self.requires_t1_positive,
            "source": self.source,
        }


def _eq(x: float, y: float) -> bool:
    return abs(x - y) <= BOUNDARY_EPS


def _exact(rho, source, t1_pos=False):
    return RegimeReport(EXACT, rho, rho, t1_pos, source)


def _gen(rho1, rho2, source, t1_pos=False):
    if _eq(rho1, rho2):
        return _exact(rho1, source, t1_pos)
    return RegimeReport(GENERALIZED, rho1, rho2, t1_pos, source)


def _log(source, t1_pos=False):
    return RegimeReport(LOG_CORRECTED, 1.0, 1.0, t1_pos, source)


def _uncovered(source):
    return RegimeReport(UNCOVERED, None, None, False, source)


def _tempered_origin(a, source, t1_pos=False):
    # shared pattern: alpha < 1/2 exact, alpha = 1/2 borderline, alpha > 1/2 exact at 1
    if _eq(a, 0.5):
        return _log(source + "; h^2(1+|log h|) borderline", t1_pos)
    if a < 0.5:
        return _exact(a + 0.5, source, t1_pos)
    return _exact(1.0, source, t1_pos)


def classify_regime(spec: ProcessSpec, interval: Interval) -> RegimeReport:
    kind, a, g = spec.kind, spec.alpha, spec.gamma
    t1_pos = interval.t1 > 0.0

    if kind is ProcessKind.WIENER:
        return _exact(0.5, "Wiener process: ||W(t)-W(s)||_2 = |t-s|^(1/2)")

    if kind is ProcessKind.U1:
        src = "exponentially tempered Riemann-Liouville kernel"
        if a > 0.5 and not _eq(a, 0.5):
            if t1_pos:
                return _exact(1.0, src + ", alpha > 1/2, interval away from 0", True)
            return _gen(a + 0.5, 1.0, src + ", alpha > 1/2 on [0, T]")
        return _tempered_origin(a, src)

    if kind is ProcessKind.U3:
        src = "Hadamard logarithmic kernel on [0, T]"
        if _eq(a, 1.0):
            return _exact(0.5, src + ", alpha = 1 is the Wiener process")
        if a < 1.0:
            return _gen(1.0, a, src + ", alpha in (0, 1)")
        if a < 2.0 and not _eq(a, 2.0):
            return _gen(a, 1.0, src + ", alpha in (1, 2)")
        return _gen(a / 2.0, 0.5, src + ", alpha >= 2")

    if kind is ProcessKind.U2:
        src = "power-weighted Riemann-Liouville kernel"
        if t1_pos:
            src += " on [T1, T2], T1 > 0"
            if _eq(a, 0.5):
                return _log(src + "; h^2(1+|log h|) borderline", True)
            if a < 0.5:
                return _exact(a + 0.5, src + ", exact small-lag asymptotics", True)
            return _exact(1.0, src + ", alpha > 1/2", True)
        src += " on [0, T]"
        lo_edge, hi_edge = -0.5 + g / 2.0, 0.5 + g / 2.0
        if g > 0.0 and (a < lo_edge or _eq(a, lo_edge)):
            return _uncovered(src + ", alpha <= -1/2 + gamma/2 is not treated")
        if a < hi_edge and not _eq(a, hi_edge):
            return _gen(a + 0.5, a + (1.0 - g) / 2.0, src + ", alpha in (-1/2+gamma/2, 1/2+gamma/2)")
        if a < 1.0 and not _eq(a, 1.0):
            return _gen(a + 0.5, a, src + ", alpha in [1/2+gamma/2, 1)")
        return _gen(a + 0.5, 1.0, src + ", alpha >= 1")

    if kind in (ProcessKind.U4, ProcessKind.U5):
        name = "tempered fractional Brownian motion" + (" of the second kind" if kind is ProcessKind.U5 else "")
        return _tempered_origin(a, name + " on [0, T]")

    if kind is ProcessKind.V:
        src = "component V of the two-sided power-weighted process"
        if not t1_pos:
            return _uncovered(src + "; only intervals with T1 > 0 are treated")
        return _exact(1.0, src + " on [T1, T2], T1 > 0", True)

    if kind is ProcessKind.U6:
        src = "two-sided power-weighted process U6 = V + U2"
        if not t1_pos:
            return _uncovered(src + "; only intervals with T1 > 0 are treated")
        src += " on [T1, T2], T1 > 0"
        if _eq(a, 0.5):
            return _log(src + "; h^2(1+|log h|) borderline", True)
        if a < 0.5:
            return _exact(a + 0.5, src, True)
        hi_edge = 0.5 + g / 2.0
        if a < hi_edge and not _eq(a, hi_edge):
            return _exact(1.0, src + ", alpha in (1/2, 1/2+gamma/2)", True)
        return _uncovered(src + ", alpha >= 1/2 + gamma/2 is not treated")

    raise AssertionError(kind)


@dataclass(frozen=True)
class AsymptoticPrediction:
    """Leading-order small-lag incremental variance ``constant * anchor_factor * h**power``."""

    constant: float
    power: float
    anchor_factor: float
    source: str = ""

    def predict(self, h: float) -> float:
        return self.constant * self.anchor_factor * h**self.power


def asymptotic_increment(spec: ProcessSpec, s: float, h: float = 1.0) -> AsymptoticPrediction:
    """Small-lag asymptotics ``C(alpha) h^(2 alpha + 1) s^(-gamma)`` as ``h -> 0``.

    For ``U6`` the same leading term applies: the ``V`` component is of
    order ``h^2``, negligible when ``alpha < 1/2``. That extension is derived
    here, not catalogued, and the ``source`` field says so.
    """
    kind, a, g = spec.kind, spec.alpha, spec.gamma
    if kind not in (ProcessKind.U2, ProcessKind.U6):
        raise RegimeError(f"small-lag asymptotics are only available for U2 and U6, not {kind.value}")
    if not -0.5 < a < 0.5:
        raise RegimeError(f"small-lag asymptotics require alpha in (-1/2, 1/2), got {a}")
    if kind is ProcessKind.U6 and a == 0.0:
        raise RegimeError("U6 asymptotics require alpha != 0")
    if not (s > 0.0 and h > 0.0) or not math.isfinite(s):
        raise RegimeError(f"asymptotics require s > 0 and h > 0, got s={s}, h={h}")
    source = "power-weighted kernel, exact small-lag asymptotics"
    if kind is ProcessKind.U6:
        source += "; extended to U6 (derived, not stated: V part is O(h^2))"
    return AsymptoticPrediction(mandelbrot_constant(a), 2 * a + 1.0, s ** (-g), source)

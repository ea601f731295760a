"""Kernel catalogue and parameter domains.

Zero-started processes ``U(t) = int_0^t K(t, u) dW_u``:

* ``U1``: ``exp(-lam*u) * (t-u)**alpha``
* ``U2``: ``u**(-gamma/2) * (t-u)**alpha``
* ``U3``: ``log(t/u) ** ((alpha-1)/2)`` (unnormalized)
* ``WIENER``: ``1``

Processes started from minus infinity, ``U(t) = int_{-inf}^t K(t, u) dW_u``,
with ``kappa(x) = exp(-lam*x) * x_+**alpha``:

* ``U4``: ``kappa(t-u) - kappa(-u)``
* ``U5``: ``kappa(t-u) - kappa(-u) + lam * int_0^t kappa(v-u) dv``
* ``U6``: ``|u|**(-gamma/2) * ((t-u)**alpha - (-u)_+**alpha)``
* ``V``: the ``u < 0`` part of ``U6``; ``U6 = V + U2`` with ``V`` and ``U2``
  independent.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .numerics import integrate_finite, lower

INNER_TOL = 1e-12


class ProcessKind(str, enum.Enum):
    U1 = "U1"
    U2 = "U2"
    U3 = "U3"
    U4 = "U4"
    U5 = "U5"
    U6 = "U6"
    V = "V"
    WIENER = "Wiener"

    @classmethod
    def parse(cls, value) -> "ProcessKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ValidationError(
            f"unknown process kind {value!r}; expected one of "
            + ", ".join(k.value for k in cls)
        )

    @property
    def zero_started(self) -> bool:
        return self in (ProcessKind.U1, ProcessKind.U2, ProcessKind.U3, ProcessKind.WIENER)


# parameters each kind actually uses
_USES = {
    ProcessKind.U1: {"alpha", "lam"},
    ProcessKind.U2: {"alpha", "gamma"},
    ProcessKind.U3: {"alpha"},
    ProcessKind.U4: {"alpha", "lam"},
    ProcessKind.U5: {"alpha", "lam"},
    ProcessKind.U6: {"alpha", "gamma"},
    ProcessKind.V: {"alpha", "gamma"},
    ProcessKind.WIENER: set(),
}


@dataclass(frozen=True)
class ProcessSpec:
    """A process kind with validated parameters; unused parameters are 0."""

    kind: ProcessKind
    alpha: float = 0.0
    gamma: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ProcessKind.parse(self.kind))
        for name in ("alpha", "gamma", "lam"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        _validate(self)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "alpha": self.alpha, "gamma": self.gamma, "lambda": self.lam}


def _validate(spec: ProcessSpec) -> None:
    kind, a, g, lam = spec.kind, spec.alpha, spec.gamma, spec.lam
    for name in ("alpha", "gamma", "lam"):
        if name not in _USES[kind] and getattr(spec, name) != 0.0:
            label = "lambda" if name == "lam" else name
            raise ValidationError(f"{kind.value} does not use {label}; it must be 0")
    if "lam" in _USES[kind] and not lam > 0.0:
        raise ValidationError(f"{kind.value} requires lambda > 0, got {lam}")
    if "gamma" in _USES[kind] and not (0.0 <= g < 1.0):
        raise ValidationError(f"{kind.value} requires gamma in [0, 1), got {g}")
    if kind is ProcessKind.U3:
        if not a > 0.0:
            raise ValidationError(f"U3 requires alpha > 0, got {a}")
    elif kind is ProcessKind.V:
        if not (-0.5 < a < 0.5 + g / 2.0):
            raise ValidationError(
                f"V requires -1/2 < alpha < 1/2 + gamma/2 = {0.5 + g / 2.0}, got {a}"
            )
        if a == 0.0:
            raise ValidationError("V requires alpha != 0")
    elif kind is not ProcessKind.WIENER:
        if not a > -0.5:
            raise ValidationError(f"{kind.value} requires alpha > -1/2, got {a}")


def make_process(kind, alpha: float = 0.0, gamma: float = 0.0, lam: float = 0.0) -> ProcessSpec:
    """Validated :class:`ProcessSpec`; raises :class:`ValidationError`."""
    return ProcessSpec(ProcessKind.parse(kind), alpha, gamma, lam)


WIENER = ProcessSpec(ProcessKind.WIENER)


@dataclass(frozen=True)
class Interval:
    t1: float
    t2: float

    def __post_init__(self):
        if not (0.0 <= self.t1 < self.t2) or not math.isfinite(self.t2):
            raise ValidationError(f"interval requires 0 <= t1 < t2, got [{self.t1}, {self.t2}]")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t1 + self.t2)


def truncated_power(x: float, alpha: float) -> float:
    """``x_+ ** alpha``: ``x**alpha`` for ``x > 0``, else 0.

    Undefined at ``x == 0`` when ``alpha < 0``.
    """
    if x > 0.0:
        return x**alpha
    if x == 0.0 and alpha < 0.0:
        raise DomainError("truncated power 0_+**alpha is undefined for alpha < 0")
    return 0.0


def kappa(spec: ProcessSpec, x: float) -> float:
    """Tempered power ``exp(-lam*x) * x_+**alpha``."""
    p = truncated_power(x, spec.alpha)
    return math.exp(-spec.lam * x) * p if p else 0.0


def kappa_array(x, alpha: float, lam: float) -> np.ndarray:
    """Vectorized tempered power; zero for ``x <= 0``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        safe = np.where(x > 0.0, x, 1.0)
        val = np.exp(-lam * safe) * safe**alpha
    return np.where(x > 0.0, val, 0.0)


def _u5_inner(spec: ProcessSpec, t: float, u: float) -> float:
    """``int_0^t kappa(v - u) dv`` via the substitution ``y = v - u``."""
    y_lo, y_hi = max(-u, 0.0), t - u
    if y_hi <= y_lo:
        return 0.0
    alpha, lam = spec.alpha, spec.lam
    sing = lower(alpha) if y_lo == 0.0 else None

    def f(y):
        return kappa_array(y, alpha, lam)

    return integrate_finite(f, y_lo, y_hi, sing, INNER_TOL, abs_tol=0.0).value


def kernel_eval(spec: ProcessSpec, t: float, u: float) -> float:
    """Kernel ``K(t, u)`` of the process at a single point."""
    kind = spec.kind
    t, u = float(t), float(u)
    if not t > 0.0:
        raise DomainError(f"kernel_eval requires t > 0, got {t}")
    if kind.zero_started:
        if not (0.0 < u < t):
            raise DomainError(f"{kind.value} kernel is supported on 0 < u < t, got u={u}, t={t}")
    elif not u < t:
        raise DomainError(f"{kind.value} kernel requires u < t, got u={u}, t={t}")
    a, g, lam = spec.alpha, spec.gamma, spec.lam

    if kind is ProcessKind.WIENER:
        return 1.0
    if kind is ProcessKind.U1:
        return math.exp(-lam * u) * (t - u) ** a
    if kind is ProcessKind.U2:
        return u ** (-g / 2.0) * (t - u) ** a
    if kind is ProcessKind.U3:
        return math.log(t / u) ** ((a - 1.0) / 2.0)
    if kind is ProcessKind.U4:
        return kappa(spec, t - u) - kappa(spec, -u)
    if kind is ProcessKind.U5:
        return kappa(spec, t - u) - kappa(spec, -u) + lam * _u5_inner(spec, t, u)
    if kind is ProcessKind.V:
        if not u < 0.0:
            raise DomainError(f"V kernel requires u < 0, got u={u}")
        return (-u) ** (-g / 2.0) * ((t - u) ** a - (-u) ** a)
    if kind is ProcessKind.U6:
        if u == 0.0 and (g > 0.0 or a < 0.0):
            raise DomainError("U6 kernel is singular at u = 0")
        weight = abs(u) ** (-g / 2.0) if u != 0.0 else 1.0
        return weight * ((t - u) ** a - truncated_power(-u, a))
    raise AssertionError(kind)

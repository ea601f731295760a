"""Gaussian path synthesis by Cholesky factorization of the covariance matrix."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .errors import AccuracyError, ConditioningError, DomainError, ValidationError
from .moments import incremental_variance, variance
from .numerics import DEFAULT_TOL
from .processes import ProcessSpec

MIN_RELATIVE_SPACING = 1e-10
JITTER_START = 1e-12
JITTER_MAX = 1e-6
RECONSTRUCTION_TOL = 1e-8


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing positive time points; ``U(0) = 0`` is implicit."""

    points: tuple

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 1:
            raise ValidationError("a time grid needs at least one point")
        arr = np.asarray(pts)
        if not np.all(np.isfinite(arr)) or arr[0] <= 0.0:
            raise ValidationError("grid points must be finite and > 0")
        gaps = np.diff(np.concatenate([[0.0], arr]))
        if np.any(gaps <= 0.0):
            raise ValidationError("grid points must be strictly increasing")
        if np.any(gaps < MIN_RELATIVE_SPACING * arr[-1]):
            raise ValidationError(
                f"grid spacing below {MIN_RELATIVE_SPACING:g} of the span; "
                "the covariance matrix would be numerically singular"
            )

    def __len__(self):
        return len(self.points)

    @classmethod
    def uniform(cls, t_end: float, n: int) -> "TimeGrid":
        return cls(tuple(t_end * (k + 1) / n for k in range(n)))


@dataclass(frozen=True)
class CholeskyFactor:
    lower: np.ndarray
    jitter: float
    reconstruction_error: float


def build_covariance_matrix(spec: ProcessSpec, grid: TimeGrid, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Covariance matrix on the grid via polarization, assembled in parallel."""
    pts = grid.points
    n = len(pts)

    def var_at(i):
        try:
            return variance(spec, pts[i], tol)
        except AccuracyError as exc:
            raise AccuracyError(f"variance at grid index {i} (t={pts[i]}): {exc}", exc.best) from exc

    diag = ordered_map(var_at, range(n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def inc_at(ij):
        i, j = ij
        try:
            return incremental_variance(spec, pts[i], pts[j], tol).total
        except AccuracyError as exc:
            raise AccuracyError(f"entry ({i}, {j}): {exc}", exc.best) from exc

    incs = ordered_map(inc_at, pairs)
    cov = np.diag(np.asarray(diag, dtype=float))
    for (i, j), inc in zip(pairs, incs):
        c = 0.5 * (diag[i] + diag[j] - inc)
        cov[i, j] = cov[j, i] = c
    return cov


def cholesky_factor(matrix: np.ndarray) -> CholeskyFactor:
    """Cholesky factor with escalating diagonal jitter.

    Jitter starts at ``1e-12 * max(diag)`` and grows tenfold up to
    ``1e-6 * max(diag)``. The reconstruction check is against the matrix
    actually factored (original plus reported jitter).
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DomainError("cholesky_factor needs a non-empty square matrix")
    if not np.allclose(m, m.T, rtol=1e-12, atol=0.0):
        raise DomainError("cholesky_factor needs a symmetric matrix")
    scale = float(np.max(np.abs(np.diag(m)))) or 1.0
    jitter = 0.0
    eye = np.eye(m.shape[0])
    while True:
        target = m + jitter * scale * eye
        try:
            lower = np.linalg.cholesky(target)
        except np.linalg.LinAlgError:
            lower = None
        if lower is not None:
            err = float(np.linalg.norm(lower @ lower.T - target) / np.linalg.norm(target))
            if err <= RECONSTRUCTION_TOL:
                return CholeskyFactor(lower, jitter * scale, err)
        jitter = JITTER_START if jitter == 0.0 else jitter * 10.0
        if jitter > JITTER_MAX * (1 + 1e-9):
            min_eig = float(np.linalg.eigvalsh(m)[0])
            raise ConditioningError(
                f"Cholesky failed with jitter up to {JITTER_MAX:g} * max diagonal; "
                f"smallest eigenvalue estimate {min_eig:.3e}",
                min_eig,
            )


def path_normals(seed: int, path_index: int, n: int) -> np.ndarray:
    """Standard normals for one path from a Philox stream keyed by ``seed``.

    The path index occupies the top word of the 256-bit counter, so each path
    owns a disjoint block of the stream regardless of evaluation order.
    """
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, path_index])
    return np.random.Generator(bitgen).standard_normal(n)


@dataclass(frozen=True)
class PathEnsemble:
    spec: ProcessSpec
    grid: TimeGrid
    n_paths: int
    seed: int
    values: np.ndarray = field(repr=False)
    factor_checksum: str
    jitter: float = 0.0

    def column(self, i: int) -> np.ndarray:
        return self.values[:, i]


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValidationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def sample_paths(
    spec: ProcessSpec,
    grid: TimeGrid,
    n_paths: int,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> PathEnsemble:
    """Draw ``n_paths`` independent paths ``L z`` on the grid."""
    if int(n_paths) < 1:
        raise ValidationError(f"n_paths must be >= 1, got {n_paths}")
    n_paths = int(n_paths)
    seed = _check_seed(seed)
    factor = cholesky_factor(build_covariance_matrix(spec, grid, tol))
    lower = factor.lower
    n = len(grid)
    values = np.empty((n_paths, n))
    chunk = max(1, math.ceil(n_paths / 64))
    starts = list(range(0, n_paths, chunk))

    def fill(start):
        for i in range(start, min(start + chunk, n_paths)):
            values[i] = lower @ path_normals(seed, i, n)

    ordered_map(fill, starts)
    values.setflags(write=False)
    checksum = hashlib.sha256(np.ascontiguousarray(lower).tobytes()).hexdigest()
    return PathEnsemble(spec, grid, n_paths, seed, values, checksum, factor.jitter)


def empirical_incremental_variance(ensemble: PathEnsemble, i: int, j: int) -> tuple[float, float]:
    """Mean squared increment between grid indices ``i < j`` and its standard error.

    ``i = -1`` denotes the implicit origin ``U(0) = 0``.
    """
    n = len(ensemble.grid)
    if not (-1 <= i < j < n):
        raise DomainError(f"need -1 <= i < j < {n}, got i={i}, j={j}")
    inc = ensemble.values[:, j] - (ensemble.values[:, i] if i >= 0 else 0.0)
    sq = inc * inc
    k = sq.size
    est = float(sq.mean())
    se = float(sq.std(ddof=1) / math.sqrt(k)) if k > 1 else 0.0
    return est, se


def empirical_variance(ensemble: PathEnsemble, i: int) -> tuple[float, float]:
    return empirical_incremental_variance(ensemble, -1, i)

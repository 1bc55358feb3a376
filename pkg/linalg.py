"""
Dense primitives, the banded three-way splitting H = T_m - E_m - F_m and the
factor/solve machinery the stationary iterations run on.

Vectors and matrices are plain float64 numpy arrays; `as_vector` and
`as_matrix` are the gatekeepers that enforce shape and finiteness.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import logging
import warnings

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.sparse import coo_matrix, dia_matrix
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigs

from errors import ConfigError, DimensionError, NonFiniteError, SingularSystemError

logger = logging.getLogger(__name__)

Vector = NDArray[np.float64]
DenseMatrix = NDArray[np.float64]

PIVOT_TOLERANCE = 1e-14
DENSE_SPECTRUM_LIMIT = 200


class MethodKind(str, Enum):
    GJ = "gj"
    GGS = "ggs"
    GSOR = "gsor"
    DIRECT = "direct"


def as_vector(x: ArrayLike) -> Vector:
    v = np.array(x, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise DimensionError(f"expected a non-empty 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteError("vector has non-finite entries")
    return v


def as_matrix(h: ArrayLike) -> DenseMatrix:
    a = np.array(h, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("matrix has non-finite entries")
    return a


def _check_length(v: Vector, n: int):
    if v.shape != (n,):
        raise DimensionError(f"vector of shape {v.shape} does not match dimension {n}")


@dataclass(frozen=True)
class BandedSplitting:
    """
    T_m in diagonal layout (row k holds offset m - k, the scipy `dia`/`ab`
    layout), E_m and F_m as coordinate lists holding the NEGATED entries of
    the source matrix, so that T_m - E_m - F_m reproduces it exactly.
    """
    n: int
    m: int
    t_band: NDArray[np.float64]
    e: coo_matrix
    f: coo_matrix

    @property
    def t(self) -> dia_matrix:
        offsets = np.arange(self.m, -self.m - 1, -1)
        return dia_matrix((self.t_band, offsets), shape=(self.n, self.n))

    def dense_t(self) -> DenseMatrix:
        return self.t.toarray()

    def dense_e(self) -> DenseMatrix:
        return self.e.toarray()

    def dense_f(self) -> DenseMatrix:
        return self.f.toarray()

    def t_matvec(self, d: Vector) -> Vector:
        return self.t @ d

    def e_matvec(self, d: Vector) -> Vector:
        return self.e @ d

    def f_matvec(self, d: Vector) -> Vector:
        return self.f @ d


@dataclass(frozen=True)
class LowerSystemFactorization:
    n: int
    lu: NDArray[np.float64]
    piv: NDArray[np.int32]


@dataclass(frozen=True)
class SpectralEstimate:
    radius: float
    converged: bool
    iterations: int


def _outside_band(h: DenseMatrix, mask: NDArray[np.bool_]) -> coo_matrix:
    n = h.shape[0]
    rows, cols = np.nonzero(mask & (h != 0.0))
    return coo_matrix((-h[rows, cols], (rows, cols)), shape=(n, n))


def split(h: ArrayLike, m: int) -> BandedSplitting:
    h = as_matrix(h)
    n = h.shape[0]
    if m < 0:
        raise DimensionError(f"bandwidth must be non-negative, got {m}")
    # anything at or past n-1 already puts the whole matrix inside the band
    m = min(int(m), n - 1)

    t_band = np.zeros((2 * m + 1, n))
    for k in range(2 * m + 1):
        offset = m - k
        diagonal = np.diagonal(h, offset)
        if offset >= 0:
            t_band[k, offset:] = diagonal
        else:
            t_band[k, :n + offset] = diagonal

    i, j = np.indices((n, n))
    e = _outside_band(h, i - j > m)
    f = _outside_band(h, j - i > m)
    return BandedSplitting(n=n, m=m, t_band=t_band, e=e, f=f)


def factor_matrix(a: ArrayLike) -> LowerSystemFactorization:
    """LU with partial pivoting, rejecting pivots below 1e-14 * ||a||_inf."""
    a = as_matrix(a)
    norm_inf = float(np.max(np.sum(np.abs(a), axis=1)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(a)
    smallest = float(np.min(np.abs(np.diag(lu))))
    if norm_inf == 0.0 or smallest < PIVOT_TOLERANCE * norm_inf:
        raise SingularSystemError(
            f"pivot {smallest:.3e} below threshold for matrix with norm {norm_inf:.3e}")
    return LowerSystemFactorization(n=a.shape[0], lu=lu, piv=piv)


def factor_lower_system(s: BandedSplitting, omega: float) -> LowerSystemFactorization:
    # M(omega) = T_m - omega * E_m; omega = 0 leaves the band part alone
    m_omega = s.dense_t() - omega * s.dense_e()
    return factor_matrix(m_omega)


def solve_factored(fact: LowerSystemFactorization, b: ArrayLike) -> Vector:
    b = np.asarray(b, dtype=np.float64)
    _check_length(b, fact.n)
    return lu_solve((fact.lu, fact.piv), b)


def apply_rhs_operator(s: BandedSplitting, omega: float, d: ArrayLike) -> Vector:
    """(omega * F_m + (1 - omega) * T_m) d without assembling the dense operator."""
    d = np.asarray(d, dtype=np.float64)
    _check_length(d, s.n)
    return omega * s.f_matvec(d) + (1.0 - omega) * s.t_matvec(d)


def iteration_operator(s: BandedSplitting, kind: MethodKind, omega: float = 1.0):
    """
    Returns (factorization of M, callable d -> N d) for the splitting H = M - N
    each generalized method uses:
      GJ:   M = T_m,             N = E_m + F_m
      GGS:  M = T_m - E_m,       N = F_m
      GSOR: M = T_m - omega E_m, N = omega F_m + (1 - omega) T_m
    """
    kind = MethodKind(kind)
    if kind is MethodKind.GJ:
        return factor_lower_system(s, 0.0), lambda d: s.e_matvec(d) + s.f_matvec(d)
    if kind is MethodKind.GGS:
        return factor_lower_system(s, 1.0), s.f_matvec
    if kind is MethodKind.GSOR:
        return factor_lower_system(s, omega), lambda d: apply_rhs_operator(s, omega, d)
    raise ConfigError(f"{kind.value} has no iteration operator")


def _dense_spectral_radius(s: BandedSplitting, fact: LowerSystemFactorization, apply_n) -> float:
    n_columns = np.column_stack([apply_n(e) for e in np.eye(s.n)])
    iteration_matrix = lu_solve((fact.lu, fact.piv), n_columns)
    return float(np.max(np.abs(np.linalg.eigvals(iteration_matrix))))


def spectral_radius_estimate(s: BandedSplitting, omega: float, method_kind: MethodKind,
                             seed: int | None = None, tol: float = 1e-8,
                             max_iter: int = 5000) -> SpectralEstimate:
    """
    rho(M^{-1} N) for the method's splitting.

    Up to DENSE_SPECTRUM_LIMIT unknowns the iteration matrix is assembled and
    its eigenvalues taken directly. Larger systems run implicitly restarted
    Arnoldi (`eigs`, largest magnitude) on the operator d -> M^{-1}(N d), so
    the complex dominant pairs of over-relaxed GSOR are resolved as well as
    real ones. `iterations` counts operator applications.
    """
    if MethodKind(method_kind) is MethodKind.DIRECT:
        return SpectralEstimate(radius=0.0, converged=True, iterations=0)

    fact, apply_n = iteration_operator(s, method_kind, omega)
    # eigs needs k < n - 1
    if s.n <= max(DENSE_SPECTRUM_LIMIT, 2):
        return SpectralEstimate(radius=_dense_spectral_radius(s, fact, apply_n), converged=True,
                                iterations=s.n)

    calls = 0

    def matvec(d):
        nonlocal calls
        calls += 1
        return solve_factored(fact, apply_n(np.ravel(d)))

    operator = LinearOperator((s.n, s.n), matvec=matvec, dtype=np.float64)
    v0 = np.random.default_rng(seed).standard_normal(s.n)
    if np.linalg.norm(operator.matvec(v0)) == 0.0:
        return SpectralEstimate(radius=0.0, converged=True, iterations=calls)

    try:
        eigenvalues = eigs(operator, k=1, which='LM', v0=v0, tol=tol, maxiter=max_iter,
                           return_eigenvectors=False)
    except ArpackNoConvergence as e:
        if len(e.eigenvalues) == 0:
            logger.warning("Arnoldi found no eigenvalue after %d restarts, assembling the "
                           "%dx%d iteration matrix", max_iter, s.n, s.n)
            return SpectralEstimate(radius=_dense_spectral_radius(s, fact, apply_n),
                                    converged=True, iterations=calls + s.n)
        radius = float(np.max(np.abs(e.eigenvalues)))
        logger.warning("Arnoldi did not settle after %d restarts (estimate %.6g)", max_iter, radius)
        return SpectralEstimate(radius=radius, converged=False, iterations=calls)

    return SpectralEstimate(radius=float(np.max(np.abs(eigenvalues))), converged=True,
                            iterations=calls)

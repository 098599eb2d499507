"""Eigenvalue solvers.

The symmetric tridiagonal path is an implicit-shift QL iteration compiled
with numba. Dense problems go through LAPACK via scipy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg as sla
from numba import njit

from .errors import ConvergenceError, DimensionMismatchError, InvalidArgumentError, NotPositiveDefiniteError
from .fd import BandedMatrix

DENSE_LIMIT = 5000
IMAG_RTOL = 1e-8

MatrixLike = Union[np.ndarray, BandedMatrix]


@dataclass(frozen=True)
class EigenResult:
    """Ascending eigenvalues plus diagnostics.

    Attributes
    ----------
    values : ndarray
        Real parts, sorted ascending.
    max_imag : float
        Largest ``|imag|`` seen before discarding imaginary parts.
    method : str
        Which solver produced the values.
    flagged : bool
        True when ``max_imag`` exceeds ``1e-8 * max(1, spectral radius)``.
    """

    values: np.ndarray
    max_imag: float = 0.0
    method: str = ""
    flagged: bool = False

    def __len__(self) -> int:
        return len(self.values)


@njit(cache=True)
def _tql(d, e, max_iter):
    """Implicit QL on the symmetric tridiagonal (d, e); e[i] couples i and i+1.

    Overwrites ``d`` with the eigenvalues. Returns the number of sweeps, or
    -1 once ``max_iter`` sweeps have been spent.
    """
    n = d.shape[0]
    eps = np.finfo(np.float64).eps
    sweeps = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_iter:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            deflated = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return sweeps


def eig_sym_tridiag(diagonal, offdiagonal) -> EigenResult:
    """All eigenvalues of a symmetric tridiagonal matrix.

    Parameters
    ----------
    diagonal : array_like, shape (n,)
    offdiagonal : array_like, shape (n-1,)

    Raises
    ------
    ConvergenceError
        If more than ``30 n`` QL sweeps are needed.
    """
    d = np.array(diagonal, dtype=float)
    off = np.asarray(offdiagonal, dtype=float)
    n = d.size
    if d.ndim != 1 or off.shape != (max(n - 1, 0),):
        raise DimensionMismatchError("offdiagonal must have length len(diagonal) - 1")
    if n == 0:
        return EigenResult(d, 0.0, "tridiagonal-ql")
    e = np.zeros(n)
    e[: n - 1] = off
    if _tql(d, e, 30 * n) < 0:
        raise ConvergenceError(f"QL iteration did not converge within {30 * n} sweeps")
    d.sort()
    return EigenResult(d, 0.0, "tridiagonal-ql")


def _dense(matrix: MatrixLike) -> np.ndarray:
    A = matrix.to_dense() if isinstance(matrix, BandedMatrix) else np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError("matrix must be square")
    return A


def eig_dense_sym(matrix: MatrixLike) -> EigenResult:
    """Eigenvalues of a dense symmetric matrix (LAPACK ``syevr``)."""
    A = _dense(matrix)
    vals = sla.eigvalsh(A, check_finite=True)
    return EigenResult(np.sort(vals), 0.0, "dense-symmetric")


def eig_dense_general(matrix: MatrixLike) -> EigenResult:
    """Eigenvalues of a real nonsymmetric matrix whose spectrum should be real.

    LAPACK balances, reduces to Hessenberg form and runs shifted QR. The
    imaginary parts are dropped but their largest magnitude is kept and
    the result is flagged when it is not negligible.
    """
    A = _dense(matrix)
    if A.shape[0] > DENSE_LIMIT:
        raise InvalidArgumentError(f"dense QR is limited to n <= {DENSE_LIMIT}")
    try:
        w = sla.eigvals(A, check_finite=True, overwrite_a=False)
    except sla.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    max_imag = float(np.abs(w.imag).max(initial=0.0))
    radius = float(np.abs(w).max(initial=0.0))
    flagged = max_imag > IMAG_RTOL * max(1.0, radius)
    return EigenResult(np.sort(w.real), max_imag, "dense-general-qr", flagged)


def eig_gen_sym(K: MatrixLike, M: MatrixLike) -> EigenResult:
    """Eigenvalues of the symmetric-definite pencil ``K x = lambda M x``.

    Reduces to the standard problem ``L^-1 K L^-T`` with ``M = L L^T``.
    """
    K, M = _dense(K), _dense(M)
    if K.shape != M.shape:
        raise DimensionMismatchError("K and M must have the same shape")
    try:
        L = sla.cholesky(M, lower=True)
    except sla.LinAlgError as exc:
        raise NotPositiveDefiniteError("mass matrix is not positive definite") from exc
    Y = sla.solve_triangular(L, K, lower=True)
    C = sla.solve_triangular(L, Y.T, lower=True)
    C = 0.5 * (C + C.T)
    return EigenResult(np.sort(sla.eigvalsh(C)), 0.0, "cholesky-reduced")


def rounding_rtol(n: int) -> float:
    """Relative asymmetry attributable to rounding in an ``n``-point assembly.

    Node differences on a grid of ``n`` points carry relative errors of
    order ``n eps``, so mirrored entries of a symmetric operator can differ
    by that much.
    """
    return max(1e-12, 16.0 * n * np.finfo(float).eps)


def eigenvalues(matrix: MatrixLike, symmetric_rtol: float | None = None) -> EigenResult:
    """Pick a solver from the structure of ``matrix``.

    Symmetric tridiagonal input takes the QL path, other symmetric input the
    dense symmetric path, everything else dense QR. Symmetry is tested
    entrywise to ``symmetric_rtol`` (default :func:`rounding_rtol`), i.e.
    up to rounding only; genuinely nonsymmetric matrices are never
    symmetrized.
    """
    if isinstance(matrix, BandedMatrix):
        rtol = rounding_rtol(matrix.n) if symmetric_rtol is None else symmetric_rtol
        sym = matrix.is_symmetric(rtol)
        if sym and matrix.bandwidth <= 1:
            off = (0.5 * (matrix.diagonal(1) + matrix.diagonal(-1))
                   if matrix.bandwidth == 1 else np.zeros(matrix.n - 1))
            return eig_sym_tridiag(matrix.diagonal(0), off)
        return eig_dense_sym(matrix) if sym else eig_dense_general(matrix)
    A = _dense(matrix)
    rtol = rounding_rtol(A.shape[0]) if symmetric_rtol is None else symmetric_rtol
    if np.all(np.abs(A - A.T) <= rtol * np.maximum(np.abs(A), np.abs(A.T))):
        return eig_dense_sym(A)
    return eig_dense_general(A)

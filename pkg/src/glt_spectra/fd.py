"""High-order central finite differences for ``-(p u')'`` with Dirichlet
conditions on uniform or mapped grids."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable, TextIO, Union

import numpy as np

from .core import Grid, OperatorSpec
from .errors import DimensionMismatchError, InvalidArgumentError, SingularGridError

MAX_ETA = 30


def fd_coefficients(eta: int) -> np.ndarray:
    """Coefficients ``d_{eta,0..eta}`` of the FD symbol polynomial.

    ``d_k = (-1)^k (eta!)^2 / ((eta-k)! (eta+k)!) * 2/k^2`` for ``k >= 1``,
    with the factorial ratio built up multiplicatively, and
    ``d_0 = -2 sum_k d_k``.

    Examples
    --------
    >>> fd_coefficients(1).tolist()
    [2.0, -1.0]
    """
    if int(eta) != eta or not 1 <= eta <= MAX_ETA:
        raise InvalidArgumentError(f"eta must be an integer in [1, {MAX_ETA}], got {eta}")
    eta = int(eta)
    d = np.zeros(eta + 1)
    ratio = 1.0
    for k in range(1, eta + 1):
        ratio *= (eta - k + 1) / (eta + k)
        d[k] = (-1) ** k * ratio * 2.0 / k**2
    d[0] = -2.0 * d[1:].sum()
    return d


def fd_symbol_f(eta: int, theta) -> np.ndarray | float:
    """Evaluate ``f_eta(theta) = d_0 + 2 sum_k d_k cos(k theta)``.

    The sum is rewritten as ``-4 sum_k d_k sin^2(k theta/2)``, which is the
    same polynomial but keeps full relative accuracy near ``theta = 0``.
    """
    d = fd_coefficients(eta)
    th = np.asarray(theta, dtype=float)
    k = np.arange(1, len(d))
    s = np.sin(np.multiply.outer(th, k) / 2.0)
    out = -4.0 * (s * s) @ d[1:]
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class FdScheme:
    """The ``(2 eta + 1)``-point central scheme."""

    eta: int
    coefficients: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", fd_coefficients(self.eta))

    def symbol(self, theta):
        return fd_symbol_f(self.eta, theta)


# ----------------------------------------------------------------------------
# Banded storage

@dataclass(frozen=True)
class BandedMatrix:
    """Square matrix with half-bandwidth ``bandwidth``.

    ``data[i, bandwidth + (j - i)]`` holds entry ``(i, j)``. Slots that
    would fall outside the matrix are kept at zero.
    """

    n: int
    bandwidth: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.shape != (self.n, 2 * self.bandwidth + 1):
            raise DimensionMismatchError(
                f"band storage must have shape {(self.n, 2 * self.bandwidth + 1)}, got {data.shape}")
        data[~self._valid_mask()] = 0.0
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def _valid_mask(self) -> np.ndarray:
        i = np.arange(self.n)[:, None]
        j = i + np.arange(-self.bandwidth, self.bandwidth + 1)[None, :]
        return (j >= 0) & (j < self.n)

    @classmethod
    def from_dense(cls, A, bandwidth: int, check: bool = True) -> "BandedMatrix":
        A = np.asarray(A, dtype=float)
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatchError("matrix must be square")
        i, j = np.indices(A.shape)
        if check and np.any(A[np.abs(i - j) > bandwidth] != 0):
            raise InvalidArgumentError("matrix has entries outside the band")
        data = np.zeros((n, 2 * bandwidth + 1))
        for o in range(-bandwidth, bandwidth + 1):
            rows = np.arange(max(0, -o), min(n, n - o))
            data[rows, bandwidth + o] = A[rows, rows + o]
        return cls(n, bandwidth, data)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        bw = self.bandwidth
        for o in range(-bw, bw + 1):
            rows = np.arange(max(0, -o), min(self.n, self.n - o))
            A[rows, rows + o] = self.data[rows, bw + o]
        return A

    def diagonal(self, offset: int = 0) -> np.ndarray:
        """Entries ``(i, i + offset)`` for all valid ``i``."""
        if abs(offset) > self.bandwidth:
            return np.zeros(max(0, self.n - abs(offset)))
        rows = np.arange(max(0, -offset), min(self.n, self.n - offset))
        return self.data[rows, self.bandwidth + offset].copy()

    def scale(self, c: float) -> "BandedMatrix":
        return BandedMatrix(self.n, self.bandwidth, c * self.data)

    def is_symmetric(self, rtol: float = 1e-12) -> bool:
        """Entrywise test ``|a_ij - a_ji| <= rtol * max(|a_ij|, |a_ji|)``."""
        for o in range(1, self.bandwidth + 1):
            up, lo = self.diagonal(o), self.diagonal(-o)
            if np.any(np.abs(up - lo) > rtol * np.maximum(np.abs(up), np.abs(lo))):
                return False
        return True

    def to_text(self) -> str:
        buf = io.StringIO()
        write_banded(buf, [self])
        return buf.getvalue()


def write_banded(target: Union[str, os.PathLike, TextIO], matrices: Iterable[BandedMatrix]) -> None:
    """Write matrices in the plain banded text format.

    Each matrix is a header line ``"n eta"`` followed by ``n`` lines of
    ``2 eta + 1`` band entries (``repr`` precision, so the round trip is
    exact).
    """
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="ascii", newline="\n") as fh:
            write_banded(fh, matrices)
        return
    for m in matrices:
        target.write(f"{m.n} {m.bandwidth}\n")
        for row in m.data:
            target.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_banded(source: Union[str, os.PathLike, TextIO]) -> list[BandedMatrix]:
    """Inverse of :func:`write_banded`."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="ascii") as fh:
            return read_banded(fh)
    lines = [ln for ln in (s.strip() for s in source) if ln]
    out, pos = [], 0
    while pos < len(lines):
        try:
            n, bw = (int(t) for t in lines[pos].split())
        except ValueError as exc:
            raise InvalidArgumentError(f"bad banded header: {lines[pos]!r}") from exc
        rows = lines[pos + 1: pos + 1 + n]
        if len(rows) != n:
            raise InvalidArgumentError("truncated banded matrix")
        data = np.array([[float(t) for t in r.split()] for r in rows]).reshape(n, 2 * bw + 1)
        out.append(BandedMatrix(n, bw, data))
        pos += n + 1
    return out


# ----------------------------------------------------------------------------
# Assembly

def _stencil_weights(X: np.ndarray, eta: int, pbar) -> np.ndarray:
    """Row stencils for the mapped nodes ``X`` (shape ``(rows, 2 eta + 1)``).

    Off-centre entries are ``-pbar((xbar_i + xbar_j)/2)`` times the weight of
    node ``j`` in the second derivative at ``xbar_i`` of the Lagrange
    interpolant through the stencil. That weight equals
    ``-2 (sum_{m in S} 1/D_m) / D_j * prod_{m in S} D_m / (xbar_m - xbar_j)``
    with ``D_m = xbar_m - xbar_i`` and ``S`` the stencil without ``i, j``.
    """
    centre = X[:, eta][:, None]
    D = X - centre
    offs = [o for o in range(2 * eta + 1) if o != eta]
    L = np.zeros_like(X)
    for jo in offs:
        S = [o for o in offs if o != jo]
        Ds = D[:, S]
        denom = X[:, S] - X[:, jo][:, None]
        if np.any(D[:, jo] == 0) or np.any(Ds == 0) or np.any(denom == 0):
            raise SingularGridError("coincident stencil nodes")
        weight = -2.0 * np.sum(1.0 / Ds, axis=1) / D[:, jo] * np.prod(Ds / denom, axis=1)
        L[:, jo] = -pbar(0.5 * (X[:, jo] + X[:, eta])) * weight
    L[:, eta] = -L.sum(axis=1)
    return L


def assemble_fd(spec: OperatorSpec, grid: Grid, eta: int | None = None) -> BandedMatrix:
    """Assemble the ``(2 eta + 1)``-point FD matrix of ``-(p u')'``.

    Parameters
    ----------
    spec : OperatorSpec
        Operator with ``q = 0`` and ``w = 1``.
    grid : Grid
        Grid with at least ``eta`` ghost nodes per side; ``grid.mapped_nodes``
        are used as the physical nodes.
    eta : int, optional
        Stencil half-width, defaults to ``grid.eta``.

    Returns
    -------
    BandedMatrix
        ``n x n`` matrix. Each diagonal entry is minus the sum of all
        off-diagonal stencil entries of its row, ghost columns included;
        ghost columns are then discarded.
    """
    eta = grid.eta if eta is None else int(eta)
    if eta < 1 or eta > grid.eta:
        raise InvalidArgumentError(f"grid has ghost depth {grid.eta}, cannot host eta={eta}")
    if spec.has_potential or spec.has_weight:
        raise InvalidArgumentError("FD assembly supports q = 0 and w = 1 only")
    xb = np.asarray(grid.mapped_nodes)
    if np.any(np.diff(xb) <= 0):
        raise SingularGridError("mapped nodes must be strictly increasing")
    n, g = grid.n, grid.eta
    idx = np.arange(n)[:, None] + g + np.arange(-eta, eta + 1)[None, :]
    L = _stencil_weights(xb[idx], eta, spec.p_bar)
    return BandedMatrix(n, eta, L)


def weight_matrix(matrix: BandedMatrix, n: int) -> BandedMatrix:
    """Scale by ``(n + 1)^-2``."""
    return matrix.scale(1.0 / (n + 1) ** 2)


def toeplitz_symbol_matrix(eta: int, n: int) -> BandedMatrix:
    """``T_n(f_eta)``: the symmetric Toeplitz matrix of the FD symbol."""
    d = fd_coefficients(eta)
    row = np.concatenate([d[:0:-1], d])
    return BandedMatrix(n, eta, np.tile(row, (n, 1)))

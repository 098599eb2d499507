"""Isogeometric Galerkin discretization of ``-(p u')' + q u = lambda w u``
with maximal-smoothness B-splines."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .bspline import BSplineBasis, basis_for_dof
from .core import GridMap, OperatorSpec, gauss_legendre_rule, identity_map, laplacian_operator
from .errors import DomainError, InvalidArgumentError, NotPositiveDefiniteError
from .fd import BandedMatrix


@dataclass(frozen=True)
class GalerkinPencil:
    """Stiffness ``K`` and mass ``M`` after Dirichlet reduction."""

    K: BandedMatrix
    M: BandedMatrix
    degree: int
    n_spans: int
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def dof(self) -> int:
        return self.K.n


def _quadrature(basis: BSplineBasis, points: int):
    g, w = gauss_legendre_rule(points)
    bp = basis.breakpoints
    lo, hi = bp[:-1, None], bp[1:, None]
    s = (0.5 * (lo + hi) + 0.5 * (hi - lo) * g[None, :])
    ws = np.broadcast_to(0.5 * (hi - lo) * w[None, :], s.shape)
    return s, ws


def assemble_iga(spec: OperatorSpec, gmap: GridMap, eta: int, n: int,
                 quad_points: int | None = None) -> GalerkinPencil:
    """Assemble the B-spline Galerkin pencil of degree ``eta`` with ``n`` unknowns.

    The geometry is ``F(s) = tau(a + (b - a) s)`` for ``s`` in ``[0, 1]``.
    Entries are

    ``K_ij = int p(F) B_i' B_j' / F' + q(F) B_i B_j F' ds``,
    ``M_ij = int w(F) B_i B_j F' ds``,

    integrated with ``eta + 1`` Gauss-Legendre points per span unless
    ``quad_points`` says otherwise. The span count is ``n + 2 - eta`` so
    that the Dirichlet pencil is exactly ``n x n``.
    """
    if int(eta) != eta or eta < 1:
        raise InvalidArgumentError("eta must be a positive integer")
    if int(n) != n or n < 1:
        raise InvalidArgumentError("n must be a positive integer")
    a, b = spec.a, spec.b
    if abs(gmap.a - a) > 1e-12 * max(1.0, abs(a)) or abs(gmap.b - b) > 1e-12 * max(1.0, abs(b)):
        raise InvalidArgumentError("operator and map live on different intervals")
    basis = basis_for_dof(int(eta), int(n))
    p = basis.degree
    s, ws = _quadrature(basis, quad_points or p + 1)
    s, ws = s.ravel(), ws.ravel()
    span, B, dB = basis.basis_and_derivatives(s)
    x = a + (b - a) * s
    F = gmap(x)
    Fp = gmap.derivative(x) * (b - a)
    if np.any(Fp <= 0):
        raise DomainError("the geometry map must be increasing")
    kw = ws * spec.p_eval(F) / Fp
    mw = ws * spec.w_eval(F) * Fp
    qw = ws * spec.q_eval(F) * Fp

    nf = basis.n_functions
    width = 2 * p + 1
    Kb = np.zeros((nf, width))
    Mb = np.zeros((nf, width))
    first = span - p
    for r in range(p + 1):
        rows = first + r
        for c in range(p + 1):
            col = c - r + p
            np.add.at(Kb, (rows, col), kw * dB[:, r] * dB[:, c] + qw * B[:, r] * B[:, c])
            np.add.at(Mb, (rows, col), mw * B[:, r] * B[:, c])
    # drop the two boundary functions
    K = BandedMatrix(nf - 2, p, Kb[1:-1])
    M = BandedMatrix(nf - 2, p, Mb[1:-1])
    _check_mass(M)
    return GalerkinPencil(K, M, p, basis.n_spans,
                          meta={"n_spans": basis.n_spans, "dof": nf - 2,
                                "quad_points": quad_points or p + 1})


def _check_mass(M: BandedMatrix) -> None:
    bw = M.bandwidth
    upper = np.zeros((bw + 1, M.n))
    for o in range(bw + 1):
        upper[bw - o, o:] = M.diagonal(o)
    try:
        sla.cholesky_banded(upper, lower=False)
    except sla.LinAlgError as exc:
        raise NotPositiveDefiniteError("mass matrix is not positive definite") from exc


@lru_cache(maxsize=None)
def iga_stencils(eta: int) -> tuple[np.ndarray, np.ndarray]:
    """Interior stiffness and mass stencils of the constant-coefficient
    problem, normalized to unit mesh size.

    Returns ``(k, m)``, each of length ``eta + 1``, holding the entries at
    offsets ``0..eta`` of an interior row of ``h K`` and ``M / h``.
    """
    n = 6 * eta + 6
    pen = assemble_iga(laplacian_operator(), identity_map(0.0, 1.0), eta, n)
    h = 1.0 / pen.n_spans
    row = pen.dof // 2
    k = np.array([pen.K.data[row, eta + o] for o in range(eta + 1)]) * h
    m = np.array([pen.M.data[row, eta + o] for o in range(eta + 1)]) / h
    k.setflags(write=False)
    m.setflags(write=False)
    return k, m


def _stencil_symbol(eta: int, th: np.ndarray) -> np.ndarray:
    k, m = iga_stencils(eta)
    j = np.arange(1, eta + 1)
    c = np.multiply.outer(th, j)
    sn = np.sin(0.5 * c)
    # the stiffness stencil annihilates constants, so k_0 = -2 sum_j k_j
    num = -4.0 * (sn * sn) @ k[1:]
    den = m[0] + 2.0 * np.cos(c) @ m[1:]
    return num / den


def iga_symbol_f(eta: int, theta, method: str = "auto"):
    """IgA symbol factor ``f_eta``.

    Closed forms are used for ``eta = 1, 2``; higher degrees use the ratio
    of the Fourier symbols of the interior stiffness and mass stencils.
    ``method="stencil"`` forces the stencil route for any degree.
    """
    if int(eta) != eta or eta < 1:
        raise InvalidArgumentError("eta must be a positive integer")
    th = np.asarray(theta, dtype=float)
    if method not in ("auto", "stencil"):
        raise InvalidArgumentError("method must be 'auto' or 'stencil'")
    if method == "auto" and eta == 1:
        sh = np.sin(0.5 * th)
        out = 12.0 * sh * sh / (2.0 + np.cos(th))
    elif method == "auto" and eta == 2:
        # 3 - 2cos t - cos 2t = 4 sin^2(t/2) + 2 sin^2 t
        num = 20.0 * (4.0 * np.sin(0.5 * th) ** 2 + 2.0 * np.sin(th) ** 2)
        out = num / (33.0 + 26.0 * np.cos(th) + np.cos(2.0 * th))
    else:
        out = _stencil_symbol(int(eta), th)
    return float(out) if np.ndim(out) == 0 else out

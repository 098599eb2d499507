"""The Dirichlet Laplacian on the unit hypercube: Kronecker-sum FD spectra,
exact spectra and the Weyl law."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InvalidArgumentError
from .metrics import SpectrumReport, WeylLaw
from .symbols import RearrangedSymbol

MAX_SIZE = 10**6


def unit_ball_volume(d: int) -> float:
    """``c_d = pi^(d/2) / Gamma(d/2 + 1)``."""
    if int(d) != d or d < 1:
        raise InvalidArgumentError("d must be a positive integer")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


@dataclass(frozen=True)
class MultiDimCase:
    d: int
    n: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise InvalidArgumentError("d must be a positive integer")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgumentError("n must be a positive integer")

    @property
    def c_d(self) -> float:
        return unit_ball_volume(self.d)

    @property
    def size(self) -> int:
        return self.n**self.d


def _outer_sum(parts) -> np.ndarray:
    return reduce(lambda acc, v: np.add.outer(acc, v).ravel(), parts)


def laplacian_1d_symbol_samples(n: int) -> np.ndarray:
    """``2 - 2 cos(k pi/(n+1))``, ``k = 1..n``."""
    k = np.arange(1, n + 1)
    s = np.sin(0.5 * k * math.pi / (n + 1))
    return 4.0 * s * s


def kron_laplacian_eigs(d: int, n: int) -> SpectrumReport:
    """Eigenvalues of the ``d``-fold Kronecker sum of the 3-point Laplacian.

    Each eigenvalue is ``(n+1)^2 sum_j (2 - 2cos(k_j pi/(n+1)))``; they are
    formed by the sum rule and returned weighted by ``(n+1)^-2``.
    """
    case = MultiDimCase(d, n)
    if case.size > MAX_SIZE:
        raise InvalidArgumentError(f"n^d = {case.size} exceeds {MAX_SIZE}")
    mu = laplacian_1d_symbol_samples(n)
    vals = np.sort(_outer_sum([mu] * d)) * (n + 1) ** 2
    return SpectrumReport(vals, float(n + 1), 2.0, label=f"kron-laplacian(d={d}, n={n})")


def kron_laplacian_matrix(d: int, n: int) -> np.ndarray:
    """Dense ``sum_j I x .. x T x .. x I`` with ``T = (n+1)^2 tridiag(-1, 2, -1)``.

    Meant for small cross-checks only.
    """
    if n**d > 4096:
        raise InvalidArgumentError("explicit assembly is limited to n^d <= 4096")
    T = (n + 1) ** 2 * (2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1))
    I = np.eye(n)
    total = np.zeros((n**d, n**d))
    for j in range(d):
        total += reduce(np.kron, [T if i == j else I for i in range(d)])
    return total


def exact_laplacian_eigs_ddim(d: int, k_max: int) -> np.ndarray:
    """All ``pi^2 sum_j k_j^2`` with ``1 <= k_j <= k_max``, sorted."""
    if int(k_max) != k_max or k_max < 1:
        raise InvalidArgumentError("k_max must be a positive integer")
    if k_max**d > 5 * MAX_SIZE:
        raise InvalidArgumentError("too many multi-indices")
    k2 = np.arange(1, k_max + 1, dtype=float) ** 2
    return np.sort(_outer_sum([k2] * d)) * math.pi**2


def smallest_laplacian_eigs(d: int, count: int) -> np.ndarray:
    """The ``count`` smallest Dirichlet eigenvalues of the unit hypercube.

    The box ``k_j <= K`` is grown until the ``count``-th value is below
    ``pi^2 ((K+1)^2 + d - 1)``, the smallest value outside the box.
    """
    K = max(1, math.ceil(count ** (1.0 / d)))
    while True:
        vals = exact_laplacian_eigs_ddim(d, K)
        if vals.size >= count and vals[count - 1] <= math.pi**2 * ((K + 1) ** 2 + d - 1):
            return vals[:count]
        K = int(math.ceil(K * 1.25)) + 1


def weyl_law_ddim(d: int) -> WeylLaw:
    """``zeta(t) = c_d (t / 4 pi^2)^(d/2)`` and ``zeta*(x) = 4 pi^2 (x/c_d)^(2/d)``."""
    c = unit_ball_volume(d)

    def zeta(t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        return np.clip(c * (t / (4 * math.pi**2)) ** (d / 2), 0.0, 1.0)

    def zeta_star(x):
        return 4 * math.pi**2 * (np.asarray(x, dtype=float) / c) ** (2.0 / d)

    return WeylLaw(zeta, zeta_star, "d-dim-laplacian")


def ddim_error_bound(d: int) -> float:
    """``|4 d c_d^(2/d) / (4 pi^2) - 1|``: the symbol-ratio error at ``x = 1``."""
    c = unit_ball_volume(d)
    return abs(4 * d * c ** (2.0 / d) / (4 * math.pi**2) - 1.0)


def ddim_rearrangement(d: int, r: int) -> RearrangedSymbol:
    """Sampled rearrangement of ``sum_j (2 - 2 cos theta_j)`` on ``[0, pi]^d``.

    Uses ``r`` interior points per axis, so ``r^d`` samples.
    """
    if r**d > 5 * MAX_SIZE:
        raise InvalidArgumentError("r^d too large")
    th = np.arange(1, r + 1) * math.pi / (r + 1)
    m = 4.0 * np.sin(0.5 * th) ** 2
    v = np.sort(_outer_sum([m] * d))
    values = np.concatenate([[0.0], v, [4.0 * d]])
    nodes = np.linspace(0.0, 1.0, v.size + 2)
    return RearrangedSymbol(nodes, values, r)

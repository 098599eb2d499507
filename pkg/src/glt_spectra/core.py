"""Problem definitions: Sturm-Liouville operators, grid maps, grids and
closed-form reference spectra."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, InvalidArgumentError

Coefficient = Callable[[np.ndarray], np.ndarray]

_CHECK_POINTS = 257


class BoundaryCondition(enum.Enum):
    """Boundary conditions. Only homogeneous Dirichlet is implemented."""

    DIRICHLET = "dirichlet"


def _as_array_fn(fn: Coefficient) -> Coefficient:
    """Wrap ``fn`` so that it always returns an array shaped like its input."""

    def wrapped(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape).copy()

    return wrapped


@dataclass(frozen=True)
class OperatorSpec:
    """The operator ``-(p u')' + q u = lambda w u`` on ``(a, b)``.

    Parameters
    ----------
    a, b : float
        Interval endpoints, ``a < b``.
    p : callable
        Diffusion coefficient, positive on ``[a, b]``. Must accept arrays.
    q : callable, optional
        Potential. ``None`` means ``q = 0``.
    w : callable, optional
        Weight. ``None`` means ``w = 1``.
    bcs : BoundaryCondition
        Only Dirichlet is supported.
    name : str
        Free-form label carried into reports.
    """

    a: float
    b: float
    p: Coefficient
    q: Optional[Coefficient] = None
    w: Optional[Coefficient] = None
    bcs: BoundaryCondition = BoundaryCondition.DIRICHLET
    name: str = ""

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or not self.a < self.b:
            raise InvalidArgumentError(f"need a < b, got a={self.a}, b={self.b}")
        if self.bcs is not BoundaryCondition.DIRICHLET:
            raise InvalidArgumentError("only Dirichlet boundary conditions are implemented")
        xs = np.linspace(self.a, self.b, _CHECK_POINTS)
        if not np.all(self.p_eval(xs) > 0):
            raise DomainError("p must be positive on [a, b]")
        if not np.all(self.w_eval(xs) > 0):
            raise DomainError("w must be positive on [a, b]")

    @property
    def has_potential(self) -> bool:
        return self.q is not None

    @property
    def has_weight(self) -> bool:
        return self.w is not None

    def p_eval(self, x) -> np.ndarray:
        return _as_array_fn(self.p)(x)

    def p_bar(self, x) -> np.ndarray:
        """``p`` continued by constants outside ``[a, b]``."""
        return self.p_eval(np.clip(np.asarray(x, dtype=float), self.a, self.b))

    def q_eval(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.zeros_like(x) if self.q is None else _as_array_fn(self.q)(x)

    def w_eval(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.ones_like(x) if self.w is None else _as_array_fn(self.w)(x)


@dataclass(frozen=True)
class GridMap:
    """A diffeomorphism ``tau`` of ``[a, b]`` onto itself.

    The extension ``tau_bar`` is the identity outside ``(a, b)``; it is
    what generates the ghost nodes of a mapped grid.
    """

    a: float
    b: float
    tau: Coefficient
    tau_prime: Coefficient
    name: str = ""

    def __post_init__(self):
        if not self.a < self.b:
            raise InvalidArgumentError("need a < b")
        scale = max(1.0, abs(self.a), abs(self.b))
        ends = self(np.array([self.a, self.b]))
        if abs(ends[0] - self.a) > 1e-12 * scale or abs(ends[1] - self.b) > 1e-12 * scale:
            raise DomainError("tau must fix both endpoints")
        d = self.derivative(np.linspace(self.a, self.b, _CHECK_POINTS))
        if not (np.all(d > 0) or np.all(d < 0)):
            raise DomainError("tau' must not vanish on [a, b]")

    def __call__(self, x) -> np.ndarray:
        return _as_array_fn(self.tau)(x)

    def derivative(self, x) -> np.ndarray:
        return _as_array_fn(self.tau_prime)(x)

    def extended(self, x) -> np.ndarray:
        """Evaluate ``tau_bar``: ``tau`` inside ``(a, b)``, identity outside."""
        x = np.asarray(x, dtype=float)
        out = x.copy()
        inside = (x > self.a) & (x < self.b)
        out[inside] = self(x[inside])
        return out

    @property
    def is_identity(self) -> bool:
        return self.name == "identity"


def identity_map(a: float, b: float) -> GridMap:
    return GridMap(a, b, lambda x: x, lambda x: np.ones_like(x), name="identity")


def liouville_map(alpha: float) -> GridMap:
    """The map ``tau = tau2 o tau1`` that equidistributes the Euler-Cauchy
    operator ``-(alpha x^2 u')'`` on ``[1, e^sqrt(alpha)]``.

    ``tau1(x) = (x - 1)/(e^s - 1)`` and ``tau2(y) = e^(s y)`` with
    ``s = sqrt(alpha)``.
    """
    if not alpha > 0:
        raise InvalidArgumentError("alpha must be positive")
    s = math.sqrt(alpha)
    b = math.exp(s)
    L = math.expm1(s)

    def tau(x):
        return np.exp(s * (x - 1.0) / L)

    def tau_prime(x):
        return (s / L) * np.exp(s * (x - 1.0) / L)

    return GridMap(1.0, b, tau, tau_prime, name=f"liouville(alpha={alpha!r})")


@dataclass(frozen=True)
class Grid:
    """Equispaced parameter nodes ``x_j``, ``j = 1-eta .. n+eta``, and their
    images under ``tau_bar``.

    ``nodes[m]`` holds ``x_{m+1-eta}``; interior unknowns sit at positions
    ``eta .. eta+n-1``.
    """

    n: int
    eta: int
    a: float
    b: float
    nodes: np.ndarray = field(repr=False)
    mapped_nodes: np.ndarray = field(repr=False)
    map_name: str = "identity"

    def node(self, j: int) -> float:
        """Parameter node with the mathematical index ``j``."""
        return float(self.nodes[j + self.eta - 1])

    def mapped_node(self, j: int) -> float:
        return float(self.mapped_nodes[j + self.eta - 1])

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n + 1)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def make_uniform_grid(a: float, b: float, n: int, eta: int = 1) -> Grid:
    """Equispaced grid with ``eta`` ghost nodes on each side.

    Examples
    --------
    >>> g = make_uniform_grid(0.0, 1.0, 3, 1)
    >>> g.nodes.tolist()
    [0.0, 0.25, 0.5, 0.75, 1.0]
    """
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n}")
    if int(eta) != eta or eta < 1:
        raise InvalidArgumentError(f"eta must be a positive integer, got {eta}")
    if not a < b:
        raise InvalidArgumentError("need a < b")
    n, eta = int(n), int(eta)
    j = np.arange(1 - eta, n + eta + 1)
    x = a + (b - a) * j / (n + 1)
    return Grid(n, eta, float(a), float(b), _frozen(x), _frozen(x))


def map_grid(grid: Grid, gmap: GridMap) -> Grid:
    """Apply ``tau_bar`` to the nodes of ``grid``."""
    if abs(gmap.a - grid.a) > 1e-12 * max(1.0, abs(grid.a)) or abs(gmap.b - grid.b) > 1e-12 * max(
        1.0, abs(grid.b)
    ):
        raise InvalidArgumentError("grid and map live on different intervals")
    mapped = gmap.extended(grid.nodes)
    return Grid(grid.n, grid.eta, grid.a, grid.b, grid.nodes, _frozen(mapped), gmap.name)


# ----------------------------------------------------------------------------
# Reference problems

@dataclass(frozen=True)
class EulerCauchyCase:
    """``-(alpha x^2 u')' = lambda u`` on ``(1, e^sqrt(alpha))`` with
    Dirichlet conditions. Its eigenvalues are ``k^2 pi^2 + alpha/4``."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidArgumentError("alpha must be positive")

    @property
    def a(self) -> float:
        return 1.0

    @property
    def b(self) -> float:
        return math.exp(math.sqrt(self.alpha))

    def operator(self) -> OperatorSpec:
        alpha = self.alpha
        return OperatorSpec(self.a, self.b, lambda x: alpha * x * x,
                            name=f"euler-cauchy(alpha={alpha!r})")

    def grid_map(self) -> GridMap:
        return liouville_map(self.alpha)

    def exact_eigenvalues(self, k_max: int) -> np.ndarray:
        return exact_spectrum_euler_cauchy(self, k_max)


def exact_spectrum_euler_cauchy(case, k_max: int) -> np.ndarray:
    """First ``k_max`` eigenvalues ``k^2 pi^2 + alpha/4``.

    ``case`` may be an :class:`EulerCauchyCase` or a bare ``alpha >= 0``;
    ``alpha = 0`` gives the Dirichlet Laplacian on the unit interval.
    """
    alpha = case.alpha if isinstance(case, EulerCauchyCase) else float(case)
    if alpha < 0:
        raise InvalidArgumentError("alpha must be nonnegative")
    if int(k_max) != k_max or k_max < 1:
        raise InvalidArgumentError("k_max must be a positive integer")
    k = np.arange(1, int(k_max) + 1, dtype=float)
    return k * k * math.pi**2 + alpha / 4.0


def laplacian_operator(a: float = 0.0, b: float = 1.0) -> OperatorSpec:
    return OperatorSpec(a, b, lambda x: np.ones_like(x), name="laplacian")


def exact_spectrum_laplacian(a: float, b: float, k_max: int) -> np.ndarray:
    k = np.arange(1, int(k_max) + 1, dtype=float)
    return (k * math.pi / (b - a)) ** 2


# ----------------------------------------------------------------------------
# Quadrature

@lru_cache(maxsize=None)
def gauss_legendre_rule(points: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[-1, 1]``."""
    x, w = np.polynomial.legendre.leggauss(points)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel(f, lo, hi, points):
    x, w = gauss_legendre_rule(points)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return half * np.dot(w, f(mid + half * x))


def adaptive_gauss_legendre(f, a: float, b: float, tol: float = 1e-12,
                            points: int = 64, max_depth: int = 30) -> float:
    """Integrate ``f`` over ``[a, b]`` with fixed-order panels.

    Each panel is compared against its bisection; the refined value is
    accepted once the two agree to ``tol`` relative to the running total.
    """
    whole = _panel(f, a, b, points)
    scale = max(abs(whole), np.finfo(float).tiny)
    stack = [(a, b, whole, 0)]
    total = 0.0
    while stack:
        lo, hi, val, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = _panel(f, lo, mid, points), _panel(f, mid, hi, points)
        if abs(left + right - val) <= tol * scale or depth >= max_depth:
            total += left + right
        else:
            stack.append((mid, hi, right, depth + 1))
            stack.append((lo, mid, left, depth + 1))
    return float(total)


def liouville_invariant_B(spec: OperatorSpec, tol: float = 1e-12, points: int = 64) -> float:
    """Length ``B = int_a^b sqrt(w/p) dx`` of the Liouville normal-form interval."""

    def integrand(x):
        p, w = spec.p_eval(x), spec.w_eval(x)
        if np.any(p <= 0) or np.any(w <= 0):
            raise DomainError("p and w must be positive at every quadrature node")
        return np.sqrt(w / p)

    return adaptive_gauss_legendre(integrand, spec.a, spec.b, tol=tol, points=points)

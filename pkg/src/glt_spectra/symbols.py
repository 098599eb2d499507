"""Spectral symbols, distribution functions and monotone rearrangements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .core import EulerCauchyCase, GridMap, OperatorSpec, gauss_legendre_rule, identity_map
from .errors import BracketError, DomainError, InvalidArgumentError
from .fd import fd_symbol_f
from .iga import iga_symbol_f

_RANGE_SAMPLES = 4097
_RANGE_SAMPLES_2D = 513


class SymbolFunction:
    """A bounded symbol ``omega(x, theta)`` on a box ``D``.

    Parameters
    ----------
    evaluator : callable
        Vectorized ``omega(x, theta)``; must broadcast its arguments.
    x_range, theta_range : (float, float)
        Sides of the domain box.
    x_factor, theta_factor : callable, optional
        When both are given the symbol is treated as the product
        ``x_factor(x) * theta_factor(theta)``, which makes sampling cheap.
    range_bounds : (float, float), optional
        Known ``(inf, sup)`` of the essential range. Otherwise the bounds
        are taken from a closed sampling grid that includes the box corners.
    """

    def __init__(self, evaluator: Callable, x_range, theta_range, name: str = "",
                 x_factor: Optional[Callable] = None, theta_factor: Optional[Callable] = None,
                 range_bounds: Optional[tuple[float, float]] = None):
        self.x_range = (float(x_range[0]), float(x_range[1]))
        self.theta_range = (float(theta_range[0]), float(theta_range[1]))
        if not (self.x_range[1] > self.x_range[0] and self.theta_range[1] > self.theta_range[0]):
            raise InvalidArgumentError("the domain box must have positive measure")
        self._evaluator = evaluator
        self.name = name
        self.x_factor = x_factor
        self.theta_factor = theta_factor
        self._cache: dict = {}
        self.range_bounds = self._bounds() if range_bounds is None else tuple(map(float, range_bounds))

    @property
    def separable(self) -> bool:
        return self.x_factor is not None and self.theta_factor is not None

    @property
    def measure(self) -> float:
        return (self.x_range[1] - self.x_range[0]) * (self.theta_range[1] - self.theta_range[0])

    @property
    def inf(self) -> float:
        return self.range_bounds[0]

    @property
    def sup(self) -> float:
        return self.range_bounds[1]

    def __call__(self, x, theta):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if self.separable:
            return np.asarray(self.x_factor(x), dtype=float) * np.asarray(self.theta_factor(theta), dtype=float)
        return np.asarray(self._evaluator(x, theta), dtype=float)

    def _bounds(self) -> tuple[float, float]:
        if self.separable:
            g = np.asarray(self.x_factor(np.linspace(*self.x_range, _RANGE_SAMPLES)), dtype=float)
            f = np.asarray(self.theta_factor(np.linspace(*self.theta_range, _RANGE_SAMPLES)), dtype=float)
            if g.min() >= 0 and f.min() >= 0:
                return float(g.min() * f.min()), float(g.max() * f.max())
        xs = np.linspace(*self.x_range, _RANGE_SAMPLES_2D)
        ts = np.linspace(*self.theta_range, _RANGE_SAMPLES_2D)
        v = self(xs[:, None], ts[None, :])
        return float(v.min()), float(v.max())

    def tensor_samples(self, xs: np.ndarray, ts: np.ndarray) -> np.ndarray:
        """Values on the tensor grid ``xs x ts``, flattened."""
        if self.separable:
            g = np.asarray(self.x_factor(xs), dtype=float)
            f = np.asarray(self.theta_factor(ts), dtype=float)
            return np.multiply.outer(g, f).ravel()
        return self(xs[:, None], ts[None, :]).ravel()

    def sorted_midpoint_samples(self, resolution: int) -> np.ndarray:
        """Sorted values at the cell midpoints of a ``resolution^2`` grid."""
        key = ("mid", int(resolution))
        if key not in self._cache:
            r = int(resolution)
            c = (np.arange(r) + 0.5) / r
            xs = self.x_range[0] + (self.x_range[1] - self.x_range[0]) * c
            ts = self.theta_range[0] + (self.theta_range[1] - self.theta_range[0]) * c
            v = np.sort(self.tensor_samples(xs, ts))
            v.setflags(write=False)
            self._cache[key] = v
        return self._cache[key]

    def __repr__(self) -> str:
        return f"SymbolFunction({self.name!r}, x={self.x_range}, theta={self.theta_range})"


def _x_factor(spec: OperatorSpec, gmap: GridMap):
    L2 = (spec.b - spec.a) ** 2

    def g(x):
        x = np.asarray(x, dtype=float)
        d = gmap.derivative(x)
        return spec.p_eval(gmap(x)) / (d * d * L2)

    return g


def symbol_fd(spec: OperatorSpec, gmap: Optional[GridMap], eta: int) -> SymbolFunction:
    """Symbol ``p(tau(x)) f_eta(theta) / (tau'(x)^2 (b - a)^2)`` of the FD scheme."""
    gmap = gmap or identity_map(spec.a, spec.b)
    g = _x_factor(spec, gmap)
    f = lambda th: fd_symbol_f(eta, th)
    return SymbolFunction(None, (spec.a, spec.b), (0.0, math.pi), name=f"fd(eta={eta}, {gmap.name})",
                          x_factor=g, theta_factor=f)


def symbol_iga(spec: OperatorSpec, gmap: Optional[GridMap], eta: int) -> SymbolFunction:
    """Same structure as :func:`symbol_fd` with the IgA factor ``f_eta``."""
    gmap = gmap or identity_map(spec.a, spec.b)
    g = _x_factor(spec, gmap)
    f = lambda th: iga_symbol_f(eta, th)
    return SymbolFunction(None, (spec.a, spec.b), (0.0, math.pi), name=f"iga(eta={eta}, {gmap.name})",
                          x_factor=g, theta_factor=f)


# ----------------------------------------------------------------------------
# Rearrangement by sampling

@dataclass(frozen=True)
class RearrangedSymbol:
    """Piecewise-linear nondecreasing interpolant of sorted symbol samples."""

    breakpoints: np.ndarray
    values: np.ndarray
    r: int

    def __call__(self, x):
        out = np.interp(x, self.breakpoints, self.values)
        return float(out) if np.ndim(out) == 0 else out


def rearrangement_by_sampling(symbol: SymbolFunction, r: int) -> RearrangedSymbol:
    """Monotone rearrangement from an ``r x r`` equispaced interior grid.

    The ``r^2`` samples at ``x_lo + (x_hi - x_lo) i/(r+1)`` and
    ``theta_lo + (theta_hi - theta_lo) j/(r+1)`` are sorted, the essential
    range bounds are prepended/appended, and the result is interpolated
    linearly over ``{0, 1/(r^2+1), ..., 1}``.
    """
    if int(r) != r or r < 1:
        raise InvalidArgumentError("r must be a positive integer")
    r = int(r)
    c = np.arange(1, r + 1) / (r + 1)
    xs = symbol.x_range[0] + (symbol.x_range[1] - symbol.x_range[0]) * c
    ts = symbol.theta_range[0] + (symbol.theta_range[1] - symbol.theta_range[0]) * c
    v = np.sort(symbol.tensor_samples(xs, ts))
    lo, hi = min(symbol.inf, v[0]), max(symbol.sup, v[-1])
    values = np.concatenate([[lo], v, [hi]])
    nodes = np.linspace(0.0, 1.0, r * r + 2)
    values.setflags(write=False)
    nodes.setflags(write=False)
    return RearrangedSymbol(nodes, values, r)


def sample_rearranged(rearr: Callable, n: int) -> np.ndarray:
    """``rearr(k/(n+1))`` for ``k = 1..n``."""
    if int(n) != n or n < 1:
        raise InvalidArgumentError("n must be a positive integer")
    x = np.arange(1, int(n) + 1) / (int(n) + 1)
    return np.asarray(rearr(x), dtype=float)


def default_resolution(n: int) -> int:
    return max(1000, int(n))


# ----------------------------------------------------------------------------
# Distribution functions

@dataclass(frozen=True)
class DistributionFunction:
    """``phi(t) = m{omega <= t} / m(D)`` together with the range it lives on.

    ``kind`` records how it was obtained (``analytic``, ``quadrature`` or
    ``grid-counted``).
    """

    evaluator: Callable
    inf: float
    sup: float
    kind: str
    fallback: bool = False

    def __call__(self, t):
        out = self.evaluator(np.asarray(t, dtype=float))
        return float(out) if np.ndim(out) == 0 else out


def phi_grid(symbol: SymbolFunction, t, resolution: int = 1000):
    """Fraction of midpoint-grid cells where ``omega <= t``."""
    if int(resolution) != resolution or resolution < 100:
        raise InvalidArgumentError("resolution must be an integer >= 100")
    v = symbol.sorted_midpoint_samples(int(resolution))
    out = np.searchsorted(v, np.asarray(t, dtype=float), side="right") / v.size
    return float(out) if np.ndim(out) == 0 else out


def grid_distribution(symbol: SymbolFunction, resolution: int = 1000) -> DistributionFunction:
    return DistributionFunction(lambda t: phi_grid(symbol, t, resolution),
                                symbol.inf, symbol.sup, "grid-counted")


def invert_phi(phi: Callable, x, bracket: Optional[tuple[float, float]] = None,
               xtol: Optional[float] = None, rtol: float = 4 * np.finfo(float).eps,
               max_iter: int = 2000):
    """Generalized inverse ``inf{t : phi(t) > x}`` by vectorized bisection.

    Parameters
    ----------
    phi : callable
        Nondecreasing, vectorized. A :class:`DistributionFunction` supplies
        its own bracket.
    x : float or array_like
        Levels in ``[0, 1]``. ``x >= phi(hi)`` maps to ``hi``.
    bracket : (float, float), optional
        ``(lo, hi)`` with ``phi(lo) <= x``.
    xtol : float, optional
        Absolute interval width; defaults to ``1e-12 (hi - lo)``.
    rtol : float
        Relative interval width. Both tolerances must be met, so tiny
        quantiles are still resolved to full relative precision.
    """
    if bracket is None:
        if not isinstance(phi, DistributionFunction):
            raise InvalidArgumentError("a bracket is required for a bare callable")
        bracket = (phi.inf, phi.sup)
    lo0, hi0 = float(bracket[0]), float(bracket[1])
    if not hi0 > lo0:
        raise BracketError("bracket must satisfy lo < hi")
    xtol = 1e-12 * (hi0 - lo0) if xtol is None else float(xtol)
    xs = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xs).ravel()
    phi_lo = np.asarray(phi(np.array([lo0])), dtype=float)[0]
    phi_hi = np.asarray(phi(np.array([hi0])), dtype=float)[0]
    if np.any(flat < phi_lo - 1e-15) or np.any(flat > max(phi_hi, 1.0) + 1e-15):
        raise BracketError("levels outside [phi(lo), phi(hi)]")
    lo = np.full(flat.shape, lo0)
    hi = np.full(flat.shape, hi0)
    out = np.empty(flat.shape)
    top = flat >= phi_hi
    out[top] = hi0
    active = np.flatnonzero(~top)
    for _ in range(max_iter):
        if active.size == 0:
            break
        l, h = lo[active], hi[active]
        mid = 0.5 * (l + h)
        above = np.asarray(phi(mid), dtype=float) > flat[active]
        h = np.where(above, mid, h)
        l = np.where(above, l, mid)
        lo[active], hi[active] = l, h
        nxt = 0.5 * (l + h)
        done = (((h - l) <= xtol) & ((h - l) <= rtol * np.maximum(np.abs(l), np.abs(h)))) \
            | (nxt == l) | (nxt == h)
        out[active[done]] = nxt[done]
        active = active[~done]
    if active.size:
        out[active] = 0.5 * (lo[active] + hi[active])
    out = out.reshape(np.shape(xs))
    return float(out) if np.ndim(out) == 0 else out


# ----------------------------------------------------------------------------
# Euler-Cauchy, three-point FD on the uniform grid

def _ec_constants(alpha: float):
    s = math.sqrt(alpha)
    b = math.exp(s)
    c = math.expm1(s) / (2.0 * s)
    sup = 4.0 * alpha * b * b / math.expm1(s) ** 2
    return b, c, sup


def _ec_phi_closed_form(alpha: float, t: np.ndarray) -> np.ndarray:
    """Two-branch closed form with the antiderivative ``Phi(t, x)`` exactly
    as it is usually quoted for this problem (kept for validation only)."""
    b, c, _ = _ec_constants(alpha)
    L = b - 1.0
    u = c * np.sqrt(t)

    def Phi(x):
        with np.errstate(invalid="ignore", divide="ignore"):
            root = np.sqrt(1.0 - L * L / (4.0 * alpha * x * x))
            return (L * np.sqrt(t) * np.log(2.0 * alpha * x * root + 1.0) / math.sqrt(alpha)
                    + 2.0 * x * np.arcsin(np.clip(u / x, -1.0, 1.0)))

    branch2 = u >= 1.0
    xt = np.where(branch2, u, 1.0)
    val = Phi(b) - Phi(xt) + np.where(branch2, math.pi * (u - 1.0), 0.0)
    return val / (math.pi * L)


def _ec_phi_quadrature(alpha: float, t: np.ndarray, points: int = 64, panels: int = 2) -> np.ndarray:
    """``phi`` from the arcsin integral, integrated with Gauss-Legendre panels.

    On ``x >= u = c sqrt(t)`` substitute ``x = u cosh(s)``: the integrand
    ``2 arcsin(u/x) dx`` becomes ``2 u sinh(s) arctan(1/sinh(s)) ds``, which
    is analytic up to the branch point ``x = u``.
    """
    b, c, _ = _ec_constants(alpha)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    u = c * np.sqrt(t)
    xt = np.clip(u, 1.0, b)
    integral = np.zeros_like(u)
    live = (u > 0) & (xt < b)
    if np.any(live):
        uu, xl = u[live], xt[live]
        s_lo = np.arccosh(np.maximum(xl / uu, 1.0))
        s_hi = np.arccosh(b / uu)
        g, w = gauss_legendre_rule(points)
        edges = np.linspace(0.0, 1.0, panels + 1)
        acc = np.zeros_like(uu)
        for k in range(panels):
            a0 = s_lo + (s_hi - s_lo) * edges[k]
            a1 = s_lo + (s_hi - s_lo) * edges[k + 1]
            half = 0.5 * (a1 - a0)
            s = 0.5 * (a0 + a1)[:, None] + half[:, None] * g[None, :]
            sh = np.sinh(s)
            acc += half * ((2.0 * sh * np.arctan2(1.0, sh)) @ w)
        integral[live] = uu * acc
    return (math.pi * (xt - 1.0) + integral) / (math.pi * (b - 1.0))


class EulerCauchyDistribution(DistributionFunction):
    """Analytic ``phi`` for ``alpha x^2 (2 - 2 cos theta)/(e^sqrt(alpha) - 1)^2``
    on ``[1, e^sqrt(alpha)] x [0, pi]``.

    At construction the quoted closed form is compared with grid counting
    (``resolution^2`` cells, ``samples`` levels). If it deviates by more
    than ``tol`` the object switches to quadrature of the arcsin integral
    and sets ``fallback``. Both deviations are kept for reporting.
    """

    def __init__(self, alpha: float, resolution: int = 2000, samples: int = 50, tol: float = 5e-3):
        if not alpha > 0:
            raise InvalidArgumentError("alpha must be positive")
        _, _, sup = _ec_constants(alpha)
        case = EulerCauchyCase(alpha)
        sym = symbol_fd(case.operator(), None, 1)
        levels = sup * (np.arange(samples) + 0.5) / samples
        grid = phi_grid(sym, levels, resolution)
        closed = _ec_phi_closed_form(alpha, levels)
        dev_closed = float(np.max(np.abs(closed - grid))) if np.all(np.isfinite(closed)) else math.inf
        quad = _ec_phi_quadrature(alpha, levels)
        dev_quad = float(np.max(np.abs(quad - grid)))
        fallback = not dev_closed <= tol
        impl = (lambda t: _ec_phi_quadrature(alpha, t)) if fallback else (lambda t: _ec_phi_closed_form(alpha, t))

        def evaluator(t):
            t = np.asarray(t, dtype=float)
            if np.any(t < -1e-12 * sup) or np.any(t > sup * (1 + 1e-12)):
                raise DomainError(f"t must lie in [0, {sup}]")
            out = np.clip(impl(np.clip(np.atleast_1d(t), 0.0, sup)), 0.0, 1.0)
            return out.reshape(t.shape)

        super().__init__(evaluator, 0.0, sup, "quadrature" if fallback else "analytic", fallback)
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "deviation_closed_form", dev_closed)
        object.__setattr__(self, "deviation_quadrature", dev_quad)
        object.__setattr__(self, "tolerance", tol)

    @property
    def deviation(self) -> float:
        """Grid-counting deviation of the formula actually in use."""
        return self.deviation_quadrature if self.fallback else self.deviation_closed_form


@lru_cache(maxsize=32)
def euler_cauchy_distribution(alpha: float) -> EulerCauchyDistribution:
    return EulerCauchyDistribution(float(alpha))


def phi_euler_cauchy_analytic(alpha: float, t):
    """``phi(t)`` for the three-point FD symbol of the Euler-Cauchy problem."""
    return euler_cauchy_distribution(float(alpha))(t)


class ExactRearrangement:
    """``omega*`` obtained by inverting a distribution function pointwise."""

    def __init__(self, phi: DistributionFunction):
        self.phi = phi

    @property
    def fallback(self) -> bool:
        return bool(getattr(self.phi, "fallback", False))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(x > 1):
            raise DomainError("omega* is defined on [0, 1]")
        return invert_phi(self.phi, x)


def euler_cauchy_rearrangement(alpha: float) -> ExactRearrangement:
    return ExactRearrangement(euler_cauchy_distribution(float(alpha)))

"""Spectral comparison functionals: counting function, inertia, local and
maximum relative errors, outliers, saturation constants and Weyl laws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatchError, InvalidArgumentError

OUTLIER_RTOL = 1e-8


@dataclass(frozen=True)
class SpectrumReport:
    """Sorted eigenvalues with inertia and weighting metadata.

    ``values`` are the raw eigenvalues. ``weighted`` multiplies them by
    ``weight_base ** -weight_exponent`` (for instance ``(n+1)^-2``).
    """

    values: np.ndarray
    weight_base: float = 1.0
    weight_exponent: float = 0.0
    outlier_flags: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size and np.any(np.diff(v) < 0):
            v = np.sort(v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.outlier_flags is not None:
            flags = np.array(self.outlier_flags, dtype=bool).ravel()
            if flags.shape != v.shape:
                raise DimensionMismatchError("one outlier flag per eigenvalue is required")
            flags.setflags(write=False)
            object.__setattr__(self, "outlier_flags", flags)

    @property
    def d(self) -> int:
        return int(self.values.size)

    @property
    def d_minus(self) -> int:
        return int(np.count_nonzero(self.values < 0))

    @property
    def d_plus(self) -> int:
        return self.d - self.d_minus

    @property
    def weight(self) -> float:
        return float(self.weight_base) ** (-float(self.weight_exponent))

    @property
    def weighted(self) -> np.ndarray:
        return self.values * self.weight

    @property
    def n_outliers(self) -> int:
        return 0 if self.outlier_flags is None else int(self.outlier_flags.sum())

    def with_flags(self, flags) -> "SpectrumReport":
        return replace(self, outlier_flags=np.asarray(flags, dtype=bool))


def spectrum_report(values, n: Optional[int] = None, exponent: float = 2.0, label: str = "") -> SpectrumReport:
    """Report weighted by ``(n+1)^-exponent`` (unweighted when ``n`` is None)."""
    if n is None:
        return SpectrumReport(values, label=label)
    return SpectrumReport(values, float(n + 1), float(exponent), label=label)


def _values(x) -> np.ndarray:
    return x.values if isinstance(x, SpectrumReport) else np.sort(np.asarray(x, dtype=float).ravel())


def counting_function(report, t):
    """Number of eigenvalues ``<= t``. Uses ``report.weighted`` for reports."""
    v = report.weighted if isinstance(report, SpectrumReport) else np.sort(np.asarray(report, dtype=float))
    out = np.searchsorted(v, np.asarray(t, dtype=float), side="right")
    return int(out) if np.ndim(out) == 0 else out


def reindex(k: int, d_minus: int) -> int:
    """Map a signed index onto ``1..d``: negatives ``-d_minus..-1`` first,
    then the nonnegative eigenvalues ``1..d_plus``."""
    if int(k) != k or k == 0:
        raise InvalidArgumentError("k must be a nonzero integer")
    if d_minus < 0:
        raise InvalidArgumentError("d_minus must be nonnegative")
    if k < 0:
        if -k > d_minus:
            raise InvalidArgumentError(f"k={k} exceeds the negative inertia {d_minus}")
        return int(k + d_minus + 1)
    return int(k + d_minus)


@dataclass(frozen=True)
class ErrorReport:
    """Local relative errors and their maximum.

    ``argmax`` is the 1-based index ``k_bar`` of the worst eigenvalue and
    ``argmax_ratio`` is ``k_bar / n``.
    """

    local_errors: np.ndarray
    max_error: float
    argmax: int
    n: int
    numerical: Optional[np.ndarray] = None
    analytic: Optional[np.ndarray] = None
    excluded: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def argmax_ratio(self) -> float:
        return self.argmax / self.n

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.max_error)


def relative_errors(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``|x/y - 1|`` with ``0`` for ``x = y = 0`` and ``inf`` for ``y = 0 != x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.empty(np.broadcast(x, y).shape)
    zero = y == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out[...] = np.abs(x / np.where(zero, 1.0, y) - 1.0)
    out[zero] = np.where(np.broadcast_to(x, out.shape)[zero] == 0, 0.0, np.inf)
    return out


def local_and_max_errors(X, Y, exclude=None) -> ErrorReport:
    """Pair ``X`` and ``Y`` by re-indexed position and compare.

    Parameters
    ----------
    X, Y : SpectrumReport or array_like
        Same number of eigenvalues. Sorting ascending and then pairing
        position by position is exactly the re-indexed pairing.
    exclude : array_like of bool, optional
        Positions left out of the maximum (outliers). Their local errors
        are still reported.
    """
    x, y = _values(X), _values(Y)
    if x.size != y.size:
        raise DimensionMismatchError(f"spectra have sizes {x.size} and {y.size}")
    if x.size == 0:
        raise DimensionMismatchError("empty spectra")
    delta = relative_errors(x, y)
    mask = np.ones(x.size, dtype=bool) if exclude is None else ~np.asarray(exclude, dtype=bool)
    if mask.shape != delta.shape:
        raise DimensionMismatchError("exclude mask has the wrong size")
    if not mask.any():
        raise InvalidArgumentError("every eigenvalue is excluded")
    masked = np.where(mask, delta, -1.0)
    k = int(np.argmax(masked))
    return ErrorReport(delta, float(delta[k]), k + 1, x.size, excluded=int((~mask).sum()))


def numerical_and_analytic_errors(eigs, reference, rearr_samples, exclude=None) -> ErrorReport:
    """Numerical error ``|lambda_k/lambda_k(ref) - 1|`` and analytic error
    ``|(d+1)^2 omega*_k / lambda_k(ref) - 1|`` for ``k = 1..d``.

    ``eigs`` are unweighted eigenvalues; ``reference`` needs at least as
    many entries, only the first ``d`` are used.
    """
    lam = _values(eigs)
    ref = _values(reference)
    w = np.asarray(rearr_samples, dtype=float)
    d = lam.size
    if ref.size < d:
        raise DimensionMismatchError("the reference spectrum is shorter than the discrete one")
    if w.size != d:
        raise DimensionMismatchError("need one rearrangement sample per eigenvalue")
    ref = ref[:d]
    if np.any(ref == 0):
        raise InvalidArgumentError("reference eigenvalues must be nonzero")
    err = np.abs(lam / ref - 1.0)
    aerr = np.abs((d + 1) ** 2 * w / ref - 1.0)
    base = local_and_max_errors(lam, ref, exclude)
    return replace(base, numerical=err, analytic=aerr)


def saturation_constant(alpha: float, k: int) -> float:
    """``(alpha/4) / (k^2 pi^2 + alpha/4)``."""
    if int(k) != k or k < 1:
        raise InvalidArgumentError("k must be a positive integer")
    q = alpha / 4.0
    return q / (k * k * math.pi**2 + q)


def detect_outliers(report, symbol=None, bounds: Optional[tuple[float, float]] = None,
                    rtol: float = OUTLIER_RTOL) -> np.ndarray:
    """Flag weighted eigenvalues outside ``[inf R - tol, sup R + tol]`` with
    ``tol = rtol * |sup R|``."""
    if bounds is None:
        if symbol is None:
            raise InvalidArgumentError("need a symbol or explicit bounds")
        bounds = symbol.range_bounds
    lo, hi = bounds
    tol = rtol * abs(hi)
    v = report.weighted if isinstance(report, SpectrumReport) else np.asarray(report, dtype=float)
    return (v < lo - tol) | (v > hi + tol)


# ----------------------------------------------------------------------------
# Weyl laws

@dataclass(frozen=True)
class WeylLaw:
    """Weighted Weyl distribution ``zeta`` and its quantile ``zeta_star``."""

    zeta: Callable
    zeta_star: Callable
    provenance: str = "custom"


def weyl_law_euler_cauchy() -> WeylLaw:
    """``zeta(t) = sqrt(t)/pi`` clipped to ``[0, 1]``, ``zeta*(x) = pi^2 x^2``."""
    return WeylLaw(lambda t: np.clip(np.sqrt(np.maximum(np.asarray(t, dtype=float), 0.0)) / math.pi, 0.0, 1.0),
                   lambda x: math.pi**2 * np.asarray(x, dtype=float) ** 2,
                   "euler-cauchy")


@dataclass(frozen=True)
class AsymptoticError:
    value: float
    argmax: float


def asymptotic_error(rearr: Callable, law: Union[WeylLaw, Callable], grid: int = 10**4,
                     points: Optional[Sequence[float]] = None) -> AsymptoticError:
    """``max |omega*(x)/zeta*(x) - 1|`` over ``x = i/grid``, ``i = 1..grid``.

    ``points`` replaces the default grid, e.g. with ``k/(n+1)``.
    """
    zs = law.zeta_star if isinstance(law, WeylLaw) else law
    x = np.arange(1, int(grid) + 1) / int(grid) if points is None else np.asarray(points, dtype=float)
    z = np.asarray(zs(x), dtype=float)
    if np.any(z == 0):
        raise InvalidArgumentError("zeta* vanishes on the evaluation grid")
    r = np.abs(np.asarray(rearr(x), dtype=float) / z - 1.0)
    i = int(np.argmax(r))
    return AsymptoticError(float(r[i]), float(x[i]))


def uniform_sampling_error(weighted_eigs, samples) -> float:
    """``max_k |lambda_k - omega*(k/(n+1))|`` for weighted eigenvalues."""
    return float(np.max(np.abs(np.sort(np.asarray(weighted_eigs, dtype=float)) - np.asarray(samples, dtype=float))))

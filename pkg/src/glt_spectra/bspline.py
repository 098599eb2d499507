"""B-spline bases on open uniform knot vectors over ``[0, 1]``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidArgumentError


@dataclass(frozen=True)
class BSplineBasis:
    """Degree ``degree`` splines of maximal smoothness on ``n_spans`` equal
    spans of ``[0, 1]``.

    The end knots are repeated ``degree + 1`` times, so there are
    ``n_spans + degree`` basis functions. Homogeneous Dirichlet conditions
    remove the first and last one, leaving ``dof = n_spans + degree - 2``.
    """

    degree: int
    n_spans: int
    knots: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 1:
            raise InvalidArgumentError("degree must be a positive integer")
        if int(self.n_spans) != self.n_spans or self.n_spans < 1:
            raise InvalidArgumentError("need at least one span")
        p, N = int(self.degree), int(self.n_spans)
        t = np.concatenate([np.zeros(p), np.linspace(0.0, 1.0, N + 1), np.ones(p)])
        t.setflags(write=False)
        object.__setattr__(self, "knots", t)

    @property
    def n_functions(self) -> int:
        return self.n_spans + self.degree

    @property
    def dof(self) -> int:
        return self.n_functions - 2

    @property
    def breakpoints(self) -> np.ndarray:
        return self.knots[self.degree: self.degree + self.n_spans + 1]

    def find_span(self, x, side: str = "right") -> np.ndarray:
        """Knot-span index ``s`` (``knots[s] <= x < knots[s+1]``) for each ``x``.

        With ``side="left"`` a point sitting on an interior knot is assigned
        to the span on its left. The right end ``x = 1`` always belongs to
        the last span.
        """
        x = np.asarray(x, dtype=float)
        p, N = self.degree, self.n_spans
        bp = self.breakpoints
        if side == "right":
            s = np.searchsorted(bp, x, side="right") - 1
        elif side == "left":
            s = np.searchsorted(bp, x, side="left") - 1
        else:
            raise InvalidArgumentError("side must be 'left' or 'right'")
        return np.clip(s, 0, N - 1) + p

    def basis_and_derivatives(self, x, side: str = "right"):
        """Nonzero basis values and first derivatives at ``x``.

        Returns
        -------
        span : ndarray of int, shape (m,)
            Span index; the nonzero functions are ``span - degree .. span``.
        values, derivs : ndarray, shape (m, degree + 1)
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise DomainError("B-splines are evaluated on [0, 1] only")
        p, t = self.degree, self.knots
        span = self.find_span(x, side)
        m = x.size
        # Cox-de Boor triangle, built for degree p - 1 first to get derivatives
        N = np.zeros((m, p + 1))
        N[:, 0] = 1.0
        left = np.zeros((m, p + 1))
        right = np.zeros((m, p + 1))
        lower = None
        for j in range(1, p + 1):
            left[:, j] = x - t[span + 1 - j]
            right[:, j] = t[span + j] - x
            saved = np.zeros(m)
            for r in range(j):
                denom = right[:, r + 1] + left[:, j - r]
                temp = N[:, r] / denom
                N[:, r] = saved + right[:, r + 1] * temp
                saved = left[:, j - r] * temp
            N[:, j] = saved
            if j == p - 1:
                lower = N[:, :p].copy()
        if p == 1:
            lower = np.ones((m, 1))
        # B'_{i,p} = p (B_{i,p-1}/(t_{i+p}-t_i) - B_{i+1,p-1}/(t_{i+p+1}-t_{i+1}))
        dN = np.zeros((m, p + 1))
        for r in range(p + 1):
            i = span - p + r
            if r >= 1:
                dN[:, r] += p * lower[:, r - 1] / (t[i + p] - t[i])
            if r <= p - 1:
                dN[:, r] -= p * lower[:, r] / (t[i + p + 1] - t[i + 1])
        return span, N, dN


def eval_bspline(basis: BSplineBasis, index: int, x, deriv: int = 0, side: str = "right"):
    """Value (``deriv=0``) or first derivative (``deriv=1``) of basis
    function ``index`` (counted before boundary removal)."""
    if int(index) != index or not 0 <= index < basis.n_functions:
        raise InvalidArgumentError(f"index must lie in [0, {basis.n_functions})")
    if deriv not in (0, 1):
        raise InvalidArgumentError("only deriv = 0 or 1 is supported")
    scalar = np.ndim(x) == 0
    span, N, dN = basis.basis_and_derivatives(x, side)
    local = index - (span - basis.degree)
    ok = (local >= 0) & (local <= basis.degree)
    src = N if deriv == 0 else dN
    out = np.where(ok, src[np.arange(src.shape[0]), np.clip(local, 0, basis.degree)], 0.0)
    return float(out[0]) if scalar else out


def basis_for_dof(degree: int, n: int) -> BSplineBasis:
    """The basis whose Dirichlet space has exactly ``n`` unknowns.

    That needs ``n + 2 - degree`` spans, which must be at least one.
    """
    spans = n + 2 - degree
    if spans < 1:
        raise InvalidArgumentError(f"n={n} is too small for degree {degree}")
    return BSplineBasis(degree, spans)

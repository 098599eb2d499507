"""Table and figure data for the Euler-Cauchy and hypercube studies.

Every runner returns an :class:`ExperimentResult` holding CSV-ready rows
plus a JSON-ready summary. Nothing here is random, so repeated runs give
byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .core import EulerCauchyCase, identity_map, laplacian_operator, make_uniform_grid, map_grid
from .eigen import IMAG_RTOL, EigenResult, eig_gen_sym, eigenvalues
from .errors import ConfigError
from .fd import assemble_fd
from .iga import assemble_iga, iga_symbol_f
from .metrics import (OUTLIER_RTOL, SpectrumReport, asymptotic_error, local_and_max_errors,
                      numerical_and_analytic_errors, saturation_constant, weyl_law_euler_cauchy)
from .symbols import (euler_cauchy_distribution, euler_cauchy_rearrangement, rearrangement_by_sampling,
                      sample_rearranged, symbol_fd, symbol_iga)

THREADS_ENV = "GLT_SPECTRA_THREADS"
PROVENANCE = {"exact": "computed-exact-ref", "fine-mesh": "computed-fine-mesh-ref"}


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def parallel_map(fn: Callable, items: Iterable) -> list:
    """Order-preserving map over a thread pool sized by the environment."""
    items = list(items)
    workers = min(thread_count(), max(1, len(items)))
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


@dataclass
class ExperimentResult:
    """Rows of one table or figure plus run metadata."""

    kind: str
    ident: int
    columns: list
    rows: list
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(row[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"kind": self.kind, "id": self.ident, "version": __version__,
               "summary": _jsonable(self.summary),
               "rows": [_jsonable({c: r[c] for c in self.columns}) for r in self.rows]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def column(self, name: str) -> list:
        return [r[name] for r in self.rows]


# ----------------------------------------------------------------------------
# Spectra of the Euler-Cauchy discretizations

def _gmap(case: EulerCauchyCase, grid: str):
    if grid == "uniform":
        return identity_map(case.a, case.b)
    if grid == "liouville":
        return case.grid_map()
    raise ConfigError(f"unknown grid kind {grid!r}")


def fd_spectrum(alpha: float, n: int, eta: int = 1, grid: str = "uniform") -> EigenResult:
    """Eigenvalues of the ``(2 eta + 1)``-point FD matrix of the Euler-Cauchy operator."""
    case = EulerCauchyCase(alpha)
    g = map_grid(make_uniform_grid(case.a, case.b, n, eta), _gmap(case, grid))
    return eigenvalues(assemble_fd(case.operator(), g, eta))


def iga_spectrum(alpha: float, n: int, eta: int, grid: str = "uniform"):
    """Generalized eigenvalues of the IgA pencil and the span count used."""
    case = EulerCauchyCase(alpha)
    pen = assemble_iga(case.operator(), _gmap(case, grid), eta, n)
    return eig_gen_sym(pen.K, pen.M), pen.n_spans


def reference_spectrum(alpha: float, count: int, reference: str = "exact", fine_n: int = 10**4) -> np.ndarray:
    """First ``count`` reference eigenvalues: closed form, or the three-point
    FD spectrum on a fine uniform mesh."""
    case = EulerCauchyCase(alpha)
    if reference == "exact":
        return case.exact_eigenvalues(count)
    if reference == "fine-mesh":
        if fine_n < count:
            raise ConfigError("the fine mesh must have at least as many eigenvalues as requested")
        return fd_spectrum(alpha, fine_n, 1, "uniform").values[:count]
    raise ConfigError(f"unknown reference kind {reference!r}")


def _ec_phi_meta(alpha: float) -> dict:
    D = euler_cauchy_distribution(alpha)
    return {"phi_kind": D.kind, "phi_fallback": D.fallback,
            "phi_deviation_closed_form": D.deviation_closed_form,
            "phi_deviation_used": D.deviation}


# ----------------------------------------------------------------------------
# Tables

def run_table1(alphas=(0.1, 1.0, 2.0, 5.0), ks=(1, 5, 10), ns=(10**2, 10**3, 10**4),
               reference: str = "exact", fine_n: int = 10**4) -> ExperimentResult:
    """``|aerr_k / c_{alpha,k} - 1|`` with the exact ``omega*``."""
    cells = [(a, k, n) for a in alphas for k in ks for n in ns]
    refs = {a: reference_spectrum(a, max(ks), reference, fine_n) for a in alphas}

    def cell(item):
        a, k, n = item
        w = euler_cauchy_rearrangement(a)(k / (n + 1))
        lam = refs[a][k - 1]
        aerr = abs((n + 1) ** 2 * w / lam - 1.0)
        c = saturation_constant(a, k)
        return {"alpha": a, "k": k, "n": n, "c_alpha_k": c, "aerr": aerr,
                "value": abs(aerr / c - 1.0), "provenance": PROVENANCE[reference],
                "phi_fallback": euler_cauchy_distribution(a).fallback}

    rows = parallel_map(cell, cells)
    summary = {"reference": reference, "fine_n": fine_n if reference == "fine-mesh" else None,
               "phi": {str(a): _ec_phi_meta(a) for a in alphas}}
    return ExperimentResult("table", 1, list(rows[0]), rows, summary)


def run_table2(alphas=(0.5, 1.0, 1.2, 3.0), ns=(10**2, 10**3, 5 * 10**3),
               reference: str = "exact", fine_n: int = 10**4, grid: int = 10**4) -> ExperimentResult:
    """Maximum spectral relative error of the three-point scheme against the
    symbol-ratio error ``max |omega*(x)/(pi^2 x^2) - 1|``.

    ``E_symbol`` samples ``x = k/(n+1)``; ``E_symbol_continuous`` uses the
    ``grid``-point equispaced grid on ``(0, 1]``.
    """
    law = weyl_law_euler_cauchy()

    def cell(item):
        a, n = item
        lam = fd_spectrum(a, n, 1, "uniform")
        ref = reference_spectrum(a, n, reference, fine_n)
        er = local_and_max_errors(lam.values, ref)
        R = euler_cauchy_rearrangement(a)
        x = np.arange(1, n + 1) / (n + 1)
        e_grid = asymptotic_error(R, law, points=x)
        e_cont = asymptotic_error(R, law, grid=grid)
        return {"alpha": a, "n": n, "E_n": er.max_error, "k_bar": er.argmax,
                "k_bar_over_n": er.argmax_ratio,
                "E_symbol": e_grid.value, "ratio_error": abs(er.max_error / e_grid.value - 1.0),
                "E_symbol_continuous": e_cont.value, "x_bar": e_cont.argmax,
                "ratio_error_continuous": abs(er.max_error / e_cont.value - 1.0),
                "solver": lam.method, "provenance": PROVENANCE[reference],
                "phi_fallback": euler_cauchy_distribution(a).fallback}

    rows = parallel_map(cell, [(a, n) for a in alphas for n in ns])
    summary = {"reference": reference, "symbol_grid": grid,
               "phi": {str(a): _ec_phi_meta(a) for a in alphas}}
    return ExperimentResult("table", 2, list(rows[0]), rows, summary)


def _paired(etas: Sequence[int], ns: Sequence[int]) -> list:
    if len(etas) != len(ns):
        raise ConfigError("eta and n lists must have the same length (one column per pair)")
    return list(zip(etas, ns))


def run_table3(etas=(1, 10, 15), ns=(10**2, 10**3, 1500), alpha: float = 1.0,
               grids=("uniform", "liouville"), reference: str = "exact",
               fine_n: int = 10**4) -> ExperimentResult:
    """``E_n`` for the FD schemes on uniform and Liouville grids."""
    cells = [(eta, n, g) for eta, n in _paired(etas, ns) for g in grids]

    def cell(item):
        eta, n, g = item
        lam = fd_spectrum(alpha, n, eta, g)
        ref = reference_spectrum(alpha, n, reference, fine_n)
        er = local_and_max_errors(lam.values, ref)
        return {"eta": eta, "n": n, "grid": g, "E_n": er.max_error, "k_bar": er.argmax,
                "k_bar_over_n": er.argmax_ratio, "solver": lam.method,
                "max_imag": lam.max_imag, "imag_flag": lam.flagged,
                "provenance": PROVENANCE[reference]}

    rows = parallel_map(cell, cells)
    summary = {"alpha": alpha, "reference": reference, "imag_rtol": IMAG_RTOL}
    return ExperimentResult("table", 3, list(rows[0]), rows, summary)


def iga_threshold_outliers(values: np.ndarray, n_spans: int, sup: float) -> np.ndarray:
    """Flag generalized eigenvalues whose ``n_spans^-2``-weighted value
    exceeds ``sup`` (plus the relative tolerance)."""
    return values / n_spans**2 > sup * (1.0 + OUTLIER_RTOL)


def iga_reference_outlier_count(eta: int, n: int) -> int:
    """Threshold outlier count of the constant-coefficient pencil
    (``p = 1`` on ``(0, 1)``, identity map) at the same degree and size."""
    pen = assemble_iga(laplacian_operator(), identity_map(0.0, 1.0), eta, n)
    vals = eig_gen_sym(pen.K, pen.M).values
    return int(iga_threshold_outliers(vals, pen.n_spans, iga_symbol_f(eta, math.pi)).sum())


def run_table4(etas=(1, 5, 10), ns=(10**2, 5 * 10**2, 10**3), alpha: float = 1.0,
               grids=("uniform", "liouville"), outlier_rule: str = "threshold",
               reference: str = "exact", fine_n: int = 10**4) -> ExperimentResult:
    """``E_n`` for IgA with the largest eigenvalues left out.

    ``outlier_rule="threshold"`` drops eigenvalues above ``sup R_omega``
    (weights use the span count); ``"count"`` drops as many of the largest
    eigenvalues as the constant-coefficient pencil has threshold outliers.
    Both counts are always reported.
    """
    if outlier_rule not in ("threshold", "count"):
        raise ConfigError("outlier_rule must be 'threshold' or 'count'")
    case = EulerCauchyCase(alpha)
    cells = [(eta, n, g) for eta, n in _paired(etas, ns) for g in grids]

    def cell(item):
        eta, n, g = item
        res, spans = iga_spectrum(alpha, n, eta, g)
        vals = res.values
        sym = symbol_iga(case.operator(), _gmap(case, g), eta)
        thr = iga_threshold_outliers(vals, spans, sym.sup)
        fixed = iga_reference_outlier_count(eta, n)
        if outlier_rule == "threshold":
            excl = thr
        else:
            excl = np.zeros(vals.size, dtype=bool)
            if fixed:
                excl[-fixed:] = True
        ref = reference_spectrum(alpha, n, reference, fine_n)
        er = local_and_max_errors(vals, ref, exclude=excl)
        er_all = local_and_max_errors(vals, ref)
        return {"eta": eta, "n": n, "grid": g, "n_spans": spans, "outlier_rule": outlier_rule,
                "outliers_threshold": int(thr.sum()), "outliers_count_rule": fixed,
                "excluded": int(excl.sum()), "E_n": er.max_error, "k_bar": er.argmax,
                "k_bar_over_n": er.argmax_ratio, "E_all": er_all.max_error,
                "symbol_sup": sym.sup, "provenance": PROVENANCE[reference]}

    rows = parallel_map(cell, cells)
    summary = {"alpha": alpha, "reference": reference, "outlier_rule": outlier_rule,
               "outlier_rtol": OUTLIER_RTOL, "weighting": "n_spans^-2"}
    return ExperimentResult("table", 4, list(rows[0]), rows, summary)


# ----------------------------------------------------------------------------
# Figures

def run_figure2(alpha: float = 1.0, n: int = 100, r: int = 1000) -> ExperimentResult:
    """Eigenvalues of the three-point scheme against ``(n+1)^2 omega*_r(k/(n+1))``."""
    lam = fd_spectrum(alpha, n, 1, "uniform").values
    case = EulerCauchyCase(alpha)
    rs = rearrangement_by_sampling(symbol_fd(case.operator(), None, 1), r)
    w = sample_rearranged(rs, n)
    rows = [{"k": k + 1, "k_over_n": (k + 1) / n, "eigenvalue": lam[k],
             "scaled_rearranged": (n + 1) ** 2 * w[k]} for k in range(n)]
    gap = float(np.max(np.abs(lam / (n + 1) ** 2 - w)))
    return ExperimentResult("figure", 2, list(rows[0]), rows,
                            {"alpha": alpha, "n": n, "r": r, "weighted_sup_distance": gap})


def run_figure3(alpha: float = 1.0, n: int = 100, rs=(100, 500, 800), reference: str = "fine-mesh",
                fine_n: int = 10**4) -> ExperimentResult:
    """Numerical error ``err_k`` against analytic errors for several ``r``."""
    case = EulerCauchyCase(alpha)
    lam = fd_spectrum(alpha, n, 1, "uniform").values
    ref = reference_spectrum(alpha, n, reference, fine_n)
    sym = symbol_fd(case.operator(), None, 1)
    rows = [{"k": k + 1, "k_over_n": (k + 1) / n} for k in range(n)]
    summary = {"alpha": alpha, "n": n, "reference": reference,
               "fine_n": fine_n if reference == "fine-mesh" else None, "max_discrepancy": {}}
    columns = ["k", "k_over_n", "err"]
    for r in rs:
        w = sample_rearranged(rearrangement_by_sampling(sym, r), n)
        er = numerical_and_analytic_errors(lam, ref, w)
        for k in range(n):
            rows[k]["err"] = er.numerical[k]
            rows[k][f"aerr_r{r}"] = er.analytic[k]
        gap = np.abs(er.numerical - er.analytic)
        summary["max_discrepancy"][str(r)] = {"value": float(gap.max()), "k": int(np.argmax(gap)) + 1}
        columns.append(f"aerr_r{r}")
    for row in rows:
        row["provenance"] = PROVENANCE[reference]
    columns.append("provenance")
    return ExperimentResult("figure", 3, columns, rows, summary)


def run_figure4(alpha: float = 1.2, n: int = 5000) -> ExperimentResult:
    """Weighted three-point eigenvalues against weighted exact ones."""
    lam = fd_spectrum(alpha, n, 1, "uniform").values
    ex = EulerCauchyCase(alpha).exact_eigenvalues(n)
    w = sample_rearranged(euler_cauchy_rearrangement(alpha), n)
    s = 1.0 / (n + 1) ** 2
    er = local_and_max_errors(lam, ex)
    rows = [{"k": k + 1, "k_over_n": (k + 1) / n, "weighted_eigenvalue": lam[k] * s,
             "weighted_exact": ex[k] * s, "rearranged": w[k]} for k in range(n)]
    return ExperimentResult("figure", 4, list(rows[0]), rows,
                            {"alpha": alpha, "n": n, "E_n": er.max_error, "k_bar": er.argmax,
                             "k_bar_over_n": er.argmax_ratio,
                             "phi_fallback": euler_cauchy_distribution(alpha).fallback})


def _family_rows(kind: str, alpha: float, n: int, etas, grids) -> tuple[list, dict]:
    case = EulerCauchyCase(alpha)
    ex = case.exact_eigenvalues(n)
    s = 1.0 / (n + 1) ** 2
    rows, counts = [], {}
    for g in grids:
        for eta in etas:
            if kind == "fd":
                vals = fd_spectrum(alpha, n, eta, g).values
                sym = symbol_fd(case.operator(), _gmap(case, g), eta)
                flags = vals * s > sym.sup * (1 + OUTLIER_RTOL)
            else:
                res, spans = iga_spectrum(alpha, n, eta, g)
                vals = res.values
                sym = symbol_iga(case.operator(), _gmap(case, g), eta)
                flags = iga_threshold_outliers(vals, spans, sym.sup)
            series = f"{g}-eta{eta}"
            counts[series] = int(flags.sum())
            for k in range(n):
                rows.append({"series": series, "k": k + 1, "k_over_n": (k + 1) / n,
                             "weighted_eigenvalue": vals[k] * s, "weighted_exact": ex[k] * s,
                             "outlier": bool(flags[k])})
    return rows, counts


def run_figure5(alpha: float = 1.0, n: int = 1000, etas=(1, 15), grids=("uniform", "liouville")) -> ExperimentResult:
    """FD eigenvalue distributions, uniform and Liouville grids."""
    rows, counts = _family_rows("fd", alpha, n, etas, grids)
    return ExperimentResult("figure", 5, list(rows[0]), rows, {"alpha": alpha, "n": n, "outliers": counts})


def run_figure6(alpha: float = 1.0, n: int = 100, etas=(1, 10), grids=("uniform", "liouville")) -> ExperimentResult:
    """IgA eigenvalue distributions; outliers are flagged, not removed."""
    rows, counts = _family_rows("iga", alpha, n, etas, grids)
    return ExperimentResult("figure", 6, list(rows[0]), rows, {"alpha": alpha, "n": n, "outliers": counts})

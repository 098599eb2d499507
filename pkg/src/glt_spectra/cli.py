"""Command-line driver.

Exit codes: 0 on success, 1 on configuration or input errors, 2 when a
selftest check misses its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from typing import Callable, Optional

import numpy as np

from . import __version__
from .config import GRIDS, OUTLIER_RULES, REARRANGEMENTS, REFERENCES, SCHEMES, ExperimentConfig, load_config, parse_assignments
from .core import EulerCauchyCase, identity_map, laplacian_operator, make_uniform_grid, map_grid
from .eigen import eig_gen_sym, eigenvalues
from .errors import ConfigError, SpectraError
from .experiments import (PROVENANCE, ExperimentResult, _fmt, _jsonable, reference_spectrum, run_figure2,
                          run_figure3, run_figure4, run_figure5, run_figure6, run_table1, run_table2,
                          run_table3, run_table4)
from .fd import assemble_fd, read_banded, write_banded
from .iga import assemble_iga
from .metrics import local_and_max_errors, numerical_and_analytic_errors
from .symbols import (euler_cauchy_distribution, euler_cauchy_rearrangement, rearrangement_by_sampling,
                      sample_rearranged, symbol_fd, symbol_iga)

EXIT_OK, EXIT_CONFIG, EXIT_SELFTEST = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _csv_list(item):
    def parse(text):
        return tuple(item(t) for t in text.split(",") if t.strip())
    return parse


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--problem", choices=("euler-cauchy", "laplacian"))
    p.add_argument("--eta", type=_csv_list(int))
    p.add_argument("--n", type=_csv_list(int))
    p.add_argument("--alpha", type=_csv_list(float))
    p.add_argument("--k", type=_csv_list(int))
    p.add_argument("--grid", type=_csv_list(str))
    p.add_argument("--r", type=int)
    p.add_argument("--reference", choices=REFERENCES)
    p.add_argument("--fine-n", dest="fine_n", type=int)
    p.add_argument("--outlier-rule", dest="outlier_rule", choices=OUTLIER_RULES)
    p.add_argument("--rearrangement", choices=REARRANGEMENTS)
    p.add_argument("--points", type=int)
    p.add_argument("--out", dest="output", help="CSV (or matrix) output path; stdout if omitted")
    p.add_argument("--summary", help="JSON summary output path")
    p.add_argument("--timing", action="store_true", help="add wall-clock runtime to the summary")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="glt-spectra", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in [("assemble", "write the FD matrix or the IgA pencil in banded text form"),
                        ("eig", "eigenvalues of a configured discretization or a banded matrix file"),
                        ("symbol", "spectral symbol range and samples"),
                        ("rearrange", "monotone rearrangement samples (x, omega*)"),
                        ("compare", "per-k errors against the reference spectrum")]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "eig":
            p.add_argument("--matrix", help="banded text file (one matrix, or K then M)")
    p = sub.add_parser("table", help="reproduce a table")
    p.add_argument("table_id", type=int, choices=(1, 2, 3, 4))
    _common(p)
    p = sub.add_parser("figure", help="data behind a figure")
    p.add_argument("figure_id", type=int)
    _common(p)
    p = sub.add_parser("selftest", help="quick numerical checks with pinned tolerances")
    p.add_argument("--verbose", action="store_true")
    return parser


def _config(args, needs_rearrangement: bool = False) -> ExperimentConfig:
    keys = ("scheme", "problem", "eta", "n", "alpha", "k", "grid", "r", "reference", "fine_n",
            "outlier_rule", "rearrangement", "points", "output", "summary")
    overrides = {k: getattr(args, k, None) for k in keys}
    if overrides.get("grid"):
        bad = [g for g in overrides["grid"] if g not in GRIDS]
        if bad:
            raise ConfigError(f"unknown grid kind(s): {', '.join(bad)}")
    overrides.update(parse_assignments(getattr(args, "set", []) or [], "--set"))
    return load_config(getattr(args, "config", None), overrides).validate(needs_rearrangement)


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_result(result: ExperimentResult, cfg: ExperimentConfig, started: float, timing: bool) -> None:
    if timing:
        result.summary["runtime_seconds"] = round(time.perf_counter() - started, 3)
    _emit(result.to_csv(), cfg.output)
    if cfg.summary:
        _emit(result.to_json(), cfg.summary)


def _rows_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _operator_and_map(cfg: ExperimentConfig):
    grid = cfg.first("grid", "uniform")
    if cfg.problem == "laplacian":
        if grid != "uniform":
            raise ConfigError("the Laplacian problem only uses the uniform grid")
        return laplacian_operator(), identity_map(0.0, 1.0), None
    case = EulerCauchyCase(cfg.first("alpha", 1.0))
    gmap = identity_map(case.a, case.b) if grid == "uniform" else case.grid_map()
    return case.operator(), gmap, case


def _discretize(cfg: ExperimentConfig):
    spec, gmap, case = _operator_and_map(cfg)
    n, eta = cfg.first("n", 100), cfg.first("eta", 1)
    if cfg.scheme == "fd":
        g = map_grid(make_uniform_grid(spec.a, spec.b, n, eta), gmap)
        return "fd", assemble_fd(spec, g, eta), spec, gmap, case
    return "iga", assemble_iga(spec, gmap, eta, n), spec, gmap, case


def _spectrum(cfg: ExperimentConfig):
    kind, obj, spec, gmap, case = _discretize(cfg)
    if kind == "fd":
        res = eigenvalues(obj)
        weight_base = cfg.first("n", 100) + 1
    else:
        res = eig_gen_sym(obj.K, obj.M)
        weight_base = obj.n_spans
    return res, weight_base, spec, gmap, case


def _symbol(cfg: ExperimentConfig, spec, gmap):
    eta = cfg.first("eta", 1)
    return symbol_fd(spec, gmap, eta) if cfg.scheme == "fd" else symbol_iga(spec, gmap, eta)


# ----------------------------------------------------------------------------
# commands

def cmd_assemble(args) -> int:
    cfg = _config(args)
    kind, obj, *_ = _discretize(cfg)
    buf = io.StringIO()
    write_banded(buf, [obj] if kind == "fd" else [obj.K, obj.M])
    _emit(buf.getvalue(), cfg.output)
    return EXIT_OK


def cmd_eig(args) -> int:
    cfg = _config(args)
    if args.matrix:
        mats = read_banded(args.matrix)
        if len(mats) == 1:
            res = eigenvalues(mats[0])
        elif len(mats) == 2:
            res = eig_gen_sym(mats[0], mats[1])
        else:
            raise ConfigError("a matrix file holds one matrix or a K, M pair")
        weight = 1.0
        flags = np.zeros(len(res.values), dtype=bool)
    else:
        res, base, spec, gmap, _ = _spectrum(cfg)
        weight = base ** -2.0
        sup = _symbol(cfg, spec, gmap).sup
        flags = res.values * weight > sup * (1 + 1e-8)
    rows = [{"k": i + 1, "eigenvalue": v, "weighted": v * weight, "outlier": bool(f)}
            for i, (v, f) in enumerate(zip(res.values, flags))]
    _emit(_rows_csv(["k", "eigenvalue", "weighted", "outlier"], rows), cfg.output)
    if cfg.summary:
        _emit(json.dumps(_jsonable({"method": res.method, "max_imag": res.max_imag,
                                    "imag_flag": res.flagged, "outliers": int(flags.sum())}),
                         indent=2, sort_keys=True) + "\n", cfg.summary)
    return EXIT_OK


def cmd_symbol(args) -> int:
    cfg = _config(args)
    spec, gmap, _ = _operator_and_map(cfg)
    sym = _symbol(cfg, spec, gmap)
    m = cfg.points
    xs = np.linspace(*sym.x_range, m)
    ts = np.linspace(*sym.theta_range, m)
    vals = sym(xs[:, None], ts[None, :])
    rows = [{"x": xs[i], "theta": ts[j], "omega": vals[i, j]} for i in range(m) for j in range(m)]
    _emit(_rows_csv(["x", "theta", "omega"], rows), cfg.output)
    if cfg.summary:
        _emit(json.dumps(_jsonable({"name": sym.name, "x_range": sym.x_range, "theta_range": sym.theta_range,
                                    "measure": sym.measure, "inf": sym.inf, "sup": sym.sup}),
                         indent=2, sort_keys=True) + "\n", cfg.summary)
    return EXIT_OK


def _rearrangement(cfg: ExperimentConfig, spec, gmap, case):
    if cfg.rearrangement == "analytic":
        if not (cfg.scheme == "fd" and cfg.first("eta", 1) == 1 and case is not None
                and cfg.first("grid", "uniform") == "uniform"):
            raise ConfigError("the analytic rearrangement covers the three-point FD scheme "
                              "for the Euler-Cauchy problem on the uniform grid only")
        return euler_cauchy_rearrangement(case.alpha), {"rearrangement": "analytic",
                                                        "phi_fallback": euler_cauchy_distribution(case.alpha).fallback}
    r = cfg.r if cfg.r is not None else max(1000, max(cfg.n or (100,)))
    return rearrangement_by_sampling(_symbol(cfg, spec, gmap), r), {"rearrangement": "sampling", "r": r}


def cmd_rearrange(args) -> int:
    cfg = _config(args, needs_rearrangement=True)
    spec, gmap, case = _operator_and_map(cfg)
    rr, meta = _rearrangement(cfg, spec, gmap, case)
    x = np.linspace(0.0, 1.0, cfg.points)
    w = np.asarray(rr(x))
    rows = [{"x": a, "omega_star": b} for a, b in zip(x, w)]
    _emit(_rows_csv(["x", "omega_star"], rows), cfg.output)
    if cfg.summary:
        _emit(json.dumps(_jsonable(meta), indent=2, sort_keys=True) + "\n", cfg.summary)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _config(args, needs_rearrangement=True)
    started = time.perf_counter()
    res, base, spec, gmap, case = _spectrum(cfg)
    n = len(res.values)
    reference = cfg.reference or "exact"
    if case is None:
        k = np.arange(1, n + 1)
        ref = (k * math.pi) ** 2
        if reference != "exact":
            raise ConfigError("the Laplacian problem supports the exact reference only")
    else:
        ref = reference_spectrum(case.alpha, n, reference, cfg.fine_n)
    rr, meta = _rearrangement(cfg, spec, gmap, case)
    w = sample_rearranged(rr, n)
    er = numerical_and_analytic_errors(res.values, ref, w)
    rows = [{"k": i + 1, "k_over_n": (i + 1) / n, "eigenvalue": res.values[i], "delta": er.local_errors[i],
             "err": er.numerical[i], "aerr": er.analytic[i], "provenance": PROVENANCE[reference]}
            for i in range(n)]
    _emit(_rows_csv(list(rows[0]), rows), cfg.output)
    if cfg.summary:
        summary = {"n": n, "eta": cfg.first("eta", 1), "scheme": cfg.scheme,
                   "grid": cfg.first("grid", "uniform"), "E_n": er.max_error, "k_bar": er.argmax,
                   "k_bar_over_n": er.argmax_ratio, "solver": res.method, "max_imag": res.max_imag,
                   "provenance": PROVENANCE[reference], **meta}
        if args.timing:
            summary["runtime_seconds"] = round(time.perf_counter() - started, 3)
        _emit(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n", cfg.summary)
    return EXIT_OK


def _kw(cfg: ExperimentConfig, **mapping) -> dict:
    """Keyword arguments for a runner from the config keys that are set."""
    out = {}
    for key, (attr, conv) in mapping.items():
        v = getattr(cfg, attr)
        if v is not None:
            out[key] = conv(v)
    return out


def cmd_table(args) -> int:
    cfg = _config(args)
    started = time.perf_counter()
    ref = {"reference": ("reference", str), "fine_n": ("fine_n", int)}
    tid = args.table_id
    if tid == 1:
        result = run_table1(**_kw(cfg, alphas=("alpha", tuple), ks=("k", tuple), ns=("n", tuple), **ref))
    elif tid == 2:
        result = run_table2(**_kw(cfg, alphas=("alpha", tuple), ns=("n", tuple), grid=("symbol_grid", int), **ref))
    elif tid == 3:
        result = run_table3(**_kw(cfg, etas=("eta", tuple), ns=("n", tuple), alpha=("alpha", lambda v: v[0]),
                                  grids=("grid", tuple), **ref))
    else:
        result = run_table4(**_kw(cfg, etas=("eta", tuple), ns=("n", tuple), alpha=("alpha", lambda v: v[0]),
                                  grids=("grid", tuple), outlier_rule=("outlier_rule", str), **ref))
    _write_result(result, cfg, started, args.timing)
    return EXIT_OK


FIGURES: dict = {2: run_figure2, 3: run_figure3, 4: run_figure4, 5: run_figure5, 6: run_figure6}


def cmd_figure(args) -> int:
    if args.figure_id not in FIGURES:
        raise ConfigError(f"unknown figure id {args.figure_id}; choose from {sorted(FIGURES)}")
    fid = args.figure_id
    cfg = _config(args, needs_rearrangement=fid in (2, 3))
    started = time.perf_counter()
    alpha, n = ("alpha", lambda v: v[0]), ("n", lambda v: v[0])
    if fid == 2:
        kw = _kw(cfg, alpha=alpha, n=n, r=("r", int))
        if "r" not in kw and "n" in kw:
            kw["r"] = max(1000, kw["n"])
    elif fid == 3:
        kw = _kw(cfg, alpha=alpha, n=n, rs=("r", lambda v: (v,)), reference=("reference", str),
                 fine_n=("fine_n", int))
    elif fid == 4:
        kw = _kw(cfg, alpha=alpha, n=n)
    else:
        kw = _kw(cfg, alpha=alpha, n=n, etas=("eta", tuple), grids=("grid", tuple))
    _write_result(FIGURES[fid](**kw), cfg, started, args.timing)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest
    ok = run_selftest(verbose=args.verbose, stream=sys.stdout)
    return EXIT_OK if ok else EXIT_SELFTEST


COMMANDS: dict[str, Callable] = {"assemble": cmd_assemble, "eig": cmd_eig, "symbol": cmd_symbol,
                                 "rearrange": cmd_rearrange, "compare": cmd_compare, "table": cmd_table,
                                 "figure": cmd_figure, "selftest": cmd_selftest}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, SpectraError, OSError) as exc:
        print(f"glt-spectra: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

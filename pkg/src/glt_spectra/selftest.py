"""Fast end-to-end checks with pinned tolerances, used by ``glt-spectra selftest``."""

from __future__ import annotations

import math
import sys
from typing import Callable, TextIO

import numpy as np

from .core import identity_map, laplacian_operator, make_uniform_grid
from .eigen import eig_gen_sym, eig_sym_tridiag
from .experiments import run_table1, run_table3, run_table4
from .fd import assemble_fd, fd_coefficients, weight_matrix
from .iga import assemble_iga, iga_symbol_f
from .multidim import kron_laplacian_eigs, kron_laplacian_matrix
from .symbols import euler_cauchy_distribution


def _rel(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) / np.asarray(b) - 1.0)))


def _fd_coefficients():
    err = float(np.max(np.abs(fd_coefficients(2) - [2.5, -4 / 3, 1 / 12])))
    return err, err < 1e-14


def _fd_sampling():
    n = 1000
    A = weight_matrix(assemble_fd(laplacian_operator(), make_uniform_grid(0.0, 1.0, n, 1)), n)
    vals = eig_sym_tridiag(A.diagonal(0), A.diagonal(1)).values
    k = np.arange(1, n + 1)
    err = _rel(vals, 4 * np.sin(k * math.pi / (2 * (n + 1))) ** 2)
    return err, err < 1e-10


def _fe_anchor():
    n = 200
    pen = assemble_iga(laplacian_operator(), identity_map(0.0, 1.0), 1, n)
    vals = eig_gen_sym(pen.K, pen.M).values / (n + 1) ** 2
    err = _rel(vals, iga_symbol_f(1, np.arange(1, n + 1) * math.pi / (n + 1)))
    return err, err < 1e-9


def _table3_cell():
    res = run_table3(etas=(1,), ns=(100,))
    got = res.column("E_n")
    err = max(abs(got[0] / 0.3155 - 1), abs(got[1] / 0.5867 - 1))
    return err, err < 0.01


def _table4_cell():
    res = run_table4(etas=(1,), ns=(100,))
    got = res.column("E_n")
    err = max(abs(got[0] / 1.7653 - 1), abs(got[1] / 0.4433 - 1))
    return err, err < 0.05


def _table1_cell():
    v = run_table1(alphas=(1.0,), ks=(1,), ns=(100,)).rows[0]["value"]
    err = abs(v / 0.0041 - 1)
    return err, err < 0.1


def _phi_validation():
    D = euler_cauchy_distribution(1.0)
    return D.deviation, D.deviation < 5e-3


def _kronecker():
    fast = kron_laplacian_eigs(2, 8).values
    brute = np.linalg.eigvalsh(kron_laplacian_matrix(2, 8))
    err = float(np.max(np.abs(fast - brute)) / np.max(np.abs(brute)))
    return err, err < 1e-10


CHECKS: list[tuple[str, Callable]] = [
    ("fd coefficients eta=2", _fd_coefficients),
    ("three-point Laplacian samples f_1 exactly (n=1000)", _fd_sampling),
    ("linear FE pencil samples its symbol exactly (n=200)", _fe_anchor),
    ("Euler-Cauchy FD eta=1, n=100 max relative error", _table3_cell),
    ("Euler-Cauchy IgA eta=1, n=100 max relative error", _table4_cell),
    ("analytic error saturation alpha=1, k=1, n=100", _table1_cell),
    ("analytic phi agrees with grid counting (alpha=1)", _phi_validation),
    ("Kronecker sum rule vs assembled matrix (d=2, n=8)", _kronecker),
]


def run_selftest(verbose: bool = False, stream: TextIO = sys.stdout) -> bool:
    ok = True
    for name, fn in CHECKS:
        value, passed = fn()
        ok &= bool(passed)
        stream.write(f"{'PASS' if passed else 'FAIL'}  {name}  [{value:.3e}]\n")
    stream.write("selftest passed\n" if ok else "selftest FAILED\n")
    return ok

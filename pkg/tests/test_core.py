import math

import numpy as np
import pytest

from glt_spectra.core import (EulerCauchyCase, GridMap, OperatorSpec, adaptive_gauss_legendre,
                              exact_spectrum_euler_cauchy, identity_map, liouville_invariant_B,
                              liouville_map, make_uniform_grid, map_grid)
from glt_spectra.errors import DomainError, InvalidArgumentError


class TestUniformGrid:
    def test_unit_interval_three_nodes(self):
        g = make_uniform_grid(0.0, 1.0, 3, 1)
        assert g.nodes.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_ghost_nodes_outside_interval(self):
        g = make_uniform_grid(1.0, math.e, 2, 2)
        assert g.nodes.size == 6
        assert np.allclose(np.diff(g.nodes), (math.e - 1) / 3)
        assert g.node(-1) < 1.0 and g.node(4) > math.e

    def test_index_formula(self):
        g = make_uniform_grid(0.0, 1.0, 100, 1)
        assert g.node(50) == pytest.approx(50 / 101, abs=1e-15)

    @pytest.mark.parametrize("args", [(0.0, 1.0, 0, 1), (1.0, 1.0, 5, 1), (2.0, 1.0, 5, 1), (0.0, 1.0, 5, 0)])
    def test_rejects_bad_arguments(self, args):
        with pytest.raises(InvalidArgumentError):
            make_uniform_grid(*args)

    def test_arrays_are_read_only(self):
        g = make_uniform_grid(0.0, 1.0, 4, 1)
        with pytest.raises(ValueError):
            g.nodes[0] = 1.0


class TestLiouvilleMap:
    def test_fixes_endpoints(self):
        m = liouville_map(1.0)
        assert m(1.0) == pytest.approx(1.0, abs=1e-12)
        assert m(math.e) == pytest.approx(math.e, abs=1e-12)

    def test_midpoint_value(self):
        m = liouville_map(1.0)
        assert m(1 + (math.e - 1) / 2) == pytest.approx(math.exp(0.5), rel=1e-14)

    def test_derivative_at_left_end(self):
        m = liouville_map(4.0)
        assert m.derivative(1.0) == pytest.approx(2 / (math.e**2 - 1), rel=1e-14)

    def test_derivative_matches_finite_difference(self):
        m = liouville_map(2.5)
        x = np.linspace(1.1, m.b - 0.1, 7)
        h = 1e-6
        fd = (m(x + h) - m(x - h)) / (2 * h)
        assert np.allclose(m.derivative(x), fd, rtol=1e-8)

    def test_extension_is_identity_outside(self):
        m = liouville_map(1.0)
        x = np.array([0.5, 0.9, 3.0, 4.0])
        assert np.array_equal(m.extended(x), x)

    @pytest.mark.parametrize("alpha", [0.1, 1.0, 3.0, 5.0])
    @pytest.mark.parametrize("n", [10, 1000, 10**4])
    def test_mapped_nodes_strictly_increasing(self, alpha, n):
        case = EulerCauchyCase(alpha)
        g = map_grid(make_uniform_grid(case.a, case.b, n, 3), case.grid_map())
        assert np.all(np.diff(g.mapped_nodes) > 0)

    def test_rejects_nonpositive_alpha(self):
        with pytest.raises(InvalidArgumentError):
            liouville_map(0.0)

    def test_gridmap_must_fix_endpoints(self):
        with pytest.raises(DomainError):
            GridMap(0.0, 1.0, lambda x: np.asarray(x) + 0.1, lambda x: np.ones_like(x))


class TestOperatorSpec:
    def test_rejects_nonpositive_p(self):
        with pytest.raises(DomainError):
            OperatorSpec(0.0, 1.0, lambda x: x - 0.5)

    def test_rejects_reversed_interval(self):
        with pytest.raises(InvalidArgumentError):
            OperatorSpec(1.0, 0.0, lambda x: np.ones_like(x))

    def test_p_bar_is_clamped(self):
        spec = OperatorSpec(1.0, 2.0, lambda x: np.asarray(x) ** 2)
        assert spec.p_bar(np.array([0.0, 1.5, 3.0])).tolist() == [1.0, 2.25, 4.0]


class TestExactSpectrum:
    def test_first_eigenvalue(self):
        assert exact_spectrum_euler_cauchy(1.0, 1)[0] == pytest.approx(math.pi**2 + 0.25, rel=1e-15)

    def test_laplacian_limit(self):
        assert exact_spectrum_euler_cauchy(0.0, 3)[2] == pytest.approx(9 * math.pi**2, rel=1e-15)

    def test_strictly_increasing_and_ratio_decreasing_to_one(self):
        v = exact_spectrum_euler_cauchy(EulerCauchyCase(2.0), 50)
        assert np.all(np.diff(v) > 0)
        ratio = v / (np.arange(1, 51) ** 2 * math.pi**2)
        assert np.all(ratio > 1) and np.all(np.diff(ratio) < 0)

    def test_interval(self):
        case = EulerCauchyCase(4.0)
        assert (case.a, case.b) == (1.0, pytest.approx(math.e**2))


class TestQuadrature:
    def test_polynomial(self):
        assert adaptive_gauss_legendre(lambda x: x**5, 0.0, 2.0) == pytest.approx(64 / 6, rel=1e-14)

    def test_invariant_constant(self):
        spec = OperatorSpec(0.0, 1.0, lambda x: np.ones_like(x))
        assert liouville_invariant_B(spec) == pytest.approx(1.0, abs=1e-14)

    def test_invariant_inverse_square(self):
        spec = OperatorSpec(1.0, math.e, lambda x: np.asarray(x) ** 2)
        assert liouville_invariant_B(spec) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.01, 0.5, 1.0, 4.0, 9.0])
    def test_invariant_is_one_for_euler_cauchy(self, alpha):
        assert liouville_invariant_B(EulerCauchyCase(alpha).operator()) == pytest.approx(1.0, abs=1e-9)

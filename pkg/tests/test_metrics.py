import math

import numpy as np
import pytest

from glt_spectra.core import EulerCauchyCase, laplacian_operator, make_uniform_grid
from glt_spectra.errors import DimensionMismatchError, InvalidArgumentError
from glt_spectra.experiments import fd_spectrum, iga_spectrum
from glt_spectra.fd import assemble_fd
from glt_spectra.eigen import eigenvalues
from glt_spectra.metrics import (SpectrumReport, asymptotic_error, counting_function, detect_outliers,
                                 local_and_max_errors, numerical_and_analytic_errors, reindex,
                                 relative_errors, saturation_constant, spectrum_report,
                                 uniform_sampling_error, weyl_law_euler_cauchy)
from glt_spectra.symbols import (euler_cauchy_distribution, euler_cauchy_rearrangement, sample_rearranged,
                                 symbol_fd, symbol_iga)


class TestSpectrumReport:
    def test_inertia(self):
        r = SpectrumReport([3.0, -1.0, 0.0, -2.0])
        assert r.values.tolist() == [-2.0, -1.0, 0.0, 3.0]
        assert (r.d, r.d_minus, r.d_plus) == (4, 2, 2)

    def test_weighting(self):
        r = spectrum_report([100.0, 400.0], n=9)
        assert np.allclose(r.weighted, [1.0, 4.0])

    def test_flag_shape(self):
        with pytest.raises(DimensionMismatchError):
            SpectrumReport([1.0, 2.0], outlier_flags=[True])
        assert SpectrumReport([1.0, 2.0]).with_flags([False, True]).n_outliers == 1


class TestCounting:
    def test_examples(self):
        r = SpectrumReport([1.0, 2.0, 3.0])
        assert counting_function(r, 2.0) == 2
        assert counting_function(r, 0.5) == 0

    def test_laplacian_weyl(self):
        n = 100
        vals = eigenvalues(assemble_fd(laplacian_operator(), make_uniform_grid(0.0, 1.0, n, 1))).values
        assert counting_function(vals, 2 * (n + 1) ** 2) / n == pytest.approx(0.5, abs=0.02)

    def test_counting_converges_to_phi(self):
        D = euler_cauchy_distribution(1.0)
        t = D.inf + np.array([0.25, 0.5, 0.75]) * (D.sup - D.inf)
        dev = []
        for n in (500, 2000):
            rep = spectrum_report(fd_spectrum(1.0, n).values, n)
            dev.append(np.max(np.abs(counting_function(rep, t) / n - D(t))))
        assert dev[1] < 0.5 * dev[0]


class TestReindex:
    @pytest.mark.parametrize("k,dm,expected", [(-2, 2, 1), (1, 4, 5), (4, 2, 6)])
    def test_examples(self, k, dm, expected):
        assert reindex(k, dm) == expected

    def test_bijection(self):
        dm, dp = 3, 5
        out = [reindex(k, dm) for k in list(range(-dm, 0)) + list(range(1, dp + 1))]
        assert out == list(range(1, dm + dp + 1))

    def test_errors(self):
        with pytest.raises(InvalidArgumentError):
            reindex(0, 1)
        with pytest.raises(InvalidArgumentError):
            reindex(-3, 2)


class TestErrors:
    def test_identical(self):
        er = local_and_max_errors([1.0, 2.0], [1.0, 2.0])
        assert er.max_error == 0.0 and not er.local_errors.any()

    def test_simple(self):
        assert local_and_max_errors([2.0], [1.0]).max_error == 1.0

    def test_zero_rules(self):
        assert relative_errors(np.array([0.0, 1.0]), np.array([0.0, 0.0])).tolist() == [0.0, math.inf]
        assert local_and_max_errors([0.0, 1.0], [0.0, 0.0]).is_infinite

    def test_argmax(self):
        er = local_and_max_errors([1.0, 2.5, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0])
        assert er.argmax == 2 and er.argmax_ratio == 0.5

    def test_exclusion(self):
        er = local_and_max_errors([1.0, 2.0, 9.0], [1.0, 2.1, 3.0], exclude=[False, False, True])
        assert er.argmax == 2 and er.excluded == 1
        assert er.local_errors[2] == pytest.approx(2.0)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            local_and_max_errors([1.0], [1.0, 2.0])

    def test_analytic_zero_when_samples_are_reference(self):
        ref = np.array([10.0, 40.0, 90.0])
        er = numerical_and_analytic_errors(ref * 1.1, ref, ref / 16)
        assert np.allclose(er.analytic, 0.0) and np.allclose(er.numerical, 0.1)

    def test_analytic_zero_reference(self):
        with pytest.raises(InvalidArgumentError):
            numerical_and_analytic_errors([1.0], [0.0], [1.0])

    def test_table_one_anchor(self):
        n = 100
        ref = EulerCauchyCase(1.0).exact_eigenvalues(n)
        w = sample_rearranged(euler_cauchy_rearrangement(1.0), n)
        er = numerical_and_analytic_errors(fd_spectrum(1.0, n).values, ref, w)
        assert abs(er.analytic[0] / saturation_constant(1.0, 1) - 1) == pytest.approx(0.0041, rel=0.05)

    def test_max_error_tracks_symbol_ratio(self):
        n = 5000
        lam = fd_spectrum(1.0, n).values
        er = local_and_max_errors(lam, EulerCauchyCase(1.0).exact_eigenvalues(n))
        x = np.arange(1, n + 1) / (n + 1)
        sym = asymptotic_error(euler_cauchy_rearrangement(1.0), weyl_law_euler_cauchy(), points=x)
        assert abs(er.max_error / sym.value - 1) < 3.2e-4


class TestSaturation:
    def test_values(self):
        assert saturation_constant(0.1, 1) == pytest.approx(0.0025, abs=5e-5)
        assert saturation_constant(1.0, 10) == pytest.approx(2.5324e-04, rel=1e-4)
        assert saturation_constant(1e-12, 1) < 1e-13

    def test_bad_k(self):
        with pytest.raises(InvalidArgumentError):
            saturation_constant(1.0, 0)


class TestOutliers:
    def test_inside_range(self):
        assert not detect_outliers([0.5, 1.0], bounds=(0.0, 4.0)).any()

    def test_fd_three_point_has_none(self):
        case = EulerCauchyCase(1.0)
        sym = symbol_fd(case.operator(), None, 1)
        for n in (100, 1000):
            rep = spectrum_report(fd_spectrum(1.0, n).values, n)
            assert not detect_outliers(rep, sym).any()

    def test_needs_bounds(self):
        with pytest.raises(InvalidArgumentError):
            detect_outliers([1.0])

    @pytest.mark.parametrize("scheme,eta", [("fd", 1), ("fd", 5), ("iga", 1), ("iga", 5), ("iga", 10)])
    def test_outlier_fraction_small(self, scheme, eta):
        case = EulerCauchyCase(1.0)
        n = 1000
        if scheme == "fd":
            vals, base = fd_spectrum(1.0, n, eta).values, n + 1
            sym = symbol_fd(case.operator(), None, eta)
        else:
            res, base = iga_spectrum(1.0, n, eta)
            vals = res.values
            sym = symbol_iga(case.operator(), None, eta)
        flags = detect_outliers(SpectrumReport(vals, float(base), 2.0), sym)
        assert flags.sum() / n <= 0.05


class TestWeyl:
    def test_euler_cauchy_law(self):
        law = weyl_law_euler_cauchy()
        assert law.zeta(math.pi**2) == pytest.approx(1.0)
        assert law.zeta_star(0.5) == pytest.approx(math.pi**2 / 4)
        x = np.linspace(0.01, 1, 50)
        assert np.allclose(law.zeta(law.zeta_star(x)), x)

    def test_identical_laws(self):
        law = weyl_law_euler_cauchy()
        assert asymptotic_error(law.zeta_star, law).value == 0.0

    def test_laplacian_endpoint(self):
        res = asymptotic_error(lambda x: 4 * np.sin(math.pi * np.asarray(x) / 2) ** 2, weyl_law_euler_cauchy())
        assert res.value == pytest.approx(abs(4 / math.pi**2 - 1), rel=1e-12)
        assert res.argmax == 1.0

    def test_argmax_location(self):
        res = asymptotic_error(euler_cauchy_rearrangement(1.2), weyl_law_euler_cauchy())
        assert res.argmax == pytest.approx(0.6301, abs=1e-3)

    def test_uniform_sampling_error_decreases(self):
        R = euler_cauchy_rearrangement(1.0)
        A = [uniform_sampling_error(spectrum_report(fd_spectrum(1.0, n).values, n).weighted,
                                    sample_rearranged(R, n)) for n in (500, 2000)]
        assert A[1] < A[0]

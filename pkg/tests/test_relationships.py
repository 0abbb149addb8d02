import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from apm_bridge.channels import (
    CascadedGNM,
    GeneralizedNakagami,
    Nakagami,
    Rayleigh,
    aber_closed_nakagami_wojnar,
    aber_gnm_wojnar,
    acc_closed_rayleigh,
    snr_cdf,
    snr_pdf,
)
from apm_bridge.curves import ApmCurve
from apm_bridge.errors import CapabilityError, DomainError, RangeError, UnsupportedVariantError
from apm_bridge.measures import Capacity, OutageIndicator, Reliability, WojnarBer, apm_quadrature
from apm_bridge.relationships import (
    BranchConsistencyWarning,
    ModulationParams,
    NonStandardModulationWarning,
    _acc_continuation,
    aber_curve,
    acc_curve,
    acc_from_aber,
    apm_from_acc,
    kernel_acc_from_reliability,
    oc_from_acc,
    op_from_acc,
    pdf_from_acc,
    rayleigh_acc_curve,
)

STANDARD = [(0.5, 0.5), (0.5, 1.0), (1.0, 0.5), (1.0, 1.0)]


class TestModulationParams:
    def test_standard(self, no_warnings):
        assert ModulationParams().standard
        assert ModulationParams(0.5, 1.0).standard

    def test_non_standard_warns(self):
        with pytest.warns(NonStandardModulationWarning):
            params = ModulationParams(0.7, 0.5)
        assert not params.standard

    @pytest.mark.parametrize("a, b", [(0.0, 0.5), (1.0, -1.0), (math.inf, 1.0)])
    def test_invalid(self, a, b):
        with pytest.raises(DomainError):
            ModulationParams(a, b)


class TestKernel:
    def test_closed_forms(self):
        u = np.array([0.1, 1.0, 7.0])
        assert np.allclose(kernel_acc_from_reliability((1.0, 1.0))(u), np.exp(-u) / u, rtol=1e-14)
        s = np.sqrt(0.5 * u)
        assert np.allclose(kernel_acc_from_reliability((0.5, 0.5))(u), (1 - 2 * s * special.dawsn(s)) / u, rtol=1e-12)

    def test_window(self):
        assert kernel_acc_from_reliability((1.0, 0.5)).window.upper == 0.5
        assert kernel_acc_from_reliability((1.0, 1.0)).window.upper == 1.0

    def test_rejects_non_positive(self):
        with pytest.raises(DomainError):
            kernel_acc_from_reliability((1.0, 0.5))(np.array([0.0]))


class TestAccFromAber:
    @pytest.mark.parametrize("a, b", STANDARD)
    @pytest.mark.parametrize("g", [0.1, 1.0, 100.0])
    def test_rayleigh_round_trip(self, a, b, g):
        got = acc_from_aber(aber_curve(Rayleigh(), (a, b)), (a, b), g)
        assert got == pytest.approx(acc_closed_rayleigh(g), rel=1e-7)

    @pytest.mark.parametrize("model", [Nakagami(2.0), GeneralizedNakagami(2.0, 1.5), GeneralizedNakagami(0.8, 0.6)], ids=repr)
    def test_other_models(self, model):
        got = acc_from_aber(aber_curve(model, (1.0, 0.5)), (1.0, 0.5), 3.0)
        assert got == pytest.approx(apm_quadrature(model, 3.0, Capacity()), rel=1e-7)

    def test_out_of_range_aber(self):
        with pytest.raises(RangeError):
            acc_from_aber(lambda g: np.full_like(g, 0.6), (1.0, 0.5), 1.0)

    def test_cascade_has_no_model_aber(self):
        with pytest.raises(UnsupportedVariantError):
            aber_curve(CascadedGNM(((1.0, 1.0), (2.0, 1.0))), (1.0, 0.5))

    @given(st.floats(0.5, 8), st.floats(0.01, 1e4), st.sampled_from(STANDARD))
    def test_nakagami_aber_closed_form(self, m, g, ab):
        a, b = ab
        direct = aber_closed_nakagami_wojnar(g, m, a, b)
        via_gnm = aber_gnm_wojnar(g, m, 1.0, a, b)
        assert via_gnm == pytest.approx(direct, rel=1e-10, abs=1e-300)

    @given(st.floats(0.5, 5), st.floats(0.3, 4), st.floats(0.05, 50), st.sampled_from(STANDARD))
    def test_gnm_aber_against_quadrature(self, m, xi, g, ab):
        a, b = ab
        want = apm_quadrature(GeneralizedNakagami(m, xi), g, WojnarBer(a, b), tol=1e-13)
        assert aber_gnm_wojnar(g, m, xi, a, b) == pytest.approx(want, rel=1e-8, abs=1e-12)


class TestContinuation:
    @given(st.floats(0.05, 50))
    def test_generic_matches_rayleigh_on_cut(self, x):
        got = _acc_continuation(Rayleigh(), complex(-x, 0.0))
        want = acc_closed_rayleigh(complex(-x, 0.0))
        assert abs(got - want) < 1e-7 * max(1.0, abs(want))

    @pytest.mark.parametrize("z", [1 + 2j, -3 + 0.5j, 0.2 - 4j])
    def test_generic_matches_rayleigh_off_axis(self, z):
        assert abs(_acc_continuation(Rayleigh(), z) - acc_closed_rayleigh(z)) < 1e-9

    def test_nakagami_cut_scalar_and_array_agree(self):
        curve = acc_curve(Nakagami(2.5))
        x = np.array([0.3, 2.0, 40.0])
        assert np.allclose(curve.imag_on_cut(x), [curve.imag_on_cut(v) for v in x], rtol=1e-14)

    def test_cascade_unsupported(self):
        with pytest.raises(UnsupportedVariantError):
            acc_curve(CascadedGNM(((1.0, 1.0), (2.0, 1.0))))


class TestOutage:
    @given(st.floats(0.01, 1e3), st.floats(0.01, 1e3))
    def test_rayleigh_exact_without_offset(self, g, th):
        got = op_from_acc(rayleigh_acc_curve(), g, th, eps=0.0)
        assert got == pytest.approx(-math.expm1(-th / g), rel=1e-12, abs=1e-15)

    @pytest.mark.parametrize("model", [Nakagami(0.5), Nakagami(3.0), GeneralizedNakagami(2.0, 1.5)], ids=repr)
    def test_matches_cdf(self, model):
        curve = acc_curve(model)
        for th in (0.1, 1.0, 10.0):
            assert op_from_acc(curve, 2.0, th, eps=0.0) == pytest.approx(snr_cdf(model, 2.0, th), abs=1e-12)

    def test_offset_shifts_threshold(self):
        eps = 1e-4
        got = op_from_acc(rayleigh_acc_curve(), 1.0, 1.0, eps)
        assert got == pytest.approx(-math.expm1(-math.exp(-eps)), rel=1e-12)

    @given(st.floats(0.1, 100), st.floats(0.01, 10), st.floats(1.01, 10))
    def test_monotone_in_threshold(self, g, th, factor):
        curve = acc_curve(Nakagami(2.0))
        low, high = op_from_acc(curve, g, th), op_from_acc(curve, g, th * factor)
        assert 0.0 <= low <= high <= 1.0

    def test_outage_capacity_is_outage_at_shifted_threshold(self):
        curve = rayleigh_acc_curve()
        for c in (0.25, 1.0, 3.0):
            assert oc_from_acc(curve, 5.0, c) == op_from_acc(curve, 5.0, math.expm1(c))

    def test_generic_continuation_path(self):
        full = acc_curve(Nakagami(2.0))
        generic = ApmCurve(full.real_eval, full.complex_eval)
        assert op_from_acc(generic, 3.0, 2.0) == pytest.approx(op_from_acc(full, 3.0, 2.0), abs=1e-9)

    def test_inconsistent_branch_warns_and_clamps(self):
        bad = ApmCurve(np.log1p, cut_imag=lambda x: 4.0)
        with pytest.warns(BranchConsistencyWarning):
            assert op_from_acc(bad, 1.0, 1.0) == 0.0

    def test_requires_continuation(self):
        with pytest.raises(CapabilityError):
            op_from_acc(ApmCurve(np.log1p), 1.0, 1.0)

    @pytest.mark.parametrize("th", [0.0, -1.0, math.inf])
    def test_invalid_threshold(self, th):
        with pytest.raises(DomainError):
            op_from_acc(rayleigh_acc_curve(), 1.0, th)


class TestDensity:
    @pytest.mark.parametrize("model", [Rayleigh(), Nakagami(2.0), GeneralizedNakagami(2.0, 1.5)], ids=repr)
    def test_recovers_density(self, model):
        r = np.linspace(0.05, 8.0, 40)
        got = pdf_from_acc(acc_curve(model), 2.0, r)
        assert np.allclose(got, snr_pdf(model, 2.0, r), rtol=1e-5, atol=1e-8)

    def test_scalar(self):
        assert isinstance(pdf_from_acc(rayleigh_acc_curve(), 1.0, 1.0), float)

    def test_rejects_non_positive(self):
        with pytest.raises(DomainError):
            pdf_from_acc(rayleigh_acc_curve(), 1.0, [1.0, 0.0])


class TestApmFromAcc:
    @pytest.mark.parametrize("a, b", STANDARD)
    def test_rayleigh_ber(self, a, b):
        got = apm_from_acc(rayleigh_acc_curve(), WojnarBer(a, b), 4.0)
        assert got == pytest.approx(apm_quadrature(Rayleigh(), 4.0, WojnarBer(a, b)), abs=1e-8)

    @pytest.mark.parametrize("model", [Nakagami(2.0), GeneralizedNakagami(1.5, 2.0)], ids=repr)
    @pytest.mark.parametrize("measure", [Capacity(), WojnarBer(1.0, 0.5), Reliability(0.5, 1.0)], ids=repr)
    def test_matches_direct_average(self, model, measure):
        got = apm_from_acc(acc_curve(model), measure, 2.0)
        assert got == pytest.approx(apm_quadrature(model, 2.0, measure), rel=1e-7, abs=1e-12)

    def test_outage_routed(self):
        curve = rayleigh_acc_curve()
        assert apm_from_acc(curve, OutageIndicator(2.0), 3.0) == op_from_acc(curve, 3.0, 2.0)

    def test_measure_without_derivative(self):
        class Opaque:
            def evaluate(self, g):
                return g

        with pytest.raises(CapabilityError):
            apm_from_acc(rayleigh_acc_curve(), Opaque(), 1.0)

    def test_no_spurious_warnings(self, no_warnings):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            apm_from_acc(acc_curve(Nakagami(2.0)), Capacity(), 1.0)


class TestAberClosedFormEdges:
    @pytest.mark.parametrize("ab", STANDARD)
    def test_zero_snr_is_half(self, ab):
        assert aber_closed_nakagami_wojnar(0.0, 2.0, *ab) == pytest.approx(0.5, rel=1e-14)
        assert aber_gnm_wojnar(0.0, 2.0, 1.5, *ab) == pytest.approx(0.5, rel=1e-12)

    def test_vectorized(self):
        g = np.array([0.1, 1.0, 10.0])
        got = aber_gnm_wojnar(g, 1.5, 2.0, 1.0, 0.5)
        assert got.shape == (3,)
        assert np.all(np.diff(got) < 0)

    def test_unit_shape_matches_rayleigh_closed_form(self):
        from apm_bridge.channels import aber_closed_rayleigh_wojnar

        g = np.logspace(-2, 4, 13)
        want = aber_closed_rayleigh_wojnar(g, 1.0, 0.5)
        assert np.allclose(aber_closed_nakagami_wojnar(g, 1.0, 1.0, 0.5), want, rtol=1e-12)

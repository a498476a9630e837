"""Tests de las cotas teóricas cerradas."""

import math

import numpy as np
import pytest

from src.bounds import (
    CRITICAL_CHI_MASS, blowup_condition, blowup_time_bound, c2_constant, c_plus,
    classify_regime, entropy_decay_bounds, entropy_lower_bound, entropy_upper_bound,
    excess_mass_bound, h_of_q, hls_constant, hls_exponent, is_critical, k2_constant,
    k_plus, lambda_star, log_abs_entropy_bound, lq_monotonicity_threshold,
    p_moment_bound, rho_moment_bound, theory_report, virial_envelope
)
from src.errors import ParameterError, SupercriticalInputError
from src.models import Regime, TheoryInputs

PI = math.pi


class TestLambdaStar:
    """Umbral lambda* y clasificación del régimen."""

    def test_values(self):
        assert lambda_star(1.0, 8 * PI) == pytest.approx(0.0, abs=1e-12)
        assert lambda_star(1.0, 16 * PI) == pytest.approx(16 * PI * (math.sqrt(2.0) - 1.0), rel=1e-14)
        assert lambda_star(1.0, 16 * PI) == pytest.approx(20.82, abs=5e-3)
        assert lambda_star(1.0, 2 * PI) == pytest.approx(-PI, rel=1e-14)

    def test_critical_detection(self):
        assert is_critical(2.0, 4 * PI)
        assert not is_critical(1.0, 8 * PI + 1e-6)

    @pytest.mark.parametrize("chi, mass, i0, regime", [
        (1.0, 4 * PI, 10.0, Regime.SUBCRITICAL),
        (1.0, 16 * PI, 10.0, Regime.BLOWUP_CONDITION),
        (1.0, 16 * PI, 40.0, Regime.UNCOVERED),
        (1.0, 8 * PI, 0.0, Regime.UNCOVERED),
    ])
    def test_classify(self, chi, mass, i0, regime):
        assert classify_regime(chi, mass, i0) == regime

    def test_invalid_inputs(self):
        with pytest.raises(ParameterError):
            lambda_star(-1.0, 1.0)
        with pytest.raises(ParameterError):
            TheoryInputs(chi=1.0, mass=0.0, p_moment=1.0)


class TestBlowupTime:
    """Cota del tiempo de explosión."""

    def test_reference_value(self):
        t_bl = blowup_time_bound(TheoryInputs(1.0, 16 * PI, 10.0))
        expected = 0.25 * math.log(256 * PI**2 / (512 * PI**2 - (16 * PI + 10.0) ** 2))
        assert t_bl == pytest.approx(expected, rel=1e-13)
        assert t_bl == pytest.approx(0.144, abs=1e-3)

    def test_zero_moment(self):
        assert blowup_time_bound(TheoryInputs(1.0, 16 * PI, 0.0)) == pytest.approx(0.0, abs=1e-12)

    def test_not_applicable(self):
        assert blowup_time_bound(TheoryInputs(1.0, 4 * PI, 1.0)) is None
        assert blowup_time_bound(TheoryInputs(1.0, 16 * PI, 30.0)) is None

    def test_increasing_in_initial_moment(self):
        lam = lambda_star(1.0, 16 * PI)
        times = [blowup_time_bound(TheoryInputs(1.0, 16 * PI, i0)) for i0 in np.linspace(0.0, 0.99 * lam, 30)]
        assert np.all(np.diff(times) > 0)

    def test_envelope_reaches_mass_squared_at_bound(self):
        inputs = TheoryInputs(1.0, 16 * PI, 10.0)
        t_bl = blowup_time_bound(inputs)
        assert virial_envelope(inputs, t_bl) == pytest.approx((16 * PI) ** 2, rel=1e-10)


class TestVirialAndMoments:
    """Envolvente del virial y cotas de momentos."""

    def test_envelope_at_zero(self):
        inputs = TheoryInputs(1.0, 10.0, 3.0)
        assert virial_envelope(inputs, 0.0) == pytest.approx(13.0 ** 2, rel=1e-14)

    def test_pure_diffusion_envelope(self):
        inputs = TheoryInputs(0.0, 2.0, 1.0)
        assert virial_envelope(inputs, 0.3) == pytest.approx(9.0 * math.exp(1.2), rel=1e-14)

    def test_negative_time_rejected(self):
        with pytest.raises(ParameterError):
            virial_envelope(TheoryInputs(1.0, 1.0, 1.0), -0.1)

    def test_c_plus_vanishes_below_threshold(self):
        assert c_plus(TheoryInputs(1.0, 16 * PI, 10.0)) == 0.0
        bound = p_moment_bound(TheoryInputs(1.0, 16 * PI, 10.0), 1.0)
        assert bound == pytest.approx(lambda_star(1.0, 16 * PI))

    def test_c_plus_value(self):
        mass, i0 = 16 * PI, 30.0
        lam = lambda_star(1.0, mass)
        expected = math.sqrt(i0 - lam) * math.sqrt(i0 + mass + mass * math.sqrt(2.0))
        assert c_plus(TheoryInputs(1.0, mass, i0)) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("chi, mass", [(0.0, 1.0), (1.0, 2 * PI), (1.0, 12 * PI), (2.0, 20 * PI)])
    def test_moment_bound_dominates_envelope(self, chi, mass):
        for i0 in (0.0, 1.0, 10.0, 100.0):
            inputs = TheoryInputs(chi, mass, i0)
            assert p_moment_bound(inputs, 0.0) >= i0 - 1e-9
            for t in (0.0, 0.1, 1.0):
                env = virial_envelope(inputs, t)
                if env >= 0:
                    assert p_moment_bound(inputs, t) >= math.sqrt(env) - mass - 1e-9

    def test_k_plus(self):
        # C_+ = 0 y lambda* <= 0: ambas ramas del máximo son <= 1
        assert k_plus(TheoryInputs(1.0, 2 * PI, 0.0)) >= 0.0
        small, large = TheoryInputs(1.0, 2 * PI, 1.0), TheoryInputs(1.0, 2 * PI, 50.0)
        assert k_plus(large) > k_plus(small)
        assert rho_moment_bound(large, 1.0) == pytest.approx(k_plus(large) + 4 * PI, rel=1e-14)


class TestEntropyBounds:
    """Cotas de entropía."""

    def test_constants(self):
        assert c2_constant(1.0) == pytest.approx(math.log(math.e * PI), rel=1e-14)
        assert k2_constant(1.0) == pytest.approx(math.log(4 * math.e * PI), rel=1e-14)
        assert k2_constant(2.0) - c2_constant(2.0) == pytest.approx(4.0 * math.log(2.0), rel=1e-13)

    def test_lower_bound_at_zero(self):
        inputs = TheoryInputs(1.0, 3.0, 2.0)
        assert entropy_lower_bound(inputs, 0.0) == pytest.approx(-2.0 + 3.0 * math.log(3.0 / (2 * PI)), rel=1e-14)

    def test_lower_bound_slope(self):
        inputs = TheoryInputs(1.0, 3.0, 2.0)
        slope = entropy_lower_bound(inputs, 11.0) - entropy_lower_bound(inputs, 10.0)
        assert slope == pytest.approx(-6.0, abs=1e-6)

    def test_lower_bound_holds_for_gaussians(self):
        for mass, s in ((1.0, 0.5), (3.0, 2.0), (10.0, 0.1)):
            ent = mass * (math.log(mass) - math.log(2 * PI * s) - 1.0)
            assert ent >= entropy_lower_bound(TheoryInputs(1.0, mass, mass * s), 0.0)

    def test_upper_bound_without_chemotaxis(self):
        inputs = TheoryInputs(0.0, 2.0, 1.0, entropy=-1.0, free_energy=-1.0)
        assert entropy_upper_bound(inputs, 5.0) == pytest.approx(-1.0, rel=1e-14)

    def test_upper_bound_prefactor(self):
        inputs = TheoryInputs(1.0, 4 * PI, 1.0, entropy=1.0, free_energy=1.0)
        inner = k2_constant(4 * PI) + 2.0 * k_plus(inputs) + 4.0 * 4 * PI * 0.5
        assert entropy_upper_bound(inputs, 0.5) == pytest.approx(2.0 * (1.0 + 0.5 * inner), rel=1e-13)

    def test_upper_bound_rejects_supercritical(self):
        with pytest.raises(SupercriticalInputError):
            entropy_upper_bound(TheoryInputs(1.0, 8 * PI, 1.0), 1.0)
        with pytest.raises(SupercriticalInputError):
            log_abs_entropy_bound(TheoryInputs(1.0, 10 * PI, 1.0), 1.0)

    def test_excess_mass_bound(self):
        inputs = TheoryInputs(1.0, 2 * PI, 1.0)
        c_t = log_abs_entropy_bound(inputs, 1.0)
        assert excess_mass_bound(inputs, 1.0, math.e ** 2) == pytest.approx(c_t / 2.0)
        with pytest.raises(ParameterError):
            excess_mass_bound(inputs, 1.0, 1.0)


class TestEntropyDecay:
    """Cotas de decaimiento."""

    def test_initial_value(self):
        linear, strong = entropy_decay_bounds(TheoryInputs(1.0, 2 * PI, 1.0, entropy=-0.7), 0.0)
        assert linear == pytest.approx(-0.7)
        assert strong == pytest.approx(-0.7, rel=1e-12)

    def test_boundary_keeps_only_linear(self):
        linear, strong = entropy_decay_bounds(TheoryInputs(1.0, 4 * PI, 1.0), 1.0)
        assert linear is not None
        assert strong is None

    def test_out_of_regime(self):
        assert entropy_decay_bounds(TheoryInputs(1.0, 6 * PI, 1.0), 1.0) == (None, None)

    def test_strong_below_linear(self):
        inputs = TheoryInputs(1.0, 2 * PI, 1.0, entropy=0.0)
        for t in np.linspace(0.01, 5.0, 50):
            linear, strong = entropy_decay_bounds(inputs, t)
            assert strong <= linear + 1e-12

    def test_pure_diffusion_strong_form(self):
        inputs = TheoryInputs(0.0, 1.0, 1.0, entropy=-2.0)
        _, strong = entropy_decay_bounds(inputs, 0.5)
        assert strong == pytest.approx(-math.log(math.exp(2.0) + 4 * PI * math.e * 0.5), rel=1e-13)


class TestLqAndHls:
    """Umbrales L^q y constantes HLS."""

    def test_threshold_values(self):
        assert lq_monotonicity_threshold(1.0) == pytest.approx(4 * PI)
        assert lq_monotonicity_threshold(2.0) == pytest.approx(32 * PI / 9)

    def test_h_decreasing(self):
        q = np.linspace(1.0, 20.0, 100)
        assert np.all(np.diff([h_of_q(v) for v in q]) < 0)

    def test_hls_constant(self):
        assert hls_constant(1.0) == pytest.approx(2.0 * math.sqrt(PI), rel=1e-13)
        assert hls_exponent(1.0) == pytest.approx(4.0 / 3.0)

    @pytest.mark.parametrize("lam", [0.0, 2.0, -0.5])
    def test_hls_range(self, lam):
        with pytest.raises(ParameterError):
            hls_constant(lam)
        with pytest.raises(ParameterError):
            hls_exponent(lam)


class TestTheoryReport:
    """Informe completo."""

    def test_blowup_report(self):
        report = theory_report(TheoryInputs(1.0, 16 * PI, 10.0))
        assert report.supercritical
        assert report.blowup_condition
        assert report.t_bl == pytest.approx(blowup_time_bound(TheoryInputs(1.0, 16 * PI, 10.0)))
        data = report.to_dict()
        assert data['regime'] == 'blowup_condition'
        assert set(data['h_of_q']) == {'1.5', '2', '3'}

    def test_subcritical_report(self):
        report = theory_report(TheoryInputs(1.0, 4 * PI, 10.0))
        assert report.t_bl is None
        assert not blowup_condition(report.inputs)
        assert report.regime == Regime.SUBCRITICAL
        assert report.lambda_star < 0
        assert report.inputs.chi_mass < CRITICAL_CHI_MASS

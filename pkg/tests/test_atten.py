import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acoumetro.atten import (
    NP_TO_DB,
    AttenuationModel,
    alpha_from_echoes,
    db_to_np,
    estimate_alpha,
    eval_power_law,
    fit_power_law,
    np_to_db,
    read_attenuation_csv,
    segment_amplitude,
)
from acoumetro.channel import ChannelGeometry, echo_amplitudes, gate_echoes, synthesize_echoes


class TestConversion:
    def test_one_neper(self):
        assert np_to_db(1.0) == 8.686

    def test_zero(self):
        assert np_to_db(0.0) == 0.0

    def test_inverse_factor(self):
        assert round(np_to_db(0.115129), 4) == 1.0

    def test_factor_close_to_exact(self):
        assert abs(NP_TO_DB - 20 / math.log(10)) < 5e-4
        assert round(20 / math.log(10), 3) == NP_TO_DB

    @given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
    def test_linear(self, a, b):
        assert np_to_db(a + b) == pytest.approx(np_to_db(a) + np_to_db(b), abs=1e-9)

    def test_round_trip(self):
        assert db_to_np(np_to_db(2.5)) == pytest.approx(2.5)


class TestEstimateAlpha:
    def test_forward_then_invert(self):
        a = 0.93 * math.exp(-0.2)
        assert a == pytest.approx(0.761420, abs=1e-6)
        assert estimate_alpha(1.0, 0.761420, 0.93, 0.1) == pytest.approx(2.0, abs=1e-4)
        assert estimate_alpha(1.0, a, 0.93, 0.1) == pytest.approx(2.0, rel=1e-12)

    def test_lossless(self):
        assert estimate_alpha(1.0, 0.93, 0.93, 0.1) == 0.0

    def test_zero_amplitude(self):
        with pytest.raises(ValueError, match="infinite"):
            estimate_alpha(1.0, 0.0, 0.93, 0.1)

    def test_negative_attenuation(self):
        with pytest.raises(ValueError, match="negative"):
            estimate_alpha(1.0, 0.95, 0.93, 0.1)


class TestEchoInversion:
    def test_segment_amplitude_noiseless(self):
        g = ChannelGeometry()
        w = synthesize_echoes(g, 1487.3)
        a1, a2 = (segment_amplitude(w, s) for s in gate_echoes(w))
        assert (a1, a2) == pytest.approx(echo_amplitudes(g), rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.0, 0.1, 1.0, 2.0, 5.0])
    @pytest.mark.parametrize("c", [1410.0, 1500.0, 1690.0])
    def test_recovers_injected_alpha(self, alpha, c):
        g = ChannelGeometry()
        w = synthesize_echoes(g, c, alpha_np=alpha)
        assert abs(alpha_from_echoes(w, g, *gate_echoes(w)) - alpha) < 1e-9


class TestPowerLaw:
    def test_exact_square_law(self):
        m = fit_power_law([(1, 0.5), (2, 2.0), (4, 8.0)])
        assert m.a1 == pytest.approx(0.5, rel=1e-12)
        assert m.b == pytest.approx(2.0, rel=1e-12)

    def test_constant(self):
        m = fit_power_law([(1, 3.0), (2, 3.0), (5, 3.0)])
        assert m.b == pytest.approx(0.0, abs=1e-12)
        assert m.a1 == pytest.approx(3.0)

    def test_single_point(self):
        with pytest.raises(ValueError):
            fit_power_law([(1, 0.5)])

    def test_repeated_frequency(self):
        with pytest.raises(ValueError):
            fit_power_law([(2, 0.5), (2, 0.6)])

    def test_nonpositive_alpha(self):
        with pytest.raises(ValueError):
            fit_power_law([(1, 0.5), (2, 0.0)])

    def test_eval(self):
        m = AttenuationModel(0.5, 2.0)
        assert eval_power_law(m, 3.0) == pytest.approx(4.5)
        assert eval_power_law(m, 1.0) == 0.5
        flat = AttenuationModel(0.7, 0.0)
        assert eval_power_law(flat, 0.3) == eval_power_law(flat, 12.0) == 0.7

    def test_eval_bad_frequency(self):
        with pytest.raises(ValueError):
            eval_power_law(AttenuationModel(0.5, 2.0), 0.0)

    @settings(max_examples=200)
    @given(st.floats(0.01, 10), st.floats(0, 2.5),
           st.lists(st.floats(0.5, 20), min_size=5, max_size=5, unique=True))
    def test_refit_recovers_parameters(self, a1, b, freqs):
        if np.ptp(np.log(freqs)) < 0.1:
            freqs = [0.5, 1.0, 2.0, 5.0, 15.0]
        m = fit_power_law([(f, eval_power_law(AttenuationModel(a1, b), f)) for f in freqs])
        assert m.a1 == pytest.approx(a1, rel=1e-9)
        assert m.b == pytest.approx(b, rel=1e-9, abs=1e-12)


def test_read_csv(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("freq_MHz,alpha_dB_per_m\n1,0.5\n2,2.0\n")
    assert read_attenuation_csv(p) == [(1.0, 0.5), (2.0, 2.0)]
    p.write_text("freq_MHz,alpha_dB_per_m\n1,0.5\n2\n")
    with pytest.raises(ValueError, match="a.csv:3"):
        read_attenuation_csv(p)

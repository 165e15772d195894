import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eoghmi import dsp
from eoghmi.errors import DegenerateInputError, InvalidParameterError

from .conftest import FS, make_trace, tone


def band_power(x, fs, f_lo, f_hi):
    spec = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(x.size, 1 / fs)
    return spec[(freqs >= f_lo) & (freqs <= f_hi)].sum()


class TestNotchFilter:
    def test_attenuates_mains_band(self):
        x = tone(50.0, 8.0)
        out = dsp.notch_filter(make_trace(x), 50.0)
        interior = slice(1000, -1000)  # excludes filter edge transients
        before = band_power(x[interior], FS, 49, 51)
        after = band_power(out.samples[interior], FS, 49, 51)
        assert 10 * np.log10(before / after) > 30

    def test_passes_distant_band(self):
        x = tone(10.0, 8.0)
        out = dsp.notch_filter(make_trace(x), 50.0)
        interior = slice(500, -500)
        err = np.max(np.abs(out.samples[interior] - x[interior]))
        assert err < 0.05

    def test_zero_phase(self):
        # Symmetric input stays symmetric: forward-backward filtering adds no lag.
        x = tone(10.0, 8.0, phase=np.pi / 2)  # cosine, even about t=0 midpoint
        out = dsp.notch_filter(make_trace(x), 50.0).samples
        xc = np.correlate(out[500:-500], x[500:-500], mode="full")
        lag = int(np.argmax(xc)) - (xc.size // 2)
        assert lag == 0

    def test_rejects_out_of_range_frequency(self):
        with pytest.raises(InvalidParameterError):
            dsp.notch_filter(make_trace(np.zeros(100)), 300.0)
        with pytest.raises(InvalidParameterError):
            dsp.notch_filter(make_trace(np.zeros(100)), 50.0, q=0.0)


class TestHighpassFilter:
    def test_removes_dc_and_drift(self):
        drift = 3.0 + 0.5 * np.arange(4000) / 4000
        x = tone(10.0, 8.0) + drift
        out = dsp.highpass_filter(make_trace(x), 2.0).samples
        assert abs(np.mean(out[500:-500])) < 0.02

    def test_preserves_passband(self):
        x = tone(10.0, 8.0)
        out = dsp.highpass_filter(make_trace(x), 2.0).samples
        interior = slice(500, -500)
        assert np.max(np.abs(out[interior] - x[interior])) < 0.02

    def test_rejects_bad_cutoff(self):
        with pytest.raises(InvalidParameterError):
            dsp.highpass_filter(make_trace(np.zeros(100)), 0.0)
        with pytest.raises(InvalidParameterError):
            dsp.highpass_filter(make_trace(np.zeros(100)), 2.0, order=0)


def brute_force_median(seq, l):
    """Sort-based sliding median with replicated boundaries."""
    half = l // 2
    padded = np.concatenate([np.full(half, seq[0]), seq, np.full(half, seq[-1])])
    return np.array([np.sort(padded[i : i + l])[half] for i in range(seq.size)])


class TestMedianFilter1d:
    @pytest.mark.parametrize("l", [1, 3, 5, 7, 15, 31])
    def test_matches_sort_oracle(self, l, rng):
        for n in (l, 40, 1000):
            seq = rng.standard_normal(n)
            assert np.array_equal(dsp.median_filter_1d(seq, l), brute_force_median(seq, l))

    def test_preserves_constants(self):
        seq = np.full(50, 2.5)
        assert np.array_equal(dsp.median_filter_1d(seq, 9), seq)

    def test_length_one_is_identity(self, rng):
        seq = rng.standard_normal(20)
        assert np.array_equal(dsp.median_filter_1d(seq, 1), seq)

    def test_rejects_even_length(self):
        with pytest.raises(InvalidParameterError):
            dsp.median_filter_1d(np.zeros(10), 4)


class TestHilbertEnvelope:
    def test_recovers_am_modulator(self):
        t = np.arange(4000) / FS
        modulator = 2.0 + np.sin(2 * np.pi * 0.5 * t)
        x = modulator * np.sin(2 * np.pi * 40 * t)
        env = dsp.hilbert_envelope(make_trace(x))
        interior = slice(200, -200)
        assert np.max(np.abs(env[interior] - modulator[interior])) < 0.05

    def test_constant_tone_envelope_flat(self):
        env = dsp.hilbert_envelope(make_trace(tone(40.0, 4.0, amp=1.5)))
        interior = slice(200, -200)
        assert np.max(np.abs(env[interior] - 1.5)) < 0.01


class TestSavgolSmooth:
    @pytest.mark.parametrize("degree", [0, 1, 2, 3])
    def test_reproduces_polynomials_exactly(self, degree):
        x = np.linspace(-1, 1, 101)
        seq = sum((c + 1) * x**p for p, c in enumerate(range(degree + 1)))
        out = dsp.savgol_smooth(np.asarray(seq, dtype=float), 11, 3)
        assert np.allclose(out, seq, atol=1e-10)

    def test_rejects_bad_window(self):
        with pytest.raises(InvalidParameterError):
            dsp.savgol_smooth(np.zeros(20), 10, 3)  # even window
        with pytest.raises(InvalidParameterError):
            dsp.savgol_smooth(np.zeros(20), 5, 5)  # order >= window


class TestFindPeaks:
    def test_finds_injected_peaks(self):
        x = np.zeros(200)
        x[[50, 120]] = 5.0
        x[80] = 2.0  # below height
        peaks = dsp.find_peaks(x, min_height=4.0)
        assert peaks.tolist() == [50, 120]

    def test_min_distance_suppresses_smaller(self):
        x = np.zeros(200)
        x[50] = 6.0
        x[60] = 5.0
        peaks = dsp.find_peaks(x, min_height=4.0, min_distance=50)
        assert peaks.tolist() == [50]

    @given(st.lists(st.floats(-10, 10), min_size=5, max_size=200), st.integers(1, 30))
    @settings(max_examples=60, deadline=None)
    def test_output_respects_min_distance(self, values, min_distance):
        x = np.asarray(values)
        peaks = dsp.find_peaks(x, min_height=1.0, min_distance=min_distance)
        gaps = np.diff(peaks)
        assert np.all(gaps >= min_distance)


class TestRobustZscore:
    def test_known_vector(self):
        out = dsp.robust_zscore(make_trace([1.0, 2.0, 3.0, 4.0, 100.0])).samples
        expected = np.array([-1.34898152, -0.67449076, 0.0, 0.67449076, 65.42560367])
        assert np.allclose(out, expected, atol=1e-8)
        # scale set by the quartile spread, so the outlier stays far out
        assert out[-1] > 10

    def test_centered_and_unit_scale(self, rng):
        out = dsp.robust_zscore(make_trace(rng.standard_normal(999) * 7 + 3)).samples
        assert abs(np.median(out)) < 1e-9
        mad = np.median(np.abs(out - np.median(out)))
        assert abs(dsp.MAD_SCALE * mad - 1.0) < 1e-9

    def test_idempotent(self, rng):
        tr = make_trace(rng.standard_normal(500))
        once = dsp.robust_zscore(tr)
        twice = dsp.robust_zscore(once)
        assert np.allclose(once.samples, twice.samples, atol=1e-9)

    @given(st.floats(-50, 50).filter(lambda a: abs(a) > 1e-3), st.floats(-100, 100))
    @settings(max_examples=40, deadline=None)
    def test_affine_invariant(self, a, b):
        rng = np.random.default_rng(7)
        x = rng.standard_normal(200)
        base = dsp.robust_zscore(make_trace(x)).samples
        scaled = dsp.robust_zscore(make_trace(a * x + b)).samples
        assert np.allclose(scaled, np.sign(a) * base, atol=1e-7)

    def test_constant_input_rejected(self):
        with pytest.raises(DegenerateInputError):
            dsp.robust_zscore(make_trace(np.full(100, 3.0)))

    def test_marks_meta(self, rng):
        out = dsp.robust_zscore(make_trace(rng.standard_normal(100)))
        assert out.meta.get("robust_zscored") is True


class TestSegmentWindows:
    def test_four_second_trace(self):
        tr = make_trace(np.arange(2000, dtype=float), activity="blink")
        wins = dsp.segment_windows(tr, 1.0, 0.5)
        assert len(wins) == 7
        assert [w.start_index for w in wins] == [0, 250, 500, 750, 1000, 1250, 1500]
        assert all(len(w) == 500 for w in wins)
        assert all(w.label == "blink" for w in wins)
        # windows are true slices of the trace
        assert np.array_equal(wins[2].samples, tr.samples[500:1000])

    def test_exact_fit_gives_one_window(self):
        wins = dsp.segment_windows(make_trace(np.zeros(500)), 1.0, 0.5)
        assert len(wins) == 1

    def test_forty_second_trace_count(self):
        wins = dsp.segment_windows(make_trace(np.zeros(20000)), 1.0, 0.5)
        assert len(wins) == 79

    def test_short_trace_gives_empty_list(self):
        assert dsp.segment_windows(make_trace(np.zeros(499)), 1.0, 0.5) == []

    def test_rejects_non_integral_window(self):
        with pytest.raises(InvalidParameterError):
            dsp.segment_windows(make_trace(np.zeros(1000), fs=3.0), 1.5, 0.5)

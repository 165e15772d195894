import numpy as np
import pytest

from eoghmi import features
from eoghmi.errors import InvalidParameterError
from eoghmi.trace import WindowSegment

from .conftest import FS, tone

SCALE_INVARIANT = [
    "zcr", "spectral_entropy", "spectral_centroid", "spectral_bandwidth",
    "spectral_rolloff", "spectral_contrast_1", "spectral_contrast_2",
    "spectral_contrast_3", "spectral_contrast_4", "spectral_contrast_5",
    "kurtosis", "skewness", "cv",
]


def noise_window(seed=5, n=500):
    return np.random.default_rng(seed).standard_normal(n)


class TestZcr:
    def test_constant_positive(self):
        assert features.zcr(np.full(10, 2.0)) == 0.0

    def test_alternating(self):
        assert features.zcr(np.array([1.0, -1.0, 1.0, -1.0])) == pytest.approx(2 / 3)

    def test_zeros_counted_nonnegative(self):
        assert features.zcr(np.zeros(10)) == 0.0

    def test_too_short(self):
        with pytest.raises(InvalidParameterError):
            features.zcr(np.array([1.0]))


class TestShortTermEnergy:
    def test_zeros(self):
        assert features.short_term_energy(np.zeros(10)) == 0.0

    def test_constant(self):
        assert features.short_term_energy(np.full(7, 3.0)) == pytest.approx(9.0)

    def test_hand_case(self):
        assert features.short_term_energy(np.array([1.0, 2.0, 3.0])) == pytest.approx(14 / 3)


class TestEnergyEntropy:
    def test_constant_window_is_uniform(self):
        assert features.energy_entropy(np.full(100, 2.0), 10) == pytest.approx(np.log(10))

    def test_energy_in_one_subframe(self):
        x = np.zeros(100)
        x[3] = 5.0
        assert features.energy_entropy(x, 10) == pytest.approx(0.0)

    def test_matches_brute_force(self):
        x = noise_window()
        sub = x[:500].reshape(10, 50)
        energies = (sub**2).sum(axis=1)
        p = energies / energies.sum()
        expected = -np.sum(p * np.log(p))
        assert features.energy_entropy(x, 10) == pytest.approx(expected, abs=1e-9)

    def test_tail_truncated(self):
        x = np.arange(23, dtype=float)
        # only the first 20 samples participate with K=10
        assert features.energy_entropy(x, 10) == features.energy_entropy(x[:20], 10)

    def test_zero_energy(self):
        assert features.energy_entropy(np.zeros(100), 10) == 0.0


class TestSpectralEntropy:
    def test_single_bin(self):
        # constant window concentrates everything in the DC bin
        assert features.spectral_entropy(np.full(64, 2.0), FS) == pytest.approx(0.0)

    def test_flat_spectrum(self):
        x = np.zeros(500)
        x[0] = 1.0  # impulse: |X_k| = 1 for every bin
        assert features.spectral_entropy(x, FS) == pytest.approx(np.log2(251))

    def test_matches_brute_force(self):
        x = noise_window()
        mag = np.abs(np.fft.rfft(x))
        p = mag / mag.sum()
        expected = -np.sum(p[p > 0] * np.log2(p[p > 0]))
        assert features.spectral_entropy(x, FS) == pytest.approx(expected, abs=1e-9)

    def test_zero_energy(self):
        assert features.spectral_entropy(np.zeros(100), FS) == 0.0


class TestSpectralCentroid:
    def test_pure_tone(self):
        assert features.spectral_centroid(tone(40.0, 1.0), FS) == pytest.approx(40.0, abs=1.0)

    def test_two_equal_tones(self):
        x = tone(30.0, 1.0) + tone(70.0, 1.0)
        assert features.spectral_centroid(x, FS) == pytest.approx(50.0, abs=1.0)

    def test_zeros(self):
        assert features.spectral_centroid(np.zeros(100), FS) == 0.0

    def test_within_nyquist(self):
        c = features.spectral_centroid(noise_window(), FS)
        assert 0 <= c <= FS / 2


class TestSpectralBandwidth:
    def test_pure_tone_near_zero(self):
        assert features.spectral_bandwidth(tone(40.0, 1.0), FS) < 1.0

    def test_symmetric_tone_pair(self):
        x = tone(30.0, 1.0) + tone(70.0, 1.0)
        assert features.spectral_bandwidth(x, FS) == pytest.approx(20.0, abs=1.0)

    def test_matches_brute_force(self):
        x = noise_window()
        mag = np.abs(np.fft.rfft(x))
        freqs = np.fft.rfftfreq(x.size, 1 / FS)
        w = mag / mag.sum()
        c = np.sum(freqs * w)
        expected = np.sqrt(np.sum(w * (freqs - c) ** 2))
        assert features.spectral_bandwidth(x, FS) == pytest.approx(expected, abs=1e-9)

    def test_zeros(self):
        assert features.spectral_bandwidth(np.zeros(100), FS) == 0.0


class TestSpectralRolloff:
    def test_single_tone(self):
        assert features.spectral_rolloff(tone(40.0, 1.0), FS) == pytest.approx(40.0, abs=1.0)

    def test_flat_spectrum(self):
        x = np.zeros(500)
        x[0] = 1.0
        # 85% of a flat 251-bin power spectrum is passed at bin ceil(0.85*251)
        assert features.spectral_rolloff(x, FS) == pytest.approx(0.85 * FS / 2, abs=1.0)

    def test_zeros(self):
        assert features.spectral_rolloff(np.zeros(100), FS) == 0.0

    def test_fraction_validated(self):
        with pytest.raises(InvalidParameterError):
            features.spectral_rolloff(np.ones(100), FS, fraction=1.5)


class TestSpectralContrast:
    def test_flat_spectrum_all_zero(self):
        x = np.zeros(500)
        x[0] = 1.0
        assert np.allclose(features.spectral_contrast(x, FS), 0.0, atol=1e-9)

    def test_shape(self):
        assert features.spectral_contrast(noise_window(), FS).shape == (5,)

    def test_peak_raises_band_contrast(self):
        x = tone(40.0, 1.0) + 0.001 * noise_window()
        contrast = features.spectral_contrast(x, FS)
        # 40 Hz sits in band 3 of the octave split (31.25..62.5 Hz)
        assert contrast[2] > 1.0

    def test_matches_brute_force(self):
        x = noise_window()
        mag = np.abs(np.fft.rfft(x))
        freqs = np.fft.rfftfreq(x.size, 1 / FS)
        nyq = FS / 2
        edges = [0, nyq / 16, nyq / 8, nyq / 4, nyq / 2, nyq]
        expected = []
        for k in range(5):
            hi = freqs <= edges[k + 1] if k == 4 else freqs < edges[k + 1]
            band = np.sort(mag[(freqs >= edges[k]) & hi])[::-1]
            m = max(1, int(round(0.02 * band.size)))
            expected.append(np.log(band[:m].mean() + 1e-12) - np.log(band[-m:].mean() + 1e-12))
        assert np.allclose(features.spectral_contrast(x, FS), expected, atol=1e-9)


class TestPolyFeatures:
    def test_flat_spectrum_constant_fit(self):
        x = np.zeros(500)
        x[0] = 2.0  # |X_k| = 2 everywhere
        coefs = features.poly_features(x, FS)
        assert np.allclose(coefs[:3], 0.0, atol=1e-6)
        assert coefs[3] == pytest.approx(2.0, abs=1e-6)

    def test_matches_least_squares_oracle(self):
        x = noise_window()
        mag = np.abs(np.fft.rfft(x))
        freqs = np.fft.rfftfreq(x.size, 1 / FS)
        design = np.vander(freqs, 4)
        expected, *_ = np.linalg.lstsq(design, mag, rcond=None)
        assert np.allclose(features.poly_features(x, FS), expected, atol=1e-6)

    def test_coefficient_order_highest_first(self):
        coefs = features.poly_features(noise_window(), FS)
        assert coefs.shape == (4,)

    def test_too_few_bins(self):
        with pytest.raises(InvalidParameterError):
            features.poly_features(np.ones(4), FS)


class TestAmplitudeFeatures:
    def test_hand_case(self):
        out = features.amplitude_features(np.array([-2.0, 0.0, 3.0]))
        assert out == {"pav": 3.0, "vav": -2.0, "auc": 5.0}

    def test_zeros(self):
        out = features.amplitude_features(np.zeros(5))
        assert out == {"pav": 0.0, "vav": 0.0, "auc": 0.0}

    def test_all_positive_vav_is_min(self):
        out = features.amplitude_features(np.full(6, 2.0))
        assert out["pav"] == 2.0
        assert out["vav"] == 2.0
        assert out["auc"] == 12.0


class TestStatisticalFeatures:
    def test_hand_case(self):
        out = features.statistical_features(np.array([1.0, 2.0, 3.0, 4.0]))
        assert out["mean"] == pytest.approx(2.5)
        assert out["median"] == pytest.approx(2.5)
        assert out["std"] == pytest.approx(1.2909944, abs=1e-6)

    def test_gaussian_moments(self):
        x = np.random.default_rng(42).standard_normal(20000)
        out = features.statistical_features(x)
        assert abs(out["kurtosis"]) < 0.2
        assert abs(out["skewness"]) < 0.1

    def test_constant_window_conventions(self):
        out = features.statistical_features(np.full(10, 4.0))
        assert out["std"] == 0.0
        assert out["cv"] == 0.0
        assert out["kurtosis"] == 0.0
        assert out["skewness"] == 0.0

    def test_zero_mean_cv_convention(self):
        out = features.statistical_features(np.array([-1.0, 1.0, -1.0, 1.0]))
        assert out["mean"] == 0.0
        assert out["cv"] == 0.0


DB4_APPROX = [1.41360717, 4.23073611, 7.06453146, 9.89186778, 11.3143149, 8.49718595, 5.6633906]
DB4_DETAIL = [6.46752170e-02, -4.09620864e-02, -2.37131306e-02, 0.0, -6.46752170e-02, 4.09620864e-02, 2.37131306e-02]


def brute_dwt(x, filt):
    """Symmetric half-sample extension + correlation + decimation, index by index."""
    n_taps = len(filt)
    pad = n_taps - 1
    ext = list(x[:pad][::-1]) + list(x) + list(x[-pad:][::-1])
    full = []
    for i in range(len(ext) - n_taps + 1):
        full.append(sum(ext[i + j] * filt[j] for j in range(n_taps)))
    return np.array(full[1::2])


class TestWaveletFeatures:
    def test_db4_frozen_values(self):
        approx, detail = features.dwt_level(np.arange(1.0, 9.0), "db4")
        assert np.allclose(approx, DB4_APPROX, atol=1e-7)
        assert np.allclose(detail, DB4_DETAIL, atol=1e-7)

    def test_matches_brute_force(self, rng):
        x = rng.standard_normal(501)
        lo = features._WAVELETS["db4"]
        hi = lo[::-1] * (-1.0) ** np.arange(lo.size)
        approx, detail = features.dwt_level(x, "db4")
        assert np.allclose(approx, brute_dwt(x, lo), atol=1e-12)
        assert np.allclose(detail, brute_dwt(x, hi), atol=1e-12)

    def test_zeros(self):
        out = features.wavelet_features(np.zeros(64))[0]
        assert out == {"mean": 0.0, "std": 0.0, "energy": 0.0, "entropy": 0.0}

    def test_constant_haar(self):
        out_a, out_d = features.dwt_level(np.full(32, 3.0), "haar")
        assert np.allclose(out_d, 0.0, atol=1e-12)
        assert np.allclose(out_a, 3.0 * np.sqrt(2.0), atol=1e-12)

    def test_stats_definitions(self, rng):
        x = rng.standard_normal(200)
        approx, detail = features.dwt_level(x, "db4")
        coeffs = np.concatenate([approx, detail])
        out = features.wavelet_features(x)[0]
        assert out["mean"] == pytest.approx(coeffs.mean())
        assert out["std"] == pytest.approx(coeffs.std(ddof=1))
        assert out["energy"] == pytest.approx(np.sum(coeffs**2))
        p = coeffs**2 / np.sum(coeffs**2)
        assert out["entropy"] == pytest.approx(-np.sum(p[p > 0] * np.log(p[p > 0])), abs=1e-9)

    def test_too_short_window(self):
        with pytest.raises(InvalidParameterError):
            features.wavelet_features(np.ones(3), levels=2)

    def test_unknown_family(self):
        with pytest.raises(InvalidParameterError):
            features.dwt_level(np.ones(16), "sym9")


class TestExtractWindowFeatures:
    def test_full_vector_shape_and_names(self):
        fv = features.extract_window_features(noise_window(), fs=FS)
        assert fv.values.shape == (29,)
        assert len(features.FEATURE_NAMES) == 29
        assert np.all(np.isfinite(fv.values))

    def test_zeros_window_degenerate_vector(self):
        fv = features.extract_window_features(np.zeros(500), fs=FS)
        assert np.all(np.isfinite(fv.values))
        by_name = dict(zip(features.FEATURE_NAMES, fv.values))
        for name in ("zcr", "ste", "stee", "spectral_entropy", "spectral_centroid",
                     "spectral_rolloff", "pav", "vav", "auc", "mean", "std", "cv",
                     "wavelet_energy"):
            assert by_name[name] == 0.0

    def test_composition_matches_individual_calls(self):
        x = noise_window(seed=9)
        fv = features.extract_window_features(x, fs=FS)
        by_name = dict(zip(features.FEATURE_NAMES, fv.values))
        assert by_name["zcr"] == features.zcr(x)
        assert by_name["ste"] == features.short_term_energy(x)
        assert by_name["stee"] == features.energy_entropy(x)
        assert by_name["spectral_entropy"] == features.spectral_entropy(x, FS)
        assert by_name["spectral_centroid"] == features.spectral_centroid(x, FS)
        assert by_name["spectral_bandwidth"] == features.spectral_bandwidth(x, FS)
        assert by_name["spectral_rolloff"] == features.spectral_rolloff(x, FS)
        assert np.array_equal(
            [by_name[f"spectral_contrast_{i}"] for i in range(1, 6)],
            features.spectral_contrast(x, FS),
        )
        assert np.array_equal(
            [by_name[f"poly_coef_{i}"] for i in (3, 2, 1, 0)],
            features.poly_features(x, FS),
        )
        amps = features.amplitude_features(x)
        stats = features.statistical_features(x)
        wave = features.wavelet_features(x)[0]
        assert by_name["pav"] == amps["pav"]
        assert by_name["auc"] == amps["auc"]
        assert by_name["kurtosis"] == stats["kurtosis"]
        assert by_name["cv"] == stats["cv"]
        assert by_name["wavelet_entropy"] == wave["entropy"]

    def test_scale_covariance(self):
        x = noise_window(seed=13)
        base = dict(zip(features.FEATURE_NAMES, features.extract_window_features(x, fs=FS).values))
        scaled = dict(zip(features.FEATURE_NAMES, features.extract_window_features(3.7 * x, fs=FS).values))
        for name in SCALE_INVARIANT:
            assert scaled[name] == pytest.approx(base[name], rel=1e-6, abs=1e-9), name
        assert scaled["ste"] == pytest.approx(3.7**2 * base["ste"], rel=1e-9)
        assert scaled["pav"] == pytest.approx(3.7 * base["pav"], rel=1e-9)
        assert scaled["auc"] == pytest.approx(3.7 * base["auc"], rel=1e-9)
        assert scaled["std"] == pytest.approx(3.7 * base["std"], rel=1e-9)
        assert scaled["mean"] == pytest.approx(3.7 * base["mean"], rel=1e-9)

    def test_accepts_window_segment(self):
        w = WindowSegment(samples=noise_window(), start_index=250, fs=FS, label="blink")
        fv = features.extract_window_features(w)
        assert fv.window_start == 250
        assert fv.label == "blink"

    def test_raw_samples_need_fs(self):
        with pytest.raises(InvalidParameterError):
            features.extract_window_features(noise_window())


class TestStackContext:
    def _vectors(self, n, labels=None):
        out = []
        for i in range(n):
            label = labels[i] if labels else f"act{i % 6}"
            out.append(features.FeatureVector(values=np.full(29, float(i)), label=label))
        return out

    def test_three_windows_one_sample(self):
        stacked = features.stack_context(self._vectors(3), session="s1")
        assert len(stacked) == 1
        assert stacked[0].flat.shape == (87,)

    def test_count_arithmetic(self):
        assert len(features.stack_context(self._vectors(79), session="s1")) == 77

    def test_center_label_and_rows(self):
        vectors = self._vectors(5, labels=list("abcde"))
        stacked = features.stack_context(vectors, session="s1")
        assert [s.label for s in stacked] == ["b", "c", "d"]
        for i, s in enumerate(stacked):
            for r in range(3):
                assert np.array_equal(s.grid[r], vectors[i + r].values)

    def test_flat_is_grid_flattening(self):
        stacked = features.stack_context(self._vectors(4), session="s1")
        for s in stacked:
            assert np.array_equal(s.flat, s.grid.reshape(-1))

    def test_too_few_windows_rejected(self):
        with pytest.raises(InvalidParameterError):
            features.stack_context(self._vectors(2), session="s1")


class TestNormalization:
    def test_train_is_its_own_test(self, rng):
        X = rng.standard_normal((40, 87)) * 3 + 1
        stats = features.fit_normalization(X)
        out = features.apply_normalization(stats, X)
        assert np.allclose(out.mean(axis=0), 0.0, atol=1e-9)
        assert np.allclose(out.std(axis=0), 1.0, atol=1e-9)

    def test_hand_case(self):
        X = np.array([[1.0, 5.0], [3.0, 9.0]])
        stats = features.fit_normalization(X)
        assert np.allclose(stats.mean, [2.0, 7.0])
        assert np.allclose(stats.std, [1.0, 2.0])
        out = features.apply_normalization(stats, X)
        assert np.allclose(out, [[-1.0, -1.0], [1.0, 1.0]])

    def test_test_set_keeps_train_stats(self, rng):
        train = rng.standard_normal((40, 10))
        test = rng.standard_normal((40, 10)) + 2.0
        stats = features.fit_normalization(train)
        out = features.apply_normalization(stats, test)
        # the shift survives: test was not used to fit
        assert np.abs(out.mean(axis=0)).max() > 0.5

    def test_zero_variance_dimension_flagged(self, rng):
        X = rng.standard_normal((20, 3))
        X[:, 1] = 7.0
        stats = features.fit_normalization(X)
        assert stats.zero_variance.tolist() == [False, True, False]
        out = features.apply_normalization(stats, X)
        assert np.all(out[:, 1] == 0.0)

    def test_round_trip(self, rng):
        X = rng.standard_normal((30, 6)) * 5 + 3
        stats = features.fit_normalization(X)
        back = features.invert_normalization(stats, features.apply_normalization(stats, X))
        assert np.allclose(back, X, atol=1e-9)

    def test_needs_two_samples(self):
        with pytest.raises(InvalidParameterError):
            features.fit_normalization(np.ones((1, 5)))

import numpy as np
import pytest

from eoghmi import hpss, spectral
from eoghmi.errors import InvalidParameterError

from .conftest import FS, make_trace, tone


def small_spec(mag, window_len=32, hop=8):
    """Build a spectrogram directly from a magnitude matrix (zero phase)."""
    mag = np.asarray(mag, dtype=np.float64)
    return spectral.Spectrogram(frames=mag.astype(np.complex128), window_len=window_len, hop=hop, fs=FS)


SMALL = hpss.HpssParams(l_harm=5, l_perc=5)


class TestHpssParams:
    def test_rejects_even_or_small_lengths(self):
        with pytest.raises(InvalidParameterError):
            hpss.HpssParams(l_harm=4)
        with pytest.raises(InvalidParameterError):
            hpss.HpssParams(l_perc=1)
        with pytest.raises(InvalidParameterError):
            hpss.HpssParams(mask_kind="wiener")
        with pytest.raises(InvalidParameterError):
            hpss.HpssParams(soft_power=0.5)


class TestMasks:
    def test_hard_masks_complementary(self, rng):
        mag = rng.random((17, 24))
        mh, mp = hpss.hpss_masks(mag, hpss.HpssParams(l_harm=5, l_perc=5, mask_kind="hard"))
        assert np.array_equal(mh + mp, np.ones_like(mag))
        assert set(np.unique(mh)) <= {0.0, 1.0}

    def test_soft_masks_sum_to_one(self, rng):
        mag = rng.random((17, 24))
        mh, mp = hpss.hpss_masks(mag, hpss.HpssParams(l_harm=5, l_perc=5, mask_kind="soft"))
        assert np.allclose(mh + mp, 1.0, atol=1e-9)
        assert np.all((mh >= 0) & (mh <= 1))

    def test_soft_mask_zero_bins_split_evenly(self):
        mag = np.zeros((17, 24))
        mh, mp = hpss.hpss_masks(mag, hpss.HpssParams(l_harm=5, l_perc=5, mask_kind="soft"))
        assert np.allclose(mh, 0.5)
        assert np.allclose(mp, 0.5)

    def test_masks_scale_invariant(self, rng):
        mag = rng.random((17, 24)) + 0.01
        for kind in ("hard", "soft"):
            params = hpss.HpssParams(l_harm=5, l_perc=5, mask_kind=kind)
            mh1, mp1 = hpss.hpss_masks(mag, params)
            mh2, mp2 = hpss.hpss_masks(3.7 * mag, params)
            assert np.allclose(mh1, mh2, atol=1e-12)
            assert np.allclose(mp1, mp2, atol=1e-12)

    def test_transpose_swaps_roles(self, rng):
        # Median along time of the transpose is median along frequency of the
        # original, so the harmonic mask of M.T equals the percussive mask of M.
        mag = rng.random((21, 21)) + 0.01
        params_soft = hpss.HpssParams(l_harm=5, l_perc=5, mask_kind="soft")
        mh_t, mp_t = hpss.hpss_masks(mag.T, params_soft)
        mh, mp = hpss.hpss_masks(mag, params_soft)
        assert np.allclose(mh_t, mp.T, atol=1e-12)
        assert np.allclose(mp_t, mh.T, atol=1e-12)
        # hard masks agree too, except where the two directional medians tie
        # (both medians can select the same matrix entry)
        from scipy import ndimage

        h = ndimage.median_filter(mag, size=(1, 5), mode="nearest")
        p = ndimage.median_filter(mag, size=(5, 1), mode="nearest")
        untied = (h != p).T
        params_hard = hpss.HpssParams(l_harm=5, l_perc=5, mask_kind="hard")
        mh_t, _ = hpss.hpss_masks(mag.T, params_hard)
        _, mp = hpss.hpss_masks(mag, params_hard)
        assert np.array_equal(mh_t[untied], mp.T[untied])


class TestHpssSeparate:
    def test_zero_spectrogram(self):
        result = hpss.hpss_separate(small_spec(np.zeros((17, 24))), SMALL)
        assert np.array_equal(result.harmonic.frames, np.zeros((17, 24)))
        assert np.array_equal(result.percussive.frames, np.zeros((17, 24)))

    def test_steady_tone_goes_harmonic(self):
        mag = np.full((17, 24), 0.01)
        mag[6, :] = 5.0  # one hot bin across all frames
        for kind in ("hard", "soft"):
            result = hpss.hpss_separate(small_spec(mag), hpss.HpssParams(l_harm=5, l_perc=5, mask_kind=kind))
            tone_energy = np.abs(mag[6, :]) ** 2
            harm_energy = np.abs(result.harmonic.frames[6, :]) ** 2
            perc_energy = np.abs(result.percussive.frames[6, :]) ** 2
            assert harm_energy.sum() >= 0.99 * tone_energy.sum()
            assert perc_energy.sum() < 0.01 * tone_energy.sum()

    def test_impulse_goes_percussive(self):
        mag = np.full((17, 24), 0.01)
        mag[:, 10] = 5.0  # one hot frame across all bins
        for kind in ("hard", "soft"):
            result = hpss.hpss_separate(small_spec(mag), hpss.HpssParams(l_harm=5, l_perc=5, mask_kind=kind))
            imp_energy = np.abs(mag[:, 10]) ** 2
            perc_energy = np.abs(result.percussive.frames[:, 10]) ** 2
            harm_energy = np.abs(result.harmonic.frames[:, 10]) ** 2
            assert perc_energy.sum() >= 0.99 * imp_energy.sum()
            assert harm_energy.sum() < 0.01 * imp_energy.sum()

    def test_hard_mask_partitions_energy_exactly(self, rng):
        mag = rng.random((17, 24))
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi, (17, 24)))
        spec = spectral.Spectrogram(frames=mag * phase, window_len=32, hop=8, fs=FS)
        result = hpss.hpss_separate(spec, hpss.HpssParams(l_harm=5, l_perc=5, mask_kind="hard"))
        e_in = np.sum(np.abs(spec.frames) ** 2)
        e_h = np.sum(np.abs(result.harmonic.frames) ** 2)
        e_p = np.sum(np.abs(result.percussive.frames) ** 2)
        assert e_h + e_p == pytest.approx(e_in, rel=1e-12)
        # every complex bin goes entirely to exactly one side
        both = (np.abs(result.harmonic.frames) > 0) & (np.abs(result.percussive.frames) > 0)
        assert not np.any(both)

    def test_soft_mask_reconstruction_identity(self, rng):
        mag = rng.random((17, 24))
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi, (17, 24)))
        spec = spectral.Spectrogram(frames=mag * phase, window_len=32, hop=8, fs=FS)
        result = hpss.hpss_separate(spec, hpss.HpssParams(l_harm=5, l_perc=5, mask_kind="soft"))
        assert np.allclose(result.harmonic.frames + result.percussive.frames, spec.frames, atol=1e-12)

    def test_rejects_too_few_frames(self):
        with pytest.raises(InvalidParameterError):
            hpss.hpss_separate(small_spec(np.zeros((17, 4))), SMALL)

    def test_rejects_too_few_bins(self):
        spec = spectral.Spectrogram(frames=np.zeros((3, 24)), window_len=4, hop=2, fs=FS)
        with pytest.raises(InvalidParameterError):
            hpss.hpss_separate(spec, SMALL)


class TestHarmonicFilterTime:
    def test_tone_plus_impulses(self):
        clean = tone(20.0, 8.0)
        impulses = np.zeros_like(clean)
        impulses[200::500] = 6.0
        mixed = make_trace(clean + impulses)
        out = hpss.harmonic_filter_time(mixed, hpss.HpssParams()).samples
        corr = np.corrcoef(out, clean)[0, 1]
        assert corr > 0.95
        # project the output onto the clean tone; the residual holds what is
        # left of the impulses
        alpha = np.dot(out, clean) / np.dot(clean, clean)
        residual = out - alpha * clean
        attenuation_db = 10 * np.log10(np.sum(impulses**2) / np.sum(residual**2))
        assert attenuation_db >= 10

    def test_pure_tone_passes_through(self):
        clean = tone(20.0, 8.0)
        out = hpss.harmonic_filter_time(make_trace(clean), hpss.HpssParams()).samples
        interior = slice(256, -256)
        rel_rms = np.sqrt(np.mean((out[interior] - clean[interior]) ** 2) / np.mean(clean[interior] ** 2))
        assert rel_rms < 0.05

    def test_zeros_give_zeros(self):
        out = hpss.harmonic_filter_time(make_trace(np.zeros(4000)), hpss.HpssParams()).samples
        assert np.allclose(out, 0.0, atol=1e-12)

    def test_length_preserved_and_meta_tagged(self, rng):
        trc = make_trace(rng.standard_normal(3000))
        out = hpss.harmonic_filter_time(trc, hpss.HpssParams())
        assert out.samples.size == 3000
        assert out.meta.get("hpss") == "harmonic"

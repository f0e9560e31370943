"""Synthetic cohort generation and its closure with the measurement stack."""

import numpy as np
import pytest

from conftest import RATE, buffer
from voicescreen._rng import derive_rng
from voicescreen.audio_io import load_wav
from voicescreen.cohort import (
    CohortConfig,
    VoiceParams,
    class_params,
    generate_cohort,
    synth_voice,
)
from voicescreen.evaluation import PipelineConfig, run_cross_validation
from voicescreen.lld import analyze_clip, measure_jitter, measure_shimmer
from voicescreen.manifest import parse_manifest
from voicescreen.models import TrainConfig
from voicescreen.segmenter import detect_voiced_regions, voiced_coverage


class MeanRng:
    """Stand-in generator whose normal draws always land on the mean."""

    def normal(self, loc=0.0, scale=1.0, size=None):
        if size is None:
            return loc
        return np.full(size, loc)


def median_f0(x):
    f0 = analyze_clip(buffer(x)).contour("f0")
    return float(np.median(f0[np.isfinite(f0)]))


class TestVoiceParams:
    def test_f0_bounds(self):
        with pytest.raises(ValueError):
            VoiceParams(50.0, 10.0, 0.01, 0.02, 0.3, 0.4, 4.0)

    def test_perturbation_bounds(self):
        with pytest.raises(ValueError):
            VoiceParams(180.0, 10.0, 0.5, 0.02, 0.3, 0.4, 4.0)

    def test_formants_must_ascend(self):
        with pytest.raises(ValueError):
            VoiceParams(180.0, 10.0, 0.01, 0.02, 0.3, 0.4, 4.0,
                        formants=((1500.0, 150.0), (500.0, 200.0)))


class TestClassParams:
    def test_labels_identical_at_zero_effect(self):
        a = class_params("depressed", 0.0, derive_rng(0, "x"))
        b = class_params("healthy", 0.0, derive_rng(0, "x"))
        assert a == b

    def test_full_effect_shift_from_mean_baseline(self):
        p = class_params("depressed", 1.0, MeanRng())
        assert p.f0_mean_hz == pytest.approx(190.0 * 0.88)  # 167.2
        assert p.f0_sd_hz == pytest.approx(20.0 * 0.6)
        assert p.jitter_frac == pytest.approx(0.008 + 0.015)
        assert p.shimmer_frac == pytest.approx(0.025 + 0.020)
        assert p.pause_rate_per_s == pytest.approx(0.3 * 1.8)
        assert p.syllable_rate_per_s == pytest.approx(4.0 * 0.8)

    def test_healthy_never_shifted(self):
        a = class_params("healthy", 1.0, MeanRng())
        b = class_params("healthy", 0.0, MeanRng())
        assert a == b

    def test_population_direction(self):
        rng = np.random.default_rng(0)
        dep = [class_params("depressed", 1.0, rng) for _ in range(200)]
        hea = [class_params("healthy", 1.0, rng) for _ in range(200)]
        assert np.mean([p.f0_mean_hz for p in dep]) < \
            np.mean([p.f0_mean_hz for p in hea])
        assert np.mean([p.jitter_frac for p in dep]) > \
            np.mean([p.jitter_frac for p in hea])
        assert np.mean([p.pause_rate_per_s for p in dep]) > \
            np.mean([p.pause_rate_per_s for p in hea])


class TestSynthVoice:
    def clean_params(self, f0=150.0, **kw):
        defaults = dict(f0_sd_hz=0.0, jitter_frac=0.0, shimmer_frac=0.0,
                        pause_rate_per_s=0.0, mean_pause_s=0.4,
                        syllable_rate_per_s=4.0, noise_floor_db=-80.0)
        defaults.update(kw)
        return VoiceParams(f0, **defaults)

    def test_clean_voice_has_near_zero_perturbations(self):
        buf = synth_voice(self.clean_params(), 4.0, np.random.default_rng(0))
        a = analyze_clip(buf)
        assert measure_jitter(a.chains) < 0.005
        assert measure_shimmer(a.chains) < 0.01

    def test_f0_tracks_request(self):
        buf = synth_voice(self.clean_params(150.0), 4.0, np.random.default_rng(1))
        assert abs(median_f0(buf.samples) - 150.0) <= 5.0

    def test_no_pauses_means_mostly_voiced(self):
        buf = synth_voice(self.clean_params(), 6.0, np.random.default_rng(2))
        regions = detect_voiced_regions(buf)
        assert voiced_coverage(regions, 0.0, buf.duration_s) >= 0.85

    def test_peak_normalized(self):
        buf = synth_voice(self.clean_params(), 3.0, np.random.default_rng(3))
        assert np.max(np.abs(buf.samples)) == pytest.approx(0.9, abs=1e-9)

    def test_pauses_reduce_coverage(self):
        rng = np.random.default_rng(4)
        quiet = synth_voice(self.clean_params(pause_rate_per_s=0.6), 20.0, rng)
        regions = detect_voiced_regions(quiet)
        assert voiced_coverage(regions, 0.0, quiet.duration_s) < 0.85

    def test_rejects_too_short_duration(self):
        with pytest.raises(ValueError):
            synth_voice(self.clean_params(), 1.0, np.random.default_rng(0))


class TestSynthesisMeasurementClosure:
    """Parameters written into the signal must come back out of the trackers."""

    def test_cohort_realistic_draws(self):
        rng = np.random.default_rng(123)
        for i in range(16):
            params = class_params("depressed" if i % 2 else "healthy", 1.0, rng)
            buf = synth_voice(params, 8.0, np.random.default_rng(1000 + i))
            a = analyze_clip(buf)
            f0 = median_f0(buf.samples)
            assert abs(f0 - params.f0_mean_hz) <= 0.05 * params.f0_mean_hz, i
            assert abs(measure_jitter(a.chains) - params.jitter_frac) <= 0.01, i
            assert abs(measure_shimmer(a.chains) - params.shimmer_frac) <= 0.015, i


class TestGenerateCohort:
    def test_counts_and_labels(self, tmp_path):
        path = generate_cohort(CohortConfig(3, 2, recording_duration_s=5.0, seed=0),
                               tmp_path / "c")
        manifest = parse_manifest(path)
        labels = [p.label for p in manifest.participants]
        assert labels.count("depressed") == 3
        assert labels.count("healthy") == 2
        for p in manifest.participants:
            assert load_wav(p.recordings[0]).sample_rate_hz == RATE

    def test_bitwise_deterministic(self, tmp_path):
        cfg = CohortConfig(2, 2, recording_duration_s=4.0, seed=9)
        p1 = generate_cohort(cfg, tmp_path / "a")
        p2 = generate_cohort(cfg, tmp_path / "b")
        for rec1, rec2 in zip(parse_manifest(p1).participants,
                              parse_manifest(p2).participants):
            b1 = open(rec1.recordings[0], "rb").read()
            b2 = open(rec2.recordings[0], "rb").read()
            assert b1 == b2

    def test_config_validation(self):
        with pytest.raises(ValueError):
            CohortConfig(0, 5)
        with pytest.raises(ValueError):
            CohortConfig(5, 5, effect_size=1.5)


class TestEffectSizeMonotonicity:
    def test_full_effect_at_least_as_separable_as_quarter(self, tmp_path):
        pipeline = PipelineConfig(
            clip_duration_s=5.0, clip_count=3, feature_set="egemaps-lite",
            model_type="mlp", hidden_dim=16,
            train=TrainConfig(learning_rate=0.01, epochs=60, batch_size=8),
            k_folds=4)
        acc = {}
        for d in (0.25, 1.0):
            path = generate_cohort(
                CohortConfig(8, 8, effect_size=d, recording_duration_s=60.0,
                             seed=21),
                tmp_path / f"d{d}")
            report = run_cross_validation(parse_manifest(path), pipeline, seed=3)
            acc[d] = report["metrics"]["accuracy"]
        assert acc[1.0] >= acc[0.25]

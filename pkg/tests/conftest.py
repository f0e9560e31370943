"""Shared fixtures and signal builders for the test suite."""

import numpy as np
import pytest

from voicescreen.audio_io import AudioBuffer
from voicescreen.cohort import CohortConfig, VoiceParams, generate_cohort, synth_voice

RATE = 16000


def sine(freq_hz, duration_s=1.0, amp=1.0, rate=RATE, phase=0.0):
    t = np.arange(int(round(duration_s * rate))) / rate
    return amp * np.sin(2.0 * np.pi * freq_hz * t + phase)


def sawtooth(freq_hz, duration_s=1.0, amp=1.0, rate=RATE):
    t = np.arange(int(round(duration_s * rate))) / rate
    return amp * (2.0 * ((t * freq_hz) % 1.0) - 1.0)


def pulse_train(period_samples=100, duration_s=2.0, rate=RATE):
    """Ideal unit impulse train with a constant integer period."""
    n = int(round(duration_s * rate))
    x = np.zeros(n)
    x[np.arange(0, n, period_samples)] = 1.0
    return x


def jittered_pulse_train(period_samples=100, jitter_frac=0.02,
                         duration_s=3.0, rate=RATE, seed=3):
    """Impulse train with Gaussian period perturbation, rounded to samples.

    Returns (signal, true_periods) so tests can compare against the exact
    injected perturbation.
    """
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * rate))
    x = np.zeros(n)
    t = 0
    periods = []
    while True:
        p = int(round(period_samples * (1.0 + jitter_frac * rng.normal())))
        if t + p >= n:
            break
        t += p
        periods.append(p)
        x[t] = 1.0
    return x, np.asarray(periods, dtype=np.float64)


def shimmered_pulse_train(period_samples=100, shimmer_frac=0.03,
                          duration_s=3.0, rate=RATE, seed=3):
    """Constant-period impulse train with Gaussian amplitude perturbation."""
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * rate))
    x = np.zeros(n)
    amps = []
    for i in range(0, n, period_samples):
        a = max(0.05, 1.0 + shimmer_frac * rng.normal())
        x[i] = a
        amps.append(a)
    return x, np.asarray(amps)


def vowel(f0=180.0, f0_sd=10.0, jitter=0.01, shimmer=0.02, duration_s=4.0,
          seed=5, pause_rate=0.0, syllable_rate=4.0):
    """Continuous synthetic vowel via the cohort synthesizer."""
    params = VoiceParams(f0, f0_sd, jitter, shimmer, pause_rate, 0.4, syllable_rate)
    return synth_voice(params, duration_s, np.random.default_rng(seed))


def buffer(x, rate=RATE):
    return AudioBuffer(np.asarray(x, dtype=np.float64), rate)


@pytest.fixture(scope="session")
def small_cohort(tmp_path_factory):
    """5+5 participants, 45 s each, full effect; enough for 5-fold CV."""
    out = tmp_path_factory.mktemp("small-cohort")
    cfg = CohortConfig(n_depressed=5, n_healthy=5, effect_size=1.0,
                       recording_duration_s=45.0, seed=11)
    return generate_cohort(cfg, out)

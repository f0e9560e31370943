"""Synthetic voice cohorts.

Source-filter synthesis of vowel-like voices with per-participant parameters
drawn from class-conditional distributions. The effect-size knob ``d`` scales
depressed-like shifts (lower and flatter F0, more jitter/shimmer, more
pauses, slower syllable rate) from none at d=0 to full at d=1; at d=0 the
two labels are generated identically, so any classifier success on a d=0
cohort indicates leakage.

The parameter magnitudes are designed for pipeline validation, not clinical
realism.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from ._rng import derive_rng
from .audio_io import CANONICAL_RATE_HZ, AudioBuffer, write_wav
from .errors import IoFailure

DEPRESSED, HEALTHY = "depressed", "healthy"

# jitter_frac / shimmer_frac specify the expected measured perturbation,
# i.e. mean |x_i - x_{i-1}| / mean x. For i.i.d. Gaussian per-cycle noise
# that statistic equals sigma * 2 / sqrt(pi), so synthesis scales the
# requested fraction by sqrt(pi) / 2 to land on it.
PERTURB_SIGMA_SCALE = float(np.sqrt(np.pi) / 2.0)


@dataclass(frozen=True)
class VoiceParams:
    f0_mean_hz: float
    f0_sd_hz: float
    jitter_frac: float
    shimmer_frac: float
    pause_rate_per_s: float
    mean_pause_s: float
    syllable_rate_per_s: float
    formants: tuple = ((500.0, 150.0), (1500.0, 200.0), (2500.0, 250.0))
    noise_floor_db: float = -50.0

    def __post_init__(self):
        if not 70.0 <= self.f0_mean_hz <= 400.0:
            raise ValueError("f0_mean_hz outside [70, 400]")
        if not (0.0 <= self.jitter_frac <= 0.1 and 0.0 <= self.shimmer_frac <= 0.1):
            raise ValueError("jitter/shimmer fraction outside [0, 0.1]")
        centers = [f for f, _ in self.formants]
        if centers != sorted(centers):
            raise ValueError("formant centers must ascend")


@dataclass(frozen=True)
class CohortConfig:
    n_depressed: int
    n_healthy: int
    effect_size: float = 1.0
    recording_duration_s: float = 120.0
    sample_rate_hz: int = CANONICAL_RATE_HZ
    seed: int = 0

    def __post_init__(self):
        if self.n_depressed < 1 or self.n_healthy < 1:
            raise ValueError("cohort needs >= 1 participant per class")
        if not 0.0 <= self.effect_size <= 1.0:
            raise ValueError("effect_size must lie in [0, 1]")


def class_params(label: str, d: float, rng: np.random.Generator) -> VoiceParams:
    """Draw one participant's voice parameters.

    The healthy baseline is drawn first; the depressed-like shift is then
    applied scaled by ``d``. Healthy participants always get shift 0, so at
    d=0 both labels reduce to the identical baseline distribution.
    """
    base_f0 = float(np.clip(rng.normal(190.0, 20.0), 120.0, 320.0))
    base_f0_sd = float(np.clip(rng.normal(20.0, 4.0), 5.0, 40.0))
    base_jitter = float(np.clip(rng.normal(0.008, 0.0015), 0.002, 0.03))
    base_shimmer = float(np.clip(rng.normal(0.025, 0.004), 0.005, 0.06))
    base_pause = float(np.clip(rng.normal(0.3, 0.05), 0.1, 0.6))
    base_syll = float(np.clip(rng.normal(4.0, 0.4), 2.5, 6.0))

    s = d if label == DEPRESSED else 0.0
    return VoiceParams(
        f0_mean_hz=base_f0 * (1.0 - 0.12 * s),
        f0_sd_hz=base_f0_sd * (1.0 - 0.4 * s),
        jitter_frac=min(0.1, base_jitter + 0.015 * s),
        shimmer_frac=min(0.1, base_shimmer + 0.020 * s),
        pause_rate_per_s=base_pause * (1.0 + 0.8 * s),
        mean_pause_s=0.4,
        syllable_rate_per_s=base_syll * (1.0 - 0.2 * s),
    )


def _resonator_coeffs(center_hz, bandwidth_hz, rate):
    r = np.exp(-np.pi * bandwidth_hz / rate)
    theta = 2.0 * np.pi * center_hz / rate
    a = [1.0, -2.0 * r * np.cos(theta), r * r]
    return [1.0 - r], a


def synth_voice(params: VoiceParams, duration_s: float,
                rng: np.random.Generator, sample_rate_hz: int = CANONICAL_RATE_HZ) -> AudioBuffer:
    """Render one recording from voice parameters.

    Pipeline: jittered/shimmered impulse train at a slowly wandering F0,
    cascade of three two-pole formant resonators, syllabic amplitude
    modulation, pause insertion, additive noise floor, peak-normalize to 0.9.
    Pulses are placed with two-tap fractional delay so sub-sample period
    structure survives synthesis.
    """
    if duration_s < 2.0:
        raise ValueError("duration must be >= 2 s")
    rate = sample_rate_hz
    n = int(round(duration_s * rate))

    # slow F0 wander: smoothed random walk scaled to the requested sd
    n_ctrl = max(4, int(duration_s * 2))
    wander = np.cumsum(rng.normal(0.0, 1.0, n_ctrl))
    wander -= wander.mean()
    if np.std(wander) > 0:
        wander *= params.f0_sd_hz / np.std(wander)
    f0_track = np.interp(np.arange(n) / rate,
                         np.linspace(0.0, duration_s, n_ctrl), wander) + params.f0_mean_hz
    f0_track = np.clip(f0_track, 60.0, 480.0)

    # glottal pulse train with per-cycle perturbations
    source = np.zeros(n + 2)
    t = 0.0
    while True:
        f0_here = f0_track[min(int(t), n - 1)]
        period = rate / f0_here * (
            1.0 + params.jitter_frac * PERTURB_SIGMA_SCALE * rng.normal())
        t += max(period, rate / 500.0)
        if t >= n:
            break
        amp = max(0.05, 1.0 + params.shimmer_frac * PERTURB_SIGMA_SCALE * rng.normal())
        i = int(t)
        frac = t - i
        source[i] += amp * (1.0 - frac)
        source[i + 1] += amp * frac
    source = source[:n]

    voice = source
    for center, bw in params.formants:
        b, a = _resonator_coeffs(center, bw, rate)
        voice = lfilter(b, a, voice)

    # syllabic AM: raised cosine, never fully closing the envelope
    syll_phase = 2.0 * np.pi * params.syllable_rate_per_s * np.arange(n) / rate
    envelope = 0.6 + 0.4 * np.cos(syll_phase + rng.uniform(0, 2 * np.pi))
    voice *= envelope

    # pauses as a Poisson process with 20 ms ramps
    gate = np.ones(n)
    if params.pause_rate_per_s > 0:
        t_s = 0.0
        while True:
            t_s += rng.exponential(1.0 / params.pause_rate_per_s)
            if t_s >= duration_s:
                break
            pause_len = rng.exponential(params.mean_pause_s)
            i0, i1 = int(t_s * rate), min(n, int((t_s + pause_len) * rate))
            if i1 > i0:
                gate[i0:i1] = 0.0
        ramp = int(0.02 * rate)
        if ramp > 1:
            kernel = np.hanning(2 * ramp + 1)
            gate = np.convolve(gate, kernel / kernel.sum(), mode="same")
    voice *= gate

    # fix the voiced level before adding noise so noise_floor_db is meaningful
    level = np.sqrt(np.mean(voice[gate > 0.5] ** 2)) if np.any(gate > 0.5) else 0.0
    if level > 0:
        voice *= 0.2 / level
    noise = rng.normal(0.0, 1.0, n) * 10 ** (params.noise_floor_db / 20.0)
    voice = voice + noise
    peak = np.max(np.abs(voice))
    if peak > 0:
        voice *= 0.9 / peak
    return AudioBuffer(voice, rate)


@dataclass(frozen=True)
class GeneratedCohort:
    manifest_path: str
    participant_ids: list = field(default_factory=list)


def generate_cohort(cfg: CohortConfig, out_dir) -> str:
    """Write one WAV per participant plus a dataset manifest; returns its path.

    Deterministic per seed: every participant draws from an independent
    generator derived from (seed, participant id).
    """
    try:
        os.makedirs(out_dir, exist_ok=True)
        participants = []
        labels = [(DEPRESSED, i) for i in range(cfg.n_depressed)] + \
                 [(HEALTHY, i) for i in range(cfg.n_healthy)]
        for label, i in labels:
            pid = f"{'d' if label == DEPRESSED else 'h'}{i:03d}"
            rng = derive_rng(cfg.seed, "participant", pid)
            params = class_params(label, cfg.effect_size, rng)
            buf = synth_voice(params, cfg.recording_duration_s, rng, cfg.sample_rate_hz)
            wav_name = f"{pid}.wav"
            write_wav(os.path.join(out_dir, wav_name), buf)
            participants.append({
                "id": pid, "label": label, "scenario": "synthetic",
                "recordings": [wav_name],
            })
        manifest = {"version": 1, "participants": participants,
                    "generator": {"seed": cfg.seed, "effect_size": cfg.effect_size,
                                  "recording_duration_s": cfg.recording_duration_s}}
        manifest_path = os.path.join(out_dir, "manifest.json")
        tmp = manifest_path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
        os.replace(tmp, manifest_path)
        return manifest_path
    except OSError as exc:
        raise IoFailure(str(exc)) from exc

"""Voiced-region detection and random T-second clip sampling.

A sliding 1 s grid of candidate windows is built over each recording; the
windows with enough voiced coverage form the candidate set, and N of them are
drawn at random. Sampling is deterministic: each recording gets its own
generator derived from (seed, participant_id, recording_id).
"""

from dataclasses import dataclass, field

import numpy as np

from ._rng import derive_rng
from .audio_io import AudioBuffer, frame_signal
from .errors import InsufficientAudio, InsufficientVoiced
from .lld import energy_rms_db

VAD_FRAME_MS = 25.0
VAD_HOP_MS = 10.0
SILENCE_GATE_DBFS = -60.0  # absolute gate so digital silence never activates


@dataclass(frozen=True)
class VoicedRegion:
    start_s: float
    end_s: float


@dataclass(frozen=True)
class ClipSamplingConfig:
    clip_duration_s: float  # T
    clip_count: int  # N
    seed: int = 0
    min_voiced_ratio: float = 0.5
    allow_overlap: bool = False

    def __post_init__(self):
        if self.clip_duration_s <= 0:
            raise ValueError("clip_duration_s must be positive")
        if self.clip_count < 1:
            raise ValueError("clip_count must be >= 1")


@dataclass(frozen=True)
class Clip:
    participant_id: str
    recording_id: str
    start_s: float
    buffer: AudioBuffer
    overlap_flag: bool = field(default=False)


def detect_voiced_regions(buf: AudioBuffer, threshold_db: float = -25.0,
                          min_region_ms: float = 100.0) -> list[VoicedRegion]:
    """Energy-threshold VAD.

    A 25 ms / 10 ms frame is active iff its RMS level exceeds the recording's
    95th-percentile frame level plus ``threshold_db`` (negative). Adjacent
    active frames merge; regions shorter than ``min_region_ms`` are dropped.
    """
    if len(buf.samples) == 0:
        raise ValueError("empty buffer")
    try:
        frames = frame_signal(buf, VAD_FRAME_MS, VAD_HOP_MS)
    except Exception:
        return []
    levels = energy_rms_db(frames.frames)
    ref = np.percentile(levels, 95)
    active = (levels > ref + threshold_db) & (levels > SILENCE_GATE_DBFS)

    hop_s = VAD_HOP_MS / 1000.0
    center0 = VAD_FRAME_MS / 2000.0
    regions = []
    run_start = None
    for i, a in enumerate([*active, False]):
        if a and run_start is None:
            run_start = i
        elif not a and run_start is not None:
            n_active = i - run_start
            if n_active * VAD_HOP_MS >= min_region_ms:
                start = center0 + run_start * hop_s - hop_s / 2
                end = center0 + (i - 1) * hop_s + hop_s / 2
                regions.append(VoicedRegion(max(0.0, start), min(buf.duration_s, end)))
            run_start = None
    return regions


def voiced_coverage(regions, start_s: float, duration_s: float) -> float:
    """Fraction of [start, start+duration] covered by voiced regions."""
    covered = 0.0
    for r in regions:
        covered += max(0.0, min(r.end_s, start_s + duration_s) - max(r.start_s, start_s))
    return covered / duration_s


def sample_clips(buf: AudioBuffer, regions, cfg: ClipSamplingConfig,
                 participant_id: str = "", recording_id: str = "") -> list[Clip]:
    """Draw exactly N clips of exactly T seconds from one recording.

    Candidate starts sit on a 1 s grid and must meet ``min_voiced_ratio``.
    Starts are drawn without replacement; when overlap is disallowed but N
    disjoint candidates do not exist, overlapping picks are used as fallback
    and every returned clip carries ``overlap_flag=True``.
    """
    T = cfg.clip_duration_s
    duration = buf.duration_s
    if duration < T:
        raise InsufficientAudio(
            f"{recording_id or 'recording'}: {duration:.1f}s < clip duration {T:.1f}s")

    max_start = int(np.floor(duration - T))
    candidates = [s for s in range(max_start + 1)
                  if voiced_coverage(regions, s, T) >= cfg.min_voiced_ratio]
    if not candidates:
        raise InsufficientVoiced(
            f"{recording_id or 'recording'}: no {T:.0f}s window reaches "
            f"voiced ratio {cfg.min_voiced_ratio}")

    rng = derive_rng(cfg.seed, participant_id, recording_id)
    shuffled = [candidates[i] for i in rng.permutation(len(candidates))]

    flagged = False
    if cfg.allow_overlap:
        starts = shuffled[:cfg.clip_count]
    else:
        starts = []
        for s in shuffled:
            if all(abs(s - t) >= T for t in starts):
                starts.append(s)
            if len(starts) == cfg.clip_count:
                break
        if len(starts) < cfg.clip_count:
            starts = shuffled[:cfg.clip_count]
            flagged = True
    if len(starts) < cfg.clip_count:
        # fewer candidates than N: reuse starts (with replacement) as last resort
        extra = rng.choice(len(shuffled), size=cfg.clip_count - len(starts))
        starts = starts + [shuffled[i] for i in extra]
        flagged = True

    n_clip = round(T * buf.sample_rate_hz)
    clips = []
    for s in starts:
        i0 = int(round(s * buf.sample_rate_hz))
        seg = AudioBuffer(buf.samples[i0:i0 + n_clip], buf.sample_rate_hz)
        clips.append(Clip(participant_id, recording_id, float(s), seg, flagged))
    return clips

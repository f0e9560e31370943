"""WAV loading, normalization, resampling, and framing.

Everything downstream consumes a mono :class:`AudioBuffer` at the canonical
16 kHz rate. Only RIFF/WAVE containers with PCM 16-bit or IEEE float 32-bit
payloads are accepted; compressed codecs are out of scope.
"""

import os
import struct
from dataclasses import dataclass

import numpy as np
from scipy.signal import resample_poly

from .errors import AudioTooShort, EmptyAudio, MalformedHeader, UnsupportedEncoding

CANONICAL_RATE_HZ = 16000

_FMT_PCM = 1
_FMT_IEEE_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio: float samples in [-1, 1] plus a sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True)
class FrameSequence:
    """Fixed-length analysis windows cut from one buffer."""

    frames: np.ndarray  # shape (n_frames, frame_len)
    frame_len_ms: float
    hop_ms: float

    @property
    def frame_rate_hz(self) -> float:
        return 1000.0 / self.hop_ms

    def __len__(self) -> int:
        return self.frames.shape[0]


def load_wav(path) -> AudioBuffer:
    """Load a RIFF/WAVE file as a mono AudioBuffer.

    Channels are averaged to mono; PCM16 samples are scaled by 1/32768 so the
    full integer range maps symmetrically into [-1, 1].
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedHeader(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise MalformedHeader(f"{path}: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise MalformedHeader(f"{path}: missing fmt or data chunk")

    audio_format, n_channels, sample_rate, _, _, bits = fmt
    if audio_format == _FMT_EXTENSIBLE:
        raise UnsupportedEncoding(f"{path}: WAVE_FORMAT_EXTENSIBLE not supported")
    if audio_format == _FMT_PCM and bits == 16:
        raw = np.frombuffer(payload, dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif audio_format == _FMT_IEEE_FLOAT and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedEncoding(
            f"{path}: format {audio_format} / {bits}-bit not supported"
        )

    if samples.size == 0:
        raise EmptyAudio(f"{path}: data chunk holds zero samples")
    if n_channels > 1:
        samples = samples[: (samples.size // n_channels) * n_channels]
        samples = samples.reshape(-1, n_channels).mean(axis=1)
    return AudioBuffer(samples, sample_rate)


def write_wav(path, buf: AudioBuffer) -> None:
    """Write a buffer as mono PCM16, atomically (write temp then rename)."""
    clipped = np.clip(buf.samples, -1.0, 1.0)
    # same 1/32768 step the loader divides by, so a round trip only costs
    # half an LSB of rounding
    pcm = np.clip(np.round(clipped * 32768.0), -32768, 32767).astype("<i2").tobytes()
    header = b"".join([
        b"RIFF", struct.pack("<I", 36 + len(pcm)), b"WAVE",
        b"fmt ", struct.pack("<IHHIIHH", 16, _FMT_PCM, 1, buf.sample_rate_hz,
                             buf.sample_rate_hz * 2, 2, 16),
        b"data", struct.pack("<I", len(pcm)),
    ])
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(pcm)
    os.replace(tmp, path)


def resample(buf: AudioBuffer, target_hz: int) -> AudioBuffer:
    """Band-limited resampling (polyphase, Kaiser-windowed sinc)."""
    if target_hz <= 0:
        raise ValueError("target_hz must be positive")
    if target_hz == buf.sample_rate_hz:
        return buf
    g = np.gcd(target_hz, buf.sample_rate_hz)
    up, down = target_hz // g, buf.sample_rate_hz // g
    out = resample_poly(buf.samples, up, down, window=("kaiser", 8.6))
    return AudioBuffer(out, target_hz)


def frame_signal(buf: AudioBuffer, frame_len_ms: float, hop_ms: float) -> FrameSequence:
    """Cut left-to-right fixed-length frames; the trailing partial is dropped."""
    if not frame_len_ms >= hop_ms > 0:
        raise ValueError("need frame_len_ms >= hop_ms > 0")
    frame_len = round(frame_len_ms / 1000.0 * buf.sample_rate_hz)
    hop = round(hop_ms / 1000.0 * buf.sample_rate_hz)
    n = len(buf.samples)
    if n < frame_len:
        raise AudioTooShort(f"{n} samples < one {frame_len}-sample frame")
    n_frames = (n - frame_len) // hop + 1
    idx = np.arange(frame_len)[None, :] + hop * np.arange(n_frames)[:, None]
    return FrameSequence(buf.samples[idx], frame_len_ms, hop_ms)

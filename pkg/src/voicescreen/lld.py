"""Per-frame low-level descriptors.

F0 and HNR come from a normalized-cross-correlation pitch tracker on
40 ms / 10 ms frames; spectral and energy descriptors use 25 ms / 10 ms
frames. Jitter and shimmer are derived from per-cycle periods and peak
amplitudes found by peak-picking between pitch-predicted epochs.

Voiced-only descriptors carry NaN on unvoiced frames; functionals downstream
skip NaN rather than zero-filling.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft
from scipy.signal import savgol_filter

from .audio_io import AudioBuffer, frame_signal
from .errors import (
    FrameTooShort,
    NonPositiveAmplitude,
    SilentFrame,
    TooFewPeriods,
    UnvoicedFrame,
)

SPEC_FRAME_MS = 25.0
F0_FRAME_MS = 40.0
HOP_MS = 10.0
F0_MIN_HZ = 55.0
F0_MAX_HZ = 500.0
VOICING_THRESHOLD = 0.45
OCTAVE_GUARD = 0.85  # prefer smallest lag whose peak >= this fraction of the max
RMS_DB_FLOOR = -120.0
SILENT_RMS = 1e-6
MEL_FILTERS = 26
MEL_FMAX_HZ = 8000.0
LOG_FLOOR = 1e-10
EPOCH_ENERGY_WIN_S = 0.00125  # energy integration window for cycle epochs


# ---------------------------------------------------------------------------
# energy / ZCR

def energy_rms_db(frames) -> np.ndarray | float:
    """RMS level in dBFS, floored at -120 dB. Works on 1-D or 2-D input."""
    x = np.asarray(frames, dtype=np.float64)
    rms = np.sqrt(np.mean(x * x, axis=-1))
    db = 20.0 * np.log10(np.maximum(rms, 10 ** (RMS_DB_FLOOR / 20.0)))
    return db if x.ndim > 1 else float(db)


def zcr(frame, sample_rate_hz: int) -> np.ndarray | float:
    """Zero crossings per second."""
    x = np.asarray(frame, dtype=np.float64)
    nonneg = x >= 0
    crossings = np.count_nonzero(nonneg[..., 1:] != nonneg[..., :-1], axis=-1)
    rate = crossings * sample_rate_hz / (x.shape[-1] - 1)
    return rate if x.ndim > 1 else float(rate)


# ---------------------------------------------------------------------------
# pitch

def _nccf(frames: np.ndarray) -> np.ndarray:
    """Normalized cross-correlation of each frame with itself at every lag."""
    n, N = frames.shape
    nfft = 1 << int(np.ceil(np.log2(2 * N)))
    spec = np.fft.rfft(frames, nfft)
    raw = np.fft.irfft(np.abs(spec) ** 2, nfft)[:, :N]
    csum = np.concatenate([np.zeros((n, 1)), np.cumsum(frames ** 2, axis=1)], axis=1)
    lags = np.arange(N)
    e_head = csum[:, N - lags]          # energy of x[0 : N-lag]
    e_tail = csum[:, N] [:, None] - csum[:, lags]  # energy of x[lag : N]
    return raw / np.sqrt(e_head * e_tail + 1e-30)


def _parabolic_delta(y1, y2, y3):
    denom = y1 - 2.0 * y2 + y3
    # treat a numerically flat neighborhood as an exact peak; otherwise
    # rounding dust in the three samples yields a spurious sub-sample shift
    scale = np.maximum(np.abs(y1), np.maximum(np.abs(y2), np.abs(y3)))
    flat = np.abs(denom) <= 1e-9 * np.maximum(scale, 1e-300)
    delta = np.where(flat, 0.0, 0.5 * (y1 - y3) / np.where(denom == 0, 1, denom))
    return np.clip(delta, -0.5, 0.5)


def f0_contour(frames: np.ndarray, sample_rate_hz: int,
               fmin: float = F0_MIN_HZ, fmax: float = F0_MAX_HZ):
    """Vectorized pitch track over a frame matrix.

    Returns (is_voiced, f0_hz, peak_r): booleans, Hz (NaN when unvoiced) and
    the refined correlation peak value used for voicing and HNR.
    """
    frames = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    N = frames.shape[1]
    if N < sample_rate_hz / fmin:
        raise FrameTooShort(
            f"{N} samples cannot hold one period at {fmin:.0f} Hz")
    r = _nccf(frames)
    lmin = max(2, int(np.ceil(sample_rate_hz / fmax)))
    lmax = min(N - 2, int(sample_rate_hz // fmin))
    window = r[:, lmin:lmax + 1]

    local_max = (window >= r[:, lmin - 1:lmax]) & (window >= r[:, lmin + 1:lmax + 2])
    gmax = window.max(axis=1)
    qualifies = local_max & (window >= OCTAVE_GUARD * gmax[:, None])
    has_peak = qualifies.any(axis=1)
    idx = np.where(has_peak, np.argmax(qualifies, axis=1), np.argmax(window, axis=1))
    lag0 = lmin + idx

    rows = np.arange(frames.shape[0])
    y1, y2, y3 = r[rows, lag0 - 1], r[rows, lag0], r[rows, lag0 + 1]
    delta = _parabolic_delta(y1, y2, y3)
    peak_r = y2 - 0.25 * (y1 - y3) * delta
    lag = lag0 + delta

    silent = energy_rms_db(frames) <= RMS_DB_FLOOR + 1.0
    is_voiced = (peak_r >= VOICING_THRESHOLD) & ~np.asarray(silent, dtype=bool)
    f0 = np.where(is_voiced, sample_rate_hz / lag, np.nan)
    return is_voiced, f0, peak_r


def f0_autocorr(frame, sample_rate_hz: int,
                fmin: float = F0_MIN_HZ, fmax: float = F0_MAX_HZ):
    """Single-frame pitch estimate: (is_voiced, f0_hz)."""
    voiced, f0, _ = f0_contour(np.atleast_2d(frame), sample_rate_hz, fmin, fmax)
    return bool(voiced[0]), float(f0[0])


def hnr_db(frame, f0_hz: float, sample_rate_hz: int) -> float:
    """Harmonics-to-noise ratio 10*log10(r / (1-r)), clamped to [-20, 40] dB."""
    if not np.isfinite(f0_hz) or f0_hz <= 0:
        raise UnvoicedFrame("hnr_db needs a voiced frame with a valid f0")
    frame = np.asarray(frame, dtype=np.float64)
    r = _nccf(frame[None, :])[0]
    lag0 = int(round(sample_rate_hz / f0_hz))
    lag0 = min(max(lag0, 2), len(r) - 2)
    # refine to the nearest local peak of r around the predicted lag
    lo, hi = max(2, lag0 - 3), min(len(r) - 2, lag0 + 3)
    k = lo + int(np.argmax(r[lo:hi + 1]))
    delta = float(_parabolic_delta(r[k - 1], r[k], r[k + 1]))
    peak = r[k] - 0.25 * (r[k - 1] - r[k + 1]) * delta
    return _r_to_hnr(peak)


def _r_to_hnr(r):
    r = np.clip(r, 1e-4, 1.0 - 1e-4)
    return float(np.clip(10.0 * np.log10(r / (1.0 - r)), -20.0, 40.0))


# ---------------------------------------------------------------------------
# jitter / shimmer

def jitter_local(periods_s) -> float:
    """mean |p_i - p_{i-1}| / mean p."""
    p = np.asarray(periods_s, dtype=np.float64)
    if p.size < 2:
        raise TooFewPeriods("jitter needs at least 2 periods")
    return float(np.mean(np.abs(np.diff(p))) / np.mean(p))


def shimmer_local(peak_amplitudes) -> float:
    """mean |a_i - a_{i-1}| / mean a."""
    a = np.asarray(peak_amplitudes, dtype=np.float64)
    if a.size < 2:
        raise TooFewPeriods("shimmer needs at least 2 amplitudes")
    if np.any(a <= 0):
        raise NonPositiveAmplitude("peak amplitudes must be positive")
    return float(np.mean(np.abs(np.diff(a))) / np.mean(a))


@dataclass(frozen=True)
class CycleChain:
    """Consecutive glottal-cycle epochs with no voicing gap.

    Epochs are kept in fractional sample units; differencing before the
    unit conversion keeps constant periods bit-identical, so an ideal
    pulse train measures exactly zero jitter.
    """

    epochs: np.ndarray  # fractional sample positions
    amplitudes: np.ndarray
    sample_rate_hz: int

    @property
    def epochs_s(self) -> np.ndarray:
        return self.epochs / self.sample_rate_hz

    @property
    def periods_s(self) -> np.ndarray:
        return np.diff(self.epochs) / self.sample_rate_hz


def extract_cycles(samples: np.ndarray, sample_rate_hz: int,
                   f0_hz: np.ndarray, hop_s: float, first_center_s: float,
                   min_peak: float = 1e-4) -> list[CycleChain]:
    """Pick one excitation epoch per glottal cycle between pitch-predicted positions.

    ``f0_hz`` is the per-frame pitch contour (NaN on unvoiced frames). Each
    voicing gap starts a new chain so periods are never measured across it.

    Epochs are located on a short-window energy envelope, which merges the
    ringing lobes of formant resonances into one bump per glottal cycle;
    peak-picking on the raw waveform mis-locks onto half-cycle ringing lobes.
    The position is refined by parabolic interpolation of the envelope. The
    cycle amplitude is the root energy integrated over one period around the
    epoch, which is insensitive to where the pulse falls between samples;
    a peak read off the discrete envelope ripples with that sub-sample
    phase and the ripple reads as shimmer.
    """
    x = np.abs(np.asarray(samples, dtype=np.float64))
    n = len(x)
    n_frames = len(f0_hz)

    if not np.any(np.isfinite(f0_hz)):
        return []
    # A fixed short window merges formant ringing lobes into one bump per
    # cycle without tracking the pitch; tying the width to the period can
    # flatten the bump top when it matches a formant ringing period.
    win = max(3, int(round(EPOCH_ENERGY_WIN_S * sample_rate_hz)))
    kernel = np.ones(win) / win
    xsq = x * x
    energy = np.convolve(xsq, kernel, mode="same")
    cum = np.concatenate([[0.0], np.cumsum(xsq)])

    def cum_energy(t):
        """Energy integral of the signal over [0, t), fractional samples."""
        t = np.clip(t, 0.0, float(n))
        i = np.floor(t).astype(int)
        i = np.minimum(i, n - 1)
        return cum[i] + (t - i) * xsq[i]

    def f0_at(t_s):
        i = int(round((t_s - first_center_s) / hop_s))
        if 0 <= i < n_frames and np.isfinite(f0_hz[i]):
            return f0_hz[i]
        return None

    def locate(lo, hi):
        """Sub-sample epoch position and cycle amplitude in [lo, hi)."""
        i = lo + int(np.argmax(energy[lo:hi]))
        pos = float(i)
        if 1 <= i < n - 1:
            y1, y2, y3 = energy[i - 1], energy[i], energy[i + 1]
            denom = y1 - 2.0 * y2 + y3
            if abs(denom) > 1e-9 * max(abs(y1), abs(y2), abs(y3), 1e-300):
                pos += min(0.5, max(-0.5, 0.5 * (y1 - y3) / denom))
        return pos, float(np.sqrt(win * energy[i]))

    chains: list[CycleChain] = []
    epochs: list[float] = []
    amps: list[float] = []

    def close_chain():
        nonlocal epochs, amps
        if len(epochs) >= 2:
            e = np.asarray(epochs)
            p = np.diff(e)
            p_own = np.append(p, p[-1])  # the last epoch reuses its period
            cycle_energy = cum_energy(e + 0.7 * p_own) - cum_energy(e - 0.3 * p_own)
            chains.append(CycleChain(e, np.sqrt(np.maximum(cycle_energy, 0.0)),
                                     sample_rate_hz))
        epochs, amps = [], []

    frame_i = 0
    pos = None  # current epoch, fractional samples
    while True:
        if pos is None:
            # seed a chain at the next voiced frame
            while frame_i < n_frames and not np.isfinite(f0_hz[frame_i]):
                frame_i += 1
            if frame_i >= n_frames:
                break
            center = int(round((first_center_s + frame_i * hop_s) * sample_rate_hz))
            period = sample_rate_hz / f0_hz[frame_i]
            lo = max(0, int(center - period / 2))
            hi = min(n, int(center + period / 2) + 1)
            if hi <= lo:
                frame_i += 1
                continue
            pos, amp = locate(lo, hi)
            if amp < min_peak:
                frame_i += 1
                continue
            epochs, amps = [pos], [amp]
            continue

        f0_here = f0_at(pos / sample_rate_hz)
        if f0_here is None:
            close_chain()
            frame_i = int(np.ceil((pos / sample_rate_hz - first_center_s) / hop_s)) + 1
            pos = None
            continue
        period = sample_rate_hz / f0_here
        if len(epochs) >= 2:
            # trust the chain over the contour: an occasional subharmonic
            # pitch estimate would otherwise double the search window and
            # skip every other pulse
            last_period = epochs[-1] - epochs[-2]
            period = float(np.clip(period, 0.75 * last_period, 1.35 * last_period))
        lo = int(np.floor(pos + 0.7 * period))
        hi = int(np.ceil(pos + 1.3 * period)) + 1
        if hi > n:
            close_chain()
            break
        new_pos, amp = locate(lo, hi)
        if amp < min_peak:
            close_chain()
            frame_i = int(np.ceil((pos / sample_rate_hz - first_center_s) / hop_s)) + 1
            pos = None
            continue
        pos = new_pos
        epochs.append(pos)
        amps.append(amp)

    close_chain()
    return chains


def measure_jitter(chains) -> float:
    """Clip-level jitter pooled over all chains with >= 2 periods."""
    diffs, periods = [], []
    for c in chains:
        p = c.periods_s
        if p.size >= 2:
            diffs.append(np.abs(np.diff(p)))
            periods.append(p)
    if not periods:
        raise TooFewPeriods("no chain long enough to measure jitter")
    return float(np.mean(np.concatenate(diffs)) / np.mean(np.concatenate(periods)))


def _detrend_amplitudes(a: np.ndarray, span: int = 7) -> np.ndarray:
    """Divide out the slow amplitude envelope (syllabic modulation).

    A local-quadratic (Savitzky-Golay) fit over ``span`` cycles tracks
    prosodic amplitude drift, which would otherwise read as shimmer, while
    leaving white cycle-to-cycle variation nearly unbiased. A constant
    sequence maps to exactly 1.
    """
    if a.size < span or np.all(a == a[0]):
        return a / np.mean(a)
    # fit the trend on log amplitudes so the correction is multiplicative
    # and the detrended sequence stays strictly positive
    log_a = np.log(a)
    trend = savgol_filter(log_a, span, 2)
    return np.exp(log_a - trend)


def measure_shimmer(chains) -> float:
    """Clip-level shimmer on envelope-detrended cycle amplitudes."""
    diffs, amps = [], []
    for c in chains:
        if c.amplitudes.size >= 2 and np.all(c.amplitudes > 0):
            a = _detrend_amplitudes(c.amplitudes)
            diffs.append(np.abs(np.diff(a)))
            amps.append(a)
    if not amps:
        raise TooFewPeriods("no chain long enough to measure shimmer")
    return float(np.mean(np.concatenate(diffs)) / np.mean(np.concatenate(amps)))


# ---------------------------------------------------------------------------
# MFCC

def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m) / 2595.0) - 1.0)


_MEL_CACHE: dict = {}


def mel_filterbank(nfft: int, sample_rate_hz: int, n_filters: int = MEL_FILTERS,
                   fmax: float = MEL_FMAX_HZ) -> np.ndarray:
    key = (nfft, sample_rate_hz, n_filters, fmax)
    if key not in _MEL_CACHE:
        edges_hz = _mel_to_hz(np.linspace(_hz_to_mel(0.0), _hz_to_mel(fmax), n_filters + 2))
        bin_hz = np.fft.rfftfreq(nfft, 1.0 / sample_rate_hz)
        bank = np.zeros((n_filters, len(bin_hz)))
        for j in range(n_filters):
            left, center, right = edges_hz[j], edges_hz[j + 1], edges_hz[j + 2]
            up = (bin_hz - left) / (center - left)
            down = (right - bin_hz) / (right - center)
            bank[j] = np.maximum(0.0, np.minimum(up, down))
        _MEL_CACHE[key] = bank
    return _MEL_CACHE[key]


def mfcc(frame, sample_rate_hz: int, n_coeffs: int = 13) -> np.ndarray:
    """Mel-frequency cepstral coefficients, c0 first.

    Hamming window, power spectrum at the next power-of-two FFT size,
    26 triangular mel filters up to 8 kHz, log floor 1e-10, orthonormal
    DCT-II.
    """
    x = np.atleast_2d(np.asarray(frame, dtype=np.float64))
    N = x.shape[1]
    if N < 32:
        raise FrameTooShort(f"mfcc needs >= 32 samples, got {N}")
    nfft = 1 << int(np.ceil(np.log2(N)))
    windowed = x * np.hamming(N)
    power = np.abs(np.fft.rfft(windowed, nfft)) ** 2
    mel = power @ mel_filterbank(nfft, sample_rate_hz).T
    logmel = np.log(np.maximum(mel, LOG_FLOOR))
    coeffs = scipy.fft.dct(logmel, type=2, norm="ortho", axis=1)[:, :n_coeffs]
    return coeffs if np.ndim(frame) > 1 else coeffs[0]


# ---------------------------------------------------------------------------
# spectral balance

def _spectral_batch(frames: np.ndarray, sample_rate_hz: int) -> dict:
    """Spectral descriptors for a frame matrix; silent frames come out NaN."""
    N = frames.shape[1]
    nfft = 1 << int(np.ceil(np.log2(N)))
    windowed = frames * np.hamming(N)
    mag = np.abs(np.fft.rfft(windowed, nfft))
    freqs = np.fft.rfftfreq(nfft, 1.0 / sample_rate_hz)
    power = mag ** 2
    db = 20.0 * np.log10(np.maximum(mag, 1e-12))

    centroid = (mag @ freqs) / np.maximum(mag.sum(axis=1), 1e-30)

    def band(lo, hi):
        return (freqs >= lo) & (freqs < hi)

    def fit_slope(mask):
        f = freqs[mask]
        y = db[:, mask]
        fc = f - f.mean()
        return (y @ fc) / np.sum(fc * fc)

    slope_low = fit_slope(band(0.0, 500.0))
    slope_mid = fit_slope(band(500.0, 1500.0))

    e_low = power[:, band(50.0, 1000.0)].sum(axis=1)
    e_high = power[:, band(1000.0, 5000.0)].sum(axis=1)
    alpha = 10.0 * np.log10(np.maximum(e_high, 1e-30) / np.maximum(e_low, 1e-30))

    hamm = db[:, band(0.0, 2000.0)].max(axis=1) - db[:, band(2000.0, 5000.0)].max(axis=1)

    silent = np.sqrt(np.mean(frames ** 2, axis=1)) <= SILENT_RMS
    out = {"centroid": centroid, "slope_0_500": slope_low, "slope_500_1500": slope_mid,
           "alpha_ratio": alpha, "hammarberg": hamm}
    for k in out:
        out[k] = np.where(silent, np.nan, out[k])
    return out


def spectral_descriptors(frame, sample_rate_hz: int) -> dict:
    """Centroid, band slopes, alpha ratio, Hammarberg index for one frame."""
    x = np.asarray(frame, dtype=np.float64)
    if np.sqrt(np.mean(x * x)) <= SILENT_RMS:
        raise SilentFrame("spectral descriptors undefined for a silent frame")
    batch = _spectral_batch(x[None, :], sample_rate_hz)
    return {k: float(v[0]) for k, v in batch.items()}


# ---------------------------------------------------------------------------
# whole-clip analysis

@dataclass(frozen=True)
class LldContour:
    name: str
    values: np.ndarray  # NaN = missing
    frame_rate_hz: float


@dataclass(frozen=True)
class ClipAnalysis:
    """All LLD contours for one clip, keyed by descriptor name."""

    contours: dict
    voiced: np.ndarray      # per pitch frame
    chains: list
    frame_rate_hz: float

    def contour(self, name: str) -> np.ndarray:
        return self.contours[name]


def _median_smooth_f0(f0: np.ndarray, width: int = 5) -> np.ndarray:
    """5-point median over voiced frames only; suppresses octave outliers."""
    out = f0.copy()
    idx = np.nonzero(np.isfinite(f0))[0]
    if idx.size < width:
        return out
    vals = f0[idx]
    half = width // 2
    padded = np.concatenate([vals[:half][::-1], vals, vals[-half:][::-1]])
    windows = np.lib.stride_tricks.sliding_window_view(padded, width)
    out[idx] = np.median(windows, axis=1)
    return out


def _cycle_contours(chains, n_frames: int, hop_s: float, first_center_s: float):
    """Per-frame jitter and shimmer from cycles within 40 ms of each frame center.

    Windowed means come from cumulative sums over each (sorted) epoch chain,
    so the cost is linear in frames + cycles rather than their product.
    """
    jitter = np.full(n_frames, np.nan)
    shimmer = np.full(n_frames, np.nan)
    half_win = 0.04
    centers = first_center_s + hop_s * np.arange(n_frames)
    for chain in chains:
        t = chain.epochs_s
        p = chain.periods_s
        a = chain.amplitudes
        if p.size < 2:
            continue
        lo = np.searchsorted(t, centers - half_win, side="left")
        hi = np.searchsorted(t, centers + half_win, side="right")

        csp = np.concatenate([[0.0], np.cumsum(p)])
        csd = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(p)))])
        # periods indexed by their leading epoch; the window's last epoch
        # starts no period, hence the t.size - 1 cap
        hi_p = np.minimum(hi, t.size - 1)
        n_p = hi_p - lo
        ok = n_p >= 2
        l_s = np.where(ok, lo, 0)
        h_s = np.where(ok, hi_p, 2)
        mean_p = (csp[h_s] - csp[l_s]) / np.maximum(n_p, 2)
        mean_dp = (csd[h_s - 1] - csd[l_s]) / np.maximum(n_p - 1, 1)
        jitter[ok] = (mean_dp / mean_p)[ok]

        if np.all(a > 0):
            csa = np.concatenate([[0.0], np.cumsum(a)])
            csda = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(a)))])
            n_a = hi - lo
            ok_a = ok & (n_a >= 2)
            l_a = np.where(ok_a, lo, 0)
            h_a = np.where(ok_a, hi, 2)
            mean_a = (csa[h_a] - csa[l_a]) / np.maximum(n_a, 2)
            mean_da = (csda[h_a - 1] - csda[l_a]) / np.maximum(n_a - 1, 1)
            shimmer[ok_a] = (mean_da / mean_a)[ok_a]
    return jitter, shimmer


def analyze_clip(buf: AudioBuffer) -> ClipAnalysis:
    """Compute every LLD contour the feature sets consume."""
    rate = buf.sample_rate_hz
    spec_frames = frame_signal(buf, SPEC_FRAME_MS, HOP_MS).frames
    f0_frames = frame_signal(buf, F0_FRAME_MS, HOP_MS).frames
    hop_s = HOP_MS / 1000.0
    f0_center0 = F0_FRAME_MS / 2000.0

    voiced, f0, peak_r = f0_contour(f0_frames, rate)
    f0 = _median_smooth_f0(f0)
    hnr = np.where(voiced, 10.0 * np.log10(
        np.clip(peak_r, 1e-4, 1 - 1e-4) / (1.0 - np.clip(peak_r, 1e-4, 1 - 1e-4))), np.nan)
    hnr = np.clip(hnr, -20.0, 40.0)

    chains = extract_cycles(buf.samples, rate, f0, hop_s, f0_center0)
    jit, shim = _cycle_contours(chains, len(f0), hop_s, f0_center0)
    # voiced-only contours stay missing wherever voicing is off
    for arr in (jit, shim):
        arr[~voiced] = np.nan

    mfccs = mfcc(spec_frames, rate)
    spectral = _spectral_batch(spec_frames, rate)

    contours = {
        "zcr": zcr(spec_frames, rate).astype(np.float64),
        "rms_db": energy_rms_db(spec_frames),
        "f0": f0,
        "log_f0": np.where(voiced, np.log(np.where(voiced, f0, 1.0)), np.nan),
        "hnr": hnr,
        "jitter": jit,
        "shimmer": shim,
    }
    contours.update(spectral)
    for k in range(1, 13):
        contours[f"mfcc_{k}"] = mfccs[:, k]
    # the 25 ms spectral framing can yield one frame more than the 40 ms
    # pitch framing; trim everything to the common length
    n = min(min(len(v) for v in contours.values()), len(voiced))
    contours = {k: v[:n] for k, v in contours.items()}
    return ClipAnalysis(contours=contours, voiced=voiced[:n], chains=chains,
                        frame_rate_hz=1000.0 / HOP_MS)

"""Clip-level feature vectors.

Two hand-crafted sets are computed from LLD contours:

* ``is09``: 16 LLDs (ZCR, RMS energy, F0, HNR, MFCC 1-12) plus their first
  deltas, summarized by 12 functionals each: 384 dims.
* ``egemaps-lite``: 13 LLDs x 5 functionals + 3 temporal statistics:
  68 dims. Inspired by (not identical to) eGeMAPSv02.

Deep embeddings are computed externally and ingested from FVEC files, then
mean-pooled over frames.

Missing (unvoiced) contour values are excluded from functionals. A contour
with no present values at all zero-fills its block and sets the vector's
quality flag.
"""

import struct
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import BadMagic, DimMismatch, EmptyContour, InsufficientVoiced, NonFiniteValue
from .lld import HOP_MS, ClipAnalysis, analyze_clip
from .segmenter import Clip

IS09_DIMS = 384
EGEMAPS_LITE_DIMS = 68

FUNCTIONAL_NAMES = (
    "mean", "std", "skewness", "kurtosis", "min", "max", "range",
    "relpos_min", "relpos_max", "slope", "offset", "mse",
)

IS09_LLDS = ("zcr", "rms_db", "f0", "hnr") + tuple(f"mfcc_{k}" for k in range(1, 13))
EGEMAPS_LITE_LLDS = (
    "log_f0", "rms_db", "jitter", "shimmer", "hnr", "centroid",
    "slope_0_500", "slope_500_1500", "alpha_ratio", "hammarberg",
    "mfcc_1", "mfcc_2", "mfcc_3",
)


@dataclass(frozen=True)
class FeatureVector:
    set_id: str
    values: np.ndarray
    quality_flag: bool = field(default=False)

    @property
    def dims(self) -> int:
        return len(self.values)


def apply_functionals(values) -> np.ndarray:
    """The 12 IS09 functionals over one contour (NaN = missing, excluded).

    Time for the regression functionals is the frame index normalized to
    [0, 1] across the whole contour. Contours with fewer than 2 present
    values report std/skewness/kurtosis/slope/mse as 0 by convention.
    """
    v = np.asarray(values, dtype=np.float64)
    present = np.isfinite(v)
    if not present.any():
        raise EmptyContour("contour has no present values")
    n = len(v)
    t = (np.arange(n) / (n - 1)) if n > 1 else np.zeros(1)
    x, tt = v[present], t[present]
    m = x.size

    mean = x.mean()
    if m < 2:
        std = skew = kurt = slope = mse = 0.0
        offset = mean
    else:
        std = float(np.sqrt(np.mean((x - mean) ** 2)))
        if std > 0:
            z = (x - mean) / std
            skew = float(np.mean(z ** 3))
            kurt = float(np.mean(z ** 4) - 3.0)
        else:
            skew = kurt = 0.0
        tvar = np.mean((tt - tt.mean()) ** 2)
        if tvar > 0:
            slope = float(np.mean((tt - tt.mean()) * (x - mean)) / tvar)
        else:
            slope = 0.0
        offset = float(mean - slope * tt.mean())
        mse = float(np.mean((x - (slope * tt + offset)) ** 2))

    vmin, vmax = float(x.min()), float(x.max())
    relpos_min = float(tt[np.argmin(x)])
    relpos_max = float(tt[np.argmax(x)])
    return np.array([mean, std, skew, kurt, vmin, vmax, vmax - vmin,
                     relpos_min, relpos_max, slope, offset, mse])


def _delta(values: np.ndarray) -> np.ndarray:
    """First differences; zero at the first frame, missing where either side is."""
    v = np.asarray(values, dtype=np.float64)
    d = np.full_like(v, np.nan)
    if np.isfinite(v[0]):
        d[0] = 0.0
    both = np.isfinite(v[1:]) & np.isfinite(v[:-1])
    d[1:][both] = (v[1:] - v[:-1])[both]
    return d


def _functional_block(values) -> tuple[np.ndarray, bool]:
    try:
        return apply_functionals(values), False
    except EmptyContour:
        return np.zeros(len(FUNCTIONAL_NAMES)), True


def _require_voiced(analysis: ClipAnalysis) -> None:
    if not analysis.voiced.any():
        raise InsufficientVoiced("clip contains no voiced frames")


def extract_is09(clip: Clip, analysis: ClipAnalysis | None = None) -> FeatureVector:
    """384-dim Interspeech-2009-style vector for one clip."""
    analysis = analysis or analyze_clip(clip.buffer)
    _require_voiced(analysis)
    blocks, flagged = [], False
    for name in IS09_LLDS:
        contour = analysis.contour(name)
        for values in (contour, _delta(contour)):
            block, flag = _functional_block(values)
            blocks.append(block)
            flagged = flagged or flag
    out = np.concatenate(blocks)
    assert out.size == IS09_DIMS
    return FeatureVector("is09", out, flagged)


def extract_egemaps_lite(clip: Clip, analysis: ClipAnalysis | None = None) -> FeatureVector:
    """68-dim eGeMAPS-inspired vector: 13 LLDs x 5 functionals + 3 temporal."""
    analysis = analysis or analyze_clip(clip.buffer)
    _require_voiced(analysis)
    blocks, flagged = [], False
    for name in EGEMAPS_LITE_LLDS:
        v = analysis.contour(name)
        x = v[np.isfinite(v)]
        if x.size == 0:
            blocks.append(np.zeros(5))
            flagged = True
            continue
        std = float(np.sqrt(np.mean((x - x.mean()) ** 2))) if x.size > 1 else 0.0
        blocks.append(np.array([x.mean(), std, *np.percentile(x, [20, 50, 80])]))

    voiced = analysis.voiced
    hop_s = HOP_MS / 1000.0
    duration_s = len(voiced) * hop_s
    runs = np.count_nonzero(np.diff(np.concatenate([[0], voiced.astype(int)])) == 1)
    voiced_ratio = float(np.mean(voiced))
    segs_per_s = runs / duration_s
    mean_seg_len = float(np.count_nonzero(voiced)) * hop_s / runs if runs else 0.0
    blocks.append(np.array([voiced_ratio, segs_per_s, mean_seg_len]))

    out = np.concatenate(blocks)
    assert out.size == EGEMAPS_LITE_DIMS
    return FeatureVector("egemaps-lite", out, flagged)


# ---------------------------------------------------------------------------
# FVEC embedding files

FVEC_MAGIC = b"FVEC"
FVEC_VERSION = 1


@dataclass(frozen=True)
class EmbeddingMatrix:
    values: np.ndarray  # (n_frames, dims)

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> int:
        return self.values.shape[1]


def write_fvec(path, matrix) -> None:
    m = np.asarray(matrix, dtype="<f4")
    if m.ndim != 2 or m.shape[0] < 1:
        raise ValueError("embedding matrix must be 2-D with >= 1 frame")
    with open(path, "wb") as fh:
        fh.write(FVEC_MAGIC)
        fh.write(struct.pack("<III", FVEC_VERSION, m.shape[0], m.shape[1]))
        fh.write(m.tobytes())


def load_embedding_matrix(path) -> EmbeddingMatrix:
    """Read an FVEC file: magic, version, n_frames, dims, float32 payload."""
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) < 16 or head[:4] != FVEC_MAGIC:
            raise BadMagic(f"{path}: not an FVEC file")
        version, n_frames, dims = struct.unpack("<III", head[4:])
        if version != FVEC_VERSION:
            raise BadMagic(f"{path}: unsupported FVEC version {version}")
        payload = np.frombuffer(fh.read(), dtype="<f4")
    if payload.size != n_frames * dims:
        raise DimMismatch(
            f"{path}: header says {n_frames}x{dims}, payload holds {payload.size} floats")
    values = payload.reshape(n_frames, dims).astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue(f"{path}: payload contains NaN or infinity")
    return EmbeddingMatrix(values)


def pool_mean(m: EmbeddingMatrix) -> FeatureVector:
    return FeatureVector("embedding", m.values.mean(axis=0))


# ---------------------------------------------------------------------------
# estimator-API wrapper

_EXTRACTORS = {"is09": extract_is09, "egemaps-lite": extract_egemaps_lite}


def extract_features(clip: Clip, set_id: str) -> FeatureVector:
    try:
        return _EXTRACTORS[set_id](clip)
    except KeyError:
        raise ValueError(f"unknown feature set {set_id!r}") from None


class ClipFeatureExtractor(TransformerMixin, BaseEstimator):
    """Stateless transformer mapping clips to a feature matrix.

    Lets the hand-crafted extractors slot into sklearn pipelines alongside
    the classifiers in :mod:`voicescreen.models`.
    """

    def __init__(self, feature_set="egemaps-lite"):
        self.feature_set = feature_set

    def fit(self, X, y=None):
        if self.feature_set not in _EXTRACTORS:
            raise ValueError(f"unknown feature set {self.feature_set!r}")
        return self

    def transform(self, X):
        return np.stack([extract_features(clip, self.feature_set).values for clip in X])

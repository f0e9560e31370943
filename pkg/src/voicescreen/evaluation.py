"""Participant-stratified cross-validation, majority voting, and the T x N sweep.

Folds partition participants, never clips, so no speaker appears on both
sides of a split. Clip predictions are aggregated per participant by
majority vote (ties toward the positive, depressed class) and headline
metrics pool participant-level confusion counts across folds; per-fold
reports are retained.

Every fit call is recorded in an audit log so the no-leakage invariant can
be asserted after any run.
"""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from ._rng import derive_rng, derive_seed
from .audio_io import CANONICAL_RATE_HZ, load_wav, resample
from .errors import (
    EmptyCounts,
    EmptyVote,
    FoldCollapse,
    InsufficientAudio,
    InsufficientVoiced,
    TooFewParticipants,
    VoicescreenError,
)
from .featureset import extract_features, load_embedding_matrix, pool_mean
from .manifest import DatasetManifest, parse_manifest
from .models import LinearSvmClassifier, MlpClassifier, Standardizer, TrainConfig
from .segmenter import ClipSamplingConfig, detect_voiced_regions, sample_clips

POSITIVE_LABEL = "depressed"

DEFAULT_SWEEP_CELLS = tuple(
    [(T, N) for T in (5, 10, 15, 20) for N in (1, 3, 5)] + [(5, 7), (10, 7), (5, 11)]
)


@dataclass(frozen=True)
class PipelineConfig:
    scenario: str = "synthetic"
    clip_duration_s: float = 10.0   # T
    clip_count: int = 5             # N
    min_voiced_ratio: float = 0.5
    allow_overlap: bool = False
    feature_set: str = "egemaps-lite"
    model_type: str = "mlp"         # mlp | svm
    hidden_dim: int = 64
    train: TrainConfig = field(default_factory=TrainConfig)
    k_folds: int = 5

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "scenario", "clip_duration_s", "clip_count", "min_voiced_ratio",
            "allow_overlap", "feature_set", "model_type", "hidden_dim", "k_folds")}
        d["train"] = vars(self.train).copy() if hasattr(self.train, "__dict__") \
            else {f: getattr(self.train, f) for f in (
                "learning_rate", "epochs", "batch_size", "l2", "seed")}
        return d


# ---------------------------------------------------------------------------
# folds / vote / metrics

def make_participant_folds(participants, k: int = 5, seed: int = 0) -> list:
    """Stratified participant folds: shuffle each label stratum, deal round-robin."""
    ids_by_label: dict = {}
    for p in participants:
        ids_by_label.setdefault(p.label, []).append(p.id)
    folds: list = [[] for _ in range(k)]
    for label in sorted(ids_by_label):
        ids = sorted(ids_by_label[label])
        if len(ids) < k:
            raise TooFewParticipants(
                f"label {label!r} has {len(ids)} participants, need >= {k}")
        rng = derive_rng(seed, "folds", label)
        for i, j in enumerate(rng.permutation(len(ids))):
            folds[i % k].append(ids[j])
    return [sorted(f) for f in folds]


def majority_vote(clip_labels) -> int:
    """Modal binary label; an exact tie resolves to the positive class."""
    labels = list(clip_labels)
    if not labels:
        raise EmptyVote("no clip labels to vote on")
    positives = sum(1 for v in labels if v)
    return int(positives * 2 >= len(labels))


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fn: int = 0
    tn: int = 0
    fp: int = 0

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fn + other.fn,
                               self.tn + other.tn, self.fp + other.fp)

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.tn + self.fp


def compute_metrics(counts: ConfusionCounts) -> dict:
    """Accuracy/sensitivity/specificity/precision; zero denominators give None."""
    if counts.total == 0:
        raise EmptyCounts("no participants evaluated")

    def ratio(num, den):
        return num / den if den else None

    return {
        "accuracy": (counts.tp + counts.tn) / counts.total,
        "sensitivity": ratio(counts.tp, counts.tp + counts.fn),
        "specificity": ratio(counts.tn, counts.tn + counts.fp),
        "precision": ratio(counts.tp, counts.tp + counts.fp),
    }


# ---------------------------------------------------------------------------
# pipeline plumbing

@lru_cache(maxsize=48)
def _load_voiced(path):
    """Decoded buffer plus voiced regions; cached because the T x N sweep
    revisits every recording once per cell."""
    buf = resample(load_wav(path), CANONICAL_RATE_HZ)
    return buf, tuple(detect_voiced_regions(buf))


def _sample_participant_clips(record, cfg: ClipSamplingConfig):
    """N clips for one participant, trying recordings in order."""
    last_error = None
    for rec_path in record.recordings:
        rid = rec_path.rsplit("/", 1)[-1]
        try:
            buf, regions = _load_voiced(rec_path)
            return sample_clips(buf, list(regions), cfg, record.id, rid)
        except (InsufficientAudio, InsufficientVoiced) as exc:
            last_error = exc
    raise last_error


def _clip_features(record, clips, feature_set):
    if feature_set == "embedding":
        rows = []
        for i, clip in enumerate(clips):
            clip_id = f"{record.id}:{clip.recording_id}:{i}"
            path = record.embeddings.get(clip_id)
            if path is None:
                raise VoicescreenError(f"no embedding registered for clip {clip_id}")
            rows.append(pool_mean(load_embedding_matrix(path)).values)
        return np.stack(rows)
    return np.stack([extract_features(c, feature_set).values for c in clips])


def _make_model(pipeline: PipelineConfig, seed: int):
    t = pipeline.train
    if pipeline.model_type == "mlp":
        return MlpClassifier(hidden_dim=pipeline.hidden_dim,
                             learning_rate=t.learning_rate, epochs=t.epochs,
                             batch_size=t.batch_size, l2=t.l2, seed=seed)
    if pipeline.model_type == "svm":
        return LinearSvmClassifier(lam=t.l2, epochs=t.epochs, seed=seed)
    raise ValueError(f"unknown model type {pipeline.model_type!r}")


def run_cross_validation(manifest: DatasetManifest, pipeline: PipelineConfig,
                         seed: int = 0) -> dict:
    """Full pipeline evaluation: sample, extract, train per fold, vote, score.

    Returns a plain-dict report (JSON-ready) with pooled and per-fold
    metrics, exclusions, the audit log, and a reproducibility block.
    """
    included = [p for p in manifest.participants if p.scenario == pipeline.scenario]
    if not included:
        raise TooFewParticipants(f"no participants in scenario {pipeline.scenario!r}")

    sampling = ClipSamplingConfig(
        clip_duration_s=pipeline.clip_duration_s, clip_count=pipeline.clip_count,
        seed=derive_seed(seed, "clips", pipeline.clip_duration_s, pipeline.clip_count),
        min_voiced_ratio=pipeline.min_voiced_ratio, allow_overlap=pipeline.allow_overlap)

    features: dict = {}
    overlap_flags: dict = {}
    exclusions = []
    usable = []
    for record in sorted(included, key=lambda p: p.id):
        try:
            clips = _sample_participant_clips(record, sampling)
            features[record.id] = _clip_features(record, clips, pipeline.feature_set)
            overlap_flags[record.id] = any(c.overlap_flag for c in clips)
            usable.append(record)
        except VoicescreenError as exc:
            exclusions.append({"id": record.id, "reason": f"{type(exc).__name__}: {exc}"})

    folds = make_participant_folds(usable, pipeline.k_folds, seed)
    all_ids = sorted(p.id for p in usable)
    assert sorted(pid for f in folds for pid in f) == all_ids, "folds must partition ids"

    by_id = {p.id: p for p in usable}
    audit = []
    pooled = ConfusionCounts()
    per_fold = []
    for fold_i, test_ids in enumerate(folds):
        train_ids = sorted(set(all_ids) - set(test_ids))
        assert not set(train_ids) & set(test_ids), "leaky fold"

        X_train = np.concatenate([features[pid] for pid in train_ids])
        y_train = np.concatenate([
            np.full(len(features[pid]), 1 if by_id[pid].label == POSITIVE_LABEL else 0)
            for pid in train_ids])
        if len(np.unique(y_train)) < 2:
            raise FoldCollapse(f"fold {fold_i}: training labels collapsed to one class")

        audit.append({"event": "fit", "fold": fold_i, "participants": train_ids})
        scaler = Standardizer().fit(X_train)
        model = _make_model(pipeline, derive_seed(seed, "train", fold_i))
        model.fit(scaler.transform(X_train), y_train)

        counts = ConfusionCounts()
        for pid in test_ids:
            votes = model.predict(scaler.transform(features[pid]))
            predicted = majority_vote(votes)
            actual = 1 if by_id[pid].label == POSITIVE_LABEL else 0
            counts += ConfusionCounts(
                tp=int(actual and predicted), fn=int(actual and not predicted),
                tn=int(not actual and not predicted), fp=int(not actual and predicted))
        audit.append({"event": "test", "fold": fold_i, "participants": test_ids})
        pooled += counts
        per_fold.append({"fold": fold_i, "counts": vars(counts),
                         "metrics": compute_metrics(counts)})

    return {
        "config": {**pipeline.to_dict(), "seed": seed},
        "metrics": compute_metrics(pooled),
        "counts": vars(pooled),
        "per_fold": per_fold,
        "exclusions": exclusions,
        "overlap_fallback": sorted(pid for pid, f in overlap_flags.items() if f),
        "audit": audit,
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# sweep

def _run_cell(args):
    manifest_path, pipeline, seed, T, N = args
    manifest = parse_manifest(manifest_path)
    cell_pipeline = replace(pipeline, clip_duration_s=float(T), clip_count=int(N))
    cell_seed = derive_seed(seed, "cell", T, N)
    try:
        report = run_cross_validation(manifest, cell_pipeline, cell_seed)
        return {"T": T, "N": N, "report": report}
    except VoicescreenError as exc:
        return {"T": T, "N": N, "skipped": f"{type(exc).__name__}: {exc}"}


def run_sweep(manifest_path, pipeline: PipelineConfig, cells=DEFAULT_SWEEP_CELLS,
              seed: int = 0, jobs: int = 1) -> dict:
    """Evaluate every (T, N) cell; results merge in deterministic cell order."""
    args = [(manifest_path, pipeline, seed, T, N) for T, N in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, args))
    else:
        results = [_run_cell(a) for a in args]
    return {
        "config": {**pipeline.to_dict(), "seed": seed},
        "cells": results,
        "seed": seed,
    }


def report_to_json(report: dict) -> str:
    """Canonical serialization: byte-identical for identical runs."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"

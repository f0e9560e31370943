"""Command-line surface.

One verb per pipeline stage plus simulation and report rendering:

    voicescreen simulate --n 20 --effect 1.0 --seed 7 --out cohort/
    voicescreen segment  --manifest cohort/manifest.json --t 10 --n 5 --out clips.jsonl
    voicescreen extract  --manifest cohort/manifest.json --feature egemaps-lite --t 10 --n 5 --out feats.jsonl
    voicescreen cv       --manifest cohort/manifest.json --feature egemaps-lite --model mlp --t 10 --n 5 --seed 13 --out report.json
    voicescreen sweep    --manifest cohort/manifest.json --feature egemaps-lite --model mlp --seed 13 --out sweep.json
    voicescreen report   --in sweep.json --out table.csv

Exit codes: 0 success, 1 validation error (flags, manifest, schema),
2 runtime error. VOICESCREEN_SEED sets the seed when no --seed flag is given.
"""

import argparse
import csv
import io
import json
import os
import sys

from .audio_io import CANONICAL_RATE_HZ, load_wav, resample
from .cohort import CohortConfig, generate_cohort
from .errors import (
    DuplicateId,
    MissingFile,
    SchemaViolation,
    UnknownLabel,
    VoicescreenError,
)
from .evaluation import (
    DEFAULT_SWEEP_CELLS,
    PipelineConfig,
    report_to_json,
    run_cross_validation,
    run_sweep,
)
from .featureset import extract_features
from .manifest import parse_manifest
from .models import TrainConfig
from .segmenter import ClipSamplingConfig, detect_voiced_regions, sample_clips

_VALIDATION_ERRORS = (SchemaViolation, DuplicateId, MissingFile, UnknownLabel)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("VOICESCREEN_SEED")
    return int(env) if env else 0


def _add_sampling_flags(p):
    p.add_argument("--t", type=float, default=10.0, help="clip duration T in seconds")
    p.add_argument("--n", type=int, default=5, help="clips per participant N")
    p.add_argument("--min-voiced-ratio", type=float, default=0.5)
    p.add_argument("--allow-overlap", action="store_true")


def _add_model_flags(p):
    p.add_argument("--feature", default="egemaps-lite",
                   choices=["is09", "egemaps-lite", "embedding"])
    p.add_argument("--model", default="mlp", choices=["mlp", "svm"])
    p.add_argument("--k", type=int, default=5, help="cross-validation folds")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--scenario", default="synthetic")
    p.add_argument("--jobs", type=int, default=1)


def _pipeline_from_args(args, seed) -> PipelineConfig:
    return PipelineConfig(
        scenario=args.scenario,
        clip_duration_s=args.t, clip_count=args.n,
        min_voiced_ratio=args.min_voiced_ratio, allow_overlap=args.allow_overlap,
        feature_set=args.feature, model_type=args.model, hidden_dim=args.hidden,
        train=TrainConfig(learning_rate=args.lr, epochs=args.epochs,
                          batch_size=args.batch_size, l2=args.l2, seed=seed),
        k_folds=args.k)


def _iter_participant_clips(manifest, args, seed):
    cfg = ClipSamplingConfig(args.t, args.n, seed=seed,
                             min_voiced_ratio=args.min_voiced_ratio,
                             allow_overlap=args.allow_overlap)
    for record in sorted(manifest.participants, key=lambda p: p.id):
        for rec_path in record.recordings:
            rid = os.path.basename(rec_path)
            buf = resample(load_wav(rec_path), CANONICAL_RATE_HZ)
            regions = detect_voiced_regions(buf)
            yield record, sample_clips(buf, regions, cfg, record.id, rid)
            break  # one recording per participant is enough for N clips


def _cmd_simulate(args):
    seed = _resolve_seed(args)
    cfg = CohortConfig(n_depressed=args.n_depressed or args.n,
                       n_healthy=args.n_healthy or args.n,
                       effect_size=args.effect,
                       recording_duration_s=args.duration, seed=seed)
    manifest_path = generate_cohort(cfg, args.out)
    print(manifest_path)
    return 0


def _cmd_segment(args):
    seed = _resolve_seed(args)
    manifest = parse_manifest(args.manifest)
    with open(args.out, "w") as fh:
        fh.write(json.dumps({"config": {"t": args.t, "n": args.n, "seed": seed,
                                        "min_voiced_ratio": args.min_voiced_ratio,
                                        "allow_overlap": args.allow_overlap}},
                            sort_keys=True) + "\n")
        for _, clips in _iter_participant_clips(manifest, args, seed):
            for c in clips:
                fh.write(json.dumps({
                    "participant_id": c.participant_id, "recording_id": c.recording_id,
                    "start_s": c.start_s, "duration_s": args.t,
                    "overlap_flag": c.overlap_flag}, sort_keys=True) + "\n")
    return 0


def _cmd_extract(args):
    seed = _resolve_seed(args)
    manifest = parse_manifest(args.manifest)
    with open(args.out, "w") as fh:
        fh.write(json.dumps({"config": {"t": args.t, "n": args.n, "seed": seed,
                                        "feature": args.feature}}, sort_keys=True) + "\n")
        for record, clips in _iter_participant_clips(manifest, args, seed):
            for i, clip in enumerate(clips):
                vec = extract_features(clip, args.feature)
                fh.write(json.dumps({
                    "participant_id": record.id, "clip_index": i,
                    "start_s": clip.start_s, "feature_set": vec.set_id,
                    "quality_flag": vec.quality_flag,
                    "values": [float(v) for v in vec.values]}, sort_keys=True) + "\n")
    return 0


def _cmd_cv(args):
    seed = _resolve_seed(args)
    manifest = parse_manifest(args.manifest)
    report = run_cross_validation(manifest, _pipeline_from_args(args, seed), seed)
    with open(args.out, "w") as fh:
        fh.write(report_to_json(report))
    m = report["metrics"]
    print(f"accuracy={m['accuracy']:.3f} sensitivity={m['sensitivity']:.3f} "
          f"specificity={m['specificity']:.3f}")
    return 0


def _parse_cells(spec: str):
    cells = []
    for part in spec.split(","):
        t, n = part.split(":")
        cells.append((float(t), int(n)))
    return cells


def _cmd_sweep(args):
    seed = _resolve_seed(args)
    parse_manifest(args.manifest)  # validate before the long run
    cells = _parse_cells(args.cells) if args.cells else DEFAULT_SWEEP_CELLS
    grid = run_sweep(args.manifest, _pipeline_from_args(args, seed),
                     cells=cells, seed=seed, jobs=args.jobs)
    with open(args.out, "w") as fh:
        fh.write(report_to_json(grid))
    print(f"{sum(1 for c in grid['cells'] if 'report' in c)}/{len(grid['cells'])} "
          "cells completed")
    return 0


def render_table(doc: dict, fmt: str = "csv") -> str:
    """Render a cv or sweep report as a flat metric table."""
    header = ["scenario", "T", "N", "feature", "model",
              "accuracy", "sensitivity", "specificity", "precision"]
    rows = []

    def row_for(cfg, metrics):
        return [cfg["scenario"], cfg["clip_duration_s"], cfg["clip_count"],
                cfg["feature_set"], cfg["model_type"]] + [
            "" if metrics.get(k) is None else f"{metrics[k]:.3f}"
            for k in ("accuracy", "sensitivity", "specificity", "precision")]

    if "cells" in doc:
        for cell in doc["cells"]:
            if "report" in cell:
                rows.append(row_for(cell["report"]["config"], cell["report"]["metrics"]))
            else:
                cfg = dict(doc["config"], clip_duration_s=cell["T"], clip_count=cell["N"])
                rows.append(row_for(cfg, {}) )
    else:
        rows.append(row_for(doc["config"], doc["metrics"]))

    if fmt == "markdown":
        lines = ["| " + " | ".join(header) + " |",
                 "|" + "---|" * len(header)]
        lines += ["| " + " | ".join(str(v) for v in r) + " |" for r in rows]
        return "\n".join(lines) + "\n"
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _cmd_report(args):
    with open(args.infile) as fh:
        doc = json.load(fh)
    text = render_table(doc, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voicescreen")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic cohort")
    p.add_argument("--n", type=int, default=20, help="participants per class")
    p.add_argument("--n-depressed", type=int)
    p.add_argument("--n-healthy", type=int)
    p.add_argument("--effect", type=float, default=1.0)
    p.add_argument("--duration", type=float, default=120.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("segment", help="emit the clip inventory as JSON lines")
    p.add_argument("--manifest", required=True)
    _add_sampling_flags(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("extract", help="dump per-clip feature vectors")
    p.add_argument("--manifest", required=True)
    _add_sampling_flags(p)
    p.add_argument("--feature", default="egemaps-lite", choices=["is09", "egemaps-lite"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("cv", help="run cross-validation, write a report")
    p.add_argument("--manifest", required=True)
    _add_sampling_flags(p)
    _add_model_flags(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_cv)

    p = sub.add_parser("sweep", help="run the T x N grid")
    p.add_argument("--manifest", required=True)
    _add_sampling_flags(p)
    _add_model_flags(p)
    p.add_argument("--cells", help="comma-separated T:N pairs; default is the 15-cell grid")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("report", help="render a report as CSV or Markdown")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", default="csv", choices=["csv", "markdown"])
    p.add_argument("--out")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (VoicescreenError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

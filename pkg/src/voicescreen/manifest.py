"""Dataset manifest parsing and validation.

A manifest is a JSON file listing participants, their diagnosis labels,
the interaction scenario, and recording paths relative to the manifest
location. Optional per-clip embedding files (FVEC) may be attached for the
deep-feature route.
"""

import json
import os
from dataclasses import dataclass, field

from .errors import DuplicateId, MissingFile, SchemaViolation, UnknownLabel

LABELS = ("depressed", "healthy")
SCENARIOS = ("interview", "chatbot", "reading", "synthetic")
MANIFEST_VERSION = 1


@dataclass(frozen=True)
class ParticipantRecord:
    id: str
    label: str
    scenario: str
    recordings: tuple  # absolute paths
    embeddings: dict = field(default_factory=dict)  # clip id -> absolute FVEC path


@dataclass(frozen=True)
class DatasetManifest:
    version: int
    participants: tuple
    base_dir: str

    def by_id(self, pid: str) -> ParticipantRecord:
        for p in self.participants:
            if p.id == pid:
                return p
        raise KeyError(pid)


def parse_manifest(path) -> DatasetManifest:
    """Load and fully validate a manifest; errors name the offending field."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise MissingFile(f"{path}: {exc}") from exc

    if not isinstance(doc, dict) or not isinstance(doc.get("participants"), list):
        raise SchemaViolation(f"{path}: expected object with a 'participants' list")
    if doc.get("version") != MANIFEST_VERSION:
        raise SchemaViolation(f"{path}: version must be {MANIFEST_VERSION}")

    base = os.path.dirname(os.path.abspath(path))
    seen = set()
    records = []
    for i, entry in enumerate(doc["participants"]):
        where = f"{path}: participants[{i}]"
        if not isinstance(entry, dict):
            raise SchemaViolation(f"{where}: expected an object")
        pid = entry.get("id")
        if not isinstance(pid, str) or not pid:
            raise SchemaViolation(f"{where}: missing or empty 'id'")
        if pid in seen:
            raise DuplicateId(f"{where}: duplicate participant id {pid!r}")
        seen.add(pid)
        label = entry.get("label")
        if label not in LABELS:
            raise UnknownLabel(f"{where}: label {label!r} not in {LABELS}")
        scenario = entry.get("scenario")
        if scenario not in SCENARIOS:
            raise SchemaViolation(f"{where}: scenario {scenario!r} not in {SCENARIOS}")
        recordings = entry.get("recordings")
        if not isinstance(recordings, list) or not recordings:
            raise SchemaViolation(f"{where}: 'recordings' must be a non-empty list")
        paths = []
        for rec in recordings:
            full = os.path.join(base, rec)
            if not os.path.isfile(full):
                raise MissingFile(f"{where}: recording {rec!r} not found")
            paths.append(full)
        embeddings = {}
        for clip_id, rel in (entry.get("embeddings") or {}).items():
            full = os.path.join(base, rel)
            if not os.path.isfile(full):
                raise MissingFile(f"{where}: embedding {rel!r} not found")
            embeddings[clip_id] = full
        records.append(ParticipantRecord(pid, label, scenario, tuple(paths), embeddings))
    return DatasetManifest(MANIFEST_VERSION, tuple(records), base)


def write_manifest(path, manifest: DatasetManifest) -> None:
    """Inverse of parse_manifest (paths are re-relativized to the target dir)."""
    base = os.path.dirname(os.path.abspath(path))
    doc = {"version": manifest.version, "participants": []}
    for p in manifest.participants:
        doc["participants"].append({
            "id": p.id, "label": p.label, "scenario": p.scenario,
            "recordings": [os.path.relpath(r, base) for r in p.recordings],
            **({"embeddings": {cid: os.path.relpath(v, base)
                               for cid, v in p.embeddings.items()}}
               if p.embeddings else {}),
        })
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)

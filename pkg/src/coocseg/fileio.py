"""File formats: feature files, ground truth, JSON artifacts, reports.

Feature corpora live as one file per sequence plus a JSON manifest listing
``{"id", "file"}`` entries. Sequence files are either the binary format
(magic ``CAPF``, version, frame count and dimension as little-endian u32,
then row-major little-endian float32 frames) or CSV with one frame per row;
the loader picks by extension. All JSON artifacts are written with sorted
keys and a trailing newline so identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .evaluation import GroundTruth, MetricsReport
from .types import (
    ClusterModel,
    CooccurrenceStats,
    CoocsegError,
    Corpus,
    FeatureSequence,
    Segmentation,
    TemporalPath,
    validate_corpus,
)

MAGIC = b"CAPF"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIII")  # magic, version, n_frames, dim

MANIFEST_NAME = "manifest.json"


class FeatureLoadError(CoocsegError):
    """A feature file or manifest could not be read; message names the file."""


class GroundTruthLoadError(CoocsegError):
    """A ground-truth file is missing or inconsistent with the features."""


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# feature files


def write_feature_file(seq: FeatureSequence, path: "str | Path") -> None:
    """Binary format: header then n_frames*dim little-endian float32 values."""
    path = Path(path)
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, seq.n_frames, seq.dim)
    payload = np.ascontiguousarray(seq.frames, dtype="<f4").tobytes()
    path.write_bytes(header + payload)


def read_feature_file(path: "str | Path", seq_id: str) -> FeatureSequence:
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise FeatureLoadError(f"{path}: file too short for a header")
    magic, version, n_frames, dim = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FeatureLoadError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise FeatureLoadError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 4 * n_frames * dim
    if len(data) < expected:
        raise FeatureLoadError(
            f"{path}: truncated payload, header promises {expected - _HEADER.size} bytes "
            f"but only {len(data) - _HEADER.size} present"
        )
    if len(data) > expected:
        raise FeatureLoadError(f"{path}: {len(data) - expected} unexpected trailing byte(s)")
    frames = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(n_frames, dim)
    return FeatureSequence(id=seq_id, frames=frames.astype(np.float64))


def write_csv_feature_file(seq: FeatureSequence, path: "str | Path") -> None:
    # %.17g keeps enough digits that float64 values survive the round trip.
    np.savetxt(path, seq.frames, delimiter=",", fmt="%.17g")


def read_csv_feature_file(path: "str | Path", seq_id: str) -> FeatureSequence:
    path = Path(path)
    try:
        frames = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as e:
        raise FeatureLoadError(f"{path}: not parseable as CSV frames ({e})") from e
    if frames.size == 0:
        raise FeatureLoadError(f"{path}: no frames")
    return FeatureSequence(id=seq_id, frames=frames)


def write_features(corpus: Corpus, directory: "str | Path", fmt: str = "capf") -> Path:
    """Write one file per sequence plus the manifest; returns the manifest path."""
    if fmt not in ("capf", "csv"):
        raise ValueError(f"unknown feature format {fmt!r}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for seq in corpus:
        name = f"{seq.id}.{fmt}"
        if fmt == "capf":
            write_feature_file(seq, directory / name)
        else:
            write_csv_feature_file(seq, directory / name)
        entries.append({"id": seq.id, "file": name})
    manifest = directory / MANIFEST_NAME
    _dump_json(entries, manifest)
    return manifest


def load_features(path: "str | Path") -> Corpus:
    """Read a manifest (or a directory holding one) into a validated Corpus.

    Raises:
        FeatureLoadError: naming the offending file, on malformed headers,
            truncation, per-file parse problems, dimension mismatches across
            the manifest, or non-finite feature values.
    """
    path = Path(path)
    manifest_path = path / MANIFEST_NAME if path.is_dir() else path
    if not manifest_path.exists():
        raise FeatureLoadError(f"{manifest_path}: manifest not found")
    try:
        entries = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as e:
        raise FeatureLoadError(f"{manifest_path}: manifest is not valid JSON ({e})") from e
    if not isinstance(entries, list) or not entries:
        raise FeatureLoadError(f"{manifest_path}: manifest must be a non-empty list")
    base = manifest_path.parent
    sequences = []
    files = {}
    for entry in entries:
        if not isinstance(entry, dict) or "id" not in entry or "file" not in entry:
            raise FeatureLoadError(
                f"{manifest_path}: each manifest entry needs 'id' and 'file' keys, got {entry!r}"
            )
        seq_path = base / entry["file"]
        if not seq_path.exists():
            raise FeatureLoadError(f"{seq_path}: listed in manifest but missing")
        if seq_path.suffix == ".csv":
            seq = read_csv_feature_file(seq_path, entry["id"])
        else:
            seq = read_feature_file(seq_path, entry["id"])
        files[seq.id] = seq_path
        sequences.append(seq)
    corpus = Corpus(sequences=tuple(sequences))
    first = sequences[0]
    for seq in sequences[1:]:
        if seq.dim != first.dim:
            raise FeatureLoadError(
                f"{files[seq.id]}: dimension {seq.dim} does not match "
                f"{files[first.id]} (dimension {first.dim})"
            )
    violations = validate_corpus(corpus)
    if violations:
        detail = "; ".join(f"{files[v.sequence_id]}: {v.kind}" for v in violations)
        raise FeatureLoadError(f"invalid feature data: {detail}")
    return corpus


# ---------------------------------------------------------------------------
# ground truth


def write_ground_truth(ground_truth: GroundTruth, directory: "str | Path") -> None:
    """One text file per sequence, one label token per line."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for seq_id, labels in ground_truth.labels.items():
        lines = [ground_truth.label_names[label] for label in labels]
        (directory / f"{seq_id}.txt").write_text("\n".join(lines) + "\n")


def load_ground_truth(
    directory: "str | Path", expected: "Corpus | Mapping[str, int]"
) -> GroundTruth:
    """Read per-sequence label files; the vocabulary is the sorted token set.

    expected gives the sequence ids and frame counts to check against,
    either as a Corpus or as a plain id -> n_frames mapping.

    Raises:
        GroundTruthLoadError: missing file, empty token, or a line count
            that does not match the sequence's frame count.
    """
    directory = Path(directory)
    if isinstance(expected, Corpus):
        lengths = {seq.id: seq.n_frames for seq in expected}
    else:
        lengths = dict(expected)
    tokens_by_id: dict[str, list[str]] = {}
    for seq_id, n_frames in lengths.items():
        path = directory / f"{seq_id}.txt"
        if not path.exists():
            raise GroundTruthLoadError(f"{path}: no ground-truth file for sequence {seq_id!r}")
        tokens = path.read_text().splitlines()
        while tokens and tokens[-1] == "":
            tokens.pop()
        if any(not t.strip() for t in tokens):
            raise GroundTruthLoadError(f"{path}: blank label line")
        tokens = [t.strip() for t in tokens]
        if len(tokens) != n_frames:
            raise GroundTruthLoadError(f"{path}: {len(tokens)} labels for {n_frames} frames")
        tokens_by_id[seq_id] = tokens
    vocabulary = sorted({t for tokens in tokens_by_id.values() for t in tokens})
    index = {token: i for i, token in enumerate(vocabulary)}
    labels = {
        seq_id: np.array([index[t] for t in tokens], dtype=np.intp)
        for seq_id, tokens in tokens_by_id.items()
    }
    return GroundTruth(labels=labels, label_names=tuple(vocabulary))


# ---------------------------------------------------------------------------
# JSON artifacts


def save_model(model: ClusterModel, path: "str | Path") -> None:
    _dump_json(
        {
            "centroids": model.centroids.tolist(),
            "means": model.means.tolist(),
            "variances": model.variances.tolist(),
            "frame_assignments": {
                seq_id: a.tolist() for seq_id, a in model.frame_assignments.items()
            },
        },
        Path(path),
    )


def load_model(path: "str | Path") -> ClusterModel:
    obj = json.loads(Path(path).read_text())
    return ClusterModel(
        centroids=np.asarray(obj["centroids"], dtype=np.float64),
        means=np.asarray(obj["means"], dtype=np.float64),
        variances=np.asarray(obj["variances"], dtype=np.float64),
        frame_assignments={
            seq_id: np.asarray(a, dtype=np.intp)
            for seq_id, a in obj["frame_assignments"].items()
        },
    )


def save_stats(stats: CooccurrenceStats, path: "str | Path") -> None:
    _dump_json(
        {
            "occurs": stats.occurs.tolist(),
            "pair_counts": stats.pair_counts.tolist(),
            "conditional": stats.conditional.tolist(),
            "tau1": stats.tau1,
        },
        Path(path),
    )


def load_stats(path: "str | Path") -> CooccurrenceStats:
    obj = json.loads(Path(path).read_text())
    return CooccurrenceStats(
        occurs=np.asarray(obj["occurs"], dtype=np.int64),
        pair_counts=np.asarray(obj["pair_counts"], dtype=np.int64),
        conditional=np.asarray(obj["conditional"], dtype=np.float64),
        tau1=float(obj["tau1"]),
    )


def save_path(path_obj: TemporalPath, path: "str | Path") -> None:
    _dump_json({"steps": list(path_obj.steps)}, Path(path))


def load_path(path: "str | Path") -> TemporalPath:
    obj = json.loads(Path(path).read_text())
    return TemporalPath(steps=tuple(obj["steps"]))


# ---------------------------------------------------------------------------
# segmentations and reports


def write_segmentations(segmentations: Iterable[Segmentation], directory: "str | Path") -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for seg in segmentations:
        lines = "\n".join(str(int(label)) for label in seg.labels)
        (directory / f"{seg.sequence_id}.txt").write_text(lines + "\n")


def load_segmentations(directory: "str | Path") -> list[Segmentation]:
    directory = Path(directory)
    segmentations = []
    for path in sorted(directory.glob("*.txt")):
        labels = np.array([int(line) for line in path.read_text().split()], dtype=np.intp)
        segmentations.append(Segmentation(sequence_id=path.stem, labels=labels))
    if not segmentations:
        raise CoocsegError(f"{directory}: no segmentation files found")
    return segmentations


def format_report(report: MetricsReport) -> str:
    """Human-readable summary ending in machine-readable mof=/f1= lines."""
    lines = [
        f"videos evaluated: {len(report.per_video)}",
        f"total frames: {sum(v.n_frames for v in report.per_video.values())}",
        "per-video metrics:",
    ]
    for seq_id in sorted(report.per_video):
        v = report.per_video[seq_id]
        lines.append(f"  {seq_id}: mof={v.mof:.6f} f1={v.f1:.6f} frames={v.n_frames}")
    lines.append(f"mof={report.mof:.6f}")
    lines.append(f"f1={report.f1:.6f}")
    return "\n".join(lines) + "\n"


def write_report(report: MetricsReport, path: "str | Path") -> None:
    Path(path).write_text(format_report(report))

"""Dataset manifests, batch scoring, grouped evaluation, and reports.

Scoring is a pure function of (manifest entries, pipeline config): records
come back sorted by image path and any parallel schedule must reproduce the
sequential output byte for byte. Per-entry failures are collected rather
than aborting the batch unless strict mode is requested.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import imagecore, imgio, landmarks, metrics, spectral
from .classifier import LABEL_BONAFIDE, LABEL_MORPH, calibrate_eer_threshold
from .errors import (InsufficientData, MalformedManifest, MissingFile,
                     SingleClassGroup)
from .imagecore import ClipConfig
from .spectral import SpectralConfig

SCHEMA_VERSION = 1
THREADS_ENV = "BROWMAD_THREADS"
MANIFEST_FIELDS = ["image_path", "label", "dataset_tag", "morph_tool_tag", "landmark_path"]
SCORE_FIELDS = ["image_path", "label", "dataset_tag", "morph_tool_tag", "score", "config_digest"]
VALID_LABELS = (LABEL_BONAFIDE, LABEL_MORPH)
GROUP_MODES = ("all", "dataset_tag", "morph_tool_tag")
COMBINED_GROUP = "Combined"


@dataclass(frozen=True)
class ManifestEntry:
    image_path: Path
    label: str
    dataset_tag: str
    morph_tool_tag: str | None = None
    landmark_path: Path | None = None


@dataclass(frozen=True)
class ScoreRecord:
    image_path: str
    label: str
    dataset_tag: str
    morph_tool_tag: str | None
    score: float
    config_digest: str


@dataclass(frozen=True)
class ScoreFailure:
    image_path: str
    reason: str


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float
    seed: int


@dataclass(frozen=True)
class PipelineConfig:
    """End-to-end scoring options; the digest keys every derived artifact."""

    enhance_contrast: bool = True
    clip: ClipConfig = ClipConfig()
    margin: float = landmarks.DEFAULT_MARGIN
    low_freq_crop_percent: float = 0.0
    split: SplitSpec | None = None

    def to_dict(self) -> dict:
        out = {
            "enhance_contrast": self.enhance_contrast,
            "clip": {"black_fraction": self.clip.black_fraction,
                     "white_fraction": self.clip.white_fraction},
            "margin": self.margin,
            "low_freq_crop_percent": self.low_freq_crop_percent,
        }
        if self.split is not None:
            out["split"] = {"train_fraction": self.split.train_fraction,
                            "seed": self.split.seed}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {"enhance_contrast", "clip", "margin", "low_freq_crop_percent", "split"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = {}
        if "enhance_contrast" in data:
            kwargs["enhance_contrast"] = bool(data["enhance_contrast"])
        if "clip" in data:
            kwargs["clip"] = ClipConfig(**data["clip"])
        if "margin" in data:
            kwargs["margin"] = float(data["margin"])
        if "low_freq_crop_percent" in data:
            kwargs["low_freq_crop_percent"] = float(data["low_freq_crop_percent"])
        if "split" in data and data["split"] is not None:
            kwargs["split"] = SplitSpec(train_fraction=float(data["split"]["train_fraction"]),
                                        seed=int(data["split"]["seed"]))
        return cls(**kwargs)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class GroupResult:
    summary: metrics.EvalSummary
    curve: metrics.DetCurve


def load_manifest(path) -> list[ManifestEntry]:
    """Read a manifest CSV; relative paths resolve against the manifest dir.

    Lines starting with '#' are comments. Raises MalformedManifest for
    structural problems (naming the offending data row) and MissingFile for
    image paths that do not exist.
    """
    path = Path(path)
    base = path.parent
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MissingFile(f"cannot read manifest {path}: {exc}") from exc
    lines = [ln for ln in raw.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise MalformedManifest(f"{path}: no header row")
    rows = list(csv.reader(lines))
    if rows[0] != MANIFEST_FIELDS:
        raise MalformedManifest(f"{path}: header must be {','.join(MANIFEST_FIELDS)}")

    entries = []
    for rownum, row in enumerate(rows[1:], start=1):
        if len(row) != len(MANIFEST_FIELDS):
            raise MalformedManifest(f"{path}: row {rownum} has {len(row)} fields, expected 5")
        image_raw, label, dataset_tag, tool, landmark_raw = (v.strip() for v in row)
        if label not in VALID_LABELS:
            raise MalformedManifest(f"{path}: row {rownum} has invalid label {label!r}")
        if not image_raw:
            raise MalformedManifest(f"{path}: row {rownum} has empty image_path")
        image_path = _resolve(base, image_raw)
        if not image_path.is_file():
            raise MissingFile(f"{path}: row {rownum}: image {image_path} does not exist")
        landmark_path = _resolve(base, landmark_raw) if landmark_raw else None
        entries.append(ManifestEntry(image_path=image_path, label=label,
                                     dataset_tag=dataset_tag,
                                     morph_tool_tag=tool or None,
                                     landmark_path=landmark_path))
    return entries


def default_landmark_provider(entry: ManifestEntry) -> np.ndarray:
    """Load the entry's landmark file, or a .pts/.json sidecar of the image."""
    if entry.landmark_path is not None:
        if not entry.landmark_path.is_file():
            raise MissingFile(f"landmark file {entry.landmark_path} does not exist")
        return landmarks.load_landmarks(entry.landmark_path)
    for suffix in (".pts", ".json"):
        sidecar = entry.image_path.with_suffix(suffix)
        if sidecar.is_file():
            return landmarks.load_landmarks(sidecar)
    raise MissingFile(f"no landmarks found for {entry.image_path}")


def score_entry(entry: ManifestEntry, cfg: PipelineConfig,
                landmark_provider=default_landmark_provider,
                config_digest: str | None = None) -> ScoreRecord:
    """Run the full pipeline on one image: decode, crop, enhance, score."""
    gray = imagecore.to_grayscale(imgio.load_rgb(entry.image_path))
    points = landmark_provider(entry)
    h, w = gray.shape
    rect = landmarks.eyebrow_rect(points, w, h, cfg.margin)
    region = landmarks.crop(gray, rect)
    if cfg.enhance_contrast:
        region = imagecore.contrast_stretch(region, cfg.clip)
    score = spectral.frequency_score(
        region, SpectralConfig(low_freq_crop_percent=cfg.low_freq_crop_percent))
    if not np.isfinite(score) or score < 0:
        raise ValueError(f"non-finite or negative score {score} for {entry.image_path}")
    return ScoreRecord(image_path=str(entry.image_path), label=entry.label,
                       dataset_tag=entry.dataset_tag, morph_tool_tag=entry.morph_tool_tag,
                       score=score, config_digest=config_digest or cfg.digest())


def score_dataset(entries, cfg: PipelineConfig, strict: bool = False,
                  max_workers: int | None = None,
                  landmark_provider=default_landmark_provider,
                  ) -> tuple[list[ScoreRecord], list[ScoreFailure]]:
    """Score every manifest entry, collecting per-entry failures.

    Records come back sorted by image path regardless of worker count.
    With ``strict`` the first failure (in manifest order) is re-raised.
    ``max_workers`` defaults to the BROWMAD_THREADS env var; 0 or unset
    means one worker per CPU.
    """
    entries = list(entries)
    workers = _resolve_workers(max_workers, len(entries))
    digest = cfg.digest()

    def work(entry):
        try:
            return score_entry(entry, cfg, landmark_provider, config_digest=digest), None
        except Exception as exc:  # noqa: BLE001 - every per-entry failure is collected
            return None, (exc, ScoreFailure(image_path=str(entry.image_path),
                                            reason=f"{type(exc).__name__}: {exc}"))

    if workers <= 1 or len(entries) <= 1:
        outcomes = [work(e) for e in entries]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(work, entries))

    records, failures = [], []
    for record, failure in outcomes:
        if failure is not None:
            if strict:
                raise failure[0]
            failures.append(failure[1])
        else:
            records.append(record)
    records.sort(key=lambda r: r.image_path)
    failures.sort(key=lambda f: f.image_path)
    return records, failures


def evaluate(records, group_by: str = "all") -> dict[str, GroupResult]:
    """Per-group detection metrics with a self-calibrated EER threshold.

    Groupings: "all" pools everything; "dataset_tag" adds a "Combined"
    group over all records; "morph_tool_tag" pairs each tool's morphs with
    every bonafide record. Raises SingleClassGroup when a group lacks
    either label.
    """
    groups = _group_records(list(records), group_by)
    results = {}
    for name in sorted(groups):
        group = groups[name]
        bona = [r.score for r in group if r.label == LABEL_BONAFIDE]
        morph = [r.score for r in group if r.label == LABEL_MORPH]
        if not bona or not morph:
            raise SingleClassGroup(f"group {name!r} lacks "
                                   f"{'bonafide' if not bona else 'morph'} records")
        results[name] = _evaluate_group(np.asarray(bona), np.asarray(morph))
    return results


def split_train_test(records, train_fraction: float, seed: int):
    """Deterministic label-stratified split of score records.

    Raises InsufficientData when either side would end up with fewer than
    two records of either class.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    ordered = sorted(records, key=lambda r: r.image_path)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for label in VALID_LABELS:
        sub = [r for r in ordered if r.label == label]
        perm = rng.permutation(len(sub))
        n_train = int(np.floor(train_fraction * len(sub) + 0.5))
        picked = set(perm[:n_train].tolist())
        train.extend(r for i, r in enumerate(sub) if i in picked)
        test.extend(r for i, r in enumerate(sub) if i not in picked)
    for side, side_name in ((train, "train"), (test, "test")):
        for label in VALID_LABELS:
            count = sum(1 for r in side if r.label == label)
            if count < 2:
                raise InsufficientData(
                    f"{side_name} side has {count} {label} record(s); need at least 2")
    train.sort(key=lambda r: r.image_path)
    test.sort(key=lambda r: r.image_path)
    return train, test


def split_eval(records, train_fraction: float, seed: int) -> dict:
    """Calibrate on a train split, report confusion counts on the test split."""
    train, test = split_train_test(records, train_fraction, seed)
    threshold = calibrate_eer_threshold(
        [r.score for r in train if r.label == LABEL_BONAFIDE],
        [r.score for r in train if r.label == LABEL_MORPH]).value

    test_bona = np.asarray([r.score for r in test if r.label == LABEL_BONAFIDE])
    test_morph = np.asarray([r.score for r in test if r.label == LABEL_MORPH])
    wrong_bona = int(np.count_nonzero(test_bona < threshold))
    wrong_morph = int(np.count_nonzero(test_morph >= threshold))
    apcer_value = metrics.apcer(test_morph, threshold)
    bpcer_value = metrics.bpcer(test_bona, threshold)
    return {
        "schema_version": SCHEMA_VERSION,
        "train_fraction": train_fraction,
        "seed": seed,
        "threshold": threshold,
        "train_counts": {
            "n_bonafide": sum(1 for r in train if r.label == LABEL_BONAFIDE),
            "n_morph": sum(1 for r in train if r.label == LABEL_MORPH),
        },
        "test": {
            "bonafide": {"total": int(test_bona.size),
                         "rightly_classified": int(test_bona.size) - wrong_bona,
                         "wrongly_classified": wrong_bona},
            "morph": {"total": int(test_morph.size),
                      "rightly_classified": int(test_morph.size) - wrong_morph,
                      "wrongly_classified": wrong_morph},
        },
        "apcer": apcer_value,
        "bpcer": bpcer_value,
        "acer": metrics.acer(apcer_value, bpcer_value),
    }


def build_eval_report(records, group_by: str = "all") -> dict:
    """Evaluation report over one score set: summaries plus file-size audit.

    Refuses record lists that mix config digests; results from different
    configurations must never be merged into one report.
    """
    records = list(records)
    digests = sorted({r.config_digest for r in records})
    if len(digests) > 1:
        raise ValueError(f"records mix config digests {digests}; refusing to merge")
    results = evaluate(records, group_by)
    return {
        "schema_version": SCHEMA_VERSION,
        "group_by": group_by,
        "config_digest": digests[0] if digests else None,
        "groups": {name: res.summary.as_dict() for name, res in results.items()},
        "file_sizes": file_size_audit(records),
    }


def comparative_report(named_records: dict) -> dict:
    """Bundle several configurations' evaluations into one report.

    ``named_records`` maps a configuration label (e.g. "contrast_on") to
    that configuration's score records.
    """
    return {
        "schema_version": SCHEMA_VERSION,
        "configurations": {
            name: build_eval_report(recs, group_by="all")
            for name, recs in sorted(named_records.items())
        },
    }


def file_size_audit(records) -> dict:
    """min/max/mean bytes of the scored files, per dataset tag."""
    sizes: dict[str, list[int]] = {}
    for record in records:
        sizes.setdefault(record.dataset_tag, [])
        try:
            sizes[record.dataset_tag].append(os.path.getsize(record.image_path))
        except OSError:
            continue  # scores can outlive the image files; audit what's left
    audit = {}
    for tag in sorted(sizes):
        vals = sizes[tag]
        if vals:
            audit[tag] = {"n_files": len(vals), "min_bytes": min(vals),
                          "max_bytes": max(vals),
                          "mean_bytes": float(sum(vals)) / len(vals)}
        else:
            audit[tag] = {"n_files": 0, "min_bytes": None,
                          "max_bytes": None, "mean_bytes": None}
    return audit


def write_scores_csv(records, path) -> None:
    """Persist records sorted by image path; floats keep full precision."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(f"# schema_version={SCHEMA_VERSION}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SCORE_FIELDS)
        for r in sorted(records, key=lambda r: r.image_path):
            writer.writerow([r.image_path, r.label, r.dataset_tag,
                             r.morph_tool_tag or "", repr(float(r.score)),
                             r.config_digest])


def read_scores_csv(path) -> list[ScoreRecord]:
    path = Path(path)
    raw = path.read_text(encoding="utf-8")
    lines = [ln for ln in raw.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    rows = list(csv.reader(lines))
    if not rows or rows[0] != SCORE_FIELDS:
        raise MalformedManifest(f"{path}: header must be {','.join(SCORE_FIELDS)}")
    records = []
    for rownum, row in enumerate(rows[1:], start=1):
        if len(row) != len(SCORE_FIELDS):
            raise MalformedManifest(f"{path}: row {rownum} has {len(row)} fields, expected 6")
        image_path, label, dataset_tag, tool, score_text, digest = row
        if label not in VALID_LABELS:
            raise MalformedManifest(f"{path}: row {rownum} has invalid label {label!r}")
        try:
            score = float(score_text)
        except ValueError as exc:
            raise MalformedManifest(f"{path}: row {rownum} has bad score {score_text!r}") from exc
        records.append(ScoreRecord(image_path=image_path, label=label,
                                   dataset_tag=dataset_tag, morph_tool_tag=tool or None,
                                   score=score, config_digest=digest))
    return records


def write_report_json(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n",
                          encoding="utf-8")


def _evaluate_group(bona: np.ndarray, morph: np.ndarray) -> GroupResult:
    curve = metrics.det_curve(metrics.LabeledScores(bonafide=bona, morph=morph))
    eer = metrics.d_eer(curve)
    threshold = calibrate_eer_threshold(bona, morph).value
    apcer_value = metrics.apcer(morph, threshold)
    bpcer_value = metrics.bpcer(bona, threshold)
    summary = metrics.EvalSummary(
        d_eer=eer,
        bpcer10=metrics.bpcer_at_apcer(curve, 0.10),
        bpcer20=metrics.bpcer_at_apcer(curve, 0.05),
        apcer_at_threshold=apcer_value,
        bpcer_at_threshold=bpcer_value,
        acer=metrics.acer(apcer_value, bpcer_value),
        threshold=threshold,
        n_bonafide=int(bona.size),
        n_morph=int(morph.size),
    )
    return GroupResult(summary=summary, curve=curve)


def _group_records(records, group_by: str) -> dict[str, list]:
    if group_by not in GROUP_MODES:
        raise ValueError(f"group_by must be one of {GROUP_MODES}, got {group_by!r}")
    if group_by == "all":
        return {"all": records}
    if group_by == "dataset_tag":
        groups: dict[str, list] = {}
        for r in records:
            groups.setdefault(r.dataset_tag, []).append(r)
        groups[COMBINED_GROUP] = list(records)
        return groups
    # morph_tool_tag: each tool's morphs against every bonafide record
    bona = [r for r in records if r.label == LABEL_BONAFIDE]
    groups = {}
    for r in records:
        if r.label == LABEL_MORPH:
            groups.setdefault(r.morph_tool_tag or "untagged", []).append(r)
    return {tool: bona + morphs for tool, morphs in groups.items()}


def _resolve(base: Path, raw: str) -> Path:
    p = Path(raw)
    return p if p.is_absolute() else base / p


def _resolve_workers(max_workers: int | None, n_items: int) -> int:
    if max_workers is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            max_workers = int(raw)
        except ValueError as exc:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if max_workers <= 0:
        max_workers = os.cpu_count() or 1
    return max(1, min(max_workers, max(n_items, 1)))

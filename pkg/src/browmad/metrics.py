"""ISO/IEC 30107-3 style detection error rates and DET curves.

All rates are kept as fractions in [0, 1]; reports format them as
percentages. The decision polarity everywhere is "morph iff score <
threshold", so APCER counts morph scores >= t and BPCER counts bonafide
scores < t. Candidate thresholds are the midpoints between consecutive
distinct pooled scores plus -inf/+inf sentinels, which makes the error
rates exhaustive step functions of the threshold.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import EmptyScores


@dataclass(frozen=True)
class LabeledScores:
    """Scores split by ground-truth label."""

    bonafide: np.ndarray
    morph: np.ndarray


@dataclass(frozen=True)
class DetCurve:
    """Parallel arrays of one (threshold, apcer, bpcer) point per candidate."""

    thresholds: np.ndarray
    apcer: np.ndarray
    bpcer: np.ndarray


@dataclass(frozen=True)
class EvalSummary:
    """Headline numbers for one evaluation group."""

    d_eer: float
    bpcer10: float
    bpcer20: float
    apcer_at_threshold: float
    bpcer_at_threshold: float
    acer: float
    threshold: float
    n_bonafide: int
    n_morph: int

    def as_dict(self) -> dict:
        return {
            "d_eer": self.d_eer,
            "bpcer10": self.bpcer10,
            "bpcer20": self.bpcer20,
            "apcer_at_threshold": self.apcer_at_threshold,
            "bpcer_at_threshold": self.bpcer_at_threshold,
            "acer": self.acer,
            "threshold": self.threshold,
            "counts": {"n_bonafide": self.n_bonafide, "n_morph": self.n_morph},
        }


def apcer(morph_scores, t: float) -> float:
    """Fraction of morph scores accepted as bonafide at threshold t (score >= t)."""
    scores = _as_scores(morph_scores, "morph")
    return float(np.count_nonzero(scores >= t)) / scores.size


def bpcer(bonafide_scores, t: float) -> float:
    """Fraction of bonafide scores rejected as morphs at threshold t (score < t)."""
    scores = _as_scores(bonafide_scores, "bonafide")
    return float(np.count_nonzero(scores < t)) / scores.size


def acer(apcer_value: float, bpcer_value: float) -> float:
    """Average classification error rate: mean of APCER and BPCER."""
    for name, v in (("apcer", apcer_value), ("bpcer", bpcer_value)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {v}")
    return (apcer_value + bpcer_value) / 2.0


def det_curve(scores: LabeledScores) -> DetCurve:
    """Exact APCER/BPCER at every candidate threshold.

    Thresholds are the midpoints between consecutive distinct pooled scores
    plus sentinels, so the curve starts at (apcer=1, bpcer=0) and ends at
    (apcer=0, bpcer=1); apcer is non-increasing and bpcer non-decreasing.
    """
    bona = np.sort(_as_scores(scores.bonafide, "bonafide"))
    morph = np.sort(_as_scores(scores.morph, "morph"))
    pooled = np.unique(np.concatenate([bona, morph]))
    mids = (pooled[:-1] + pooled[1:]) / 2.0
    thresholds = np.concatenate([[-np.inf], mids, [np.inf]])
    apcer_vals = (morph.size - np.searchsorted(morph, thresholds, side="left")) / morph.size
    bpcer_vals = np.searchsorted(bona, thresholds, side="left") / bona.size
    return DetCurve(thresholds=thresholds, apcer=apcer_vals, bpcer=bpcer_vals)


def eer_point(curve: DetCurve) -> tuple[float, float]:
    """(rate, threshold) where the APCER and BPCER curves cross.

    Both values are linearly interpolated between the two curve points that
    bracket the sign change of apcer - bpcer. The returned threshold can be
    non-finite when the bracket touches a sentinel; callers that persist
    thresholds should fall back to a finite candidate in that case.
    """
    diff = curve.apcer - curve.bpcer
    idx = int(np.argmax(diff <= 0.0))  # diff[0] == 1 at the -inf sentinel
    d_lo, d_hi = diff[idx - 1], diff[idx]
    lam = d_lo / (d_lo - d_hi)
    rate = curve.apcer[idx - 1] + lam * (curve.apcer[idx] - curve.apcer[idx - 1])

    t_lo, t_hi = curve.thresholds[idx - 1], curve.thresholds[idx]
    if np.isfinite(t_lo) and np.isfinite(t_hi):
        threshold = t_lo + lam * (t_hi - t_lo)
    elif np.isfinite(t_hi):
        threshold = t_hi
    elif np.isfinite(t_lo):
        threshold = t_lo
    else:
        threshold = np.nan
    return float(rate), float(threshold)


def d_eer(curve: DetCurve) -> float:
    """Detection equal error rate: the rate at the APCER = BPCER crossing."""
    return eer_point(curve)[0]


def bpcer_at_apcer(curve: DetCurve, target_apcer: float) -> float:
    """BPCER where APCER equals ``target_apcer``, interpolating the curve.

    BPCER10 and BPCER20 are this at targets 0.10 and 0.05.
    """
    if not 0.0 < target_apcer < 1.0:
        raise ValueError(f"target_apcer must be in (0, 1), got {target_apcer}")
    a, b = curve.apcer, curve.bpcer
    idx = int(np.argmax(a <= target_apcer))  # a[0] == 1 > target, so idx >= 1
    span = a[idx - 1] - a[idx]
    lam = (a[idx - 1] - target_apcer) / span
    return float(b[idx - 1] + lam * (b[idx] - b[idx - 1]))


def save_det_csv(curve: DetCurve, path) -> None:
    """Write the curve as CSV with header threshold,apcer,bpcer."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["threshold", "apcer", "bpcer"])
        for t, a, b in zip(curve.thresholds, curve.apcer, curve.bpcer):
            writer.writerow([repr(float(t)), repr(float(a)), repr(float(b))])


def save_det_svg(curve: DetCurve, path, title: str = "DET curve") -> None:
    """Plot APCER vs BPCER on log-scaled axes and save as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    floor = 1e-4  # log axes cannot show exact zeros
    a = np.maximum(curve.apcer, floor)
    b = np.maximum(curve.bpcer, floor)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(a, b, drawstyle="steps-post")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("APCER")
    ax.set_ylabel("BPCER")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)


def _as_scores(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyScores(f"{name} score list is empty")
    return arr

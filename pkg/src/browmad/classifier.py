"""Threshold decisions over frequency scores.

Morphing smooths the eyebrow texture, so morphed crops carry less DFT
magnitude away from DC and score *lower* than bonafide crops. The decision
rule is therefore fixed as "morph iff score < threshold"; ties classify as
bonafide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metrics

LABEL_BONAFIDE = "bonafide"
LABEL_MORPH = "morph"


@dataclass(frozen=True)
class Threshold:
    """Decision boundary; scores strictly below it are called morphs."""

    value: float


@dataclass(frozen=True)
class Decision:
    label: str
    score: float
    threshold_used: float


def decide(score: float, threshold: Threshold) -> Decision:
    """Classify one score against a threshold."""
    label = LABEL_MORPH if score < threshold.value else LABEL_BONAFIDE
    return Decision(label=label, score=float(score), threshold_used=float(threshold.value))


def calibrate_eer_threshold(bonafide_scores, morph_scores) -> Threshold:
    """Threshold at the APCER = BPCER crossing of the two score sets.

    Candidate thresholds are shared with the DET-curve computation, so the
    calibrated value always corresponds to a curve point (interpolated
    between the two candidates that bracket the crossing).
    """
    curve = metrics.det_curve(metrics.LabeledScores(
        bonafide=np.asarray(bonafide_scores, dtype=np.float64),
        morph=np.asarray(morph_scores, dtype=np.float64)))
    _, threshold = metrics.eer_point(curve)
    if not np.isfinite(threshold):
        # All pooled scores identical: no interior candidate exists.
        pooled = np.concatenate([np.ravel(bonafide_scores), np.ravel(morph_scores)])
        threshold = float(np.unique(pooled)[0])
    return Threshold(value=float(threshold))

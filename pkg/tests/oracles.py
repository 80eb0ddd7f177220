"""Independent brute-force references used to check the fast implementations.

Everything here is deliberately naive: direct double-sum DFT, counting-based
error rates, and exhaustive threshold sweeps. None of it shares code with
the library paths it verifies.
"""

import numpy as np


def naive_dft2_magnitude(img):
    """O((MN)^2) double-sum DFT magnitude, bin by bin."""
    arr = np.asarray(img, dtype=np.complex128)
    m, n = arr.shape
    rows = np.arange(m)
    cols = np.arange(n)
    out = np.empty((m, n), dtype=np.float64)
    for u in range(m):
        for v in range(n):
            phase = np.exp(-2j * np.pi * (u * rows[:, None] / m + v * cols[None, :] / n))
            out[u, v] = abs((arr * phase).sum())
    return out


def count_apcer(morph_scores, t):
    return sum(1 for s in morph_scores if s >= t) / len(morph_scores)


def count_bpcer(bonafide_scores, t):
    return sum(1 for s in bonafide_scores if s < t) / len(bonafide_scores)


def candidate_thresholds(bonafide_scores, morph_scores):
    pooled = sorted(set(list(bonafide_scores) + list(morph_scores)))
    mids = [(a + b) / 2.0 for a, b in zip(pooled[:-1], pooled[1:])]
    return [-np.inf] + mids + [np.inf]


def sweep_eer(bonafide_scores, morph_scores):
    """Exhaustive min over thresholds of max(APCER, BPCER)."""
    best = np.inf
    for t in candidate_thresholds(bonafide_scores, morph_scores):
        worst = max(count_apcer(morph_scores, t), count_bpcer(bonafide_scores, t))
        best = min(best, worst)
    return best


def sweep_bpcer_at_apcer(bonafide_scores, morph_scores, target):
    """Smallest BPCER over thresholds whose APCER does not exceed the target."""
    best = 1.0
    for t in candidate_thresholds(bonafide_scores, morph_scores):
        if count_apcer(morph_scores, t) <= target:
            best = min(best, count_bpcer(bonafide_scores, t))
    return best

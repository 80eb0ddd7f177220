"""Grayscale conversion and percentile-clipping contrast enhancement.

Pixel buffers are plain numpy arrays: RGB frames are (H, W, 3) and grayscale
frames (H, W), both holding real values in [0, 255]. Grayscale pixels stay
real-valued through the whole pipeline; quantization to 8-bit happens only
when a file is written.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Broadcast-standard luma weights for the RGB -> gray projection.
LUMA_R, LUMA_G, LUMA_B = 0.299, 0.587, 0.114


@dataclass(frozen=True)
class ClipConfig:
    """Fractions of darkest / brightest pixels clipped before rescaling."""

    black_fraction: float = 0.01
    white_fraction: float = 0.05

    def __post_init__(self):
        if not 0.0 <= self.black_fraction < 1.0:
            raise ValueError(f"black_fraction must be in [0, 1), got {self.black_fraction}")
        if not 0.0 <= self.white_fraction < 1.0:
            raise ValueError(f"white_fraction must be in [0, 1), got {self.white_fraction}")
        if self.black_fraction + self.white_fraction >= 1.0:
            raise ValueError("black_fraction + white_fraction must be < 1")


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Project an (H, W, 3) RGB buffer onto (H, W) float64 luma values."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) RGB array, got shape {arr.shape}")
    return LUMA_R * arr[:, :, 0] + LUMA_G * arr[:, :, 1] + LUMA_B * arr[:, :, 2]


def contrast_stretch(img: np.ndarray, cfg: ClipConfig | None = None) -> np.ndarray:
    """Clip the darkest/brightest pixel fractions and rescale to [0, 255].

    Clip levels are nearest-rank percentiles of the pixel multiset: the
    darkest ``black_fraction`` of pixels map to 0, the brightest
    ``white_fraction`` to 255, and everything between scales linearly.
    Images with no spread between the two levels are returned unchanged.
    """
    cfg = cfg or ClipConfig()
    arr = np.asarray(img, dtype=np.float64)
    n = arr.size
    ordered = np.sort(arr, axis=None)
    lo_rank = max(int(np.ceil(cfg.black_fraction * n)), 1)
    hi_rank = max(n - int(np.ceil(cfg.white_fraction * n)), 1)
    lo = ordered[lo_rank - 1]
    hi = ordered[hi_rank - 1]
    if hi <= lo:
        return arr.copy()
    return np.clip(255.0 * (arr - lo) / (hi - lo), 0.0, 255.0)

"""2D DFT magnitude analysis of the cropped eyebrow region.

The per-image morph score is the sum of the unnormalized forward DFT
magnitudes divided by the pixel count of the region. Morphing averages two
face images, which thins out magnitude away from DC, so morphs score lower
than bonafide crops. No window function is applied before the transform and
regions are never zero-padded: the transform runs at the exact crop size.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import imgio
from .errors import EmptyInput


@dataclass(frozen=True)
class SpectralConfig:
    """Scoring options.

    ``low_freq_crop_percent`` removes a disk around DC in the shifted
    spectrum before summation; its radius is percent/100 of half the
    smaller spectrum dimension. 0 disables the crop (the recommended
    setting; removing low frequencies slightly hurts detection).
    """

    low_freq_crop_percent: float = 0.0
    shift_for_display: bool = False

    def __post_init__(self):
        if not 0.0 <= self.low_freq_crop_percent < 100.0:
            raise ValueError(
                f"low_freq_crop_percent must be in [0, 100), got {self.low_freq_crop_percent}")


def dft2_magnitude(img: np.ndarray) -> np.ndarray:
    """Magnitudes of the unnormalized forward 2D DFT, any M x N size."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2D array, got shape {arr.shape}")
    return np.abs(np.fft.fft2(arr))


def fft_shift(spec: np.ndarray) -> np.ndarray:
    """Swap quadrants so DC sits at (floor(M/2), floor(N/2))."""
    return np.fft.fftshift(np.asarray(spec))


def apply_low_freq_crop(spec: np.ndarray, percent: float) -> np.ndarray:
    """Zero all bins within a DC-centred disk of the shifted spectrum.

    The disk radius is (percent/100) * (min(M, N)/2); distances are measured
    from the shifted DC position and bins at distance <= radius are zeroed.
    The result is returned in unshifted layout. percent = 0 is the identity.
    """
    if not 0.0 <= percent < 100.0:
        raise ValueError(f"percent must be in [0, 100), got {percent}")
    arr = np.asarray(spec, dtype=np.float64)
    if percent == 0.0:
        return arr
    m, n = arr.shape
    radius = (percent / 100.0) * (min(m, n) / 2.0)
    cy, cx = m // 2, n // 2
    yy, xx = np.ogrid[:m, :n]
    mask = (yy - cy) ** 2 + (xx - cx) ** 2 <= radius * radius
    shifted = np.fft.fftshift(arr)
    shifted[mask] = 0.0
    return np.fft.ifftshift(shifted)


def frequency_score(img: np.ndarray, cfg: SpectralConfig | None = None) -> float:
    """Normalized magnitude sum of a grayscale region.

    Returns (1 / (M*N)) * sum of |DFT| over all bins, after the optional
    low-frequency crop. A constant region of value c scores exactly c.
    """
    cfg = cfg or SpectralConfig()
    mag = dft2_magnitude(img)
    if cfg.low_freq_crop_percent > 0.0:
        mag = apply_low_freq_crop(mag, cfg.low_freq_crop_percent)
    return float(np.sum(mag)) / mag.size


def averaged_spectrum(imgs: Sequence[np.ndarray],
                      display_size: tuple[int, int] = (128, 128)) -> np.ndarray:
    """Mean of shifted log(1 + |DFT|) spectra, for visualization only.

    Each image is bilinearly resized to ``display_size`` (rows, cols) so
    spectra of differently sized crops can be averaged bin by bin. The log
    scaling matches how such spectra are usually rendered; this output is
    never used for scoring.
    """
    if len(imgs) == 0:
        raise EmptyInput("averaged_spectrum needs at least one image")
    rows, cols = int(display_size[0]), int(display_size[1])
    acc = None
    for img in imgs:
        resized = imgio.resize_bilinear(img, rows, cols)
        spec = np.log1p(np.fft.fftshift(dft2_magnitude(resized)))
        acc = spec if acc is None else acc + spec
    return acc / len(imgs)


def save_spectrum_csv(spec: np.ndarray, path) -> None:
    """Write a magnitude grid as a plain CSV of floats, one row per line."""
    arr = np.asarray(spec, dtype=np.float64)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        for row in arr:
            writer.writerow([repr(float(v)) for v in row])


def save_spectrum_png(spec: np.ndarray, path) -> None:
    """Render a magnitude grid as an 8-bit PNG, log-scaled and min-max normalized."""
    arr = np.log1p(np.asarray(spec, dtype=np.float64))
    lo, hi = float(arr.min()), float(arr.max())
    if hi > lo:
        arr = 255.0 * (arr - lo) / (hi - lo)
    else:
        arr = np.zeros_like(arr)
    imgio.save_gray_png(arr, path)

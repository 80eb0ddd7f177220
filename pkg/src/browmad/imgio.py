"""PNG/JPEG decode and encode helpers (Pillow-backed)."""

from __future__ import annotations

import numpy as np
from PIL import Image


def load_rgb(path) -> np.ndarray:
    """Decode an image file into an (H, W, 3) float64 array in [0, 255]."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.float64)


def save_gray_png(img: np.ndarray, path) -> None:
    """Quantize a grayscale array to 8 bits and write it as PNG."""
    arr = np.clip(np.rint(np.asarray(img, dtype=np.float64)), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")


def resize_bilinear(img: np.ndarray, out_rows: int, out_cols: int) -> np.ndarray:
    """Bilinear-resample a grayscale array to (out_rows, out_cols)."""
    src = Image.fromarray(np.asarray(img, dtype=np.float32), mode="F")
    out = src.resize((int(out_cols), int(out_rows)), Image.BILINEAR)
    return np.asarray(out, dtype=np.float64)

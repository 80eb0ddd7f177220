"""Desk-scale test data: landmark-aligned alpha-blend morphs and blur oracles.

Real morphing tools and the license-restricted face datasets cannot ship
with the toolkit, so tests run on synthetic faces: band-limited noise
backgrounds with a dense field of short anti-aliased dark strokes in the
eyebrow band. Blending two such faces averages independent stroke patterns,
which reproduces the magnitude loss the detector keys on.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import imgio, landmarks
from .errors import DegenerateAlignment, DimensionMismatch

DATASET_TAG = "synthetic"
MORPH_TOOL_TAG = "blend"


@dataclass(frozen=True)
class BlendSpec:
    """How to combine two faces into a morph.

    ``alignment`` is "none" (plain pixel average; images must share
    dimensions) or "similarity" (subject B is warped onto subject A by a
    least-squares similarity transform fitted on all 68 landmarks).
    """

    alpha: float = 0.5
    alignment: str = "similarity"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.alignment not in ("none", "similarity"):
            raise ValueError(f"alignment must be 'none' or 'similarity', got {self.alignment!r}")


@dataclass(frozen=True)
class SyntheticSample:
    """One generated face: pixels, its 68 landmarks, and a stable name."""

    name: str
    image: np.ndarray
    points: np.ndarray


@dataclass(frozen=True)
class SyntheticPairSet:
    bonafide: tuple[SyntheticSample, ...]
    morphs: tuple[SyntheticSample, ...]
    seed: int
    size: tuple[int, int]


def blend_morph(a: np.ndarray, lm_a: np.ndarray, b: np.ndarray, lm_b: np.ndarray,
                spec: BlendSpec | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Alpha-blend two grayscale faces and their landmark sets.

    Output pixel = alpha * a + (1 - alpha) * warp(b); landmarks blend the
    same way. With similarity alignment, b is resampled bilinearly into a's
    frame and out-of-bounds samples take the nearest border pixel.

    Raises:
        DimensionMismatch: alignment "none" with differently sized images.
        DegenerateAlignment: a landmark set is collinear.
    """
    spec = spec or BlendSpec()
    img_a = np.asarray(a, dtype=np.float64)
    img_b = np.asarray(b, dtype=np.float64)
    pts_a = np.asarray(lm_a, dtype=np.float64)
    pts_b = np.asarray(lm_b, dtype=np.float64)

    if spec.alignment == "none":
        if img_a.shape != img_b.shape:
            raise DimensionMismatch(
                f"alignment 'none' needs equal sizes, got {img_a.shape} and {img_b.shape}")
        warped = img_b
        warped_pts = pts_b
    else:
        scale, rot, shift = _fit_similarity(pts_b, pts_a)
        warped = _warp_similarity(img_b, scale, rot, shift, img_a.shape)
        warped_pts = scale * pts_b @ rot.T + shift

    alpha = spec.alpha
    morph_img = alpha * img_a + (1.0 - alpha) * warped
    morph_pts = alpha * pts_a + (1.0 - alpha) * warped_pts
    return morph_img, morph_pts


def gaussian_blur_circular(img: np.ndarray, sigma: float) -> np.ndarray:
    """Circular (wrap-around) convolution with a normalized Gaussian kernel.

    The kernel is sampled on [-ceil(3*sigma), ceil(3*sigma)] and normalized
    to sum 1, so its transfer function has magnitude <= 1 everywhere and
    blurring can never raise the frequency score. sigma = 0 is the identity.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    arr = np.asarray(img, dtype=np.float64)
    if sigma == 0:
        return arr.copy()
    radius = int(math.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1)
    weights = np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    weights /= weights.sum()
    for axis in (0, 1):
        arr = sum(w * np.roll(arr, int(k), axis=axis) for w, k in zip(weights, offsets))
    return arr


def face_landmark_template(width: int, height: int) -> np.ndarray:
    """Fixed 68-point layout in iBUG order, scaled to the image size."""
    pts = np.empty((68, 2), dtype=np.float64)
    # jaw 0..16: open arc around the lower face
    t = np.linspace(-1.35, 1.35, 17)
    pts[0:17, 0] = 0.5 + 0.40 * np.sin(t)
    pts[0:17, 1] = 0.45 + 0.42 * np.cos(t)
    # eyebrows 17..26: five points each with a slight arch
    brow_y = np.array([0.340, 0.305, 0.285, 0.305, 0.340])
    pts[17:22, 0] = np.array([0.185, 0.245, 0.305, 0.365, 0.425])
    pts[17:22, 1] = brow_y
    pts[22:27, 0] = np.array([0.575, 0.635, 0.695, 0.755, 0.815])
    pts[22:27, 1] = brow_y[::-1]
    # nose 27..35: bridge + base row
    pts[27:31, 0] = 0.5
    pts[27:31, 1] = np.linspace(0.38, 0.54, 4)
    pts[31:36, 0] = 0.5 + np.array([-0.06, -0.03, 0.0, 0.03, 0.06])
    pts[31:36, 1] = 0.58
    # eyes 36..47: two hexagons
    hexa = np.linspace(0.0, 2.0 * np.pi, 6, endpoint=False)
    for base, cx in ((36, 0.315), (42, 0.685)):
        pts[base:base + 6, 0] = cx + 0.055 * np.cos(hexa)
        pts[base:base + 6, 1] = 0.40 + 0.022 * np.sin(hexa)
    # mouth 48..67: outer ring of 12, inner ring of 8
    outer = np.linspace(0.0, 2.0 * np.pi, 12, endpoint=False)
    pts[48:60, 0] = 0.5 + 0.13 * np.cos(outer)
    pts[48:60, 1] = 0.74 + 0.050 * np.sin(outer)
    inner = np.linspace(0.0, 2.0 * np.pi, 8, endpoint=False)
    pts[60:68, 0] = 0.5 + 0.080 * np.cos(inner)
    pts[60:68, 1] = 0.74 + 0.020 * np.sin(inner)

    pts[:, 0] *= width
    pts[:, 1] *= height
    return pts


def make_synthetic_pair_set(n: int, seed: int,
                            size: tuple[int, int] = (256, 256)) -> SyntheticPairSet:
    """Generate ``n`` bonafide faces and ``n // 2`` morphs from disjoint pairs.

    Bonafide faces share one fixed landmark template; each pair's landmarks
    get independent jitter of at most 2 px before similarity alignment, so
    morphs pick up both stroke-pattern averaging and slight misregistration.
    Identical (n, seed, size) always reproduces the same dataset; each item
    draws from its own (seed, kind, index) stream, so generation order does
    not matter.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 bonafide images, got {n}")
    width, height = int(size[0]), int(size[1])
    template = face_landmark_template(width, height)

    bonafide = []
    for i in range(n):
        rng = np.random.default_rng((seed, 0, i))
        img = _bonafide_face(rng, width, height, template)
        bonafide.append(SyntheticSample(f"bonafide_{i:04d}", img, template.copy()))

    morphs = []
    for j in range(n // 2):
        first, second = bonafide[2 * j], bonafide[2 * j + 1]
        rng = np.random.default_rng((seed, 1, j))
        lm_a = first.points + rng.uniform(-2.0, 2.0, size=(68, 2))
        lm_b = second.points + rng.uniform(-2.0, 2.0, size=(68, 2))
        img, pts = blend_morph(first.image, lm_a, second.image, lm_b,
                               BlendSpec(alpha=0.5, alignment="similarity"))
        morphs.append(SyntheticSample(f"morph_{j:04d}", np.clip(img, 0.0, 255.0), pts))

    return SyntheticPairSet(bonafide=tuple(bonafide), morphs=tuple(morphs),
                            seed=seed, size=(width, height))


def write_synthetic_set(dataset: SyntheticPairSet, out_dir) -> Path:
    """Write PNG images, .pts landmark sidecars, and a manifest CSV.

    Returns the manifest path; the manifest is directly loadable by the
    scoring harness.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for sample, label, tool in (
            [(s, "bonafide", "") for s in dataset.bonafide]
            + [(s, "morph", MORPH_TOOL_TAG) for s in dataset.morphs]):
        img_name = f"{sample.name}.png"
        pts_name = f"{sample.name}.pts"
        imgio.save_gray_png(sample.image, out_dir / img_name)
        (out_dir / pts_name).write_text(landmarks.dump_pts(sample.points), encoding="utf-8")
        rows.append([img_name, label, DATASET_TAG, tool, pts_name])

    manifest_path = out_dir / "manifest.csv"
    with open(manifest_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["image_path", "label", "dataset_tag", "morph_tool_tag", "landmark_path"])
        writer.writerows(rows)
    return manifest_path


def _fit_similarity(src: np.ndarray, dst: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Least-squares similarity transform mapping src points onto dst points.

    Returns (scale, rotation, translation) with dst ~= scale * R @ src + t.
    """
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 2:
        raise ValueError(f"point sets must share shape (N, 2), got {src.shape} and {dst.shape}")
    mu_src = src.mean(axis=0)
    mu_dst = dst.mean(axis=0)
    src_c = src - mu_src
    dst_c = dst - mu_dst

    for name, centered in (("source", src_c), ("destination", dst_c)):
        spread = np.linalg.svd(centered, compute_uv=False)
        if spread[-1] <= 1e-8 * max(spread[0], 1.0):
            raise DegenerateAlignment(f"{name} landmarks are collinear")

    cov = dst_c.T @ src_c / src.shape[0]
    u, s, vt = np.linalg.svd(cov)
    d = np.ones(2)
    if np.linalg.det(u @ vt) < 0:
        d[-1] = -1.0
    rot = u @ np.diag(d) @ vt
    var_src = (src_c ** 2).sum() / src.shape[0]
    scale = float((s * d).sum() / var_src)
    shift = mu_dst - scale * rot @ mu_src
    return scale, rot, shift


def _warp_similarity(img: np.ndarray, scale: float, rot: np.ndarray,
                     shift: np.ndarray, out_shape: tuple[int, int]) -> np.ndarray:
    """Resample ``img`` under the forward map p -> scale * R p + t.

    Inverse mapping with bilinear interpolation; sample coordinates are
    clamped to the source bounds, which replicates the border outward.
    """
    out_h, out_w = int(out_shape[0]), int(out_shape[1])
    src_h, src_w = img.shape
    ys, xs = np.meshgrid(np.arange(out_h, dtype=np.float64),
                         np.arange(out_w, dtype=np.float64), indexing="ij")
    # invert: p_src = (1/s) * R^T (p_dst - t)
    dx = xs - shift[0]
    dy = ys - shift[1]
    inv = 1.0 / scale
    sx = inv * (rot[0, 0] * dx + rot[1, 0] * dy)
    sy = inv * (rot[0, 1] * dx + rot[1, 1] * dy)

    sx = np.clip(sx, 0.0, src_w - 1.0)
    sy = np.clip(sy, 0.0, src_h - 1.0)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, src_w - 1)
    y1 = np.minimum(y0 + 1, src_h - 1)
    fx = sx - x0
    fy = sy - y0

    top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
    bottom = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy


def _bonafide_face(rng: np.random.Generator, width: int, height: int,
                   template: np.ndarray) -> np.ndarray:
    img = _bandlimited_background(rng, width, height)
    for brow in (template[17:22], template[22:27]):
        _draw_brow_core(rng, img, brow)
        _draw_strokes(rng, img, brow)
    # per-image exposure gain, as photos of different subjects would have;
    # the percentile stretch is invariant to it, raw scores are not
    gain = rng.uniform(0.65, 1.0)
    return np.clip(gain * img, 0.0, 255.0)


def _bandlimited_background(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    """Smooth skin-like texture: white noise through a Gaussian low-pass."""
    noise = rng.standard_normal((height, width))
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.fftfreq(width)[None, :]
    cutoff = 32.0 / max(width, height)  # keep wavelengths of roughly 8+ px
    lowpass = np.exp(-((fx ** 2 + fy ** 2) / (cutoff ** 2)))
    smooth = np.real(np.fft.ifft2(np.fft.fft2(noise) * lowpass))
    std = smooth.std()
    if std > 0:
        smooth = smooth / std
    return 150.0 + 6.0 * smooth


def _draw_brow_core(rng: np.random.Generator, img: np.ndarray,
                    brow_points: np.ndarray) -> None:
    """Darken a fat smooth core along the brow arch.

    The core sits at the template positions shared by every subject and is
    wide enough to survive the <= 2 px morph misalignment, so it keeps the
    darkest pixels of morphs and bonafide aligned: the black-clip percentile
    anchors on it in both classes and only the fine strokes decorrelate.
    """
    height, width = img.shape
    darkness = rng.uniform(8.0, 14.0)
    sigma = 3.0
    pad = 4.0 * sigma
    x_lo, y_lo = brow_points.min(axis=0) - pad
    x_hi, y_hi = brow_points.max(axis=0) + pad
    px0, py0 = max(int(x_lo), 0), max(int(y_lo), 0)
    px1, py1 = min(int(x_hi) + 1, width), min(int(y_hi) + 1, height)
    yy, xx = np.mgrid[py0:py1, px0:px1]

    d2 = np.full((py1 - py0, px1 - px0), np.inf)
    for (ax, ay), (bx, by) in zip(brow_points[:-1], brow_points[1:]):
        vx, vy = bx - ax, by - ay
        norm2 = vx * vx + vy * vy
        t = np.clip(((xx - ax) * vx + (yy - ay) * vy) / norm2, 0.0, 1.0)
        d2 = np.minimum(d2, (xx - (ax + t * vx)) ** 2 + (yy - (ay + t * vy)) ** 2)

    coverage = 0.92 * np.exp(-d2 / (2.0 * sigma * sigma))
    patch = img[py0:py1, px0:px1]
    img[py0:py1, px0:px1] = patch * (1.0 - coverage) + darkness * coverage


def _draw_strokes(rng: np.random.Generator, img: np.ndarray, brow_points: np.ndarray) -> None:
    """Composite a dense patchwork of short anti-aliased strokes on one brow.

    Stroke intensities span a wide range below the background level, so the
    field reads as hair-like texture whose fine structure is unique per
    subject; blending two faces averages it and thins the spectrum.
    """
    height, width = img.shape
    x_lo, y_lo = brow_points.min(axis=0)
    x_hi, y_hi = brow_points.max(axis=0)
    for k in range(400):
        cx = rng.uniform(x_lo, x_hi)
        cy = rng.uniform(y_lo, y_hi)
        half = rng.uniform(2.5, 5.5)
        angle = rng.uniform(0.0, np.pi)
        thickness = rng.uniform(0.5, 0.9) if k % 2 == 0 else rng.uniform(1.2, 2.0)
        darkness = rng.uniform(20.0, 140.0)

        ux, uy = math.cos(angle), math.sin(angle)
        pad = half + 3.0 * thickness
        px0 = max(int(math.floor(cx - pad)), 0)
        px1 = min(int(math.ceil(cx + pad)) + 1, width)
        py0 = max(int(math.floor(cy - pad)), 0)
        py1 = min(int(math.ceil(cy + pad)) + 1, height)
        if px0 >= px1 or py0 >= py1:
            continue

        yy, xx = np.mgrid[py0:py1, px0:px1]
        rx = xx - cx
        ry = yy - cy
        along = np.clip(rx * ux + ry * uy, -half, half)
        d2 = (rx - along * ux) ** 2 + (ry - along * uy) ** 2
        coverage = np.exp(-d2 / (2.0 * thickness * thickness))
        patch = img[py0:py1, px0:px1]
        img[py0:py1, px0:px1] = patch * (1.0 - coverage) + darkness * coverage

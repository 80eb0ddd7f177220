"""68-point facial landmark ingestion and eyebrow-region cropping.

A landmark set is a (68, 2) float array of (x, y) pixel coordinates in the
iBUG-68 annotation order; the eyebrows occupy indices 17..26 (17..21 for the
brow on the left of the image, 22..26 for the right one). Both brows are
covered by a single crop rectangle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateRegion, MalformedFile, OutOfBounds, WrongPointCount

N_POINTS = 68
EYEBROW_INDICES = slice(17, 27)
MIN_CROP_WIDTH = 8
MIN_CROP_HEIGHT = 4
DEFAULT_MARGIN = 0.10


@dataclass(frozen=True)
class CropRect:
    """Half-open pixel rectangle: columns [x0, x0+width), rows [y0, y0+height)."""

    x0: int
    y0: int
    width: int
    height: int


def parse_landmarks(source, fmt: str = "pts") -> np.ndarray:
    """Parse a landmark file into a (68, 2) float array.

    Args:
        source: bytes, str, or a readable binary/text stream.
        fmt: "pts" (iBUG annotation format) or "json" (array of 68 [x, y]).

    Raises:
        MalformedFile: the content does not follow the declared format.
        WrongPointCount: the file does not declare/carry exactly 68 points.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            text = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedFile(f"landmark file is not valid UTF-8: {exc}") from exc
    else:
        text = str(source)

    if fmt == "pts":
        return _parse_pts(text)
    if fmt == "json":
        return _parse_json(text)
    raise ValueError(f"unknown landmark format {fmt!r}; expected 'pts' or 'json'")


def load_landmarks(path) -> np.ndarray:
    """Load landmarks from a .pts or .json file, picking the format by suffix."""
    path = Path(path)
    fmt = "json" if path.suffix.lower() == ".json" else "pts"
    return parse_landmarks(path.read_bytes(), fmt=fmt)


def dump_pts(points: np.ndarray) -> str:
    """Serialize a (68, 2) landmark array in the iBUG .pts format."""
    pts = _check_points(points)
    lines = ["version: 1", f"n_points: {N_POINTS}", "{"]
    lines += [f"{x:.6f} {y:.6f}" for x, y in pts]
    lines.append("}")
    return "\n".join(lines) + "\n"


def eyebrow_rect(points: np.ndarray, img_w: int, img_h: int,
                 margin: float = DEFAULT_MARGIN) -> CropRect:
    """Bounding rectangle of the ten eyebrow landmarks, expanded by ``margin``.

    The box around landmarks 17..26 grows by ``margin * box_width`` on each
    side horizontally and ``margin * box_height`` vertically, is rounded
    half-away-from-zero to integer pixels and clamped to the image bounds.

    Raises:
        DegenerateRegion: the clamped rectangle is smaller than the minimum
            analyzable size (8 x 4 pixels).
    """
    pts = _check_points(points)
    if not 0.0 <= margin < 1.0:
        raise ValueError(f"margin must be in [0, 1), got {margin}")
    brows = pts[EYEBROW_INDICES]
    xmin, ymin = brows.min(axis=0)
    xmax, ymax = brows.max(axis=0)
    dx = margin * (xmax - xmin)
    dy = margin * (ymax - ymin)

    x0 = max(_round_half_away(xmin - dx), 0)
    y0 = max(_round_half_away(ymin - dy), 0)
    x1 = min(_round_half_away(xmax + dx), int(img_w))
    y1 = min(_round_half_away(ymax + dy), int(img_h))

    width, height = x1 - x0, y1 - y0
    if width < MIN_CROP_WIDTH or height < MIN_CROP_HEIGHT:
        raise DegenerateRegion(
            f"eyebrow region {width}x{height} after clamping; "
            f"need at least {MIN_CROP_WIDTH}x{MIN_CROP_HEIGHT}")
    return CropRect(x0=x0, y0=y0, width=width, height=height)


def crop(img: np.ndarray, rect: CropRect) -> np.ndarray:
    """Copy the pixels covered by ``rect`` out of a grayscale image."""
    arr = np.asarray(img, dtype=np.float64)
    h, w = arr.shape
    if (rect.x0 < 0 or rect.y0 < 0 or rect.width < 1 or rect.height < 1
            or rect.x0 + rect.width > w or rect.y0 + rect.height > h):
        raise OutOfBounds(f"rect {rect} does not fit inside a {w}x{h} image")
    return arr[rect.y0:rect.y0 + rect.height, rect.x0:rect.x0 + rect.width].copy()


def _round_half_away(v: float) -> int:
    if v >= 0:
        return int(math.floor(v + 0.5))
    return -int(math.floor(-v + 0.5))


def _check_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape != (N_POINTS, 2):
        raise WrongPointCount(f"expected ({N_POINTS}, 2) landmark array, got shape {pts.shape}")
    return pts


def _parse_pts(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    idx = 0
    if idx < len(lines) and lines[idx].lower().startswith("version"):
        idx += 1
    if idx >= len(lines) or not lines[idx].lower().startswith("n_points"):
        raise MalformedFile("missing 'n_points' header")
    try:
        declared = int(lines[idx].split(":", 1)[1])
    except (IndexError, ValueError) as exc:
        raise MalformedFile(f"unreadable n_points line: {lines[idx]!r}") from exc
    idx += 1
    if declared != N_POINTS:
        raise WrongPointCount(f"expected n_points: {N_POINTS}, file declares {declared}")
    if idx >= len(lines) or lines[idx] != "{":
        raise MalformedFile("missing opening '{'")
    idx += 1

    coords = []
    while idx < len(lines) and lines[idx] != "}":
        parts = lines[idx].split()
        if len(parts) != 2:
            raise MalformedFile(f"bad coordinate line: {lines[idx]!r}")
        try:
            coords.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise MalformedFile(f"bad coordinate line: {lines[idx]!r}") from exc
        idx += 1
    if idx >= len(lines):
        raise MalformedFile("missing closing '}'")
    if len(coords) != declared:
        raise MalformedFile(f"file declares {declared} points but lists {len(coords)}")
    return np.asarray(coords, dtype=np.float64)


def _parse_json(text: str) -> np.ndarray:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"invalid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedFile("top-level JSON value must be an array of [x, y] pairs")
    if len(data) != N_POINTS:
        raise WrongPointCount(f"expected {N_POINTS} points, got {len(data)}")
    coords = []
    for i, item in enumerate(data):
        if (not isinstance(item, (list, tuple)) or len(item) != 2
                or not all(isinstance(v, (int, float)) for v in item)):
            raise MalformedFile(f"entry {i} is not a two-number array: {item!r}")
        coords.append((float(item[0]), float(item[1])))
    return np.asarray(coords, dtype=np.float64)

import io
import json

import numpy as np
import pytest

from browmad.errors import (DegenerateRegion, MalformedFile, OutOfBounds,
                            WrongPointCount)
from browmad.landmarks import (CropRect, crop, dump_pts, eyebrow_rect,
                               load_landmarks, parse_landmarks)


def make_points(base_x=100.0, base_y=200.0):
    """68 points; eyebrows (17..26) spread over a known box."""
    pts = np.zeros((68, 2))
    pts[:, 0] = np.linspace(base_x, base_x + 60, 68)
    pts[:, 1] = np.linspace(base_y, base_y + 80, 68)
    return pts


def pts_text(points):
    return dump_pts(np.asarray(points, dtype=np.float64))


class TestParsePts:
    def test_round_trip(self):
        pts = make_points()
        parsed = parse_landmarks(pts_text(pts).encode(), fmt="pts")
        assert parsed.shape == (68, 2)
        assert np.allclose(parsed, pts)

    def test_accepts_stream(self):
        pts = make_points()
        parsed = parse_landmarks(io.BytesIO(pts_text(pts).encode()), fmt="pts")
        assert np.allclose(parsed, pts)

    def test_wrong_declared_count(self):
        text = "version: 1\nn_points: 5\n{\n1 2\n3 4\n5 6\n7 8\n9 10\n}\n"
        with pytest.raises(WrongPointCount):
            parse_landmarks(text.encode(), fmt="pts")

    def test_missing_brace(self):
        text = "version: 1\nn_points: 68\n" + "\n".join("1 2" for _ in range(68))
        with pytest.raises(MalformedFile):
            parse_landmarks(text.encode(), fmt="pts")

    def test_count_mismatch_with_header(self):
        text = "version: 1\nn_points: 68\n{\n" + "\n".join("1 2" for _ in range(60)) + "\n}\n"
        with pytest.raises(MalformedFile):
            parse_landmarks(text.encode(), fmt="pts")

    def test_garbage_coordinates(self):
        text = "version: 1\nn_points: 68\n{\n" + "\n".join("a b" for _ in range(68)) + "\n}\n"
        with pytest.raises(MalformedFile):
            parse_landmarks(text.encode(), fmt="pts")


class TestParseJson:
    def test_ordering_preserved(self):
        pairs = [[float(i), float(i * 2)] for i in range(68)]
        parsed = parse_landmarks(json.dumps(pairs).encode(), fmt="json")
        # point 17 is the 18th pair
        assert parsed[17, 0] == 17.0 and parsed[17, 1] == 34.0

    def test_wrong_length(self):
        with pytest.raises(WrongPointCount):
            parse_landmarks(json.dumps([[1, 2]] * 5).encode(), fmt="json")

    def test_not_an_array(self):
        with pytest.raises(MalformedFile):
            parse_landmarks(b'{"points": []}', fmt="json")

    def test_bad_entry(self):
        pairs = [[1.0, 2.0]] * 67 + [[1.0]]
        with pytest.raises(MalformedFile):
            parse_landmarks(json.dumps(pairs).encode(), fmt="json")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            parse_landmarks(b"", fmt="xml")


def test_load_landmarks_by_suffix(tmp_path):
    pts = make_points()
    pts_file = tmp_path / "a.pts"
    pts_file.write_text(pts_text(pts))
    json_file = tmp_path / "a.json"
    json_file.write_text(json.dumps(pts.tolist()))
    assert np.allclose(load_landmarks(pts_file), pts)
    assert np.allclose(load_landmarks(json_file), pts)


class TestEyebrowRect:
    def brows_spanning(self, x0, x1, y0, y1):
        """Landmarks whose eyebrow points exactly span the given box."""
        pts = make_points(300.0, 300.0)
        pts[17:27, 0] = np.linspace(x0, x1, 10)
        pts[17:27, 1] = np.linspace(y0, y1, 10)
        return pts

    def test_margin_expansion(self):
        # brow box 200 x 30 at (100, 80), margin 0.1 -> 240 x 36 at (80, 77)
        pts = self.brows_spanning(100, 300, 80, 110)
        rect = eyebrow_rect(pts, 640, 480, margin=0.1)
        assert rect == CropRect(x0=80, y0=77, width=240, height=36)

    def test_zero_margin_exact_bbox(self):
        pts = self.brows_spanning(100, 300, 80, 110)
        rect = eyebrow_rect(pts, 640, 480, margin=0.0)
        assert rect == CropRect(x0=100, y0=80, width=200, height=30)

    def test_clamped_at_top_edge(self):
        pts = self.brows_spanning(100, 300, 2, 32)
        rect = eyebrow_rect(pts, 640, 480, margin=0.5)
        assert rect.y0 == 0

    def test_degenerate_region(self):
        pts = make_points()
        pts[17:27] = [50.0, 60.0]  # all brow points identical
        with pytest.raises(DegenerateRegion):
            eyebrow_rect(pts, 640, 480, margin=0.0)

    def test_contains_brow_points(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            pts = make_points(200, 200)
            pts[17:27, 0] = rng.uniform(100, 400, 10)
            pts[17:27, 1] = rng.uniform(100, 300, 10)
            rect = eyebrow_rect(pts, 640, 480, margin=rng.uniform(0, 0.4))
            brows = pts[17:27]
            # integer rounding can shave at most half a pixel per side
            assert np.all(brows[:, 0] >= rect.x0 - 0.5)
            assert np.all(brows[:, 0] <= rect.x0 + rect.width + 0.5)
            assert np.all(brows[:, 1] >= rect.y0 - 0.5)
            assert np.all(brows[:, 1] <= rect.y0 + rect.height + 0.5)

    def test_translation_equivariance(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            pts = make_points(120, 90)
            pts[17:27, 0] = rng.uniform(60, 200, 10)
            pts[17:27, 1] = rng.uniform(50, 120, 10)
            dx, dy = int(rng.integers(1, 40)), int(rng.integers(1, 40))
            base = eyebrow_rect(pts, 640, 480, margin=0.2)
            moved = eyebrow_rect(pts + [dx, dy], 640 + dx, 480 + dy, margin=0.2)
            assert (moved.x0, moved.y0) == (base.x0 + dx, base.y0 + dy)
            assert (moved.width, moved.height) == (base.width, base.height)

    def test_invalid_margin(self):
        with pytest.raises(ValueError):
            eyebrow_rect(make_points(), 640, 480, margin=1.5)


class TestCrop:
    def test_full_image_identity(self):
        rng = np.random.default_rng(5)
        img = rng.uniform(0, 255, size=(16, 20))
        out = crop(img, CropRect(0, 0, 20, 16))
        assert np.array_equal(out, img)

    def test_one_past_edge(self):
        img = np.zeros((16, 20))
        with pytest.raises(OutOfBounds):
            crop(img, CropRect(1, 0, 20, 16))

    def test_interior_indexing(self):
        img = np.arange(16, dtype=np.float64).reshape(4, 4)
        out = crop(img, CropRect(1, 1, 2, 2))
        assert np.array_equal(out, [[5.0, 6.0], [9.0, 10.0]])

    def test_returns_copy(self):
        img = np.zeros((8, 8))
        out = crop(img, CropRect(0, 0, 8, 8))
        out[0, 0] = 1.0
        assert img[0, 0] == 0.0

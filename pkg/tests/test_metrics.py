import numpy as np
import pytest

from browmad.errors import EmptyScores
from browmad.metrics import (DetCurve, LabeledScores, acer, apcer, bpcer,
                             bpcer_at_apcer, d_eer, det_curve, save_det_csv,
                             save_det_svg)
from oracles import (count_apcer, count_bpcer, sweep_bpcer_at_apcer, sweep_eer)

SIX_SCORES = dict(bonafide=[0.7, 0.8, 0.9], morph=[0.2, 0.3, 0.75])


def six_curve():
    return det_curve(LabeledScores(bonafide=np.array(SIX_SCORES["bonafide"]),
                                   morph=np.array(SIX_SCORES["morph"])))


class TestRates:
    def test_apcer_direct_count(self):
        assert apcer([0.1, 0.2, 0.9], 0.5) == pytest.approx(1 / 3)

    def test_apcer_at_minus_inf(self):
        assert apcer([0.1, 0.2, 0.9], -np.inf) == 1.0

    def test_apcer_from_confusion_counts(self):
        # 48 wrongly classified morphs out of 964
        scores = [1.0] * 48 + [0.0] * 916
        assert apcer(scores, 0.5) == pytest.approx(48 / 964)
        assert apcer(scores, 0.5) == pytest.approx(0.0498, abs=5e-5)

    def test_bpcer_direct_count(self):
        assert bpcer([0.7, 0.8, 0.9], 0.75) == pytest.approx(1 / 3)

    def test_bpcer_at_minus_inf(self):
        assert bpcer([0.7, 0.8, 0.9], -np.inf) == 0.0

    def test_bpcer_from_confusion_counts(self):
        # 40 wrongly classified bonafide out of 720
        scores = [0.0] * 40 + [1.0] * 680
        assert bpcer(scores, 0.5) == pytest.approx(40 / 720)
        assert bpcer(scores, 0.5) == pytest.approx(0.0556, abs=5e-5)

    def test_empty_lists_rejected(self):
        with pytest.raises(EmptyScores):
            apcer([], 0.0)
        with pytest.raises(EmptyScores):
            bpcer([], 0.0)


class TestAcer:
    def test_confusion_count_example(self):
        value = acer(48 / 964, 40 / 720)
        assert value == pytest.approx(0.0527, abs=5e-5)
        assert round(100 * value, 1) == 5.3  # printed tables round their own inputs

    def test_zeros(self):
        assert acer(0.0, 0.0) == 0.0

    def test_mean(self):
        assert acer(1.0, 0.0) == 0.5

    def test_range_check(self):
        with pytest.raises(ValueError):
            acer(1.2, 0.0)


class TestDetCurve:
    def test_sentinel_endpoints(self):
        curve = six_curve()
        assert curve.thresholds[0] == -np.inf and curve.thresholds[-1] == np.inf
        assert (curve.apcer[0], curve.bpcer[0]) == (1.0, 0.0)
        assert (curve.apcer[-1], curve.bpcer[-1]) == (0.0, 1.0)

    def test_monotonicity(self):
        rng = np.random.default_rng(40)
        for _ in range(50):
            curve = det_curve(LabeledScores(rng.standard_normal(rng.integers(2, 30)),
                                            rng.standard_normal(rng.integers(2, 30))))
            assert np.all(np.diff(curve.apcer) <= 0.0)
            assert np.all(np.diff(curve.bpcer) >= 0.0)

    def test_separable_passes_through_origin(self):
        curve = det_curve(LabeledScores(bonafide=np.array([1.0]), morph=np.array([0.0])))
        assert any(a == 0.0 and b == 0.0 for a, b in zip(curve.apcer, curve.bpcer))

    def test_identical_multisets_interior_sum_to_one(self):
        scores = np.array([0.1, 0.4, 0.9])
        curve = det_curve(LabeledScores(bonafide=scores, morph=scores.copy()))
        interior = slice(1, -1)
        assert np.allclose(curve.apcer[interior] + curve.bpcer[interior], 1.0)

    def test_six_score_curve_contains_third_point(self):
        curve = six_curve()
        assert any(a == pytest.approx(1 / 3) and b == pytest.approx(1 / 3)
                   for a, b in zip(curve.apcer, curve.bpcer))

    def test_rates_match_recount_exactly(self):
        rng = np.random.default_rng(41)
        bona = rng.standard_normal(17)
        morph = rng.standard_normal(23)
        curve = det_curve(LabeledScores(bona, morph))
        for t, a, b in zip(curve.thresholds, curve.apcer, curve.bpcer):
            assert a == count_apcer(morph, t)
            assert b == count_bpcer(bona, t)

    def test_monotone_transform_leaves_points_unchanged(self):
        rng = np.random.default_rng(42)
        bona = rng.standard_normal(20)
        morph = rng.standard_normal(15)
        base = det_curve(LabeledScores(bona, morph))
        for a, b in ((2.0, -1.0), (0.5, 3.0), (10.0, 0.0)):
            moved = det_curve(LabeledScores(a * bona + b, a * morph + b))
            assert np.array_equal(moved.apcer, base.apcer)
            assert np.array_equal(moved.bpcer, base.bpcer)


class TestDEer:
    def test_separable(self):
        curve = det_curve(LabeledScores(np.array([1.0, 2.0]), np.array([-1.0, 0.0])))
        assert d_eer(curve) == 0.0

    def test_identical_distributions(self):
        scores = np.array([0.0, 1.0, 2.0])
        curve = det_curve(LabeledScores(scores, scores.copy()))
        assert d_eer(curve) == pytest.approx(0.5)

    def test_six_score_example(self):
        assert d_eer(six_curve()) == pytest.approx(1 / 3)

    def test_matches_exhaustive_sweep(self):
        rng = np.random.default_rng(43)
        for _ in range(100):
            n_b, n_m = int(rng.integers(3, 50)), int(rng.integers(3, 50))
            bona = rng.standard_normal(n_b) + rng.uniform(0, 1.5)
            morph = rng.standard_normal(n_m)
            value = d_eer(det_curve(LabeledScores(bona, morph)))
            assert abs(value - sweep_eer(bona, morph)) <= 1.0 / min(n_b, n_m) + 1e-12


class TestBpcerAtApcer:
    def test_separable(self):
        curve = det_curve(LabeledScores(np.array([1.0, 2.0]), np.array([-1.0, 0.0])))
        assert bpcer_at_apcer(curve, 0.10) == 0.0

    def test_identical_distributions(self):
        scores = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0])
        curve = det_curve(LabeledScores(scores, scores.copy()))
        assert bpcer_at_apcer(curve, 0.10) == pytest.approx(0.90)

    def test_six_score_bpcer20(self):
        assert bpcer_at_apcer(six_curve(), 0.05) == pytest.approx(1 / 3)

    def test_matches_sweep_within_one_step(self):
        rng = np.random.default_rng(44)
        for _ in range(100):
            n_b, n_m = int(rng.integers(3, 50)), int(rng.integers(3, 50))
            bona = rng.standard_normal(n_b) + rng.uniform(0, 1.0)
            morph = rng.standard_normal(n_m)
            curve = det_curve(LabeledScores(bona, morph))
            for target in (0.10, 0.05):
                value = bpcer_at_apcer(curve, target)
                ref = sweep_bpcer_at_apcer(bona, morph, target)
                assert abs(value - ref) <= 1.0 / n_b + 1e-12

    def test_rejects_target_out_of_range(self):
        with pytest.raises(ValueError):
            bpcer_at_apcer(six_curve(), 0.0)


class TestExports:
    def test_csv_header_and_rows(self, tmp_path):
        path = tmp_path / "det.csv"
        save_det_csv(six_curve(), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "threshold,apcer,bpcer"
        assert lines[1].startswith("-inf,")
        assert len(lines) == 1 + six_curve().thresholds.size

    def test_svg_written(self, tmp_path):
        path = tmp_path / "det.svg"
        save_det_svg(six_curve(), path)
        assert path.read_text().lstrip().startswith("<?xml")

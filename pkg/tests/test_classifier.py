import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from browmad.classifier import (LABEL_BONAFIDE, LABEL_MORPH, Threshold,
                                calibrate_eer_threshold, decide)
from browmad.errors import EmptyScores
from browmad.metrics import apcer, bpcer
from oracles import count_apcer, count_bpcer, sweep_eer


class TestDecide:
    def test_above_threshold_is_bonafide(self):
        assert decide(10.0, Threshold(5.0)).label == LABEL_BONAFIDE

    def test_below_threshold_is_morph(self):
        assert decide(3.0, Threshold(5.0)).label == LABEL_MORPH

    def test_tie_goes_to_bonafide(self):
        d = decide(5.0, Threshold(5.0))
        assert d.label == LABEL_BONAFIDE
        assert d.threshold_used == 5.0

    def test_carries_score(self):
        assert decide(1.25, Threshold(9.0)).score == 1.25


class TestCalibrate:
    def test_separable_returns_gap_midpoint(self):
        t = calibrate_eer_threshold([0.8, 0.9], [0.1, 0.2])
        assert t.value == pytest.approx(0.5)
        assert apcer([0.1, 0.2], t.value) == 0.0
        assert bpcer([0.8, 0.9], t.value) == 0.0

    def test_overlapping_example(self):
        bona = [0.7, 0.8, 0.9]
        morph = [0.2, 0.3, 0.75]
        t = calibrate_eer_threshold(bona, morph).value
        assert 0.7 < t <= 0.75
        assert apcer(morph, t) == pytest.approx(1 / 3)
        assert bpcer(bona, t) == pytest.approx(1 / 3)
        # matches the exhaustive sweep
        assert sweep_eer(bona, morph) == pytest.approx(1 / 3)

    def test_empty_scores(self):
        with pytest.raises(EmptyScores):
            calibrate_eer_threshold([0.5], [])
        with pytest.raises(EmptyScores):
            calibrate_eer_threshold([], [0.5])

    def test_all_identical_scores(self):
        t = calibrate_eer_threshold([1.0, 1.0], [1.0, 1.0])
        assert t.value == 1.0

    def test_balance_at_threshold(self):
        rng = np.random.default_rng(30)
        for _ in range(200):
            n_b = int(rng.integers(2, 40))
            n_m = int(rng.integers(2, 40))
            bona = rng.standard_normal(n_b) + 0.5
            morph = rng.standard_normal(n_m)
            t = calibrate_eer_threshold(bona, morph).value
            gap = abs(count_apcer(morph, t) - count_bpcer(bona, t))
            assert gap <= 1.0 / min(n_b, n_m) + 1e-12

    @settings(deadline=None, max_examples=80)
    @given(st.lists(st.integers(0, 10_000), min_size=2, max_size=30, unique=True),
           st.lists(st.integers(10_001, 20_000), min_size=2, max_size=30, unique=True),
           st.floats(min_value=0.1, max_value=50.0),
           st.floats(min_value=-100.0, max_value=100.0))
    def test_affine_invariance_of_decisions(self, bona_raw, morph_raw, a, b):
        # integer-valued scores keep the affine map exact in float arithmetic
        bona = [float(v) for v in bona_raw]
        morph = [float(v) for v in morph_raw]
        t1 = calibrate_eer_threshold(bona, morph).value
        t2 = calibrate_eer_threshold([a * v + b for v in bona],
                                     [a * v + b for v in morph]).value
        for s in bona + morph:
            assert decide(s, Threshold(t1)).label == decide(a * s + b, Threshold(t2)).label

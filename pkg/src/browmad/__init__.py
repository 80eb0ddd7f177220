"""browmad: single-image morph detection from eyebrow-region frequency content.

Pipeline: crop the eyebrow region via 68-point landmarks, convert to
grayscale, optionally stretch contrast, and score the crop by its
normalized 2D DFT magnitude sum. Morphs score lower than bonafide images;
detection quality is reported with ISO/IEC 30107-3 metrics.
"""

from .classifier import (Decision, Threshold, calibrate_eer_threshold, decide)
from .harness import (ManifestEntry, PipelineConfig, ScoreRecord, SplitSpec,
                      build_eval_report, evaluate, load_manifest, score_dataset,
                      split_eval, split_train_test)
from .imagecore import ClipConfig, contrast_stretch, to_grayscale
from .landmarks import CropRect, crop, eyebrow_rect, load_landmarks, parse_landmarks
from .metrics import (DetCurve, EvalSummary, LabeledScores, acer, apcer, bpcer,
                      bpcer_at_apcer, d_eer, det_curve)
from .spectral import (SpectralConfig, apply_low_freq_crop, averaged_spectrum,
                       dft2_magnitude, fft_shift, frequency_score)
from .synthmorph import (BlendSpec, blend_morph, gaussian_blur_circular,
                         make_synthetic_pair_set, write_synthetic_set)

__version__ = "0.1.0"

__all__ = [
    "BlendSpec", "ClipConfig", "CropRect", "Decision", "DetCurve", "EvalSummary",
    "LabeledScores", "ManifestEntry", "PipelineConfig", "ScoreRecord",
    "SpectralConfig", "SplitSpec", "Threshold", "acer", "apcer",
    "apply_low_freq_crop", "averaged_spectrum", "blend_morph", "bpcer",
    "bpcer_at_apcer", "build_eval_report", "calibrate_eer_threshold",
    "contrast_stretch", "crop", "d_eer", "decide", "det_curve", "dft2_magnitude",
    "evaluate", "eyebrow_rect", "fft_shift", "frequency_score",
    "gaussian_blur_circular", "load_landmarks", "load_manifest",
    "make_synthetic_pair_set", "parse_landmarks", "score_dataset", "split_eval",
    "split_train_test", "to_grayscale", "write_synthetic_set",
]

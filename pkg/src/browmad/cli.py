"""Command-line interface.

Subcommands: score, eval, calibrate, split-eval, crop, spectrum, synth.
Exit codes: 0 success, 1 validation error, 2 per-entry failures while
scoring in non-strict mode.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness, imagecore, imgio, landmarks, metrics, spectral, synthmorph
from .classifier import LABEL_BONAFIDE, LABEL_MORPH, calibrate_eer_threshold
from .errors import BrowmadError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARTIAL = 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits with 2 on bad args; remap
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    try:
        return args.func(args)
    except (BrowmadError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="browmad", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score every manifest entry")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", help="pipeline config JSON file (defaults apply if omitted)")
    p.add_argument("--out", required=True, help="output scores CSV")
    p.add_argument("--strict", action="store_true", help="abort on the first failing entry")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="evaluate a scores CSV")
    p.add_argument("--scores", required=True)
    p.add_argument("--group-by", default="all", choices=harness.GROUP_MODES)
    p.add_argument("--det-out", help="DET curve CSV (per group, suffixed when several)")
    p.add_argument("--svg", help="DET curve SVG plot")
    p.add_argument("--report", help="report JSON path (printed to stdout if omitted)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("calibrate", help="calibrate an EER threshold from scores")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True, help="threshold JSON path")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("split-eval", help="train/test split evaluation")
    p.add_argument("--manifest", required=True)
    p.add_argument("--train-fraction", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", help="pipeline config JSON file")
    p.add_argument("--out", help="report JSON path (printed to stdout if omitted)")
    p.set_defaults(func=cmd_split_eval)

    p = sub.add_parser("crop", help="write the eyebrow crop of one image")
    p.add_argument("--image", required=True)
    p.add_argument("--landmarks", required=True)
    p.add_argument("--out", required=True, help="output PNG")
    p.add_argument("--margin", type=float, default=landmarks.DEFAULT_MARGIN)
    p.set_defaults(func=cmd_crop)

    p = sub.add_parser("spectrum", help="write the magnitude spectrum of the eyebrow crop")
    p.add_argument("--image", required=True)
    p.add_argument("--landmarks", required=True)
    p.add_argument("--out", required=True, help="output PNG (log-scaled, DC centred)")
    p.add_argument("--csv", help="also dump the raw magnitude grid as CSV")
    p.add_argument("--margin", type=float, default=landmarks.DEFAULT_MARGIN)
    p.add_argument("--no-contrast", action="store_true",
                   help="skip the contrast enhancement step")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("synth", help="generate a synthetic bonafide/morph dataset")
    p.add_argument("--n", type=int, required=True, help="number of bonafide images")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--size", default="256x256", help="image size as WxH")
    p.set_defaults(func=cmd_synth)
    return parser


def cmd_score(args) -> int:
    cfg = _load_config(args.config)
    entries = harness.load_manifest(args.manifest)
    records, failures = harness.score_dataset(entries, cfg, strict=args.strict)
    harness.write_scores_csv(records, args.out)
    print(f"scored {len(records)} of {len(entries)} entries -> {args.out}")
    for failure in failures:
        print(f"failed: {failure.image_path}: {failure.reason}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_eval(args) -> int:
    records = harness.read_scores_csv(args.scores)
    report = harness.build_eval_report(records, group_by=args.group_by)
    results = harness.evaluate(records, group_by=args.group_by)

    if args.det_out:
        for name, curve_path in _per_group_paths(args.det_out, results):
            metrics.save_det_csv(results[name].curve, curve_path)
    if args.svg:
        for name, svg_path in _per_group_paths(args.svg, results):
            metrics.save_det_svg(results[name].curve, svg_path, title=f"DET ({name})")

    _print_summary_table(report["groups"])
    if args.report:
        harness.write_report_json(report, args.report)
    else:
        print(json.dumps(report, sort_keys=True, indent=2))
    return EXIT_OK


def cmd_calibrate(args) -> int:
    records = harness.read_scores_csv(args.scores)
    bona = [r.score for r in records if r.label == LABEL_BONAFIDE]
    morph = [r.score for r in records if r.label == LABEL_MORPH]
    threshold = calibrate_eer_threshold(bona, morph)
    out = {
        "schema_version": harness.SCHEMA_VERSION,
        "threshold": threshold.value,
        "polarity": "morph iff score < threshold",
        "counts": {"n_bonafide": len(bona), "n_morph": len(morph)},
    }
    harness.write_report_json(out, args.out)
    print(f"threshold {threshold.value:.6g} -> {args.out}")
    return EXIT_OK


def cmd_split_eval(args) -> int:
    cfg = _load_config(args.config)
    train_fraction = args.train_fraction
    seed = args.seed
    if cfg.split is not None:
        train_fraction = train_fraction if train_fraction is not None else cfg.split.train_fraction
        seed = seed if seed is not None else cfg.split.seed
    if train_fraction is None or seed is None:
        raise ValueError("--train-fraction and --seed are required "
                         "(or provide a config with a split section)")
    entries = harness.load_manifest(args.manifest)
    records, failures = harness.score_dataset(entries, cfg)
    for failure in failures:
        print(f"failed: {failure.image_path}: {failure.reason}", file=sys.stderr)
    report = harness.split_eval(records, train_fraction, seed)
    if args.out:
        harness.write_report_json(report, args.out)
    else:
        print(json.dumps(report, sort_keys=True, indent=2))
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_crop(args) -> int:
    region = _eyebrow_region(args.image, args.landmarks, args.margin)
    imgio.save_gray_png(region, args.out)
    print(f"wrote {args.out} ({region.shape[1]}x{region.shape[0]})")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    region = _eyebrow_region(args.image, args.landmarks, args.margin)
    if not args.no_contrast:
        region = imagecore.contrast_stretch(region)
    spec = spectral.fft_shift(spectral.dft2_magnitude(region))
    spectral.save_spectrum_png(spec, args.out)
    if args.csv:
        spectral.save_spectrum_csv(spec, args.csv)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        w_text, h_text = args.size.lower().split("x")
        size = (int(w_text), int(h_text))
    except ValueError as exc:
        raise ValueError(f"--size must look like 256x256, got {args.size!r}") from exc
    dataset = synthmorph.make_synthetic_pair_set(args.n, args.seed, size)
    manifest = synthmorph.write_synthetic_set(dataset, args.out)
    print(f"wrote {len(dataset.bonafide)} bonafide + {len(dataset.morphs)} morphs; "
          f"manifest at {manifest}")
    return EXIT_OK


def _load_config(path) -> harness.PipelineConfig:
    if not path:
        return harness.PipelineConfig()
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return harness.PipelineConfig.from_dict(data)


def _eyebrow_region(image_path, landmark_path, margin):
    gray = imagecore.to_grayscale(imgio.load_rgb(image_path))
    points = landmarks.load_landmarks(landmark_path)
    h, w = gray.shape
    rect = landmarks.eyebrow_rect(points, w, h, margin)
    return landmarks.crop(gray, rect)


def _per_group_paths(base: str, results: dict):
    """One output path per group: the base name gains a .<group> suffix
    when the evaluation produced more than one group."""
    names = sorted(results)
    if len(names) == 1:
        return [(names[0], base)]
    base_path = Path(base)
    return [(name, base_path.with_name(f"{base_path.stem}.{name}{base_path.suffix}"))
            for name in names]


def _print_summary_table(groups: dict) -> None:
    header = (f"{'group':<16} {'D-EER%':>7} {'BPCER10%':>9} {'BPCER20%':>9} "
              f"{'APCER%':>7} {'BPCER%':>7} {'ACER%':>6} {'n_bona':>7} {'n_morph':>8}")
    print(header)
    for name in sorted(groups):
        g = groups[name]
        counts = g["counts"]
        print(f"{name:<16} {100 * g['d_eer']:>7.1f} {100 * g['bpcer10']:>9.1f} "
              f"{100 * g['bpcer20']:>9.1f} {100 * g['apcer_at_threshold']:>7.1f} "
              f"{100 * g['bpcer_at_threshold']:>7.1f} {100 * g['acer']:>6.1f} "
              f"{counts['n_bonafide']:>7} {counts['n_morph']:>8}")


if __name__ == "__main__":
    raise SystemExit(main())

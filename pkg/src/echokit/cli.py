"""Command-line interface.

Exit codes: 0 success, 1 usage/validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ValidationError
from .fracfilter import FracParams, denoise
from .glcm import GlcmConfig, feature_field, write_feature_csv
from .imagecore import load_image, load_mask, save_image, save_mask, generate_phantom
from .knnseg import (DistanceMetric, KnnModel, build_training_set, postprocess,
                     predict_field)
from .metrics import confusion_stats, quality_report
from .nnclassifier import TrainConfig, init_network, save_network, train
from .noise import SpeckleParams, apply_speckle
from .pipeline import (_acquire, _phantom_from_dict, _snap, load_config,
                       run_pipeline, write_outputs)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="echokit",
                     description="Ultrasound-style image processing toolkit")
    parser.add_argument("--version", action="version", version=f"echokit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("phantom", help="render a synthetic phantom and its truth mask")
    p.add_argument("--spec", required=True, help="JSON file with the phantom spec")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("speckle", help="apply multiplicative speckle noise")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--floor", type=float, default=0.05)
    p.add_argument("--out", required=True)

    p = sub.add_parser("denoise", help="fractional-order integral denoising")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--order", type=float, default=0.5)
    p.add_argument("--mask", type=int, choices=(3, 5), default=3)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--out", required=True)

    p = sub.add_parser("features", help="per-pixel texture features as CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--levels", type=int, default=16)
    p.add_argument("--window", type=int, default=9)
    p.add_argument("--out", required=True)

    p = sub.add_parser("segment", help="KNN pixel segmentation")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--train-mask", dest="train_mask", required=True,
                   help="ground-truth mask PGM used to sample training pixels")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--metric", choices=("euclidean", "chi_square", "cosine", "minkowski"),
                   default="euclidean")
    p.add_argument("--p", type=float, default=None, help="minkowski exponent")
    p.add_argument("--levels", type=int, default=16)
    p.add_argument("--window", type=int, default=9)
    p.add_argument("--per-class", dest="per_class", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-area", dest="min_area", type=int, default=0,
                   help="post-process: remove foreground specks below this area")
    p.add_argument("--positive", type=int, default=2,
                   help="foreground class for post-processing")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train-nn", help="train the boundary-pixel classifier")
    p.add_argument("--features", required=True, help="CSV, one sample per row")
    p.add_argument("--labels", required=True, help="CSV with one 0/1 label per row")
    p.add_argument("--epochs", type=int, required=True)
    p.add_argument("--lr", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--init-scale", dest="init_scale", type=float, default=0.1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="image-quality report as JSON")
    p.add_argument("--ref", required=True)
    p.add_argument("--proc", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("pipeline", help="run the full pipeline from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="output directory (overrides config)")

    p = sub.add_parser("ksweep", help="segmentation accuracy for several k")
    p.add_argument("--config", required=True)
    p.add_argument("--k", required=True, help="comma-separated k values, e.g. 1,3,5")
    p.add_argument("--out", required=True)
    return parser


def _load_csv_matrix(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="ascii", newline="") as f:
        for r in csv.reader(f):
            if not r:
                continue
            try:
                rows.append([float(v) for v in r])
            except ValueError:
                continue  # header
    if not rows:
        raise ValidationError(f"no numeric rows in {path}")
    return np.asarray(rows, dtype=np.float64)


def _cmd_phantom(args) -> None:
    spec_doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    spec = _phantom_from_dict(spec_doc)
    img, mask = generate_phantom(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_image(img, out / "phantom.pgm")
    save_mask(mask, out / "mask.pgm")
    print(f"wrote {out / 'phantom.pgm'} and {out / 'mask.pgm'}")


def _cmd_speckle(args) -> None:
    img = load_image(args.input)
    params = SpeckleParams(sigma=args.sigma, seed=args.seed, floor=args.floor)
    save_image(apply_speckle(img, params), args.out)


def _cmd_denoise(args) -> None:
    img = load_image(args.input)
    params = FracParams(order=args.order, mask_size=args.mask, eps=args.eps)
    save_image(denoise(img, params), args.out)


def _cmd_features(args) -> None:
    img = load_image(args.input)
    cfg = GlcmConfig(levels=args.levels, window=args.window)
    write_feature_csv(feature_field(img, cfg), args.out)


def _cmd_segment(args) -> None:
    img = load_image(args.input)
    truth = load_mask(args.train_mask)
    if (truth.height, truth.width) != (img.height, img.width):
        raise ValidationError("training mask dimensions do not match the image")
    cfg = GlcmConfig(levels=args.levels, window=args.window)
    feats = feature_field(img, cfg)
    training = build_training_set(feats, truth, args.per_class, args.seed)
    model = KnnModel(training, k=args.k, metric=DistanceMetric(args.metric, args.p))
    mask = predict_field(model, feats)
    if args.min_area > 0:
        mask = postprocess(mask, args.min_area, args.positive)
    save_mask(mask, args.out)


def _cmd_train_nn(args) -> None:
    x = _load_csv_matrix(args.features)
    y = _load_csv_matrix(args.labels).ravel()
    if x.shape[0] != y.shape[0]:
        raise ValidationError("feature and label files have different row counts")
    cfg = TrainConfig(learning_rate=args.lr, epochs=args.epochs, seed=args.seed,
                      init_scale=args.init_scale)
    net0 = init_network(args.seed, args.init_scale, n_inputs=x.shape[1])
    net, trace = train(net0, x, y, cfg)
    save_network(net, args.out)
    print(f"final loss {trace[-1]!r} after {len(trace)} epochs")


def _cmd_evaluate(args) -> None:
    ref = load_image(args.ref)
    proc = load_image(args.proc)
    q = quality_report(ref, proc)
    Path(args.out).write_text(json.dumps(q.to_dict(), indent=2, sort_keys=True) + "\n",
                              encoding="ascii")


def _cmd_pipeline(args) -> None:
    cfg = load_config(args.config)
    out_dir = args.out or cfg.output_dir
    if not out_dir:
        raise ValidationError("no output directory: pass --out or set output_dir in the config")
    report = run_pipeline(cfg)
    write_outputs(report, out_dir)
    print(f"wrote report to {Path(out_dir) / 'report.json'}")


def _cmd_ksweep(args) -> None:
    cfg = load_config(args.config)
    try:
        ks = [int(v) for v in args.k.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"--k must be comma-separated integers, got {args.k!r}") from None
    if not ks:
        raise ValidationError("--k lists no values")
    raw, truth = _acquire(cfg.input)
    if truth is None:
        raise ValidationError("ksweep needs an input with a ground-truth mask")
    clean = _snap(raw)
    noisy = _snap(apply_speckle(clean, cfg.speckle))
    denoised = _snap(denoise(noisy, cfg.frac))
    feats = feature_field(denoised, cfg.glcm)
    training = build_training_set(feats, truth, cfg.knn.per_class, cfg.knn.seed)
    positive = cfg.knn.positive_class
    with open(args.out, "w", encoding="ascii") as f:
        f.write("k,accuracy,sensitivity,specificity\n")
        for k in ks:
            model = KnnModel(training, k=k, metric=cfg.knn.distance_metric())
            mask = predict_field(model, feats)
            if cfg.knn.min_area > 0:
                mask = postprocess(mask, cfg.knn.min_area, positive)
            stats = confusion_stats(mask, truth, positive)
            f.write(f"{k},{stats.accuracy!r},{stats.sensitivity!r},"
                    f"{stats.specificity!r}\n")
    print(f"wrote {args.out}")


_COMMANDS = {
    "phantom": _cmd_phantom,
    "speckle": _cmd_speckle,
    "denoise": _cmd_denoise,
    "features": _cmd_features,
    "segment": _cmd_segment,
    "train-nn": _cmd_train_nn,
    "evaluate": _cmd_evaluate,
    "pipeline": _cmd_pipeline,
    "ksweep": _cmd_ksweep,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ValidationError as e:
        print(f"echokit {args.command}: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"echokit {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

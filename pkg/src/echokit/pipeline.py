"""End-to-end runs: acquire input, speckle, denoise, extract features,
KNN-segment, optionally NN-classify boundary pixels, and assemble a report.

A run is a pure function of its config: every random choice is seeded from
the config, and stage images are snapped to the 8-bit grid they are saved
with, so a pipeline run and the equivalent chain of CLI subcommands produce
byte-identical artifacts. Wall-clock timings are the only nondeterministic
part of a report and live under their own key.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import EchokitError, PipelineError, ValidationError
from .fracfilter import FracParams, denoise
from .glcm import FEATURE_NAMES, FeatureVector, GlcmConfig, Offset, feature_field
from .imagecore import (GrayImage, LabelMask, PhantomSpec, checkerboard_mask,
                        generate_checkerboard, generate_phantom, load_image,
                        load_mask, save_image, save_mask)
from .knnseg import (DistanceMetric, KnnModel, build_training_set, postprocess,
                     predict_field, save_training_csv)
from .metrics import ConfusionStats, confusion_stats, quality_report
from .nnclassifier import (MlpNetwork, RegressionStats, TrainConfig,
                           forward_batch, init_network, inter_intra_labels,
                           nn_feature_stack, regression_stats, save_loss_csv,
                           save_network, train)
from .noise import SpeckleParams, apply_speckle

__all__ = [
    "KnnSettings",
    "NnSettings",
    "InputConfig",
    "PipelineConfig",
    "RunReport",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "run_pipeline",
    "report_dict",
    "report_json",
    "report_text",
    "write_outputs",
]


@dataclass(frozen=True)
class KnnSettings:
    k: int = 5
    metric: str = "euclidean"
    p: float | None = None
    per_class: int = 100
    seed: int = 0
    min_area: int = 0  # 0 disables post-processing in the pipeline
    positive_class: int = 2

    def distance_metric(self) -> DistanceMetric:
        return DistanceMetric(self.metric, self.p)

    def __post_init__(self):
        self.distance_metric()  # validate early
        if self.per_class < 1:
            raise ValidationError("knn per_class must be >= 1")
        if self.min_area < 0:
            raise ValidationError("knn min_area must be >= 0")
        if self.positive_class < 0:
            raise ValidationError("knn positive_class must be >= 0")


@dataclass(frozen=True)
class NnSettings:
    enabled: bool = True
    epochs: int = 600
    learning_rate: float = 0.5
    seed: int = 0
    init_scale: float = 0.1
    per_class: int = 150
    eval_count: int = 400

    def train_config(self) -> TrainConfig:
        return TrainConfig(self.learning_rate, self.epochs, self.seed, self.init_scale)

    def __post_init__(self):
        if self.enabled:
            self.train_config()
        if self.per_class < 1 or self.eval_count < 2:
            raise ValidationError("nn per_class must be >= 1 and eval_count >= 2")


@dataclass(frozen=True)
class InputConfig:
    """Input source: a file (with optional truth mask), a checkerboard, or
    a phantom spec."""

    kind: str
    path: str | None = None
    mask: str | None = None
    width: int = 0
    height: int = 0
    tile: int = 0
    lo: float = 0.0
    hi: float = 1.0
    phantom: PhantomSpec | None = None

    def __post_init__(self):
        if self.kind not in ("file", "checkerboard", "phantom"):
            raise ValidationError(f"unknown input kind {self.kind!r}")
        if self.kind == "file" and not self.path:
            raise ValidationError("file input needs a path")
        if self.kind == "phantom" and self.phantom is None:
            raise ValidationError("phantom input needs a spec")


@dataclass(frozen=True)
class PipelineConfig:
    input: InputConfig
    speckle: SpeckleParams = SpeckleParams(sigma=0.15, seed=1)
    frac: FracParams = FracParams()
    glcm: GlcmConfig = GlcmConfig()
    knn: KnnSettings = KnnSettings()
    nn: NnSettings = NnSettings()
    output_dir: str | None = None


# ---------------------------------------------------------------------------
# Strict JSON <-> config mapping
# ---------------------------------------------------------------------------


def _check_keys(raw: dict, allowed, where: str) -> None:
    unknown = set(raw) - set(allowed)
    if unknown:
        raise ValidationError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _phantom_from_dict(raw: dict) -> PhantomSpec:
    allowed = ("width", "height", "cx", "cy", "rx", "ry", "wall",
               "intensities", "texture", "seed")
    _check_keys(raw, allowed, "input.spec")
    try:
        width, height = int(raw["width"]), int(raw["height"])
        rx, ry = float(raw["rx"]), float(raw["ry"])
        wall = float(raw["wall"])
    except KeyError as e:
        raise ValidationError(f"input.spec is missing required key {e}") from None
    kwargs = {}
    if "intensities" in raw:
        kwargs["intensities"] = tuple(raw["intensities"])
    if "texture" in raw:
        kwargs["texture"] = tuple(raw["texture"])
    return PhantomSpec(width=width, height=height,
                       cx=float(raw.get("cx", (width - 1) / 2)),
                       cy=float(raw.get("cy", (height - 1) / 2)),
                       rx=rx, ry=ry, wall=wall, seed=int(raw.get("seed", 0)),
                       **kwargs)


def _input_from_dict(raw: dict) -> InputConfig:
    _check_keys(raw, ("kind", "path", "mask", "width", "height", "tile",
                      "lo", "hi", "spec"), "input")
    kind = raw.get("kind")
    if kind == "file":
        return InputConfig(kind="file", path=raw.get("path"), mask=raw.get("mask"))
    if kind == "checkerboard":
        return InputConfig(kind="checkerboard", width=int(raw["width"]),
                           height=int(raw["height"]), tile=int(raw["tile"]),
                           lo=float(raw.get("lo", 0.4)), hi=float(raw.get("hi", 0.6)))
    if kind == "phantom":
        if "spec" not in raw:
            raise ValidationError("phantom input needs a 'spec' object")
        return InputConfig(kind="phantom", phantom=_phantom_from_dict(raw["spec"]))
    raise ValidationError(f"unknown input kind {kind!r}")


def config_from_dict(d: dict) -> PipelineConfig:
    """Parse a config document; unknown keys anywhere are errors."""
    if not isinstance(d, dict):
        raise ValidationError("config must be a JSON object")
    _check_keys(d, ("input", "speckle", "frac", "glcm", "knn", "nn", "output_dir"),
                "config")
    if "input" not in d:
        raise ValidationError("config needs an 'input' section")
    inp = _input_from_dict(d["input"])

    s = dict(d.get("speckle", {}))
    _check_keys(s, ("sigma", "seed", "floor"), "speckle")
    speckle = SpeckleParams(sigma=float(s.get("sigma", 0.15)),
                            seed=int(s.get("seed", 1)),
                            floor=float(s.get("floor", 0.05)))

    fr = dict(d.get("frac", {}))
    _check_keys(fr, ("order", "mask_size", "eps"), "frac")
    frac = FracParams(order=float(fr.get("order", 0.5)),
                      mask_size=int(fr.get("mask_size", 3)),
                      eps=float(fr.get("eps", 1e-6)))

    g = dict(d.get("glcm", {}))
    _check_keys(g, ("levels", "offsets", "window", "symmetric"), "glcm")
    offsets = tuple(Offset(int(o[0]), int(o[1])) for o in
                    g.get("offsets", [[1, 0], [0, 1], [1, 1], [1, -1]]))
    glcm = GlcmConfig(levels=int(g.get("levels", 16)), offsets=offsets,
                      window=int(g.get("window", 9)),
                      symmetric=bool(g.get("symmetric", True)))

    k = dict(d.get("knn", {}))
    _check_keys(k, ("k", "metric", "p", "per_class", "seed", "min_area",
                    "positive_class"), "knn")
    knn = KnnSettings(k=int(k.get("k", 5)), metric=str(k.get("metric", "euclidean")),
                      p=None if k.get("p") is None else float(k["p"]),
                      per_class=int(k.get("per_class", 100)),
                      seed=int(k.get("seed", 0)), min_area=int(k.get("min_area", 0)),
                      positive_class=int(k.get("positive_class", 2)))

    n = dict(d.get("nn", {}))
    _check_keys(n, ("enabled", "epochs", "learning_rate", "seed", "init_scale",
                    "per_class", "eval_count"), "nn")
    nn = NnSettings(enabled=bool(n.get("enabled", True)),
                    epochs=int(n.get("epochs", 600)),
                    learning_rate=float(n.get("learning_rate", 0.5)),
                    seed=int(n.get("seed", 0)),
                    init_scale=float(n.get("init_scale", 0.1)),
                    per_class=int(n.get("per_class", 150)),
                    eval_count=int(n.get("eval_count", 400)))

    out = d.get("output_dir")
    if out is not None and not isinstance(out, str):
        raise ValidationError("output_dir must be a string or null")
    return PipelineConfig(input=inp, speckle=speckle, frac=frac, glcm=glcm,
                          knn=knn, nn=nn, output_dir=out)


def config_to_dict(cfg: PipelineConfig) -> dict:
    inp: dict = {"kind": cfg.input.kind}
    if cfg.input.kind == "file":
        inp["path"] = cfg.input.path
        inp["mask"] = cfg.input.mask
    elif cfg.input.kind == "checkerboard":
        inp.update(width=cfg.input.width, height=cfg.input.height,
                   tile=cfg.input.tile, lo=cfg.input.lo, hi=cfg.input.hi)
    else:
        ph = cfg.input.phantom
        inp["spec"] = {"width": ph.width, "height": ph.height, "cx": ph.cx,
                       "cy": ph.cy, "rx": ph.rx, "ry": ph.ry, "wall": ph.wall,
                       "intensities": list(ph.intensities),
                       "texture": list(ph.texture), "seed": ph.seed}
    return {
        "input": inp,
        "speckle": {"sigma": cfg.speckle.sigma, "seed": cfg.speckle.seed,
                    "floor": cfg.speckle.floor},
        "frac": {"order": cfg.frac.order, "mask_size": cfg.frac.mask_size,
                 "eps": cfg.frac.eps},
        "glcm": {"levels": cfg.glcm.levels,
                 "offsets": [[o.dx, o.dy] for o in cfg.glcm.offsets],
                 "window": cfg.glcm.window, "symmetric": cfg.glcm.symmetric},
        "knn": {"k": cfg.knn.k, "metric": cfg.knn.metric, "p": cfg.knn.p,
                "per_class": cfg.knn.per_class, "seed": cfg.knn.seed,
                "min_area": cfg.knn.min_area,
                "positive_class": cfg.knn.positive_class},
        "nn": {"enabled": cfg.nn.enabled, "epochs": cfg.nn.epochs,
               "learning_rate": cfg.nn.learning_rate, "seed": cfg.nn.seed,
               "init_scale": cfg.nn.init_scale, "per_class": cfg.nn.per_class,
               "eval_count": cfg.nn.eval_count},
        "output_dir": cfg.output_dir,
    }


def load_config(path) -> PipelineConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"config file is not valid JSON: {e}") from None
    return config_from_dict(doc)


# ---------------------------------------------------------------------------
# The run itself
# ---------------------------------------------------------------------------


@dataclass
class RunReport:
    config: dict
    version: str = __version__
    clean: GrayImage | None = None
    noisy: GrayImage | None = None
    denoised: GrayImage | None = None
    truth: LabelMask | None = None
    quality_noisy: object = None
    quality_denoised: object = None
    features_by_class: list | None = None
    knn_mask_raw: LabelMask | None = None
    knn_mask: LabelMask | None = None
    knn_confusion: ConfusionStats | None = None
    knn_agreement: float | None = None
    knn_skip_reason: str | None = None
    nn_mask: LabelMask | None = None
    nn_confusion: ConfusionStats | None = None
    nn_regression: RegressionStats | None = None
    nn_network: MlpNetwork | None = None
    nn_loss_trace: list = field(default_factory=list)
    nn_train_x: np.ndarray | None = None
    nn_train_y: np.ndarray | None = None
    regression_points: np.ndarray | None = None
    nn_skip_reason: str | None = None
    training_set: object = None
    timings: dict = field(default_factory=dict)


def _snap(img: GrayImage) -> GrayImage:
    """Snap intensities to the 8-bit grid used by stage files, so in-memory
    stages equal their saved-and-reloaded counterparts bit for bit."""
    return GrayImage(np.rint(img.data * 255.0) / 255.0)


def _acquire(inp: InputConfig) -> tuple[GrayImage, LabelMask | None]:
    if inp.kind == "file":
        img = load_image(inp.path)
        mask = load_mask(inp.mask) if inp.mask else None
        return img, mask
    if inp.kind == "checkerboard":
        img = generate_checkerboard(inp.width, inp.height, inp.tile, inp.lo, inp.hi)
        return img, checkerboard_mask(inp.width, inp.height, inp.tile)
    return generate_phantom(inp.phantom)


def _balanced_sample(flags: np.ndarray, per_class: int, seed: int) -> np.ndarray:
    """Indices of up to per_class pixels for each of flag values 0 and 1."""
    rng = np.random.default_rng(seed)
    picks = []
    for value in (0, 1):
        idx = np.flatnonzero(flags == value)
        if len(idx) == 0:
            return np.empty(0, dtype=np.int64)
        picks.append(rng.choice(idx, size=min(per_class, len(idx)), replace=False))
    return np.concatenate(picks)


def run_pipeline(cfg: PipelineConfig) -> RunReport:
    """Execute every stage and assemble the report.

    Stage failures are re-raised with the stage name prefixed; no partial
    report is returned.
    """
    report = RunReport(config=config_to_dict(cfg))
    stage = "input"
    try:
        t0 = time.perf_counter()
        raw, truth = _acquire(cfg.input)
        clean = _snap(raw)
        report.clean, report.truth = clean, truth
        report.timings[stage] = time.perf_counter() - t0

        stage = "speckle"
        t0 = time.perf_counter()
        noisy = _snap(apply_speckle(clean, cfg.speckle))
        report.noisy = noisy
        report.timings[stage] = time.perf_counter() - t0

        stage = "denoise"
        t0 = time.perf_counter()
        denoised = _snap(denoise(noisy, cfg.frac))
        report.denoised = denoised
        report.timings[stage] = time.perf_counter() - t0

        stage = "features"
        t0 = time.perf_counter()
        feats = feature_field(denoised, cfg.glcm)
        if truth is not None:
            summary = []
            for c in range(truth.n_classes):
                sel = feats[truth.labels == c]
                mean = sel.mean(axis=0)
                summary.append((c, FeatureVector(*[float(v) for v in mean])))
            report.features_by_class = summary
        report.timings[stage] = time.perf_counter() - t0

        stage = "knn"
        t0 = time.perf_counter()
        if truth is None:
            report.knn_skip_reason = "no ground-truth mask available for this input"
        else:
            training = build_training_set(feats, truth, cfg.knn.per_class, cfg.knn.seed)
            report.training_set = training
            model = KnnModel(training, k=cfg.knn.k, metric=cfg.knn.distance_metric())
            raw_mask = predict_field(model, feats)
            report.knn_mask_raw = raw_mask
            positive = cfg.knn.positive_class
            if positive >= truth.n_classes:
                raise ValidationError(
                    f"positive_class {positive} not present in a {truth.n_classes}-class mask")
            if cfg.knn.min_area > 0:
                report.knn_mask = postprocess(raw_mask, cfg.knn.min_area, positive)
            else:
                report.knn_mask = raw_mask

            report.knn_confusion = confusion_stats(report.knn_mask, truth, positive)
            report.knn_agreement = float(
                np.mean(report.knn_mask.labels == truth.labels))
        report.timings[stage] = time.perf_counter() - t0

        stage = "nn"
        t0 = time.perf_counter()
        if not cfg.nn.enabled:
            report.nn_skip_reason = "disabled in config"
        elif truth is None:
            report.nn_skip_reason = "no ground-truth mask available for this input"
        else:
            boundary = inter_intra_labels(truth)
            sample = _balanced_sample(boundary.ravel(), cfg.nn.per_class,
                                      cfg.nn.seed)
            if sample.size == 0:
                report.nn_skip_reason = "ground truth has no boundary pixels"
            else:
                stack = nn_feature_stack(denoised, cfg.glcm.levels)
                h, w, d = stack.shape
                flat = stack.reshape(h * w, d)
                x_train = flat[sample]
                y_train = boundary.ravel()[sample].astype(np.float64)
                net0 = init_network(cfg.nn.seed, cfg.nn.init_scale, n_inputs=d)
                net, trace = train(net0, x_train, y_train, cfg.nn.train_config())
                report.nn_network = net
                report.nn_loss_trace = trace
                report.nn_train_x = x_train
                report.nn_train_y = y_train
                yhat = forward_batch(net, flat)
                nn_mask = LabelMask((yhat >= 0.5).astype(np.int64).reshape(h, w),
                                    n_classes=2)
                report.nn_mask = nn_mask
                report.nn_confusion = confusion_stats(
                    nn_mask, LabelMask(boundary, n_classes=2), 1)
                eval_idx = _balanced_sample(boundary.ravel(),
                                            cfg.nn.eval_count // 2,
                                            cfg.nn.seed + 1)
                pred = yhat[eval_idx]
                target = boundary.ravel()[eval_idx].astype(np.float64)
                report.nn_regression = regression_stats(pred, target)
                report.regression_points = np.column_stack([pred, target])
        report.timings[stage] = time.perf_counter() - t0

        stage = "metrics"
        t0 = time.perf_counter()
        report.quality_noisy = quality_report(clean, noisy)
        report.quality_denoised = quality_report(clean, denoised)
        report.timings[stage] = time.perf_counter() - t0
    except EchokitError as e:
        raise type(e)(f"[stage {stage}] {e}") from e
    except Exception as e:
        raise PipelineError(f"[stage {stage}] {type(e).__name__}: {e}") from e
    return report


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------


def report_dict(report: RunReport) -> dict:
    """JSON-ready view of a report. Everything except "timings" is a pure
    function of the config."""
    def conf(c):
        return None if c is None else c.to_dict()

    d = {
        "version": report.version,
        "config": report.config,
        "quality": {
            "noisy_vs_clean": report.quality_noisy.to_dict(),
            "denoised_vs_clean": report.quality_denoised.to_dict(),
        },
        "features_by_class": None,
        "knn": None,
        "nn": None,
        "timings": report.timings,
    }
    if report.features_by_class is not None:
        d["features_by_class"] = [
            {"class": c, **{name: getattr(fv, name) for name in FEATURE_NAMES}}
            for c, fv in report.features_by_class]
    if report.knn_skip_reason:
        d["knn"] = {"skipped": report.knn_skip_reason}
    else:
        d["knn"] = {"confusion": conf(report.knn_confusion),
                    "agreement": report.knn_agreement,
                    "positive_class": report.config["knn"]["positive_class"]}
    if report.nn_skip_reason:
        d["nn"] = {"skipped": report.nn_skip_reason}
    else:
        d["nn"] = {"confusion": conf(report.nn_confusion),
                   "regression": None if report.nn_regression is None else {
                       "slope": report.nn_regression.slope,
                       "intercept": report.nn_regression.intercept,
                       "r": report.nn_regression.r},
                   "final_loss": report.nn_loss_trace[-1] if report.nn_loss_trace else None,
                   "epochs": len(report.nn_loss_trace)}
    return d


def report_json(report: RunReport) -> str:
    return json.dumps(report_dict(report), indent=2, sort_keys=True) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "undefined"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def report_text(report: RunReport) -> str:
    """Human-readable tables: quality per stage, per-class features, and
    classifier performance in percent."""
    lines = [f"echokit {report.version} pipeline report", ""]

    lines.append("Image quality (vs clean reference)")
    cols = ["stage", "mse", "psnr_db", "snr_db", "ssim", "lmse", "residual_variance"]
    rows = [cols]
    for name, q in (("noisy", report.quality_noisy), ("denoised", report.quality_denoised)):
        qd = q.to_dict()
        rows.append([name] + [_fmt(qd[c]) for c in cols[1:]])
    widths = [max(len(r[i]) for r in rows) for i in range(len(cols))]
    for r in rows:
        lines.append("  " + "  ".join(v.ljust(widths[i]) for i, v in enumerate(r)))
    lines.append("")

    if report.features_by_class is not None:
        lines.append("Mean texture features per class")
        rows = [["class", *FEATURE_NAMES]]
        for c, fv in report.features_by_class:
            rows.append([str(c)] + [_fmt(getattr(fv, n)) for n in FEATURE_NAMES])
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        for r in rows:
            lines.append("  " + "  ".join(v.ljust(widths[i]) for i, v in enumerate(r)))
        lines.append("")

    lines.append("Classifier performance (percent)")
    rows = [["classifier", "accuracy", "sensitivity", "specificity"]]

    def pct(v):
        return "undefined" if v is None else f"{100.0 * v:.2f}"

    if report.knn_confusion is not None:
        c = report.knn_confusion
        rows.append(["knn", pct(c.accuracy), pct(c.sensitivity), pct(c.specificity)])
    else:
        rows.append(["knn", "skipped", "", ""])
    if report.nn_confusion is not None:
        c = report.nn_confusion
        rows.append(["nn", pct(c.accuracy), pct(c.sensitivity), pct(c.specificity)])
    else:
        rows.append(["nn", "skipped", "", ""])
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        lines.append("  " + "  ".join(v.ljust(widths[i]) for i, v in enumerate(r)))
    lines.append("")

    if report.nn_regression is not None:
        s = report.nn_regression
        lines.append(f"NN regression fit: slope {_fmt(s.slope)}, "
                     f"intercept {_fmt(s.intercept)}, r {_fmt(s.r)}")
        lines.append("")
    return "\n".join(lines)


def write_outputs(report: RunReport, out_dir) -> None:
    """Write report.json/report.txt, stage images, masks, and plot CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report_json(report), encoding="ascii")
    (out / "report.txt").write_text(report_text(report), encoding="ascii")

    save_image(report.clean, out / "clean.pgm")
    save_image(report.noisy, out / "noisy.pgm")
    save_image(report.denoised, out / "denoised.pgm")
    if report.truth is not None:
        save_mask(report.truth, out / "truth_mask.pgm")
    if report.knn_mask_raw is not None:
        save_mask(report.knn_mask_raw, out / "knn_mask_raw.pgm")
    if report.knn_mask is not None:
        save_mask(report.knn_mask, out / "knn_mask.pgm")
    if report.nn_mask is not None:
        save_mask(report.nn_mask, out / "nn_mask.pgm")
    if report.training_set is not None:
        save_training_csv(report.training_set, out / "knn_training.csv")

    with open(out / "quality_metrics.csv", "w", encoding="ascii") as f:
        f.write("stage,mse,psnr_db,snr_db,ssim,lmse,residual_variance\n")
        for name, q in (("noisy", report.quality_noisy),
                        ("denoised", report.quality_denoised)):
            qd = q.to_dict()
            vals = [qd[k] for k in ("mse", "psnr_db", "snr_db", "ssim", "lmse",
                                    "residual_variance")]
            f.write(name + "," + ",".join("" if v is None else repr(float(v))
                                          for v in vals) + "\n")

    if report.features_by_class is not None:
        with open(out / "features_by_class.csv", "w", encoding="ascii") as f:
            f.write("class," + ",".join(FEATURE_NAMES) + "\n")
            for c, fv in report.features_by_class:
                f.write(f"{c}," + ",".join(repr(float(getattr(fv, n)))
                                           for n in FEATURE_NAMES) + "\n")

    if report.nn_network is not None:
        save_network(report.nn_network, out / "nn_weights.txt")
        save_loss_csv(report.nn_loss_trace, out / "loss_trace.csv")
        with open(out / "nn_train_features.csv", "w", encoding="ascii") as f:
            d = report.nn_train_x.shape[1]
            f.write(",".join(f"f{i}" for i in range(d)) + "\n")
            for row in report.nn_train_x:
                f.write(",".join(repr(float(v)) for v in row) + "\n")
        with open(out / "nn_train_labels.csv", "w", encoding="ascii") as f:
            f.write("label\n")
            for v in report.nn_train_y:
                f.write(f"{int(v)}\n")
    if report.regression_points is not None:
        with open(out / "regression_points.csv", "w", encoding="ascii") as f:
            f.write("predicted,target\n")
            for p, t in report.regression_points:
                f.write(f"{float(p)!r},{float(t)!r}\n")

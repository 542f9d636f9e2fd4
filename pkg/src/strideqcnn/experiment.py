"""End-to-end experiment driver.

Per image: bilinear downscale, Frobenius normalization, quantum
convolution, quantum pooling, quantum fully connected readout, argmax
class. The identical classical pipeline runs beside it; the report
records accuracies, prediction agreement, and feature-error statistics,
as a plain-text report plus a CSV table plus rendered figures.

Layers communicate through classical feature-map checkpoints (measurement
and re-encoding between layers), so each layer's registers are reclaimed.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .encoding import ImageTensor
from .layers import (
    ConvConfig,
    FcWeights,
    FeatureMap,
    PoolConfig,
    classify,
    conv_layer,
    fc_layer,
    pool_layer,
)
from .mnist import load_mnist
from .reference import (
    bilinear_resize,
    classify_ref,
    conv2d_ref,
    crop_for_stride,
    fc_ref,
    load_weights,
    pool_ref,
    save_weights,
    train_fc,
)
from .resources import estimate_resources, format_budget

DEFAULT_KERNEL = np.array([[1.0, -1.0], [1.0, -1.0]]) / 2.0

TIMING_MARKER = "# timing (excluded from the determinism contract)"


@dataclass
class ExperimentConfig:
    """Fully resolved experiment settings; echoed into every report."""

    images: str = ""
    labels: str = ""
    digits: tuple[int, int] = (6, 9)
    samples: int = 128
    train_samples: int = 128
    image_side: int = 4
    kernel_side: int = 2
    conv_stride: int = 2
    pool_window: int = 2
    pool_stride: int = 1
    angle_bits: int = 12
    qae_bits: int = 6
    backend: str = "exact"
    shots: int | None = None
    seed: int = 7
    epochs: int = 200
    learning_rate: float = 0.5
    weights_path: str | None = None
    out_dir: str = "runs"
    jobs: int = 1
    figures: bool = True
    sweep: tuple[tuple[int, int], ...] = ()

    def conv_config(self, stride: int | None = None) -> ConvConfig:
        return ConvConfig(self.image_side, self.kernel_side,
                          stride or self.conv_stride,
                          angle_bits=self.angle_bits, qae_bits=self.qae_bits,
                          backend=self.backend)

    def validate(self) -> None:
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.train_samples < 0:
            raise ValueError("train_samples must be >= 0")
        for path in (self.images, self.labels):
            if not path or not os.path.exists(path):
                raise FileNotFoundError(f"dataset file not found: {path!r}")
        if self.weights_path and not os.path.exists(self.weights_path):
            raise FileNotFoundError(f"weights file not found: {self.weights_path!r}")
        self.conv_config()  # divisibility checks run before any simulation


def parse_config_file(path) -> dict[str, str]:
    """Plain-text key = value settings; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {raw.rstrip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
    return values


def _parse_sweep(text: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for chunk in text.replace(";", " ").split():
        a, b = chunk.split(",")
        pairs.append((int(a), int(b)))
    return tuple(pairs)


def config_from_mapping(values: dict[str, str],
                        base: ExperimentConfig | None = None) -> ExperimentConfig:
    config = base or ExperimentConfig()
    converters = {
        "digits": lambda v: tuple(int(d) for d in v.replace(",", " ").split()),
        "sweep": _parse_sweep,
        "shots": lambda v: None if v.lower() in ("none", "") else int(v),
        "weights_path": lambda v: None if v.lower() in ("none", "") else v,
    }
    valid = {f.name: f.type for f in fields(ExperimentConfig)}
    updates = {}
    for key, raw in values.items():
        if key not in valid:
            raise ValueError(f"unknown config key {key!r}")
        if key in converters:
            updates[key] = converters[key](raw)
        else:
            current = getattr(config, key)
            if isinstance(current, bool):
                updates[key] = raw.lower() in ("1", "true", "yes", "on")
            elif isinstance(current, int):
                updates[key] = int(raw)
            elif isinstance(current, float):
                updates[key] = float(raw)
            else:
                updates[key] = raw
    return replace(config, **updates)


# ---------------------------------------------------------------------------
# Dataset assembly


def select_samples(config: ExperimentConfig):
    """Deterministic train/eval split of the digit pair.

    Matching images are shuffled by the seed; the first train_samples feed
    weight training and the next `samples` are evaluated.
    """
    images, labels = load_mnist(config.images, config.labels)
    mask = np.isin(labels, config.digits)
    indices = np.flatnonzero(mask)
    rng = np.random.default_rng(config.seed)
    indices = indices[rng.permutation(len(indices))]
    needed = config.train_samples + config.samples
    if len(indices) < needed:
        raise ValueError(
            f"dataset holds {len(indices)} images of digits {config.digits}, "
            f"need {needed} (train_samples + samples)"
        )
    train_idx = indices[:config.train_samples]
    eval_idx = indices[config.train_samples:needed]

    def prepare(idx):
        resized = np.stack([
            bilinear_resize(images[i].astype(float), config.image_side)
            for i in idx
        ])
        normalized = np.stack([ImageTensor(im).normalized() for im in resized])
        binary = np.array([0 if labels[i] == config.digits[0] else 1
                           for i in idx])
        return normalized, binary

    return prepare(train_idx), prepare(eval_idx)


def classical_features(image_norm: np.ndarray, kernel: np.ndarray,
                       conv_stride: int, pool_window: int, pool_stride: int):
    """(conv map, cropped conv map, pooled sum map) of the classical path."""
    kernel_norm = kernel / np.sqrt((kernel ** 2).sum())
    conv = conv2d_ref(image_norm, kernel_norm, conv_stride)
    cropped = crop_for_stride(conv, pool_window, pool_stride)
    pooled = pool_ref(cropped, pool_window, pool_stride, "sum")
    return conv, cropped, pooled


def train_pipeline_weights(config: ExperimentConfig, train_set,
                           kernel: np.ndarray) -> np.ndarray:
    (features, labels) = train_set
    pooled = np.stack([
        classical_features(f, kernel, config.conv_stride, config.pool_window,
                           config.pool_stride)[2]
        for f in features
    ])
    weights, _ = train_fc(pooled, labels, 2, epochs=config.epochs,
                          seed=config.seed,
                          learning_rate=config.learning_rate)
    return weights


# ---------------------------------------------------------------------------
# Per-image pipeline


@dataclass
class ImageResult:
    index: int
    true_label: int
    classical_prediction: int
    quantum_prediction: int
    max_feature_error: float
    uncompute_fidelity: float


def _clip_unit(features: FeatureMap) -> FeatureMap:
    """Clamp float overshoot of the scaled domain before re-encoding."""
    limit = features.rotation_scale
    clipped = np.clip(features.values, -limit, limit)
    return FeatureMap(clipped, features.rotation_scale, features.source,
                      features.min_uncompute_fidelity)


def run_single_image(args) -> ImageResult:
    (index, image_norm, true_label, kernel, conv_cfg_fields, pool_window,
     pool_stride, weights, shots, seed) = args
    conv_cfg = ConvConfig(**conv_cfg_fields)
    conv_ref, cropped_ref, pooled_ref = classical_features(
        image_norm, kernel, conv_cfg.stride, pool_window, pool_stride)
    classical_pred = classify_ref(fc_ref(pooled_ref, weights))

    qconv = conv_layer(conv_cfg, image_norm, kernel)
    conv_error = float(np.abs(qconv.values - conv_ref).max())
    cropped = FeatureMap(
        crop_for_stride(qconv.values, pool_window, pool_stride),
        qconv.rotation_scale, qconv.source, qconv.min_uncompute_fidelity)
    pool_cfg = PoolConfig(cropped.side, pool_window, pool_stride,
                          qae_bits=conv_cfg.qae_bits, backend=conv_cfg.backend)
    qpool = pool_layer(pool_cfg, _clip_unit(cropped))
    pool_error = float(np.abs(qpool.values - pooled_ref).max())
    probs = fc_layer(_clip_unit(qpool), FcWeights(weights),
                     shots=shots, seed=seed + index if shots else 0)
    quantum_pred = classify(probs)
    return ImageResult(
        index=index,
        true_label=true_label,
        classical_prediction=classical_pred,
        quantum_prediction=quantum_pred,
        max_feature_error=max(conv_error, pool_error),
        uncompute_fidelity=min(qconv.min_uncompute_fidelity,
                               qpool.min_uncompute_fidelity),
    )


@dataclass
class RunSummary:
    stride_conv: int
    stride_pool: int
    accuracy_classical: float
    accuracy_quantum: float
    agreement: float
    max_feature_error: float
    mean_feature_error: float
    min_uncompute_fidelity: float
    pool_crop: tuple[int, int] | None
    results: list[ImageResult] = field(default_factory=list)


def run_pipeline(config: ExperimentConfig, *, stride_conv: int | None = None,
                 stride_pool: int | None = None) -> RunSummary:
    """One full evaluation at a stride setting; deterministic per seed."""
    stride_conv = stride_conv or config.conv_stride
    stride_pool = stride_pool or config.pool_stride
    conv_cfg = config.conv_config(stride_conv)
    train_set, (eval_images, eval_labels) = select_samples(config)
    kernel = DEFAULT_KERNEL
    if config.weights_path:
        weights, _ = load_weights(config.weights_path)
    else:
        local = replace(config, conv_stride=stride_conv,
                        pool_stride=stride_pool)
        weights = train_pipeline_weights(local, train_set, kernel)

    conv_side = conv_cfg.out_side
    usable = conv_side - (conv_side - config.pool_window) % stride_pool
    pool_crop = (conv_side, usable) if usable != conv_side else None

    cfg_fields = dict(m=conv_cfg.m, n=conv_cfg.n, stride=conv_cfg.stride,
                      angle_bits=conv_cfg.angle_bits, qae_bits=conv_cfg.qae_bits,
                      backend=conv_cfg.backend)
    tasks = [
        (i, eval_images[i], int(eval_labels[i]), kernel, cfg_fields,
         config.pool_window, stride_pool, weights, config.shots, config.seed)
        for i in range(len(eval_images))
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(run_single_image, tasks))
    else:
        results = [run_single_image(task) for task in tasks]

    truths = np.array([r.true_label for r in results])
    classical = np.array([r.classical_prediction for r in results])
    quantum = np.array([r.quantum_prediction for r in results])
    errors = np.array([r.max_feature_error for r in results])
    return RunSummary(
        stride_conv=stride_conv,
        stride_pool=stride_pool,
        accuracy_classical=float((classical == truths).mean()),
        accuracy_quantum=float((quantum == truths).mean()),
        agreement=float((classical == quantum).mean()),
        max_feature_error=float(errors.max()),
        mean_feature_error=float(errors.mean()),
        min_uncompute_fidelity=float(min(r.uncompute_fidelity for r in results)),
        pool_crop=pool_crop,
        results=results,
    )


# ---------------------------------------------------------------------------
# Reports


def _config_lines(config: ExperimentConfig) -> list[str]:
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(config, f.name)
        if f.name == "sweep":
            value = ";".join(f"{a},{b}" for a, b in value) or "none"
        lines.append(f"{f.name} = {value}")
    return lines


def write_results_csv(path, results: list[ImageResult]) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("index,true_label,classical_prediction,quantum_prediction,"
                 "max_feature_error\n")
        for r in results:
            fh.write(f"{r.index},{r.true_label},{r.classical_prediction},"
                     f"{r.quantum_prediction},{r.max_feature_error:.12e}\n")


def summary_lines(summary: RunSummary) -> list[str]:
    lines = [
        f"stride = ({summary.stride_conv},{summary.stride_pool})",
        f"accuracy_classical = {summary.accuracy_classical:.6f}",
        f"accuracy_quantum = {summary.accuracy_quantum:.6f}",
        f"agreement = {summary.agreement:.6f}",
        f"max_feature_error = {summary.max_feature_error:.6e}",
        f"mean_feature_error = {summary.mean_feature_error:.6e}",
        f"min_uncompute_fidelity = {summary.min_uncompute_fidelity:.12f}",
    ]
    if summary.pool_crop:
        lines.append(f"pool_crop = {summary.pool_crop[0]} -> {summary.pool_crop[1]}"
                     f" (ragged edge dropped before pooling)")
    return lines


def run_experiment(config: ExperimentConfig) -> list[RunSummary]:
    """Run the configured strides (sweep or single pair) and emit the report,
    the per-image CSV tables, and figures into the output directory."""
    config.validate()
    os.makedirs(config.out_dir, exist_ok=True)
    pairs = config.sweep or ((config.conv_stride, config.pool_stride),)
    started = time.perf_counter()
    summaries = [run_pipeline(config, stride_conv=sc, stride_pool=sp)
                 for sc, sp in pairs]
    elapsed = time.perf_counter() - started

    conv_cfg = config.conv_config(pairs[0][0])
    budget = estimate_resources(
        config.image_side, config.kernel_side, conv_cfg.out_side,
        config.pool_window, config.angle_bits, 2.0 ** -config.qae_bits,
        stride=pairs[0][0], pool_stride=pairs[0][1])

    report_path = os.path.join(config.out_dir, "report.txt")
    with open(report_path, "w", encoding="ascii") as fh:
        fh.write("# experiment report\n\n# config\n")
        fh.write("\n".join(_config_lines(config)) + "\n")
        fh.write("\n# resources\n")
        fh.write(format_budget(budget))
        fh.write("\n# results\n")
        for summary in summaries:
            fh.write("\n".join(summary_lines(summary)) + "\n\n")
        fh.write(f"{TIMING_MARKER}\n")
        fh.write(f"wall_clock_s = {elapsed:.3f}\n")

    for summary in summaries:
        tag = f"s{summary.stride_conv}_{summary.stride_pool}"
        write_results_csv(os.path.join(config.out_dir, f"results_{tag}.csv"),
                          summary.results)
    if config.figures:
        from . import figures

        figures.render_run_figures(summaries, config.out_dir)
    return summaries


# ---------------------------------------------------------------------------
# Architecture loss comparison


def emit_loss_comparison(config: ExperimentConfig) -> dict[str, list]:
    """Train the pool-based and double-convolution classical stacks and emit
    per-epoch train/validation loss curves (CSV plus figure).

    The pooled architecture mirrors the quantum stack; the comparison
    variant replaces pooling with a second convolution.
    """
    config.validate()
    os.makedirs(config.out_dir, exist_ok=True)
    (train_images, train_labels), (val_images, val_labels) = select_samples(config)
    kernel = DEFAULT_KERNEL / np.sqrt((DEFAULT_KERNEL ** 2).sum())
    # the stand-in for the second convolution stage: a contrast filter, the
    # structural opposite of the pooling stage's smoothing
    second_kernel = np.array([[1.0, -1.0], [-1.0, 1.0]]) / 2.0

    def pooled_features(images):
        return np.stack([
            pool_ref(crop_for_stride(
                conv2d_ref(im, kernel, config.conv_stride),
                config.pool_window, config.pool_stride),
                config.pool_window, config.pool_stride, "sum")
            for im in images
        ])

    def double_conv_features(images):
        return np.stack([
            conv2d_ref(conv2d_ref(im, kernel, config.conv_stride),
                       second_kernel, 1)
            for im in images
        ])

    histories = {}
    for name, maker in (("cpnn", pooled_features), ("ccnn", double_conv_features)):
        train_feats = maker(train_images)
        val_feats = maker(val_images)
        _, history = train_fc(train_feats, train_labels, 2,
                              epochs=config.epochs, seed=config.seed,
                              learning_rate=config.learning_rate,
                              validation=(val_feats, val_labels))
        histories[name] = history
        path = os.path.join(config.out_dir, f"losses_{name}.csv")
        with open(path, "w", encoding="ascii") as fh:
            fh.write("epoch,train_loss,validation_loss\n")
            for epoch, (train_loss, val_loss) in enumerate(history):
                fh.write(f"{epoch},{train_loss:.12e},{val_loss:.12e}\n")
    if config.figures:
        from . import figures

        figures.render_loss_figures(histories, config.out_dir)
    return histories


def train_and_save_weights(config: ExperimentConfig, path) -> np.ndarray:
    """`train` subcommand: fit FC weights on the training split and save."""
    config.validate()
    train_set, _ = select_samples(config)
    weights = train_pipeline_weights(config, train_set, DEFAULT_KERNEL)
    save_weights(path, weights, seed=config.seed)
    return weights

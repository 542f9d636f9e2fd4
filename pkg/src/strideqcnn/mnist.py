"""IDX-format image and label files, plus a deterministic synthetic digit set.

The loaders accept the standard MNIST byte layout: big-endian magic
(0x803 images, 0x801 labels), 32-bit big-endian dimension sizes, then
row-major payload bytes. The synthesizer renders crude but classifiable
digits so the pipeline runs end to end without shipping the real dataset;
real MNIST files drop in unchanged.
"""

from __future__ import annotations

import struct

import numpy as np

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


class IdxFormatError(ValueError):
    """Malformed IDX file: bad magic, truncation, or count mismatch."""


def _read_exact(fh, size, what, path):
    data = fh.read(size)
    if len(data) != size:
        raise IdxFormatError(
            f"{path}: truncated while reading {what} "
            f"({len(data)} of {size} bytes)"
        )
    return data


def load_idx_images(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic, = struct.unpack(">I", _read_exact(fh, 4, "magic", path))
        if magic != IMAGES_MAGIC:
            raise IdxFormatError(
                f"{path}: bad image magic 0x{magic:08x}, "
                f"expected 0x{IMAGES_MAGIC:08x}"
            )
        count, rows, cols = struct.unpack(
            ">III", _read_exact(fh, 12, "dimensions", path))
        payload = _read_exact(fh, count * rows * cols, "pixel data", path)
        if fh.read(1):
            raise IdxFormatError(f"{path}: trailing bytes after pixel data")
    return np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)


def load_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic, = struct.unpack(">I", _read_exact(fh, 4, "magic", path))
        if magic != LABELS_MAGIC:
            raise IdxFormatError(
                f"{path}: bad label magic 0x{magic:08x}, "
                f"expected 0x{LABELS_MAGIC:08x}"
            )
        count, = struct.unpack(">I", _read_exact(fh, 4, "count", path))
        payload = _read_exact(fh, count, "label data", path)
        if fh.read(1):
            raise IdxFormatError(f"{path}: trailing bytes after label data")
    return np.frombuffer(payload, dtype=np.uint8)


def load_mnist(images_path, labels_path) -> tuple[np.ndarray, np.ndarray]:
    """Paired images and labels; counts must agree."""
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if len(images) != len(labels):
        raise IdxFormatError(
            f"count mismatch: {len(images)} images in {images_path} but "
            f"{len(labels)} labels in {labels_path}"
        )
    return images, labels


def write_idx_images(path, images) -> None:
    images = np.ascontiguousarray(np.asarray(images, dtype=np.uint8))
    count, rows, cols = images.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IMAGES_MAGIC, count, rows, cols))
        fh.write(images.tobytes())


def write_idx_labels(path, labels) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", LABELS_MAGIC, len(labels)))
        fh.write(labels.tobytes())


# ---------------------------------------------------------------------------
# Synthetic digits


def _arc(center_row, center_col, radius, start, stop, points=120):
    t = np.linspace(start, stop, points)
    return np.stack([center_row + radius * np.sin(t),
                     center_col + radius * np.cos(t)], axis=1)


def _bezier(p0, p1, p2, points=120):
    t = np.linspace(0.0, 1.0, points)[:, None]
    p0, p1, p2 = (np.asarray(p, dtype=float) for p in (p0, p1, p2))
    return (1 - t) ** 2 * p0 + 2 * (1 - t) * t * p1 + t ** 2 * p2


def _digit_path(digit: int) -> np.ndarray:
    """Curve points in a unit (row, col) frame, row 0 at the top."""
    if digit == 6:
        loop = _arc(0.70, 0.47, 0.17, 0.0, 2 * np.pi)
        stem = _bezier((0.16, 0.60), (0.26, 0.36), (0.53, 0.30), points=55)
        return np.concatenate([loop, stem])
    if digit == 9:
        path = _digit_path(6)
        return 1.0 - path  # a six rotated half a turn
    if digit == 3:
        upper = _arc(0.32, 0.44, 0.19, -0.55 * np.pi, 0.55 * np.pi)
        lower = _arc(0.68, 0.44, 0.19, -0.55 * np.pi, 0.55 * np.pi)
        return np.concatenate([upper, lower])
    if digit == 0:
        return _arc(0.5, 0.5, 0.27, 0.0, 2 * np.pi)
    if digit == 1:
        t = np.linspace(0.15, 0.85, 120)
        return np.stack([t, np.full_like(t, 0.5)], axis=1)
    raise ValueError(f"no synthetic shape for digit {digit}")


def render_digit(digit: int, rng: np.random.Generator, side: int = 28) -> np.ndarray:
    """One randomized rendering: jittered placement, stroke width, noise."""
    path = _digit_path(digit)
    angle = rng.uniform(-0.12, 0.12)
    scale = rng.uniform(0.85, 1.1)
    shift = rng.uniform((-0.04, -0.07), (0.04, 0.07))
    centered = path - 0.5
    rot = np.array([[np.cos(angle), -np.sin(angle)],
                    [np.sin(angle), np.cos(angle)]])
    placed = (centered @ rot.T) * scale + 0.5 + shift
    points = placed * (side - 1)

    grid = np.stack(np.meshgrid(np.arange(side), np.arange(side),
                                indexing="ij"), axis=-1).reshape(-1, 2)
    d2 = ((grid[:, None, :] - points[None, :, :]) ** 2).sum(axis=2).min(axis=1)
    sigma = rng.uniform(1.0, 1.4)
    intensity = rng.uniform(200, 255)
    image = intensity * np.exp(-d2 / (2 * sigma ** 2))
    image += rng.uniform(0, 8, size=image.shape)
    return np.clip(image, 0, 255).astype(np.uint8).reshape(side, side)


def synthesize_digits(digits, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` images cycling through ``digits``; deterministic per seed."""
    rng = np.random.default_rng(seed)
    images = np.zeros((count, 28, 28), dtype=np.uint8)
    labels = np.zeros(count, dtype=np.uint8)
    for i in range(count):
        digit = int(digits[i % len(digits)])
        images[i] = render_digit(digit, rng)
        labels[i] = digit
    return images, labels


def write_synthetic_dataset(images_path, labels_path, digits, count, seed) -> None:
    images, labels = synthesize_digits(digits, count, seed)
    write_idx_images(images_path, images)
    write_idx_labels(labels_path, labels)

"""Classical reference CNN: the bit-exact oracle for the quantum layers.

Also owns what the quantum pipeline consumes but never learns itself:
bilinear downscaling of raw images and gradient training of the fully
connected weights (with clipping so the weights stay loadable as rotation
amplitudes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def conv2d_ref(image: np.ndarray, kernel: np.ndarray, stride: int) -> np.ndarray:
    """Strided valid convolution (really cross-correlation, as in CNNs).

    out[x', y'] = sum_{a,b} kernel[a, b] * image[x'*stride + a, y'*stride + b]
    """
    image = np.asarray(image, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    m, n = image.shape[0], kernel.shape[0]
    if image.ndim != 2 or image.shape != (m, m):
        raise ValueError(f"image must be square, got {image.shape}")
    if kernel.ndim != 2 or kernel.shape != (n, n):
        raise ValueError(f"kernel must be square, got {kernel.shape}")
    if n > m:
        raise ValueError(f"kernel side {n} exceeds image side {m}")
    if stride < 1:
        raise ValueError(f"stride must be positive, got {stride}")
    if (m - n) % stride:
        raise ValueError(
            f"(M - N) = {m - n} is not divisible by stride {stride}"
        )
    side = (m - n) // stride + 1
    out = np.zeros((side, side))
    for xp in range(side):
        for yp in range(side):
            acc = 0.0
            for a in range(n):
                for b in range(n):
                    acc += kernel[a, b] * image[xp * stride + a, yp * stride + b]
            out[xp, yp] = acc
    return out


def pool_ref(feature_map: np.ndarray, window: int, stride: int,
             mode: str = "average") -> np.ndarray:
    """Window sums or averages over a strided sliding window."""
    feature_map = np.asarray(feature_map, dtype=float)
    mp = feature_map.shape[0]
    if feature_map.shape != (mp, mp):
        raise ValueError(f"feature map must be square, got {feature_map.shape}")
    if window > mp:
        raise ValueError(f"window {window} exceeds map side {mp}")
    if stride < 1:
        raise ValueError(f"stride must be positive, got {stride}")
    if (mp - window) % stride:
        raise ValueError(
            f"(M' - N') = {mp - window} is not divisible by stride {stride}"
        )
    if mode not in ("average", "sum"):
        raise ValueError(f"mode must be 'average' or 'sum', got {mode!r}")
    side = (mp - window) // stride + 1
    out = np.zeros((side, side))
    for xp in range(side):
        for yp in range(side):
            block = feature_map[xp * stride: xp * stride + window,
                                yp * stride: yp * stride + window]
            out[xp, yp] = block.sum()
    if mode == "average":
        out /= window ** 2
    return out


def fc_ref(features: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Linear class scores: score_k = sum(features * weights[k])."""
    features = np.asarray(features, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if weights.shape[1:] != features.shape:
        raise ValueError(
            f"weight shape {weights.shape} does not match features {features.shape}"
        )
    return np.tensordot(weights, features, axes=features.ndim)


def fc_probabilities(features: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Measurement-statistics form of the scores.

    Prob(k) = (Mbar^2 + score_k) / (2 K Mbar^2), an affine map of the score,
    so the argmax class is unchanged.
    """
    scores = fc_ref(features, weights)
    mbar_sq = np.asarray(features).size
    k = len(scores)
    return (mbar_sq + scores) / (2 * k * mbar_sq)


def classify_ref(scores) -> int:
    """Argmax class; ties resolve to the lowest index."""
    scores = np.asarray(scores)
    if scores.size == 0:
        raise ValueError("empty score vector")
    return int(np.argmax(scores))


def bilinear_resize(image: np.ndarray, out_side: int) -> np.ndarray:
    """Bilinear downscale of a square image (align-corners-false grid)."""
    image = np.asarray(image, dtype=float)
    in_side = image.shape[0]
    if image.shape != (in_side, in_side):
        raise ValueError(f"image must be square, got {image.shape}")
    scale = in_side / out_side
    coords = (np.arange(out_side) + 0.5) * scale - 0.5
    coords = np.clip(coords, 0, in_side - 1)
    lo = np.floor(coords).astype(int)
    hi = np.minimum(lo + 1, in_side - 1)
    frac = coords - lo
    rows = (image[lo][:, lo] * (1 - frac)[None, :]
            + image[lo][:, hi] * frac[None, :])
    rows_hi = (image[hi][:, lo] * (1 - frac)[None, :]
               + image[hi][:, hi] * frac[None, :])
    out = rows * (1 - frac)[:, None] + rows_hi * frac[:, None]
    return out


# ---------------------------------------------------------------------------
# Fully connected training


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    picked = probs[np.arange(len(labels)), labels]
    return float(-np.log(np.maximum(picked, 1e-12)).mean())


def train_fc(features: np.ndarray, labels: np.ndarray, num_classes: int,
             epochs: int, seed: int, *, learning_rate: float = 0.5,
             clip: float = 1.0, validation=None):
    """Gradient descent on softmax cross-entropy over linear scores.

    features: (count, side, side); labels: (count,) ints < num_classes.
    Weights are clipped to [-clip, clip] after every step so they remain
    valid rotation amplitudes. Deterministic for a fixed seed. Returns
    (weights, history) where history rows are (train_loss, val_loss).
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if len(features) == 0:
        raise ValueError("empty training dataset")
    if features.ndim != 3:
        raise ValueError(f"features must be (count, side, side), got {features.shape}")
    rng = np.random.default_rng(seed)
    side = features.shape[1]
    weights = rng.uniform(-0.1, 0.1, size=(num_classes, side, side))
    flat = features.reshape(len(features), -1)
    history = []

    def losses_at(w):
        probs = softmax(flat @ w.reshape(num_classes, -1).T)
        train_loss = cross_entropy(probs, labels)
        if validation is None:
            return probs, train_loss, train_loss
        vf, vl = validation
        v_scores = np.asarray(vf, dtype=float).reshape(len(vl), -1) @ \
            w.reshape(num_classes, -1).T
        return probs, train_loss, cross_entropy(softmax(v_scores),
                                                np.asarray(vl, dtype=int))

    for _ in range(epochs):
        probs, train_loss, val_loss = losses_at(weights)
        history.append((train_loss, val_loss))
        grad = probs.copy()
        grad[np.arange(len(labels)), labels] -= 1.0
        grad_w = (grad.T @ flat) / len(labels)
        weights = weights - learning_rate * grad_w.reshape(weights.shape)
        weights = np.clip(weights, -clip, clip)
    return weights, history


def save_weights(path, weights: np.ndarray, *, seed: int, clip: float = 1.0) -> None:
    weights = np.asarray(weights)
    k, side = weights.shape[0], weights.shape[1]
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# classes {k} side {side} seed {seed} clip {clip}\n")
        for ki in range(k):
            for row in weights[ki]:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
            fh.write("\n")


def load_weights(path) -> tuple[np.ndarray, dict]:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        k = int(header[header.index("classes") + 1])
        side = int(header[header.index("side") + 1])
        meta = {
            "seed": int(header[header.index("seed") + 1]),
            "clip": float(header[header.index("clip") + 1]),
        }
        values = [float(v) for line in fh for v in line.split()]
    weights = np.array(values).reshape(k, side, side)
    return weights, meta


# ---------------------------------------------------------------------------
# Whole-pipeline reference model


@dataclass
class RefModel:
    """Classical pipeline mirror: kernel, pooling hyperparameters, FC weights."""

    kernel: np.ndarray
    fc_weights: np.ndarray
    conv_stride: int
    pool_window: int
    pool_stride: int

    def features(self, image_normalized: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(conv map, pooled sum map) for one normalized image."""
        kernel_norm = self.kernel / np.sqrt((self.kernel ** 2).sum())
        conv = conv2d_ref(image_normalized, kernel_norm, self.conv_stride)
        pooled = pool_ref(crop_for_stride(conv, self.pool_window, self.pool_stride),
                          self.pool_window, self.pool_stride, mode="sum")
        return conv, pooled

    def predict(self, image_normalized: np.ndarray) -> int:
        _, pooled = self.features(image_normalized)
        return classify_ref(fc_ref(pooled, self.fc_weights))


def crop_for_stride(feature_map: np.ndarray, window: int, stride: int) -> np.ndarray:
    """Largest leading square of the map whose windows tile with the stride.

    Sweeps that pair an incompatible map side with a stride drop the ragged
    trailing rows and columns; a no-op when (side - window) % stride == 0.
    """
    side = feature_map.shape[0]
    if side < window:
        raise ValueError(f"map side {side} smaller than window {window}")
    usable = side - (side - window) % stride
    return feature_map[:usable, :usable]

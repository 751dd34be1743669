"""Binary MLP probe over concatenated embedding pairs.

The probe scores a (left, right) character pair by concatenating the two
embeddings into one input vector and applying an MLP with ReLU hidden
activations and a sigmoid output head:

    p(pair is positive) = sigmoid(MLP([emb(left); emb(right)]))

``layers`` counts affine layers: 1 is a pure affine probe on the
concatenated input, L >= 2 inserts L-1 hidden layers of ``hidden_dim``
units. Training minimizes binary cross-entropy with Adam over seeded,
shuffled mini-batches; everything is float64 and single-threaded, so a
given (config, dataset, table) triple reproduces bit-identical parameters.

The backward pass is hand-derived; :func:`gradient_check` validates it
against central finite differences.
"""

from __future__ import annotations

import logging
import struct
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from .datasets import ProbeDataset, ProbePair
from .embeddings import EmbeddingTable

logger = logging.getLogger(__name__)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
INIT_STD = 0.02

CKPT_MAGIC = b"CMLP"
CKPT_VERSION = 1


class CheckpointFormatError(ValueError):
    """Checkpoint file is malformed, truncated, or fails its checksum."""


@dataclass(frozen=True)
class ProbeConfig:
    layers: int
    seed: int
    hidden_dim: int = 256
    learning_rate: float = 1e-3
    epochs: int = 20
    batch_size: int = 128

    def __post_init__(self):
        if not 1 <= self.layers <= 5:
            raise ValueError(f"layers must be in [1,5], got {self.layers}")
        if self.hidden_dim < 1:
            raise ValueError("hidden_dim must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")


@dataclass
class ProbeModel:
    config: ProbeConfig
    emb_dim: int
    weights: list[np.ndarray]  # weights[i]: (dims[i], dims[i+1]) float64
    biases: list[np.ndarray]
    m_w: list[np.ndarray] = field(repr=False, default=None)
    m_b: list[np.ndarray] = field(repr=False, default=None)
    v_w: list[np.ndarray] = field(repr=False, default=None)
    v_b: list[np.ndarray] = field(repr=False, default=None)
    step: int = 0

    def __post_init__(self):
        if self.m_w is None:
            self.m_w = [np.zeros_like(w) for w in self.weights]
            self.m_b = [np.zeros_like(b) for b in self.biases]
            self.v_w = [np.zeros_like(w) for w in self.weights]
            self.v_b = [np.zeros_like(b) for b in self.biases]

    @property
    def layer_dims(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]


@dataclass
class TrainReport:
    epoch_losses: tuple[float, ...]
    epoch_accuracies: tuple[float, ...]  # empty when the test split is empty
    final_accuracy: float | None
    wall_time_s: float

    def to_dict(self, with_wall_time: bool = False) -> dict:
        # Wall time is kept out of the canonical report so reruns are
        # byte-identical; it lives in the run manifest instead.
        out = {
            "epoch_losses": list(self.epoch_losses),
            "epoch_accuracies": list(self.epoch_accuracies),
            "final_accuracy": self.final_accuracy,
        }
        if with_wall_time:
            out["wall_time_s"] = self.wall_time_s
        return out


def _layer_dims(config: ProbeConfig, emb_dim: int) -> list[int]:
    return [2 * emb_dim] + [config.hidden_dim] * (config.layers - 1) + [1]


def init_model(config: ProbeConfig, emb_dim: int, rng: np.random.Generator | None = None) -> ProbeModel:
    """Gaussian(0, 0.02) weights, zero biases, fresh Adam state."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    dims = _layer_dims(config, emb_dim)
    weights = [rng.normal(0.0, INIT_STD, size=(dims[i], dims[i + 1])) for i in range(len(dims) - 1)]
    biases = [np.zeros(dims[i + 1]) for i in range(len(dims) - 1)]
    return ProbeModel(config=config, emb_dim=emb_dim, weights=weights, biases=biases)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _forward_batch(model: ProbeModel, x: np.ndarray):
    """Returns (pre-activations per layer, activations per layer, logits)."""
    zs, acts = [], [x]
    a = x
    last = len(model.weights) - 1
    # non-finite parameters propagate to the loss, where training detects
    # them; suppress the intermediate warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for i, (w, b) in enumerate(zip(model.weights, model.biases)):
            z = a @ w + b
            zs.append(z)
            if i < last:
                a = np.maximum(z, 0.0)
                acts.append(a)
    return zs, acts, zs[-1][:, 0]


def forward(model: ProbeModel, u_vec, w_vec) -> float:
    """Probability in (0,1) that the pair is positive."""
    u = np.asarray(u_vec, dtype=np.float64)
    w = np.asarray(w_vec, dtype=np.float64)
    if u.shape != (model.emb_dim,) or w.shape != (model.emb_dim,):
        raise ValueError(
            f"expected two vectors of length {model.emb_dim}, "
            f"got shapes {u.shape} and {w.shape}"
        )
    x = np.concatenate([u, w])[None, :]
    _, _, logits = _forward_batch(model, x)
    return float(_sigmoid(logits)[0])


def _bce_from_logits(logits: np.ndarray, y: np.ndarray) -> float:
    # mean of softplus(z) - y*z, stable for large |z|; non-finite values
    # propagate silently here and are caught by the training loop
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def _loss_and_grads(model: ProbeModel, x: np.ndarray, y: np.ndarray, scale: float = 1.0):
    """Mean BCE over the batch (times ``scale``) and its parameter gradients."""
    zs, acts, logits = _forward_batch(model, x)
    loss = scale * _bce_from_logits(logits, y)
    n = x.shape[0]
    delta = scale * (_sigmoid(logits) - y)[:, None] / n
    grads_w: list[np.ndarray] = [None] * len(model.weights)
    grads_b: list[np.ndarray] = [None] * len(model.biases)
    for i in range(len(model.weights) - 1, -1, -1):
        grads_w[i] = acts[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (zs[i - 1] > 0.0)
    return loss, grads_w, grads_b


def _adam_update(model: ProbeModel, grads_w, grads_b) -> None:
    model.step += 1
    t = model.step
    c1 = 1.0 - ADAM_BETA1**t
    c2 = 1.0 - ADAM_BETA2**t
    lr = model.config.learning_rate
    for params, grads, ms, vs in (
        (model.weights, grads_w, model.m_w, model.v_w),
        (model.biases, grads_b, model.m_b, model.v_b),
    ):
        for p, g, m, v in zip(params, grads, ms, vs):
            m *= ADAM_BETA1
            m += (1.0 - ADAM_BETA1) * g
            v *= ADAM_BETA2
            v += (1.0 - ADAM_BETA2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + ADAM_EPS)


def _pair_matrix(table: EmbeddingTable, pairs) -> tuple[np.ndarray, np.ndarray]:
    lefts = table.matrix64([p.left for p in pairs])
    rights = table.matrix64([p.right for p in pairs])
    x = np.concatenate([lefts, rights], axis=1)
    y = np.array([p.label for p in pairs], dtype=np.float64)
    return x, y


def _check_characters(dataset: ProbeDataset, table: EmbeddingTable) -> None:
    offenders = table.missing(dataset.characters())
    if offenders:
        raise KeyError(
            f"{len(offenders)} dataset characters missing from the embedding "
            f"table: {''.join(offenders[:20])}"
            + ("..." if len(offenders) > 20 else "")
        )


def train_probe(
    config: ProbeConfig, dataset: ProbeDataset, table: EmbeddingTable
) -> tuple[ProbeModel, TrainReport]:
    """Train from random initialization; deterministic given its inputs."""
    _check_characters(dataset, table)
    train_pairs = dataset.split_pairs("train")
    if not train_pairs:
        raise ValueError("train split is empty")
    test_pairs = dataset.split_pairs("test")
    x_train, y_train = _pair_matrix(table, train_pairs)
    x_test = y_test = None
    if test_pairs:
        x_test, y_test = _pair_matrix(table, test_pairs)

    t0 = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    model = init_model(config, table.dim, rng)
    n = len(train_pairs)
    bs = config.batch_size
    losses: list[float] = []
    accuracies: list[float] = []
    for epoch in range(config.epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, bs):
            idx = perm[start : start + bs]
            loss, gw, gb = _loss_and_grads(model, x_train[idx], y_train[idx])
            if not np.isfinite(loss):
                raise FloatingPointError(
                    f"non-finite training loss at epoch {epoch}, batch {start // bs}"
                )
            _adam_update(model, gw, gb)
            epoch_loss += loss * len(idx)
        losses.append(epoch_loss / n)
        if x_test is not None:
            accuracies.append(_accuracy(model, x_test, y_test))
    report = TrainReport(
        epoch_losses=tuple(losses),
        epoch_accuracies=tuple(accuracies),
        final_accuracy=accuracies[-1] if accuracies else None,
        wall_time_s=time.perf_counter() - t0,
    )
    return model, report


def _accuracy(model: ProbeModel, x: np.ndarray, y: np.ndarray) -> float:
    _, _, logits = _forward_batch(model, x)
    # prediction is positive only for p > 0.5, i.e. logit > 0; exact ties go
    # to the negative class
    preds = logits > 0.0
    return float(np.mean(preds == (y == 1.0)))


def evaluate_probe(model: ProbeModel, dataset: ProbeDataset, table: EmbeddingTable) -> float:
    """Accuracy over the test split only."""
    _check_characters(dataset, table)
    test_pairs = dataset.split_pairs("test")
    if not test_pairs:
        raise ValueError("test split is empty")
    x, y = _pair_matrix(table, test_pairs)
    return _accuracy(model, x, y)


def pair_loss_and_grads(model: ProbeModel, u_vec, w_vec, label: int, scale: float = 1.0):
    """Loss and gradients for a single pair; ``scale`` multiplies the loss."""
    x = np.concatenate(
        [np.asarray(u_vec, dtype=np.float64), np.asarray(w_vec, dtype=np.float64)]
    )[None, :]
    y = np.array([float(label)])
    return _loss_and_grads(model, x, y, scale=scale)


def gradient_check(model: ProbeModel, pair: ProbePair, table: EmbeddingTable, h: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    Perturbs every weight and bias entry by +-h in float64. The relative
    error guard floor is 1e-6 so near-zero gradient components do not
    produce spurious blowups.

    ReLU is non-differentiable at 0: models whose hidden pre-activations
    are smaller than h can cross the kink under perturbation and report
    spurious error. Callers should check models with activation scales
    comfortably above h (any trained or healthily-initialized model
    qualifies; a freshly 0.02-initialized model 4+ layers deep does not).
    """
    if h <= 0:
        raise ValueError("h must be positive")
    u = table.matrix64([pair.left])[0]
    w = table.matrix64([pair.right])[0]
    x = np.concatenate([u, w])[None, :]
    y = np.array([float(pair.label)])
    _, gw, gb = _loss_and_grads(model, x, y)

    def loss_only() -> float:
        _, _, logits = _forward_batch(model, x)
        return _bce_from_logits(logits, y)

    max_rel = 0.0
    for params, grads in ((model.weights, gw), (model.biases, gb)):
        for p, g in zip(params, grads):
            flat_p = p.reshape(-1)
            flat_g = g.reshape(-1)
            for j in range(flat_p.size):
                orig = flat_p[j]
                flat_p[j] = orig + h
                up = loss_only()
                flat_p[j] = orig - h
                down = loss_only()
                flat_p[j] = orig
                numeric = (up - down) / (2.0 * h)
                denom = max(abs(flat_g[j]), abs(numeric), 1e-6)
                max_rel = max(max_rel, abs(flat_g[j] - numeric) / denom)
    return max_rel


def layer_count_sweep(
    base_config: ProbeConfig, dataset: ProbeDataset, table: EmbeddingTable
) -> dict[int, float]:
    """Final test accuracy for every layer count 1-5, same data and seed.

    Layer count is expected to move accuracy by < 0.05; a larger spread is
    logged as a warning, not an error.
    """
    results: dict[int, float] = {}
    for layers in range(1, 6):
        cfg = ProbeConfig(
            layers=layers,
            seed=base_config.seed,
            hidden_dim=base_config.hidden_dim,
            learning_rate=base_config.learning_rate,
            epochs=base_config.epochs,
            batch_size=base_config.batch_size,
        )
        _, report = train_probe(cfg, dataset, table)
        results[layers] = report.final_accuracy
    spread = max(results.values()) - min(results.values())
    if spread >= 0.05:
        logger.warning(
            "layer-count sweep accuracy spread %.3f >= 0.05 (per-layer: %s)",
            spread,
            results,
        )
    return results


def train_multi_seed(
    config: ProbeConfig, seeds, dataset: ProbeDataset, table: EmbeddingTable
) -> dict:
    """Repeat training across seeds; report per-seed and aggregate accuracy."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    per_seed = {}
    for seed in seeds:
        cfg = ProbeConfig(
            layers=config.layers,
            seed=seed,
            hidden_dim=config.hidden_dim,
            learning_rate=config.learning_rate,
            epochs=config.epochs,
            batch_size=config.batch_size,
        )
        _, report = train_probe(cfg, dataset, table)
        per_seed[seed] = report.final_accuracy
    values = [v for v in per_seed.values() if v is not None]
    agg = {
        "per_seed": {str(s): per_seed[s] for s in seeds},
        "mean": float(np.mean(values)) if values else None,
        "std": float(np.std(values)) if values else None,
        "min": min(values) if values else None,
        "max": max(values) if values else None,
    }
    return agg


def save_model(model: ProbeModel, path) -> None:
    """Checkpoint: config block, layer dims, parameter and Adam tensors, CRC32."""
    cfg = model.config
    out = bytearray()
    out += CKPT_MAGIC
    out += struct.pack("<H", CKPT_VERSION)
    out += struct.pack(
        "<IIIdIIQQ",
        cfg.layers,
        cfg.hidden_dim,
        model.emb_dim,
        cfg.learning_rate,
        cfg.epochs,
        cfg.batch_size,
        cfg.seed,
        model.step,
    )
    dims = model.layer_dims
    out += struct.pack("<I", len(dims))
    out += struct.pack(f"<{len(dims)}I", *dims)
    for group in (model.weights, model.biases, model.m_w, model.m_b, model.v_w, model.v_b):
        for tensor in group:
            out += tensor.astype("<f8", copy=False).tobytes()
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    with open(path, "wb") as fh:
        fh.write(bytes(out))


def load_model(path) -> ProbeModel:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4 + 2 + 4:
        raise CheckpointFormatError(f"{path}: truncated file")
    if data[:4] != CKPT_MAGIC:
        raise CheckpointFormatError(f"{path}: bad magic {data[:4]!r}")
    (stored_crc,) = struct.unpack("<I", data[-4:])
    if zlib.crc32(data[:-4]) & 0xFFFFFFFF != stored_crc:
        raise CheckpointFormatError(f"{path}: CRC32 mismatch")
    body = data[:-4]
    off = 4
    (version,) = struct.unpack_from("<H", body, off)
    off += 2
    if version != CKPT_VERSION:
        raise CheckpointFormatError(f"{path}: unsupported version {version}")
    layers, hidden_dim, emb_dim, lr, epochs, batch_size, seed, step = struct.unpack_from(
        "<IIIdIIQQ", body, off
    )
    off += struct.calcsize("<IIIdIIQQ")
    (n_dims,) = struct.unpack_from("<I", body, off)
    off += 4
    dims = list(struct.unpack_from(f"<{n_dims}I", body, off))
    off += 4 * n_dims
    config = ProbeConfig(
        layers=layers,
        seed=seed,
        hidden_dim=hidden_dim,
        learning_rate=lr,
        epochs=epochs,
        batch_size=batch_size,
    )
    if dims != _layer_dims(config, emb_dim):
        raise CheckpointFormatError(f"{path}: layer dims {dims} inconsistent with config")

    def take(shape) -> np.ndarray:
        nonlocal off
        count = int(np.prod(shape))
        if off + 8 * count > len(body):
            raise CheckpointFormatError(f"{path}: truncated tensor block")
        arr = np.frombuffer(body, dtype="<f8", count=count, offset=off).reshape(shape).copy()
        off += 8 * count
        return arr

    groups = []
    for _ in range(6):
        tensors = []
        for i in range(len(dims) - 1):
            shape = (dims[i], dims[i + 1]) if len(groups) % 2 == 0 else (dims[i + 1],)
            tensors.append(take(shape))
        groups.append(tensors)
    if off != len(body):
        raise CheckpointFormatError(f"{path}: {len(body) - off} trailing bytes")
    weights, biases, m_w, m_b, v_w, v_b = groups
    model = ProbeModel(config=config, emb_dim=emb_dim, weights=weights, biases=biases)
    model.m_w, model.m_b, model.v_w, model.v_b = m_w, m_b, v_w, v_b
    model.step = step
    return model

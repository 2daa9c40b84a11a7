"""Fixed small classifier architectures over a flat parameter vector.

Architectures are written as comma-separated descriptor strings, e.g.

    in3x32x32,c32-3,c64-3,p2,c128-3,p2,d0.25,flat,fc128,d0.5,fc10

Tokens: ``inCxHxW`` input shape, ``cF-K`` a KxK convolution with F filters
(stride 1, same padding, ReLU), ``p2`` 2x2 max pooling, ``dR`` dropout with
rate R (seeded masks, disabled at evaluation), ``flat``, and ``fcM`` a fully
connected layer (ReLU except on the final layer, whose outputs are logits).

All parameters live in one flat vector; a ParamLayout maps named slices onto
it.  Forward and backward passes are explicit; there is no graph autodiff.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field

import numpy as np

from mbrt.diffcore import layers as L
from mbrt.diffcore.loss import grad_logits_ce, loss_ce
from mbrt.errors import InputError, NumericalError
from mbrt.seeding import substream


@dataclass(frozen=True)
class ParamLayout:
    """Named, shaped slices of a flat parameter vector."""

    entries: tuple  # of (name, shape, offset, size)

    @property
    def total(self) -> int:
        if not self.entries:
            return 0
        name, shape, offset, size = self.entries[-1]
        return offset + size

    def view(self, w: np.ndarray, name: str) -> np.ndarray:
        for n, shape, offset, size in self.entries:
            if n == name:
                return w[offset : offset + size].reshape(shape)
        raise KeyError(name)

    @staticmethod
    def build(named_shapes) -> "ParamLayout":
        entries = []
        offset = 0
        for name, shape in named_shapes:
            size = int(np.prod(shape))
            entries.append((name, tuple(shape), offset, size))
            offset += size
        return ParamLayout(tuple(entries))


_TOKEN_RE = {
    "in": re.compile(r"^in(\d+)x(\d+)x(\d+)$"),
    "conv": re.compile(r"^c(\d+)-(\d+)$"),
    "pool": re.compile(r"^p2$"),
    "drop": re.compile(r"^d(0?\.\d+|0|1)$"),
    "flat": re.compile(r"^flat$"),
    "fc": re.compile(r"^fc(\d+)$"),
}


@dataclass(frozen=True)
class Net:
    descriptor: str
    in_shape: tuple
    num_classes: int
    layers: tuple
    layout: ParamLayout


@functools.lru_cache(maxsize=64)
def build_net(descriptor: str) -> Net:
    """Parse a descriptor string into a Net with resolved shapes."""
    tokens = [t.strip() for t in descriptor.split(",") if t.strip()]
    if not tokens or not _TOKEN_RE["in"].match(tokens[0]):
        raise InputError(f"descriptor must start with inCxHxW, got {descriptor!r}")
    c, h, w = (int(g) for g in _TOKEN_RE["in"].match(tokens[0]).groups())
    shape = (c, h, w)
    flat_dim = None
    parsed = []
    shapes = []
    conv_i = fc_i = 0
    for tok in tokens[1:]:
        if m := _TOKEN_RE["conv"].match(tok):
            f, k = int(m.group(1)), int(m.group(2))
            if flat_dim is not None:
                raise InputError(f"conv after flat in {descriptor!r}")
            if k % 2 == 0:
                raise InputError(f"even conv kernels unsupported: {tok}")
            pad = (k - 1) // 2
            name = f"conv{conv_i}"
            shapes += [(f"{name}.w", (f, shape[0], k, k)), (f"{name}.b", (f,))]
            parsed.append(("conv", name, f, k, pad))
            shape = (f, shape[1], shape[2])
            conv_i += 1
        elif _TOKEN_RE["pool"].match(tok):
            if flat_dim is not None or shape[1] % 2 or shape[2] % 2:
                raise InputError(f"p2 needs even pre-flat dims, have {shape}")
            parsed.append(("pool",))
            shape = (shape[0], shape[1] // 2, shape[2] // 2)
        elif m := _TOKEN_RE["drop"].match(tok):
            parsed.append(("drop", float(m.group(1))))
        elif _TOKEN_RE["flat"].match(tok):
            flat_dim = shape[0] * shape[1] * shape[2]
            parsed.append(("flat", shape))
        elif m := _TOKEN_RE["fc"].match(tok):
            if flat_dim is None:
                raise InputError(f"fc before flat in {descriptor!r}")
            out = int(m.group(1))
            name = f"fc{fc_i}"
            shapes += [(f"{name}.w", (flat_dim, out)), (f"{name}.b", (out,))]
            parsed.append(("fc", name, out))
            flat_dim = out
            fc_i += 1
        else:
            raise InputError(f"unknown descriptor token {tok!r} in {descriptor!r}")
    if not parsed or parsed[-1][0] != "fc":
        raise InputError(f"descriptor must end with a fc layer: {descriptor!r}")
    return Net(descriptor, (c, h, w), flat_dim, tuple(parsed), ParamLayout.build(shapes))


def init_params(net: Net, seed: int, dtype=np.float64) -> np.ndarray:
    """Fan-in-scaled uniform weights, zero biases, drawn from a seeded stream."""
    rng = substream(seed, "init")
    w = np.zeros(net.layout.total, dtype=dtype)
    for name, shape, offset, size in net.layout.entries:
        if name.endswith(".b"):
            continue
        fan_in = int(np.prod(shape[1:])) if len(shape) == 4 else shape[0]
        limit = 1.0 / np.sqrt(fan_in)
        w[offset : offset + size] = rng.uniform(-limit, limit, size=size)
    return w


def net_forward(net: Net, w: np.ndarray, x: np.ndarray, *, train=False, rng=None):
    """Run the network; returns (logits, caches).

    Dropout draws seeded masks from `rng` only when train=True; at evaluation
    dropout layers are the identity, so eval outputs are pure functions of
    (w, x).
    """
    if w.shape != (net.layout.total,):
        raise InputError(f"parameter vector has {w.shape}, layout needs ({net.layout.total},)")
    x = np.asarray(x, dtype=w.dtype)
    if x.ndim != 4 or x.shape[1:] != net.in_shape:
        raise InputError(f"batch shape {x.shape} does not match input {net.in_shape}")
    caches = []
    for spec in net.layers:
        kind = spec[0]
        if kind == "conv":
            _, name, f, k, pad = spec
            x, cache = L.conv2d_forward(x, net.layout.view(w, f"{name}.w"), net.layout.view(w, f"{name}.b"), pad)
            caches.append(("conv", name, cache))
            x, mask = L.relu_forward(x)
            caches.append(("relu", mask))
        elif kind == "pool":
            x, cache = L.maxpool2_forward(x)
            caches.append(("pool", cache))
        elif kind == "drop":
            rate = spec[1] if train else 0.0
            if rate > 0.0 and rng is None:
                raise InputError("training with dropout requires a seeded rng")
            x, cache = L.dropout_forward(x, rate, rng)
            caches.append(("drop", cache))
        elif kind == "flat":
            caches.append(("flat", x.shape))
            x = x.reshape(x.shape[0], -1)
        elif kind == "fc":
            _, name, out = spec
            x, cache = L.fc_forward(x, net.layout.view(w, f"{name}.w"), net.layout.view(w, f"{name}.b"))
            caches.append(("fc", name, cache))
            if spec is not net.layers[-1]:
                x, mask = L.relu_forward(x)
                caches.append(("relu", mask))
    return x, caches


def net_backward(net: Net, caches, dlogits):
    """Backpropagate; returns (flat parameter gradient, input gradient)."""
    dw = np.zeros(net.layout.total, dtype=dlogits.dtype)
    dy = dlogits
    for entry in reversed(caches):
        kind = entry[0]
        if kind == "relu":
            dy = L.relu_backward(dy, entry[1])
        elif kind == "conv":
            _, name, cache = entry
            dy, dwi, dbi = L.conv2d_backward(dy, cache)
            _write(net.layout, dw, f"{name}.w", dwi)
            _write(net.layout, dw, f"{name}.b", dbi)
        elif kind == "pool":
            dy = L.maxpool2_backward(dy, entry[1])
        elif kind == "drop":
            dy = L.dropout_backward(dy, entry[1])
        elif kind == "flat":
            dy = dy.reshape(entry[1])
        elif kind == "fc":
            _, name, cache = entry
            dy, dwi, dbi = L.fc_backward(dy, cache)
            _write(net.layout, dw, f"{name}.w", dwi)
            _write(net.layout, dw, f"{name}.b", dbi)
    return dw, dy


def _write(layout, flat, name, value):
    view = layout.view(flat, name)
    view[...] = value


@dataclass
class ClassifierParams:
    """A classifier: architecture descriptor plus its flat weight vector."""

    arch: str
    w: np.ndarray
    num_classes: int = field(default=0)

    def __post_init__(self):
        net = build_net(self.arch)
        self.w = np.asarray(self.w)
        if self.w.shape != (net.layout.total,):
            raise InputError(
                f"parameter vector length {self.w.size} does not match architecture ({net.layout.total})"
            )
        if not np.isfinite(self.w).all():
            raise InputError("parameters contain non-finite entries")
        if not self.num_classes:
            self.num_classes = net.num_classes

    @property
    def net(self) -> Net:
        return build_net(self.arch)


def make_classifier(arch: str, seed: int, dtype=np.float64) -> ClassifierParams:
    net = build_net(arch)
    return ClassifierParams(arch, init_params(net, seed, dtype))


@dataclass
class Batch:
    """Images (N, C, H, W) with integer labels (N,)."""

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.images = np.asarray(self.images)
        self.labels = np.asarray(self.labels)
        if self.images.ndim != 4 or len(self.images) == 0:
            raise InputError(f"batch images must be nonempty (N, C, H, W), got {self.images.shape}")
        if self.labels.shape != (len(self.images),):
            raise InputError("label count does not match image count")

    def __len__(self):
        return len(self.images)


def forward_classifier(params: ClassifierParams, batch: Batch) -> np.ndarray:
    """Evaluation-mode logits (n, k); deterministic given (params, batch)."""
    logits, _ = net_forward(params.net, params.w, batch.images)
    return logits


def ce_value_and_grad(net, w, images, labels, example_weights=None, *, train=False, rng=None):
    """Per-example CE losses and the flat gradient of sum_i weight_i * ce_i."""
    logits, caches = net_forward(net, w, images, train=train, rng=rng)
    _, per_example = loss_ce(logits, labels)
    if example_weights is None:
        example_weights = np.full(len(labels), 1.0 / len(labels))
    dlogits = grad_logits_ce(logits, labels, example_weights)
    dw, _ = net_backward(net, caches, dlogits)
    return per_example, dw


def grad_params(params: ClassifierParams, batch: Batch, *, train=False, rng=None) -> np.ndarray:
    """Gradient of the batch-mean cross-entropy with respect to the weights."""
    _, dw = ce_value_and_grad(params.net, params.w, batch.images, batch.labels, train=train, rng=rng)
    if not np.isfinite(dw).all():
        raise NumericalError("non-finite parameter gradient")
    return dw


def grad_input_batch(params: ClassifierParams, images, labels, example_weights=None) -> np.ndarray:
    """Per-pixel gradients of weighted CE for a batch, evaluation mode."""
    net = params.net
    logits, caches = net_forward(net, params.w, images)
    if example_weights is None:
        example_weights = np.ones(len(labels))
    dlogits = grad_logits_ce(logits, labels, example_weights)
    _, dx = net_backward(net, caches, dlogits)
    return dx


def grad_input(params: ClassifierParams, image, label) -> np.ndarray:
    """Gradient of the loss with respect to the pixels of a single image."""
    dx = grad_input_batch(params, np.asarray(image)[None], np.asarray([label]))
    if not np.isfinite(dx).all():
        raise NumericalError("non-finite input gradient")
    return dx[0]

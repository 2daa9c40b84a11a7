"""Models of natural variation: mappings (x, delta) -> x'.

Every model owns a nuisance space (the canonical box [-1, 1]^q) and maps it
affinely onto its physical parameter range.  Outputs always keep the input's
shape and the canonical [0, 1] pixel range.  Differentiable models expose
vector-Jacobian products with respect to both the nuisance parameter
(`vjp_delta`, used by gradient-based inner maximization) and the input image
(`vjp_input`, used when models are composed).
"""

from __future__ import annotations

import numpy as np

from mbrt.errors import CapabilityError, InputError
from mbrt.images import clip01
from mbrt.variation.space import NuisanceSpace, sample_uniform_many, unit_box


class VariationModel:
    kind = "abstract"
    differentiable = False

    def __init__(self, space: NuisanceSpace):
        self.space = space

    # -- single-image public surface -------------------------------------
    def apply(self, x: np.ndarray, delta) -> np.ndarray:
        """Transform one (C, H, W) image; delta must lie inside the space."""
        delta = self.space.validate(delta)
        x = np.asarray(x, dtype=float)
        if x.ndim != 3:
            raise InputError(f"expected a (C, H, W) image, got shape {x.shape}")
        return self.apply_batch(x[None], delta[None])[0]

    def vjp_delta(self, x, delta, upstream) -> np.ndarray:
        """upstream^T (dG/d delta): contraction of an image-shaped gradient."""
        self._require_differentiable()
        delta = self.space.validate(delta)
        return self.vjp_delta_batch(np.asarray(x, float)[None], delta[None],
                                    np.asarray(upstream, float)[None])[0]

    def vjp_input(self, x, delta, upstream) -> np.ndarray:
        self._require_differentiable()
        delta = self.space.validate(delta)
        return self.vjp_input_batch(np.asarray(x, float)[None], delta[None],
                                    np.asarray(upstream, float)[None])[0]

    def neutral_delta(self):
        """The delta_0 with apply(x, delta_0) == x, when the model has one."""
        return None

    # -- batched surface (implemented by subclasses) ----------------------
    def apply_batch(self, xs: np.ndarray, deltas: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def vjp_delta_batch(self, xs, deltas, upstreams) -> np.ndarray:
        raise CapabilityError(f"{self.kind} model has no nuisance gradients")

    def vjp_input_batch(self, xs, deltas, upstreams) -> np.ndarray:
        raise CapabilityError(f"{self.kind} model has no input gradients")

    def _require_differentiable(self):
        if not self.differentiable:
            raise CapabilityError(f"{self.kind} model is not differentiable in delta")

    def descriptor_fields(self) -> dict:
        """Kind-specific key/value pairs for the model descriptor file."""
        raise NotImplementedError


class AdditiveModel(VariationModel):
    """Norm-bounded additive perturbations: x' = clip(x + scale(delta)).

    q equals the full pixel dimension; the box maps onto the epsilon-ball
    (identically for p=inf, radially for p=2).
    """

    kind = "additive"
    differentiable = True

    def __init__(self, epsilon: float, p, image_shape):
        if epsilon <= 0:
            raise InputError("epsilon must be positive")
        p = float("inf") if p in ("inf", float("inf")) else p
        if p not in (2, 2.0, float("inf")):
            raise InputError(f"norm order must be 2 or inf, got {p}")
        self.epsilon = float(epsilon)
        self.p = float(p)
        self.image_shape = tuple(int(v) for v in image_shape)
        super().__init__(unit_box(int(np.prod(self.image_shape))))

    def _scaled(self, deltas):
        s = deltas.reshape(len(deltas), *self.image_shape)
        if self.p == 2:
            r = np.sqrt((deltas**2).sum(axis=1)).reshape(-1, 1, 1, 1)
            s = s / np.maximum(r, 1.0)
        return self.epsilon * s

    def apply_batch(self, xs, deltas):
        return clip01(xs + self._scaled(deltas))

    def _clipmask(self, xs, deltas):
        v = xs + self._scaled(deltas)
        return (v > 0.0) & (v < 1.0)

    def vjp_delta_batch(self, xs, deltas, upstreams):
        um = (upstreams * self._clipmask(xs, deltas)).reshape(len(xs), -1)
        if self.p == float("inf"):
            return self.epsilon * um
        r = np.sqrt((deltas**2).sum(axis=1, keepdims=True))
        out = np.where(r <= 1.0, um, um / np.maximum(r, 1e-300))
        outside = (r > 1.0)[:, 0]
        if outside.any():
            d, u, rr = deltas[outside], um[outside], r[outside]
            out[outside] -= d * ((d * u).sum(axis=1, keepdims=True)) / rr**3
        return self.epsilon * out

    def vjp_input_batch(self, xs, deltas, upstreams):
        return upstreams * self._clipmask(xs, deltas)

    def neutral_delta(self):
        return np.zeros(self.space.q)

    def descriptor_fields(self):
        return {
            "epsilon": self.epsilon,
            "p": "inf" if self.p == float("inf") else "2",
            "image_shape": "x".join(str(v) for v in self.image_shape),
        }


class RotationModel(VariationModel):
    """Rotation about the image center; angle = pi * delta, q = 1.

    Bilinear interpolation with zero fill outside the frame.  Not exposed as
    differentiable in delta: the interpolation derivative has kinks at every
    pixel-cell crossing, so gradient-based inner maximization refuses it.
    """

    kind = "rotation"
    differentiable = False

    def __init__(self):
        super().__init__(unit_box(1))

    def apply_batch(self, xs, deltas):
        n, c, h, w = xs.shape
        if h != w:
            raise InputError(f"rotation requires square images, got {h}x{w}")
        out = np.empty_like(xs)
        for i in range(n):
            out[i] = self._rotate(xs[i], np.pi * deltas[i, 0])
        return clip01(out)

    @staticmethod
    def _rotate(x, theta):
        c, h, w = x.shape
        cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
        ii, jj = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
        # rotate the sampling grid by -theta (pull-back)
        cos, sin = np.cos(theta), np.sin(theta)
        sy = cy + (ii - cy) * cos + (jj - cx) * sin
        sx = cx - (ii - cy) * sin + (jj - cx) * cos
        y0, x0 = np.floor(sy).astype(int), np.floor(sx).astype(int)
        fy, fx = sy - y0, sx - x0
        out = np.zeros_like(x)
        for dy in (0, 1):
            for dx in (0, 1):
                yy, xx = y0 + dy, x0 + dx
                wgt = (fy if dy else 1 - fy) * (fx if dx else 1 - fx)
                valid = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
                yc, xc = np.clip(yy, 0, h - 1), np.clip(xx, 0, w - 1)
                out += wgt * valid * x[:, yc, xc]
        return out

    def neutral_delta(self):
        return np.zeros(1)

    def descriptor_fields(self):
        return {}


BACKGROUND_THRESHOLD = 12.0 / 255.0


class BackgroundColorModel(VariationModel):
    """Replace background pixels with a color chosen by delta = (r, g, b).

    delta in [-1, 1]^3 maps onto RGB in [0, 255] (stored as [0, 1]).  A pixel
    counts as background when its value is at or below the threshold; with
    mask_mode="all" (default) a pixel is replaced only when all three channels
    are at or below the threshold, while mask_mode="elementwise" replaces each
    channel entry independently, exactly as the elementwise where() rule.
    """

    kind = "background-color"
    differentiable = True

    def __init__(self, threshold: float = BACKGROUND_THRESHOLD, mask_mode: str = "all"):
        if mask_mode not in ("all", "elementwise"):
            raise InputError(f"mask_mode must be 'all' or 'elementwise', got {mask_mode!r}")
        self.threshold = float(threshold)
        self.mask_mode = mask_mode
        super().__init__(unit_box(3))

    def _mask(self, xs):
        if xs.shape[1] != 3:
            raise InputError(f"background-color model needs 3-channel images, got {xs.shape[1]}")
        if self.mask_mode == "all":
            m = (xs <= self.threshold).all(axis=1, keepdims=True)
            return np.broadcast_to(m, xs.shape)
        return xs <= self.threshold

    def _colors(self, deltas):
        return (deltas + 1.0) / 2.0  # [-1,1] -> [0,1] (== [0,255]/255)

    def apply_batch(self, xs, deltas):
        mask = self._mask(xs)
        colors = self._colors(deltas)[:, :, None, None]
        return np.where(mask, np.broadcast_to(colors, xs.shape), xs)

    def vjp_delta_batch(self, xs, deltas, upstreams):
        mask = self._mask(xs)
        return 0.5 * (upstreams * mask).sum(axis=(2, 3))

    def vjp_input_batch(self, xs, deltas, upstreams):
        return upstreams * ~self._mask(xs)

    def descriptor_fields(self):
        return {"threshold": self.threshold, "mask_mode": self.mask_mode}


class PhotometricModel(VariationModel):
    """Analytic photometric transforms, q = 1, neutral at delta = 0.

    brightness: x' = clip(x + amplitude * delta)
    contrast:   x' = clip(m + a(x - m)), a = amplitude ** delta, m = mean(x)
    hue:        x' = clip(R(pi * amplitude * delta) x), rotation of RGB space
                about the gray axis
    """

    kind = "photometric"
    differentiable = True
    SUBKINDS = ("brightness", "contrast", "hue")
    _DEFAULT_AMPLITUDE = {"brightness": 0.5, "contrast": 2.0, "hue": 1.0}

    def __init__(self, subkind: str, amplitude: float | None = None):
        if subkind not in self.SUBKINDS:
            raise InputError(f"unknown photometric kind {subkind!r}")
        self.subkind = subkind
        self.amplitude = float(self._DEFAULT_AMPLITUDE[subkind] if amplitude is None else amplitude)
        if subkind == "contrast" and self.amplitude <= 0:
            raise InputError("contrast amplitude must be positive")
        super().__init__(unit_box(1))

    # gray-axis rotation matrix and its angle derivative
    @staticmethod
    def _hue_matrices(theta):
        u = np.full(3, 1.0 / np.sqrt(3.0))
        k = np.array([[0, -u[2], u[1]], [u[2], 0, -u[0]], [-u[1], u[0], 0]])
        uu = np.outer(u, u)
        eye = np.eye(3)
        r = np.cos(theta) * eye + np.sin(theta) * k + (1 - np.cos(theta)) * uu
        dr = -np.sin(theta) * eye + np.cos(theta) * k + np.sin(theta) * uu
        return r, dr

    def _pre_clip(self, xs, deltas):
        d = deltas[:, 0]
        if self.subkind == "brightness":
            return xs + (self.amplitude * d)[:, None, None, None]
        if self.subkind == "contrast":
            m = xs.mean(axis=(1, 2, 3), keepdims=True)
            a = (self.amplitude ** d)[:, None, None, None]
            return m + a * (xs - m)
        out = np.empty_like(xs)
        for i in range(len(xs)):
            r, _ = self._hue_matrices(np.pi * self.amplitude * d[i])
            out[i] = np.einsum("ab,bhw->ahw", r, xs[i])
        return out

    def apply_batch(self, xs, deltas):
        if self.amplitude == 0.0:
            return xs.copy()
        out = clip01(self._pre_clip(xs, deltas))
        neutral = deltas[:, 0] == 0.0
        if neutral.any():  # keep delta_0 an exact identity (no float round-trip)
            out[neutral] = xs[neutral]
        return out

    def vjp_delta_batch(self, xs, deltas, upstreams):
        if self.amplitude == 0.0:
            return np.zeros((len(xs), 1))
        v = self._pre_clip(xs, deltas)
        um = upstreams * ((v > 0.0) & (v < 1.0))
        d = deltas[:, 0]
        if self.subkind == "brightness":
            g = self.amplitude * um.sum(axis=(1, 2, 3))
        elif self.subkind == "contrast":
            m = xs.mean(axis=(1, 2, 3), keepdims=True)
            a = self.amplitude ** d
            g = np.log(self.amplitude) * a * (um * (xs - m)).sum(axis=(1, 2, 3))
        else:
            g = np.empty(len(xs))
            for i in range(len(xs)):
                _, dr = self._hue_matrices(np.pi * self.amplitude * d[i])
                g[i] = np.pi * self.amplitude * (um[i] * np.einsum("ab,bhw->ahw", dr, xs[i])).sum()
        return g[:, None]

    def vjp_input_batch(self, xs, deltas, upstreams):
        if self.amplitude == 0.0:
            return upstreams.copy()
        v = self._pre_clip(xs, deltas)
        um = upstreams * ((v > 0.0) & (v < 1.0))
        d = deltas[:, 0]
        if self.subkind == "brightness":
            return um
        if self.subkind == "contrast":
            a = (self.amplitude ** d)[:, None, None, None]
            dim = xs[0].size
            return a * um + (1.0 - a) * um.sum(axis=(1, 2, 3), keepdims=True) / dim
        out = np.empty_like(um)
        for i in range(len(xs)):
            r, _ = self._hue_matrices(np.pi * self.amplitude * d[i])
            out[i] = np.einsum("ba,bhw->ahw", r, um[i])
        return out

    def neutral_delta(self):
        return np.zeros(1)

    def descriptor_fields(self):
        return {"subkind": self.subkind, "amplitude": self.amplitude}


class ComposedModel(VariationModel):
    """G(x, delta) = G1(G2(x, delta), delta).

    mode="shared" feeds the same delta to both factors (the composition as
    written); mode="independent" concatenates two independent nuisance vectors
    so each factor is controlled separately.
    """

    kind = "composed"

    def __init__(self, g1: VariationModel, g2: VariationModel, mode: str = "shared"):
        if mode not in ("shared", "independent"):
            raise InputError(f"mode must be 'shared' or 'independent', got {mode!r}")
        self.g1, self.g2, self.mode = g1, g2, mode
        if mode == "shared":
            if g1.space.q != g2.space.q:
                raise InputError(
                    f"shared composition needs matching nuisance dims, got {g1.space.q} and {g2.space.q}"
                )
            space = NuisanceSpace(np.maximum(g1.space.lo, g2.space.lo),
                                  np.minimum(g1.space.hi, g2.space.hi))
        else:
            space = NuisanceSpace(np.concatenate([g1.space.lo, g2.space.lo]),
                                  np.concatenate([g1.space.hi, g2.space.hi]))
        super().__init__(space)
        self.differentiable = g1.differentiable and g2.differentiable

    def _split(self, deltas):
        if self.mode == "shared":
            return deltas, deltas
        q1 = self.g1.space.q
        return deltas[:, :q1], deltas[:, q1:]

    def apply_batch(self, xs, deltas):
        d1, d2 = self._split(deltas)
        return self.g1.apply_batch(self.g2.apply_batch(xs, d2), d1)

    def vjp_delta_batch(self, xs, deltas, upstreams):
        d1, d2 = self._split(deltas)
        mid = self.g2.apply_batch(xs, d2)
        outer = self.g1.vjp_delta_batch(mid, d1, upstreams)
        through = self.g1.vjp_input_batch(mid, d1, upstreams)
        inner = self.g2.vjp_delta_batch(xs, d2, through)
        if self.mode == "shared":
            return outer + inner
        return np.concatenate([outer, inner], axis=1)

    def vjp_input_batch(self, xs, deltas, upstreams):
        d1, d2 = self._split(deltas)
        mid = self.g2.apply_batch(xs, d2)
        return self.g2.vjp_input_batch(xs, d2, self.g1.vjp_input_batch(mid, d1, upstreams))

    def neutral_delta(self):
        n1, n2 = self.g1.neutral_delta(), self.g2.neutral_delta()
        if n1 is None or n2 is None:
            return None
        if self.mode == "shared":
            return n1 if np.array_equal(n1, n2) else None
        return np.concatenate([n1, n2])

    def descriptor_fields(self):
        return {"mode": self.mode}


# -- constructors and module-level operations ------------------------------


def make_additive(epsilon: float, p, image_shape) -> AdditiveModel:
    return AdditiveModel(epsilon, p, image_shape)


def make_rotation() -> RotationModel:
    return RotationModel()


def make_background_color(mask_mode: str = "all") -> BackgroundColorModel:
    return BackgroundColorModel(mask_mode=mask_mode)


def make_photometric(subkind: str, amplitude: float | None = None) -> PhotometricModel:
    return PhotometricModel(subkind, amplitude)


def make_identity() -> PhotometricModel:
    """A model with apply(x, delta) == x for every delta (zero-amplitude shift)."""
    return PhotometricModel("brightness", amplitude=0.0)


def apply(model: VariationModel, x, delta) -> np.ndarray:
    return model.apply(x, delta)


def grad_nuisance(model: VariationModel, x, delta, upstream) -> np.ndarray:
    """Chain-rule contraction of an image-shaped upstream gradient with dG/d delta."""
    return model.vjp_delta(x, delta, upstream)


def compose(g1: VariationModel, g2: VariationModel, mode: str = "shared") -> ComposedModel:
    return ComposedModel(g1, g2, mode)


def manifold_sample(model: VariationModel, x, n: int, rng) -> np.ndarray:
    """n images {G(x, delta_i)} with delta_i uniform over the box: an empirical
    picture of the learned image manifold around x."""
    if n < 1:
        raise InputError(f"manifold_sample needs n >= 1, got {n}")
    deltas = sample_uniform_many(model.space, rng, n)
    return model.apply_batch(np.broadcast_to(np.asarray(x, float), (n, *np.shape(x))).copy(), deltas)

"""Expose a trained translation model as a variation model.

Only the A-to-B direction is used: apply(x, delta) decodes the content code
of x with a style vector obtained by mapping the nuisance box affinely into
style space (delta -> style_scale * delta, covering +-2 sigma of the Gaussian
prior by default).  The whole path is differentiable, so gradient-based inner
maximization works through it.
"""

from __future__ import annotations

import numpy as np

from mbrt.errors import InputError
from mbrt.genmodel.nets import TranslationModel
from mbrt.genmodel.train import load_translation_model
from mbrt.variation.models import VariationModel
from mbrt.variation.space import NuisanceSpace, unit_box


class LearnedVariationModel(VariationModel):
    kind = "learned"
    differentiable = True

    def __init__(self, model: TranslationModel, direction: str = "a2b",
                 space: NuisanceSpace | None = None, style_scale: float = 2.0,
                 checkpoint_path: str | None = None):
        if direction not in ("a2b", "b2a"):
            raise InputError(f"direction must be 'a2b' or 'b2a', got {direction!r}")
        if space is None:
            space = unit_box(model.style_dim)
        if space.q != model.style_dim:
            raise InputError(f"nuisance space q={space.q} does not match style dim {model.style_dim}")
        super().__init__(space)
        self.model = model
        self.direction = direction
        self.style_scale = float(style_scale)
        self.checkpoint_path = checkpoint_path
        self._src = "a" if direction == "a2b" else "b"
        self._dst = "b" if direction == "a2b" else "a"

    def _forward(self, xs, deltas):
        enc_w = self.model.params[f"enc_{self._src}"]
        dec_w = self.model.params[f"dec_{self._dst}"]
        content, _, enc_cache = self.model.enc.forward(enc_w, xs)
        style = self.style_scale * deltas
        img, dec_cache = self.model.dec.forward(dec_w, content, style)
        return img, enc_cache, dec_cache

    def apply_batch(self, xs, deltas):
        img, _, _ = self._forward(np.asarray(xs, float), np.asarray(deltas, float))
        return img

    def vjp_delta_batch(self, xs, deltas, upstreams):
        _, _, dec_cache = self._forward(np.asarray(xs, float), np.asarray(deltas, float))
        _, _, dstyle = self.model.dec.backward(dec_cache, np.asarray(upstreams, float))
        return self.style_scale * dstyle

    def vjp_input_batch(self, xs, deltas, upstreams):
        _, enc_cache, dec_cache = self._forward(np.asarray(xs, float), np.asarray(deltas, float))
        _, dcontent, _ = self.model.dec.backward(dec_cache, np.asarray(upstreams, float))
        _, dx = self.model.enc.backward(enc_cache, dcontent, np.zeros((len(xs), self.model.style_dim)))
        return dx

    def descriptor_fields(self):
        if self.checkpoint_path is None:
            raise InputError("learned model has no checkpoint path; save the snapshot first")
        return {"checkpoint": self.checkpoint_path, "direction": self.direction,
                "style_scale": self.style_scale}


def into_variation_model(model: TranslationModel, direction: str = "a2b",
                         space: NuisanceSpace | None = None, style_scale: float = 2.0,
                         checkpoint_path: str | None = None) -> LearnedVariationModel:
    return LearnedVariationModel(model, direction, space, style_scale, checkpoint_path)


def load_learned_model(checkpoint_path: str, direction: str = "a2b",
                       style_scale: float = 2.0) -> LearnedVariationModel:
    model = load_translation_model(checkpoint_path)
    return LearnedVariationModel(model, direction, style_scale=style_scale,
                                 checkpoint_path=checkpoint_path)

"""Nuisance spaces and models of natural variation G(x, delta)."""

from mbrt.variation.descriptor import load_descriptor, save_descriptor
from mbrt.variation.models import (
    BACKGROUND_THRESHOLD,
    AdditiveModel,
    BackgroundColorModel,
    ComposedModel,
    PhotometricModel,
    RotationModel,
    VariationModel,
    apply,
    compose,
    grad_nuisance,
    make_additive,
    make_background_color,
    make_identity,
    make_photometric,
    make_rotation,
    manifold_sample,
)
from mbrt.variation.space import (
    NuisanceSpace,
    project,
    sample_uniform,
    sample_uniform_many,
    unit_box,
)

__all__ = [
    "BACKGROUND_THRESHOLD",
    "AdditiveModel",
    "BackgroundColorModel",
    "ComposedModel",
    "NuisanceSpace",
    "PhotometricModel",
    "RotationModel",
    "VariationModel",
    "apply",
    "compose",
    "grad_nuisance",
    "load_descriptor",
    "make_additive",
    "make_background_color",
    "make_identity",
    "make_photometric",
    "make_rotation",
    "manifold_sample",
    "project",
    "sample_uniform",
    "sample_uniform_many",
    "save_descriptor",
    "unit_box",
]

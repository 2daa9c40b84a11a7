"""Text descriptor files for variation models.

Line-oriented ``key = value`` format; '#' starts a comment.  Composed models
nest their factors under ``g1.`` / ``g2.`` key prefixes.  Floats are written
with repr() so descriptors round-trip losslessly.

Example::

    kind = photometric
    subkind = brightness
    amplitude = 0.5
    lo = -1.0
    hi = 1.0
"""

from __future__ import annotations

import numpy as np

from mbrt.errors import ConfigError
from mbrt.variation import models as M


def _format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, np.ndarray):
        return " ".join(repr(float(x)) for x in v)
    return str(v)


def _model_lines(model: M.VariationModel, prefix: str = "") -> list[str]:
    lines = [f"{prefix}kind = {model.kind}"]
    for key, value in model.descriptor_fields().items():
        lines.append(f"{prefix}{key} = {_format_value(value)}")
    lines.append(f"{prefix}lo = {_format_value(model.space.lo)}")
    lines.append(f"{prefix}hi = {_format_value(model.space.hi)}")
    if isinstance(model, M.ComposedModel):
        lines += _model_lines(model.g1, prefix=f"{prefix}g1.")
        lines += _model_lines(model.g2, prefix=f"{prefix}g2.")
    return lines


def save_descriptor(model: M.VariationModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(_model_lines(model)) + "\n")


def _parse_lines(text: str) -> dict:
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"descriptor line {lineno} is not 'key = value': {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in fields:
            raise ConfigError(f"duplicate descriptor key {key!r} (line {lineno})")
        fields[key] = value
    return fields


def _build(fields: dict, prefix: str) -> M.VariationModel:
    def get(key, default=None):
        return fields.get(prefix + key, default)

    kind = get("kind")
    if kind is None:
        raise ConfigError(f"descriptor missing {prefix}kind")
    if kind == "additive":
        shape = tuple(int(v) for v in get("image_shape", "").split("x"))
        model = M.AdditiveModel(float(get("epsilon")), get("p"), shape)
    elif kind == "rotation":
        model = M.RotationModel()
    elif kind == "background-color":
        model = M.BackgroundColorModel(float(get("threshold", M.BACKGROUND_THRESHOLD)),
                                       get("mask_mode", "all"))
    elif kind == "photometric":
        amplitude = get("amplitude")
        model = M.PhotometricModel(get("subkind"), None if amplitude is None else float(amplitude))
    elif kind == "composed":
        model = M.ComposedModel(_build(fields, prefix + "g1."), _build(fields, prefix + "g2."),
                                get("mode", "shared"))
    elif kind == "learned":
        from mbrt.genmodel.adapter import load_learned_model

        model = load_learned_model(get("checkpoint"), direction=get("direction", "a2b"),
                                   style_scale=float(get("style_scale", 2.0)))
    else:
        raise ConfigError(f"unknown model kind {kind!r} in descriptor")
    for bound in ("lo", "hi"):
        if get(bound) is not None:
            declared = np.array([float(v) for v in get(bound).split()])
            actual = getattr(model.space, bound)
            if declared.shape != actual.shape or not np.allclose(declared, actual):
                raise ConfigError(
                    f"descriptor {prefix}{bound} = {declared} does not match the model's box {actual}"
                )
    return model


def load_descriptor(path) -> M.VariationModel:
    with open(path, "r", encoding="utf-8") as fh:
        return _build(_parse_lines(fh.read()), "")

"""Construction of test sets carrying two simultaneous shifts.

Every output image passes through transform1 and then transform2, each with
its own nuisance parameter: either a fixed vector or a per-item uniform draw
from a sub-box.  Provenance records both transforms.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from mbrt.datakit.dataset import Dataset
from mbrt.errors import InputError
from mbrt.variation.models import VariationModel


def _resolve_deltas(model: VariationModel, spec, n: int, rng):
    """A (n, q) delta matrix from a fixed vector or a (lo, hi) uniform range."""
    q = model.space.q
    if isinstance(spec, tuple) and len(spec) == 2 and np.ndim(spec[0]) <= 1:
        lo = np.broadcast_to(np.asarray(spec[0], dtype=float), (q,))
        hi = np.broadcast_to(np.asarray(spec[1], dtype=float), (q,))
        if rng is None:
            raise InputError("sampling a delta range requires an rng")
        deltas = rng.uniform(lo, hi, size=(n, q))
    else:
        vec = np.asarray(spec, dtype=float)
        if vec.shape != (q,):
            raise InputError(f"fixed delta must have shape ({q},), got {vec.shape}")
        deltas = np.tile(vec, (n, 1))
    for d in deltas:
        model.space.validate(d)
    return deltas


def build_composed_testset(dataset: Dataset, transform1: VariationModel,
                           transform2: VariationModel, delta1, delta2,
                           rng=None, domain: str | None = None) -> Dataset:
    """Apply transform1 then transform2 to every item.

    delta1/delta2 are fixed nuisance vectors or (lo, hi) ranges sampled
    independently per item.
    """
    n = len(dataset)
    d1 = _resolve_deltas(transform1, delta1, n, rng)
    d2 = _resolve_deltas(transform2, delta2, n, rng)
    images = transform2.apply_batch(transform1.apply_batch(dataset.images, d1), d2)
    tag = domain if domain is not None else f"{dataset.domain or 'data'}/composed"
    return replace(
        dataset,
        images=images,
        domain=tag,
        provenance=f"{dataset.provenance}+{transform1.kind}+{transform2.kind}",
    )

"""Nuisance spaces: axis-aligned boxes of low-dimensional nuisance parameters.

The canonical box is [-1, 1]^q; models map it affinely onto their physical
ranges (angles, RGB values, perturbation balls).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mbrt.errors import InputError


@dataclass(frozen=True)
class NuisanceSpace:
    lo: np.ndarray
    hi: np.ndarray

    def __init__(self, lo, hi):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1 or lo.size < 1:
            raise InputError(f"bounds must be equal-length vectors, got {lo.shape} and {hi.shape}")
        if not (lo < hi).all():
            raise InputError("each lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def q(self) -> int:
        return self.lo.size

    @property
    def width(self) -> np.ndarray:
        return self.hi - self.lo

    def contains(self, delta, atol: float = 0.0) -> bool:
        delta = np.asarray(delta, dtype=float)
        return delta.shape == (self.q,) and bool(
            (delta >= self.lo - atol).all() and (delta <= self.hi + atol).all()
        )

    def validate(self, delta) -> np.ndarray:
        delta = np.asarray(delta, dtype=float)
        if delta.shape != (self.q,):
            raise InputError(f"nuisance parameter has shape {delta.shape}, space has q={self.q}")
        if not self.contains(delta, atol=1e-12):
            raise InputError(f"nuisance parameter {delta} outside box [{self.lo}, {self.hi}]")
        return delta

    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)


def unit_box(q: int) -> NuisanceSpace:
    """The default nuisance space [-1, 1]^q."""
    return NuisanceSpace(-np.ones(q), np.ones(q))


def sample_uniform(space: NuisanceSpace, rng: np.random.Generator) -> np.ndarray:
    """Componentwise uniform draw over the box."""
    return rng.uniform(space.lo, space.hi)


def sample_uniform_many(space: NuisanceSpace, rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(space.lo, space.hi, size=(n, space.q))


def project(space: NuisanceSpace, delta_raw) -> np.ndarray:
    """Componentwise clamp onto the box: idempotent, identity on the interior,
    and distance-minimizing for axis-aligned boxes."""
    delta_raw = np.asarray(delta_raw, dtype=float)
    if delta_raw.shape[-1] != space.q:
        raise InputError(f"vector of length {delta_raw.shape[-1]} projected onto q={space.q} box")
    return np.clip(delta_raw, space.lo, space.hi)

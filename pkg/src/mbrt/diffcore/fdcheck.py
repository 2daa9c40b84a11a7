"""Central finite-difference gradient checking.

Probes random coordinates rather than the full parameter vector, so suites
covering every differentiable operation stay fast.  Double precision and a
step of 1e-5 are assumed by the default tolerance of 1e-4 relative error.

Piecewise-smooth functions (ReLU nets, clipped pixel maps, max pooling) are
differentiable almost everywhere but a probe step can straddle a kink.  Such
probes are detected by comparing the two one-sided slopes and skipped; a probe
only counts when the function is locally linear to within `kink_tol`.
"""

from __future__ import annotations

import numpy as np


def central_diff(f, x: np.ndarray, idx, step: float = 1e-5) -> float:
    """(f(x + step*e_idx) - f(x - step*e_idx)) / (2*step) for flat index idx."""
    xp = x.copy().ravel()
    xm = x.copy().ravel()
    xp[idx] += step
    xm[idx] -= step
    return (f(xp.reshape(x.shape)) - f(xm.reshape(x.shape))) / (2.0 * step)


def probe_gradient(f, x: np.ndarray, analytic: np.ndarray, rng, n_probes: int = 100,
                   step: float = 1e-5, rel_tol: float = 1e-4, abs_floor: float = 1e-8,
                   kink_tol: float = 5e-4):
    """Compare `analytic` against central differences of `f` at random coordinates.

    Draws coordinates without replacement until `n_probes` kink-free probes
    have been checked (or the coordinates are exhausted).  Returns the worst
    relative error among valid probes.  Raises AssertionError on mismatch or
    if fewer than half the requested probes were valid.
    """
    flat = np.asarray(analytic).ravel()
    want = min(n_probes, flat.size)
    order = rng.permutation(flat.size)
    f0 = f(x)
    worst = 0.0
    valid = 0
    for idx in order:
        if valid >= want:
            break
        xp = x.copy().ravel()
        xm = x.copy().ravel()
        xp[idx] += step
        xm[idx] -= step
        fp = f(xp.reshape(x.shape))
        fm = f(xm.reshape(x.shape))
        s_right = (fp - f0) / step
        s_left = (f0 - fm) / step
        scale = max(abs(s_right), abs(s_left), abs_floor)
        if abs(s_right - s_left) / scale > kink_tol:
            continue  # straddles a kink; not differentiable here
        fd = (fp - fm) / (2.0 * step)
        an = flat[idx]
        denom = max(abs(fd), abs(an))
        valid += 1
        if denom < abs_floor:
            continue
        rel = abs(fd - an) / denom
        worst = max(worst, rel)
        if rel > rel_tol:
            raise AssertionError(
                f"gradient mismatch at flat index {idx}: analytic {an:.10g}, "
                f"central-diff {fd:.10g}, rel err {rel:.3g} > {rel_tol}"
            )
    if valid < min(want, flat.size) // 2:
        raise AssertionError(f"only {valid} kink-free probes out of {want} requested")
    return worst

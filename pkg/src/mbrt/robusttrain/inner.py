"""Inner-maximization operations: PGD over pixels, sampling and gradient
ascent over nuisance space, diversity augmentation, and an exhaustive grid
oracle for verification.

All candidate and inner-loop evaluations run the classifier in evaluation
mode; dropout only applies to the outer parameter-update pass.
"""

from __future__ import annotations

import numpy as np

from mbrt.diffcore.loss import loss_ce
from mbrt.diffcore.net import ClassifierParams, grad_input_batch, net_forward
from mbrt.errors import CapabilityError, InputError
from mbrt.variation.models import VariationModel
from mbrt.variation.space import project


def _batch_losses(params: ClassifierParams, images, labels) -> np.ndarray:
    logits, _ = net_forward(params.net, params.w, images)
    return loss_ce(logits, labels)[1]


def pgd_inner(x, y, params: ClassifierParams, epsilon: float = 8.0 / 255.0,
              alpha: float = 0.01, steps: int = 20) -> np.ndarray:
    """Iterated sign-gradient ascent, projected onto the l-inf ball and the
    pixel range.  Accepts one image (C, H, W) or a batch (N, C, H, W)."""
    if epsilon <= 0:
        raise InputError("epsilon must be positive")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 3
    xs = x[None] if single else x
    ys = np.atleast_1d(np.asarray(y))
    lo, hi = xs - epsilon, xs + epsilon
    x_adv = xs.copy()
    for _ in range(steps):
        g = grad_input_batch(params, x_adv, ys, example_weights=np.ones(len(ys)))
        x_adv = np.clip(np.clip(x_adv + alpha * np.sign(g), lo, hi), 0.0, 1.0)
    return x_adv[0] if single else x_adv


def mrt_select(images, labels, model: VariationModel, params: ClassifierParams,
               k: int, rng, granularity: str = "batch"):
    """Worst-of-k nuisance selection (Algorithm 1 lines 4-11).

    Per-example deltas are sampled uniformly; at "batch" granularity the whole
    delta vector with the largest summed loss is kept (the selection rule as
    written), while "per-example" keeps the argmax independently per example.
    Returns (deltas (N, q), info dict).
    """
    if k < 1:
        raise InputError("k must be >= 1")
    n = len(images)
    q = model.space.q
    candidates = rng.uniform(model.space.lo, model.space.hi, size=(k, n, q))
    best_delta = np.zeros((n, q))
    candidate_sums = np.empty(k)
    if granularity == "batch":
        max_loss = 0.0
        best_per_example = np.zeros(n)
        for j in range(k):
            per_ex = _batch_losses(params, model.apply_batch(images, candidates[j]), labels)
            current = float(per_ex.sum())
            candidate_sums[j] = current
            if current > max_loss:
                max_loss = current
                best_delta = candidates[j]
                best_per_example = per_ex
        info = {"selected_batch_loss": max_loss, "selected_per_example": best_per_example,
                "candidate_sums": candidate_sums}
    elif granularity == "per-example":
        max_per_example = np.zeros(n)
        for j in range(k):
            per_ex = _batch_losses(params, model.apply_batch(images, candidates[j]), labels)
            candidate_sums[j] = float(per_ex.sum())
            better = per_ex > max_per_example
            max_per_example[better] = per_ex[better]
            best_delta[better] = candidates[j][better]
        info = {"selected_batch_loss": float(max_per_example.sum()),
                "selected_per_example": max_per_example, "candidate_sums": candidate_sums}
    else:
        raise InputError(f"granularity must be 'batch' or 'per-example', got {granularity!r}")
    return best_delta, info


def mat_ascent(images, labels, model: VariationModel, params: ClassifierParams,
               k: int, alpha: float, sign_grad: bool = False):
    """k projected-gradient-ascent steps on per-example deltas, starting at 0.

    Requires a model that is differentiable in delta.  Returns (deltas, info).
    """
    if not model.differentiable:
        raise CapabilityError(f"MAT needs nuisance gradients; {model.kind} model has none")
    n = len(images)
    deltas = np.zeros((n, model.space.q))
    for _ in range(k):
        varied = model.apply_batch(images, deltas)
        upstream = grad_input_batch(params, varied, labels, example_weights=np.ones(n))
        g = model.vjp_delta_batch(images, deltas, upstream)
        step = np.sign(g) if sign_grad else g
        deltas = project(model.space, deltas + alpha * step)
    per_ex = _batch_losses(params, model.apply_batch(images, deltas), labels)
    return deltas, {"selected_per_example": per_ex, "selected_batch_loss": float(per_ex.sum())}


def mda_augment(images, labels, model: VariationModel, k: int, rng):
    """k independent uniform draws per example; labels are inherited.

    Returns (generated images (k*N, C, H, W), labels (k*N,)) with draw-major
    ordering (all of draw 0, then draw 1, ...).
    """
    if k < 1:
        raise InputError("k must be >= 1")
    n = len(images)
    deltas = rng.uniform(model.space.lo, model.space.hi, size=(k, n, model.space.q))
    gen = np.concatenate([model.apply_batch(images, deltas[j]) for j in range(k)], axis=0)
    return gen, np.tile(np.asarray(labels), k)


def brute_force_inner(model: VariationModel, x, y, params: ClassifierParams,
                      resolution: int = 201):
    """Exhaustive grid scan of the inner maximization over the nuisance box.

    Feasible for q <= 3.  Ties break toward the lexicographically smallest
    grid point (strict improvement required along the scan).
    Returns (delta_star, loss_star).
    """
    q = model.space.q
    if q > 3:
        raise CapabilityError(f"grid oracle is intractable for q={q} > 3")
    if resolution < 2:
        raise InputError("grid resolution must be >= 2")
    axes = [np.linspace(model.space.lo[d], model.space.hi[d], resolution) for d in range(q)]
    x = np.asarray(x, dtype=float)
    best_loss = -np.inf
    best_delta = None
    if q == 1:
        grid = axes[0][:, None]
        losses = _grid_losses(model, x, y, params, grid)
        j = int(np.argmax(losses))  # argmax returns the first maximizer
        return grid[j].copy(), float(losses[j])
    # scan outer axes in lexicographic order, batching the innermost axis
    outer_shape = tuple(resolution for _ in range(q - 1))
    for outer_idx in np.ndindex(outer_shape):
        head = np.array([axes[d][outer_idx[d]] for d in range(q - 1)])
        grid = np.concatenate(
            [np.tile(head, (resolution, 1)), axes[q - 1][:, None]], axis=1
        )
        losses = _grid_losses(model, x, y, params, grid)
        j = int(np.argmax(losses))
        if losses[j] > best_loss:
            best_loss = float(losses[j])
            best_delta = grid[j].copy()
    return best_delta, best_loss


def _grid_losses(model, x, y, params, grid):
    tiled = np.broadcast_to(x, (len(grid), *x.shape)).copy()
    varied = model.apply_batch(tiled, grid)
    return _batch_losses(params, varied, np.full(len(grid), y))

"""The training loop shared by ERM, PGD, and the model-based algorithms.

Every algorithm performs the same outer minimization; they differ only in the
rows added to each update's "super batch" and their example weights:

    erm:  clean rows, weight 1/m
    pgd:  adversarially perturbed rows, weight 1/m
    mrt:  worst-of-k generated rows (1/m) + clean rows (lambda/m)
    mat:  gradient-ascent generated rows (1/m) + clean rows (lambda/m)
    mda:  k generated rows per example (1/m each: the verbatim k-sum) + clean
          rows (lambda/m); a mean-normalized variant divides the k-sum by k

The 1/m batch-mean normalization is shared by all algorithms, so with an
identity model and lambda = 0 every model-based update collapses bit-for-bit
onto the ERM update.  When lambda = 0 the clean rows are omitted entirely:
they would carry zero weight but would still shift the seeded dropout masks.

Inner maximization (candidate scoring, ascent, PGD) always runs the network
in evaluation mode; dropout applies only to the update pass.
"""

from __future__ import annotations

import time

import numpy as np

from mbrt.datakit.dataset import Dataset
from mbrt.diffcore.loss import loss_ce
from mbrt.diffcore.net import ClassifierParams, build_net, ce_value_and_grad, init_params, net_forward
from mbrt.diffcore.optim import OptimState, update_step
from mbrt.errors import InputError
from mbrt.robusttrain.config import EpochStats, TrainConfig, TrainReport
from mbrt.robusttrain.inner import mat_ascent, mda_augment, mrt_select, pgd_inner
from mbrt.seeding import substream
from mbrt.variation.models import VariationModel


def default_mat_alpha(model: VariationModel) -> float:
    return 0.1 * float(model.space.width.max())


def _epoch_eval(net, w, images, labels, batch_size):
    """Evaluation-mode mean loss and top-1 over a dataset."""
    losses = []
    correct = 0
    for start in range(0, len(images), batch_size):
        xb = images[start : start + batch_size]
        yb = labels[start : start + batch_size]
        logits, _ = net_forward(net, w, xb)
        losses.append(loss_ce(logits, yb)[1])
        correct += int((logits.argmax(axis=1) == yb).sum())
    per = np.concatenate(losses)
    return float(per.mean()), 100.0 * correct / len(images)


def train(data: Dataset, config: TrainConfig, model: VariationModel | None = None) -> TrainReport:
    """Run one training algorithm on a labeled dataset.

    `model` is the variation model G; required for mrt/mat/mda, ignored by
    erm, and unused by pgd (whose adversary is the pixel-space ball).
    """
    if len(data) == 0:
        raise InputError("training dataset is empty")
    labels = data.require_labels()
    algo = config.algorithm
    if algo in ("mrt", "mat", "mda") and model is None:
        raise InputError(f"{algo} requires a variation model")
    images = np.asarray(data.images, dtype=config.np_dtype)
    net = build_net(config.arch)
    w = init_params(net, config.seed, dtype=config.np_dtype)
    state = OptimState(rule=config.optimizer, lr=config.lr, momentum=config.momentum)
    mat_alpha = config.mat_alpha
    if algo == "mat" and mat_alpha is None:
        mat_alpha = default_mat_alpha(model)
    report = TrainReport(config=config, mat_alpha_used=mat_alpha)
    n = len(images)
    lam = config.lam
    t0 = time.time()
    for epoch in range(config.epochs):
        perm = substream(config.seed, "shuffle", epoch).permutation(n)
        model_loss_sum = 0.0
        model_loss_count = 0
        for b, start in enumerate(range(0, n, config.batch_size)):
            idx = perm[start : start + config.batch_size]
            xb, yb = images[idx], labels[idx]
            m = len(idx)
            params = ClassifierParams(config.arch, w)
            if algo == "erm":
                rows_x, rows_y = xb, yb
                weights = np.full(m, 1.0 / m)
            elif algo == "pgd":
                rows_x = pgd_inner(xb, yb, params, config.pgd_epsilon, config.pgd_alpha,
                                   config.pgd_steps)
                rows_y = yb
                weights = np.full(m, 1.0 / m)
            else:
                if algo == "mrt":
                    deltas, info = mrt_select(xb, yb, model, params, config.k,
                                              substream(config.seed, "mrt", epoch, b),
                                              config.mrt_granularity)
                    gen_x, gen_y = model.apply_batch(xb, deltas), yb
                elif algo == "mat":
                    deltas, info = mat_ascent(xb, yb, model, params, config.k, mat_alpha,
                                              config.mat_sign_grad)
                    gen_x, gen_y = model.apply_batch(xb, deltas), yb
                else:  # mda
                    gen_x, gen_y = mda_augment(xb, yb, model, config.k,
                                               substream(config.seed, "mda", epoch, b))
                    info = None
                gen_w = np.full(len(gen_x), 1.0 / m)
                if algo == "mda" and config.mda_normalize:
                    gen_w /= config.k
                if lam > 0.0:
                    rows_x = np.concatenate([gen_x, xb])
                    rows_y = np.concatenate([gen_y, yb])
                    weights = np.concatenate([gen_w, np.full(m, lam / m)])
                else:
                    rows_x, rows_y, weights = gen_x, gen_y, gen_w
            rows_x = np.asarray(rows_x, dtype=config.np_dtype)
            per_ex, grad = ce_value_and_grad(net, w, rows_x, rows_y, weights, train=True,
                                             rng=substream(config.seed, "dropout", epoch, b))
            if algo not in ("erm",):
                k_rows = len(per_ex) - (m if (algo != "pgd" and lam > 0.0) else 0)
                model_loss_sum += float(per_ex[:k_rows].mean())
                model_loss_count += 1
            w, state = update_step(w, grad, state)
        clean_loss, top1 = _epoch_eval(net, w, images, labels, config.batch_size)
        model_loss = model_loss_sum / model_loss_count if model_loss_count else clean_loss
        report.epochs.append(EpochStats(epoch, clean_loss, model_loss, top1, time.time() - t0))
    report.params = ClassifierParams(config.arch, w)
    return report


def erm_train(data: Dataset, config: TrainConfig) -> TrainReport:
    if config.algorithm != "erm":
        raise InputError("erm_train requires algorithm='erm'")
    return train(data, config)


def pgd_train(data: Dataset, config: TrainConfig) -> TrainReport:
    if config.algorithm != "pgd":
        raise InputError("pgd_train requires algorithm='pgd'")
    return train(data, config)


def model_train(data: Dataset, model: VariationModel, config: TrainConfig) -> TrainReport:
    if config.algorithm not in ("mrt", "mat", "mda"):
        raise InputError("model_train requires algorithm in {mrt, mat, mda}")
    return train(data, config, model)

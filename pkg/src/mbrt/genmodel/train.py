"""Alternating translation-model training with scheduled snapshots.

Each iteration performs one discriminator ascent step (on fresh samples) and
then one generator descent step, batch size 1 by default.  Snapshots of the
full model are kept at the scheduled iteration counts; the snapshot family is
what the model-quality study consumes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from mbrt.diffcore.checkpoint import load_checkpoint, save_checkpoint
from mbrt.diffcore.optim import OptimState, update_step
from mbrt.errors import FormatError, InputError, NumericalError
from mbrt.genmodel.losses import (
    MunitHyper,
    StylePrior,
    discriminator_grads,
    gen_pass,
    generator_grads,
    losses_from_pass,
)
from mbrt.genmodel.nets import ALL_PARTS, DIS_PARTS, GEN_PARTS, NetConfig, TranslationModel
from mbrt.seeding import substream


@dataclass
class Snapshot:
    iteration: int
    model: TranslationModel
    losses: dict


def train_translation(domain_a, domain_b, hyper: MunitHyper, seed: int = 0,
                      cfg: NetConfig | None = None):
    """Fit a TranslationModel on two unpaired image stacks.

    Returns (model, snapshots, history) where history is one loss dict per
    iteration.  A snapshot at iteration 0 means the initialization itself.
    """
    xa_all = np.asarray(domain_a, dtype=float)
    xb_all = np.asarray(domain_b, dtype=float)
    if len(xa_all) == 0 or len(xb_all) == 0:
        raise InputError("both domains must be nonempty")
    if cfg is None:
        cfg = NetConfig(image_shape=xa_all.shape[1:])
    model = TranslationModel(cfg, seed=seed)
    prior = StylePrior(cfg.style_dim)

    def make_state():
        return {
            name: OptimState(rule=hyper.optimizer, lr=hyper.lr, momentum=hyper.momentum,
                             weight_decay=hyper.weight_decay)
            for name in ALL_PARTS
        }

    states = make_state()
    snapshots = []
    history = []
    schedule = list(hyper.snapshot_schedule)
    if schedule and schedule[0] == 0:
        snapshots.append(Snapshot(0, model.copy(), {}))
        schedule.pop(0)
    for it in range(1, hyper.iterations + 1):
        rng = substream(seed, "munit-iter", it)
        lr_t = hyper.lr * hyper.lr_gamma ** ((it - 1) // hyper.lr_step) if hyper.lr_step else hyper.lr
        ia = rng.integers(0, len(xa_all), size=hyper.batch_size)
        ib = rng.integers(0, len(xb_all), size=hyper.batch_size)
        xa, xb = xa_all[ia], xb_all[ib]

        # discriminator ascent on its own prior draws
        fw = gen_pass(model, xa, xb, prior.sample(rng, len(xb)), prior.sample(rng, len(xa)))
        dgrads = discriminator_grads(model, fw)
        for name in DIS_PARTS:
            state = states[name]
            state.lr = lr_t
            model.params[name], states[name] = update_step(model.params[name], -dgrads[name], state)

        # generator descent against the updated discriminators
        fw = gen_pass(model, xa, xb, prior.sample(rng, len(xb)), prior.sample(rng, len(xa)))
        losses = losses_from_pass(fw, hyper)
        if not np.isfinite(losses["total"]):
            raise NumericalError(f"translation training diverged at iteration {it}: {losses}")
        ggrads = generator_grads(model, fw, hyper)
        for name in GEN_PARTS:
            state = states[name]
            state.lr = lr_t
            model.params[name], states[name] = update_step(model.params[name], ggrads[name], state)

        history.append({"iteration": it, **losses})
        if schedule and it == schedule[0]:
            snapshots.append(Snapshot(it, model.copy(), dict(losses)))
            schedule.pop(0)
    return model, snapshots, history


def save_translation_model(path, model: TranslationModel) -> None:
    """Checkpoint with a section table recording each sub-network's range."""
    sections = {}
    parts = []
    offset = 0
    for name in ALL_PARTS:
        vec = model.params[name]
        sections[name] = (offset, vec.size)
        parts.append(vec)
        offset += vec.size
    save_checkpoint(path, model.cfg.encode_str(), np.concatenate(parts), sections)


def load_translation_model(path) -> TranslationModel:
    ck = load_checkpoint(path)
    cfg = NetConfig.from_str(ck.descriptor)
    missing = set(ALL_PARTS) - set(ck.sections)
    if missing:
        raise FormatError(f"translation checkpoint missing sections {sorted(missing)}")
    params = {}
    for name in ALL_PARTS:
        offset, length = ck.sections[name]
        params[name] = ck.params[offset : offset + length].astype(float)
    return TranslationModel(cfg, params)


def write_snapshot_manifest(directory, snapshots) -> str:
    """Save each snapshot and write the text index of (iteration, path)."""
    os.makedirs(directory, exist_ok=True)
    manifest = os.path.join(directory, "snapshots.manifest")
    lines = []
    for snap in snapshots:
        fname = f"snapshot_{snap.iteration:06d}.mbrt"
        save_translation_model(os.path.join(directory, fname), snap.model)
        lines.append(f"{snap.iteration}\t{fname}")
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return manifest


def read_snapshot_manifest(manifest_path):
    """Yield (iteration, absolute path) pairs from a snapshot manifest."""
    base = os.path.dirname(os.path.abspath(manifest_path))
    entries = []
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                it_str, rel = line.split("\t")
                entries.append((int(it_str), os.path.join(base, rel)))
            except ValueError as exc:
                raise FormatError(f"bad manifest line {lineno}: {line!r}") from exc
    return entries

"""Desk-scale experiment orchestration.

Each experiment runs several seeded training arms, evaluates them on a
shifted test domain, and emits fixed-schema CSVs (plus an SVG curve where a
curve is the point).  Runs are deterministic given (config, seeds); rows are
emitted in sorted order so outputs are byte-stable.
"""

from __future__ import annotations

import os
from dataclasses import replace

import numpy as np

from mbrt.datakit.colorize import colorize_background
from mbrt.datakit.composed import build_composed_testset
from mbrt.datakit.dataset import Dataset
from mbrt.datakit.synth import make_shape_domains, render_digits, render_shapes
from mbrt.errors import InputError
from mbrt.genmodel.adapter import into_variation_model
from mbrt.genmodel.losses import MunitHyper
from mbrt.genmodel.nets import NetConfig
from mbrt.genmodel.train import load_translation_model, read_snapshot_manifest, train_translation
from mbrt.harness.evalmetrics import evaluate, invariance_rate
from mbrt.harness.results import svg_line_plot, write_csv
from mbrt.robusttrain.config import TrainConfig
from mbrt.robusttrain.inner import mrt_select
from mbrt.robusttrain.loop import train
from mbrt.seeding import substream
from mbrt.variation.models import compose, make_background_color, make_photometric

DIGIT_ARCH = "in3x28x28,c8-3,p2,c16-3,p2,flat,fc32,fc10"
SHAPE_ARCH = "in3x8x8,c8-3,p2,c16-3,p2,flat,fc32,fc4"


def _mean(values):
    return float(np.mean(values))


# -- background-color transfer experiment -----------------------------------


def background_color_experiment(outdir, seeds=(0, 1, 2), n_train=2000, n_test=1000,
                                epochs=8, dtype="float32", data_seed=11,
                                algorithms=("erm", "mrt", "mat", "mda"),
                                invariance_samples=3):
    """Blue-background training domain, red-background test domain.

    The baseline trains on the blue-colorized digits.  The model-based arms
    receive the same digits through their pristine dark-background sources
    together with the known background-color model: the colorized domains are
    exactly that model's outputs at fixed deltas, and its threshold rule only
    detects background on the pristine sources.
    """
    os.makedirs(outdir, exist_ok=True)
    src_train = render_digits(n_train, seed=data_seed, domain="digits-src-train")
    src_test = render_digits(n_test, seed=data_seed + 88, domain="digits-src-test")
    blue_train = colorize_background(src_train, (0, 0, 255), domain="digits-blue")
    blue_test = colorize_background(src_test, (0, 0, 255), domain="digits-blue-test")
    red_test = colorize_background(src_test, (255, 0, 0), domain="digits-red-test")
    bg = make_background_color()
    rows = []
    for algo in algorithms:
        for seed in seeds:
            cfg = TrainConfig(algorithm=algo, epochs=epochs, seed=seed, arch=DIGIT_ARCH,
                              dtype=dtype)
            data = blue_train if algo in ("erm", "pgd") else src_train
            report = train(data, cfg, None if algo in ("erm", "pgd") else bg)
            red = evaluate(report.params, red_test)
            blue = evaluate(report.params, blue_test)
            inv = invariance_rate(report.params, bg, src_test, invariance_samples,
                                  substream(seed, "invariance", cfg.k))
            rows.append((algo, cfg.k, seed, red.top1, red.top5, blue.top1, inv))
    rows.sort(key=lambda r: (r[0], r[2]))
    write_csv(os.path.join(outdir, "bgcolor_runs.csv"),
              ["algorithm", "k", "seed", "red_top1", "red_top5", "blue_top1", "invariance"], rows)
    summary = {}
    for algo in algorithms:
        arows = [r for r in rows if r[0] == algo]
        summary[algo] = {
            "red_top1": _mean([r[3] for r in arows]),
            "blue_top1": _mean([r[5] for r in arows]),
            "invariance": _mean([r[6] for r in arows]),
        }
    write_csv(os.path.join(outdir, "bgcolor_summary.csv"),
              ["algorithm", "mean_red_top1", "mean_blue_top1", "mean_invariance",
               "gap_over_erm"],
              [(a, summary[a]["red_top1"], summary[a]["blue_top1"], summary[a]["invariance"],
                summary[a]["red_top1"] - summary["erm"]["red_top1"])
               for a in sorted(summary)])
    return {"rows": rows, "summary": summary}


# -- composed-shift experiment ----------------------------------------------


def composed_shift_experiment(outdir, seeds=(0, 1, 2), n_train=2000, n_test=1000,
                              epochs=8, dtype="float32", data_seed=21,
                              algorithms=("erm", "mda"), shift_band=(0.55, 0.95)):
    """Simultaneous brightness and contrast shift.

    Training data is unshifted; the test set carries both shifts, built by
    build_composed_testset with per-item uniform draws from the high band.
    The model-based arm trains against the composed model (shared delta).
    """
    os.makedirs(outdir, exist_ok=True)
    train_ds = render_digits(n_train, seed=data_seed, domain="digits-train")
    test_src = render_digits(n_test, seed=data_seed + 88, domain="digits-test")
    brightness = make_photometric("brightness")
    contrast = make_photometric("contrast")
    composed = compose(contrast, brightness)  # brightness applied first, then contrast
    shifted_test = build_composed_testset(test_src, brightness, contrast,
                                          shift_band, shift_band,
                                          rng=substream(data_seed, "composed-test"),
                                          domain="digits-bright-contrast")
    rows = []
    for algo in algorithms:
        for seed in seeds:
            cfg = TrainConfig(algorithm=algo, epochs=epochs, seed=seed, arch=DIGIT_ARCH,
                              dtype=dtype)
            report = train(train_ds, cfg, None if algo in ("erm", "pgd") else composed)
            shifted = evaluate(report.params, shifted_test)
            clean = evaluate(report.params, test_src)
            rows.append((algo, cfg.k, seed, shifted.top1, clean.top1))
    rows.sort(key=lambda r: (r[0], r[2]))
    write_csv(os.path.join(outdir, "composed_runs.csv"),
              ["algorithm", "k", "seed", "shifted_top1", "clean_top1"], rows)
    summary = {
        algo: {
            "shifted_top1": _mean([r[3] for r in rows if r[0] == algo]),
            "clean_top1": _mean([r[4] for r in rows if r[0] == algo]),
        }
        for algo in algorithms
    }
    write_csv(os.path.join(outdir, "composed_summary.csv"),
              ["algorithm", "mean_shifted_top1", "mean_clean_top1"],
              [(a, summary[a]["shifted_top1"], summary[a]["clean_top1"]) for a in sorted(summary)])
    return {"rows": rows, "summary": summary, "test_domain": shifted_test.domain}


# -- k ablation --------------------------------------------------------------


def ablate_k(outdir, k_list=(1, 5, 10, 20, 50), seeds=(0, 1, 2),
             algorithms=("mrt", "mat", "mda"), n_train=600, n_test=600, epochs=3,
             dtype="float32", data_seed=31, size=20, probe_batches=20):
    """One full training run per (algorithm, k, seed) on a reduced
    background-color task, with a worst-of-k diagnostic column."""
    if not k_list:
        raise InputError("k list must be nonempty")
    os.makedirs(outdir, exist_ok=True)
    arch = f"in3x{size}x{size},c6-3,p2,c12-3,p2,flat,fc24,fc10"
    src_train = render_digits(n_train, seed=data_seed, size=size)
    src_test = render_digits(n_test, seed=data_seed + 88, size=size)
    red_test = colorize_background(src_test, (255, 0, 0), domain="red-test")
    bg = make_background_color()
    rows = []
    for algo in algorithms:
        for k in k_list:
            for seed in seeds:
                cfg = TrainConfig(algorithm=algo, k=int(k), epochs=epochs, seed=seed,
                                  arch=arch, dtype=dtype)
                report = train(src_train, cfg, bg)
                shifted = evaluate(report.params, red_test)
                sel = _mean_selected_loss(report.params, bg, src_test, int(k), seed,
                                          probe_batches)
                rows.append((algo, int(k), seed, shifted.top1, sel))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    write_csv(os.path.join(outdir, "ablate_k_runs.csv"),
              ["algorithm", "k", "seed", "shifted_top1", "mean_selected_loss"], rows)
    agg_rows = []
    curves = {}
    for algo in algorithms:
        pts = []
        for k in k_list:
            vals = [r[3] for r in rows if r[0] == algo and r[1] == int(k)]
            agg_rows.append((algo, int(k), _mean(vals), min(vals), max(vals)))
            pts.append((int(k), _mean(vals)))
        curves[algo] = pts
    write_csv(os.path.join(outdir, "ablate_k_summary.csv"),
              ["algorithm", "k", "mean_shifted_top1", "min", "max"], agg_rows)
    svg_line_plot(os.path.join(outdir, "ablate_k.svg"), curves,
                  title="varying k", xlabel="k", ylabel="shifted top-1 (%)")
    return {"rows": rows, "aggregate": agg_rows}


def _mean_selected_loss(params, model, dataset, k, seed, probe_batches, batch_size=16):
    """Fixed-weight worst-of-k diagnostic: mean selected inner loss over probes."""
    vals = []
    for b in range(probe_batches):
        rng = substream(seed, "ablate-probe", b)
        idx = rng.integers(0, len(dataset), size=batch_size)
        _, info = mrt_select(dataset.images[idx], dataset.require_labels()[idx], model,
                             params, k, rng, "batch")
        vals.append(info["selected_per_example"].mean())
    return _mean(vals)


# -- model-quality study ------------------------------------------------------


def model_quality_study(outdir, seeds=(0, 1, 2), schedule=(10, 500, 2000),
                        n_shapes=300, n_test=800, classifier_epochs=18,
                        batch_size=64, dtype="float32", data_seed=41, munit_seed=0,
                        manifest=None, include_erm=True):
    """Train MRT against translation-model snapshots of increasing quality.

    Snapshots come from `manifest` when given, otherwise a translation model
    is trained on the synthetic shape domains and snapshotted at `schedule`.
    Returns per-(snapshot, seed) shifted-domain accuracies.
    """
    os.makedirs(outdir, exist_ok=True)
    if manifest is not None:
        entries = read_snapshot_manifest(manifest)
        snapshots = [(it, load_translation_model(path)) for it, path in entries]
    else:
        domain_a, domain_b = make_shape_domains(n_shapes, seed=data_seed)
        hyper = MunitHyper(iterations=max(schedule), snapshot_schedule=tuple(sorted(schedule)))
        _, snaps, _ = train_translation(domain_a.images, domain_b.images, hyper,
                                        seed=munit_seed,
                                        cfg=NetConfig((3, 8, 8), hidden=8,
                                                      content_channels=6, style_dim=2))
        snapshots = [(s.iteration, s.model) for s in snaps]
    if len(snapshots) < 2:
        raise InputError(f"model-quality study needs >= 2 snapshots, got {len(snapshots)}")
    train_a = render_shapes(n_shapes, seed=data_seed, palette="a", domain="shapes-a-train")
    test_b = render_shapes(n_test, seed=data_seed + 88, palette="b", domain="shapes-b-test")
    test_a = render_shapes(n_test, seed=data_seed + 44, palette="a", domain="shapes-a-test")
    rows = []
    arms = [("erm", None, -1)] if include_erm else []
    arms += [("mrt", into_variation_model(model), iteration) for iteration, model in snapshots]
    for algo, g, iteration in arms:
        for seed in seeds:
            cfg = TrainConfig(algorithm=algo, epochs=classifier_epochs, seed=seed,
                              batch_size=batch_size, arch=SHAPE_ARCH, dtype=dtype)
            report = train(train_a, cfg, g)
            rows.append((algo, iteration, seed,
                         evaluate(report.params, test_b).top1,
                         evaluate(report.params, test_a).top1))
    rows.sort(key=lambda r: (r[1], r[0], r[2]))
    write_csv(os.path.join(outdir, "model_quality_runs.csv"),
              ["algorithm", "snapshot_iteration", "seed", "shifted_top1", "clean_top1"], rows)
    curve = []
    for iteration in sorted({r[1] for r in rows if r[0] == "mrt"}):
        vals = [r[3] for r in rows if r[0] == "mrt" and r[1] == iteration]
        curve.append((iteration, _mean(vals)))
    series = {"MRT": curve}
    if include_erm:
        erm_mean = _mean([r[3] for r in rows if r[0] == "erm"])
        series["ERM"] = [(curve[0][0], erm_mean), (curve[-1][0], erm_mean)]
    svg_line_plot(os.path.join(outdir, "model_quality.svg"), series,
                  title="snapshot quality vs robustness",
                  xlabel="translation training iteration", ylabel="shifted top-1 (%)")
    return {"rows": rows, "curve": curve,
            "erm_mean": _mean([r[3] for r in rows if r[0] == "erm"]) if include_erm else None}

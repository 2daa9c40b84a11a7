"""Command-line interface.

Subcommands: curate, learn-model, train, eval, ablate-k, model-quality,
compose.  Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from mbrt.datakit.colorize import colorize_background
from mbrt.datakit.dataset import load_dataset, save_dataset
from mbrt.datakit.split import BAND_TABLES, threshold_split
from mbrt.datakit.synth import render_digits, render_shapes
from mbrt.diffcore.checkpoint import load_checkpoint, save_checkpoint
from mbrt.diffcore.net import ClassifierParams
from mbrt.errors import CapabilityError, ConfigError, FormatError, InputError, NumericalError
from mbrt.genmodel.losses import MunitHyper
from mbrt.genmodel.train import train_translation, write_snapshot_manifest
from mbrt.harness import experiments
from mbrt.harness.config import load_experiment_config
from mbrt.harness.evalmetrics import evaluate, invariance_rate
from mbrt.harness.results import write_csv
from mbrt.robusttrain.config import TrainConfig
from mbrt.robusttrain.loop import train as run_training
from mbrt.seeding import substream
from mbrt.variation.descriptor import load_descriptor, save_descriptor
from mbrt.variation.models import make_identity


def _parse_int_list(text):
    return tuple(int(v) for v in text.replace(",", " ").split())


def _add_common(p):
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mbrt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curate", help="build or split datasets")
    _add_common(p)
    p.add_argument("--kind", choices=("bgcolor-digits", "shapes", "split"), default="bgcolor-digits")
    p.add_argument("--n-train", type=int, default=2000)
    p.add_argument("--n-test", type=int, default=1000)
    p.add_argument("--size", type=int, default=28)
    p.add_argument("--data", help="dataset manifest (kind=split)")
    p.add_argument("--metric", choices=("brightness", "contrast"), default="brightness")
    p.add_argument("--table", choices=("svhn", "gtsrb"), default="svhn")

    p = sub.add_parser("learn-model", help="fit a translation model on two domains")
    _add_common(p)
    p.add_argument("--domain-a", required=True, help="manifest of domain A images")
    p.add_argument("--domain-b", required=True, help="manifest of domain B images")
    p.add_argument("--iterations", type=int, default=2000)
    p.add_argument("--snapshots", default="10,500,2000")
    p.add_argument("--style-dim", type=int, default=2)

    p = sub.add_parser("train", help="train a classifier")
    _add_common(p)
    p.add_argument("--config", help="INI experiment config; flags override")
    p.add_argument("--data", help="training dataset manifest")
    p.add_argument("--eval-data", help="held-out dataset manifest")
    p.add_argument("--algo", choices=("erm", "pgd", "mrt", "mat", "mda"))
    p.add_argument("--k", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--model", help="variation-model descriptor file")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--arch")
    p.add_argument("--dtype", choices=("float64", "float32"))

    p = sub.add_parser("eval", help="evaluate a checkpoint")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--model", help="variation model for the invariance rate")
    p.add_argument("--invariance-samples", type=int, default=3)

    p = sub.add_parser("ablate-k", help="k ablation on the background-color task")
    _add_common(p)
    p.add_argument("--k-list", default="1,5,10,20,50")
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--algos", default="mrt,mat,mda")

    p = sub.add_parser("model-quality", help="snapshot-quality study")
    _add_common(p)
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--manifest", help="snapshot manifest; omitted -> train on synthetic domains")
    p.add_argument("--schedule", default="10,500,2000")

    p = sub.add_parser("compose", help="composed brightness+contrast shift experiment")
    _add_common(p)
    p.add_argument("--seeds", default="0,1,2")

    return parser


def cmd_curate(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    if args.kind == "bgcolor-digits":
        src_train = render_digits(args.n_train, seed=args.seed, size=args.size,
                                  domain="digits-src-train")
        src_test = render_digits(args.n_test, seed=args.seed + 88, size=args.size,
                                 domain="digits-src-test")
        for name, ds in (
            ("src-train", src_train),
            ("src-test", src_test),
            ("blue-train", colorize_background(src_train, (0, 0, 255), domain="digits-blue")),
            ("blue-test", colorize_background(src_test, (0, 0, 255), domain="digits-blue-test")),
            ("red-test", colorize_background(src_test, (255, 0, 0), domain="digits-red-test")),
        ):
            print(save_dataset(args.out, name, ds))
    elif args.kind == "shapes":
        for name, palette, n, seed in (
            ("shapes-a-train", "a", args.n_train, args.seed),
            ("shapes-b-train", "b", args.n_train, args.seed + 1),
            ("shapes-a-test", "a", args.n_test, args.seed + 44),
            ("shapes-b-test", "b", args.n_test, args.seed + 88),
        ):
            print(save_dataset(args.out, name, render_shapes(n, seed, palette, size=8, domain=name)))
    else:
        if not args.data:
            raise ConfigError("curate --kind split needs --data")
        ds = load_dataset(args.data)
        split = threshold_split(ds, args.metric, BAND_TABLES[(args.table, args.metric)])
        rows = []
        for band in split.bands:
            sub = split[band.name]
            if len(sub):
                print(save_dataset(args.out, f"{args.metric}-{band.name}", sub))
            rows.append((band.name, len(sub)))
        rows.append(("excluded", split.excluded))
        write_csv(os.path.join(args.out, "split_report.csv"), ["band", "count"], rows)
    return 0


def cmd_learn_model(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    domain_a = load_dataset(args.domain_a)
    domain_b = load_dataset(args.domain_b)
    schedule = _parse_int_list(args.snapshots)
    from mbrt.genmodel.nets import NetConfig

    cfg = NetConfig(domain_a.images.shape[1:], hidden=8, content_channels=6,
                    style_dim=args.style_dim)
    hyper = MunitHyper(iterations=args.iterations, snapshot_schedule=schedule)
    model, snapshots, history = train_translation(domain_a.images, domain_b.images, hyper,
                                                  seed=args.seed, cfg=cfg)
    manifest = write_snapshot_manifest(args.out, snapshots)
    print(manifest)
    write_csv(os.path.join(args.out, "loss_history.csv"),
              ["iteration", "recon", "recon_c", "recon_s", "gan", "total"],
              [(h["iteration"], h["recon"], h["recon_c"], h["recon_s"], h["gan"], h["total"])
               for h in history])
    if snapshots:
        from mbrt.genmodel.adapter import into_variation_model

        last = snapshots[-1]
        ckpt = os.path.join(args.out, f"snapshot_{last.iteration:06d}.mbrt")
        adapter = into_variation_model(last.model, checkpoint_path=ckpt)
        desc_path = os.path.join(args.out, "model.desc")
        save_descriptor(adapter, desc_path)
        print(desc_path)
    return 0


def cmd_train(args) -> int:
    import dataclasses

    if args.config:
        exp = load_experiment_config(args.config)
        kwargs = dataclasses.asdict(exp.train)
        data_path = args.data or exp.data
        eval_path = args.eval_data or exp.eval_data
        model_path = args.model or exp.model
        outdir = args.out if args.out != "results" else exp.out
    else:
        kwargs = {}
        data_path, eval_path, model_path, outdir = args.data, args.eval_data, args.model, args.out
    if args.algo:
        kwargs["algorithm"] = args.algo
        kwargs.pop("k", None)  # re-derive the per-algorithm default unless --k is given
    for flag, key in (("k", "k"), ("lam", "lam"), ("epochs", "epochs"),
                      ("batch_size", "batch_size"), ("arch", "arch"), ("dtype", "dtype")):
        value = getattr(args, flag, None)
        if value is not None:
            kwargs[key] = value
    kwargs["seed"] = args.seed
    cfg = TrainConfig(**kwargs)
    if not data_path:
        raise ConfigError("train needs --data (or a config file with one)")
    data = load_dataset(data_path)
    model = load_descriptor(model_path) if model_path else None
    if cfg.algorithm in ("mrt", "mat", "mda") and model is None:
        raise ConfigError(f"{cfg.algorithm} requires --model")
    os.makedirs(outdir, exist_ok=True)
    report = run_training(data, cfg, model)
    ckpt = os.path.join(outdir, f"{cfg.algorithm}_seed{cfg.seed}.mbrt")
    save_checkpoint(ckpt, cfg.arch, report.params.w)
    report.write_metrics_log(os.path.join(outdir, f"{cfg.algorithm}_seed{cfg.seed}.metrics"))
    print(ckpt)
    if eval_path:
        summary = evaluate(report.params, load_dataset(eval_path))
        write_csv(os.path.join(outdir, f"{cfg.algorithm}_seed{cfg.seed}_eval.csv"),
                  ["top1", "top5", "count"], [(summary.top1, summary.top5, summary.count)])
        print(f"top1 {summary.top1:.2f}  top5 {summary.top5:.2f}")
    return 0


def cmd_eval(args) -> int:
    ck = load_checkpoint(args.checkpoint)
    params = ClassifierParams(ck.descriptor, ck.params.astype(float))
    data = load_dataset(args.data)
    summary = evaluate(params, data)
    inv = ""
    rows = [("top1", summary.top1), ("top5", summary.top5), ("count", summary.count)]
    if args.model:
        model = load_descriptor(args.model)
        rate = invariance_rate(params, model, data, args.invariance_samples,
                               substream(args.seed, "invariance"))
        rows.append(("invariance", rate))
        inv = f"  invariance {rate:.4f}"
    os.makedirs(args.out, exist_ok=True)
    write_csv(os.path.join(args.out, "eval.csv"), ["metric", "value"], rows)
    print(f"top1 {summary.top1:.2f}  top5 {summary.top5:.2f}{inv}")
    return 0


def cmd_ablate_k(args) -> int:
    res = experiments.ablate_k(args.out, k_list=_parse_int_list(args.k_list),
                               seeds=_parse_int_list(args.seeds),
                               algorithms=tuple(args.algos.split(",")))
    for algo, k, mean, lo, hi in res["aggregate"]:
        print(f"{algo} k={k}: top1 {mean:.2f} [{lo:.2f}, {hi:.2f}]")
    return 0


def cmd_model_quality(args) -> int:
    res = experiments.model_quality_study(args.out, seeds=_parse_int_list(args.seeds),
                                          schedule=_parse_int_list(args.schedule),
                                          manifest=args.manifest)
    for iteration, top1 in res["curve"]:
        print(f"snapshot {iteration}: mean shifted top1 {top1:.2f}")
    if res["erm_mean"] is not None:
        print(f"erm baseline: {res['erm_mean']:.2f}")
    return 0


def cmd_compose(args) -> int:
    res = experiments.composed_shift_experiment(args.out, seeds=_parse_int_list(args.seeds))
    for algo, stats in sorted(res["summary"].items()):
        print(f"{algo}: shifted top1 {stats['shifted_top1']:.2f}  clean {stats['clean_top1']:.2f}")
    return 0


_COMMANDS = {
    "curate": cmd_curate,
    "learn-model": cmd_learn_model,
    "train": cmd_train,
    "eval": cmd_eval,
    "ablate-k": cmd_ablate_k,
    "model-quality": cmd_model_quality,
    "compose": cmd_compose,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InputError, CapabilityError, NumericalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: ``morse-datasets {gen,metrics,train,experiment,export}``.

Every option can also come from a JSON file passed with ``--config``; keys
are option names with dashes replaced by underscores (``per_class``,
``seed``...).  Options given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .experiment import ExperimentSpec, dumps_report, run_experiment
from .generator import GenerationConfig, generate_dataset, variant_config
from .metrics import DEFAULT_T_THRESHOLD, compute_metrics
from .mlp import MlpConfig, init_network, save_network, train

log = logging.getLogger("morse_datasets")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="morse-datasets", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a dataset file")
    g.add_argument("--family", type=int, choices=(1, 2, 3, 4), default=1)
    g.add_argument("--sigma", type=int, choices=(0, 1, 2, 3, 4), default=0)
    g.add_argument("--per-class", type=int, help="samples per class (default 7000)")
    g.add_argument("--seed", type=int)
    g.add_argument("--generation-config", type=Path,
                   help="full generator config document; --seed and --per-class still override")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--out", type=Path)

    m = sub.add_parser("metrics", help="compute L, U, D, T for a dataset file")
    m.add_argument("--in", dest="input", type=Path)
    m.add_argument("--threshold", type=float, default=DEFAULT_T_THRESHOLD)
    m.add_argument("--tables", action="store_true", help="include per-class and pairwise tables")
    m.add_argument("--out", type=Path)

    t = sub.add_parser("train", help="train the perceptron on a dataset file")
    t.add_argument("--in", dest="input", type=Path)
    t.add_argument("--hidden", type=int, default=1024)
    t.add_argument("--density", type=float, default=1.0)
    t.add_argument("--l2", type=float, default=0.0)
    t.add_argument("--epochs", type=int, default=30)
    t.add_argument("--batch", type=int, default=128)
    t.add_argument("--lr", type=float, default=1e-3)
    t.add_argument("--seed", type=int)
    t.add_argument("--report", type=Path)
    t.add_argument("--checkpoint", type=Path)
    t.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")

    e = sub.add_parser("experiment", help="run a sweep described by a spec file")
    e.add_argument("--spec", type=Path)
    e.add_argument("--out", type=Path)

    x = sub.add_parser("export", help="export a dataset file as CSV")
    x.add_argument("--in", dest="input", type=Path)
    x.add_argument("--out", type=Path)

    for sp in (g, m, t, e, x):
        sp.add_argument("--config", type=Path, help="JSON file of option values")
    return p


def parse_args(argv=None) -> argparse.Namespace:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        values = json.loads(args.config.read_text("utf-8"))
        values = {k.replace("-", "_"): v for k, v in values.items()}
        if "in" in values:
            values["input"] = values.pop("in")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(values) - known
        if unknown:
            parser.error(f"unknown keys in {args.config}: {sorted(unknown)}")
        for a in sub._actions:
            if a.dest in values and a.type is not None and values[a.dest] is not None:
                values[a.dest] = a.type(values[a.dest])
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    for name in ("input", "out", "spec"):
        if name in vars(args) and getattr(args, name) is None and not (args.command == "metrics" and name == "out"):
            parser.error(f"{args.command}: --{'in' if name == 'input' else name} is required")
    if args.command in ("gen", "train") and args.seed is None:
        parser.error(f"{args.command}: --seed is required")
    return args


def cmd_gen(args) -> int:
    if args.generation_config is not None:
        cfg = GenerationConfig.from_json(args.generation_config.read_text("utf-8"))
        cfg = cfg.replace(master_seed=args.seed)
    else:
        cfg = variant_config(args.family, args.sigma, master_seed=args.seed)
    if args.per_class is not None:
        cfg = cfg.replace(per_class=args.per_class)
    ds = generate_dataset(cfg, workers=args.workers)
    io.save_dataset(ds, args.out)
    log.info("wrote %d samples to %s", len(ds), args.out)
    return 0


def cmd_metrics(args) -> int:
    rep = compute_metrics(io.load_dataset(args.input), threshold=args.threshold)
    text = rep.to_json(tables=args.tables) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
    return 0


def cmd_train(args) -> int:
    ds = io.load_dataset(args.input)
    cfg = MlpConfig(
        layer_sizes=(ds.n_features, args.hidden, ds.n_classes),
        density=args.density,
        l2_lambda=args.l2,
        epochs=args.epochs,
        batch_size=args.batch,
        learning_rate=args.lr,
        init_seed=args.seed,
        shuffle_seed=args.seed,
    )
    net = init_network(cfg)
    rep = train(net, ds, cfg, log=log.info)
    doc = {**rep.to_dict(timing=args.timing), "config": cfg.to_dict()}
    if args.report is None:
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        args.report.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    if args.checkpoint is not None:
        save_network(net, args.checkpoint)
    return 0


def cmd_experiment(args) -> int:
    spec = ExperimentSpec.from_json(args.spec.read_text("utf-8"))
    spec.output = None
    report = run_experiment(spec, log=log.info)
    args.out.write_text(dumps_report(report), encoding="utf-8")
    return 0


def cmd_export(args) -> int:
    io.export_csv(io.load_dataset(args.input), args.out)
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "metrics": cmd_metrics,
    "train": cmd_train,
    "experiment": cmd_experiment,
    "export": cmd_export,
}


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())

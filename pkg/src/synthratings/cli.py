"""Command-line front end.

Exit codes: 0 success, 2 usage / argument errors, 3 unreadable or malformed
input data, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__, recommenders
from ._accel import apply_thread_limit
from .data import stats, write_canonical
from .distributions import BehaviorModel
from .evaluation import METRICS, EvalReport, compare_orderings, run_suite
from .experiments import Seeds, learn_model, sweep
from .generator import GenerationConfig, Mode, generate, generate_baseline
from .ingest import ParseError, SourceFormat, parse

log = logging.getLogger("synthratings")

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _csv_list(text, cast=str):
    return [cast(x.strip()) for x in str(text).split(",") if x.strip()]


def _scalar(text):
    try:
        return json.loads(text)
    except ValueError:
        return text


def parse_hyperparams(entries):
    """``rec.<algo>.<param>=value`` strings (or a dict of them) to nested dicts."""
    out = {}
    items = entries.items() if isinstance(entries, dict) else (e.split("=", 1) for e in entries)
    for key, value in items:
        parts = key.split(".")
        if len(parts) != 3 or parts[0] != "rec":
            raise UsageError(f"hyperparameter key must look like rec.<algo>.<param>, got {key!r}")
        _, algo, param = parts
        if algo not in recommenders.ALGORITHMS:
            raise UsageError(f"unknown algorithm in {key!r}")
        if param not in recommenders.ALGORITHMS[algo].defaults:
            raise UsageError(f"{algo} has no hyperparameter {param!r}")
        out.setdefault(algo, {})[param] = _scalar(value) if isinstance(value, str) else value
    return out


def _flatten_config(cfg):
    flat = {}
    for key, value in cfg.items():
        if key == "rec" and isinstance(value, dict):
            for algo, params in value.items():
                for p, v in params.items():
                    flat.setdefault("set", []).append(f"rec.{algo}.{p}={json.dumps(v)}")
        elif key.startswith("rec."):
            flat.setdefault("set", []).append(f"{key}={json.dumps(value)}")
        else:
            flat[key.replace("-", "_")] = value
    return flat


def load_dataset(args):
    path = args.input
    if path is None:
        raise UsageError("no input dataset given")
    try:
        fmt = SourceFormat.from_name(args.format)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        if path == "-":
            return parse(sys.stdin.buffer, fmt, args.threshold)
        return parse(path, fmt, args.threshold)
    except ParseError as exc:
        raise DataError(f"{path}: {exc}") from None
    except OSError as exc:
        raise DataError(str(exc)) from None


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


# -- commands --------------------------------------------------------------

def cmd_stats(args):
    ds = load_dataset(args)
    s = stats(ds)
    if args.json:
        print(json.dumps(s._asdict(), sort_keys=True))
    else:
        print(f"users\t{s.users}\nitems\t{s.items}\nratings\t{s.ratings}")
    return 0


def cmd_learn(args):
    ds = load_dataset(args)
    if not 1 <= args.clusters <= ds.user_count:
        raise UsageError(f"--clusters must be in [1, {ds.user_count}] for this dataset, got {args.clusters}")
    model, cm = learn_model(ds, args.clusters, seed=args.seed, max_iter=args.max_iter, tol=args.tol)
    for prev, cur in zip(cm.history, cm.history[1:]):
        if cur > prev * (1 + 1e-9) + 1e-9:
            raise AssertionError(f"K-means inertia increased: {prev} -> {cur}")
    model.save(args.output)
    sizes = cm.sizes()
    print(f"k={cm.k} iterations={cm.n_iter} inertia={cm.inertia:.6f}")
    print("cluster\tusers")
    for c, n in enumerate(sizes.tolist()):
        print(f"{c}\t{n}")
    return 0


def cmd_generate(args):
    if args.model is None:
        raise UsageError("--model is required")
    try:
        model = BehaviorModel.load(args.model)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"{args.model}: {exc}") from None
    if args.users is None or args.users < 1:
        raise UsageError("--users must be a positive integer")
    if args.baseline:
        if args.target_ratings is None:
            raise UsageError("--baseline requires --target-ratings")
        cfg = GenerationConfig(users=args.users, seed=args.seed, mode=Mode.BASELINE,
                               target_ratings=args.target_ratings)
        ds = generate_baseline(model, cfg)
    else:
        ds = generate(model, GenerationConfig(users=args.users, seed=args.seed))
    write_canonical(ds, args.out)
    s = stats(ds)
    print(f"users\t{s.users}\nitems\t{s.items}\nratings\t{s.ratings}", file=sys.stderr)
    return 0


def cmd_evaluate(args):
    ds = load_dataset(args)
    algos = _csv_list(args.algorithms)
    for a in algos:
        if a not in recommenders.ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}")
    report = run_suite(ds, algos, seed=args.seed, n=args.n, fraction=args.test_fraction,
                       hyperparams=parse_hyperparams(args.set or []))
    if args.output:
        report.save(args.output)
    print(report.table())
    return 0


def cmd_sweep(args):
    ds = load_dataset(args)
    ks = _csv_list(args.clusters, int)
    if not ks:
        raise UsageError("--clusters needs at least one K")
    for k in ks:
        if not 1 <= k <= ds.user_count:
            raise UsageError(f"K={k} outside [1, {ds.user_count}]")
    metrics = _csv_list(args.metrics)
    for m in metrics:
        if m not in METRICS:
            raise UsageError(f"unknown metric {m!r}")
    seeds = Seeds(cluster=args.cluster_seed, generate=args.generate_seed, split=args.split_seed)
    rows, reports = sweep(ds, ks, seeds, _csv_list(args.algorithms), metrics, n=args.n,
                          users=args.users, hyperparams=parse_hyperparams(args.set or []))
    lines = ["k,algorithm,metric,value\n"] + [f"{k},{a},{m},{v}\n" for k, a, m, v in rows]
    _write_text(args.output, "".join(lines))
    # human-readable pivot: K x algorithm for the first metric
    m0 = metrics[0]
    algos = _csv_list(args.algorithms)
    print(f"{m0}", file=sys.stderr)
    print("K".ljust(8) + "".join(recommenders.ALGORITHMS[a].name.rjust(14) for a in algos), file=sys.stderr)
    for k in ks:
        print(f"{k}".ljust(8) + "".join(f"{reports[k].value(a, m0):14.6f}" for a in algos), file=sys.stderr)
    return 0


def cmd_compare(args):
    try:
        a = EvalReport.load(args.a)
        b = EvalReport.load(args.b)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(str(exc)) from None
    results = []
    for metric in _csv_list(args.metrics):
        try:
            c = compare_orderings(a, b, metric)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        results.append({"metric": metric, "kendall_tau": c.kendall_tau, "concordant": c.concordant,
                        "discordant": c.discordant, "discordant_pairs": [list(p) for p in c.discordant_pairs]})
        pairs = ", ".join(f"{x}/{y}" for x, y in c.discordant_pairs) or "-"
        print(f"{metric:<10} tau={c.kendall_tau:.4f} concordant={c.concordant} "
              f"discordant={c.discordant} discordant_pairs={pairs}")
    if args.output:
        Path(args.output).write_text(json.dumps(results, indent=1) + "\n", encoding="utf-8")
    return 0


# -- parser ----------------------------------------------------------------

def _dataset_args(p):
    p.add_argument("input", nargs="?", help="ratings file, or '-' for standard input")
    p.add_argument("--format", default="canonical", choices=[f.cli_name for f in SourceFormat])
    p.add_argument("--threshold", type=float, default=None,
                   help="keep ratings strictly above this value (default: 3 MovieLens, 0 LastFM)")


def build_parser():
    parser = argparse.ArgumentParser(prog="synthratings", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--config", help="JSON file with default values for any flag")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="users / items / ratings of a dataset")
    _dataset_args(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("learn", help="cluster users and learn the behavior model")
    _dataset_args(p)
    p.add_argument("--clusters", "-k", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("-o", "--output", default="model.json")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("generate", help="sample a synthetic dataset from a behavior model")
    p.add_argument("--model")
    p.add_argument("--users", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--baseline", action="store_true", help="ignore communities (pooled behavior)")
    p.add_argument("--target-ratings", type=int)
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=cmd_generate)

    rec_help = "hyperparameter override rec.<algo>.<param>=value (repeatable)"
    p = sub.add_parser("evaluate", help="hold-out evaluation of the recommenders")
    _dataset_args(p)
    p.add_argument("--algorithms", default=",".join(recommenders.DEFAULT_ALGORITHMS))
    p.add_argument("--seed", type=int, default=0, help="split and training seed")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help=rec_help)
    p.add_argument("-o", "--output", help="report JSON path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="learn/generate/evaluate for several K")
    _dataset_args(p)
    p.add_argument("--clusters", "-k", default="5,10,50,100,200")
    p.add_argument("--users", type=int, default=None, help="default: reference user count")
    p.add_argument("--cluster-seed", type=int, default=0)
    p.add_argument("--generate-seed", type=int, default=0)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--algorithms", default=",".join(recommenders.DEFAULT_ALGORITHMS))
    p.add_argument("--metrics", default=",".join(METRICS))
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help=rec_help)
    p.add_argument("-o", "--output", default="-", help="CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="Kendall tau between two evaluation reports")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--metrics", default="precision,recall,ndcg")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compare)
    return parser


def _parse(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return parser.parse_args(argv)
    try:
        cfg = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        parser.error(f"cannot read config {known.config}: {exc}")
    flat = _flatten_config(cfg)
    config_sets = flat.pop("set", [])
    if "dataset" in flat:
        flat["input"] = flat.pop("dataset")
    for key in ("clusters", "algorithms", "metrics"):
        if isinstance(flat.get(key), list):
            flat[key] = ",".join(str(x) for x in flat[key])
    # config values act as defaults on every subcommand; flags still win
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            sp.set_defaults(**flat)
    args = parser.parse_args(argv)
    if hasattr(args, "set"):
        args.set = config_sets + (args.set or [])
    return args


def main(argv=None):
    parser = build_parser()
    args = _parse(parser, argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose,
                        format="%(levelname)s %(name)s: %(message)s")
    apply_thread_limit()
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"synthratings {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"synthratings {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (AssertionError, FloatingPointError) as exc:
        print(f"synthratings {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"synthratings {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``gomea <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 not solved within budget.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Optional, Sequence

from ..core import EvaluationBudget
from ..problems import KINDS, InstanceFormatError, attach_optimum, generate_instance, read_instance, write_instance
from ..schemes import PRESETS, ConfigError, SchemeConfig, run
from .bisection import Caps, DEFAULT_RUNS, bisect_population_size, derive_seeds
from .stats import mann_whitney_less
from .sweep import certified_instance, scalability_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNSOLVED = 3

_CERTIFY = {"brute": "brute_force", "dp": "nk_dp"}
_METRICS = {"evals": "evaluations", "time": "wall_time"}


def _add_run_flags(p: argparse.ArgumentParser, with_size: bool = True) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--kind", choices=KINDS)
    if with_size:
        src = p.add_mutually_exclusive_group()
        src.add_argument("--instance", metavar="PATH")
        src.add_argument("--size", type=int)
    p.add_argument("--instance-seed", type=int, default=0,
                   help="seed for generating the instance when --size is given")
    p.add_argument("--scheme", choices=("single", "ims", "p3", "p3mi"))
    p.add_argument("--pop", type=int)
    p.add_argument("--hc", choices=("off", "sihc", "ehc"))
    p.add_argument("--fi", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--eds", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--tournament", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--measure", choices=("mi", "nmi"))
    p.add_argument("--filter", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--order", choices=("random", "ascending"))
    p.add_argument("--cgom", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-evals", type=int)
    p.add_argument("--max-seconds", type=float)
    p.add_argument("--max-gens", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gomea", description="GOMEA family optimisers and experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-instance", help="generate a benchmark instance file")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--size", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--certify", choices=sorted(_CERTIFY))

    _add_run_flags(sub.add_parser("run", help="one optimisation run, prints a JSON record"))

    b = sub.add_parser("bisect", help="population-size bisection on one instance")
    _add_run_flags(b)
    b.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    b.add_argument("--max-pop", type=int, default=Caps.max_population)

    s = sub.add_parser("sweep", help="bisection or direct runs over several sizes")
    _add_run_flags(s, with_size=False)
    s.add_argument("--sizes", required=True, help="comma-separated problem sizes")
    s.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    s.add_argument("--max-pop", type=int, default=Caps.max_population)
    s.add_argument("--csv", metavar="PATH")

    c = sub.add_parser("compare", help="one-sided Mann-Whitney test: is A smaller than B?")
    c.add_argument("--a", required=True, metavar="FILE")
    c.add_argument("--b", required=True, metavar="FILE")
    c.add_argument("--metric", choices=sorted(_METRICS), default="evals")
    return parser


def config_from_args(args) -> SchemeConfig:
    cfg = PRESETS[args.preset] if args.preset else SchemeConfig()
    overrides = {
        "scheme": args.scheme, "population_size": args.pop, "hc": args.hc,
        "use_fi": args.fi, "use_eds": args.eds, "tournament": args.tournament,
        "measure": args.measure, "filtered": args.filter, "ordering": args.order,
        "conditional": args.cgom, "lam": args.lam,
    }
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    # measure and filtering come as a pair; follow whichever one was given
    if args.measure is not None and args.filter is None:
        cfg = replace(cfg, filtered=args.measure == "nmi")
    elif args.filter is not None and args.measure is None:
        cfg = replace(cfg, measure="nmi" if args.filter else "mi")
    if cfg.scheme != "single" and args.pop is None:
        cfg = replace(cfg, population_size=None)
    return cfg


def _budget(args) -> EvaluationBudget:
    return EvaluationBudget(max_evaluations=args.max_evals, max_seconds=args.max_seconds,
                            max_generations_per_population=args.max_gens)


def _caps(args) -> Caps:
    caps = Caps(max_population=args.max_pop, max_seconds=args.max_seconds)
    if args.max_evals is not None:
        caps.max_evaluations = args.max_evals
    if args.max_gens is not None:
        caps.max_generations = args.max_gens
    return caps


def _load_instance(args):
    if args.instance:
        instance = read_instance(args.instance)
        if args.kind and args.kind != instance.kind:
            raise ConfigError(f"--kind {args.kind} does not match instance kind {instance.kind}")
        return instance
    if args.kind is None or args.size is None:
        raise ConfigError("give --instance PATH, or --kind together with --size")
    return certified_instance(args.kind, args.size, args.instance_seed)


def _cmd_gen_instance(args) -> int:
    instance = generate_instance(args.kind, args.size, args.seed)
    if args.certify:
        instance = attach_optimum(instance, _CERTIFY[args.certify])
    write_instance(instance, args.out)
    print(json.dumps({"kind": instance.kind, "length": instance.length,
                      "optimum": instance.optimum, "path": args.out}))
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = config_from_args(args).validate()
    instance = _load_instance(args)
    record = run(cfg, instance, _budget(args), seed=args.seed)
    print(json.dumps(record.to_dict()))
    return EXIT_OK if record.success else EXIT_UNSOLVED


def _cmd_bisect(args) -> int:
    cfg = config_from_args(args)
    instance = _load_instance(args)
    seeds = derive_seeds(args.seed, args.runs)
    result = bisect_population_size(cfg, instance, seeds, _caps(args))
    print(json.dumps(result.to_dict()))
    return EXIT_OK if result.success else EXIT_UNSOLVED


def _cmd_sweep(args) -> int:
    if args.kind is None:
        raise ConfigError("sweep needs --kind")
    cfg = config_from_args(args)
    if cfg.scheme == "single":
        replace(cfg, population_size=2).validate()
    else:
        cfg.validate()
    try:
        sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --sizes: {exc}") from exc
    seeds = derive_seeds(args.seed, args.runs)
    summary = scalability_sweep(cfg, args.kind, sizes, seeds, _caps(args),
                                label=args.preset or "custom",
                                instance_seed=args.instance_seed, out=sys.stdout)
    if args.csv:
        summary.write_csv(args.csv)
    return EXIT_UNSOLVED if any(r["failed"] for r in summary.rows) else EXIT_OK


def load_metric(path, metric: str = "evals") -> list[float]:
    """Read one value per run from JSON lines of run records or a bisection result."""
    key = _METRICS[metric]
    values = []
    with open(path) as fh:
        text = fh.read()
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        rows = obj["records"] if "records" in obj else [obj]
        values.extend(float(r[key]) for r in rows)
    if not values:
        raise ConfigError(f"{path} holds no run records")
    return values


def _cmd_compare(args) -> int:
    a = load_metric(args.a, args.metric)
    b = load_metric(args.b, args.metric)
    print(mann_whitney_less(a, b))
    return EXIT_OK


_COMMANDS = {
    "gen-instance": _cmd_gen_instance, "run": _cmd_run, "bisect": _cmd_bisect,
    "sweep": _cmd_sweep, "compare": _cmd_compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, InstanceFormatError, FileNotFoundError, KeyError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

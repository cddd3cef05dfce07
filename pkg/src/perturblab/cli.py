"""Command line front end.

Experiment subcommands read an optional config file, apply flag
overrides, run, and write <out>.csv (per-trial records) plus <out>.json
(summary tables).  The analysis subcommands (lo-check, gap-verify, net,
classify) operate on small text inputs and print their results.

Exit codes: 0 success, 2 invalid input, 3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import concentration, experiments, gaps, witness
from .config import ExperimentConfig, load_config
from .errors import PerturbLabError, ResourceError, ValidationError
from .noise import distribution_from_spec
from .records import format_summary_json, write_records_csv, write_summary_json


def _config_dict(cfg: ExperimentConfig) -> dict:
    out = dataclasses.asdict(cfg)
    out = {k: (list(v) if isinstance(v, tuple) else v) for k, v in out.items()}
    if out.get("out") is None:
        out.pop("out", None)
    return out


def _resolve_config(args: argparse.Namespace, kind: str) -> ExperimentConfig:
    if args.config:
        cfg = load_config(args.config, kind=kind)
    else:
        cfg = ExperimentConfig(kind=kind)
    overrides = {}
    def take(flag, field=None):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field or flag] = value
    take("seed")
    take("trials")
    take("noise")
    take("matrix")
    take("mask")
    take("threads")
    take("out")
    take("precision")
    take("target_exceedance")
    take("grid_points")
    if getattr(args, "sizes", None):
        overrides["sizes"] = tuple(args.sizes)
    if getattr(args, "b_grid", None):
        overrides["b_grid"] = tuple(args.b_grid)
    if getattr(args, "compare_gaussian", False):
        overrides["compare_gaussian"] = True
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg


def _emit(result, cfg: ExperimentConfig) -> None:
    summary = result.summary()
    summary["config"] = _config_dict(cfg)
    if cfg.out:
        write_records_csv(cfg.out + ".csv", result.records)
        write_summary_json(cfg.out + ".json", summary)
        print(f"wrote {cfg.out}.csv and {cfg.out}.json")
    else:
        print(format_summary_json(summary))


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="config file (single-section ini)")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--noise", help="bernoulli | lazy_coin:<alpha> | discretized_gaussian[:R] | gaussian | file:<path>")
    p.add_argument("--matrix", help="zero | graded_diagonal | rank_one_ones | duplicated_column | file:<path>")
    p.add_argument("--mask", help="none | zeros | random:<k>")
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="output stem; writes <out>.csv and <out>.json")
    p.add_argument("--precision", choices=["single", "double"])
    p.add_argument("--b-grid", dest="b_grid", type=float, nargs="+")
    p.add_argument("--target-exceedance", dest="target_exceedance", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--compare-gaussian", dest="compare_gaussian", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perturblab",
        description="condition number experiments for randomly perturbed integer matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("tail", "exceedance curve of the inverse norm"),
        ("cond-tail", "P(kappa >= n^B) over a grid of B"),
        ("ge-check", "elimination error against the exact rational solve"),
        ("minors", "condition numbers of all leading principal minors"),
        ("frozen", "condition tail with frozen entries vs the unmasked run"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_experiment_flags(p)

    p = sub.add_parser("singularity", help="exact P(det = 0) by enumeration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dist", default="bernoulli")
    p.add_argument("--order", choices=["rows", "cols", "both"], default="both")

    p = sub.add_parser("lo-check", help="exact concentration vs its cosine product bound")
    p.add_argument("query", help="query file: dist/v/z/a/mu lines")

    p = sub.add_parser("gap-verify", help="check a discretization against its progression")
    p.add_argument("gap", help="progression file")
    p.add_argument("discretization", help="discretization file")

    p = sub.add_parser("net", help="build a separated covering net on the unit sphere")
    p.add_argument("--dimension", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--seed", type=int, default=20260818)
    p.add_argument("--out", help="points CSV path (default: stdout)")

    p = sub.add_parser("classify", help="rich/poor and singular/nonsingular label for a witness")
    p.add_argument("witness", help="file of whitespace separated integers")
    p.add_argument("--dist", default="bernoulli")
    p.add_argument("--a-exponent", dest="a_exponent", type=float, default=1.0)
    p.add_argument("--b-exponent", dest="b_exponent", type=float, default=None)
    return parser


def _run_experiment(args: argparse.Namespace) -> int:
    kind = args.command
    cfg = _resolve_config(args, kind)
    runner = {
        "tail": experiments.tail_curve,
        "cond-tail": experiments.condition_tail,
        "ge-check": experiments.ge_error_experiment,
        "minors": experiments.minors_experiment,
        "frozen": experiments.frozen_entries_experiment,
    }[kind]
    _emit(runner(cfg), cfg)
    return 0


def _run_singularity(args: argparse.Namespace) -> int:
    dist = distribution_from_spec(args.dist)
    if args.order == "both":
        by_rows = experiments.singularity_probability(args.n, dist, order="rows")
        by_cols = experiments.singularity_probability(args.n, dist, order="cols")
        if by_rows != by_cols:
            raise ValidationError(
                f"enumeration orders disagree: {by_rows} vs {by_cols}"
            )
        value = by_rows
    else:
        value = experiments.singularity_probability(args.n, dist, order=args.order)
    print(f"P(singular) = {value} = {float(value):.10g}")
    return 0


def _run_lo_check(args: argparse.Namespace) -> int:
    parsed = concentration.load_query(args.query)
    if parsed.mu is not None:
        exact = concentration.exact_concentration(parsed.query, parsed.v).sup
        bound = concentration.fourier_bound(parsed.query, parsed.v, parsed.mu)
    else:
        # no mu line: derive certificates from the (symmetric) noise laws
        from .noise import certificate_from_symmetric

        certs = [certificate_from_symmetric(d) for d in parsed.query.dists]
        report = concentration.check_dominance(parsed.query, parsed.v, certs)
        exact, bound = report.exact, report.bound
    gap = bound - float(exact)
    ok = float(exact) <= bound + 1e-12
    print("exact,bound,gap,ok")
    print(f"{float(exact)!r},{bound!r},{gap!r},{int(ok)}")
    return 0 if ok else 1


def _run_gap_verify(args: argparse.Namespace) -> int:
    gap = gaps.load_gap(args.gap)
    result = gaps.load_discretization(args.discretization)
    report = gaps.verify_discretization(gap, result)
    print(f"scale={report.scale} smallness={report.smallness} "
          f"sparseness={report.sparseness} covering={report.covering}")
    return 0 if report.ok else 1


def _run_net(args: argparse.Namespace) -> int:
    net = witness.greedy_net(args.dimension, args.epsilon, args.seed)
    lines = ["# perturblab-net schema=1",
             f"# dimension={net.dimension} epsilon={net.epsilon!r} points={len(net.points)}"]
    for point in net.points:
        lines.append(",".join(repr(float(x)) for x in point))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out} ({len(net.points)} points, "
              f"uncovered mass bound {net.uncovered_mass_bound:.3g})")
    else:
        sys.stdout.write(text)
    return 0


def _run_classify(args: argparse.Namespace) -> int:
    with open(args.witness, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    values = tuple(int(t) for t in tokens)
    if not values:
        raise ValidationError("witness file is empty")
    n = len(values)
    dist = distribution_from_spec(args.dist)
    from .config import default_b_exponent

    b = args.b_exponent if args.b_exponent is not None else default_b_exponent(1.0, 1.0)
    w = witness.WitnessVector(values=values, norm=0.0, b_exponent=b)
    query = concentration.ConcentrationQuery(dists=(dist,) * n)
    labeled = witness.classify_witness(w, query, a_exponent=args.a_exponent)
    report = concentration.classify_rich(query, values, args.a_exponent)
    print(f"class = {labeled.label.name}")
    print(f"sup concentration = {float(report.sup)!r} (threshold {report.threshold!r})")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("tail", "cond-tail", "ge-check", "minors", "frozen"):
            return _run_experiment(args)
        if args.command == "singularity":
            return _run_singularity(args)
        if args.command == "lo-check":
            return _run_lo_check(args)
        if args.command == "gap-verify":
            return _run_gap_verify(args)
        if args.command == "net":
            return _run_net(args)
        if args.command == "classify":
            return _run_classify(args)
        parser.error(f"unknown command {args.command}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PerturbLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: likelihood, sweep, fit, grow, stats.

Exit codes: 0 success, 1 usage or validation error, 2 numerical
degeneracy (zero-probability choices in strict mode, degenerate fits).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import fitting, generate, likelihood, stats
from .errors import AllNonPositiveError, NetgrowthError, RankDeficientError
from .models import parse_components, parse_model, template_names
from .trace import read_trace, write_trace, write_trace_file


class UsageError(NetgrowthError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_axis(text: str) -> tuple[str, list[float]]:
    """``name=start:stop:step`` (inclusive) or ``name=v1,v2,...``."""
    if "=" not in text:
        raise UsageError(f"axis {text!r} lacks '='")
    name, spec = text.split("=", 1)
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"axis range {spec!r} must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise UsageError("axis step must be positive")
        values = list(np.arange(start, stop + step * 0.5, step))
    else:
        values = [float(p) for p in spec.split(",") if p]
    if not values:
        raise UsageError(f"axis {name!r} has no values")
    return name.strip(), values


def _parse_driver(text: str):
    kind, _, arg = text.partition(":")
    if kind == "fixed":
        return generate.FixedAttach(int(arg))
    if kind == "random":
        return generate.RandomAttach(tuple(int(c) for c in arg.split(",")))
    if kind == "mixed":
        from .trace import EventKind

        names = {
            "new": EventKind.NEW_NODE_EDGE,
            "newest": EventKind.NEWEST_NODE_EDGE,
            "inner": EventKind.INNER_EDGE,
        }
        probs = {}
        for item in arg.split(","):
            key, _, val = item.partition("=")
            if key not in names:
                raise UsageError(f"unknown operation {key!r} in mixed driver")
            probs[names[key]] = float(val)
        return generate.Mixed(probs)
    if kind == "replay":
        return generate.Replay(read_trace(arg).event_kinds())
    raise UsageError(f"unknown driver {text!r} (use fixed:M, random:C1,C2, mixed:..., replay:FILE)")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def build_parser() -> _Parser:
    p = _Parser(prog="netgrowth", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--trace", required=True, help="growth trace file")
        sp.add_argument("--choice-set", choices=[likelihood.SIMPLE, likelihood.ALL],
                        default=likelihood.SIMPLE)
        sp.add_argument("--seed-history", action="store_true",
                        help="let seed edges populate the recency history")

    sp = sub.add_parser("likelihood", help="exact log-likelihood of a trace under a model")
    add_common(sp)
    sp.add_argument("--node-model", required=True, help="model for node-attachment events")
    sp.add_argument("--edge-model", help="model for inner-edge events (default: node model)")
    sp.add_argument("--epsilon", type=float, default=0.0,
                    help="mix this much uniform model in before evaluating")
    sp.add_argument("--csv", help="also write a one-row CSV report here")

    sp = sub.add_parser("sweep", help="likelihood surface over a parameter grid")
    add_common(sp)
    sp.add_argument("--node-model", required=True,
                    help="model template with named parameters, e.g. 'rest*pfp(delta),bt*triangle'")
    sp.add_argument("--edge-model")
    sp.add_argument("--axis", action="append", required=True,
                    help="grid axis: name=start:stop:step or name=v1,v2,... (repeatable)")
    sp.add_argument("--epsilon", type=float, default=0.0)
    sp.add_argument("--out", required=True, help="CSV output path ('-' for stdout)")
    sp.add_argument("--jobs", type=int, default=1,
                    help="accepted for compatibility; the cached sweep needs one replay")

    sp = sub.add_parser("fit", help="fit component weights by weighted least squares")
    add_common(sp)
    sp.add_argument("--components", required=True, help="e.g. 'pfp(0.05),triangle'")
    sp.add_argument("--negatives", default="10",
                    help="sampled non-chosen candidates per choice, or 'all'")
    sp.add_argument("--rng", type=int, default=0, help="sampling seed")
    sp.add_argument("--out", help="write the fit report as CSV here")
    sp.add_argument("--design-out", help="dump the design matrix as CSV here")

    sp = sub.add_parser("grow", help="grow a synthetic network and write its trace")
    sp.add_argument("--preset", choices=sorted(generate.PRESETS),
                    help="named experiment configuration")
    sp.add_argument("--driver", help="fixed:M | random:C1,C2 | mixed:new=..,newest=..,inner=.. | replay:FILE")
    sp.add_argument("--node-model")
    sp.add_argument("--edge-model")
    sp.add_argument("--edges", type=int, required=True, help="total edge count including seed")
    sp.add_argument("--rng", type=int, required=True, help="generation seed")
    sp.add_argument("--seed-trace", help="trace file whose edges form the seed graph")
    sp.add_argument("--out", required=True, help="trace output path ('-' for stdout)")

    sp = sub.add_parser("stats", help="statistic trajectory over a trace replay")
    sp.add_argument("--trace", required=True)
    sp.add_argument("--every", type=int, help="sample interval in edges (default: final only)")
    sp.add_argument("--clustering", choices=[stats.TRANSITIVITY, stats.LOCAL_MEAN],
                    default=stats.TRANSITIVITY)
    sp.add_argument("--out", help="CSV output path ('-' or omitted for stdout)")
    return p


def _cmd_likelihood(args) -> int:
    trace = read_trace(args.trace)
    node_model = parse_model(args.node_model)
    edge_model = parse_model(args.edge_model) if args.edge_model else None
    report = likelihood.trace_log_likelihood(
        trace, node_model, edge_model,
        mode=args.choice_set, epsilon=args.epsilon, seed_history=args.seed_history,
    )
    print(f"log_likelihood        {report.log_likelihood:.6f}")
    print(f"choices (t)           {report.choice_count}")
    print(f"deviance              {report.deviance:.6f}")
    print(f"null_deviance         {report.null_deviance:.6f}")
    print(f"c0                    {report.c0:.6f}")
    print(f"zero_prob_choices     {report.zero_probability_choices}")
    if args.csv:
        header = "log_likelihood,t,deviance,null_deviance,c0,zero_probability_choices"
        row = (f"{report.log_likelihood!r},{report.choice_count},{report.deviance!r},"
               f"{report.null_deviance!r},{report.c0!r},{report.zero_probability_choices}")
        _write(args.csv, header + "\n" + row + "\n")
    return 2 if report.zero_probability_choices and args.epsilon == 0.0 else 0


def _cmd_sweep(args) -> int:
    trace = read_trace(args.trace)
    axes = [_parse_axis(a) for a in args.axis]
    free = template_names(args.node_model)
    if args.edge_model:
        free |= template_names(args.edge_model)
    missing = free - {name for name, _ in axes}
    if missing:
        raise UsageError(f"template parameters without an axis: {sorted(missing)}")
    result = likelihood.sweep(
        trace, args.node_model, axes, edge_template=args.edge_model,
        mode=args.choice_set, epsilon=args.epsilon, seed_history=args.seed_history,
    )
    _write(args.out, result.to_csv())
    best = result.argmax
    point = ", ".join(f"{k}={v:g}" for k, v in best.params.items())
    print(f"argmax: {point}  c0={best.c0:.6f}  log_likelihood={best.log_likelihood:.4f}")
    return 0


def _cmd_fit(args) -> int:
    trace = read_trace(args.trace)
    components = parse_components(args.components)
    negatives = None if args.negatives == "all" else int(args.negatives)
    design = fitting.build_design(
        trace, components, negatives=negatives, rng=args.rng,
        mode=args.choice_set, seed_history=args.seed_history,
    )
    if args.design_out:
        _write(args.design_out, design.to_csv())
    report = fitting.fit(design)
    print(report.table())
    if args.out:
        _write(args.out, report.to_csv())
    return 0


def _cmd_grow(args) -> int:
    if bool(args.preset) == bool(args.driver):
        raise UsageError("grow needs exactly one of --preset or --driver")
    if args.preset:
        preset = generate.PRESETS[args.preset]
        driver = preset.make_driver()
        node_model = parse_model(preset.node_model)
        edge_model = None
        model_desc = preset.node_model
    else:
        if not args.node_model:
            raise UsageError("--driver requires --node-model")
        driver = _parse_driver(args.driver)
        node_model = parse_model(args.node_model)
        edge_model = parse_model(args.edge_model) if args.edge_model else None
        model_desc = args.node_model
    seed_edges = None
    if args.seed_trace:
        st = read_trace(args.seed_trace)
        seed_edges = list(st.seed_edges) + [(e.source, e.target) for e in st.events]
    comments = [f"rng-seed: {args.rng}", f"node-model: {model_desc}"]
    trace = generate.grow(
        driver, node_model, edge_model,
        target_edges=args.edges, rng=args.rng,
        seed_edges=seed_edges, comments=comments,
    )
    if args.out == "-":
        sys.stdout.write(write_trace(trace))
    else:
        write_trace_file(trace, args.out)
    print(f"grew {trace.total_edges} edges, {len(trace.labels)} nodes (rng seed {args.rng})",
          file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    trace = read_trace(args.trace)
    every = args.every if args.every is not None else max(1, len(trace.events))
    points = stats.trajectory(trace, every, clustering_kind=args.clustering)
    _write(args.out, stats.trajectory_csv(points))
    return 0


_COMMANDS = {
    "likelihood": _cmd_likelihood,
    "sweep": _cmd_sweep,
    "fit": _cmd_fit,
    "grow": _cmd_grow,
    "stats": _cmd_stats,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (RankDeficientError, AllNonPositiveError) as exc:
        print(f"degenerate fit: {exc}", file=sys.stderr)
        return 2
    except NetgrowthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

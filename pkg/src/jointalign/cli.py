"""Command line entry point: ``jointalign {generate,recover,experiment,walk,check}``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

from . import _accel
from .core import Assignment, InfeasibleParams, RecoveryParams, offset_error_rate, read_truth, write_truth
from .harness import ExperimentSpec, resolve_queries, write_experiment
from .markov import walk_table
from .oracle import build_query_graph, parse_noise, read_graph, write_graph
from .recovery import recover_assignment, spanning_tree_baseline, write_recovery


def _add_model_flags(p):
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--q", type=float, help="+-1 noise level (shorthand for --noise pm:Q)")
    p.add_argument("--noise", help="pm:Q | iid:P0,P1,... | bias:DELTA")
    p.add_argument("--queries", help="query count, or e.g. 25nlogn")
    p.add_argument("--seed", type=int)


def _add_param_flags(p):
    p.add_argument("--mode", choices=("paper", "tuned"))
    p.add_argument("--L", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--b1", type=int)
    p.add_argument("--b", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--anchor", dest="anchor", action="store_const", const="single")
    g.add_argument("--all-pairs", dest="anchor", action="store_const", const="all-pairs")


def _overrides(args):
    keys = ("n", "k", "noise", "queries", "seed", "mode", "L", "epsilon", "b1", "b", "anchor", "trials")
    out = {key: getattr(args, key) for key in keys if getattr(args, key, None) is not None}
    if getattr(args, "q", None) is not None:
        out["noise"] = f"pm:{args.q!r}"
    return out


def cmd_generate(args):
    spec = replace(ExperimentSpec(), **_overrides(args))
    model = parse_noise(spec.noise)
    m = resolve_queries(spec.queries, spec.n)
    truth = Assignment.random(spec.n, spec.k, [spec.seed, 1])
    graph = build_query_graph(spec.n, spec.k, truth, model, m, spec.seed)
    write_truth(f"{args.out}.truth", truth)
    write_graph(f"{args.out}.graph", graph)
    print(f"wrote {args.out}.truth and {args.out}.graph (n={spec.n}, k={spec.k}, m={m})")


def cmd_recover(args):
    graph = read_graph(args.graph)
    spec = replace(ExperimentSpec(n=graph.n, k=graph.k, queries=graph.m), **_overrides(args))
    if spec.mode == "paper":
        delta = parse_noise(spec.noise).plurality_bias(graph.k)
        params = RecoveryParams.paper(graph.n, delta, anchor=spec.anchor)
    else:
        params = RecoveryParams.tuned(spec.L, spec.epsilon, spec.b1, spec.b, graph.m, anchor=spec.anchor)
    seed = graph.seed if args.seed is None else args.seed
    est, diag = recover_assignment(graph, params, seed)
    write_recovery(args.out, est, diag)
    print(f"wrote {args.out}: {len(diag.unresolved)} unresolved, {len(diag.ties)} ties")
    if args.truth:
        truth = read_truth(args.truth)
        base, _ = spanning_tree_baseline(graph, seed)
        print(f"error rate {offset_error_rate(est, truth)!r} (spanning-tree baseline {offset_error_rate(base, truth)!r})")


def cmd_experiment(args):
    spec = ExperimentSpec.from_file(args.config) if args.config else ExperimentSpec()
    spec = replace(spec, **_overrides(args))
    if args.sweep_q:
        spec = replace(spec, sweep={**spec.sweep, "q": [float(v) for v in args.sweep_q.split(",")]})
    out = args.out or spec.out or "experiment"

    def log(r):
        print(f"point {r.point} trial {r.trial}: error {r.error_rate:.4f} baseline {r.baseline_error_rate}", file=sys.stderr)

    _, summary = write_experiment(spec, out, workers=args.workers, log=log if args.verbose else None)
    print(json.dumps(summary["points"], indent=2))


def cmd_walk(args):
    ks = [int(v) for v in args.ks.split(",")]
    qs = [float(v) for v in args.qs.split(",")]
    ts = range(args.t_min, args.t_max + 1)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["k", "q", "t", "p00", "gap", "bound"])
    for row in walk_table(ks, qs, ts):
        w.writerow([row[0], row[1], row[2], *(repr(float(v)) for v in row[3:])])
    if args.out:
        fh.close()


def cmd_check(args):
    from .checks import run_checks

    print(f"backend: {_accel.backend()}")
    return 0 if run_checks() else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="jointalign", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write ground truth and a query graph")
    _add_model_flags(p)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("recover", help="recover an assignment from a query graph file")
    p.add_argument("graph")
    p.add_argument("--truth", help="ground-truth file to score against")
    p.add_argument("--noise", help="noise model (paper mode derives the bias from it)")
    p.add_argument("--q", type=float)
    p.add_argument("--seed", type=int)
    _add_param_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("experiment", help="seeded Monte Carlo sweep to CSV/JSON")
    p.add_argument("--config", help="JSON experiment spec")
    _add_model_flags(p)
    _add_param_flags(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--sweep-q", help="comma-separated q values")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output prefix")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("walk", help="t-step return probabilities and plurality gaps as CSV")
    p.add_argument("--ks", default="3")
    p.add_argument("--qs", default="0.1,0.2,0.3,0.4,0.5")
    p.add_argument("--t-min", type=int, default=1)
    p.add_argument("--t-max", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("check", help="run the invariant and validator sweeps")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except InfeasibleParams as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

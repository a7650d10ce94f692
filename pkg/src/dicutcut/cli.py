"""Command-line interface.

Subcommands: ``solve`` (full pipeline), ``oracle`` (exact values by
enumeration), ``round`` (round a dumped vector solution), ``verify``
(inequality certifiers), ``plot-F`` (margin curve as CSV), ``bench``
(directory of graphs -> CSV).

Exit codes: 0 success; 1 I/O or parse error; 2 solver non-convergence or
driver shortfall; 3 certification failure.  Identical argv and seeds give
byte-identical stdout.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from dicutcut import analysis, oracle, rounding, sdp
from dicutcut._backend import BACKEND
from dicutcut.graph import DirectedGraph, GraphFormatError, parse_graph

EXIT_OK = 0
EXIT_IO = 1
EXIT_INFEASIBLE = 2
EXIT_CERT_FAIL = 3


def _load_graph(path: str) -> DirectedGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def _solver_config(args, restarts=None) -> sdp.SolverConfig:
    return sdp.SolverConfig(
        seed=args.seed,
        restarts=restarts if restarts is not None else args.restarts,
        feas_tol=args.feas_tol,
        norm_tol=args.norm_tol,
        obj_tol=args.obj_tol,
    )


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _cmd_solve(args) -> int:
    g = _load_graph(args.graph)
    inst = sdp.build_relaxation(g)
    try:
        sol = sdp.solve_relaxation(inst, _solver_config(args))
    except sdp.SolverError as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.dump_vectors:
        Path(args.dump_vectors).write_text(
            sdp.format_vectors(sol.vectors), encoding="utf-8"
        )
    result = rounding.deterministic_drive(g, sol, budget=args.budget)
    report = sdp.check_feasibility(inst, sol, args.feas_tol)

    rows = [
        ("graph", f"n={g.n} m={g.m}"),
        ("sdp objective", _fmt(sol.achieved_objective)),
        ("worst violation", f"{report.worst_violation:.3e}"),
        ("target numerator", str(result.target_numerator)),
        ("cut numerator", str(result.numerator)),
        ("cut value", f"{result.value.numerator}/{result.value.denominator}"),
        ("assignment", result.assignment.to_string()),
        ("rounds used", str(result.rounds_used)),
        ("status", "ok" if result.success else "shortfall"),
    ]
    if g.n <= args.oracle_limit:
        dicut_val, _ = oracle.exact_dicut(g, args.oracle_limit)
        cut_val, _ = oracle.exact_cut(g, args.oracle_limit)
        rows.append(("oracle dicut", f"{dicut_val.numerator}/{dicut_val.denominator}"))
        rows.append(("oracle cut", f"{cut_val.numerator}/{cut_val.denominator}"))
        rows.append(
            ("guarantee cut >= dicut", "yes" if result.value >= dicut_val else "NO")
        )
    if args.format == "csv":
        print(",".join(k.replace(" ", "_") for k, _ in rows))
        print(",".join(v for _, v in rows))
    else:
        for k, v in rows:
            print(f"{k}: {v}")
    if not result.success:
        print("driver shortfall: target numerator not reached", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_oracle(args) -> int:
    g = _load_graph(args.graph)
    dicut_val, dicut_wit = oracle.exact_dicut(g, args.limit)
    cut_val, cut_wit = oracle.exact_cut(g, args.limit)
    rows = [
        ("graph", f"n={g.n} m={g.m}"),
        ("dicut", f"{dicut_val.numerator}/{dicut_val.denominator}"),
        ("dicut witness", dicut_wit.to_string()),
        ("cut", f"{cut_val.numerator}/{cut_val.denominator}"),
        ("cut witness", cut_wit.to_string()),
    ]
    if args.format == "csv":
        print(",".join(k.replace(" ", "_") for k, _ in rows))
        print(",".join(v for _, v in rows))
    else:
        for k, v in rows:
            print(f"{k}: {v}")
    return EXIT_OK


def _cmd_round(args) -> int:
    g = _load_graph(args.graph)
    vectors = sdp.parse_vectors(Path(args.vectors).read_text(encoding="utf-8"))
    if vectors.shape[0] != g.n + 1:
        print(
            f"vector dump has {vectors.shape[0]} rows, expected {g.n + 1}",
            file=sys.stderr,
        )
        return EXIT_IO
    inst = sdp.build_relaxation(g)
    sol = sdp.VectorSolution(
        dim=vectors.shape[1],
        vectors=np.ascontiguousarray(vectors),
        achieved_objective=0.0,
    )
    sol.achieved_objective = sdp.sdp_objective(inst, sol)
    if args.a is not None:
        params = rounding.RoundingParams(a=args.a, hyperplane_seed=args.seed)
        transcript = rounding.randomized_round(sol, params, g)
        sys.stdout.write(transcript.to_text())
        return EXIT_OK
    result = rounding.deterministic_drive(g, sol, budget=args.budget)
    print(f"cut numerator: {result.numerator}/{g.m}")
    print(f"assignment: {result.assignment.to_string()}")
    print(f"target numerator: {result.target_numerator}")
    print(f"rounds used: {result.rounds_used}")
    print(f"status: {'ok' if result.success else 'shortfall'}")
    return EXIT_OK if result.success else EXIT_INFEASIBLE


def _cmd_verify(args) -> int:
    if args.lemma == "F":
        report = analysis.certify_F_nonneg(args.step, args.tol)
    elif args.lemma == "G":
        report = analysis.certify_G_nonneg(args.step, args.tol)
    elif args.lemma == "bound":
        report = analysis.certify_bound(args.step, args.tol)
    elif args.lemma == "subst":
        report = analysis.certify_substitutions(args.samples, args.seed, args.tol)
    elif args.lemma == "config":
        report = analysis.certify_config_bound(args.step, args.tol)
    else:  # config-mc
        triples = analysis.sample_box_triples(args.triples, args.seed)
        report, _ = analysis.certify_config_mc(
            triples, args.samples, args.seed, threads=args.threads
        )
    if args.format == "csv":
        print("x,y,z,margin")
        wit = report.witness or ()
        coords = list(wit) + [float("nan")] * (3 - len(wit))
        print(
            ",".join(_fmt(c) for c in coords[:3]) + f",{_fmt(report.min_margin)}"
        )
    else:
        print(report.summary())
    return EXIT_OK if report.passed else EXIT_CERT_FAIL


def _cmd_plot_f(args) -> int:
    rows, omitted = analysis.emit_F_curve(args.x, args.y, args.lo, args.hi, args.step)
    print("z,F")
    for z, val in rows:
        print(f"{z:.12g},{val:.12g}")
    if omitted:
        print(f"omitted {omitted} out-of-domain rows", file=sys.stderr)
    return EXIT_OK


def _cmd_bench(args) -> int:
    paths = sorted(Path(args.directory).glob("*.txt"))
    if not paths:
        print(f"no .txt graphs under {args.directory}", file=sys.stderr)
        return EXIT_IO

    def run_one(path: Path):
        g = parse_graph(path.read_text(encoding="utf-8"))
        start = time.perf_counter()
        dicut_val, _ = oracle.exact_dicut(g, args.limit)
        inst = sdp.build_relaxation(g)
        sol = sdp.solve_relaxation(inst, _solver_config(args))
        result = rounding.deterministic_drive(g, sol, budget=args.budget)
        elapsed = time.perf_counter() - start
        return (
            path.name,
            g.n,
            g.m,
            f"{dicut_val.numerator}/{dicut_val.denominator}",
            _fmt(sol.achieved_objective),
            f"{result.numerator}/{g.m}",
            result.rounds_used,
            "ok" if result.success else "shortfall",
            f"{elapsed:.3f}",
        )

    if args.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(run_one, paths))
    else:
        rows = [run_one(p) for p in paths]
    print("graph,n,m,oracle_dicut,sdp_objective,cut,rounds,status,seconds")
    for row in rows:
        print(",".join(str(c) for c in row))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicutcut",
        description="Directed-cut promise to undirected cut: relaxation, "
        "rounding, oracles, and inequality certifiers "
        f"(kernel backend: {BACKEND}).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, solver=False):
        p.add_argument("--seed", type=int, default=0, help="base RNG seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument(
            "--format", choices=("text", "csv"), default="text", help="output format"
        )
        if solver:
            p.add_argument("--restarts", type=int, default=5)
            p.add_argument("--feas-tol", type=float, default=1e-7)
            p.add_argument("--norm-tol", type=float, default=1e-7)
            p.add_argument("--obj-tol", type=float, default=1e-6)
            p.add_argument("--budget", type=int, default=None, help="max rounding rounds")

    p_solve = sub.add_parser("solve", help="solve the relaxation and round it")
    p_solve.add_argument("graph", help="edge-list file")
    p_solve.add_argument("--dump-vectors", help="write the vector solution here")
    p_solve.add_argument(
        "--oracle-limit",
        type=int,
        default=oracle.DEFAULT_VERTEX_LIMIT,
        help="compare against enumeration when n is at most this",
    )
    add_common(p_solve, solver=True)
    p_solve.set_defaults(func=_cmd_solve)

    p_oracle = sub.add_parser("oracle", help="exact cut/dicut by enumeration")
    p_oracle.add_argument("graph")
    p_oracle.add_argument("--limit", type=int, default=oracle.DEFAULT_VERTEX_LIMIT)
    add_common(p_oracle)
    p_oracle.set_defaults(func=_cmd_oracle)

    p_round = sub.add_parser("round", help="round a dumped vector solution")
    p_round.add_argument("graph")
    p_round.add_argument("vectors", help="vector dump from solve --dump-vectors")
    p_round.add_argument("--a", type=float, default=None, help="single round at this threshold")
    p_round.add_argument("--budget", type=int, default=None)
    add_common(p_round)
    p_round.set_defaults(func=_cmd_round)

    p_verify = sub.add_parser("verify", help="run an inequality certifier")
    p_verify.add_argument(
        "--lemma",
        required=True,
        choices=("F", "G", "bound", "subst", "config", "config-mc"),
    )
    p_verify.add_argument("--step", type=float, default=0.005)
    p_verify.add_argument("--tol", type=float, default=1e-9)
    p_verify.add_argument("--samples", type=int, default=10000)
    p_verify.add_argument("--triples", type=int, default=100)
    add_common(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_plot = sub.add_parser("plot-F", help="CSV table of the margin curve in z")
    p_plot.add_argument("--x", type=float, required=True)
    p_plot.add_argument("--y", type=float, required=True)
    p_plot.add_argument("--lo", type=float, required=True)
    p_plot.add_argument("--hi", type=float, required=True)
    p_plot.add_argument("--step", type=float, default=0.005)
    add_common(p_plot)
    p_plot.set_defaults(func=_cmd_plot_f)

    p_bench = sub.add_parser("bench", help="oracle/solve/round a directory of graphs")
    p_bench.add_argument("directory")
    p_bench.add_argument("--limit", type=int, default=oracle.DEFAULT_VERTEX_LIMIT)
    add_common(p_bench, solver=True)
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

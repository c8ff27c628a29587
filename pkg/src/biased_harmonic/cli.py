"""Command line interface: ``biased-harmonic <command> --input FILE ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .core import Bias, BoundaryProblem, ProblemError, format_scalar, parse_problem, to_scalar
from .game import DEFAULT_STEP_CAP, simulate
from .harmonic import extract_directions, harmonic_residual
from .iterate import (DEFAULT_CAP, DEFAULT_TOLERANCE, EnumerationCapError, brute_force_solve,
                      hybrid_solve, value_iteration)
from .solver import Solution, solve_exact

TOOL = "biased-harmonic"


def format_decimal(x: Fraction, places: int) -> str:
    """Round half to even at ``places`` decimals."""
    scaled = round(x * 10**places)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    if places == 0:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def solve_any(problem: BoundaryProblem, notify=None) -> tuple[Solution, str]:
    """Exact solution for uniform or per-vertex bias, with the method used."""
    if problem.bias.is_uniform:
        return solve_exact(problem), "steepest-path"
    if notify:
        notify("per-vertex bias: solving by value iteration with direction enumeration")
    values = hybrid_solve(problem)
    return Solution(values, extract_directions(problem, values)), "iterate+directions"


def export_dot(problem: BoundaryProblem, solution: Solution) -> str:
    """Graphviz rendering with game moves drawn as arrows.

    Boundary vertices get a double frame.  On each edge the arrow drawn at
    an endpoint tells how the other endpoint treats it: ``normal`` for its
    maximal neighbor (Player I's move), ``normalnormal`` for its minimal
    neighbor (Player II's move).  Edges that some interior endpoint sees as
    neither are dotted.
    """
    graph = problem.graph
    if set(solution.values) != set(range(graph.n)):
        raise ValueError("solution does not match the problem")
    if set(solution.strategy) != set(problem.interior):
        raise ValueError("solution strategy does not match the problem")
    labels = graph.labels
    lines = ["graph harmonic {", "  node [shape=circle];"]
    for x in range(graph.n):
        value = format_scalar(solution.values[x])
        attrs = [f'label="{labels[x]}\\n{value}"']
        if x in problem.boundary:
            attrs += ["shape=box", "peripheries=2"]
        lines.append(f'  "{labels[x]}" [{", ".join(attrs)}];')

    def role(frm: int, to: int) -> str:
        if frm in problem.boundary:
            return "none"
        hi, lo = solution.strategy[frm]
        return {(True, False): "normal", (False, True): "normalnormal",
                (True, True): "normalnormalnormal"}.get((to == hi, to == lo), "neither")

    for a, b in graph.edges():
        head, tail = role(a, b), role(b, a)
        attrs = ["dir=both", f"arrowhead={head.replace('neither', 'none')}",
                 f"arrowtail={tail.replace('neither', 'none')}"]
        if "neither" in (head, tail):
            attrs.append("style=dotted")
        lines.append(f'  "{labels[a]}" -- "{labels[b]}" [{", ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def result_document(problem: BoundaryProblem, solution: Solution, method: str, decimals: int | None = None) -> dict:
    labels = problem.graph.labels
    residuals = harmonic_residual(problem, solution.values)
    doc = {
        "tool": TOOL,
        "version": __version__,
        "method": method,
        "bias": ({"r": format_scalar(problem.bias.r)} if problem.bias.is_uniform else "perVertex"),
        "values": {labels[x]: format_scalar(solution.values[x]) for x in range(problem.graph.n)},
        "strategy": {labels[x]: {"max": labels[hi], "min": labels[lo]}
                     for x, (hi, lo) in sorted(solution.strategy.items())},
        "trace": [
            {"path": [labels[v] for v in p.vertices], "length": p.length, "slope": format_scalar(p.slope.value)}
            for p in solution.trace
        ],
        "basins": {labels[x]: labels[a] for x, a in sorted(solution.basin_fills.items())},
        "residuals": {
            "all_zero": not any(residuals.values()),
            "max_abs": format_scalar(max((abs(v) for v in residuals.values()), default=Fraction(0))),
        },
    }
    if decimals is not None:
        doc["decimal"] = {labels[x]: format_decimal(solution.values[x], decimals) for x in range(problem.graph.n)}
    return doc


def _load(args) -> BoundaryProblem:
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise ProblemError(f"cannot read {args.input}: {exc.strerror}") from None
    problem = parse_problem(text)
    if args.r is not None:
        r = to_scalar(args.r)
        if r <= 0:
            raise ProblemError("non-positive bias")
        problem = problem.with_bias(Bias(r=r))
    return problem


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _notice(message: str) -> None:
    print(f"notice: {message}", file=sys.stderr)


def cmd_solve(args) -> None:
    problem = _load(args)
    solution, method = solve_any(problem, _notice)
    _emit(args, _dump(result_document(problem, solution, method, args.decimals)))


def cmd_iterate(args) -> None:
    problem = _load(args)
    result = value_iteration(problem, to_scalar(args.tolerance), args.max_sweeps)
    labels = problem.graph.labels
    doc = {
        "tool": TOOL,
        "version": __version__,
        "sweeps": result.sweeps,
        "converged": result.converged,
        "max_gap": format_scalar(result.max_gap),
        "lower": {labels[x]: format_scalar(v) for x, v in sorted(result.lower.items())},
        "upper": {labels[x]: format_scalar(v) for x, v in sorted(result.upper.items())},
    }
    if args.decimals is not None:
        doc["decimal_midpoint"] = {labels[x]: format_decimal(v, args.decimals)
                                   for x, v in sorted(result.midpoint().items())}
    _emit(args, _dump(doc))


def cmd_oracle(args) -> None:
    problem = _load(args)
    values = brute_force_solve(problem, args.cap)
    solution = Solution(values, extract_directions(problem, values))
    _emit(args, _dump(result_document(problem, solution, "brute-force", args.decimals)))


def cmd_simulate(args) -> None:
    problem = _load(args)
    start = problem.graph.index(args.start)
    if start in problem.boundary:
        raise ProblemError(f"start vertex {args.start} is on the boundary")
    solution, method = solve_any(problem, _notice)
    est = simulate(problem, solution.strategy, start, args.trials, args.seed, args.step_cap)
    exact = solution.values[start]
    doc = {
        "tool": TOOL,
        "version": __version__,
        "start": args.start,
        "exact_value": format_scalar(exact),
        "mean": repr(est.mean),
        "stderr": repr(est.stderr),
        "trials": est.trials,
        "censored": est.censored,
        "seed": est.seed,
        "within_4_stderr": est.covers(exact),
    }
    _emit(args, _dump(doc))


def cmd_export(args) -> None:
    problem = _load(args)
    solution, _ = solve_any(problem, _notice)
    _emit(args, export_dot(problem, solution))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description="Biased infinity-harmonic extension on graphs.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True, help="problem file (JSON)")
        p.add_argument("--output", help="write here instead of standard output")
        p.add_argument("--r", help="override the bias with a uniform rational r")

    p = sub.add_parser("solve", help="exact solution")
    common(p)
    p.add_argument("--decimals", type=int, help="also print values rounded to this many places")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("iterate", help="value iteration from below and above")
    common(p)
    p.add_argument("--tolerance", default=format_scalar(DEFAULT_TOLERANCE))
    p.add_argument("--max-sweeps", type=int)
    p.add_argument("--decimals", type=int)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("oracle", help="exact solution by enumerating all direction choices")
    common(p)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--decimals", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="Monte Carlo play under the optimal strategy")
    common(p)
    p.add_argument("--start", required=True, help="label of the starting vertex")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-cap", type=int, default=DEFAULT_STEP_CAP)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", help="Graphviz export of the solution")
    common(p)
    p.set_defaults(func=cmd_export)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ProblemError, EnumerationCapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line interface: parse -> pad -> solve -> decompose -> integrate ->
classify -> plot, with JSON/CSV/SVG outputs and deterministic exit codes.

Exit codes: 0 success, 1 usage error, 2 input parse/validation error,
3 numerical failure, 4 counterpart-correspondence violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import (
    DomainEscape,
    NotNash,
    NotRestPoint,
    NotSquare,
    ParseError,
    SingularSystem,
    SizeMismatch,
    TheoremViolation,
    TooLarge,
    UnsupportedDimension,
    ValidationError,
)
from .games import (
    BimatrixGame,
    counterpart_games,
    fraction_str,
    pad_to_square,
    parse_game,
    serialize_single,
)
from .solver import candidate_json, enumerate_nash_bimatrix, enumerate_rest_points
from .decomposition import decompose, report_json, verify_roundtrip
from .dynamics import integrate
from .viz import PlotSpec, export_csv, plot_simplex, plot_unit_square

BUNDLED_GAMES = ("pd", "bos", "rps", "bos_extended", "leduc_empirical", "fullsupport")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_THEOREM = 4

_INPUT_ERRORS = (ParseError, ValidationError, SizeMismatch, NotSquare, TooLarge,
                 UnsupportedDimension, NotNash, OSError)
_NUMERIC_ERRORS = (DomainEscape, SingularSystem, NotRestPoint)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def thread_cap() -> int | None:
    """Optional CPG_THREADS cap on internal parallelism.  The current
    implementation is sequential, so the value is validated and recorded only."""
    raw = os.environ.get("CPG_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        return None
    return value if value >= 1 else None


def load_game(spec: str) -> BimatrixGame:
    """Load a game from a file path, or from the bundled set by name."""
    path = Path(spec)
    if path.exists():
        return parse_game(path.read_text(encoding="utf-8"))
    name = spec[:-5] if spec.endswith(".json") else spec
    if name in BUNDLED_GAMES:
        text = resources.files("cpgames").joinpath("data", f"{name}.json").read_text(encoding="utf-8")
        return parse_game(text)
    raise ParseError(f"no such game file or bundled game: {spec}")


def _parse_init(text: str, dims: tuple[int, ...]):
    """Parse --init values: components comma-separated, populations separated
    by a semicolon, e.g. "0.9,0.1;0.2,0.8"."""
    groups = text.split(";")
    if len(groups) != len(dims):
        raise ValidationError(f"--init has {len(groups)} population(s), expected {len(dims)}")
    states = []
    for group, dim in zip(groups, dims):
        try:
            vals = [float(v) for v in group.split(",")]
        except ValueError as exc:
            raise ValidationError(f"--init component is not a number: {group!r}") from exc
        if len(vals) != dim:
            raise ValidationError(f"--init population has {len(vals)} components, expected {dim}")
        if min(vals) < 0 or abs(sum(vals) - 1.0) > 1e-9:
            raise ValidationError(f"--init values {vals} are not a probability vector")
        states.append(vals)
    return states if len(dims) == 2 else states[0]


def _format_candidate(idx: int, cand) -> str:
    doc = candidate_json(cand)
    def fmt_vec(v):
        return "(" + ", ".join(str(c) for c in v) + ")"
    parts = [f"{idx}. x={fmt_vec(doc['x'])}"]
    if "y" in doc:
        parts.append(f"y={fmt_vec(doc['y'])}")
    parts.append(f"supports={list(cand.support_x)}" +
                 (f"/{list(cand.support_y)}" if cand.support_y is not None else ""))
    parts.append(f"strict={'true' if cand.is_strict else 'false'}")
    pay = doc["payoffs"]
    parts.append(f"payoffs={fmt_vec(pay) if isinstance(pay, list) else pay}")
    return "  ".join(parts)


def _cmd_solve(args) -> int:
    g = load_game(args.game)
    mode = "float" if args.float else "exact"
    eqs = enumerate_nash_bimatrix(g, mode=mode)
    if args.json:
        print(json.dumps([candidate_json(c) for c in eqs], indent=2))
    else:
        print(f"{g.name}: {len(eqs)} equilibria ({mode} mode)")
        for i, c in enumerate(eqs, 1):
            print(_format_candidate(i, c))
    return EXIT_OK


def _cmd_counterparts(args) -> int:
    g = load_game(args.game)
    padded, _ = pad_to_square(g)
    cp1, cp2 = counterpart_games(padded)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = Path(args.game).stem if Path(args.game).exists() else args.game.removesuffix(".json")
    for tag, cp in (("cp1", cp1), ("cp2", cp2)):
        path = out / f"{base}_{tag}.json"
        path.write_text(serialize_single(cp), encoding="utf-8")
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_decompose(args) -> int:
    g = load_game(args.game)
    report = decompose(g, verify=not args.no_verify)
    pad = report.padding
    if pad.padded:
        print(f"padded {pad.original_dims[0]}x{pad.original_dims[1]} -> "
              f"{max(pad.original_dims)} actions ({pad.added_count} dummy on {pad.player} side, "
              f"payoff {fraction_str(pad.dummy_payoff)})")
    print(f"degenerate: {'true' if report.degeneracy.degenerate else 'false'}")
    print("permutation  cp1-eqs  cp2-eqs  matched")
    for entry in report.per_permutation:
        print(f"{str(list(entry.permutation.mapping)):<12} {len(entry.cp1_equilibria):^8} "
              f"{len(entry.cp2_equilibria):^8} {len(entry.matched_pairs):^7}")
    print(f"reconstructed equilibria: {len(report.reconstructed)}")
    for i, c in enumerate(report.reconstructed, 1):
        print(_format_candidate(i, c))
    if report.agreement is None:
        print("agreement: skipped")
    else:
        print(f"agreement: {'true' if report.agreement else 'false'}")
    if args.report:
        Path(args.report).write_text(json.dumps(report_json(report), indent=2) + "\n", encoding="utf-8")
        print(f"wrote {args.report}")
    return EXIT_OK


def _cmd_restpoints(args) -> int:
    g = load_game(args.game)
    padded, _ = pad_to_square(g)
    cp1, cp2 = counterpart_games(padded)
    s = cp1 if args.counterpart == 1 else cp2
    points = enumerate_rest_points(s)
    print(f"{s.name}: {len(points)} rest points")
    for i, rp in enumerate(points, 1):
        vec = "(" + ", ".join(str(v) for v in rp.point.to_jsonable()) + ")"
        payoff = fraction_str(rp.common_payoff) if isinstance(rp.common_payoff, Fraction) else rp.common_payoff
        labels = ",".join(s.actions[k] for k in rp.support)
        flags = "nash" if rp.is_nash else "not-nash"
        if rp.continuum:
            flags += ",continuum"
        print(f"{i}. x={vec}  support=[{labels}]  {flags}  payoff={payoff}")
    return EXIT_OK


def _cmd_dynamics(args) -> int:
    g = load_game(args.game)
    if args.system == "coupled":
        dims = (g.n_rows, g.n_cols)
    else:
        padded, _ = pad_to_square(g)
        dims = (padded.n_rows,)
        g = padded
    init = _parse_init(args.init, dims)
    traj = integrate(args.system, g, init, dt=args.dt, t_max=args.t_max)
    Path(args.out).write_text(export_csv(traj), encoding="utf-8")
    print(f"wrote {args.out} ({traj.n_states} states, t_max={traj.times[-1]:g})")
    return EXIT_OK


def _cmd_plot(args) -> int:
    g = load_game(args.game)
    starts = args.trajectories
    if args.kind == "square":
        spec = PlotSpec(kind="square", grid_resolution=args.grid,
                        trajectory_starts=_parse_plot_starts(starts, (g.n_rows, g.n_cols)))
        svg = plot_unit_square(g, spec)
    else:
        padded, _ = pad_to_square(g)
        cp1, cp2 = counterpart_games(padded)
        s = cp1 if args.kind == "cp1" else cp2
        spec = PlotSpec(kind="simplex", grid_resolution=args.grid,
                        trajectory_starts=_parse_plot_starts(starts, (s.n,)))
        svg = plot_simplex(s, spec)
    Path(args.out).write_text(svg, encoding="utf-8")
    print(f"wrote {args.out}")
    return EXIT_OK


def _parse_plot_starts(starts, dims):
    if starts in (None, "lattice"):
        return starts
    parsed = []
    for item in starts.split(";"):
        try:
            vals = [float(v) for v in item.split(",")]
        except ValueError as exc:
            raise ValidationError(f"trajectory start is not numeric: {item!r}") from exc
        if len(dims) == 2:
            if len(vals) != dims[0] + dims[1]:
                raise ValidationError(f"trajectory start needs {dims[0] + dims[1]} components: {item!r}")
            parsed.append((vals[:dims[0]], vals[dims[0]:]))
        else:
            if len(vals) != dims[0]:
                raise ValidationError(f"trajectory start needs {dims[0]} components: {item!r}")
            parsed.append(vals)
    return parsed


def _cmd_verify(args) -> int:
    report = verify_roundtrip(args.trials, args.size, args.seed)
    print(f"trials={report.trials} size={report.size} seed={report.seed}")
    print(f"tested={report.tested} discarded_degenerate={report.discarded_degenerate}")
    if report.passed:
        print("pass (0 counterexamples)")
        return EXIT_OK
    print("FAIL")
    print(json.dumps(report.counterexample, indent=2))
    return EXIT_THEOREM


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpg", description="Analyse two-player games through "
                     "their single-population counterpart decomposition.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="enumerate all Nash equilibria")
    p.add_argument("game")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--float", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("counterparts", help="write the two counterpart games")
    p.add_argument("game")
    p.add_argument("--out", default=".")
    p.set_defaults(fn=_cmd_counterparts)

    p = sub.add_parser("decompose", help="reconstruct equilibria from the counterparts")
    p.add_argument("game")
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("--report")
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser("restpoints", help="list replicator rest points of a counterpart")
    p.add_argument("game")
    p.add_argument("--counterpart", type=int, choices=(1, 2), required=True)
    p.set_defaults(fn=_cmd_restpoints)

    p = sub.add_parser("dynamics", help="integrate replicator dynamics to CSV")
    p.add_argument("game")
    p.add_argument("--system", choices=("coupled", "cp1", "cp2"), required=True)
    p.add_argument("--init", required=True)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=50.0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_dynamics)

    p = sub.add_parser("plot", help="render a phase portrait to SVG")
    p.add_argument("game")
    p.add_argument("--kind", choices=("square", "cp1", "cp2"), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grid", type=int)
    p.add_argument("--trajectories", default="lattice")
    p.set_defaults(fn=_cmd_plot)

    p = sub.add_parser("verify", help="randomized decomposition round-trip check")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--size", type=int, default=3)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(fn=_cmd_verify)

    return parser


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    thread_cap()
    try:
        return args.fn(args)
    except _INPUT_ERRORS as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _NUMERIC_ERRORS as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except TheoremViolation as exc:
        print(f"error: theorem: {exc}", file=sys.stderr)
        return EXIT_THEOREM


def main(argv=None) -> int:
    return run_cli(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())

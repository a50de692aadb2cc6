"""
Command-line front end.

    python -m qpkit [--dmax N] [--bound N] [--json] [--out PATH] [-v] COMMAND ...

Exit codes: 0 ok / Finite, 1 I/O or parse error (or a failed pipeline
check), 2 Infinite, 3 Inconclusive, 4 d^2 != 0, 5 golden mismatch.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from pydantic import ValidationError

from .config import RunConfig, get_settings
from .errors import QPKitError
from .reproduce import ReproductionRunner
from .tools import execute_tool

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFINITE = 2
EXIT_INCONCLUSIVE = 3
EXIT_D_SQUARED = 4
EXIT_GOLDEN = 5


class CommandError(Exception):
    """An input file could not be read or decoded."""


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CommandError(f"cannot read {path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CommandError(f"{path}: line {e.lineno} column {e.colno}: malformed JSON: {e.msg}") from None


def _tool(name: str, **arguments) -> dict:
    result = execute_tool(name, arguments)
    if "error" in result:
        raise CommandError(result["error"])
    return result


# =============================================================================
# COMMANDS
# =============================================================================
# Each command returns (result dict, exit code, human-readable lines).

Outcome = tuple[dict, int, list[str]]


def cmd_quiver(args, config: RunConfig) -> Outcome:
    data = _read_json(args.file)
    if args.action == "validate":
        r = _tool("validate_quiver", quiver=data)
        kind = "acyclic" if r["acyclic"] else "has oriented cycles"
        return r, EXIT_OK, [f"OK: {r['vertices']} vertices, {r['arrows']} arrows ({kind})"]
    r = _tool("opposite" if args.action == "op" else "double", quiver=data)
    return r, EXIT_OK, [json.dumps(r, indent=2)]


def cmd_jacobian(args, config: RunConfig) -> Outcome:
    r = _tool("jacobian", qp=_read_json(args.file), d_max=config.d_max)
    verdict = r["verdict"]
    if verdict.startswith("Finite"):
        lines = [f"Finite, dim {r['dim']}"]
        lines += [f"  dim e_{p['source']} J e_{p['target']} = {p['dim']}" for p in r["pair_dims"]]
        return r, EXIT_OK, lines
    if verdict == "Infinite":
        return r, EXIT_INFINITE, ["Infinite"]
    return r, EXIT_INCONCLUSIVE, [f"Inconclusive at d_max={config.d_max}"]


def cmd_ginzburg(args, config: RunConfig) -> Outcome:
    overrides = _read_json(args.override) if args.override else None
    r = _tool("ginzburg_check", qp=_read_json(args.file), overrides=overrides)
    lines = [f"d({x}) = {v}" for x, v in r["differential"].items()]
    if r["d_squared_zero"]:
        return r, EXIT_OK, lines + ["d^2 = 0: OK"]
    return r, EXIT_D_SQUARED, lines + ["d^2 = 0: FAILED"] + r["problems"]


def cmd_algebra(args, config: RunConfig) -> Outcome:
    data = _read_json(args.file)
    name = {"gldim": "algebra_gldim", "ext2": "algebra_ext2", "tor2": "algebra_tor2", "tilde-quiver": "algebra_tilde_quiver"}
    r = _tool(name[args.action], algebra=data, d_max=config.d_max, bound=config.bound)
    if args.action == "gldim":
        lines = [f"global dimension: {r['global_dimension']}"]
        lines += [f"  pd S_{v} = {d if d is not None else 'AboveBound'}" for v, d in r["projective_dimensions"].items()]
    elif args.action == "ext2":
        lines = [f"dim e_{p['source']} X e_{p['target']} = {p['dim']}" for p in r["pair_dims"]]
        lines.append(f"total: {r['total']}")
    elif args.action == "tor2":
        lines = [
            f"nilpotent: {r['nilpotent']} (tensor index {r['index']}, functor index {r['functor_index']})",
            f"criteria agree: {r['agree']}",
        ]
    else:
        lines = [f"new arrow {p['target']} -> {p['source']} (x{p['dim']})" for p in r["added"]]
        lines.append(f"{len(r['quiver']['arrows'])} arrows in total")
    return r, EXIT_OK, lines


def cmd_knit(args, config: RunConfig) -> Outcome:
    r = _tool("knit", quiver=_read_json(args.file), depth=args.depth, kind=args.kind)
    lines = [f"({v['j']}, {v['p']})  {tuple(v['dim'])}" for v in r["vertices"]]
    lines.append(f"{len(r['vertices'])} vertices, {len(r['arrows'])} arrows, finite: {r['finite']}")
    return r, EXIT_OK, lines


def cmd_coxeter(args, config: RunConfig) -> Outcome:
    r = _tool("coxeter_word", quiver=_read_json(args.file), word=args.word)
    if args.action == "reduced":
        return r, EXIT_OK, [f"{r['word']}: {'reduced' if r['reduced'] else 'not reduced'}"]
    return r, EXIT_OK, [f"{r['word']}: length {r['length']}"]


def cmd_pipeline(args, config: RunConfig) -> Outcome:
    r = _tool("slice_pipeline", data=_read_json(args.file), d_max=config.d_max, bound=config.bound)
    lines = [f"{x['name']}: dim {tuple(x['dim'])}, phi {x['phi']}, q {x['q']}" for x in r["M"]]
    lines.append(f"word: {r['word']} ({'reduced' if r['word_reduced'] else 'not reduced'}, length {r['word_length']})")
    for name, f in r["F"].items():
        lines.append(f"F({name}^) = {tuple(f['hat'])}")
    lines.append(f"projective-injective: {', '.join(r['projective_injective'])}")
    failed = [k for k, ok in r["checks"].items() if not ok]
    lines.append("checks: OK" if not failed else f"checks FAILED: {', '.join(failed)}")
    return r, EXIT_OK if not failed else EXIT_ERROR, lines


def cmd_reproduce(args, config: RunConfig) -> Outcome:
    runner = ReproductionRunner(config.d_max, config.bound)
    try:
        report = runner.run([Path(p) for p in args.golden] if args.golden else None)
    except QPKitError as e:
        raise CommandError(str(e)) from None
    r = report.model_dump(mode="json")
    if report.ok:
        return r, EXIT_OK, [f"OK: {report.compared} values match ({', '.join(report.examples)})"]
    lines = [f"MISMATCH: {len(report.mismatches)} of {report.compared} values"]
    for d in report.mismatches:
        where = f" [{d.source}]" if d.source else ""
        lines.append(f"  {d.key}: expected {d.expected}, got {d.actual}{where}")
    return r, EXIT_GOLDEN, lines


# =============================================================================
# PARSER
# =============================================================================


def _global_flags(parser: argparse.ArgumentParser) -> None:
    # SUPPRESS lets the flags appear before or after the subcommand
    parser.add_argument("--dmax", type=int, default=argparse.SUPPRESS, help="Groebner degree cutoff (default 12)")
    parser.add_argument("--bound", type=int, default=argparse.SUPPRESS, help="resolution / tensor power bound (default 64)")
    parser.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print the JSON report")
    parser.add_argument("--out", default=argparse.SUPPRESS, help="also write the JSON report to PATH")
    parser.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS, help="more logging (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpkit", description="Quivers with potential and the slice pipeline.")
    _global_flags(parser)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quiver", parents=[common], help="validate a quiver or build its opposite / double")
    p.add_argument("action", choices=["validate", "op", "double"])
    p.add_argument("file")
    p.set_defaults(handler=cmd_quiver)

    p = sub.add_parser("jacobian", parents=[common], help="decide Jacobi-finiteness of a QP")
    p.add_argument("file")
    p.set_defaults(handler=cmd_jacobian)

    p = sub.add_parser("ginzburg-check", parents=[common], help="print d on the Ginzburg generators and check d^2 = 0")
    p.add_argument("file")
    p.add_argument("--override", help="JSON map generator -> path-vector replacing d")
    p.set_defaults(handler=cmd_ginzburg)

    p = sub.add_parser("algebra", parents=[common], help="homological invariants of a bound quiver algebra")
    p.add_argument("action", choices=["gldim", "ext2", "tilde-quiver", "tor2"])
    p.add_argument("file")
    p.set_defaults(handler=cmd_algebra)

    p = sub.add_parser("knit", parents=[common], help="knit a preinjective or postprojective component")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--kind", choices=["preinjective", "postprojective"], default="preinjective")
    p.set_defaults(handler=cmd_knit)

    p = sub.add_parser("coxeter", parents=[common], help="reducedness and length of a word")
    p.add_argument("action", choices=["reduced", "length"])
    p.add_argument("file", help="quiver whose graph defines the Coxeter group")
    p.add_argument("word")
    p.set_defaults(handler=cmd_coxeter)

    p = sub.add_parser("pipeline", parents=[common], help="run the slice pipeline on a tilting input")
    p.add_argument("file")
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("reproduce-example", parents=[common], help="diff the worked examples against golden values")
    p.add_argument("--golden", action="append", help="golden file (repeatable; default: bundled files)")
    p.set_defaults(handler=cmd_reproduce)
    return parser


def _configure_logging(level_name: str, verbose: int) -> None:
    level = getattr(logging, level_name)
    if verbose:
        level = logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = get_settings()
    except EnvironmentError as e:
        print(f"qpkit: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    try:
        config = RunConfig(
            subcommand=args.command,
            inputs=[v for v in (getattr(args, "file", None),) if v],
            d_max=getattr(args, "dmax", settings.d_max),
            bound=getattr(args, "bound", settings.bound),
            out=getattr(args, "out", None),
            json_output=getattr(args, "json", False),
            verbose=getattr(args, "verbose", 0),
        )
    except ValidationError as e:
        err = e.errors()[0]
        print(f"qpkit: error: {'.'.join(str(x) for x in err['loc'])}: {err['msg']}", file=sys.stderr)
        return EXIT_ERROR
    _configure_logging(settings.log_level, config.verbose)

    handler: Callable[..., Outcome] = args.handler
    try:
        result, code, lines = handler(args, config)
    except CommandError as e:
        print(f"qpkit: error: {e}", file=sys.stderr)
        return EXIT_ERROR

    text = json.dumps(result, indent=2)
    if config.out:
        try:
            Path(config.out).write_text(text + "\n")
        except OSError as e:
            print(f"qpkit: error: cannot write {config.out}: {e.strerror}", file=sys.stderr)
            return EXIT_ERROR
    print(text if config.json_output else "\n".join(lines))
    return code

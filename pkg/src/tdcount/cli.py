"""Command-line entry point.

Exit codes: 0 success, 1 parse or usage problems, 2 unsupported rule
types or brute-force size guards; `solve` exits 10 when consistent and
20 when inconsistent.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import aspdp, oracle, satdp
from .errors import ParseError, ProjectionOutOfRangeError, TooLargeError, UnsupportedRuleError
from .graphs import incidence_graph, incidence_graph_cnf, primal_graph, primal_graph_cnf
from .model import CnfFormula, GroundProgram
from .parsers import parse_dimacs, parse_ground_program, parse_smodels
from .projection import projected_count
from .treedecomp import decompose, elimination_ordering, td_from_ordering, validate_td

PROGRAM_COMMANDS = {"count", "solve", "enumerate", "optcount", "pcount"}
CNF_COMMANDS = {"mc", "wmc", "pmc"}

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNSUPPORTED = 2
EXIT_CONSISTENT = 10
EXIT_INCONSISTENT = 20


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tdcount", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "count": "count answer sets",
        "solve": "decide consistency (exit 10/20)",
        "enumerate": "list answer sets",
        "optcount": "optimal cost and number of optimal answer sets",
        "pcount": "projected answer-set count",
        "mc": "count CNF models",
        "wmc": "weighted CNF model count",
        "pmc": "projected CNF model count",
        "td-stats": "decomposition width statistics",
    }
    for name, help_text in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("path", help="input file, or - for stdin")
        p.add_argument("--graph", choices=["primal", "incidence"], default="primal")
        p.add_argument("--heuristic", choices=["min-fill", "min-degree"], default="min-fill")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument(
            "--seeds",
            type=int,
            default=5 if name == "td-stats" else 1,
            help="number of consecutive seeds to try",
        )
        p.add_argument("--format", choices=["asp", "smodels", "dimacs", "auto"], default="auto")
        p.add_argument("--json", action="store_true")
        p.add_argument("--trace", metavar="FILE", help="line-delimited JSON per-node trace")
        p.add_argument("--oracle-check", action="store_true")
        if name == "pcount":
            p.add_argument("--project", default="", help="comma-separated atom names")
        if name == "pmc":
            p.add_argument("--project-vars", default="", help="comma-separated variables")
        if name == "enumerate":
            p.add_argument("--limit", type=int, default=None)
    return parser


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _sniff_format(path: str, text: str) -> str:
    lowered = path.lower()
    for ext, fmt in (
        (".lp", "asp"),
        (".asp", "asp"),
        (".cnf", "dimacs"),
        (".dimacs", "dimacs"),
        (".wcnf", "dimacs"),
        (".sm", "smodels"),
        (".smodels", "smodels"),
        (".lparse", "smodels"),
    ):
        if lowered.endswith(ext):
            return fmt
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "p" or parts[0] == "w" or (parts[0] == "c" and "." not in line):
            return "dimacs"
        if all(p.lstrip("-").isdigit() for p in parts):
            return "smodels"
        return "asp"
    return "asp"


def _parse_instance(args, text: str):
    fmt = args.format
    if fmt == "auto":
        fmt = _sniff_format(args.path, text)
    if fmt == "asp":
        return parse_ground_program(text)
    if fmt == "smodels":
        return parse_smodels(text)
    return parse_dimacs(text)


def _csv_items(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _project_atoms(program: GroundProgram, raw: str) -> set[int]:
    by_name = {a.name: a.id for a in program.atoms if a.name is not None}
    out = set()
    for name in _csv_items(raw):
        if name not in by_name:
            raise ProjectionOutOfRangeError(f"unknown atom {name!r}")
        out.add(by_name[name])
    return out


def _project_vars(formula: CnfFormula, raw: str) -> set[int]:
    out = set()
    for item in _csv_items(raw):
        try:
            v = int(item)
        except ValueError:
            raise _UsageError(f"bad variable {item!r}") from None
        if not 1 <= v <= formula.num_vars:
            raise ProjectionOutOfRangeError(f"variable {v} out of range")
        out.add(v)
    return out


def _oracle_note(ok: bool, dp_value, oracle_value) -> None:
    if ok:
        print(f"oracle-check: ok ({oracle_value})", file=sys.stderr)
    else:
        print(
            f"oracle-check: mismatch dp={dp_value} oracle={oracle_value}",
            file=sys.stderr,
        )


def _td_stats(args, instance) -> dict:
    if args.graph == "incidence":
        graph = (
            incidence_graph(instance)
            if isinstance(instance, GroundProgram)
            else incidence_graph_cnf(instance)
        )
    else:
        graph = (
            primal_graph(instance)
            if isinstance(instance, GroundProgram)
            else primal_graph_cnf(instance)
        )
    base = args.resolved_seed
    widths = []
    best = None
    for s in range(base, base + args.seeds):
        order = elimination_ordering(graph, args.heuristic, s)
        td = td_from_ordering(graph, order)
        if args.oracle_check:
            violation = validate_td(graph, td)
            if violation is not None:
                raise AssertionError(f"invalid decomposition: {violation}")
        w = td.width()
        widths.append({"seed": s, "width": w})
        if best is None or w < best[1]:
            best = (s, w)
    return {
        "graph": args.graph,
        "widths": widths,
        "best_seed": best[0],
        "best_width": best[1],
    }


def _run_command(args, instance, trace):
    """Returns (result-for-json, text-lines, width, seed, exit-code)."""
    cmd = args.command

    if cmd == "td-stats":
        stats = _td_stats(args, instance)
        lines = [f"seed={w['seed']} width={w['width']}" for w in stats["widths"]]
        lines.append(f"best seed={stats['best_seed']} width={stats['best_width']}")
        return stats, lines, stats["best_width"], stats["best_seed"], EXIT_OK

    if isinstance(instance, GroundProgram):
        graph = primal_graph(instance)
    else:
        graph = primal_graph_cnf(instance)
    defer = ()
    if cmd == "pcount":
        proj = _project_atoms(instance, args.project)
        defer = proj
    elif cmd == "pmc":
        proj = _project_vars(instance, args.project_vars)
        defer = {v - 1 for v in proj}
    decomp = decompose(
        graph, args.heuristic, args.resolved_seed, args.seeds, defer=defer
    )
    opts = {"decomp": decomp, "trace": trace}

    if cmd == "count":
        value = aspdp.count_answer_sets(instance, **opts)
        if args.oracle_check:
            expected = len(oracle.brute_answer_sets(instance))
            _oracle_note(value == expected, value, expected)
            if value != expected:
                return value, [str(value)], decomp.width, decomp.seed, EXIT_INPUT
        return value, [str(value)], decomp.width, decomp.seed, EXIT_OK

    if cmd == "solve":
        consistent = aspdp.is_consistent(instance, **opts)
        if args.oracle_check:
            expected = bool(oracle.brute_answer_sets(instance))
            _oracle_note(consistent == expected, consistent, expected)
        text = "CONSISTENT" if consistent else "INCONSISTENT"
        code = EXIT_CONSISTENT if consistent else EXIT_INCONSISTENT
        return text.lower(), [text], decomp.width, decomp.seed, code

    if cmd == "enumerate":
        names = instance.atom_names()
        sets = list(aspdp.enumerate_answer_sets(instance, limit=args.limit, **opts))
        if args.oracle_check and args.limit is None:
            expected = sorted(oracle.brute_answer_sets(instance), key=sorted)
            _oracle_note(sets == expected, len(sets), len(expected))
        rendered = [[names[a] for a in sorted(s)] for s in sets]
        return rendered, [" ".join(row) for row in rendered], decomp.width, decomp.seed, EXIT_OK

    if cmd == "optcount":
        cost, count = aspdp.count_optimal(instance, **opts)
        if args.oracle_check:
            answer_sets = oracle.brute_answer_sets(instance)
            if not answer_sets:
                expected = (None, 0)
            else:
                minimize = instance.minimize
                costs = [minimize.cost_of(s) if minimize else 0 for s in answer_sets]
                best = min(costs)
                expected = (best, costs.count(best))
            _oracle_note((cost, count) == expected, (cost, count), expected)
        lines = ["INCONSISTENT"] if cost is None else [f"{cost} {count}"]
        return {"cost": cost, "count": count}, lines, decomp.width, decomp.seed, EXIT_OK

    if cmd == "pcount":
        value = projected_count(instance, proj, **opts)
        if args.oracle_check:
            expected = oracle.brute_projected_count(instance, proj)
            _oracle_note(value == expected, value, expected)
        return value, [str(value)], decomp.width, decomp.seed, EXIT_OK

    if cmd == "mc":
        value = satdp.count_models(instance, **opts)
        if args.oracle_check:
            expected = oracle.brute_count_models(instance)
            _oracle_note(value == expected, value, expected)
        return value, [str(value)], decomp.width, decomp.seed, EXIT_OK

    if cmd == "wmc":
        value = satdp.weighted_count(instance, **opts)
        if args.oracle_check:
            expected = oracle.brute_weighted_count(instance)
            _oracle_note(value == expected, value, expected)
        return str(value), [str(value)], decomp.width, decomp.seed, EXIT_OK

    if cmd == "pmc":
        value = projected_count(instance, proj, **opts)
        if args.oracle_check:
            expected = oracle.brute_projected_count(instance, proj)
            _oracle_note(value == expected, value, expected)
        return value, [str(value)], decomp.width, decomp.seed, EXIT_OK

    raise _UsageError(f"unknown command {cmd!r}")


def run(argv=None) -> int:
    parser = _build_parser()
    started = time.monotonic()
    trace = None
    try:
        args = parser.parse_args(argv)
        if args.command in PROGRAM_COMMANDS and args.graph == "incidence":
            raise _UsageError("--graph incidence is only available for td-stats")
        if args.seeds < 1:
            raise _UsageError("--seeds must be positive")
        if args.seed is not None:
            args.resolved_seed = args.seed
        else:
            args.resolved_seed = int(os.environ.get("TDCOUNT_SEED", "0"))
        text = _read_input(args.path)
        instance = _parse_instance(args, text)
        if args.command in PROGRAM_COMMANDS and not isinstance(instance, GroundProgram):
            raise _UsageError(f"{args.command} expects a ground program")
        if args.command in CNF_COMMANDS and not isinstance(instance, CnfFormula):
            raise _UsageError(f"{args.command} expects a DIMACS formula")
        if args.trace:
            trace = open(args.trace, "w", encoding="utf-8")
        result, lines, width, seed, code = _run_command(args, instance, trace)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UnsupportedRuleError, TooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ParseError, ProjectionOutOfRangeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if trace is not None:
            trace.close()
    elapsed_ms = int((time.monotonic() - started) * 1000)
    if args.json:
        payload = {
            "result": result,
            "width": width,
            "heuristic": args.heuristic,
            "seed": seed,
            "elapsed_ms": elapsed_ms,
        }
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)
    return code


def main() -> None:
    sys.exit(run(argv=None))

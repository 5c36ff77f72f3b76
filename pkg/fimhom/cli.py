"""
Command-line entry point: ``fimhom analyze|resolve|tree|verify``.

Exit status: 0 when nothing failed, 1 when a check failed (or a tree hit its
level cap), 2 on usage or input errors.  Reports go to stdout, logs to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, Tuple

from .category import Obj
from .config import Settings, get_settings
from .harness import Case, HarnessConfig, random_cases, run_cases
from .homology import HomologyTable, TorsionVector, degree_report_from_table, euler_defect, resolve, torsion_vector
from .linalg import is_prime
from .module import RandomParams, evaluate_presentation
from .presentation_io import load_presentation
from .report import Report, analyze_report, has_failures, render, resolve_report, tree_report, verify_report
from .tree import build_tree


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    """Inconsistent command-line flags."""


def parse_bounds(raw: str, m: Optional[int] = None) -> Obj:
    """``"3,3"`` -> (3, 3); a single value is repeated m times."""
    try:
        values = tuple(int(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"--bounds must be comma-separated integers, got {raw!r}") from None
    if not values:
        raise UsageError("--bounds is empty")
    if m is not None and len(values) == 1 and m > 1:
        values = values * m
    if m is not None and len(values) != m:
        raise UsageError(f"--bounds has {len(values)} entries but --m is {m}")
    if any(b < 0 for b in values):
        raise UsageError(f"--bounds must be non-negative, got {raw!r}")
    return values


def _load(path: str):
    P = load_presentation(path)
    return P, evaluate_presentation(P)


def cmd_analyze(args: argparse.Namespace, settings: Settings) -> Tuple[Report, int]:
    P, V = _load(args.file)
    res = resolve(V, max(args.smax, 1))
    degrees = degree_report_from_table(res.table)
    torsion = None
    if V.is_zero():
        torsion = TorsionVector.of_zero(V.m)
    elif all(b >= 1 for b in V.grid.bounds):
        torsion = torsion_vector(V)
    else:
        logger.warning("Grid %s has a zero bound, torsion vector not defined", list(V.grid.bounds))
    singular = torsion.singular() if torsion is not None else ()
    if degrees.boundary_flag:
        logger.warning("Homology touches the grid shell; observed degrees may be truncated")
    table = res.table
    if args.smax < table.s_max:
        table = HomologyTable(table.grid, args.smax, {k: v for k, v in table.entries.items() if k[0] <= args.smax})
    return analyze_report(P, V, table, degrees, torsion, singular), EXIT_OK


def cmd_resolve(args: argparse.Namespace, settings: Settings) -> Tuple[Report, int]:
    P, V = _load(args.file)
    res = resolve(V, args.smax)
    defect = euler_defect(res, V)
    report = resolve_report(P, V, res, defect)
    return report, EXIT_OK if report["euler"]["ok"] else EXIT_FAIL


def cmd_tree(args: argparse.Namespace, settings: Settings) -> Tuple[Report, int]:
    P, V = _load(args.file)
    level_cap = args.level_cap
    if level_cap is None:
        tsum = 0
        if not V.is_zero() and all(b >= 1 for b in V.grid.bounds):
            tsum = torsion_vector(V).tsum
        level_cap = settings.level_cap_for(tsum, V.m)
    tree = build_tree(V, level_cap, args.smax)
    if not tree.terminated:
        logger.error("Tree did not terminate within level cap %d", level_cap)
    return tree_report(P, tree), EXIT_OK if tree.terminated else EXIT_FAIL


def cmd_verify(args: argparse.Namespace, settings: Settings) -> Tuple[Report, int]:
    config = HarnessConfig(
        s_max=args.smax,
        tree_smax=settings.tree_smax,
        level_cap=args.level_cap,
        level_cap_margin=settings.level_cap_margin,
        workers=args.workers or settings.workers,
    )
    if args.random:
        if args.file:
            raise UsageError("verify takes either --random or a file, not both")
        if args.m < 1:
            raise UsageError(f"--m must be >= 1, got {args.m}")
        if not is_prime(args.field):
            raise UsageError(f"--field must be prime, got {args.field}")
        if args.count < 0:
            raise UsageError(f"--count must be >= 0, got {args.count}")
        bounds = parse_bounds(args.bounds, args.m)
        params = RandomParams(args.m, bounds, args.field, settings.max_gens, settings.max_rels, settings.max_terms)
        cases = random_cases(args.seed, args.count, params)
        mode = {
            "random": True,
            "seed": args.seed,
            "count": args.count,
            "m": args.m,
            "bounds": ",".join(str(b) for b in bounds),
            "field": args.field,
            "smax": args.smax,
        }
    else:
        if not args.file:
            raise UsageError("verify needs --random or a presentation file")
        cases = [Case(0, args.seed, load_presentation(args.file))]
        mode = {"file": Path(args.file).name, "seed": args.seed, "smax": args.smax}

    results = run_cases(cases, config)
    report = verify_report(mode, results, len(cases))
    return report, EXIT_FAIL if has_failures(report) else EXIT_OK


def _write_report_file(settings: Settings, report: Report, text: str, fmt: str) -> None:
    if settings.report_dir is None:
        return
    mode = report["mode"]
    stem = f"verify_seed{mode['seed']}_count{mode['count']}" if mode.get("random") else f"verify_{Path(mode['file']).stem}"
    path = settings.report_dir / f"{stem}.{'json' if fmt == 'json' else 'txt'}"
    path.write_text(text, encoding="utf-8")
    logger.info("Report written to %s", path)


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fimhom", description="Homology of FI^m-modules on a truncated grid.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, smax_default: int) -> None:
        p.add_argument("--smax", type=int, default=smax_default, help="homological range (default %(default)s)")
        p.add_argument("--format", choices=("text", "json"), default=settings.report_format)

    p = sub.add_parser("analyze", help="dims, homology, degrees and torsion vector")
    p.add_argument("file")
    common(p, settings.smax)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("resolve", help="minimal resolution with cover dimensions and the Euler check")
    p.add_argument("file")
    common(p, settings.smax)
    p.set_defaults(handler=cmd_resolve)

    p = sub.add_parser("tree", help="the tree of quotients V/K_iV")
    p.add_argument("file")
    p.add_argument("--level-cap", type=int, default=None, help="default tsum(root) + m + margin")
    common(p, settings.tree_smax)
    p.set_defaults(handler=cmd_tree)

    p = sub.add_parser("verify", help="run the invariant suite on random or given modules")
    p.add_argument("file", nargs="?")
    p.add_argument("--random", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--bounds", default="4")
    p.add_argument("--field", type=int, default=2)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--level-cap", type=int, default=None)
    common(p, settings.smax)
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        settings = get_settings()
    except ValueError as e:
        print(f"fimhom: configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.WARNING),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )

    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    if args.smax < 0:
        print("fimhom: --smax must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "level_cap", None) is not None and args.level_cap < 0:
        print("fimhom: --level-cap must be >= 0", file=sys.stderr)
        return EXIT_USAGE

    try:
        report, status = args.handler(args, settings)
    except ValueError as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"fimhom {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE

    text = render(report, args.format)
    sys.stdout.write(text)
    if args.command == "verify":
        _write_report_file(settings, report, text, args.format)
    return status


__all__ = ["build_parser", "main", "parse_bounds"]


if __name__ == "__main__":
    sys.exit(main())

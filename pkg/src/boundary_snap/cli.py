"""``boundary-snap`` command line: footprint, record, compare, campaign.

Exit codes: 0 success, 1 findings or surviving mutants, 2 errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .differ import compare_sets, read_snapshot_dir, render_report
from .errors import BoundarySnapError, PreconditionError
from .footprint import extract_footprint, read_footprint, write_footprint
from .minilang import MiniLangError, load_project
from .mutator import (
    MODES,
    default_jobs,
    format_score,
    matrix_to_csv,
    matrix_to_json,
    mutation_scores,
    run_campaign,
)
from .recorder import stability_filter
from .snapstore import atomic_write, read_flaky, snapshot_paths, write_flaky, write_snapshot

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2


class _Out:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, text: str = "", end: str = "\n") -> None:
        if not self.quiet:
            sys.stdout.write(text + end)


def cmd_footprint(args, out: _Out) -> int:
    fp = extract_footprint(load_project(args.project))
    write_footprint(fp, args.out)
    out(f"footprint: {len(fp.symbols)} symbols -> {args.out}")
    return EXIT_OK


def cmd_record(args, out: _Out) -> int:
    if args.runs < 2:
        raise PreconditionError(f"--runs must be at least 2, got {args.runs}")
    project = load_project(args.project)
    fp = read_footprint(args.footprint)
    result = stability_filter(project, fp, runs=args.runs, record_internal=args.record_internal)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {write_snapshot(result.snapshots[t], out_dir) for t in result.stable}
    # leftovers from an earlier recording would pollute later comparisons
    for stale in snapshot_paths(out_dir):
        if stale not in written:
            stale.unlink()
    write_flaky(out_dir, result.flaky)
    failing = sum(s.status != "passed" for s in result.snapshots.values())
    out(f"recorded {len(written)} snapshots ({len(result.flaky)} flaky, {failing} not passing) -> {out_dir}")
    return EXIT_OK


def cmd_compare(args, out: _Out) -> int:
    report = compare_sets(args.old, args.new, exc_type_only=args.exc_type_only, all_divergences=args.all)
    out(render_report(report, args.format), end="")
    return EXIT_FINDINGS if report.findings else EXIT_OK


def cmd_campaign(args, out: _Out) -> int:
    project = load_project(args.project)
    fp = read_footprint(args.footprint)
    baseline, _ = read_snapshot_dir(args.baseline)
    stale = sorted(t for t, s in baseline.items() if s.project != project.fingerprint)
    if stale:
        raise PreconditionError(f"baseline was recorded against different client sources: {stale[0]}")
    jobs = args.jobs if args.jobs is not None else default_jobs()
    matrix = run_campaign(project, fp, baseline, mode=args.default_mode,
                          flaky=read_flaky(args.baseline), jobs=jobs, record_internal=args.record_internal)
    tests_score, snaps_score = mutation_scores(matrix)
    prefix = args.out
    atomic_write(f"{prefix}.csv", matrix_to_csv(matrix))
    atomic_write(f"{prefix}.json", matrix_to_json(matrix))
    if args.plot:
        from .plotting import plot_kill_matrix

        plot_kill_matrix(matrix, f"{prefix}.png")
    survivors = matrix.survivors
    out(f"mutants: {matrix.mutants}")
    out(f"test mutation score: {format_score(tests_score)} ({matrix.tests_killed}/{matrix.mutants})")
    out(f"snapshot mutation score: {format_score(snaps_score)} ({matrix.snapshots_killed}/{matrix.mutants})")
    for row in survivors:
        out(f"survived both: {row.target}")
    return EXIT_FINDINGS if survivors else EXIT_OK


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boundary-snap",
        description="Detect behavioral breaking changes by diffing API-boundary snapshots.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress non-error output")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("footprint", parents=[common], help="extract the client usage footprint")
    p.add_argument("--project", required=True, metavar="DIR")
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_footprint)

    p = sub.add_parser("record", parents=[common], help="record snapshots with the stability filter")
    p.add_argument("--project", required=True, metavar="DIR")
    p.add_argument("--footprint", required=True, metavar="FILE")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--runs", type=int, default=2, metavar="N", help="recordings per test (default: 2)")
    p.add_argument("--record-internal", action="store_true",
                   help="also record library-internal calls to exported symbols")
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("compare", parents=[common], help="diff two snapshot directories")
    p.add_argument("--old", required=True, metavar="DIR")
    p.add_argument("--new", required=True, metavar="DIR")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--all", action="store_true", help="report every positional divergence")
    p.add_argument("--exc-type-only", action="store_true", help="ignore exception messages")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("campaign", parents=[common], help="run the extreme-mutation campaign")
    p.add_argument("--project", required=True, metavar="DIR")
    p.add_argument("--footprint", required=True, metavar="FILE")
    p.add_argument("--baseline", required=True, metavar="DIR")
    p.add_argument("--out", required=True, metavar="PREFIX", help="writes PREFIX.csv and PREFIX.json")
    p.add_argument("--default-mode", choices=MODES, default="null")
    p.add_argument("--jobs", type=_positive, default=None, metavar="N",
                   help="worker processes (default: available CPUs)")
    p.add_argument("--record-internal", action="store_true")
    p.add_argument("--plot", action="store_true", help="also render PREFIX.png")
    p.set_defaults(func=cmd_campaign)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, _Out(args.quiet))
    except (BoundarySnapError, MiniLangError, OSError) as exc:
        print(f"boundary-snap: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

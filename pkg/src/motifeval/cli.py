"""Command-line interface.

Subcommands:
    evaluate   run the benchmark over motif specs and scaffold sets
    score      recompute the benchmark score from a report CSV
    validate   check scaffold files for format compliance (no backends)

Exit codes: 0 success, 2 configuration error, 3 backend failure,
4 incomplete run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (
    BackendError,
    ConfigurationError,
    IncompleteRunError,
    MotifEvalError,
)
from .harness import (
    REPORT_FORMATS,
    RunConfig,
    render_table,
    run_benchmark,
    score_from_csv,
    validate_scaffold_dir,
)
from .metrics import ScoreParams
from .structure_io import parse_motif_spec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BACKEND = 3
EXIT_INCOMPLETE = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="motifeval",
        description="Motif-scaffolding evaluation harness")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="run the benchmark")
    ev.add_argument("--motifs", required=True,
                    help="directory of motif specification PDB files")
    ev.add_argument("--scaffolds", required=True,
                    help="directory of per-case scaffold-set directories")
    ev.add_argument("--backends", required=True,
                    help="backend configuration file (YAML)")
    ev.add_argument("--out", required=True, help="run output directory")
    ev.add_argument("--cases", default="",
                    help="comma-separated case numbers or ids, e.g. 1,6,27")
    ev.add_argument("--workers", type=int, default=0,
                    help="scaffold evaluations in flight (0: all processors)")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--replicates", type=int, default=1)
    ev.add_argument("--format", default=",".join(REPORT_FORMATS),
                    help="comma-separated list from csv,json,table")

    sc = sub.add_parser("score", help="recompute the score from a report CSV")
    sc.add_argument("csv", help="report CSV path")
    sc.add_argument("--alpha", type=float, default=5.0)

    va = sub.add_parser("validate",
                        help="check scaffold format compliance")
    va.add_argument("scaffold_dir")
    va.add_argument("--motif", default=None,
                    help="motif spec file; enables placement and set checks")
    return parser


def _cmd_evaluate(args):
    config = RunConfig(
        motif_dir=args.motifs,
        scaffolds_dir=args.scaffolds,
        backend_config_path=args.backends,
        output_dir=args.out,
        worker_count=args.workers,
        seed=args.seed,
        case_filter=tuple(t for t in args.cases.split(",") if t),
        replicate_count=args.replicates,
        formats=tuple(t for t in args.format.split(",") if t),
    )
    report = run_benchmark(config)
    sys.stdout.write(render_table(report))
    return EXIT_OK


def _cmd_score(args):
    path = Path(args.csv)
    if not path.is_file():
        raise ConfigurationError(f"no such file: {path}")
    score = score_from_csv(path.read_bytes(), ScoreParams(alpha=args.alpha))
    print(f"{score:.6f}")
    return EXIT_OK


def _cmd_validate(args):
    spec = None
    if args.motif:
        motif_path = Path(args.motif)
        if not motif_path.is_file():
            raise ConfigurationError(f"no such motif file: {motif_path}")
        spec = parse_motif_spec(motif_path.read_bytes())
    problems = validate_scaffold_dir(args.scaffold_dir, spec)
    if problems:
        for problem in problems:
            print(f"FAIL {problem}")
        return EXIT_CONFIG
    print("ok")
    return EXIT_OK


def _caused_by_backend(exc):
    seen = set()
    while exc is not None and id(exc) not in seen:
        if isinstance(exc, BackendError):
            return True
        seen.add(id(exc))
        exc = getattr(exc, "cause", None) or exc.__cause__
    return False


def main(argv=None):
    args = _build_parser().parse_args(argv)
    handlers = {"evaluate": _cmd_evaluate, "score": _cmd_score,
                "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IncompleteRunError as exc:
        code = EXIT_BACKEND if _caused_by_backend(exc) else EXIT_INCOMPLETE
        print(f"incomplete run: {exc}", file=sys.stderr)
        return code
    except MotifEvalError as exc:
        if _caused_by_backend(exc):
            print(f"backend failure: {exc}", file=sys.stderr)
            return EXIT_BACKEND
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

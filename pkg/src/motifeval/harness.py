"""Run orchestration: case discovery, caching, replicates, reports.

A run directory is laid out as::

    out/
      cases/<case_id>/rep_<r>/scaffold_<idx>.json   per-scaffold records
      report.csv  report.json  report.txt           deterministic outputs
      timings.json                                  wall-time ledger

Per-scaffold records double as a resume cache: each file stores a
content digest over (scaffold, problem, backend configuration, sampling
parameters), so rerunning after an interruption replays finished work
and recomputes nothing else. Reports never embed wall-clock data; the
timing ledger goes to its own file so repeated runs stay byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .backends.base import (
    NUM_SEQUENCES_DEFAULT,
    TEMPERATURE_DEFAULT,
    BackendSuite,
    SequenceDesigner,
    StructureClusterer,
    StructurePredictor,
    StructureSearcher,
)
from .backends.config import build_suite, load_backend_config
from .digest import derive_seed, digest_of, to_jsonable
from .errors import (
    ConfigurationError,
    IncompleteRunError,
    MotifEvalError,
    ValidationError,
)
from .metrics import (
    ScaffoldEvaluationError,
    ScaffoldOutcome,
    SequenceOutcome,
    benchmark_score,
    evaluate_scaffold_set,
)
from .structure_io import parse_motif_spec, parse_scaffold_pdb, parse_scaffold_set

METADATA_FILENAME = "metadata.tsv"
REPORT_FORMATS = ("csv", "json", "table")

CSV_COLUMNS = ("case", "case_id", "pdb_id", "group", "num_solutions",
               "novelty", "success_rate_pct")
CSV_STD_COLUMNS = ("num_solutions_std", "novelty_std",
                   "success_rate_pct_std")


def cache_key(stage, inputs):
    """Stable content digest keying a per-stage result cache."""
    return digest_of(stage, inputs)


@dataclass
class RunConfig:
    motif_dir: str
    scaffolds_dir: str
    backend_config_path: str
    output_dir: str
    worker_count: int = 0  # 0 -> number of processors
    seed: int = 0
    case_filter: tuple = ()
    replicate_count: int = 1
    num_sequences: int = NUM_SEQUENCES_DEFAULT
    temperature: float = TEMPERATURE_DEFAULT
    formats: tuple = REPORT_FORMATS

    def __post_init__(self):
        if self.replicate_count < 1:
            raise ConfigurationError("replicate_count must be >= 1")
        if self.worker_count < 0:
            raise ConfigurationError("worker_count must be >= 0")
        self.case_filter = tuple(self.case_filter)
        self.formats = tuple(self.formats)
        bad = set(self.formats) - set(REPORT_FORMATS)
        if bad:
            raise ConfigurationError(f"unknown report formats {sorted(bad)}")

    @property
    def effective_workers(self):
        return self.worker_count or os.cpu_count() or 1


@dataclass(frozen=True)
class CaseInput:
    case_number: int
    case_id: str
    spec: object
    scaffold_dir: Path
    metadata_path: Path

    @property
    def group(self):
        segments = len(self.spec.segments)
        return segments if segments < 3 else 3


@dataclass(frozen=True)
class CaseRow:
    case_number: int
    case_id: str
    pdb_id: str
    group: int
    num_solutions: float
    novelty: float
    success_rate_pct: float
    num_solutions_std: float | None = None
    novelty_std: float | None = None
    success_rate_pct_std: float | None = None
    replicate_num_solutions: tuple = ()
    replicate_novelty: tuple = ()
    replicate_success_rate_pct: tuple = ()


@dataclass
class BenchmarkReport:
    rows: list
    score: float
    score_std: float | None
    per_replicate_scores: tuple
    replicate_count: int
    timings: dict = field(default_factory=dict)

    def solutions_column(self):
        return [row.num_solutions for row in self.rows]


# ---------------------------------------------------------------------------
# Case discovery
# ---------------------------------------------------------------------------

def _case_number(stem, position):
    digits = ""
    for ch in stem:
        if ch.isdigit():
            digits += ch
        else:
            break
    return int(digits) if digits else position


def discover_cases(motif_dir, scaffolds_dir, case_filter=()):
    """Pair motif files with their scaffold-set directories.

    Motif files are ``<case>.pdb`` under ``motif_dir``; each case's
    scaffolds live in ``scaffolds_dir/<case>/`` next to a
    ``metadata.tsv`` placement file. Every selected case must have both
    present before any evaluation starts.
    """
    motif_dir = Path(motif_dir)
    scaffolds_dir = Path(scaffolds_dir)
    if not motif_dir.is_dir():
        raise ConfigurationError(f"motif directory not found: {motif_dir}")
    if not scaffolds_dir.is_dir():
        raise ConfigurationError(
            f"scaffold directory not found: {scaffolds_dir}")

    motif_files = sorted(motif_dir.glob("*.pdb"))
    if not motif_files:
        raise ConfigurationError(f"no motif files under {motif_dir}")

    wanted = {str(token) for token in case_filter}
    cases = []
    for position, path in enumerate(motif_files, start=1):
        case_id = path.stem
        number = _case_number(case_id, position)
        if wanted and case_id not in wanted and str(number) not in wanted:
            continue
        spec = parse_motif_spec(path.read_bytes())
        case_dir = scaffolds_dir / case_id
        metadata = case_dir / METADATA_FILENAME
        if not case_dir.is_dir() or not metadata.is_file():
            raise ConfigurationError(
                f"case {case_id}: missing scaffold set at {case_dir} "
                f"(expected {METADATA_FILENAME} inside)")
        cases.append(CaseInput(case_number=number, case_id=case_id,
                               spec=spec, scaffold_dir=case_dir,
                               metadata_path=metadata))
    if not cases:
        raise ConfigurationError(
            f"case filter {sorted(wanted)} matched nothing")
    return cases


# ---------------------------------------------------------------------------
# Per-scaffold resume cache
# ---------------------------------------------------------------------------

class OutcomeCache:
    """File-backed per-scaffold outcome store keyed by content digest."""

    def __init__(self, directory, context_key):
        self.directory = Path(directory)
        self.context_key = context_key

    def _path(self, scaffold):
        return self.directory / f"scaffold_{scaffold.scaffold_index:03d}.json"

    def _key(self, scaffold):
        return cache_key("scaffold-eval", {
            "context": self.context_key,
            "ca": scaffold.ca,
            "n": scaffold.n,
            "c": scaffold.c,
            "o": scaffold.o,
            "placements": scaffold.placements,
        })

    def get(self, scaffold):
        path = self._path(scaffold)
        if not path.is_file():
            return None
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return None
        if payload.get("key") != self._key(scaffold):
            return None
        raw = payload["outcome"]
        return ScaffoldOutcome(
            scaffold_index=raw["scaffold_index"],
            records=tuple(SequenceOutcome(sequence=r[0], motif_rmsd=r[1],
                                          sc_rmsd=r[2])
                          for r in raw["records"]),
            success=raw["success"],
            passing_sequence_indices=tuple(raw["passing"]),
        )

    def put(self, scaffold, outcome):
        payload = {
            "key": self._key(scaffold),
            "outcome": {
                "scaffold_index": outcome.scaffold_index,
                "records": [[r.sequence, r.motif_rmsd, r.sc_rmsd]
                            for r in outcome.records],
                "success": outcome.success,
                "passing": list(outcome.passing_sequence_indices),
            },
        }
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._path(scaffold)
        tmp = path.with_name(path.name + f".tmp-{os.getpid()}")
        tmp.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Stage timing
# ---------------------------------------------------------------------------

class StageTimer:
    def __init__(self):
        self._lock = threading.Lock()
        self.totals = {}

    def add(self, stage, seconds):
        with self._lock:
            self.totals[stage] = self.totals.get(stage, 0.0) + seconds

    def snapshot(self):
        with self._lock:
            return dict(self.totals)


class _Timed:
    def __init__(self, inner, timer, stage):
        self._inner = inner
        self._timer = timer
        self._stage = stage

    def _run(self, fn, *args, **kwargs):
        started = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self._timer.add(self._stage, time.perf_counter() - started)


class TimedDesigner(_Timed, SequenceDesigner):
    def design(self, request):
        return self._run(self._inner.design, request)


class TimedFolder(_Timed, StructurePredictor):
    def predict(self, sequence, context=None):
        return self._run(self._inner.predict, sequence, context)


class TimedClusterer(_Timed, StructureClusterer):
    def cluster(self, traces):
        return self._run(self._inner.cluster, traces)


class TimedSearcher(_Timed, StructureSearcher):
    def max_tm_to_database(self, trace, label=None):
        return self._run(self._inner.max_tm_to_database, trace, label=label)


def timed_suite(suite, timer):
    return BackendSuite(
        designer=TimedDesigner(suite.designer, timer, "design"),
        designer_ca_only=(TimedDesigner(suite.designer_ca_only, timer,
                                        "design")
                          if suite.designer_ca_only else None),
        folder=TimedFolder(suite.folder, timer, "fold"),
        clusterer=TimedClusterer(suite.clusterer, timer, "cluster"),
        searcher=TimedSearcher(suite.searcher, timer, "search"),
    )


# ---------------------------------------------------------------------------
# The benchmark run
# ---------------------------------------------------------------------------

def _descriptor_fingerprint(descriptors):
    return {role: to_jsonable({
        "kind": d.kind, "command": list(d.command),
        "fixture_path": d.fixture_path, "noise_sigma": d.noise_sigma,
        "noise_free_motif": d.noise_free_motif, "seed": d.seed,
        "merge_threshold": d.merge_threshold, "tm_value": d.tm_value,
        "tm_values": d.tm_values,
    }) for role, d in descriptors.items()}


def run_benchmark(config):
    """Evaluate every selected case and write the report artifacts.

    Reruns with identical inputs and mock/recorded backends produce
    byte-identical reports; interrupted runs resume from the
    per-scaffold cache. Any hard backend failure marks the run
    incomplete instead of reporting zeros.
    """
    for label, path in (("motif", config.motif_dir),
                        ("scaffold", config.scaffolds_dir)):
        if not Path(path).is_dir():
            raise ConfigurationError(f"{label} directory not found: {path}")
    descriptors = load_backend_config(config.backend_config_path)
    cases = discover_cases(config.motif_dir, config.scaffolds_dir,
                           config.case_filter)
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    fingerprint = _descriptor_fingerprint(descriptors)
    timer = StageTimer()
    timings = {}

    per_case_metrics = {case.case_id: [] for case in cases}
    for case in cases:
        case_started = time.perf_counter()
        spec_digest = cache_key("spec", {"text": _spec_text(case.spec)})
        scaffold_set = parse_scaffold_set(case.scaffold_dir,
                                          case.metadata_path.read_bytes(),
                                          case.spec,
                                          problem_id=case.case_id)
        for replicate in range(config.replicate_count):
            replicate_seed = derive_seed(config.seed, "replicate", replicate)
            suite = timed_suite(build_suite(descriptors,
                                            default_seed=replicate_seed),
                                timer)
            context_key = {
                "spec": spec_digest,
                "backends": fingerprint,
                "num_sequences": config.num_sequences,
                "temperature": config.temperature,
                "seed": replicate_seed,
            }
            cache = OutcomeCache(
                output_dir / "cases" / case.case_id / f"rep_{replicate}",
                context_key)
            try:
                metrics = evaluate_scaffold_set(
                    scaffold_set, case.spec, suite,
                    num_sequences=config.num_sequences,
                    temperature=config.temperature,
                    seed=replicate_seed,
                    workers=config.effective_workers,
                    outcome_cache=cache)
            except ScaffoldEvaluationError as exc:
                raise IncompleteRunError(
                    f"case {case.case_id} replicate {replicate}: {exc}; "
                    f"partial results cached under {cache.directory}, rerun "
                    f"to resume") from exc
            per_case_metrics[case.case_id].append(metrics)
        timings[case.case_id] = {
            **timer.snapshot(), "wall": time.perf_counter() - case_started}
        timer = StageTimer()

    report = _build_report(cases, per_case_metrics, config, timings)
    emit_report(report, config.formats, output_dir)
    return report


def _spec_text(spec):
    from .structure_io import write_motif_spec

    return write_motif_spec(spec).decode("utf-8")


def _success_pct(metrics):
    return float(sum(1 for o in metrics.outcomes if o.success))


def _std(values):
    if len(values) < 2:
        return None
    return float(np.std(np.asarray(values, dtype=float), ddof=1))


def _build_report(cases, per_case_metrics, config, timings):
    rows = []
    replicate_count = config.replicate_count
    for case in cases:
        metrics_list = per_case_metrics[case.case_id]
        solutions = tuple(float(m.num_solutions) for m in metrics_list)
        novelty = tuple(float(m.novelty) for m in metrics_list)
        success_pct = tuple(_success_pct(m) for m in metrics_list)
        rows.append(CaseRow(
            case_number=case.case_number,
            case_id=case.case_id,
            pdb_id=case.spec.reference_pdb_id,
            group=case.group,
            num_solutions=float(np.mean(solutions)),
            novelty=float(np.mean(novelty)),
            success_rate_pct=float(np.mean(success_pct)),
            num_solutions_std=_std(solutions),
            novelty_std=_std(novelty),
            success_rate_pct_std=_std(success_pct),
            replicate_num_solutions=solutions,
            replicate_novelty=novelty,
            replicate_success_rate_pct=success_pct,
        ))
    rows.sort(key=lambda row: (row.case_number, row.case_id))

    per_replicate_scores = tuple(
        benchmark_score([per_case_metrics[case.case_id][r].num_solutions
                         for case in cases])
        for r in range(replicate_count))
    score = float(np.mean(per_replicate_scores))
    return BenchmarkReport(
        rows=rows,
        score=score,
        score_std=_std(per_replicate_scores),
        per_replicate_scores=per_replicate_scores,
        replicate_count=replicate_count,
        timings=timings,
    )


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

def _format_value(value):
    if value is None:
        return ""
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return repr(value)


def render_csv(report):
    buffer = io.StringIO()
    columns = CSV_COLUMNS + (CSV_STD_COLUMNS
                             if report.replicate_count > 1 else ())
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in report.rows:
        record = [row.case_number, row.case_id, row.pdb_id, row.group,
                  _format_value(row.num_solutions),
                  _format_value(row.novelty),
                  _format_value(row.success_rate_pct)]
        if report.replicate_count > 1:
            record += [_format_value(row.num_solutions_std),
                       _format_value(row.novelty_std),
                       _format_value(row.success_rate_pct_std)]
        writer.writerow(record)
    return buffer.getvalue()


def render_json(report):
    payload = {
        "score": report.score,
        "score_std": report.score_std,
        "per_replicate_scores": list(report.per_replicate_scores),
        "replicate_count": report.replicate_count,
        "rows": [{
            "case": row.case_number,
            "case_id": row.case_id,
            "pdb_id": row.pdb_id,
            "group": row.group,
            "num_solutions": row.num_solutions,
            "novelty": row.novelty,
            "success_rate_pct": row.success_rate_pct,
            "num_solutions_std": row.num_solutions_std,
            "novelty_std": row.novelty_std,
            "success_rate_pct_std": row.success_rate_pct_std,
            "replicate_num_solutions": list(row.replicate_num_solutions),
            "replicate_novelty": list(row.replicate_novelty),
            "replicate_success_rate_pct":
                list(row.replicate_success_rate_pct),
        } for row in report.rows],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _mean_std_cell(mean, std):
    if std is None:
        if float(mean).is_integer():
            return str(int(mean))
        return f"{mean:.3f}"
    return f"{mean:.2f} ± {std:.2f}"


def render_table(report):
    headers = ["#", "case", "pdb", "group", "solutions", "novelty",
               "success %"]
    body = []
    for row in report.rows:
        body.append([
            str(row.case_number), row.case_id, row.pdb_id, str(row.group),
            _mean_std_cell(row.num_solutions, row.num_solutions_std),
            _mean_std_cell(round(row.novelty, 3) if row.novelty_std is None
                           else row.novelty, row.novelty_std),
            _mean_std_cell(row.success_rate_pct, row.success_rate_pct_std),
        ])
    widths = [max(len(headers[i]), *(len(line[i]) for line in body))
              for i in range(len(headers))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    lines.append("  ".join("-" * w for w in widths))
    for line in body:
        lines.append("  ".join(cell.ljust(widths[i])
                               for i, cell in enumerate(line)))
    score_cell = (f"{report.score:.2f}" if report.score_std is None
                  else f"{report.score:.2f} ± {report.score_std:.2f}")
    lines.append("")
    lines.append(f"benchmark score: {score_cell}")
    return "\n".join(lines) + "\n"


def emit_report(report, formats, output_dir):
    """Write machine- and human-readable report files.

    The CSV and JSON re-parse to identical values (floats are written in
    shortest-round-trip form). Timings go to their own file so report
    files stay byte-identical across repeated runs.
    """
    output_dir = Path(output_dir)
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        written = {}
        renderers = {"csv": render_csv, "json": render_json,
                     "table": render_table}
        names = {"csv": "report.csv", "json": "report.json",
                 "table": "report.txt"}
        for fmt in formats:
            if fmt not in renderers:
                raise ConfigurationError(f"unknown report format {fmt!r}")
            path = output_dir / names[fmt]
            path.write_text(renderers[fmt](report), encoding="utf-8")
            written[fmt] = path
        if report.timings:
            (output_dir / "timings.json").write_text(
                json.dumps(report.timings, indent=2, sort_keys=True) + "\n",
                encoding="utf-8")
    except OSError as exc:
        raise MotifEvalError(
            f"cannot write report under {output_dir}: {exc}") from exc
    return written


def score_from_csv(data, params=None):
    """Recompute the benchmark score from a report CSV."""
    from .metrics import ScoreParams

    if isinstance(data, bytes):
        data = data.decode("utf-8")
    reader = csv.DictReader(io.StringIO(data))
    if reader.fieldnames is None or "num_solutions" not in reader.fieldnames:
        raise ValidationError("CSV lacks a num_solutions column")
    counts = []
    for record in reader:
        counts.append(float(record["num_solutions"]))
    return benchmark_score(counts, params or ScoreParams())


# ---------------------------------------------------------------------------
# Standalone scaffold-set validation (no backends)
# ---------------------------------------------------------------------------

def validate_scaffold_dir(directory, spec=None):
    """Check a scaffold directory for format compliance.

    Returns a list of problem strings (empty when compliant). With a
    motif spec the placements, lengths, and set size are fully checked;
    without one, only per-file parsability and length uniformity.
    """
    directory = Path(directory)
    problems = []
    if not directory.is_dir():
        return [f"not a directory: {directory}"]
    metadata = directory / METADATA_FILENAME
    if spec is not None:
        if not metadata.is_file():
            return [f"missing {METADATA_FILENAME} in {directory}"]
        try:
            parse_scaffold_set(directory, metadata.read_bytes(), spec)
        except MotifEvalError as exc:
            problems.append(str(exc))
        return problems

    pdb_files = sorted(directory.glob("*.pdb"))
    if not pdb_files:
        return [f"no scaffold PDB files in {directory}"]
    lengths = {}
    for path in pdb_files:
        try:
            record = parse_scaffold_pdb(path.read_bytes(),
                                        source_name=path.name)
            lengths.setdefault(len(record), []).append(path.name)
        except MotifEvalError as exc:
            problems.append(f"{path.name}: {exc}")
    if len(lengths) > 1:
        problems.append(
            f"scaffolds differ in length: "
            f"{ {k: v[:3] for k, v in sorted(lengths.items())} }")
    return problems

"""The evaluation core: per-scaffold success testing and per-problem metrics.

A scaffold succeeds when at least one of its designed sequences folds
into a structure that both maintains the motif (joint N/CA/C RMSD across
all segments strictly below 1.0 A) and reproduces the designed backbone
(CA-only RMSD strictly below 2.0 A). Successful scaffolds are clustered
into unique solutions; novelty is the mean over clusters of the mean of
(1 - best TM-score to the reference database) among members; the success
rate is the fraction of successful scaffolds.

Strict comparison at the thresholds follows the evaluation procedure's
inequality; prose elsewhere says "at most", and the discrepancy is
documented rather than resolved (boundary equality is vanishingly rare
on real data, and the tests pin the strict behavior).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .backends.base import (
    NUM_SEQUENCES_DEFAULT,
    TEMPERATURE_DEFAULT,
    FoldContext,
    SequenceDesignRequest,
    cluster_structures,
    design_sequences,
    predict_structure,
    search_novelty,
)
from .errors import MotifEvalError, ValidationError
from .geometry import motif_rmsd, sc_rmsd
from .structure_io import validate_placements

MOTIF_RMSD_MAX = 1.0
SC_RMSD_MAX = 2.0


class ScaffoldEvaluationError(MotifEvalError):
    """A scaffold evaluation failed; carries the scaffold index."""

    def __init__(self, scaffold_index, cause):
        super().__init__(f"evaluation of scaffold {scaffold_index} failed: "
                         f"{cause}")
        self.scaffold_index = scaffold_index
        self.cause = cause


@dataclass(frozen=True)
class SuccessThresholds:
    motif_rmsd_max: float = MOTIF_RMSD_MAX
    sc_rmsd_max: float = SC_RMSD_MAX

    def passes(self, motif, sc):
        # Strictly below both thresholds.
        return motif < self.motif_rmsd_max and sc < self.sc_rmsd_max


@dataclass(frozen=True)
class SequenceOutcome:
    sequence: str
    motif_rmsd: float
    sc_rmsd: float


@dataclass(frozen=True)
class ScaffoldOutcome:
    """Evaluation record for one scaffold: all sequences, all RMSDs."""

    scaffold_index: int
    records: tuple
    success: bool
    passing_sequence_indices: tuple

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "passing_sequence_indices",
                           tuple(self.passing_sequence_indices))
        if self.success != bool(self.passing_sequence_indices):
            raise ValidationError(
                f"scaffold {self.scaffold_index}: success flag inconsistent "
                f"with passing sequences")

    def best_record(self):
        """Best passing sequence for reporting.

        Minimum motifRMSD among passing sequences; ties break on lower
        scRMSD, then lower sequence index. None when nothing passed.
        """
        if not self.success:
            return None
        best = min(self.passing_sequence_indices,
                   key=lambda i: (self.records[i].motif_rmsd,
                                  self.records[i].sc_rmsd, i))
        return self.records[best]


@dataclass(frozen=True)
class ScoreParams:
    alpha: float = 5.0
    scale: float = 100.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValidationError("alpha must be positive")


@dataclass(frozen=True)
class CaseMetrics:
    """Per-problem results: unique solutions, novelty, success rate."""

    problem_id: str
    num_solutions: int
    novelty: float
    success_rate: float
    clusters: tuple = ()          # scaffold indices, one tuple per cluster
    cluster_novelties: tuple = ()
    member_tms: dict = field(default_factory=dict)
    outcomes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "clusters",
                           tuple(tuple(c) for c in self.clusters))
        object.__setattr__(self, "cluster_novelties",
                           tuple(self.cluster_novelties))
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if self.num_solutions != len(self.clusters):
            raise ValidationError("num_solutions != number of clusters")
        if self.num_solutions == 0 and self.novelty != 0.0:
            raise ValidationError("novelty must be 0 without solutions")
        if not 0.0 <= self.success_rate <= 1.0:
            raise ValidationError("success rate outside [0, 1]")


def motif_row_indices(spec, placements):
    """0-based scaffold rows occupied by motif residues."""
    validate_placements(placements, spec, spec.scaffold_length)
    rows = []
    for seg in spec.segments:
        start = placements[seg.segment_id]
        rows.extend(range(start - 1, start - 1 + len(seg)))
    return tuple(sorted(rows))


def test_scaffold(scaffold, spec, suite, thresholds=SuccessThresholds(),
                  num_sequences=NUM_SEQUENCES_DEFAULT,
                  temperature=TEMPERATURE_DEFAULT, seed=None):
    """Evaluate one scaffold: design, fold, both RMSDs, success flag.

    Designs ``num_sequences`` sequences with the motif types fixed except
    at redesignable positions (the CA-only designer is selected
    automatically for CA-only scaffolds), folds each, and computes the
    joint motif RMSD and the CA-only self-consistency RMSD. Any backend
    failure aborts the whole scaffold; partial results are never kept.
    """
    try:
        fixed = spec.fixed_positions(scaffold.placements)
        if len(scaffold) != spec.scaffold_length:
            raise ValidationError(
                f"scaffold has {len(scaffold)} residues, problem demands "
                f"{spec.scaffold_length}")
        request = SequenceDesignRequest(
            backbone=scaffold,
            fixed_positions=fixed,
            num_sequences=num_sequences,
            sampling_temperature=temperature,
            seed=seed,
        )
        designed = design_sequences(suite.designer_for(scaffold), request)
        context = FoldContext(
            designed=scaffold,
            motif_rows=motif_row_indices(spec, scaffold.placements))
        records = []
        for sequence in designed.sequences:
            predicted = predict_structure(suite.folder, sequence, context)
            records.append(SequenceOutcome(
                sequence=sequence,
                motif_rmsd=motif_rmsd(predicted, spec, scaffold.placements),
                sc_rmsd=sc_rmsd(scaffold, predicted),
            ))
    except MotifEvalError as exc:
        raise ScaffoldEvaluationError(scaffold.scaffold_index, exc) from exc
    passing = tuple(i for i, rec in enumerate(records)
                    if thresholds.passes(rec.motif_rmsd, rec.sc_rmsd))
    return ScaffoldOutcome(
        scaffold_index=scaffold.scaffold_index,
        records=tuple(records),
        success=bool(passing),
        passing_sequence_indices=passing,
    )


def evaluate_scaffold_set(scaffold_set, spec, suite,
                          thresholds=SuccessThresholds(),
                          num_sequences=NUM_SEQUENCES_DEFAULT,
                          temperature=TEMPERATURE_DEFAULT, seed=None,
                          workers=1, outcome_cache=None):
    """Run the full per-problem evaluation and aggregate CaseMetrics.

    Scaffold evaluations are independent and run under a bounded worker
    pool; aggregation is a sequential fold over outcomes ordered by
    scaffold index, so scheduling cannot change any reported number.
    ``outcome_cache`` (get/put by scaffold) lets the harness resume
    interrupted runs without re-invoking backends.
    """
    scaffolds = scaffold_set.scaffolds

    def evaluate(scaffold):
        if outcome_cache is not None:
            cached = outcome_cache.get(scaffold)
            if cached is not None:
                return cached
        outcome = test_scaffold(scaffold, spec, suite, thresholds=thresholds,
                                num_sequences=num_sequences,
                                temperature=temperature, seed=seed)
        if outcome_cache is not None:
            outcome_cache.put(scaffold, outcome)
        return outcome

    if workers <= 1:
        outcomes = [evaluate(s) for s in scaffolds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(evaluate, s): s.scaffold_index
                       for s in scaffolds}
            results = {}
            errors = {}
            for future, index in futures.items():
                try:
                    results[index] = future.result()
                except ScaffoldEvaluationError as exc:
                    errors[index] = exc
            if errors:
                raise errors[min(errors)]
            outcomes = [results[s.scaffold_index] for s in scaffolds]

    outcomes.sort(key=lambda outcome: outcome.scaffold_index)
    return aggregate_case(scaffold_set, outcomes, suite)


def aggregate_case(scaffold_set, outcomes, suite):
    """Cluster successes and fold outcomes into CaseMetrics."""
    by_index = {rec.scaffold_index: rec for rec in scaffold_set.scaffolds}
    successes = [o for o in outcomes if o.success]
    success_rate = len(successes) / len(scaffold_set)

    if not successes:
        return CaseMetrics(problem_id=scaffold_set.problem_id,
                           num_solutions=0, novelty=0.0,
                           success_rate=success_rate, clusters=(),
                           cluster_novelties=(), member_tms={},
                           outcomes=tuple(outcomes))

    # Unique solutions are defined on the designed coordinates of the
    # successes, not on predictions; the CA trace is what every scaffold
    # is guaranteed to carry.
    traces = [by_index[o.scaffold_index].ca for o in successes]
    partition = cluster_structures(suite.clusterer, traces)
    clusters = tuple(
        tuple(successes[pos].scaffold_index for pos in members)
        for members in partition)

    member_tms = {}
    for outcome in successes:
        trace = by_index[outcome.scaffold_index].ca
        member_tms[outcome.scaffold_index] = search_novelty(
            suite.searcher, trace, label=outcome.scaffold_index)

    cluster_novelties = tuple(
        1.0 - float(np.mean([member_tms[index] for index in members]))
        for members in clusters)
    novelty = float(np.mean(cluster_novelties))

    return CaseMetrics(
        problem_id=scaffold_set.problem_id,
        num_solutions=len(clusters),
        novelty=novelty,
        success_rate=success_rate,
        clusters=clusters,
        cluster_novelties=cluster_novelties,
        member_tms=member_tms,
        outcomes=tuple(outcomes),
    )


def benchmark_score(solutions_per_case, params=ScoreParams()):
    """Saturating per-case aggregate of unique-solution counts.

    Each case contributes (scale + alpha) * u / (alpha + u); the score is
    the mean contribution. One solution everywhere beats many solutions
    on a single problem, and the score spans [0, scale].
    """
    counts = list(solutions_per_case)
    if not counts:
        raise ValidationError("need at least one test case")
    total = 0.0
    for u in counts:
        if u < 0:
            raise ValidationError(f"negative solution count {u}")
        total += (params.scale + params.alpha) * u / (params.alpha + u)
    return total / len(counts)

"""Evaluation harness for protein motif-scaffolding methods.

Given a motif specification and a set of 100 candidate scaffolds, the
pipeline designs sequences for each scaffold, predicts their structures,
tests motif maintenance and self-consistency, clusters the successes,
and aggregates per-problem metrics into a single benchmark score.
"""

from ._kernels import kernel_backend
from .geometry import Superposition, compute_aligned_rmsd, motif_rmsd, sc_rmsd
from .metrics import (
    CaseMetrics,
    ScaffoldOutcome,
    ScoreParams,
    benchmark_score,
    evaluate_scaffold_set,
    test_scaffold,
)
from .structure_io import (
    MotifSpec,
    ScaffoldRecord,
    ScaffoldSet,
    extract_motif_atoms,
    parse_motif_spec,
    parse_scaffold_set,
    write_motif_spec,
)

__version__ = "0.1.0"

__all__ = [
    "CaseMetrics",
    "MotifSpec",
    "ScaffoldOutcome",
    "ScaffoldRecord",
    "ScaffoldSet",
    "ScoreParams",
    "Superposition",
    "benchmark_score",
    "compute_aligned_rmsd",
    "evaluate_scaffold_set",
    "extract_motif_atoms",
    "kernel_backend",
    "motif_rmsd",
    "parse_motif_spec",
    "parse_scaffold_set",
    "sc_rmsd",
    "test_scaffold",
    "write_motif_spec",
    "__version__",
]

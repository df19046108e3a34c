"""Backend interfaces, request/result contracts, and protocol validation.

Four tool roles feed the pipeline: fixed-backbone sequence design,
structure prediction, structural clustering, and structure search. Each
role has mock, recorded, and external-process implementations behind one
interface, so the metrics never know which variant produced a value.

Every backend response passes through a validation function here before
it reaches the metrics; a violating response raises ProtocolViolation
instead of silently propagating.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from ..digest import digest_of
from ..errors import ProtocolViolation, ValidationError
from ..structure_io import Backbone, ScaffoldRecord

NUM_SEQUENCES_DEFAULT = 8
TEMPERATURE_DEFAULT = 0.1
CANONICAL_AA = "ACDEFGHIKLMNPQRSTVWY"

ROLES = ("designer", "designer_ca_only", "folder", "clusterer", "searcher")


@dataclass(frozen=True)
class SequenceDesignRequest:
    """One fixed-backbone design call.

    ``fixed_positions`` maps 1-based scaffold residue index to the
    one-letter type that must appear there; the caller derives it from
    the motif spec (motif positions minus redesignable ones), which keeps
    the indices inside the motif placements by construction.
    """

    backbone: ScaffoldRecord
    fixed_positions: dict
    num_sequences: int = NUM_SEQUENCES_DEFAULT
    sampling_temperature: float = TEMPERATURE_DEFAULT
    seed: int | None = None

    def __post_init__(self):
        if self.num_sequences < 1:
            raise ValidationError("num_sequences must be >= 1")
        length = len(self.backbone)
        for index, aa in self.fixed_positions.items():
            if not 1 <= index <= length:
                raise ValidationError(
                    f"fixed position {index} outside scaffold 1..{length}")
            if aa not in CANONICAL_AA:
                raise ValidationError(
                    f"fixed position {index}: {aa!r} is not a canonical "
                    f"amino acid")

    def digest(self):
        backbone = self.backbone
        return digest_of("design", {
            "ca": backbone.ca,
            "n": backbone.n,
            "c": backbone.c,
            "o": backbone.o,
            "placements": backbone.placements,
            "fixed": self.fixed_positions,
            "num_sequences": self.num_sequences,
            "temperature": self.sampling_temperature,
            "seed": self.seed,
        })


@dataclass(frozen=True)
class SequenceDesignResult:
    sequences: tuple


@dataclass(frozen=True)
class FoldContext:
    """Pipeline context handed to structure predictors.

    Real predictors fold from the sequence alone and ignore this; the
    identity/noise mocks use it to echo the designed backbone and to keep
    motif rows noise-free when configured.
    """

    designed: ScaffoldRecord | None = None
    motif_rows: tuple = ()


class SequenceDesigner(ABC):
    @abstractmethod
    def design(self, request):
        """Return an iterable of designed sequences."""


class StructurePredictor(ABC):
    @abstractmethod
    def predict(self, sequence, context=None):
        """Return a Backbone with one residue per sequence position."""


class StructureClusterer(ABC):
    @abstractmethod
    def cluster(self, traces):
        """Partition CA traces; returns a list of member-index lists."""


class StructureSearcher(ABC):
    @abstractmethod
    def max_tm_to_database(self, trace, label=None):
        """Highest TM-score of ``trace`` against the reference database."""


@dataclass
class BackendDescriptor:
    """Declarative configuration of one backend role."""

    kind: str
    command: tuple = ()
    working_dir: str | None = None
    timeout_seconds: float = 600.0
    environment: dict = field(default_factory=dict)
    fixture_path: str | None = None
    record_to: str | None = None
    noise_sigma: float = 0.0
    noise_free_motif: bool = False
    seed: int | None = None
    merge_threshold: float = 0.5
    tm_value: float | None = None
    tm_values: dict = field(default_factory=dict)

    KINDS = ("mock", "recorded", "external")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValidationError(
                f"backend kind {self.kind!r} not one of {self.KINDS}")
        if self.kind == "external" and not self.command:
            raise ValidationError("external backend needs a command")
        if self.kind == "recorded" and not self.fixture_path:
            raise ValidationError("recorded backend needs a fixture_path")
        self.command = tuple(self.command)


@dataclass
class BackendSuite:
    """The per-role backends one evaluation runs against."""

    designer: SequenceDesigner
    folder: StructurePredictor
    clusterer: StructureClusterer
    searcher: StructureSearcher
    designer_ca_only: SequenceDesigner | None = None

    def designer_for(self, scaffold):
        if not scaffold.ca_only:
            return self.designer
        if self.designer_ca_only is None:
            raise ValidationError(
                f"scaffold {scaffold.scaffold_index} is CA-only but no "
                f"designer_ca_only backend is configured")
        return self.designer_ca_only


# ---------------------------------------------------------------------------
# Protocol validation around raw backend calls
# ---------------------------------------------------------------------------

def validate_sequences(request, sequences):
    """Check count, length, alphabet, and fixed positions of a design."""
    sequences = tuple(sequences)
    if len(sequences) != request.num_sequences:
        raise ProtocolViolation(
            f"designer returned {len(sequences)} sequences, "
            f"{request.num_sequences} requested")
    length = len(request.backbone)
    for pos, seq in enumerate(sequences):
        if len(seq) != length:
            raise ProtocolViolation(
                f"sequence {pos} has length {len(seq)}, scaffold has {length}")
        bad = set(seq) - set(CANONICAL_AA)
        if bad:
            raise ProtocolViolation(
                f"sequence {pos} contains non-canonical letters {sorted(bad)}")
        for index, aa in request.fixed_positions.items():
            if seq[index - 1] != aa:
                raise ProtocolViolation(
                    f"sequence {pos} changes fixed position {index} "
                    f"({aa} -> {seq[index - 1]})")
    return sequences


def validate_fold(sequence, backbone):
    if not isinstance(backbone, Backbone):
        raise ProtocolViolation("predictor must return a Backbone")
    if len(backbone) != len(sequence):
        raise ProtocolViolation(
            f"prediction has {len(backbone)} residues, sequence has "
            f"{len(sequence)}")
    return backbone


def validate_partition(count, clusters):
    """Every structure in exactly one cluster."""
    seen = sorted(i for cluster in clusters for i in cluster)
    if seen != list(range(count)):
        raise ProtocolViolation(
            f"clustering is not a partition of 0..{count - 1}: {clusters}")
    return [sorted(c) for c in clusters]


def validate_tm(value):
    value = float(value)
    if not np.isfinite(value) or not 0.0 <= value <= 1.0:
        raise ProtocolViolation(f"TM-score {value} outside [0, 1]")
    return value


# ---------------------------------------------------------------------------
# Role entry points used by the metrics
# ---------------------------------------------------------------------------

def design_sequences(backend, request):
    """Run a designer and return its validated SequenceDesignResult."""
    raw = backend.design(request)
    return SequenceDesignResult(sequences=validate_sequences(request, raw))


def predict_structure(backend, sequence, context=None):
    """Run a predictor and return its validated Backbone."""
    if not sequence:
        raise ValidationError("cannot fold an empty sequence")
    bad = set(sequence) - set(CANONICAL_AA)
    if bad:
        raise ValidationError(
            f"sequence contains non-canonical letters {sorted(bad)}")
    return validate_fold(sequence, backend.predict(sequence, context))


def cluster_structures(backend, traces):
    """Run a clusterer and return a validated partition."""
    traces = [np.asarray(t, dtype=np.float64) for t in traces]
    if not traces:
        raise ValidationError("nothing to cluster")
    return validate_partition(len(traces), backend.cluster(traces))


def search_novelty(backend, trace, label=None):
    """Run a searcher and return a validated max TM-score in [0, 1]."""
    trace = np.asarray(trace, dtype=np.float64)
    if trace.size == 0:
        raise ValidationError("empty structure")
    return validate_tm(backend.max_tm_to_database(trace, label=label))


def fold_digest(sequence):
    return digest_of("fold", {"sequence": sequence})


def cluster_digest(traces):
    return digest_of("cluster", {"traces": list(traces)})


def search_digest(trace):
    return digest_of("search", {"trace": trace})

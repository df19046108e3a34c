"""Pluggable tool backends: mock, recorded, and external-process."""

from .base import (
    CANONICAL_AA,
    NUM_SEQUENCES_DEFAULT,
    ROLES,
    TEMPERATURE_DEFAULT,
    BackendDescriptor,
    BackendSuite,
    FoldContext,
    SequenceDesigner,
    SequenceDesignRequest,
    SequenceDesignResult,
    StructureClusterer,
    StructurePredictor,
    StructureSearcher,
    cluster_structures,
    design_sequences,
    predict_structure,
    search_novelty,
)
from .config import build_backend, build_suite, load_backend_config
from .external import (
    ExternalClusterer,
    ExternalDesigner,
    ExternalFolder,
    ExternalSearcher,
    decoy_trace,
)
from .mocks import InternalClusterer, MockDesigner, MockFolder, MockSearcher
from .recorded import (
    RecordedClusterer,
    RecordedDesigner,
    RecordedFolder,
    RecordedSearcher,
    RecordingClusterer,
    RecordingDesigner,
    RecordingFolder,
    RecordingSearcher,
)

__all__ = [
    "BackendDescriptor",
    "BackendSuite",
    "CANONICAL_AA",
    "ExternalClusterer",
    "ExternalDesigner",
    "ExternalFolder",
    "ExternalSearcher",
    "FoldContext",
    "InternalClusterer",
    "MockDesigner",
    "MockFolder",
    "MockSearcher",
    "NUM_SEQUENCES_DEFAULT",
    "ROLES",
    "RecordedClusterer",
    "RecordedDesigner",
    "RecordedFolder",
    "RecordedSearcher",
    "RecordingClusterer",
    "RecordingDesigner",
    "RecordingFolder",
    "RecordingSearcher",
    "SequenceDesignRequest",
    "SequenceDesignResult",
    "SequenceDesigner",
    "StructureClusterer",
    "StructurePredictor",
    "StructureSearcher",
    "TEMPERATURE_DEFAULT",
    "build_backend",
    "build_suite",
    "cluster_structures",
    "decoy_trace",
    "design_sequences",
    "load_backend_config",
    "predict_structure",
    "search_novelty",
]

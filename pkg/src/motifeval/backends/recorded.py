"""Recorded backends: replay stored tool responses keyed by request digest.

A fixture directory has one subdirectory per role, one file per request:

    fixtures/
      design/<digest>.fasta
      fold/<digest>.pdb
      cluster/<digest>.tsv
      search/<digest>.txt

Recording wrappers sit in front of any live backend and write these
files after each successful call, so one real-tool run becomes a
replayable fixture. Replays are bitwise stable and concurrent-safe
(reads only).
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from ..errors import ConfigurationError
from ..structure_io import parse_backbone_pdb, write_backbone_pdb
from . import wire
from .base import (
    SequenceDesigner,
    StructureClusterer,
    StructurePredictor,
    StructureSearcher,
    cluster_digest,
    fold_digest,
    search_digest,
)


def _atomic_write(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fixture(root, role, digest, ext):
    return Path(root) / role / f"{digest}.{ext}"


def _load(root, role, digest, ext):
    path = _fixture(root, role, digest, ext)
    if not path.is_file():
        raise ConfigurationError(
            f"no recorded fixture for {role} request {digest[:12]}… "
            f"under {root}")
    return path.read_bytes()


class RecordedDesigner(SequenceDesigner):
    def __init__(self, fixture_path):
        self.fixture_path = fixture_path

    def design(self, request):
        data = _load(self.fixture_path, "design", request.digest(), "fasta")
        return wire.parse_fasta(data)


class RecordedFolder(StructurePredictor):
    def __init__(self, fixture_path):
        self.fixture_path = fixture_path

    def predict(self, sequence, context=None):
        data = _load(self.fixture_path, "fold", fold_digest(sequence), "pdb")
        return parse_backbone_pdb(data, source_name="recorded prediction")


class RecordedClusterer(StructureClusterer):
    def __init__(self, fixture_path):
        self.fixture_path = fixture_path

    def cluster(self, traces):
        data = _load(self.fixture_path, "cluster", cluster_digest(traces),
                     "tsv")
        names = [f"s_{i:03d}" for i in range(len(traces))]
        return wire.parse_clusters_tsv(data, names)


class RecordedSearcher(StructureSearcher):
    def __init__(self, fixture_path):
        self.fixture_path = fixture_path

    def max_tm_to_database(self, trace, label=None):
        data = _load(self.fixture_path, "search", search_digest(trace), "txt")
        return wire.parse_tm(data)


class RecordingDesigner(SequenceDesigner):
    def __init__(self, inner, fixture_path):
        self.inner = inner
        self.fixture_path = fixture_path

    def design(self, request):
        sequences = tuple(self.inner.design(request))
        _atomic_write(
            _fixture(self.fixture_path, "design", request.digest(), "fasta"),
            wire.emit_fasta(sequences))
        return sequences


class RecordingFolder(StructurePredictor):
    def __init__(self, inner, fixture_path):
        self.inner = inner
        self.fixture_path = fixture_path

    def predict(self, sequence, context=None):
        backbone = self.inner.predict(sequence, context)
        _atomic_write(
            _fixture(self.fixture_path, "fold", fold_digest(sequence), "pdb"),
            write_backbone_pdb(backbone, sequence=sequence))
        return backbone


class RecordingClusterer(StructureClusterer):
    def __init__(self, inner, fixture_path):
        self.inner = inner
        self.fixture_path = fixture_path

    def cluster(self, traces):
        clusters = self.inner.cluster(traces)
        names = [f"s_{i:03d}" for i in range(len(traces))]
        _atomic_write(
            _fixture(self.fixture_path, "cluster", cluster_digest(traces),
                     "tsv"),
            wire.emit_clusters_tsv(names, clusters))
        return clusters


class RecordingSearcher(StructureSearcher):
    def __init__(self, inner, fixture_path):
        self.inner = inner
        self.fixture_path = fixture_path

    def max_tm_to_database(self, trace, label=None):
        value = float(self.inner.max_tm_to_database(trace, label=label))
        _atomic_write(
            _fixture(self.fixture_path, "search", search_digest(trace), "txt"),
            wire.emit_tm(value))
        return value

"""Backend configuration: YAML document -> descriptors -> live suite.

The configuration file lists one descriptor per role::

    designer:         {kind: mock}
    designer_ca_only: {kind: mock}
    folder:           {kind: mock, noise_sigma: 0.1, seed: 7}
    clusterer:        {kind: mock, merge_threshold: 0.5}
    searcher:         {kind: mock, tm_value: 0.8}

kinds are ``mock`` (deterministic in-process stand-ins; for the
clusterer this is the internal single-linkage fallback), ``recorded``
(replay a fixture directory), and ``external`` (spawn a tool speaking
the scratch-directory protocol). Any backend can additionally record its
responses by setting ``record_to``.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import yaml

from ..errors import ConfigurationError
from .base import ROLES, BackendDescriptor, BackendSuite
from .external import (
    ExternalClusterer,
    ExternalDesigner,
    ExternalFolder,
    ExternalSearcher,
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

_FIELDS = {f.name for f in dataclasses.fields(BackendDescriptor)}

_REQUIRED_ROLES = ("designer", "folder", "clusterer", "searcher")


def descriptor_from_dict(role, raw):
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{role}: descriptor must be a mapping")
    unknown = set(raw) - _FIELDS
    if unknown:
        raise ConfigurationError(
            f"{role}: unknown descriptor fields {sorted(unknown)}")
    if "kind" not in raw:
        raise ConfigurationError(f"{role}: descriptor needs a 'kind'")
    try:
        return BackendDescriptor(**raw)
    except TypeError as exc:
        raise ConfigurationError(f"{role}: {exc}") from exc


def load_backend_config(path):
    """Parse a backend configuration file into per-role descriptors."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"backend configuration not found: {path}")
    try:
        document = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigurationError(f"{path}: expected a mapping of roles")
    unknown = set(document) - set(ROLES)
    if unknown:
        raise ConfigurationError(f"{path}: unknown roles {sorted(unknown)}")
    missing = [role for role in _REQUIRED_ROLES if role not in document]
    if missing:
        raise ConfigurationError(f"{path}: missing roles {missing}")
    return {role: descriptor_from_dict(role, raw)
            for role, raw in document.items()}


_MOCK_BUILDERS = {
    "designer": lambda d, seed: MockDesigner(),
    "designer_ca_only": lambda d, seed: MockDesigner(),
    "folder": lambda d, seed: MockFolder(
        noise_sigma=d.noise_sigma,
        seed=d.seed if d.seed is not None else seed,
        noise_free_motif=d.noise_free_motif),
    "clusterer": lambda d, seed: InternalClusterer(
        merge_threshold=d.merge_threshold),
    "searcher": lambda d, seed: MockSearcher(
        tm_value=d.tm_value, tm_values=d.tm_values or None),
}

_RECORDED = {
    "designer": RecordedDesigner,
    "designer_ca_only": RecordedDesigner,
    "folder": RecordedFolder,
    "clusterer": RecordedClusterer,
    "searcher": RecordedSearcher,
}

_EXTERNAL = {
    "designer": ExternalDesigner,
    "designer_ca_only": ExternalDesigner,
    "folder": ExternalFolder,
    "clusterer": ExternalClusterer,
    "searcher": ExternalSearcher,
}

_RECORDING = {
    "designer": RecordingDesigner,
    "designer_ca_only": RecordingDesigner,
    "folder": RecordingFolder,
    "clusterer": RecordingClusterer,
    "searcher": RecordingSearcher,
}


def build_backend(role, descriptor, default_seed=None):
    """Instantiate one backend from its descriptor.

    ``default_seed`` seeds stochastic mocks whose descriptor leaves
    ``seed`` unset; the harness varies it across replicates.
    """
    if role not in ROLES:
        raise ConfigurationError(f"unknown backend role {role!r}")
    if descriptor.kind == "mock":
        backend = _MOCK_BUILDERS[role](descriptor, default_seed)
    elif descriptor.kind == "recorded":
        backend = _RECORDED[role](descriptor.fixture_path)
    else:
        backend = _EXTERNAL[role](descriptor)
    if descriptor.record_to:
        backend = _RECORDING[role](backend, descriptor.record_to)
    return backend


def build_suite(descriptors, default_seed=None):
    """Build the full BackendSuite from per-role descriptors."""
    missing = [role for role in _REQUIRED_ROLES if role not in descriptors]
    if missing:
        raise ConfigurationError(f"missing backend roles {missing}")
    built = {role: build_backend(role, desc, default_seed)
             for role, desc in descriptors.items()}
    return BackendSuite(
        designer=built["designer"],
        designer_ca_only=built.get("designer_ca_only"),
        folder=built["folder"],
        clusterer=built["clusterer"],
        searcher=built["searcher"],
    )

"""Backend contract tests: mocks, recorded replay, external processes."""

import sys
import textwrap

import numpy as np
import pytest
import yaml

from motifeval._synthetic import (
    default_placements,
    helix_backbone,
    scaffold_embedding_motif,
)
from motifeval.backends import (
    BackendDescriptor,
    FoldContext,
    InternalClusterer,
    MockDesigner,
    MockFolder,
    MockSearcher,
    RecordedClusterer,
    RecordedDesigner,
    RecordedFolder,
    RecordedSearcher,
    RecordingClusterer,
    RecordingDesigner,
    RecordingFolder,
    RecordingSearcher,
    SequenceDesignRequest,
    build_backend,
    build_suite,
    cluster_structures,
    design_sequences,
    load_backend_config,
    predict_structure,
    search_novelty,
)
from motifeval.backends.external import ExternalClusterer, ExternalDesigner, \
    ExternalFolder, ExternalSearcher
from motifeval.errors import (
    BackendFailure,
    BackendTimeout,
    ConfigurationError,
    ProtocolViolation,
    ValidationError,
)
from motifeval.structure_io import Backbone

from conftest import make_toy_spec


@pytest.fixture
def scaffold(small_spec):
    return scaffold_embedding_motif(small_spec,
                                    default_placements(small_spec))


@pytest.fixture
def request_for(small_spec, scaffold):
    fixed = small_spec.fixed_positions(scaffold.placements)
    return SequenceDesignRequest(backbone=scaffold, fixed_positions=fixed)


def fold_context(spec, scaffold):
    from motifeval.metrics import motif_row_indices

    return FoldContext(designed=scaffold,
                       motif_rows=motif_row_indices(spec,
                                                    scaffold.placements))


class TestMockDesigner:
    def test_contract_alanine_elsewhere(self, request_for):
        result = design_sequences(MockDesigner(), request_for)
        assert len(result.sequences) == 8
        assert len(set(result.sequences)) == 1
        seq = result.sequences[0]
        for index, aa in request_for.fixed_positions.items():
            assert seq[index - 1] == aa
        free = [seq[i] for i in range(len(seq))
                if i + 1 not in request_for.fixed_positions]
        assert set(free) == {"A"}

    def test_fully_fixed_request(self, scaffold):
        fixed = {i: "WHY"[i % 3] for i in range(1, len(scaffold) + 1)}
        request = SequenceDesignRequest(backbone=scaffold,
                                        fixed_positions=fixed,
                                        num_sequences=3)
        result = design_sequences(MockDesigner(), request)
        expected = "".join(fixed[i] for i in range(1, len(scaffold) + 1))
        assert result.sequences == (expected,) * 3

    def test_fixed_position_bounds_validated(self, scaffold):
        with pytest.raises(ValidationError):
            SequenceDesignRequest(backbone=scaffold,
                                  fixed_positions={0: "A"})
        with pytest.raises(ValidationError):
            SequenceDesignRequest(backbone=scaffold,
                                  fixed_positions={1: "Z"})


class _ListDesigner:
    def __init__(self, sequences):
        self.sequences = sequences

    def design(self, request):
        return self.sequences


class TestProtocolEnforcement:
    def test_fixed_position_violation_rejected(self, request_for, scaffold):
        rogue = _ListDesigner(["A" * len(scaffold)] * 8)
        if request_for.fixed_positions:  # motif has non-alanine fixed types
            with pytest.raises(ProtocolViolation, match="fixed position"):
                design_sequences(rogue, request_for)

    def test_wrong_sequence_count(self, request_for, scaffold):
        good = MockDesigner().design(request_for)[0]
        with pytest.raises(ProtocolViolation, match="sequences"):
            design_sequences(_ListDesigner([good] * 7), request_for)

    def test_wrong_length(self, request_for, scaffold):
        good = MockDesigner().design(request_for)[0]
        with pytest.raises(ProtocolViolation, match="length"):
            design_sequences(_ListDesigner([good[:-1]] * 8), request_for)

    def test_non_canonical_letters(self, request_for, scaffold):
        bad = "X" * len(scaffold)
        with pytest.raises(ProtocolViolation, match="non-canonical"):
            design_sequences(_ListDesigner([bad] * 8), request_for)

    def test_prediction_length_checked(self, small_spec, scaffold):
        class Short:
            def predict(self, sequence, context=None):
                return Backbone(n=scaffold.n[:-1], ca=scaffold.ca[:-1],
                                c=scaffold.c[:-1])

        with pytest.raises(ProtocolViolation, match="residues"):
            predict_structure(Short(), "A" * len(scaffold))

    def test_tm_range_checked(self):
        class Wild:
            def max_tm_to_database(self, trace, label=None):
                return 1.7

        with pytest.raises(ProtocolViolation, match="TM-score"):
            search_novelty(Wild(), np.zeros((4, 3)))

    def test_empty_sequence_rejected(self):
        with pytest.raises(ValidationError):
            predict_structure(MockFolder(), "")


class TestMockFolder:
    def test_identity_echo(self, small_spec, scaffold):
        sequence = "A" * len(scaffold)
        out = predict_structure(MockFolder(), sequence,
                                fold_context(small_spec, scaffold))
        assert np.array_equal(out.ca, scaffold.ca)
        assert np.array_equal(out.n, scaffold.n)
        assert np.array_equal(out.c, scaffold.c)
        assert np.array_equal(out.o, scaffold.o)

    def test_requires_context(self):
        with pytest.raises(ConfigurationError):
            MockFolder().predict("AAAA", None)

    def test_seeded_noise_is_deterministic(self, small_spec, scaffold):
        sequence = "A" * len(scaffold)
        context = fold_context(small_spec, scaffold)
        one = MockFolder(noise_sigma=0.1, seed=42).predict(sequence, context)
        two = MockFolder(noise_sigma=0.1, seed=42).predict(sequence, context)
        other = MockFolder(noise_sigma=0.1, seed=43).predict(sequence,
                                                             context)
        assert np.array_equal(one.ca, two.ca)
        assert not np.array_equal(one.ca, other.ca)
        assert not np.array_equal(one.ca, scaffold.ca)

    def test_noise_free_motif_rows(self, small_spec, scaffold):
        sequence = "A" * len(scaffold)
        context = fold_context(small_spec, scaffold)
        out = MockFolder(noise_sigma=1.0, seed=1,
                         noise_free_motif=True).predict(sequence, context)
        rows = list(context.motif_rows)
        assert np.array_equal(out.ca[rows], scaffold.ca[rows])
        other_rows = [i for i in range(len(scaffold)) if i not in rows]
        assert not np.array_equal(out.ca[other_rows],
                                  scaffold.ca[other_rows])

    def test_ca_only_hint_fabricates_backbone(self, small_spec, scaffold):
        from motifeval.structure_io import ScaffoldRecord

        trace_only = ScaffoldRecord(scaffold_index=1, ca=scaffold.ca,
                                    placements=scaffold.placements)
        sequence = "A" * len(scaffold)
        out = MockFolder().predict(sequence,
                                   fold_context(small_spec, trace_only))
        assert np.array_equal(out.ca, scaffold.ca)
        assert len(out.n) == len(scaffold)


class TestMockSearcher:
    def test_self_hit_is_one(self):
        trace = helix_backbone(30)["CA"]
        searcher = MockSearcher(database=[trace])
        assert search_novelty(searcher, trace) == 1.0

    def test_empty_database_is_zero(self):
        searcher = MockSearcher(database=[])
        assert search_novelty(searcher, helix_backbone(10)["CA"]) == 0.0

    def test_constant_and_labels(self):
        searcher = MockSearcher(tm_value=0.8, tm_values={5: 0.3})
        trace = helix_backbone(10)["CA"]
        assert search_novelty(searcher, trace) == 0.8
        assert search_novelty(searcher, trace, label=5) == 0.3

    def test_unconfigured_searcher_fails(self):
        with pytest.raises(ConfigurationError):
            MockSearcher().max_tm_to_database(np.zeros((3, 3)))


def separated_folds(count_a=5, count_b=5, length=30):
    helix = helix_backbone(length)["CA"]
    line = np.stack([np.arange(length) * 3.8, np.zeros(length),
                     np.zeros(length)], axis=1)
    rng = np.random.default_rng(99)
    group_a = [helix + rng.normal(scale=0.05, size=helix.shape)
               for _ in range(count_a)]
    group_b = [line + rng.normal(scale=0.05, size=line.shape)
               for _ in range(count_b)]
    return group_a, group_b


class TestInternalClusterer:
    def test_single_structure(self):
        clusters = cluster_structures(InternalClusterer(),
                                      [helix_backbone(20)["CA"]])
        assert clusters == [[0]]

    def test_identical_structures_merge(self):
        trace = helix_backbone(25)["CA"]
        clusters = cluster_structures(InternalClusterer(),
                                      [trace, trace.copy()])
        assert clusters == [[0, 1]]

    def test_two_separated_folds(self):
        group_a, group_b = separated_folds()
        clusters = cluster_structures(InternalClusterer(),
                                      group_a + group_b)
        assert sorted(sorted(c) for c in clusters) == [
            [0, 1, 2, 3, 4], [5, 6, 7, 8, 9]]

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            InternalClusterer().cluster([helix_backbone(10)["CA"],
                                         helix_backbone(12)["CA"]])

    def test_threshold_validated(self):
        with pytest.raises(ConfigurationError):
            InternalClusterer(merge_threshold=0.0)


class TestRecordedBackends:
    def test_designer_record_replay(self, tmp_path, request_for):
        recording = RecordingDesigner(MockDesigner(), tmp_path)
        live = design_sequences(recording, request_for)
        replayed = design_sequences(RecordedDesigner(tmp_path), request_for)
        assert replayed.sequences == live.sequences

    def test_folder_record_replay(self, tmp_path, small_spec, scaffold):
        sequence = "A" * len(scaffold)
        context = fold_context(small_spec, scaffold)
        recording = RecordingFolder(MockFolder(), tmp_path)
        live = predict_structure(recording, sequence, context)
        replayed = predict_structure(RecordedFolder(tmp_path), sequence)
        # PDB text carries three decimals; the recorded copy is exact
        # because the source coordinates came from 3-decimal fixtures.
        assert np.allclose(replayed.ca, live.ca, atol=5e-4)
        assert len(replayed) == len(live)

    def test_clusterer_record_replay(self, tmp_path):
        group_a, group_b = separated_folds(3, 2)
        traces = group_a + group_b
        recording = RecordingClusterer(InternalClusterer(), tmp_path)
        live = cluster_structures(recording, traces)
        replayed = cluster_structures(RecordedClusterer(tmp_path), traces)
        assert replayed == live

    def test_searcher_record_replay(self, tmp_path):
        trace = helix_backbone(15)["CA"]
        recording = RecordingSearcher(MockSearcher(tm_value=0.77), tmp_path)
        live = search_novelty(recording, trace)
        replayed = search_novelty(RecordedSearcher(tmp_path), trace)
        assert replayed == live == 0.77

    def test_missing_fixture_is_configuration_error(self, tmp_path,
                                                    request_for):
        with pytest.raises(ConfigurationError, match="no recorded fixture"):
            design_sequences(RecordedDesigner(tmp_path), request_for)

    def test_replay_is_bitwise_stable(self, tmp_path, request_for):
        RecordingDesigner(MockDesigner(), tmp_path).design(request_for)
        one = RecordedDesigner(tmp_path).design(request_for)
        two = RecordedDesigner(tmp_path).design(request_for)
        assert one == two


# ---------------------------------------------------------------------------
# External process stubs
# ---------------------------------------------------------------------------

DESIGN_STUB = """\
import sys
kv = dict(t.split("=", 1) for t in sys.stdin.readline().split())
fixed = {}
for line in open(kv["fixed"]):
    idx, aa = line.split()
    fixed[int(idx)] = aa
length = sum(1 for line in open(kv["backbone"])
             if line.startswith("ATOM") and line[12:16].strip() == "CA")
seq = "".join(fixed.get(i, "G") for i in range(1, length + 1))
with open(kv["out"], "w") as fh:
    for i in range(int(kv["num_sequences"])):
        fh.write(f">d_{i}\\n{seq}\\n")
print(f"status=ok sequences={kv['out']}")
"""

VIOLATING_DESIGN_STUB = DESIGN_STUB.replace(
    'fixed.get(i, "G")', '"A"')

FOLD_STUB = """\
import sys
kv = dict(t.split("=", 1) for t in sys.stdin.readline().split())
seq = ""
for line in open(kv["sequence"]):
    line = line.strip()
    if line and not line.startswith(">"):
        seq += line
rows = []
serial = 1
for i in range(len(seq)):
    x = 3.8 * i
    for name, dx, dz in (("N", -1.2, 0.0), ("CA", 0.0, 0.0),
                         ("C", 1.2, 0.0), ("O", 1.2, 1.23)):
        name4 = name if len(name) >= 4 else f" {name:<3s}"
        rows.append(f"ATOM  {serial:5d} {name4} GLY A{i + 1:4d}    "
                    f"{x + dx:8.3f}{0.0:8.3f}{dz:8.3f}{1.0:6.2f}{0.0:6.2f}"
                    f"          {name[0]:>2s}  ")
        serial += 1
rows.append("TER")
rows.append("END   ")
with open(kv["out"], "w") as fh:
    fh.write("\\n".join(rows) + "\\n")
print(f"status=ok structure={kv['out']}")
"""

CLUSTER_STUB = """\
import os, sys
kv = dict(t.split("=", 1) for t in sys.stdin.readline().split())
paths = [line.strip() for line in open(kv["list"]) if line.strip()]
fail_at = int(os.environ.get("FAIL_AT_COUNT", "-1"))
if len(paths) == fail_at:
    print("prefilter died", file=sys.stderr)
    sys.exit(7)
with open(kv["out"], "w") as fh:
    for path in paths:
        fh.write(os.path.basename(path) + "\\t0\\n")
print(f"status=ok clusters={kv['out']}")
"""

SEARCH_STUB = """\
import sys
kv = dict(t.split("=", 1) for t in sys.stdin.readline().split())
with open(kv["out"], "w") as fh:
    fh.write("0.42\\n")
print(f"status=ok result={kv['out']}")
"""

FAILING_STUB = """\
import sys
print("tool exploded: missing weights", file=sys.stderr)
sys.exit(3)
"""

SLEEPY_STUB = """\
import time
time.sleep(30)
"""


def write_stub(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body), encoding="utf-8")
    return path


def external_descriptor(stub_path, **overrides):
    options = {"kind": "external",
               "command": (sys.executable, str(stub_path))}
    options.update(overrides)
    return BackendDescriptor(**options)


class TestExternalBackends:
    def test_designer_roundtrip(self, tmp_path, request_for):
        stub = write_stub(tmp_path, "design.py", DESIGN_STUB)
        designer = ExternalDesigner(external_descriptor(stub))
        result = design_sequences(designer, request_for)
        assert len(result.sequences) == 8
        for index, aa in request_for.fixed_positions.items():
            assert result.sequences[0][index - 1] == aa
        again = design_sequences(designer, request_for)
        assert again.sequences == result.sequences

    def test_designer_violation_caught(self, tmp_path, request_for):
        stub = write_stub(tmp_path, "bad_design.py", VIOLATING_DESIGN_STUB)
        designer = ExternalDesigner(external_descriptor(stub))
        if request_for.fixed_positions:
            with pytest.raises(ProtocolViolation):
                design_sequences(designer, request_for)

    def test_tool_failure_carries_diagnostics(self, tmp_path, request_for):
        stub = write_stub(tmp_path, "fail.py", FAILING_STUB)
        designer = ExternalDesigner(external_descriptor(stub))
        with pytest.raises(BackendFailure) as info:
            design_sequences(designer, request_for)
        assert info.value.returncode == 3
        assert "missing weights" in info.value.stderr

    def test_timeout(self, tmp_path, request_for):
        stub = write_stub(tmp_path, "sleep.py", SLEEPY_STUB)
        designer = ExternalDesigner(
            external_descriptor(stub, timeout_seconds=0.5))
        with pytest.raises(BackendTimeout):
            design_sequences(designer, request_for)

    def test_missing_executable_rejected_at_build(self):
        descriptor = BackendDescriptor(
            kind="external", command=("/no/such/tool",))
        with pytest.raises(ConfigurationError, match="not found"):
            ExternalDesigner(descriptor)

    def test_folder_roundtrip(self, tmp_path):
        stub = write_stub(tmp_path, "fold.py", FOLD_STUB)
        folder = ExternalFolder(external_descriptor(stub))
        out = predict_structure(folder, "GLYG")
        assert len(out) == 4
        assert out.ca[1, 0] == pytest.approx(3.8)

    def test_cluster_roundtrip(self, tmp_path):
        stub = write_stub(tmp_path, "cluster.py", CLUSTER_STUB)
        clusterer = ExternalClusterer(external_descriptor(stub))
        traces = [helix_backbone(12)["CA"] for _ in range(3)]
        assert cluster_structures(clusterer, traces) == [[0, 1, 2]]

    def test_cluster_decoy_workaround(self, tmp_path):
        stub = write_stub(tmp_path, "cluster.py", CLUSTER_STUB)
        clusterer = ExternalClusterer(external_descriptor(
            stub, environment={"FAIL_AT_COUNT": "4"}))
        traces = [helix_backbone(12)["CA"] for _ in range(4)]
        # Plain run fails (4 inputs); the decoy rerun sees 5 and succeeds;
        # the decoy никогда reaches the caller.
        clusters = cluster_structures(clusterer, traces)
        assert clusters == [[0, 1, 2, 3]]

    def test_cluster_failure_after_workaround_propagates(self, tmp_path):
        stub = write_stub(tmp_path, "fail.py", FAILING_STUB)
        clusterer = ExternalClusterer(external_descriptor(stub))
        with pytest.raises(BackendFailure):
            cluster_structures(clusterer, [helix_backbone(8)["CA"]])

    def test_search_roundtrip(self, tmp_path):
        stub = write_stub(tmp_path, "search.py", SEARCH_STUB)
        searcher = ExternalSearcher(external_descriptor(stub))
        assert search_novelty(searcher, helix_backbone(9)["CA"]) == 0.42


class TestBackendConfig:
    def test_load_and_build(self, tmp_path):
        config = tmp_path / "backends.yaml"
        config.write_text(yaml.safe_dump({
            "designer": {"kind": "mock"},
            "designer_ca_only": {"kind": "mock"},
            "folder": {"kind": "mock", "noise_sigma": 0.2, "seed": 5},
            "clusterer": {"kind": "mock", "merge_threshold": 0.6},
            "searcher": {"kind": "mock", "tm_value": 0.8},
        }), encoding="utf-8")
        descriptors = load_backend_config(config)
        assert descriptors["folder"].noise_sigma == 0.2
        suite = build_suite(descriptors)
        assert isinstance(suite.designer, MockDesigner)
        assert isinstance(suite.clusterer, InternalClusterer)
        assert suite.clusterer.merge_threshold == 0.6

    def test_unknown_role_rejected(self, tmp_path):
        config = tmp_path / "backends.yaml"
        config.write_text("oracle: {kind: mock}\n", encoding="utf-8")
        with pytest.raises(ConfigurationError, match="unknown roles"):
            load_backend_config(config)

    def test_unknown_field_rejected(self, tmp_path):
        config = tmp_path / "backends.yaml"
        config.write_text(yaml.safe_dump({
            "designer": {"kind": "mock", "tempratur": 1.0},
            "folder": {"kind": "mock"},
            "clusterer": {"kind": "mock"},
            "searcher": {"kind": "mock", "tm_value": 0.1},
        }), encoding="utf-8")
        with pytest.raises(ConfigurationError, match="unknown descriptor"):
            load_backend_config(config)

    def test_missing_role_rejected(self, tmp_path):
        config = tmp_path / "backends.yaml"
        config.write_text("designer: {kind: mock}\n", encoding="utf-8")
        with pytest.raises(ConfigurationError, match="missing roles"):
            load_backend_config(config)

    def test_recorded_requires_fixture_path(self):
        with pytest.raises(ValidationError):
            BackendDescriptor(kind="recorded")

    def test_record_to_wraps_backend(self, tmp_path, request_for):
        descriptor = BackendDescriptor(kind="mock",
                                       record_to=str(tmp_path / "fx"))
        designer = build_backend("designer", descriptor)
        design_sequences(designer, request_for)
        replay = build_backend("designer", BackendDescriptor(
            kind="recorded", fixture_path=str(tmp_path / "fx")))
        assert design_sequences(replay, request_for).sequences == \
            design_sequences(designer, request_for).sequences

    def test_ca_only_scaffold_needs_dedicated_designer(self, small_spec):
        from motifeval.backends import BackendSuite
        from motifeval.structure_io import ScaffoldRecord

        trace = helix_backbone(small_spec.scaffold_length)["CA"]
        record = ScaffoldRecord(scaffold_index=1, ca=trace,
                                placements=default_placements(small_spec))
        suite = BackendSuite(designer=MockDesigner(), folder=MockFolder(),
                             clusterer=InternalClusterer(),
                             searcher=MockSearcher(tm_value=0.5))
        with pytest.raises(ValidationError, match="designer_ca_only"):
            suite.designer_for(record)

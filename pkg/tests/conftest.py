"""Shared fixtures: bundled specs, synthetic cases, mock suites."""

import numpy as np
import pytest

from motifeval._synthetic import (
    default_placements,
    helix_backbone,
    scaffold_embedding_motif,
)
from motifeval.backends import BackendSuite, InternalClusterer, MockDesigner, \
    MockFolder, MockSearcher
from motifeval.data import load_bundled_spec
from motifeval.structure_io import (
    MotifResidue,
    MotifSegment,
    MotifSpec,
    ScaffoldSet,
    write_placement_metadata,
    write_scaffold_pdb,
)


@pytest.fixture(scope="session")
def example_spec():
    """The curated reference example (case 27)."""
    return load_bundled_spec("27_4XOJ.pdb")


@pytest.fixture(scope="session")
def small_spec():
    """Two-segment toy problem small enough for fast end-to-end runs."""
    return make_toy_spec()


def make_toy_spec(scaffold_length=40, sizes=(3, 2), redesign=((1,), ())):
    """Build a compact synthetic MotifSpec with helical segments.

    ``redesign`` lists 0-based residue offsets per segment that become
    UNK positions.
    """
    aa_cycle = ("HIS", "ASP", "SER", "GLY", "LEU", "THR", "VAL")
    segments = []
    placement = [4]
    next_aa = 0
    for seg_pos, size in enumerate(sizes):
        bb = helix_backbone(size)
        shift = np.array([15.0 * seg_pos, -6.0 * seg_pos, 3.0 * seg_pos])
        residues = []
        for offset in range(size):
            atoms = {name: np.round(bb[name][offset] + shift, 3)
                     for name in ("N", "CA", "C", "O")}
            if offset in redesign[seg_pos]:
                residues.append(MotifResidue("UNK", atoms))
            else:
                residues.append(MotifResidue(aa_cycle[next_aa % len(aa_cycle)],
                                             atoms))
                next_aa += 1
        segments.append(MotifSegment(segment_id="AB"[seg_pos],
                                     residues=tuple(residues)))
        placement.append("AB"[seg_pos])
        placement.append(6)
    return MotifSpec(reference_pdb_id="TOY1", segments=tuple(segments),
                     scaffold_length=scaffold_length,
                     reference_placement=tuple(placement))


def make_embedded_set(spec, count=ScaffoldSet.REQUIRED_COUNT, displace=None,
                      displace_indices=()):
    """ScaffoldSet whose members embed the motif verbatim.

    ``displace`` (segment_id -> 3-vector) breaks the geometry for the
    scaffolds listed in ``displace_indices``.
    """
    placements = default_placements(spec)
    scaffolds = []
    for index in range(1, count + 1):
        bad = displace if index in displace_indices else None
        scaffolds.append(scaffold_embedding_motif(
            spec, placements, scaffold_index=index, displace=bad))
    return ScaffoldSet(problem_id="toy", scaffolds=tuple(scaffolds))


def write_set_to_dir(scaffold_set, directory, sequence=None):
    """Materialize a ScaffoldSet as PDB files plus metadata.tsv."""
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for record in scaffold_set.scaffolds:
        name = f"scaffold_{record.scaffold_index:03d}.pdb"
        (directory / name).write_bytes(
            write_scaffold_pdb(record, sequence=sequence))
        rows.append((name, record.placements))
    (directory / "metadata.tsv").write_bytes(write_placement_metadata(rows))
    return directory


def mock_suite(tm_value=0.8, tm_values=None, noise_sigma=0.0, seed=0,
               noise_free_motif=False, merge_threshold=0.5):
    return BackendSuite(
        designer=MockDesigner(),
        designer_ca_only=MockDesigner(),
        folder=MockFolder(noise_sigma=noise_sigma, seed=seed,
                          noise_free_motif=noise_free_motif),
        clusterer=InternalClusterer(merge_threshold=merge_threshold),
        searcher=MockSearcher(tm_value=tm_value, tm_values=tm_values),
    )

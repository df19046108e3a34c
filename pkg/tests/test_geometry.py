"""Superposition kernel tests against independent oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motifeval._kernels import _kabsch_py, kernel_backend
from motifeval._synthetic import default_placements, scaffold_embedding_motif
from motifeval.errors import (
    DimensionError,
    UnderDeterminedError,
    ValidationError,
)
from motifeval.geometry import (
    Superposition,
    aligned_rmsd,
    compute_aligned_rmsd,
    motif_rmsd,
    sc_rmsd,
)
from motifeval.structure_io import Backbone

from conftest import make_toy_spec
from oracles import (
    GRID_RESOLUTION,
    brute_force_min_rmsd,
    plain_aligned_rmsd,
    random_proper_rotation,
)

# Chiral 4-point set against its mirror image; expected value derived
# with the brute-force rotation-grid oracle (frozen).
CHIRAL_POINTS = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                          [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
CHIRAL_MIRROR_RMSD = 0.5


def random_points(rng, count=None):
    n = int(rng.integers(3, 40)) if count is None else count
    return rng.normal(size=(n, 3)) * rng.uniform(1.0, 6.0)


class TestComputeAlignedRmsd:
    def test_identity_input_gives_zero(self):
        rng = np.random.default_rng(1)
        pts = random_points(rng)
        sup = compute_aligned_rmsd(pts, pts)
        assert sup.rmsd < 1e-12
        assert np.allclose(sup.transform(pts), pts, atol=1e-9)

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            pts = random_points(rng)
            rot = random_proper_rotation(rng)
            moved = pts @ rot.T + rng.normal(size=3) * 10
            assert compute_aligned_rmsd(pts, moved).rmsd <= 1e-9
            assert compute_aligned_rmsd(moved, pts).rmsd <= 1e-9

    def test_chiral_mirror_matches_grid_oracle(self):
        mirror = CHIRAL_POINTS.copy()
        mirror[:, 0] *= -1
        sup = compute_aligned_rmsd(CHIRAL_POINTS, mirror)
        assert sup.rmsd == pytest.approx(CHIRAL_MIRROR_RMSD,
                                         abs=GRID_RESOLUTION)
        assert np.linalg.det(sup.rotation) == pytest.approx(1.0, abs=1e-9)
        oracle = brute_force_min_rmsd(CHIRAL_POINTS, mirror, rounds=40)
        assert sup.rmsd == pytest.approx(oracle, abs=GRID_RESOLUTION)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            p = random_points(rng)
            q = rng.normal(size=p.shape) * 4
            assert compute_aligned_rmsd(p, q).rmsd == pytest.approx(
                compute_aligned_rmsd(q, p).rmsd, abs=1e-9)

    def test_rotation_always_proper_even_for_mirrors(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            p = random_points(rng)
            q = p.copy()
            q[:, rng.integers(3)] *= -1
            sup = compute_aligned_rmsd(p, q)
            assert np.linalg.det(sup.rotation) == pytest.approx(1.0, abs=1e-9)
            assert np.allclose(sup.rotation.T @ sup.rotation, np.eye(3),
                               atol=1e-9)

    def test_matches_grid_oracle_on_random_sets(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            p = random_points(rng)
            q = rng.normal(size=p.shape) * rng.uniform(1, 6)
            fast = aligned_rmsd(p, q)
            slow = brute_force_min_rmsd(p, q)
            assert slow >= fast - 1e-9
            assert slow - fast <= GRID_RESOLUTION

    def test_degenerate_collinear_and_coplanar(self):
        line = np.stack([np.arange(6.0), np.zeros(6), np.zeros(6)], axis=1)
        sup = compute_aligned_rmsd(line, line[::-1].copy())
        assert sup.rmsd < 1e-9
        assert np.linalg.det(sup.rotation) == pytest.approx(1.0, abs=1e-9)

        rng = np.random.default_rng(6)
        plane = rng.normal(size=(8, 3))
        plane[:, 2] = 0.0
        mirrored = plane.copy()
        mirrored[:, 0] *= -1
        sup = compute_aligned_rmsd(plane, mirrored)
        # A coplanar set and its in-plane mirror are related by a proper
        # rotation (flip through the plane), so the minimum is zero.
        assert sup.rmsd < 1e-9
        assert np.linalg.det(sup.rotation) == pytest.approx(1.0, abs=1e-9)

    def test_dimension_errors(self):
        rng = np.random.default_rng(7)
        with pytest.raises(DimensionError):
            compute_aligned_rmsd(rng.normal(size=(5, 3)),
                                 rng.normal(size=(6, 3)))
        with pytest.raises(UnderDeterminedError):
            compute_aligned_rmsd(rng.normal(size=(2, 3)),
                                 rng.normal(size=(2, 3)))
        with pytest.raises(ValidationError):
            bad = rng.normal(size=(5, 3))
            bad[2, 1] = np.nan
            compute_aligned_rmsd(bad, rng.normal(size=(5, 3)))

    def test_translation_completes_the_motion(self):
        rng = np.random.default_rng(8)
        p = random_points(rng)
        rot = random_proper_rotation(rng)
        q = p @ rot.T + np.array([4.0, -2.0, 9.0])
        sup = compute_aligned_rmsd(p, q)
        assert np.allclose(sup.transform(p), q, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_invariance_property_under_random_rigid_motions(seed):
    rng = np.random.default_rng(seed)
    p = random_points(rng)
    q = rng.normal(size=p.shape) * 3
    base = aligned_rmsd(p, q)
    rot = random_proper_rotation(rng)
    shift = rng.normal(size=3) * 20
    assert aligned_rmsd(p @ rot.T + shift, q) == pytest.approx(base, abs=1e-9)
    assert aligned_rmsd(p, q @ rot.T + shift) == pytest.approx(base, abs=1e-9)


class TestSuperpositionType:
    def test_rejects_improper_rotation(self):
        reflection = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(ValidationError):
            Superposition(rotation=reflection, translation=np.zeros(3),
                          rmsd=0.0)

    def test_rejects_negative_rmsd(self):
        with pytest.raises(ValidationError):
            Superposition(rotation=np.eye(3), translation=np.zeros(3),
                          rmsd=-0.1)


class TestMotifRmsd:
    def test_verbatim_embedding_is_zero(self, small_spec):
        placements = default_placements(small_spec)
        scaffold = scaffold_embedding_motif(small_spec, placements)
        predicted = scaffold.backbone()
        assert motif_rmsd(predicted, small_spec, placements) < 1e-9

    def test_rigid_motion_of_prediction_is_zero(self, small_spec):
        placements = default_placements(small_spec)
        scaffold = scaffold_embedding_motif(small_spec, placements)
        rng = np.random.default_rng(9)
        rot = random_proper_rotation(rng)
        shift = rng.normal(size=3) * 8
        moved = Backbone(
            n=scaffold.n @ rot.T + shift,
            ca=scaffold.ca @ rot.T + shift,
            c=scaffold.c @ rot.T + shift,
        )
        assert motif_rmsd(moved, small_spec, placements) < 1e-9

    def test_displaced_segment_matches_plain_recomputation(self, small_spec):
        placements = default_placements(small_spec)
        displaced = scaffold_embedding_motif(
            small_spec, placements, displace={"B": (2.0, 0.0, 0.0)},
        )
        predicted = displaced.backbone()
        value = motif_rmsd(predicted, small_spec, placements)

        # Independent recomputation straight from the definitions.
        rows = []
        for seg in small_spec.segments:
            start = placements[seg.segment_id]
            for offset in range(len(seg)):
                row = start + offset - 1
                rows.extend([predicted.n[row], predicted.ca[row],
                             predicted.c[row]])
        expected = plain_aligned_rmsd(
            np.asarray(rows), small_spec.motif_backbone_coords())
        assert value == pytest.approx(expected, abs=1e-9)
        assert value > 0.1  # the 2 A shift must be visible


class TestScRmsd:
    def test_identical_trace_is_zero(self, small_spec):
        scaffold = scaffold_embedding_motif(small_spec,
                                            default_placements(small_spec))
        assert sc_rmsd(scaffold, scaffold.backbone()) < 1e-12

    def test_rigid_motion_is_zero(self, small_spec):
        scaffold = scaffold_embedding_motif(small_spec,
                                            default_placements(small_spec))
        rng = np.random.default_rng(10)
        rot = random_proper_rotation(rng)
        moved = Backbone(
            n=scaffold.n @ rot.T,
            ca=scaffold.ca @ rot.T + 5.0,
            c=scaffold.c @ rot.T,
        )
        assert sc_rmsd(scaffold, moved) <= 1e-9

    def test_gaussian_noise_band(self, small_spec):
        # E[aligned rmsd] for iid per-atom noise is close to sigma * sqrt(3);
        # the band is generous enough for alignment shrinkage.
        sigma = 0.5
        lo, hi = 0.6 * sigma * np.sqrt(3), 1.4 * sigma * np.sqrt(3)
        scaffold = scaffold_embedding_motif(small_spec,
                                            default_placements(small_spec))
        rng = np.random.default_rng(11)
        for _ in range(100):
            noisy = Backbone(
                n=scaffold.n,
                ca=scaffold.ca + rng.normal(scale=sigma,
                                            size=scaffold.ca.shape),
                c=scaffold.c,
            )
            value = sc_rmsd(scaffold, noisy)
            assert lo <= value <= hi

    def test_length_mismatch(self, small_spec):
        scaffold = scaffold_embedding_motif(small_spec,
                                            default_placements(small_spec))
        shorter = Backbone(n=scaffold.n[:-1], ca=scaffold.ca[:-1],
                           c=scaffold.c[:-1])
        with pytest.raises(DimensionError):
            sc_rmsd(scaffold, shorter)


class TestKernelTwins:
    @pytest.mark.skipif(kernel_backend() != "cython",
                        reason="compiled kernel not built")
    def test_compiled_matches_pure_python(self):
        from motifeval._kernels import _kabsch_cy

        rng = np.random.default_rng(12)
        for _ in range(100):
            p = random_points(rng)
            q = rng.normal(size=p.shape) * 4
            r_cy, rot_cy = _kabsch_cy.superpose(p, q)
            r_py, rot_py = _kabsch_py.superpose(p, q)
            assert r_cy == pytest.approx(r_py, abs=1e-10)
            assert np.allclose(rot_cy, rot_py, atol=1e-8)

        stack = rng.normal(size=(7, 25, 3)).cumsum(axis=1)
        assert np.allclose(_kabsch_cy.tm_like_matrix(stack, 2.0),
                           _kabsch_py.tm_like_matrix(stack, 2.0), atol=1e-10)

"""Rigid superposition and aligned RMSD.

The core operation centers both coordinate lists, takes the SVD of their
cross-covariance, corrects a reflection through the least-significant
singular direction (S = diag(1, 1, sign(det(U V^T)))), and applies
R = V S U^T. The returned rotation is therefore always proper, even when
the unconstrained optimum would be a mirror image. All computation is in
double precision.

Degenerate inputs (collinear or coplanar point sets) never raise: when
the smallest singular value is zero the reflection ambiguity resolves
toward determinant +1, which is the correction formula's natural
behavior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import aligned_sq_dists, superpose
from .errors import DimensionError, UnderDeterminedError, ValidationError
from .structure_io import validate_placements

ORTHOGONALITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Superposition:
    """Optimal proper rigid motion mapping one point set onto another.

    ``transform`` applies x -> rotation @ x + translation; ``rmsd`` is the
    root-mean-squared distance after that motion.
    """

    rotation: np.ndarray
    translation: np.ndarray
    rmsd: float

    def __post_init__(self):
        r = self.rotation
        if r.shape != (3, 3):
            raise ValidationError("rotation must be 3x3")
        if not np.allclose(r.T @ r, np.eye(3), atol=ORTHOGONALITY_TOL):
            raise ValidationError("rotation is not orthogonal")
        if abs(np.linalg.det(r) - 1.0) > ORTHOGONALITY_TOL:
            raise ValidationError("rotation determinant is not +1")
        if self.rmsd < 0.0:
            raise ValidationError("rmsd must be nonnegative")

    def transform(self, points):
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.rotation.T + self.translation


def as_coord_array(points, name):
    """Validate an (L, 3) coordinate list: nonempty, finite doubles."""
    arr = np.ascontiguousarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise DimensionError(f"{name}: expected an (L, 3) array, "
                             f"got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise DimensionError(f"{name}: empty coordinate list")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: non-finite coordinates")
    return arr


def compute_aligned_rmsd(pred, design):
    """Minimum RMSD between paired point sets over proper rigid motions.

    Args:
        pred: (L, 3) coordinates to be moved.
        design: (L, 3) reference coordinates.

    Returns:
        Superposition with the optimal rotation, the translation that
        completes the motion (x -> R x + t) and the minimized RMSD.
    """
    p = as_coord_array(pred, "pred")
    q = as_coord_array(design, "design")
    if p.shape[0] != q.shape[0]:
        raise DimensionError(
            f"point counts differ: {p.shape[0]} vs {q.shape[0]}")
    if p.shape[0] < 3:
        raise UnderDeterminedError(
            f"need at least 3 points for a rigid superposition, "
            f"got {p.shape[0]}")
    rmsd, rotation = superpose(p, q)
    translation = q.mean(axis=0) - rotation @ p.mean(axis=0)
    return Superposition(rotation=rotation, translation=translation,
                         rmsd=rmsd)


def aligned_rmsd(pred, design):
    """RMSD only; same validation as compute_aligned_rmsd."""
    return compute_aligned_rmsd(pred, design).rmsd


def aligned_distances(pred, design):
    """Per-point distances after optimal proper superposition."""
    p = as_coord_array(pred, "pred")
    q = as_coord_array(design, "design")
    if p.shape[0] != q.shape[0]:
        raise DimensionError(
            f"point counts differ: {p.shape[0]} vs {q.shape[0]}")
    return np.sqrt(aligned_sq_dists(p, q))


def motif_rmsd(predicted, spec, placements):
    """Aligned RMSD between the spec's motif and a predicted structure.

    Extracts N/CA/C at the placement indices, concatenates across
    segments (segment order, residue order, N->CA->C) and performs one
    joint alignment over all segments against the spec's motif atoms.
    """
    validate_placements(placements, spec, len(predicted))
    rows = []
    for seg in spec.segments:
        start = placements[seg.segment_id]
        for offset in range(len(seg)):
            row = start + offset - 1
            rows.append(predicted.n[row])
            rows.append(predicted.ca[row])
            rows.append(predicted.c[row])
    pred_atoms = np.asarray(rows, dtype=np.float64)
    return compute_aligned_rmsd(pred_atoms, spec.motif_backbone_coords()).rmsd


def sc_rmsd(designed, predicted):
    """Self-consistency RMSD: aligned CA-only RMSD over all residues."""
    if len(designed) != len(predicted):
        raise DimensionError(
            f"designed scaffold has {len(designed)} residues, prediction "
            f"has {len(predicted)}")
    return compute_aligned_rmsd(predicted.ca, designed.ca).rmsd

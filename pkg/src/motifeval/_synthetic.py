"""Synthetic backbone construction for fixtures, tests, and demos.

Idealized alpha-helix traces with plausible N/CA/C/O geometry. Nothing
here aims for physical accuracy; the consumers only need deterministic,
finite, chain-like coordinates that survive the PDB's 3-decimal text
round trip.
"""

from __future__ import annotations

import numpy as np

from .structure_io import ScaffoldRecord, validate_placements

RISE_PER_RESIDUE = 1.5
TURN_PER_RESIDUE = np.deg2rad(100.0)
CA_RADIUS = 2.27


def _ring(count, radius, phase, z_offset, start=0):
    steps = np.arange(start, start + count)
    angles = steps * TURN_PER_RESIDUE + phase
    return np.stack([
        radius * np.cos(angles),
        radius * np.sin(angles),
        steps * RISE_PER_RESIDUE + z_offset,
    ], axis=1)


def helix_backbone(length, start=0):
    """N/CA/C/O arrays for an idealized helical stretch.

    ``start`` offsets the helix parameterization so that consecutive
    stretches generated with consecutive starts join into one chain.
    """
    ca = _ring(length, CA_RADIUS, 0.0, 0.0, start=start)
    n = _ring(length, 1.80, -0.50, -0.90, start=start)
    c = _ring(length, 2.00, 0.55, 0.80, start=start)
    o = c + np.array([0.0, 0.0, 1.23])
    return {"N": n, "CA": ca, "C": c, "O": o}


def rotation_about_z(angle):
    s, c = np.sin(angle), np.cos(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def scaffold_embedding_motif(spec, placements, scaffold_index=1,
                             length=None, displace=None):
    """Full-backbone scaffold whose motif rows carry the spec's coordinates.

    Filler residues come from an idealized helix; each motif residue's
    N/CA/C (and O when present, else the helix O) is copied verbatim into
    its placement row. ``displace`` optionally maps segment_id to a (3,)
    translation applied to that whole segment, for constructing
    known-broken geometries.
    """
    length = length or spec.scaffold_length
    validate_placements(placements, spec, length)
    filler = helix_backbone(length)
    arrays = {name: filler[name].copy() for name in ("N", "CA", "C", "O")}
    for seg in spec.segments:
        start = placements[seg.segment_id]
        offset_vec = np.zeros(3)
        if displace and seg.segment_id in displace:
            offset_vec = np.asarray(displace[seg.segment_id], dtype=float)
        for offset, res in enumerate(seg.residues):
            row = start + offset - 1
            for name in ("N", "CA", "C", "O"):
                if name in res.atoms:
                    arrays[name][row] = res.atoms[name] + offset_vec
    return ScaffoldRecord(
        scaffold_index=scaffold_index,
        ca=arrays["CA"],
        n=arrays["N"],
        c=arrays["C"],
        o=arrays["O"],
        placements=dict(placements),
    )


def default_placements(spec, gap=3):
    """Left-packed non-overlapping placements with a fixed gap."""
    placements = {}
    cursor = 1 + gap
    for seg in spec.segments:
        placements[seg.segment_id] = cursor
        cursor += len(seg) + gap
    if cursor - gap - 1 > spec.scaffold_length:
        raise ValueError("segments do not fit with the requested gap")
    return placements

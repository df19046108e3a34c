#!/usr/bin/env python3
"""Regenerate the bundled motif specification fixtures.

One file per benchmark case under src/motifeval/data/motifs/. Case 27
ships the curated reference example verbatim; the other cases carry the
published case registry (reference PDB id, segment ranges, redesignable
positions, scaffold length) with synthetic helical coordinates, since
re-curating motif geometry from the Protein Data Bank is out of scope.

Usage: python3 scripts/gen_motif_fixtures.py
"""

import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from motifeval._synthetic import helix_backbone, rotation_about_z  # noqa: E402
from motifeval.structure_io import (  # noqa: E402
    AA1_TO_AA3,
    MotifResidue,
    MotifSegment,
    MotifSpec,
    parse_motif_spec,
    write_motif_spec,
)

# case number, reference PDB id, scaffold length, motif residues,
# redesignable positions (reference numbering)
CASES = [
    (1, "1LDB", 125, "A186-206", ""),
    (2, "1ITU", 150, "A124-147", ""),
    (3, "2CGA", 125, "A184-194", ""),
    (4, "5WN9", 75, "A170-189", "A170-175;A188-189"),
    (5, "5ZE9", 100, "A229-243", ""),
    (6, "6E6R", 75, "A25-35", "A25-35"),
    (7, "6E6R", 200, "A25-35", "A25-35"),
    (8, "7AD5", 125, "A99-113", ""),
    (9, "7CG5", 125, "A6-20", ""),
    (10, "7WRK", 125, "A80-94", ""),
    (11, "3TQB", 125, "A37-51;A65-79", ""),
    (12, "4JHW", 100, "F63-69;F196-212", "F63;F69;F196;F198;F203;F211-212"),
    (13, "4JHW", 200, "F63-69;F196-212", "F63;F69;F196;F198;F203;F211-212"),
    (14, "5IUS", 100, "A63-82;A119-140",
     "A63;A65;A67;A69;A71-72;A76;A79-80;A82;A119-123;A125;A127;A129-130;"
     "A133;A135;A137-138;A140"),
    (15, "7A8S", 100, "A41-55;A72-86", ""),
    (16, "7BNY", 125, "A83-97;A111-125", ""),
    (17, "7DGW", 125, "A22-36;A70-84", ""),
    (18, "7MQQ", 100, "A80-94;A115-129", ""),
    (19, "7MQQ", 200, "A80-94;A115-129", ""),
    (20, "7UWL", 175, "E63-73;E101-111", "E63-73;E101-103;E105-111"),
    (21, "1B73", 125, "A7-8;A70;A178-180", "A179"),
    (22, "1BCF", 125, "A18-25;A47-54;A92-99;A123-130",
     "A19-25;A47-50;A52-53;A92-93;A95-99;A123-126;A128-129"),
    (23, "1MPY", 125, "A153;A199;A214;A246;A255;A265", ""),
    (24, "1QY3", 225, "A58-71;A96;A222", "A58-61;A63-64;A68-71"),
    (25, "2RKX", 225, "A9-11;A48-50;A101;A128;A169;A176;A201;A222-224",
     "A10;A49;A223"),
    (26, "3B5V", 200, "A51-53;A81;A110;A131;A159;A180-184;A210-211;A231-233",
     "A52;A181;A183;A232"),
    (27, "4XOJ", 150, "A55;A99;A190-192", "A191"),
    (28, "5YUI", 75, "A93-97;A118-120;A198-200", "A93;A95;A97;A118;A120"),
    (29, "6CPA", 200, "A69-72;A127;A196;A248;A270", "A70-71"),
    (30, "7UWL", 175, "E63-73;E101-111;E132-142;E165-174",
     "E63-73;E101-103;E105-111;E132-142;E165-174"),
]

# Curated reference example for case 27 (trypsin catalytic triad plus
# oxyanion hole). Stored as structured atom data and emitted through the
# package writer, which is pinned to the published file layout bit for
# bit; a text literal would silently lose its significant trailing
# whitespace under editors.
CASE_27_PLACEMENT = (39, "A", 43, "B", 90, "C", 46)
CASE_27_RESIDUES = [
    ("A", "HIS", [
        ("N", -2.924, -3.724, 2.088), ("CA", -1.871, -3.781, 3.096),
        ("C", -1.802, -2.517, 3.945), ("O", -1.071, -2.501, 4.936),
        ("CB", -0.502, -4.109, 2.485), ("CG", 0.119, -2.995, 1.722),
        ("ND1", 0.033, -2.839, 0.365), ("CD2", 0.846, -1.950, 2.150),
        ("CE1", 0.703, -1.723, 0.052), ("NE2", 1.215, -1.148, 1.102),
    ]),
    ("B", "ASP", [
        ("N", -4.487, -6.677, -3.743), ("CA", -4.063, -5.623, -2.793),
        ("C", -4.922, -4.362, -3.009), ("O", -4.495, -3.371, -3.582),
        ("CB", -2.583, -5.335, -2.926), ("CG", -2.042, -4.468, -1.808),
        ("OD1", -2.752, -4.286, -0.791), ("OD2", -0.880, -4.003, -1.955),
    ]),
    ("C", "GLY", [
        ("N", 5.361, 5.214, 1.901), ("CA", 4.400, 6.252, 2.188),
        ("C", 3.501, 6.577, 1.006), ("O", 2.479, 7.251, 1.188),
    ]),
    ("C", "UNK", [
        ("N", 3.821, 6.075, -0.188), ("CA", 2.965, 6.247, -1.351),
        ("C", 1.905, 5.154, -1.494), ("O", 0.929, 5.369, -2.228),
    ]),
    ("C", "SER", [
        ("N", 2.100, 4.015, -0.827), ("CA", 1.156, 2.896, -0.909),
        ("C", -0.271, 3.352, -0.782), ("O", -0.604, 4.170, 0.069),
        ("CB", 1.374, 1.891, 0.223), ("OG", 2.357, 0.946, -0.128),
    ]),
]


def build_case_27():
    segments = []
    current_chain = None
    residues = []
    for chain, res_name, atom_rows in CASE_27_RESIDUES:
        if chain != current_chain:
            if residues:
                segments.append(MotifSegment(segment_id=current_chain,
                                             residues=tuple(residues)))
            current_chain = chain
            residues = []
        atoms = {name: np.array([x, y, z]) for name, x, y, z in atom_rows}
        residues.append(MotifResidue(res_name, atoms))
    segments.append(MotifSegment(segment_id=current_chain,
                                 residues=tuple(residues)))
    return MotifSpec(reference_pdb_id="4XOJ", segments=tuple(segments),
                     scaffold_length=150,
                     reference_placement=CASE_27_PLACEMENT)

SEGMENT_IDS = "ABCDEFGH"
AA_CHOICES = "ACDEFGHIKLMNPQRSTVWY"


def parse_ranges(text):
    """'A37-51;A65-79' -> [(37, 51), (65, 79)] (chain letter dropped)."""
    ranges = []
    for token in text.split(";"):
        token = token.strip()
        body = token[1:]  # leading chain letter
        if "-" in body:
            lo, hi = body.split("-")
            ranges.append((int(lo), int(hi)))
        else:
            ranges.append((int(body), int(body)))
    return ranges


def parse_redesign(text):
    indices = set()
    if not text:
        return indices
    for lo, hi in parse_ranges(text):
        indices.update(range(lo, hi + 1))
    return indices


def cb_position(ca):
    radial = np.array([ca[0], ca[1], 0.0])
    norm = np.linalg.norm(radial)
    unit = radial / norm if norm > 1e-6 else np.array([1.0, 0.0, 0.0])
    return ca + unit * 1.5 + np.array([0.0, 0.0, 0.5])


def build_case(number, pdb_id, length, motif_text, redesign_text):
    ranges = parse_ranges(motif_text)
    redesign = parse_redesign(redesign_text)
    rng = np.random.default_rng(number * 1009 + 7)

    segments = []
    for seg_pos, (lo, hi) in enumerate(ranges):
        seg_len = hi - lo + 1
        bb = helix_backbone(seg_len)
        rot = rotation_about_z(np.deg2rad(40.0 * seg_pos + 15.0 * number))
        shift = np.array([18.0 * seg_pos, 7.0 * (seg_pos % 3), -4.0 * seg_pos])
        residues = []
        for offset in range(seg_len):
            ref_index = lo + offset
            atoms = {name: np.round(bb[name][offset] @ rot.T + shift, 3)
                     for name in ("N", "CA", "C", "O")}
            if ref_index in redesign:
                residues.append(MotifResidue("UNK", atoms))
                continue
            aa1 = AA_CHOICES[rng.integers(len(AA_CHOICES))]
            aa3 = AA1_TO_AA3[aa1]
            if aa3 != "GLY":
                atoms["CB"] = np.round(cb_position(atoms["CA"]), 3)
            residues.append(MotifResidue(aa3, atoms))
        segments.append(MotifSegment(segment_id=SEGMENT_IDS[seg_pos],
                                     residues=tuple(residues)))

    placement = [ranges[0][0] - 1]
    for pos in range(len(ranges) - 1):
        placement.append(SEGMENT_IDS[pos])
        placement.append(ranges[pos + 1][0] - ranges[pos][1] - 1)
    placement.append(SEGMENT_IDS[len(ranges) - 1])
    placement.append(25)  # synthetic tail; reference numbering is not modeled

    return MotifSpec(reference_pdb_id=pdb_id, segments=tuple(segments),
                     scaffold_length=length,
                     reference_placement=tuple(placement))


def main():
    out_dir = REPO / "src" / "motifeval" / "data" / "motifs"
    out_dir.mkdir(parents=True, exist_ok=True)
    for number, pdb_id, length, motif_text, redesign_text in CASES:
        path = out_dir / f"{number:02d}_{pdb_id}.pdb"
        if number == 27:
            data = write_motif_spec(build_case_27())
        else:
            spec = build_case(number, pdb_id, length, motif_text,
                              redesign_text)
            data = write_motif_spec(spec)
        parsed = parse_motif_spec(data)  # regenerated files must validate
        assert parse_motif_spec(write_motif_spec(parsed)) == parsed
        path.write_bytes(data)
        print(f"wrote {path.name}: {len(parsed.segments)} segment(s), "
              f"{parsed.total_motif_residues} motif residues, "
              f"length {parsed.scaffold_length}")


if __name__ == "__main__":
    main()

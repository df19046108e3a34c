"""Benchmark file formats and their in-memory structures.

Three formats live here:

* Motif specification files: PDB text with exactly three REMARK headers
  (``REMARK 1 Reference PDB ID: <id>``, ``REMARK 2 Motif Segment Placement
  in Reference PDB: <gap;seg;...;gap>``, ``REMARK 3 Length for Designed
  Scaffolds: <L>``), one chain per motif segment, TER separators, END.
  Positions whose amino-acid type may be redesigned carry residue name
  UNK and only backbone atoms.
* Scaffold files: standard single-chain PDB ATOM records, residues
  numbered 1..L. CA is mandatory; N/C/O are optional but must be complete
  to count as a full-backbone scaffold.
* Placement metadata: one row per scaffold, ``filename`` then
  semicolon-separated ``segment_id:start_index`` pairs (1-based starts),
  UTF-8 with LF line endings.

Parsing is pure; every returned structure is validated and safe to share
across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    FormatError,
    PlacementError,
    SetSizeError,
    ValidationError,
)

AA3_TO_AA1 = {
    "ALA": "A", "ARG": "R", "ASN": "N", "ASP": "D", "CYS": "C",
    "GLN": "Q", "GLU": "E", "GLY": "G", "HIS": "H", "ILE": "I",
    "LEU": "L", "LYS": "K", "MET": "M", "PHE": "F", "PRO": "P",
    "SER": "S", "THR": "T", "TRP": "W", "TYR": "Y", "VAL": "V",
    "UNK": "X",
}
AA1_TO_AA3 = {v: k for k, v in AA3_TO_AA1.items()}

BACKBONE_ATOMS = ("N", "CA", "C", "O")

_REMARK1 = "REMARK 1 Reference PDB ID:"
_REMARK2 = "REMARK 2 Motif Segment Placement in Reference PDB:"
_REMARK3 = "REMARK 3 Length for Designed Scaffolds:"


@dataclass(frozen=True)
class AtomRecord:
    """One parsed ATOM line."""

    serial: int
    atom_name: str
    res_name: str
    chain_id: str
    residue_index: int
    coords: np.ndarray  # (3,) float64, Angstrom
    element: str

    def __post_init__(self):
        if not self.atom_name:
            raise ValidationError("empty atom name")
        if not np.all(np.isfinite(self.coords)):
            raise ValidationError(
                f"non-finite coordinate for atom {self.atom_name} "
                f"{self.chain_id}{self.residue_index}"
            )


class MotifResidue:
    """One motif residue: amino-acid type, backbone (+ optional extras).

    ``atoms`` maps atom name to a (3,) coordinate array and must contain
    N, CA and C. ``redesignable`` is True for every UNK residue; it may
    also be set True for a typed residue when a problem's redesign list
    marks the position (the written file then carries UNK).
    """

    __slots__ = ("aa_type", "redesignable", "atoms")

    def __init__(self, aa_type, atoms, redesignable=None):
        self.aa_type = aa_type
        self.atoms = {name: np.asarray(xyz, dtype=np.float64)
                      for name, xyz in atoms.items()}
        if redesignable is None:
            redesignable = aa_type == "UNK"
        if aa_type == "UNK" and not redesignable:
            raise ValidationError("UNK residue must be redesignable")
        self.redesignable = bool(redesignable)
        for required in ("N", "CA", "C"):
            if required not in self.atoms:
                raise ValidationError(f"residue lacks backbone atom {required}")
        for name, xyz in self.atoms.items():
            if xyz.shape != (3,):
                raise ValidationError(f"atom {name} is not a 3-vector")
            if not np.all(np.isfinite(xyz)):
                raise ValidationError(f"non-finite coordinate in atom {name}")

    def __eq__(self, other):
        if not isinstance(other, MotifResidue):
            return NotImplemented
        return (self.aa_type == other.aa_type
                and self.redesignable == other.redesignable
                and list(self.atoms) == list(other.atoms)
                and all(np.array_equal(self.atoms[k], other.atoms[k])
                        for k in self.atoms))

    def __repr__(self):
        return (f"MotifResidue({self.aa_type!r}, redesignable="
                f"{self.redesignable}, atoms={list(self.atoms)})")


@dataclass(frozen=True)
class MotifSegment:
    """A sequence-contiguous stretch of motif residues (one file chain)."""

    segment_id: str
    residues: tuple

    def __post_init__(self):
        if len(self.segment_id) != 1:
            raise ValidationError(
                f"segment id must be a single character, got {self.segment_id!r}")
        if not self.residues:
            raise ValidationError(f"segment {self.segment_id} has no residues")
        object.__setattr__(self, "residues", tuple(self.residues))

    def __len__(self):
        return len(self.residues)

    def backbone_coords(self):
        """(3*len, 3) N/CA/C coordinates in residue order."""
        rows = []
        for res in self.residues:
            for name in ("N", "CA", "C"):
                rows.append(res.atoms[name])
        return np.asarray(rows, dtype=np.float64)


@dataclass(frozen=True)
class MotifSpec:
    """A benchmark problem: motif segments plus the demanded scaffold length."""

    reference_pdb_id: str
    segments: tuple
    scaffold_length: int
    reference_placement: tuple  # alternating gap lengths and segment ids

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "reference_placement",
                           tuple(self.reference_placement))
        if len(self.reference_pdb_id) != 4:
            raise ValidationError(
                f"reference PDB id must have 4 characters, "
                f"got {self.reference_pdb_id!r}")
        ids = [seg.segment_id for seg in self.segments]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate segment ids: {ids}")
        if self.scaffold_length < self.total_motif_residues:
            raise ValidationError(
                f"scaffold length {self.scaffold_length} is smaller than the "
                f"motif ({self.total_motif_residues} residues)")
        self._check_reference_placement()

    def _check_reference_placement(self):
        placement = self.reference_placement
        if len(placement) != 2 * len(self.segments) + 1:
            raise ValidationError(
                "reference placement must alternate gap;segment;...;gap")
        mentioned = []
        for pos, token in enumerate(placement):
            if pos % 2 == 0:
                if not isinstance(token, int) or token < 0:
                    raise ValidationError(
                        f"reference placement gap at position {pos} must be a "
                        f"nonnegative integer, got {token!r}")
            else:
                mentioned.append(token)
        if sorted(mentioned) != sorted(s.segment_id for s in self.segments):
            raise ValidationError(
                f"reference placement mentions segments {mentioned}, "
                f"file defines {[s.segment_id for s in self.segments]}")

    @property
    def total_motif_residues(self):
        return sum(len(seg) for seg in self.segments)

    @property
    def segment_sizes(self):
        return {seg.segment_id: len(seg) for seg in self.segments}

    def motif_backbone_coords(self):
        """(3*total, 3) N/CA/C atoms, segment order then residue order."""
        return np.concatenate([seg.backbone_coords() for seg in self.segments])

    def fixed_positions(self, placements):
        """Map scaffold residue index -> one-letter type for fixed positions.

        Redesignable motif residues are excluded; everything else in the
        motif keeps its amino-acid type during sequence design.
        """
        validate_placements(placements, self, self.scaffold_length)
        fixed = {}
        for seg in self.segments:
            start = placements[seg.segment_id]
            for offset, res in enumerate(seg.residues):
                if not res.redesignable:
                    fixed[start + offset] = AA3_TO_AA1[res.aa_type]
        return fixed


@dataclass(frozen=True, eq=False)
class Backbone:
    """Per-residue N/CA/C (and optionally O) coordinates of one chain."""

    n: np.ndarray
    ca: np.ndarray
    c: np.ndarray
    o: np.ndarray | None = None

    def __post_init__(self):
        length = self.ca.shape[0]
        for name in ("n", "ca", "c"):
            arr = getattr(self, name)
            if arr.shape != (length, 3):
                raise ValidationError(
                    f"backbone array {name} has shape {arr.shape}, "
                    f"expected ({length}, 3)")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"non-finite coordinate in {name}")
        if self.o is not None and self.o.shape != (length, 3):
            raise ValidationError("O array length mismatch")

    def __len__(self):
        return self.ca.shape[0]


@dataclass(frozen=True, eq=False)
class ScaffoldRecord:
    """One designed scaffold with its motif placement indices.

    ``placements`` maps segment id to the 1-based scaffold index of the
    segment's first residue. Full-backbone records carry n/c/o arrays;
    CA-only records have them set to None.
    """

    scaffold_index: int
    ca: np.ndarray
    placements: dict
    n: np.ndarray | None = None
    c: np.ndarray | None = None
    o: np.ndarray | None = None
    source_name: str = ""

    def __post_init__(self):
        ca = np.asarray(self.ca, dtype=np.float64)
        object.__setattr__(self, "ca", ca)
        if ca.ndim != 2 or ca.shape[1] != 3 or ca.shape[0] == 0:
            raise ValidationError(
                f"scaffold {self.scaffold_index}: CA array must be (L, 3)")
        if not np.all(np.isfinite(ca)):
            raise ValidationError(
                f"scaffold {self.scaffold_index}: non-finite CA coordinate")
        partial = [self.n, self.c, self.o]
        if any(a is None for a in partial) != all(a is None for a in partial):
            raise ValidationError(
                f"scaffold {self.scaffold_index}: N/C/O must be all present "
                f"or all absent")
        for name in ("n", "c", "o"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=np.float64)
            object.__setattr__(self, name, arr)
            if arr.shape != ca.shape or not np.all(np.isfinite(arr)):
                raise ValidationError(
                    f"scaffold {self.scaffold_index}: bad {name.upper()} array")

    def __len__(self):
        return self.ca.shape[0]

    @property
    def ca_only(self):
        return self.n is None

    def backbone(self):
        """Full Backbone view; raises for CA-only records."""
        if self.ca_only:
            raise ValidationError(
                f"scaffold {self.scaffold_index} is CA-only")
        return Backbone(n=self.n, ca=self.ca, c=self.c, o=self.o)


@dataclass(frozen=True)
class ScaffoldSet:
    """The 100 scaffolds submitted for one benchmark problem."""

    problem_id: str
    scaffolds: tuple

    REQUIRED_COUNT = 100

    def __post_init__(self):
        object.__setattr__(self, "scaffolds", tuple(self.scaffolds))
        if len(self.scaffolds) != self.REQUIRED_COUNT:
            raise SetSizeError(
                f"{self.problem_id}: scaffold set has {len(self.scaffolds)} "
                f"records, exactly {self.REQUIRED_COUNT} required")
        lengths = {len(rec) for rec in self.scaffolds}
        if len(lengths) != 1:
            offenders = sorted(
                (rec.scaffold_index, len(rec)) for rec in self.scaffolds)
            raise ValidationError(
                f"{self.problem_id}: scaffolds differ in length: {offenders}")

    def __len__(self):
        return len(self.scaffolds)


def validate_placements(placements, spec, scaffold_length):
    """Check placement indices against segment sizes and scaffold bounds.

    Segments may appear in any sequence order, but each must fit inside
    the scaffold and no two may overlap.
    """
    expected = set(spec.segment_sizes)
    if set(placements) != expected:
        raise PlacementError(
            f"placements name segments {sorted(placements)}, "
            f"spec defines {sorted(expected)}")
    spans = []
    for seg_id, start in placements.items():
        size = spec.segment_sizes[seg_id]
        if not isinstance(start, int) or start < 1:
            raise PlacementError(
                f"segment {seg_id}: start index {start!r} must be >= 1")
        if start + size - 1 > scaffold_length:
            raise PlacementError(
                f"segment {seg_id}: residues {start}..{start + size - 1} "
                f"exceed scaffold length {scaffold_length}")
        spans.append((start, start + size - 1, seg_id))
    spans.sort()
    for (_, prev_end, prev_id), (nxt_start, _, nxt_id) in zip(spans, spans[1:]):
        if nxt_start <= prev_end:
            raise PlacementError(
                f"segments {prev_id} and {nxt_id} overlap in the scaffold")


# ---------------------------------------------------------------------------
# Low-level PDB record handling
# ---------------------------------------------------------------------------

def _parse_atom_line(line, lineno):
    if len(line) < 54:
        raise FormatError(f"line {lineno}: ATOM record too short")
    try:
        serial = int(line[6:11])
        name = line[12:16].strip()
        alt_loc = line[16]
        res_name = line[17:20].strip()
        chain_id = line[21]
        res_seq = int(line[22:26])
        i_code = line[26]
        xyz = np.array([float(line[30:38]), float(line[38:46]),
                        float(line[46:54])])
    except ValueError as exc:
        raise FormatError(f"line {lineno}: malformed ATOM record: {exc}") from exc
    if alt_loc != " ":
        raise ValidationError(
            f"line {lineno}: alternate location indicator {alt_loc!r} is not "
            f"supported; resolve alternates upstream")
    if i_code != " ":
        raise ValidationError(
            f"line {lineno}: residue insertion codes are not supported")
    element = line[76:78].strip() if len(line) >= 78 else ""
    if not element:
        element = name[0]
    return AtomRecord(serial=serial, atom_name=name, res_name=res_name,
                      chain_id=chain_id, residue_index=res_seq, coords=xyz,
                      element=element)


def _format_atom_line(serial, name, res_name, chain_id, res_seq, xyz, element):
    # Atom names shorter than 4 characters start in column 14.
    name4 = name if len(name) >= 4 else f" {name:<3s}"
    return (f"ATOM  {serial:5d} {name4} {res_name:>3s} {chain_id}"
            f"{res_seq:4d}    {xyz[0]:8.3f}{xyz[1]:8.3f}{xyz[2]:8.3f}"
            f"{1.0:6.2f}{0.0:6.2f}          {element:>2s}  ")


def _decode(data):
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


# ---------------------------------------------------------------------------
# Motif specification files
# ---------------------------------------------------------------------------

def parse_motif_spec(data):
    """Parse a motif specification file (bytes or str) into a MotifSpec.

    Raises FormatError when a REMARK header is missing or a record is
    malformed, and ValidationError when the content violates an
    invariant (missing backbone atom, non-contiguous numbering, ...).
    """
    text = _decode(data)
    remarks = {}
    atoms = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith("REMARK"):
            for key, prefix in ((1, _REMARK1), (2, _REMARK2), (3, _REMARK3)):
                if line.startswith(prefix):
                    remarks[key] = line[len(prefix):].strip()
                    break
            else:
                raise FormatError(f"line {lineno}: unrecognized REMARK line")
        elif line.startswith("ATOM"):
            atoms.append(_parse_atom_line(line, lineno))
        elif line.startswith(("TER", "END")) or not line.strip():
            continue
        else:
            raise FormatError(f"line {lineno}: unexpected record "
                              f"{line.split()[0]!r} in motif file")

    for key, label in ((1, "REMARK 1 (Reference PDB ID)"),
                       (2, "REMARK 2 (Motif Segment Placement)"),
                       (3, "REMARK 3 (Length for Designed Scaffolds)")):
        if key not in remarks:
            raise FormatError(f"missing header {label}")

    try:
        scaffold_length = int(remarks[3])
    except ValueError as exc:
        raise FormatError(f"REMARK 3 value {remarks[3]!r} is not an "
                          f"integer") from exc
    if scaffold_length <= 0:
        raise ValidationError("scaffold length must be positive")

    reference_placement = _parse_reference_placement(remarks[2])
    segments = _group_segments(atoms)
    return MotifSpec(reference_pdb_id=remarks[1], segments=segments,
                     scaffold_length=scaffold_length,
                     reference_placement=reference_placement)


def _parse_reference_placement(value):
    tokens = value.split(";")
    placement = []
    for pos, token in enumerate(tokens):
        token = token.strip()
        if pos % 2 == 0:
            try:
                placement.append(int(token))
            except ValueError as exc:
                raise FormatError(
                    f"REMARK 2: expected gap length at position {pos}, "
                    f"got {token!r}") from exc
        else:
            placement.append(token)
    return tuple(placement)


def _group_segments(atoms):
    if not atoms:
        raise FormatError("motif file contains no ATOM records")
    by_chain = {}
    order = []
    for atom in atoms:
        if atom.chain_id not in by_chain:
            by_chain[atom.chain_id] = []
            order.append(atom.chain_id)
        by_chain[atom.chain_id].append(atom)

    segments = []
    for chain_id in order:
        residues = []
        current_index = None
        current = None
        for atom in by_chain[chain_id]:
            if atom.residue_index != current_index:
                if current is not None:
                    residues.append(_build_motif_residue(current, chain_id,
                                                         current_index))
                expected = 1 if current_index is None else current_index + 1
                if atom.residue_index != expected:
                    raise ValidationError(
                        f"chain {chain_id}: residue numbering jumps to "
                        f"{atom.residue_index}, expected {expected}")
                current_index = atom.residue_index
                current = []
            current.append(atom)
        residues.append(_build_motif_residue(current, chain_id, current_index))
        segments.append(MotifSegment(segment_id=chain_id,
                                     residues=tuple(residues)))
    return tuple(segments)


def _build_motif_residue(atom_group, chain_id, residue_index):
    res_names = {a.res_name for a in atom_group}
    if len(res_names) != 1:
        raise ValidationError(
            f"chain {chain_id} residue {residue_index}: conflicting residue "
            f"names {sorted(res_names)}")
    res_name = res_names.pop()
    if res_name not in AA3_TO_AA1:
        raise ValidationError(
            f"chain {chain_id} residue {residue_index}: unknown residue type "
            f"{res_name!r}")
    atoms = {}
    for atom in atom_group:
        if atom.atom_name in atoms:
            raise ValidationError(
                f"chain {chain_id} residue {residue_index}: duplicate atom "
                f"{atom.atom_name}")
        if res_name == "UNK" and atom.atom_name not in BACKBONE_ATOMS:
            continue
        atoms[atom.atom_name] = atom.coords
    for required in ("N", "CA", "C"):
        if required not in atoms:
            raise ValidationError(
                f"chain {chain_id} residue {residue_index}: missing backbone "
                f"atom {required}")
    return MotifResidue(aa_type=res_name, atoms=atoms)


def write_motif_spec(spec):
    """Emit a MotifSpec as motif-file bytes.

    Output re-parses to an equivalent spec; coordinates are written at the
    PDB's 3-decimal convention. Residues flagged redesignable are emitted
    as UNK with backbone atoms only.
    """
    lines = [
        f"{_REMARK1} {spec.reference_pdb_id}",
        f"{_REMARK2} {';'.join(str(t) for t in spec.reference_placement)}",
        f"{_REMARK3} {spec.scaffold_length}",
    ]
    serial = 1
    for seg in spec.segments:
        for res_seq, res in enumerate(seg.residues, start=1):
            res_name = "UNK" if res.redesignable else res.aa_type
            for name, xyz in res.atoms.items():
                if res_name == "UNK" and name not in BACKBONE_ATOMS:
                    continue
                element = name[0]
                lines.append(_format_atom_line(
                    serial, name, res_name, seg.segment_id, res_seq, xyz,
                    element))
                serial += 1
        lines.append("TER")
    lines.append("END   ")
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Scaffold files and placement metadata
# ---------------------------------------------------------------------------

def parse_scaffold_pdb(data, scaffold_index=1, placements=None,
                       source_name=""):
    """Parse one scaffold PDB file into a ScaffoldRecord.

    The record is flagged CA-only when any residue lacks N, C or O.
    """
    text = _decode(data)
    atoms = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith("ATOM"):
            atoms.append(_parse_atom_line(line, lineno))
    if not atoms:
        raise FormatError(f"{source_name or 'scaffold'}: no ATOM records")
    chains = {a.chain_id for a in atoms}
    if len(chains) != 1:
        raise ValidationError(
            f"{source_name or 'scaffold'}: expected a single chain, "
            f"found {sorted(chains)}")

    residues = {}
    for atom in atoms:
        residues.setdefault(atom.residue_index, {})[atom.atom_name] = atom.coords
    indices = sorted(residues)
    if indices != list(range(1, len(indices) + 1)):
        raise ValidationError(
            f"{source_name or 'scaffold'}: residues must be numbered "
            f"1..L without gaps")

    length = len(indices)
    ca = np.empty((length, 3))
    full = {"N": np.empty((length, 3)), "C": np.empty((length, 3)),
            "O": np.empty((length, 3))}
    have_full = True
    for row, idx in enumerate(indices):
        present = residues[idx]
        if "CA" not in present:
            raise ValidationError(
                f"{source_name or 'scaffold'}: residue {idx} lacks CA")
        ca[row] = present["CA"]
        if have_full and all(name in present for name in ("N", "C", "O")):
            for name in ("N", "C", "O"):
                full[name][row] = present[name]
        else:
            have_full = False

    return ScaffoldRecord(
        scaffold_index=scaffold_index,
        ca=ca,
        n=full["N"] if have_full else None,
        c=full["C"] if have_full else None,
        o=full["O"] if have_full else None,
        placements=dict(placements or {}),
        source_name=source_name,
    )


def write_scaffold_pdb(record, sequence=None, chain_id="A"):
    """Emit a ScaffoldRecord (full backbone or CA-only) as PDB bytes."""
    length = len(record)
    if sequence is not None and len(sequence) != length:
        raise ValidationError(
            f"sequence length {len(sequence)} != scaffold length {length}")
    lines = []
    serial = 1
    for row in range(length):
        res_name = AA1_TO_AA3.get(sequence[row], "UNK") if sequence else "GLY"
        if record.ca_only:
            per_res = (("CA", record.ca[row]),)
        else:
            per_res = (("N", record.n[row]), ("CA", record.ca[row]),
                       ("C", record.c[row]), ("O", record.o[row]))
        for name, xyz in per_res:
            element = name[0]
            lines.append(_format_atom_line(serial, name, res_name, chain_id,
                                           row + 1, xyz, element))
            serial += 1
    lines.append("TER")
    lines.append("END   ")
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_backbone_pdb(backbone, sequence=None, chain_id="A"):
    """Emit a predicted Backbone as PDB bytes (N/CA/C and O when present)."""
    length = len(backbone)
    lines = []
    serial = 1
    for row in range(length):
        res_name = AA1_TO_AA3.get(sequence[row], "UNK") if sequence else "GLY"
        per_res = [("N", backbone.n[row]), ("CA", backbone.ca[row]),
                   ("C", backbone.c[row])]
        if backbone.o is not None:
            per_res.append(("O", backbone.o[row]))
        for name, xyz in per_res:
            lines.append(_format_atom_line(serial, name, res_name, chain_id,
                                           row + 1, xyz, name[0]))
            serial += 1
    lines.append("TER")
    lines.append("END   ")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_backbone_pdb(data, source_name=""):
    """Parse a predicted-structure PDB into a Backbone.

    N, CA and C are required for every residue; O is kept when complete.
    """
    text = _decode(data)
    residues = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith("ATOM"):
            atom = _parse_atom_line(line, lineno)
            residues.setdefault(atom.residue_index, {})[atom.atom_name] = \
                atom.coords
    if not residues:
        raise FormatError(f"{source_name or 'prediction'}: no ATOM records")
    indices = sorted(residues)
    if indices != list(range(1, len(indices) + 1)):
        raise ValidationError(
            f"{source_name or 'prediction'}: residues must be numbered "
            f"1..L without gaps")
    arrays = {}
    for name in ("N", "CA", "C"):
        rows = []
        for idx in indices:
            if name not in residues[idx]:
                raise ValidationError(
                    f"{source_name or 'prediction'}: residue {idx} lacks "
                    f"{name}")
            rows.append(residues[idx][name])
        arrays[name] = np.asarray(rows)
    o = None
    if all("O" in residues[idx] for idx in indices):
        o = np.asarray([residues[idx]["O"] for idx in indices])
    return Backbone(n=arrays["N"], ca=arrays["CA"], c=arrays["C"], o=o)


def parse_placement_metadata(data):
    """Parse placement metadata into an ordered list of (filename, placements).

    Rows look like ``scaffold_000.pdb<TAB>A:12;B:50``; '#' lines and blank
    lines are skipped.
    """
    text = _decode(data)
    rows = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise FormatError(
                f"metadata line {lineno}: expected 'filename placements', "
                f"got {stripped!r}")
        filename, placement_text = parts
        if filename in seen:
            raise FormatError(
                f"metadata line {lineno}: duplicate scaffold {filename}")
        seen.add(filename)
        placements = {}
        for pair in placement_text.split(";"):
            if ":" not in pair:
                raise FormatError(
                    f"metadata line {lineno}: malformed placement {pair!r}")
            seg_id, start_text = pair.split(":", 1)
            try:
                start = int(start_text)
            except ValueError as exc:
                raise FormatError(
                    f"metadata line {lineno}: start index {start_text!r} is "
                    f"not an integer") from exc
            if seg_id in placements:
                raise FormatError(
                    f"metadata line {lineno}: duplicate segment {seg_id}")
            placements[seg_id] = start
        rows.append((filename, placements))
    return rows


def write_placement_metadata(rows):
    """Emit placement metadata bytes from (filename, placements) rows."""
    lines = []
    for filename, placements in rows:
        pairs = ";".join(f"{seg}:{start}" for seg, start in placements.items())
        lines.append(f"{filename}\t{pairs}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_scaffold_set(directory, metadata, spec, problem_id=None):
    """Load and validate a 100-scaffold set against its motif spec.

    ``directory`` holds the scaffold PDB files; ``metadata`` is the
    placement file content (bytes or str). Every scaffold must match the
    spec's scaffold length and carry in-bounds, non-overlapping placements
    for exactly the spec's segments.
    """
    directory = Path(directory)
    rows = parse_placement_metadata(metadata)
    if len(rows) != ScaffoldSet.REQUIRED_COUNT:
        raise SetSizeError(
            f"metadata lists {len(rows)} scaffolds, "
            f"exactly {ScaffoldSet.REQUIRED_COUNT} required")
    records = []
    wrong_length = []
    for index, (filename, placements) in enumerate(rows, start=1):
        path = directory / filename
        if not path.is_file():
            raise SetSizeError(f"scaffold file missing: {path}")
        record = parse_scaffold_pdb(path.read_bytes(), scaffold_index=index,
                                    placements=placements,
                                    source_name=filename)
        if len(record) != spec.scaffold_length:
            wrong_length.append((filename, len(record)))
            continue
        validate_placements(placements, spec, spec.scaffold_length)
        records.append(record)
    if wrong_length:
        raise ValidationError(
            f"scaffolds with length != {spec.scaffold_length}: {wrong_length}")
    return ScaffoldSet(problem_id=problem_id or directory.name,
                       scaffolds=tuple(records))


def extract_motif_atoms(scaffold, spec):
    """Motif N/CA/C coordinates read out of a designed scaffold.

    Concatenation order is segment order (per spec), then residue order,
    then N, CA, C; the result is (3 * total_motif_residues, 3). CA-only
    scaffolds are rejected: in the pipeline the motif is always read from
    a predicted structure, which carries a full backbone.
    """
    if scaffold.ca_only:
        raise ValidationError(
            f"scaffold {scaffold.scaffold_index} is CA-only; motif backbone "
            f"atoms cannot be extracted")
    validate_placements(scaffold.placements, spec, len(scaffold))
    rows = []
    for seg in spec.segments:
        start = scaffold.placements[seg.segment_id]
        for offset in range(len(seg)):
            row = start + offset - 1
            rows.append(scaffold.n[row])
            rows.append(scaffold.ca[row])
            rows.append(scaffold.c[row])
    return np.asarray(rows, dtype=np.float64)

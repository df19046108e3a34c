"""Serialization formats shared by the external-process protocol and
recorded fixtures: FASTA for sequences, TSV for cluster assignments, a
single float line for search results. Structures travel as PDB via
structure_io.
"""

from __future__ import annotations

from ..errors import FormatError


def emit_fasta(sequences, prefix="seq"):
    lines = []
    for pos, seq in enumerate(sequences, start=1):
        lines.append(f">{prefix}_{pos}")
        lines.append(seq)
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_fasta(data):
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    sequences = []
    current = None
    for line in data.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            if current is not None:
                sequences.append(current)
            current = ""
        elif current is None:
            raise FormatError("FASTA content before the first header")
        else:
            current += line
    if current is not None:
        sequences.append(current)
    if not sequences:
        raise FormatError("no FASTA records found")
    return tuple(sequences)


def emit_clusters_tsv(names, clusters):
    """One row per member: ``name<TAB>cluster_label``."""
    lines = []
    for label, members in enumerate(clusters):
        for member in members:
            lines.append(f"{names[member]}\t{label}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_clusters_tsv(data, names):
    """Group rows by cluster label; returns member-index lists.

    Unknown names raise; missing or duplicated members are left for
    validate_partition to reject.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    index_of = {name: i for i, name in enumerate(names)}
    groups = {}
    order = []
    for lineno, line in enumerate(data.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError(f"clusters line {lineno}: expected "
                              f"'name<TAB>label', got {line!r}")
        name, label = parts
        if name not in index_of:
            raise FormatError(f"clusters line {lineno}: unknown member "
                              f"{name!r}")
        if label not in groups:
            groups[label] = []
            order.append(label)
        groups[label].append(index_of[name])
    return [sorted(groups[label]) for label in order]


def emit_tm(value):
    return f"{value!r}\n".encode("utf-8")


def parse_tm(data):
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    token = data.strip().split()
    if not token:
        raise FormatError("empty search result")
    try:
        return float(token[0])
    except ValueError as exc:
        raise FormatError(f"search result {token[0]!r} is not a float") from exc

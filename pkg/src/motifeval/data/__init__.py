"""Bundled benchmark data: the 30 motif specification fixtures."""

from importlib.resources import files

from ..structure_io import parse_motif_spec


def motif_dir():
    """Traversable directory holding the bundled motif files."""
    return files(__name__) / "motifs"


def bundled_motif_names():
    """Sorted fixture file names, one per benchmark case."""
    return sorted(entry.name for entry in motif_dir().iterdir()
                  if entry.name.endswith(".pdb"))


def load_bundled_spec(name):
    return parse_motif_spec((motif_dir() / name).read_bytes())


def load_all_bundled_specs():
    """Map case id (file stem) to its parsed MotifSpec."""
    return {name[:-4]: load_bundled_spec(name)
            for name in bundled_motif_names()}

"""Deterministic mock backends and the internal fallback clusterer.

Mocks make the whole pipeline runnable and checkable without any neural
tool installed: the designer emits a fixed deterministic sequence, the
folder echoes the designed backbone (optionally with seeded Gaussian
noise), the searcher returns configured or database-derived TM-scores,
and the clusterer is a single-linkage agglomerator over an internal
CA-trace similarity.

Everything here is bitwise deterministic given (seed, inputs).
"""

from __future__ import annotations

import numpy as np

from .._kernels import tm_like_matrix, tm_like_score
from ..digest import derive_seed
from ..errors import ConfigurationError, ValidationError
from ..structure_io import Backbone
from .base import (
    SequenceDesigner,
    StructureClusterer,
    StructurePredictor,
    StructureSearcher,
)

# Offsets used to fabricate N and C atoms when echoing a CA-only scaffold.
# Not physical geometry; mocks only need a deterministic full backbone.
_FAKE_N_OFFSET = np.array([-1.2, 0.3, 0.0])
_FAKE_C_OFFSET = np.array([1.2, 0.3, 0.0])


def similarity_d0(length):
    """Distance scale for the internal CA-trace similarity score."""
    if length > 15:
        return max(0.5, 1.24 * (length - 15) ** (1.0 / 3.0) - 1.8)
    return 0.5


class MockDesigner(SequenceDesigner):
    """Returns copies of one deterministic sequence.

    Fixed positions carry their required type; every other position is
    alanine. The output only depends on the request, never on state.
    """

    def design(self, request):
        letters = ["A"] * len(request.backbone)
        for index, aa in request.fixed_positions.items():
            letters[index - 1] = aa
        sequence = "".join(letters)
        return tuple(sequence for _ in range(request.num_sequences))


class MockFolder(StructurePredictor):
    """Identity fold: echoes the designed backbone from the context.

    With ``noise_sigma > 0`` adds per-atom Gaussian noise seeded from
    (seed, sequence, designed coordinates), so repeated runs are
    identical. ``noise_free_motif`` leaves the context's motif rows
    untouched, which lets tests break scaffold validity while keeping
    motif maintenance intact.
    """

    def __init__(self, noise_sigma=0.0, seed=0, noise_free_motif=False):
        self.noise_sigma = float(noise_sigma)
        self.seed = 0 if seed is None else int(seed)
        self.noise_free_motif = bool(noise_free_motif)

    def predict(self, sequence, context=None):
        if context is None or context.designed is None:
            raise ConfigurationError(
                "identity-fold mock needs the designed backbone in the fold "
                "context")
        designed = context.designed
        if len(designed) != len(sequence):
            raise ValidationError(
                f"sequence length {len(sequence)} != designed backbone "
                f"length {len(designed)}")
        if designed.ca_only:
            n = designed.ca + _FAKE_N_OFFSET
            c = designed.ca + _FAKE_C_OFFSET
            o = None
        else:
            n = designed.n.copy()
            c = designed.c.copy()
            o = designed.o.copy()
        ca = designed.ca.copy()

        if self.noise_sigma > 0.0:
            rng = np.random.default_rng(
                derive_seed(self.seed, sequence, designed.ca))
            arrays = [n, ca, c] + ([o] if o is not None else [])
            keep = set(context.motif_rows) if self.noise_free_motif else set()
            for arr in arrays:
                noise = rng.normal(scale=self.noise_sigma, size=arr.shape)
                if keep:
                    noise[sorted(keep)] = 0.0
                arr += noise
        return Backbone(n=n, ca=ca, c=c, o=o)


class MockSearcher(StructureSearcher):
    """Configurable stand-in for a structure-database search.

    Resolution order: an explicit per-label value, then the constant
    ``tm_value``, then a database lookup (1.0 for an exact member, else
    the best internal similarity; 0.0 for an empty database).
    """

    def __init__(self, tm_value=None, tm_values=None, database=None):
        self.tm_value = tm_value
        self.tm_values = dict(tm_values or {})
        self.database = None
        if database is not None:
            self.database = [np.asarray(t, dtype=np.float64)
                             for t in database]

    def max_tm_to_database(self, trace, label=None):
        if label is not None and label in self.tm_values:
            return float(self.tm_values[label])
        if self.tm_value is not None:
            return float(self.tm_value)
        if self.database is None:
            raise ConfigurationError(
                "mock searcher has neither tm values nor a database")
        best = 0.0
        for entry in self.database:
            if entry.shape == trace.shape and np.array_equal(entry, trace):
                return 1.0
            if entry.shape == trace.shape:
                best = max(best, tm_like_score(trace, entry,
                                               similarity_d0(len(trace))))
        return best


class InternalClusterer(StructureClusterer):
    """Single-linkage agglomeration over the internal CA-trace similarity.

    A fallback for runs without an external clustering tool; it is not
    the canonical clusterer, and its merge threshold is configuration.
    Two traces join one cluster when their similarity reaches the
    threshold, directly or through intermediates.
    """

    def __init__(self, merge_threshold=0.5):
        if not 0.0 < merge_threshold <= 1.0:
            raise ConfigurationError(
                f"merge threshold {merge_threshold} outside (0, 1]")
        self.merge_threshold = float(merge_threshold)

    def cluster(self, traces):
        count = len(traces)
        if count == 1:
            return [[0]]
        lengths = {t.shape[0] for t in traces}
        if len(lengths) != 1:
            raise ValidationError(
                f"cannot cluster traces of differing lengths {sorted(lengths)}")
        length = lengths.pop()
        stack = np.stack(traces)
        scores = tm_like_matrix(stack, similarity_d0(length))

        parent = list(range(count))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(count):
            for j in range(i + 1, count):
                if scores[i, j] >= self.merge_threshold:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)

        groups = {}
        for i in range(count):
            groups.setdefault(find(i), []).append(i)
        return [groups[root] for root in sorted(groups)]

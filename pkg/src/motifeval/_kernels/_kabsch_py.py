"""Pure numpy alignment kernels (fallback for the compiled extension)."""

import numpy as np


def superpose(pred, design):
    """Optimal proper superposition of ``pred`` onto ``design``.

    Both arguments are (L, 3) float64 arrays. Returns ``(rmsd, rotation)``
    where ``rotation`` maps centered pred coordinates onto centered design
    coordinates and always has determinant +1 (a reflection in the
    unconstrained optimum is corrected along the least-significant
    singular direction).
    """
    p = pred - pred.mean(axis=0)
    q = design - design.mean(axis=0)
    cov = p.T @ q
    u, _, vt = np.linalg.svd(cov)
    d = 1.0 if np.linalg.det(u @ vt) >= 0.0 else -1.0
    rotation = vt.T @ np.diag([1.0, 1.0, d]) @ u.T
    diff = p @ rotation.T - q
    rmsd = float(np.sqrt(np.mean(np.einsum("ij,ij->i", diff, diff))))
    return rmsd, rotation


def aligned_sq_dists(pred, design):
    """Per-point squared distances after optimal proper superposition."""
    p = pred - pred.mean(axis=0)
    q = design - design.mean(axis=0)
    _, rotation = superpose(pred, design)
    diff = p @ rotation.T - q
    return np.einsum("ij,ij->i", diff, diff)


def tm_like_score(pred, design, d0):
    """Similarity in (0, 1] from aligned per-point distances.

    Not a canonical TM-score: the residue correspondence is fixed
    (position i to position i) and the superposition minimizes RMSD
    rather than the score itself.
    """
    sq = aligned_sq_dists(pred, design)
    return float(np.mean(1.0 / (1.0 + sq / (d0 * d0))))


def tm_like_matrix(stack, d0):
    """Pairwise tm_like_score over a (M, L, 3) stack of traces."""
    m = stack.shape[0]
    out = np.ones((m, m), dtype=np.float64)
    for i in range(m):
        for j in range(i + 1, m):
            s = tm_like_score(stack[i], stack[j], d0)
            out[i, j] = s
            out[j, i] = s
    return out

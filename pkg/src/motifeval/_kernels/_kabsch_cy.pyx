# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled alignment kernels. Semantics mirror _kabsch_py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_lapack cimport dgesvd

cnp.import_array()


cdef double _det3(const double* a) nogil:
    return (a[0] * (a[4] * a[8] - a[5] * a[7])
            - a[1] * (a[3] * a[8] - a[5] * a[6])
            + a[2] * (a[3] * a[7] - a[4] * a[6]))


cdef int _rotation(const double[:, ::1] p, const double[:, ::1] q,
                   double* rot) nogil:
    """Proper rotation aligning centered p onto centered q (row-major out).

    Returns the LAPACK info code (0 on success). The covariance buffer is
    handed to dgesvd as-is; LAPACK reads it column-major, i.e. factors
    cov^T, and the U/V roles are swapped back accordingly.
    """
    cdef double cov[9]
    cdef double s[3]
    cdef double u_buf[9]    # row-major view: V^T of cov
    cdef double vt_buf[9]   # row-major view: U of cov
    cdef double work[64]
    cdef double d, acc
    cdef double sgn[3]
    cdef int m = 3, n = 3, lda = 3, ldu = 3, ldvt = 3, lwork = 64, info = 0
    cdef char job = b'A'
    cdef Py_ssize_t l, i, j, k
    cdef Py_ssize_t npts = p.shape[0]

    for i in range(9):
        cov[i] = 0.0
    for l in range(npts):
        for i in range(3):
            for j in range(3):
                cov[i * 3 + j] += p[l, i] * q[l, j]

    dgesvd(&job, &job, &m, &n, cov, &lda, s, u_buf, &ldu, vt_buf, &ldvt,
           work, &lwork, &info)
    if info != 0:
        return info

    d = 1.0 if _det3(vt_buf) * _det3(u_buf) >= 0.0 else -1.0
    sgn[0] = 1.0
    sgn[1] = 1.0
    sgn[2] = d
    # rot = V diag(1,1,d) U^T with U = vt_buf, V^T = u_buf (row-major views)
    for i in range(3):
        for j in range(3):
            acc = 0.0
            for k in range(3):
                acc += u_buf[k * 3 + i] * sgn[k] * vt_buf[j * 3 + k]
            rot[i * 3 + j] = acc
    return 0


cdef void _center_into(const double[:, ::1] x, double[:, ::1] out) nogil:
    cdef Py_ssize_t l, npts = x.shape[0]
    cdef double cx = 0.0, cy = 0.0, cz = 0.0
    for l in range(npts):
        cx += x[l, 0]
        cy += x[l, 1]
        cz += x[l, 2]
    cx /= npts
    cy /= npts
    cz /= npts
    for l in range(npts):
        out[l, 0] = x[l, 0] - cx
        out[l, 1] = x[l, 1] - cy
        out[l, 2] = x[l, 2] - cz


cdef double _sq_dists(const double[:, ::1] p, const double[:, ::1] q,
                      const double* rot, double* out) nogil:
    """Fills per-point squared distances (if out != NULL); returns their sum."""
    cdef Py_ssize_t l, npts = p.shape[0]
    cdef double ax, ay, az, dx, dy, dz, sq, total = 0.0
    for l in range(npts):
        ax = rot[0] * p[l, 0] + rot[1] * p[l, 1] + rot[2] * p[l, 2]
        ay = rot[3] * p[l, 0] + rot[4] * p[l, 1] + rot[5] * p[l, 2]
        az = rot[6] * p[l, 0] + rot[7] * p[l, 1] + rot[8] * p[l, 2]
        dx = ax - q[l, 0]
        dy = ay - q[l, 1]
        dz = az - q[l, 2]
        sq = dx * dx + dy * dy + dz * dz
        if out != NULL:
            out[l] = sq
        total += sq
    return total


def superpose(pred, design):
    """Optimal proper superposition: returns (rmsd, rotation).

    Same contract as the pure-python kernel: rotation maps centered pred
    onto centered design and has determinant +1.
    """
    cdef double[:, ::1] p_raw = np.ascontiguousarray(pred, dtype=np.float64)
    cdef double[:, ::1] q_raw = np.ascontiguousarray(design, dtype=np.float64)
    cdef Py_ssize_t npts = p_raw.shape[0]
    p_arr = np.empty((npts, 3), dtype=np.float64)
    q_arr = np.empty((npts, 3), dtype=np.float64)
    cdef double[:, ::1] p = p_arr
    cdef double[:, ::1] q = q_arr
    rot_arr = np.empty((3, 3), dtype=np.float64)
    cdef double[:, ::1] rot = rot_arr
    cdef double total
    cdef int info
    with nogil:
        _center_into(p_raw, p)
        _center_into(q_raw, q)
        info = _rotation(p, q, &rot[0, 0])
    if info != 0:
        raise RuntimeError(f"dgesvd failed with info={info}")
    with nogil:
        total = _sq_dists(p, q, &rot[0, 0], NULL)
    return sqrt(total / npts), rot_arr


def aligned_sq_dists(pred, design):
    """Per-point squared distances after optimal proper superposition."""
    cdef double[:, ::1] p_raw = np.ascontiguousarray(pred, dtype=np.float64)
    cdef double[:, ::1] q_raw = np.ascontiguousarray(design, dtype=np.float64)
    cdef Py_ssize_t npts = p_raw.shape[0]
    p_arr = np.empty((npts, 3), dtype=np.float64)
    q_arr = np.empty((npts, 3), dtype=np.float64)
    out_arr = np.empty(npts, dtype=np.float64)
    cdef double[:, ::1] p = p_arr
    cdef double[:, ::1] q = q_arr
    cdef double[::1] out = out_arr
    cdef double rot[9]
    cdef int info
    with nogil:
        _center_into(p_raw, p)
        _center_into(q_raw, q)
        info = _rotation(p, q, rot)
    if info != 0:
        raise RuntimeError(f"dgesvd failed with info={info}")
    with nogil:
        _sq_dists(p, q, rot, &out[0])
    return out_arr


def tm_like_score(pred, design, double d0):
    """Similarity in (0, 1] from aligned per-point distances."""
    sq = aligned_sq_dists(pred, design)
    return float(np.mean(1.0 / (1.0 + sq / (d0 * d0))))


def tm_like_matrix(stack, double d0):
    """Pairwise tm_like_score over a (M, L, 3) stack of traces."""
    arr = np.ascontiguousarray(stack, dtype=np.float64)
    cdef Py_ssize_t m = arr.shape[0]
    cdef Py_ssize_t npts = arr.shape[1]
    centered_arr = np.empty_like(arr)
    cdef double[:, :, ::1] raw = arr
    cdef double[:, :, ::1] centered = centered_arr
    out_arr = np.ones((m, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double rot[9]
    cdef double d0sq = d0 * d0
    cdef double acc, sq, ax, ay, az, dx, dy, dz
    cdef Py_ssize_t i, j, l
    cdef int info = 0, bad = 0
    with nogil:
        for i in range(m):
            _center_into(raw[i], centered[i])
        for i in range(m):
            for j in range(i + 1, m):
                info = _rotation(centered[i], centered[j], rot)
                if info != 0:
                    bad = info
                    break
                acc = 0.0
                for l in range(npts):
                    ax = (rot[0] * centered[i, l, 0] + rot[1] * centered[i, l, 1]
                          + rot[2] * centered[i, l, 2])
                    ay = (rot[3] * centered[i, l, 0] + rot[4] * centered[i, l, 1]
                          + rot[5] * centered[i, l, 2])
                    az = (rot[6] * centered[i, l, 0] + rot[7] * centered[i, l, 1]
                          + rot[8] * centered[i, l, 2])
                    dx = ax - centered[j, l, 0]
                    dy = ay - centered[j, l, 1]
                    dz = az - centered[j, l, 2]
                    sq = dx * dx + dy * dy + dz * dz
                    acc += 1.0 / (1.0 + sq / d0sq)
                out[i, j] = acc / npts
                out[j, i] = out[i, j]
            if bad != 0:
                break
    if bad != 0:
        raise RuntimeError(f"dgesvd failed with info={bad}")
    return out_arr

# cython: language_level=3
"""Compiled reconstruction kernels.

Same arithmetic, in the same order, as ``_pykernels``; see that module for
the contract.  Candidate matrices are stored as row-major nonzero lists.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()

cdef int MAXC = 16
cdef int MAXK = 5

# bicubic Horner table, filled from the Python layout at import
cdef int H2[4][4]


def _set_horner(table):
    cdef int b, a
    for b in range(4):
        for a in range(4):
            H2[b][a] = table[b][a]


cdef inline double _power(double x, double l) nogil:
    if l == 2.0:
        return x * x
    return pow(x, l)


cdef struct Sparse:
    # nonzero entries in row-major order; rowptr has nrows + 1 entries
    int* rowptr
    int* col
    double* val


cdef struct Plan:
    int S
    int C
    int K
    Sparse W[5]
    Sparse M
    unsigned char rowmask[16]
    double d[5]
    double tc[5]
    double eps
    double l
    bint zmode
    double inv_dx2


cdef void _recon_one(const double* U, const Plan* pl,
                     double* coef, double* omega, double* ind, double* tau_out) nogil:
    cdef double Z[5][16]
    cdef double MZ[16]
    cdef double alpha[5]
    cdef double acc, s, r, q, total, tau, p
    cdef int k, rr, j
    cdef int C = pl.C, K = pl.K
    cdef const Sparse* W
    for k in range(K):
        W = &pl.W[k]
        for rr in range(C):
            acc = 0.0
            for j in range(W.rowptr[rr], W.rowptr[rr + 1]):
                acc = acc + U[W.col[j]] * W.val[j]
            Z[k][rr] = acc
        for rr in range(C):
            acc = 0.0
            for j in range(pl.M.rowptr[rr], pl.M.rowptr[rr + 1]):
                acc = acc + Z[k][pl.M.col[j]] * pl.M.val[j]
            MZ[rr] = acc
        acc = 0.0
        for rr in range(C):
            if pl.rowmask[rr]:
                acc = acc + Z[k][rr] * MZ[rr]
        ind[k] = acc * pl.inv_dx2
    tau = 0.0
    for k in range(K):
        tau = tau + pl.tc[k] * ind[k]
    tau = fabs(tau)
    tau_out[0] = tau
    total = 0.0
    for k in range(K):
        s = ind[k] + pl.eps
        if pl.zmode:
            r = tau / s
            q = _power(r, pl.l)
            alpha[k] = pl.d[k] * (1.0 + q)
        else:
            q = _power(s, pl.l)
            alpha[k] = pl.d[k] / q
    for k in range(K):
        total = total + alpha[k]
    for k in range(K):
        omega[k] = alpha[k] / total
    for rr in range(C):
        p = Z[0][rr]
        for k in range(1, K):
            p = p - pl.d[k] * Z[k][rr]
        p = p / pl.d[0]
        acc = omega[0] * p
        for k in range(1, K):
            acc = acc + omega[k] * Z[k][rr]
        coef[rr] = acc


cdef class _PlanHolder:
    """Owns the arrays a Plan points into."""
    cdef Plan plan
    cdef list keep

    def __init__(self, W, M, d, tau_c, double eps, double l, bint zmode, double inv_dx2):
        W = np.ascontiguousarray(W, dtype=np.float64)
        M = np.ascontiguousarray(M, dtype=np.float64)
        K, C, S = W.shape
        if K > MAXK or C > MAXC or S > MAXC:
            raise ValueError("stencil too large for compiled kernel")
        self.keep = []
        self.plan.S = S
        self.plan.C = C
        self.plan.K = K
        for k in range(K):
            self._sparse(&self.plan.W[k], W[k])
        self._sparse(&self.plan.M, M)
        mask = np.any(M != 0.0, axis=1)
        for r in range(C):
            self.plan.rowmask[r] = 1 if mask[r] else 0
        for k in range(K):
            self.plan.d[k] = d[k]
            self.plan.tc[k] = tau_c[k]
        self.plan.eps = eps
        self.plan.l = l
        self.plan.zmode = zmode
        self.plan.inv_dx2 = inv_dx2

    cdef _sparse(self, Sparse* sp, mat):
        rows, cols = np.nonzero(mat)
        rowptr = np.ascontiguousarray(np.searchsorted(rows, np.arange(mat.shape[0] + 1)), dtype=np.intc)
        col = np.ascontiguousarray(cols, dtype=np.intc)
        val = np.ascontiguousarray(mat[rows, cols], dtype=np.float64)
        if len(val) == 0:
            col = np.zeros(1, dtype=np.intc)
            val = np.zeros(1)
        self.keep.extend([rowptr, col, val])
        cdef int[::1] rp = rowptr
        cdef int[::1] cv = col
        cdef double[::1] vv = val
        sp.rowptr = &rp[0]
        sp.col = &cv[0]
        sp.val = &vv[0]


cdef inline double _eval1(const double* z, double x) nogil:
    return ((z[3] * x + z[2]) * x + z[1]) * x + z[0]


cdef inline double _eval2(const double* z, double x, double y) nogil:
    cdef double row[4]
    cdef int b
    for b in range(4):
        row[b] = ((z[H2[b][0]] * x + z[H2[b][1]]) * x + z[H2[b][2]]) * x + z[H2[b][3]]
    return ((row[3] * y + row[2]) * y + row[1]) * y + row[0]


def reconstruct(stencils, W, M, d, tau_c, double eps, double l, bint zmode, double inv_dx2):
    cdef const double[:, ::1] U = np.ascontiguousarray(stencils, dtype=np.float64)
    cdef _PlanHolder h = _PlanHolder(W, M, d, tau_c, eps, l, zmode, inv_dx2)
    cdef const Plan* pl = &h.plan
    cdef Py_ssize_t P = U.shape[0], i
    cdef int S = pl.S, K = pl.K, C = pl.C
    if U.shape[1] != S:
        raise ValueError("stencil width does not match the candidate matrices")
    coef_a = np.empty((P, C))
    omega_a = np.empty((P, K))
    ind_a = np.empty((P, K))
    tau_a = np.empty(P)
    cdef double[:, ::1] coef = coef_a
    cdef double[:, ::1] omega = omega_a
    cdef double[:, ::1] ind = ind_a
    cdef double[::1] tau = tau_a
    with nogil:
        for i in range(P):
            _recon_one(&U[i, 0], pl, &coef[i, 0], &omega[i, 0], &ind[i, 0], &tau[i])
    return coef_a, omega_a, ind_a, tau_a


def eval_poly_1d(coef, cells, xh):
    cdef const double[:, ::1] z = np.ascontiguousarray(coef, dtype=np.float64)
    cdef const cnp.int64_t[::1] cv = np.ascontiguousarray(cells, dtype=np.int64)
    cdef const double[::1] x = np.ascontiguousarray(xh, dtype=np.float64)
    cdef Py_ssize_t P = x.shape[0], i
    out_a = np.empty(P)
    cdef double[::1] out = out_a
    with nogil:
        for i in range(P):
            out[i] = _eval1(&z[cv[i], 0], x[i])
    return out_a


def eval_poly_2d(coef, cells, xh, yh):
    cdef const double[:, ::1] z = np.ascontiguousarray(coef, dtype=np.float64)
    cdef const cnp.int64_t[::1] cv = np.ascontiguousarray(cells, dtype=np.int64)
    cdef const double[::1] x = np.ascontiguousarray(xh, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(yh, dtype=np.float64)
    cdef Py_ssize_t P = x.shape[0], i
    out_a = np.empty(P)
    cdef double[::1] out = out_a
    with nogil:
        for i in range(P):
            out[i] = _eval2(&z[cv[i], 0], x[i], y[i])
    return out_a


def _pointwise(stencils, xh, yh, W, M, d, tau_c, double eps, double l, bint zmode,
               double inv_dx2, int dim):
    cdef const double[:, ::1] U = np.ascontiguousarray(stencils, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(xh, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(yh, dtype=np.float64)
    cdef _PlanHolder h = _PlanHolder(W, M, d, tau_c, eps, l, zmode, inv_dx2)
    cdef const Plan* pl = &h.plan
    cdef Py_ssize_t P = U.shape[0], i
    cdef int S = pl.S, K = pl.K, C = pl.C
    cdef double coef[16]
    cdef double omega[5]
    cdef double ind[5]
    cdef double tau
    if U.shape[1] != S:
        raise ValueError("stencil width does not match the candidate matrices")
    out_a = np.empty(P)
    cdef double[::1] out = out_a
    with nogil:
        for i in range(P):
            _recon_one(&U[i, 0], pl, coef, omega, ind, &tau)
            if dim == 1:
                out[i] = _eval1(coef, x[i])
            else:
                out[i] = _eval2(coef, x[i], y[i])
    return out_a


def pointwise_1d(stencils, xh, W, M, d, tau_c, eps, l, zmode, inv_dx2):
    return _pointwise(stencils, xh, xh, W, M, d, tau_c, eps, l, zmode, inv_dx2, 1)


def pointwise_2d(stencils, xh, yh, W, M, d, tau_c, eps, l, zmode, inv_dx2):
    return _pointwise(stencils, xh, yh, W, M, d, tau_c, eps, l, zmode, inv_dx2, 2)

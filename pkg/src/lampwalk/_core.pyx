# cython: boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled hot kernels: closed-path DFS and lamplighter operator fan-out.

The pure-Python twin lives in ``_core_py``; ``_backend`` picks one at
import time.  Both must return bit-compatible results (summation order is
identical).
"""

import numpy as np

from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef double _dfs(int v, int left, double w, unsigned long long mask,
                 int root, const long long* indptr, const long long* nbr,
                 const double* prob, const double* inv_m_pow) noexcept nogil:
    cdef double acc = 0.0
    cdef long long e
    cdef int u
    if left == 0:
        if v == root:
            return w * inv_m_pow[__builtin_popcountll(mask)]
        return 0.0
    for e in range(indptr[v], indptr[v + 1]):
        u = <int> nbr[e]
        acc += _dfs(u, left - 1, w * prob[e], mask | (1ULL << u),
                    root, indptr, nbr, prob, inv_m_pow)
    return acc


def path_sum_float(int root, int n, long long[::1] indptr,
                   long long[::1] nbr, double[::1] prob,
                   double[::1] inv_m_pow):
    """Sum over closed n-paths of prod(p) * m^-(#distinct vertices).

    Vertex ids must be local indices < 64 (visited set is a bitmask).
    """
    if n == 0:
        return 1.0
    return _dfs(root, n, 1.0, 1ULL << root, root,
                &indptr[0], &nbr[0], &prob[0], &inv_m_pow[0])


def lamp_apply(long long[::1] keys, double[::1] amps, int nv, int m,
               long long[::1] indptr, long long[::1] nbr, double[::1] wts,
               long long[::1] stride):
    """One step of the lamplighter operator on an encoded sparse vector.

    Keys are ``code * nv + walker`` with ``code`` a base-m integer over the
    codec sites; ``wts`` already includes the 1/m^2 lamp factor.
    """
    cdef unordered_map[long long, double] acc
    cdef long long key, code, base_x, base, code2, e
    cdef int x, y, dx, dy, lx, ly
    cdef double a, w
    cdef Py_ssize_t k
    for k in range(keys.shape[0]):
        key = keys[k]
        x = <int> (key % nv)
        code = key // nv
        a = amps[k]
        dx = <int> ((code // stride[x]) % m)
        base_x = code - dx * stride[x]
        for e in range(indptr[x], indptr[x + 1]):
            y = <int> nbr[e]
            w = a * wts[e]
            dy = <int> ((base_x // stride[y]) % m)
            base = base_x - dy * stride[y]
            for lx in range(m):
                for ly in range(m):
                    code2 = base + lx * stride[x] + ly * stride[y]
                    acc[code2 * nv + y] += w
    out_keys = np.empty(acc.size(), dtype=np.int64)
    out_amps = np.empty(acc.size(), dtype=np.float64)
    cdef long long[::1] ok = out_keys
    cdef double[::1] oa = out_amps
    cdef Py_ssize_t i = 0
    for it in acc:
        ok[i] = it.first
        oa[i] = it.second
        i += 1
    # Deterministic output order regardless of hash-map iteration.
    order = np.argsort(out_keys, kind="stable")
    return out_keys[order], out_amps[order]

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels.  Same contracts as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libcpp.vector cimport vector
from cpython.bytes cimport PyBytes_FromStringAndSize

cnp.import_array()


cdef void _pair(const unsigned char[::1] down, long long[::1] partner, long long[::1] stack) noexcept nogil:
    cdef Py_ssize_t n = down.shape[0]
    cdef Py_ssize_t i, top = 0
    cdef long long j
    for i in range(n):
        partner[i] = -1
    for i in range(n):
        if down[i]:
            if top > 0:
                top -= 1
                j = stack[top]
                partner[i] = j
                partner[j] = i
        else:
            stack[top] = i
            top += 1


def pair_strands(down):
    cdef const unsigned char[::1] d = np.ascontiguousarray(down, dtype=np.uint8)
    cdef Py_ssize_t n = d.shape[0]
    partner = np.empty(n, dtype=np.int64)
    stack = np.empty(max(n, 1), dtype=np.int64)
    _pair(d, partner, stack)
    return partner


def enumerate_hw_downs(sizes, Py_ssize_t n_down):
    cdef long long[::1] sz = np.ascontiguousarray(sizes, dtype=np.int64)
    cdef Py_ssize_t L = sz.shape[0]
    cdef Py_ssize_t x, i
    cdef long long k
    cdef long long[::1] suffix = np.zeros(L + 1, dtype=np.int64)
    for x in range(L - 1, -1, -1):
        suffix[x] = suffix[x + 1] + sz[x]
    if n_down < 0 or 2 * n_down > suffix[0]:
        return np.zeros((0, L), dtype=np.int32)
    cdef long long[::1] cur = np.zeros(L + 1, dtype=np.int64)
    cdef long long[::1] avail = np.zeros(L + 1, dtype=np.int64)
    cdef long long[::1] rem = np.zeros(L + 1, dtype=np.int64)
    cdef long long[::1] choice = np.full(L + 1, -1, dtype=np.int64)
    cdef vector[int] out
    cdef Py_ssize_t count = 0
    rem[0] = n_down
    x = 0
    while x >= 0:
        if rem[x] == 0:
            for i in range(x):
                out.push_back(<int>cur[i])
            for i in range(x, L):
                out.push_back(0)
            count += 1
            x -= 1
            continue
        if x == L or 2 * rem[x] > avail[x] + suffix[x]:
            x -= 1
            continue
        choice[x] += 1
        k = choice[x]
        if k > sz[x] or k > avail[x] or k > rem[x]:
            x -= 1
            continue
        cur[x] = k
        avail[x + 1] = avail[x] + sz[x] - 2 * k
        rem[x + 1] = rem[x] - k
        choice[x + 1] = -1
        x += 1
    result = np.empty((count, L), dtype=np.int32)
    cdef int[:, ::1] res = result
    cdef Py_ssize_t r, c
    for r in range(count):
        for c in range(L):
            res[r, c] = out[r * L + c]
    return result


def assemble_half(states, couplings):
    cdef const unsigned char[:, ::1] st = np.ascontiguousarray(states, dtype=np.uint8)
    cdef const double[::1] J = np.ascontiguousarray(couplings, dtype=np.float64)
    cdef Py_ssize_t n = st.shape[0]
    cdef Py_ssize_t N = st.shape[1]
    cdef Py_ssize_t a, x, i
    cdef long long p, q, lo, hi
    cdef double diag
    cdef dict index = {}
    for i in range(n):
        index[PyBytes_FromStringAndSize(<const char*>&st[i, 0], N)] = i
    cdef long long[::1] partner = np.empty(max(N, 1), dtype=np.int64)
    cdef long long[::1] stack = np.empty(max(N, 1), dtype=np.int64)
    cdef unsigned char[::1] scratch = np.empty(max(N, 1), dtype=np.uint8)
    cdef vector[long long] rows
    cdef vector[long long] cols
    cdef vector[double] vals
    for a in range(n):
        _pair(st[a], partner, stack)
        diag = 0.0
        for x in range(N - 1):
            p = partner[x]
            q = partner[x + 1]
            if p == x + 1:
                diag += 4.0 * J[x]
                continue
            if p < 0 and q < 0:
                continue
            for i in range(N):
                scratch[i] = st[a, i]
            scratch[x] = 0
            scratch[x + 1] = 1
            if p >= 0 and q >= 0:
                if p < q:
                    lo = p
                    hi = q
                else:
                    lo = q
                    hi = p
                scratch[lo] = 0
                scratch[hi] = 1
            elif p >= 0:
                scratch[p] = 0
            else:
                scratch[q] = 0
            rows.push_back(index[PyBytes_FromStringAndSize(<const char*>&scratch[0], N)])
            cols.push_back(a)
            vals.push_back(-2.0 * J[x])
        if diag != 0.0:
            rows.push_back(a)
            cols.push_back(a)
            vals.push_back(diag)
    cdef Py_ssize_t m = rows.size()
    r_out = np.empty(m, dtype=np.int64)
    c_out = np.empty(m, dtype=np.int64)
    v_out = np.empty(m, dtype=np.float64)
    cdef long long[::1] rv = r_out
    cdef long long[::1] cv = c_out
    cdef double[::1] vv = v_out
    for i in range(m):
        rv[i] = rows[i]
        cv[i] = cols[i]
        vv[i] = vals[i]
    return r_out, c_out, v_out

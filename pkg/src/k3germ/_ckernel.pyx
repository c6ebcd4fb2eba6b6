# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the sparse kernels in ``_pykernel``.

Same packed-key layout and semantics.  Index bookkeeping and loop control
run in C; coefficients remain Python objects (gmpy2.mpq), so the arithmetic
itself still dispatches through the object protocol.
"""

from libc.stdlib cimport malloc, free
from cpython.dict cimport PyDict_GetItem, PyDict_SetItem
from cpython.ref cimport PyObject

cdef long long DEG_SHIFT = 48
cdef long long SLOT = 0xFFFF
# dense accumulators above this many slots fall back to the dict path
cdef Py_ssize_t MAX_DENSE = 50000


cdef inline Py_ssize_t dense_index(long long key):
    # position of a monomial among all 3-variable monomials ordered by degree
    cdef long long deg = key >> DEG_SHIFT
    cdef long long e0 = (key >> 32) & SLOT
    cdef long long e2 = key & SLOT
    cdef long long r = deg - e0
    return <Py_ssize_t>(deg * (deg + 1) * (deg + 2) // 6 + r * (r + 1) // 2 + e2)


def mul(dict a, dict b, limit):
    if len(a) > len(b):
        a, b = b, a
    if not a:
        return {}
    cdef Py_ssize_t na = len(a), nb = len(b), i, j, idx, size
    cdef long long lim, room, ka, k, T
    cdef long long *akeys
    cdef long long *bkeys
    cdef list acoef, bcoef, acc, touched_keys
    cdef object ca, prev
    cdef dict out
    bitems = sorted(b.items())
    if limit is not None and limit < (1 << 62):
        T = (<long long>limit) >> DEG_SHIFT
        size = <Py_ssize_t>(T * (T + 1) * (T + 2) // 6)
    if limit is None or limit >= (1 << 62) or size > MAX_DENSE:
        out = {}
        for ka_obj, ca in a.items():
            for kb_obj, cb in bitems:
                k_obj = ka_obj + kb_obj
                p = PyDict_GetItem(out, k_obj)
                if p is NULL:
                    out[k_obj] = ca * cb
                else:
                    out[k_obj] = (<object>p) + ca * cb
        return {kk: c for kk, c in out.items() if c}

    lim = limit
    akeys = <long long *>malloc(na * sizeof(long long))
    bkeys = <long long *>malloc(nb * sizeof(long long))
    if akeys is NULL or bkeys is NULL:
        free(akeys)
        free(bkeys)
        raise MemoryError()
    try:
        acoef = []
        i = 0
        for kobj, c in a.items():
            akeys[i] = kobj
            acoef.append(c)
            i += 1
        bcoef = []
        j = 0
        for kobj, c in bitems:
            bkeys[j] = kobj
            bcoef.append(c)
            j += 1
        acc = [None] * size
        touched_keys = []
        for i in range(na):
            ka = akeys[i]
            room = lim - ka
            ca = acoef[i]
            for j in range(nb):
                if bkeys[j] >= room:
                    break
                k = ka + bkeys[j]
                idx = dense_index(k)
                prev = acc[idx]
                if prev is None:
                    acc[idx] = ca * bcoef[j]
                    touched_keys.append(k)
                else:
                    acc[idx] = prev + ca * bcoef[j]
        out = {}
        for k_obj in touched_keys:
            c = acc[dense_index(k_obj)]
            if c:
                out[k_obj] = c
        return out
    finally:
        free(akeys)
        free(bkeys)


def axpy(dict acc, c, dict x, limit):
    cdef long long lim = -1
    cdef bint bounded = limit is not None
    if bounded:
        lim = limit
    for k, v in x.items():
        if bounded and <long long>k >= lim:
            continue
        p = PyDict_GetItem(acc, k)
        if p is NULL:
            s = c * v
        else:
            s = (<object>p) + c * v
        if s:
            acc[k] = s
        elif p is not NULL:
            del acc[k]
    return acc

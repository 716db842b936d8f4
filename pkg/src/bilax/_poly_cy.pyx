# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term-dict kernels.

Same contract as ``_poly_pure``: dicts from exponent tuples to exact rational
coefficients, inputs never mutated unless the name says so, no zero
coefficients stored.  Coefficients stay generic Python objects (Fraction or
gmpy2.mpq) so exactness is untouched; the win is removing interpreter
overhead from the tuple/dict inner loops.
"""

cimport cython
from cpython.tuple cimport PyTuple_GET_ITEM, PyTuple_GET_SIZE, PyTuple_New, PyTuple_SET_ITEM
from cpython.ref cimport Py_INCREF


cdef inline tuple _tuple_add(tuple ea, tuple eb):
    cdef Py_ssize_t n = PyTuple_GET_SIZE(ea)
    cdef tuple out = PyTuple_New(n)
    cdef Py_ssize_t i
    cdef object s
    for i in range(n):
        s = (<object>PyTuple_GET_ITEM(ea, i)) + (<object>PyTuple_GET_ITEM(eb, i))
        Py_INCREF(s)
        PyTuple_SET_ITEM(out, i, s)
    return out


def mul(dict a, dict b):
    """Product of two term dicts."""
    cdef dict out = {}
    cdef tuple ea, eb, e
    cdef object ca, cb, c0, c
    if not a or not b:
        return out
    if len(a) < len(b):
        a, b = b, a
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _tuple_add(ea, eb)
            c0 = out.get(e)
            if c0 is None:
                out[e] = ca * cb
            else:
                c = c0 + ca * cb
                if c:
                    out[e] = c
                else:
                    del out[e]
    return out


def mul_acc(dict out, dict a, dict b):
    """In-place ``out += a*b``."""
    cdef tuple ea, eb, e
    cdef object ca, cb, c0, c
    if not a or not b:
        return
    if len(a) < len(b):
        a, b = b, a
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _tuple_add(ea, eb)
            c0 = out.get(e)
            if c0 is None:
                out[e] = ca * cb
            else:
                c = c0 + ca * cb
                if c:
                    out[e] = c
                else:
                    del out[e]


def add(dict a, dict b):
    """Sum of two term dicts."""
    cdef dict out = dict(a)
    cdef tuple e
    cdef object c, c0
    for e, c in b.items():
        c0 = out.get(e)
        if c0 is None:
            out[e] = c
        else:
            c = c0 + c
            if c:
                out[e] = c
            else:
                del out[e]
    return out


def sub(dict a, dict b):
    """Difference of two term dicts."""
    cdef dict out = dict(a)
    cdef tuple e
    cdef object c, c0
    for e, c in b.items():
        c0 = out.get(e)
        if c0 is None:
            out[e] = -c
        else:
            c = c0 - c
            if c:
                out[e] = c
            else:
                del out[e]
    return out


def neg(dict a):
    cdef dict out = {}
    cdef tuple e
    cdef object c
    for e, c in a.items():
        out[e] = -c
    return out


def scale(dict a, c):
    """Multiply every coefficient by the rational ``c``."""
    cdef dict out = {}
    cdef tuple e
    cdef object v
    if not c:
        return out
    for e, v in a.items():
        out[e] = c * v
    return out


def mul_term(dict a, tuple exp, c):
    """Multiply by the single monomial ``c * x^exp``."""
    cdef dict out = {}
    cdef tuple e
    cdef object v
    if not c:
        return out
    for e, v in a.items():
        out[_tuple_add(e, exp)] = c * v
    return out


def diff(dict a, Py_ssize_t i):
    """Partial derivative with respect to variable slot ``i``."""
    cdef dict out = {}
    cdef tuple e
    cdef object c, k
    for e, c in a.items():
        k = <object>PyTuple_GET_ITEM(e, i)
        if k:
            out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
    return out

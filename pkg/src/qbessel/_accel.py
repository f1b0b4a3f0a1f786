"""
Hot summation kernels, compiled with numba when available.

Every kernel accumulates with Neumaier's compensated summation in a fixed,
ascending order of the summation index.  The pure-numpy fallback runs the same
operation sequence vectorised across outputs, so both backends produce
bit-identical results.

Set ``QBESSEL_DISABLE_NUMBA=1`` to force the numpy fallback.
"""
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kw):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


ENV_FLAG = "QBESSEL_DISABLE_NUMBA"


def _env_disabled():
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


# --------------------------------------------------------------------------
# numba kernels (fastmath off: IEEE semantics, no reassociation or contraction)

@njit(cache=True)
def _nb_compensated_sum(x):
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


@njit(cache=True)
def _nb_correlate(table, offset, w, n_out):
    # out[i] = sum_j w[j] * table[offset + i + j]
    out = np.empty(n_out)
    m = w.shape[0]
    for i in range(n_out):
        s = 0.0
        c = 0.0
        base = offset + i
        for j in range(m):
            v = w[j] * table[base + j]
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        out[i] = s + c
    return out


@njit(cache=True)
def _nb_gram(table, off_a, n_a, off_b, n_b, h):
    # G[i, l] = sum_t (table[off_a + i + t] * table[off_b + l + t]) * h[t]
    out = np.empty((n_a, n_b))
    m = h.shape[0]
    for i in range(n_a):
        for l in range(n_b):
            s = 0.0
            c = 0.0
            for t in range(m):
                v = (table[off_a + i + t] * table[off_b + l + t]) * h[t]
                u = s + v
                if abs(s) >= abs(v):
                    c += (s - u) + v
                else:
                    c += (v - u) + s
                s = u
            out[i, l] = s + c
    return out


@njit(cache=True)
def _nb_matvec(mat, w):
    # out[i] = sum_j mat[i, j] * w[j]
    n, m = mat.shape
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        c = 0.0
        for j in range(m):
            v = mat[i, j] * w[j]
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        out[i] = s + c
    return out


# --------------------------------------------------------------------------
# numpy fallback: identical operation order, vectorised over outputs

def _np_accumulate(s, c, v):
    t = s + v
    big = np.abs(s) >= np.abs(v)
    c = c + np.where(big, (s - t) + v, (v - t) + s)
    return t, c


def _np_compensated_sum(x):
    s = 0.0
    c = 0.0
    for v in np.asarray(x, dtype=float):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return float(s + c)


def _np_correlate(table, offset, w, n_out):
    s = np.zeros(n_out)
    c = np.zeros(n_out)
    for j in range(w.shape[0]):
        v = w[j] * table[offset + j:offset + j + n_out]
        s, c = _np_accumulate(s, c, v)
    return s + c


def _np_gram(table, off_a, n_a, off_b, n_b, h):
    s = np.zeros((n_a, n_b))
    c = np.zeros((n_a, n_b))
    for t in range(h.shape[0]):
        col_a = table[off_a + t:off_a + t + n_a]
        col_b = table[off_b + t:off_b + t + n_b]
        v = (col_a[:, None] * col_b[None, :]) * h[t]
        s, c = _np_accumulate(s, c, v)
    return s + c


def _np_matvec(mat, w):
    n, m = mat.shape
    s = np.zeros(n)
    c = np.zeros(n)
    for j in range(m):
        s, c = _np_accumulate(s, c, mat[:, j] * w[j])
    return s + c


class _Backend:
    def __init__(self, name, compensated_sum, correlate, gram, matvec):
        self.name = name
        self.compensated_sum = compensated_sum
        self.correlate = correlate
        self.gram = gram
        self.matvec = matvec

    def __repr__(self):
        return f"<qbessel kernel backend {self.name!r}>"


def _wrap_nb_sum(x):
    return float(_nb_compensated_sum(np.ascontiguousarray(x, dtype=np.float64)))


def _wrap_nb_correlate(table, offset, w, n_out):
    return _nb_correlate(np.ascontiguousarray(table, dtype=np.float64), int(offset),
                         np.ascontiguousarray(w, dtype=np.float64), int(n_out))


def _wrap_nb_gram(table, off_a, n_a, off_b, n_b, h):
    return _nb_gram(np.ascontiguousarray(table, dtype=np.float64), int(off_a), int(n_a),
                    int(off_b), int(n_b), np.ascontiguousarray(h, dtype=np.float64))


def _wrap_nb_matvec(mat, w):
    return _nb_matvec(np.ascontiguousarray(mat, dtype=np.float64),
                      np.ascontiguousarray(w, dtype=np.float64))


NUMPY_BACKEND = _Backend("numpy", _np_compensated_sum, _np_correlate, _np_gram, _np_matvec)
NUMBA_BACKEND = (_Backend("numba", _wrap_nb_sum, _wrap_nb_correlate, _wrap_nb_gram, _wrap_nb_matvec)
                 if HAVE_NUMBA else None)

backend = NUMPY_BACKEND if (_env_disabled() or NUMBA_BACKEND is None) else NUMBA_BACKEND


def compensated_sum(x):
    return backend.compensated_sum(x)


def correlate(table, offset, w, n_out):
    return backend.correlate(table, offset, w, n_out)


def gram(table, off_a, n_a, off_b, n_b, h):
    return backend.gram(table, off_a, n_a, off_b, n_b, h)


def matvec(mat, w):
    return backend.matvec(mat, w)

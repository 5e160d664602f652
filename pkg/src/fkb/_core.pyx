# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the per-vector hot path: dense affine maps, their
gradients, and elementwise activations."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, tanh

cnp.import_array()

ACT_LINEAR = 0
ACT_RELU = 1
ACT_LEAKYRELU = 2
ACT_SIGMOID = 3
ACT_TANH = 4
ACT_SOFTMAX = 5


def affine(double[:, ::1] W, double[::1] b, double[::1] x):
    cdef Py_ssize_t n_out = W.shape[0]
    cdef Py_ssize_t n_in = W.shape[1]
    if n_out * n_in >= 4096:
        # large matvecs are BLAS territory; the explicit loop only wins on
        # the small per-vector shapes typical of embedded hosts
        return np.asarray(W) @ np.asarray(x) + np.asarray(b)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n_out, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n_out):
        acc = b[i]
        for j in range(n_in):
            acc += W[i, j] * x[j]
        o[i] = acc
    return out


def affine_grads(double[:, ::1] W, double[::1] x, double[::1] delta):
    cdef Py_ssize_t n_out = W.shape[0]
    cdef Py_ssize_t n_in = W.shape[1]
    cdef cnp.ndarray[double, ndim=2] dW = np.empty((n_out, n_in), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] db = np.empty(n_out, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] dx = np.zeros(n_in, dtype=np.float64)
    cdef double[:, ::1] dWv = dW
    cdef double[::1] dbv = db
    cdef double[::1] dxv = dx
    cdef Py_ssize_t i, j
    cdef double d
    for i in range(n_out):
        d = delta[i]
        dbv[i] = d
        for j in range(n_in):
            dWv[i, j] = d * x[j]
            dxv[j] += W[i, j] * d
    return dW, db, dx


def act_apply(int kind, double alpha, double[::1] z):
    cdef Py_ssize_t n = z.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    if kind == 5:  # softmax delegates to the shared max-subtracted routine
        return softmax(z)
    if n >= 128 and (kind == 3 or kind == 4):
        # vectorized transcendentals beat the scalar loop at larger widths
        if kind == 3:
            return 1.0 / (1.0 + np.exp(-np.asarray(z)))
        return np.tanh(np.asarray(z))
    for i in range(n):
        o[i] = _act1(kind, alpha, z[i])
    return out


def act_deriv(int kind, double alpha, double[::1] z):
    cdef Py_ssize_t n = z.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double s
    if kind == 5:
        raise ValueError("no standalone derivative for activation kind 5")
    if kind < 0 or kind > 4:
        raise ValueError(f"unknown activation kind {kind}")
    for i in range(n):
        if kind == 0:
            o[i] = 1.0
        elif kind == 1:
            o[i] = 1.0 if z[i] > 0.0 else 0.0
        elif kind == 2:
            o[i] = 1.0 if z[i] > 0.0 else alpha
        elif kind == 3:
            s = 1.0 / (1.0 + exp(-z[i]))
            o[i] = s * (1.0 - s)
        else:
            s = tanh(z[i])
            o[i] = 1.0 - s * s
    return out


def softmax(double[::1] z):
    cdef Py_ssize_t n = z.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double m = z[0]
    cdef double total = 0.0
    for i in range(1, n):
        if z[i] > m:
            m = z[i]
    for i in range(n):
        o[i] = exp(z[i] - m)
        total += o[i]
    for i in range(n):
        o[i] /= total
    return out


cdef inline double _act1(int kind, double alpha, double v) except? -1e308:
    if kind == 0:
        return v
    if kind == 1:
        return v if v > 0.0 else 0.0
    if kind == 2:
        return v if v >= 0.0 else alpha * v
    if kind == 3:
        return 1.0 / (1.0 + exp(-v))
    if kind == 4:
        return tanh(v)
    raise ValueError(f"unknown activation kind {kind}")

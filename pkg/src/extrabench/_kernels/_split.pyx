# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled split-scan kernels.

Same contract and, importantly, the same accumulation order as the
numpy backend in _split_py: a single left-to-right pass over the sorted
arrays with running sums, first position wins gain ties.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def best_split_sse(
    cnp.float64_t[::1] x,
    cnp.float64_t[::1] y,
    cnp.float64_t[::1] w,
    Py_ssize_t min_samples_leaf,
):
    cdef Py_ssize_t n = x.shape[0]
    if n < 2 * min_samples_leaf or n < 2:
        return -1, 0.0

    cdef double total_wy = 0.0
    cdef double total_w = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total_wy += w[i] * y[i]
        total_w += w[i]

    cdef double parent = (total_wy * total_wy) / total_w
    cdef double left_wy = 0.0
    cdef double left_w = 0.0
    cdef double right_wy, right_w, gain
    cdef double best_gain = 0.0
    cdef Py_ssize_t best_pos = -1
    cdef Py_ssize_t lo = min_samples_leaf - 1
    cdef Py_ssize_t hi = n - min_samples_leaf  # exclusive upper bound on pos

    for i in range(n - 1):
        left_wy += w[i] * y[i]
        left_w += w[i]
        if i < lo or i >= hi:
            continue
        if not x[i + 1] > x[i]:
            continue
        right_wy = total_wy - left_wy
        right_w = total_w - left_w
        gain = (left_wy * left_wy) / left_w + (right_wy * right_wy) / right_w - parent
        if gain > best_gain:
            best_gain = gain
            best_pos = i

    if best_pos < 0:
        return -1, 0.0
    return best_pos, best_gain


def best_split_grad_hess(
    cnp.float64_t[::1] x,
    cnp.float64_t[::1] g,
    cnp.float64_t[::1] h,
    double reg_lambda,
    double min_child_weight,
    Py_ssize_t min_samples_leaf,
):
    cdef Py_ssize_t n = x.shape[0]
    if n < 2 * min_samples_leaf or n < 2:
        return -1, 0.0

    cdef double total_g = 0.0
    cdef double total_h = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total_g += g[i]
        total_h += h[i]

    cdef double parent = (total_g * total_g) / (total_h + reg_lambda)
    cdef double left_g = 0.0
    cdef double left_h = 0.0
    cdef double right_g, right_h, gain
    cdef double best_gain = 0.0
    cdef Py_ssize_t best_pos = -1
    cdef Py_ssize_t lo = min_samples_leaf - 1
    cdef Py_ssize_t hi = n - min_samples_leaf

    for i in range(n - 1):
        left_g += g[i]
        left_h += h[i]
        if i < lo or i >= hi:
            continue
        if not x[i + 1] > x[i]:
            continue
        if left_h < min_child_weight:
            continue
        right_g = total_g - left_g
        right_h = total_h - left_h
        if right_h < min_child_weight:
            continue
        gain = 0.5 * (
            (left_g * left_g) / (left_h + reg_lambda)
            + (right_g * right_g) / (right_h + reg_lambda)
            - parent
        )
        if gain > best_gain:
            best_gain = gain
            best_pos = i

    if best_pos < 0:
        return -1, 0.0
    return best_pos, best_gain

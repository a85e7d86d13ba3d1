# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled histogram kernels for the tree learners.

Each routine performs the same floating-point operations in the same order
as its counterpart in ``_hist_py`` so both backends give identical trees.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def build_histogram(const unsigned char[:, ::1] bins, const cnp.int64_t[::1] rows,
                    const double[::1] grad, const double[::1] hess, int n_bins):
    cdef Py_ssize_t d = bins.shape[1]
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t i, j, r
    cdef unsigned char b
    cdef double g, h
    out = np.zeros((d, n_bins, 2), dtype=np.float64)
    cdef double[:, :, ::1] hist = out
    with nogil:
        for i in range(m):
            r = rows[i]
            g = grad[r]
            h = hess[r]
            for j in range(d):
                b = bins[r, j]
                hist[j, b, 0] += g
                hist[j, b, 1] += h
    return out


def best_split(const double[:, :, ::1] hist, const cnp.int32_t[::1] n_bins_feature,
               double l2, double min_child_weight, double min_gain):
    """Return ``(gain, feature, bin)``; feature is -1 when no split qualifies."""
    cdef Py_ssize_t d = hist.shape[0]
    cdef Py_ssize_t nb = hist.shape[1]
    cdef Py_ssize_t j, b
    cdef double G, H, GL, HL, GR, HR, parent, gain
    cdef double best_gain = min_gain
    cdef Py_ssize_t best_feature = -1, best_bin = -1
    for j in range(d):
        G = 0.0
        H = 0.0
        for b in range(nb):
            G += hist[j, b, 0]
            H += hist[j, b, 1]
        parent = G * G / (H + l2)
        GL = 0.0
        HL = 0.0
        for b in range(n_bins_feature[j] - 1):
            GL += hist[j, b, 0]
            HL += hist[j, b, 1]
            GR = G - GL
            HR = H - HL
            if HL < min_child_weight or HR < min_child_weight:
                continue
            gain = GL * GL / (HL + l2) + GR * GR / (HR + l2) - parent
            if gain > best_gain:
                best_gain = gain
                best_feature = j
                best_bin = b
    return best_gain, best_feature, best_bin


def predict_tree(const unsigned char[:, ::1] bins, const cnp.int32_t[::1] feature,
                 const cnp.int32_t[::1] split_bin, const cnp.int32_t[::1] left,
                 const cnp.int32_t[::1] right, const double[::1] value,
                 double scale, double[::1] out):
    """Add ``scale * leaf value`` of every row to ``out`` in place."""
    cdef Py_ssize_t n = bins.shape[0]
    cdef Py_ssize_t i
    cdef int node
    with nogil:
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if bins[i, feature[node]] <= split_bin[node]:
                    node = left[node]
                else:
                    node = right[node]
            out[i] += scale * value[node]

"""Pure numpy versions of the histogram kernels.

Summation order mirrors the compiled module (sequential over rows, then over
bins) so trees grown with either backend are bit-identical.
"""

import numpy as np


def build_histogram(bins, rows, grad, hess, n_bins):
    d = bins.shape[1]
    m = len(rows)
    if m == 0:
        return np.zeros((d, n_bins, 2))
    flat = (bins[rows].astype(np.int64) + np.arange(d, dtype=np.int64) * n_bins).ravel()
    g = np.repeat(grad[rows], d)
    h = np.repeat(hess[rows], d)
    out = np.empty((d, n_bins, 2))
    out[:, :, 0] = np.bincount(flat, weights=g, minlength=d * n_bins).reshape(d, n_bins)
    out[:, :, 1] = np.bincount(flat, weights=h, minlength=d * n_bins).reshape(d, n_bins)
    return out


def best_split(hist, n_bins_feature, l2, min_child_weight, min_gain):
    cg = np.cumsum(hist[:, :, 0], axis=1)
    ch = np.cumsum(hist[:, :, 1], axis=1)
    G = cg[:, -1:]
    H = ch[:, -1:]
    parent = G * G / (H + l2)
    GL, HL = cg[:, :-1], ch[:, :-1]
    GR, HR = G - GL, H - HL
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = GL * GL / (HL + l2) + GR * GR / (HR + l2) - parent
    nb = hist.shape[1]
    valid = np.arange(nb - 1)[None, :] < (np.asarray(n_bins_feature)[:, None] - 1)
    valid &= (HL >= min_child_weight) & (HR >= min_child_weight)
    gain = np.where(valid & (gain > min_gain), gain, -np.inf)
    if gain.size == 0 or not np.isfinite(gain).any():
        return min_gain, -1, -1
    k = int(np.argmax(gain))
    j, b = divmod(k, nb - 1)
    return float(gain[j, b]), j, b


def predict_tree(bins, feature, split_bin, left, right, value, scale, out):
    n = bins.shape[0]
    node = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    while active.size:
        nd = node[active]
        f = feature[nd]
        internal = f >= 0
        active, nd, f = active[internal], nd[internal], f[internal]
        go_left = bins[active, f] <= split_bin[nd]
        node[active] = np.where(go_left, left[nd], right[nd])
    out += scale * value[node]

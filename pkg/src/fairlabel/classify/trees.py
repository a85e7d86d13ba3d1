"""Histogram-binned regression trees: a single classification tree and
gradient-boosted trees on the logistic loss.

The per-node work (histogram build, split scan, traversal) is delegated to
the kernel module picked in ``_kernels``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels


def compute_bin_edges(X: np.ndarray, max_bins: int = 255) -> list[np.ndarray]:
    """Split thresholds per feature; a value ``x`` lands in bin ``#(edges < x)``."""
    if not 2 <= max_bins <= 255:
        raise ValueError("max_bins must be in [2, 255]")
    edges = []
    for j in range(X.shape[1]):
        u = np.unique(X[:, j])
        if len(u) > max_bins:
            q = np.quantile(X[:, j], np.linspace(0, 1, max_bins + 1)[1:-1])
            u = np.unique(np.concatenate([u[:1], q, u[-1:]]))
        edges.append((u[:-1] + u[1:]) / 2.0)
    return edges


def apply_bins(X: np.ndarray, edges: list[np.ndarray]) -> np.ndarray:
    out = np.empty(X.shape, dtype=np.uint8)
    for j, e in enumerate(edges):
        out[:, j] = np.searchsorted(e, X[:, j], side="left")
    return np.ascontiguousarray(out)


@dataclass(frozen=True)
class Tree:
    """Flat tree arrays; ``feature[k] == -1`` marks a leaf."""

    feature: np.ndarray
    split_bin: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def add_to(self, bins, scale, out, kern=None):
        kern = kern or _kernels.kernels
        kern.predict_tree(bins, self.feature, self.split_bin, self.left, self.right,
                          self.value, float(scale), out)


def grow_tree(bins, grad, hess, *, max_depth, l2, min_child_weight, min_gain=1e-12,
              n_bins_feature, kern=None):
    """Grow one tree breadth-first.

    Returns the tree and a list of ``(leaf value, row positions)`` pairs so the
    caller can update training scores without a traversal.
    """
    kern = kern or _kernels.kernels
    n_bins = int(max(n_bins_feature.max(), 1))
    feature, split_bin, left, right, value = [], [], [], [], []
    leaves = []

    def new_node():
        feature.append(-1)
        split_bin.append(-1)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    queue = [(new_node(), np.arange(bins.shape[0], dtype=np.int64), 0)]
    head = 0
    while head < len(queue):
        node, rows, depth = queue[head]
        head += 1
        f = -1
        if depth < max_depth and len(rows) >= 2:
            hist = kern.build_histogram(bins, rows, grad, hess, n_bins)
            _, f, b = kern.best_split(hist, n_bins_feature, l2, min_child_weight, min_gain)
        if f >= 0:
            go_left = bins[rows, f] <= b
            lnode, rnode = new_node(), new_node()
            feature[node], split_bin[node] = int(f), int(b)
            left[node], right[node] = lnode, rnode
            queue.append((lnode, rows[go_left], depth + 1))
            queue.append((rnode, rows[~go_left], depth + 1))
        else:
            v = -float(np.sum(grad[rows])) / (float(np.sum(hess[rows])) + l2)
            value[node] = v
            leaves.append((v, rows))
    tree = Tree(
        np.array(feature, dtype=np.int32),
        np.array(split_bin, dtype=np.int32),
        np.array(left, dtype=np.int32),
        np.array(right, dtype=np.int32),
        np.array(value, dtype=np.float64),
    )
    return tree, leaves


def _n_bins_feature(edges):
    return np.array([len(e) + 1 for e in edges], dtype=np.int32)


def fit_boosted(X, y, *, n_rounds=100, max_depth=3, learning_rate=0.1, l2=1.0,
                min_child_weight=1.0, max_bins=255, kern=None):
    """Newton-boosted trees on the logistic loss.

    Returns ``(edges, trees, base_score)``; the raw score of a row is
    ``base_score + learning_rate * sum(tree values)``.
    """
    y = np.asarray(y, dtype=np.float64)
    edges = compute_bin_edges(X, max_bins)
    bins = apply_bins(X, edges)
    nbf = _n_bins_feature(edges)
    p0 = float(np.clip(y.mean(), 1e-6, 1 - 1e-6))
    base = float(np.log(p0 / (1 - p0)))
    F = np.full(len(y), base)
    trees = []
    for _ in range(n_rounds):
        p = 1.0 / (1.0 + np.exp(-F))
        grad = p - y
        hess = np.maximum(p * (1.0 - p), 1e-16)
        tree, leaves = grow_tree(bins, grad, hess, max_depth=max_depth, l2=l2,
                                 min_child_weight=min_child_weight, n_bins_feature=nbf,
                                 kern=kern)
        for v, rows in leaves:
            F[rows] += learning_rate * v
        trees.append(tree)
    return edges, trees, base


def fit_single_tree(X, y, *, max_depth=8, max_bins=255, kern=None):
    """Variance-reduction classification tree whose leaves hold the positive fraction."""
    y = np.asarray(y, dtype=np.float64)
    edges = compute_bin_edges(X, max_bins)
    bins = apply_bins(X, edges)
    tree, _ = grow_tree(bins, -y, np.ones_like(y), max_depth=max_depth, l2=0.0,
                        min_child_weight=1.0, n_bins_feature=_n_bins_feature(edges),
                        kern=kern)
    return edges, tree

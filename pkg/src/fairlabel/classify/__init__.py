"""Binary classifiers used by the debiasers and by downstream evaluation.

Three interchangeable backends share one interface::

    model = fit(ClassifierSpec(kind="gbt"), dataset)
    scores = predict_proba(model, model.design(dataset))
    labels = predict(model, X, threshold=0.5)   # 1 iff score > threshold
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

import numpy as np

from ..data import TabularDataset
from ..errors import DegenerateTrainingError, DimensionMismatchError, InvalidSpecError
from . import _kernels
from .logistic import fit_logistic, sigmoid
from .trees import Tree, apply_bins, fit_boosted, fit_single_tree

__all__ = [
    "ClassifierKind",
    "ClassifierSpec",
    "ClassifierModel",
    "LogisticModel",
    "TreeModel",
    "fit",
    "fit_matrix",
    "predict_proba",
    "predict",
    "kernel_backend",
]


class ClassifierKind(str, enum.Enum):
    LOGISTIC = "logistic"
    TREE = "tree"
    GBT = "gbt"


@dataclass(frozen=True)
class ClassifierSpec:
    """Backend choice plus hyperparameters.

    ``max_depth=None`` resolves to 3 for boosted trees and 8 for a single tree.
    ``use_protected`` appends the minority indicator as an extra feature.
    """

    kind: ClassifierKind = ClassifierKind.GBT
    learning_rate: float = 0.1
    epochs: int = 500
    l2: float = 1e-4
    n_rounds: int = 100
    max_depth: int | None = None
    leaf_l2: float = 1.0
    min_child_weight: float = 1.0
    max_bins: int = 255
    use_protected: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ClassifierKind(self.kind))
        if self.learning_rate <= 0:
            raise InvalidSpecError("learning_rate must be > 0")
        if self.epochs < 1 or self.n_rounds < 1:
            raise InvalidSpecError("epochs and n_rounds must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise InvalidSpecError("max_depth must be >= 1")
        if self.l2 < 0 or self.leaf_l2 < 0:
            raise InvalidSpecError("penalties must be >= 0")
        if not 2 <= self.max_bins <= 255:
            raise InvalidSpecError("max_bins must be in [2, 255]")

    @property
    def depth(self) -> int:
        if self.max_depth is not None:
            return self.max_depth
        return 8 if self.kind is ClassifierKind.TREE else 3

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierSpec":
        return cls(**d)


@dataclass(frozen=True, eq=False)
class ClassifierModel:
    spec: ClassifierSpec
    feature_dim: int

    def design(self, ds: TabularDataset) -> np.ndarray:
        """The matrix this model expects for ``ds``."""
        return ds.design_matrix(self.spec.use_protected)

    def score(self, ds: TabularDataset) -> np.ndarray:
        return predict_proba(self, self.design(ds))

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.feature_dim:
            raise DimensionMismatchError(
                f"expected {self.feature_dim} columns, got shape {X.shape}"
            )
        return X


@dataclass(frozen=True, eq=False)
class LogisticModel(ClassifierModel):
    coef: np.ndarray = field(default_factory=lambda: np.zeros(0))
    intercept: float = 0.0
    loss_history: tuple[float, ...] = ()

    def proba(self, X) -> np.ndarray:
        return sigmoid(X @ self.coef + self.intercept)


@dataclass(frozen=True, eq=False)
class TreeModel(ClassifierModel):
    bin_edges: tuple = ()
    trees: tuple[Tree, ...] = ()
    base_score: float = 0.0
    learning_rate: float = 1.0
    logit: bool = True

    def raw_score(self, X, kern=None) -> np.ndarray:
        bins = apply_bins(X, list(self.bin_edges))
        out = np.full(X.shape[0], self.base_score)
        for t in self.trees:
            t.add_to(bins, self.learning_rate, out, kern)
        return out

    def proba(self, X) -> np.ndarray:
        raw = self.raw_score(X)
        if self.logit:
            return sigmoid(raw)
        return np.clip(raw, 0.0, 1.0)


def kernel_backend() -> str:
    """Name of the tree kernel backend in use (``"cython"`` or ``"python"``)."""
    return _kernels.BACKEND


def fit_matrix(spec: ClassifierSpec, X, y, kern=None) -> ClassifierModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise DimensionMismatchError("X and y disagree on row count")
    if len(y) == 0:
        raise DegenerateTrainingError("no training rows")
    d = X.shape[1]
    if spec.kind is ClassifierKind.LOGISTIC:
        if len(y) < 2 or len(np.unique(y)) < 2:
            raise DegenerateTrainingError("logistic regression needs both label classes")
        coef, intercept, history = fit_logistic(X, y, spec.learning_rate, spec.epochs, spec.l2)
        return LogisticModel(spec, d, coef, intercept, tuple(history))
    if spec.kind is ClassifierKind.GBT:
        edges, trees, base = fit_boosted(
            X, y, n_rounds=spec.n_rounds, max_depth=spec.depth,
            learning_rate=spec.learning_rate, l2=spec.leaf_l2,
            min_child_weight=spec.min_child_weight, max_bins=spec.max_bins, kern=kern,
        )
        return TreeModel(spec, d, tuple(edges), tuple(trees), base, spec.learning_rate, True)
    edges, tree = fit_single_tree(X, y, max_depth=spec.depth, max_bins=spec.max_bins, kern=kern)
    return TreeModel(spec, d, tuple(edges), (tree,), 0.0, 1.0, False)


def fit(spec: ClassifierSpec, train: TabularDataset) -> ClassifierModel:
    """Fit ``spec`` on a dataset; deterministic for fixed inputs."""
    return fit_matrix(spec, train.design_matrix(spec.use_protected), train.labels)


def predict_proba(model: ClassifierModel, features) -> np.ndarray:
    return model.proba(model._check(features))


def predict(model: ClassifierModel, features, threshold: float = 0.5) -> np.ndarray:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    return (predict_proba(model, features) > threshold).astype(np.int8)

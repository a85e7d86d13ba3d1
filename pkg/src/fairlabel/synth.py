"""Synthetic classification data with controlled noise and injected label bias.

Three clean-data families (linear logistic rule, Gaussian clusters on
hypercube vertices, Gaussian quantile shells), random protected-attribute
assignment, and unidirectional bias injection that records every flip.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .classify.logistic import sigmoid
from .data import Direction, FlipLog, Group, Origin, TabularDataset
from .errors import InvalidFractionError, InvalidSpecError, NoEligibleRowsError
from .seeding import rng_for


@dataclass(frozen=True)
class LinearGeneratorSpec:
    n_samples: int = 100_000
    n_features: int = 10
    p_noise: float = 0.0
    seed: int = 0
    feature_noise_std: float = 0.0

    def validate(self):
        if self.n_samples < 1 or self.n_features < 1:
            raise InvalidSpecError("n_samples and n_features must be >= 1")
        if not 0.0 <= self.p_noise <= 1.0:
            raise InvalidSpecError("p_noise must lie in [0, 1]")
        if self.n_samples * (1 - self.p_noise) < 1:
            raise InvalidSpecError("need at least one noiseless sample")
        if self.feature_noise_std < 0:
            raise InvalidSpecError("feature_noise_std must be >= 0")


@dataclass(frozen=True)
class ClusterGeneratorSpec:
    """Gaussian clusters centred on vertices of a hypercube with side ``cube_edge``.

    Vertices sit at ``+-cube_edge / 2`` on each informative axis; clusters
    alternate between the two classes. With ``mix_features`` each cluster's
    deviations are multiplied by a random matrix, which correlates the
    informative features. Columns beyond ``n_informative`` are pure noise.
    """

    n_samples: int = 100_000
    n_informative: int = 8
    cube_edge: float = 0.5
    cluster_std: float = 1.0
    seed: int = 0
    n_features: int = 10
    n_clusters_per_class: int = 2
    mix_features: bool = True

    def validate(self):
        if self.n_samples < 2:
            raise InvalidSpecError("n_samples must be >= 2")
        if self.n_informative < 1 or self.n_informative > 30:
            raise InvalidSpecError("n_informative must lie in [1, 30]")
        if self.n_features < self.n_informative:
            raise InvalidSpecError("n_features must be >= n_informative")
        if self.cube_edge <= 0 or self.cluster_std < 0:
            raise InvalidSpecError("cube_edge must be > 0 and cluster_std >= 0")
        if self.n_clusters_per_class < 1 or 2 * self.n_clusters_per_class > 2 ** self.n_informative:
            raise InvalidSpecError("too many clusters for the hypercube")


@dataclass(frozen=True)
class QuantileGeneratorSpec:
    n_samples: int = 100_000
    n_features: int = 10
    seed: int = 0
    n_classes: int = 2

    def validate(self):
        if self.n_samples < 2 or self.n_features < 1:
            raise InvalidSpecError("need n_samples >= 2 and n_features >= 1")
        if self.n_classes != 2:
            raise InvalidSpecError("only binary labels are supported")


@dataclass(frozen=True)
class BiasSpec:
    """Flip labels of group ``target`` in ``direction`` with probability ``severity``."""

    target: Group = Group.MINORITY
    direction: Direction = Direction.ONE_TO_ZERO
    severity: float = 0.2
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "target", Group.parse(self.target))
        object.__setattr__(self, "direction", Direction(self.direction))
        if not 0.0 <= self.severity <= 1.0:
            raise InvalidSpecError("severity must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {"target": self.target.label, "direction": self.direction.value,
                "severity": self.severity, "seed": self.seed}


@dataclass(frozen=True)
class LinearCoefficients:
    coef: np.ndarray
    intercept: float


def _names(d):
    return tuple(f"x{j}" for j in range(d))


def _dataset(X, y, provenance):
    n = len(y)
    return TabularDataset(np.arange(n), X, y, np.zeros(n, dtype=np.int8), _names(X.shape[1]),
                          provenance)


def generate_linear(spec: LinearGeneratorSpec) -> tuple[TabularDataset, LinearCoefficients]:
    """Logistic-rule labels on standard-normal features, then a block of random labels.

    The first ``int(n * (1 - p_noise))`` rows follow ``sigmoid(a.x + b) > 0.5``;
    the remaining rows get fresh features and coin-flip labels.
    """
    spec.validate()
    n, d = spec.n_samples, spec.n_features
    n_perfect = int(n * (1 - spec.p_noise))
    n_noise = n - n_perfect
    a = rng_for(spec.seed, "linear", "coef").uniform(-1.0, 1.0, size=d)
    b = 0.0
    X = rng_for(spec.seed, "linear", "x").standard_normal((n_perfect, d))
    y = (sigmoid(X @ a + b) > 0.5).astype(np.int8)
    X_noise = rng_for(spec.seed, "linear", "x_noise").standard_normal((n_noise, d))
    y_noise = rng_for(spec.seed, "linear", "y_noise").integers(0, 2, size=n_noise).astype(np.int8)
    X_full = np.concatenate([X, X_noise])
    if spec.feature_noise_std > 0:
        X_full = X_full + spec.feature_noise_std * rng_for(
            spec.seed, "linear", "feature_noise").standard_normal(X_full.shape)
    ds = _dataset(X_full, np.concatenate([y, y_noise]), f"linear(seed={spec.seed})")
    return ds, LinearCoefficients(a, b)


def generate_hypercube_clusters(spec: ClusterGeneratorSpec) -> TabularDataset:
    spec.validate()
    rng = rng_for(spec.seed, "hypercube")
    k = spec.n_informative
    n_clusters = 2 * spec.n_clusters_per_class
    vertex_ids = rng.choice(2 ** k, size=n_clusters, replace=False)
    bits = (vertex_ids[:, None] >> np.arange(k)[None, :]) & 1
    centroids = (2.0 * bits - 1.0) * (spec.cube_edge / 2.0)

    sizes = np.full(n_clusters, spec.n_samples // n_clusters)
    sizes[: spec.n_samples % n_clusters] += 1
    X = np.empty((spec.n_samples, spec.n_features))
    y = np.empty(spec.n_samples, dtype=np.int8)
    start = 0
    for c in range(n_clusters):
        stop = start + sizes[c]
        dev = spec.cluster_std * rng.standard_normal((sizes[c], k))
        if spec.mix_features:
            dev = dev @ rng.uniform(-1.0, 1.0, size=(k, k))
        X[start:stop, :k] = centroids[c] + dev
        y[start:stop] = c % 2
        start = stop
    X[:, k:] = rng.standard_normal((spec.n_samples, spec.n_features - k))
    perm = rng.permutation(spec.n_samples)
    return _dataset(X[perm], y[perm], f"hypercube(seed={spec.seed})")


def generate_gaussian_quantiles(spec: QuantileGeneratorSpec) -> TabularDataset:
    """Label 1 iff the squared norm exceeds the sample median squared norm."""
    spec.validate()
    X = rng_for(spec.seed, "quantiles").standard_normal((spec.n_samples, spec.n_features))
    sq = np.einsum("ij,ij->i", X, X)
    y = (sq > np.median(sq)).astype(np.int8)
    return _dataset(X, y, f"quantiles(seed={spec.seed})")


def assign_protected(ds: TabularDataset, minority_fraction: float = 0.5, seed: int = 0
                     ) -> TabularDataset:
    """Tag each row Minority independently with probability ``minority_fraction``."""
    if not 0.0 < minority_fraction < 1.0:
        raise InvalidFractionError("minority_fraction must lie in (0, 1)")
    u = rng_for(seed, "protected").random(len(ds))
    return ds.with_protected((u < minority_fraction).astype(np.int8))


def inject_bias(ds: TabularDataset, bias: BiasSpec) -> tuple[TabularDataset, FlipLog]:
    """Flip each eligible label of group ``bias.target`` with probability ``severity``.

    Eligible rows carry the direction's source label. One uniform draw is
    consumed per eligible row, in row order.
    """
    eligible = np.flatnonzero(
        (ds.protected == bias.target) & (ds.labels == bias.direction.source_label)
    )
    if eligible.size == 0:
        raise NoEligibleRowsError(
            f"no {bias.target.label} rows with label {bias.direction.source_label}"
        )
    u = rng_for(bias.seed, "bias", bias.target.label, bias.direction.value).random(eligible.size)
    chosen = eligible[u < bias.severity]
    labels = ds.labels.copy()
    labels[chosen] = bias.direction.target_label
    log = FlipLog.from_rows(ds.row_ids[chosen], bias.direction, Origin.INJECTED, ds.provenance)
    return ds.with_labels(labels), log


def inject_biases(ds: TabularDataset, biases) -> tuple[TabularDataset, FlipLog]:
    log = FlipLog(provenance=ds.provenance)
    for b in biases:
        ds, part = inject_bias(ds, b)
        log = log.extend(part)
    return ds, log


def standard_bias(severity: float, seed: int, majority_too: bool = False) -> list[BiasSpec]:
    """Minority 1->0 at ``severity``, optionally with majority 0->1 at the same rate."""
    specs = [BiasSpec(Group.MINORITY, Direction.ONE_TO_ZERO, severity, seed)]
    if majority_too:
        specs.append(BiasSpec(Group.MAJORITY, Direction.ZERO_TO_ONE, severity, seed))
    return specs


FAMILIES = {
    "linear": LinearGeneratorSpec,
    "hypercube": ClusterGeneratorSpec,
    "quantiles": QuantileGeneratorSpec,
}


def generate(family: str, **params) -> TabularDataset:
    """Build the named family from keyword parameters (coefficients are discarded)."""
    try:
        spec_cls = FAMILIES[family]
    except KeyError:
        raise InvalidSpecError(f"unknown family {family!r}") from None
    spec = spec_cls(**params)
    if family == "linear":
        return generate_linear(spec)[0]
    if family == "hypercube":
        return generate_hypercube_clusters(spec)
    return generate_gaussian_quantiles(spec)


def spec_to_dict(spec) -> dict:
    return asdict(spec)

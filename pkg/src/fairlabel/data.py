"""Tabular data model: datasets, group tags, flip logs and the pure transforms
(partition, split, concat, flip) the debiasers are built from.

Datasets are immutable. Every transform returns a new :class:`TabularDataset`
and rows keep an explicit integer ``row_id`` so flips survive reordering.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DirectionMismatchError,
    DuplicateRowIdError,
    EmptyGroupError,
    FairLabelError,
    InvalidFractionError,
    SchemaMismatchError,
    UnknownRowIdError,
)


class Group(enum.IntEnum):
    MAJORITY = 0
    MINORITY = 1

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, value) -> "Group":
        if isinstance(value, Group):
            return value
        if isinstance(value, str):
            key = value.strip().upper()
            if key in ("MAJ", "MAJORITY"):
                return cls.MAJORITY
            if key in ("MIN", "MINORITY"):
                return cls.MINORITY
            if key in ("0", "1"):
                return cls(int(key))
            raise ValueError(f"unknown group tag {value!r}")
        return cls(int(value))


class Direction(str, enum.Enum):
    ZERO_TO_ONE = "0to1"
    ONE_TO_ZERO = "1to0"

    @property
    def source_label(self) -> int:
        return 0 if self is Direction.ZERO_TO_ONE else 1

    @property
    def target_label(self) -> int:
        return 1 - self.source_label

    def inverse(self) -> "Direction":
        if self is Direction.ZERO_TO_ONE:
            return Direction.ONE_TO_ZERO
        return Direction.ZERO_TO_ONE


class Origin(str, enum.Enum):
    INJECTED = "injected"
    PROPOSED = "proposed"


@dataclass(frozen=True)
class Flip:
    row_id: int
    direction: Direction
    origin: Origin

    def to_dict(self) -> dict:
        return {
            "row_id": int(self.row_id),
            "direction": self.direction.value,
            "origin": self.origin.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Flip":
        return cls(int(d["row_id"]), Direction(d["direction"]), Origin(d["origin"]))


@dataclass(frozen=True)
class FlipLog:
    """Ordered record of label flips, at most one per ``(row_id, origin)``."""

    entries: tuple[Flip, ...] = ()
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = set()
        for f in self.entries:
            key = (f.row_id, f.origin)
            if key in seen:
                raise DuplicateRowIdError(
                    f"row {f.row_id} appears twice with origin {f.origin.value}"
                )
            seen.add(key)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Flip]:
        return iter(self.entries)

    def row_ids(self) -> np.ndarray:
        return np.array([f.row_id for f in self.entries], dtype=np.int64)

    def directions(self) -> set[Direction]:
        return {f.direction for f in self.entries}

    def inverted(self) -> "FlipLog":
        """The log that undoes this one when passed to :func:`apply_flips`."""
        return FlipLog(
            tuple(Flip(f.row_id, f.direction.inverse(), f.origin) for f in self.entries),
            self.provenance,
        )

    def extend(self, other: "FlipLog") -> "FlipLog":
        return FlipLog(self.entries + tuple(other.entries), self.provenance or other.provenance)

    @classmethod
    def from_rows(cls, row_ids: Iterable[int], direction: Direction, origin: Origin,
                  provenance: str = "") -> "FlipLog":
        return cls(tuple(Flip(int(r), direction, origin) for r in row_ids), provenance)

    def to_json_list(self) -> list[dict]:
        return [f.to_dict() for f in self.entries]

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_list(), indent=1) + "\n")

    @classmethod
    def load(cls, path, provenance: str = "") -> "FlipLog":
        raw = json.loads(Path(path).read_text())
        return cls(tuple(Flip.from_dict(d) for d in raw), provenance or str(path))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TabularDataset:
    """Feature matrix, binary labels and a Majority/Minority tag per row.

    ``protected`` holds :class:`Group` codes (0 majority, 1 minority).
    ``protected_raw`` optionally keeps the source value each tag came from.
    """

    row_ids: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    protected: np.ndarray
    feature_names: tuple[str, ...] = ()
    provenance: str = ""
    protected_raw: np.ndarray | None = field(default=None)

    def __post_init__(self):
        row_ids = np.asarray(self.row_ids, dtype=np.int64).reshape(-1)
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(len(row_ids), -1)
        labels = np.asarray(self.labels)
        protected = np.asarray(self.protected, dtype=np.int8).reshape(-1)
        n = len(row_ids)
        if features.ndim != 2 or features.shape[0] != n or len(labels) != n or len(protected) != n:
            raise SchemaMismatchError(
                f"inconsistent row counts: ids={n}, features={features.shape}, "
                f"labels={len(labels)}, protected={len(protected)}"
            )
        if len(np.unique(row_ids)) != n:
            raise DuplicateRowIdError("row_ids must be distinct")
        if not np.all(np.isfinite(features)):
            raise FairLabelError("features contain NaN or Inf")
        if labels.size and not np.all((labels == 0) | (labels == 1)):
            raise FairLabelError("labels must be 0 or 1")
        if protected.size and not np.all((protected == 0) | (protected == 1)):
            raise FairLabelError("protected tags must be 0 (majority) or 1 (minority)")
        names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(features.shape[1]))
        if len(names) != features.shape[1]:
            raise SchemaMismatchError("feature_names length does not match feature width")
        object.__setattr__(self, "row_ids", _frozen(row_ids))
        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "labels", _frozen(labels.astype(np.int8)))
        object.__setattr__(self, "protected", _frozen(protected))
        object.__setattr__(self, "feature_names", names)
        if self.protected_raw is not None:
            raw = np.asarray(self.protected_raw, dtype=object).reshape(-1)
            if len(raw) != n:
                raise SchemaMismatchError("protected_raw length mismatch")
            object.__setattr__(self, "protected_raw", _frozen(raw))

    def __len__(self) -> int:
        return len(self.row_ids)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def minority_mask(self) -> np.ndarray:
        return self.protected == Group.MINORITY

    @property
    def majority_mask(self) -> np.ndarray:
        return self.protected == Group.MAJORITY

    def take(self, index) -> "TabularDataset":
        """Subset rows by boolean mask or integer positions."""
        index = np.asarray(index)
        raw = None if self.protected_raw is None else self.protected_raw[index]
        return TabularDataset(
            self.row_ids[index], self.features[index], self.labels[index],
            self.protected[index], self.feature_names, self.provenance, raw,
        )

    def with_labels(self, labels) -> "TabularDataset":
        return TabularDataset(
            self.row_ids, self.features, labels, self.protected,
            self.feature_names, self.provenance, self.protected_raw,
        )

    def with_protected(self, protected) -> "TabularDataset":
        return TabularDataset(
            self.row_ids, self.features, self.labels, protected,
            self.feature_names, self.provenance, None,
        )

    def with_provenance(self, provenance: str) -> "TabularDataset":
        return TabularDataset(
            self.row_ids, self.features, self.labels, self.protected,
            self.feature_names, provenance, self.protected_raw,
        )

    def design_matrix(self, include_protected: bool = False) -> np.ndarray:
        """Features handed to classifiers, optionally with a minority indicator column."""
        if not include_protected:
            return self.features
        return np.column_stack([self.features, self.protected.astype(np.float64)])

    def positions(self, row_ids: Sequence[int]) -> np.ndarray:
        """Positional index of each requested row id."""
        order = np.argsort(self.row_ids, kind="stable")
        sorted_ids = self.row_ids[order]
        row_ids = np.asarray(row_ids, dtype=np.int64)
        loc = np.searchsorted(sorted_ids, row_ids)
        loc = np.clip(loc, 0, max(len(sorted_ids) - 1, 0))
        if len(sorted_ids) == 0 or np.any(sorted_ids[loc] != row_ids):
            missing = row_ids[(len(sorted_ids) == 0) | (sorted_ids[loc] != row_ids)]
            raise UnknownRowIdError(f"unknown row ids: {missing[:10].tolist()}")
        return order[loc]

    def equals(self, other: "TabularDataset") -> bool:
        return (
            np.array_equal(self.row_ids, other.row_ids)
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.protected, other.protected)
            and self.feature_names == other.feature_names
        )


def partition_by_group(ds: TabularDataset) -> tuple[TabularDataset, TabularDataset]:
    """Split into (majority rows, minority rows)."""
    if len(ds) == 0:
        raise EmptyGroupError("dataset is empty")
    maj, mino = ds.take(ds.majority_mask), ds.take(ds.minority_mask)
    if len(maj) == 0 or len(mino) == 0:
        raise EmptyGroupError(
            f"partition has an empty group (majority={len(maj)}, minority={len(mino)})"
        )
    return maj, mino


def split_train_test(ds: TabularDataset, test_fraction: float, seed: int
                     ) -> tuple[TabularDataset, TabularDataset]:
    if not 0.0 < test_fraction < 1.0:
        raise InvalidFractionError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = len(ds)
    n_test = int(np.floor(n * test_fraction + 0.5))
    if int(np.floor(n * test_fraction)) < 1 or n - n_test < 1:
        raise InvalidFractionError(f"fraction {test_fraction} leaves an empty split for N={n}")
    perm = np.random.default_rng(seed).permutation(n)
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])
    return ds.take(train_idx), ds.take(test_idx)


def concat(a: TabularDataset, b: TabularDataset) -> TabularDataset:
    if a.n_features != b.n_features or a.feature_names != b.feature_names:
        raise SchemaMismatchError(
            f"cannot concatenate datasets of width {a.n_features} and {b.n_features}"
        )
    if np.intersect1d(a.row_ids, b.row_ids).size:
        raise DuplicateRowIdError("datasets share row ids")
    raw = None
    if a.protected_raw is not None and b.protected_raw is not None:
        raw = np.concatenate([a.protected_raw, b.protected_raw])
    return TabularDataset(
        np.concatenate([a.row_ids, b.row_ids]),
        np.vstack([a.features, b.features]),
        np.concatenate([a.labels, b.labels]),
        np.concatenate([a.protected, b.protected]),
        a.feature_names,
        a.provenance,
        raw,
    )


def apply_flips(ds: TabularDataset, flips: FlipLog) -> TabularDataset:
    """Invert exactly the labels listed in ``flips``; the input is left untouched."""
    if len(flips) == 0:
        return ds.with_labels(ds.labels)
    pos = ds.positions(flips.row_ids())
    labels = ds.labels.copy()
    for p, f in zip(pos, flips):
        if labels[p] != f.direction.source_label:
            raise DirectionMismatchError(
                f"row {f.row_id} has label {labels[p]}, cannot apply {f.direction.value}"
            )
        labels[p] = f.direction.target_label
    return ds.with_labels(labels)


# -- CSV serialization ------------------------------------------------------

def write_csv(ds: TabularDataset, path) -> None:
    """Write ``row_id, <features...>, label, protected`` with a header row."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row_id", *ds.feature_names, "label", "protected"])
        for i in range(len(ds)):
            w.writerow([
                int(ds.row_ids[i]),
                *(repr(float(v)) for v in ds.features[i]),
                int(ds.labels[i]),
                Group(int(ds.protected[i])).label,
            ])


def read_csv(path, provenance: str | None = None) -> TabularDataset:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaMismatchError(f"{path}: empty file")
    header = rows[0]
    if len(header) < 3 or header[0] != "row_id" or header[-2:] != ["label", "protected"]:
        raise SchemaMismatchError(f"{path}: expected header row_id,...,label,protected")
    body = rows[1:]
    d = len(header) - 3
    row_ids = np.array([int(r[0]) for r in body], dtype=np.int64)
    feats = np.array([[float(v) for v in r[1:1 + d]] for r in body], dtype=np.float64)
    feats = feats.reshape(len(body), d)
    labels = np.array([int(r[-2]) for r in body], dtype=np.int8)
    protected = np.array([int(Group.parse(r[-1])) for r in body], dtype=np.int8)
    return TabularDataset(row_ids, feats, labels, protected, tuple(header[1:1 + d]),
                          provenance if provenance is not None else str(path))

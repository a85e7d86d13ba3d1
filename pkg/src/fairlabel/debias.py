"""Directional label debiasing.

``fair_min`` trains on the majority group and raises minority labels 0 -> 1
where that model scores above the threshold. ``fair_maj`` mirrors it: train
on the minority group and lower majority labels 1 -> 0 where the model
predicts 0 (score <= threshold). ``fair_label`` runs ``fair_min`` and then,
if configured, ``fair_maj``. ``naive_debias`` is the undirected baseline:
same flip rule as ``fair_min`` but the model sees every row.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .classify import ClassifierModel, ClassifierSpec, fit
from .data import (
    Direction,
    FlipLog,
    Group,
    Origin,
    TabularDataset,
    apply_flips,
    partition_by_group,
    split_train_test,
)
from .errors import DegenerateTrainingError, EmptyGroupError, InvalidSpecError
from .metrics import selection_rates
from .seeding import derive_seed


class Phase(str, enum.Enum):
    MIN = "min"
    MAJ = "maj"

    @property
    def train_group(self) -> Group:
        return Group.MAJORITY if self is Phase.MIN else Group.MINORITY

    @property
    def target_group(self) -> Group:
        return Group.MINORITY if self is Phase.MIN else Group.MAJORITY

    @property
    def direction(self) -> Direction:
        return Direction.ZERO_TO_ONE if self is Phase.MIN else Direction.ONE_TO_ZERO


@dataclass(frozen=True)
class FixedThreshold:
    value: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise InvalidSpecError("fixed threshold must lie in [0, 1]")


@dataclass(frozen=True)
class TuneToUnitDIR:
    """Pick the threshold on a hold-out slice so the label DIR lands closest to 1."""

    holdout_fraction: float = 0.2
    grid_step: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.holdout_fraction < 1.0:
            raise InvalidSpecError("holdout_fraction must lie in (0, 1)")
        if not 0.0 < self.grid_step <= 0.5:
            raise InvalidSpecError("grid_step must lie in (0, 0.5]")


ThresholdPolicy = FixedThreshold | TuneToUnitDIR


@dataclass(frozen=True)
class DebiasConfig:
    classifier: ClassifierSpec = field(default_factory=ClassifierSpec)
    threshold: ThresholdPolicy = field(default_factory=FixedThreshold)
    run_fairmaj: bool = False
    iterations: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidSpecError("iterations must be >= 1")

    def to_dict(self) -> dict:
        if isinstance(self.threshold, FixedThreshold):
            thr = {"policy": "fixed", "value": self.threshold.value}
        else:
            thr = {"policy": "tune", "holdout_fraction": self.threshold.holdout_fraction,
                   "grid_step": self.threshold.grid_step}
        return {"classifier": self.classifier.to_dict(), "threshold": thr,
                "run_fairmaj": self.run_fairmaj, "iterations": self.iterations,
                "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "DebiasConfig":
        d = dict(d)
        clf = ClassifierSpec.from_dict(d.pop("classifier", {}))
        thr = dict(d.pop("threshold", {"policy": "fixed", "value": 0.5}))
        policy = thr.pop("policy", "fixed")
        threshold = FixedThreshold(**thr) if policy == "fixed" else TuneToUnitDIR(**thr)
        return cls(classifier=clf, threshold=threshold, **d)


def _finite_or_none(x):
    return None if x is None or not math.isfinite(x) else x


def _label_dir(r_min, r_maj):
    if r_maj > 0:
        return r_min / r_maj
    return math.inf if r_min > 0 else math.nan


@dataclass
class DebiasReport:
    method: str
    proposed_flips: FlipLog
    thresholds: dict[str, float]
    tuned: bool
    rates_before: tuple[float, float]
    rates_after: tuple[float, float]

    @property
    def tuned_threshold(self) -> float | None:
        """Threshold picked by tuning (the first phase's), or None for a fixed policy."""
        if not self.tuned:
            return None
        return next(iter(self.thresholds.values()), None)

    @property
    def dir_before(self) -> float:
        return _label_dir(*self.rates_before)

    @property
    def dir_after(self) -> float:
        return _label_dir(*self.rates_after)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "flips": self.proposed_flips.to_json_list(),
            "n_flips": len(self.proposed_flips),
            "thresholds": self.thresholds,
            "tuned": self.tuned,
            "tuned_threshold": self.tuned_threshold,
            "rates_before": {"minority": self.rates_before[0], "majority": self.rates_before[1]},
            "rates_after": {"minority": self.rates_after[0], "majority": self.rates_after[1]},
            "dir_before": _finite_or_none(self.dir_before),
            "dir_after": _finite_or_none(self.dir_after),
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=1)
            fh.write("\n")


# -- building blocks -------------------------------------------------------

def _require_trainable(ds: TabularDataset, what: str):
    if len(ds) == 0:
        raise EmptyGroupError(f"{what} is empty")
    if len(np.unique(ds.labels)) < 2:
        raise DegenerateTrainingError(f"{what} has a single label class")


def flip_candidates(ds: TabularDataset, scores: np.ndarray, phase: Phase,
                    threshold: float) -> np.ndarray:
    """Boolean mask of rows the phase would flip at ``threshold``."""
    in_group = ds.protected == phase.target_group
    if phase is Phase.MIN:
        return in_group & (ds.labels == 0) & (scores > threshold)
    return in_group & (ds.labels == 1) & (scores <= threshold)


def apply_phase(ds: TabularDataset, model: ClassifierModel, phase: Phase,
                threshold: float) -> tuple[TabularDataset, FlipLog]:
    """Score ``ds`` with a fitted model and flip the phase's eligible rows."""
    mask = flip_candidates(ds, model.score(ds), phase, threshold)
    log = FlipLog.from_rows(ds.row_ids[mask], phase.direction, Origin.PROPOSED, ds.provenance)
    return apply_flips(ds, log), log


def _threshold_grid(step: float) -> np.ndarray:
    k = int(math.floor(1.0 / step + 1e-9))
    grid = np.arange(k + 1) * step
    if grid[-1] < 1.0 - 1e-12:
        grid = np.append(grid, 1.0)
    return np.minimum(grid, 1.0)


def tune_threshold(model: ClassifierModel, holdout: TabularDataset, phase: Phase,
                   grid_step: float = 0.01) -> float:
    """Grid-search the threshold whose simulated flips bring holdout DIR closest to 1.

    Ties go to the candidate with fewer flips: the larger threshold for the
    minority phase, the smaller one for the majority phase.
    """
    partition_by_group(holdout)
    scores = model.score(holdout)
    grid = _threshold_grid(grid_step)
    order = grid[::-1] if phase is Phase.MIN else grid
    best_t, best_obj = float(order[0]), math.inf
    for t in order:
        labels = holdout.labels.copy()
        labels[flip_candidates(holdout, scores, phase, float(t))] = phase.direction.target_label
        r_min, r_maj = selection_rates(labels, holdout.protected)
        obj = abs(r_min / r_maj - 1.0) if r_maj > 0 else math.inf
        if obj < best_obj:
            best_t, best_obj = float(t), obj
    return best_t


def fit_phase_model(ds: TabularDataset, cfg: DebiasConfig, phase: Phase | None
                    ) -> tuple[ClassifierModel, float, bool]:
    """Train the phase's model and settle its threshold.

    ``phase=None`` trains on every row (naive baseline, tuned as a minority
    phase). Returns ``(model, threshold, tuned)``.
    """
    tuning = isinstance(cfg.threshold, TuneToUnitDIR)
    flip_phase = phase or Phase.MIN
    if tuning:
        train_pool, holdout = split_train_test(
            ds, cfg.threshold.holdout_fraction,
            derive_seed(cfg.seed, "holdout", phase.value if phase else "naive"),
        )
    else:
        train_pool, holdout = ds, None
    if phase is None:
        train = train_pool
        what = "training data"
    else:
        train = train_pool.take(train_pool.protected == phase.train_group)
        what = f"{phase.train_group.label} group"
    _require_trainable(train, what)
    model = fit(cfg.classifier, train)
    if not tuning:
        return model, cfg.threshold.value, False
    return model, tune_threshold(model, holdout, flip_phase, cfg.threshold.grid_step), True


def _run_phase(ds, cfg, phase, method):
    partition_by_group(ds)
    before = selection_rates(ds.labels, ds.protected)
    model, thr, tuned = fit_phase_model(ds, cfg, None if method == "naive" else phase)
    out, log = apply_phase(ds, model, phase, thr)
    after = selection_rates(out.labels, out.protected)
    return out, DebiasReport(method, log, {phase.value: thr}, tuned, before, after)


def fair_min(ds: TabularDataset, cfg: DebiasConfig = DebiasConfig()
             ) -> tuple[TabularDataset, DebiasReport]:
    return _run_phase(ds, cfg, Phase.MIN, "fairmin")


def fair_maj(ds: TabularDataset, cfg: DebiasConfig = DebiasConfig()
             ) -> tuple[TabularDataset, DebiasReport]:
    return _run_phase(ds, cfg, Phase.MAJ, "fairmaj")


def naive_debias(ds: TabularDataset, cfg: DebiasConfig = DebiasConfig()
                 ) -> tuple[TabularDataset, DebiasReport]:
    return _run_phase(ds, cfg, Phase.MIN, "naive")


def fair_label(ds: TabularDataset, cfg: DebiasConfig = DebiasConfig()
               ) -> tuple[TabularDataset, DebiasReport]:
    """``fair_min``, then ``fair_maj`` when ``cfg.run_fairmaj``; repeated ``cfg.iterations`` times."""
    before = selection_rates(ds.labels, ds.protected)
    log = FlipLog(provenance=ds.provenance)
    thresholds: dict[str, float] = {}
    tuned = False
    out = ds
    for it in range(cfg.iterations):
        steps = [fair_min] + ([fair_maj] if cfg.run_fairmaj else [])
        for step in steps:
            out, rep = step(out, cfg)
            log = log.extend(rep.proposed_flips)
            tuned = tuned or rep.tuned
            for k, v in rep.thresholds.items():
                thresholds[k if it == 0 else f"{k}{it + 1}"] = v
    after = selection_rates(out.labels, out.protected)
    return out, DebiasReport("fairlabel", log, thresholds, tuned, before, after)


METHODS = {
    "fairlabel": fair_label,
    "fairmin": fair_min,
    "fairmaj": fair_maj,
    "naive": naive_debias,
}

"""Debiasing-quality and group-fairness metrics.

Group arrays use :class:`~fairlabel.data.Group` codes: 0 majority, 1 minority.
In the confusion-based metrics the minority group plays the protected role
(suffix ``p``) and the majority the unprotected one (suffix ``u``).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .data import FlipLog, Group
from .errors import (
    EmptyGroupError,
    EmptyInjectedLogError,
    LengthMismatchError,
    ZeroMajorityRateError,
)


# -- flip quality ----------------------------------------------------------

def cfr(injected: FlipLog, proposed: FlipLog) -> float:
    """Correct flip rate: share of injected flips that a proposed flip reverses."""
    if len(injected) == 0:
        raise EmptyInjectedLogError("CFR is undefined without injected flips")
    undo = {(f.row_id, f.direction) for f in proposed}
    hits = sum((f.row_id, f.direction.inverse()) in undo for f in injected)
    return hits / len(injected)


def miss_rate(injected: FlipLog, proposed: FlipLog) -> float:
    """Share of injected flips left uncorrected (``1 - cfr``)."""
    return 1.0 - cfr(injected, proposed)


def mfr(injected: FlipLog, proposed: FlipLog) -> float:
    """Wrong-flip rate: share of proposed flips on rows that were never biased.

    Returns 0 when nothing was proposed.
    """
    if len(proposed) == 0:
        return 0.0
    biased_rows = {f.row_id for f in injected}
    wrong = sum(f.row_id not in biased_rows for f in proposed)
    return wrong / len(proposed)


# -- label / prediction metrics --------------------------------------------

def _pair(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise LengthMismatchError(f"length mismatch: {a.shape} vs {b.shape}")
    return a, b


def f1(y_true, y_pred) -> float:
    y_true, y_pred = _pair(y_true, y_pred)
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def selection_rates(y, groups) -> tuple[float, float]:
    """``(minority rate, majority rate)`` of positive outcomes."""
    y, groups = _pair(y, groups)
    mino = groups == Group.MINORITY
    maj = groups == Group.MAJORITY
    if not mino.any() or not maj.any():
        raise EmptyGroupError("both groups must be present")
    return float(np.sum(y[mino] == 1) / mino.sum()), float(np.sum(y[maj] == 1) / maj.sum())


def disparate_impact_ratio(y, groups) -> float:
    r_min, r_maj = selection_rates(y, groups)
    if r_maj == 0:
        raise ZeroMajorityRateError("majority selection rate is 0")
    return r_min / r_maj


def disparate_impact_difference(y, groups) -> float:
    r_min, r_maj = selection_rates(y, groups)
    return r_min - r_maj


def demographic_parity_gap(y_pred, groups) -> float:
    """Absolute selection-rate gap; 0 means demographic parity holds."""
    return abs(disparate_impact_difference(y_pred, groups))


def equalized_odds_gap(y_true, y_pred, groups) -> float:
    """``max_y |P(pred=1 | minority, Y=y) - P(pred=1 | majority, Y=y)|``.

    Values of ``y`` absent from either group are skipped; NaN if none remain.
    """
    y_true, y_pred = _pair(y_true, y_pred)
    groups = np.asarray(groups)
    gaps = []
    for yv in (0, 1):
        rates = []
        for g in (Group.MINORITY, Group.MAJORITY):
            m = (groups == g) & (y_true == yv)
            if not m.any():
                break
            rates.append(np.sum(y_pred[m] == 1) / m.sum())
        else:
            gaps.append(abs(rates[0] - rates[1]))
    return float(max(gaps)) if gaps else math.nan


# -- confusion-based suite -------------------------------------------------

@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class GroupConfusion:
    minority: Confusion
    majority: Confusion

    def swapped(self) -> "GroupConfusion":
        return GroupConfusion(self.majority, self.minority)


def _confusion(t, p) -> Confusion:
    return Confusion(
        int(np.sum((t == 1) & (p == 1))),
        int(np.sum((t == 0) & (p == 1))),
        int(np.sum((t == 0) & (p == 0))),
        int(np.sum((t == 1) & (p == 0))),
    )


def group_confusion(y_true, y_pred, groups) -> GroupConfusion:
    y_true, y_pred = _pair(y_true, y_pred)
    _, groups = _pair(y_true, groups)
    mino = groups == Group.MINORITY
    maj = groups == Group.MAJORITY
    return GroupConfusion(_confusion(y_true[mino], y_pred[mino]),
                          _confusion(y_true[maj], y_pred[maj]))


def _ratio(num, den):
    return num / den if den else math.nan


def appendix_metrics(gc: GroupConfusion) -> dict[str, float]:
    """SPD, DI, EOO, ABAD, AAOD and AEORD from per-group confusion counts.

    A metric whose denominator vanishes is returned as NaN rather than raised.
    """
    p, u = gc.minority, gc.majority
    sel_p = _ratio(p.tp + p.fp, p.n)
    sel_u = _ratio(u.tp + u.fp, u.n)
    tpr_p, tpr_u = _ratio(p.tp, p.tp + p.fn), _ratio(u.tp, u.tp + u.fn)
    tnr_p, tnr_u = _ratio(p.tn, p.tn + p.fp), _ratio(u.tn, u.tn + u.fp)
    fpr_p, fpr_u = _ratio(p.fp, p.fp + p.tn), _ratio(u.fp, u.fp + u.tn)
    return {
        "spd": sel_p - sel_u,
        "di": _ratio(sel_p, sel_u),
        "eoo": tpr_p - tpr_u,
        "aeord": abs(tpr_p - tpr_u),
        "abad": abs(0.5 * (tpr_p + tnr_p) - 0.5 * (tpr_u + tnr_u)),
        "aaod": 0.5 * abs((fpr_p - fpr_u) + (tpr_p - tpr_u)),
    }


class Source(str, enum.Enum):
    LABELS = "labels"
    PREDICTIONS = "predictions"


@dataclass
class FairnessReport:
    source: Source
    rate_minority: float
    rate_majority: float
    dir: float
    did: float
    dp: float
    eo: float = math.nan
    spd: float = math.nan
    di: float = math.nan
    eoo: float = math.nan
    abad: float = math.nan
    aaod: float = math.nan
    aeord: float = math.nan
    undefined: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["source"] = self.source.value
        # NaN is not valid JSON
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def fairness_report(y, groups, y_true=None, source: Source = Source.PREDICTIONS
                    ) -> FairnessReport:
    """Selection-rate metrics of ``y``; confusion metrics too when ``y_true`` is given."""
    r_min, r_maj = selection_rates(y, groups)
    ratio = r_min / r_maj if r_maj > 0 else math.nan
    rep = FairnessReport(Source(source), r_min, r_maj, ratio, r_min - r_maj, abs(r_min - r_maj))
    if y_true is not None:
        rep.eo = equalized_odds_gap(y_true, y, groups)
        for k, v in appendix_metrics(group_confusion(y_true, y, groups)).items():
            setattr(rep, k, v)
    rep.undefined = sorted(
        k for k, v in asdict(rep).items() if isinstance(v, float) and math.isnan(v)
        and (y_true is not None or k in ("dir",))
    )
    return rep

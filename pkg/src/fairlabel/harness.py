"""End-to-end experiment pipelines.

Synthetic runs follow the clean -> biased -> debiased chain: generate D0,
tag groups, inject bias (D1 plus the injected flip log), debias D1 with
FairLabel (D2) and the naive baseline (D3), score the proposed flips, then
train downstream models on the train split of D1/D2/D3 and evaluate them on
the test split against the clean D0 labels.

Benchmark runs train one model on the original training labels and one on
FairLabel-debiased training labels and compare prediction DIR on the test
split.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import ingest
from .classify import ClassifierSpec, fit, kernel_backend
from .data import FlipLog, split_train_test
from .debias import DebiasConfig, fair_label, naive_debias
from .errors import EmptyInjectedLogError, FairLabelError
from .metrics import (
    Source,
    cfr,
    disparate_impact_difference,
    disparate_impact_ratio,
    f1,
    fairness_report,
    mfr,
    miss_rate,
)
from .seeding import derive_seed
from .synth import (
    FAMILIES,
    assign_protected,
    generate,
    inject_biases,
    standard_bias,
)

METHODS = ("fairlabel", "naive", "biased")


def _downstream_default():
    return ClassifierSpec(use_protected=True)


@dataclass(frozen=True)
class SyntheticExperimentConfig:
    family: str = "linear"
    generator: dict = field(default_factory=lambda: {"n_samples": 20_000})
    minority_fraction: float = 0.5
    bias_rate: float = 0.2
    majority_bias: bool = False
    fairlabel: DebiasConfig | None = None
    naive: DebiasConfig = field(default_factory=DebiasConfig)
    downstream: ClassifierSpec = field(default_factory=_downstream_default)
    test_fraction: float = 0.2
    repetitions: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise FairLabelError(f"unknown family {self.family!r}")
        if self.repetitions < 1:
            raise FairLabelError("repetitions must be >= 1")
        if not 0.0 <= self.bias_rate <= 1.0:
            raise FairLabelError("bias_rate must lie in [0, 1]")
        if self.fairlabel is None:
            object.__setattr__(self, "fairlabel", DebiasConfig(run_fairmaj=self.majority_bias))

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "generator": dict(self.generator),
            "minority_fraction": self.minority_fraction,
            "bias_rate": self.bias_rate,
            "majority_bias": self.majority_bias,
            "fairlabel": self.fairlabel.to_dict(),
            "naive": self.naive.to_dict(),
            "downstream": self.downstream.to_dict(),
            "test_fraction": self.test_fraction,
            "repetitions": self.repetitions,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticExperimentConfig":
        d = dict(d)
        for key in ("fairlabel", "naive"):
            if d.get(key) is not None:
                d[key] = DebiasConfig.from_dict(d[key])
        if "downstream" in d:
            d["downstream"] = ClassifierSpec.from_dict(d["downstream"])
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise FairLabelError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def _mean_std(values):
    vals = [v for v in values if v is not None]
    if not vals or len(vals) < len(values):
        return None, None
    arr = np.asarray(vals, dtype=np.float64)
    std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return float(arr.mean()), std


@dataclass
class ExperimentResult:
    config: dict
    bias_rate: float
    repetitions: list[dict]
    backend: dict
    aggregate: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.aggregate:
            self.aggregate = aggregate(self.repetitions)

    def mean(self, method: str, metric: str):
        return self.aggregate[method][metric]["mean"]

    def std(self, method: str, metric: str):
        return self.aggregate[method][metric]["std"]

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "bias_rate": self.bias_rate,
            "repetitions": self.repetitions,
            "backend": self.backend,
            "aggregate": self.aggregate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentResult":
        return cls(d["config"], d["bias_rate"], d["repetitions"], d["backend"], d["aggregate"])

    def long_rows(self) -> list[tuple]:
        rows = []
        for method in sorted(self.aggregate):
            for metric in sorted(self.aggregate[method]):
                s = self.aggregate[method][metric]
                rows.append((self.bias_rate, method, metric, s["mean"], s["std"]))
        return rows


def aggregate(reps: list[dict]) -> dict:
    """Mean and sample standard deviation of every per-repetition metric."""
    out = {}
    for method in METHODS:
        metrics = sorted({k for r in reps for k in r.get(method, {})})
        out[method] = {}
        for m in metrics:
            mean, std = _mean_std([r[method].get(m) for r in reps])
            out[method][m] = {"mean": mean, "std": std}
    return out


def _safe(fn, *args):
    try:
        return fn(*args)
    except FairLabelError:
        return None


def _flip_scores(injected: FlipLog, proposed: FlipLog) -> dict:
    try:
        c, miss = cfr(injected, proposed), miss_rate(injected, proposed)
    except EmptyInjectedLogError:
        c, miss = None, None
    return {"cfr": c, "miss_rate": miss, "mfr": mfr(injected, proposed),
            "n_flips": len(proposed)}


def _model_scores(spec, train, test, y_clean) -> dict:
    model = fit(spec, train)
    pred = (model.score(test) > 0.5).astype(np.int8)
    return {
        "f1": f1(y_clean, pred),
        "dir": _safe(disparate_impact_ratio, pred, test.protected),
        "did": _safe(disparate_impact_difference, pred, test.protected),
    }


def run_repetition(cfg: SyntheticExperimentConfig, rep: int) -> dict:
    seed = cfg.seed + rep
    gen_params = dict(cfg.generator)
    gen_params["seed"] = derive_seed(seed, "generate")
    d0 = generate(cfg.family, **gen_params)
    d0 = assign_protected(d0, cfg.minority_fraction, derive_seed(seed, "protected"))
    d1, injected = inject_biases(
        d0, standard_bias(cfg.bias_rate, derive_seed(seed, "bias"), cfg.majority_bias)
    )
    debias_seed = derive_seed(seed, "debias")
    d2, rep_fl = fair_label(d1, replace(cfg.fairlabel, seed=debias_seed))
    d3, rep_nv = naive_debias(d1, replace(cfg.naive, seed=debias_seed))

    split_seed = derive_seed(seed, "split")
    _, test0 = split_train_test(d0, cfg.test_fraction, split_seed)
    row = {"repetition": rep, "seed": seed, "n_injected": len(injected)}
    for name, ds, report in (("fairlabel", d2, rep_fl), ("naive", d3, rep_nv), ("biased", d1, None)):
        train, _ = split_train_test(ds, cfg.test_fraction, split_seed)
        entry = _model_scores(cfg.downstream, train, test0, test0.labels)
        entry["label_dir"] = _safe(disparate_impact_ratio, ds.labels, ds.protected)
        if report is not None:
            entry.update(_flip_scores(injected, report.proposed_flips))
        row[name] = entry
    return row


def run_synthetic_experiment(cfg: SyntheticExperimentConfig) -> ExperimentResult:
    reps = []
    for r in range(cfg.repetitions):
        try:
            reps.append(run_repetition(cfg, r))
        except FairLabelError as exc:
            raise FairLabelError(f"repetition {r} (seed {cfg.seed + r}) failed: {exc}") from exc
    backend = {"debias_classifier": cfg.fairlabel.classifier.kind.value,
               "downstream_classifier": cfg.downstream.kind.value,
               "kernels": kernel_backend()}
    return ExperimentResult(cfg.to_dict(), cfg.bias_rate, reps, backend)


def sweep_bias_rate(cfg: SyntheticExperimentConfig, rates) -> list[ExperimentResult]:
    """One experiment per rate, each with its own derived base seed."""
    out = []
    for rate in rates:
        if not 0.0 <= rate <= 1.0:
            raise FairLabelError(f"bias rate {rate} outside [0, 1]")
        seed = derive_seed(cfg.seed, "rate", f"{rate:.6f}") % (2 ** 31)
        out.append(run_synthetic_experiment(replace(cfg, bias_rate=rate, seed=seed)))
    return out


# -- benchmark datasets ----------------------------------------------------

def _benchmark_debias_default():
    return DebiasConfig(run_fairmaj=True)


@dataclass(frozen=True)
class BenchmarkConfig:
    debias: DebiasConfig = field(default_factory=_benchmark_debias_default)
    downstream: ClassifierSpec = field(default_factory=ClassifierSpec)
    test_fraction: float = 0.2
    repetitions: int = 5
    seed: int = 0

    def to_dict(self) -> dict:
        return {"debias": self.debias.to_dict(), "downstream": self.downstream.to_dict(),
                "test_fraction": self.test_fraction, "repetitions": self.repetitions,
                "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkConfig":
        d = dict(d)
        if "debias" in d:
            d["debias"] = DebiasConfig.from_dict(d["debias"])
        if "downstream" in d:
            d["downstream"] = ClassifierSpec.from_dict(d["downstream"])
        return cls(**d)


@dataclass
class BenchmarkResult:
    dataset: str
    n_rows: int
    label_dir: float
    original: list[dict]
    debiased: list[dict]
    config: dict
    backend: dict

    @property
    def original_dir(self) -> float:
        return float(np.mean([r["dir"] for r in self.original]))

    @property
    def debiased_dir(self) -> float:
        return float(np.mean([r["dir"] for r in self.debiased]))

    @property
    def gain(self) -> float:
        return self.debiased_dir - self.original_dir

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "n_rows": self.n_rows,
            "label_dir": self.label_dir,
            "original": self.original,
            "debiased": self.debiased,
            "original_dir": self.original_dir,
            "debiased_dir": self.debiased_dir,
            "gain": self.gain,
            "config": self.config,
            "backend": self.backend,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkResult":
        return cls(d["dataset"], d["n_rows"], d["label_dir"], d["original"], d["debiased"],
                   d["config"], d["backend"])

    def long_rows(self) -> list[tuple]:
        rows = []
        for method, reps in (("original", self.original), ("debiased", self.debiased)):
            for metric in ("dir", "did", "rate_minority", "rate_majority"):
                mean, std = _mean_std([r[metric] for r in reps])
                rows.append((self.dataset, method, metric, mean, std))
        return rows


def run_benchmark_experiment(dataset, cfg: BenchmarkConfig = BenchmarkConfig(),
                             data_path=None) -> BenchmarkResult:
    """``dataset`` is a recipe name (``adult``/``german``/``compas``) or a loaded dataset."""
    if isinstance(dataset, str):
        name = dataset
        ds = ingest.load(dataset, data_path)
    else:
        name, ds = dataset.provenance.split(":")[0] or "dataset", dataset
    original, debiased = [], []
    for r in range(cfg.repetitions):
        seed = cfg.seed + r
        train, test = split_train_test(ds, cfg.test_fraction, derive_seed(seed, "split"))
        fixed, _ = fair_label(train, replace(cfg.debias, seed=derive_seed(seed, "debias")))
        for sink, tr in ((original, train), (debiased, fixed)):
            model = fit(cfg.downstream, tr)
            pred = (model.score(test) > 0.5).astype(np.int8)
            rep = fairness_report(pred, test.protected, test.labels, Source.PREDICTIONS)
            sink.append({"repetition": r, **rep.to_dict()})
    backend = {"debias_classifier": cfg.debias.classifier.kind.value,
               "downstream_classifier": cfg.downstream.kind.value,
               "kernels": kernel_backend()}
    return BenchmarkResult(name, len(ds), disparate_impact_ratio(ds.labels, ds.protected),
                           original, debiased, cfg.to_dict(), backend)


# -- serialization ---------------------------------------------------------

CSV_HEADER = ("rate", "method", "metric", "mean", "std")


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def results_to_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for res in results:
        for row in res.long_rows():
            w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def results_to_json(results) -> str:
    payload = [r.to_dict() for r in results]
    return json.dumps(payload, sort_keys=True, indent=1, allow_nan=False) + "\n"


def load_results(path) -> list:
    raw = json.loads(Path(path).read_text())
    out = []
    for d in raw:
        out.append(BenchmarkResult.from_dict(d) if "dataset" in d else ExperimentResult.from_dict(d))
    return out


def emit_results(results, path, format: str = "json") -> Path:
    """Write one result or a list of results; equal inputs give identical bytes."""
    if not isinstance(results, (list, tuple)):
        results = [results]
    path = Path(path)
    if format == "json":
        text = results_to_json(results)
    elif format == "csv":
        text = results_to_csv(results)
    else:
        raise ValueError(f"unknown format {format!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0

import json
from dataclasses import replace

import numpy as np
import pytest

from fairlabel import harness, ingest
from fairlabel.classify import ClassifierSpec
from fairlabel.debias import DebiasConfig
from fairlabel.errors import FairLabelError

FAST_GBT = ClassifierSpec(n_rounds=20)
SMALL = harness.SyntheticExperimentConfig(
    generator={"n_samples": 2000},
    fairlabel=DebiasConfig(classifier=FAST_GBT),
    naive=DebiasConfig(classifier=FAST_GBT),
    downstream=ClassifierSpec(n_rounds=20, use_protected=True),
    repetitions=2,
    seed=3,
)


@pytest.fixture(scope="module")
def small_result():
    return harness.run_synthetic_experiment(SMALL)


def test_repetition_rows(small_result):
    assert len(small_result.repetitions) == 2
    assert [r["seed"] for r in small_result.repetitions] == [3, 4]
    row = small_result.repetitions[0]
    assert set(row) >= {"fairlabel", "naive", "biased", "n_injected"}
    assert set(row["fairlabel"]) >= {"cfr", "mfr", "miss_rate", "f1", "dir", "did", "label_dir"}
    assert row["fairlabel"]["cfr"] + row["fairlabel"]["miss_rate"] == pytest.approx(1.0)
    assert small_result.backend["kernels"] in ("cython", "python")


def test_aggregate_recomputes(small_result):
    for method in harness.METHODS:
        for metric, stats in small_result.aggregate[method].items():
            vals = np.array([r[method][metric] for r in small_result.repetitions], dtype=float)
            assert stats["mean"] == pytest.approx(vals.mean(), abs=1e-9)
            assert stats["std"] == pytest.approx(vals.std(ddof=1), abs=1e-9)


def test_deterministic_bytes(tmp_path, small_result):
    again = harness.run_synthetic_experiment(SMALL)
    for fmt in ("json", "csv"):
        a = harness.emit_results(small_result, tmp_path / f"a.{fmt}", fmt).read_bytes()
        b = harness.emit_results(again, tmp_path / f"b.{fmt}", fmt).read_bytes()
        assert a == b


def test_csv_header(tmp_path, small_result):
    path = harness.emit_results(small_result, tmp_path / "r.csv", "csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "rate,method,metric,mean,std"
    assert lines[1].split(",")[0] == "0.200000"


def test_json_round_trip(tmp_path, small_result):
    path = harness.emit_results(small_result, tmp_path / "r.json", "json")
    (back,) = harness.load_results(path)
    assert back.to_dict() == json.loads(json.dumps(small_result.to_dict()))
    assert back.mean("fairlabel", "cfr") == small_result.mean("fairlabel", "cfr")


def test_unknown_format(tmp_path, small_result):
    with pytest.raises(ValueError):
        harness.emit_results(small_result, tmp_path / "r.xml", "xml")


def test_config_round_trip():
    d = SMALL.to_dict()
    assert harness.SyntheticExperimentConfig.from_dict(json.loads(json.dumps(d))) == SMALL
    with pytest.raises(FairLabelError):
        harness.SyntheticExperimentConfig.from_dict({**d, "colour": "red"})
    with pytest.raises(FairLabelError):
        harness.SyntheticExperimentConfig(repetitions=0)


def test_majority_bias_turns_on_fairmaj():
    cfg = harness.SyntheticExperimentConfig(majority_bias=True)
    assert cfg.fairlabel.run_fairmaj


def test_zero_bias_is_not_applicable():
    # desk-scale defaults; at toy sizes downstream F1 noise exceeds the tolerance
    res = harness.run_synthetic_experiment(harness.SyntheticExperimentConfig(bias_rate=0.0))
    for row in res.repetitions:
        assert row["n_injected"] == 0
        assert row["fairlabel"]["cfr"] is None and row["naive"]["cfr"] is None
    assert res.mean("fairlabel", "cfr") is None
    assert abs(res.mean("fairlabel", "f1") - res.mean("naive", "f1")) <= 0.01


def test_empty_sweep():
    assert harness.sweep_bias_rate(SMALL, []) == []


def test_sweep_seeds_independent():
    cfg = replace(SMALL, repetitions=1)
    a, b = harness.sweep_bias_rate(cfg, [0.1, 0.3])
    assert a.bias_rate == 0.1 and b.bias_rate == 0.3
    assert a.repetitions[0]["seed"] != b.repetitions[0]["seed"]
    with pytest.raises(FairLabelError):
        harness.sweep_bias_rate(cfg, [1.5])


def test_failed_repetition_reports_seed():
    cfg = replace(SMALL, minority_fraction=1e-9)
    with pytest.raises(FairLabelError, match=r"repetition 0 \(seed 3\)"):
        harness.run_synthetic_experiment(cfg)


@pytest.mark.skipif(not (ingest.default_data_dir() / "german.data").exists(),
                    reason="German credit file missing")
def test_benchmark_german(tmp_path):
    cfg = harness.BenchmarkConfig(repetitions=2)
    res = harness.run_benchmark_experiment("german", cfg)
    assert res.n_rows == 1000
    assert len(res.original) == len(res.debiased) == 2
    assert res.gain == pytest.approx(res.debiased_dir - res.original_dir)
    path = harness.emit_results(res, tmp_path / "b.json")
    (back,) = harness.load_results(path)
    assert back.gain == pytest.approx(res.gain)
    text = harness.emit_results(res, tmp_path / "b.csv", "csv").read_text()
    assert "german,original,dir," in text

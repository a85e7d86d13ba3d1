import numpy as np
import pandas as pd
import pytest

from fairlabel import ingest
from fairlabel.data import Group
from fairlabel.errors import EmptyAfterCleaningError, SchemaError
from fairlabel.metrics import disparate_impact_ratio

DATA = ingest.default_data_dir()
have = {
    "adult": (DATA / "adult.data").exists(),
    "german": (DATA / "german.data").exists(),
    "compas": (DATA / "compas-scores-two-years.csv").exists(),
}


def needs(name):
    return pytest.mark.skipif(not have[name], reason=f"{name} files not under {DATA}")


def finite(ds):
    return np.isfinite(ds.features).all()


@needs("adult")
class TestAdult:
    def test_raw_count(self):
        assert len(ingest.read_adult_raw(DATA)) == 48_842

    def test_income_labels_normalised(self):
        raw = ingest.read_adult_raw(DATA)
        assert set(raw.income) == {"<=50K", ">50K"}

    def test_loaded(self):
        ds = ingest.load("adult")
        assert len(ds) == 45_222  # rows with a '?' are dropped
        assert finite(ds)
        assert "sex=Male" not in ds.feature_names and "sex" not in ds.feature_names
        assert set(ds.protected_raw[ds.protected == Group.MINORITY]) == {"Female"}

    def test_keep_missing_rows(self):
        ds = ingest.load("adult", drop_missing=False)
        assert len(ds) == 48_842 and finite(ds)

    def test_label_dir_near_reported(self):
        ds = ingest.load("adult", drop_missing=False)
        assert disparate_impact_ratio(ds.labels, ds.protected) == pytest.approx(0.353, abs=0.02)


@needs("german")
class TestGerman:
    def test_counts(self):
        ds = ingest.load("german")
        assert len(ds) == 1000
        assert np.bincount(ds.labels).tolist() == [300, 700]
        assert finite(ds)

    def test_female_codes(self):
        ds = ingest.load("german")
        assert set(ds.protected_raw[ds.protected == Group.MINORITY]) == {"A92"}
        assert int(ds.protected.sum()) == 310


@needs("compas")
class TestCompas:
    def test_count(self):
        ds = ingest.load("compas")
        assert len(ds) == 6167
        assert finite(ds)

    def test_caucasian_majority(self):
        ds = ingest.load("compas")
        assert set(ds.protected_raw[ds.protected == Group.MAJORITY]) == {"Caucasian"}
        # favorable = no recidivism
        raw = ingest.filter_compas(ingest.read_compas_raw(DATA))
        assert np.array_equal(ds.labels, (raw.two_year_recid == 0).astype(int).to_numpy())

    def test_binary_filter(self):
        ds = ingest.load("compas", race_filter="binary")
        assert set(ds.protected_raw) == {"African-American", "Caucasian"}
        assert len(ds) < 6167

    def test_unknown_filter(self):
        with pytest.raises(ValueError):
            ingest.load("compas", race_filter="all")


class TestParsing:
    def test_one_hot_drops_first_level(self):
        frame = pd.DataFrame({"c": ["b", "a", "c", "a"]})
        X, names = ingest.one_hot(frame, ["c"])
        assert names == ["c=b", "c=c"]
        assert X.tolist() == [[1, 0], [0, 0], [0, 1], [0, 0]]

    def test_adult_file_with_header_line(self, tmp_path):
        row = "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, Not-in-family, White, Male, 2174, 0, 40, United-States, <=50K."
        other = "50, Private, 83311, Bachelors, 13, Married, Exec-managerial, Husband, White, Female, 0, 0, 13, United-States, >50K."
        f = tmp_path / "adult.test"
        f.write_text("|1x3 Cross validator\n" + row + "\n" + other + "\n\n")
        ds = ingest.load_adult(f)
        assert len(ds) == 2
        assert ds.labels.tolist() == [0, 1]
        assert ds.protected.tolist() == [Group.MAJORITY, Group.MINORITY]

    def test_wrong_column_count(self, tmp_path):
        f = tmp_path / "bad.data"
        f.write_text("1,2,3\n")
        with pytest.raises(SchemaError):
            ingest.read_adult_raw(f)
        with pytest.raises(SchemaError):
            ingest.read_german_raw(f)

    def test_missing_compas_columns(self, tmp_path):
        f = tmp_path / "c.csv"
        f.write_text("race,age\nCaucasian,30\n")
        with pytest.raises(SchemaError):
            ingest.read_compas_raw(f)

    def test_all_rows_missing(self, tmp_path):
        row = "39, ?, 77516, Bachelors, 13, Never-married, Adm-clerical, Not-in-family, White, Male, 2174, 0, 40, United-States, <=50K"
        f = tmp_path / "a.data"
        f.write_text(row + "\n")
        with pytest.raises(EmptyAfterCleaningError):
            ingest.load_adult(f)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ingest.load("german", tmp_path / "nope.data")

    def test_unknown_dataset(self):
        with pytest.raises(ValueError):
            ingest.load("mnist")

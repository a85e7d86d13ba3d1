"""Loaders for the UCI Adult, German Credit and ProPublica Compas files.

Each loader reads the canonical public distribution from a local path,
encodes the favorable outcome as label 1, maps the protected column to
Majority/Minority, and one-hot encodes categoricals (the alphabetically
first level of each is dropped). The protected column is left out of the
feature matrix unless ``include_protected_feature`` is set.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np
import pandas as pd

from .data import Group, TabularDataset
from .errors import EmptyAfterCleaningError, SchemaError

ADULT_COLUMNS = (
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income",
)

GERMAN_COLUMNS = (
    "status", "duration", "credit_history", "purpose", "credit_amount", "savings",
    "employment", "installment_rate", "personal_status_sex", "other_debtors",
    "residence_since", "property", "age", "other_installment_plans", "housing",
    "existing_credits", "job", "people_liable", "telephone", "foreign_worker",
    "credit_risk",
)

COMPAS_FEATURES = (
    "sex", "age", "age_cat", "race", "juv_fel_count", "juv_misd_count",
    "juv_other_count", "priors_count", "c_charge_degree", "c_charge_desc",
)


@dataclass(frozen=True)
class DatasetRecipe:
    name: str
    target: str
    favorable: Callable[[pd.Series], pd.Series]
    protected: str
    majority: Callable[[pd.Series], pd.Series]
    numeric: tuple[str, ...]
    categorical: tuple[str, ...]
    drop: tuple[str, ...] = ()
    missing_marker: str | None = None
    drop_missing: bool = True
    include_protected_feature: bool = False

    @property
    def attributes(self) -> tuple[str, ...]:
        """Raw attribute columns (protected included) before encoding."""
        return tuple(c for c in self.numeric + self.categorical if c not in self.drop) + (
            (self.protected,) if self.protected not in self.numeric + self.categorical else ()
        )


ADULT = DatasetRecipe(
    name="adult",
    target="income",
    favorable=lambda s: s.str.startswith(">50K"),
    protected="sex",
    majority=lambda s: s == "Male",
    numeric=("age", "fnlwgt", "education-num", "capital-gain", "capital-loss", "hours-per-week"),
    categorical=("workclass", "education", "marital-status", "occupation", "relationship",
                 "race", "native-country"),
    missing_marker="?",
)

GERMAN = DatasetRecipe(
    name="german",
    target="credit_risk",
    favorable=lambda s: s == 1,
    protected="personal_status_sex",
    # A92 and A95 are the two female codes
    majority=lambda s: ~s.isin(["A92", "A95"]),
    numeric=("duration", "credit_amount", "installment_rate", "residence_since", "age",
             "existing_credits", "people_liable"),
    categorical=("status", "credit_history", "purpose", "savings", "employment",
                 "other_debtors", "property", "other_installment_plans", "housing", "job",
                 "telephone", "foreign_worker"),
)

COMPAS = DatasetRecipe(
    name="compas",
    target="two_year_recid",
    favorable=lambda s: s == 0,
    protected="race",
    majority=lambda s: s == "Caucasian",
    numeric=("age", "juv_fel_count", "juv_misd_count", "juv_other_count", "priors_count"),
    categorical=("sex", "age_cat", "c_charge_degree", "c_charge_desc"),
)

RECIPES = {r.name: r for r in (ADULT, GERMAN, COMPAS)}


def _check_file(path) -> Path:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    return path


def one_hot(frame: pd.DataFrame, columns) -> tuple[np.ndarray, list[str]]:
    blocks, names = [], []
    for col in columns:
        values = frame[col].astype(str).to_numpy()
        levels = sorted(set(values))
        for lvl in levels[1:]:
            blocks.append((values == lvl).astype(np.float64))
            names.append(f"{col}={lvl}")
    if not blocks:
        return np.zeros((len(frame), 0)), names
    return np.column_stack(blocks), names


def build_dataset(frame: pd.DataFrame, recipe: DatasetRecipe, provenance: str = ""
                  ) -> TabularDataset:
    """Encode an already-filtered raw frame; the frame index becomes ``row_ids``."""
    if recipe.missing_marker is not None and recipe.drop_missing:
        frame = frame[~(frame == recipe.missing_marker).any(axis=1)]
    if len(frame) == 0:
        raise EmptyAfterCleaningError(f"{recipe.name}: no rows left after cleaning")
    numeric = [c for c in recipe.numeric if c not in recipe.drop]
    categorical = [c for c in recipe.categorical if c not in recipe.drop]
    if recipe.include_protected_feature:
        categorical.append(recipe.protected)
    num = frame[numeric].to_numpy(dtype=np.float64)
    cat, cat_names = one_hot(frame, categorical)
    X = np.hstack([num, cat])
    labels = recipe.favorable(frame[recipe.target]).to_numpy().astype(np.int8)
    is_major = recipe.majority(frame[recipe.protected]).to_numpy()
    protected = np.where(is_major, Group.MAJORITY, Group.MINORITY).astype(np.int8)
    return TabularDataset(
        frame.index.to_numpy(dtype=np.int64), X, labels, protected,
        tuple(numeric) + tuple(cat_names), provenance or recipe.name,
        frame[recipe.protected].astype(str).to_numpy(dtype=object),
    )


# -- Adult -------------------------------------------------------------------

def _read_adult_file(path: Path) -> pd.DataFrame:
    with open(path) as fh:
        first = fh.readline()
    skip = 1 if first.startswith("|") else 0
    df = pd.read_csv(path, header=None, skipinitialspace=True, skiprows=skip, dtype=str,
                     keep_default_na=False)
    df = df[df.iloc[:, 0].str.len() > 0]
    if df.shape[1] != len(ADULT_COLUMNS):
        raise SchemaError(f"{path}: expected {len(ADULT_COLUMNS)} columns, got {df.shape[1]}")
    df.columns = list(ADULT_COLUMNS)
    return df


def read_adult_raw(path) -> pd.DataFrame:
    """All raw Adult records.

    ``path`` is either one comma-separated file or a directory holding
    ``adult.data`` and, optionally, ``adult.test`` (both are concatenated).
    """
    path = _check_file(path)
    if path.is_dir():
        parts = [_read_adult_file(_check_file(path / "adult.data"))]
        if (path / "adult.test").exists():
            parts.append(_read_adult_file(path / "adult.test"))
        df = pd.concat(parts, ignore_index=True)
    else:
        df = _read_adult_file(path).reset_index(drop=True)
    for c in ADULT.numeric:
        df[c] = pd.to_numeric(df[c], errors="raise")
    df["income"] = df["income"].str.rstrip(".")
    return df


def load_adult(path, **recipe_overrides) -> TabularDataset:
    recipe = replace(ADULT, **recipe_overrides)
    return build_dataset(read_adult_raw(path), recipe, f"adult:{path}")


# -- German credit -----------------------------------------------------------

def read_german_raw(path) -> pd.DataFrame:
    path = _check_file(path)
    if path.is_dir():
        path = _check_file(path / "german.data")
    df = pd.read_csv(path, header=None, sep=r"[\s,]+", engine="python")
    if df.shape[1] != len(GERMAN_COLUMNS):
        raise SchemaError(f"{path}: expected {len(GERMAN_COLUMNS)} columns, got {df.shape[1]}")
    df.columns = list(GERMAN_COLUMNS)
    return df


def load_german(path, **recipe_overrides) -> TabularDataset:
    recipe = replace(GERMAN, **recipe_overrides)
    return build_dataset(read_german_raw(path), recipe, f"german:{path}")


# -- Compas ------------------------------------------------------------------

def read_compas_raw(path) -> pd.DataFrame:
    path = _check_file(path)
    if path.is_dir():
        path = _check_file(path / "compas-scores-two-years.csv")
    df = pd.read_csv(path)
    needed = set(COMPAS_FEATURES) | {"two_year_recid", "days_b_screening_arrest", "is_recid",
                                     "score_text"}
    missing = needed - set(df.columns)
    if missing:
        raise SchemaError(f"{path}: missing columns {sorted(missing)}")
    return df


def filter_compas(df: pd.DataFrame, race_filter: str = "caucasian-vs-rest") -> pd.DataFrame:
    """Standard two-year recidivism screening filters.

    ``race_filter="caucasian-vs-rest"`` keeps every race (non-Caucasian rows
    become the minority group); ``"binary"`` keeps only African-American and
    Caucasian rows.
    """
    keep = (
        (df.days_b_screening_arrest <= 30)
        & (df.days_b_screening_arrest >= -30)
        & (df.is_recid != -1)
        & (df.c_charge_degree != "O")
        & df.score_text.notna()
        & (df.score_text != "N/A")
    )
    out = df.loc[keep, list(COMPAS_FEATURES) + ["two_year_recid"]].dropna()
    if race_filter == "binary":
        out = out[out.race.isin(["African-American", "Caucasian"])]
    elif race_filter != "caucasian-vs-rest":
        raise ValueError(f"unknown race_filter {race_filter!r}")
    return out


def load_compas(path, race_filter: str = "caucasian-vs-rest", **recipe_overrides
                ) -> TabularDataset:
    recipe = replace(COMPAS, **recipe_overrides)
    frame = filter_compas(read_compas_raw(path), race_filter)
    return build_dataset(frame, recipe, f"compas:{path}")


LOADERS = {"adult": load_adult, "german": load_german, "compas": load_compas}

DEFAULT_FILES = {
    "adult": ".",
    "german": "german.data",
    "compas": "compas-scores-two-years.csv",
}


def default_data_dir() -> Path:
    """``$FAIRLABEL_DATA`` if set, else ``data/`` next to the source checkout."""
    env = os.environ.get("FAIRLABEL_DATA")
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "data"


def load(name: str, path=None, **kwargs) -> TabularDataset:
    if name not in LOADERS:
        raise ValueError(f"unknown dataset {name!r}; choose from {sorted(LOADERS)}")
    if path is None:
        path = default_data_dir() / DEFAULT_FILES[name]
    return LOADERS[name](path, **kwargs)

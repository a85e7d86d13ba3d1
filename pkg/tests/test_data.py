import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairlabel.data import (
    Direction,
    Flip,
    FlipLog,
    Group,
    Origin,
    TabularDataset,
    apply_flips,
    concat,
    partition_by_group,
    read_csv,
    split_train_test,
    write_csv,
)
from fairlabel.errors import (
    DirectionMismatchError,
    DuplicateRowIdError,
    EmptyGroupError,
    FairLabelError,
    InvalidFractionError,
    SchemaMismatchError,
    UnknownRowIdError,
)

MAJ, MIN = Group.MAJORITY, Group.MINORITY


def make_ds(labels, groups, d=2, ids=None, seed=0):
    n = len(labels)
    X = np.random.default_rng(seed).normal(size=(n, d))
    return TabularDataset(np.arange(n) if ids is None else ids, X, labels, groups)


@st.composite
def datasets(draw, min_size=1, max_size=30):
    n = draw(st.integers(min_size, max_size))
    labels = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    groups = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    ids = draw(st.lists(st.integers(0, 10_000), min_size=n, max_size=n, unique=True))
    return make_ds(labels, groups, ids=np.array(ids), seed=n)


class TestTabularDataset:
    def test_immutable_arrays(self):
        ds = make_ds([0, 1], [MAJ, MIN])
        with pytest.raises(ValueError):
            ds.labels[0] = 1

    def test_rejects_duplicate_ids(self):
        with pytest.raises(DuplicateRowIdError):
            make_ds([0, 1], [0, 1], ids=np.array([3, 3]))

    def test_rejects_nan_features(self):
        with pytest.raises(FairLabelError):
            TabularDataset([0], [[np.nan]], [0], [0])

    def test_rejects_nonbinary_labels(self):
        with pytest.raises(FairLabelError):
            TabularDataset([0], [[1.0]], [2], [0])

    def test_row_count_mismatch(self):
        with pytest.raises(SchemaMismatchError):
            TabularDataset([0, 1], [[1.0]], [0, 1], [0, 1])

    def test_design_matrix_with_protected(self):
        ds = make_ds([0, 1, 0], [MAJ, MIN, MIN])
        X = ds.design_matrix(include_protected=True)
        assert X.shape == (3, 3)
        assert X[:, -1].tolist() == [0.0, 1.0, 1.0]


class TestPartition:
    def test_four_rows(self):
        ds = make_ds([0, 1, 1, 0], [MAJ, MIN, MAJ, MIN])
        maj, mino = partition_by_group(ds)
        assert maj.row_ids.tolist() == [0, 2]
        assert mino.row_ids.tolist() == [1, 3]

    def test_all_majority(self):
        with pytest.raises(EmptyGroupError):
            partition_by_group(make_ds([0, 1], [MAJ, MAJ]))

    def test_empty(self):
        with pytest.raises(EmptyGroupError):
            partition_by_group(TabularDataset([], np.zeros((0, 1)), [], []))

    @given(datasets(min_size=2))
    def test_round_trip_conserves_rows(self, ds):
        if len(set(ds.protected.tolist())) < 2:
            return
        back = concat(*partition_by_group(ds))
        before = sorted(zip(ds.row_ids.tolist(), ds.labels.tolist(), ds.protected.tolist()))
        after = sorted(zip(back.row_ids.tolist(), back.labels.tolist(), back.protected.tolist()))
        assert before == after


class TestSplit:
    def test_sizes(self):
        ds = TabularDataset(np.arange(100_000), np.zeros((100_000, 1)),
                            np.zeros(100_000, int), np.zeros(100_000, int))
        train, test = split_train_test(ds, 0.2, seed=7)
        assert (len(train), len(test)) == (80_000, 20_000)
        assert not np.intersect1d(train.row_ids, test.row_ids).size

    def test_deterministic(self):
        ds = make_ds([0, 1] * 5, [0, 1] * 5)
        a = split_train_test(ds, 0.2, 3)
        b = split_train_test(ds, 0.2, 3)
        assert a[1].row_ids.tolist() == b[1].row_ids.tolist()

    def test_seeds_differ(self):
        # enumerated with numpy's default_rng permutation
        ds = make_ds([0, 1] * 5, [0, 1] * 5)
        t1 = split_train_test(ds, 0.2, 1)[1].row_ids.tolist()
        t2 = split_train_test(ds, 0.2, 2)[1].row_ids.tolist()
        assert t1 == sorted(np.random.default_rng(1).permutation(10)[:2].tolist())
        assert t2 == sorted(np.random.default_rng(2).permutation(10)[:2].tolist())
        assert t1 != t2

    @pytest.mark.parametrize("frac", [0.0, 1.0, -0.1, 1.5])
    def test_invalid_fraction(self, frac):
        with pytest.raises(InvalidFractionError):
            split_train_test(make_ds([0, 1] * 5, [0, 1] * 5), frac, 0)

    def test_fraction_too_small_for_n(self):
        with pytest.raises(InvalidFractionError):
            split_train_test(make_ds([0, 1], [0, 1]), 0.2, 0)


class TestConcat:
    def test_cardinality_and_order(self):
        a = make_ds([0, 1], [0, 1], d=3, ids=np.array([0, 1]))
        b = make_ds([1, 1, 0], [0, 0, 1], d=3, ids=np.array([5, 6, 7]))
        c = concat(a, b)
        assert len(c) == 5
        assert c.row_ids.tolist() == [0, 1, 5, 6, 7]

    def test_schema_mismatch(self):
        a = make_ds([0], [0], d=10)
        b = make_ds([0], [0], d=9, ids=np.array([4]))
        with pytest.raises(SchemaMismatchError):
            concat(a, b)

    def test_duplicate_ids(self):
        with pytest.raises(DuplicateRowIdError):
            concat(make_ds([0], [0]), make_ds([1], [1]))


class TestApplyFlips:
    def test_single_flip(self):
        ds = make_ds([0, 0, 1], [0, 1, 1])
        out = apply_flips(ds, FlipLog((Flip(1, Direction.ZERO_TO_ONE, Origin.PROPOSED),)))
        assert out.labels.tolist() == [0, 1, 1]
        assert ds.labels.tolist() == [0, 0, 1]
        assert np.array_equal(out.features, ds.features)

    def test_empty_log(self):
        ds = make_ds([0, 0, 1], [0, 1, 1])
        assert apply_flips(ds, FlipLog()).labels.tolist() == [0, 0, 1]

    def test_direction_mismatch(self):
        ds = make_ds([0, 0, 1], [0, 1, 1])
        with pytest.raises(DirectionMismatchError):
            apply_flips(ds, FlipLog((Flip(2, Direction.ZERO_TO_ONE, Origin.PROPOSED),)))

    def test_unknown_row(self):
        ds = make_ds([0, 0, 1], [0, 1, 1])
        with pytest.raises(UnknownRowIdError):
            apply_flips(ds, FlipLog((Flip(9, Direction.ZERO_TO_ONE, Origin.PROPOSED),)))

    def test_flip_survives_reordering(self):
        ds = make_ds([0, 1, 0, 1], [MAJ, MIN, MIN, MAJ])
        maj, mino = partition_by_group(ds)
        shuffled = concat(mino, maj)
        out = apply_flips(shuffled, FlipLog((Flip(2, Direction.ZERO_TO_ONE, Origin.PROPOSED),)))
        assert out.labels[out.positions([2])[0]] == 1

    @given(datasets(), st.data())
    def test_involution(self, ds, data):
        chosen = data.draw(st.lists(st.sampled_from(range(len(ds))), unique=True))
        log = FlipLog(tuple(
            Flip(int(ds.row_ids[i]),
                 Direction.ZERO_TO_ONE if ds.labels[i] == 0 else Direction.ONE_TO_ZERO,
                 Origin.INJECTED)
            for i in chosen
        ))
        flipped = apply_flips(ds, log)
        assert int(np.sum(flipped.labels != ds.labels)) == len(chosen)
        assert apply_flips(flipped, log.inverted()).equals(ds)


class TestFlipLog:
    def test_one_entry_per_row_and_origin(self):
        f = Flip(1, Direction.ZERO_TO_ONE, Origin.PROPOSED)
        with pytest.raises(DuplicateRowIdError):
            FlipLog((f, f))
        FlipLog((f, Flip(1, Direction.ONE_TO_ZERO, Origin.INJECTED)))

    def test_json_round_trip(self, tmp_path):
        log = FlipLog((Flip(3, Direction.ONE_TO_ZERO, Origin.INJECTED),
                       Flip(8, Direction.ZERO_TO_ONE, Origin.PROPOSED)))
        log.save(tmp_path / "f.json")
        back = FlipLog.load(tmp_path / "f.json")
        assert back.entries == log.entries
        assert log.to_json_list()[0] == {"row_id": 3, "direction": "1to0", "origin": "injected"}


def test_csv_round_trip(tmp_path):
    ds = make_ds([0, 1, 1], [MAJ, MIN, MAJ], d=3, ids=np.array([10, 4, 7]))
    write_csv(ds, tmp_path / "d.csv")
    header = (tmp_path / "d.csv").read_text().splitlines()[0]
    assert header == "row_id,x0,x1,x2,label,protected"
    back = read_csv(tmp_path / "d.csv")
    assert back.equals(ds)


@settings(max_examples=50)
@given(datasets(min_size=5), st.integers(0, 2**31))
def test_split_is_pure(ds, seed):
    a_tr, a_te = split_train_test(ds, 0.2, seed)
    b_tr, b_te = split_train_test(ds, 0.2, seed)
    assert a_tr.equals(b_tr) and a_te.equals(b_te)
    assert sorted(np.concatenate([a_tr.row_ids, a_te.row_ids]).tolist()) == sorted(ds.row_ids.tolist())

"""
Tests for CSV ingestion, one-hot encoding and train/test splits.
"""
import numpy as np
import pytest
from pydantic import ValidationError

from app.datasets import (
    ColumnEncoding,
    ColumnRole,
    ColumnSpec,
    DatasetSpec,
    SplitSpec,
    load_csv,
    load_dataset_spec,
    load_train_test,
    numeric_spec,
    one_hot,
    split,
    write_csv,
)
from app.errors import EmptyInput, InvalidLabel, InvalidSplit, MissingValue, ParseError, SchemaError
from app.generators import make_rng
from app.models import Dataset


def _spec(**kwargs) -> DatasetSpec:
    return DatasetSpec(
        columns=[
            ColumnSpec(name="x", role=ColumnRole.FEATURE),
            ColumnSpec(name="y", role=ColumnRole.TARGET, encoding=ColumnEncoding.CATEGORICAL_ONEHOT),
            ColumnSpec(name="s", role=ColumnRole.SENSITIVE, encoding=ColumnEncoding.CATEGORICAL_ONEHOT),
        ],
        **kwargs,
    )


def _write(tmp_path, text: str, name: str = "data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestOneHot:
    """Indicator matrices."""

    def test_columns_sum_to_one(self):
        encoded = one_hot([0, 2, 1, 2], 3)
        assert encoded.shape == (3, 4)
        assert np.allclose(encoded.sum(axis=0), 1.0)
        assert np.allclose(encoded[:, 1], [0.0, 0.0, 1.0])

    def test_out_of_range_label(self):
        with pytest.raises(InvalidLabel):
            one_hot([0, 3], 3)


class TestLoadCsv:
    """Header-driven parsing with per-column encodings."""

    def test_categorical_and_numeric_columns(self, tmp_path):
        path = _write(tmp_path, "x,y,s\n1.5,a,m\n2.0,b,f\n-1,a,f\n")
        data = load_csv(path, _spec())
        assert data.X.shape == (1, 3) and np.allclose(data.X, [[1.5, 2.0, -1.0]])
        assert data.Y.shape == (2, 3)
        assert list(data.y_labels) == [0, 1, 0]
        assert list(data.s_labels) == [1, 0, 0], "Categories are sorted, so 'f' is class 0"
        assert data.target_names == ["y=a", "y=b"]

    def test_header_only_file(self, tmp_path):
        with pytest.raises(EmptyInput):
            load_csv(_write(tmp_path, "x,y,s\n"), _spec())

    def test_missing_column(self, tmp_path):
        with pytest.raises(SchemaError):
            load_csv(_write(tmp_path, "x,y\n1,a\n"), _spec())

    def test_unparseable_number_reports_position(self, tmp_path):
        with pytest.raises(ParseError) as info:
            load_csv(_write(tmp_path, "x,y,s\n1,a,m\nabc,b,f\n"), _spec())
        assert info.value.row == 2 and info.value.column == "x"

    def test_missing_value(self, tmp_path):
        with pytest.raises(MissingValue) as info:
            load_csv(_write(tmp_path, "x,y,s\n1,a,m\n,b,f\n"), _spec())
        assert info.value.row == 2

    def test_drop_missing_removes_rows(self, tmp_path):
        path = _write(tmp_path, "x,y,s\n1,a,m\n?,b,f\n3,b,f\n")
        data = load_csv(path, _spec(drop_missing=True, na_values=["?"]))
        assert data.n_samples == 2
        assert np.allclose(data.X, [[1.0, 3.0]])

    def test_parse_error_after_dropped_row_keeps_file_row(self, tmp_path):
        path = _write(tmp_path, "x,y,s\n?,a,m\n1,b,f\nabc,b,f\n")
        with pytest.raises(ParseError) as info:
            load_csv(path, _spec(drop_missing=True, na_values=["?"]))
        assert info.value.row == 3, f"Expected the third data row, got {info.value.row}"

    def test_unknown_category_after_dropped_row_keeps_file_row(self, tmp_path):
        train = load_csv(_write(tmp_path, "x,y,s\n1,a,m\n2,b,f\n", "train.csv"), _spec())
        path = _write(tmp_path, "x,y,s\n?,a,m\n1,a,m\n2,c,f\n", "test.csv")
        with pytest.raises(ParseError) as info:
            load_csv(path, _spec(drop_missing=True, na_values=["?"]), reference=train)
        assert info.value.row == 3 and info.value.column == "y"

    def test_value_map_and_leading_spaces(self, tmp_path):
        spec = DatasetSpec(columns=[
            ColumnSpec(name="x", role=ColumnRole.FEATURE),
            ColumnSpec(name="y", role=ColumnRole.TARGET, encoding=ColumnEncoding.CATEGORICAL_ONEHOT,
                       value_map={">50K.": ">50K", "<=50K.": "<=50K"}),
            ColumnSpec(name="s", role=ColumnRole.SENSITIVE, encoding=ColumnEncoding.CATEGORICAL_ONEHOT),
        ], skip_initial_space=True)
        data = load_csv(_write(tmp_path, "x, y, s\n1, >50K., m\n2, <=50K, f\n"), spec)
        assert data.target_names == ["y=<=50K", "y=>50K"]
        assert list(data.y_labels) == [1, 0]

    def test_binary_threshold(self, tmp_path):
        spec = DatasetSpec(columns=[
            ColumnSpec(name="x", role=ColumnRole.FEATURE),
            ColumnSpec(name="y", role=ColumnRole.TARGET, encoding=ColumnEncoding.CATEGORICAL_ONEHOT),
            ColumnSpec(name="age", role=ColumnRole.SENSITIVE, encoding=ColumnEncoding.BINARY_THRESHOLD, threshold=25),
        ])
        data = load_csv(_write(tmp_path, "x,y,age\n1,a,20\n2,b,25\n3,a,40\n"), spec)
        assert list(data.s_labels) == [0, 0, 1]
        assert data.S.shape == (1, 3)

    def test_ignored_columns_are_skipped(self, tmp_path):
        spec = DatasetSpec(columns=_spec().columns + [ColumnSpec(name="note", role=ColumnRole.IGNORE)])
        data = load_csv(_write(tmp_path, "x,y,s,note\n1,a,m,anything\n2,b,f,\n"), spec)
        assert data.n_samples == 2

    def test_test_file_reuses_training_statistics(self, tmp_path):
        train = load_csv(_write(tmp_path, "x,y,s\n1,a,m\n3,b,f\n", "train.csv"), _spec(standardize=True))
        test = load_csv(_write(tmp_path, "x,y,s\n2,b,m\n", "test.csv"), _spec(standardize=True), reference=train)
        assert np.allclose(train.X, [[-1.0, 1.0]])
        assert np.allclose(test.X, [[0.0]]), "Test file must use the training mean and std"
        assert test.Y.shape == (2, 1), "Test file must keep the training categories"

    def test_unknown_test_category(self, tmp_path):
        train = load_csv(_write(tmp_path, "x,y,s\n1,a,m\n3,b,f\n", "train.csv"), _spec())
        with pytest.raises(ParseError):
            load_csv(_write(tmp_path, "x,y,s\n2,c,m\n", "test.csv"), _spec(), reference=train)

    def test_round_trip_is_bit_exact(self, tmp_path):
        rng = make_rng(0)
        original = Dataset(X=rng.standard_normal((3, 25)), Y=rng.standard_normal((2, 25)), S=rng.standard_normal((1, 25)),
                           feature_names=["a", "b", "c"], target_names=["t1", "t2"], sensitive_names=["u"])
        path = tmp_path / "round.csv"
        write_csv(path, original)
        loaded = load_csv(path, numeric_spec(original))
        assert np.array_equal(loaded.X, original.X)
        assert np.array_equal(loaded.Y, original.Y)
        assert np.array_equal(loaded.S, original.S)


class TestDatasetSpec:
    """Spec validation and JSON loading."""

    def test_missing_role(self):
        with pytest.raises(ValidationError):
            DatasetSpec(columns=[ColumnSpec(name="x", role=ColumnRole.FEATURE)])

    def test_threshold_required(self):
        with pytest.raises(ValidationError):
            ColumnSpec(name="age", role=ColumnRole.SENSITIVE, encoding=ColumnEncoding.BINARY_THRESHOLD)

    def test_load_from_json(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(_spec().model_dump_json(), encoding="utf-8")
        assert load_dataset_spec(path) == _spec()


class TestSplit:
    """Seeded shuffle-splits."""

    def _indexed(self, n: int) -> Dataset:
        return Dataset(X=np.arange(n, dtype=float)[None, :], Y=np.zeros((1, n)), S=np.zeros((1, n)))

    def test_sizes(self):
        train, test = split(self._indexed(5000), SplitSpec(train_fraction=0.8, seed=0))
        assert (train.n_samples, test.n_samples) == (4000, 1000)

    def test_disjoint_and_exhaustive(self):
        train, test = split(self._indexed(100), SplitSpec(train_fraction=0.7, seed=3))
        combined = np.sort(np.concatenate([train.X[0], test.X[0]]))
        assert np.array_equal(combined, np.arange(100, dtype=float))

    def test_same_seed_same_split(self):
        data = self._indexed(50)
        first, _ = split(data, SplitSpec(train_fraction=0.5, seed=9))
        second, _ = split(data, SplitSpec(train_fraction=0.5, seed=9))
        assert np.array_equal(first.X, second.X)

    @pytest.mark.parametrize("fraction", [0.0, 1.0, 1.5])
    def test_degenerate_fraction(self, fraction):
        with pytest.raises(InvalidSplit):
            split(self._indexed(10), SplitSpec(train_fraction=fraction))

    def test_explicit_pair(self, tmp_path):
        train_path = _write(tmp_path, "x,y,s\n1,a,m\n3,b,f\n", "train.csv")
        test_path = _write(tmp_path, "x,y,s\n2,b,m\n", "test.csv")
        train, test = load_train_test(_spec(), SplitSpec(train_path=str(train_path), test_path=str(test_path)))
        assert (train.n_samples, test.n_samples) == (2, 1)

    def test_half_pair_rejected(self):
        with pytest.raises(ValidationError):
            SplitSpec(train_path="train.csv")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

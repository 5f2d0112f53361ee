"""LIBSVM parsing, serialization round-trips, and the feature scalings."""

import gzip
import io
import tracemalloc

import numpy as np
import pytest
from numpy.testing import assert_allclose

from farsa import (
    Dataset,
    DatasetFormatError,
    SparseMatrix,
    load_dataset,
    parse_libsvm,
    relabel_binary_mnist,
    scale_max_abs,
    scale_minus1_1,
    scale_pixels,
    write_libsvm,
)


def random_dataset(rng, m=None, n=None, empty_rows=True):
    m = m or int(rng.integers(1, 15))
    n = n or int(rng.integers(1, 12))
    dense = np.where(rng.random((m, n)) < 0.5, rng.normal(size=(m, n)), 0.0)
    if empty_rows and m > 2:
        dense[int(rng.integers(0, m))] = 0.0  # a sample with no features
    labels = np.where(rng.random(m) < 0.5, -1.0, 1.0)
    return Dataset(
        matrix=SparseMatrix.from_dense(dense), labels=labels, name="random"
    )


class TestParse:
    def test_direct_transcription(self):
        ds = parse_libsvm(io.StringIO("+1 1:0.5 3:2\n-1 2:1\n"))
        assert ds.n_samples == 2 and ds.n_features == 3
        assert_allclose(ds.matrix.to_dense(), [[0.5, 0.0, 2.0], [0.0, 1.0, 0.0]])
        assert ds.labels.tolist() == [1.0, -1.0]

    def test_blank_lines_skipped(self):
        ds = parse_libsvm(io.StringIO("\n+1 1:1\n\n-1 1:2\n\n"))
        assert ds.n_samples == 2

    def test_zero_one_labels_normalized(self):
        ds = parse_libsvm(io.StringIO("1 1:1\n0 1:2\n"))
        assert ds.labels.tolist() == [1.0, -1.0]

    def test_empty_input_rejected(self):
        with pytest.raises(DatasetFormatError, match="no samples"):
            parse_libsvm(io.StringIO(""))

    def test_malformed_token_names_line(self):
        with pytest.raises(DatasetFormatError, match="line 2"):
            parse_libsvm(io.StringIO("+1 1:1\n-1 2:oops\n"))
        with pytest.raises(DatasetFormatError, match="line 1"):
            parse_libsvm(io.StringIO("+1 1=3\n"))
        with pytest.raises(DatasetFormatError, match="line 1.*label"):
            parse_libsvm(io.StringIO("yes 1:1\n"))

    def test_nonincreasing_indices_rejected(self):
        with pytest.raises(DatasetFormatError, match="strictly increasing"):
            parse_libsvm(io.StringIO("+1 2:1 2:2\n"))
        with pytest.raises(DatasetFormatError, match="strictly increasing"):
            parse_libsvm(io.StringIO("+1 3:1 2:2\n"))

    def test_unknown_label_rejected(self):
        with pytest.raises(DatasetFormatError, match="unknown label"):
            parse_libsvm(io.StringIO("3 1:1\n"))

    def test_zero_index_rejected(self):
        with pytest.raises(DatasetFormatError, match="1-based"):
            parse_libsvm(io.StringIO("+1 0:1\n"))

    def test_raw_labels_kept_on_request(self):
        ds = parse_libsvm(io.StringIO("7 1:1\n3 1:2\n"), normalize_labels=False)
        assert ds.labels.tolist() == [7.0, 3.0]

    def test_explicit_feature_count(self):
        ds = parse_libsvm(io.StringIO("+1 1:1\n"), n_features=10)
        assert ds.n_features == 10
        with pytest.raises(DatasetFormatError, match="smaller than"):
            parse_libsvm(io.StringIO("+1 5:1\n"), n_features=2)


class TestRoundTrip:
    def test_serialize_parse_identity(self):
        rng = np.random.default_rng(50)
        for _ in range(100):
            ds = random_dataset(rng)
            buffer = io.StringIO()
            write_libsvm(ds, buffer)
            back = parse_libsvm(
                io.StringIO(buffer.getvalue()), n_features=ds.n_features
            )
            assert np.array_equal(back.labels, ds.labels)
            assert np.array_equal(back.matrix.row_offsets, ds.matrix.row_offsets)
            assert np.array_equal(back.matrix.col_indices, ds.matrix.col_indices)
            assert np.array_equal(back.matrix.values, ds.matrix.values)

    def test_single_feature_rows(self):
        ds = parse_libsvm(io.StringIO("+1 4:2.5\n-1 1:-3\n"))
        buffer = io.StringIO()
        write_libsvm(ds, buffer)
        back = parse_libsvm(io.StringIO(buffer.getvalue()))
        assert np.array_equal(back.matrix.values, ds.matrix.values)

    def test_gzip_file_round_trip(self, tmp_path):
        rng = np.random.default_rng(51)
        ds = random_dataset(rng, m=8, n=5)
        path = tmp_path / "data.libsvm.gz"
        write_libsvm(ds, path)
        with gzip.open(path, "rt") as handle:
            assert handle.readline()  # really gzip-compressed text
        back = load_dataset(path, n_features=ds.n_features)
        assert back.name == "data.libsvm"
        assert np.array_equal(back.matrix.values, ds.matrix.values)
        assert np.array_equal(back.labels, ds.labels)

    def test_streaming_memory_proportional_to_nnz(self, tmp_path):
        # news20-shaped: huge feature count, modest nnz; dense storage
        # would need ~1.6 GB, streaming should stay within tens of MB
        rng = np.random.default_rng(52)
        path = tmp_path / "wide.libsvm"
        n_rows, n_cols, per_row = 200, 1_000_000, 1000
        with open(path, "w") as handle:
            for _ in range(n_rows):
                cols = np.sort(rng.choice(n_cols, size=per_row, replace=False)) + 1
                vals = rng.random(per_row)
                line = "+1 " + " ".join(
                    f"{c}:{v:.6f}" for c, v in zip(cols, vals)
                )
                handle.write(line + "\n")
        tracemalloc.start()
        ds = load_dataset(path)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        assert ds.matrix.nnz == n_rows * per_row
        assert ds.n_features == max(ds.matrix.col_indices) + 1
        assert peak < 64 * 1024 * 1024


class TestScaling:
    def test_minus1_1_endpoints_and_midpoint(self):
        ds = Dataset(
            matrix=SparseMatrix.from_dense([[0.0], [5.0], [10.0]]),
            labels=np.array([1.0, -1.0, 1.0]),
        )
        scaled = scale_minus1_1(ds)
        assert_allclose(scaled.matrix.to_dense().ravel(), [-1.0, 0.0, 1.0])
        assert scaled.scaled

    def test_constant_column_maps_to_zero(self):
        ds = Dataset(
            matrix=SparseMatrix.from_dense([[3.0, 1.0], [3.0, 2.0]]),
            labels=np.array([1.0, -1.0]),
        )
        scaled = scale_minus1_1(ds)
        assert np.all(scaled.matrix.to_dense()[:, 0] == 0.0)

    def test_scaled_columns_span_unit_interval(self):
        rng = np.random.default_rng(53)
        ds = random_dataset(rng, m=20, n=6, empty_rows=False)
        dense = scale_minus1_1(ds).matrix.to_dense()
        original = ds.matrix.to_dense()
        for j in range(6):
            if original[:, j].max() > original[:, j].min():
                assert dense[:, j].min() == -1.0
                assert dense[:, j].max() == 1.0

    def test_minus1_1_idempotent(self):
        rng = np.random.default_rng(54)
        ds = random_dataset(rng, m=15, n=5, empty_rows=False)
        once = scale_minus1_1(ds)
        twice = scale_minus1_1(once)
        assert_allclose(
            twice.matrix.to_dense(), once.matrix.to_dense(), atol=1e-15
        )

    def test_max_abs_preserves_sparsity(self):
        rng = np.random.default_rng(55)
        ds = random_dataset(rng, m=10, n=4)
        scaled = scale_max_abs(ds)
        assert scaled.matrix.nnz == ds.matrix.nnz
        assert np.abs(scaled.matrix.values).max() <= 1.0


class TestPixels:
    def test_full_intensity(self):
        ds = Dataset(
            matrix=SparseMatrix.from_dense([[255.0, 0.0]]), labels=np.array([1.0])
        )
        scaled = scale_pixels(ds, 8)
        assert scaled.matrix.to_dense()[0, 0] == 255.0 / 256.0 == 0.99609375
        assert scaled.matrix.to_dense()[0, 1] == 0.0

    def test_sparsity_pattern_preserved_and_range(self):
        rng = np.random.default_rng(56)
        dense = np.where(
            rng.random((6, 7)) < 0.5, rng.integers(0, 256, size=(6, 7)), 0
        ).astype(float)
        ds = Dataset(
            matrix=SparseMatrix.from_dense(dense), labels=np.ones(6)
        )
        scaled = scale_pixels(ds, 8)
        assert scaled.matrix.nnz == ds.matrix.nnz
        out = scaled.matrix.to_dense()
        assert out.min() >= 0.0 and out.max() < 1.0

    def test_out_of_range_value_names_position(self):
        ds = Dataset(
            matrix=SparseMatrix.from_dense([[0.0, 300.0], [1.0, 2.0]]),
            labels=np.array([1.0, -1.0]),
        )
        with pytest.raises(ValueError, match="row 0, column 1"):
            scale_pixels(ds, 8)
        ds2 = Dataset(
            matrix=SparseMatrix.from_dense([[0.5]]), labels=np.array([1.0])
        )
        with pytest.raises(ValueError, match="not an integer"):
            scale_pixels(ds2, 8)


class TestRelabel:
    def test_low_digits_map_to_minus_one(self):
        assert relabel_binary_mnist([0.0, 4.0]).tolist() == [-1.0, -1.0]

    def test_high_digits_map_to_plus_one(self):
        assert relabel_binary_mnist([5.0, 9.0]).tolist() == [1.0, 1.0]

    def test_mixed_array_preserves_order(self):
        out = relabel_binary_mnist([3.0, 7.0, 0.0, 5.0, 4.0])
        assert out.tolist() == [-1.0, 1.0, -1.0, 1.0, -1.0]

    def test_non_digit_rejected(self):
        with pytest.raises(ValueError, match="digit"):
            relabel_binary_mnist([2.5])
        with pytest.raises(ValueError, match="digit"):
            relabel_binary_mnist([11.0])

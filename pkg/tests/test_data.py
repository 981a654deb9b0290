import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from hdboost.data import Dataset, inner_n, norm_2n, read_csv, standardize
from hdboost.errors import ConstantColumn, LengthMismatch, MissingColumn, ParseError
from hdboost.rng import RngStream, gaussian, permutation, uniform


class TestStandardize:
    def test_fixed_point(self):
        ds = standardize(np.array([[1.0], [1], [-1], [-1]]), np.zeros(4))
        np.testing.assert_allclose(ds.x[:, 0], [1, 1, -1, -1])

    def test_shift_and_scale(self):
        ds = standardize(np.array([[0.0], [0], [2], [2]]), np.arange(4.0))
        np.testing.assert_allclose(ds.x[:, 0], [-1, -1, 1, 1])
        np.testing.assert_allclose(ds.column_means, [1.0])
        np.testing.assert_allclose(ds.column_scales, [1.0])
        assert ds.y_mean == pytest.approx(1.5)
        np.testing.assert_allclose(ds.y, [-1.5, -0.5, 0.5, 1.5])

    def test_constant_column(self):
        x = np.column_stack([np.arange(4.0), np.full(4, 5.0)])
        with pytest.raises(ConstantColumn) as err:
            standardize(x, np.zeros(4))
        assert err.value.column == 1

    def test_uncentered_response(self):
        ds = standardize(np.arange(6.0).reshape(3, 2) ** 2, np.ones(3), center_y=False)
        np.testing.assert_allclose(ds.y, 1.0)

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, (7, 3), elements=st.floats(-1e3, 1e3)))
    def test_moments_and_idempotence(self, x):
        if np.any(np.var(x, axis=0) < 1e-6):
            return
        ds = standardize(x, np.zeros(7))
        np.testing.assert_allclose(ds.x.mean(axis=0), 0, atol=1e-10)
        np.testing.assert_allclose(np.mean(ds.x**2, axis=0), 1, atol=1e-10)
        again = standardize(ds.x, np.zeros(7))
        np.testing.assert_allclose(again.x, ds.x, atol=1e-12)

    def test_transform_reuses_training_statistics(self, rng):
        x = rng.normal(3, 2, (30, 4))
        ds = standardize(x, np.zeros(30))
        np.testing.assert_allclose(ds.transform(x), ds.x, atol=1e-12)


class TestDataset:
    def test_validation(self):
        with pytest.raises(LengthMismatch):
            Dataset(np.ones((3, 2)), np.ones(4))
        with pytest.raises(ValueError):
            Dataset(np.ones((1, 2)), np.ones(1))
        with pytest.raises(LengthMismatch):
            Dataset(np.ones((3, 2)), np.ones(3), true_beta=np.ones(3))

    def test_arrays_are_read_only(self):
        ds = Dataset(np.eye(3), np.ones(3))
        with pytest.raises(ValueError):
            ds.x[0, 0] = 5.0
        with pytest.raises(ValueError):
            ds.gram[0, 0] = 5.0

    def test_gram_and_signal(self, rng):
        x = rng.standard_normal((10, 3))
        ds = Dataset(x, np.zeros(10), true_beta=[1.0, 0, 2])
        np.testing.assert_allclose(ds.gram, x.T @ x / 10)
        np.testing.assert_allclose(ds.signal, x @ [1.0, 0, 2])
        assert Dataset(x, np.zeros(10)).signal is None


class TestInnerProducts:
    def test_examples(self):
        assert inner_n([1, 1], [1, -1]) == 0
        assert inner_n([1, 1, -1, -1], [1, 1, -1, -1]) == 1
        assert inner_n([2, 0], [3, 0]) == 3
        assert norm_2n([3, 4]) == pytest.approx(np.sqrt(12.5))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            inner_n([1, 2], [1, 2, 3])


class TestReadCsv:
    def write(self, tmp_path, text):
        path = tmp_path / "d.csv"
        path.write_text(text)
        return path

    def test_basic(self, tmp_path):
        path = self.write(tmp_path, "y,x1,x2\n1,2,3\n4,5,6\n7,8,9\n")
        x, y, names = read_csv(path, "y")
        assert x.shape == (3, 2) and names == ["x1", "x2"]
        np.testing.assert_array_equal(y, [1, 4, 7])
        np.testing.assert_array_equal(x[:, 1], [3, 6, 9])

    def test_parse_error_location(self, tmp_path):
        path = self.write(tmp_path, "y,x1\n1,2\n3,abc\n")
        with pytest.raises(ParseError) as err:
            read_csv(path, "y")
        assert (err.value.row, err.value.col) == (2, 1)

    def test_ragged_row(self, tmp_path):
        with pytest.raises(ParseError):
            read_csv(self.write(tmp_path, "y,x1\n1,2\n3\n"), "y")

    def test_missing_column(self, tmp_path):
        with pytest.raises(MissingColumn, match="MissingColumn"):
            read_csv(self.write(tmp_path, "y,x1\n1,2\n3,4\n"), "z")

    def test_without_response(self, tmp_path):
        x, y, names = read_csv(self.write(tmp_path, "a,b\n1,2\n3,4\n"))
        assert y is None and x.shape == (2, 2) and names == ["a", "b"]


class TestRng:
    def test_determinism(self):
        a = gaussian(RngStream(7, 3), 100)
        b = gaussian(RngStream(7, 3), 100)
        np.testing.assert_array_equal(a, b)

    def test_substreams_differ(self):
        assert not np.array_equal(gaussian(RngStream(7, 0), 10), gaussian(RngStream(7, 1), 10))
        s = RngStream(7)
        assert not np.array_equal(uniform(s.child(0), 10), uniform(s.child(1), 10))

    def test_prefix_consistency(self):
        np.testing.assert_array_equal(gaussian(RngStream(1), 7), gaussian(RngStream(1), 20)[:7])

    def test_moments(self):
        z = gaussian(RngStream(123), 10**6)
        assert abs(z.mean()) < 5e-3
        assert abs(z.var() - 1) < 1e-2

    def test_permutation(self):
        perm = permutation(RngStream(5), 50)
        np.testing.assert_array_equal(np.sort(perm), np.arange(50))

    def test_rejects_negative_seed(self):
        with pytest.raises(ValueError):
            RngStream(-1)

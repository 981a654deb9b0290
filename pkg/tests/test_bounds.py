import math

import numpy as np
import pytest

from conftest import orthonormal_design
from hdboost.bounds import (bounds_to_csv, check_bounds, run_pga, z_identity_gap, z_sequence,
                            _longest_n_runs)
from hdboost.boosting import BoostConfig, run_ba
from hdboost.data import Dataset, standardize
from hdboost.eigen import restricted_eigen_scan
from hdboost.errors import InsufficientEigenScan
from hdboost.stopping import FixedSteps
from hdboost.theory import lambda_n


def by_name(reports):
    return {r.name: r for r in reports}


class TestRunPga:
    def test_orthonormal(self):
        x = orthonormal_design(12)
        beta = np.zeros(12)
        beta[[2, 5, 9]] = [1.0, -2.0, 0.5]
        path = run_pga(beta, x, 30)
        assert len(path.steps) == 3 and path.labels == ["R"] * 3
        assert path.residual_sq_sequence()[-1] == 0.0

    def test_zero_beta(self):
        path = run_pga(np.zeros(4), orthonormal_design(4), 10)
        assert len(path.steps) == 0

    def test_monotone_prediction_error(self, rng):
        x = standardize(rng.standard_normal((200, 20)), np.zeros(200)).x
        beta = np.zeros(20)
        beta[:5] = rng.standard_normal(5) + 2
        v = run_pga(beta, x, 200).pred_sq_sequence()
        live = v[:-1] > 1e-20 * v[0]
        assert np.all(np.diff(v)[live] < 0)


class TestCheckBounds:
    def test_equal_coefficients_orthonormal(self):
        x = orthonormal_design(8)
        beta = np.array([1.0, 1, 1, 1, 0, 0, 0, 0])
        path = run_pga(beta, x, 10)
        rep = restricted_eigen_scan(Dataset(x, x @ beta), 4)
        out = by_name(check_bounds(path, rep))
        assert out["step-ratio"].holds and out["step-ratio"].min_slack >= -1e-12
        # removing one of q equal coefficients gives ratio exactly 1 - 1/q
        assert out["step-ratio"].slack[0] == pytest.approx(0, abs=1e-12)
        assert out["revisit-mu_e"].holds
        assert out["revisit-mu_a"].advisory

    def test_single_spike(self):
        x = orthonormal_design(4)
        path = run_pga([0, 3.0, 0, 0], x, 5)
        assert len(path.steps) == 1
        rep = restricted_eigen_scan(Dataset(x, np.zeros(8)), 2)
        assert all(r.holds for r in check_bounds(path, rep))

    def test_random_designs(self, rng):
        for _ in range(10):
            x = standardize(rng.standard_normal((60, 10)), np.zeros(60)).x
            beta = np.zeros(10)
            beta[rng.choice(10, 3, replace=False)] = rng.standard_normal(3)
            path = run_pga(beta, x, 20)
            rep = restricted_eigen_scan(Dataset(x, x @ beta), 10)
            out = by_name(check_bounds(path, rep))
            assert out["step-ratio"].holds and out["revisit-mu_e"].holds

    def test_insufficient_scan(self):
        x = orthonormal_design(8)
        path = run_pga(np.ones(8), x, 3)
        rep = restricted_eigen_scan(Dataset(x, np.zeros(len(x))), 2)
        with pytest.raises(InsufficientEigenScan):
            check_bounds(path, rep)

    def test_skips_steps_beyond_scan(self, rng):
        x = standardize(rng.standard_normal((30, 10)), np.zeros(30)).x
        beta = np.zeros(10)
        beta[:2] = 1.0
        path = run_pga(beta, x, 15)
        rep = restricted_eigen_scan(Dataset(x, np.zeros(30)), 3)
        out = by_name(check_bounds(path, rep))
        q = np.array([2] + [len({0, 1} | set(path.selected_indices[:m + 1].tolist()))
                             for m in range(len(path.steps))])
        assert len(out["revisit-mu_e"].skipped) == int(np.sum(q > 3))

    def test_needs_truth_or_c(self, rng):
        with pytest.raises(ValueError):
            check_bounds(run_pga([1.0, 0], orthonormal_design(2), 2))

    def test_csv(self):
        x = orthonormal_design(4)
        path = run_pga([1.0, 2, 0, 0], x, 5)
        text = bounds_to_csv(check_bounds(path, c=0.0))
        assert text.splitlines()[0].startswith("name,checked,violated")


class TestNoise:
    def test_z_identity(self, rng):
        n, p = 100, 50
        x = standardize(rng.standard_normal((n, p)), np.zeros(n)).x
        beta = np.zeros(p)
        beta[:5] = 1.0
        eps = rng.standard_normal(n)
        ds = Dataset(x, x @ beta + eps, beta)
        path = run_ba(ds, BoostConfig(), FixedSteps(60))
        assert z_identity_gap(ds, path, eps) < 1e-10
        z = z_sequence(path)
        assert z[0] == pytest.approx(eps @ eps / n + 2 * eps @ (x @ beta) / n)

    def test_envelope_report(self, rng):
        n, p, s = 100, 50, 5
        x = standardize(rng.standard_normal((n, p)), np.zeros(n)).x
        beta = np.zeros(p)
        beta[:s] = 1.0
        eps = rng.standard_normal(n)
        ds = Dataset(x, x @ beta + eps, beta)
        path = run_ba(ds, BoostConfig(), FixedSteps(50))
        out = by_name(check_bounds(path, c=0.8, lambda_n=lambda_n(1, p, n, 0.05),
                                   sigma_n_sq=eps @ eps / n))
        assert "z-envelope" in out and len(out["z-envelope"].steps) == 51


def test_n_runs():
    assert _longest_n_runs(list("NNRNR")).tolist() == [2, 1, 0, 1, 0]

"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS|FAIL ...`` line that is printed in
the terminal summary, then asserts.  Tolerances and runtime limits are the
pinned ones; nothing here is loosened to make a criterion pass.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, orthonormal_design
from hdboost.boosting import BoostConfig, run_ba, run_oba
from hdboost.bounds import check_bounds, run_pga
from hdboost.cli import THEORY_COLUMNS, theory_rows
from hdboost.data import Dataset, standardize
from hdboost.eigen import restricted_eigen_scan, support_se_constant
from hdboost.lasso import LassoConfig, kkt_residuals, lambda_max, lasso_fit
from hdboost.linalg import ols_solve
from hdboost.rng import RngStream
from hdboost.simulation import DgpSpec, generate, preset, run_experiment, step_curve
from hdboost.stopping import FixedSteps
from hdboost.theory import lambda_n

C_ROWS = (0.0, 0.1, 0.2, 0.3)
ZETA_TARGETS = (1.19, 1.04, 0.89, 0.76)
RATE_TARGETS = (0.54, 0.51, 0.47, 0.43)
# reference rows for c >= 0.5 (zeta*, rate); compared and reported only
UPPER_ROWS = {0.5: (0.63, 0.39), 0.6: (0.51, 0.34), 0.7: (0.40, 0.29)}


def record(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def std_design(rng, n, p):
    return standardize(rng.standard_normal((n, p)), np.zeros(n)).x


class TestTheoryConstants:
    def test_criterion_1(self):
        t0 = time.perf_counter()
        rows = theory_rows(C_ROWS + tuple(UPPER_ROWS))
        elapsed = time.perf_counter() - t0
        table = [dict(zip(THEORY_COLUMNS, map(float, r))) for r in rows]
        tab = {r["c"]: r for r in table}
        err_z = max(abs(tab[c]["zeta_star_tab"] - z) for c, z in zip(C_ROWS, ZETA_TARGETS))
        err_r = max(abs(tab[c]["rate_tab"] - z) for c, z in zip(C_ROWS, RATE_TARGETS))
        lemma_gap = max(abs(tab[c]["zeta_star"] - z) for c, z in zip(C_ROWS, ZETA_TARGETS))
        upper = ", ".join(f"c={c}: {tab[c]['zeta_star_tab']:.3f}/{z:.2f}"
                          for c, (z, _) in UPPER_ROWS.items())
        ok = err_z <= 0.01 and err_r <= 0.01 and elapsed < 1.0
        record(1, ok, f"max |zeta*-table| {err_z:.4f}, max |rate-table| {err_r:.4f} "
                      f"(tabulated form; lemma form off by {lemma_gap:.4f}); "
                      f"upper rows computed/reference {upper}; {elapsed:.2f} s")
        assert ok


class TestExactIdentities:
    def test_criterion_2(self):
        rng = np.random.default_rng(2)
        t0 = time.perf_counter()
        worst_identity = worst_orth = 0.0
        repeats = 0
        for _ in range(100):
            n, p = int(rng.integers(10, 201)), int(rng.integers(1, 201))
            x = std_design(rng, n, p)
            beta = np.zeros(p)
            k = min(p, int(rng.integers(1, 11)))
            beta[rng.choice(p, k, replace=False)] = rng.standard_normal(k)
            ds = Dataset(x, x @ beta + rng.uniform(0, 2) * rng.standard_normal(n))
            ba = run_ba(ds, BoostConfig(max_steps=300), FixedSteps(300))
            r = ba.residual_sq_sequence()
            gap = np.abs(r[1:] - (r[:-1] - ba.gammas**2)) / r[:-1]
            worst_identity = max(worst_identity, float(gap.max(initial=0)))
            oba = run_oba(ds, BoostConfig(max_steps=300, variant="oBA"), FixedSteps(300))
            sel = oba.selected_indices
            repeats += len(sel) - len(set(sel.tolist()))
            scale = np.sqrt(ds.y @ ds.y / n)
            for m in range(1, len(sel) + 1):
                u = ds.y - x @ oba.beta_at(m)
                worst_orth = max(worst_orth, float(np.abs(x[:, sel[:m]].T @ u / n).max()) / scale)
        elapsed = time.perf_counter() - t0
        ok = worst_identity <= 1e-10 and worst_orth <= 1e-10 and repeats == 0 and elapsed < 30
        record(2, ok, f"worst relative identity gap {worst_identity:.2e}, worst oBA "
                      f"orthogonality {worst_orth:.2e}, repeated indices {repeats}; "
                      f"{elapsed:.1f} s")
        assert ok


class TestOlsLimit:
    def test_criterion_3(self):
        rng = np.random.default_rng(3)
        x = std_design(rng, 50, 5)
        ds = Dataset(x, x @ rng.standard_normal(5) + rng.standard_normal(50))
        t0 = time.perf_counter()
        path = run_ba(ds, BoostConfig(max_steps=5000), FixedSteps(5000))
        elapsed = time.perf_counter() - t0
        gap = float(np.max(np.abs(path.beta - ols_solve(x, ds.y))))
        ok = gap < 1e-6 and elapsed < 5
        record(3, ok, f"sup |beta^5000 - beta_OLS| = {gap:.2e}; {elapsed:.2f} s")
        assert ok


class TestOrthonormalPga:
    def test_criterion_4(self):
        t0 = time.perf_counter()
        x = orthonormal_design(31)
        results = []
        rng = np.random.default_rng(4)
        for s in (1, 3, 5, 10):
            beta = np.zeros(31)
            beta[rng.choice(31, s, replace=False)] = rng.uniform(0.5, 3, s) * rng.choice([-1, 1], s)
            path = run_pga(beta, x, 100)
            r = path.residual_sq_sequence()
            # zero up to rounding: ||U^s|| no larger than machine epsilon times ||y||
            results.append(len(path.steps) == s and path.labels == ["R"] * s
                           and r[-1] <= (np.finfo(float).eps ** 2) * r[0]
                           and path.stop_reason == "zero-residual")
        elapsed = time.perf_counter() - t0
        ok = all(results) and elapsed < 1
        record(4, ok, f"s in (1, 3, 5, 10): exact zero residual in s all-R steps "
                      f"{sum(results)}/4; {elapsed:.3f} s")
        assert ok


@pytest.fixture(scope="module")
def pga_corpus():
    """50 noiseless runs with exhaustive scans up to |T^M|."""
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    runs = []
    for _ in range(50):
        p = int(rng.integers(4, 13))
        s = int(rng.integers(1, min(4, p) + 1))
        n = int(rng.integers(max(p + 1, 15), 101))
        x = std_design(rng, n, p)
        beta = np.zeros(p)
        beta[rng.choice(p, s, replace=False)] = rng.standard_normal(s) + rng.choice([-1, 1], s)
        path = run_pga(beta, x, 30)
        q_max = len(path.true_support | path.selected_set)
        report = restricted_eigen_scan(path_dataset(x, beta), q_max)
        assert report.exhaustive
        runs.append({name.name: name for name in check_bounds(path, report, tolerance=1e-8)})
    return runs, time.perf_counter() - t0


def path_dataset(x, beta):
    return Dataset(x, x @ beta, true_beta=beta)


class TestRevisitFloor:
    def test_criterion_5(self, pga_corpus):
        runs, elapsed = pga_corpus
        bad = sum(r["revisit-mu_e"].violated for r in runs)
        checked = sum(len(r["revisit-mu_e"].steps) for r in runs)
        slack = min(r["revisit-mu_e"].min_slack for r in runs)
        ok = bad == 0 and elapsed < 300
        record(5, ok, f"mu_e revisit floor: {bad} violations over {checked} steps in "
                      f"{len(runs)} runs, min slack {slack:.3f}; {elapsed:.1f} s")
        assert ok


class TestStepDecay:
    def test_criterion_6(self, pga_corpus):
        runs, elapsed = pga_corpus
        bad = sum(r["step-ratio"].violated for r in runs)
        checked = sum(len(r["step-ratio"].steps) for r in runs)
        slack = min(r["step-ratio"].min_slack for r in runs)
        ok = bad == 0 and elapsed < 300
        record(6, ok, f"L(m,m+1) <= 1-(1-c)/q(m): {bad} violations over {checked} steps, "
                      f"min slack {slack:.2e} (tolerance 1e-8); {elapsed:.1f} s")
        assert ok


class TestZEnvelope:
    def test_criterion_7(self):
        n, p, s, sigma, alpha = 100, 50, 5, 1.0, 0.05
        dgp = DgpSpec(n, p, s=s, noise_sd=sigma)
        lam = lambda_n(sigma, p, n, alpha)
        t0 = time.perf_counter()
        held, cs = 0, []
        for r in range(500):
            train, _ = generate(dgp, RngStream(7, r))
            noise = train.y - train.signal
            path = run_ba(train, BoostConfig(max_steps=100), FixedSteps(100))
            c = support_se_constant(train.gram, path.true_support | path.selected_set)
            cs.append(c)
            if c >= 1:
                continue
            rep = {b.name: b for b in check_bounds(path, c=c, lambda_n=lam,
                                                   sigma_n_sq=noise @ noise / n)}
            held += rep["z-envelope"].holds
        elapsed = time.perf_counter() - t0
        share = held / 500
        ok = share >= 0.90 and elapsed < 120
        record(7, ok, f"|Z_m - sigma_n^2| envelope held along {held}/500 paths ({share:.1%}), "
                      f"mean c {np.mean(cs):.3f}; {elapsed:.1f} s")
        assert ok


@pytest.fixture(scope="module")
def sparse_grid():
    t0 = time.perf_counter()
    table = run_experiment(preset("table3", repetitions=500, master_seed=0))
    return table, time.perf_counter() - t0


TARGETS = {(100, 100, "BA-oracle"): (0.44, 0.10), (100, 100, "post-BA-oracle"): (0.12, 0.05),
           (100, 100, "oBA-oracle"): (0.12, 0.05), (400, 100, "BA-oracle"): (0.07, 0.03)}


class TestSparseIidGrid:
    def test_criterion_8(self, sparse_grid):
        table, elapsed = sparse_grid
        parts, ok = [], True
        for (n, p, label), (target, tol) in TARGETS.items():
            got = table.cell(n, p, label).mse_mean
            ok &= abs(got - target) <= tol
            parts.append(f"{label}({n},{p})={got:.3f} [{target}+-{tol}]")
        order_bad = []
        for (n, p), cells in table.wide().items():
            if not (cells["post-BA-oracle"] <= cells["BA-oracle"]
                    and cells["oBA-oracle"] <= cells["BA-oracle"]):
                order_bad.append((n, p, "oracle ordering"))
            for est in ("BA", "post-BA", "oBA"):
                if cells[f"{est}-oracle"] > cells[f"{est}-ratio"]:
                    order_bad.append((n, p, est))
        ok &= not order_bad and elapsed < 900
        record(8, ok, "; ".join(parts) + f"; ordering violations {order_bad or 'none'}; "
                      f"{elapsed:.0f} s")
        assert ok

    def test_criterion_9(self, sparse_grid):
        table, _ = sparse_grid
        ratios = {}
        for (n, p), cells in table.wide().items():
            ratios[(n, p)] = cells["post-BA-ratio"] / cells["post-BA-oracle"]
        worst = max(ratios, key=ratios.get)
        ok = all(v <= 4 for v in ratios.values())
        detail = ", ".join(f"({n},{p}) {v:.2f}" for (n, p), v in sorted(ratios.items()))
        record(9, ok, f"post-BA ratio-rule/oracle MSE at c_u=4.5: {detail}; "
                      f"worst {worst} (limit 4)")
        assert ok


class TestIllustrativeCurve:
    def test_criterion_10(self):
        dgp = DgpSpec(20, 10, s=3, beta_design="illustrative")
        t0 = time.perf_counter()
        curve = step_curve(dgp, "BA", repetitions=60, max_steps=200, master_seed=0)
        elapsed = time.perf_counter() - t0
        best = float(curve.mse_out.min())
        stop_mse = float(np.mean(curve.stop_mse_out))
        u_shape = curve.is_u_shaped()
        ok = u_shape and stop_mse <= 1.5 * best and elapsed < 30
        record(10, ok, f"U-shaped {u_shape} (min {best:.3f} at m={curve.argmin}, ends "
                       f"{curve.mse_out[0]:.2f}/{curve.mse_out[-1]:.2f}); ratio-rule stop "
                       f"mean step {curve.stop_steps.mean():.2f}, mean MSE {stop_mse:.3f} vs "
                       f"limit {1.5 * best:.3f}; {elapsed:.1f} s")
        assert ok


class TestLassoSanity:
    def test_criterion_11(self):
        rng = np.random.default_rng(11)
        x = orthonormal_design(15)
        soft_err = 0.0
        for _ in range(20):
            b = rng.normal(0, 2, 15)
            lam = rng.uniform(0, 3)
            expect = np.sign(b) * np.maximum(np.abs(b) - lam, 0)
            soft_err = max(soft_err, float(np.abs(lasso_fit(Dataset(x, x @ b), lam) - expect).max()))
        kkt = 0.0
        for _ in range(100):
            n, p = int(rng.integers(20, 150)), int(rng.integers(5, 200))
            xs = std_design(rng, n, p)
            beta = np.zeros(p)
            beta[:min(p, 5)] = 1.0
            ds = Dataset(xs, xs @ beta + rng.standard_normal(n))
            lam = rng.uniform(0.02, 0.9) * lambda_max(ds)
            fit = lasso_fit(ds, lam, LassoConfig())
            a, i = kkt_residuals(ds, fit, lam)
            kkt = max(kkt, a, i)
        ok = soft_err <= 1e-8 and kkt <= 1e-6
        record(11, ok, f"soft-threshold max error {soft_err:.1e}; worst KKT residual over "
                       f"100 fits {kkt:.1e} (limit 1e-6)")
        assert ok

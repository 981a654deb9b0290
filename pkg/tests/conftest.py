import numpy as np
import pytest
from scipy.linalg import hadamard

from hdboost.data import Dataset, standardize

# filled by test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


def orthonormal_design(p, n=None):
    """Hadamard columns without the constant one: centered, E_n[x_j x_k] = delta_jk."""
    n = n or 1 << int(np.ceil(np.log2(p + 1)))
    return hadamard(n).astype(float)[:, 1:p + 1]


def random_dataset(rng, n, p, s=0, sigma=1.0):
    x = rng.standard_normal((n, p))
    beta = np.zeros(p)
    if s:
        beta[rng.choice(p, s, replace=False)] = rng.standard_normal(s) + np.sign(rng.standard_normal(s))
    ds = standardize(x, np.zeros(n))
    y = ds.x @ beta + sigma * rng.standard_normal(n)
    return Dataset(ds.x, y, beta if s else None)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

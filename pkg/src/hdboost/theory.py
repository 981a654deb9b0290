"""Constants from the approximation theory of the pure greedy algorithm.

``c`` is the sparse-eigenvalue constant (``1 - c`` bounds the restricted
smallest eigenvalue from below).  From it follow the revisiting constants
``mu_a`` and ``mu_e``, the decay exponent ``zeta(c, lam)`` and its maximum
``zeta_star(c)``, and the statistical rate ``zeta_star / (1 + zeta_star)``.

``mu_a`` comes in two forms.  ``"lemma"`` is the revisiting constant
``1 - (1 + 1/(1-c)^2)^(-1/(1-c))`` used throughout the bound checks.
``"tabulated"`` replaces ``(1 - c)^2`` by ``(1 - c)`` inside the power.  The
two agree at ``c = 0``; for ``c > 0`` the tabulated form gives a smaller
``mu_a`` and a slightly larger ``zeta_star``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

LEMMA = "lemma"
TABULATED = "tabulated"
LAMBDA_MAX = 1e4
TABLE_C_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _check_c(c):
    if not (0.0 <= c < 1.0):
        raise DomainError(f"c must lie in [0, 1), got {c}")


def mu_a(c, form=LEMMA):
    """Revisiting constant ``1 - (1 + 1/(1-c)^2)^(-1/(1-c))``."""
    _check_c(c)
    if form == LEMMA:
        base = 1.0 + 1.0 / (1.0 - c) ** 2
    elif form == TABULATED:
        base = 1.0 + 1.0 / (1.0 - c)
    else:
        raise DomainError(f"unknown form {form!r}")
    return 1.0 - base ** (-1.0 / (1.0 - c))


def mu_e(c):
    """Revisiting constant ``1 - exp(-1/(1-c)^2)``."""
    _check_c(c)
    return -math.expm1(-1.0 / (1.0 - c) ** 2)


def zeta_lower_limit(c, form=LEMMA):
    m = mu_a(c, form)
    if m >= 1.0:
        raise DomainError(f"mu_a({c}) rounds to 1; zeta is undefined")
    return m / (1.0 - m)


def zeta(c, lam, form=LEMMA):
    """Decay exponent for a block of ``lam * q`` steps.

    Defined for ``lam >= mu_a / (1 - mu_a)``.
    """
    m = mu_a(c, form)
    lo = zeta_lower_limit(c, form)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < lo * (1 - 1e-12)):
        raise DomainError(f"lambda must be >= {lo:.6g} for c={c}")
    gain = (1.0 - c) * ((1.0 - m) * lam - m) / (2.0 + lam)
    out = gain / np.log((2.0 + lam) / (2.0 - m)) + (1.0 - c)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TheoryConstants:
    c: float
    mu_a: float
    mu_e: float
    zeta_star: float
    lambda_star: float
    rate: float
    form: str = LEMMA
    truncated: bool = False


def _golden_max(f, a, b, tol=1e-10, max_iter=200):
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    x = x1 if f1 >= f2 else x2
    return x, f(x)


def zeta_star(c, form=LEMMA, grid_points=4000):
    """Maximize ``zeta(c, .)`` over ``[lower limit, 1e4]``.

    A log-spaced grid locates the peak, golden-section search refines it.
    ``truncated`` is set when the maximum sits at the right end of the
    domain, i.e. the function is still increasing there.  When the lower
    limit comes within a factor two of ``1e4`` the upper end moves to a
    hundred times the lower limit.
    """
    lo = zeta_lower_limit(c, form)
    hi = LAMBDA_MAX if 2.0 * lo < LAMBDA_MAX else 100.0 * lo
    grid = lo + np.expm1(np.linspace(0.0, math.log1p(hi - lo), grid_points))
    values = zeta(c, grid, form)
    i = int(np.argmax(values))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid_points - 1)]
    lam, best = _golden_max(lambda t: zeta(c, t, form), a, b)
    if values[i] > best:
        lam, best = grid[i], values[i]
    truncated = i == grid_points - 1
    return TheoryConstants(
        c=c, mu_a=mu_a(c, form), mu_e=mu_e(c), zeta_star=float(best),
        lambda_star=float(lam), rate=float(best / (1.0 + best)), form=form, truncated=truncated)


def theory_table(c_grid=TABLE_C_GRID, form=LEMMA):
    return [zeta_star(float(c), form) for c in c_grid]


def lambda_n(sigma, p, n, alpha):
    """Noise-correlation level ``2 sigma sqrt(log(2p/alpha)/n)``."""
    if sigma < 0 or p < 1 or n < 1 or not 0 < alpha < 1:
        raise DomainError("need sigma >= 0, p >= 1, n >= 1 and alpha in (0, 1)")
    return 2.0 * sigma * math.sqrt(math.log(2.0 * p / alpha) / n)


def delta_naive(q, q1, c):
    """Product ``prod_{j=0}^{q1-q-1} (1 - (1-c)/(q+j))``."""
    _check_c(c)
    if q < 1 or q1 <= q or int(q) != q or int(q1) != q1:
        raise DomainError("need integers q >= 1 and q1 > q")
    j = np.arange(q1 - q)
    return float(np.prod(1.0 - (1.0 - c) / (q + j)))


def revisit_floor(m, q0, mu):
    """Lower bound ``((1-mu)/(2-mu)) m - (mu/(2-mu)) q0`` on the revisit count."""
    return (1.0 - mu) / (2.0 - mu) * np.asarray(m) - mu / (2.0 - mu) * q0


def max_n_run_factor(c, delta=0.0):
    """Longest run of consecutive N labels, as a multiple of ``q(m)``."""
    _check_c(c)
    ratio = (1.0 + delta) * (2.0 - c) * (1.0 + c) / ((2.0 + c) * (1.0 - c))
    return ratio ** (1.0 / (1.0 - c)) - 1.0

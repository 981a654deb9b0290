"""Coordinate-descent LASSO, post-LASSO and two penalty choices.

The objective is ``(1/(2n)) ||y - X b||^2 + lam ||b||_1``.  With that
normalization a plug-in penalty is of order ``sigma sqrt(log p / n)``;
penalty values are not interchangeable with solvers that drop the 1/2 or
the 1/n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .boosting import refit
from .errors import ConfigError, DomainError, NoConvergence
from .rng import RngStream, permutation

PLUGIN = "plugin"
CROSS_VALIDATION = "cv"
PLUGIN_CONSTANT = 1.1
# share of variance explained at which a penalty path is cut short
SATURATION = 0.999
# active-set sweeps before trying a direct solve
POLISH_EVERY = 3
# columns used for the starting noise estimate of the plug-in penalty
INITIAL_REGRESSORS = 5


@dataclass(frozen=True)
class LassoConfig:
    penalty_mode: str = PLUGIN
    alpha_level: float = 0.05
    folds: int = 10
    grid_size: int = 50
    convergence_tol: float = 1e-8
    max_sweeps: int = 100000

    def __post_init__(self):
        if self.penalty_mode not in (PLUGIN, CROSS_VALIDATION):
            raise ConfigError(f"penalty_mode must be {PLUGIN!r} or {CROSS_VALIDATION!r}")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if self.grid_size < 10:
            raise ConfigError("grid_size must be at least 10")
        if not self.convergence_tol > 0:
            raise ConfigError("convergence_tol must be positive")
        if not 0 < self.alpha_level < 1:
            raise ConfigError("alpha_level must lie in (0, 1)")


def _soft(z, t):
    return math.copysign(max(abs(z) - t, 0.0), z)


def objective(x, y, beta, lam):
    r = y - x @ beta
    return r @ r / (2.0 * len(y)) + lam * np.abs(beta).sum()


def _sweep(idx, beta, grad, gram, sq_norms, lam):
    """One ascending pass over ``idx``; returns the largest coefficient move."""
    biggest = 0.0
    for j in idx:
        old = beta[j]
        new = _soft(grad[j] + sq_norms[j] * old, lam) / sq_norms[j]
        if new != old:
            grad -= (new - old) * gram[:, j]
            beta[j] = new
            biggest = max(biggest, abs(new - old))
    return biggest


def _polish(gram, xty, lam, beta, rounds=10):
    """Solve the optimality conditions exactly, starting from ``beta``'s support.

    With an active set ``A`` and signs ``z`` fixed, the solution solves
    ``G_AA b = X_A'y/n - lam z``.  Each round drops coordinates whose sign
    flips, or else adds the coordinates whose gradient exceeds ``lam``, and
    re-solves.  A candidate that passes both checks is written into ``beta``
    and ``True`` returned; after ``rounds`` failures ``beta`` is left alone.
    """
    p = len(beta)
    active = np.flatnonzero(beta)
    z = np.sign(beta[active])
    slack = 1e-9 * max(lam, float(np.abs(xty).max()))
    for _ in range(rounds):
        if active.size == 0:
            return False
        try:
            chol = np.linalg.cholesky(gram[np.ix_(active, active)])
        except np.linalg.LinAlgError:
            return False
        b = np.linalg.solve(chol.T, np.linalg.solve(chol, xty[active] - lam * z))
        keep = np.sign(b) == z
        if not keep.all():
            active, z = active[keep], z[keep]
            continue
        grad = xty - gram[:, active] @ b
        outside = np.ones(p, dtype=bool)
        outside[active] = False
        enter = np.flatnonzero(outside & (np.abs(grad) > lam + slack))
        if enter.size == 0:
            beta[:] = 0.0
            beta[active] = b
            return True
        active = np.concatenate([active, enter])
        z = np.concatenate([z, np.sign(grad[enter])])
    return False


def _cd(gram, xty, lam, beta, tol, max_sweeps, polish_every=POLISH_EVERY):
    """Cyclic coordinate descent on the Gram form of the objective.

    Full sweeps alternate with sweeps over the current nonzero set until a
    full sweep moves nothing by ``tol`` or more.  Every sweep, full or
    partial, counts against ``max_sweeps``.  When the active-set sweeps have
    not settled after ``polish_every`` passes, the active-set equations are
    solved directly (see :func:`_polish`); this finishes the ill-conditioned
    small-penalty fits where plain coordinate descent crawls.  Returns
    ``(beta, converged, sweeps)``; ``beta`` is updated in place.
    """
    # a warm start from a nearby penalty usually has the right active set
    if np.any(beta) and _polish(gram, xty, lam, beta):
        return beta, True, 0
    sq_norms = np.diag(gram).copy()
    usable = np.flatnonzero(sq_norms > 0).tolist()
    grad = xty - gram @ beta
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        if _sweep(usable, beta, grad, gram, sq_norms, lam) < tol:
            return beta, True, sweeps
        active = np.flatnonzero(beta).tolist()
        settled = False
        for _ in range(polish_every):
            if sweeps >= max_sweeps:
                break
            sweeps += 1
            if _sweep(active, beta, grad, gram, sq_norms, lam) < tol:
                settled = True
                break
        if not settled and _polish(gram, xty, lam, beta):
            return beta, True, sweeps
        grad = xty - gram @ beta
    return beta, False, sweeps


def lasso_fit(ds, lam, cfg=None, warm_start=None):
    """LASSO coefficients for penalty ``lam`` on ``ds``.

    Converged once no coefficient moves by more than ``cfg.convergence_tol``
    within a sweep.  If ``cfg.max_sweeps`` is exhausted, a
    :class:`NoConvergence` warning is issued and the last iterate returned.
    """
    cfg = cfg or LassoConfig()
    if not lam >= 0:
        raise DomainError("lambda must be non-negative")
    beta = np.zeros(ds.p) if warm_start is None else np.array(warm_start, dtype=float)
    beta, ok, sweeps = _cd(ds.gram, ds.xty, float(lam), beta, cfg.convergence_tol,
                           cfg.max_sweeps)
    if not ok:
        warnings.warn(f"coordinate descent did not converge in {sweeps} sweeps",
                      NoConvergence, stacklevel=2)
    return beta


def kkt_residuals(ds, beta, lam):
    """Worst violation of the LASSO optimality conditions.

    Returns ``(active_gap, inactive_excess)``: the largest
    ``|grad_j - lam sign(beta_j)|`` over nonzero coefficients and the largest
    ``|grad_j| - lam`` over zero coefficients, where ``grad_j`` is the inner
    product of column ``j`` with the residual.
    """
    grad = ds.x.T @ (ds.y - ds.x @ beta) / ds.n
    nz = beta != 0
    active = np.abs(grad[nz] - lam * np.sign(beta[nz])).max(initial=0.0)
    inactive = (np.abs(grad[~nz]) - lam).max(initial=-math.inf)
    return float(active), float(inactive)


def lambda_max(ds):
    """Smallest penalty whose solution is zero."""
    return float(np.abs(ds.x.T @ ds.y).max() / ds.n)


def _plugin(n, p, alpha, sigma):
    return PLUGIN_CONSTANT * sigma * norm.ppf(1.0 - alpha / (2.0 * p)) / math.sqrt(n)


def initial_sigma(ds, k=INITIAL_REGRESSORS):
    """Residual standard deviation after OLS on the ``k`` columns most
    correlated with ``y`` (fewer when ``n`` or ``p`` is small)."""
    k = max(0, min(k, ds.p, ds.n - 1))
    top = np.argsort(-np.abs(ds.xty), kind="stable")[:k]
    return float(np.std(ds.y - ds.x @ refit(ds, top.tolist())))


def plugin_lambda(ds, alpha=0.05, sigma=None, refine=15, cfg=None):
    """Plug-in penalty ``1.1 sigma Phi^{-1}(1 - alpha/(2p)) / sqrt(n)``.

    When ``refine > 0`` the noise level is re-estimated up to ``refine``
    times from the residual standard deviation of the post-LASSO refit,
    starting from ``sigma`` or, when omitted, from :func:`initial_sigma`.
    The LASSO residual itself is inflated by shrinkage and keeps the
    iteration stuck near its starting value.
    """
    if sigma is None:
        sigma = initial_sigma(ds)
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    lam = _plugin(ds.n, ds.p, alpha, sigma)
    beta = None
    for _ in range(refine):
        beta = lasso_fit(ds, lam, cfg, warm_start=beta)
        support = np.flatnonzero(beta)
        if support.size >= ds.n:
            break
        new_sigma = float(np.std(ds.y - ds.x @ post_lasso(ds, beta)))
        if new_sigma <= 0 or abs(new_sigma - sigma) <= 1e-8 * sigma:
            break
        sigma = new_sigma
        lam = _plugin(ds.n, ds.p, alpha, sigma)
    return lam


def lambda_grid(lam_max, size):
    """Log-spaced grid from ``lam_max`` down to ``lam_max / 1000``."""
    return lam_max * np.logspace(0.0, -3.0, size)


def lasso_path(ds, lams, cfg=None, saturation=SATURATION):
    """Fits along a decreasing penalty sequence using warm starts.

    Once the fit explains more than ``saturation`` of the variance of ``y``
    the remaining (smaller) penalties reuse the last fit; past that point
    coordinate descent slows to a crawl while the fit barely changes.
    """
    beta = np.zeros(ds.p)
    out = np.empty((len(lams), ds.p))
    total = ds.y @ ds.y
    for i, lam in enumerate(lams):
        beta = lasso_fit(ds, lam, cfg, warm_start=beta)
        out[i] = beta
        r = ds.y - ds.x @ beta
        if total > 0 and 1.0 - r @ r / total > saturation:
            out[i + 1:] = beta
            break
    return out


def cv_lambda(ds, cfg=None, stream=None):
    """K-fold cross-validated penalty.

    Fold labels are a random permutation drawn from ``stream`` (dealt out
    round-robin), so equal streams give equal choices.  Fold paths stop
    early once they explain ``SATURATION`` of the variance (see
    :func:`lasso_path`).
    """
    from .data import Dataset

    cfg = cfg or LassoConfig(penalty_mode=CROSS_VALIDATION)
    if cfg.folds > ds.n:
        raise ConfigError("more folds than observations")
    stream = stream or RngStream(0)
    grid = lambda_grid(lambda_max(ds), cfg.grid_size)
    fold = np.empty(ds.n, dtype=int)
    fold[permutation(stream, ds.n)] = np.arange(ds.n) % cfg.folds
    err = np.zeros(len(grid))
    for k in range(cfg.folds):
        test = fold == k
        train = Dataset(ds.x[~test], ds.y[~test])
        coefs = lasso_path(train, grid, cfg, SATURATION)
        resid = ds.y[test][:, None] - ds.x[test] @ coefs.T
        err += np.sum(resid**2, axis=0)
    # once every fold has saturated the tail errors tie exactly; the smallest
    # tied penalty is the one the carried-forward fits stand in for
    return float(grid[np.flatnonzero(err <= err.min())[-1]])


def post_lasso(ds, beta_hat):
    """OLS refit on the support of ``beta_hat``."""
    return refit(ds, np.flatnonzero(np.asarray(beta_hat)).tolist())


def choose_lambda(ds, cfg=None, stream=None, sigma=None):
    cfg = cfg or LassoConfig()
    if cfg.penalty_mode == PLUGIN:
        return plugin_lambda(ds, cfg.alpha_level, sigma, cfg=cfg)
    return cv_lambda(ds, cfg, stream)

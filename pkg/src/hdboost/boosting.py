"""L2Boosting with componentwise least squares and its orthogonal variant.

Notation follows the usual boosting conventions: ``U^m = y - X beta^m`` is the
residual after ``m`` steps and, when the true coefficients are known,
``V^m = X (beta - beta^m)`` is the prediction error.  All norms are the
empirical ``||.||_{2,n}``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ConfigError, SingularGram, ZeroResidual
from .linalg import GrowingCholesky, solve_gram
from .stopping import FixedSteps, Oracle, select_step, should_stop

BA = "BA"
OBA = "oBA"
ZERO_RESIDUAL = 1e-14
# max |corr(U, x_j)| below this counts as "nothing left to fit"
NULL_CORRELATION = 1e-12


@dataclass(frozen=True)
class BoostConfig:
    step_shrinkage: float = 1.0
    max_steps: int = 1000
    variant: str = BA

    def __post_init__(self):
        if not 0 < self.step_shrinkage <= 1:
            raise ConfigError("step_shrinkage must lie in (0, 1]")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise ConfigError("max_steps must be a positive integer")
        if self.variant not in (BA, OBA):
            raise ConfigError(f"variant must be {BA!r} or {OBA!r}")


@dataclass(frozen=True)
class BoostStep:
    step_index: int
    selected_index: int
    gamma: float
    residual_sq: float
    pred_error_sq: Optional[float] = None
    revisit_label: str = "N"


@dataclass
class BoostPath:
    """Full trace of one boosting run.

    ``steps[m]`` describes the move from ``beta^m`` to ``beta^{m+1}``.
    ``stop_step`` is the index of the model the stopping rule returned,
    which can be earlier than the last recorded step.
    """

    n: int
    p: int
    variant: str
    initial_residual_sq: float
    initial_pred_sq: Optional[float] = None
    true_support: frozenset = frozenset()
    steps: List[BoostStep] = field(default_factory=list)
    beta: Optional[np.ndarray] = None
    stop_step: int = 0
    stop_reason: str = ""
    diagnostic: str = ""
    _oba_coefs: list = field(default_factory=list, repr=False)

    @property
    def selected_set(self):
        return frozenset(s.selected_index for s in self.steps)

    @property
    def selected_indices(self):
        return np.array([s.selected_index for s in self.steps], dtype=int)

    @property
    def gammas(self):
        return np.array([s.gamma for s in self.steps])

    @property
    def labels(self):
        return [s.revisit_label for s in self.steps]

    def residual_sq_sequence(self):
        """``||U^m||^2`` for ``m = 0..M``."""
        return np.array([self.initial_residual_sq] + [s.residual_sq for s in self.steps])

    def pred_sq_sequence(self):
        if self.initial_pred_sq is None:
            return None
        return np.array([self.initial_pred_sq] + [s.pred_error_sq for s in self.steps])

    def support_at(self, m):
        return sorted({s.selected_index for s in self.steps[:m]})

    def beta_at(self, m):
        """Coefficient vector after ``m`` steps."""
        if not 0 <= m <= len(self.steps):
            raise IndexError(f"step {m} outside 0..{len(self.steps)}")
        beta = np.zeros(self.p)
        if self.variant == OBA:
            if m:
                beta[self.selected_indices[:m]] = self._oba_coefs[m - 1]
            return beta
        np.add.at(beta, self.selected_indices[:m], self.gammas[:m])
        return beta

    @property
    def beta_stopped(self):
        return self.beta_at(self.stop_step)

    def to_csv(self, fh=None):
        """Write one row per step: m, j, gamma, residual_sq, pred_sq, label."""
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["m", "j", "gamma", "residual_sq", "pred_sq", "label"])
        for s in self.steps:
            pred = "" if s.pred_error_sq is None else repr(float(s.pred_error_sq))
            w.writerow([s.step_index, s.selected_index, repr(float(s.gamma)),
                        repr(float(s.residual_sq)), pred, s.revisit_label])
        return out.getvalue() if fh is None else None


def _support(beta):
    return frozenset(np.flatnonzero(beta).tolist()) if beta is not None else frozenset()


def _select(scores, sq_norms, exclude=None):
    """Index maximizing |corr(U, x_j)|; ties go to the smallest index."""
    crit = np.abs(scores) / np.sqrt(sq_norms)
    if exclude:
        crit = crit.copy()
        crit[list(exclude)] = -np.inf
    return int(np.argmax(crit)), crit


def ba_step(ds, beta_m, nu=1.0, visited=None):
    """One componentwise least-squares step from ``beta_m``.

    ``visited`` is the set ``T^m`` (true support plus earlier selections)
    used for the revisit label; pass ``None`` to label against nothing.
    """
    beta_m = np.asarray(beta_m, dtype=float)
    u = ds.y - ds.x @ beta_m
    if u @ u / ds.n < ZERO_RESIDUAL:
        raise ZeroResidual("residual is zero; the run should already have stopped")
    sq_norms = np.mean(ds.x**2, axis=0)
    scores = ds.x.T @ u / ds.n
    j, _ = _select(scores, sq_norms)
    gamma = nu * scores[j] / sq_norms[j]
    u_next = u - gamma * ds.x[:, j]
    pred = None
    if ds.true_beta is not None:
        beta_next = beta_m.copy()
        beta_next[j] += gamma
        v = ds.x @ (ds.true_beta - beta_next)
        pred = float(v @ v / ds.n)
    label = "R" if visited is not None and j in visited else "N"
    return BoostStep(0, j, float(gamma), float(u_next @ u_next / ds.n), pred, label)


def _cap(ds, cfg, stop):
    # An explicit step count overrides the 2n runaway guard.
    if isinstance(stop, FixedSteps):
        cap = min(cfg.max_steps, stop.m_fixed)
    else:
        cap = min(2 * ds.n, cfg.max_steps)
    if cfg.variant == OBA:
        cap = min(cap, ds.n, ds.p)
    return cap


def _finish(path, stop, reason):
    dims = (path.n, path.p)
    if isinstance(stop, Oracle):
        path.stop_step = select_step(stop, path, dims)
        path.stop_reason = "oracle"
    elif not path.stop_reason:
        path.stop_step = len(path.steps)
        path.stop_reason = reason
    return path


def run_ba(ds, cfg=None, stop=None):
    """Run L2Boosting (``cfg.variant == "BA"``) until ``stop`` fires.

    The run never exceeds ``min(2n, cfg.max_steps)`` steps unless ``stop`` is
    an explicit :class:`FixedSteps` request.  A vanishing
    residual ends the run normally with ``stop_reason == "zero-residual"``.
    """
    cfg = cfg or BoostConfig()
    if cfg.variant != BA:
        raise ConfigError("run_ba needs variant 'BA'")
    x, y, n = ds.x, ds.y, ds.n
    sq_norms = np.mean(x**2, axis=0)
    truth = _support(ds.true_beta)
    u = y.copy()
    v = ds.signal.copy() if ds.true_beta is not None else None
    path = BoostPath(n, ds.p, BA, float(u @ u / n),
                     None if v is None else float(v @ v / n), truth)
    beta = np.zeros(ds.p)
    visited = set(truth)
    cap = _cap(ds, cfg, stop)
    reason = "max-steps"
    dims = (n, ds.p)
    for m in range(cap + 1):
        if stop is not None:
            d = should_stop(stop, path, dims)
            if d.stop:
                path.stop_step, path.stop_reason = d.step, d.reason
                break
        if m == cap:
            break
        if u @ u / n < ZERO_RESIDUAL:
            reason = "zero-residual"
            break
        scores = x.T @ u / n
        j, crit = _select(scores, sq_norms)
        if crit[j] < NULL_CORRELATION * np.sqrt(u @ u / n):
            reason = "orthogonal"
            break
        gamma = cfg.step_shrinkage * scores[j] / sq_norms[j]
        beta[j] += gamma
        u -= gamma * x[:, j]
        pred = None
        if v is not None:
            v -= gamma * x[:, j]
            pred = float(v @ v / n)
        label = "R" if j in visited else "N"
        visited.add(j)
        path.steps.append(BoostStep(m, j, float(gamma), float(u @ u / n), pred, label))
    path.beta = beta
    return _finish(path, stop, reason)


def run_oba(ds, cfg=None, stop=None):
    """Orthogonal L2Boosting: refit on all selected columns after every step.

    No index is selected twice, and the residual stays orthogonal to every
    selected column.  If the selected columns become numerically collinear
    the run ends with ``stop_reason == "singular-gram"``.
    """
    cfg = cfg or BoostConfig(variant=OBA)
    if cfg.variant != OBA:
        raise ConfigError("run_oba needs variant 'oBA'")
    x, y, n = ds.x, ds.y, ds.n
    sq_norms = np.mean(x**2, axis=0)
    xty = ds.xty
    truth = _support(ds.true_beta)
    signal = ds.signal
    u = y.copy()
    path = BoostPath(n, ds.p, OBA, float(u @ u / n),
                     None if signal is None else float(signal @ signal / n), truth)
    chol = GrowingCholesky(ds.gram)
    visited = set(truth)
    cap = _cap(ds, cfg, stop)
    reason = "max-steps"
    dims = (n, ds.p)
    coef = np.zeros(0)
    for m in range(cap + 1):
        if stop is not None:
            d = should_stop(stop, path, dims)
            if d.stop:
                path.stop_step, path.stop_reason = d.step, d.reason
                break
        if m == cap:
            break
        if u @ u / n < ZERO_RESIDUAL:
            reason = "zero-residual"
            break
        scores = x.T @ u / n
        j, crit = _select(scores, sq_norms, exclude=chol.index)
        if crit[j] < NULL_CORRELATION * np.sqrt(u @ u / n):
            reason = "orthogonal"
            break
        try:
            chol.append(j)
        except SingularGram:
            reason = "singular-gram"
            path.diagnostic = f"column {j} is collinear with the {len(chol)} selected columns"
            break
        coef = chol.solve(xty[chol.index])
        fit = x[:, chol.index] @ coef
        u = y - fit
        pred = None
        if signal is not None:
            v = signal - fit
            pred = float(v @ v / n)
        label = "R" if j in visited else "N"
        visited.add(j)
        path._oba_coefs.append(coef.copy())
        path.steps.append(BoostStep(m, j, float(scores[j] / sq_norms[j]),
                                    float(u @ u / n), pred, label))
    path.beta = path.beta_at(len(path.steps))
    return _finish(path, stop, reason)


def run(ds, cfg=None, stop=None):
    cfg = cfg or BoostConfig()
    return run_oba(ds, cfg, stop) if cfg.variant == OBA else run_ba(ds, cfg, stop)


def refit(ds, support):
    """OLS restricted to ``support`` (zeros elsewhere)."""
    support = sorted(support)
    beta = np.zeros(ds.p)
    if support:
        if len(support) > ds.n:
            raise SingularGram(f"{len(support)} columns but only {ds.n} rows")
        idx = np.asarray(support)
        beta[idx] = solve_gram(ds.gram[np.ix_(idx, idx)], ds.xty[idx])
    return beta


def post_refit(ds, path, m=None):
    """Post-L2Boosting: OLS on the variables selected up to step ``m``.

    ``m`` defaults to the path's stopping step.
    """
    m = path.stop_step if m is None else m
    return refit(ds, path.support_at(m))


@dataclass(frozen=True)
class RevisitSummary:
    labels: tuple
    r_counts: np.ndarray
    n_counts: np.ndarray
    q: np.ndarray

    @property
    def q0(self):
        return int(self.q[0])


def revisit_analysis(path, true_support):
    """Label each step R (revisit) or N and count both kinds cumulatively.

    Step ``m`` is a revisit when its index already lies in
    ``T^m = true_support | {j^0, ..., j^{m-1}}``.  ``q[m] = |T^m|`` for
    ``m = 0..M``.
    """
    visited = set(true_support)
    labels, q = [], [len(visited)]
    for s in path.steps:
        labels.append("R" if s.selected_index in visited else "N")
        visited.add(s.selected_index)
        q.append(len(visited))
    is_r = np.array([lab == "R" for lab in labels], dtype=int)
    r_counts = np.concatenate(([0], np.cumsum(is_r)))
    n_counts = np.arange(len(labels) + 1) - r_counts
    q = np.array(q)
    if not np.array_equal(q, q[0] + n_counts):
        raise AssertionError("q(m) != |T| + |N(m)|")
    return RevisitSummary(tuple(labels), r_counts, n_counts, q)


def variance_estimate(path):
    """Noise variance estimate: ``||U^m||^2`` at the stopping step."""
    return float(path.residual_sq_sequence()[path.stop_step])

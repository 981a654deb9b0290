"""Monte-Carlo designs, experiment runner and MSE curves.

Coefficients live on the standardized scale: every training design is
standardized with its own statistics, the response is ``X_std beta + eps``
(left uncentered), and the holdout rows are mapped with the training means
and scales.  Out-of-sample error is ``mean((X_holdout (beta - beta_hat))^2)``.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .boosting import BA, OBA, BoostConfig, run_ba, run_oba
from .data import Dataset, standardize
from .errors import ConfigError, DomainError, HDBoostError, SingularGram
from .lasso import CROSS_VALIDATION, PLUGIN, LassoConfig, cv_lambda, lasso_fit, plugin_lambda, post_lasso
from .linalg import GrowingCholesky
from .rng import RngStream, gaussian
from .stopping import DEFAULT_CU, FixedSteps, VarianceRatio

SPARSE = "sparse"
POLYNOMIAL = "polynomial"
ILLUSTRATIVE = "illustrative"
IID = "iid"
TOEPLITZ = "toeplitz"
TOEPLITZ_FACTOR = -0.5
ILLUSTRATIVE_BETA = (5.0, 2.0, 1.0)
ILLUSTRATIVE_SD = 2.0

ESTIMATORS = ("BA", "post-BA", "oBA", "lasso", "post-lasso")
BOOST_RULES = ("oracle", "ks", "ratio")
LASSO_RULES = (PLUGIN, CROSS_VALIDATION)

# substream keys inside one repetition
_X, _EPS, _X_HOLD, _EPS_HOLD, _FOLDS = range(5)


@dataclass(frozen=True)
class DgpSpec:
    """One data-generating process.

    ``noise_sd`` defaults to 1, or to 2 for the illustrative design.  For
    that design ``beta = (5, 2, 1, 0, ...)`` regardless of ``s``.
    """

    n: int
    p: int
    s: int = 10
    beta_design: str = SPARSE
    x_design: str = IID
    noise_sd: float = None
    holdout: int = 50

    def __post_init__(self):
        if self.noise_sd is None:
            sd = ILLUSTRATIVE_SD if self.beta_design == ILLUSTRATIVE else 1.0
            object.__setattr__(self, "noise_sd", sd)
        if self.n < 2 or self.p < 1:
            raise DomainError("need n >= 2 and p >= 1")
        if not 1 <= self.s <= self.p:
            raise DomainError("need 1 <= s <= p")
        if self.holdout < 1:
            raise DomainError("holdout size must be positive")
        if not self.noise_sd >= 0:
            raise DomainError("noise_sd must be non-negative")
        if self.beta_design not in (SPARSE, POLYNOMIAL, ILLUSTRATIVE):
            raise DomainError(f"unknown beta design {self.beta_design!r}")
        if self.x_design not in (IID, TOEPLITZ):
            raise DomainError(f"unknown x design {self.x_design!r}")
        if self.beta_design == ILLUSTRATIVE and self.p < len(ILLUSTRATIVE_BETA):
            raise DomainError("the illustrative design needs p >= 3")

    def beta(self):
        b = np.zeros(self.p)
        if self.beta_design == SPARSE:
            b[:self.s] = 1.0
        elif self.beta_design == POLYNOMIAL:
            b = 1.0 / np.arange(1, self.p + 1)
        else:
            b[:len(ILLUSTRATIVE_BETA)] = ILLUSTRATIVE_BETA
        return b

    def covariance(self):
        if self.x_design == IID:
            return np.eye(self.p)
        lag = np.abs(np.subtract.outer(np.arange(self.p), np.arange(self.p)))
        return TOEPLITZ_FACTOR ** lag


@dataclass(frozen=True)
class Method:
    estimator: str
    rule: str

    def __post_init__(self):
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        rules = LASSO_RULES if "lasso" in self.estimator else BOOST_RULES
        if self.rule not in rules:
            raise ConfigError(f"rule {self.rule!r} does not apply to {self.estimator}")

    @property
    def label(self):
        return f"{self.estimator}-{self.rule}"


def boosting_methods():
    return tuple(Method(e, r) for e in ("BA", "post-BA", "oBA") for r in BOOST_RULES)


def lasso_methods(cv=True):
    rules = LASSO_RULES if cv else (PLUGIN,)
    return tuple(Method(e, r) for r in rules for e in ("lasso", "post-lasso"))


@dataclass(frozen=True)
class ExperimentSpec:
    dgps: tuple
    methods: tuple
    repetitions: int = 500
    master_seed: int = 0
    c_u: float = DEFAULT_CU
    K: int = 2
    step_shrinkage: float = 1.0
    alpha: float = 0.05
    folds: int = 10

    def __post_init__(self):
        dgps = tuple(self.dgps) if not isinstance(self.dgps, DgpSpec) else (self.dgps,)
        object.__setattr__(self, "dgps", dgps)
        object.__setattr__(self, "methods", tuple(
            m if isinstance(m, Method) else Method(*m) for m in self.methods))
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if not self.methods or not self.dgps:
            raise ConfigError("need at least one method and one design")
        VarianceRatio(self.c_u)
        BoostConfig(step_shrinkage=self.step_shrinkage)

    def to_dict(self):
        d = asdict(self)
        d["dgps"] = [asdict(g) for g in self.dgps]
        d["methods"] = [[m.estimator, m.rule] for m in self.methods]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["dgps"] = tuple(DgpSpec(**g) for g in d["dgps"])
        d["methods"] = tuple(Method(*m) for m in d["methods"])
        return cls(**d)


def generate(dgp, stream):
    """Draw one training set and one holdout set for ``dgp``."""
    beta = dgp.beta()
    chol = None if dgp.x_design == IID else np.linalg.cholesky(dgp.covariance())

    def design(key, rows):
        z = gaussian(stream.child(key), rows * dgp.p).reshape(rows, dgp.p)
        return z if chol is None else z @ chol.T

    std = standardize(design(_X, dgp.n), np.zeros(dgp.n))
    y = std.x @ beta + dgp.noise_sd * gaussian(stream.child(_EPS), dgp.n)
    train = Dataset(std.x, y, beta, std.column_means, std.column_scales)
    x_h = train.transform(design(_X_HOLD, dgp.holdout))
    y_h = x_h @ beta + dgp.noise_sd * gaussian(stream.child(_EPS_HOLD), dgp.holdout)
    holdout = Dataset(np.vstack([x_h, x_h]) if dgp.holdout == 1 else x_h,
                      np.concatenate([y_h, y_h]) if dgp.holdout == 1 else y_h, beta,
                      train.column_means, train.column_scales)
    return train, holdout


def mse_out(beta_hat, holdout, true_beta=None):
    """Mean squared prediction error ``mean((x_i'(beta - beta_hat))^2)``."""
    true_beta = holdout.true_beta if true_beta is None else true_beta
    e = holdout.x @ (np.asarray(true_beta) - np.asarray(beta_hat))
    return float(e @ e / len(e))


# --- per-path error sequences ------------------------------------------------

def _holdout_errors_ba(path, holdout):
    """Out-of-sample MSE after each BA step, by incremental updates."""
    e = holdout.x @ holdout.true_beta
    out = [e @ e]
    for st in path.steps:
        e = e - st.gamma * holdout.x[:, st.selected_index]
        out.append(e @ e)
    return np.array(out) / holdout.n


def _post_ba_errors(train, holdout, path):
    """Post-refit coefficients and holdout MSE at every step of a BA path.

    Returns ``(errors, betas)`` where ``betas[k]`` is the refit on the first
    ``k`` distinct variables; ``errors[m]`` is ``inf`` once the support can
    no longer be refitted (e.g. more variables than observations).
    """
    chol = GrowingCholesky(train.gram)
    betas = [np.zeros(train.p)]
    order = []
    broken = False
    for j in path.selected_indices:
        if j in order or broken:
            continue
        try:
            chol.append(int(j))
        except SingularGram:
            broken = True
            continue
        order.append(int(j))
        b = np.zeros(train.p)
        b[order] = chol.solve(train.xty[order])
        betas.append(b)
    per_k = np.array([mse_out(b, holdout) for b in betas])
    sizes = _support_sizes(path)
    errors = np.full(len(sizes), math.inf)
    ok = sizes < len(betas)
    errors[ok] = per_k[sizes[ok]]
    return errors, betas


def _support_sizes(path):
    seen, sizes = set(), [0]
    for j in path.selected_indices:
        seen.add(int(j))
        sizes.append(len(seen))
    return np.array(sizes)


def _oba_errors(path, holdout):
    return np.array([mse_out(path.beta_at(m), holdout) for m in range(len(path.steps) + 1)])


# --- one repetition -----------------------------------------------------------

@dataclass
class _Outcome:
    mse: float = math.nan
    step: float = math.nan
    support: float = math.nan
    ok: bool = False


def _pick(rule, errors, path, train, spec, dgp):
    """Step chosen by ``rule`` on a finished path."""
    last = len(path.steps)
    if rule == "oracle":
        return int(np.argmin(errors))
    if rule == "ks":
        return min(spec.K * dgp.s, last)
    return VarianceRatio(spec.c_u).select(path, train.n, train.p)


def _one_rep(spec, dgp, r):
    stream = RngStream(spec.master_seed, r)
    train, holdout = generate(dgp, stream)
    out = {}
    ests = {m.estimator for m in spec.methods}
    cache = {}
    if ests & {"BA", "post-BA"}:
        path = run_ba(train, BoostConfig(spec.step_shrinkage, max_steps=2 * train.n))
        cache["BA"] = (path, _holdout_errors_ba(path, holdout))
        if "post-BA" in ests:
            errs, betas = _post_ba_errors(train, holdout, path)
            cache["post-BA"] = (path, errs, betas)
    if "oBA" in ests:
        path = run_oba(train, BoostConfig(max_steps=2 * train.n, variant=OBA))
        cache["oBA"] = (path, _oba_errors(path, holdout))
    lasso_fits = {}
    for m in spec.methods:
        res = _Outcome()
        try:
            if m.estimator in ("BA", "oBA"):
                path, errs = cache[m.estimator]
                k = _pick(m.rule, errs, path, train, spec, dgp)
                res = _Outcome(float(errs[k]), k, len(path.support_at(k)), True)
            elif m.estimator == "post-BA":
                path, errs, betas = cache["post-BA"]
                k = _pick(m.rule, errs, path, train, spec, dgp)
                size = len(path.support_at(k))
                if math.isfinite(errs[k]):
                    res = _Outcome(float(errs[k]), k, size, True)
            else:
                if m.rule not in lasso_fits:
                    cfg = LassoConfig(penalty_mode=m.rule, alpha_level=spec.alpha, folds=spec.folds)
                    if m.rule == PLUGIN:
                        lam = plugin_lambda(train, spec.alpha, cfg=cfg)
                    else:
                        lam = cv_lambda(train, cfg, stream.child(_FOLDS))
                    lasso_fits[m.rule] = lasso_fit(train, lam, cfg)
                b = lasso_fits[m.rule]
                if m.estimator == "post-lasso":
                    b = post_lasso(train, b)
                res = _Outcome(mse_out(b, holdout), math.nan, int(np.count_nonzero(b)), True)
        except HDBoostError:
            res = _Outcome()
        out[m.label] = res
    return out


def _task(args):
    spec, d, r = args
    return _one_rep(spec, spec.dgps[d], r)


# --- aggregation ----------------------------------------------------------------

@dataclass(frozen=True)
class ResultRow:
    dgp: DgpSpec
    method: Method
    mse_mean: float
    mse_std_error: float
    mean_stop_step: float
    mean_support_size: float
    used: int
    excluded: int


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)

    COLUMNS = ("n", "p", "s", "beta_design", "x_design", "method", "mse_mean",
               "mse_std_error", "mean_stop_step", "mean_support_size", "used", "excluded")

    def cell(self, n, p, label):
        for row in self.rows:
            if row.dgp.n == n and row.dgp.p == p and row.method.label == label:
                return row
        raise KeyError((n, p, label))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([r.dgp.n, r.dgp.p, r.dgp.s, r.dgp.beta_design, r.dgp.x_design,
                        r.method.label, repr(r.mse_mean), repr(r.mse_std_error),
                        repr(r.mean_stop_step), repr(r.mean_support_size), r.used, r.excluded])
        return buf.getvalue()

    def wide(self):
        """``{(n, p): {label: mse_mean}}`` for table-style display."""
        out = {}
        for r in self.rows:
            out.setdefault((r.dgp.n, r.dgp.p), {})[r.method.label] = r.mse_mean
        return out


def _aggregate(dgp, method, outcomes):
    good = [o for o in outcomes if o.ok]
    mse = np.array([o.mse for o in good])
    if mse.size:
        mean = float(mse.mean())
        se = float(mse.std(ddof=1) / math.sqrt(mse.size)) if mse.size > 1 else 0.0
        step = float(np.mean([o.step for o in good]))
        supp = float(np.mean([o.support for o in good]))
    else:
        mean = se = step = supp = math.nan
    return ResultRow(dgp, method, mean, se, step, supp, len(good), len(outcomes) - len(good))


def run_experiment(spec, workers=1):
    """Run every method on the same simulated data, ``R`` times per design.

    Repetition ``r`` draws from stream ``(master_seed, r)``; results are
    reduced in repetition order, so the table does not depend on
    ``workers``.  Methods that fail on a repetition (numerical errors) are
    excluded from that repetition and counted in ``excluded``.
    """
    tasks = [(spec, d, r) for d in range(len(spec.dgps)) for r in range(spec.repetitions)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_task(t) for t in tasks]
    table = ResultTable()
    for d, dgp in enumerate(spec.dgps):
        chunk = results[d * spec.repetitions:(d + 1) * spec.repetitions]
        for m in spec.methods:
            table.rows.append(_aggregate(dgp, m, [res[m.label] for res in chunk]))
    return table


# --- step curves ------------------------------------------------------------------

@dataclass(frozen=True)
class CurveTable:
    """Mean in-sample and out-of-sample MSE per boosting step.

    ``stop_steps`` holds, per repetition, the step picked by the
    variance-ratio rule and ``stop_mse_out`` the out-of-sample MSE there.
    """

    steps: np.ndarray
    mse_in: np.ndarray
    mse_out: np.ndarray
    ols_ref: float
    lasso_ref: float
    stop_steps: np.ndarray
    stop_mse_out: np.ndarray

    @property
    def argmin(self):
        return int(np.argmin(self.mse_out))

    def is_u_shaped(self):
        k = self.argmin
        return 0 < k < len(self.mse_out) - 1 and self.mse_out[k] < min(self.mse_out[0], self.mse_out[-1])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "mse_in", "mse_out", "ols_ref", "lasso_ref"])
        ols = "" if math.isnan(self.ols_ref) else repr(self.ols_ref)
        for m, a, b in zip(self.steps, self.mse_in, self.mse_out):
            w.writerow([int(m), repr(float(a)), repr(float(b)), ols, repr(self.lasso_ref)])
        return buf.getvalue()


def step_curve(dgp, method="BA", repetitions=60, max_steps=200, master_seed=0,
               c_u=DEFAULT_CU, step_shrinkage=1.0):
    """Average MSE curves of a boosting method over ``repetitions`` draws.

    Paths are run for exactly ``max_steps`` steps (or until the residual
    vanishes, after which the last value is carried forward).  The OLS
    reference is only computed when ``p < n``; the LASSO reference uses the
    plug-in penalty.
    """
    if method not in (BA, OBA):
        raise ConfigError("step curves are defined for BA and oBA")
    if max_steps < 0:
        raise ConfigError("max_steps must be non-negative")
    steps = max_steps + 1
    m_in = np.zeros(steps)
    m_out = np.zeros(steps)
    ols, las = [], []
    stop_at, stop_err = [], []
    rule = VarianceRatio(c_u)
    for r in range(repetitions):
        train, holdout = generate(dgp, RngStream(master_seed, r))
        if method == BA:
            cfg = BoostConfig(step_shrinkage, max(max_steps, 1))
            path = run_ba(train, cfg, FixedSteps(max_steps))
            e_out = _holdout_errors_ba(path, holdout)
        else:
            path = run_oba(train, BoostConfig(max_steps=max(max_steps, 1), variant=OBA),
                           FixedSteps(max_steps))
            e_out = _oba_errors(path, holdout)
        e_in = path.pred_sq_sequence()
        e_in = np.concatenate([e_in, np.full(steps - len(e_in), e_in[-1])])
        e_out = np.concatenate([e_out, np.full(steps - len(e_out), e_out[-1])])
        m_in += e_in
        m_out += e_out
        k = rule.select(path, train.n, train.p)
        stop_at.append(k)
        stop_err.append(e_out[k])
        if dgp.p < dgp.n:
            b = np.linalg.lstsq(train.x, train.y, rcond=None)[0]
            ols.append(mse_out(b, holdout))
        las.append(mse_out(lasso_fit(train, plugin_lambda(train)), holdout))
    return CurveTable(np.arange(steps), m_in / repetitions, m_out / repetitions,
                      float(np.mean(ols)) if ols else math.nan, float(np.mean(las)),
                      np.array(stop_at), np.array(stop_err))


# --- presets ------------------------------------------------------------------------

_GRID = [(n, p) for n in (100, 200, 400) for p in (100, 200)]
_PRESET_DESIGNS = {
    "table3": (SPARSE, IID, "boost"), "table4": (SPARSE, IID, "lasso"),
    "table5": (SPARSE, TOEPLITZ, "boost"), "table6": (SPARSE, TOEPLITZ, "lasso"),
    "table7": (POLYNOMIAL, IID, "boost"), "table8": (POLYNOMIAL, IID, "lasso"),
    "table9": (POLYNOMIAL, TOEPLITZ, "boost"), "table10": (POLYNOMIAL, TOEPLITZ, "lasso"),
}
PRESETS = tuple(_PRESET_DESIGNS)


def preset(name, repetitions=500, master_seed=0):
    """The simulation grids: n in {100, 200, 400}, p in {100, 200}, s = 10."""
    if name == "illustrative":
        dgp = DgpSpec(20, 10, s=3, beta_design=ILLUSTRATIVE)
        return ExperimentSpec((dgp,), boosting_methods(), repetitions, master_seed)
    if name not in _PRESET_DESIGNS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    beta, x, kind = _PRESET_DESIGNS[name]
    dgps = tuple(DgpSpec(n, p, 10, beta, x, 1.0, 50) for n, p in _GRID)
    methods = boosting_methods() if kind == "boost" else lasso_methods()
    return ExperimentSpec(dgps, methods, repetitions, master_seed)

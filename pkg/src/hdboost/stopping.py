"""Early-stopping rules for boosting paths.

Every rule answers two questions about a (partial) path: should the run halt
now, and if so which step's model is returned.  Rules are immutable values.

The variance-ratio rule halts at the first step ``m`` whose residual ratio
``||U^m||^2 / ||U^{m-1}||^2`` exceeds ``1 - c_u log(p) / n`` and returns the
model of step ``m - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import ConfigError, InvalidThreshold, OracleUnavailable

DEFAULT_CU = 4.5


class Decision(NamedTuple):
    stop: bool
    step: Optional[int] = None
    reason: str = ""


CONTINUE = Decision(False)


class StoppingRule:
    kind = "abstract"

    def check(self, path, n, p):
        raise NotImplementedError

    def select(self, path, n, p):
        raise NotImplementedError


@dataclass(frozen=True)
class VarianceRatio(StoppingRule):
    """Stop once a step no longer cuts the residual variance by enough.

    ``c_u`` must exceed 4 when ``theory_mode`` is set; outside theory mode
    any positive constant is accepted.
    """

    c_u: float = DEFAULT_CU
    theory_mode: bool = False
    kind = "ratio"

    def __post_init__(self):
        if not (math.isfinite(self.c_u) and self.c_u > 0):
            raise ConfigError("c_u must be finite and positive")
        if self.theory_mode and self.c_u <= 4:
            raise ConfigError("theory mode requires c_u > 4")

    def threshold(self, n, p):
        t = 1.0 - self.c_u * math.log(p) / n
        if t <= 0:
            raise InvalidThreshold(
                f"1 - c_u log(p)/n = {t:.4g} <= 0 for c_u={self.c_u}, n={n}, p={p}")
        return t

    def check(self, path, n, p):
        thr = self.threshold(n, p)
        r = path.residual_sq_sequence()
        m = len(r) - 1
        if m >= 1 and r[m] > thr * r[m - 1]:
            return Decision(True, m - 1, "ratio")
        return CONTINUE

    def select(self, path, n, p):
        thr = self.threshold(n, p)
        r = path.residual_sq_sequence()
        fired = np.flatnonzero(r[1:] > thr * r[:-1])
        if fired.size:
            return int(fired[0])
        return len(r) - 1


@dataclass(frozen=True)
class Ks(StoppingRule):
    """Stop after ``K * s`` selections (steps for BA, variables for oBA)."""

    K: int = 2
    s: int = 10
    kind = "ks"

    def __post_init__(self):
        if self.K < 1 or self.s < 1:
            raise ConfigError("K and s must be positive integers")

    @property
    def target(self):
        return self.K * self.s

    def check(self, path, n, p):
        if len(path.steps) >= self.target:
            return Decision(True, self.target, "ks")
        return CONTINUE

    def select(self, path, n, p):
        return min(self.target, len(path.steps))


@dataclass(frozen=True)
class FixedSteps(StoppingRule):
    m_fixed: int
    kind = "fixed"

    def __post_init__(self):
        if self.m_fixed < 0:
            raise ConfigError("m_fixed must be non-negative")

    def check(self, path, n, p):
        if len(path.steps) >= self.m_fixed:
            return Decision(True, self.m_fixed, "fixed")
        return CONTINUE

    def select(self, path, n, p):
        return min(self.m_fixed, len(path.steps))


@dataclass(frozen=True)
class Oracle(StoppingRule):
    """Infeasible benchmark: the recorded step with the smallest true error.

    ``evaluate`` maps a path to one error value per step ``0..M``; by default
    the in-sample prediction error ``||V^m||^2`` recorded on the path is used.
    The rule never halts a run early, it only selects afterwards.
    """

    evaluate: Optional[Callable] = None
    kind = "oracle"

    def errors(self, path):
        if self.evaluate is not None:
            return np.asarray(self.evaluate(path), dtype=float)
        v = path.pred_sq_sequence()
        if v is None:
            raise OracleUnavailable("oracle stopping needs the true coefficients")
        return v

    def check(self, path, n, p):
        if self.evaluate is None and path.pred_sq_sequence() is None:
            raise OracleUnavailable("oracle stopping needs the true coefficients")
        return CONTINUE

    def select(self, path, n, p):
        return int(np.argmin(self.errors(path)))


def should_stop(rule, path, dims):
    """Online decision for ``path`` with ``dims = (n, p)``."""
    n, p = dims
    return rule.check(path, n, p)


def select_step(rule, path, dims):
    """Step whose model ``rule`` returns when applied to a completed path."""
    n, p = dims
    return rule.select(path, n, p)


@dataclass(frozen=True)
class VBound:
    """Infeasible prediction-error stop used to verify the theory.

    Fires at the first ``m`` with ``||V^m|| <= eta sqrt(m + s) lambda_n``.
    In theory mode ``eta`` must exceed ``3 / sqrt(1 - c)``.
    """

    eta: float
    lambda_n: float
    s: int
    c: Optional[float] = None
    theory_mode: bool = True

    def __post_init__(self):
        if self.lambda_n < 0 or self.s < 1 or self.eta <= 0:
            raise ConfigError("need eta > 0, lambda_n >= 0 and s >= 1")
        if self.theory_mode and self.c is not None:
            if not 0 <= self.c < 1:
                raise ConfigError("c must lie in [0, 1)")
            floor = 3.0 / math.sqrt(1.0 - self.c)
            if self.eta <= floor:
                raise ConfigError(f"eta must exceed 3/sqrt(1-c) = {floor:.4g}")

    @staticmethod
    def default_eta(c):
        return 2.0 * 3.0 / math.sqrt(1.0 - c)


def theory_stop_vbound(path, rule):
    v = path.pred_sq_sequence()
    if v is None:
        raise OracleUnavailable("the V-bound stop needs the true coefficients")
    vnorm = np.sqrt(np.maximum(v, 0.0))
    m = np.arange(len(v))
    hit = np.flatnonzero(vnorm <= rule.eta * np.sqrt(m + rule.s) * rule.lambda_n)
    if hit.size:
        return Decision(True, int(hit[0]), "vbound")
    return CONTINUE


def make_rule(kind, c_u=DEFAULT_CU, K=2, s=10, m_fixed=None, evaluate=None):
    """Build a rule from the names used on the command line."""
    if kind == "ratio":
        return VarianceRatio(c_u)
    if kind == "ks":
        return Ks(K, s)
    if kind == "oracle":
        return Oracle(evaluate)
    if kind == "fixed":
        if m_fixed is None:
            raise ConfigError("fixed stopping needs m_fixed")
        return FixedSteps(int(m_fixed))
    raise ConfigError(f"unknown stopping rule {kind!r}")

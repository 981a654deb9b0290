"""Componentwise L2Boosting for high-dimensional linear models.

Boosting and orthogonal boosting with early stopping, a coordinate-descent
LASSO baseline, restricted-eigenvalue scans, empirical checks of the greedy
approximation bounds, and a reproducible simulation harness.
"""

__version__ = "0.1.0"

from .boosting import (BA, OBA, BoostConfig, BoostPath, BoostStep, post_refit, refit,
                       revisit_analysis, run, run_ba, run_oba, variance_estimate)
from .bounds import BoundReport, check_bounds, run_pga
from .data import Dataset, inner_n, norm_2n, read_csv, standardize
from .eigen import EigenReport, restricted_eigen_scan, support_se_constant
from .errors import (ConfigError, DomainError, HDBoostError, InsufficientEigenScan,
                     InvalidThreshold, MissingColumn, NoConvergence, OracleUnavailable,
                     ParseError, SingularGram, ZeroResidual)
from .lasso import LassoConfig, cv_lambda, lasso_fit, plugin_lambda, post_lasso
from .rng import RngStream
from .simulation import DgpSpec, ExperimentSpec, Method, generate, mse_out, run_experiment, step_curve
from .stopping import FixedSteps, Ks, Oracle, VarianceRatio
from .theory import lambda_n, mu_a, mu_e, zeta, zeta_star

__all__ = [name for name in dir() if not name.startswith("_")]

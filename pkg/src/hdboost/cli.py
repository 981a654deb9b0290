"""Command-line front end.

Subcommands: ``fit``, ``simulate``, ``curve``, ``theory``, ``eigen`` and
``pga-analyze``.  CSV goes to ``--out`` (with a JSON manifest listing every
file and its SHA-256) or, without ``--out``, the main table goes to stdout.

Exit status is 0 on success, 2 for usage and configuration errors and 3 for
numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .boosting import BA, OBA, BoostConfig, post_refit, run
from .bounds import bounds_to_csv, check_bounds, run_pga
from .data import read_csv, standardize
from .eigen import restricted_eigen_scan
from .errors import ConfigError, InsufficientEigenScan
from .lasso import CROSS_VALIDATION, PLUGIN, LassoConfig, choose_lambda, lasso_fit, post_lasso
from .rng import RngStream, gaussian, permutation
from .simulation import (IID, ILLUSTRATIVE, POLYNOMIAL, PRESETS, SPARSE, TOEPLITZ,
                         DgpSpec, ExperimentSpec, preset, run_experiment, step_curve)
from .stopping import DEFAULT_CU, make_rule
from .theory import LEMMA, TABLE_C_GRID, TABULATED, zeta_star

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
_NUMERIC_ERRORS = (ArithmeticError, InsufficientEigenScan, np.linalg.LinAlgError)
# checked second: every remaining package error is a ValueError or KeyError
_USAGE_ERRORS = (ValueError, KeyError, OSError)


def _sha256(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


class _Outputs:
    """Collects emitted files and writes the run manifest."""

    def __init__(self, args, command):
        self.dir = getattr(args, "out", None)
        self.command = command
        self.config = {k: v for k, v in vars(args).items() if k != "func"}
        self.files = []
        self.inputs = {}
        if self.dir:
            os.makedirs(self.dir, exist_ok=True)

    def add_input(self, path):
        self.inputs[path] = _sha256(path)

    def emit(self, name, text, primary=False):
        if self.dir:
            path = os.path.join(self.dir, name)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            self.files.append(path)
        elif primary:
            sys.stdout.write(text)

    def close(self):
        if not self.dir:
            return
        manifest = {
            "subcommand": self.command,
            "config": self.config,
            "master_seed": self.config.get("seed"),
            "version": __version__,
            "inputs": self.inputs,
            "outputs": {os.path.basename(p): _sha256(p) for p in self.files},
        }
        with open(os.path.join(self.dir, "manifest.json"), "w", encoding="utf-8",
                  newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _csv(rows, header):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v):
    return repr(float(v))


# --- fit ---------------------------------------------------------------------------

def _split(n, frac, seed):
    if not 0 <= frac < 1:
        raise ConfigError("--test-frac must lie in [0, 1)")
    n_test = int(round(frac * n))
    if n_test == 0:
        return np.arange(n), np.arange(0)
    if n - n_test < 2:
        raise ConfigError("test fraction leaves fewer than two training rows")
    order = permutation(RngStream(seed, 0, (1,)), n)
    return np.sort(order[n_test:]), np.sort(order[:n_test])


def cmd_fit(args):
    out = _Outputs(args, "fit")
    out.add_input(args.data)
    x, y, names = read_csv(args.data, args.response)
    train_idx, test_idx = _split(len(y), args.test_frac, args.seed)
    ds = standardize(x[train_idx], y[train_idx], names=names)
    path = None
    if args.method in ("ba", "post-ba", "oba"):
        variant = OBA if args.method == "oba" else BA
        cfg = BoostConfig(args.nu, args.max_steps, variant)
        rule = make_rule(args.stop, args.cu, args.K, args.s, args.m_fixed)
        path = run(ds, cfg, rule)
        beta = post_refit(ds, path) if args.method == "post-ba" else path.beta_stopped
    else:
        cfg = LassoConfig(penalty_mode=args.penalty, alpha_level=args.alpha, folds=args.folds)
        lam = choose_lambda(ds, cfg, RngStream(args.seed, 0, (2,)))
        beta = lasso_fit(ds, lam, cfg)
        if args.method == "post-lasso":
            beta = post_lasso(ds, beta)
    # coefficients on the original scale
    raw = beta / ds.column_scales
    intercept = ds.y_mean - float(ds.column_means @ raw)
    coef_rows = [["(intercept)", _fmt(intercept)]]
    coef_rows += [[nm, _fmt(b)] for nm, b in zip(names, raw)]
    out.emit("coefficients.csv", _csv(coef_rows, ["name", "coefficient"]))
    if path is not None:
        out.emit("path.csv", path.to_csv())
    eval_idx = test_idx if test_idx.size else train_idx
    pred = intercept + x[eval_idx] @ raw
    actual = y[eval_idx]
    out.emit("predictions.csv", _csv([[int(i), _fmt(a), _fmt(b)] for i, a, b in
                                       zip(eval_idx, actual, pred)], ["row", "actual", "predicted"]))
    mse = float(np.mean((actual - pred) ** 2))
    label = "holdout_mse" if test_idx.size else "training_mse"
    print(f"{label}={mse!r}")
    out.close()
    return EXIT_OK


# --- simulate / curve -----------------------------------------------------------------

def _load_spec(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    data = json.loads(text)
    try:
        return ExperimentSpec.from_dict(data)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    except KeyError as exc:
        raise ConfigError(f"{path}: missing field {exc}") from None


def cmd_simulate(args):
    out = _Outputs(args, "simulate")
    if args.spec:
        out.add_input(args.spec)
        spec = _load_spec(args.spec)
        if args.reps is not None or args.seed is not None:
            d = spec.to_dict()
            d["repetitions"] = args.reps or spec.repetitions
            d["master_seed"] = spec.master_seed if args.seed is None else args.seed
            spec = ExperimentSpec.from_dict(d)
    elif args.preset:
        spec = preset(args.preset, args.reps or 500, args.seed or 0)
    else:
        raise ConfigError("give --spec FILE or --preset NAME")
    if args.cu is not None or args.K is not None:
        d = spec.to_dict()
        d["c_u"] = d["c_u"] if args.cu is None else args.cu
        d["K"] = d["K"] if args.K is None else args.K
        spec = ExperimentSpec.from_dict(d)
    out.config["resolved_spec"] = spec.to_dict()
    out.config["seed"] = spec.master_seed
    table = run_experiment(spec, args.workers)
    out.emit("table.csv", table.to_csv(), primary=True)
    out.emit("spec.json", json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n")
    out.close()
    return EXIT_OK


def cmd_curve(args):
    out = _Outputs(args, "curve")
    if args.preset == "illustrative":
        dgp = DgpSpec(20, 10, s=3, beta_design=ILLUSTRATIVE)
    else:
        dgp = DgpSpec(args.n, args.p, args.s, args.beta, args.x, args.sigma, args.holdout)
    table = step_curve(dgp, args.method, args.reps, args.max_steps, args.seed, args.cu, args.nu)
    out.emit("curve.csv", table.to_csv(), primary=True)
    stops = _csv([[r, int(k), _fmt(e)] for r, (k, e) in
                  enumerate(zip(table.stop_steps, table.stop_mse_out))],
                 ["rep", "ratio_stop_step", "mse_out"])
    out.emit("stops.csv", stops)
    out.close()
    return EXIT_OK


# --- theory / eigen / pga -----------------------------------------------------------------

THEORY_COLUMNS = ("c", "mu_a", "mu_e", "zeta_star", "lambda_star", "rate",
                  "mu_a_tab", "zeta_star_tab", "lambda_star_tab", "rate_tab", "truncated")


def theory_rows(c_grid):
    rows = []
    for c in c_grid:
        a = zeta_star(float(c), LEMMA)
        b = zeta_star(float(c), TABULATED)
        rows.append([_fmt(c), _fmt(a.mu_a), _fmt(a.mu_e), _fmt(a.zeta_star), _fmt(a.lambda_star),
                     _fmt(a.rate), _fmt(b.mu_a), _fmt(b.zeta_star), _fmt(b.lambda_star),
                     _fmt(b.rate), int(a.truncated or b.truncated)])
    return rows


def cmd_theory(args):
    out = _Outputs(args, "theory")
    grid = TABLE_C_GRID if args.c_grid is None else [float(v) for v in args.c_grid.split(",")]
    out.emit("theory.csv", _csv(theory_rows(grid), THEORY_COLUMNS), primary=True)
    out.close()
    return EXIT_OK


def cmd_eigen(args):
    out = _Outputs(args, "eigen")
    out.add_input(args.data)
    x, _, _ = read_csv(args.data, args.response)
    gram = standardize(x, np.zeros(len(x))).gram if not args.raw else x.T @ x / len(x)
    s_max = min(args.s_max, gram.shape[0], 20)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = restricted_eigen_scan(gram, s_max, args.budget, RngStream(args.seed))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out.emit("eigen.csv", report.to_csv(), primary=True)
    out.close()
    return EXIT_OK


def _pga_design(args):
    stream = RngStream(args.seed)
    if args.preset == "orthonormal":
        from scipy.linalg import hadamard
        n = 1 << max(int(math.ceil(math.log2(args.p + 1))), 1)
        x = hadamard(n).astype(float)[:, 1:args.p + 1]
    else:
        z = gaussian(stream.child(0), args.n * args.p).reshape(args.n, args.p)
        x = standardize(z, np.zeros(args.n)).x
    beta = np.zeros(args.p)
    support = permutation(stream.child(1), args.p)[:args.s]
    beta[support] = gaussian(stream.child(2), args.s) + np.sign(gaussian(stream.child(3), args.s))
    return x, beta


def cmd_pga(args):
    out = _Outputs(args, "pga-analyze")
    if not 1 <= args.s <= args.p:
        raise ConfigError("need 1 <= s <= p")
    x, beta = _pga_design(args)
    path = run_pga(beta, x, args.max_steps)
    q_max = len(path.true_support | path.selected_set)
    s_max = min(max(q_max, 1), x.shape[1], 20)
    report = restricted_eigen_scan(x.T @ x / x.shape[0], s_max, args.budget, RngStream(args.seed))
    reports = check_bounds(path, report, args.tolerance, args.delta)
    out.emit("path.csv", path.to_csv(), primary=True)
    out.emit("bounds.csv", bounds_to_csv(reports), primary=not args.out)
    out.close()
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="hdboost", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit boosting or LASSO to a CSV file")
    f.add_argument("data")
    f.add_argument("--response", required=True)
    f.add_argument("--method", default="ba", choices=("ba", "post-ba", "oba", "lasso", "post-lasso"))
    f.add_argument("--stop", default="ratio", choices=("ratio", "ks", "oracle", "fixed"))
    f.add_argument("--cu", type=float, default=DEFAULT_CU)
    f.add_argument("--K", type=int, default=2)
    f.add_argument("--s", type=int, default=10, help="sparsity guess for the Ks rule")
    f.add_argument("--m-fixed", type=int)
    f.add_argument("--nu", type=float, default=1.0, help="step shrinkage")
    f.add_argument("--max-steps", type=int, default=1000)
    f.add_argument("--penalty", default=PLUGIN, choices=(PLUGIN, CROSS_VALIDATION))
    f.add_argument("--alpha", type=float, default=0.05)
    f.add_argument("--folds", type=int, default=10)
    f.add_argument("--test-frac", type=float, default=0.0)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out")
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("simulate", help="Monte-Carlo comparison table")
    s.add_argument("--spec", help="JSON experiment spec")
    s.add_argument("--preset", choices=PRESETS + ("illustrative",))
    s.add_argument("--reps", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--cu", type=float)
    s.add_argument("--K", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("curve", help="mean MSE per boosting step")
    c.add_argument("--preset", choices=("illustrative",))
    c.add_argument("--n", type=int, default=20)
    c.add_argument("--p", type=int, default=10)
    c.add_argument("--s", type=int, default=3)
    c.add_argument("--beta", default=SPARSE, choices=(SPARSE, POLYNOMIAL, ILLUSTRATIVE))
    c.add_argument("--x", default=IID, choices=(IID, TOEPLITZ))
    c.add_argument("--sigma", type=float)
    c.add_argument("--holdout", type=int, default=50)
    c.add_argument("--method", default=BA, choices=(BA, OBA))
    c.add_argument("--reps", type=int, default=60)
    c.add_argument("--max-steps", type=int, default=200)
    c.add_argument("--cu", type=float, default=DEFAULT_CU)
    c.add_argument("--nu", type=float, default=1.0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_curve)

    t = sub.add_parser("theory", help="table of c, mu_a, mu_e, zeta*, lambda*, rate")
    t.add_argument("--c-grid", help="comma-separated c values")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out")
    t.set_defaults(func=cmd_theory)

    e = sub.add_parser("eigen", help="restricted eigenvalue scan of a design")
    e.add_argument("data")
    e.add_argument("--response", help="column to drop before scanning")
    e.add_argument("--s-max", type=int, default=5)
    e.add_argument("--budget", type=int, default=20000)
    e.add_argument("--raw", action="store_true", help="skip standardization")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eigen)

    g = sub.add_parser("pga-analyze", help="noiseless greedy run with bound checks")
    g.add_argument("--preset", default="orthonormal", choices=("orthonormal", "random"))
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--p", type=int, default=12)
    g.add_argument("--s", type=int, default=4)
    g.add_argument("--max-steps", type=int, default=30)
    g.add_argument("--delta", type=float, default=0.05)
    g.add_argument("--tolerance", type=float, default=1e-8)
    g.add_argument("--budget", type=int, default=20000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_pga)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

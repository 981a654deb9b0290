"""Datasets, standardization, empirical inner products and CSV input."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import ConstantColumn, LengthMismatch, MissingColumn, ParseError

VARIANCE_FLOOR = 1e-14


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Design matrix and response on the standardized scale.

    ``column_means`` and ``column_scales`` record the affine map that turned
    the raw predictors into ``x``; :meth:`transform` applies the same map to
    new rows.  ``true_beta`` is only known for simulated data.
    """

    x: np.ndarray
    y: np.ndarray
    true_beta: Optional[np.ndarray] = None
    column_means: Optional[np.ndarray] = None
    column_scales: Optional[np.ndarray] = None
    y_mean: float = 0.0
    names: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.asarray(self.y, dtype=float).ravel()
        n, p = x.shape
        if n < 2 or p < 1:
            raise ValueError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
        if y.shape[0] != n:
            raise LengthMismatch(f"y has length {y.shape[0]}, expected {n}")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "y", _frozen(y))
        means = np.zeros(p) if self.column_means is None else self.column_means
        scales = np.ones(p) if self.column_scales is None else self.column_scales
        object.__setattr__(self, "column_means", _frozen(means))
        object.__setattr__(self, "column_scales", _frozen(scales))
        if self.true_beta is not None:
            tb = np.asarray(self.true_beta, dtype=float).ravel()
            if tb.shape[0] != p:
                raise LengthMismatch(f"true_beta has length {tb.shape[0]}, expected {p}")
            object.__setattr__(self, "true_beta", _frozen(tb))

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def p(self):
        return self.x.shape[1]

    @property
    def signal(self):
        """Noise-free regression function ``X beta`` (needs ``true_beta``)."""
        if self.true_beta is None:
            return None
        return self.x @ self.true_beta

    @cached_property
    def gram(self):
        """Empirical Gram matrix ``E_n[x x']``."""
        return _frozen(self.x.T @ self.x / self.n)

    @cached_property
    def xty(self):
        return _frozen(self.x.T @ self.y / self.n)

    def transform(self, x_raw):
        """Standardize new raw rows with this dataset's training statistics."""
        x_raw = np.atleast_2d(np.asarray(x_raw, dtype=float))
        return (x_raw - self.column_means) / self.column_scales

    def with_response(self, y, true_beta=None):
        return Dataset(self.x, y, true_beta, self.column_means, self.column_scales,
                       self.y_mean, self.names)


def standardize(x, y, center_y=True, true_beta=None, names=None):
    """Center every column and scale it to unit ``1/n`` variance.

    Parameters
    ----------
    x : array (n, p)
        Raw predictors.
    y : array (n,)
        Response; de-meaned when ``center_y`` is set.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two observations")
    if y.shape[0] != n:
        raise LengthMismatch(f"y has length {y.shape[0]}, expected {n}")
    means = x.mean(axis=0)
    centered = x - means
    var = np.mean(centered**2, axis=0)
    bad = np.flatnonzero(var < VARIANCE_FLOOR)
    if bad.size:
        raise ConstantColumn(int(bad[0]))
    scales = np.sqrt(var)
    y_mean = float(y.mean()) if center_y else 0.0
    return Dataset(centered / scales, y - y_mean, true_beta, means, scales, y_mean,
                   None if names is None else tuple(names))


def inner_n(a, b):
    """Empirical inner product ``(1/n) sum a_i b_i``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths differ: {a.shape} vs {b.shape}")
    return float(a @ b) / a.shape[0]


def norm_2n(a):
    return float(np.sqrt(inner_n(a, a)))


def read_csv(path, response_column=None):
    """Read a numeric CSV with a header row.

    Returns ``(x, y, predictor_names)``.  Cells are parsed as decimal-point
    reals; quoting is not supported.  Without ``response_column`` every
    column is a predictor and ``y`` is ``None``.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, quoting=csv.QUOTE_NONE))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(0, 0, "empty file")
    header = [h.strip() for h in rows[0]]
    if response_column is not None and response_column not in header:
        raise MissingColumn(response_column)
    width = len(header)
    values = np.empty((len(rows) - 1, width))
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != width:
            raise ParseError(i, len(row), f"expected {width} fields, found {len(row)}")
        for j, cell in enumerate(row):
            try:
                values[i - 1, j] = float(cell)
            except ValueError:
                raise ParseError(i, j, f"not a number: {cell!r}") from None
    if values.shape[0] < 2:
        raise ParseError(values.shape[0], 0, "need at least two data rows")
    if response_column is None:
        return values, None, header
    k = header.index(response_column)
    keep = [j for j in range(width) if j != k]
    return values[:, keep], values[:, k], [header[j] for j in keep]

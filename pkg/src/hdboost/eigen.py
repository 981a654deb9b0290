"""Restricted (sparse) eigenvalues of an empirical Gram matrix."""

from __future__ import annotations

import csv
import io
import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import jacobi_eigenvalues, sym_eigen_range
from .rng import RngStream, uniform

DEFAULT_BUDGET = 20000
_CHUNK = 2048


@dataclass(frozen=True)
class EigenReport:
    """Extreme eigenvalues over principal submatrices of size ``<= s'``.

    ``phi_small[s'-1]`` and ``phi_large[s'-1]`` refer to size ``s'``.  When a
    size was sampled rather than enumerated, ``phi_small`` is only an upper
    bound on the true restricted minimum (and ``phi_large`` a lower bound on
    the maximum).
    """

    phi_small: np.ndarray
    phi_large: np.ndarray
    exhaustive_by_size: tuple
    worst_small: tuple = field(default=(), compare=False)
    worst_large: tuple = field(default=(), compare=False)

    @property
    def s_max(self):
        return len(self.phi_small)

    @property
    def exhaustive(self):
        return all(self.exhaustive_by_size)

    @property
    def c(self):
        return self.c_at(self.s_max)

    def c_at(self, size):
        """SE constant ``1 - phi_small(size)`` clamped to ``[0, 1]``."""
        return float(min(max(1.0 - self.phi_small[size - 1], 0.0), 1.0))

    def to_csv(self):
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["s", "phi_small", "phi_large", "c", "exhaustive"])
        for k in range(self.s_max):
            w.writerow([k + 1, repr(float(self.phi_small[k])), repr(float(self.phi_large[k])),
                        repr(self.c_at(k + 1)), int(self.exhaustive_by_size[k])])
        return out.getvalue()


def _extremes(gram, subsets):
    """Min/max eigenvalue over a list of index tuples of equal size."""
    best_lo, best_hi = math.inf, -math.inf
    arg_lo = arg_hi = None
    for start in range(0, len(subsets), _CHUNK):
        chunk = np.asarray(subsets[start:start + _CHUNK])
        stack = gram[chunk[:, :, None], chunk[:, None, :]]
        ev = jacobi_eigenvalues(stack)
        i, k = int(np.argmin(ev[:, 0])), int(np.argmax(ev[:, -1]))
        if ev[i, 0] < best_lo:
            best_lo, arg_lo = float(ev[i, 0]), tuple(chunk[i])
        if ev[k, -1] > best_hi:
            best_hi, arg_hi = float(ev[k, -1]), tuple(chunk[k])
    return best_lo, arg_lo, best_hi, arg_hi


def _sample_subsets(p, size, count, stream):
    keys = uniform(stream, count * p).reshape(count, p)
    return [tuple(sorted(row)) for row in np.argsort(keys, axis=1)[:, :size]]


def _extend(base, p):
    return [tuple(sorted(base + (j,))) for j in range(p) if j not in base]


def restricted_eigen_scan(ds, s_max, budget=DEFAULT_BUDGET, stream=None):
    """Scan principal submatrices of the Gram matrix up to size ``s_max``.

    Sizes with at most ``budget`` subsets are enumerated completely.  Larger
    sizes evaluate ``budget`` random subsets plus a greedy search that grows
    the worst subset of the previous size by one index.  Values are
    cumulative over sizes, matching the "dimension at most s" definition.
    ``ds`` may be a :class:`Dataset` or a square Gram matrix.
    """
    gram = ds.gram if hasattr(ds, "gram") else np.asarray(ds, dtype=float)
    p = gram.shape[0]
    if not 1 <= s_max <= min(p, 20):
        raise ValueError(f"s_max must lie in 1..min(p, 20), got {s_max}")
    stream = stream or RngStream(0)
    small, large, exact = [], [], []
    worst_small, worst_large = [], []
    for size in range(1, s_max + 1):
        if math.comb(p, size) <= budget:
            subsets = list(itertools.combinations(range(p), size))
            exact.append(True)
        else:
            subsets = _sample_subsets(p, size, budget, stream.child(size))
            if worst_small:
                subsets += _extend(worst_small[-1], p) + _extend(worst_large[-1], p)
            exact.append(False)
        lo, arg_lo, hi, arg_hi = _extremes(gram, subsets)
        if small and small[-1] < lo:
            lo, arg_lo = small[-1], worst_small[-1]
        if large and large[-1] > hi:
            hi, arg_hi = large[-1], worst_large[-1]
        small.append(lo)
        large.append(hi)
        worst_small.append(arg_lo)
        worst_large.append(arg_hi)
    report = EigenReport(np.array(small), np.array(large), tuple(exact),
                         tuple(worst_small), tuple(worst_large))
    if 1.0 - report.phi_small[-1] >= 1.0 - 1e-12:
        warnings.warn("restricted smallest eigenvalue is zero; c clamped to 1",
                      RuntimeWarning, stacklevel=2)
    return report


def support_se_constant(gram, support):
    """``1 - smallest eigenvalue`` of ``gram`` restricted to ``support``."""
    idx = sorted(support)
    if not idx:
        return 0.0
    lo, _ = sym_eigen_range(np.asarray(gram)[np.ix_(idx, idx)])
    return float(min(max(1.0 - lo, 0.0), 1.0))

"""Pointwise mutual information between adjacent blocks.

``I(n) = -log P(left) - log P(right) + log P(left + right)`` in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ImpossibleEventError, ParameterError
from .measures import IMPOSSIBLE, log2_binom, log_prob
from .sampling import ProcessKind, ProcessSpec, Window

EXACT = "exact"


@dataclass(frozen=True)
class PmiSample:
    n: int
    value: float
    process: ProcessSpec | None
    source: str = EXACT  # "exact" or "code:<codec id>"


def log_plus(x):
    """``log2(x + 1)`` for ``x >= 0`` and 0 otherwise; elementwise on arrays."""
    if np.ndim(x) == 0:
        x = float(x)
        return math.log2(x + 1.0) if x >= 0 else 0.0
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0, np.log2(np.maximum(x, 0.0) + 1.0), 0.0)


def shared_indices(window: Window, spec: ProcessSpec) -> int:
    """Number of distinct active indices seen on both sides of the window."""
    lk = np.unique(window.left[:, 0])
    rk = np.unique(window.right[:, 0])
    both = np.intersect1d(lk, rk, assume_unique=True)
    return int(spec.active(both).sum())


def pmi_exact(window: Window, spec: ProcessSpec) -> PmiSample:
    """Pointwise MI of a window from the exact process measure."""
    parts = [log_prob(spec, x) for x in (window.left, window.right, window.joint())]
    if IMPOSSIBLE in parts:
        raise ImpossibleEventError("window is impossible under the process")
    value = -parts[0] - parts[1] + parts[2]
    if spec.is_santa_fe:
        # the Zipf factors cancel, leaving the shared-index count
        count = shared_indices(window, spec)
        if abs(value - count) > 1e-6:
            raise AssertionError(f"PMI {value} disagrees with shared-index count {count}")
    return PmiSample(window.n, value, spec)


def pmi_mixture_closed_form(t: int, s: int, n: int) -> float:
    """PMI of a mixture Bernoulli window from its counts of ones per side."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not (0 <= t <= n and 0 <= s <= n):
        raise ParameterError(f"counts must lie in [0, {n}], got t={t}, s={s}")
    return float(_mixture_pmi(np.asarray(t), np.asarray(s), n))


def _mixture_pmi(t: np.ndarray, s: np.ndarray, n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    base = 2.0 * np.log2(n + 1.0) - np.log2(2.0 * n + 1.0)
    return base + log2_binom(n, t) + log2_binom(n, s) - log2_binom(2.0 * n, t + s)


def nested_pmi(window: Window, spec: ProcessSpec, ns) -> np.ndarray:
    """Exact PMI of the central sub-windows of half-length ``ns``.

    All values come from one realization. For the Santa Fe kinds this
    uses the shared-index identity: an index counts at length ``n`` once
    it has appeared within ``n`` steps on both sides of the centre.
    """
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and (ns.min() < 1 or ns.max() > window.n):
        raise ParameterError(f"lengths must lie in [1, {window.n}]")
    if spec.kind is ProcessKind.MIXTURE_BERNOULLI:
        t = np.cumsum(window.left[::-1].astype(np.int64))[ns - 1]
        s = np.cumsum(window.right.astype(np.int64))[ns - 1]
        return _mixture_pmi(t, s, ns)
    lk, li = np.unique(window.left[::-1, 0], return_index=True)
    rk, ri = np.unique(window.right[:, 0], return_index=True)
    both, a, b = np.intersect1d(lk, rk, assume_unique=True, return_indices=True)
    keep = spec.active(both)
    reach = np.sort(np.maximum(li[a], ri[b])[keep] + 1)
    return np.searchsorted(reach, ns, side="right").astype(float)


"""Exact block probabilities and expected block mutual information.

All logarithms are base 2. Impossible symbol sequences get
``IMPOSSIBLE`` (minus infinity) rather than an exception, so that callers
combining several log-probabilities can decide what to do with it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import ParameterError, ResourceError
from .sampling import ProcessKind, ProcessSpec
from .schedule import Block, Schedule, build_schedule  # noqa: F401
from .zeta import ZetaValue, zeta  # noqa: F401

IMPOSSIBLE = float("-inf")
LN2 = math.log(2.0)
MIXTURE_MAX_N = 2**14
DEFAULT_TOL = 1e-8
# terms summed one by one before switching to a midpoint integral
DIRECT_TERMS = 2**22
_CHUNK = 2**20


def log2_binom(n, k):
    """``log2 C(n, k)`` via log-gamma; works elementwise on arrays."""
    return (gammaln(np.add(n, 1)) - gammaln(np.add(k, 1)) - gammaln(np.subtract(n, k) + 1)) / LN2


def log_prob_mixture_bernoulli(bits) -> float:
    """``log2 Q(x_1^n)`` for the uniform mixture of Bernoulli processes."""
    bits = np.asarray(bits)
    n = len(bits)
    if n == 0:
        raise ParameterError("empty bit sequence")
    ones = int(bits.sum())
    if ones < 0 or ones > n or np.any((bits != 0) & (bits != 1)):
        raise ParameterError("mixture Bernoulli symbols must be bits")
    return -math.log2(n + 1) - float(log2_binom(n, ones))


def _symbol_columns(symbols) -> tuple[np.ndarray, np.ndarray]:
    sym = np.asarray(symbols)
    if sym.ndim != 2 or sym.shape[1] != 2 or len(sym) == 0:
        raise ParameterError("Santa Fe symbols must be a nonempty sequence of (index, bit)")
    return sym[:, 0], sym[:, 1]


def _index_log2_pmf(spec: ProcessSpec, ks: np.ndarray) -> np.ndarray:
    z = zeta(1.0 / spec.beta).value
    return -np.log2(ks.astype(float)) / spec.beta - math.log2(z)


def log_prob_santa_fe(spec: ProcessSpec, symbols) -> float:
    """``log2 Q(x_1^n) = sum_i log2 Q(K = k_i) - |distinct active indices|``.

    Returns ``IMPOSSIBLE`` for sequences that assign two bits to one
    index or a 1 to an index whose bit is switched off.
    """
    if not spec.is_santa_fe:
        raise ParameterError("process is not a Santa Fe process")
    ks, ys = _symbol_columns(symbols)
    if np.any(ks < 1):
        raise ParameterError("indices must be >= 1")
    if np.any((ys != 0) & (ys != 1)):
        raise ParameterError("symbol values must be bits")
    uniq, inv = np.unique(ks, return_inverse=True)
    inv = inv.reshape(-1)
    ones = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(ones, inv, ys.astype(np.int64))
    counts = np.bincount(inv, minlength=len(uniq))
    if np.any((ones != 0) & (ones != counts)):
        return IMPOSSIBLE
    active = spec.active(uniq)
    if np.any(~active & (ones > 0)):
        return IMPOSSIBLE
    return math.fsum(_index_log2_pmf(spec, ks)) - int(active.sum())


def log_prob(spec: ProcessSpec, symbols) -> float:
    if spec.kind is ProcessKind.MIXTURE_BERNOULLI:
        return log_prob_mixture_bernoulli(symbols)
    return log_prob_santa_fe(spec, symbols)


def expected_mi_mixture(n: int) -> float:
    """Exact ``I(T_n; S_n)`` in bits for the mixture Bernoulli process.

    ``T_n`` and ``S_n`` are the counts of ones in the two halves; given
    them the halves are independent, so this equals the expected block
    mutual information. The double sum costs O(n**2).
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if n > MIXTURE_MAX_N:
        raise ResourceError(
            f"exact mixture MI is O(n^2); n={n} exceeds {MIXTURE_MAX_N}, use Monte Carlo"
        )
    t = np.arange(n + 1)
    lc = log2_binom(n, t)
    l2 = log2_binom(2 * n, np.arange(2 * n + 1))
    shift = 2.0 * math.log2(n + 1)
    total = 0.0
    rows = max(1, _CHUNK // (n + 1))
    for start in range(0, n + 1, rows):
        tt = t[start:start + rows, None]
        lp = lc[start:start + rows, None] + lc[None, :] - l2[tt + t[None, :]] - math.log2(2 * n + 1)
        total += float(np.sum(np.exp2(lp) * (lp + shift)))
    return min(max(total, 0.0), math.log2(n + 1))


def _santa_fe_terms(k: np.ndarray, n: int, A: float, s: float) -> np.ndarray:
    # (1 - (1 - A k^-s)^n)^2 without cancellation
    hit = -np.expm1(n * np.log1p(-A * k ** -s))
    return hit * hit


def _direct_sum(lo: int, hi: int, n: int, A: float, s: float) -> float:
    total = 0.0
    for start in range(lo, hi + 1, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, hi + 1), dtype=float)
        total += float(np.sum(_santa_fe_terms(k, n, A, s)))
    return total


def _midpoint_integral(lo: int, hi: float, n: int, A: float, s: float) -> tuple[float, float]:
    """Approximate ``sum_{k=lo}^{hi} f(k)`` by ``int_{lo-1/2}^{hi+1/2} f``.

    Returns the value and an error estimate. Integration runs in
    ``log k`` so an infinite upper end is harmless.
    """

    def g(t: float) -> float:
        hit = -math.expm1(n * math.log1p(-A * math.exp(-s * t)))
        return math.exp(2.0 * math.log(hit) + t) if hit > 0 else 0.0

    a = math.log(lo - 0.5)
    b = math.inf if math.isinf(hi) else math.log(hi + 0.5)
    val, quad_err = integrate.quad(g, a, b, limit=400, epsabs=1e-14, epsrel=1e-13)
    # midpoint rule error for a convex decreasing summand is about f'(lo)/24
    f = lambda x: float(_santa_fe_terms(np.array([x]), n, A, s)[0])
    slope = abs(f(lo) - f(lo + 1.0))
    return val, quad_err + slope / 24.0


def _tail_start(n: int, A: float, beta: float, tol: float) -> int:
    """Smallest K with ``(nA)^2 beta/(2-beta) K^(1-2/beta) < tol``."""
    c = (n * A) ** 2 * beta / (2.0 - beta)
    return max(1, math.ceil((c / tol) ** (beta / (2.0 - beta))) + 1)


def expected_mi_santa_fe(spec: ProcessSpec, n: int, tol: float = DEFAULT_TOL) -> float:
    """Expected block mutual information of a (modified) Santa Fe process.

    Sums ``a_k (1 - (1 - A k^(-1/beta))^n)^2`` with ``A = 1/zeta(1/beta)``.
    Terms are summed directly up to the first K whose tail bound
    ``(nA)^2 beta/(2-beta) K^(1-2/beta)`` drops below ``tol`` (capped at
    ``DIRECT_TERMS``), and the rest of each run is integrated with the
    midpoint rule, whose error is far below the bound it replaces.
    """
    if not spec.is_santa_fe:
        raise ParameterError("process is not a Santa Fe process")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 1e-12 < tol < 1e-2:
        raise ParameterError(f"tol must lie in (1e-12, 1e-2), got {tol}")
    beta = spec.beta
    s = 1.0 / beta
    A = 1.0 / zeta(s).value
    if spec.schedule is None:
        runs: list[tuple[int, float]] = [(1, math.inf)]
    else:
        runs = [(lo, float(hi)) for lo, hi in spec.schedule.active_runs]
    cut = _tail_start(n, A, beta, tol)
    total = 0.0
    err = 0.0
    for lo, hi in runs:
        last_direct = int(min(hi, max(lo, min(cut, lo + DIRECT_TERMS - 1))))
        total += _direct_sum(lo, last_direct, n, A, s)
        if hi > last_direct:
            val, e = _midpoint_integral(last_direct + 1, hi, n, A, s)
            total += val
            err += e
    if err > 2 * tol:
        raise ResourceError(f"could not reach tolerance {tol} (error estimate {err:.3g})")
    return total

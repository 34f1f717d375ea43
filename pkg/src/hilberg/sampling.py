"""Seeded samplers for the mixture Bernoulli and Santa Fe processes.

Every window is an independent two-sided realization ``X_{-n+1}^n``.
Random streams come from :func:`replicate_rng`, keyed by
``(seed, replicate)`` so that replicates can run in any order, or in
parallel, and still aggregate to the same numbers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .errors import ParameterError
from .schedule import Schedule
from .zeta import zeta, zeta_tail

TABLE_SIZE = 4096
# float64 holds every integer up to 2**53; beyond that use mpmath
_FLOAT_INT_LIMIT = 2.0**52


class ProcessKind(str, enum.Enum):
    MIXTURE_BERNOULLI = "mixture-bernoulli"
    SANTA_FE = "santa-fe"
    MODIFIED_SANTA_FE = "modified-santa-fe"


@dataclass(frozen=True)
class ProcessSpec:
    kind: ProcessKind
    beta: float | None = None
    schedule: Schedule | None = None

    def __post_init__(self):
        kind = ProcessKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ProcessKind.MIXTURE_BERNOULLI:
            if self.schedule is not None:
                raise ParameterError("mixture Bernoulli takes no schedule")
            return
        if self.beta is None or not 0.0 < self.beta < 1.0:
            raise ParameterError(f"beta must lie in (0, 1), got {self.beta}")
        if (kind is ProcessKind.MODIFIED_SANTA_FE) != (self.schedule is not None):
            raise ParameterError("a schedule is required exactly for modified Santa Fe")
        if self.schedule is not None and self.schedule.beta != self.beta:
            raise ParameterError("schedule beta differs from process beta")

    @property
    def is_santa_fe(self) -> bool:
        return self.kind is not ProcessKind.MIXTURE_BERNOULLI

    @classmethod
    def mixture(cls) -> "ProcessSpec":
        return cls(ProcessKind.MIXTURE_BERNOULLI)

    @classmethod
    def santa_fe(cls, beta: float) -> "ProcessSpec":
        return cls(ProcessKind.SANTA_FE, beta)

    @classmethod
    def modified_santa_fe(cls, schedule: Schedule) -> "ProcessSpec":
        return cls(ProcessKind.MODIFIED_SANTA_FE, schedule.beta, schedule)

    def active(self, ks: np.ndarray) -> np.ndarray:
        """Boolean mask of indices whose bit is random (``a_k = 1``)."""
        if self.schedule is None:
            return np.ones(len(ks), dtype=bool)
        return self.schedule.a_array(ks).astype(bool)

    def describe(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.beta is not None:
            d["beta"] = self.beta
        if self.schedule is not None:
            d["schedule"] = self.schedule.to_dict()
        return d


@dataclass(frozen=True)
class Window:
    """Two-sided block: ``left`` holds positions -n+1..0, ``right`` 1..n.

    For the mixture process each side is a uint8 array of bits. For the
    Santa Fe kinds each side has shape ``(n, 2)`` with columns
    ``(index, bit)``; dtype is int64 unless some index exceeds it, in
    which case the arrays hold Python ints.
    """

    n: int
    left: np.ndarray
    right: np.ndarray
    theta: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.left) != self.n or len(self.right) != self.n:
            raise ParameterError("both halves of a window must have length n")

    def joint(self) -> np.ndarray:
        return np.concatenate([self.left, self.right])

    def restrict(self, m: int) -> "Window":
        """Central sub-window of half-length ``m`` from the same realization."""
        if not 1 <= m <= self.n:
            raise ParameterError(f"cannot restrict a window of n={self.n} to {m}")
        return Window(m, self.left[self.n - m:], self.right[:m], self.theta)


def replicate_rng(seed: int, replicate: int, *stream: int) -> np.random.Generator:
    """Independent generator for one replicate of one experiment."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(replicate), *stream))
    return np.random.Generator(np.random.PCG64(ss))


class ZipfSampler:
    """Exact sampler for ``P(K = k) = k**(-1/beta) / zeta(1/beta)``.

    Indices up to ``TABLE_SIZE`` come from a CDF table. Larger ones are
    drawn conditionally on landing in the tail, by inverting the tail mass
    with a doubling bracket and integer bisection; a fresh uniform is used
    there so the tail keeps full relative precision.
    """

    def __init__(self, beta: float):
        if not 0.0 < beta < 1.0:
            raise ParameterError(f"beta must lie in (0, 1), got {beta}")
        self.beta = beta
        self.s = 1.0 / beta
        self.zeta = zeta(self.s).value
        ks = np.arange(1, TABLE_SIZE + 1, dtype=float)
        self.pmf = ks ** -self.s / self.zeta
        self.cdf = np.cumsum(self.pmf)
        self.tail0 = float(zeta_tail(self.s, float(TABLE_SIZE)))
        # table and tail must share one normalization
        self.cdf *= (1.0 - self.tail0 / self.zeta) / self.cdf[-1]

    def prob(self, k: int) -> float:
        return k ** -self.s / self.zeta

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        out = np.searchsorted(self.cdf, u, side="right").astype(np.int64) + 1
        tail = out > TABLE_SIZE
        n_tail = int(tail.sum())
        if n_tail:
            # conditional on K > TABLE_SIZE: K = min{k : T(k) < w * T(TABLE_SIZE)}
            w = 1.0 - rng.random(n_tail)
            vals = self._invert_tail(w * self.tail0)
            if any(isinstance(v, int) and v > np.iinfo(np.int64).max for v in vals):
                out = out.astype(object)
            out[tail] = vals
        return out

    def _invert_tail(self, target: np.ndarray) -> list:
        lo = np.full(target.shape, float(TABLE_SIZE))
        hi = 2.0 * lo
        while True:
            grow = (zeta_tail(self.s, hi) >= target) & (hi < _FLOAT_INT_LIMIT)
            if not grow.any():
                break
            lo = np.where(grow, hi, lo)
            hi = np.where(grow, 2.0 * hi, hi)
        big = zeta_tail(self.s, hi) >= target
        while True:
            active = (hi - lo > 1.0) & ~big
            if not active.any():
                break
            mid = np.floor((lo + hi) / 2.0)
            below = zeta_tail(self.s, mid) < target
            hi = np.where(active & below, mid, hi)
            lo = np.where(active & ~below, mid, lo)
        vals = [int(h) for h in hi]
        for i in np.flatnonzero(big):
            vals[i] = self._invert_far_tail(float(target[i]))
        return vals

    def _invert_far_tail(self, target: float) -> int:
        # Past 2**52 the Euler-Maclaurin corrections sit below double
        # precision relative to k**(1-s)/(s-1), which inverts in closed
        # form. Integers this large are resolved to the same relative
        # precision as the uniform variate that selected them.
        log_k = -math.log((self.s - 1.0) * target) / (self.s - 1.0)
        if log_k < 700.0:
            return int(math.exp(log_k)) + 1
        with mpmath.workdps(30):
            return int(mpmath.exp(log_k)) + 1


@lru_cache(maxsize=32)
def zipf_sampler(beta: float) -> ZipfSampler:
    return ZipfSampler(beta)


def sample_zipf(beta: float, rng: np.random.Generator) -> int:
    """Draw one index from the Zipf law with exponent ``1/beta``."""
    return int(zipf_sampler(beta).sample(rng, 1)[0])


def sample_window(spec: ProcessSpec, n: int, rng: np.random.Generator) -> Window:
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if spec.kind is ProcessKind.MIXTURE_BERNOULLI:
        theta = float(rng.random())
        bits = (rng.random(2 * n) < theta).astype(np.uint8)
        return Window(n, bits[:n], bits[n:], theta)
    ks = zipf_sampler(spec.beta).sample(rng, 2 * n)
    # one fair bit per distinct index, in sorted index order
    uniq, inv = np.unique(ks, return_inverse=True)
    z = rng.integers(0, 2, size=len(uniq))
    if spec.schedule is not None:
        z = z * spec.schedule.a_array(uniq.astype(float) if uniq.dtype == object else uniq)
    y = z[inv.reshape(-1)]
    sym = np.empty((2 * n, 2), dtype=ks.dtype)
    sym[:, 0] = ks
    sym[:, 1] = y
    return Window(n, sym[:n], sym[n:])

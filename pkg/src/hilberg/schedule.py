"""Gap schedules ``a_k`` for the modified Santa Fe process.

A schedule switches the shared bits ``Z_k`` off on stretches of indices
``floor(c_{m-1}**beta) < k <= floor(b_m**(2 beta))`` and back on for
``floor(b_m**(2 beta)) < k <= floor(c_m**beta)``. Past the last block
every ``a_k`` is 0. Construction picks the smallest ``b_m`` and then the
smallest ``c_m`` that satisfy the two growth constraints, so that the
expected mutual information dips to ``b_m**eps_m`` and climbs back to
``c_m**(beta - eps_m)`` in turn.

Each series term is ``(1 - (1 - A k**(-1/beta))**n)**2``, so for
``k <= n**beta`` it is at least ``(1 - exp(-A))**2``. The default
construction uses that squared factor in the lower constraint. With
``squared=False`` it uses the unsquared ``1 - exp(-A)`` instead. That
variant yields smaller ``c_m`` but does not guarantee the climb.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import mpmath
import numpy as np

from .errors import ParameterError, ResourceError
from .zeta import zeta

INT_LIMIT = 2**63 - 1
_DPS = 60


def _mpf(x) -> mpmath.mpf:
    with mpmath.workdps(_DPS):
        return mpmath.mpf(x)


def floor_pow(x: int, p: float) -> int:
    """``floor(x**p)`` for a nonnegative integer ``x``, robust at exact powers."""
    if x == 0:
        return 0
    if p == 0.5:
        return math.isqrt(x)
    if p == 1.0:
        return x
    with mpmath.workdps(_DPS):
        y = mpmath.power(mpmath.mpf(x), mpmath.mpf(p))
        r = mpmath.nint(y)
        if abs(y - r) <= mpmath.mpf(10) ** (-_DPS + 15) * max(1, r):
            return int(r)
        return int(mpmath.floor(y))


def gap_constant(beta: float) -> float:
    """``1 + A**2 beta / (2 - beta)`` with ``A = 1/zeta(1/beta)``."""
    a = 1.0 / zeta(1.0 / beta).value
    return 1.0 + a * a * beta / (2.0 - beta)


@dataclass(frozen=True)
class Block:
    m: int
    b: int
    c: int
    eps: float


@dataclass(frozen=True)
class Schedule:
    beta: float
    blocks: tuple[Block, ...]

    @cached_property
    def bounds(self) -> tuple[tuple[int, int, int], ...]:
        """Per block: ``(floor(c_{m-1}^beta), floor(b_m^{2beta}), floor(c_m^beta))``."""
        out = []
        prev = 0
        for blk in self.blocks:
            lo = floor_pow(blk.b, 2 * self.beta)
            hi = floor_pow(blk.c, self.beta)
            out.append((prev, lo, hi))
            prev = hi
        return tuple(out)

    @property
    def active_runs(self) -> list[tuple[int, int]]:
        """Inclusive index ranges on which ``a_k = 1``."""
        return [(lo + 1, hi) for _, lo, hi in self.bounds if hi > lo]

    @property
    def support_end(self) -> int:
        return self.bounds[-1][2] if self.blocks else 0

    def a(self, k: int) -> int:
        if k < 1:
            raise ParameterError(f"index must be >= 1, got {k}")
        for lo, hi in self.active_runs:
            if lo <= k <= hi:
                return 1
        return 0

    def a_array(self, ks) -> np.ndarray:
        ks = np.asarray(ks)
        out = np.zeros(ks.shape, dtype=np.int8)
        for lo, hi in self.active_runs:
            out[(ks >= lo) & (ks <= hi)] = 1
        return out

    def check(self) -> dict[str, bool]:
        """Evaluate the construction invariants over all blocks.

        ``lower`` uses the factor ``1 - exp(-A)``; ``lower_squared`` the
        factor ``(1 - exp(-A))**2`` that actually bounds the series.
        """
        A = 1.0 / zeta(1.0 / self.beta).value
        const = _mpf(gap_constant(self.beta))
        beta = _mpf(self.beta)
        res = {"ordering": True, "eps": True, "upper": True, "lower": True, "lower_squared": True}
        for blk, (prev, lo, hi) in zip(self.blocks, self.bounds):
            if not prev < lo < hi:
                res["ordering"] = False
            if not math.isclose(blk.eps, self.beta / blk.m, rel_tol=0, abs_tol=1e-15):
                res["eps"] = False
            with mpmath.workdps(_DPS):
                if not prev + const <= mpmath.power(blk.b, _mpf(blk.eps)):
                    res["upper"] = False
                factor = 1 - mpmath.exp(-_mpf(A))
                rhs = mpmath.power(blk.c, beta - _mpf(blk.eps))
                if not (hi - lo) * factor >= rhs:
                    res["lower"] = False
                if not (hi - lo) * factor**2 >= rhs:
                    res["lower_squared"] = False
        return res

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "blocks": [{"m": b.m, "b": b.b, "c": b.c, "eps": b.eps} for b in self.blocks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "Schedule":
        blocks = tuple(
            Block(m=int(b["m"]), b=int(b["b"]), c=int(b["c"]), eps=float(b["eps"]))
            for b in d["blocks"]
        )
        return cls(beta=float(d["beta"]), blocks=blocks)

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        return cls.from_dict(json.loads(text))


def _smallest(pred, start: int) -> int | None:
    """Smallest integer >= start with ``pred`` true, for monotone ``pred``.

    Returns None when the doubling search passes ``INT_LIMIT``.
    """
    if pred(start):
        return start
    lo, hi = start, max(2 * start, start + 1)
    while not pred(hi):
        if hi >= INT_LIMIT:
            return None
        lo, hi = hi, min(2 * hi, INT_LIMIT)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _ceil_root(j: int, beta: float) -> int:
    """Smallest integer c with ``floor(c**beta) >= j``."""
    with mpmath.workdps(_DPS):
        c = int(mpmath.ceil(mpmath.power(mpmath.mpf(j), 1 / _mpf(beta))))
    c = max(c - 2, 1)
    while floor_pow(c, beta) < j:
        c += 1
    return c


def build_schedule(beta: float, M: int, *, squared: bool = True) -> Schedule:
    """Greedy minimal schedule with ``M`` blocks.

    Raises ResourceError when a block would need integers beyond 64 bits;
    the message reports how many blocks were feasible.
    """
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    if M < 1:
        raise ParameterError(f"M must be >= 1, got {M}")
    A = _mpf(1.0 / zeta(1.0 / beta).value)
    const = _mpf(gap_constant(beta))
    one_minus = 1 - mpmath.exp(-A)
    if squared:
        one_minus = one_minus**2
    b_beta = _mpf(beta)
    blocks: list[Block] = []
    prev = 0
    for m in range(1, M + 1):
        eps = beta / m
        eps_mp = _mpf(eps)

        def b_ok(b: int) -> bool:
            if floor_pow(b, 2 * beta) <= prev:
                return False
            with mpmath.workdps(_DPS):
                return prev + const <= mpmath.power(b, eps_mp)

        b = _smallest(b_ok, 1)
        if b is None:
            raise ResourceError(
                f"block {m} needs b beyond {INT_LIMIT}; max feasible M = {m - 1}"
            )
        lo = floor_pow(b, 2 * beta)

        # search over j = floor(c^beta); the cheapest c for a given j is
        # the smallest one reaching it, and the constraint is monotone in j
        def j_ok(j: int) -> bool:
            c = _ceil_root(j, beta)
            if c > INT_LIMIT:
                return True  # let the caller see the overflow
            with mpmath.workdps(_DPS):
                return (j - lo) * one_minus >= mpmath.power(c, b_beta - eps_mp)

        j_limit = floor_pow(INT_LIMIT, beta)
        j = _smallest(j_ok, lo + 1)
        if j is None or j > j_limit:
            raise ResourceError(
                f"block {m} needs c beyond {INT_LIMIT}; max feasible M = {m - 1}"
            )
        c = _ceil_root(j, beta)
        if c > INT_LIMIT:
            raise ResourceError(
                f"block {m} needs c beyond {INT_LIMIT}; max feasible M = {m - 1}"
            )
        blocks.append(Block(m=m, b=b, c=c, eps=eps))
        prev = floor_pow(c, beta)
    return Schedule(beta=beta, blocks=tuple(blocks))

"""Hilberg exponent estimators on dyadic block lengths ``n = 2**k``.

Limits superior and inferior cannot be observed at finite ``n``; they are
replaced by the max and min of ``log_plus(I(2**k)) / k`` over a tail
window ``k0 <= k <= k_max``. The window start is reported alongside the
estimates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ParameterError
from .pmi import log_plus

MIN_WINDOW = 4  # k_max - k0
R2_MARGIN = 0.01
JENSEN_SLACK = 1e-12


class SequenceKind(str, enum.Enum):
    POINTWISE = "pointwise"
    EXPECTED = "expected"


@dataclass
class CurveRecord:
    n: int
    mean_mi: float
    var_mi: float
    harmonic_mean_shifted: float  # mean of 1/(I + B)
    B: float = 1.0
    analytic_mi: float | None = None
    replicates: int = 1
    source: str = "exact"

    def __post_init__(self):
        if self.n < 1 or self.n & (self.n - 1):
            raise ParameterError(f"block length must be a power of two, got {self.n}")
        if self.var_mi < 0:
            raise ParameterError(f"variance must be >= 0, got {self.var_mi}")
        if self.replicates < 1:
            raise ParameterError("replicates must be >= 1")

    @property
    def k(self) -> int:
        return self.n.bit_length() - 1


@dataclass(frozen=True)
class GrowthFit:
    power_slope: float
    power_r2: float
    log_slope: float
    log_r2: float
    model: str  # "power", "log" or "ambiguous"


@dataclass
class ExponentReport:
    gamma_plus: float | None
    gamma_minus: float | None
    delta_plus: float
    delta_minus: float
    zeta_plus: float
    zeta_minus: float
    epsilon_hat: float
    fit: GrowthFit
    grid: tuple[int, int]
    k0: int
    B: float
    gamma_spread: dict | None = None
    config: dict = field(default_factory=dict)

    def violations(self) -> list[str]:
        out = []
        pairs = [
            ("delta_plus", "delta_minus"),
            ("zeta_plus", "zeta_minus"),
            ("delta_plus", "zeta_plus"),
            ("delta_minus", "zeta_minus"),
        ]
        if self.gamma_plus is not None:
            pairs.insert(0, ("gamma_plus", "gamma_minus"))
        for hi, lo in pairs:
            if getattr(self, hi) < getattr(self, lo) - JENSEN_SLACK:
                out.append(f"{hi} < {lo}")
        return out

    def check(self) -> None:
        bad = self.violations()
        if bad:
            raise AssertionError("report ordering violated: " + ", ".join(bad))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = list(self.grid)
        return _nan_to_none(d)

    @classmethod
    def from_dict(cls, d: dict) -> "ExponentReport":
        d = dict(d)
        d["fit"] = GrowthFit(**{k: (math.nan if v is None and k != "model" else v) for k, v in d["fit"].items()})
        d["grid"] = tuple(d["grid"])
        if d.get("epsilon_hat") is None:
            d["epsilon_hat"] = math.nan
        return cls(**d)


def _nan_to_none(obj):
    if isinstance(obj, float) and math.isnan(obj):
        return None
    if isinstance(obj, dict):
        return {k: _nan_to_none(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_nan_to_none(v) for v in obj]
    return obj


def _dyadic_k(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ParameterError(f"block length {n} is not a power of two")
    return n.bit_length() - 1


def exponent_sequence(values: Mapping[int, float], kind: SequenceKind | str = SequenceKind.EXPECTED):
    """``[(k, log_plus(I(2**k)) / k)]`` for dyadic keys with ``k >= 2``.

    ``kind`` only labels whether ``values`` are pointwise or expected MI;
    the arithmetic is the same.
    """
    SequenceKind(kind)
    out = []
    for n in sorted(values):
        k = _dyadic_k(int(n))
        if k < 2:
            raise ParameterError(f"block length {n} is below 4")
        out.append((k, log_plus(values[n]) / k))
    return out


def _window(seq, k0: int | None):
    ks = [k for k, _ in seq]
    if not ks:
        raise ParameterError("empty sequence")
    k_max = max(ks)
    if k0 is None:
        k0 = math.ceil(k_max / 2)
    if k_max < k0 + MIN_WINDOW:
        raise ParameterError(f"tail window [{k0}, {k_max}] is shorter than {MIN_WINDOW}")
    missing = set(range(k0, k_max + 1)) - set(ks)
    if missing:
        raise ParameterError(f"sequence misses k in {sorted(missing)}")
    return k0, [v for k, v in seq if k >= k0]


def estimate_limsup_liminf(seq, k0: int | None = None) -> tuple[float, float]:
    """Tail-window max and min of a normalized exponent sequence."""
    _, vals = _window(seq, k0)
    return max(vals), min(vals)


def _by_k(curve: Sequence[CurveRecord]) -> dict[int, CurveRecord]:
    return {r.k: r for r in curve}


def estimate_epsilon(curve: Sequence[CurveRecord], k0: int | None = None) -> float:
    """Tail max of ``log_plus(var / mean) / k``."""
    rec = _by_k(curve)
    seq = sorted((k, r) for k, r in rec.items())
    k0, _ = _window([(k, 0.0) for k, _ in seq], k0)
    ratios = []
    for k, r in seq:
        if k < k0:
            continue
        if r.mean_mi <= 0:
            raise ParameterError(f"mean MI at n={r.n} is not positive")
        ratios.append(log_plus(r.var_mi / r.mean_mi) / k)
    return max(ratios)


def estimate_inverse_exponents(curve: Sequence[CurveRecord], B: float = 1.0, k0: int | None = None):
    """Tail max and min of ``log_plus(1/E[(I + B)^-1] - B) / k``.

    Subtracting ``B`` keeps the finite-``n`` estimates below the expected
    exponents, by Jensen, and makes them coincide when ``I`` is constant.
    """
    seq = []
    for r in sorted(curve, key=lambda r: r.n):
        # every I + B >= 1 forces the mean of 1/(I + B) into (0, 1]
        if not 0 < r.harmonic_mean_shifted <= 1.0 + 1e-12:
            raise ParameterError(f"B={B} is too small: some I + B < 1 at n={r.n}")
        if r.B != B:
            raise ParameterError(f"curve was aggregated with B={r.B}, not {B}")
        seq.append((r.k, log_plus(1.0 / r.harmonic_mean_shifted - B) / r.k))
    return estimate_limsup_liminf(seq, k0)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    return float(slope), r2


def fit_growth_models(curve: Sequence[CurveRecord], *, use_analytic: bool = False) -> GrowthFit:
    """Compare ``log2 I ~ log2 n`` (power law) with ``I ~ log2 n`` (logarithmic).

    The better R^2 wins when it leads by at least ``R2_MARGIN``; a flat
    curve gives R^2 = 0 for both and is reported as ambiguous.
    """
    if len(curve) < 6:
        raise ParameterError(f"need at least 6 dyadic points, got {len(curve)}")
    recs = sorted(curve, key=lambda r: r.n)
    k = np.array([r.k for r in recs], dtype=float)
    mean = np.array([r.analytic_mi if use_analytic else r.mean_mi for r in recs], dtype=float)
    if np.any(~(mean > 0)):
        raise ParameterError("growth fits need positive mean MI")
    power_slope, power_r2 = _ols(k, np.log2(mean))
    log_slope, log_r2 = _ols(k, mean)
    if power_r2 >= log_r2 + R2_MARGIN:
        model = "power"
    elif log_r2 >= power_r2 + R2_MARGIN:
        model = "log"
    else:
        model = "ambiguous"
    return GrowthFit(power_slope, power_r2, log_slope, log_r2, model)


def find_excess_witness(G: Callable[[int], float] | Mapping[int, float], n_max: int) -> int | None:
    """Smallest ``n`` with ``2n <= n_max`` and ``2 G(n) - G(2n) >= 0``, else None."""
    if n_max < 4:
        raise ParameterError(f"n_max must be >= 4, got {n_max}")
    get = G.__getitem__ if isinstance(G, Mapping) else G
    for n in range(1, n_max // 2 + 1):
        if 2 * get(n) - get(2 * n) >= 0:
            return n
    return None


def _curve_values(curve: Sequence[CurveRecord]) -> dict[int, float]:
    return {r.n: r.mean_mi for r in curve}


def pointwise_exponents(paths: np.ndarray, ns: Sequence[int], k0: int | None = None):
    """Per-realization tail max/min for an array ``paths[replicate, len(ns)]``."""
    plus, minus = [], []
    for row in np.asarray(paths, dtype=float):
        seq = exponent_sequence(dict(zip(ns, row)), SequenceKind.POINTWISE)
        p, m = estimate_limsup_liminf(seq, k0)
        plus.append(p)
        minus.append(m)
    return np.array(plus), np.array(minus)


def build_report(
    curve: Sequence[CurveRecord],
    *,
    k0: int | None = None,
    B: float | None = None,
    paths: np.ndarray | None = None,
    config: dict | None = None,
) -> ExponentReport:
    """Estimate every exponent from a curve, plus ``gamma`` when paths are given."""
    recs = sorted(curve, key=lambda r: r.n)
    if len(recs) < 5:
        raise ParameterError(f"need at least 5 dyadic rows, got {len(recs)}")
    if B is None:
        B = recs[0].B
    seq = exponent_sequence(_curve_values(recs), SequenceKind.EXPECTED)
    k_max = seq[-1][0]
    k0_eff = math.ceil(k_max / 2) if k0 is None else k0
    d_plus, d_minus = estimate_limsup_liminf(seq, k0_eff)
    z_plus, z_minus = estimate_inverse_exponents(recs, B, k0_eff)
    try:
        eps = estimate_epsilon(recs, k0_eff)
    except ParameterError:
        eps = float("nan")
    fit = fit_growth_models(recs) if all(r.mean_mi > 0 for r in recs) and len(recs) >= 6 else GrowthFit(
        float("nan"), float("nan"), float("nan"), float("nan"), "ambiguous"
    )
    g_plus = g_minus = None
    spread = None
    if paths is not None:
        plus, minus = pointwise_exponents(paths, [r.n for r in recs], k0_eff)
        g_plus, g_minus = float(np.median(plus)), float(np.median(minus))
        spread = {
            "plus_q10": float(np.quantile(plus, 0.1)),
            "plus_q90": float(np.quantile(plus, 0.9)),
            "minus_q10": float(np.quantile(minus, 0.1)),
            "minus_q90": float(np.quantile(minus, 0.9)),
            "realizations": int(len(plus)),
        }
    report = ExponentReport(
        gamma_plus=g_plus,
        gamma_minus=g_minus,
        delta_plus=d_plus,
        delta_minus=d_minus,
        zeta_plus=z_plus,
        zeta_minus=z_minus,
        epsilon_hat=eps,
        fit=fit,
        grid=(recs[0].k, k_max),
        k0=k0_eff,
        B=B,
        gamma_spread=spread,
        config=dict(config or {}),
    )
    report.check()
    return report

"""Experiment drivers behind the command line, plus curve/report files.

A curve file is CSV with the header ``CURVE_HEADER``; one row per block
length and source. ``simulate`` also writes two sidecars next to it:
``<stem>.paths.csv`` with every replicate's pointwise MI (needed for the
random exponents) and ``<stem>.meta.json`` with the resolved config.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .codes import code_pmi, make_codec
from .errors import ParameterError, ResourceError
from .exponents import CurveRecord, ExponentReport, build_report
from .measures import MIXTURE_MAX_N, expected_mi_mixture, expected_mi_santa_fe
from .pmi import EXACT, nested_pmi
from .sampling import ProcessKind, ProcessSpec, replicate_rng, sample_window
from .schedule import Schedule

CURVE_HEADER = ["n", "replicates", "mean_mi", "var_mi", "harmonic_mean_shifted", "B", "analytic_mi", "source"]
PATHS_HEADER = ["replicate", "n", "source", "value"]
MAX_K = 24
ANALYTIC = "analytic"


class CurveParseError(ParameterError):
    pass


@dataclass
class ExperimentConfig:
    process: ProcessSpec
    k_min: int = 2
    k_max: int = 12
    replicates: int = 100
    seed: int = 0
    codec: str | None = None
    tol: float = 1e-8
    B: float = 1.0
    k0: int | None = None
    workers: int = 1
    out: str | None = None

    def validate(self, *, min_k: int = 2) -> None:
        if not min_k <= self.k_min < self.k_max <= MAX_K:
            raise ParameterError(
                f"need {min_k} <= k_min < k_max <= {MAX_K}, got {self.k_min}, {self.k_max}"
            )
        if self.replicates < 1:
            raise ParameterError("replicates must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if self.B < 1:
            raise ParameterError("B must be >= 1")

    @property
    def ns(self) -> list[int]:
        return [2**k for k in range(self.k_min, self.k_max + 1)]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["process"] = self.process.describe()
        return d


def process_from_dict(d: dict) -> ProcessSpec:
    kind = ProcessKind(d["kind"])
    schedule = Schedule.from_dict(d["schedule"]) if d.get("schedule") else None
    return ProcessSpec(kind, d.get("beta"), schedule)


# ----------------------------------------------------------- aggregation

def aggregate(values: np.ndarray, n: int, B: float, source: str, analytic: float | None = None) -> CurveRecord:
    values = np.asarray(values, dtype=float)
    if np.any(values + B < 1 - 1e-9):
        raise ParameterError(f"B={B} too small: min I + B = {values.min() + B} < 1 at n={n}")
    r = len(values)
    return CurveRecord(
        n=n,
        mean_mi=float(np.mean(values)),
        var_mi=float(np.var(values, ddof=1)) if r > 1 else 0.0,
        harmonic_mean_shifted=float(np.mean(1.0 / (values + B))),
        B=B,
        analytic_mi=analytic,
        replicates=r,
        source=source,
    )


def analytic_mi(spec: ProcessSpec, n: int, tol: float = 1e-8) -> float:
    if spec.kind is ProcessKind.MIXTURE_BERNOULLI:
        return expected_mi_mixture(n)
    return expected_mi_santa_fe(spec, n, tol)


def _analytic_or_none(spec: ProcessSpec, n: int, tol: float) -> float | None:
    if spec.kind is ProcessKind.MIXTURE_BERNOULLI and n > MIXTURE_MAX_N:
        return None
    return analytic_mi(spec, n, tol)


# -------------------------------------------------------------- simulate

def _replicate(args) -> dict[str, np.ndarray]:
    spec, seed, r, ns, codec_id = args
    window = sample_window(spec, ns[-1], replicate_rng(seed, r))
    out = {EXACT: nested_pmi(window, spec, ns)}
    if codec_id:
        codec = make_codec(codec_id, spec)
        out[f"code:{codec_id}"] = np.array([code_pmi(codec, window.restrict(n)).value for n in ns])
    return out


def simulate_paths(config: ExperimentConfig) -> dict[str, np.ndarray]:
    """Pointwise MI for every replicate: ``{source: array[replicate, len(ns)]}``.

    Replicate ``r`` draws one window of half-length ``2**k_max`` from the
    stream keyed by ``(seed, r)``; shorter lengths are its central
    sub-windows. Results do not depend on ``workers``.
    """
    config.validate()
    if config.codec == "shannon-fano" and config.process.is_santa_fe and config.k_max > 16:
        raise ResourceError("Shannon-Fano code PMI is limited to k_max <= 16")
    ns = config.ns
    jobs = [(config.process, config.seed, r, ns, config.codec) for r in range(config.replicates)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_replicate, jobs, chunksize=max(1, len(jobs) // (4 * config.workers))))
    else:
        results = [_replicate(j) for j in jobs]
    return {src: np.vstack([res[src] for res in results]) for src in results[0]}


def curve_from_paths(paths: dict[str, np.ndarray], config: ExperimentConfig, *, analytic: bool = True) -> list[CurveRecord]:
    ns = config.ns
    curve = []
    for src, mat in paths.items():
        # mixture and code PMI can be negative; raise the shift so I + B >= 1
        B = max(config.B, math.ceil(1.0 - float(mat.min())))
        for j, n in enumerate(ns):
            ana = _analytic_or_none(config.process, n, config.tol) if analytic and src == EXACT else None
            curve.append(aggregate(mat[:, j], n, B, src, ana))
    return curve


def run_simulate(config: ExperimentConfig) -> tuple[list[CurveRecord], dict[str, np.ndarray]]:
    paths = simulate_paths(config)
    curve = curve_from_paths(paths, config)
    if config.out:
        write_curve(config.out, curve)
        write_paths(paths_path(config.out), paths, config.ns)
        Path(meta_path(config.out)).write_text(json.dumps({"command": "simulate", "config": config.to_dict()}, indent=2))
    return curve, paths


# -------------------------------------------------------------- analytic

def run_analytic(config: ExperimentConfig) -> list[CurveRecord]:
    """One row per dyadic length with the exact expected MI."""
    config.validate(min_k=0)
    if config.process.kind is ProcessKind.MIXTURE_BERNOULLI and 2**config.k_max > MIXTURE_MAX_N:
        raise ResourceError(f"exact mixture MI is limited to n <= {MIXTURE_MAX_N}; got k_max={config.k_max}")
    curve = []
    for n in config.ns:
        v = analytic_mi(config.process, n, config.tol)
        curve.append(
            CurveRecord(n=n, mean_mi=v, var_mi=0.0, harmonic_mean_shifted=1.0 / (v + config.B),
                        B=config.B, analytic_mi=v, replicates=1, source=ANALYTIC)
        )
    if config.out:
        write_curve(config.out, curve)
        Path(meta_path(config.out)).write_text(json.dumps({"command": "analytic", "config": config.to_dict()}, indent=2))
    return curve


# -------------------------------------------------------------- estimate

def select_source(curve: list[CurveRecord], source: str | None) -> list[CurveRecord]:
    sources = sorted({r.source for r in curve})
    if source is None:
        source = EXACT if EXACT in sources else sources[0]
    rows = [r for r in curve if r.source == source]
    if not rows:
        raise ParameterError(f"no rows with source {source!r}; have {sources}")
    return rows


def run_estimate(curve_file: str, *, source: str | None = None, k0: int | None = None,
                 paths_file: str | None = None, out: str | None = None) -> ExponentReport:
    curve = read_curve(curve_file)
    rows = select_source(curve, source)
    src = rows[0].source
    paths = None
    pfile = paths_file or paths_path(curve_file)
    if Path(pfile).exists():
        all_paths, ns = read_paths(pfile)
        if src in all_paths and ns == [r.n for r in sorted(rows, key=lambda r: r.n)]:
            paths = all_paths[src]
    config = {"command": "estimate", "curve_file": str(curve_file), "source": src, "k0": k0}
    mfile = Path(meta_path(curve_file))
    if mfile.exists():
        config["run"] = json.loads(mfile.read_text())
    report = build_report(rows, k0=k0, paths=paths, config=config)
    if out:
        write_report(out, report)
    return report


# --------------------------------------------------------------- code-mi

def run_code_mi(input_file: str, *, codec: str = "lz78", k_min: int = 2, k_max: int = 12,
                max_windows: int = 64, k0: int | None = None, out: str | None = None):
    """Code PMI on non-overlapping two-sided windows of a byte file.

    Bytes are the alphabet (m = 256). For each ``n = 2**k`` the file is
    cut into consecutive blocks of ``2n`` bytes, at most ``max_windows``
    of them from the start.
    """
    if codec != "lz78":
        raise ParameterError("only the lz78 codec applies to raw files")
    if not 2 <= k_min < k_max <= MAX_K:
        raise ParameterError(f"need 2 <= k_min < k_max <= {MAX_K}")
    data = Path(input_file).read_bytes()
    need = 2 ** (k_max + 1)
    if len(data) < need:
        raise ParameterError(f"file has {len(data)} bytes; k_max={k_max} needs at least {need}")
    cod = make_codec(codec, None, m=256)
    samples = {}
    for k in range(k_min, k_max + 1):
        n = 2**k
        count = min(max_windows, len(data) // (2 * n))
        vals = []
        for w in range(count):
            blk = data[2 * n * w: 2 * n * (w + 1)]
            vals.append(cod.length(blk[:n]).bits + cod.length(blk[n:]).bits - cod.length(blk).bits)
        samples[n] = np.array(vals, dtype=float)
    B = max(1.0, math.ceil(1.0 - min(v.min() for v in samples.values())))
    curve = [aggregate(v, n, B, f"code:{codec}") for n, v in samples.items()]
    config = {"command": "code-mi", "input": str(input_file), "bytes": len(data), "codec": codec,
              "k_min": k_min, "k_max": k_max, "max_windows": max_windows, "k0": k0}
    report = build_report(curve, k0=k0, config=config)
    if out:
        write_curve(out, curve)
        write_report(report_path(out), report)
        Path(meta_path(out)).write_text(json.dumps({"command": "code-mi", "config": config}, indent=2))
    return curve, report


# ------------------------------------------------------------------- IO

def _stem(path) -> Path:
    p = Path(path)
    return p.with_suffix("") if p.suffix == ".csv" else p


def paths_path(curve_file) -> str:
    return str(_stem(curve_file)) + ".paths.csv"


def meta_path(curve_file) -> str:
    return str(_stem(curve_file)) + ".meta.json"


def report_path(curve_file) -> str:
    return str(_stem(curve_file)) + ".report.json"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def curve_to_csv(curve: list[CurveRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for r in curve:
        w.writerow([_fmt(getattr(r, col)) for col in CURVE_HEADER])
    return buf.getvalue()


def write_curve(path, curve: list[CurveRecord]) -> None:
    Path(path).write_text(curve_to_csv(curve))


def parse_curve(text: str) -> list[CurveRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != CURVE_HEADER:
        raise CurveParseError(f"row 1: header must be {','.join(CURVE_HEADER)}")
    curve = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(CURVE_HEADER):
            raise CurveParseError(f"row {i}: expected {len(CURVE_HEADER)} fields, got {len(row)}")
        try:
            rec = dict(zip(CURVE_HEADER, row))
            curve.append(
                CurveRecord(
                    n=int(rec["n"]),
                    mean_mi=float(rec["mean_mi"]),
                    var_mi=float(rec["var_mi"]),
                    harmonic_mean_shifted=float(rec["harmonic_mean_shifted"]),
                    B=float(rec["B"]),
                    analytic_mi=float(rec["analytic_mi"]) if rec["analytic_mi"] else None,
                    replicates=int(rec["replicates"]),
                    source=rec["source"],
                )
            )
        except (ValueError, ParameterError) as exc:
            raise CurveParseError(f"row {i}: {exc}") from exc
    return curve


def read_curve(path) -> list[CurveRecord]:
    return parse_curve(Path(path).read_text())


def write_paths(path, paths: dict[str, np.ndarray], ns: list[int]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PATHS_HEADER)
    for src, mat in paths.items():
        for r, row in enumerate(mat):
            for n, v in zip(ns, row):
                w.writerow([r, n, src, repr(float(v))])
    Path(path).write_text(buf.getvalue())


def read_paths(path) -> tuple[dict[str, np.ndarray], list[int]]:
    rows = list(csv.DictReader(io.StringIO(Path(path).read_text())))
    ns = sorted({int(r["n"]) for r in rows})
    col = {n: j for j, n in enumerate(ns)}
    out: dict[str, np.ndarray] = {}
    reps: dict[str, int] = {}
    for r in rows:
        reps[r["source"]] = max(reps.get(r["source"], 0), int(r["replicate"]) + 1)
    for src, count in reps.items():
        out[src] = np.full((count, len(ns)), np.nan)
    for r in rows:
        out[r["source"]][int(r["replicate"]), col[int(r["n"])]] = float(r["value"])
    return out, ns


def write_report(path, report: ExponentReport) -> None:
    report.check()
    Path(path).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))


def read_report(path) -> ExponentReport:
    return ExponentReport.from_dict(json.loads(Path(path).read_text()))

"""Command line entry point: ``hilberg <subcommand> [options]``.

Exit codes: 0 success, 2 parameter error, 3 resource error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiment as ex
from .errors import ParameterError, ResourceError
from .sampling import ProcessKind, ProcessSpec
from .schedule import Schedule, build_schedule

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_RESOURCE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage already; keep messages on stderr
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParameterError(message)


def _process(args) -> ProcessSpec:
    kind = ProcessKind(args.process)
    if kind is ProcessKind.MIXTURE_BERNOULLI:
        return ProcessSpec.mixture()
    if kind is ProcessKind.SANTA_FE:
        if args.beta is None:
            raise ParameterError("--beta is required for santa-fe")
        return ProcessSpec.santa_fe(args.beta)
    if args.schedule:
        schedule = Schedule.from_json(Path(args.schedule).read_text())
    else:
        if args.beta is None or args.blocks is None:
            raise ParameterError("modified-santa-fe needs --schedule FILE or --beta and --blocks")
        schedule = build_schedule(args.beta, args.blocks)
    return ProcessSpec.modified_santa_fe(schedule)


def _config(args) -> ex.ExperimentConfig:
    return ex.ExperimentConfig(
        process=_process(args),
        k_min=args.k_min,
        k_max=args.k_max,
        replicates=getattr(args, "replicates", 1),
        seed=args.seed,
        codec=getattr(args, "codec", None),
        tol=args.tol,
        B=args.B,
        k0=getattr(args, "k0", None),
        workers=getattr(args, "workers", 1),
        out=args.out,
    )


def _emit(out: str | None, text: str) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> None:
    config = _config(args)
    curve, _ = ex.run_simulate(config)
    if not args.out:
        sys.stdout.write(ex.curve_to_csv(curve))


def cmd_analytic(args) -> None:
    config = _config(args)
    curve = ex.run_analytic(config)
    if not args.out:
        sys.stdout.write(ex.curve_to_csv(curve))


def cmd_estimate(args) -> None:
    report = ex.run_estimate(args.curve, source=args.source, k0=args.k0, paths_file=args.paths, out=args.out)
    if not args.out:
        sys.stdout.write(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")


def cmd_code_mi(args) -> None:
    curve, report = ex.run_code_mi(
        args.input, codec=args.codec, k_min=args.k_min, k_max=args.k_max,
        max_windows=args.max_windows, k0=args.k0, out=args.out,
    )
    if not args.out:
        sys.stdout.write(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")


def cmd_schedule(args) -> None:
    schedule = build_schedule(args.beta, args.blocks, squared=not args.literal)
    _emit(args.out, schedule.to_json() + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hilberg", description="Hilberg exponents of block mutual information.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, process=True, grid=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="output file (stdout if omitted)")
        if process:
            sp.add_argument("--process", required=True, choices=[k.value for k in ProcessKind])
            sp.add_argument("--beta", type=float, default=None)
            sp.add_argument("--schedule", default=None, help="schedule JSON for modified-santa-fe")
            sp.add_argument("--blocks", type=int, default=None, help="build a schedule with this many blocks")
            sp.add_argument("--tol", type=float, default=1e-8)
            sp.add_argument("--B", type=float, default=1.0)
        if grid:
            sp.add_argument("--k-min", type=int, default=2)
            sp.add_argument("--k-max", type=int, default=12)

    sp = sub.add_parser("simulate", help="Monte Carlo PMI curve")
    common(sp)
    sp.add_argument("--replicates", type=int, default=100)
    sp.add_argument("--codec", choices=["lz78", "shannon-fano"], default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("analytic", help="exact expected MI curve")
    common(sp)
    sp.set_defaults(func=cmd_analytic)

    sp = sub.add_parser("estimate", help="exponent report from a curve file")
    common(sp, process=False, grid=False)
    sp.add_argument("--curve", required=True)
    sp.add_argument("--source", default=None, help="row source to use (default: exact)")
    sp.add_argument("--paths", default=None, help="per-replicate sidecar (default: <curve>.paths.csv)")
    sp.add_argument("--k0", type=int, default=None)
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("code-mi", help="LZ78 code PMI of a byte file")
    common(sp, process=False)
    sp.add_argument("--input", required=True)
    sp.add_argument("--codec", default="lz78")
    sp.add_argument("--max-windows", type=int, default=64)
    sp.add_argument("--k0", type=int, default=None)
    sp.set_defaults(func=cmd_code_mi)

    sp = sub.add_parser("schedule", help="modified Santa Fe block schedule as JSON")
    common(sp, process=False, grid=False)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--blocks", type=int, required=True)
    sp.add_argument("--literal", action="store_true", help="use the unsquared lower-bound constraint")
    sp.set_defaults(func=cmd_schedule)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParameterError, ValueError, FileNotFoundError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except MemoryError as exc:
        print(f"resource error: out of memory {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

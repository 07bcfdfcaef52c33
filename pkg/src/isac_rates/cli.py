"""Command-line interface: rate | sweep | verify | plotdata.

Exit codes: 0 success, 1 verification failure, 2 domain error (e.g. a
non-degraded channel), 3 numerical failure, 64 usage error.  The environment
variable ISAC_RATES_THREADS caps worker parallelism.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .errors import DomainError, NumericalError
from .fading import ChannelParams
from .oracle import McConfig
from .quadrature import QuadratureConfig
from .rates import PART_C_MODES, compute_rates
from .sweep import (SpecError, SweepSpec, format_csv, parse_csv, run_sweep,
                    write_sweep_outputs)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="isac-rates",
                     description="Secrecy-rate bounds for a degraded ISAC "
                                 "channel under correlated Rayleigh fading.")
    parser.add_argument("--version", action="version",
                        version=f"isac-rates {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rate = sub.add_parser("rate", help="evaluate one parameter point")
    p_rate.add_argument("--sn1", type=float, required=True,
                        help="legitimate-receiver noise variance")
    p_rate.add_argument("--sn2", type=float, required=True,
                        help="eavesdropper noise variance")
    p_rate.add_argument("--ss1", type=float, required=True,
                        help="second moment of the legitimate fading amplitude")
    p_rate.add_argument("--ss2", type=float, required=True,
                        help="second moment of the eavesdropper fading amplitude")
    p_rate.add_argument("--rho2", type=float, required=True,
                        help="power correlation coefficient in [0, 1)")
    p_rate.add_argument("--power", type=float, required=True,
                        help="transmit power P")
    p_rate.add_argument("--mode", choices=PART_C_MODES, default="paper_literal")
    p_rate.add_argument("--no-part-b", action="store_true",
                        help="skip the slow joint-entropy pipeline")
    p_rate.add_argument("--allow-nondegraded", action="store_true")
    _add_quad_flags(p_rate)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    p_sweep.add_argument("spec", help="JSON sweep spec (see data/table1.spec)")
    p_sweep.add_argument("out_csv", help="output CSV path")
    p_sweep.add_argument("--parallelism", type=int, default=None,
                         help="worker processes (default: all cores, capped "
                              "by ISAC_RATES_THREADS)")
    p_sweep.add_argument("--with-part-b", dest="with_part_b",
                         action="store_true", default=None,
                         help="force the slow part_b pipeline on")
    p_sweep.add_argument("--no-part-b", dest="with_part_b",
                         action="store_false",
                         help="force the slow part_b pipeline off")
    p_sweep.add_argument("--timings", action="store_true",
                         help="write real wall times into the ms column "
                              "(breaks byte-reproducibility)")

    p_verify = sub.add_parser("verify", help="run oracle verification checks")
    p_verify.add_argument("--scope", default="all",
                          choices=("specfun", "density", "part_a", "part_b",
                                   "part_c", "all"))
    p_verify.add_argument("--samples", type=float, default=1e6,
                          help="Monte Carlo sample count (default 1e6; "
                               "acceptance-grade runs use 1e7)")
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--batch", type=float, default=1e6)

    p_plot = sub.add_parser("plotdata",
                            help="emit per-subfigure CSVs (and PNGs) from a sweep")
    p_plot.add_argument("sweep_csv")
    p_plot.add_argument("--outdir", default=".")
    p_plot.add_argument("--rho2", type=float, action="append",
                        help="select subfigures with this rho2 (repeatable)")
    p_plot.add_argument("--ss1", type=float, action="append")
    p_plot.add_argument("--sn2", type=float, action="append")
    p_plot.add_argument("--no-render", action="store_true",
                        help="emit CSV data only, no PNG figures")
    return parser


def _add_quad_flags(p):
    p.add_argument("--abs-tol", type=float, default=None)
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--grid-points", type=int, default=None)


def _quad_config(args) -> QuadratureConfig:
    overrides = {}
    if getattr(args, "abs_tol", None) is not None:
        overrides["abs_tol"] = args.abs_tol
    if getattr(args, "rel_tol", None) is not None:
        overrides["rel_tol"] = args.rel_tol
    if getattr(args, "grid_points", None) is not None:
        overrides["grid_points_per_axis"] = args.grid_points
    return QuadratureConfig(**overrides)


def _cmd_rate(args) -> int:
    c = ChannelParams.from_values(ss1=args.ss1, ss2=args.ss2, rho2=args.rho2,
                                  sn1=args.sn1, sn2=args.sn2, power=args.power)
    breakdown = compute_rates(c, cfg=_quad_config(args), mode=args.mode,
                              with_part_b=not args.no_part_b,
                              allow_nondegraded=args.allow_nondegraded)
    print(f"# isac-rates {__version__}  mode={args.mode}")
    print(f"# rho2={args.rho2:g} sn1={args.sn1:g} sn2={args.sn2:g} "
          f"ss1={args.ss1:g} ss2={args.ss2:g} power={args.power:g}")
    for name in ("part_a", "part_b", "part_b_ub", "r_alpha", "r_alpha_ub",
                 "r_beta", "achievable", "achievable_ub"):
        val = getattr(breakdown, name)
        shown = "skipped" if val is None else f"{val:.9f} bits"
        print(f"{name:<14} {shown}")
    print(f"{'err_est':<14} {breakdown.err_est:.3g} bits")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = SweepSpec.from_file(args.spec)
    if args.with_part_b is not None:
        spec.with_part_b = args.with_part_b
    rows = run_sweep(spec, parallelism=args.parallelism)
    manifest_path = write_sweep_outputs(spec, rows, args.out_csv,
                                        timings=args.timings)
    failures = [r for r in rows if r["status"] != "ok"]
    print(f"wrote {len(rows)} rows to {args.out_csv} (manifest: {manifest_path})")
    if failures:
        for r in failures:
            print(f"row {int(r['index'])}: {r['status']}", file=sys.stderr)
        print(f"{len(failures)} of {len(rows)} rows failed", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import run_verify
    mc = McConfig(sample_count=int(args.samples), seed=args.seed,
                  batch_size=int(args.batch))
    print(f"# isac-rates {__version__} verify scope={args.scope} "
          f"samples={mc.sample_count} seed={mc.seed}")
    results = run_verify(args.scope, mc)
    for res in results:
        print(res.line())
    n_fail = sum(1 for r in results if not r.passed)
    print(f"# {len(results) - n_fail}/{len(results)} checks passed")
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY_FAIL


def _cmd_plotdata(args) -> int:
    from .plotting import (group_subfigures, render_subfigure, subfigure_csv,
                           subfigure_name)
    rows = parse_csv(args.sweep_csv)
    groups = group_subfigures(rows, rho2=args.rho2, ss1=args.ss1, sn2=args.sn2)
    os.makedirs(args.outdir, exist_ok=True)
    sn1_values = {key[1] for key in groups}
    written = []
    for key, series in groups.items():
        name = subfigure_name(key, multi_sn1=len(sn1_values) > 1)
        csv_path = os.path.join(args.outdir, name + ".csv")
        with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(subfigure_csv(series))
        written.append(csv_path)
        if not args.no_render:
            png_path = os.path.join(args.outdir, name + ".png")
            render_subfigure(png_path, key, series)
            written.append(png_path)
    print(f"wrote {len(written)} files for {len(groups)} subfigures "
          f"to {args.outdir}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"rate": _cmd_rate, "sweep": _cmd_sweep,
                "verify": _cmd_verify, "plotdata": _cmd_plotdata}
    try:
        return handlers[args.command](args)
    except SpecError as exc:
        print(f"isac-rates: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"isac-rates: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"isac-rates: numerical failure: {exc}", file=sys.stderr)
        if exc.estimate is not None:
            print(f"isac-rates: best estimate {exc.estimate!r} "
                  f"(error bound {exc.error_bound!r})", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line frontend.

Subcommands: `simulate` a trace to a JSON report, `gen` synthetic
traces, `sweep` one timing parameter against the analytic loop model,
`compare-prac` default-vs-PRAC overhead per trace, and
`compare-policies` page-policy breakdowns.  Exit codes: 0 success,
1 usage error, 2 unreadable/invalid data or configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from . import config as config_mod
from . import stats
from .controller import SimConfig, measure_sbdr_period, run_detailed
from .mapping import AddressMapping
from .policy import POLICY_KINDS, policy_preset
from .timing import ConfigError, TimingParams, preset
from .trace import TraceError, gen_mixed, gen_sbdr, parse_file, write_file

# tRCD/tRTP pair summing to the 16 ns floor configuration; tRCD is kept
# cycle-exact at 2400 MHz to minimize quantization error.
REDUCED_T_RCD = 10.0
REDUCED_T_RTP = 6.0

SWEEP_CSV_HEADER = ["param", "value_ns", "period_ns_simulated", "period_ns_oracle"]
COMPARE_CSV_HEADER = ["trace", "policy", "t_default_cycles", "t_prac_cycles",
                      "oh_frac", "rbmpki_default"]
POLICY_CSV_HEADER = ["policy", "hit_ratio", "empty_ratio", "miss_ratio",
                     "total_cycles", "cycles_norm_open"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; data problems exit 2
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="pracsim", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=42,
                        help="seed for generator-backed benches (default 42)")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one trace and write a JSON report")
    sim.add_argument("--trace", required=True, help="trace file")
    sim.add_argument("--timing", default="default",
                     help="default, prac, or a config file with a [timing] section")
    sim.add_argument("--policy", default=None, choices=POLICY_KINDS,
                     help="page policy preset (default: adaptive or [policy] section)")
    sim.add_argument("--config", default=None,
                     help="full config file (PRACSIM_CONFIG is the fallback)")
    sim.add_argument("--out", default=None, help="report path (default stdout)")
    sim.add_argument("--log-commands", default=None, metavar="FILE",
                     help="also write the command log")
    sim.add_argument("--completions", default=None, metavar="FILE",
                     help="also write the per-access completion CSV")
    sim.set_defaults(func=cmd_simulate)

    gen = sub.add_parser("gen", help="generate a synthetic trace")
    gen_sub = gen.add_subparsers(dest="generator", required=True)
    g_sbdr = gen_sub.add_parser("sbdr", help="same-bank different-row read loop")
    g_sbdr.add_argument("--pairs", type=int, default=32)
    g_sbdr.add_argument("--bank", type=int, default=0)
    g_sbdr.add_argument("--row-a", type=int, default=1)
    g_sbdr.add_argument("--row-b", type=int, default=2)
    g_sbdr.add_argument("--out", required=True)
    g_sbdr.set_defaults(func=cmd_gen_sbdr)
    g_mixed = gen_sub.add_parser("mixed", help="controlled row-conflict fraction")
    g_mixed.add_argument("--n", type=int, default=10000)
    g_mixed.add_argument("--miss-ratio", type=float, required=True)
    g_mixed.add_argument("--banks", type=int, default=4)
    g_mixed.add_argument("--gen-seed", type=int, default=None,
                         help="overrides the global --seed")
    g_mixed.add_argument("--out", required=True)
    g_mixed.set_defaults(func=cmd_gen_mixed)

    sweep = sub.add_parser("sweep", help="sweep one timing parameter on the SBDR bench")
    sweep.add_argument("--param", required=True, choices=["t_rp", "t_ras"])
    sweep.add_argument("--from", dest="start", type=float, required=True, metavar="NS")
    sweep.add_argument("--to", dest="stop", type=float, required=True, metavar="NS")
    sweep.add_argument("--step", type=float, required=True, metavar="NS")
    sweep.add_argument("--bench", default="sbdr", choices=["sbdr"])
    sweep.add_argument("--base", default="default", choices=["default", "prac"])
    sweep.add_argument("--reduce-rcd-rtp", action="store_true",
                       help="set tRCD+tRTP to the 16 ns floor configuration")
    sweep.add_argument("--out", default=None, help="CSV path (default stdout)")
    sweep.set_defaults(func=cmd_sweep)

    cp = sub.add_parser("compare-prac", help="default-vs-PRAC overhead per trace")
    cp.add_argument("--trace", required=True, nargs="+", help="one or more trace files")
    cp.add_argument("--policy", default="open", choices=POLICY_KINDS)
    cp.add_argument("--out", default=None, help="CSV path (default stdout)")
    cp.set_defaults(func=cmd_compare_prac)

    pol = sub.add_parser("compare-policies", help="open/adaptive/close breakdown")
    pol.add_argument("--trace", required=True, help="trace file")
    pol.add_argument("--timing", default="prac",
                     help="default, prac, or a config file (default prac)")
    pol.add_argument("--out", default=None, help="CSV path (default stdout)")
    pol.set_defaults(func=cmd_compare_policies)

    return parser


def _resolve_timing(spec: str) -> TimingParams:
    if spec in ("default", "prac", "default_ddr5_4800", "prac_ddr5_4800"):
        return preset(spec)
    if not os.path.exists(spec):
        raise UsageError(
            f"--timing must be default, prac, or a config file; {spec!r} is neither")
    return config_mod.load_timing(spec)


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _write_csv(path: str | None, header: list[str], rows: list[list]) -> None:
    def emit(handle):
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)

    if path is None:
        emit(sys.stdout)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            emit(handle)


def _frange(start: float, stop: float, step: float) -> list[Fraction]:
    if step <= 0:
        raise UsageError(f"--step must be positive, got {step}")
    if start > stop:
        raise UsageError(f"--from {start} exceeds --to {stop}")
    lo, hi, inc = (Fraction(str(v)) for v in (start, stop, step))
    values = []
    k = 0
    while lo + k * inc <= hi:
        values.append(lo + k * inc)
        k += 1
    return values


# -- subcommands -------------------------------------------------------------

def cmd_simulate(args) -> int:
    timing = _resolve_timing(args.timing)
    policy = policy_preset(args.policy) if args.policy else None
    config = config_mod.load_sim_config(args.config, timing=timing, policy=policy)
    trace = parse_file(args.trace)
    result = run_detailed(config, trace,
                          keep_completions=args.completions is not None,
                          log_commands=args.log_commands is not None)
    _write_text(args.out, json.dumps(result.report.to_json_dict(), indent=2) + "\n")
    if args.log_commands:
        _write_text(args.log_commands, "\n".join(result.command_log) + "\n")
    if args.completions:
        rows = [[c.index, c.access_class.value, f"{c.latency_ns:.4f}",
                 str(c.premature).lower()] for c in result.completions]
        _write_csv(args.completions, ["index", "class", "latency_ns", "premature"], rows)
    return 0


def cmd_gen_sbdr(args) -> int:
    trace = gen_sbdr(args.pairs, bank=args.bank, row_a=args.row_a, row_b=args.row_b,
                     mapping=AddressMapping())
    write_file(trace, args.out)
    return 0


def cmd_gen_mixed(args) -> int:
    seed = args.gen_seed if args.gen_seed is not None else args.seed
    trace = gen_mixed(args.n, args.miss_ratio, banks=args.banks, seed=seed,
                      mapping=AddressMapping())
    write_file(trace, args.out)
    return 0


def sweep_rows(param: str, grid: list[Fraction], base: TimingParams,
               reduce_rcd_rtp: bool) -> list[list]:
    """One CSV row per grid point: simulated vs analytic per-access period.

    Grid points re-derive t_rc as t_ras + t_rp, mirroring how single
    parameters are adjusted on hardware (no standalone ACT-to-ACT floor
    is retained from the base preset).
    """
    if reduce_rcd_rtp:
        base = base.with_fields(t_rcd=REDUCED_T_RCD, t_rtp=REDUCED_T_RTP)
    rows = []
    for value in grid:
        ns = float(value)
        params = base.with_fields(**{param: ns})
        params = params.with_fields(t_rc=params.t_ras + params.t_rp)
        period_cycles = measure_sbdr_period(params)
        period_ns = float(Fraction(period_cycles) * 1000 / Fraction(str(params.clock_mhz)))
        oracle_ns = stats.sbdr_oracle(params)
        rows.append([param, f"{ns:.4f}", f"{period_ns:.4f}", f"{oracle_ns:.4f}"])
    return rows


def cmd_sweep(args) -> int:
    base = preset(args.base)
    grid = _frange(args.start, args.stop, args.step)
    rows = sweep_rows(args.param, grid, base, args.reduce_rcd_rtp)
    _write_csv(args.out, SWEEP_CSV_HEADER, rows)
    return 0


def cmd_compare_prac(args) -> int:
    policy = policy_preset(args.policy)
    rows = []
    rbmpkis: list[float] = []
    overheads: list[float] = []
    for path in args.trace:
        trace = parse_file(path)
        rep_default = run_detailed(
            SimConfig(timing=preset("default"), policy=policy), trace).report
        rep_prac = run_detailed(
            SimConfig(timing=preset("prac"), policy=policy), trace).report
        oh = stats.overhead(rep_default.total_core_cycles, rep_prac.total_core_cycles)
        rbmpkis.append(rep_default.rbmpki)
        overheads.append(oh)
        rows.append([path, args.policy, rep_default.total_core_cycles,
                     rep_prac.total_core_cycles, f"{oh:.6f}",
                     f"{rep_default.rbmpki:.4f}"])
    _write_csv(args.out, COMPARE_CSV_HEADER, rows)
    r, excluded = stats.log_correlation(rbmpkis, overheads)
    if r is not None:
        print(f"pearson_log_rbmpki_oh={r:.4f} excluded_zero_rbmpki={excluded}",
              file=sys.stderr)
    return 0


def cmd_compare_policies(args) -> int:
    timing = _resolve_timing(args.timing)
    trace = parse_file(args.trace)
    reports = {}
    for kind in ("open", "adaptive", "close"):
        config = SimConfig(timing=timing, policy=policy_preset(kind))
        reports[kind] = run_detailed(config, trace).report
    open_cycles = reports["open"].total_core_cycles
    rows = []
    for kind in ("open", "adaptive", "close"):
        rep = reports[kind]
        total = rep.accesses
        rows.append([kind,
                     f"{rep.hits / total:.6f}",
                     f"{rep.empties / total:.6f}",
                     f"{rep.misses / total:.6f}",
                     rep.total_core_cycles,
                     f"{rep.total_core_cycles / open_cycles:.6f}"])
    _write_csv(args.out, POLICY_CSV_HEADER, rows)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"pracsim: error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, TraceError) as exc:
        print(f"pracsim: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        name = exc.filename or ""
        print(f"pracsim: {name}: {exc.strerror}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

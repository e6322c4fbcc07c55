"""Trace-driven channel controller.

Models a blocking in-order core in front of one DRAM channel: each
request advances core time by its non-memory instruction count, then by
the full latency of the memory access.  Requests are serviced with the
minimal legal command sequence for their row-buffer class; the active
page policy may additionally precharge idle rows between requests.

Idle-close countdowns start at the issue tick of the row's last column
command, so a close-policy precharge engages as soon as the
activate-to-precharge and read-to-precharge minimums allow, matching
auto-precharge behavior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import dram, policy as policy_mod
from .dram import (AccessClass, BankState, CloseReason, Command, CommandKind,
                   classify, earliest_issue)
from .mapping import AddressMapping
from .policy import PolicyConfig, PolicyState
from .stats import SimReport
from .timing import ConfigError, TimingParams, cycles_to_ns
from .trace import MemRequest, Trace, TraceError


@dataclass(frozen=True)
class SimConfig:
    timing: TimingParams
    policy: PolicyConfig
    mapping: AddressMapping = AddressMapping()
    cpi_base: float = 1.0
    core_clock_mhz: float | None = None  # None: same as the DRAM command clock

    def __post_init__(self):
        if self.cpi_base <= 0:
            raise ConfigError(f"cpi_base must be positive, got {self.cpi_base}")
        if self.core_clock_mhz is not None and self.core_clock_mhz <= 0:
            raise ConfigError(f"core_clock_mhz must be positive, got {self.core_clock_mhz}")
        if self.mapping.total_banks < 1:
            raise ConfigError("mapping must cover at least one bank")

    @property
    def banks(self) -> int:
        return self.mapping.banks_per_group

    @property
    def bank_groups(self) -> int:
        return self.mapping.bank_groups

    @property
    def ranks(self) -> int:
        return self.mapping.ranks

    @property
    def effective_core_clock(self) -> float:
        return self.core_clock_mhz if self.core_clock_mhz is not None else self.timing.clock_mhz


@dataclass(frozen=True)
class CompletionRecord:
    index: int
    access_class: AccessClass
    start_tick: int
    data_tick: int
    premature: bool
    op: str
    clock_mhz: float

    @property
    def latency_cycles(self) -> int:
        return self.data_tick - self.start_tick

    @property
    def latency_ns(self) -> float:
        return float(cycles_to_ns(self.latency_cycles, self.clock_mhz))


@dataclass
class RunResult:
    report: SimReport
    completions: list[CompletionRecord] = field(default_factory=list)
    command_log: list[str] = field(default_factory=list)


class Controller:
    """One simulation instance: bank array, policy state, counters."""

    def __init__(self, config: SimConfig, log_commands: bool = False):
        self.config = config
        self.cyc = config.timing.to_cycles()
        self.mapping = config.mapping
        self.banks = [BankState() for _ in range(self.mapping.total_banks)]
        n_states = self.mapping.total_banks if config.policy.per_bank else 1
        self.policy_states = [policy_mod.initial_state(config.policy) for _ in range(n_states)]
        self.pending_close: dict[int, int] = {}
        self._log: list[tuple[int, int, str]] | None = [] if log_commands else None
        self._log_seq = 0
        self.report = SimReport(policy_final_idle=config.policy.idle_page_rst_val)
        # core-clock conversion ratios, exact
        dram_clock = Fraction(str(config.timing.clock_mhz))
        core_clock = Fraction(str(config.effective_core_clock))
        self._ticks_per_instr = Fraction(str(config.cpi_base)) * dram_clock / core_clock
        self._core_per_tick = core_clock / dram_clock

    # -- logging -----------------------------------------------------------

    def _log_cmd(self, tick: int, cmd: Command) -> None:
        if self._log is not None:
            self._log.append((tick, self._log_seq, dram.format_log_line(tick, cmd)))
            self._log_seq += 1

    def command_log(self) -> list[str]:
        if self._log is None:
            return []
        return [line for _, _, line in sorted(self._log)]

    # -- core time ---------------------------------------------------------

    def nonmem_ticks(self, instructions: int) -> int:
        if instructions == 0:
            return 0
        return math.ceil(instructions * self._ticks_per_instr)

    def core_cycles(self, tick: int) -> int:
        return math.ceil(tick * self._core_per_tick)

    # -- idle-close machinery ------------------------------------------------

    def advance_idle(self, now: int) -> list[tuple[int, Command]]:
        """Apply every scheduled idle precharge due at or before `now`."""
        issued = []
        for b in sorted(self.pending_close):
            tick = self.pending_close[b]
            if tick <= now:
                cmd = Command(CommandKind.PRE, b)
                dram.apply(self.banks[b], cmd, tick, self.cyc,
                           close_reason=CloseReason.IDLE)
                self._log_cmd(tick, cmd)
                issued.append((tick, cmd))
                del self.pending_close[b]
        return issued

    def flush_idle(self) -> list[tuple[int, Command]]:
        return self.advance_idle(max(self.pending_close.values(), default=0))

    def _policy_index(self, bank_index: int) -> int:
        return bank_index if self.config.policy.per_bank else 0

    # -- request servicing ---------------------------------------------------

    def service(self, request: MemRequest, arrival: int, index: int = 0) -> CompletionRecord:
        decoded = self.mapping.decode(request.address)
        b = self.mapping.flat_bank(decoded)
        self.advance_idle(arrival)
        # A request supersedes a not-yet-due idle close for its bank.
        self.pending_close.pop(b, None)

        bank = self.banks[b]
        cls = classify(bank, decoded.row)
        premature = (cls is AccessClass.EMPTY
                     and bank.last_close_reason is CloseReason.IDLE
                     and bank.last_closed_row == decoded.row)

        t = arrival
        if cls is AccessClass.MISS:
            pre = Command(CommandKind.PRE, b)
            t = earliest_issue(bank, pre, self.cyc, t)
            dram.apply(bank, pre, t, self.cyc, close_reason=CloseReason.CONFLICT)
            self._log_cmd(t, pre)
        if cls is not AccessClass.HIT:
            act = Command(CommandKind.ACT, b, row=decoded.row)
            t = earliest_issue(bank, act, self.cyc, t)
            dram.apply(bank, act, t, self.cyc)
            self._log_cmd(t, act)

        kind = CommandKind.RD if request.op == "read" else CommandKind.WR
        col_cmd = Command(kind, b, column=decoded.column)
        issue = earliest_issue(bank, col_cmd, self.cyc, t)
        dram.apply(bank, col_cmd, issue, self.cyc)
        self._log_cmd(issue, col_cmd)
        data_tick = issue + self.cyc.t_cl if kind is CommandKind.RD else issue

        self._account(request, cls, arrival, data_tick)
        self._update_policy(b, cls, premature, issue)
        return CompletionRecord(index=index, access_class=cls, start_tick=arrival,
                                data_tick=data_tick, premature=premature,
                                op=request.op, clock_mhz=self.config.timing.clock_mhz)

    def _account(self, request: MemRequest, cls: AccessClass,
                 arrival: int, data_tick: int) -> None:
        r = self.report
        if request.op == "read":
            r.reads += 1
        else:
            r.writes += 1
        if cls is AccessClass.HIT:
            r.hits += 1
        elif cls is AccessClass.EMPTY:
            r.empties += 1
        else:
            r.misses += 1
        r.total_instructions += request.nonmem + 1
        latency = float(cycles_to_ns(data_tick - arrival, self.config.timing.clock_mhz))
        r.latency_ns_by_class[cls.value] += latency

    def _update_policy(self, bank_index: int, cls: AccessClass,
                       premature: bool, column_issue: int) -> None:
        idx = self._policy_index(bank_index)
        state = policy_mod.record_outcome(
            self.policy_states[idx], self.config.policy, cls, premature)
        self.policy_states[idx] = state
        deadline = policy_mod.idle_deadline(state, self.config.policy)
        if deadline is not None:
            bank = self.banks[bank_index]
            pre = Command(CommandKind.PRE, bank_index)
            self.pending_close[bank_index] = earliest_issue(
                bank, pre, self.cyc, column_issue + deadline)

    def finish(self) -> SimReport:
        self.flush_idle()
        self.report.policy_final_idle = self.policy_states[0].current_idle
        return self.report


def run_detailed(config: SimConfig, trace: Trace, *,
                 keep_completions: bool = False,
                 log_commands: bool = False) -> RunResult:
    """Simulate a trace against one configuration.

    Pure in effect: identical (config, trace) inputs produce identical
    results.  Parse-level defects (undecodable addresses) are reported
    with the offending request's position.
    """
    if len(trace) == 0:
        raise TraceError("trace is empty")
    ctrl = Controller(config, log_commands=log_commands)
    completions: list[CompletionRecord] = []
    now = 0
    for index, request in enumerate(trace):
        now += ctrl.nonmem_ticks(request.nonmem)
        try:
            record = ctrl.service(request, now, index=index)
        except ConfigError as exc:
            raise TraceError(f"request {index + 1}: {exc}", line_no=index + 1) from exc
        now = record.data_tick
        if keep_completions:
            completions.append(record)
    report = ctrl.finish()
    report.total_core_cycles = ctrl.core_cycles(now)
    return RunResult(report=report, completions=completions,
                     command_log=ctrl.command_log())


def run(config: SimConfig, trace: Trace) -> SimReport:
    return run_detailed(config, trace).report


def measure_sbdr_period(timing: TimingParams, pairs: int = 32,
                        mapping: AddressMapping | None = None) -> int:
    """Steady-state per-access period (cycles) of the SBDR loop.

    Runs the loop under the close policy, whose proactive precharge puts
    the activate-to-activate path on the latency critical path, and
    returns the completion-to-completion gap once the schedule settles.
    """
    from .policy import policy_preset
    from .trace import gen_sbdr

    mapping = mapping or AddressMapping()
    config = SimConfig(timing=timing, policy=policy_preset("close"), mapping=mapping)
    trace = gen_sbdr(pairs, bank=0, row_a=1, row_b=2, mapping=mapping)
    result = run_detailed(config, trace, keep_completions=True)
    ticks = [c.data_tick for c in result.completions]
    gaps = [b - a for a, b in zip(ticks, ticks[1:])]
    tail = gaps[len(gaps) // 2:]
    if len(set(tail)) != 1:
        raise RuntimeError(f"SBDR loop did not reach steady state: tail gaps {tail}")
    return tail[-1]

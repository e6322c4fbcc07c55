"""Trace-driven DDR5 channel simulator with PRAC timing support."""

from .controller import (CompletionRecord, Controller, RunResult, SimConfig,
                         measure_sbdr_period, run, run_detailed)
from .dram import (AccessClass, BankState, CloseReason, Command, CommandKind,
                   ProtocolViolation, check_command_log, classify)
from .mapping import AddressMapping
from .policy import (NEVER, PolicyConfig, PolicyState, idle_deadline,
                     initial_state, policy_preset, record_outcome)
from .stats import (ComparisonReport, SimReport, log_correlation, overhead,
                    pearson, rbmpki, sbdr_oracle, sbdr_oracle_cycles)
from .timing import (ConfigError, TimingCycles, TimingParams, cycles_to_ns,
                     ns_to_cycles, preset, validate)
from .trace import (MemRequest, Trace, TraceError, gen_mixed, gen_sbdr, parse,
                    parse_file, render, write_file)

__version__ = "0.1.0"

"""Per-bank row-buffer state machine and command timing rules.

A bank is either precharged (no open row) or has exactly one open row.
`classify` maps an incoming access to hit/empty/miss, `earliest_issue`
computes the first tick at which a command satisfies every inter-command
minimum, and `apply` commits a command to the bank state.  All ticks are
integer command-clock cycles.

`check_command_log` is a deliberately separate, brute-force checker that
rescans emitted command logs pair by pair; it shares no scheduling logic
with `earliest_issue` and is used to cross-validate engine output.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .timing import TimingCycles


class ProtocolViolation(RuntimeError):
    """A command was issued in a state or at a tick where it is illegal."""


class AccessClass(enum.Enum):
    HIT = "hit"
    EMPTY = "empty"
    MISS = "miss"

    def __str__(self) -> str:
        return self.value


class CommandKind(enum.Enum):
    ACT = "ACT"
    RD = "RD"
    WR = "WR"
    PRE = "PRE"

    def __str__(self) -> str:
        return self.value


class CloseReason(enum.Enum):
    CONFLICT = "conflict"
    IDLE = "idle"


@dataclass(frozen=True)
class Command:
    kind: CommandKind
    bank: int
    row: int | None = None
    column: int | None = None

    def __post_init__(self):
        if (self.row is not None) != (self.kind is CommandKind.ACT):
            raise ValueError(f"row must be given exactly for ACT, got {self}")
        needs_col = self.kind in (CommandKind.RD, CommandKind.WR)
        if (self.column is not None) != needs_col:
            raise ValueError(f"column must be given exactly for RD/WR, got {self}")


@dataclass
class BankState:
    """Row-buffer status plus the per-command timestamps that gate issue.

    last_closed_row and last_close_reason outlive the precharge that set
    them so an idle-timeout close that destroys an upcoming hit can be
    recognized when the victim access arrives.
    """

    open_row: int | None = None
    last_act: int | None = None
    last_pre: int | None = None
    last_rd_issue: int | None = None
    last_wr_issue: int | None = None
    last_wr_burst_end: int | None = None
    last_closed_row: int | None = None
    last_close_reason: CloseReason | None = None


def classify(bank: BankState, target_row: int) -> AccessClass:
    if bank.open_row is None:
        return AccessClass.EMPTY
    if bank.open_row == target_row:
        return AccessClass.HIT
    return AccessClass.MISS


def _require_state(bank: BankState, cmd: Command) -> None:
    if cmd.kind is CommandKind.ACT:
        if bank.open_row is not None:
            raise ProtocolViolation(
                f"ACT to bank {cmd.bank} while row {bank.open_row} is open")
    else:
        if bank.open_row is None:
            raise ProtocolViolation(
                f"{cmd.kind} to bank {cmd.bank} while precharged")


def earliest_issue(bank: BankState, cmd: Command, params: TimingCycles, now: int) -> int:
    """First tick >= now at which `cmd` meets every timing constraint.

    Absent timestamps impose no constraint (a fresh bank accepts an ACT
    immediately).
    """
    _require_state(bank, cmd)
    t = now
    if cmd.kind is CommandKind.ACT:
        if bank.last_pre is not None:
            t = max(t, bank.last_pre + params.t_rp)
        if bank.last_act is not None:
            t = max(t, bank.last_act + params.t_rc_eff)
    elif cmd.kind is CommandKind.RD:
        if bank.last_act is not None:
            t = max(t, bank.last_act + params.t_rcd)
        if bank.last_rd_issue is not None:
            t = max(t, bank.last_rd_issue + params.t_ccdl)
    elif cmd.kind is CommandKind.WR:
        if bank.last_act is not None:
            t = max(t, bank.last_act + params.t_rcd)
        if bank.last_wr_issue is not None:
            t = max(t, bank.last_wr_issue + params.t_ccdl)
    elif cmd.kind is CommandKind.PRE:
        if bank.last_act is not None:
            t = max(t, bank.last_act + params.t_ras)
        if bank.last_rd_issue is not None:
            t = max(t, bank.last_rd_issue + params.t_rtp)
        if bank.last_wr_burst_end is not None:
            t = max(t, bank.last_wr_burst_end + params.t_wr)
    return t


def apply(bank: BankState, cmd: Command, at: int, params: TimingCycles,
          close_reason: CloseReason = CloseReason.CONFLICT) -> BankState:
    """Commit `cmd` to the bank at tick `at` (mutates and returns `bank`).

    Guards internal consistency: the engine must never construct a call
    that violates `earliest_issue`.
    """
    legal_at = earliest_issue(bank, cmd, params, at)
    if at < legal_at:
        raise ProtocolViolation(
            f"{cmd.kind} bank {cmd.bank} at tick {at} before legal tick {legal_at}")
    if cmd.kind is CommandKind.ACT:
        bank.open_row = cmd.row
        bank.last_act = at
    elif cmd.kind is CommandKind.RD:
        bank.last_rd_issue = at
    elif cmd.kind is CommandKind.WR:
        bank.last_wr_issue = at
        bank.last_wr_burst_end = at + params.t_cwl + params.t_bl
    elif cmd.kind is CommandKind.PRE:
        bank.last_closed_row = bank.open_row
        bank.last_close_reason = close_reason
        bank.open_row = None
        bank.last_pre = at
    return bank


# --- command log ----------------------------------------------------------

def format_log_line(tick: int, cmd: Command) -> str:
    if cmd.kind is CommandKind.ACT:
        return f"{tick} ACT bank={cmd.bank} row={cmd.row}"
    if cmd.kind is CommandKind.PRE:
        return f"{tick} PRE bank={cmd.bank}"
    return f"{tick} {cmd.kind} bank={cmd.bank} col={cmd.column}"


_LOG_RE = re.compile(
    r"^(?P<tick>\d+)\s+(?P<kind>ACT|RD|WR|PRE)\s+bank=(?P<bank>\d+)"
    r"(?:\s+row=(?P<row>\d+))?(?:\s+col=(?P<col>\d+))?\s*$")


def parse_log_line(line: str) -> tuple[int, Command]:
    m = _LOG_RE.match(line)
    if not m:
        raise ValueError(f"malformed command-log line: {line!r}")
    kind = CommandKind(m.group("kind"))
    row = int(m.group("row")) if m.group("row") else None
    col = int(m.group("col")) if m.group("col") else None
    return int(m.group("tick")), Command(kind, int(m.group("bank")), row=row, column=col)


def check_command_log(lines: list[str], params: TimingCycles) -> list[str]:
    """Brute-force legality check of an emitted command log.

    Scans every same-bank command pair against the pairwise minimums
    (ACT-ACT, ACT-PRE, PRE-ACT, ACT-RD/WR, RD-PRE, write-burst-end-PRE,
    RD-RD, WR-WR) and replays the open/closed state machine.  Returns a
    list of violation messages, empty when the log is legal.  Pairs whose
    spacing already exceeds the largest constraint are skipped, which
    cannot hide a violation because ticks are scanned in order.
    """
    per_bank: dict[int, list[tuple[int, CommandKind]]] = {}
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tick, cmd = parse_log_line(line)
        per_bank.setdefault(cmd.bank, []).append((tick, cmd.kind))

    write_to_pre = params.t_cwl + params.t_bl + params.t_wr
    horizon = max(params.t_rc_eff, params.t_ras, params.t_rcd, params.t_rp,
                  params.t_rtp, params.t_ccdl, write_to_pre)

    violations: list[str] = []

    def pair_minimum(k1: CommandKind, k2: CommandKind) -> int | None:
        if k1 is CommandKind.ACT:
            if k2 is CommandKind.ACT:
                return params.t_rc_eff
            if k2 is CommandKind.PRE:
                return params.t_ras
            return params.t_rcd  # RD or WR
        if k1 is CommandKind.PRE and k2 is CommandKind.ACT:
            return params.t_rp
        if k1 is CommandKind.RD and k2 is CommandKind.PRE:
            return params.t_rtp
        if k1 is CommandKind.WR and k2 is CommandKind.PRE:
            return write_to_pre
        if k1 is CommandKind.RD and k2 is CommandKind.RD:
            return params.t_ccdl
        if k1 is CommandKind.WR and k2 is CommandKind.WR:
            return params.t_ccdl
        return None

    for bank, cmds in per_bank.items():
        cmds.sort(key=lambda tc: tc[0])
        # pairwise minimums
        for i, (t1, k1) in enumerate(cmds):
            for t2, k2 in cmds[i + 1:]:
                if t2 - t1 > horizon:
                    break
                minimum = pair_minimum(k1, k2)
                if minimum is not None and t2 - t1 < minimum:
                    violations.append(
                        f"bank {bank}: {k1}@{t1} -> {k2}@{t2} gap {t2 - t1} < {minimum}")
        # state machine
        row_open = False
        for t, k in cmds:
            if k is CommandKind.ACT:
                if row_open:
                    violations.append(f"bank {bank}: ACT@{t} while a row is open")
                row_open = True
            elif k is CommandKind.PRE:
                if not row_open:
                    violations.append(f"bank {bank}: PRE@{t} while precharged")
                row_open = False
            else:
                if not row_open:
                    violations.append(f"bank {bank}: {k}@{t} while precharged")
    return violations

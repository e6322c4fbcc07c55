"""Open/close/adaptive page policies built on the idletime register model.

The adaptive policy tracks a tumbling window of `win_size` requests.  If
the window ends with more misses than `opc_th`, the idle-close delay is
halved (pages close sooner); otherwise, if it ends with more premature
closes than `ppc_th`, the delay is doubled (pages stay open longer).
Both-exceeded ties shorten, since a miss is the costlier outcome.  Open
and close are expressed as extreme parameterizations of the same
register: open never closes on idle, close precharges as soon as the
bank-level constraints allow.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .dram import AccessClass
from .timing import ConfigError

POLICY_KINDS = ("open", "close", "adaptive")

#: Sentinel deadline for "never close on idle".
NEVER = None


@dataclass(frozen=True)
class PolicyConfig:
    kind: str
    win_size: int
    idle_page_rst_val: int
    opc_th: int
    ppc_th: int
    idle_min: int = 0
    idle_max: int = 63
    adjust: str = "geometric"
    per_bank: bool = False

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"unknown policy kind {self.kind!r}")
        if not 1 <= self.win_size <= 255:
            raise ConfigError(f"win_size must be in [1, 255], got {self.win_size}")
        if not 0 <= self.idle_page_rst_val <= 63:
            raise ConfigError(
                f"idle_page_rst_val must be in [0, 63], got {self.idle_page_rst_val}")
        if not 0 <= self.opc_th <= 127:
            raise ConfigError(f"opc_th must be in [0, 127], got {self.opc_th}")
        if not 0 <= self.ppc_th <= 127:
            raise ConfigError(f"ppc_th must be in [0, 127], got {self.ppc_th}")
        if not self.idle_min <= self.idle_page_rst_val <= self.idle_max:
            raise ConfigError(
                f"idle_page_rst_val {self.idle_page_rst_val} outside "
                f"[{self.idle_min}, {self.idle_max}]")
        if self.adjust != "geometric":
            raise ConfigError(f"unknown adjust rule {self.adjust!r}")


@dataclass(frozen=True)
class PolicyState:
    current_idle: int
    window_fill: int = 0
    window_miss: int = 0
    window_premature: int = 0


_POLICY_PRESETS = {
    "open": dict(win_size=255, idle_page_rst_val=63, opc_th=127, ppc_th=0),
    "adaptive": dict(win_size=64, idle_page_rst_val=8, opc_th=6, ppc_th=6),
    "close": dict(win_size=1, idle_page_rst_val=0, opc_th=0, ppc_th=127),
}


def policy_preset(kind: str) -> PolicyConfig:
    if kind not in _POLICY_PRESETS:
        raise ConfigError(f"unknown policy preset {kind!r} (known: {', '.join(POLICY_KINDS)})")
    return PolicyConfig(kind=kind, **_POLICY_PRESETS[kind])


def initial_state(config: PolicyConfig) -> PolicyState:
    return PolicyState(current_idle=config.idle_page_rst_val)


def idle_deadline(state: PolicyState, config: PolicyConfig) -> int | None:
    """Idle-close delay in cycles after the last access, or NEVER.

    close precharges immediately after the access (subject to bank
    timing constraints); open leaves rows until a conflict evicts them,
    regardless of how the window counters have drifted.
    """
    if config.kind == "open":
        return NEVER
    if config.kind == "close":
        return 0
    return state.current_idle


def record_outcome(state: PolicyState, config: PolicyConfig,
                   access: AccessClass, premature: bool = False) -> PolicyState:
    """Fold one access outcome into the window; adjust on completion."""
    if premature and access is not AccessClass.EMPTY:
        raise ValueError("premature close applies only to empty accesses")
    fill = state.window_fill + 1
    miss = state.window_miss + (access is AccessClass.MISS)
    prem = state.window_premature + premature
    if fill < config.win_size:
        return replace(state, window_fill=fill, window_miss=miss, window_premature=prem)

    idle = state.current_idle
    if miss > config.opc_th:
        idle = max(config.idle_min, idle // 2)
    elif prem > config.ppc_th:
        idle = min(config.idle_max, max(1, idle * 2))
    return PolicyState(current_idle=idle)


def from_config_section(section: dict[str, str]) -> PolicyConfig:
    """Build PolicyConfig from a parsed [policy] config section."""
    known = {"kind", "win_size", "idle_page_rst_val", "opc_th", "ppc_th",
             "idle_min", "idle_max", "scope"}
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"unknown [policy] keys: {', '.join(sorted(unknown))}")
    kind = section.get("kind", "adaptive").strip().strip("\"'")
    base = policy_preset(kind)
    ints = {}
    for key in ("win_size", "idle_page_rst_val", "opc_th", "ppc_th", "idle_min", "idle_max"):
        if key in section:
            try:
                ints[key] = int(section[key].strip().strip("\"'"))
            except ValueError:
                raise ConfigError(f"invalid integer for [policy] {key}: {section[key]!r}") from None
    per_bank = False
    if "scope" in section:
        scope = section["scope"].strip().strip("\"'")
        if scope not in ("channel", "bank"):
            raise ConfigError(f"[policy] scope must be channel or bank, got {scope!r}")
        per_bank = scope == "bank"
    return replace(base, per_bank=per_bank, **ints)

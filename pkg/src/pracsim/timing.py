"""DRAM timing-parameter tables and cycle conversion.

Two built-in DDR5-4800 parameter sets are provided: the stock JEDEC values
("default") and the per-row-activation-counting variant ("prac"), which
raises tRP/tRC and lowers tRAS/tRTP/tWR.  All values are kept in
nanoseconds with picosecond fixed-point precision and converted once to
integer command-clock cycles when a simulation engine is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction

PS_PER_NS = 1000

# Keys accepted in the [timing] config section, in canonical order.
TIMING_FIELDS = (
    "t_ras", "t_rp", "t_rc", "t_rcd", "t_cl",
    "t_rtp", "t_wr", "t_ccdl", "t_cwl", "t_bl",
)

PRESET_NAMES = ("default_ddr5_4800", "prac_ddr5_4800")
_PRESET_ALIASES = {"default": "default_ddr5_4800", "prac": "prac_ddr5_4800"}


class ConfigError(ValueError):
    """Invalid timing/policy/mapping configuration."""


def _to_ps(ns: float) -> int:
    return round(ns * PS_PER_NS)


def _clock_fraction(clock_mhz: float) -> Fraction:
    # str() round-trip keeps decimal inputs like 2133.33 exact-as-written.
    if isinstance(clock_mhz, int):
        return Fraction(clock_mhz)
    return Fraction(str(clock_mhz))


def ns_to_cycles(duration_ns: float, clock_mhz: float) -> int:
    """Smallest whole number of clock cycles covering `duration_ns`.

    Computed as ceil(duration * clock / 1000) with exact rational
    arithmetic on picosecond fixed-point values, so boundary cases do not
    depend on float rounding.
    """
    if clock_mhz <= 0:
        raise ConfigError(f"clock must be positive, got {clock_mhz} MHz")
    if duration_ns < 0:
        raise ConfigError(f"duration must be non-negative, got {duration_ns} ns")
    ps = _to_ps(duration_ns)
    return math.ceil(Fraction(ps) * _clock_fraction(clock_mhz) / 1_000_000)


def cycles_to_ns(cycles: int, clock_mhz: float) -> Fraction:
    """Exact duration of `cycles` clock cycles, in ns."""
    return Fraction(cycles) * 1000 / _clock_fraction(clock_mhz)


@dataclass(frozen=True)
class TimingParams:
    """One column of the DDR5 timing table, in nanoseconds.

    t_ccdl, t_cwl and t_bl have JEDEC-typical defaults (8 clocks at
    2400 MHz for t_ccdl and t_bl, t_cwl = t_cl); they are only needed to
    space same-row bursts and to place the end of a write burst for the
    write-recovery rule.
    """

    t_ras: float
    t_rp: float
    t_rc: float
    t_rcd: float
    t_cl: float
    t_rtp: float
    t_wr: float
    t_ccdl: float = 3.333
    t_cwl: float = 16.0
    t_bl: float = 3.333
    clock_mhz: float = 2400

    def __post_init__(self):
        if self.clock_mhz <= 0:
            raise ConfigError(f"clock_mhz must be positive, got {self.clock_mhz}")

    def to_cycles(self) -> "TimingCycles":
        return TimingCycles.from_params(self)

    def with_fields(self, **changes: float) -> "TimingParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class TimingCycles:
    """Engine-facing parameter set in integer command-clock cycles.

    t_rc_eff is max(t_rc, t_ras + t_rp) evaluated on the converted
    values; the two built-in presets satisfy t_rc == t_ras + t_rp in ns,
    so for them t_rc_eff equals the composed ACT-to-ACT path exactly.
    """

    t_ras: int
    t_rp: int
    t_rc: int
    t_rcd: int
    t_cl: int
    t_rtp: int
    t_wr: int
    t_ccdl: int
    t_cwl: int
    t_bl: int
    clock_mhz: float
    t_rc_eff: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "t_rc_eff", max(self.t_rc, self.t_ras + self.t_rp))

    @classmethod
    def from_params(cls, p: TimingParams) -> "TimingCycles":
        conv = {name: ns_to_cycles(getattr(p, name), p.clock_mhz) for name in TIMING_FIELDS}
        return cls(clock_mhz=p.clock_mhz, **conv)

    def ns(self, cycles: int) -> Fraction:
        return cycles_to_ns(cycles, self.clock_mhz)

    @property
    def clock_period_ns(self) -> Fraction:
        return cycles_to_ns(1, self.clock_mhz)


_PRESETS = {
    "default_ddr5_4800": dict(
        t_ras=32.0, t_rp=16.0, t_rc=48.0, t_rcd=16.0, t_cl=16.0,
        t_rtp=7.5, t_wr=30.0,
    ),
    "prac_ddr5_4800": dict(
        t_ras=16.0, t_rp=36.0, t_rc=52.0, t_rcd=16.0, t_cl=16.0,
        t_rtp=5.0, t_wr=10.0,
    ),
}


def preset(name: str) -> TimingParams:
    """Return a built-in DDR5-4800 parameter set ("default" or "prac")."""
    canonical = _PRESET_ALIASES.get(name, name)
    if canonical not in _PRESETS:
        known = ", ".join(sorted(_PRESETS) + sorted(_PRESET_ALIASES))
        raise ConfigError(f"unknown timing preset {name!r} (known: {known})")
    return TimingParams(**_PRESETS[canonical])


@dataclass
class ValidationReport:
    valid: bool
    normalizations: list[tuple[str, float, float]]
    errors: list[str]


def validate(params: TimingParams) -> ValidationReport:
    """Check a parameter set for sign errors and tRC consistency.

    Non-positive fields are reported as errors (t_bl and t_ccdl may be
    zero for degenerate test configs).  A t_rc smaller than t_ras + t_rp
    is not an error: the engine uses the composed value, and this is
    recorded as a normalization.
    """
    errors: list[str] = []
    normalizations: list[tuple[str, float, float]] = []
    zero_ok = {"t_bl", "t_ccdl"}
    for f in fields(TimingParams):
        value = getattr(params, f.name)
        if value < 0 or (value == 0 and f.name not in zero_ok and f.name != "clock_mhz"):
            errors.append(f"{f.name} must be positive, got {value}")
    composed = params.t_ras + params.t_rp
    if params.t_rc < composed:
        normalizations.append(("t_rc", params.t_rc, composed))
    return ValidationReport(valid=not errors, normalizations=normalizations, errors=errors)


def from_config_section(section: dict[str, str]) -> TimingParams:
    """Build TimingParams from a parsed [timing] config section.

    A `preset` key loads a named preset; explicit `<field>_ns` keys and
    `clock_mhz` override individual values.
    """
    known = {f"{name}_ns" for name in TIMING_FIELDS} | {"clock_mhz", "preset"}
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"unknown [timing] keys: {', '.join(sorted(unknown))}")

    values: dict[str, float] = {}
    if "preset" in section:
        base = preset(_unquote(section["preset"]))
        values = {name: getattr(base, name) for name in TIMING_FIELDS}
        values["clock_mhz"] = base.clock_mhz
    for name in TIMING_FIELDS:
        key = f"{name}_ns"
        if key in section:
            values[name] = _parse_number(key, section[key])
    if "clock_mhz" in section:
        values["clock_mhz"] = _parse_number("clock_mhz", section["clock_mhz"])

    required = ("t_ras", "t_rp", "t_rc", "t_rcd", "t_cl", "t_rtp", "t_wr")
    missing = [name for name in required if name not in values]
    if missing:
        raise ConfigError(f"[timing] missing required keys (or a preset): "
                          f"{', '.join(f'{m}_ns' for m in missing)}")
    return TimingParams(**values)


def _unquote(raw: str) -> str:
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1]
    return raw


def _parse_number(key: str, raw: str) -> float:
    try:
        return float(_unquote(raw))
    except ValueError:
        raise ConfigError(f"invalid number for {key}: {raw!r}") from None

"""Byte-address to (rank, bank group, bank, row, column) bit mapping.

Backs the controller config: one fixed, fully configurable layout.  The
default packs column bits lowest, then bank group, bank, rank, and row
highest, a common open-page arrangement.  Decode and encode are exact
inverses on the covered bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .timing import ConfigError

MAPPING_FIELDS = ("column", "bank_group", "bank", "rank", "row")


class DecodedAddress(NamedTuple):
    row: int
    rank: int
    bank_group: int
    bank: int
    column: int


@dataclass(frozen=True)
class AddressMapping:
    column_bits: int = 11
    bank_group_bits: int = 3
    bank_bits: int = 2
    rank_bits: int = 0
    row_bits: int = 16
    order: tuple[str, ...] = MAPPING_FIELDS  # LSB to MSB

    def __post_init__(self):
        if sorted(self.order) != sorted(MAPPING_FIELDS):
            raise ConfigError(
                f"mapping order must be a permutation of {MAPPING_FIELDS}, got {self.order}")
        for name in MAPPING_FIELDS:
            if self._bits(name) < 0:
                raise ConfigError(f"{name}_bits must be non-negative")

    def _bits(self, name: str) -> int:
        return getattr(self, f"{name}_bits")

    @property
    def total_bits(self) -> int:
        return sum(self._bits(name) for name in MAPPING_FIELDS)

    @property
    def ranks(self) -> int:
        return 1 << self.rank_bits

    @property
    def bank_groups(self) -> int:
        return 1 << self.bank_group_bits

    @property
    def banks_per_group(self) -> int:
        return 1 << self.bank_bits

    @property
    def total_banks(self) -> int:
        return self.ranks * self.bank_groups * self.banks_per_group

    @property
    def rows(self) -> int:
        return 1 << self.row_bits

    @property
    def columns(self) -> int:
        return 1 << self.column_bits

    def decode(self, address: int) -> DecodedAddress:
        if address < 0 or address >= (1 << self.total_bits):
            raise ConfigError(
                f"address {address:#x} outside the {self.total_bits}-bit mapped range")
        parts = {}
        shift = 0
        for name in self.order:
            bits = self._bits(name)
            parts[name] = (address >> shift) & ((1 << bits) - 1)
            shift += bits
        return DecodedAddress(row=parts["row"], rank=parts["rank"],
                              bank_group=parts["bank_group"], bank=parts["bank"],
                              column=parts["column"])

    def encode(self, *, row: int = 0, rank: int = 0, bank_group: int = 0,
               bank: int = 0, column: int = 0) -> int:
        parts = dict(row=row, rank=rank, bank_group=bank_group, bank=bank, column=column)
        address = 0
        shift = 0
        for name in self.order:
            bits = self._bits(name)
            value = parts[name]
            if value < 0 or value >= (1 << bits):
                raise ConfigError(f"{name}={value} does not fit in {bits} bits")
            address |= value << shift
            shift += bits
        return address

    def flat_bank(self, decoded: DecodedAddress) -> int:
        return ((decoded.rank * self.bank_groups) + decoded.bank_group) \
            * self.banks_per_group + decoded.bank

    def encode_flat(self, flat_bank: int, row: int, column: int = 0) -> int:
        if not 0 <= flat_bank < self.total_banks:
            raise ConfigError(f"flat bank {flat_bank} outside [0, {self.total_banks})")
        bank = flat_bank % self.banks_per_group
        group = (flat_bank // self.banks_per_group) % self.bank_groups
        rank = flat_bank // (self.banks_per_group * self.bank_groups)
        return self.encode(row=row, rank=rank, bank_group=group, bank=bank, column=column)


def from_config_section(section: dict[str, str]) -> AddressMapping:
    """Build AddressMapping from a parsed [mapping] config section."""
    known = {f"{name}_bits" for name in MAPPING_FIELDS} | {"order"}
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"unknown [mapping] keys: {', '.join(sorted(unknown))}")
    kwargs: dict = {}
    for name in MAPPING_FIELDS:
        key = f"{name}_bits"
        if key in section:
            try:
                kwargs[key] = int(section[key].strip().strip("\"'"))
            except ValueError:
                raise ConfigError(f"invalid integer for [mapping] {key}") from None
    if "order" in section:
        kwargs["order"] = tuple(
            part.strip() for part in section["order"].strip().strip("\"'").split(","))
    return AddressMapping(**kwargs)

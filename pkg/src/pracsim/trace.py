"""Trace text format and synthetic trace generators.

One request per line: `<nonmem> <R|W> <0xHEXADDR>`, where nonmem is the
number of non-memory instructions executed before the access.  `#` lines
are comments; generators record their name and arguments in a
`# generator: ...` header so files are self-describing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator
import random

from .mapping import AddressMapping


class TraceError(ValueError):
    """Malformed trace input; carries a 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class MemRequest:
    nonmem: int
    op: str  # "read" | "write"
    address: int

    def __post_init__(self):
        if self.nonmem < 0:
            raise ValueError(f"nonmem must be non-negative, got {self.nonmem}")
        if self.op not in ("read", "write"):
            raise ValueError(f"op must be read or write, got {self.op!r}")
        if self.address < 0:
            raise ValueError(f"address must be non-negative, got {self.address:#x}")


@dataclass
class Trace:
    requests: list[MemRequest]
    name: str = "anonymous"
    generator: str | None = None
    params: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.requests)

    def __iter__(self) -> Iterator[MemRequest]:
        return iter(self.requests)


_OPS = {"R": "read", "W": "write"}
_OPS_REV = {"read": "R", "write": "W"}


def parse(lines: Iterable[str], name: str = "anonymous") -> Trace:
    """Parse the text trace format; `#` lines and blank lines are skipped."""
    requests: list[MemRequest] = []
    generator = None
    params: dict = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("generator:"):
                rest = body[len("generator:"):].split()
                if rest:
                    generator = rest[0]
                    params = _parse_kv(rest[1:])
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise TraceError(f"expected 3 fields, got {len(tokens)}: {line!r}", line_no)
        nonmem_tok, op_tok, addr_tok = tokens
        try:
            nonmem = int(nonmem_tok)
        except ValueError:
            raise TraceError(f"bad instruction count token {nonmem_tok!r}", line_no) from None
        if op_tok not in _OPS:
            raise TraceError(f"bad op token {op_tok!r} (expected R or W)", line_no)
        try:
            address = int(addr_tok, 16)
        except ValueError:
            raise TraceError(f"bad address token {addr_tok!r}", line_no) from None
        try:
            requests.append(MemRequest(nonmem=nonmem, op=_OPS[op_tok], address=address))
        except ValueError as exc:
            raise TraceError(str(exc), line_no) from None
    return Trace(requests=requests, name=name, generator=generator, params=params)


def parse_file(path) -> Trace:
    with open(path, encoding="utf-8") as handle:
        trace = parse(handle, name=str(path))
    return trace


def render(trace: Trace) -> str:
    """Text form of a trace; parse(render(t)) reproduces the requests."""
    out = []
    if trace.generator:
        kv = " ".join(f"{k}={v}" for k, v in trace.params.items())
        out.append(f"# generator: {trace.generator}{' ' + kv if kv else ''}")
    for req in trace.requests:
        out.append(f"{req.nonmem} {_OPS_REV[req.op]} {req.address:#x}")
    return "\n".join(out) + "\n"


def write_file(trace: Trace, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(render(trace))


def _parse_kv(tokens: list[str]) -> dict:
    params = {}
    for tok in tokens:
        if "=" in tok:
            key, value = tok.split("=", 1)
            params[key] = value
    return params


def gen_sbdr(pairs: int, bank: int, row_a: int, row_b: int,
             mapping: AddressMapping) -> Trace:
    """Same-bank different-row read loop: 2*pairs reads alternating rows.

    Every access conflicts with the previous one, so under an open page
    policy the stream is a back-to-back miss generator.
    """
    if row_a == row_b:
        raise ValueError("SBDR rows must differ")
    if pairs < 1:
        raise ValueError(f"pairs must be >= 1, got {pairs}")
    requests = []
    for _ in range(pairs):
        for row in (row_a, row_b):
            addr = mapping.encode_flat(bank, row)
            requests.append(MemRequest(nonmem=0, op="read", address=addr))
    return Trace(requests=requests, name=f"sbdr-{pairs}p",
                 generator="sbdr",
                 params=dict(pairs=pairs, bank=bank, row_a=row_a, row_b=row_b))


def gen_mixed(n: int, miss_ratio: float, banks: int, seed: int,
              mapping: AddressMapping) -> Trace:
    """Synthetic read stream with a controlled row-conflict fraction.

    With probability miss_ratio a request targets the previously used
    bank with a fresh row (a guaranteed conflict while that row is
    open); otherwise it repeats the last row of a uniformly chosen bank.
    Deterministic for a given seed.
    """
    if not 0.0 <= miss_ratio <= 1.0:
        raise ValueError(f"miss_ratio must be in [0, 1], got {miss_ratio}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 1 <= banks <= mapping.total_banks:
        raise ValueError(
            f"banks must be in [1, {mapping.total_banks}], got {banks}")
    rng = random.Random(seed)
    rows = mapping.rows
    last_row = {b: 0 for b in range(banks)}
    current_bank = rng.randrange(banks)
    requests = []
    for _ in range(n):
        if rng.random() < miss_ratio:
            bank = current_bank
            row = rng.randrange(rows - 1)
            if row >= last_row[bank]:
                row += 1  # uniform over rows != last_row
            last_row[bank] = row
        else:
            bank = rng.randrange(banks)
            row = last_row[bank]
        current_bank = bank
        addr = mapping.encode_flat(bank, row)
        requests.append(MemRequest(nonmem=0, op="read", address=addr))
    return Trace(requests=requests, name=f"mixed-{miss_ratio:g}",
                 generator="mixed",
                 params=dict(n=n, miss_ratio=miss_ratio, banks=banks, seed=seed))

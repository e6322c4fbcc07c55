"""Render pracsim CSV outputs as charts.

Three figure kinds, one per CSV schema the simulator CLI emits:

  sweep            param,value_ns,period_ns_simulated,period_ns_oracle
                   -> simulated-vs-model line chart
  overhead_bars    trace,oh_frac,rbmpki_default (+ extras ignored)
                   -> per-trace overhead bars, colored by RBMPKI tercile
  policy_breakdown policy,hit_ratio,empty_ratio,miss_ratio,cycles_norm_open
                   -> stacked access-class bars with normalized-cycle markers

This tool only reads CSV; it never runs the simulator.  Rendering is
deterministic: same input bytes, same output bytes.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

KINDS = ("sweep", "overhead_bars", "policy_breakdown")

REQUIRED_COLUMNS = {
    "sweep": ("param", "value_ns", "period_ns_simulated", "period_ns_oracle"),
    "overhead_bars": ("trace", "oh_frac", "rbmpki_default"),
    "policy_breakdown": ("policy", "hit_ratio", "empty_ratio", "miss_ratio",
                         "cycles_norm_open"),
}

FIGSIZE = (7.0, 4.0)
DPI = 120


class SchemaError(ValueError):
    """The CSV lacks columns the figure kind requires."""


class DataError(ValueError):
    """The CSV parses but its values are inconsistent."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    kind: str
    output_path: str
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r} (known: {', '.join(KINDS)})")


def load_rows(spec: FigureSpec) -> list[dict[str, str]]:
    with open(spec.input_csv, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        columns = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS[spec.kind] if c not in columns]
        if missing:
            raise SchemaError(
                f"{spec.input_csv}: missing columns for {spec.kind}: {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise DataError(f"{spec.input_csv}: no data rows")
    return rows


def _fnum(row: dict[str, str], column: str) -> float:
    try:
        return float(row[column])
    except ValueError:
        raise DataError(f"non-numeric {column}: {row[column]!r}") from None


def render(spec: FigureSpec) -> str:
    """Render the figure and return the written path."""
    rows = load_rows(spec)
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    try:
        if spec.kind == "sweep":
            _render_sweep(ax, rows, spec)
        elif spec.kind == "overhead_bars":
            _render_overhead(ax, rows, spec)
        else:
            _render_policy(ax, rows, spec)
        fig.tight_layout()
        fig.savefig(spec.output_path, metadata={"Software": "pracfigs"})
    finally:
        plt.close(fig)
    return spec.output_path


def _render_sweep(ax, rows, spec):
    xs = [_fnum(r, "value_ns") for r in rows]
    sim = [_fnum(r, "period_ns_simulated") for r in rows]
    oracle = [_fnum(r, "period_ns_oracle") for r in rows]
    ax.plot(xs, sim, marker="o", label="simulated")
    ax.plot(xs, oracle, marker="x", linestyle="--", label="model")
    ax.set_xlabel(f"{rows[0]['param']} (ns)")
    ax.set_ylabel("per-access period (ns)")
    ax.set_title(spec.title or "SBDR period vs timing parameter")
    ax.legend()
    ax.grid(True, alpha=0.3)


def _tercile_colors(values: list[float]) -> list[str]:
    ranked = sorted(range(len(values)), key=lambda i: values[i])
    colors = [""] * len(values)
    third = max(1, len(values) // 3)
    palette = ("#4c72b0", "#dd8452", "#c44e52")  # low, mid, high
    for pos, idx in enumerate(ranked):
        colors[idx] = palette[min(pos // third, 2)]
    return colors


def _render_overhead(ax, rows, spec):
    ordered = sorted(rows, key=lambda r: _fnum(r, "rbmpki_default"))
    labels = [r["trace"].rsplit("/", 1)[-1] for r in ordered]
    ohs = [100 * _fnum(r, "oh_frac") for r in ordered]
    colors = _tercile_colors([_fnum(r, "rbmpki_default") for r in ordered])
    ax.bar(range(len(ordered)), ohs, color=colors)
    ax.set_xticks(range(len(ordered)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("overhead (%)")
    ax.set_title(spec.title or "PRAC overhead by trace (sorted by RBMPKI)")
    ax.grid(True, axis="y", alpha=0.3)


def _render_policy(ax, rows, spec):
    for row in rows:
        total = sum(_fnum(row, c) for c in ("hit_ratio", "empty_ratio", "miss_ratio"))
        if not 0.999 <= total <= 1.001:
            raise DataError(
                f"policy {row['policy']!r}: hit+empty+miss = {total:.6f}, expected 1")
    labels = [r["policy"] for r in rows]
    hits = [_fnum(r, "hit_ratio") for r in rows]
    empties = [_fnum(r, "empty_ratio") for r in rows]
    misses = [_fnum(r, "miss_ratio") for r in rows]
    xs = range(len(rows))
    ax.bar(xs, hits, label="hit", color="#55a868")
    ax.bar(xs, empties, bottom=hits, label="empty", color="#4c72b0")
    bottoms = [h + e for h, e in zip(hits, empties)]
    ax.bar(xs, misses, bottom=bottoms, label="miss", color="#c44e52")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_ylabel("access-class ratio")
    ax.set_ylim(0, 1.15)
    twin = ax.twinx()
    twin.plot(list(xs), [_fnum(r, "cycles_norm_open") for r in rows],
              marker="D", color="black", linestyle="none", label="cycles / open")
    twin.set_ylabel("total cycles normalized to open")
    ax.set_title(spec.title or "Access breakdown and relative cycles by policy")
    handles, names = ax.get_legend_handles_labels()
    h2, n2 = twin.get_legend_handles_labels()
    ax.legend(handles + h2, names + n2, loc="upper left", fontsize=8)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figures", description="Render pracsim CSV outputs as charts")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("input_csv")
    parser.add_argument("output_image")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    spec = FigureSpec(input_csv=args.input_csv, kind=args.kind,
                      output_path=args.output_image, title=args.title)
    try:
        render(spec)
    except (SchemaError, DataError) as exc:
        print(f"render_figures: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"render_figures: {exc.filename or ''}: {exc.strerror}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""
CSV emission. Floats carry 17 significant digits so every value parses back
to the identical double; lines end in LF only.
"""
import logging
from typing import Dict, Iterable, List, Sequence, Tuple

import aiofiles

from ETGossip.harness.metrics import (
    CSV_HEADER,
    METRICS,
    SUMMARY_HEADER,
    AggregateRow,
    MetricsRow,
    RepSummary,
    sort_rows,
)


def format_value(value) -> str:
    if isinstance(value, (bool, int)):
        return str(int(value))
    return format(float(value), ".17g")


def format_row(values: Sequence) -> str:
    return ",".join(format_value(v) for v in values)


async def write_lines(path: str, lines: Iterable[str]) -> None:
    async with aiofiles.open(path, mode="w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            await handle.write(line + "\n")


async def emit_csv(rows: Iterable[MetricsRow], path: str) -> None:
    ordered = sort_rows(rows)
    await write_lines(path, [CSV_HEADER] + [format_row(r.values()) for r in ordered])
    logging.info(f"Wrote {len(ordered)} metric rows to {path}")


def read_csv(path: str) -> List[MetricsRow]:
    with open(path, encoding="utf-8", newline="") as handle:
        lines = handle.read().split("\n")
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header {lines[0] if lines else ''!r}")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        rep, t, cum, *rest = line.split(",")
        rows.append(MetricsRow(int(rep), int(t), int(cum), *(float(v) for v in rest)))
    return rows


async def emit_summary_csv(reps: Sequence[RepSummary], totals: Dict[str, Tuple[float, float]], path: str) -> None:
    lines = [SUMMARY_HEADER]
    for r in sorted(reps, key=lambda r: r.rep):
        lines.append(format_row((r.rep, r.total_transmissions, r.final_f_avg, r.ergodic_grad_mean, r.bound_rhs)))
    columns = ("total_transmissions", "final_f_avg", "ergodic_grad_mean", "bound_rhs")
    for label, slot in (("mean", 0), ("std", 1)):
        lines.append(label + "," + ",".join(format(totals[c][slot], ".17g") for c in columns))
    await write_lines(path, lines)


async def emit_aggregate_csv(aggregates: Sequence[AggregateRow], path: str) -> None:
    header = "t,reps," + ",".join(f"{m}_mean,{m}_std" for m in METRICS)
    lines = [header]
    for agg in aggregates:
        values = [agg.t, agg.reps]
        for m in METRICS:
            values.extend((float(agg.mean[m]), float(agg.std[m])))
        lines.append(format_row(values))
    await write_lines(path, lines)


async def emit_text(text: str, path: str) -> None:
    async with aiofiles.open(path, mode="w", encoding="utf-8", newline="\n") as handle:
        await handle.write(text)

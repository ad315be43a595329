"""
Parameter sweeps: one experiment per value of a single config key.

Every point keeps the base seed, so points differ only through the swept key
and share their gradient noise streams.
"""
import asyncio
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ETGossip.config import KEYS, UNSWEEPABLE, ExperimentConfig, with_value
from ETGossip.exceptions import ConfigError
from ETGossip.harness.runner import ExperimentResult, run_experiment_async
from ETGossip.harness.sink import write_lines, emit_summary_csv, format_value

SUMMARY_COLUMNS = ("total_transmissions", "final_f_avg", "ergodic_grad_mean", "bound_rhs")


@dataclass
class SweepPoint:
    value: str
    result: ExperimentResult


def sweep_configs(cfg: ExperimentConfig, key: str, values: Sequence[str]) -> List[Tuple[str, ExperimentConfig]]:
    """
    Derive one config per raw value of key.

    :raises ConfigError: listing the problems of every bad point at once
    """
    if not values:
        raise ConfigError(["sweep.values: need at least one value"])
    points, problems = [], []
    for raw in values:
        try:
            points.append((raw, with_value(cfg, key, raw)))
        except ConfigError as e:
            problems.extend(f"{p} (sweep value {raw!r})" for p in e.problems)
    if problems:
        raise ConfigError(problems)
    return points


def sweep_target(cfg: ExperimentConfig, key: Optional[str], values: Optional[Sequence[str]]) -> Tuple[str, Sequence[str]]:
    key = key if key is not None else cfg.sweep_key
    values = values if values is not None else cfg.sweep_values
    if key is None or values is None:
        raise ConfigError(["sweep.key: a sweep needs sweep.key and sweep.values (or --key and --values)"])
    if key not in KEYS or key in UNSWEEPABLE:
        raise ConfigError([f"sweep.key: cannot sweep {key!r}"])
    return key, values


async def run_sweep_async(
    cfg: ExperimentConfig,
    key: Optional[str] = None,
    values: Optional[Sequence[str]] = None,
) -> List[SweepPoint]:
    key, values = sweep_target(cfg, key, values)
    points = []
    for index, (raw, point_cfg) in enumerate(sweep_configs(cfg, key, values)):
        logging.info(f"Sweep {key}={raw} ({index + 1}/{len(values)})")
        points.append(SweepPoint(value=raw, result=await run_experiment_async(point_cfg)))
    return points


def run_sweep(cfg: ExperimentConfig, key: Optional[str] = None, values: Optional[Sequence[str]] = None) -> List[SweepPoint]:
    return asyncio.run(run_sweep_async(cfg, key, values))


def sweep_header(key: str) -> str:
    stats = ",".join(f"{c}_mean,{c}_std" for c in SUMMARY_COLUMNS)
    return f"{key},edges,eta,{stats}"


async def emit_sweep_csv(points: Sequence[SweepPoint], key: str, path: str) -> None:
    lines = [sweep_header(key)]
    for point in points:
        result = point.result
        values = [result.setup.graph.edge_count, result.eta]
        for column in SUMMARY_COLUMNS:
            values.extend(result.totals[column])
        lines.append(point.value + "," + ",".join(format_value(v) for v in values))
    await write_lines(path, lines)
    logging.info(f"Wrote {len(points)} sweep rows to {path}")


def sweep_paths(path: str, count: int) -> Dict[str, object]:
    base = Path(path)
    stem = base.with_suffix("")
    return {
        "sweep": str(base.with_suffix(".sweep.csv")),
        "summaries": [f"{stem}.{index}.summary.csv" for index in range(count)],
    }


async def write_sweep(points: Sequence[SweepPoint], key: str, path: str) -> Dict[str, object]:
    paths = sweep_paths(path, len(points))
    await asyncio.gather(
        emit_sweep_csv(points, key, paths["sweep"]),
        *[
            emit_summary_csv(point.result.reps, point.result.totals, summary)
            for point, summary in zip(points, paths["summaries"])
        ],
    )
    return paths

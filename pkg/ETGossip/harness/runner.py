import asyncio
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ETGossip.config import ExperimentConfig, Run
from ETGossip.harness.builders import RunSetup, prepare
from ETGossip.harness.metrics import (
    AggregateRow,
    MetricsRow,
    RepSummary,
    monte_carlo_summary,
    sort_rows,
    summarize_rep,
    summarize_reps,
)
from ETGossip.harness.sink import emit_aggregate_csv, emit_csv, emit_summary_csv, emit_text
from ETGossip.network.serialize import dump_topology
from ETGossip.protocol.dynamics import average_iterate, stack_models
from ETGossip.protocol.engine import run_round
from ETGossip.protocol.node import init_states
from ETGossip.utils.rng import StreamFactory
from ETGossip.utils.time_format import readable_duration


@dataclass
class RepResult:
    rows: List[MetricsRow]
    summary: RepSummary


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    setup: RunSetup
    rows: List[MetricsRow]
    reps: List[RepSummary]
    aggregates: List[AggregateRow]
    totals: Dict[str, Tuple[float, float]]

    @property
    def eta(self) -> float:
        return self.setup.eta

    def total_transmissions(self) -> List[int]:
        return [r.total_transmissions for r in self.reps]


def run_single(cfg: ExperimentConfig, setup: RunSetup, rep: int) -> RepResult:
    """One independent repetition; rep r draws from seed material (seed, r)"""
    rng = StreamFactory(cfg.seed, rep)
    states = init_states(setup.x0, setup.mixing)
    x0_norm = setup.x0_norm
    cumulative = 0
    rows: List[MetricsRow] = []
    for t in range(cfg.rounds):
        states, trace = run_round(states, setup.mixing, setup.policy, setup.suite, setup.eta, t, rng, x0_norm)
        cumulative += trace.transmissions
        rows.append(
            MetricsRow(
                rep=rep,
                t=t,
                transmissions_cum=cumulative,
                M_t=trace.consensus_energy,
                grad_norm_sq=trace.grad_norm_sq,
                ebar_norm=trace.ebar_norm,
                tau_t=trace.tau_t,
                f_avg=trace.f_avg,
            )
        )
        if (t + 1) % Run.PROGRESS_EVERY == 0:
            logging.info(f"Progress rep {rep}: round {t + 1}/{cfg.rounds}, transmissions {cumulative}")
    final_f = setup.suite.global_loss(average_iterate(stack_models(states)))
    return RepResult(rows=rows, summary=summarize_rep(rep, rows, final_f, setup.bound_rhs))


async def run_experiment_async(cfg: ExperimentConfig, setup: Optional[RunSetup] = None) -> ExperimentResult:
    setup = setup or prepare(cfg)
    start = time.time()
    results = await asyncio.gather(
        *[asyncio.to_thread(run_single, cfg, setup, rep) for rep in range(cfg.reps)]
    )
    rows = sort_rows(row for result in results for row in result.rows)
    reps = sorted((result.summary for result in results), key=lambda r: r.rep)
    logging.info(f"Finished {cfg.reps} repetition(s) of {cfg.rounds} rounds in {readable_duration(time.time() - start)}")
    return ExperimentResult(
        config=cfg,
        setup=setup,
        rows=rows,
        reps=reps,
        aggregates=monte_carlo_summary(rows),
        totals=summarize_reps(reps),
    )


def run_experiment(cfg: ExperimentConfig, setup: Optional[RunSetup] = None) -> ExperimentResult:
    """Run all repetitions of cfg; deterministic end to end"""
    return asyncio.run(run_experiment_async(cfg, setup))


def output_paths(path: str) -> Dict[str, str]:
    base = Path(path)
    return {
        "metrics": str(base),
        "summary": str(base.with_suffix(".summary.csv")),
        "aggregates": str(base.with_suffix(".mc.csv")),
        "topology": str(base.with_suffix(".topology.txt")),
    }


async def write_outputs(result: ExperimentResult, path: Optional[str] = None) -> Dict[str, str]:
    paths = output_paths(path or result.config.output)
    await asyncio.gather(
        emit_csv(result.rows, paths["metrics"]),
        emit_summary_csv(result.reps, result.totals, paths["summary"]),
        emit_aggregate_csv(result.aggregates, paths["aggregates"]),
        emit_text(dump_topology(result.setup.graph, result.setup.mixing), paths["topology"]),
    )
    return paths

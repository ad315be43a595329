import sys
import time
import asyncio
import logging
import argparse
import dataclasses
import logging.handlers as handlers
from typing import List, Optional

import orjson

from ETGossip import StartTime, __version__
from ETGossip.config import Output, apply_overrides, load_config
from ETGossip.exceptions import AssumptionViolation, BoundInapplicable
from ETGossip.harness.builders import prepare
from ETGossip.harness.runner import run_experiment_async, write_outputs
from ETGossip.harness.sweep import run_sweep_async, sweep_target, write_sweep
from ETGossip.network.mixing import metropolis_mixing, validate_mixing
from ETGossip.network.topology import generate_topology, realized_sparsity
from ETGossip.utils.guards import cli_guard, timed
from ETGossip.utils.time_format import readable_duration
from ETGossip.utils.theory import (
    StepCase,
    bound_terms,
    case_constants,
    case_rate_bound,
    case_stepsize,
    eta_max,
    stability_constants,
)


class ProgressFilter(logging.Filter):
    """Drop per-round progress lines unless debugging"""
    def __init__(self, debug: bool):
        super().__init__()
        self.debug = debug

    def filter(self, record):
        if not self.debug and record.getMessage().startswith("Progress "):
            return False
        return True


def setup_logging(debug: bool, log_file: str) -> None:
    log_handlers: List[logging.Handler] = [logging.StreamHandler(stream=sys.stderr)]
    if log_file:
        log_handlers.append(
            handlers.RotatingFileHandler(
                log_file, mode="a", maxBytes=Output.LOG_MAX_BYTES, backupCount=Output.LOG_BACKUPS, encoding="utf-8"
            )
        )
    for handler in log_handlers:
        handler.addFilter(ProgressFilter(debug))
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        datefmt="%d/%m/%Y %H:%M:%S",
        format="[%(asctime)s] {%(pathname)s:%(lineno)d} %(levelname)s - %(message)s",
        handlers=log_handlers,
        force=True,
    )
    logging.getLogger("asyncio").setLevel(logging.WARNING)


def use_uvloop() -> None:
    try:
        import uvloop
        asyncio.set_event_loop_policy(uvloop.EventLoopPolicy())
        logging.debug("Using uvloop event loop")
    except ImportError:
        logging.debug("uvloop not available, using standard event loop")


def emit_json(payload) -> None:
    sys.stdout.write(orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY).decode() + "\n")


#---------------------[ SUBCOMMANDS ]---------------------#

@cli_guard
@timed
def run_command(args: argparse.Namespace) -> None:
    cfg = apply_overrides(load_config(args.config), out=args.out, seed=args.seed, reps=args.reps)

    async def execute():
        result = await run_experiment_async(cfg)
        paths = await write_outputs(result)
        return result, paths

    result, paths = asyncio.run(execute())
    emit_json({
        "eta": result.eta,
        "edges": result.setup.graph.edge_count,
        "delta": result.setup.mixing.delta,
        "transmissions_per_rep": result.total_transmissions(),
        "summary": {name: {"mean": m, "std": s} for name, (m, s) in result.totals.items()},
        "outputs": paths,
        "elapsed": readable_duration(time.time() - StartTime),
    })


@cli_guard
@timed
def sweep_command(args: argparse.Namespace) -> None:
    cfg = apply_overrides(load_config(args.config), out=args.out, seed=args.seed, reps=args.reps)
    values = None if args.values is None else [v.strip() for v in args.values.split(",") if v.strip()]
    key, values = sweep_target(cfg, args.key, values)

    async def execute():
        points = await run_sweep_async(cfg, key, values)
        paths = await write_sweep(points, key, cfg.output)
        return points, paths

    points, paths = asyncio.run(execute())
    emit_json({
        "key": key,
        "points": [
            {
                "value": point.value,
                "eta": point.result.eta,
                "edges": point.result.setup.graph.edge_count,
                "summary": {name: {"mean": m, "std": s} for name, (m, s) in point.result.totals.items()},
            }
            for point in points
        ],
        "outputs": paths,
        "elapsed": readable_duration(time.time() - StartTime),
    })


@cli_guard
def validate_command(args: argparse.Namespace) -> None:
    cfg = load_config(args.config)
    graph = generate_topology(cfg.n, cfg.sparsity, cfg.seed, edge_count=cfg.edge_count)
    mixing = metropolis_mixing(graph)
    report = validate_mixing(mixing, graph)
    emit_json({
        "config": cfg.as_dict(),
        "edges": graph.edge_count,
        "realized_sparsity": realized_sparsity(graph),
        "delta": mixing.delta,
        "checks": report.as_dict(),
    })
    if not report.ok:
        worst = max(report.failures(), key=lambda c: c.magnitude)
        raise AssumptionViolation(f"Mixing matrix failed {[c.name for c in report.failures()]}", value=worst.magnitude)


@cli_guard
def bound_command(args: argparse.Namespace) -> None:
    cfg = load_config(args.config)
    setup = prepare(cfg)
    c = setup.constants
    if c is None:
        raise BoundInapplicable("Bound constants are certified for objective.kind=quadratic only")
    stability = stability_constants(c)
    payload = {
        "constants": dataclasses.asdict(c),
        "gamma": stability.gamma,
        "delta_cap": stability.delta_cap,
        "eta_max": eta_max(c.lips, c.delta, c.n),
        "terms": dataclasses.asdict(bound_terms(c, setup.taus, cfg.rounds)),
        "rhs": setup.bound_rhs,
        "cases": {},
    }
    reference = c.with_eta(payload["eta_max"] / 2.0)
    for case in StepCase:
        k = case_constants(case, reference, cfg.rounds, setup.taus)
        payload["cases"][case.value] = {
            "constants": {key: value for key, value in dataclasses.asdict(k).items() if key != "case"},
            "eta": case_stepsize(case, reference, cfg.rounds, setup.taus),
            "rate_bound": case_rate_bound(case, reference, cfg.rounds, setup.taus),
        }
    emit_json(payload)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="etgossip", description="Event-triggered gossip SGD simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--debug", action="store_true", help="Verbose logging, including per-round progress")
    parser.add_argument("--log-file", default=Output.LOG_FILE, help="Rotating log file ('' disables it)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run an experiment and write CSV outputs")
    run.add_argument("--config", required=True)
    run.add_argument("--out")
    run.add_argument("--seed", type=int)
    run.add_argument("--reps", type=int)
    run.set_defaults(handler=run_command)

    sweep = sub.add_parser("sweep", help="Run one experiment per value of a config key")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--key", help="Config key to sweep (overrides sweep.key)")
    sweep.add_argument("--values", help="Comma-separated values (overrides sweep.values)")
    sweep.add_argument("--out")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--reps", type=int)
    sweep.set_defaults(handler=sweep_command)

    validate = sub.add_parser("validate", help="Check a config and its mixing matrix")
    validate.add_argument("--config", required=True)
    validate.set_defaults(handler=validate_command)

    bound = sub.add_parser("bound", help="Print convergence-bound constants and the bound value")
    bound.add_argument("--config", required=True)
    bound.set_defaults(handler=bound_command)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.debug, args.log_file)
    use_uvloop()
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())

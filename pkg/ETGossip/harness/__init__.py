from .metrics import MetricsRow, RepSummary, AggregateRow, monte_carlo_summary
from .builders import RunSetup, prepare, build_policy, build_suite
from .runner import ExperimentResult, run_experiment, run_experiment_async, run_single, write_outputs
from .sink import emit_csv, read_csv
from .sweep import SweepPoint, run_sweep, run_sweep_async, sweep_configs, write_sweep

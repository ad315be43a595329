from dataclasses import dataclass, replace
from io import StringIO
from typing import Any, Callable, Dict, List, Optional, Tuple

from dotenv.parser import parse_stream

from ETGossip.exceptions import ConfigError


class Run:
    SPARSITY = 0.3
    SEED = 0
    REPS = 1
    PROGRESS_EVERY = 500  # rounds between progress lines


class Policy:
    TAU0 = 0.0
    EPSILON = 0.0
    SCHEDULES = ("zero", "constant", "sqrt_decay", "linear_decay", "relative")
    SCHEDULE_KINDS = SCHEDULES + ("full", "event_triggered")
    OTHER_KINDS = ("periodic", "probabilistic", "variable_working")


class Objective:
    KIND = "quadratic"
    SPREAD = 1.0
    ALPHA = 0.1
    LAMBDA = 0.01
    SAMPLES = 32
    SKEW = 0.9
    INIT_SCALE = 1.0


class Output:
    PATH = "metrics.csv"
    LOG_FILE = "etgossip.log"
    LOG_MAX_BYTES = 104857600
    LOG_BACKUPS = 5


_REQUIRED = object()


def _split_values(text: str) -> Tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


# key -> (attribute, converter, default)
KEYS: Dict[str, Tuple[str, Callable[[str], Any], Any]] = {
    "n": ("n", int, _REQUIRED),
    "d": ("d", int, _REQUIRED),
    "T": ("rounds", int, _REQUIRED),
    "sparsity": ("sparsity", float, Run.SPARSITY),
    "edge_count": ("edge_count", int, None),
    "seed": ("seed", int, Run.SEED),
    "reps": ("reps", int, Run.REPS),
    "eta": ("eta", float, None),
    "case": ("case", lambda v: v.strip().upper(), None),
    "policy.kind": ("policy_kind", lambda v: v.strip().lower(), _REQUIRED),
    "policy.schedule": ("schedule", lambda v: v.strip().lower(), None),
    "policy.tau0": ("tau0", float, Policy.TAU0),
    "policy.epsilon": ("epsilon", float, Policy.EPSILON),
    "policy.kp": ("kp", int, None),
    "policy.p_link": ("p_link", float, None),
    "policy.p_k": ("p_k", float, None),
    "objective.kind": ("objective_kind", lambda v: v.strip().lower(), Objective.KIND),
    "objective.spread": ("spread", float, Objective.SPREAD),
    "objective.alpha": ("alpha", float, Objective.ALPHA),
    "objective.lambda": ("lam", float, Objective.LAMBDA),
    "objective.samples": ("samples", int, Objective.SAMPLES),
    "objective.skew": ("skew", float, Objective.SKEW),
    "init.scale": ("init_scale", float, Objective.INIT_SCALE),
    "output": ("output", str, Output.PATH),
    "sweep.key": ("sweep_key", str.strip, None),
    "sweep.values": ("sweep_values", _split_values, None),
}

UNSWEEPABLE = ("output", "reps", "seed", "sweep.key", "sweep.values")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    d: int
    rounds: int
    policy_kind: str
    schedule: Optional[str] = None
    sparsity: float = Run.SPARSITY
    edge_count: Optional[int] = None
    seed: int = Run.SEED
    reps: int = Run.REPS
    eta: Optional[float] = None
    case: Optional[str] = None
    tau0: float = Policy.TAU0
    epsilon: float = Policy.EPSILON
    kp: Optional[int] = None
    p_link: Optional[float] = None
    p_k: Optional[float] = None
    objective_kind: str = Objective.KIND
    spread: float = Objective.SPREAD
    alpha: float = Objective.ALPHA
    lam: float = Objective.LAMBDA
    samples: int = Objective.SAMPLES
    skew: float = Objective.SKEW
    init_scale: float = Objective.INIT_SCALE
    output: str = Output.PATH
    sweep_key: Optional[str] = None
    sweep_values: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        problems = check_config(self)
        if problems:
            raise ConfigError(problems)

    def as_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, attr) for key, (attr, _, _) in KEYS.items()}

    @property
    def schedule_name(self) -> Optional[str]:
        """Threshold schedule of an event-triggered scheme, None for the other schemes"""
        kind = self.policy_kind
        if kind in ("zero", "full"):
            return "zero"
        if kind in Policy.SCHEDULES:
            return kind
        if kind != "event_triggered":
            return None
        if self.schedule is not None:
            return self.schedule
        if self.epsilon > 0:
            return "relative"
        return "constant" if self.tau0 > 0 else "zero"


def check_config(cfg: ExperimentConfig) -> List[str]:
    """Every consistency problem of a config, keyed by the offending config key"""
    problems: List[str] = []
    if cfg.n < 2:
        problems.append(f"n: need at least 2 nodes, got {cfg.n}")
    if cfg.d < 1:
        problems.append(f"d: need at least 1 dimension, got {cfg.d}")
    if cfg.rounds < 1:
        problems.append(f"T: need at least 1 round, got {cfg.rounds}")
    if cfg.reps < 1:
        problems.append(f"reps: need at least 1 repetition, got {cfg.reps}")
    if cfg.seed < 0:
        problems.append(f"seed: must be nonnegative, got {cfg.seed}")
    if not 0.0 <= cfg.sparsity < 1.0:
        problems.append(f"sparsity: must lie in [0, 1), got {cfg.sparsity}")

    if cfg.eta is None and cfg.case is None:
        problems.append("eta: one of eta or case is required")
    elif cfg.eta is not None and cfg.case is not None:
        problems.append("case: give either eta or case, not both")
    elif cfg.eta is not None and cfg.eta <= 0:
        problems.append(f"eta: must be positive, got {cfg.eta}")
    elif cfg.case is not None and cfg.case not in ("A", "B", "C"):
        problems.append(f"case: must be A, B or C, got {cfg.case}")
    if cfg.case is not None and cfg.objective_kind != "quadratic":
        problems.append("case: prescribed stepsizes need objective.kind=quadratic")

    kind = cfg.policy_kind
    if kind not in Policy.SCHEDULE_KINDS + Policy.OTHER_KINDS:
        problems.append(f"policy.kind: unknown scheme {kind!r}")
    if cfg.schedule is not None:
        if kind != "event_triggered":
            problems.append("policy.schedule: only read with policy.kind=event_triggered")
        elif cfg.schedule not in Policy.SCHEDULES:
            problems.append(f"policy.schedule: unknown schedule {cfg.schedule!r}")
    if cfg.tau0 < 0:
        problems.append(f"policy.tau0: must be nonnegative, got {cfg.tau0}")
    if cfg.epsilon < 0:
        problems.append(f"policy.epsilon: must be nonnegative, got {cfg.epsilon}")
    if kind == "periodic" and (cfg.kp is None or cfg.kp < 1):
        problems.append("policy.kp: periodic scheme needs a positive integer period")
    if kind == "probabilistic" and (cfg.p_link is None or not 0.0 <= cfg.p_link <= 1.0):
        problems.append("policy.p_link: probabilistic scheme needs a link probability in [0, 1]")
    if kind == "variable_working" and (cfg.p_k is None or not 0.0 <= cfg.p_k <= 1.0):
        problems.append("policy.p_k: variable_working scheme needs an activation probability in [0, 1]")

    if cfg.objective_kind not in ("quadratic", "logistic"):
        problems.append(f"objective.kind: unknown suite {cfg.objective_kind!r}")
    if cfg.alpha < 0:
        problems.append(f"objective.alpha: must be nonnegative, got {cfg.alpha}")
    if cfg.spread < 0:
        problems.append(f"objective.spread: must be nonnegative, got {cfg.spread}")
    if cfg.samples < 1:
        problems.append(f"objective.samples: need at least 1 sample, got {cfg.samples}")
    if not 0.0 <= cfg.skew <= 1.0:
        problems.append(f"objective.skew: must lie in [0, 1], got {cfg.skew}")

    if (cfg.sweep_key is None) != (cfg.sweep_values is None):
        problems.append("sweep.key: sweep.key and sweep.values go together")
    if cfg.sweep_key is not None and (cfg.sweep_key not in KEYS or cfg.sweep_key in UNSWEEPABLE):
        problems.append(f"sweep.key: cannot sweep {cfg.sweep_key!r}")
    if cfg.sweep_values is not None and not cfg.sweep_values:
        problems.append("sweep.values: need at least one value")
    return problems


def with_value(cfg: ExperimentConfig, key: str, raw: str) -> ExperimentConfig:
    """
    Copy of cfg with one key set from its raw text, converted and validated as in a file.

    :raises ConfigError: unknown key, unconvertible value or an inconsistent result
    """
    if key not in KEYS:
        raise ConfigError([f"{key}: unknown key"])
    attr, convert, _ = KEYS[key]
    try:
        value = convert(raw)
    except ValueError:
        raise ConfigError([f"{key}: cannot convert {raw!r} to {getattr(convert, '__name__', 'value')}"])
    return replace(cfg, **{attr: value})


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse flat key=value text (# comments, dotted keys) into a validated config.

    Raises ConfigError listing every bad line and key at once.
    """
    problems: List[str] = []
    raw: Dict[str, str] = {}
    for binding in parse_stream(StringIO(text)):
        line = binding.original.line
        if binding.key is None:
            if binding.error:
                problems.append(f"line {line}: cannot parse {binding.original.string.strip()!r}")
            continue
        key = binding.key
        if key not in KEYS:
            problems.append(f"{key}: unknown key (line {line})")
        elif key in raw:
            problems.append(f"{key}: duplicate key (line {line})")
        elif binding.value is None or binding.value == "":
            problems.append(f"{key}: missing value (line {line})")
        else:
            raw[key] = binding.value

    values: Dict[str, Any] = {}
    for key, (attr, convert, default) in KEYS.items():
        if key not in raw:
            if default is _REQUIRED:
                problems.append(f"{key}: required key missing")
            elif default is not None:
                values[attr] = default
            continue
        try:
            values[attr] = convert(raw[key])
        except ValueError:
            problems.append(f"{key}: cannot convert {raw[key]!r} to {getattr(convert, '__name__', 'value')}")

    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(**values)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigError([f"config: cannot read {path}: {e.strerror}"])
    return parse_config(text)


def apply_overrides(cfg: ExperimentConfig, out: Optional[str] = None, seed: Optional[int] = None, reps: Optional[int] = None) -> ExperimentConfig:
    changes: Dict[str, Any] = {}
    if out is not None:
        changes["output"] = out
    if seed is not None:
        changes["seed"] = seed
    if reps is not None:
        changes["reps"] = reps
    return replace(cfg, **changes) if changes else cfg

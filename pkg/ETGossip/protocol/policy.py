import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np

from ETGossip.exceptions import DimensionMismatch, PolicyError


class ScheduleKind(str, Enum):
    ZERO = "zero"
    CONSTANT = "constant"
    SQRT_DECAY = "sqrt_decay"
    LINEAR_DECAY = "linear_decay"
    RELATIVE = "relative"


class PolicyKind(str, Enum):
    EVENT_TRIGGERED = "event_triggered"
    PERIODIC = "periodic"
    PROBABILISTIC = "probabilistic"
    VARIABLE_WORKING = "variable_working"


@dataclass(frozen=True)
class ThresholdSchedule:
    """
    Trigger threshold tau_t.

    zero: 0; constant: tau0; sqrt_decay: tau0 / sqrt(t + 1);
    linear_decay: tau0 / (t + 1); relative: epsilon * ||x_0||.
    """
    kind: ScheduleKind = ScheduleKind.ZERO
    tau0: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        if self.tau0 < 0 or self.epsilon < 0:
            raise PolicyError(f"Threshold parameters must be nonnegative (tau0={self.tau0}, epsilon={self.epsilon})")


def threshold_at(s: ThresholdSchedule, t: int, x0_norm: float = 0.0) -> float:
    if t < 0:
        raise PolicyError(f"Round index must be nonnegative, got {t}")
    if s.kind is ScheduleKind.ZERO:
        return 0.0
    if s.kind is ScheduleKind.CONSTANT:
        return s.tau0
    if s.kind is ScheduleKind.SQRT_DECAY:
        return s.tau0 / math.sqrt(t + 1)
    if s.kind is ScheduleKind.LINEAR_DECAY:
        return s.tau0 / (t + 1)
    return s.epsilon * x0_norm


def threshold_sequence(s: ThresholdSchedule, rounds: int, x0_norm: float = 0.0) -> List[float]:
    return [threshold_at(s, t, x0_norm) for t in range(rounds)]


@dataclass(frozen=True, eq=False)
class CommunicationPolicy:
    """
    Which scheme gates transmission each round. Only the fields of the active
    kind are read.
    """
    kind: PolicyKind
    schedule: ThresholdSchedule = ThresholdSchedule()
    period_kp: int = 1
    link_prob: Optional[np.ndarray] = None
    activation_prob: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if self.kind is PolicyKind.PERIODIC and self.period_kp < 1:
            raise PolicyError(f"Period K_p must be a positive integer, got {self.period_kp}")
        if self.kind is PolicyKind.PROBABILISTIC:
            if self.link_prob is None:
                raise PolicyError("Probabilistic policy needs link probabilities")
            p = np.asarray(self.link_prob, dtype=np.float64)
            if np.any(p < 0) or np.any(p > 1):
                raise PolicyError("Link probabilities must lie in [0, 1]")
            object.__setattr__(self, "link_prob", p)
        if self.kind is PolicyKind.VARIABLE_WORKING and not 0.0 <= self.activation_prob <= 1.0:
            raise PolicyError(f"Activation probability must lie in [0, 1], got {self.activation_prob}")

    @property
    def has_threshold(self) -> bool:
        return self.kind is PolicyKind.EVENT_TRIGGERED

    def threshold(self, t: int, x0_norm: float) -> float:
        return threshold_at(self.schedule, t, x0_norm) if self.has_threshold else 0.0


def full_communication() -> CommunicationPolicy:
    return CommunicationPolicy(kind=PolicyKind.EVENT_TRIGGERED, schedule=ThresholdSchedule(ScheduleKind.ZERO))


def uniform_link_matrix(n: int, p: float) -> np.ndarray:
    return np.full((n, n), float(p))


#---------------------[ DECISIONS ]---------------------#

def event_trigger_decision(x: np.ndarray, snapshot: np.ndarray, tau_t: float) -> bool:
    """True iff ||x - snapshot|| >= tau_t; ties trigger"""
    if np.shape(x) != np.shape(snapshot):
        raise DimensionMismatch(f"Model shape {np.shape(x)} differs from snapshot shape {np.shape(snapshot)}")
    return bool(np.linalg.norm(x - snapshot) >= tau_t)


def periodic_decision(t: int, kp: int) -> bool:
    if kp < 1:
        raise PolicyError(f"Period K_p must be a positive integer, got {kp}")
    return t % kp == 0


def probabilistic_decision(rng_stream: np.random.Generator, p_ij: float) -> bool:
    return bool(rng_stream.random() < p_ij)


def activation_decision(rng_stream: np.random.Generator, p_k: float) -> bool:
    return bool(rng_stream.random() < p_k)

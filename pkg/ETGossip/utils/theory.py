"""
Constants and bounds for checking runs against the ergodic convergence
guarantee of event-triggered gossip SGD.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from ETGossip.exceptions import BoundInapplicable


class StepCase(str, Enum):
    A = "A"
    B = "B"
    C = "C"


@dataclass(frozen=True)
class TheoryConstants:
    n: int
    lips: float
    alpha: float
    beta: float
    delta: float
    eta: float
    f0_gap: float

    def with_eta(self, eta: float) -> "TheoryConstants":
        return TheoryConstants(self.n, self.lips, self.alpha, self.beta, self.delta, eta, self.f0_gap)


@dataclass(frozen=True)
class Stability:
    gamma: float
    delta_cap: float

    @property
    def applicable(self) -> bool:
        return self.gamma > 0 and self.delta_cap > 0

    def __iter__(self):
        return iter((self.gamma, self.delta_cap))


def _spectral_gap_sq(delta: float) -> float:
    return (1.0 - math.sqrt(delta)) ** 2


def stability_constants(c: TheoryConstants) -> Stability:
    """
    Gamma = 1 - 27 n eta^2 L^2 / (1 - sqrt(delta))^2,
    Delta = 1/2 - 27 n eta^2 L^2 / ((1 - sqrt(delta))^2 Gamma).
    """
    if not 0.0 <= c.delta < 1.0:
        raise BoundInapplicable(f"delta={c.delta} outside [0, 1)")
    if c.eta <= 0:
        raise BoundInapplicable(f"Stepsize must be positive, got {c.eta}")
    ratio = 27.0 * c.n * c.eta ** 2 * c.lips ** 2 / _spectral_gap_sq(c.delta)
    gamma = 1.0 - ratio
    delta_cap = 0.5 - ratio / gamma if gamma > 0 else -math.inf
    stability = Stability(gamma=gamma, delta_cap=delta_cap)
    if not stability.applicable:
        logging.warning(f"Bound inapplicable at eta={c.eta:.6g}: Gamma={gamma:.6g}, Delta={delta_cap:.6g}")
    return stability


def _require_stable(c: TheoryConstants) -> Stability:
    stability = stability_constants(c)
    if not stability.applicable:
        raise BoundInapplicable(
            f"Gamma={stability.gamma:.6g}, Delta={stability.delta_cap:.6g} at eta={c.eta:.6g}"
        )
    return stability


def eta_max(lips: float, delta: float, n: int) -> float:
    """min{1/L, (1 - sqrt(delta)) / (9 sqrt(n) L)}; below it Gamma > 2/3 and Delta > 0"""
    if lips <= 0 or not 0.0 <= delta < 1.0:
        raise BoundInapplicable(f"eta_max needs L > 0 and delta in [0, 1), got L={lips}, delta={delta}")
    return min(1.0 / lips, (1.0 - math.sqrt(delta)) / (9.0 * math.sqrt(n) * lips))


#---------------------[ ERGODIC BOUND ]---------------------#

@dataclass(frozen=True)
class BoundTerms:
    initial_gap: float
    noise_heterogeneity: float
    average_noise: float
    threshold_consensus: float
    threshold_average: float

    @property
    def total(self) -> float:
        return (
            self.initial_gap
            + self.noise_heterogeneity
            + self.average_noise
            + self.threshold_consensus
            + self.threshold_average
        )


def _mean_tau_sq(taus: Sequence[float], rounds: int) -> float:
    if len(taus) < rounds:
        raise ValueError(f"Need {rounds} thresholds, got {len(taus)}")
    return math.fsum(tau * tau for tau in taus[:rounds]) / rounds


def bound_terms(c: TheoryConstants, taus: Sequence[float], rounds: int) -> BoundTerms:
    if rounds < 1:
        raise ValueError(f"Horizon must be at least one round, got {rounds}")
    gamma, cap = _require_stable(c)
    gap_sq = _spectral_gap_sq(c.delta)
    mean_tau_sq = _mean_tau_sq(taus, rounds)
    n, lips, eta = c.n, c.lips, c.eta
    return BoundTerms(
        initial_gap=c.f0_gap / (eta * cap * rounds),
        noise_heterogeneity=(eta * lips ** 2 / (gamma * cap))
        * (3.0 * n ** 2 * c.alpha ** 2 / (1.0 - c.delta) + 27.0 * eta ** 2 * n * c.beta ** 2 / gap_sq),
        average_noise=eta * c.alpha ** 2 / (n * cap),
        threshold_consensus=(9.0 * eta * lips ** 2 / (gap_sq * gamma * cap)) * n * mean_tau_sq,
        threshold_average=mean_tau_sq / (eta * cap),
    )


def ergodic_bound_rhs(c: TheoryConstants, taus: Sequence[float], rounds: int) -> float:
    """Right-hand side of the ergodic bound on (1/T) sum_t E||grad f(x_bar_t)||^2"""
    return bound_terms(c, taus, rounds).total


#---------------------[ STEPSIZE REGIMES ]---------------------#

@dataclass(frozen=True)
class CaseConstants:
    case: StepCase
    k1: float
    k2: float
    k3: float
    k4: float
    k2_tilde: float
    a_t: Optional[float]
    b_t: Optional[float]
    mean_tau_sq: float
    eta_max: float


def case_constants(case: StepCase, c: TheoryConstants, rounds: int, taus: Sequence[float]) -> CaseConstants:
    """
    K_1..K_4 and the derived K~_2, a~_T, b_T of each regime. Gamma and Delta are
    evaluated at the reference stepsize c.eta.
    """
    case = StepCase(case)
    gamma, cap = _require_stable(c)
    gap_sq = _spectral_gap_sq(c.delta)
    n, lips = c.n, c.lips
    cap_eta = eta_max(lips, c.delta, n)
    mean_tau_sq = _mean_tau_sq(taus, rounds)

    k1 = c.f0_gap / cap
    noise = c.alpha ** 2 / (n * cap) + lips ** 2 / (gamma * cap) * (3.0 * n ** 2 * c.alpha ** 2 / (1.0 - c.delta))
    heterogeneity = 27.0 * lips ** 2 * n * c.beta ** 2 / (gap_sq * gamma * cap)

    if case is StepCase.A:
        k2, k3, k4 = noise, heterogeneity, 0.0
        return CaseConstants(case, k1, k2, k3, k4, k2 + k3 * cap_eta ** 2, None, None, mean_tau_sq, cap_eta)
    if case is StepCase.B:
        tau_sq = taus[0] ** 2 if len(taus) else 0.0
        k2 = noise + 9.0 * lips ** 2 * n * tau_sq / (gap_sq * gamma * cap)
        k3 = tau_sq / cap
        k4 = heterogeneity
        return CaseConstants(case, k1, k2, k3, k4, k2 + k4 * cap_eta ** 2, None, None, mean_tau_sq, cap_eta)
    k2 = noise
    k3 = heterogeneity
    k4 = 9.0 * lips ** 2 * n / (gap_sq * gamma * cap)
    k2_tilde = k2 + k3 * cap_eta ** 2
    a_t = k2_tilde + k4 * mean_tau_sq
    b_t = mean_tau_sq / cap
    return CaseConstants(case, k1, k2, k3, k4, k2_tilde, a_t, b_t, mean_tau_sq, cap_eta)


def case_stepsize(case: StepCase, c: TheoryConstants, rounds: int, taus: Sequence[float]) -> float:
    """
    Case A: min{sqrt(K_1 / (K~_2 T)), eta_max};
    Case B: min{sqrt((K_1/T + K_3) / K~_2), eta_max};
    Case C: min{sqrt((K_1/T + b_T) / a~_T), eta_max}.
    """
    k = case_constants(case, c, rounds, taus)
    if k.case is StepCase.A:
        numerator, denominator = k.k1 / rounds, k.k2_tilde
    elif k.case is StepCase.B:
        numerator, denominator = k.k1 / rounds + k.k3, k.k2_tilde
    else:
        numerator, denominator = k.k1 / rounds + k.b_t, k.a_t
    if denominator <= 0:
        return k.eta_max
    return min(math.sqrt(numerator / denominator), k.eta_max)


def case_rate_bound(case: StepCase, c: TheoryConstants, rounds: int, taus: Sequence[float]) -> float:
    """Closed-form rate after optimising the stepsize within each regime"""
    k = case_constants(case, c, rounds, taus)
    if k.case is StepCase.A:
        return 2.0 * math.sqrt(k.k2_tilde * k.k1 / rounds)
    if k.case is StepCase.B:
        return 2.0 * math.sqrt(k.k2_tilde * (k.k1 / rounds + k.k3))
    return 2.0 * math.sqrt(k.a_t * (k.k1 / rounds + k.b_t))

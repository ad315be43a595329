import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np

from ETGossip.config import ExperimentConfig
from ETGossip.exceptions import BoundInapplicable
from ETGossip.network.mixing import MixingMatrix, metropolis_mixing
from ETGossip.network.topology import Graph, generate_topology
from ETGossip.protocol.policy import (
    CommunicationPolicy,
    PolicyKind,
    ScheduleKind,
    ThresholdSchedule,
    threshold_sequence,
    uniform_link_matrix,
)
from ETGossip.utils.objectives import LogisticSuite, QuadraticSuite, make_logistic_suite, make_quadratic_suite
from ETGossip.utils.rng import INIT, setup_stream
from ETGossip.utils.theory import TheoryConstants, case_stepsize, eta_max, ergodic_bound_rhs

Suite = Union[QuadraticSuite, LogisticSuite]


@dataclass(frozen=True, eq=False)
class RunSetup:
    """Everything shared by the repetitions of one experiment; never mutated"""
    graph: Graph
    mixing: MixingMatrix
    policy: CommunicationPolicy
    suite: Suite
    x0: np.ndarray
    eta: float
    taus: List[float]
    constants: Optional[TheoryConstants]
    bound_rhs: float

    @property
    def x0_norm(self) -> float:
        return float(np.linalg.norm(self.x0))


def build_policy(cfg: ExperimentConfig, n: int) -> CommunicationPolicy:
    kind = cfg.policy_kind
    if kind == "periodic":
        return CommunicationPolicy(kind=PolicyKind.PERIODIC, period_kp=cfg.kp)
    if kind == "probabilistic":
        return CommunicationPolicy(kind=PolicyKind.PROBABILISTIC, link_prob=uniform_link_matrix(n, cfg.p_link))
    if kind == "variable_working":
        return CommunicationPolicy(kind=PolicyKind.VARIABLE_WORKING, activation_prob=cfg.p_k)
    schedule = ThresholdSchedule(kind=ScheduleKind(cfg.schedule_name), tau0=cfg.tau0, epsilon=cfg.epsilon)
    return CommunicationPolicy(kind=PolicyKind.EVENT_TRIGGERED, schedule=schedule)


def build_suite(cfg: ExperimentConfig) -> Suite:
    if cfg.objective_kind == "logistic":
        return make_logistic_suite(cfg.n, cfg.d, cfg.samples, cfg.lam, cfg.alpha, cfg.skew, cfg.seed)
    return make_quadratic_suite(cfg.n, cfg.d, cfg.spread, cfg.alpha, cfg.seed)


def initial_model(cfg: ExperimentConfig) -> np.ndarray:
    """x_0 ~ N(0, scale^2 I), identical for every repetition"""
    return setup_stream(cfg.seed, INIT).normal(0.0, cfg.init_scale, size=cfg.d)


def theory_constants(suite: Suite, mixing: MixingMatrix, x0: np.ndarray, eta: float) -> Optional[TheoryConstants]:
    """Certified constants; only quadratic suites have an exact f* and beta"""
    if not isinstance(suite, QuadraticSuite):
        return None
    f0_gap = max(suite.global_loss(x0) - suite.f_star(), 0.0)
    return TheoryConstants(
        n=suite.n,
        lips=suite.lips,
        alpha=suite.alpha,
        beta=math.sqrt(suite.beta_sq),
        delta=mixing.delta,
        eta=eta,
        f0_gap=f0_gap,
    )


def prepare(cfg: ExperimentConfig) -> RunSetup:
    graph = generate_topology(cfg.n, cfg.sparsity, cfg.seed, edge_count=cfg.edge_count)
    mixing = metropolis_mixing(graph)
    policy = build_policy(cfg, cfg.n)
    suite = build_suite(cfg)
    x0 = initial_model(cfg)
    taus = threshold_sequence(policy.schedule, cfg.rounds, float(np.linalg.norm(x0))) if policy.has_threshold else [0.0] * cfg.rounds

    if cfg.case is not None:
        reference = eta_max(suite.lips, mixing.delta, cfg.n) / 2.0
        eta = case_stepsize(cfg.case, theory_constants(suite, mixing, x0, reference), cfg.rounds, taus)
        logging.info(f"Case {cfg.case} stepsize eta={eta:.6g} (reference {reference:.6g})")
    else:
        eta = cfg.eta

    constants = theory_constants(suite, mixing, x0, eta)
    bound = math.nan
    if constants is not None and policy.has_threshold:
        try:
            bound = ergodic_bound_rhs(constants, taus, cfg.rounds)
        except BoundInapplicable as e:
            logging.warning(f"No ergodic bound for this run: {e}")

    logging.info(
        f"Prepared n={cfg.n} |E|={graph.edge_count} delta={mixing.delta:.6g} "
        f"policy={cfg.policy_kind} eta={eta:.6g} L={suite.lips:.6g}"
    )
    return RunSetup(
        graph=graph,
        mixing=mixing,
        policy=policy,
        suite=suite,
        x0=x0,
        eta=eta,
        taus=taus,
        constants=constants,
        bound_rhs=bound,
    )

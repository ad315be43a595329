"""
Per-node execution of one gossip round.

Order inside a round: trigger tests on the current models and synchronous
broadcast with snapshot refresh, receiver cache updates, stochastic gradients
at the pre-mix models, then x_{i,t+1} = mix_i - eta * g_i.

A neighbour slot that receives nothing this round is filled with the
receiver's own model, except under event triggering where the cache persists.
"""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Sequence, Tuple

import numpy as np

from ETGossip.exceptions import DimensionMismatch
from ETGossip.network.mixing import MixingMatrix
from ETGossip.protocol.dynamics import (
    average_iterate,
    average_perturbation,
    consensus_energy,
    obsolescence_matrix,
    stack_models,
)
from ETGossip.protocol.node import NodeState, mix_with_caches
from ETGossip.protocol.policy import (
    CommunicationPolicy,
    PolicyKind,
    activation_decision,
    event_trigger_decision,
    periodic_decision,
    probabilistic_decision,
)
from ETGossip.utils.objectives import ObjectiveSuite
from ETGossip.utils.rng import StreamFactory


@dataclass
class RoundTrace:
    t: int
    triggered: FrozenSet[int]
    transmissions: int
    tau_t: float
    v_norms: Dict[Tuple[int, int], float]
    ebar_norm: float
    consensus_energy: float
    grad_norm_sq: float
    f_avg: float
    max_staleness: int
    models: np.ndarray = field(repr=False)
    grads: np.ndarray = field(repr=False)
    perturbation: np.ndarray = field(repr=False)

    @property
    def gbar(self) -> np.ndarray:
        return self.grads.mean(axis=1)

    @property
    def ebar(self) -> np.ndarray:
        return average_perturbation(self.perturbation)

    @property
    def max_v_norm(self) -> float:
        return max(self.v_norms.values(), default=0.0)


def _broadcast(states: Sequence[NodeState], new: List[NodeState], w: MixingMatrix, fired: Sequence[int], t: int) -> int:
    """Refresh snapshots of firing nodes and deliver them to every neighbour; returns one-way message count"""
    sent = 0
    for i in fired:
        new[i].snapshot = states[i].x
        for j in w.neighbors(i):
            new[j].caches.refresh(i, states[i].x, t)
        sent += len(w.neighbors(i))
    return sent


def run_round(
    states: Sequence[NodeState],
    w: MixingMatrix,
    pol: CommunicationPolicy,
    obj: ObjectiveSuite,
    eta: float,
    t: int,
    rng: StreamFactory,
    x0_norm: float = 0.0,
) -> Tuple[List[NodeState], RoundTrace]:
    """
    Execute round t for all nodes.

    :param states: Node states entering round t (left untouched)
    :param x0_norm: ||x_0||, read by relative threshold schedules
    :return: States entering round t + 1 and the round's trace
    """
    if eta <= 0:
        raise ValueError(f"Stepsize must be positive, got {eta}")
    n = w.n
    if len(states) != n:
        raise DimensionMismatch(f"{len(states)} node states for a {n}-node mixing matrix")
    x = stack_models(states)
    if x.shape[0] != obj.d or obj.n != n:
        raise DimensionMismatch(f"Objective is {obj.n} nodes x d={obj.d}, states are {n} nodes x d={x.shape[0]}")

    tau_t = pol.threshold(t, x0_norm)
    xbar = average_iterate(x)
    grad_bar = obj.global_gradient(xbar)

    new = [s.copy() for s in states]
    active = [True] * n
    transmissions = 0

    if pol.kind is PolicyKind.EVENT_TRIGGERED:
        fired = [i for i in range(n) if event_trigger_decision(states[i].x, states[i].snapshot, tau_t)]
        transmissions = _broadcast(states, new, w, fired, t)

    elif pol.kind is PolicyKind.PERIODIC:
        if periodic_decision(t, pol.period_kp):
            fired = list(range(n))
            transmissions = _broadcast(states, new, w, fired, t)
        else:
            # local updates only: every neighbour slot holds the receiver's own model
            fired = []
            for i in range(n):
                for j in w.neighbors(i):
                    new[i].caches.substitute(j, states[i].x)

    elif pol.kind is PolicyKind.PROBABILISTIC:
        senders = set()
        for i in range(n):
            for j in w.neighbors(i):
                if probabilistic_decision(rng.link(t, i, j), pol.link_prob[j, i]):
                    new[i].caches.refresh(j, states[j].x, t)
                    senders.add(j)
                    transmissions += 1
                else:
                    new[i].caches.substitute(j, states[i].x)
        for j in senders:
            new[j].snapshot = states[j].x
        fired = sorted(senders)

    else:
        active = [activation_decision(rng.activation(t, i), pol.activation_prob) for i in range(n)]
        fired = [i for i in range(n) if active[i]]
        for i in fired:
            new[i].snapshot = states[i].x
            transmissions += len(w.neighbors(i))
        for i in range(n):
            for j in w.neighbors(i):
                if active[i] and active[j]:
                    new[i].caches.refresh(j, states[j].x, t)
                else:
                    new[i].caches.substitute(j, states[i].x)

    v = obsolescence_matrix(new, w)
    v_norms = {
        (j, i): float(np.linalg.norm(new[i].caches[j] - states[j].x))
        for i in range(n)
        for j in w.neighbors(i)
    }

    grads = np.zeros_like(x)
    for i in range(n):
        if active[i]:
            grads[:, i] = obj.stochastic_gradient(i, states[i].x, rng.gradient(t, i))

    for i in range(n):
        if active[i]:
            new[i].x = mix_with_caches(new[i], w.column(i)) - eta * grads[:, i]
        # an inactive node neither mixes nor steps

    trace = RoundTrace(
        t=t,
        triggered=frozenset(fired),
        transmissions=transmissions,
        tau_t=tau_t,
        v_norms=v_norms,
        ebar_norm=float(np.linalg.norm(average_perturbation(v))),
        consensus_energy=consensus_energy(x),
        grad_norm_sq=float(grad_bar @ grad_bar),
        f_avg=obj.global_loss(xbar),
        max_staleness=max(s.caches.max_staleness(t) for s in new),
        models=x,
        grads=grads,
        perturbation=v,
    )
    return new, trace

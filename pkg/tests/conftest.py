from typing import List

import numpy as np
import pytest

from ETGossip.config import parse_config
from ETGossip.network import generate_topology, metropolis_mixing
from ETGossip.protocol import RoundTrace, init_states, run_round
from ETGossip.utils import StreamFactory
from ETGossip.utils.objectives import make_quadratic_suite, quadratic_suite


def config_text(**entries) -> str:
    """Flat config text; dotted keys are passed with '__' in place of '.'"""
    return "".join(f"{key.replace('__', '.')}={value}\n" for key, value in entries.items())


def make_config(**entries):
    base = {"n": 6, "d": 3, "T": 20, "eta": 0.05, "policy__kind": "zero", "sparsity": 0.3}
    base.update(entries)
    if "case" in entries:
        base.pop("eta")
    return parse_config(config_text(**base))


def run_rounds(states, mixing, policy, suite, eta, rounds, rng, x0_norm=0.0):
    traces: List[RoundTrace] = []
    history = [states]
    for t in range(rounds):
        states, trace = run_round(states, mixing, policy, suite, eta, t, rng, x0_norm)
        traces.append(trace)
        history.append(states)
    return history, traces


@pytest.fixture
def two_node():
    """2-node path (W all 1/2) with f_i(x) = x^2 / 2 and no gradient noise"""
    mixing = metropolis_mixing(generate_topology(2, 0.0, seed=0))
    suite = quadratic_suite(np.array([[1.0]]), np.zeros(2), alpha=0.0)
    return mixing, suite


@pytest.fixture
def ten_node():
    graph = generate_topology(10, 0.3, seed=7)
    mixing = metropolis_mixing(graph)
    suite = make_quadratic_suite(10, 5, spread=1.0, alpha=0.2, seed=7)
    x0 = np.random.default_rng(7).normal(size=5)
    return graph, mixing, suite, x0


@pytest.fixture
def rng():
    return StreamFactory(seed=11, rep=0)


@pytest.fixture
def fresh_states(ten_node):
    _, mixing, _, x0 = ten_node
    return init_states(x0, mixing)

"""
Matrix form of the protocol, used as an oracle for the per-node engine:
X_{t+1} = X_t W - eta G_t + V_t, with models stacked as columns of X (d x n).
"""
from typing import Sequence, Union

import numpy as np

from ETGossip.exceptions import DimensionMismatch
from ETGossip.network.mixing import MixingMatrix
from ETGossip.protocol.node import NodeState


def stack_models(states: Sequence[NodeState]) -> np.ndarray:
    return np.column_stack([s.x for s in states])


def obsolescence_matrix(states: Sequence[NodeState], w: MixingMatrix) -> np.ndarray:
    """
    V_t, column i = sum_j W_ji (x~_{j->i,t} - x_{j,t}).

    Call after the cache updates of round t and before any model is updated.
    """
    d = states[0].x.shape[0]
    v = np.zeros((d, len(states)))
    for i, s in enumerate(states):
        for j in w.neighbors(i):
            v[:, i] += w.w[j, i] * (s.caches[j] - states[j].x)
    return v


def matrix_reference_step(x: np.ndarray, w: Union[MixingMatrix, np.ndarray], g: np.ndarray, v: np.ndarray, eta: float) -> np.ndarray:
    w = w.w if isinstance(w, MixingMatrix) else np.asarray(w, dtype=np.float64)
    if not (x.shape == g.shape == v.shape) or w.shape != (x.shape[1], x.shape[1]):
        raise DimensionMismatch(f"Shapes X{x.shape}, G{g.shape}, V{v.shape} and W{w.shape} disagree")
    return x @ w - eta * g + v


def average_iterate(x: np.ndarray) -> np.ndarray:
    return x.mean(axis=1)


def average_perturbation(v: np.ndarray) -> np.ndarray:
    return v.mean(axis=1)


def consensus_energy(x: np.ndarray) -> float:
    """M_t = (1/n) sum_i ||x_i - x_bar||^2"""
    deviation = x - average_iterate(x)[:, None]
    return float(np.sum(deviation ** 2) / x.shape[1])

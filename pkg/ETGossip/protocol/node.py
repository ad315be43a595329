from dataclasses import dataclass
from typing import List

import numpy as np

from ETGossip.exceptions import MissingCacheError
from ETGossip.network.mixing import MixingMatrix
from ETGossip.utils.cache import ReceiveCache


@dataclass
class NodeState:
    """
    Per-node protocol memory: live model x, last broadcast snapshot, and the
    receive caches for its neighbours. There is no self-cache; mixing always
    reads the live x for the node's own term.
    """
    node_id: int
    x: np.ndarray
    snapshot: np.ndarray
    caches: ReceiveCache

    def copy(self) -> "NodeState":
        return NodeState(node_id=self.node_id, x=self.x, snapshot=self.snapshot, caches=self.caches.copy())


def init_states(x0: np.ndarray, mixing: MixingMatrix) -> List[NodeState]:
    """Every node starts at x0 with snapshot x0 and caches holding x0 for each neighbour"""
    x0 = np.array(x0, dtype=np.float64)
    return [
        NodeState(
            node_id=i,
            x=x0,
            snapshot=x0,
            caches=ReceiveCache({j: x0 for j in mixing.neighbors(i)}),
        )
        for i in range(mixing.n)
    ]


def compute_drift(s: NodeState) -> np.ndarray:
    return s.x - s.snapshot


def mix_with_caches(s: NodeState, w_column: np.ndarray) -> np.ndarray:
    """sum_j W_ji x~_{j->i}, with the live x standing in for j = i"""
    mixed = w_column[s.node_id] * s.x
    for j in np.flatnonzero(w_column > 0.0):
        if j == s.node_id:
            continue
        cached = s.caches.get(int(j))
        if cached is None:
            raise MissingCacheError(f"Node {s.node_id} holds no cache for neighbour {j} (W={w_column[j]:.6g})")
        mixed = mixed + w_column[j] * cached
    return mixed

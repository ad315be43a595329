"""
Counter-based random substreams.

Every draw in a run comes from a generator keyed by where it is used:
(rep, round, node, purpose[, peer]) for per-round draws, (purpose,) for
one-off setup draws. Keys are turned into independent Philox streams through
``numpy.random.SeedSequence`` spawn keys, so the outcome of a draw never
depends on how many draws happened before it or in which order nodes ran.
"""
from typing import Optional, Tuple

import numpy as np

# Purpose tags. Values are part of the stream keys: never renumber.
GRADIENT = 0
LINK = 1
ACTIVATION = 2
INIT = 3
TOPOLOGY = 4
OBJECTIVE = 5


def _generator(seed: int, key: Tuple[int, ...]) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def setup_stream(seed: int, purpose: int) -> np.random.Generator:
    """Rep-independent stream for topology, objective and initial-model draws"""
    return _generator(seed, (purpose,))


class StreamFactory:
    """
    Substream source for one Monte Carlo repetition.

    :param seed: Base seed of the experiment
    :param rep: Repetition index; rep r uses seed material (seed, r)
    """
    def __init__(self, seed: int, rep: int = 0):
        if seed < 0 or rep < 0:
            raise ValueError("seed and rep must be nonnegative")
        self.seed = int(seed)
        self.rep = int(rep)

    def stream(self, t: int, node: int, purpose: int, peer: Optional[int] = None) -> np.random.Generator:
        key = (self.rep, t, node, purpose) if peer is None else (self.rep, t, node, purpose, peer)
        return _generator(self.seed, key)

    def gradient(self, t: int, node: int) -> np.random.Generator:
        return self.stream(t, node, GRADIENT)

    def link(self, t: int, receiver: int, sender: int) -> np.random.Generator:
        return self.stream(t, receiver, LINK, sender)

    def activation(self, t: int, node: int) -> np.random.Generator:
        return self.stream(t, node, ACTIVATION)

    def __repr__(self) -> str:
        return f"StreamFactory(seed={self.seed}, rep={self.rep})"

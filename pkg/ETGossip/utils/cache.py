from typing import Dict, Iterator, Optional

import numpy as np


class ReceiveCache:
    """
    Receive caches x~_{j->i} held by one receiver, keyed by sender id.

    Alongside each cached model the round of its last refresh is kept, so the
    staleness of a sender's entry can be reported. A substituted entry (the
    receiver's own model standing in for a sender that stayed silent) does not
    count as a refresh.
    """
    def __init__(self, entries: Optional[Dict[int, np.ndarray]] = None, refreshed: Optional[Dict[int, int]] = None):
        """
        :param entries: Initial cached models per sender
        :param refreshed: Round of the last delivery per sender (defaults to round -1)
        """
        self.entries: Dict[int, np.ndarray] = dict(entries or {})
        self.refreshed: Dict[int, int] = {k: -1 for k in self.entries}
        if refreshed:
            self.refreshed.update(refreshed)

    def __contains__(self, sender: int) -> bool:
        return sender in self.entries

    def __getitem__(self, sender: int) -> np.ndarray:
        return self.entries[sender]

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, sender: int, default=None):
        return self.entries.get(sender, default)

    def refresh(self, sender: int, model: np.ndarray, t: int) -> None:
        """Store a model delivered by sender at round t"""
        self.entries[sender] = model
        self.refreshed[sender] = t

    def substitute(self, sender: int, own_model: np.ndarray) -> None:
        """Reuse the receiver's own model in place of a message that never arrived"""
        self.entries[sender] = own_model

    def staleness(self, sender: int, t: int) -> int:
        """Rounds since sender's entry was last delivered"""
        return t - self.refreshed.get(sender, -1)

    def max_staleness(self, t: int) -> int:
        if not self.refreshed:
            return 0
        return max(self.staleness(k, t) for k in self.refreshed)

    def copy(self) -> "ReceiveCache":
        # models are never written in place, so sharing the arrays is safe
        return ReceiveCache(self.entries, self.refreshed)

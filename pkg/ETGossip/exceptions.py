from typing import List, Optional


class GossipError(Exception):
    message = "Gossip simulation error"

    def __init__(self, message: Optional[str] = None):
        super().__init__(message or self.message)


class ConfigError(GossipError):
    message = "Invalid configuration"

    def __init__(self, problems: List[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems) or self.message)


class TopologyError(GossipError):
    message = "Cannot build a connected topology"


class AssumptionViolation(GossipError):
    message = "Mixing matrix violates the contraction assumption"

    def __init__(self, message: Optional[str] = None, value: Optional[float] = None):
        self.value = value
        super().__init__(message)


class DimensionMismatch(GossipError):
    message = "Dimension mismatch"


class PolicyError(GossipError):
    message = "Invalid communication policy"


class BoundInapplicable(GossipError):
    message = "Bound inapplicable: stability constants are not positive"


class MissingCacheError(GossipError):
    message = "No receive cache for a positively weighted neighbour"

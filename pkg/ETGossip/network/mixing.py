import logging
from dataclasses import dataclass, field
from typing import List, Tuple, Union

import numpy as np

from ETGossip.exceptions import AssumptionViolation
from ETGossip.network.topology import Graph

STOCHASTIC_TOL = 1e-12
SYMMETRY_TOL = 1e-15
# delta this close to 1 is treated as 1 (identity-like supports round to 1 - 2e-16)
CONTRACTION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MixingMatrix:
    """Doubly stochastic, symmetric gossip weights with contraction factor delta = ||W - J||_2^2"""
    w: np.ndarray
    delta: float
    _neighbors: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        w = np.array(self.w, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)
        support = []
        for i in range(w.shape[0]):
            support.append(tuple(int(j) for j in np.flatnonzero(w[:, i] > 0.0) if j != i))
        object.__setattr__(self, "_neighbors", tuple(support))

    @property
    def n(self) -> int:
        return self.w.shape[0]

    def column(self, i: int) -> np.ndarray:
        """Weights {W_ji}_j that receiver i applies to its senders"""
        return self.w[:, i]

    def neighbors(self, i: int) -> Tuple[int, ...]:
        """Senders j != i with W_ji > 0"""
        return self._neighbors[i]


def averaging_matrix(n: int) -> np.ndarray:
    return np.full((n, n), 1.0 / n)


def _contraction(w: np.ndarray) -> float:
    n = w.shape[0]
    if np.max(np.abs(w - w.T)) <= STOCHASTIC_TOL:
        eig = np.linalg.eigvalsh((w + w.T) / 2.0 - averaging_matrix(n))
        return float(np.max(eig ** 2))
    return float(np.linalg.norm(w - averaging_matrix(n), ord=2) ** 2)


def spectral_contraction(w: Union[np.ndarray, MixingMatrix]) -> float:
    """
    Contraction factor delta = ||W - J||_2^2.

    For symmetric W this is max over l >= 2 of lambda_l^2, read off a symmetric
    eigendecomposition. Raises AssumptionViolation when delta >= 1.
    """
    w = w.w if isinstance(w, MixingMatrix) else np.asarray(w, dtype=np.float64)
    delta = _contraction(w)
    if delta >= 1.0 - CONTRACTION_TOL:
        logging.warning(f"Mixing matrix does not contract: delta={delta:.17g}")
        raise AssumptionViolation(
            f"delta={delta:.6g} >= 1: support is disconnected or periodic", value=delta
        )
    return min(max(delta, 0.0), 1.0)


def metropolis_mixing(g: Graph) -> MixingMatrix:
    """
    Metropolis-Hastings weights: W_ij = 1 / (1 + max(d_i, d_j)) on edges,
    W_ii = 1 - sum of the row's off-diagonal weights.
    """
    w = np.zeros((g.n, g.n))
    for i, j in g.sorted_edges():
        w[i, j] = w[j, i] = 1.0 / (1.0 + max(g.degree(i), g.degree(j)))
    for i in range(g.n):
        w[i, i] = 1.0 - np.sum(w[i])
    return MixingMatrix(w=w, delta=spectral_contraction(w))


def contraction_power_check(w: Union[np.ndarray, MixingMatrix], t: int) -> float:
    """||W^t - J||_2; equals sqrt(delta)^t for symmetric doubly stochastic W"""
    if t < 0:
        raise ValueError(f"Round index must be nonnegative, got {t}")
    w = w.w if isinstance(w, MixingMatrix) else np.asarray(w, dtype=np.float64)
    return float(np.linalg.norm(np.linalg.matrix_power(w, t) - averaging_matrix(w.shape[0]), ord=2))


#---------------------[ VALIDATION ]---------------------#

@dataclass(frozen=True)
class MixingCheck:
    name: str
    passed: bool
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    checks: Tuple[MixingCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[MixingCheck]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> MixingCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {c.name: {"passed": c.passed, "magnitude": c.magnitude} for c in self.checks}


def validate_mixing(w: Union[np.ndarray, MixingMatrix], g: Graph) -> ValidationReport:
    """
    Check W against the mixing assumption on graph g.

    Never raises; every failed invariant is carried in the report together with
    its worst violation.
    """
    w = w.w if isinstance(w, MixingMatrix) else np.asarray(w, dtype=np.float64)
    if w.shape != (g.n, g.n):
        return ValidationReport(checks=(MixingCheck("shape", False, float("inf")),))

    row = float(np.max(np.abs(w.sum(axis=1) - 1.0)))
    col = float(np.max(np.abs(w.sum(axis=0) - 1.0)))
    sym = float(np.max(np.abs(w - w.T)))
    neg = float(max(0.0, -np.min(w)))

    allowed = np.eye(g.n, dtype=bool)
    for i, j in g.edges:
        allowed[i, j] = allowed[j, i] = True
    off_support = np.abs(w[~allowed])
    support = float(np.max(off_support)) if off_support.size else 0.0

    delta = _contraction(w)
    checks = (
        MixingCheck("row_stochastic", row <= STOCHASTIC_TOL, row),
        MixingCheck("column_stochastic", col <= STOCHASTIC_TOL, col),
        MixingCheck("symmetric", sym <= SYMMETRY_TOL, sym),
        MixingCheck("nonnegative", neg == 0.0, neg),
        MixingCheck("support", support == 0.0, support),
        MixingCheck("contraction", delta < 1.0 - CONTRACTION_TOL, delta),
    )
    report = ValidationReport(checks=checks)
    if not report.ok:
        logging.warning(f"Mixing matrix failed checks: {[c.name for c in report.failures()]}")
    return report

"""
Synthetic per-node objectives with certified constants.

QuadraticSuite shares one matrix A across nodes, so the gradient discrepancy
grad f_i(x) - grad f(x) = A^T (b_bar - b_i) does not depend on x and beta^2 is
exact. LogisticSuite gives a label-skewed smooth problem for qualitative runs.
"""
from dataclasses import dataclass
from typing import Iterable, Protocol

import numpy as np
from scipy.special import expit

from ETGossip.exceptions import DimensionMismatch
from ETGossip.utils.rng import OBJECTIVE, setup_stream


class ObjectiveSuite(Protocol):
    alpha: float
    lips: float

    @property
    def n(self) -> int: ...

    @property
    def d(self) -> int: ...

    def local_loss(self, i: int, x: np.ndarray) -> float: ...

    def local_gradient(self, i: int, x: np.ndarray) -> np.ndarray: ...

    def global_loss(self, x: np.ndarray) -> float: ...

    def global_gradient(self, x: np.ndarray) -> np.ndarray: ...


def _gaussian_noise(rng_stream: np.random.Generator, alpha: float, d: int) -> np.ndarray:
    # per-coordinate variance alpha^2 / d, so E||noise||^2 = alpha^2
    return rng_stream.normal(0.0, alpha / np.sqrt(d), size=d)


class _SuiteBase:
    alpha: float

    def _check(self, i: int, x: np.ndarray) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"Node index {i} out of range 0..{self.n - 1}")
        if np.shape(x) != (self.d,):
            raise DimensionMismatch(f"Model shape {np.shape(x)} does not match dimension d={self.d}")

    def stochastic_gradient(self, i: int, x: np.ndarray, rng_stream: np.random.Generator) -> np.ndarray:
        g = self.local_gradient(i, x)
        if self.alpha == 0.0:
            return g
        return g + _gaussian_noise(rng_stream, self.alpha, self.d)

    def global_loss(self, x: np.ndarray) -> float:
        return float(np.mean([self.local_loss(i, x) for i in range(self.n)]))

    def global_gradient(self, x: np.ndarray) -> np.ndarray:
        return np.mean([self.local_gradient(i, x) for i in range(self.n)], axis=0)


#---------------------[ QUADRATIC ]---------------------#

@dataclass(frozen=True, eq=False)
class QuadraticSuite(_SuiteBase):
    """f_i(x) = 0.5 ||A x - b_i||^2 with shared A"""
    a: np.ndarray
    b: np.ndarray
    alpha: float
    lips: float
    beta_sq: float

    @property
    def n(self) -> int:
        return self.b.shape[0]

    @property
    def d(self) -> int:
        return self.a.shape[1]

    @property
    def b_bar(self) -> np.ndarray:
        return self.b.mean(axis=0)

    def local_loss(self, i: int, x: np.ndarray) -> float:
        self._check(i, x)
        r = self.a @ x - self.b[i]
        return 0.5 * float(r @ r)

    def local_gradient(self, i: int, x: np.ndarray) -> np.ndarray:
        self._check(i, x)
        return self.a.T @ (self.a @ x - self.b[i])

    def global_gradient(self, x: np.ndarray) -> np.ndarray:
        return self.a.T @ (self.a @ x - self.b_bar)

    def minimizer(self) -> np.ndarray:
        return np.linalg.solve(self.a.T @ self.a, self.a.T @ self.b_bar)

    def f_star(self) -> float:
        return self.global_loss(self.minimizer())


def quadratic_suite(a: np.ndarray, b: np.ndarray, alpha: float) -> QuadraticSuite:
    """Build a quadratic suite from explicit A (m x d) and targets b (n x m), certifying L and beta^2"""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64)
    if b.ndim == 1:
        b = b[:, None]
    if b.shape[1] != a.shape[0]:
        raise DimensionMismatch(f"Targets of width {b.shape[1]} do not match A with {a.shape[0]} rows")
    lips = float(np.max(np.linalg.eigvalsh(a.T @ a)))
    discrepancy = (b.mean(axis=0) - b) @ a
    beta_sq = float(np.max(np.sum(discrepancy ** 2, axis=1)))
    return QuadraticSuite(a=a, b=b, alpha=float(alpha), lips=lips, beta_sq=beta_sq)


def make_quadratic_suite(n: int, d: int, spread: float, alpha: float, seed: int) -> QuadraticSuite:
    """
    Sample a shared well-conditioned A (singular values in [0.5, 1]) and
    per-node targets b_i = b_bar + spread * u_i with sum_i u_i = 0.
    """
    if n < 2 or d < 1:
        raise DimensionMismatch(f"Need n >= 2 and d >= 1, got n={n}, d={d}")
    rng = setup_stream(seed, OBJECTIVE)
    left, _ = np.linalg.qr(rng.standard_normal((d, d)))
    right, _ = np.linalg.qr(rng.standard_normal((d, d)))
    a = left @ np.diag(rng.uniform(0.5, 1.0, size=d)) @ right.T
    b_bar = rng.standard_normal(d)
    u = rng.standard_normal((n, d))
    u -= u.mean(axis=0)
    return quadratic_suite(a, b_bar + spread * u, alpha)


#---------------------[ LOGISTIC ]---------------------#

@dataclass(frozen=True, eq=False)
class LogisticSuite(_SuiteBase):
    """
    Regularised logistic loss on per-node samples; node i's labels are skewed
    towards one class so local gradients disagree.
    """
    features: np.ndarray
    labels: np.ndarray
    lam: float
    alpha: float
    lips: float

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[2]

    def local_loss(self, i: int, x: np.ndarray) -> float:
        self._check(i, x)
        margins = self.labels[i] * (self.features[i] @ x)
        return float(np.mean(np.logaddexp(0.0, -margins)) + 0.5 * self.lam * (x @ x))

    def local_gradient(self, i: int, x: np.ndarray) -> np.ndarray:
        self._check(i, x)
        y = self.labels[i]
        margins = y * (self.features[i] @ x)
        weights = -y * expit(-margins) / len(y)
        return self.features[i].T @ weights + self.lam * x


def make_logistic_suite(n: int, d: int, samples: int, lam: float, alpha: float, skew: float, seed: int) -> LogisticSuite:
    """
    :param samples: Samples per node
    :param lam: L2 regularisation
    :param skew: Probability that a sample carries its node's majority label
    """
    if n < 2 or d < 1 or samples < 1:
        raise DimensionMismatch(f"Need n >= 2, d >= 1 and samples >= 1, got n={n}, d={d}, samples={samples}")
    rng = setup_stream(seed, OBJECTIVE)
    centre = rng.standard_normal(d)
    centre /= np.linalg.norm(centre)
    majority = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    flip = rng.random((n, samples)) >= skew
    labels = np.where(flip, -majority[:, None], majority[:, None])
    features = labels[:, :, None] * centre + rng.standard_normal((n, samples, d))
    lips = float(lam + np.max(np.sum(features ** 2, axis=2)) / 4.0)
    return LogisticSuite(features=features, labels=labels, lam=float(lam), alpha=float(alpha), lips=lips)


#---------------------[ OPERATIONS ]---------------------#

def local_gradient(suite: ObjectiveSuite, i: int, x: np.ndarray) -> np.ndarray:
    return suite.local_gradient(i, x)


def stochastic_gradient(suite: ObjectiveSuite, i: int, x: np.ndarray, rng_stream: np.random.Generator) -> np.ndarray:
    return suite.stochastic_gradient(i, x, rng_stream)


def global_gradient(suite: ObjectiveSuite, x: np.ndarray) -> np.ndarray:
    return suite.global_gradient(x)


def measure_heterogeneity(suite: ObjectiveSuite, points: Iterable[np.ndarray]) -> float:
    """max over points and nodes of ||grad f_i(x) - grad f(x)||^2"""
    worst = None
    for x in points:
        x = np.asarray(x, dtype=np.float64)
        g = suite.global_gradient(x)
        value = max(float(np.sum((suite.local_gradient(i, x) - g) ** 2)) for i in range(suite.n))
        worst = value if worst is None else max(worst, value)
    if worst is None:
        raise ValueError("measure_heterogeneity needs at least one point")
    return worst

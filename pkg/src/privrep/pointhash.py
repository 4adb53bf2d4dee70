"""Constant-size probabilistic representation of point functions via hashing.

Each hypothesis thresholds an affine map over a prime field: h(x) = 1 iff
(a x + b) mod p < tau.  Over a uniform choice of (a, b) the values at any two
distinct points are pairwise independent, each 1 with probability tau / p,
which is what makes a small bag of such hypotheses cover every point concept
against every distribution with good probability.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import BudgetError, DimensionError, Hypothesis
from .representation import HypothesisClass, HypothesisFamily

__all__ = [
    "is_prime",
    "next_prime",
    "ThresholdHashHypothesis",
    "point_class_params",
    "sample_point_class",
    "point_family",
]

# deterministic Miller-Rabin witness set, valid far beyond 2^63
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

EXPLICIT_PAIR_BUDGET = 4096  # p^2 cap per hypothesis slot
EXPLICIT_SUPPORT_BUDGET = 100_000  # p^(2M) cap on the enumerated support


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    if n in small:
        return True
    if any(n % q == 0 for q in small):
        return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    if n < 1:
        raise ValueError("need n >= 1")
    candidate = n + 1
    while not is_prime(candidate):
        candidate += 1
    return candidate


@dataclass(frozen=True, eq=False)
class ThresholdHashHypothesis(Hypothesis):
    """h(x) = 1 iff (a x + b) mod p < tau, with x embedded by its integer value."""

    d: int
    p: int
    a: int
    b: int
    tau: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.p <= (1 << self.d):
            raise DimensionError(f"p={self.p} must exceed 2^{self.d} for injectivity")
        if not (0 <= self.a < self.p and 0 <= self.b < self.p):
            raise ValueError("a and b must be field elements")
        if not 0 <= self.tau <= self.p:
            raise ValueError("tau out of range")

    def evaluate(self, x: int) -> int:
        return int((self.a * x + self.b) % self.p < self.tau)

    def evaluate_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        return (((self.a * xs + self.b) % self.p) < self.tau).astype(np.uint8)

    @staticmethod
    def batch_values(members, xs: np.ndarray):
        """Vectorized evaluation of many hypotheses sharing one modulus, or None."""
        p = members[0].p
        if any(h.p != p for h in members):
            return None
        a = np.asarray([h.a for h in members], dtype=np.int64)[:, None]
        b = np.asarray([h.b for h in members], dtype=np.int64)[:, None]
        tau = np.asarray([h.tau for h in members], dtype=np.int64)[:, None]
        return (((a * xs[None, :] + b) % p) < tau).astype(np.uint8)


def point_class_params(d: int, alpha: float, beta: float):
    """(M, p, tau) for the sampled classes at the given accuracy targets."""
    if not (0.0 < alpha and 0.0 < beta < 1.0):
        raise ValueError("need alpha > 0 and beta in (0, 1)")
    M = max(1, math.ceil((4.0 / alpha) * math.log(1.0 / beta)))
    # p strictly above both the rate requirement 8/alpha and the domain size
    p = next_prime(int(math.floor(max(8.0 / alpha, float(1 << d)))))
    tau = math.ceil(alpha * p / 2.0)
    return M, p, tau


def sample_point_class(
    d: int, alpha: float, beta: float, rng: np.random.Generator
) -> HypothesisClass:
    """M = ceil((4/alpha) ln(1/beta)) threshold hypotheses with fresh (a, b) each."""
    M, p, tau = point_class_params(d, alpha, beta)
    ab = rng.integers(0, p, size=(M, 2))
    return HypothesisClass(
        tuple(
            ThresholdHashHypothesis(d, p, int(a), int(b), tau) for a, b in ab
        )
    )


def point_family(
    d: int, alpha: float, beta: float, explicit: bool = False
) -> HypothesisFamily:
    """Family of threshold-hash classes covering every point concept.

    size_bound = ln M is independent of d.  With explicit=True the full support
    (all (a, b) tuples across the M slots, uniform) is enumerated for exact
    computations; that is only allowed on toy scales.
    """
    M, p, tau = point_class_params(d, alpha, beta)

    def sampler(rng: np.random.Generator) -> HypothesisClass:
        return sample_point_class(d, alpha, beta, rng)

    support = None
    if explicit:
        if p * p > EXPLICIT_PAIR_BUDGET or M > 3:
            raise BudgetError(
                f"explicit support needs p^2={p * p} <= {EXPLICIT_PAIR_BUDGET} and M={M} <= 3"
            )
        total = (p * p) ** M
        if total > EXPLICIT_SUPPORT_BUDGET:
            raise BudgetError(
                f"explicit support has {total} classes, budget is {EXPLICIT_SUPPORT_BUDGET}"
            )
        prob = 1.0 / total
        support = []
        pairs = tuple(itertools.product(range(p), range(p)))
        for combo in itertools.product(pairs, repeat=M):
            members = tuple(
                ThresholdHashHypothesis(d, p, a, b, tau) for a, b in combo
            )
            support.append((HypothesisClass(members), prob))
        support = tuple(support)
    return HypothesisFamily(
        d=d,
        size_bound=math.log(M),
        sampler=sampler,
        explicit_support=support,
        meta={"kind": "point", "alpha": alpha, "beta": beta},
    )

"""Private and non-private learners plus learner-to-family extraction.

The private learner samples a hypothesis class from a family and selects a
member with the exponential mechanism scored by agreement counts; privacy is
epsilon conditioned on the class, since the class draw never touches the data.
Extraction goes the other way: repeatedly running any black-box learner on a
constant database turns it into a hypothesis family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mechanism import ScoredCandidates, exp_mech_sample
from .model import (
    BudgetError,
    FAIL,
    FiniteDistribution,
    LabeledDatabase,
    all_zeros_database,
    empirical_error,
    evaluate_members,
)
from .representation import HypothesisClass, HypothesisFamily

__all__ = [
    "LearnerConfig",
    "required_sample_size",
    "ppac_learn",
    "nonprivate_learner",
    "extraction_run_count",
    "extract_representation",
    "truncating_learner",
    "reweight_distribution",
]

EXTRACT_BUDGET = 100_000


def required_sample_size(
    alpha: float,
    beta: float,
    epsilon: float,
    size_bound: float,
    mode: str = "six-alpha",
    gamma: float = None,
) -> int:
    """Sample count guaranteeing the learner's accuracy contract.

    six-alpha: m = ceil((3 / (alpha epsilon)) (size_bound + ln(1/beta))), which
    turns an (alpha, beta) family into a (6 alpha, 4 beta, epsilon) learner.
    gamma: m = ceil(6 (size_bound + ln(2/beta)) max(1/gamma^2, 1/(gamma epsilon))),
    which turns it into an (alpha + gamma, 3 beta, epsilon) learner.
    """
    if not (0.0 < beta < 1.0):
        raise ValueError("beta must be in (0, 1)")
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if size_bound < 0.0:
        raise ValueError("size_bound must be non-negative")
    if mode == "six-alpha":
        if alpha <= 0.0:
            raise ValueError("alpha must be positive")
        return math.ceil((3.0 / (alpha * epsilon)) * (size_bound + math.log(1.0 / beta)))
    if mode == "gamma":
        if gamma is None or gamma <= 0.0:
            raise ValueError("gamma mode needs gamma > 0")
        return math.ceil(
            6.0
            * (size_bound + math.log(2.0 / beta))
            * max(1.0 / gamma**2, 1.0 / (gamma * epsilon))
        )
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True, eq=False)
class LearnerConfig:
    """Accuracy targets (alpha, beta), privacy epsilon, sample count, and family.

    The declared m must meet the target: in six-alpha mode the formula is
    evaluated at (alpha/6, beta/4) so that the resulting learner hits (alpha,
    beta); in gamma mode at (beta/3, gamma) for the same reason.
    """

    alpha: float
    beta: float
    epsilon: float
    m: int
    family: HypothesisFamily
    gamma: float = None
    mode: str = "six-alpha"

    def __post_init__(self):
        if not (0.0 < self.alpha < 0.5):
            raise ValueError("alpha must be in (0, 1/2)")
        if not (0.0 < self.beta < 0.5):
            raise ValueError("beta must be in (0, 1/2)")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.mode == "six-alpha":
            need = required_sample_size(
                self.alpha / 6.0, self.beta / 4.0, self.epsilon, self.family.size_bound
            )
        elif self.mode == "gamma":
            need = required_sample_size(
                self.alpha,
                self.beta / 3.0,
                self.epsilon,
                self.family.size_bound,
                mode="gamma",
                gamma=self.gamma,
            )
        else:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.m < need:
            raise ValueError(f"m={self.m} below required sample size {need}")


def _class_members(cls) -> tuple:
    members = getattr(cls, "members", None)
    if members is None:
        cls = cls.materialize()  # lazy majority class; budget-guarded
        members = cls.members
    return members


def ppac_learn(cfg: LearnerConfig, S: LabeledDatabase, rng: np.random.Generator):
    """Sample a class from the family, then pick a member by the exponential mechanism."""
    if len(S) != cfg.m:
        raise ValueError(f"database has {len(S)} records, config says m={cfg.m}")
    members = _class_members(cfg.family.sample(rng))
    sc = ScoredCandidates.from_learning(S, members, cfg.epsilon)
    return exp_mech_sample(sc, rng)


def nonprivate_learner(
    F: HypothesisFamily, S: LabeledDatabase, gamma: float, rng: np.random.Generator
):
    """Sample a class; return its minimal-empirical-error member, or FAIL.

    FAIL (a value, not an exception) when every member has empirical error
    above gamma.  Ties break to the lowest index in the class order.
    """
    if len(S) < 1:
        raise ValueError("need a non-empty database")
    members = _class_members(F.sample(rng))
    errs = (
        evaluate_members(members, S.points()) != S.labels()[None, :]
    ).mean(axis=1)
    k = int(np.argmin(errs))
    if errs[k] > gamma + 1e-12:
        return FAIL
    return members[k]


def extraction_run_count(
    m: int, epsilon: float, mode: str = "plain", alpha: float = None
) -> int:
    """Executions of A per constant database: K plain, K' scaled."""
    if mode == "plain":
        return math.ceil(2.0 * math.log(4.0) * math.exp(m * epsilon))
    if mode == "scaled":
        if alpha is None:
            raise ValueError("scaled mode needs alpha")
        return math.ceil(4.0 * math.log(4.0) * math.exp(8.0 * alpha * epsilon * m))
    raise ValueError(f"unknown mode {mode!r}")


def extract_representation(
    A,
    d: int,
    m: int,
    epsilon: float,
    mode: str = "plain",
    alpha: float = None,
) -> HypothesisFamily:
    """Turn a black-box learner A(database, seed) -> hypothesis into a family.

    plain: each family draw collects K = ceil(2 ln 4 e^{m epsilon}) outputs of A
    on the all-zeros database labeled 0.  scaled: K' = ceil(4 ln 4
    e^{8 alpha epsilon m}) outputs on each of the two constant databases (zeros
    labeled 0 and labeled 1).  Outputs are deduplicated extensionally, which
    only shrinks the class; size_bound is ln of the collection cap.
    """
    K = extraction_run_count(m, epsilon, mode, alpha)
    if mode == "plain":
        cap = K
        dbs = (all_zeros_database(d, m, label=0),)
    else:
        cap = 2 * K
        dbs = (all_zeros_database(d, m, label=0), all_zeros_database(d, m, label=1))
    if K > EXTRACT_BUDGET:
        raise BudgetError(f"extraction needs K={K} executions, budget is {EXTRACT_BUDGET}")

    def sampler(rng: np.random.Generator) -> HypothesisClass:
        seen = set()
        out = []
        for db in dbs:
            for seed in rng.integers(0, 2**63, size=K):
                h = A(db, int(seed))
                if h not in seen:
                    seen.add(h)
                    out.append(h)
        return HypothesisClass(tuple(out))

    return HypothesisFamily(d=d, size_bound=math.log(cap), sampler=sampler)


def truncating_learner(A, inner_m: int):
    """Wrap a learner so it ignores all records past the first inner_m.

    Ignoring records preserves differential privacy, so this lets a learner
    built for a short sample be treated as one with any larger m.
    """

    def wrapped(db: LabeledDatabase, seed):
        return A(db.truncated(inner_m), seed)

    return wrapped


def reweight_distribution(D: FiniteDistribution, alpha: float, d: int) -> FiniteDistribution:
    """Mix D with a point mass at 0: new mass 1 - 4 alpha + 4 alpha D(0) at zero,
    4 alpha D(x) elsewhere.  Requires alpha <= 1/4 so no mass goes negative."""
    if not (0.0 < alpha <= 0.25):
        raise ValueError("alpha must be in (0, 1/4]")
    elements = D.elements if 0 in D.elements else (0,) + D.elements
    weights = []
    for el in elements:
        w = 4.0 * alpha * D.prob(el)
        if el == 0:
            w += 1.0 - 4.0 * alpha
        weights.append(w)
    total = sum(weights)
    if abs(total - 1.0) > 1e-12:
        raise RuntimeError(f"reweighted mass {total} drifted beyond 1e-12")
    out = FiniteDistribution(elements, np.asarray(weights))
    xs = out.points_array()
    if xs.size and int(xs.max()) >= (1 << d):
        raise ValueError("distribution support exceeds the stated domain")
    return out

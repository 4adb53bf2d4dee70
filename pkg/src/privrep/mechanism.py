"""Exponential mechanism with an exactly computable output distribution.

Includes the exhaustive differential-privacy verifier (dp_verify) and the
selection-utility checker (utility_bound_check).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    BudgetError,
    FiniteDistribution,
    LabeledDatabase,
    evaluate_members,
)

__all__ = [
    "ScoredCandidates",
    "DpReport",
    "UtilityCheck",
    "exp_mech_distribution",
    "exp_mech_sample",
    "dp_verify",
    "utility_bound_check",
]

# full enumeration cap for dp_verify: |universe|^m databases
DP_VERIFY_BUDGET = 100_000


@dataclass(frozen=True, eq=False)
class ScoredCandidates:
    """Finite candidate set with real-valued quality scores and a privacy parameter.

    Scores are whatever quantity multiplies epsilon/2 in the selection weights:
    agreement counts q(S, h) for learning, or m * q(db, f) for optimization.
    m is the database length when scores are agreement counts; it is required
    by utility_bound_check and optional otherwise.
    """

    candidates: tuple
    scores: np.ndarray
    epsilon: float
    m: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        s = np.array(self.scores, dtype=np.float64)
        if s.ndim != 1 or len(s) != len(self.candidates) or len(self.candidates) == 0:
            raise ValueError("need one finite score per candidate, at least one candidate")
        if not np.all(np.isfinite(s)):
            raise ValueError("scores must be finite")
        if not (self.epsilon >= 0.0):
            raise ValueError("epsilon must be >= 0")
        s.flags.writeable = False
        object.__setattr__(self, "scores", s)

    @classmethod
    def from_learning(
        cls, S: LabeledDatabase, members, epsilon: float
    ) -> "ScoredCandidates":
        """Agreement-count scores q(S, h) = |{i : h(x_i) = y_i}| for each member."""
        members = tuple(members)
        agree = evaluate_members(members, S.points()) == S.labels()[None, :]
        return cls(members, agree.sum(axis=1).astype(np.float64), epsilon, m=len(S))


def exp_mech_distribution(sc: ScoredCandidates) -> FiniteDistribution:
    """Normalized selection weights exp(epsilon * score / 2), computed in log space."""
    logw = (sc.epsilon / 2.0) * sc.scores
    logw = logw - logw.max()  # max-subtraction keeps exp() in range
    w = np.exp(logw)
    w /= w.sum()
    return FiniteDistribution(sc.candidates, w)


def exp_mech_sample(sc: ScoredCandidates, rng: np.random.Generator):
    """One draw from exp_mech_distribution; index ties resolve to the lower index."""
    dist = exp_mech_distribution(sc)
    return sc.candidates[dist.sample_index(rng)]


@dataclass(frozen=True)
class DpReport:
    """Worst-case privacy diagnostics over all neighbor pairs and singleton events.

    max_ln_ratio is max ln(p1(o) / p2(o)); 0/0 counts as 0 and p/0 as +inf.
    additive_slack_at_eps is the worst set-event gap max_F (P1(F) - e^eps P2(F)),
    computed as the positive-part sum over singleton outputs.
    witness is (db1, db2, output) attaining max_ln_ratio, or None when no
    neighbor pairs exist.
    """

    max_ln_ratio: float
    additive_slack_at_eps: float
    witness: tuple | None


def dp_verify(mechanism, universe, m: int, eps_claimed: float) -> DpReport:
    """Exhaustively check an exact-distribution mechanism against claimed epsilon.

    mechanism maps a length-m tuple of records (drawn from universe) to a
    FiniteDistribution over a finite output set.  Every database, every
    one-position rewrite, and every singleton output event is enumerated.
    """
    universe = tuple(universe)
    n_db = len(universe) ** m
    if n_db > DP_VERIFY_BUDGET:
        raise BudgetError(
            f"dp_verify needs {n_db} databases, budget is {DP_VERIFY_BUDGET}"
        )
    dbs = list(itertools.product(universe, repeat=m))
    index = {db: i for i, db in enumerate(dbs)}
    dists = [mechanism(db).as_event_probs() for db in dbs]

    emult = math.exp(eps_claimed)
    best_ratio = -math.inf
    witness = None
    worst_slack = 0.0
    for i, db in enumerate(dbs):
        p1 = dists[i]
        for pos in range(m):
            prefix, suffix = db[:pos], db[pos + 1 :]
            for r in universe:
                if r == db[pos]:
                    continue
                p2 = dists[index[prefix + (r,) + suffix]]
                slack = 0.0
                for out, a in p1.items():
                    if a <= 0.0:
                        continue
                    b = p2.get(out, 0.0)
                    ratio = math.inf if b == 0.0 else math.log(a / b)
                    if ratio > best_ratio:
                        best_ratio = ratio
                        witness = (db, prefix + (r,) + suffix, out)
                    gap = a - emult * b
                    if gap > 0.0:
                        slack += gap
                if slack > worst_slack:
                    worst_slack = slack
    if witness is None:
        best_ratio = 0.0
    return DpReport(best_ratio, worst_slack, witness)


@dataclass(frozen=True)
class UtilityCheck:
    probability: float
    bound: float
    passed: bool


def utility_bound_check(sc: ScoredCandidates, delta: float) -> UtilityCheck:
    """Exact mass on {h : error_S(h) > min error + delta} against |H| e^{-eps delta m / 2}.

    Requires agreement-count scores with sc.m set, so error_S(h) = 1 - score/m.
    """
    if sc.m is None:
        raise ValueError("utility check needs agreement scores with m set")
    dist = exp_mech_distribution(sc)
    errs = 1.0 - sc.scores / sc.m
    bad = errs > errs.min() + delta + 1e-12
    mass = float(dist.weights[bad].sum())
    bound = len(sc.candidates) * math.exp(-sc.epsilon * delta * sc.m / 2.0)
    return UtilityCheck(mass, bound, mass <= bound + 1e-12)

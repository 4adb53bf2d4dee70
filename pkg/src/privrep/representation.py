"""Hypothesis classes and families, minimax certification, boosting, shrinking.

A HypothesisFamily packages a seeded sampler of hypothesis classes together
with an optional explicit support for exact computations.  A family is a good
representation of a concept class when a sampled class contains a low-error
hypothesis with high probability against every distribution; drep_check
certifies the deterministic variant via a zero-sum game, prep_falsify
stress-tests the probabilistic variant.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import (
    BudgetError,
    ConceptClass,
    DimensionError,
    FAIL,
    FiniteDistribution,
    Hypothesis,
    evaluate_members,
    generalization_error,
)

__all__ = [
    "HypothesisClass",
    "HypothesisFamily",
    "MajorityHypothesis",
    "MajorityProductClass",
    "minimax_error",
    "minimax_adversary",
    "lattice_minimax",
    "drep_check",
    "stress_size",
    "stress_member",
    "stress_suite",
    "PrepVerdict",
    "prep_falsify",
    "union_representation",
    "boost_beta",
    "boost_alpha",
    "majority_round_count",
    "majority_error_bound",
    "boost_reweight",
    "boost_oracle",
    "shrink_draw_count",
    "shrink_family",
]

MINIMAX_D_LIMIT = 10
MAJ_MATERIALIZE_LIMIT = 1_000_000
SHRINK_BUDGET = 100_000
# explicit support of a boosted family enumerates r^M tuples
BOOST_SUPPORT_BUDGET = 4096


@dataclass(frozen=True, eq=False)
class HypothesisClass:
    """Non-empty, ordered, enumerated hypothesis list; size is ln of the count."""

    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("hypothesis class must be non-empty")
        d = self.members[0].d
        if any(h.d != d for h in self.members):
            raise DimensionError("class members must share d")

    @property
    def d(self) -> int:
        return self.members[0].d

    @property
    def member_count(self) -> int:
        return len(self.members)

    @property
    def size(self) -> float:
        return math.log(len(self.members))

    def member(self, i: int) -> Hypothesis:
        return self.members[i]

    def values_matrix(self) -> np.ndarray:
        """(member count, 2^d) truth-table matrix, cached."""
        cached = getattr(self, "_vm", None)
        if cached is None:
            cached = evaluate_members(self.members, np.arange(1 << self.d, dtype=np.int64))
            cached = np.ascontiguousarray(cached, dtype=np.uint8)
            cached.flags.writeable = False
            object.__setattr__(self, "_vm", cached)
        return cached

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]


@dataclass(frozen=True, eq=False)
class HypothesisFamily:
    """Distribution over hypothesis classes: a seeded sampler plus metadata.

    size_bound is an upper bound on ln |H| over every class the sampler can
    produce.  When explicit_support is given, exact computations enumerate it;
    the default sampler then draws from it directly.  meta carries optional
    serialization hints (see serialize module).
    """

    d: int
    size_bound: float
    sampler: object = None
    explicit_support: tuple = None
    meta: dict = None

    def __post_init__(self):
        if self.sampler is None and self.explicit_support is None:
            raise ValueError("family needs a sampler or an explicit support")
        if self.explicit_support is not None:
            support = tuple((cls, float(p)) for cls, p in self.explicit_support)
            object.__setattr__(self, "explicit_support", support)
            total = sum(p for _, p in support)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"support probabilities sum to {total}")
            for cls, _ in support:
                if cls.d != self.d:
                    raise DimensionError("support class d mismatch")
                if cls.size > self.size_bound + 1e-9:
                    raise ValueError(
                        f"class of size {cls.size:.6f} exceeds size_bound {self.size_bound:.6f}"
                    )
            dist = FiniteDistribution(
                tuple(range(len(support))), np.asarray([p for _, p in support])
            )
            object.__setattr__(self, "_support_dist", dist)

    def sample(self, rng: np.random.Generator):
        if self.sampler is not None:
            cls = self.sampler(rng)
        else:
            cls = self.explicit_support[self._support_dist.sample_index(rng)][0]
        if cls.size > self.size_bound + 1e-9:
            raise ValueError("sampler produced a class above size_bound")
        return cls


@dataclass(frozen=True, eq=False)
class MajorityHypothesis(Hypothesis):
    """Evaluates to 1 iff at least half of the parts evaluate to 1 (>= T/2)."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("majority needs at least one part")
        d = self.parts[0].d
        if any(h.d != d for h in self.parts):
            raise DimensionError("majority parts must share d")

    @property
    def d(self) -> int:
        return self.parts[0].d

    def evaluate(self, x: int) -> int:
        count = sum(h.evaluate(x) for h in self.parts)
        return int(2 * count >= len(self.parts))

    def evaluate_many(self, xs) -> np.ndarray:
        counts = evaluate_members(self.parts, xs).sum(axis=0, dtype=np.int64)
        return (2 * counts >= len(self.parts)).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class MajorityProductClass:
    """Lazy MAJ class over T factor classes; members indexed in mixed radix.

    Member counts can exceed what a materialized tuple (or even len()) allows,
    so the interface is member_count / member(i) rather than the sequence
    protocol.
    """

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("need at least one factor class")
        d = self.factors[0].d
        if any(cls.d != d for cls in self.factors):
            raise DimensionError("factor classes must share d")

    @property
    def d(self) -> int:
        return self.factors[0].d

    @property
    def member_count(self) -> int:
        n = 1
        for cls in self.factors:
            n *= len(cls)
        return n

    @property
    def size(self) -> float:
        return sum(math.log(len(cls)) for cls in self.factors)

    def member(self, i: int) -> MajorityHypothesis:
        if not 0 <= i < self.member_count:
            raise IndexError(i)
        parts = []
        for cls in reversed(self.factors):
            i, r = divmod(i, len(cls))
            parts.append(cls.members[r])
        return MajorityHypothesis(tuple(reversed(parts)))

    def materialize(self) -> HypothesisClass:
        n = self.member_count
        if n > MAJ_MATERIALIZE_LIMIT:
            raise BudgetError(
                f"majority class has {n} members, materialization cap is {MAJ_MATERIALIZE_LIMIT}"
            )
        members = tuple(
            MajorityHypothesis(parts)
            for parts in itertools.product(*(cls.members for cls in self.factors))
        )
        return HypothesisClass(members)


def _disagreement_matrix(c: Hypothesis, H: HypothesisClass) -> np.ndarray:
    """(2^d, |H|) payoff matrix: entry (x, k) is 1 iff member k disagrees with c at x."""
    if c.d != H.d:
        raise DimensionError("concept and class d mismatch")
    return (H.values_matrix() ^ c.values()[None, :]).T.astype(np.float64)


def _solve_game(payoff: np.ndarray):
    """Exact value and maximizing mixed strategy of a zero-sum matrix game.

    Row player (distributions over domain points) maximizes, column player
    (hypotheses) minimizes.  Dense tableau simplex with Bland's rule on the
    column player's LP; the row strategy is read off the dual.
    """
    shifted = payoff + 1.0  # strictly positive value, standard game-to-LP shift
    n_rows, n_cols = shifted.shape
    tab = np.zeros((n_rows + 1, n_cols + n_rows + 1))
    tab[:n_rows, :n_cols] = shifted
    tab[:n_rows, n_cols : n_cols + n_rows] = np.eye(n_rows)
    tab[:n_rows, -1] = 1.0
    tab[-1, :n_cols] = -1.0
    basis = list(range(n_cols, n_cols + n_rows))
    while True:
        enter = -1
        for j in range(n_cols + n_rows):  # Bland: lowest eligible index enters
            if tab[-1, j] < -1e-12:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best_ratio = math.inf
        for i in range(n_rows):
            a = tab[i, enter]
            if a > 1e-12:
                ratio = tab[i, -1] / a
                if ratio < best_ratio - 1e-15 or (
                    abs(ratio - best_ratio) <= 1e-15
                    and (leave < 0 or basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            raise RuntimeError("game LP unbounded; payoff shift broken")
        tab[leave] /= tab[leave, enter]
        col = tab[:, enter].copy()
        col[leave] = 0.0
        tab -= np.outer(col, tab[leave])
        basis[leave] = enter
    total = tab[-1, -1]  # = 1 / shifted game value
    value = 1.0 / total - 1.0
    dual = np.clip(tab[-1, n_cols : n_cols + n_rows], 0.0, None)
    strategy = dual / dual.sum()
    return value, strategy


def minimax_error(c: Hypothesis, H: HypothesisClass) -> float:
    """Value of the game max over distributions, min over members of error(c, member)."""
    return minimax_adversary(c, H)[0]


def minimax_adversary(c: Hypothesis, H: HypothesisClass):
    """(game value, maximizing distribution over domain points)."""
    if c.d > MINIMAX_D_LIMIT:
        raise BudgetError(f"minimax LP at d={c.d} exceeds d<={MINIMAX_D_LIMIT}")
    value, strategy = _solve_game(_disagreement_matrix(c, H))
    n = 1 << c.d
    return value, FiniteDistribution(tuple(range(n)), strategy)


def lattice_minimax(
    c: Hypothesis, H: HypothesisClass, resolution: int = 64, method: str = "lattice"
) -> float:
    """Best game value over distributions with weights at multiples of 1/resolution.

    method "lattice" solves the integer program exactly (scipy MILP); method
    "enumerate" literally walks the whole grid and is budget-guarded.  Both
    return the same number; enumerate is the independent cross-check.
    """
    payoff = _disagreement_matrix(c, H)
    n_x, n_h = payoff.shape
    if method == "enumerate":
        count = math.comb(resolution + n_x - 1, n_x - 1)
        if count > 2_000_000:
            raise BudgetError(f"grid has {count} points, enumeration cap is 2000000")
        best = 0
        for comp in _compositions(resolution, n_x):
            worst = min(int(np.dot(comp, payoff[:, k])) for k in range(n_h))
            if worst > best:
                best = worst
        return best / resolution
    if method != "lattice":
        raise ValueError(f"unknown method {method!r}")
    from scipy.optimize import Bounds, LinearConstraint, milp

    # variables: n_x integer masses plus one real lower-bound variable u
    obj = np.zeros(n_x + 1)
    obj[-1] = -1.0
    a_ub = np.hstack([-payoff.T, np.ones((n_h, 1))])  # u - sum A n <= 0 per hypothesis
    a_eq = np.concatenate([np.ones(n_x), [0.0]])[None, :]
    constraints = [
        LinearConstraint(a_ub, -np.inf, 0.0),
        LinearConstraint(a_eq, resolution, resolution),
    ]
    integrality = np.ones(n_x + 1)
    integrality[-1] = 0
    bounds = Bounds(0, resolution)
    res = milp(
        obj, constraints=constraints, integrality=integrality, bounds=bounds
    )
    if not res.success:
        raise RuntimeError(f"lattice solve failed: {res.message}")
    # payoff entries and masses are integers, so the optimum is an integer
    return round(-res.fun) / resolution


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def drep_check(H: HypothesisClass, C: ConceptClass, alpha: float) -> bool:
    """True iff H contains an alpha-good member against every concept and distribution."""
    return all(minimax_error(c, H) <= alpha + 1e-9 for c in C)


# ---------------------------------------------------------------------------
# fixed stress-distribution suite: point masses, uniform, two-point mixtures
# with the heavier weight on a 1/8 grid


def stress_size(d: int) -> int:
    n = 1 << d
    return n + 1 + (n * (n - 1) // 2) * 7


@lru_cache(maxsize=None)
def _pairs(d: int):
    return tuple(itertools.combinations(range(1 << d), 2))


def stress_member(d: int, i: int) -> FiniteDistribution:
    """i-th suite member: [0, 2^d) point masses, then uniform, then pair mixtures.

    Pair mixtures enumerate pairs x < y lexicographically, each with weights
    (k/8, 1 - k/8) for k = 1..7.
    """
    n = 1 << d
    if i < n:
        return FiniteDistribution.point_mass(i)
    if i == n:
        return FiniteDistribution.uniform(tuple(range(n)))
    q = i - n - 1
    pair, k = divmod(q, 7)
    x, y = _pairs(d)[pair]
    return FiniteDistribution.two_point(x, y, (k + 1) / 8.0)


def stress_suite(d: int) -> list:
    return [stress_member(d, i) for i in range(stress_size(d))]


@dataclass(frozen=True)
class PrepVerdict:
    """Outcome of prep_falsify: a sound falsifier, never a certifier."""

    falsified: bool
    witness: tuple  # (concept index, suite index, estimate) for the worst pair
    min_coverage: float
    exact: bool
    coverage: np.ndarray  # (len C, len suite) per-pair success estimates


def _coverage_matrix(classes, probs, C: ConceptClass, suite, alpha: float) -> np.ndarray:
    """Per (concept, distribution) mass of classes containing an alpha-good member.

    probs is None for an unweighted frequency over sampled classes.
    """
    n_cls = len(classes)
    counts = {len(cls) for cls in classes}
    cov = np.zeros((len(C), len(suite)))
    uniform_shape = len(counts) == 1 and classes[0].d <= 16
    if uniform_shape:
        tables = np.stack([cls.values_matrix() for cls in classes])  # (n, k, 2^d)
        for ci, c in enumerate(C):
            dis = (tables ^ c.values()[None, None, :]).astype(np.float32)
            for di, D in enumerate(suite):
                xs = D.points_array()
                err = dis[:, :, xs] @ D.weights.astype(np.float32)
                good = (err <= alpha + 1e-9).any(axis=1)
                cov[ci, di] = float(good @ probs) if probs is not None else float(good.mean())
    else:
        good = np.zeros((n_cls, len(C), len(suite)), dtype=bool)
        for ni, cls in enumerate(classes):
            vm = cls.values_matrix()
            for ci, c in enumerate(C):
                dis = (vm ^ c.values()[None, :]).astype(np.float64)
                for di, D in enumerate(suite):
                    errs = dis[:, D.points_array()] @ D.weights
                    good[ni, ci, di] = bool((errs <= alpha + 1e-9).any())
        weights = probs if probs is not None else np.full(n_cls, 1.0 / n_cls)
        cov = np.tensordot(weights, good.astype(np.float64), axes=1)
    return cov


def prep_falsify(
    F: HypothesisFamily,
    C: ConceptClass,
    alpha: float,
    beta: float,
    stress_distributions,
    trials: int,
    rng: np.random.Generator,
) -> PrepVerdict:
    """Look for (concept, distribution) pairs where F misses the 1 - beta target.

    Exact when F has an explicit support; otherwise Monte Carlo over sampled
    classes shared across all pairs, falsifying only when the estimate plus a
    3 sigma Hoeffding slack still falls short.  No violation found is not a
    certificate: the distribution quantifier cannot be exhausted by sampling.
    """
    if trials < 100:
        raise ValueError("need trials >= 100")
    suite = list(stress_distributions)
    if F.explicit_support is not None:
        classes = [cls for cls, _ in F.explicit_support]
        probs = np.asarray([p for _, p in F.explicit_support])
        cov = _coverage_matrix(classes, probs, C, suite, alpha)
        slack = 1e-12
        exact = True
    else:
        classes = [F.sample(rng) for _ in range(trials)]
        cov = _coverage_matrix(classes, None, C, suite, alpha)
        slack = 3.0 * math.sqrt(1.0 / (4.0 * trials))
        exact = False
    target = 1.0 - beta
    ci, di = np.unravel_index(int(np.argmin(cov)), cov.shape)
    worst = float(cov[ci, di])
    return PrepVerdict(
        falsified=worst + slack < target,
        witness=(int(ci), int(di), worst),
        min_coverage=worst,
        exact=exact,
        coverage=cov,
    )


def _dedup(hypotheses) -> tuple:
    seen = set()
    out = []
    for h in hypotheses:
        if h not in seen:
            seen.add(h)
            out.append(h)
    return tuple(out)


def union_representation(F: HypothesisFamily) -> HypothesisClass:
    """Deduplicated union of all member classes of an explicit-support family."""
    if F.explicit_support is None:
        raise ValueError("union needs an explicit support")
    return HypothesisClass(
        _dedup(h for cls, _ in F.explicit_support for h in cls.members)
    )


def boost_beta(F: HypothesisFamily, beta_target: float) -> HypothesisFamily:
    """Union M = ceil(ln(1/beta_target)) independent draws to shrink failure odds.

    Per-draw failure probability q becomes q^M; size_bound grows by ln M.
    """
    if not 0.0 < beta_target < 1.0:
        raise ValueError("beta_target must be in (0, 1)")
    M = math.ceil(math.log(1.0 / beta_target))
    if M <= 1:
        return F

    def sampler(rng: np.random.Generator) -> HypothesisClass:
        draws = [F.sample(rng) for _ in range(M)]
        return HypothesisClass(_dedup(h for cls in draws for h in cls.members))

    support = None
    if F.explicit_support is not None:
        r = len(F.explicit_support)
        if r**M <= BOOST_SUPPORT_BUDGET:
            support = []
            for combo in itertools.product(F.explicit_support, repeat=M):
                members = _dedup(h for cls, _ in combo for h in cls.members)
                prob = math.prod(p for _, p in combo)
                support.append((HypothesisClass(members), prob))
            support = tuple(support)
    return HypothesisFamily(
        d=F.d,
        size_bound=F.size_bound + math.log(M),
        sampler=sampler,
        explicit_support=support,
    )


def boost_alpha(F: HypothesisFamily, alpha_target: float) -> HypothesisFamily:
    """Majority-vote error reduction: T = ceil(14 ln(2 / alpha_target)) rounds.

    The sampled class is the full MAJ product of T draws, materialized when it
    has at most MAJ_MATERIALIZE_LIMIT members and lazy beyond that.  The caller
    is responsible for first driving the per-round failure odds down to
    beta / T (see boost_beta).
    """
    T = majority_round_count(alpha_target)

    def sampler(rng: np.random.Generator):
        draws = [F.sample(rng) for _ in range(T)]
        lazy = MajorityProductClass(tuple(draws))
        if lazy.member_count <= MAJ_MATERIALIZE_LIMIT:
            return lazy.materialize()
        return lazy

    return HypothesisFamily(d=F.d, size_bound=T * F.size_bound, sampler=sampler)


def majority_round_count(alpha_target: float) -> int:
    """T = ceil(14 ln(2 / alpha_target)) rounds of majority voting."""
    if not 0.0 < alpha_target < 2.0:
        raise ValueError("alpha_target must be in (0, 2)")
    return max(1, math.ceil(14.0 * math.log(2.0 / alpha_target)))


def majority_error_bound(T: int) -> float:
    """Error guarantee of a T-round majority when every round is 1/4-good."""
    return (T / 8.0) * (4.0 / 3.0) ** (-T / 2.0)


def shrink_draw_count(d: int, m: int, beta: float) -> int:
    """t = ceil(d m / beta^2) classes sampled when shrinking."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0, 1)")
    return math.ceil(d * m / beta**2)


def boost_reweight(
    D: FiniteDistribution, c: Hypothesis, h: Hypothesis
) -> FiniteDistribution:
    """One reweighting step: double mass where h errs, scale down where it is right."""
    err = generalization_error(c, h, D)
    if err >= 1.0:
        raise ValueError("reweighting undefined at error 1")
    xs = D.points_array()
    wrong = c.evaluate_many(xs) != h.evaluate_many(xs)
    factor = np.where(wrong, 2.0, 1.0 - err / (1.0 - err))
    return FiniteDistribution(D.elements, D.weights * factor)


def boost_oracle(classes, c: Hypothesis, D: FiniteDistribution):
    """Run the T-round reweighting experiment; majority of the per-round picks.

    Each round selects a 1/4-good member of the next class under the current
    distribution (ties: minimal error, then lowest index), reweights, and moves
    on; returns FAIL the first time no member qualifies.  Intermediate
    distributions are checked to stay normalized within 1e-6.
    """
    classes = list(classes)
    current = D
    chosen = []
    xs = D.points_array()
    cvals = c.evaluate_many(xs)
    for cls in classes:
        dis = (evaluate_members(cls.members, xs) != cvals[None, :]).astype(np.float64)
        errs = dis @ current.weights
        k = int(np.argmin(errs))
        if errs[k] > 0.25 + 1e-12:
            return FAIL
        h = cls.members[k]
        current = boost_reweight(current, c, h)
        if abs(float(current.weights.sum()) - 1.0) > 1e-6:
            raise RuntimeError("reweighted distribution drifted off mass 1")
        chosen.append(h)
    return MajorityHypothesis(tuple(chosen))


def shrink_family(
    F: HypothesisFamily,
    d: int,
    m: int,
    beta: float,
    rng: np.random.Generator,
    gamma: float = None,
) -> HypothesisFamily:
    """Replace F by the uniform family over t = ceil(d m / beta^2) sampled classes.

    size_bound is preserved.  When gamma is given, the sample-size precondition
    m >= (4 / gamma)(size_bound + ln(1 / beta)) is enforced rather than padded.
    """
    if d != F.d:
        raise DimensionError(f"family has d={F.d}, asked to shrink at d={d}")
    t = shrink_draw_count(d, m, beta)
    if t > SHRINK_BUDGET:
        raise BudgetError(f"shrink needs t={t} classes, budget is {SHRINK_BUDGET}")
    if gamma is not None:
        need = (4.0 / gamma) * (F.size_bound + math.log(1.0 / beta))
        if m < need - 1e-9:
            raise ValueError(f"m={m} below the required {math.ceil(need)} for gamma={gamma}")
    draws = tuple(F.sample(rng) for _ in range(t))
    support = tuple((cls, 1.0 / t) for cls in draws)
    return HypothesisFamily(d=F.d, size_bound=F.size_bound, explicit_support=support)

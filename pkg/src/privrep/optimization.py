"""Private optimization over solution families, with E3SAT and sanitization.

A bounded optimization problem has a quality q(db, f) in [0, 1] whose mass
m * q changes by at most 1 when one record of the database changes.  The
exponential mechanism over a sampled solution class with scores m * q is then
epsilon differentially private, and small random solution families already
carry near-optimal solutions for the two worked instances here: satisfying
most clauses of a 3-CNF formula, and releasing a synthetic database that
approximately preserves predicate frequencies.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mechanism import ScoredCandidates, exp_mech_distribution, exp_mech_sample
from .model import BudgetError, ConceptClass, FiniteDistribution

__all__ = [
    "OptimizationProblem",
    "SolutionFamily",
    "bounded_check",
    "private_optimize",
    "private_optimize_distribution",
    "opt_extraction_execution_count",
    "opt_extract_representation",
    "all_clauses",
    "e3sat_class_size",
    "clause_satisfied",
    "satisfied_fraction",
    "random_formula",
    "write_formula",
    "read_formula",
    "e3sat_problem",
    "e3sat_family",
    "sanitize_quality",
    "sanitize_problem",
]

EXHAUSTIVE_BUDGET = 100_000
OPT_EXTRACT_BUDGET = 100_000
SOLUTION_ENUM_BUDGET = 100_000


@dataclass(frozen=True, eq=False)
class OptimizationProblem:
    """Record universe, solution set (or sampler), and quality q in [0, 1]."""

    universe: tuple
    quality: object  # (db records tuple, solution) -> float
    solutions: tuple = None
    solution_sampler: object = None

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        if self.solutions is not None:
            object.__setattr__(self, "solutions", tuple(self.solutions))


@dataclass(frozen=True, eq=False)
class SolutionFamily:
    """Distribution over solution classes, mirroring HypothesisFamily.

    ratio(m) = m / size_bound is the representation ratio; it only deserves
    the name when it exceeds 1.
    """

    size_bound: float
    sampler: object = None
    explicit_support: tuple = None

    def __post_init__(self):
        if self.sampler is None and self.explicit_support is None:
            raise ValueError("family needs a sampler or an explicit support")
        if self.explicit_support is not None:
            support = tuple((tuple(cls), float(p)) for cls, p in self.explicit_support)
            object.__setattr__(self, "explicit_support", support)
            total = sum(p for _, p in support)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"support probabilities sum to {total}")
            dist = FiniteDistribution(
                tuple(range(len(support))), np.asarray([p for _, p in support])
            )
            object.__setattr__(self, "_support_dist", dist)

    def sample(self, rng: np.random.Generator) -> tuple:
        if self.sampler is not None:
            return tuple(self.sampler(rng))
        return self.explicit_support[self._support_dist.sample_index(rng)][0]

    def ratio(self, m: int) -> float:
        if m < 0:
            raise ValueError("m must be non-negative")
        if self.size_bound == 0.0:
            return math.inf
        return m / self.size_bound


def bounded_check(
    problem: OptimizationProblem,
    m: int,
    scope: str = "exhaustive",
    k: int = None,
    rng: np.random.Generator = None,
) -> float:
    """Max observed |m q(S1, f) - m q(S2, f)| over neighbor pairs and solutions.

    A problem is bounded when this never exceeds 1; callers compare against
    1 + 1e-9.  Exhaustive scope enumerates |universe|^m databases and needs an
    explicit solution set; sampled scope draws k random triples.
    """
    universe = problem.universe
    if scope == "exhaustive":
        if problem.solutions is None:
            raise ValueError("exhaustive check needs explicit solutions")
        n_db = len(universe) ** m
        if n_db > EXHAUSTIVE_BUDGET:
            raise BudgetError(f"exhaustive check needs {n_db} databases, budget is {EXHAUSTIVE_BUDGET}")
        worst = 0.0
        for db in itertools.product(universe, repeat=m):
            base = [m * problem.quality(db, f) for f in problem.solutions]
            for pos in range(m):
                for r in universe:
                    if r == db[pos]:
                        continue
                    nb = db[:pos] + (r,) + db[pos + 1 :]
                    for fi, f in enumerate(problem.solutions):
                        drift = abs(base[fi] - m * problem.quality(nb, f))
                        if drift > worst:
                            worst = drift
        return worst
    if scope == "sampled":
        if k is None or rng is None:
            raise ValueError("sampled scope needs k and rng")
        solutions = problem.solutions
        worst = 0.0
        for _ in range(k):
            db = tuple(universe[i] for i in rng.integers(0, len(universe), size=m))
            pos = int(rng.integers(0, m))
            r = universe[int(rng.integers(0, len(universe)))]
            nb = db[:pos] + (r,) + db[pos + 1 :]
            if solutions is not None:
                f = solutions[int(rng.integers(0, len(solutions)))]
            else:
                f = problem.solution_sampler(rng)
            drift = abs(m * problem.quality(db, f) - m * problem.quality(nb, f))
            if drift > worst:
                worst = drift
        return worst
    raise ValueError(f"unknown scope {scope!r}")


def private_optimize_distribution(
    problem: OptimizationProblem, solutions, S, epsilon: float
) -> FiniteDistribution:
    """Exact output distribution of the mechanism on a fixed solution class."""
    S = tuple(S)
    solutions = tuple(solutions)
    scores = np.asarray([len(S) * problem.quality(S, f) for f in solutions])
    return exp_mech_distribution(ScoredCandidates(solutions, scores, epsilon))


def private_optimize(
    problem: OptimizationProblem,
    B: SolutionFamily,
    S,
    epsilon: float,
    rng: np.random.Generator,
):
    """Sample a solution class from B, then select by scores m * q(S, solution)."""
    S = tuple(S)
    solutions = B.sample(rng)
    scores = np.asarray([len(S) * problem.quality(S, f) for f in solutions])
    return exp_mech_sample(ScoredCandidates(solutions, scores, epsilon), rng)


def opt_extraction_execution_count(
    m: int, epsilon: float, beta: float, beta_hat: float
) -> int:
    """Gamma = ceil((1 / (1 - beta)) ln(1 / beta_hat) e^{m epsilon})."""
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must be in [0, 1)")
    if not 0.0 < beta_hat < 1.0:
        raise ValueError("beta_hat must be in (0, 1)")
    count = math.ceil(
        (1.0 / (1.0 - beta)) * math.log(1.0 / beta_hat) * math.exp(m * epsilon)
    )
    return max(1, count)


def opt_extract_representation(
    A, m: int, epsilon: float, beta: float, beta_hat: float, zero_record
) -> SolutionFamily:
    """Family whose draws are Gamma runs of the optimizer A on a constant database.

    Gamma = ceil((1 / (1 - beta)) ln(1 / beta_hat) e^{m epsilon}); refused when
    it exceeds the execution budget.
    """
    gamma_count = opt_extraction_execution_count(m, epsilon, beta, beta_hat)
    if gamma_count > OPT_EXTRACT_BUDGET:
        raise BudgetError(
            f"extraction needs Gamma={gamma_count} executions, budget is {OPT_EXTRACT_BUDGET}"
        )
    db = (zero_record,) * m

    def sampler(rng: np.random.Generator) -> tuple:
        return tuple(A(db, int(seed)) for seed in rng.integers(0, 2**63, size=gamma_count))

    return SolutionFamily(size_bound=math.log(gamma_count), sampler=sampler)


# ---------------------------------------------------------------------------
# E3SAT: records are clauses with exactly three distinct variables, written as
# signed 1-based indices; assignments are n-bit masks with bit i-1 = variable i.


@lru_cache(maxsize=None)
def all_clauses(n: int) -> tuple:
    """Every clause over n variables, in deterministic order."""
    if n < 3:
        raise ValueError("need at least 3 variables")
    out = []
    for i, j, k in itertools.combinations(range(1, n + 1), 3):
        for signs in range(8):
            lits = tuple(
                -v if (signs >> pos) & 1 else v for pos, v in enumerate((i, j, k))
            )
            out.append(lits)
    return tuple(out)


def clause_satisfied(clause, assignment: int) -> bool:
    for lit in clause:
        var = abs(lit)
        bit = (assignment >> (var - 1)) & 1
        if bit == (1 if lit > 0 else 0):
            return True
    return False


def satisfied_fraction(formula, assignment: int) -> float:
    formula = tuple(formula)
    if not formula:
        raise ValueError("empty formula")
    return sum(clause_satisfied(cl, assignment) for cl in formula) / len(formula)


def random_formula(n: int, m: int, rng: np.random.Generator) -> tuple:
    clauses = all_clauses(n)
    return tuple(clauses[i] for i in rng.integers(0, len(clauses), size=m))


def write_formula(formula, path) -> None:
    """One clause per line: three nonzero signed integers."""
    with open(path, "w") as fh:
        for clause in formula:
            fh.write(f"{clause[0]} {clause[1]} {clause[2]}\n")


def read_formula(path) -> tuple:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            lits = tuple(int(tok) for tok in line.split())
            if len(lits) != 3 or any(l == 0 for l in lits):
                raise ValueError(f"bad clause line {line!r}")
            if len({abs(l) for l in lits}) != 3:
                raise ValueError(f"clause variables not distinct in {line!r}")
            out.append(lits)
    return tuple(out)


def e3sat_problem(n: int) -> OptimizationProblem:
    """Quality = fraction of the database's clauses the assignment satisfies."""
    solutions = tuple(range(1 << n)) if (1 << n) <= 4096 else None

    def quality(db, assignment):
        return satisfied_fraction(db, assignment)

    def solution_sampler(rng):
        return int(rng.integers(0, 1 << n))

    return OptimizationProblem(
        universe=all_clauses(n),
        quality=quality,
        solutions=solutions,
        solution_sampler=solution_sampler,
    )


def e3sat_class_size(alpha: float, beta: float) -> int:
    """t = ceil(ln(1/beta) / ln((alpha + 1/8)/alpha)) assignments per class."""
    if not 0.0 < alpha < 7.0 / 8.0:
        raise ValueError("alpha must be in (0, 7/8)")
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0, 1)")
    return max(1, math.ceil(math.log(1.0 / beta) / math.log((alpha + 0.125) / alpha)))


def e3sat_family(n: int, alpha: float, beta: float) -> SolutionFamily:
    """Classes of t uniform assignments, t from e3sat_class_size.

    A single uniform assignment satisfies each clause with probability 7/8, so a
    class of t of them misses the (7/8 - alpha) target with probability at most
    beta.
    """
    t = e3sat_class_size(alpha, beta)

    def sampler(rng: np.random.Generator) -> tuple:
        return tuple(int(a) for a in rng.integers(0, 1 << n, size=t))

    return SolutionFamily(size_bound=math.log(t), sampler=sampler)


# ---------------------------------------------------------------------------
# sanitization: quality is one minus the worst predicate-frequency gap


def _predicate_frequency(c, db) -> float:
    db = np.asarray(db, dtype=np.int64)
    return float(c.evaluate_many(db).mean())


def sanitize_quality(C: ConceptClass, S, S_hat) -> float:
    """1 - max over predicates of |freq in S - freq in S_hat|."""
    S = tuple(S)
    S_hat = tuple(S_hat)
    if not S or not S_hat:
        raise ValueError("databases must be non-empty")
    if len(C) == 0:
        raise ValueError("need at least one predicate")
    worst = max(
        abs(_predicate_frequency(c, S) - _predicate_frequency(c, S_hat)) for c in C
    )
    return 1.0 - worst


def sanitize_problem(C: ConceptClass, k: int) -> OptimizationProblem:
    """Search space = all size-k databases over the predicate domain, enumerated."""
    n = 1 << C.d
    count = n**k
    if count > SOLUTION_ENUM_BUDGET:
        raise BudgetError(f"candidate databases number {count}, budget is {SOLUTION_ENUM_BUDGET}")
    universe = tuple(range(n))
    solutions = tuple(itertools.product(universe, repeat=k))

    def quality(db, candidate):
        return sanitize_quality(C, db, candidate)

    return OptimizationProblem(universe=universe, quality=quality, solutions=solutions)

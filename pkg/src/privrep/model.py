"""Domain points, hypotheses, distributions, and labeled databases.

Domain points over {0,1}^d are plain integers in [0, 2^d); bit i of the
integer is coordinate i.  Everything downstream (mechanisms, learners,
optimizers) is built on the types in this module.  All values are immutable
after construction; randomness enters only through explicitly passed
numpy Generator streams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionError",
    "BudgetError",
    "FAIL",
    "make_rng",
    "derive_seed",
    "Hypothesis",
    "TruthTableHypothesis",
    "PointHypothesis",
    "ConstantHypothesis",
    "ComplementHypothesis",
    "ConceptClass",
    "point_class",
    "FiniteDistribution",
    "LabeledDatabase",
    "all_zeros_database",
    "evaluate_members",
    "generalization_error",
    "empirical_error",
    "sample_database",
]


class DimensionError(ValueError):
    """Bit-lengths of two values disagree, or a point is out of range."""


class BudgetError(RuntimeError):
    """An exact enumeration or sampling plan exceeds the desk-scale budget."""


class _FailType:
    """Sentinel returned by learners that give up; a value, not an exception."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "Fail"

    def __bool__(self) -> bool:
        return False


FAIL = _FailType()


def make_rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def derive_seed(master_seed: int, index: int) -> int:
    """Stable per-trial seed: independent of trial count and execution order."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# extensional equality is a full 2^d scan; forbid beyond this
_EQ_LIMIT = 16


class Hypothesis:
    """Total boolean function on {0, ..., 2^d - 1}.

    Concrete variants store their own parameters; equality and hashing are
    extensional (by truth table) and therefore only allowed at d <= 16.
    """

    d: int

    def evaluate(self, x: int) -> int:
        raise NotImplementedError

    def evaluate_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        return np.fromiter(
            (self.evaluate(int(x)) for x in xs.ravel()), dtype=np.uint8, count=xs.size
        ).reshape(xs.shape)

    def values(self) -> np.ndarray:
        """Truth table over the full domain as a uint8 array of length 2^d."""
        if self.d > _EQ_LIMIT:
            raise DimensionError(f"truth table at d={self.d} exceeds d<={_EQ_LIMIT}")
        cached = getattr(self, "_vals", None)
        if cached is None:
            cached = np.ascontiguousarray(
                self.evaluate_many(np.arange(1 << self.d, dtype=np.int64)), dtype=np.uint8
            )
            cached.flags.writeable = False
            object.__setattr__(self, "_vals", cached)
        return cached

    def truth_table(self) -> tuple:
        return tuple(int(v) for v in self.values())

    def complement(self) -> "Hypothesis":
        return ComplementHypothesis(self)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Hypothesis):
            return NotImplemented
        if self.d != other.d:
            return False
        return bool(np.array_equal(self.values(), other.values()))

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((self.d, self.values().tobytes()))


@dataclass(frozen=True, eq=False)
class TruthTableHypothesis(Hypothesis):
    d: int
    table: tuple

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(b) for b in self.table))
        if len(self.table) != (1 << self.d):
            raise DimensionError(f"table length {len(self.table)} != 2^{self.d}")
        if any(b not in (0, 1) for b in self.table):
            raise ValueError("table entries must be 0 or 1")

    def values(self) -> np.ndarray:
        cached = getattr(self, "_vals", None)
        if cached is None:
            cached = np.asarray(self.table, dtype=np.uint8)
            cached.flags.writeable = False
            object.__setattr__(self, "_vals", cached)
        return cached

    def evaluate(self, x: int) -> int:
        return self.table[x]

    def evaluate_many(self, xs) -> np.ndarray:
        return self.values()[np.asarray(xs, dtype=np.int64)]


@dataclass(frozen=True, eq=False)
class PointHypothesis(Hypothesis):
    """Indicator of a single domain point j."""

    d: int
    j: int

    def __post_init__(self):
        if not 0 <= self.j < (1 << self.d):
            raise DimensionError(f"point {self.j} outside domain of size 2^{self.d}")

    def evaluate(self, x: int) -> int:
        return int(x == self.j)

    def evaluate_many(self, xs) -> np.ndarray:
        return (np.asarray(xs, dtype=np.int64) == self.j).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class ConstantHypothesis(Hypothesis):
    d: int
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError("bit must be 0 or 1")

    def evaluate(self, x: int) -> int:
        return self.bit

    def evaluate_many(self, xs) -> np.ndarray:
        return np.full(np.asarray(xs).shape, self.bit, dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class ComplementHypothesis(Hypothesis):
    inner: Hypothesis

    @property
    def d(self) -> int:
        return self.inner.d

    def evaluate(self, x: int) -> int:
        return 1 - self.inner.evaluate(x)

    def evaluate_many(self, xs) -> np.ndarray:
        return (1 - self.inner.evaluate_many(xs)).astype(np.uint8)


def evaluate_members(members, xs) -> np.ndarray:
    """Evaluate a sequence of hypotheses on points xs as a (len(members), len(xs)) array.

    Uses a variant-specific batch evaluator when every member is the same
    concrete type and provides one (see ThresholdHashHypothesis.batch_values).
    """
    members = members if isinstance(members, (list, tuple)) else tuple(members)
    if not members:
        raise ValueError("no hypotheses to evaluate")
    xs = np.asarray(xs, dtype=np.int64)
    first_type = type(members[0])
    batch = getattr(first_type, "batch_values", None)
    if batch is not None and all(type(h) is first_type for h in members):
        out = batch(members, xs)
        if out is not None:
            return out
    return np.stack([h.evaluate_many(xs) for h in members])


@dataclass(frozen=True, eq=False)
class ConceptClass:
    """Named, enumerated set of target concepts sharing one bit-length."""

    name: str
    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("concept class must be non-empty")
        d = self.members[0].d
        if any(h.d != d for h in self.members):
            raise DimensionError("concept class members must share d")

    @property
    def d(self) -> int:
        return self.members[0].d

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]


def point_class(d: int) -> ConceptClass:
    """The class of all single-point indicators on {0,1}^d."""
    if d > 20:
        raise BudgetError(f"point class at d={d} has 2^{d} members")
    return ConceptClass(f"POINT_{d}", tuple(PointHypothesis(d, j) for j in range(1 << d)))


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability weights over an enumerated finite set.

    Elements may be domain points (ints), hypotheses, classes, or any hashable
    values.  Weights must be non-negative and sum to 1 within 1e-9.  Repeated
    elements are allowed; prob() and as_event_probs() merge them.
    """

    elements: tuple
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or len(w) != len(self.elements) or len(self.elements) == 0:
            raise ValueError("need one weight per element, at least one element")
        if float(w.min()) < -1e-12:
            raise ValueError(f"negative weight {w.min()}")
        np.clip(w, 0.0, None, out=w)
        total = float(w.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total}, expected 1 within 1e-9")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        cum = np.cumsum(w)
        cum.flags.writeable = False
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def uniform(cls, elements) -> "FiniteDistribution":
        elements = tuple(elements)
        return cls(elements, np.full(len(elements), 1.0 / len(elements)))

    @classmethod
    def point_mass(cls, element) -> "FiniteDistribution":
        return cls((element,), np.array([1.0]))

    @classmethod
    def two_point(cls, x, y, p_x: float) -> "FiniteDistribution":
        return cls((x, y), np.array([p_x, 1.0 - p_x]))

    def prob(self, element) -> float:
        return self.as_event_probs().get(element, 0.0)

    def as_event_probs(self) -> dict:
        """Element -> probability, merging repeated elements."""
        cached = getattr(self, "_event_probs", None)
        if cached is None:
            cached = {}
            for el, w in zip(self.elements, self.weights):
                cached[el] = cached.get(el, 0.0) + float(w)
            object.__setattr__(self, "_event_probs", cached)
        return cached

    def points_array(self) -> np.ndarray:
        """Elements as an int64 array; only valid for integer-valued support."""
        cached = getattr(self, "_points", None)
        if cached is None:
            if not all(isinstance(el, (int, np.integer)) for el in self.elements):
                raise TypeError("distribution support is not integer points")
            cached = np.asarray(self.elements, dtype=np.int64)
            cached.flags.writeable = False
            object.__setattr__(self, "_points", cached)
        return cached

    def sample_index(self, rng: np.random.Generator) -> int:
        # cumulative inversion; exact boundary hits resolve to the lower index
        u = rng.random()
        idx = int(np.searchsorted(self._cum, u, side="left"))
        return min(idx, len(self.elements) - 1)

    def sample_indices(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        idx = np.searchsorted(self._cum, u, side="left")
        return np.minimum(idx, len(self.elements) - 1)

    def sample(self, rng: np.random.Generator):
        return self.elements[self.sample_index(rng)]

    def sample_points(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.points_array()[self.sample_indices(rng, size)]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class LabeledDatabase:
    """Ordered sequence of (point, label) records over {0,1}^d.

    Two databases are neighbors iff they have the same length and differ in
    exactly one position.
    """

    d: int
    records: tuple

    def __post_init__(self):
        records = tuple((int(x), int(y)) for x, y in self.records)
        object.__setattr__(self, "records", records)
        n = 1 << self.d
        for x, y in records:
            if not 0 <= x < n:
                raise DimensionError(f"point {x} outside domain of size {n}")
            if y not in (0, 1):
                raise ValueError(f"label {y} must be 0 or 1")

    def __len__(self) -> int:
        return len(self.records)

    def points(self) -> np.ndarray:
        cached = getattr(self, "_pts", None)
        if cached is None:
            cached = np.asarray([x for x, _ in self.records], dtype=np.int64)
            cached.flags.writeable = False
            object.__setattr__(self, "_pts", cached)
        return cached

    def labels(self) -> np.ndarray:
        cached = getattr(self, "_lbl", None)
        if cached is None:
            cached = np.asarray([y for _, y in self.records], dtype=np.uint8)
            cached.flags.writeable = False
            object.__setattr__(self, "_lbl", cached)
        return cached

    def is_neighbor_of(self, other: "LabeledDatabase") -> bool:
        if self.d != other.d or len(self) != len(other):
            return False
        diffs = sum(1 for a, b in zip(self.records, other.records) if a != b)
        return diffs == 1

    def truncated(self, m: int) -> "LabeledDatabase":
        return LabeledDatabase(self.d, self.records[:m])


def all_zeros_database(d: int, m: int, label: int = 0) -> LabeledDatabase:
    return LabeledDatabase(d, ((0, label),) * m)


def generalization_error(c: Hypothesis, h: Hypothesis, D: FiniteDistribution) -> float:
    """Probability under D that h disagrees with c."""
    if c.d != h.d:
        raise DimensionError(f"c has d={c.d}, h has d={h.d}")
    xs = D.points_array()
    if xs.size and int(xs.max()) >= (1 << c.d):
        raise DimensionError("distribution support exceeds the domain")
    neq = (c.evaluate_many(xs) != h.evaluate_many(xs)).astype(np.float64)
    return float(neq @ D.weights)


def empirical_error(h: Hypothesis, S: LabeledDatabase) -> float:
    """Fraction of records of S that h mislabels."""
    if len(S) == 0:
        raise ValueError("empirical error over an empty database")
    if h.d != S.d:
        raise DimensionError(f"h has d={h.d}, database has d={S.d}")
    return float(np.mean(h.evaluate_many(S.points()) != S.labels()))


def sample_database(
    c: Hypothesis, D: FiniteDistribution, m: int, rng: np.random.Generator
) -> LabeledDatabase:
    """m i.i.d. draws from D, each labeled by c."""
    if m < 1:
        raise ValueError("need m >= 1")
    xs = D.sample_points(rng, m)
    if xs.size and int(xs.max()) >= (1 << c.d):
        raise DimensionError("distribution support exceeds the domain")
    ys = c.evaluate_many(xs)
    return LabeledDatabase(c.d, tuple(zip(map(int, xs), map(int, ys))))

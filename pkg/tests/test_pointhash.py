"""Threshold hashing: primes, parameters, pairwise independence, family."""
import itertools
import math

import numpy as np
import pytest

from privrep import (
    BudgetError,
    DimensionError,
    FiniteDistribution,
    ThresholdHashHypothesis,
    evaluate_members,
    is_prime,
    make_rng,
    next_prime,
    point_class,
    point_class_params,
    point_family,
    prep_falsify,
    sample_point_class,
)


def test_primality_and_next_prime():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 163}
    for n in range(2, 50):
        assert is_prime(n) == (n in primes or n in (43, 47))
    assert not is_prime(1) and not is_prime(0)
    assert is_prime(2**31 - 1)  # Mersenne prime, exercises the witness loop
    assert next_prime(2) == 3
    assert next_prime(8) == 11
    assert next_prime(13) == 17
    assert next_prime(32) == 37
    with pytest.raises(ValueError):
        next_prime(0)


def test_point_class_params_frozen_values():
    assert point_class_params(4, 0.25, 0.25) == (23, 37, 5)
    assert point_class_params(6, 0.05, 0.05) == (240, 163, 5)
    assert point_class_params(3, 0.25, 0.25)[1:] == (37, 5)  # max(8/a, 2^d) = 32
    assert point_class_params(3, 0.25, 0.999)[0] == 1  # ln(1/beta) ~ 0
    with pytest.raises(ValueError):
        point_class_params(3, 0.0, 0.25)
    with pytest.raises(ValueError):
        point_class_params(3, 0.25, 1.0)


def test_rate_window():
    # alpha/2 <= tau/p <= alpha/2 + 1/p <= 5 alpha/8, given p > 8/alpha
    rng = make_rng(61)
    for _ in range(100):
        d = int(rng.integers(1, 9))
        alpha = float(rng.uniform(0.05, 0.5))
        _, p, tau = point_class_params(d, alpha, 0.25)
        assert p > 8.0 / alpha and p > (1 << d)
        rate = tau / p
        assert alpha / 2.0 <= rate
        assert rate <= alpha / 2.0 + 1.0 / p
        assert alpha / 2.0 + 1.0 / p <= 5.0 * alpha / 8.0 + 1e-12


def test_pairwise_independence_exact_counts():
    # all p^2 (a, b) pairs at p=37, tau=5: marginals tau*p, joint tau^2
    p, tau = 37, 5
    ab = np.array(list(itertools.product(range(p), range(p))))
    for x, y in ((2, 5), (0, 7), (1, 14)):
        hit_x = ((ab[:, 0] * x + ab[:, 1]) % p) < tau
        hit_y = ((ab[:, 0] * y + ab[:, 1]) % p) < tau
        assert int(hit_x.sum()) == tau * p == 185
        assert int(hit_y.sum()) == tau * p
        assert int((hit_x & hit_y).sum()) == tau * tau == 25


def test_threshold_hash_validation():
    with pytest.raises(ValueError):
        ThresholdHashHypothesis(3, 36, 0, 0, 5)  # 36 not prime
    with pytest.raises(DimensionError):
        ThresholdHashHypothesis(4, 13, 0, 0, 5)  # p <= 2^d
    with pytest.raises(ValueError):
        ThresholdHashHypothesis(3, 37, 37, 0, 5)
    with pytest.raises(ValueError):
        ThresholdHashHypothesis(3, 37, 0, 0, 38)


def test_threshold_hash_evaluation():
    h = ThresholdHashHypothesis(3, 37, 4, 2, 5)
    for x in range(8):
        assert h.evaluate(x) == int((4 * x + 2) % 37 < 5)
    assert list(h.evaluate_many(np.arange(8))) == [h.evaluate(x) for x in range(8)]


def test_batch_values_matches_per_member():
    rng = make_rng(67)
    members = tuple(
        ThresholdHashHypothesis(3, 37, int(a), int(b), 5)
        for a, b in rng.integers(0, 37, size=(6, 2))
    )
    xs = np.arange(8)
    batched = ThresholdHashHypothesis.batch_values(members, xs)
    assert np.array_equal(batched, np.stack([h.evaluate_many(xs) for h in members]))
    # mixed moduli cannot share the fast path but must still evaluate
    mixed = members[:2] + (ThresholdHashHypothesis(3, 41, 1, 0, 5),)
    assert ThresholdHashHypothesis.batch_values(mixed, xs) is None
    out = evaluate_members(mixed, xs)
    assert np.array_equal(out, np.stack([h.evaluate_many(xs) for h in mixed]))


def test_sample_point_class_shape_and_determinism():
    cls = sample_point_class(4, 0.25, 0.25, make_rng(5))
    assert len(cls) == 23
    assert all(h.p == 37 and h.tau == 5 for h in cls)
    again = sample_point_class(4, 0.25, 0.25, make_rng(5))
    assert [(h.a, h.b) for h in cls] == [(h.a, h.b) for h in again]


def test_point_family_size_bound_ignores_d():
    f3 = point_family(3, 0.25, 0.25)
    f8 = point_family(8, 0.25, 0.25)
    assert f3.size_bound == f8.size_bound == math.log(23)
    assert f3.meta == {"kind": "point", "alpha": 0.25, "beta": 0.25}
    cls = f3.sample(make_rng(9))
    assert len(cls) == 23 and cls.d == 3


def test_explicit_point_family_budget():
    with pytest.raises(BudgetError):
        point_family(4, 0.25, 0.25, explicit=True)  # M = 23 > 3
    with pytest.raises(BudgetError):
        point_family(6, 0.25, 0.95, explicit=True)  # p = 67, p^2 > 4096
    with pytest.raises(BudgetError):
        point_family(2, 0.25, 0.85, explicit=True)  # M = 3, 1369^3 classes


def test_explicit_point_family_exactly_hits_the_marginal_rate():
    # M = 1, p = 37: the family's exact coverage of c_j under a point mass on j
    # is the enumerated marginal tau / p
    F = point_family(2, 0.25, 0.95, explicit=True)
    assert len(F.explicit_support) == 37 * 37
    suite = [FiniteDistribution.point_mass(j) for j in range(4)]
    verdict = prep_falsify(
        F, point_class(2), 0.25, 0.25, suite, trials=100, rng=make_rng(0)
    )
    assert verdict.exact and verdict.falsified  # 5/37 is nowhere near 3/4
    # diagonal: a good member must fire on j (marginal tau/p); off-diagonal:
    # it must stay silent on the probed point (1 - tau/p)
    diag = np.eye(4, dtype=bool)
    assert np.allclose(verdict.coverage[diag], 5.0 / 37.0, atol=1e-12)
    assert np.allclose(verdict.coverage[~diag], 32.0 / 37.0, atol=1e-12)
    assert verdict.min_coverage == pytest.approx(5.0 / 37.0, abs=1e-12)

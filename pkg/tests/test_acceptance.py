"""Acceptance gate: one test per shipping criterion, run at the stated scales.

Statistical checks use 3 sigma Hoeffding slack for the printed trial count;
exact checks use the tolerance given next to the assertion.  The conftest
hook prints a per-criterion PASS/FAIL summary after the run.
"""
import filecmp
import itertools
import math
import time

import numpy as np
import pytest

from privrep import (
    ConstantHypothesis,
    FAIL,
    HypothesisClass,
    LabeledDatabase,
    LearnerConfig,
    PointHypothesis,
    ScoredCandidates,
    ThresholdHashHypothesis,
    TruthTableHypothesis,
    boost_beta,
    boost_oracle,
    derive_seed,
    dp_verify,
    e3sat_class_size,
    e3sat_family,
    e3sat_problem,
    exp_mech_distribution,
    exp_mech_sample,
    extract_representation,
    extraction_run_count,
    generalization_error,
    lattice_minimax,
    majority_error_bound,
    majority_round_count,
    make_rng,
    minimax_error,
    nonprivate_learner,
    opt_extraction_execution_count,
    point_class,
    point_class_params,
    point_family,
    ppac_learn,
    prep_falsify,
    private_optimize_distribution,
    random_formula,
    required_sample_size,
    sample_database,
    satisfied_fraction,
    shrink_draw_count,
    shrink_family,
    stress_member,
    stress_size,
    stress_suite,
    utility_bound_check,
)
from privrep.cli import main

MASTER = 2026


def _sigma3(trials: int) -> float:
    return 3.0 * math.sqrt(1.0 / (4.0 * trials))


def test_criterion_01_exact_dp():
    # exponential-mechanism learner on a fixed 5-member class, d=2, m=3
    members = (PointHypothesis(2, 0), PointHypothesis(2, 1), PointHypothesis(2, 2),
               PointHypothesis(2, 3), ConstantHypothesis(2, 0))
    universe = tuple((x, y) for x in range(4) for y in (0, 1))
    start = time.perf_counter()
    for eps in (0.1, 1.0):
        def mech(records, eps=eps):
            sc = ScoredCandidates.from_learning(LabeledDatabase(2, records),
                                                members, eps)
            return exp_mech_distribution(sc)

        report = dp_verify(mech, universe, 3, eps)
        assert report.max_ln_ratio <= eps + 1e-9
        assert report.additive_slack_at_eps == 0.0
    assert time.perf_counter() - start < 5.0


def test_criterion_02_utility_bound():
    rng = make_rng(derive_seed(MASTER, 2))
    violations = 0
    for _ in range(1000):
        d = int(rng.integers(1, 4))
        n_h = int(rng.integers(1, 9))
        m = int(rng.integers(1, 21))
        members = tuple(
            TruthTableHypothesis(d, tuple(int(b) for b in rng.integers(0, 2, size=1 << d)))
            for _ in range(n_h)
        )
        records = tuple(
            (int(rng.integers(1 << d)), int(rng.integers(2))) for _ in range(m)
        )
        sc = ScoredCandidates.from_learning(LabeledDatabase(d, records), members,
                                            float(rng.uniform(0.05, 4.0)))
        check = utility_bound_check(sc, float(rng.uniform(0.0, 1.0)))
        violations += not check.passed
    assert violations == 0


def test_criterion_03_point_family():
    M, p, tau = point_class_params(4, 0.25, 0.25)
    assert (M, p, tau) == (23, 37, 5)

    trials = 5000
    verdict = prep_falsify(point_family(4, 0.25, 0.25), point_class(4),
                           0.25, 0.25, stress_suite(4), trials,
                           make_rng(derive_seed(MASTER, 3)))
    assert not verdict.falsified
    assert verdict.min_coverage >= 0.75 - _sigma3(trials)

    # pairwise independence holds exactly over the full (a, b) table
    members = [ThresholdHashHypothesis(4, p, a, b, tau)
               for a in range(p) for b in range(p)]
    V = ThresholdHashHypothesis.batch_values(
        members, np.arange(16, dtype=np.int64)
    ).astype(np.int64)
    assert (V.sum(axis=0) == tau * p).all()
    joint = V.T @ V
    assert (joint[~np.eye(16, dtype=bool)] == tau * tau).all()


def test_criterion_04_end_to_end_learning():
    alpha, beta, epsilon = 0.3, 0.2, 1.0
    family = point_family(6, alpha / 6.0, beta / 4.0)
    m = required_sample_size(alpha / 6.0, beta / 4.0, epsilon, family.size_bound)
    assert m == 509
    cfg = LearnerConfig(alpha, beta, epsilon, m, family)

    trials = 500
    start = time.perf_counter()
    failures = 0
    for i in range(trials):
        rng = make_rng(derive_seed(MASTER, 4_000 + i))
        D = stress_member(6, int(rng.integers(stress_size(6))))
        c = PointHypothesis(6, int(rng.integers(64)))
        S = sample_database(c, D, m, rng)
        h = ppac_learn(cfg, S, rng)
        failures += generalization_error(c, h, D) > alpha + 1e-12
    assert time.perf_counter() - start < 120.0
    assert failures / trials <= beta + _sigma3(trials)


def test_criterion_05_boost_oracle():
    T = majority_round_count(0.25)
    assert T == 30
    bound = majority_error_bound(T)
    fam = boost_beta(point_family(3, 0.25, 0.25), 1.0 / (4.0 * T))

    successes = 0
    attempts = 0
    while successes < 200:
        assert attempts < 500, "per-round failures are far above their bound"
        rng = make_rng(derive_seed(MASTER, 5_000 + attempts))
        attempts += 1
        D = stress_member(3, int(rng.integers(stress_size(3))))
        c = PointHypothesis(3, int(rng.integers(8)))
        classes = [fam.sample(rng) for _ in range(T)]
        maj = boost_oracle(classes, c, D)
        if maj is FAIL:
            continue
        successes += 1
        assert generalization_error(c, maj, D) <= bound + 1e-12


def test_criterion_06_minimax_oracle():
    analytic = [
        (0.0, PointHypothesis(2, 0),
         HypothesisClass((PointHypothesis(2, 0), ConstantHypothesis(2, 1)))),
        (1.0, PointHypothesis(2, 1),
         HypothesisClass((ConstantHypothesis(2, 0),))),
        (0.5, PointHypothesis(1, 0),
         HypothesisClass((ConstantHypothesis(1, 0), ConstantHypothesis(1, 1)))),
    ]
    for target, c, H in analytic:
        assert minimax_error(c, H) == pytest.approx(target, abs=1e-9)

    for i in range(100):
        rng = make_rng(derive_seed(MASTER, 6_000 + i))
        d = int(rng.integers(1, 5))
        n_h = int(rng.integers(1, 17))
        H = HypothesisClass(tuple(
            TruthTableHypothesis(d, tuple(int(b) for b in row))
            for row in rng.integers(0, 2, size=(n_h, 1 << d))
        ))
        c = TruthTableHypothesis(d, tuple(int(b) for b in rng.integers(0, 2, size=1 << d)))
        gap = abs(minimax_error(c, H) - lattice_minimax(c, H, 64))
        assert gap <= 1.0 / 64.0 + 1e-6


def test_criterion_07_shrinking():
    d, gamma, beta = 3, 0.5, 0.5
    base = point_family(d, 0.25, 0.25)
    m = math.ceil((4.0 / gamma) * (base.size_bound + math.log(1.0 / beta)))
    shrunk = shrink_family(base, d, m, beta,
                           make_rng(derive_seed(MASTER, 2**32)), gamma=gamma)
    assert shrink_draw_count(d, m, beta) == 372

    trials = 2000
    ok_orig = ok_shrunk = 0
    for i in range(trials):
        rng = make_rng(derive_seed(MASTER, 7_000 + i))
        D = stress_member(d, int(rng.integers(stress_size(d))))
        c = PointHypothesis(d, int(rng.integers(1 << d)))
        S = sample_database(c, D, m, rng)

        def succeeds(h) -> bool:
            return h is not FAIL and \
                generalization_error(c, h, D) <= 2.0 * gamma + 1e-12

        ok_orig += succeeds(nonprivate_learner(base, S, gamma, rng))
        ok_shrunk += succeeds(nonprivate_learner(shrunk, S, gamma, rng))
    degradation = (ok_orig - ok_shrunk) / trials
    assert degradation <= beta + _sigma3(trials)


def test_criterion_08_extraction():
    m, epsilon = 3, 0.5
    members = (PointHypothesis(1, 0), PointHypothesis(1, 1))

    def mech(records):
        sc = ScoredCandidates.from_learning(LabeledDatabase(1, records),
                                            members, epsilon)
        return exp_mech_distribution(sc)

    def A(db, seed):
        sc = ScoredCandidates.from_learning(db, members, epsilon)
        return exp_mech_sample(sc, make_rng(seed))

    universe = tuple((x, y) for x in (0, 1) for y in (0, 1))
    report = dp_verify(mech, universe, m, epsilon)
    assert report.max_ln_ratio <= epsilon + 1e-9

    # the fixture is (1/4, 1/2)-accurate: exact over every stress (c, D) pair
    C = point_class(1)
    accuracies = []
    for c in C.members:
        for di in range(stress_size(1)):
            D = stress_member(1, di)
            good = [h for h in members
                    if generalization_error(c, h, D) <= 0.25 + 1e-12]
            acc = 0.0
            for combo in itertools.product(range(len(D)), repeat=m):
                w = math.prod(float(D.weights[j]) for j in combo)
                if w == 0.0:
                    continue
                records = tuple(
                    (int(D.elements[j]), c.evaluate(int(D.elements[j])))
                    for j in combo
                )
                acc += w * sum(mech(records).prob(h) for h in good)
            accuracies.append(acc)
    assert min(accuracies) == pytest.approx(0.679178699175393, abs=1e-9)
    assert min(accuracies) >= 0.5

    assert extraction_run_count(m, epsilon) == 13
    F = extract_representation(A, 1, m, epsilon, mode="plain")
    verdict = prep_falsify(F, C, 0.25, 0.25, stress_suite(1), 500,
                           make_rng(derive_seed(MASTER, 8)))
    assert not verdict.falsified


def test_criterion_09_e3sat():
    assert e3sat_class_size(0.125, 0.25) == 2
    fam = e3sat_family(20, 0.125, 0.25)

    trials = 2000
    hits = 0
    for i in range(trials):
        rng = make_rng(derive_seed(MASTER, 9_000 + i))
        formula = random_formula(20, 50, rng)
        best = max(satisfied_fraction(formula, a) for a in fam.sample(rng))
        hits += best + 1e-12 >= 0.75
    assert hits / trials >= 0.75 - _sigma3(trials)

    toy = ((1, 2, 3), (-1, -2, -3))
    problem = e3sat_problem(3)
    dist = private_optimize_distribution(problem, problem.solutions, toy, 2.0)
    weights = [math.exp(2.0 * len(toy) * satisfied_fraction(toy, a) / 2.0)
               for a in problem.solutions]
    total = sum(weights)
    for a, w in zip(problem.solutions, weights):
        assert dist.prob(a) == pytest.approx(w / total, abs=1e-9)


def test_criterion_10_formula_regressions():
    assert required_sample_size(0.1, 0.25, 1.0, 2.0) == 102
    assert required_sample_size(0.1, 0.25, 1.0, 2.0, mode="gamma", gamma=0.1) == 2448
    assert point_class_params(4, 0.25, 0.25)[0] == 23
    assert majority_round_count(0.25) == 30
    assert e3sat_class_size(0.125, 0.25) == 2
    assert extraction_run_count(3, 0.5) == 13
    assert extraction_run_count(4, 0.5, mode="scaled", alpha=0.125) == 41
    assert shrink_draw_count(4, 10, 0.5) == 160
    assert opt_extraction_execution_count(2, 0.5, 0.5, 0.25) == 8

    from privrep.cli import ExperimentConfig, run_experiment
    header, rows = run_experiment(ExperimentConfig(subcommand="formulas"))
    mi, vi = header.index("metric"), header.index("value")
    values = {r[mi]: r[vi] for r in rows}
    assert values == {
        "m_six_alpha": "102", "m_gamma": "2448", "point_M": "23",
        "boost_T": "30", "e3sat_t": "2", "extract_K_plain": "13",
        "extract_K_scaled": "41", "shrink_t": "160", "opt_Gamma": "8",
    }


SMALL_PARAMS = {
    "dp-verify": ["class_size=3", "m=2", "eps=0.5"],
    "learn-point": ["d=3", "alpha=0.45", "beta=0.45", "epsilon=2.0", "trials=10"],
    "check-drep": ["dmax=2", "hmax=4", "trials=10", "resolution=16"],
    "check-prep": ["d=2", "trials=150"],
    "boost": ["d=2", "alpha_target=1.0", "successes=5"],
    "shrink": ["d=2", "trials=100"],
    "extract": ["samples=150"],
    "e3sat": ["n=8", "m=20", "trials=50"],
    "sanitize": [],
    "formulas": [],
}
PARALLEL = ("learn-point", "shrink", "boost", "e3sat")


def test_criterion_11_determinism(tmp_path):
    for sub, overrides in SMALL_PARAMS.items():
        args = [sub, "--seed", "11"]
        for item in overrides:
            args += ["--param", item]
        first = tmp_path / f"{sub}-1.csv"
        second = tmp_path / f"{sub}-2.csv"
        assert main([*args, "--out", str(first)]) in (0, 2)
        assert main([*args, "--out", str(second)]) in (0, 2)
        assert filecmp.cmp(first, second, shallow=False), sub
        if sub in PARALLEL:
            parallel = tmp_path / f"{sub}-j2.csv"
            assert main([*args, "--jobs", "2", "--out", str(parallel)]) in (0, 2)
            assert filecmp.cmp(first, parallel, shallow=False), f"{sub} jobs=2"

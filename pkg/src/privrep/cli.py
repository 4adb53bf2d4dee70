"""Seeded experiment harness: `privrep <subcommand> [flags]` emitting CSV.

Every run is fully determined by (subcommand, parameters, master seed).  Trial
i draws its own generator from derive_seed(master, i), so reports are byte
identical across reruns and across --jobs settings: workers share nothing and
results merge in trial order.  Statistical pass criteria use a 3 sigma
Hoeffding slack, 3 sqrt(1 / (4 trials)); exact criteria use the tolerances
stated next to the metric.

Exit status: 0 all checks passed, 2 some check row failed, 1 usage or runtime
error.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .learner import (
    LearnerConfig,
    extract_representation,
    extraction_run_count,
    nonprivate_learner,
    ppac_learn,
    required_sample_size,
)
from .mechanism import ScoredCandidates, dp_verify, exp_mech_distribution, exp_mech_sample
from .model import (
    FAIL,
    ConceptClass,
    ConstantHypothesis,
    FiniteDistribution,
    LabeledDatabase,
    PointHypothesis,
    TruthTableHypothesis,
    derive_seed,
    generalization_error,
    make_rng,
    point_class,
    sample_database,
)
from .optimization import (
    bounded_check,
    e3sat_class_size,
    e3sat_problem,
    e3sat_family,
    opt_extraction_execution_count,
    private_optimize_distribution,
    random_formula,
    sanitize_problem,
    sanitize_quality,
    satisfied_fraction,
)
from .pointhash import ThresholdHashHypothesis, point_class_params, point_family
from .representation import (
    HypothesisClass,
    boost_beta,
    boost_oracle,
    lattice_minimax,
    majority_error_bound,
    majority_round_count,
    minimax_error,
    prep_falsify,
    shrink_draw_count,
    shrink_family,
    stress_member,
    stress_size,
    stress_suite,
)

__all__ = ["ExperimentConfig", "run_experiment", "emit_report", "main"]

# reserved derived-seed index for run-level state (e.g. the shrunk family);
# trial indices stay far below it
STATE_SEED_INDEX = 2**32

SCHEMAS = {
    "dp-verify": {"class_size": 5, "d": 2, "eps": "0.1,1.0", "m": 3},
    "learn-point": {"alpha": 0.3, "beta": 0.2, "d": 6, "epsilon": 1.0, "trials": 500},
    "check-drep": {"dmax": 4, "hmax": 16, "resolution": 64, "trials": 100},
    "check-prep": {"alpha": 0.25, "beta": 0.25, "d": 4, "trials": 5000},
    "boost": {"alpha_target": 0.25, "d": 3, "successes": 200},
    "shrink": {
        "beta": 0.5,
        "d": 3,
        "f_alpha": 0.25,
        "f_beta": 0.25,
        "gamma": 0.5,
        "trials": 2000,
    },
    "extract": {"alpha": 0.25, "beta": 0.25, "epsilon": 0.5, "m": 3, "samples": 500},
    "e3sat": {
        "alpha": 0.125,
        "beta": 0.25,
        "m": 50,
        "n": 20,
        "toy_eps": "1.0,2.0",
        "trials": 2000,
    },
    "sanitize": {"beta_hat": 0.5, "d": 2, "epsilon": 2.0, "k": 2},
    "formulas": {"alpha": 0.1, "beta": 0.25, "epsilon": 1.0, "gamma": 0.1, "size": 2.0},
}

# formulas fills its parameter columns per row; everything else repeats the
# resolved run parameters on every row
OWN_COLUMNS = {"formulas"}


@dataclass(frozen=True)
class ExperimentConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    master_seed: int = 0
    jobs: int = 1
    out: str | None = None


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _row(trial, seed, metric, value, bound=None, passed=None, **extra) -> dict:
    return {
        "trial": str(trial),
        "seed": str(seed),
        "metric": metric,
        "value": _fmt(value),
        "bound": _fmt(bound),
        "pass": "" if passed is None else ("1" if passed else "0"),
        "extra": {k: _fmt(v) for k, v in extra.items()},
    }


def _three_sigma(trials: int) -> float:
    return 3.0 * math.sqrt(1.0 / (4.0 * trials))


def _parse_float_list(raw: str, key: str) -> list:
    try:
        vals = [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"parameter {key} expects comma-separated floats, got {raw!r}")
    if not vals:
        raise ValueError(f"parameter {key} is empty")
    return vals


# ---------------------------------------------------------------------------
# per-trial workers; top level so process pools can pickle the entry point,
# with heavy shared state rebuilt deterministically (and cached) per process


@lru_cache(maxsize=8)
def _learn_point_state(d, alpha, beta, epsilon):
    family = point_family(d, alpha / 6.0, beta / 4.0)
    m = required_sample_size(alpha / 6.0, beta / 4.0, epsilon, family.size_bound)
    return family, m


def _learn_point_trial(params, master_seed, i, seed, rng):
    d = params["d"]
    family, m = _learn_point_state(d, params["alpha"], params["beta"], params["epsilon"])
    D = stress_member(d, int(rng.integers(stress_size(d))))
    c = PointHypothesis(d, int(rng.integers(1 << d)))
    S = sample_database(c, D, m, rng)
    cfg = LearnerConfig(params["alpha"], params["beta"], params["epsilon"], m, family)
    h = ppac_learn(cfg, S, rng)
    return (i, seed, generalization_error(c, h, D))


@lru_cache(maxsize=8)
def _shrink_state(d, f_alpha, f_beta, gamma, beta, master_seed):
    base = point_family(d, f_alpha, f_beta)
    m = math.ceil((4.0 / gamma) * (base.size_bound + math.log(1.0 / beta)))
    shrunk = shrink_family(
        base, d, m, beta, make_rng(derive_seed(master_seed, STATE_SEED_INDEX)), gamma=gamma
    )
    return base, shrunk, m


def _shrink_trial(params, master_seed, i, seed, rng):
    d, gamma = params["d"], params["gamma"]
    base, shrunk, m = _shrink_state(
        d, params["f_alpha"], params["f_beta"], gamma, params["beta"], master_seed
    )
    D = stress_member(d, int(rng.integers(stress_size(d))))
    c = PointHypothesis(d, int(rng.integers(1 << d)))
    S = sample_database(c, D, m, rng)

    def succeeds(h) -> bool:
        return h is not FAIL and generalization_error(c, h, D) <= 2.0 * gamma + 1e-12

    return (i, seed, succeeds(nonprivate_learner(base, S, gamma, rng)),
            succeeds(nonprivate_learner(shrunk, S, gamma, rng)))


@lru_cache(maxsize=8)
def _boost_state(d, alpha_target):
    T = majority_round_count(alpha_target)
    fam = boost_beta(point_family(d, 0.25, 0.25), 1.0 / (4.0 * T))
    return T, fam


def _boost_trial(params, master_seed, i, seed, rng):
    d = params["d"]
    T, fam = _boost_state(d, params["alpha_target"])
    D = stress_member(d, int(rng.integers(stress_size(d))))
    c = PointHypothesis(d, int(rng.integers(1 << d)))
    classes = [fam.sample(rng) for _ in range(T)]
    maj = boost_oracle(classes, c, D)
    if maj is FAIL:
        return (i, seed, None)
    return (i, seed, generalization_error(c, maj, D))


@lru_cache(maxsize=8)
def _e3sat_state(n, alpha, beta):
    return e3sat_family(n, alpha, beta)


def _e3sat_trial(params, master_seed, i, seed, rng):
    formula = random_formula(params["n"], params["m"], rng)
    fam = _e3sat_state(params["n"], params["alpha"], params["beta"])
    cls = fam.sample(rng)
    best = max(satisfied_fraction(formula, a) for a in cls)
    return (i, seed, best)


_TRIAL_FNS = {
    "learn-point": _learn_point_trial,
    "shrink": _shrink_trial,
    "boost": _boost_trial,
    "e3sat": _e3sat_trial,
}


def _trial_entry(task):
    name, items, master_seed, i = task
    seed = derive_seed(master_seed, i)
    return _TRIAL_FNS[name](dict(items), master_seed, i, seed, make_rng(seed))


def _map_trials(name, params, master_seed, n, jobs):
    items = tuple(sorted(params.items()))
    tasks = [(name, items, master_seed, i) for i in range(n)]
    if jobs <= 1:
        return [_trial_entry(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_trial_entry, tasks, chunksize=max(1, n // (jobs * 8))))


# ---------------------------------------------------------------------------
# subcommand runners: params -> (rows, extra column names)


def _run_dp_verify(params, master_seed, jobs):
    d, m, class_size = params["d"], params["m"], params["class_size"]
    if class_size < 1:
        raise ValueError("class_size must be >= 1")
    eps_list = _parse_float_list(params["eps"], "eps")
    rng = make_rng(derive_seed(master_seed, 0))
    n_tables = 2 ** (1 << d)
    picked = []
    while len(picked) < class_size:  # rejection keeps huge table spaces lazy
        t = int(rng.integers(0, n_tables))
        if t not in picked:
            picked.append(t)
    members = tuple(
        TruthTableHypothesis(d, tuple((t >> x) & 1 for x in range(1 << d)))
        for t in picked
    )
    universe = tuple((x, y) for x in range(1 << d) for y in (0, 1))

    rows = []
    excess = []
    for k, eps in enumerate(eps_list):
        def mech(records, eps=eps):
            sc = ScoredCandidates.from_learning(
                LabeledDatabase(d, records), members, eps
            )
            return exp_mech_distribution(sc)

        rep = dp_verify(mech, universe, m, eps)
        excess.append(rep.max_ln_ratio - eps)
        rows.append(_row(k, master_seed, "max_ln_ratio", rep.max_ln_ratio,
                         eps + 1e-9, rep.max_ln_ratio <= eps + 1e-9, epsilon=eps))
        rows.append(_row(k, master_seed, "additive_slack", rep.additive_slack_at_eps,
                         epsilon=eps))
    worst = max(excess)
    rows.append(_row("summary", master_seed, "max_excess", worst, 1e-9, worst <= 1e-9))
    return rows, ["epsilon"]


def _run_learn_point(params, master_seed, jobs):
    trials = params["trials"]
    if trials < 1:
        raise ValueError("trials must be >= 1")
    alpha, beta = params["alpha"], params["beta"]
    _, m = _learn_point_state(params["d"], alpha, beta, params["epsilon"])
    results = _map_trials("learn-point", params, master_seed, trials, jobs)
    rows = [
        _row(i, seed, "error_D", err, alpha, None, m=m) for (i, seed, err) in results
    ]
    errs = np.asarray([err for *_, err in results])
    rate = float((errs > alpha + 1e-12).mean())
    bound = beta + _three_sigma(trials)
    rows.append(_row("summary", master_seed, "failure_rate", rate, bound,
                     rate <= bound, m=m))
    rows.append(_row("summary", master_seed, "mean_error", float(errs.mean()), m=m))
    return rows, ["m"]


def _run_check_drep(params, master_seed, jobs):
    trials, dmax, hmax = params["trials"], params["dmax"], params["hmax"]
    resolution = params["resolution"]
    if not 1 <= dmax <= 6:
        raise ValueError("dmax must be in [1, 6]")
    if hmax < 1 or trials < 1 or resolution < 2:
        raise ValueError("hmax, trials >= 1 and resolution >= 2 required")
    rows = []
    analytic = [
        ("analytic_zero", 0.0, PointHypothesis(2, 0),
         HypothesisClass((PointHypothesis(2, 0), ConstantHypothesis(2, 1)))),
        ("analytic_one", 1.0, PointHypothesis(2, 1),
         HypothesisClass((ConstantHypothesis(2, 0),))),
        ("analytic_half", 0.5, PointHypothesis(1, 0),
         HypothesisClass((ConstantHypothesis(1, 0), ConstantHypothesis(1, 1)))),
    ]
    for k, (metric, target, c, H) in enumerate(analytic):
        v = minimax_error(c, H)
        rows.append(_row(f"exact{k}", master_seed, metric, v, target,
                         abs(v - target) <= 1e-9))
    gap_bound = 1.0 / resolution + 1e-6
    for i in range(trials):
        seed = derive_seed(master_seed, i)
        rng = make_rng(seed)
        d = int(rng.integers(1, dmax + 1))
        n_h = int(rng.integers(1, hmax + 1))
        tables = rng.integers(0, 2, size=(n_h, 1 << d))
        H = HypothesisClass(tuple(
            TruthTableHypothesis(d, tuple(int(b) for b in t)) for t in tables
        ))
        c = TruthTableHypothesis(d, tuple(int(b) for b in rng.integers(0, 2, size=1 << d)))
        gap = abs(minimax_error(c, H) - lattice_minimax(c, H, resolution))
        rows.append(_row(i, seed, "minimax_gap", gap, gap_bound, gap <= gap_bound,
                         d=d, h=n_h))
    gaps = [float(r["value"]) for r in rows if r["metric"] == "minimax_gap"]
    worst = max(gaps)
    rows.append(_row("summary", master_seed, "max_gap", worst, gap_bound,
                     worst <= gap_bound))
    return rows, ["d", "h"]


def _run_check_prep(params, master_seed, jobs):
    d, alpha, beta, trials = params["d"], params["alpha"], params["beta"], params["trials"]
    fam = point_family(d, alpha, beta)
    C = point_class(d)
    suite = stress_suite(d)
    rng = make_rng(derive_seed(master_seed, 0))
    verdict = prep_falsify(fam, C, alpha, beta, suite, trials, rng)
    bound = (1.0 - beta) - _three_sigma(trials)
    rows = []
    for ci in range(len(C)):
        v = float(verdict.coverage[ci].min())
        rows.append(_row(f"c{ci}", master_seed, "min_coverage", v, bound,
                         v + 1e-12 >= bound, concept=ci))
    rows.append(_row("summary", master_seed, "min_coverage", verdict.min_coverage,
                     bound, not verdict.falsified))

    M, p, tau = point_class_params(d, alpha, beta)
    if p * p <= 4096:
        pairs = tuple(itertools.product(range(p), range(p)))
        members = [ThresholdHashHypothesis(d, p, a, b, tau) for a, b in pairs]
        V = ThresholdHashHypothesis.batch_values(
            members, np.arange(1 << d, dtype=np.int64)
        ).astype(np.int64)
        marg_dev = int(np.abs(V.sum(axis=0) - tau * p).max())
        J = V.T @ V
        off = J[~np.eye(1 << d, dtype=bool)]
        joint_dev = int(np.abs(off - tau * tau).max())
        rows.append(_row("exact0", master_seed, "pairwise_marginal_dev", marg_dev, 0,
                         marg_dev == 0))
        rows.append(_row("exact1", master_seed, "pairwise_joint_dev", joint_dev, 0,
                         joint_dev == 0))
    return rows, ["concept"]


def _run_boost(params, master_seed, jobs):
    successes = params["successes"]
    if successes < 1:
        raise ValueError("successes must be >= 1")
    T, _ = _boost_state(params["d"], params["alpha_target"])
    attempts = 2 * successes
    results = _map_trials("boost", params, master_seed, attempts, jobs)
    bound = majority_error_bound(T)
    rows = []
    n_success = 0
    for (i, seed, err) in results:
        if err is None:
            rows.append(_row(i, seed, "oracle_fail", 1, T=T))
        else:
            n_success += 1
            rows.append(_row(i, seed, "majority_error", err, bound,
                             err <= bound + 1e-12, T=T))
    rows.append(_row("summary", master_seed, "n_success", n_success, successes,
                     n_success >= successes, T=T))
    return rows, ["T"]


def _run_shrink(params, master_seed, jobs):
    trials = params["trials"]
    if trials < 1:
        raise ValueError("trials must be >= 1")
    beta = params["beta"]
    base, shrunk, m = _shrink_state(
        params["d"], params["f_alpha"], params["f_beta"], params["gamma"], beta,
        master_seed,
    )
    t = shrink_draw_count(params["d"], m, beta)
    results = _map_trials("shrink", params, master_seed, trials, jobs)
    rows = []
    for (i, seed, ok_orig, ok_shrunk) in results:
        rows.append(_row(i, seed, "success_orig", int(ok_orig), m=m, t=t))
        rows.append(_row(i, seed, "success_shrunk", int(ok_shrunk), m=m, t=t))
    rate_orig = sum(r[2] for r in results) / trials
    rate_shrunk = sum(r[3] for r in results) / trials
    degradation = rate_orig - rate_shrunk
    bound = beta + _three_sigma(trials)
    rows.append(_row("summary", master_seed, "success_rate_orig", rate_orig, m=m, t=t))
    rows.append(_row("summary", master_seed, "success_rate_shrunk", rate_shrunk, m=m, t=t))
    rows.append(_row("summary", master_seed, "degradation", degradation, bound,
                     degradation <= bound, m=m, t=t))
    return rows, ["m", "t"]


def _extract_fixture(epsilon):
    members = (PointHypothesis(1, 0), PointHypothesis(1, 1))

    def A(db: LabeledDatabase, seed: int):
        sc = ScoredCandidates.from_learning(db, members, epsilon)
        return exp_mech_sample(sc, make_rng(seed))

    return members, A


def _run_extract(params, master_seed, jobs):
    m, epsilon = params["m"], params["epsilon"]
    alpha, beta, samples = params["alpha"], params["beta"], params["samples"]
    members, A = _extract_fixture(epsilon)
    universe = tuple((x, y) for x in (0, 1) for y in (0, 1))

    def mech(records):
        sc = ScoredCandidates.from_learning(LabeledDatabase(1, records), members, epsilon)
        return exp_mech_distribution(sc)

    rows = []
    rep = dp_verify(mech, universe, m, epsilon)
    rows.append(_row("dp", master_seed, "max_ln_ratio", rep.max_ln_ratio,
                     epsilon + 1e-9, rep.max_ln_ratio <= epsilon + 1e-9))

    # exact accuracy of the fixture on every stress (concept, distribution) pair
    C = point_class(1)
    for ci, c in enumerate(C):
        for di in range(stress_size(1)):
            D = stress_member(1, di)
            good = [h for h in members if generalization_error(c, h, D) <= alpha + 1e-12]
            acc = 0.0
            for combo in itertools.product(range(len(D)), repeat=m):
                w = math.prod(float(D.weights[j]) for j in combo)
                if w == 0.0:
                    continue
                records = tuple(
                    (int(D.elements[j]), c.evaluate(int(D.elements[j]))) for j in combo
                )
                dist = mech(records)
                acc += w * sum(dist.prob(h) for h in good)
            rows.append(_row(f"a{ci}.{di}", master_seed, "accuracy", acc, 0.5,
                             acc + 1e-12 >= 0.5, concept=ci, dist=di))

    rows.append(_row("exact0", master_seed, "K_plain",
                     extraction_run_count(m, epsilon)))
    rows.append(_row("exact1", master_seed, "K_scaled",
                     extraction_run_count(4, 0.5, "scaled", 0.125),
                     alpha=0.125, epsilon=0.5, m=4))

    F = extract_representation(A, 1, m, epsilon, mode="plain")
    rng = make_rng(derive_seed(master_seed, 0))
    verdict = prep_falsify(F, C, 0.25, 0.25, stress_suite(1), samples, rng)
    bound = 0.75 - _three_sigma(samples)
    for ci in range(len(C)):
        v = float(verdict.coverage[ci].min())
        rows.append(_row(f"c{ci}", master_seed, "min_coverage", v, bound,
                         v + 1e-12 >= bound, concept=ci))
    rows.append(_row("summary", master_seed, "falsified", int(verdict.falsified), 0,
                     not verdict.falsified))
    return rows, ["concept", "dist"]


def _run_e3sat(params, master_seed, jobs):
    trials = params["trials"]
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n, n_clauses = params["n"], params["m"]
    alpha, beta = params["alpha"], params["beta"]
    t = e3sat_class_size(alpha, beta)
    results = _map_trials("e3sat", params, master_seed, trials, jobs)
    target = 7.0 / 8.0 - alpha
    rows = [_row("exact0", master_seed, "class_size_t", t, t=t)]
    for (i, seed, best) in results:
        rows.append(_row(i, seed, "best_fraction", best, target, t=t))
    rate = sum(1 for *_, best in results if best + 1e-12 >= target) / trials
    bound = (1.0 - beta) - _three_sigma(trials)
    rows.append(_row("summary", master_seed, "success_rate", rate, bound,
                     rate >= bound, t=t))

    # exact toy: both routes to the selection distribution must agree
    toy_formula = ((1, 2, 3), (-1, -2, -3))
    problem = e3sat_problem(3)
    solutions = problem.solutions
    for k, eps in enumerate(_parse_float_list(params["toy_eps"], "toy_eps")):
        dist = private_optimize_distribution(problem, solutions, toy_formula, eps)
        weights = [
            math.exp(eps * len(toy_formula) * satisfied_fraction(toy_formula, a) / 2.0)
            for a in solutions
        ]
        total = sum(weights)
        gap = max(
            abs(dist.prob(a) - w / total) for a, w in zip(solutions, weights)
        )
        rows.append(_row(f"toy{k}", master_seed, "toy_dist_gap", gap, 1e-9,
                         gap <= 1e-9, epsilon=eps, n=3, m=len(toy_formula)))
    return rows, ["epsilon", "t"]


def _run_sanitize(params, master_seed, jobs):
    d, k = params["d"], params["k"]
    epsilon, beta_hat = params["epsilon"], params["beta_hat"]
    if d != 2 or k < 1:
        raise ValueError("the sanitize instance is fixed at d=2; k must be >= 1")
    half = TruthTableHypothesis(2, (1, 1, 0, 0))
    parity = TruthTableHypothesis(2, (0, 1, 0, 1))
    S = (0, 1, 2, 3)
    m = len(S)

    one_pred = sanitize_problem(ConceptClass("half", (half,)), k)
    drift = bounded_check(one_pred, m, scope="exhaustive")
    rows = [_row("exact0", master_seed, "bounded_max_drift", drift, 1.0 + 1e-9,
                 drift <= 1.0 + 1e-9)]

    problem = sanitize_problem(ConceptClass("half-parity", (half, parity)), k)
    solutions = problem.solutions
    qualities = [sanitize_quality(ConceptClass("hp", (half, parity)), S, f)
                 for f in solutions]
    best = max(qualities)
    rows.append(_row("exact1", master_seed, "best_quality", best, 1.0,
                     abs(best - 1.0) <= 1e-12))

    size = math.log(len(solutions))
    alpha_hat = (2.0 / (epsilon * m)) * math.log(len(solutions) / beta_hat)
    rows.append(_row("exact2", master_seed, "alpha_hat", alpha_hat))
    rows.append(_row("exact3", master_seed, "ratio", m / size))

    dist = private_optimize_distribution(problem, solutions, S, epsilon)
    good_mass = sum(
        dist.prob(f) for f, q in zip(solutions, qualities)
        if q + 1e-12 >= best - alpha_hat
    )
    bound = 1.0 - len(solutions) * math.exp(-epsilon * m * alpha_hat / 2.0)
    rows.append(_row("exact4", master_seed, "good_mass", good_mass, bound,
                     good_mass + 1e-12 >= bound))
    return rows, []


def _run_formulas(params, master_seed, jobs):
    a, b, e = params["alpha"], params["beta"], params["epsilon"]
    g, size = params["gamma"], params["size"]
    entries = [
        ("m_six_alpha", required_sample_size(a, b, e, size),
         {"alpha": a, "beta": b, "epsilon": e, "size": size}),
        ("m_gamma", required_sample_size(a, b, e, size, mode="gamma", gamma=g),
         {"beta": b, "epsilon": e, "gamma": g, "size": size}),
        ("point_M", point_class_params(4, 0.25, 0.25)[0],
         {"alpha": 0.25, "beta": 0.25, "d": 4}),
        ("boost_T", majority_round_count(0.25), {"alpha": 0.25}),
        ("e3sat_t", e3sat_class_size(0.125, 0.25), {"alpha": 0.125, "beta": 0.25}),
        ("extract_K_plain", extraction_run_count(3, 0.5), {"epsilon": 0.5, "m": 3}),
        ("extract_K_scaled", extraction_run_count(4, 0.5, "scaled", 0.125),
         {"alpha": 0.125, "epsilon": 0.5, "m": 4}),
        ("shrink_t", shrink_draw_count(4, 10, 0.5), {"beta": 0.5, "d": 4, "m": 10}),
        ("opt_Gamma", opt_extraction_execution_count(2, 0.5, 0.5, 0.25),
         {"beta": 0.5, "beta_hat": 0.25, "epsilon": 0.5, "m": 2}),
    ]
    rows = [
        _row(i, master_seed, metric, value, **cols)
        for i, (metric, value, cols) in enumerate(entries)
    ]
    return rows, ["beta_hat", "d", "m"]


RUNNERS = {
    "dp-verify": _run_dp_verify,
    "learn-point": _run_learn_point,
    "check-drep": _run_check_drep,
    "check-prep": _run_check_prep,
    "boost": _run_boost,
    "shrink": _run_shrink,
    "extract": _run_extract,
    "e3sat": _run_e3sat,
    "sanitize": _run_sanitize,
    "formulas": _run_formulas,
}


def _convert(default, raw, key):
    if not isinstance(raw, str):
        return raw
    try:
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        kind = "an integer" if isinstance(default, int) else "a number"
        raise ValueError(f"parameter {key} expects {kind}, got {raw!r}")
    return raw


def run_experiment(cfg: ExperimentConfig):
    """Resolve parameters, run the subcommand, and return (header, rows)."""
    if cfg.subcommand not in RUNNERS:
        raise ValueError(f"unknown subcommand {cfg.subcommand!r}")
    if cfg.jobs < 1:
        raise ValueError("jobs must be >= 1")
    schema = SCHEMAS[cfg.subcommand]
    params = dict(schema)
    for key, raw in cfg.params.items():
        if key not in schema:
            raise ValueError(
                f"unknown parameter {key!r} for {cfg.subcommand}; "
                f"known: {', '.join(sorted(schema))}"
            )
        params[key] = _convert(schema[key], raw, key)
    rows, extra_cols = RUNNERS[cfg.subcommand](params, cfg.master_seed, cfg.jobs)
    param_cols = sorted(set(schema) | set(extra_cols))
    base = (
        {} if cfg.subcommand in OWN_COLUMNS
        else {k: _fmt(v) for k, v in params.items()}
    )
    out = []
    for r in rows:
        cols = dict(base)
        cols.update(r["extra"])
        out.append(
            [cfg.subcommand, r["trial"], r["seed"]]
            + [cols.get(c, "") for c in param_cols]
            + [r["metric"], r["value"], r["bound"], r["pass"]]
        )
    header = ["experiment", "trial", "seed", *param_cols, "metric", "value", "bound", "pass"]
    return header, out


def emit_report(table, path=None) -> None:
    """Write (header, rows) as CSV to path, or stdout when path is None."""
    header, rows = table
    if path is None:
        _write_csv(sys.stdout, header, rows)
    else:
        with open(path, "w", newline="") as fh:
            _write_csv(fh, header, rows)


def _write_csv(fh, header, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _u64(raw: str) -> int:
    value = int(raw)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privrep",
        description="Seeded verification experiments for private learning; CSV out.",
    )
    parser.add_argument("subcommand", choices=sorted(SCHEMAS))
    parser.add_argument("--config", default=None,
                        help="key=value parameter file, one per line, # comments")
    parser.add_argument("--seed", type=_u64, default=0, help="master seed (u64)")
    parser.add_argument("--out", default=None, help="CSV path (default: stdout)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for trial-parallel subcommands")
    parser.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="override one parameter; repeatable; wins over --config")
    return parser


def _read_config_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        params = _read_config_file(ns.config) if ns.config else {}
        for item in ns.param:
            if "=" not in item:
                raise ValueError(f"--param expects key=value, got {item!r}")
            key, value = item.split("=", 1)
            params[key.strip()] = value.strip()
        cfg = ExperimentConfig(
            subcommand=ns.subcommand,
            params=params,
            master_seed=ns.seed,
            jobs=ns.jobs,
            out=ns.out,
        )
        table = run_experiment(cfg)
        emit_report(table, cfg.out)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"privrep: error: {exc}", file=sys.stderr)
        return 1
    return 2 if any(row[-1] == "0" for row in table[1]) else 0


if __name__ == "__main__":
    sys.exit(main())

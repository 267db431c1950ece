"""Seeded property suites behind the ``verify`` command.

Each suite is a list of (name, check) pairs run with a fixed seed;
checks return None on success and a message on failure.
"""

from __future__ import annotations

import numpy as np

from .generators import (CATALOG_NAMES, FiniteDistribution, catalog,
                         mutual_information)
from .learning import (LearnerConfig, accuracy, check_tv_accuracy_bound,
                       learn_erm, learn_generative, lipschitz_constant)
from .mechanism import (default_assignments, exact_ex_ante_payment,
                        fantasy_payment, pairing_payment)
from .priors import FiniteJoint, eq1_joint, pushforward, sample_tasks
from .scoring import Tabular, bregman_gap, clamp_to_domain, ideal_finite
from .strategies import (StrategyProfile, random_oblivious_profile,
                         random_profile, truth_profile)

SUITE_NAMES = ("identities", "bounds", "learning")


def random_full_support_joint(rng: np.random.Generator,
                              nx: int | None = None,
                              ny: int | None = None) -> FiniteJoint:
    """Random joint with every cell bounded away from zero."""
    nx = nx if nx is not None else int(rng.integers(3, 6))
    ny = ny if ny is not None else int(rng.integers(3, 6))
    p = rng.dirichlet(np.ones(nx * ny)).reshape(nx, ny)
    p = 0.9 * p + 0.1 / (nx * ny)
    return FiniteJoint(p / p.sum())


def random_clamped_scorer(gen, nx: int, ny: int,
                          rng: np.random.Generator) -> Tabular:
    return Tabular(gen.clamp(rng.normal(0.0, 1.0, size=(nx, ny))))


def _suite_identities(rng: np.random.Generator, corrupt: bool = False):
    checks = []

    def ideal_payment_equals_mi():
        for _ in range(20):
            joint = random_full_support_joint(rng)
            for name in CATALOG_NAMES:
                gen = catalog(name)
                k = ideal_finite(gen, joint)
                if corrupt:
                    k = Tabular(k.values + 0.1)
                    k = clamp_to_domain(gen, k)
                pay = exact_ex_ante_payment(gen, k, joint,
                                            truth_profile(joint.nx, joint.ny))
                mi = mutual_information(gen, joint)
                if abs(pay - mi) > 1e-9:
                    return (f"{name}: ideal payment {pay} != "
                            f"mutual information {mi}")
        return None

    def report_distribution_identity():
        # Payment under (theta, P) equals payment under truth on the
        # pushforward theta o P, for any scorer.
        for _ in range(20):
            joint = random_full_support_joint(rng)
            gen = catalog("kl")
            profile = random_profile(joint.nx, rng) if joint.nx == joint.ny \
                else StrategyProfile(random_profile(joint.nx, rng).a,
                                     random_profile(joint.ny, rng).b)
            k = random_clamped_scorer(gen, joint.nx, joint.ny, rng)
            lhs = exact_ex_ante_payment(gen, k, joint, profile)
            pushed = pushforward(joint, profile)
            rhs = exact_ex_ante_payment(gen, k, pushed,
                                        truth_profile(joint.nx, joint.ny))
            if abs(lhs - rhs) > 1e-12:
                return f"pushforward identity off by {abs(lhs - rhs)}"
        return None

    def tv_agreement_reduction():
        # With the total-variation generator the conjugate is the
        # identity, so the payment is score(bonus) - score(penalty).
        gen = catalog("total_variation")
        joint = eq1_joint()
        k = ideal_finite(gen, joint)
        for _ in range(200):
            x, y = sample_tasks(joint, 5, rng)
            aa, ab = default_assignments(5)
            ledger = pairing_payment(gen, k, x, y, aa, ab)
            direct = (float(k.evaluate(x[aa.bonus], y[aa.bonus]))
                      - float(k.evaluate(x[aa.penalty_a], y[aa.penalty_b])))
            if ledger.alice != direct:
                return f"reduction mismatch: {ledger.alice} vs {direct}"
        return None

    def bregman_gap_matches_difference():
        for name in ("kl", "chi_squared"):
            gen = catalog(name)
            for _ in range(20):
                joint = random_full_support_joint(rng)
                k = random_clamped_scorer(gen, joint.nx, joint.ny, rng)
                gap = bregman_gap(gen, k, joint).value
                diff = (mutual_information(gen, joint)
                        - exact_ex_ante_payment(gen, k, joint,
                                                truth_profile(joint.nx,
                                                              joint.ny)))
                if abs(gap - diff) > 1e-9:
                    return f"{name}: gap {gap} vs difference {diff}"
        return None

    def fantasy_truth_is_mi():
        for name in CATALOG_NAMES:
            gen = catalog(name)
            joint = eq1_joint()
            fp = fantasy_payment(gen, joint, truth_profile(3))
            mi = mutual_information(gen, joint)
            if abs(fp - mi) > 1e-12:
                return f"{name}: fantasy {fp} vs mi {mi}"
        return None

    checks.append(("ideal scorer attains mutual information",
                   ideal_payment_equals_mi))
    checks.append(("payment depends only on the report distribution",
                   report_distribution_identity))
    checks.append(("total-variation payment reduces to score difference",
                   tv_agreement_reduction))
    checks.append(("Bregman gap equals the payment shortfall",
                   bregman_gap_matches_difference))
    checks.append(("truth-telling fantasy payment is the mutual information",
                   fantasy_truth_is_mi))
    return checks


def _suite_bounds(rng: np.random.Generator):
    checks = []

    def payment_never_exceeds_mi():
        for _ in range(200):
            joint = random_full_support_joint(rng)
            gen = catalog(str(rng.choice(list(CATALOG_NAMES))))
            profile = StrategyProfile(random_profile(joint.nx, rng).a,
                                      random_profile(joint.ny, rng).b)
            k = random_clamped_scorer(gen, joint.nx, joint.ny, rng)
            pay = exact_ex_ante_payment(gen, k, joint, profile)
            if pay > mutual_information(gen, joint) + 1e-9:
                return f"payment {pay} exceeds mutual information"
        return None

    def oblivious_profiles_earn_nothing():
        for _ in range(50):
            joint = random_full_support_joint(rng)
            gen = catalog(str(rng.choice(list(CATALOG_NAMES))))
            profile = random_oblivious_profile(joint.nx, rng)
            if joint.nx != joint.ny:
                profile = StrategyProfile(profile.a,
                                          random_profile(joint.ny, rng).b)
            k = random_clamped_scorer(gen, joint.nx, joint.ny, rng)
            pay = exact_ex_ante_payment(gen, k, joint, profile)
            if pay > 1e-9:
                return f"oblivious profile earned {pay}"
        return None

    def variational_value_one_sided():
        for _ in range(200):
            joint = random_full_support_joint(rng)
            gen = catalog(str(rng.choice(list(CATALOG_NAMES))))
            k = random_clamped_scorer(gen, joint.nx, joint.ny, rng)
            pay = exact_ex_ante_payment(gen, k, joint,
                                        truth_profile(joint.nx, joint.ny))
            if pay > mutual_information(gen, joint) + 1e-9:
                return "variational value overestimates the divergence"
        return None

    def perturbation_accuracy_bound():
        gen = catalog("kl")
        alpha = 0.015
        c_lip = lipschitz_constant(gen, alpha)
        for _ in range(20):
            joint = random_full_support_joint(rng, 3, 3)
            if np.any((joint.p <= 2 * alpha) & (joint.p != 0)):
                continue
            noise = rng.normal(0, 1, size=joint.p.shape)
            noise -= noise.mean()
            noise *= 0.004 / max(np.abs(noise).sum(), 1e-12)
            q = joint.p + noise
            if np.any(q <= 0):
                continue
            perturbed = FiniteJoint(q / q.sum())
            if not check_tv_accuracy_bound(gen, joint, perturbed,
                                           alpha, c_lip):
                return "perturbation bound violated"
        return None

    checks.append(("no strategy and scorer beats the mutual information",
                   payment_never_exceeds_mi))
    checks.append(("oblivious profiles earn at most zero",
                   oblivious_profiles_earn_nothing))
    checks.append(("scorers never overestimate the divergence",
                   variational_value_one_sided))
    checks.append(("perturbed-prior accuracy bound holds",
                   perturbation_accuracy_bound))
    return checks


def _suite_learning(rng: np.random.Generator):
    checks = []

    def exact_frequency_recovery():
        counts = np.array([[5, 2, 3], [2, 1, 2], [3, 2, 5]])
        joint = FiniteJoint(counts / counts.sum())
        xs = np.repeat(np.arange(3), counts.sum(axis=1))
        ys = np.concatenate([np.repeat(np.arange(3), row) for row in counts])
        for name in CATALOG_NAMES:
            gen = catalog(name)
            learned = learn_generative(gen, xs, ys, 3, 3)
            ideal = Tabular(gen.clamp(ideal_finite(gen, joint).values))
            if not np.array_equal(learned.values, ideal.values):
                return f"{name}: learned scorer differs from the ideal"
        return None

    def erm_tabular_recovery():
        gen = catalog("kl")
        joint = eq1_joint()
        counts = np.array([[5, 2, 3], [2, 1, 2], [3, 2, 5]])
        third_x = np.repeat(np.arange(3), counts.sum(axis=1))
        third_y = np.concatenate([np.repeat(np.arange(3), r) for r in counts])
        # Third 1 x-reports cross-pair with third 2 y-reports; order the
        # copies so the cross pairs hit the product-of-marginals counts.
        prod_counts = np.array([[4, 2, 4], [2, 1, 2], [4, 2, 4]])
        y2 = np.concatenate([np.repeat(np.arange(3), r) for r in prod_counts])
        xs = np.concatenate([third_x, third_x, third_x])
        ys = np.concatenate([third_y, third_y, y2])
        learned = learn_erm(gen, xs, ys, LearnerConfig(method="erm"), 3, 3)
        ideal = ideal_finite(gen, joint)
        if not np.allclose(learned.values, ideal.values, atol=1e-12):
            return "ERM tabular scorer differs from the ideal"
        return None

    def generative_consistency():
        gen = catalog("kl")
        joint = eq1_joint()
        med = []
        for m_l in (1000, 10000):
            gaps = []
            for _ in range(5):
                x, y = sample_tasks(joint, m_l, rng)
                k = learn_generative(gen, x, y, 3, 3)
                gaps.append(accuracy(gen, k, joint).value)
            med.append(float(np.median(gaps)))
        if med[1] > med[0] + 1e-9:
            return f"median accuracy grew with samples: {med}"
        if med[1] > 0.05:
            return f"accuracy {med[1]} too large at m_L = 10^4"
        return None

    checks.append(("exact-frequency sample recovers the ideal scorer",
                   exact_frequency_recovery))
    checks.append(("ERM tabular class recovers the ideal on exact thirds",
                   erm_tabular_recovery))
    checks.append(("generative learner accuracy shrinks with samples",
                   generative_consistency))
    return checks


def run_suite(name: str, seed: int = 20240701,
              corrupt: bool = False) -> list[tuple[str, str | None]]:
    """Run one suite; returns (check name, failure message or None) pairs."""
    rng = np.random.default_rng(seed)
    if name == "identities":
        checks = _suite_identities(rng, corrupt=corrupt)
    elif name == "bounds":
        checks = _suite_bounds(rng)
    elif name == "learning":
        checks = _suite_learning(rng)
    else:
        raise ValueError(f"unknown suite {name!r}; expected one of "
                         f"{SUITE_NAMES}")
    results = []
    for check_name, fn in checks:
        try:
            results.append((check_name, fn()))
        except Exception as e:  # a crashed check is a failed check
            results.append((check_name, f"{type(e).__name__}: {e}"))
    return results

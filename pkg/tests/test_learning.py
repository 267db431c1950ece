import numpy as np
import pytest

from pairmech import (DegenerateInputError, EmpiricalJoint,
                      FiniteDistribution, FiniteJoint, GaussianJoint,
                      InputError, LearnerConfig, UnsupportedError, accuracy,
                      catalog, check_tv_accuracy_bound, eq1_joint,
                      ideal_finite, learn_erm, learn_generative,
                      lipschitz_constant, mutual_information, tv_distance)
from pairmech.learning import gaussian_variational_value
from pairmech.priors import sample_tasks
from pairmech.scoring import Quadratic, Tabular

COUNTS_25 = np.array([[5, 2, 3], [2, 1, 2], [3, 2, 5]])


def _fixture_reports():
    xs = np.repeat(np.arange(3), COUNTS_25.sum(axis=1))
    ys = np.concatenate([np.repeat(np.arange(3), row) for row in COUNTS_25])
    return xs, ys


def test_learner_config_validation():
    with pytest.raises(InputError):
        LearnerConfig(method="bayes")
    with pytest.raises(InputError):
        LearnerConfig(functional_class="spline")
    with pytest.raises(InputError):
        LearnerConfig(coefficient_bound=0.0)


def test_empirical_joint():
    xs, ys = _fixture_reports()
    emp = EmpiricalJoint.from_reports(xs, ys, 3, 3)
    assert np.array_equal(emp.counts, COUNTS_25)
    assert emp.frequencies.sum() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DegenerateInputError):
        EmpiricalJoint.from_reports([], [], 3, 3)
    with pytest.raises(InputError):
        EmpiricalJoint(np.array([[0.5, 0.5]]))


def test_generative_exact_frequency_matches_ideal():
    xs, ys = _fixture_reports()
    empirical = FiniteJoint(COUNTS_25 / 25)
    for name in ("total_variation", "kl", "chi_squared",
                 "squared_hellinger"):
        gen = catalog(name)
        learned = learn_generative(gen, xs, ys, 3, 3)
        reference = Tabular(gen.clamp(ideal_finite(gen, empirical).values))
        assert np.array_equal(learned.values, reference.values)


def test_generative_single_sample():
    gen = catalog("kl")
    k = learn_generative(gen, [1], [2], 3, 3)
    assert np.all(np.isfinite(k.values))
    assert k.values[1, 2] == pytest.approx(1.0, abs=1e-12)  # ratio 1
    assert np.count_nonzero(k.values) == 1


def test_generative_zero_ratio_cells_score_zero():
    # one cell never observed jointly though both marginals support it
    xs = np.array([0, 0, 1, 1, 0, 1])
    ys = np.array([0, 1, 0, 0, 0, 1])
    gen = catalog("kl")
    k = learn_generative(gen, xs, ys, 2, 2)
    assert np.all(np.isfinite(k.values))


def test_erm_tabular_exact_thirds_recover_ideal():
    gen = catalog("kl")
    xs, ys = _fixture_reports()
    prod_counts = np.array([[4, 2, 4], [2, 1, 2], [4, 2, 4]])
    y2 = np.concatenate([np.repeat(np.arange(3), r) for r in prod_counts])
    all_x = np.concatenate([xs, xs, xs])
    all_y = np.concatenate([ys, ys, y2])
    k = learn_erm(gen, all_x, all_y, LearnerConfig(method="erm"), 3, 3)
    assert np.allclose(k.values, ideal_finite(gen, eq1_joint()).values,
                       atol=1e-12)


def test_erm_needs_three_samples():
    with pytest.raises(InputError):
        learn_erm(catalog("kl"), [0, 1], [1, 0], LearnerConfig(method="erm"))


def test_erm_quadratic_rejects_bounded_domains():
    cfg = LearnerConfig(method="erm", functional_class="quadratic")
    with pytest.raises(UnsupportedError):
        learn_erm(catalog("total_variation"), np.zeros(9), np.zeros(9), cfg)


def test_erm_quadratic_objective_monotone():
    g = GaussianJoint(0.0, 1.0, 4.0)
    gen = catalog("kl")
    cfg = LearnerConfig(method="erm", functional_class="quadratic")
    rng = np.random.default_rng(21)
    x, y = sample_tasks(g, 3000, rng)
    k = learn_erm(gen, x, y, cfg)
    # J at the zero scorer (the solver start) is -E[phi_star(0)] = -1/e
    n = x.size // 3
    j_final = (np.mean(np.asarray(k.evaluate(x[:n], y[:n])))
               - np.mean(gen.phi_star(np.asarray(
                   k.evaluate(x[n:2 * n], y[2 * n:3 * n])))))
    assert j_final >= -np.exp(-1.0)


def test_accuracy_ideal_is_zero():
    gen = catalog("kl")
    joint = eq1_joint()
    gap = accuracy(gen, ideal_finite(gen, joint), joint)
    assert gap.value == pytest.approx(0.0, abs=1e-12)


def test_accuracy_constant_scorer_pays_nothing():
    gen = catalog("kl")
    joint = eq1_joint()
    k = Tabular(np.ones((3, 3)))  # the subgradient at ratio 1
    gap = accuracy(gen, k, joint)
    assert gap.value == pytest.approx(mutual_information(gen, joint),
                                      abs=1e-12)


def test_accuracy_gaussian_quadrature():
    gen = catalog("kl")
    g = GaussianJoint(0.0, 1.0, 4.0)
    k = Quadratic(c_0=1.0)  # ratio-blind scorer pays zero
    gap = accuracy(gen, k, g)
    assert gap.value == pytest.approx(mutual_information(gen, g), abs=1e-6)


def test_gaussian_quadrature_accuracy():
    gen = catalog("kl")
    g = GaussianJoint(0.0, 1.0, 4.0)
    from pairmech import ideal_gaussian
    v = gaussian_variational_value(gen, ideal_gaussian(gen, g), g)
    assert v == pytest.approx(mutual_information(gen, g), abs=1e-9)


def test_tv_distance_conventions():
    p = FiniteDistribution([1.0, 0.0])
    q = FiniteDistribution([0.0, 1.0])
    assert tv_distance(p, p) == 0.0
    assert tv_distance(p, q) == 1.0
    assert tv_distance(p, q, halved=False) == 2.0
    joint = eq1_joint()
    prod = np.outer(joint.marginal_x, joint.marginal_y)
    assert tv_distance(FiniteDistribution(joint.p.ravel()),
                       FiniteDistribution(prod.ravel())) == \
        pytest.approx(0.08, abs=1e-12)


def test_lipschitz_constant():
    gen = catalog("kl")
    alpha = 0.015
    c = lipschitz_constant(gen, alpha)
    assert c == pytest.approx(1 + np.log(1 / alpha), abs=1e-12)


def test_tv_accuracy_bound_trivial_and_shift():
    gen = catalog("kl")
    joint = eq1_joint()
    alpha = 0.015
    c_l = lipschitz_constant(gen, alpha)
    assert check_tv_accuracy_bound(gen, joint, joint, alpha, c_l)
    # single-cell mass shift of 0.0025 gives un-halved delta 0.005
    p = joint.p.copy()
    p[0, 0] += 0.0025
    p[2, 2] -= 0.0025
    perturbed = FiniteJoint(p)
    assert check_tv_accuracy_bound(gen, joint, perturbed, alpha, c_l)


def test_tv_accuracy_bound_preconditions():
    gen = catalog("kl")
    joint = eq1_joint()
    alpha = 0.015
    c_l = lipschitz_constant(gen, alpha)
    with pytest.raises(InputError):
        # a cell mass inside (0, 2*alpha] violates the cell condition
        check_tv_accuracy_bound(gen, FiniteJoint(np.array(
            [[0.02, 0.48], [0.3, 0.2]])), joint, alpha, c_l)
    with pytest.raises(InputError):
        check_tv_accuracy_bound(gen, joint, joint, alpha, c_l * 0.5)
    far = FiniteJoint(np.full((3, 3), 1 / 9))
    with pytest.raises(InputError):
        check_tv_accuracy_bound(gen, joint, far, alpha, c_l)

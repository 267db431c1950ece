import numpy as np
import pytest

from pairmech import (DawidSkeneModel, DomainError, FiniteDistribution,
                      FiniteJoint, GaussianJoint, InputError, builtin_prior,
                      catalog, eq1_joint, independent_joint, is_fine_grained,
                      is_stochastic_relevant, is_strictly_correlated,
                      marginals, mutual_information, pushforward, ratio,
                      ratio_matrix, sample_tasks)
from pairmech.strategies import (StrategyProfile, oblivious, permutation,
                                 random_profile, truth_profile)


def test_eq1_marginals():
    mx, my = marginals(eq1_joint())
    assert np.allclose(mx.weights, [0.4, 0.2, 0.4], atol=1e-12)
    assert np.allclose(my.weights, [0.4, 0.2, 0.4], atol=1e-12)


def test_eq1_ratio_values():
    joint = eq1_joint()
    assert ratio(joint, 0, 0) == pytest.approx(1.25, abs=1e-12)
    assert ratio(joint, 0, 2) == pytest.approx(0.75, abs=1e-12)
    assert ratio(joint, 1, 1) == pytest.approx(1.00, abs=1e-12)


def test_independent_ratio_is_one():
    joint = independent_joint([0.4, 0.2, 0.4], [0.3, 0.3, 0.4])
    assert np.allclose(ratio_matrix(joint), 1.0, atol=1e-12)


def test_gaussian_ratio_at_center():
    g = GaussianJoint(0.0, 1.0, 4.0)
    assert ratio(g, 0.0, 0.0) == pytest.approx(np.sqrt(25 / 24), abs=1e-12)


def test_gaussian_ratio_matches_density_quotient():
    g = GaussianJoint(0.25, 1.5, 2.0)
    s, t, m0 = g.sigma2, g.tau2, g.m0
    cov = np.array([[s + t, s], [s, s + t]])
    ci = np.linalg.inv(cov)
    det = np.linalg.det(cov)
    rng = np.random.default_rng(5)
    pts = rng.normal(m0, 2.5, size=(100, 2))
    d = pts - m0
    joint_pdf = np.exp(-0.5 * np.einsum("ni,ij,nj->n", d, ci, d)) \
        / (2 * np.pi * np.sqrt(det))
    prod_pdf = np.exp(-(d[:, 0] ** 2 + d[:, 1] ** 2) / (2 * (s + t))) \
        / (2 * np.pi * (s + t))
    assert np.allclose(ratio(g, pts[:, 0], pts[:, 1]),
                       joint_pdf / prod_pdf, rtol=1e-9)


def test_ratio_averages_to_one_under_product():
    rng = np.random.default_rng(9)
    for _ in range(20):
        p = rng.dirichlet(np.ones(12)).reshape(3, 4)
        p = 0.9 * p + 0.1 / 12
        joint = FiniteJoint(p / p.sum())
        prod = np.outer(joint.marginal_x, joint.marginal_y)
        assert np.sum(prod * ratio_matrix(joint)) == pytest.approx(1.0, abs=1e-12)


def test_structural_classifiers_on_eq1():
    joint = eq1_joint()
    assert is_stochastic_relevant(joint)
    assert not is_fine_grained(joint)       # ratio(1,0) == ratio(0,1) == 1
    assert not is_strictly_correlated(joint)  # det == 0


def test_classifiers_on_constructed_cases():
    prod = independent_joint([0.4, 0.2, 0.4], [0.4, 0.2, 0.4])
    assert not is_stochastic_relevant(prod)
    skew = FiniteJoint(np.array([[0.30, 0.05, 0.05],
                                 [0.02, 0.25, 0.08],
                                 [0.04, 0.06, 0.15]]))
    assert is_strictly_correlated(skew)
    assert is_fine_grained(skew)
    with pytest.raises(InputError):
        is_strictly_correlated(FiniteJoint(np.full((2, 3), 1 / 6)))


def test_duplicated_rows_break_relevance():
    p = eq1_joint().p.copy()
    p[1] = p[0]
    joint = FiniteJoint(p / p.sum())
    assert not is_stochastic_relevant(joint)


def test_sampling_reproducible_and_consistent():
    joint = eq1_joint()
    x1, y1 = sample_tasks(joint, 1000, np.random.default_rng(42))
    x2, y2 = sample_tasks(joint, 1000, np.random.default_rng(42))
    assert np.array_equal(x1, x2) and np.array_equal(y1, y2)
    x, y = sample_tasks(joint, 100_000, np.random.default_rng(1))
    freq = np.zeros((3, 3))
    np.add.at(freq, (x, y), 1)
    assert np.max(np.abs(freq / 100_000 - joint.p)) < 0.01


def test_gaussian_sampling_covariance():
    g = GaussianJoint(0.0, 1.0, 4.0)
    x, y = sample_tasks(g, 100_000, np.random.default_rng(2))
    cov = np.cov(x, y)
    expected = np.array([[5.0, 1.0], [1.0, 5.0]])
    assert np.max(np.abs(cov - expected) / expected[0, 0]) < 0.05


def test_pushforward_identities():
    joint = eq1_joint()
    assert np.allclose(pushforward(joint, truth_profile(3)).p, joint.p,
                       atol=1e-15)
    swap = permutation([2, 1, 0])
    pushed = pushforward(joint, StrategyProfile(swap, swap))
    assert np.allclose(pushed.p, joint.p, atol=1e-12)  # symmetric fixture
    uni = oblivious(FiniteDistribution(np.full(3, 1 / 3)))
    both = pushforward(joint, StrategyProfile(uni, uni))
    assert np.allclose(both.p, 1 / 9, atol=1e-12)


def test_pushforward_composes():
    rng = np.random.default_rng(17)
    joint = eq1_joint()
    for _ in range(20):
        p1 = random_profile(3, rng)
        p2 = random_profile(3, rng)
        composed = StrategyProfile(
            type(p1.a)(p1.a.matrix @ p2.a.matrix),
            type(p1.b)(p1.b.matrix @ p2.b.matrix))
        lhs = pushforward(joint, composed)
        rhs = pushforward(pushforward(joint, p1), p2)
        assert np.allclose(lhs.p, rhs.p, atol=1e-12)


def test_data_processing_never_gains():
    rng = np.random.default_rng(23)
    joint = eq1_joint()
    gen = catalog("kl")
    mi = mutual_information(gen, joint)
    for _ in range(100):
        pushed = pushforward(joint, random_profile(3, rng))
        assert mutual_information(gen, pushed) <= mi + 1e-9


def test_serialization_round_trip():
    joint = eq1_joint()
    assert np.array_equal(FiniteJoint.from_text(joint.to_text()).p, joint.p)
    g = GaussianJoint(0.5, 1.0, 4.0)
    g2 = GaussianJoint.from_text(g.to_text())
    assert (g2.m0, g2.sigma2, g2.tau2) == (g.m0, g.sigma2, g.tau2)


def test_dawid_skene_model():
    prior = FiniteDistribution([0.5, 0.5])
    conf = np.array([[0.9, 0.1], [0.2, 0.8]])
    model = DawidSkeneModel(prior, (conf, conf, conf))
    assert model.n_agents == 3
    aj = model.agent_label_joint(0)
    # column y of aj is prior[y] * confusion row y
    assert aj.p[0, 0] == pytest.approx(0.45, abs=1e-12)
    assert aj.p[1, 1] == pytest.approx(0.40, abs=1e-12)
    z, reports = model.sample(5000, np.random.default_rng(3))
    assert reports.shape == (3, 5000)
    agree = np.mean(reports[0] == z)
    assert 0.8 < agree < 0.9  # diagonal weight 0.9/0.8


def test_zero_product_marginal_rejected():
    flagged = FiniteJoint(np.diag([0.5, 0.5, 0.0]))
    assert flagged.flagged
    with pytest.raises(DomainError):
        ratio(flagged, 0, 2)
    with pytest.raises(DomainError):
        ratio_matrix(flagged)


def test_builtin_priors():
    assert np.allclose(builtin_prior("eq1").p, eq1_joint().p)
    with pytest.raises(InputError):
        builtin_prior("nope")

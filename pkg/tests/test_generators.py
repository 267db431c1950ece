import numpy as np
import pytest

from pairmech import (AbsoluteContinuityError, DomainError, FiniteDistribution,
                      InputError, catalog, divergence, mutual_information,
                      variational_value)
from pairmech.priors import eq1_joint

ALL_NAMES = ("total_variation", "kl", "chi_squared", "squared_hellinger")


def test_catalog_names_and_unknown():
    for name in ALL_NAMES:
        assert catalog(name).name == name
    with pytest.raises(InputError):
        catalog("renyi")


def test_phi_normalization():
    for name in ALL_NAMES:
        assert catalog(name).phi(1.0) == pytest.approx(0.0, abs=1e-15)


def test_fenchel_young_inequality():
    # phi(a) + phi_star(b) >= a*b everywhere, equality at b in subgradient(a)
    rng = np.random.default_rng(3)
    for name in ALL_NAMES:
        gen = catalog(name)
        for a in rng.uniform(0.05, 4.0, size=50):
            b = gen.subgradient_mid(a)
            b = float(gen.clamp(b))
            lhs = float(gen.phi(a)) + float(gen.phi_star(b))
            assert lhs >= a * b - 1e-9
            if gen.in_conj_domain(gen.subgradient_mid(a)):
                assert lhs == pytest.approx(a * b, abs=1e-9)


def test_tv_subgradient_interval_at_one():
    gen = catalog("total_variation")
    assert gen.subgradient(1.0) == (-0.5, 0.5)
    assert gen.subgradient_mid(1.0) == 0.0
    assert gen.subgradient(2.0) == (0.5, 0.5)
    assert gen.subgradient(0.5) == (-0.5, -0.5)


def test_kl_subgradient_rejects_zero():
    with pytest.raises(DomainError):
        catalog("kl").subgradient(0.0)
    with pytest.raises(DomainError):
        catalog("squared_hellinger").subgradient(0.0)


def test_conjugate_domains():
    tv = catalog("total_variation")
    assert tv.conj_domain == (-0.5, 0.5)
    assert not tv.in_conj_domain(0.6)
    hel = catalog("squared_hellinger")
    assert hel.in_conj_domain(0.999)
    assert not hel.in_conj_domain(1.0)  # open upper bound
    assert float(hel.clamp(1.2)) < 1.0


def test_phi_star_rejects_out_of_domain():
    with pytest.raises(DomainError):
        catalog("total_variation").phi_star(0.7)


def test_divergence_eq1_values():
    joint = eq1_joint()
    p = FiniteDistribution(joint.p.ravel())
    q = FiniteDistribution(np.outer(joint.marginal_x, joint.marginal_y).ravel())
    assert divergence(catalog("kl"), p, q) == pytest.approx(0.0202137, abs=1e-6)
    assert divergence(catalog("total_variation"), p, q) == pytest.approx(0.08, abs=1e-12)
    assert divergence(catalog("chi_squared"), p, q) == pytest.approx(0.04, abs=1e-12)


def test_divergence_identical_is_zero():
    p = FiniteDistribution([0.3, 0.7])
    for name in ALL_NAMES:
        assert divergence(catalog(name), p, p) == pytest.approx(0.0, abs=1e-15)


def test_divergence_absolute_continuity():
    p = FiniteDistribution([0.5, 0.5, 0.0])
    q = FiniteDistribution([0.5, 0.0, 0.5])
    with pytest.raises(AbsoluteContinuityError):
        divergence(catalog("kl"), p, q)
    # zero against zero is fine
    q2 = FiniteDistribution([0.6, 0.4, 0.0])
    assert divergence(catalog("kl"), p, q2) > 0


def test_variational_value_one_sided():
    rng = np.random.default_rng(11)
    for name in ALL_NAMES:
        gen = catalog(name)
        for _ in range(30):
            p = FiniteDistribution(rng.dirichlet(np.ones(6)))
            q = FiniteDistribution(0.5 * rng.dirichlet(np.ones(6)) + 0.5 / 6)
            k = gen.clamp(rng.normal(size=6))
            assert variational_value(gen, k, p, q) <= \
                divergence(gen, p, q) + 1e-9


def test_mutual_information_gaussian_kl_only():
    from pairmech import GaussianJoint
    g = GaussianJoint(0.0, 1.0, 4.0)
    mi = mutual_information(catalog("kl"), g)
    assert mi == pytest.approx(-0.5 * np.log(1 - 0.04), abs=1e-12)
    with pytest.raises(DomainError):
        mutual_information(catalog("chi_squared"), g)

import numpy as np
import pytest

from pairmech import (FiniteDistribution, GaussianStrategy, InputError,
                      MatrixStrategy, StrategyProfile, apply_profile,
                      is_oblivious, is_oblivious_profile, is_permutation,
                      is_permutation_profile, oblivious, permutation,
                      random_oblivious_profile, random_profile,
                      random_strategy, truth_profile, truth_telling)


def test_truth_telling_is_identity():
    s = truth_telling(3)
    signals = np.array([0, 2, 1, 1, 0])
    out = s.apply(signals, np.random.default_rng(0))
    assert np.array_equal(out, signals)
    assert is_permutation(s)
    assert not is_oblivious(s)


def test_permutation_strategy():
    s = permutation([2, 0, 1])
    out = s.apply(np.array([0, 1, 2]), np.random.default_rng(0))
    assert np.array_equal(out, [2, 0, 1])
    assert is_permutation(s)
    with pytest.raises(InputError):
        permutation([0, 0, 1])


def test_oblivious_strategy_ignores_signal():
    s = oblivious(FiniteDistribution([0.2, 0.5, 0.3]))
    assert is_oblivious(s)
    rng = np.random.default_rng(7)
    out = s.apply(np.zeros(20000, dtype=int), rng)
    freq = np.bincount(out, minlength=3) / 20000
    assert np.max(np.abs(freq - [0.2, 0.5, 0.3])) < 0.02


def test_row_stochastic_validation():
    with pytest.raises(InputError):
        MatrixStrategy(np.array([[0.5, 0.4], [0.5, 0.5]]))
    with pytest.raises(InputError):
        MatrixStrategy(np.array([[1.2, -0.2], [0.5, 0.5]]))


def test_mixed_strategy_sampling_distribution():
    m = np.array([[0.7, 0.3], [0.1, 0.9]])
    s = MatrixStrategy(m)
    rng = np.random.default_rng(3)
    out = s.apply(np.zeros(50000, dtype=int), rng)
    assert np.mean(out) == pytest.approx(0.3, abs=0.01)


def test_classifier_edge_cases():
    almost = MatrixStrategy(np.array([[1 - 1e-12, 1e-12], [1e-12, 1 - 1e-12]]))
    assert is_permutation(almost)
    uniform = oblivious(FiniteDistribution([0.5, 0.5]))
    # the uniform 2x2 oblivious kernel is doubly stochastic but not binary
    assert not is_permutation(uniform)


def test_profile_classifiers():
    truth = truth_profile(3)
    assert is_permutation_profile(truth)
    assert not is_oblivious_profile(truth)
    rng = np.random.default_rng(1)
    obl = random_oblivious_profile(3, rng)
    assert is_oblivious_profile(obl)
    one_sided = StrategyProfile(oblivious(FiniteDistribution([1.0, 0.0])),
                                truth_telling(2))
    assert is_oblivious_profile(one_sided)


def test_gaussian_strategies():
    x = np.array([-2.0, 0.0, 3.0])
    assert np.array_equal(GaussianStrategy("identity").apply(x), x)
    assert np.array_equal(GaussianStrategy("affine", (2.0, 1.0)).apply(x),
                          2 * x + 1)
    assert np.array_equal(GaussianStrategy("clamp", (-1.0, 1.0)).apply(x),
                          [-1.0, 0.0, 1.0])
    assert np.array_equal(GaussianStrategy("constant", (0.5,)).apply(x),
                          [0.5, 0.5, 0.5])
    assert is_permutation(GaussianStrategy("identity"))
    assert is_oblivious(GaussianStrategy("constant", (0.0,)))
    with pytest.raises(InputError):
        GaussianStrategy("affine", (1.0,))
    with pytest.raises(InputError):
        GaussianStrategy("cubic")


def test_apply_profile_shapes():
    rng = np.random.default_rng(2)
    profile = random_profile(3, rng)
    x = rng.integers(3, size=(4, 10))
    y = rng.integers(3, size=(4, 10))
    xh, yh = apply_profile(profile, x, y, rng)
    assert xh.shape == (4, 10) and yh.shape == (4, 10)
    assert xh.max() < 3 and yh.max() < 3


def test_random_strategy_rows_are_distributions():
    rng = np.random.default_rng(6)
    s = random_strategy(4, rng)
    assert np.allclose(s.matrix.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(s.matrix >= 0)

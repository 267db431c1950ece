"""Per-task report strategies and strategy profiles.

Finite strategies are row-stochastic matrices theta[x, x_hat]; Gaussian
signal spaces use deterministic parametric report maps (identity, affine,
clamp, constant) applied samplewise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .generators import PROB_TOL, FiniteDistribution
from .textio import dump_matrix, load_matrix

DEFAULT_CLASS_TOL = 1e-9


@dataclass(frozen=True)
class MatrixStrategy:
    """Row-stochastic report kernel on a finite signal space."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2:
            raise InputError("strategy must be a matrix")
        if np.any(m < 0):
            raise InputError("negative strategy entry")
        if np.any(np.abs(m.sum(axis=1) - 1.0) > PROB_TOL):
            raise InputError("strategy rows must sum to 1")

    @property
    def n_signals(self) -> int:
        return self.matrix.shape[0]

    def apply(self, signals: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Draw one report per signal, independently per task."""
        signals = np.asarray(signals)
        cdf = np.cumsum(self.matrix, axis=1)
        cdf[:, -1] = 1.0
        u = rng.random(signals.shape)
        return (u[..., None] > cdf[signals]).sum(axis=-1)

    def to_text(self) -> str:
        return dump_matrix(self.matrix)

    @staticmethod
    def from_text(text: str) -> "MatrixStrategy":
        return MatrixStrategy(load_matrix(text))


@dataclass(frozen=True)
class GaussianStrategy:
    """Deterministic report map for real-valued signals.

    kind is one of identity, affine (a*x + b), clamp (clip to [lo, hi]),
    constant (c).
    """

    kind: str
    params: tuple = ()

    _KINDS = ("identity", "affine", "clamp", "constant")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise InputError(f"unknown Gaussian strategy kind {self.kind!r}")
        need = {"identity": 0, "affine": 2, "clamp": 2, "constant": 1}[self.kind]
        if len(self.params) != need:
            raise InputError(f"{self.kind} takes {need} parameters")

    def apply(self, signals: np.ndarray,
              rng: np.random.Generator | None = None) -> np.ndarray:
        x = np.asarray(signals, dtype=float)
        if self.kind == "identity":
            return x
        if self.kind == "affine":
            a, b = self.params
            return a * x + b
        if self.kind == "clamp":
            lo, hi = self.params
            return np.clip(x, lo, hi)
        return np.full_like(x, self.params[0])


@dataclass(frozen=True)
class StrategyProfile:
    a: object  # Alice's strategy
    b: object  # Bob's strategy


def truth_telling(n: int) -> MatrixStrategy:
    if n < 2:
        raise InputError("signal space must have >= 2 symbols")
    return MatrixStrategy(np.eye(n))


def permutation(perm) -> MatrixStrategy:
    perm = list(perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise InputError(f"{perm} is not a bijection on 0..{n - 1}")
    m = np.zeros((n, n))
    m[np.arange(n), perm] = 1.0
    return MatrixStrategy(m)


def oblivious(dist: FiniteDistribution) -> MatrixStrategy:
    return MatrixStrategy(np.tile(dist.weights, (dist.n, 1)))


def is_permutation(s, tol: float = DEFAULT_CLASS_TOL) -> bool:
    if isinstance(s, GaussianStrategy):
        return s.kind == "identity"
    m = s.matrix
    if m.shape[0] != m.shape[1]:
        return False
    near_binary = np.all((np.abs(m) <= tol) | (np.abs(m - 1.0) <= tol))
    one_per_col = np.all(np.abs(m.sum(axis=0) - 1.0) <= tol)
    return bool(near_binary and one_per_col)


def is_oblivious(s, tol: float = DEFAULT_CLASS_TOL) -> bool:
    if isinstance(s, GaussianStrategy):
        return s.kind == "constant"
    m = s.matrix
    return bool(np.all(np.abs(m - m[0]) <= tol))


def is_oblivious_profile(profile: StrategyProfile,
                         tol: float = DEFAULT_CLASS_TOL) -> bool:
    """A profile is oblivious when either agent ignores their signal."""
    return is_oblivious(profile.a, tol) or is_oblivious(profile.b, tol)


def is_permutation_profile(profile: StrategyProfile,
                           tol: float = DEFAULT_CLASS_TOL) -> bool:
    return is_permutation(profile.a, tol) and is_permutation(profile.b, tol)


def apply_profile(profile: StrategyProfile, signals_x, signals_y,
                  rng: np.random.Generator):
    """Map a signal profile to a report profile, task by task."""
    return (profile.a.apply(np.asarray(signals_x), rng),
            profile.b.apply(np.asarray(signals_y), rng))


def random_strategy(n: int, rng: np.random.Generator) -> MatrixStrategy:
    """Rows drawn from a symmetric Dirichlet(1) simplex sampler."""
    if n < 2:
        raise InputError("signal space must have >= 2 symbols")
    return MatrixStrategy(rng.dirichlet(np.ones(n), size=n))


def random_profile(n: int, rng: np.random.Generator) -> StrategyProfile:
    return StrategyProfile(random_strategy(n, rng), random_strategy(n, rng))


def random_oblivious_profile(n: int, rng: np.random.Generator) -> StrategyProfile:
    """Alice oblivious with a random report distribution, Bob random."""
    dist = FiniteDistribution(rng.dirichlet(np.ones(n)))
    return StrategyProfile(oblivious(dist), random_strategy(n, rng))


def truth_profile(nx: int, ny: int | None = None) -> StrategyProfile:
    return StrategyProfile(truth_telling(nx), truth_telling(ny or nx))

"""Joint signal models: finite joints, bivariate Gaussians, Dawid-Skene.

Covers marginals, the joint/product ratio function, structural
classification (stochastic relevance, fine-grained, strictly correlated),
i.i.d. task sampling, and pushforward of a joint through a strategy
profile.

All values are immutable.  Sampling takes an explicitly passed
numpy Generator; callers own generator partitioning for parallel runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError
from .generators import PROB_TOL, FiniteDistribution
from .textio import dump_matrix, dump_record, load_matrix, load_record

DEFAULT_CLASSIFIER_TOL = 1e-9


@dataclass(frozen=True)
class FiniteJoint:
    """Joint distribution matrix over (x, y) with |X|, |Y| >= 2.

    A joint produced by a mass-concentrating pushforward may lose
    full-support marginals; such joints are constructible but carry
    ``flagged = True`` and are usable only where the mechanism permits.
    """

    p: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "p", m)
        if m.ndim != 2 or m.shape[0] < 2 or m.shape[1] < 2:
            raise InputError("joint must be a matrix with both sides >= 2")
        if np.any(m < 0):
            raise InputError("negative joint probability")
        if abs(m.sum() - 1.0) > PROB_TOL:
            raise InputError(f"joint sums to {m.sum()}, not 1")

    @property
    def nx(self) -> int:
        return self.p.shape[0]

    @property
    def ny(self) -> int:
        return self.p.shape[1]

    @property
    def marginal_x(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def marginal_y(self) -> np.ndarray:
        return self.p.sum(axis=0)

    @property
    def flagged(self) -> bool:
        """True when some marginal cell has zero mass (degenerate support)."""
        return bool(np.any(self.marginal_x == 0) or np.any(self.marginal_y == 0))

    def to_text(self) -> str:
        return dump_matrix(self.p)

    @staticmethod
    def from_text(text: str) -> "FiniteJoint":
        return FiniteJoint(load_matrix(text))


@dataclass(frozen=True)
class GaussianJoint:
    """Bivariate Gaussian signal model.

    A latent task value mu ~ N(m0, sigma2); each agent observes the
    latent value plus independent N(0, tau2) noise.  The implied
    covariance of (x, y) is [[s+t, s], [s, s+t]] with s = sigma2,
    t = tau2.
    """

    m0: float
    sigma2: float
    tau2: float

    def __post_init__(self):
        if self.sigma2 <= 0 or self.tau2 <= 0:
            raise InputError("sigma2 and tau2 must be positive")

    @property
    def quad_denominator(self) -> float:
        """2*sigma2*tau2 + tau2^2, the determinant scale in the ratio."""
        return 2.0 * self.sigma2 * self.tau2 + self.tau2 ** 2

    @property
    def ratio_scale(self) -> float:
        """(sigma2+tau2)^2 / (2*sigma2*tau2 + tau2^2)."""
        return (self.sigma2 + self.tau2) ** 2 / self.quad_denominator

    def quad_form(self, x, y):
        """(x-m0, y-m0) [[s+t, -s], [-s, s+t]] (x-m0, y-m0)^T.

        This is the joint-density exponent form (inverse covariance
        scaled by its determinant), not the ratio exponent.
        """
        dx = np.asarray(x, dtype=float) - self.m0
        dy = np.asarray(y, dtype=float) - self.m0
        st = self.sigma2 + self.tau2
        return st * (dx * dx + dy * dy) - 2.0 * self.sigma2 * dx * dy

    def ratio_quad_form(self, x, y):
        """Quadratic form in the density-ratio exponent:
        ratio = sqrt(ratio_scale) * exp(-ratio_quad_form / (2 * D)).

        Subtracting the product-marginal exponent from the joint one
        gives (s/(s+t)) * [s*(dx^2+dy^2) - 2*(s+t)*dx*dy], an indefinite
        form (the ratio is unbounded along the diagonal).
        """
        dx = np.asarray(x, dtype=float) - self.m0
        dy = np.asarray(y, dtype=float) - self.m0
        s = self.sigma2
        st = s + self.tau2
        return (s / st) * (s * (dx * dx + dy * dy) - 2.0 * st * dx * dy)

    @property
    def ratio_quad_matrix(self) -> np.ndarray:
        """2x2 symmetric matrix of ratio_quad_form."""
        s = self.sigma2
        st = s + self.tau2
        return np.array([[s * s / st, -s], [-s, s * s / st]])

    def to_text(self) -> str:
        return dump_record({"m0": float(self.m0), "sigma2": float(self.sigma2),
                            "tau2": float(self.tau2)})

    @staticmethod
    def from_text(text: str) -> "GaussianJoint":
        rec = load_record(text)
        try:
            return GaussianJoint(float(rec["m0"]), float(rec["sigma2"]),
                                 float(rec["tau2"]))
        except KeyError as e:
            raise InputError(f"missing Gaussian field {e}") from None


@dataclass(frozen=True)
class DawidSkeneModel:
    """Latent-label model: per-task class drawn from ``class_prior``,
    each agent reports through its own row-stochastic confusion matrix."""

    class_prior: FiniteDistribution
    confusion: tuple  # one row-stochastic matrix per agent

    def __post_init__(self):
        mats = tuple(np.asarray(c, dtype=float) for c in self.confusion)
        object.__setattr__(self, "confusion", mats)
        n_labels = self.class_prior.n
        for i, c in enumerate(mats):
            if c.shape[0] != n_labels:
                raise InputError(f"confusion {i} has {c.shape[0]} rows, "
                                 f"expected {n_labels}")
            if np.any(c < 0) or np.any(np.abs(c.sum(axis=1) - 1.0) > PROB_TOL):
                raise InputError(f"confusion {i} is not row-stochastic")

    @property
    def n_agents(self) -> int:
        return len(self.confusion)

    def agent_label_joint(self, agent: int) -> FiniteJoint:
        """Joint of (agent's report, true latent label)."""
        prior = self.class_prior.weights
        return FiniteJoint((self.confusion[agent] * prior[:, None]).T)

    def sample(self, m: int, rng: np.random.Generator):
        """Draw m tasks; returns (latent labels, reports[n_agents, m])."""
        z = _inverse_cdf_sample(self.class_prior.weights, m, rng)
        reports = np.empty((self.n_agents, m), dtype=int)
        for i, c in enumerate(self.confusion):
            u = rng.random(m)
            cdf = np.cumsum(c, axis=1)
            reports[i] = (u[:, None] > cdf[z]).sum(axis=1)
        return z, reports


def _inverse_cdf_sample(weights: np.ndarray, m: int, rng: np.random.Generator):
    cdf = np.cumsum(weights)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(m), side="right")


def marginals(joint: FiniteJoint) -> tuple[FiniteDistribution, FiniteDistribution]:
    return (FiniteDistribution(joint.marginal_x),
            FiniteDistribution(joint.marginal_y))


def ratio(joint, x, y):
    """Joint probability over the product of marginals at (x, y).

    Finite joints index by integer signal; Gaussian joints evaluate the
    closed-form density ratio at real (x, y).  Vectorized over arrays.
    """
    if isinstance(joint, GaussianJoint):
        return np.sqrt(joint.ratio_scale) * np.exp(
            -joint.ratio_quad_form(x, y) / (2.0 * joint.quad_denominator))
    prod = joint.marginal_x[x] * joint.marginal_y[y]
    if np.any(np.asarray(prod) == 0):
        raise DomainError("zero product marginal at requested cell")
    return joint.p[x, y] / prod


def ratio_matrix(joint: FiniteJoint) -> np.ndarray:
    prod = np.outer(joint.marginal_x, joint.marginal_y)
    if np.any(prod == 0):
        raise DomainError("zero product marginal; joint is flagged")
    return joint.p / prod


def is_stochastic_relevant(joint: FiniteJoint,
                           tol: float = DEFAULT_CLASSIFIER_TOL) -> bool:
    """All pairs of posterior rows differ (sup-norm > tol), both directions."""
    def rows_distinct(cond: np.ndarray) -> bool:
        n = cond.shape[0]
        for i in range(n):
            for j in range(i + 1, n):
                if np.max(np.abs(cond[i] - cond[j])) <= tol:
                    return False
        return True

    cond_y_given_x = joint.p / joint.marginal_x[:, None]
    cond_x_given_y = (joint.p / joint.marginal_y[None, :]).T
    return rows_distinct(cond_y_given_x) and rows_distinct(cond_x_given_y)


def is_fine_grained(joint: FiniteJoint,
                    tol: float = DEFAULT_CLASSIFIER_TOL) -> bool:
    """All ratio values over cells are pairwise distinct beyond tol."""
    r = np.sort(ratio_matrix(joint).ravel())
    return bool(np.all(np.diff(r) > tol))


def is_strictly_correlated(joint: FiniteJoint,
                           tol: float = DEFAULT_CLASSIFIER_TOL) -> bool:
    if joint.nx != joint.ny:
        raise InputError("strict correlation requires a square joint")
    return bool(abs(np.linalg.det(joint.p)) > tol)


def sample_tasks(joint, m: int, rng: np.random.Generator):
    """m i.i.d. signal pairs; returns (x, y) arrays of length m."""
    if m < 1:
        raise InputError("m must be >= 1")
    if isinstance(joint, GaussianJoint):
        mu = rng.normal(joint.m0, np.sqrt(joint.sigma2), size=m)
        x = rng.normal(mu, np.sqrt(joint.tau2))
        y = rng.normal(mu, np.sqrt(joint.tau2))
        return x, y
    flat = _inverse_cdf_sample(joint.p.ravel(), m, rng)
    return flat // joint.ny, flat % joint.ny


def pushforward(joint: FiniteJoint, profile) -> FiniteJoint:
    """Report distribution theta o P induced by a strategy profile."""
    a = profile.a.matrix
    b = profile.b.matrix
    if a.shape[0] != joint.nx or b.shape[0] != joint.ny:
        raise InputError("strategy dimensions do not match signal spaces")
    return FiniteJoint(a.T @ joint.p @ b)


def eq1_joint() -> FiniteJoint:
    """The 3x3 mixture builtin: 0.5*G1^T G1 + 0.5*G0^T G0 with
    G1 = [0.2, 0.2, 0.6], G0 = [0.6, 0.2, 0.2]."""
    g1 = np.array([0.2, 0.2, 0.6])
    g0 = np.array([0.6, 0.2, 0.2])
    return FiniteJoint(0.5 * np.outer(g1, g1) + 0.5 * np.outer(g0, g0))


def independent_joint(px, py) -> FiniteJoint:
    return FiniteJoint(np.outer(np.asarray(px, float), np.asarray(py, float)))


BUILTIN_PRIORS = {
    "eq1": eq1_joint,
    "independent3": lambda: independent_joint([0.4, 0.2, 0.4], [0.4, 0.2, 0.4]),
    "uniform2": lambda: independent_joint([0.5, 0.5], [0.5, 0.5]),
}


def builtin_prior(name: str) -> FiniteJoint:
    try:
        return BUILTIN_PRIORS[name]()
    except KeyError:
        raise InputError(f"unknown builtin prior {name!r}; "
                         f"expected one of {sorted(BUILTIN_PRIORS)}") from None

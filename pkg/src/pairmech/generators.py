"""Convex generator catalog and divergence computations on finite distributions.

Each catalog entry bundles a convex function ``phi`` with phi(1) = 0, its
convex conjugate ``phi_star`` on ``conj_domain``, and the subgradient of
``phi`` as a closed interval.  Divergences are reported in nats.

All values are immutable; every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AbsoluteContinuityError, DomainError, InputError

PROB_TOL = 1e-12
EQ_TOL = 1e-9

# Margin used when projecting onto an open conjugate-domain boundary.
OPEN_BOUND_MARGIN = 1e-9


@dataclass(frozen=True)
class ConvexGenerator:
    """A convex function phi with phi(1) = 0 and its Fenchel conjugate.

    ``phi`` is defined on [0, inf).  ``phi_star`` is defined on
    ``conj_domain`` = [conj_lo, conj_hi], where either bound may be
    infinite and ``conj_hi_open`` marks a strict upper bound (b < conj_hi).
    ``subgradient(a)`` returns the closed interval of subgradients at a,
    or raises DomainError where the subdifferential is empty (e.g. the KL
    generator at a = 0).
    """

    name: str
    phi: Callable[[np.ndarray], np.ndarray]
    phi_star_raw: Callable[[np.ndarray], np.ndarray]
    subgradient: Callable[[float], tuple[float, float]]
    conj_lo: float
    conj_hi: float
    conj_hi_open: bool = False
    strictly_convex: bool = False

    @property
    def conj_domain(self) -> tuple[float, float]:
        return (self.conj_lo, self.conj_hi)

    def in_conj_domain(self, b) -> bool:
        b = np.asarray(b, dtype=float)
        upper_ok = b < self.conj_hi if self.conj_hi_open else b <= self.conj_hi
        return bool(np.all((b >= self.conj_lo) & upper_ok))

    def phi_star(self, b):
        """Evaluate the conjugate, rejecting values outside conj_domain."""
        b = np.asarray(b, dtype=float)
        if not self.in_conj_domain(b):
            raise DomainError(
                f"value outside conj_domain of {self.name}: "
                f"range [{b.min()}, {b.max()}] vs {self.conj_domain}"
            )
        return self.phi_star_raw(b)

    def clamp(self, b):
        """Project values onto conj_domain (interior margin at open bounds)."""
        hi = self.conj_hi - OPEN_BOUND_MARGIN if self.conj_hi_open else self.conj_hi
        return np.clip(np.asarray(b, dtype=float), self.conj_lo, hi)

    def subgradient_mid(self, a: float) -> float:
        lo, hi = self.subgradient(a)
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class FiniteDistribution:
    """Probability vector over a finite outcome set."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        object.__setattr__(self, "weights", w)
        if w.size == 0:
            raise InputError("empty distribution")
        if np.any(w < 0):
            raise InputError("negative probability")
        if abs(w.sum() - 1.0) > PROB_TOL:
            raise InputError(f"weights sum to {w.sum()}, not 1")

    @property
    def n(self) -> int:
        return self.weights.size


def _xlogx(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    safe = np.where(a > 0, a, 1.0)
    return np.where(a > 0, a * np.log(safe), 0.0)


def _tv_subgrad(a: float) -> tuple[float, float]:
    if a < 0:
        raise DomainError("phi defined on [0, inf)")
    # The kink at 1 is matched with a tolerance so that ratios that are
    # exactly 1 analytically but off by float rounding land on it.
    if abs(a - 1.0) <= EQ_TOL:
        return (-0.5, 0.5)
    if a > 1:
        return (0.5, 0.5)
    return (-0.5, -0.5)


def _kl_subgrad(a: float) -> tuple[float, float]:
    if a <= 0:
        raise DomainError("KL subgradient undefined at a <= 0")
    g = 1.0 + np.log(a)
    return (g, g)


def _chi2_subgrad(a: float) -> tuple[float, float]:
    if a < 0:
        raise DomainError("phi defined on [0, inf)")
    return (2.0 * a, 2.0 * a)


def _hellinger_subgrad(a: float) -> tuple[float, float]:
    if a <= 0:
        raise DomainError("squared Hellinger subgradient undefined at a <= 0")
    g = 1.0 - 1.0 / np.sqrt(a)
    return (g, g)


_CATALOG = {
    "total_variation": ConvexGenerator(
        name="total_variation",
        phi=lambda a: 0.5 * np.abs(np.asarray(a, dtype=float) - 1.0),
        phi_star_raw=lambda b: np.asarray(b, dtype=float),
        subgradient=_tv_subgrad,
        conj_lo=-0.5,
        conj_hi=0.5,
        strictly_convex=False,
    ),
    "kl": ConvexGenerator(
        name="kl",
        phi=_xlogx,
        phi_star_raw=lambda b: np.exp(np.asarray(b, dtype=float) - 1.0),
        subgradient=_kl_subgrad,
        conj_lo=-np.inf,
        conj_hi=np.inf,
        strictly_convex=True,
    ),
    "chi_squared": ConvexGenerator(
        name="chi_squared",
        phi=lambda a: np.asarray(a, dtype=float) ** 2 - 1.0,
        phi_star_raw=lambda b: np.asarray(b, dtype=float) ** 2 / 4.0 + 1.0,
        subgradient=_chi2_subgrad,
        conj_lo=-np.inf,
        conj_hi=np.inf,
        strictly_convex=True,
    ),
    "squared_hellinger": ConvexGenerator(
        name="squared_hellinger",
        phi=lambda a: (1.0 - np.sqrt(np.asarray(a, dtype=float))) ** 2,
        phi_star_raw=lambda b: np.asarray(b, dtype=float)
        / (1.0 - np.asarray(b, dtype=float)),
        subgradient=_hellinger_subgrad,
        conj_lo=-np.inf,
        conj_hi=1.0,
        conj_hi_open=True,
        strictly_convex=True,
    ),
}

CATALOG_NAMES = tuple(_CATALOG)


def catalog(name: str) -> ConvexGenerator:
    """Look up a generator by name.

    Known names: total_variation, kl, chi_squared, squared_hellinger.
    """
    try:
        return _CATALOG[name]
    except KeyError:
        raise InputError(
            f"unknown generator {name!r}; expected one of {sorted(_CATALOG)}"
        ) from None


def divergence(gen: ConvexGenerator, p: FiniteDistribution, q: FiniteDistribution) -> float:
    """D(p || q) = sum_w q(w) * phi(p(w)/q(w)).

    Cells with p = q = 0 contribute 0.  p > 0 where q = 0 violates
    absolute continuity and is an error.
    """
    pw, qw = p.weights, q.weights
    if pw.size != qw.size:
        raise InputError("distributions on different outcome sets")
    bad = (qw == 0) & (pw > 0)
    if np.any(bad):
        raise AbsoluteContinuityError(
            f"p > 0 on {int(bad.sum())} cells where q = 0"
        )
    mask = qw > 0
    val = float(np.sum(qw[mask] * gen.phi(pw[mask] / qw[mask])))
    if val < -EQ_TOL:
        raise AssertionError(f"negative divergence {val}")
    return val


def variational_value(gen: ConvexGenerator, k, p: FiniteDistribution,
                      q: FiniteDistribution) -> float:
    """E_p[k] - E_q[phi_star(k)] for per-outcome values k.

    ``k`` is an array of scoring values aligned with the outcome set
    (a Tabular scoring function's matrix works for flattened joints).
    Always a lower bound on divergence(gen, p, q); equality holds when k
    is a subgradient selection of p/q on q's support.
    """
    kv = np.asarray(getattr(k, "values", k), dtype=float).ravel()
    if kv.size != p.n or kv.size != q.n:
        raise InputError("scoring values misaligned with outcome set")
    if not gen.in_conj_domain(kv):
        raise DomainError(f"scoring values outside conj_domain of {gen.name}")
    return float(np.sum(p.weights * kv) - np.sum(q.weights * gen.phi_star(kv)))


def mutual_information(gen: ConvexGenerator, joint) -> float:
    """Divergence of a joint from the product of its marginals.

    Accepts a FiniteJoint, or a GaussianJoint with the kl generator
    (closed form -0.5*ln(1 - rho^2), rho = sigma2/(sigma2+tau2)).
    """
    from .priors import FiniteJoint, GaussianJoint  # cycle-free at call time

    if isinstance(joint, GaussianJoint):
        if gen.name != "kl":
            raise DomainError(
                "closed-form mutual information for Gaussian joints exists "
                "only for kl; use the Monte Carlo path in the mechanism module"
            )
        rho = joint.sigma2 / (joint.sigma2 + joint.tau2)
        return float(-0.5 * np.log1p(-rho * rho))
    if isinstance(joint, FiniteJoint):
        px, py = joint.marginal_x, joint.marginal_y
        prod = np.outer(px, py)
        return divergence(
            gen,
            FiniteDistribution(joint.p.ravel()),
            FiniteDistribution(prod.ravel()),
        )
    raise InputError(f"unsupported joint type {type(joint).__name__}")

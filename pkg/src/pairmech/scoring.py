"""Scoring functions: tabular, quadratic, and ellipse-threshold forms.

Includes ideal construction from a known prior (finite and Gaussian),
projection onto a generator's conjugate domain, and the Bregman accuracy
gap of a non-ideal scorer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError, UnsupportedError
from .generators import ConvexGenerator, FiniteDistribution, variational_value
from .priors import FiniteJoint, GaussianJoint, ratio_matrix
from .textio import dump_matrix, dump_record, load_matrix, load_record


@dataclass(frozen=True)
class Tabular:
    """Score matrix indexed by a finite report pair."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 2:
            raise InputError("tabular scoring function must be a matrix")

    def evaluate(self, x, y):
        return self.values[np.asarray(x, dtype=int), np.asarray(y, dtype=int)]

    def to_text(self) -> str:
        return dump_matrix(self.values)

    @staticmethod
    def from_text(text: str) -> "Tabular":
        return Tabular(load_matrix(text))


@dataclass(frozen=True)
class Quadratic:
    """k(x, y) = c_xx x^2 + c_yy y^2 + c_xy xy + c_x x + c_y y + c_0."""

    c_xx: float = 0.0
    c_yy: float = 0.0
    c_xy: float = 0.0
    c_x: float = 0.0
    c_y: float = 0.0
    c_0: float = 0.0

    def evaluate(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (self.c_xx * x * x + self.c_yy * y * y + self.c_xy * x * y
                + self.c_x * x + self.c_y * y + self.c_0)

    def to_text(self) -> str:
        return dump_record({f: float(getattr(self, f))
                            for f in ("c_xx", "c_yy", "c_xy", "c_x", "c_y", "c_0")})

    @staticmethod
    def from_text(text: str) -> "Quadratic":
        rec = load_record(text)
        return Quadratic(**{k: float(v) for k, v in rec.items()})


@dataclass(frozen=True)
class EllipseThreshold:
    """k = hi inside the region quad_form < threshold, lo outside.

    quad is the 2x2 symmetric matrix of the form, evaluated at the
    report pair shifted by ``center``.
    """

    quad: np.ndarray
    center: tuple[float, float]
    threshold: float
    hi: float = 0.5
    lo: float = -0.5

    def __post_init__(self):
        q = np.asarray(self.quad, dtype=float)
        object.__setattr__(self, "quad", q)
        if q.shape != (2, 2):
            raise InputError("quadratic form must be 2x2")

    def quad_form(self, x, y):
        dx = np.asarray(x, dtype=float) - self.center[0]
        dy = np.asarray(y, dtype=float) - self.center[1]
        q = self.quad
        return q[0, 0] * dx * dx + (q[0, 1] + q[1, 0]) * dx * dy + q[1, 1] * dy * dy

    def evaluate(self, x, y):
        return np.where(self.quad_form(x, y) < self.threshold, self.hi, self.lo)

    def to_text(self) -> str:
        q = self.quad
        return dump_record({
            "q_xx": float(q[0, 0]), "q_xy": float(q[0, 1]), "q_yy": float(q[1, 1]),
            "center_x": float(self.center[0]), "center_y": float(self.center[1]),
            "threshold": float(self.threshold),
            "hi": float(self.hi), "lo": float(self.lo),
        })

    @staticmethod
    def from_text(text: str) -> "EllipseThreshold":
        r = {k: float(v) for k, v in load_record(text).items()}
        return EllipseThreshold(
            quad=np.array([[r["q_xx"], r["q_xy"]], [r["q_xy"], r["q_yy"]]]),
            center=(r["center_x"], r["center_y"]),
            threshold=r["threshold"], hi=r["hi"], lo=r["lo"])


@dataclass(frozen=True)
class AccuracyGap:
    """Shortfall (in nats) of a scorer's truth-telling payment below the
    mutual information; nonnegative up to numerical tolerance."""

    value: float
    std_error: float = 0.0

    def __post_init__(self):
        if self.value < -1e-9:
            raise DomainError(f"accuracy gap {self.value} below -1e-9")


def evaluate(k, x, y):
    return k.evaluate(x, y)


def ideal_finite(gen: ConvexGenerator, joint: FiniteJoint) -> Tabular:
    """Midpoint subgradient of the joint/product ratio, cell by cell."""
    r = ratio_matrix(joint)
    vals = np.empty_like(r)
    for i in range(r.shape[0]):
        for j in range(r.shape[1]):
            vals[i, j] = gen.subgradient_mid(r[i, j])
    return Tabular(vals)


def ideal_gaussian(gen: ConvexGenerator, g: GaussianJoint):
    """Closed-form ideal scorer for a bivariate Gaussian joint.

    kl yields the quadratic 1 + ln(ratio(x, y)); total_variation yields
    the +-1/2 threshold scorer whose region is exactly {ratio(x, y) >= 1}.
    Both are expressed through the density-ratio quadratic form.
    """
    st = g.sigma2 + g.tau2
    denom = g.quad_denominator
    if gen.name == "kl":
        # 1 + ln ratio = 1 + ln(scale)/2 - ratio_quad_form/(2*denom);
        # expand in raw (x, y) coefficients.
        a = -g.sigma2 ** 2 / (st * 2.0 * denom)  # dx^2 and dy^2
        b = g.sigma2 / denom                     # dx*dy
        m0 = g.m0
        c_xx, c_yy, c_xy = a, a, b
        c_x = -2.0 * a * m0 - b * m0
        c_y = -2.0 * a * m0 - b * m0
        c_0 = (a * m0 * m0 * 2.0 + b * m0 * m0
               + 1.0 + 0.5 * np.log(g.ratio_scale))
        return Quadratic(c_xx, c_yy, c_xy, c_x, c_y, c_0)
    if gen.name == "total_variation":
        # ratio >= 1  <=>  ratio_quad_form(x, y) <= denom * ln(ratio_scale)
        threshold = denom * np.log(g.ratio_scale)
        return EllipseThreshold(quad=g.ratio_quad_matrix, center=(g.m0, g.m0),
                                threshold=threshold, hi=0.5, lo=-0.5)
    raise UnsupportedError(
        f"no closed-form Gaussian ideal scorer for generator {gen.name}")


def clamp_to_domain(gen: ConvexGenerator, k):
    """Project a scorer's values onto the generator's conjugate domain."""
    if isinstance(k, Tabular):
        return Tabular(gen.clamp(k.values))
    if isinstance(k, EllipseThreshold):
        hi, lo = float(gen.clamp(k.hi)), float(gen.clamp(k.lo))
        return EllipseThreshold(k.quad, k.center, k.threshold, hi, lo)
    if isinstance(k, Quadratic):
        if np.isinf(gen.conj_lo) and np.isinf(gen.conj_hi):
            return k
        raise InputError(
            "a non-constant quadratic has unbounded range; it cannot be "
            f"paired with the bounded conjugate domain of {gen.name}")
    raise InputError(f"unknown scoring function type {type(k).__name__}")


def bregman_gap(gen: ConvexGenerator, k: Tabular, joint: FiniteJoint) -> AccuracyGap:
    """Exact payment shortfall of k below the ideal scorer, truth-telling.

    Equals mutual_information - variational_value(k) for strictly convex
    differentiable generators.  The total-variation generator is rejected;
    use the difference form directly.
    """
    if not gen.strictly_convex:
        raise UnsupportedError(
            f"{gen.name} is not strictly convex; compute the gap as "
            "mutual_information - variational_value instead")
    r = ratio_matrix(joint)
    k_star = ideal_finite(gen, joint).values
    kv = k.values
    if kv.shape != r.shape:
        raise InputError("scorer shape does not match the joint")
    if not gen.in_conj_domain(kv):
        raise DomainError("scorer values outside the conjugate domain")
    prod = np.outer(joint.marginal_x, joint.marginal_y)
    gap = float(np.sum(prod * (gen.phi_star(kv) - gen.phi_star(k_star)
                               - r * (kv - k_star))))
    return AccuracyGap(gap)


def variational_value_finite(gen: ConvexGenerator, k: Tabular,
                             joint: FiniteJoint) -> float:
    """E_joint[k] - E_product[phi_star(k)] for a tabular scorer."""
    prod = np.outer(joint.marginal_x, joint.marginal_y)
    return variational_value(gen, k.values,
                             FiniteDistribution(joint.p.ravel()),
                             FiniteDistribution(prod.ravel()))

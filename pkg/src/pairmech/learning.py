"""Scoring-function learners and accuracy evaluation.

Two learners are provided: a generative histogram learner (estimate the
empirical joint, then take the subgradient of its ratio) and a
variational empirical-risk maximizer over tabular or quadratic classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, InputError, SolverError, UnsupportedError
from .generators import (ConvexGenerator, FiniteDistribution,
                         mutual_information)
from .mechanism import exact_ex_ante_payment
from .priors import FiniteJoint, GaussianJoint
from .scoring import AccuracyGap, Quadratic, Tabular, clamp_to_domain, ideal_finite
from .strategies import truth_profile


@dataclass(frozen=True)
class LearnerConfig:
    method: str = "generative"            # generative | erm
    functional_class: str = "tabular"     # tabular | quadratic
    coefficient_bound: float = 50.0
    step_size: float = 0.05
    max_iters: int = 100_000
    grad_tol: float = 1e-8

    def __post_init__(self):
        if self.method not in ("generative", "erm"):
            raise InputError(f"unknown method {self.method!r}")
        if self.functional_class not in ("tabular", "quadratic"):
            raise InputError(f"unknown class {self.functional_class!r}")
        if self.coefficient_bound <= 0 or self.step_size <= 0 or self.max_iters < 1:
            raise InputError("invalid solver settings")


@dataclass(frozen=True)
class EmpiricalJoint:
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.ndim != 2 or np.any(c < 0) or not np.issubdtype(c.dtype, np.integer):
            raise InputError("counts must be a nonnegative integer matrix")
        if c.sum() == 0:
            raise DegenerateInputError("empty sample")
        object.__setattr__(self, "counts", c)

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    @staticmethod
    def from_reports(xs, ys, nx: int, ny: int) -> "EmpiricalJoint":
        xs = np.asarray(xs, dtype=int)
        ys = np.asarray(ys, dtype=int)
        if xs.size == 0:
            raise DegenerateInputError("empty sample")
        counts = np.zeros((nx, ny), dtype=int)
        np.add.at(counts, (xs, ys), 1)
        return EmpiricalJoint(counts)


def _subgradient_scorer(gen: ConvexGenerator, freq: np.ndarray) -> Tabular:
    """Midpoint subgradient of the empirical ratio; cells where the
    product marginal vanishes, or where the subgradient is undefined
    (zero ratio under kl / squared Hellinger), score 0."""
    fx = freq.sum(axis=1)
    fy = freq.sum(axis=0)
    prod = np.outer(fx, fy)
    vals = np.zeros_like(freq)
    for i in range(freq.shape[0]):
        for j in range(freq.shape[1]):
            if prod[i, j] <= 0:
                continue
            r = freq[i, j] / prod[i, j]
            try:
                vals[i, j] = gen.subgradient_mid(r)
            except Exception:
                vals[i, j] = 0.0
    return Tabular(gen.clamp(vals))


def learn_generative(gen: ConvexGenerator, xs, ys,
                     nx: int | None = None, ny: int | None = None) -> Tabular:
    """Histogram learner: empirical joint and marginals from the same
    samples, scored by the subgradient of the empirical ratio."""
    xs = np.asarray(xs, dtype=int)
    ys = np.asarray(ys, dtype=int)
    nx = nx if nx is not None else int(xs.max()) + 1 if xs.size else 0
    ny = ny if ny is not None else int(ys.max()) + 1 if ys.size else 0
    emp = EmpiricalJoint.from_reports(xs, ys, nx, ny)
    freq = emp.frequencies
    fx, fy = freq.sum(axis=1), freq.sum(axis=0)
    if np.all(fx > 0) and np.all(fy > 0) and np.all(freq > 0) and min(nx, ny) >= 2:
        # Full-support path shares the exact code path with ideal_finite so
        # that exact-frequency samples reproduce it bitwise.
        return Tabular(gen.clamp(ideal_finite(gen, FiniteJoint(freq)).values))
    return _subgradient_scorer(gen, freq)


def learn_erm(gen: ConvexGenerator, xs, ys, config: LearnerConfig,
              nx: int | None = None, ny: int | None = None):
    """Variational empirical risk maximization.

    The learning sample is split into three equal thirds (leftovers
    dropped): the first supplies joint pairs, and cross-pairing the
    x-reports of the second with the y-reports of the third supplies
    independent product pairs.  The objective
    J(k) = E_joint[k] - E_product[phi_star(k)] is maximized over the
    configured class.
    """
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    n = xs.size // 3
    if n < 1:
        raise InputError("ERM needs at least 3 learning samples")
    ux, uy = xs[:n], ys[:n]                    # joint sample
    vx, vy = xs[n:2 * n], ys[2 * n:3 * n]      # independent cross pairs
    if config.functional_class == "tabular":
        return _erm_tabular(gen, ux, uy, vx, vy, nx, ny)
    if np.isfinite(gen.conj_lo) or np.isfinite(gen.conj_hi):
        raise UnsupportedError(
            "quadratic class requires an unbounded conjugate domain "
            f"(got {gen.name})")
    return _erm_quadratic(gen, ux, uy, vx, vy, config)


def _erm_tabular(gen, ux, uy, vx, vy, nx, ny) -> Tabular:
    nx = nx if nx is not None else int(max(ux.max(), vx.max())) + 1
    ny = ny if ny is not None else int(max(uy.max(), vy.max())) + 1
    joint_f = EmpiricalJoint.from_reports(ux, uy, nx, ny).frequencies
    prod_f = EmpiricalJoint.from_reports(vx, vy, nx, ny).frequencies
    vals = np.zeros((nx, ny))
    for i in range(nx):
        for j in range(ny):
            if joint_f[i, j] > 0 and prod_f[i, j] > 0:
                vals[i, j] = gen.subgradient_mid(joint_f[i, j] / prod_f[i, j])
    return Tabular(gen.clamp(vals))


def _conjugate_derivative(gen: ConvexGenerator, b: np.ndarray) -> np.ndarray:
    if gen.name == "kl":
        return np.exp(b - 1.0)
    if gen.name == "chi_squared":
        return b / 2.0
    raise UnsupportedError(f"no smooth conjugate derivative for {gen.name}")


def _erm_quadratic(gen, ux, uy, vx, vy, config: LearnerConfig) -> Quadratic:
    """Projected gradient ascent on the six quadratic coefficients.

    Features are standardized by learning-sample moments for
    conditioning and un-standardized in the returned coefficients.
    """
    all_x = np.concatenate([ux, vx])
    all_y = np.concatenate([uy, vy])
    mx, sx = float(all_x.mean()), float(all_x.std()) or 1.0
    my, sy = float(all_y.mean()), float(all_y.std()) or 1.0

    def feats(x, y):
        xt = (x - mx) / sx
        yt = (y - my) / sy
        return np.stack([xt * xt, yt * yt, xt * yt, xt, yt,
                         np.ones_like(xt)], axis=1)

    fu = feats(ux, uy)
    fv = feats(vx, vy)
    mean_fu = fu.mean(axis=0)
    box = config.coefficient_bound

    def objective(c):
        return float(mean_fu @ c - gen.phi_star(fv @ c).mean())

    def gradient(c):
        w = _conjugate_derivative(gen, fv @ c)
        return mean_fu - (w[:, None] * fv).mean(axis=0)

    c = np.zeros(6)
    step = config.step_size
    j_prev = objective(c)
    if not np.isfinite(j_prev):
        raise SolverError("non-finite objective at the starting point")
    for _ in range(config.max_iters):
        g = gradient(c)
        # Projected gradient: zero the components pushing out of the box.
        g_proj = np.where(((c >= box) & (g > 0)) | ((c <= -box) & (g < 0)),
                          0.0, g)
        if np.max(np.abs(g_proj)) < config.grad_tol:
            break
        c_new = np.clip(c + step * g_proj, -box, box)
        j_new = objective(c_new)
        if not np.isfinite(j_new) or j_new <= j_prev:
            step *= 0.5
            if step < 1e-16:
                if not np.isfinite(j_new):
                    raise SolverError(
                        "step size underflow on non-finite objective")
                break
            continue
        step *= 1.2
        c, j_prev = c_new, j_new
    if not np.isfinite(objective(c)):
        raise SolverError("objective diverged")

    # Un-standardize: k = c1 xt^2 + c2 yt^2 + c3 xt yt + c4 xt + c5 yt + c6.
    c1, c2, c3, c4, c5, c6 = c
    c_xx = c1 / sx ** 2
    c_yy = c2 / sy ** 2
    c_xy = c3 / (sx * sy)
    c_x = -2 * c1 * mx / sx ** 2 - c3 * my / (sx * sy) + c4 / sx
    c_y = -2 * c2 * my / sy ** 2 - c3 * mx / (sx * sy) + c5 / sy
    c_0 = (c1 * mx ** 2 / sx ** 2 + c2 * my ** 2 / sy ** 2
           + c3 * mx * my / (sx * sy) - c4 * mx / sx - c5 * my / sy + c6)
    return Quadratic(c_xx, c_yy, c_xy, c_x, c_y, c_0)


def gaussian_variational_value(gen: ConvexGenerator, k, g: GaussianJoint,
                               half_width: float = 8.0, n_grid: int = 401) -> float:
    """E_joint[k] - E_product[phi_star(k)] by 2-D trapezoid quadrature."""
    s, t = g.sigma2, g.tau2
    sd = np.sqrt(s + t)
    ax = np.linspace(g.m0 - half_width * sd, g.m0 + half_width * sd, n_grid)
    x, y = np.meshgrid(ax, ax, indexing="ij")
    det = (s + t) ** 2 - s ** 2
    quad = g.quad_form(x, y)
    joint_pdf = np.exp(-quad / (2.0 * det)) / (2.0 * np.pi * np.sqrt(det))
    dx2 = (x - g.m0) ** 2 + (y - g.m0) ** 2
    prod_pdf = np.exp(-dx2 / (2.0 * (s + t))) / (2.0 * np.pi * (s + t))
    kv = np.asarray(k.evaluate(x, y), dtype=float)
    if not gen.in_conj_domain(gen.clamp(kv)):
        raise InputError("scorer not clampable to the conjugate domain")
    kv = gen.clamp(kv)
    integrand = joint_pdf * kv - prod_pdf * gen.phi_star(kv)
    return float(np.trapezoid(np.trapezoid(integrand, ax, axis=1), ax))


def accuracy(gen: ConvexGenerator, k, joint) -> AccuracyGap:
    """Mutual information minus the truth-telling ex-ante payment of k."""
    if isinstance(joint, GaussianJoint):
        mi = mutual_information(gen, joint)
        value = mi - gaussian_variational_value(gen, k, joint)
        return AccuracyGap(max(value, 0.0) if value > -1e-9 else value)
    mi = mutual_information(gen, joint)
    payment = exact_ex_ante_payment(gen, k, joint,
                                    truth_profile(joint.nx, joint.ny))
    return AccuracyGap(mi - payment)


def tv_distance(p: FiniteDistribution, q: FiniteDistribution,
                halved: bool = True) -> float:
    """Total variation distance; ``halved=False`` gives the plain
    one-norm convention used by the learning-rate bound."""
    if p.n != q.n:
        raise InputError("distributions on different outcome sets")
    total = float(np.abs(p.weights - q.weights).sum())
    return 0.5 * total if halved else total


def lipschitz_constant(gen: ConvexGenerator, alpha: float) -> float:
    """Lipschitz constant of phi on [alpha, 1/alpha]: by convexity the
    slope is extremal at the interval endpoints."""
    lo = gen.subgradient(alpha)
    hi = gen.subgradient(1.0 / alpha)
    return max(abs(lo[0]), abs(lo[1]), abs(hi[0]), abs(hi[1]))


def check_tv_accuracy_bound(gen: ConvexGenerator, joint: FiniteJoint,
                            perturbed: FiniteJoint, alpha: float,
                            c_lipschitz: float) -> bool:
    """Check that the scorer computed from a perturbed prior is
    (6 c_L / alpha^2) * delta ideal, delta the un-halved total variation."""
    cells = joint.p.ravel()
    if not np.all((cells > 2 * alpha) | (cells == 0)):
        raise InputError("prior violates the cell-mass precondition "
                         "(every cell must exceed 2*alpha or be zero)")
    if c_lipschitz + 1e-12 < lipschitz_constant(gen, alpha):
        raise InputError("c_lipschitz below the actual Lipschitz constant "
                         f"on [{alpha}, {1 / alpha}]")
    delta = tv_distance(FiniteDistribution(joint.p.ravel()),
                        FiniteDistribution(perturbed.p.ravel()), halved=False)
    if delta >= alpha:
        raise InputError(f"perturbation {delta} not below alpha={alpha}")
    k_hat = _subgradient_scorer(gen, perturbed.p)
    gap = accuracy(gen, clamp_to_domain(gen, k_hat), joint).value
    return gap <= 6.0 * c_lipschitz / alpha ** 2 * delta

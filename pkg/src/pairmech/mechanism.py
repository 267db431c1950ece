"""The pairing payment rule, exact and Monte Carlo ex-ante payments,
the learning-equipped mechanism, and multi-agent extensions.

Payment to an agent is score(bonus reports) minus the conjugate applied
to score(penalty reports), where the penalty pair crosses two distinct
tasks.  Exact computations are pure; Monte Carlo paths take explicitly
partitioned generators and reduce deterministically by replicate index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateInputError, InputError
from .generators import ConvexGenerator, mutual_information
from .priors import DawidSkeneModel, FiniteJoint, pushforward, sample_tasks
from .scoring import Tabular, clamp_to_domain, ideal_finite
from .strategies import StrategyProfile, apply_profile


@dataclass(frozen=True)
class TaskAssignment:
    """Bonus task b plus penalty tasks (p for the agent's own report,
    q for the peer's); p and q must be distinct, b may coincide."""

    bonus: int
    penalty_a: int
    penalty_b: int

    def __post_init__(self):
        if self.penalty_a == self.penalty_b:
            raise InputError("penalty tasks must be distinct")

    def validate(self, n_tasks: int):
        for t in (self.bonus, self.penalty_a, self.penalty_b):
            if not 0 <= t < n_tasks:
                raise InputError(f"task index {t} out of range for {n_tasks} tasks")


@dataclass(frozen=True)
class PaymentLedger:
    alice: float
    bob: float
    assignment_a: TaskAssignment
    assignment_b: TaskAssignment

    def __post_init__(self):
        if not (np.isfinite(self.alice) and np.isfinite(self.bob)):
            raise InputError("non-finite payment")


@dataclass(frozen=True)
class ExperimentReport:
    mean_alice: float
    mean_bob: float
    se_alice: float
    se_bob: float
    replicates: int
    seed: int
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.se_alice < 0 or self.se_bob < 0:
            raise InputError("negative standard error")

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "mean_alice": self.mean_alice,
            "mean_bob": self.mean_bob,
            "se_alice": self.se_alice,
            "se_bob": self.se_bob,
            "replicates": self.replicates,
            "seed": self.seed,
            "config": self.config,
        }


def default_assignments(n_tasks: int) -> tuple[TaskAssignment, TaskAssignment]:
    """Round-robin default: bonus is the first scoring task; penalties are
    the next two, swapped between the agents.  With exactly two tasks the
    bonus doubles as a penalty task (the rule only needs p != q)."""
    if n_tasks < 2:
        raise InputError("need at least 2 scoring tasks")
    if n_tasks == 2:
        return (TaskAssignment(0, 0, 1), TaskAssignment(0, 1, 0))
    return (TaskAssignment(0, 1, 2), TaskAssignment(0, 2, 1))


def random_assignments(n_tasks: int,
                       rng: np.random.Generator) -> tuple[TaskAssignment, TaskAssignment]:
    if n_tasks < 2:
        raise InputError("need at least 2 scoring tasks")

    def one() -> TaskAssignment:
        b = int(rng.integers(n_tasks))
        p, q = rng.choice(n_tasks, size=2, replace=False)
        return TaskAssignment(b, int(p), int(q))

    return one(), one()


def _agent_payment(gen: ConvexGenerator, k, xs, ys, a: TaskAssignment) -> float:
    bonus = float(k.evaluate(xs[a.bonus], ys[a.bonus]))
    penalty = float(gen.phi_star(k.evaluate(xs[a.penalty_a], ys[a.penalty_b])))
    return bonus - penalty


def pairing_payment(gen: ConvexGenerator, k, reports_x, reports_y,
                    assign_a: TaskAssignment,
                    assign_b: TaskAssignment) -> PaymentLedger:
    """One-shot payment rule applied to a report profile."""
    xs = np.asarray(reports_x)
    ys = np.asarray(reports_y)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise InputError("report profile must be two equal vectors, m >= 2")
    assign_a.validate(xs.size)
    assign_b.validate(xs.size)
    return PaymentLedger(
        alice=_agent_payment(gen, k, xs, ys, assign_a),
        bob=_agent_payment(gen, k, xs, ys, assign_b),
        assignment_a=assign_a,
        assignment_b=assign_b,
    )


def exact_ex_ante_payment(gen: ConvexGenerator, k: Tabular, joint: FiniteJoint,
                          profile: StrategyProfile) -> float:
    """Closed-form expected payment under a finite joint and profile.

    sum_{x,y} p(x,y) E_theta[k] on the bonus pair minus
    sum_{x,y} p_X p_Y E_theta[phi_star(k)] on the penalty pair.
    """
    a = profile.a.matrix
    b = profile.b.matrix
    kv = k.values
    if a.shape[1] != kv.shape[0] or b.shape[1] != kv.shape[1]:
        raise InputError("scorer shape does not match report spaces")
    if a.shape[0] != joint.nx or b.shape[0] != joint.ny:
        raise InputError("strategy dimensions do not match the joint")
    bonus_scores = a @ kv @ b.T          # E[k | signals], per signal pair
    penalty_scores = a @ gen.phi_star(kv) @ b.T
    prod = np.outer(joint.marginal_x, joint.marginal_y)
    return float(np.sum(joint.p * bonus_scores) - np.sum(prod * penalty_scores))


def monte_carlo_payment(gen: ConvexGenerator, k, prior, profile: StrategyProfile,
                        m: int, reps: int, rng: np.random.Generator,
                        assignment: str = "round_robin",
                        seed: int | None = None) -> ExperimentReport:
    """Estimate ex-ante payments by repeated fresh simulation.

    Each replicate samples m tasks, applies the strategy profile, and runs
    the payment rule once.  Mean and standard error per agent are reported.
    """
    if m < 2 or reps < 1:
        raise InputError("need m >= 2 and reps >= 1")
    alice = np.empty(reps)
    bob = np.empty(reps)
    x, y = sample_tasks(prior, m * reps, rng)
    xh, yh = apply_profile(profile, x.reshape(reps, m), y.reshape(reps, m), rng)
    for r in range(reps):
        if assignment == "round_robin":
            aa, ab = default_assignments(m)
        elif assignment == "random":
            aa, ab = random_assignments(m, rng)
        else:
            raise InputError(f"unknown assignment mode {assignment!r}")
        ledger = pairing_payment(gen, k, xh[r], yh[r], aa, ab)
        alice[r] = ledger.alice
        bob[r] = ledger.bob

    def se(v: np.ndarray) -> float:
        if reps == 1:
            return 0.0
        return float(v.std(ddof=1) / np.sqrt(reps))

    return ExperimentReport(
        mean_alice=float(alice.mean()), mean_bob=float(bob.mean()),
        se_alice=se(alice), se_bob=se(bob),
        replicates=reps, seed=-1 if seed is None else seed,
        config={"m": m, "assignment": assignment, "generator": gen.name},
    )


def fantasy_payment(gen: ConvexGenerator, joint: FiniteJoint,
                    profile: StrategyProfile) -> float:
    """Expected payment under the best scorer for the reports' own
    distribution; equals the mutual information of the pushforward."""
    pushed = pushforward(joint, profile)
    return mutual_information(gen, pushed)


Learner = Callable[[np.ndarray, np.ndarray], object]


def run_mechanism(gen: ConvexGenerator, learner: Learner, reports_x, reports_y,
                  m_learning: int, assignment: str = "round_robin",
                  rng: np.random.Generator | None = None) -> PaymentLedger:
    """Learning-equipped mechanism: train a scorer on a prefix partition of
    the tasks, then run the payment rule on the remaining scoring tasks."""
    xs = np.asarray(reports_x)
    ys = np.asarray(reports_y)
    if xs.size < m_learning + 2:
        raise InputError(
            f"need at least {m_learning + 2} tasks, got {xs.size}")
    k_est = learner(xs[:m_learning], ys[:m_learning])
    k_est = clamp_to_domain(gen, k_est)
    xs_s, ys_s = xs[m_learning:], ys[m_learning:]
    if assignment == "round_robin":
        aa, ab = default_assignments(xs_s.size)
    elif assignment == "random":
        if rng is None:
            raise InputError("random assignment requires an rng")
        aa, ab = random_assignments(xs_s.size, rng)
    else:
        raise InputError(f"unknown assignment mode {assignment!r}")
    return pairing_payment(gen, k_est, xs_s, ys_s, aa, ab)


def mechanism_ex_ante_payment(gen: ConvexGenerator, learner: Learner,
                              joint: FiniteJoint, profile: StrategyProfile,
                              m: int, m_learning: int,
                              rng: np.random.Generator) -> float:
    """One replicate of the learning-equipped mechanism, scoring-task
    expectation taken exactly.

    Samples m tasks, applies the profile, trains on the learning prefix,
    and returns the exact expected payment of the learned (clamped)
    scorer under the true joint and the same profile.
    """
    if m < m_learning + 2:
        raise InputError("m must be at least m_learning + 2")
    x, y = sample_tasks(joint, m, rng)
    xh, yh = apply_profile(profile, x, y, rng)
    k_est = clamp_to_domain(gen, learner(xh[:m_learning], yh[:m_learning]))
    return exact_ex_ante_payment(gen, k_est, joint, profile)


def multi_agent_random_pairing(gen: ConvexGenerator, learner: Learner,
                               all_reports, m_learning: int,
                               rng: np.random.Generator) -> list[PaymentLedger]:
    """Pair each agent with a uniformly chosen distinct peer and run the
    learning-equipped mechanism per pair."""
    reports = [np.asarray(r) for r in all_reports]
    n = len(reports)
    if n < 2:
        raise InputError("need at least 2 agents")
    ledgers = []
    for i in range(n):
        peer = int(rng.integers(n - 1))
        if peer >= i:
            peer += 1
        ledgers.append(run_mechanism(gen, learner, reports[i], reports[peer],
                                     m_learning))
    return ledgers


def plurality_vote(reports: np.ndarray, n_labels: int) -> np.ndarray:
    """Per-task plurality over agents (rows); ties break to the lowest
    label index."""
    counts = np.zeros((reports.shape[1], n_labels), dtype=int)
    for row in reports:
        np.add.at(counts, (np.arange(reports.shape[1]), row), 1)
    return counts.argmax(axis=1)


def multi_agent_latent_pairing(gen: ConvexGenerator, learner: Learner,
                               model: DawidSkeneModel, all_reports,
                               agent: int, m_learning: int,
                               recovery: Callable | None = None) -> PaymentLedger:
    """Pay an agent the mutual information between their reports and
    latent labels recovered from everyone else's reports."""
    reports = np.asarray(all_reports)
    if reports.shape[0] < 3:
        raise DegenerateInputError("latent pairing needs at least 2 peers")
    peers = np.delete(reports, agent, axis=0)
    if recovery is None:
        labels = plurality_vote(peers, model.class_prior.n)
    else:
        labels = np.asarray(recovery(peers))
    return run_mechanism(gen, learner, reports[agent], labels, m_learning)

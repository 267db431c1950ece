"""Config-driven command line runner.

Subcommands: divergence, ideal, simulate, learn, verify.  Configs are
flat key-value files with section headers; seeds are mandatory (either
in the config or via --seed) so every run is reproducible.  Exit codes:
0 success, 1 property failure, 2 configuration or input error.
"""

from __future__ import annotations

import configparser
import csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from .errors import PairmechError
from .generators import CATALOG_NAMES, FiniteDistribution, catalog, mutual_information
from .learning import (LearnerConfig, accuracy, learn_erm, learn_generative)
from .mechanism import (default_assignments, pairing_payment, run_mechanism)
from .plots import render_payments, render_scorer
from .priors import (FiniteJoint, GaussianJoint, builtin_prior, sample_tasks)
from .scoring import Tabular, ideal_finite, ideal_gaussian
from .strategies import (GaussianStrategy, MatrixStrategy, StrategyProfile,
                         apply_profile, oblivious, permutation, truth_telling)
from .verify import SUITE_NAMES, run_suite


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _load_config(path: str) -> configparser.ConfigParser:
    p = Path(path)
    if not p.is_file():
        _fail(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    try:
        cp.read_string(p.read_text())
    except configparser.Error as e:
        _fail(f"malformed config {path}: {e}")
    return cp


def _resolve_seed(cp: configparser.ConfigParser, seed: int | None) -> int:
    if seed is not None:
        return seed
    if cp.has_option("run", "seed"):
        return cp.getint("run", "seed")
    _fail("no seed: set [run] seed or pass --seed")


def _build_prior(cp: configparser.ConfigParser):
    if not cp.has_section("prior"):
        _fail("missing [prior] section")
    kind = cp.get("prior", "kind", fallback="builtin")
    if kind == "builtin":
        return builtin_prior(cp.get("prior", "name"))
    if kind == "matrix":
        path = cp.get("prior", "file")
        if not Path(path).is_file():
            _fail(f"prior matrix file not found: {path}")
        return FiniteJoint.from_text(Path(path).read_text())
    if kind == "gaussian":
        return GaussianJoint(cp.getfloat("prior", "m0", fallback=0.0),
                             cp.getfloat("prior", "sigma2"),
                             cp.getfloat("prior", "tau2"))
    _fail(f"unknown prior kind {kind!r}")


def _build_strategy(cp: configparser.ConfigParser, section: str, n: int | None):
    """Parse one agent's strategy; defaults to truth-telling."""
    if not cp.has_section(section):
        return truth_telling(n) if n is not None else GaussianStrategy("identity")
    kind = cp.get(section, "kind", fallback="truth")
    if n is None:  # Gaussian signal space
        params = tuple(float(t) for t in
                       cp.get(section, "params", fallback="").split())
        return GaussianStrategy("identity" if kind == "truth" else kind, params)
    if kind == "truth":
        return truth_telling(n)
    if kind == "permutation":
        return permutation(int(t) for t in cp.get(section, "perm").split())
    if kind == "oblivious":
        w = [float(t) for t in cp.get(section, "weights").split()]
        return oblivious(FiniteDistribution(np.asarray(w)))
    if kind == "matrix":
        return MatrixStrategy.from_text(Path(cp.get(section, "file")).read_text())
    _fail(f"unknown strategy kind {kind!r} in [{section}]")


def _build_learner(cp: configparser.ConfigParser) -> LearnerConfig | None:
    if not cp.has_section("learner"):
        return None
    sec = cp["learner"]
    return LearnerConfig(
        method=sec.get("method", "generative"),
        functional_class=sec.get("functional_class", "tabular"),
        coefficient_bound=sec.getfloat("coefficient_bound", 50.0),
        step_size=sec.getfloat("step_size", 0.05),
        max_iters=sec.getint("max_iters", 100_000),
        grad_tol=sec.getfloat("grad_tol", 1e-8),
    )


def _make_learner(gen, config: LearnerConfig, nx: int | None, ny: int | None):
    if config.method == "generative":
        return lambda xs, ys: learn_generative(gen, xs, ys, nx, ny)
    return lambda xs, ys: learn_erm(gen, xs, ys, config, nx, ny)


def _echo_config(cp: configparser.ConfigParser) -> dict:
    return {s: dict(cp[s]) for s in cp.sections()}


@click.group()
def main():
    """Multi-task peer prediction via divergence-pairing payments."""


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--seed", type=int, default=None)
def divergence(config_path, seed):
    """Print the mutual information of a prior for requested generators."""
    try:
        cp = _load_config(config_path)
        prior = _build_prior(cp)
        names = cp.get("run", "generators", fallback="all")
        names = list(CATALOG_NAMES) if names == "all" else \
            [t.strip() for t in names.split(",")]
        click.echo(f"{'generator':<20} mutual_information")
        for name in names:
            mi = mutual_information(catalog(name), prior)
            click.echo(f"{name:<20} {mi:.6f}")
    except PairmechError as e:
        _fail(str(e))


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--out", "out_dir", default=".", metavar="DIR")
def ideal(config_path, out_dir):
    """Compute the ideal scoring function of a known prior."""
    try:
        cp = _load_config(config_path)
        gen = catalog(cp.get("run", "generator"))
        prior = _build_prior(cp)
        if isinstance(prior, GaussianJoint):
            k = ideal_gaussian(gen, prior)
        else:
            k = ideal_finite(gen, prior)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "scorer.txt").write_text(k.to_text())
        render_scorer(k, str(out / "scorer.png"),
                      title=f"ideal scorer ({gen.name})")
        if isinstance(k, Tabular):
            for row in k.values:
                click.echo(" ".join(f"{v:.6f}" for v in row))
        else:
            click.echo(k.to_text().rstrip())
        click.echo(f"wrote {out / 'scorer.txt'} and {out / 'scorer.png'}")
    except PairmechError as e:
        _fail(str(e))


def _simulate_replicates(gen, prior, profile, k_fixed, learner, m, m_learning,
                         replicates, assignment, rng):
    alice = np.empty(replicates)
    bob = np.empty(replicates)
    for r in range(replicates):
        x, y = sample_tasks(prior, m, rng)
        xh, yh = apply_profile(profile, x, y, rng)
        if learner is not None:
            ledger = run_mechanism(gen, learner, xh, yh, m_learning,
                                   assignment, rng)
        else:
            if assignment == "random":
                from .mechanism import random_assignments
                aa, ab = random_assignments(m, rng)
            else:
                aa, ab = default_assignments(m)
            ledger = pairing_payment(gen, k_fixed, xh, yh, aa, ab)
        alice[r], bob[r] = ledger.alice, ledger.bob
    return alice, bob


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", default=".", metavar="DIR")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv")
def simulate(config_path, seed, out_dir, fmt):
    """Run the mechanism on sampled tasks and write a payment report."""
    try:
        cp = _load_config(config_path)
        seed = _resolve_seed(cp, seed)
        gen = catalog(cp.get("run", "generator"))
        prior = _build_prior(cp)
        finite = isinstance(prior, FiniteJoint)
        nx = prior.nx if finite else None
        ny = prior.ny if finite else None
        profile = StrategyProfile(_build_strategy(cp, "strategy_a", nx),
                                  _build_strategy(cp, "strategy_b", ny))
        m = cp.getint("run", "m")
        replicates = cp.getint("run", "replicates", fallback=1)
        assignment = cp.get("run", "assignment", fallback="round_robin")
        scale = cp.getfloat("run", "scale", fallback=1.0)
        shift = cp.getfloat("run", "shift", fallback=0.0)
        learner_config = _build_learner(cp)
        if replicates < 1 or m < 2:
            _fail("need replicates >= 1 and m >= 2")
        if learner_config is not None:
            m_learning = cp.getint("run", "m_learning")
            if m < m_learning + 2:
                _fail(f"m = {m} below m_learning + 2 = {m_learning + 2}")
            learner = _make_learner(gen, learner_config, nx, ny)
            k_fixed = None
        else:
            m_learning = 0
            learner = None
            k_fixed = ideal_gaussian(gen, prior) if not finite \
                else ideal_finite(gen, prior)

        rng = np.random.default_rng(seed)
        alice, bob = _simulate_replicates(gen, prior, profile, k_fixed,
                                          learner, m, m_learning, replicates,
                                          assignment, rng)
        alice = scale * alice + shift
        bob = scale * bob + shift

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rows = [(r, agent, pay[r])
                for r in range(replicates)
                for agent, pay in (("alice", alice), ("bob", bob))]
        if fmt == "csv":
            with open(out / "payments.csv", "w", newline="") as f:
                w = csv.writer(f)
                w.writerow(["replicate", "agent", "payment"])
                w.writerows(rows)
        else:
            (out / "payments.json").write_text(json.dumps(
                [{"replicate": r, "agent": a, "payment": p}
                 for r, a, p in rows], indent=2) + "\n")

        def se(v):
            return float(v.std(ddof=1) / np.sqrt(replicates)) \
                if replicates > 1 else 0.0

        summary = {
            "schema_version": 1,
            "mean_alice": float(alice.mean()),
            "mean_bob": float(bob.mean()),
            "se_alice": se(alice),
            "se_bob": se(bob),
            "replicates": replicates,
            "seed": seed,
            "config": _echo_config(cp),
        }
        (out / "summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n")
        render_payments(alice, bob, str(out / "payments.png"))
        click.echo(f"{'agent':<8} {'mean':>12} {'se':>12}")
        click.echo(f"{'alice':<8} {summary['mean_alice']:>12.6f} "
                   f"{summary['se_alice']:>12.6f}")
        click.echo(f"{'bob':<8} {summary['mean_bob']:>12.6f} "
                   f"{summary['se_bob']:>12.6f}")
    except PairmechError as e:
        _fail(str(e))
    except (configparser.Error, ValueError, KeyError) as e:
        _fail(f"bad config: {e}")


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", default=".", metavar="DIR")
def learn(config_path, seed, out_dir):
    """Learn a scoring function from sampled truthful reports."""
    try:
        cp = _load_config(config_path)
        seed = _resolve_seed(cp, seed)
        gen = catalog(cp.get("run", "generator"))
        prior = _build_prior(cp)
        finite = isinstance(prior, FiniteJoint)
        m_learning = cp.getint("run", "m_learning")
        config = _build_learner(cp) or LearnerConfig()
        rng = np.random.default_rng(seed)
        x, y = sample_tasks(prior, m_learning, rng)
        nx = prior.nx if finite else None
        ny = prior.ny if finite else None
        k = _make_learner(gen, config, nx, ny)(x, y)
        gap = accuracy(gen, k, prior)
        mi = mutual_information(gen, prior)

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "scorer.txt").write_text(k.to_text())
        render_scorer(k, str(out / "scorer.png"),
                      title=f"learned scorer ({config.method})")
        summary = {
            "schema_version": 1,
            "method": config.method,
            "functional_class": config.functional_class,
            "m_learning": m_learning,
            "seed": seed,
            "mutual_information": mi,
            "variational_value": mi - gap.value,
            "accuracy_gap": gap.value,
            "config": _echo_config(cp),
        }
        (out / "summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n")
        click.echo(f"mutual_information  {mi:.6f}")
        click.echo(f"variational_value   {mi - gap.value:.6f}")
        click.echo(f"accuracy_gap        {gap.value:.6f}")
    except PairmechError as e:
        _fail(str(e))
    except (configparser.Error, ValueError, KeyError) as e:
        _fail(f"bad config: {e}")


@main.command()
@click.argument("suite", type=click.Choice(list(SUITE_NAMES)))
@click.option("--seed", type=int, default=20240701)
def verify(suite, seed):
    """Run a named property suite and report per-check status."""
    results = run_suite(suite, seed=seed)
    failures = 0
    for name, msg in results:
        if msg is None:
            click.echo(f"PASS {name}")
        else:
            failures += 1
            click.echo(f"FAIL {name}: {msg}")
    click.echo(f"{len(results) - failures}/{len(results)} checks passed")
    sys.exit(0 if failures == 0 else 1)


if __name__ == "__main__":
    main()

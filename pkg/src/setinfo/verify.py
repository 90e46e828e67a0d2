"""Randomized numerical certification of the identity layer.

Each suite draws seeded random instances, evaluates both sides of one
theorem-level identity through independent code paths, and records any gap
beyond tolerance together with enough serialized input to replay the trial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import serialize
from .convexsets import ConvexSpec, dvarn, pullback, support, translate, vpolyhedron
from .decision import (
    BRIER,
    LOG,
    ZERO_ONE,
    Hypothesis,
    bayes_risk,
    bridge_set,
    constrained_bayes_risk,
    constrained_bridge_class,
    make_loss,
)
from .errors import SetInfoError
from .experiments import (
    Experiment,
    Kernel,
    RefMeasure,
    compose_label,
    compose_observation,
    make_tni,
)
from .information import (
    FunctionClass,
    d_information,
    f_information,
    variational_bruteforce,
    variational_information,
)
from .phicatalog import BUILTIN_NAMES, affine_offset, builtin, d_phi_set

INF = float("inf")

SUITE_NAMES = ("label", "observation", "commutation", "bridges", "invariances", "variational")

_SALT = {name: k + 1 for k, name in enumerate(SUITE_NAMES)}

DEFAULT_TOL = {
    "label": 1e-9,
    "observation": 1e-10,
    "commutation": 1e-9,
    "bridges": 1e-9,
    "invariances": 1e-10,
    "variational": 1e-10,
}

CONSTRAINED_BRIDGE_TOL = 1e-12

SALPHA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class TrialConfig:
    seed: int = 0
    trials: int = 100
    n_range: tuple[int, int] = (2, 3)
    m_range: tuple[int, int] = (2, 8)
    tol: float | None = None
    suites: tuple[str, ...] = SUITE_NAMES

    def __post_init__(self):
        if self.trials < 1:
            raise SetInfoError("trial count must be positive")
        for name, rng in (("n_range", self.n_range), ("m_range", self.m_range)):
            lo, hi = rng
            if lo > hi or lo < 2:
                raise SetInfoError(f"{name} must be a nonempty range starting at 2 or more")
        if self.tol is not None and not self.tol > 0.0:
            raise SetInfoError("tolerance must be positive")
        for s in self.suites:
            if s not in SUITE_NAMES:
                raise SetInfoError(f"unknown suite {s!r}; know {', '.join(SUITE_NAMES)}")


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    passed: int
    failed: int
    worst_gap: float
    failure_cases: tuple[dict, ...]


def _rng(cfg: TrialConfig, suite: str) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, _SALT[suite]])


def _tol(cfg: TrialConfig, suite: str) -> float:
    return DEFAULT_TOL[suite] if cfg.tol is None else cfg.tol


def _dims(cfg: TrialConfig, rng: np.random.Generator) -> tuple[int, int]:
    n = int(rng.integers(cfg.n_range[0], cfg.n_range[1] + 1))
    m = int(rng.integers(cfg.m_range[0], cfg.m_range[1] + 1))
    return n, m


def _gap(a: float, b: float) -> float:
    if a == b:
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return INF
    return abs(a - b)


def random_experiment(rng: np.random.Generator, n: int, m: int, zero_rate: float = 0.1) -> Experiment:
    """Flat-Dirichlet rows; a fraction of draws force zero entries to exercise
    the boundary conventions."""
    rows = rng.dirichlet(np.ones(m), size=n)
    if zero_rate > 0.0 and rng.random() < zero_rate:
        mask = rng.random((n, m)) < 0.4
        keep = rng.integers(0, m, size=n)
        mask[np.arange(n), keep] = False
        rows = np.where(mask, 0.0, rows)
        rows /= rows.sum(axis=1, keepdims=True)
    return Experiment(rows)


def random_kernel(rng: np.random.Generator, k: int, l: int) -> Kernel:
    return Kernel(rng.dirichlet(np.ones(l), size=k))


def random_prior(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        pi = rng.dirichlet(np.ones(n))
        if np.all(pi > 1e-9):
            return pi


def random_dset(rng: np.random.Generator, n: int) -> ConvexSpec:
    """A random normalized-family member: vertices in the halfspace
    <v, 1_n> <= 0 plus the origin, recession rays -e_i; support at 1_n is 0
    exactly."""
    k = int(rng.integers(2, 6))
    v = rng.standard_normal((k, n))
    # strictly inside the halfspace, so the origin vertex alone attains
    # support 0 at 1_n and the value is exact
    excess = np.maximum(v.sum(axis=1) + 1e-9, 0.0)
    v[:, 0] -= excess
    v = np.vstack([v, np.zeros(n)])
    spec = vpolyhedron(v, -np.eye(n))
    s1 = support(spec, np.ones(n))
    if s1 != 0.0:
        raise SetInfoError(f"random set generator broke normalization: {s1}")
    return spec


def _random_set(rng: np.random.Generator, n: int) -> ConvexSpec:
    if n == 2 and rng.random() < 0.5:
        return d_phi_set(builtin(BUILTIN_NAMES[int(rng.integers(0, len(BUILTIN_NAMES)))]))
    return random_dset(rng, n)


def _fail_case(**parts) -> dict:
    return parts


def _finish(suite: str, trials: int, failures: list[dict], worst: float) -> SuiteReport:
    return SuiteReport(
        suite=suite,
        passed=trials - len(failures),
        failed=len(failures),
        worst_gap=worst,
        failure_cases=tuple(failures),
    )


def suite_label_equality(cfg: TrialConfig) -> SuiteReport:
    """I_D(RE) against I over the pulled-back set on the raw experiment."""
    rng = _rng(cfg, "label")
    tol = _tol(cfg, "label")
    failures, worst = [], 0.0
    for trial in range(cfg.trials):
        n, m = _dims(cfg, rng)
        e = random_experiment(rng, n, m)
        r = random_kernel(rng, n, n)
        spec = _random_set(rng, n)
        lhs = d_information(spec, compose_label(r, e)).value
        rhs = d_information(pullback(spec, r.matrix), e).value
        gap = _gap(lhs, rhs)
        worst = max(worst, gap) if gap != INF else INF
        if gap > tol:
            failures.append(_fail_case(
                trial=trial,
                experiment=serialize.experiment_to_dict(e),
                kernel=serialize.kernel_to_dict(r),
                set=serialize.spec_to_dict(spec),
                lhs=serialize.fmt_float(lhs),
                rhs=serialize.fmt_float(rhs),
                gap=serialize.fmt_float(gap),
            ))
    return _finish("label", cfg.trials, failures, worst)


def _random_class(rng: np.random.Generator, n: int, m: int) -> FunctionClass:
    count = int(rng.integers(1, 6))
    members = tuple(-np.abs(rng.standard_normal((n, m))) for _ in range(count))
    return FunctionClass(members)


def suite_observation_equality(cfg: TrialConfig) -> SuiteReport:
    """I_F(ES) against the kernel-smoothed class on the raw experiment."""
    rng = _rng(cfg, "observation")
    tol = _tol(cfg, "observation")
    failures, worst = [], 0.0
    for trial in range(cfg.trials):
        n, m = _dims(cfg, rng)
        e = random_experiment(rng, n, m)
        s = random_kernel(rng, m, m)
        fclass = _random_class(rng, n, m)
        lhs = f_information(fclass, compose_observation(e, s)).value
        smoothed = FunctionClass(tuple(f @ s.matrix.T for f in fclass.members))
        rhs = f_information(smoothed, e).value
        gap = _gap(lhs, rhs)
        worst = max(worst, gap)
        if gap > tol:
            failures.append(_fail_case(
                trial=trial,
                experiment=serialize.experiment_to_dict(e),
                kernel=serialize.kernel_to_dict(s),
                fclass=serialize.fclass_to_dict(fclass),
                lhs=serialize.fmt_float(lhs),
                rhs=serialize.fmt_float(rhs),
                gap=serialize.fmt_float(gap),
            ))
    return _finish("observation", cfg.trials, failures, worst)


def suite_commutation(cfg: TrialConfig) -> SuiteReport:
    """Three-way equality: process the experiment on both ends, or absorb
    either kernel (or both) into the class."""
    rng = _rng(cfg, "commutation")
    tol = _tol(cfg, "commutation")
    failures, worst = [], 0.0
    for trial in range(cfg.trials):
        n, m = _dims(cfg, rng)
        e = random_experiment(rng, n, m)
        r = random_kernel(rng, n, n)
        s = random_kernel(rng, m, m)
        fclass = _random_class(rng, n, m)
        processed = compose_label(r, compose_observation(e, s))
        base = f_information(fclass, processed).value
        by_s_first = FunctionClass(tuple(r.matrix.T @ (f @ s.matrix.T) for f in fclass.members))
        by_r_first = FunctionClass(tuple((r.matrix.T @ f) @ s.matrix.T for f in fclass.members))
        v1 = f_information(by_s_first, e).value
        v2 = f_information(by_r_first, e).value
        gap = max(_gap(base, v1), _gap(base, v2), _gap(v1, v2))
        worst = max(worst, gap)
        if gap > tol:
            failures.append(_fail_case(
                trial=trial,
                experiment=serialize.experiment_to_dict(e),
                label_kernel=serialize.kernel_to_dict(r),
                observation_kernel=serialize.kernel_to_dict(s),
                fclass=serialize.fclass_to_dict(fclass),
                values=[serialize.fmt_float(v) for v in (base, v1, v2)],
                gap=serialize.fmt_float(gap),
            ))
    return _finish("commutation", cfg.trials, failures, worst)


_GRID_CACHE: dict[tuple[int, str], np.ndarray] = {}


def _loss_for(n: int, form: str):
    key = (n, form)
    if key not in _GRID_CACHE:
        _GRID_CACHE[key] = make_loss(form, n).grid
    return make_loss(form, n, grid=_GRID_CACHE[key])


def suite_bridges(cfg: TrialConfig) -> SuiteReport:
    """Bayes risk = minus bridge-set information (shared grid, so exact), and
    the constrained version against the function-class bridge."""
    rng = _rng(cfg, "bridges")
    tol = _tol(cfg, "bridges")
    failures, worst = [], 0.0
    forms = (ZERO_ONE, BRIER, LOG)
    for trial in range(cfg.trials):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(cfg.m_range[0], cfg.m_range[1] + 1))
        loss = _loss_for(n, forms[trial % len(forms)])
        e = random_experiment(rng, n, m)
        pi = random_prior(rng, n)
        brisk = bayes_risk(loss, pi, e)
        info = d_information(bridge_set(loss, pi), e).value
        gap_u = _gap(brisk, -info)

        count = int(rng.integers(1, 21))
        g = len(loss.grid)
        hyps = [Hypothesis(loss.grid[rng.integers(0, g, size=m)]) for _ in range(count)]
        cbrisk = constrained_bayes_risk(loss, hyps, pi, e)
        cinfo = f_information(constrained_bridge_class(loss, hyps, pi), e).value
        gap_c = _gap(cbrisk, -cinfo)

        worst = max(worst, gap_u, gap_c)
        if gap_u > tol or gap_c > CONSTRAINED_BRIDGE_TOL:
            failures.append(_fail_case(
                trial=trial,
                loss_form=loss.form,
                n=n,
                experiment=serialize.experiment_to_dict(e),
                prior=serialize.encode_array(pi),
                hypotheses=[serialize.hypothesis_to_dict(h) for h in hyps],
                unconstrained_gap=serialize.fmt_float(gap_u),
                constrained_gap=serialize.fmt_float(gap_c),
            ))
    return _finish("bridges", cfg.trials, failures, worst)


def suite_invariances(cfg: TrialConfig) -> SuiteReport:
    """Affine offsets of phi, sliding along 1-orthogonal directions, totally
    noninformative inputs, reference-measure choice, and label permutations
    all leave the information unchanged."""
    rng = _rng(cfg, "invariances")
    tol = _tol(cfg, "invariances")
    failures, worst = [], 0.0
    for trial in range(cfg.trials):
        n, m = _dims(cfg, rng)
        bad: list[str] = []
        gaps: list[float] = []

        gen = builtin(BUILTIN_NAMES[int(rng.integers(0, len(BUILTIN_NAMES)))])
        c = float(rng.uniform(-2.0, 2.0))
        e2 = random_experiment(rng, 2, m)
        g = _gap(d_information(d_phi_set(affine_offset(gen, c)), e2).value,
                 d_information(d_phi_set(gen), e2).value)
        gaps.append(g)
        if g > tol:
            bad.append("affine_offset")

        spec = random_dset(rng, n)
        e = random_experiment(rng, n, m)
        p = rng.standard_normal(n)
        p[0] -= p.sum()
        g = _gap(d_information(translate(spec, p), e).value, d_information(spec, e).value)
        gaps.append(g)
        if g > tol:
            bad.append("sliding")

        tni = make_tni(n, m, rng.dirichlet(np.ones(m)))
        g = abs(d_information(_random_set(rng, n), tni).value)
        gaps.append(g)
        if g > tol:
            bad.append("tni_zero")

        refs = [
            None,
            RefMeasure(np.full(m, 1.0 / m)),
            RefMeasure(np.maximum(rng.dirichlet(np.ones(m)), 1e-6)),
        ]
        vals = [d_information(spec, e, ref).value for ref in refs]
        g = max(_gap(vals[0], vals[1]), _gap(vals[0], vals[2]))
        gaps.append(g)
        if g > tol:
            bad.append("ref_choice")

        perm = np.eye(n)[rng.permutation(n)]
        g = _gap(d_information(dvarn(n), compose_label(Kernel(perm), e)).value,
                 d_information(dvarn(n), e).value)
        gaps.append(g)
        if g > tol:
            bad.append("permutation")

        worst = max(worst, *gaps)
        if bad:
            failures.append(_fail_case(
                trial=trial,
                violated=bad,
                experiment=serialize.experiment_to_dict(e),
                binary_experiment=serialize.experiment_to_dict(e2),
                set=serialize.spec_to_dict(spec),
                gaps=[serialize.fmt_float(x) for x in gaps],
            ))
    return _finish("invariances", cfg.trials, failures, worst)


def _salpha_kernel(n: int, alpha: float) -> Kernel:
    return Kernel(alpha * np.eye(n) + (1.0 - alpha) / n * np.ones((n, n)))


def suite_variational(cfg: TrialConfig) -> SuiteReport:
    """Closed form, exhaustive partition search, and the set route agree; the
    shrinkage family scales the value linearly."""
    rng = _rng(cfg, "variational")
    tol = _tol(cfg, "variational")
    failures, worst = [], 0.0
    for trial in range(cfg.trials):
        n, m = _dims(cfg, rng)
        while n**m > 100_000:
            m -= 1
        e = random_experiment(rng, n, m)
        closed = variational_information(e).value
        brute = variational_bruteforce(e)
        via_set = d_information(dvarn(n), e).value
        gap = max(_gap(closed, brute), _gap(closed, via_set))
        scale_gap = 0.0
        for alpha in SALPHA_GRID:
            shrunk = compose_label(_salpha_kernel(n, alpha), e)
            scale_gap = max(scale_gap,
                            _gap(variational_information(shrunk).value, alpha * closed))
        worst = max(worst, gap, scale_gap)
        if gap > tol or scale_gap > tol:
            failures.append(_fail_case(
                trial=trial,
                experiment=serialize.experiment_to_dict(e),
                closed=serialize.fmt_float(closed),
                brute=serialize.fmt_float(brute),
                via_set=serialize.fmt_float(via_set),
                scale_gap=serialize.fmt_float(scale_gap),
            ))
    return _finish("variational", cfg.trials, failures, worst)


_SUITES = {
    "label": suite_label_equality,
    "observation": suite_observation_equality,
    "commutation": suite_commutation,
    "bridges": suite_bridges,
    "invariances": suite_invariances,
    "variational": suite_variational,
}


def run_all(cfg: TrialConfig) -> list[SuiteReport]:
    """Runs the requested suites with per-suite seed substreams; fully
    deterministic for a fixed config."""
    return [_SUITES[name](cfg) for name in cfg.suites]


# --- report plumbing -----------------------------------------------------------


def config_to_dict(cfg: TrialConfig) -> dict:
    return {
        "seed": cfg.seed,
        "trials": cfg.trials,
        "n_range": list(cfg.n_range),
        "m_range": list(cfg.m_range),
        "tol": None if cfg.tol is None else serialize.fmt_float(cfg.tol),
        "suites": list(cfg.suites),
    }


def config_from_dict(d: dict) -> TrialConfig:
    kwargs = {}
    if "seed" in d:
        kwargs["seed"] = int(d["seed"])
    if "trials" in d:
        kwargs["trials"] = int(d["trials"])
    for key in ("n_range", "m_range"):
        if key in d:
            lo, hi = d[key]
            kwargs[key] = (int(lo), int(hi))
    if d.get("tol") is not None:
        kwargs["tol"] = serialize.parse_float(d["tol"])
    if "suites" in d:
        kwargs["suites"] = tuple(d["suites"])
    try:
        return TrialConfig(**kwargs)
    except SetInfoError:
        raise
    except Exception as exc:
        raise SetInfoError(f"bad verify config: {exc}") from None


def report_to_dict(report: SuiteReport) -> dict:
    return {
        "suite": report.suite,
        "passed": report.passed,
        "failed": report.failed,
        "worst_gap": serialize.fmt_float(report.worst_gap),
        "failure_cases": list(report.failure_cases),
    }


def full_report(cfg: TrialConfig, reports: list[SuiteReport]) -> dict:
    return {
        "config": config_to_dict(cfg),
        "suites": [report_to_dict(r) for r in reports],
        "all_passed": all(r.failed == 0 for r in reports),
    }

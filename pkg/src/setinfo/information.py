"""Information functionals over convex sets and finite function classes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import HAVE_NUMBA, active_backend
from .convexsets import ConvexSpec, contains, support, support_subgradient
from .errors import DimensionError, SetInfoError, SubgradientError
from .experiments import (
    Experiment,
    Kernel,
    RefMeasure,
    compose_observation,
    default_ref,
    rn_matrix,
)
from .phicatalog import CatalogError, PhiGenerator

INF = float("inf")

BRUTE_FORCE_LIMIT = 10_000_000


@dataclass(frozen=True)
class FunctionClass:
    """A finite list of candidate functions f: outcomes -> R^n, stored as
    n x m tables (column x is f(x))."""

    members: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.members:
            raise SetInfoError("function class needs at least one member")
        mem = tuple(np.atleast_2d(np.asarray(f, dtype=float)) for f in self.members)
        shape = mem[0].shape
        for k, f in enumerate(mem):
            if f.shape != shape:
                raise DimensionError(f"member {k} has shape {f.shape}, expected {shape}")
        object.__setattr__(self, "members", mem)

    @property
    def n(self) -> int:
        return self.members[0].shape[0]

    @property
    def m(self) -> int:
        return self.members[0].shape[1]


@dataclass(frozen=True)
class InfoResult:
    value: float
    per_outcome: np.ndarray
    witness: np.ndarray | None
    ref: RefMeasure


@dataclass(frozen=True)
class BssReport:
    passed: int
    failed: int
    worst_gap: float
    violations: tuple[dict, ...]


def certify_range(fclass: FunctionClass, spec: ConvexSpec, tol: float = 1e-9) -> bool:
    """True when every column of every member lies in the set."""
    if fclass.n != spec.dim:
        raise DimensionError(f"class over R^{fclass.n} but set in R^{spec.dim}")
    return all(
        contains(spec, f[:, x], tol) for f in fclass.members for x in range(fclass.m)
    )


def d_information(spec: ConvexSpec, e: Experiment, ref: RefMeasure | None = None) -> InfoResult:
    """I_D(E): the rho-average of the support function along the
    Radon-Nikodym vectors. Invariant to the choice of dominating rho."""
    if spec.dim != e.n:
        raise DimensionError(f"set in R^{spec.dim} but experiment has {e.n} labels")
    ref = default_ref(e) if ref is None else ref
    rn, null = rn_matrix(e, ref)
    w = ref.weights
    per = np.zeros(e.m)
    total = 0.0
    infinite = False
    for x in range(e.m):
        if null[x]:
            continue
        s = support(spec, rn[:, x])
        per[x] = s
        if s == INF:
            infinite = True
        else:
            total += w[x] * s
    if infinite:
        return InfoResult(value=INF, per_outcome=per, witness=None, ref=ref)
    witness = _witness_table(spec, rn, null)
    return InfoResult(value=total, per_outcome=per, witness=witness, ref=ref)


def _witness_table(spec: ConvexSpec, rn: np.ndarray, null: np.ndarray) -> np.ndarray | None:
    n, m = rn.shape
    cols = np.zeros((n, m))
    anchor = None
    for x in range(m):
        try:
            if null[x]:
                # no mass here; park the witness at the point supporting 1_n
                if anchor is None:
                    anchor = support_subgradient(spec, np.ones(n))
                cols[:, x] = anchor
            else:
                cols[:, x] = support_subgradient(spec, rn[:, x])
        except (SubgradientError, SetInfoError):
            return None
    return cols


def phi_divergence(gen: PhiGenerator, p, q) -> float:
    """Sum of q(x) * phi(p(x)/q(x)) with the usual boundary conventions:
    q = 0 < p contributes p * phi'_inf, and 0 * phi(0/0) = 0."""
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.size != q.size:
        raise DimensionError(f"distributions of lengths {p.size} and {q.size}")
    if np.any(p < 0.0) or np.any(q < 0.0):
        raise SetInfoError("distributions must be nonnegative")
    total = 0.0
    for pi, qi in zip(p, q):
        if qi > 0.0:
            if pi > 0.0:
                term = qi * gen.value(pi / qi)
            else:
                term = qi * gen.phi_at_zero
        elif pi > 0.0:
            term = pi * gen.phi_slope_inf
        else:
            continue
        if term == INF:
            return INF
        total += term
    return total


def f_information(fclass: FunctionClass, e: Experiment, ref: RefMeasure | None = None) -> InfoResult:
    """I_F(E) = max over members of sum_i sum_x f_i(x) E_i(x); the witness is
    the first member attaining the maximum."""
    if (fclass.n, fclass.m) != (e.n, e.m):
        raise DimensionError(
            f"class shaped {fclass.n}x{fclass.m} against experiment {e.n}x{e.m}"
        )
    scores = np.array([float(np.sum(f * e.rows)) for f in fclass.members])
    best = int(np.argmax(scores))
    witness = fclass.members[best].copy()
    ref = default_ref(e) if ref is None else ref
    rn, _ = rn_matrix(e, ref)
    per = np.einsum("ix,ix->x", witness, rn)
    return InfoResult(value=float(scores[best]), per_outcome=per, witness=witness, ref=ref)


# --- the variational family ---------------------------------------------------


def variational_information(e: Experiment, ref: RefMeasure | None = None) -> InfoResult:
    """Closed form n * [1 - sum_k E_k(argmin cell k)] where outcome x joins
    cell min(argmin_j dE_j/drho (x))."""
    ref = default_ref(e) if ref is None else ref
    rn, null = rn_matrix(e, ref)
    n, m = e.n, e.m
    cell = np.argmin(rn, axis=0)
    mass = float(e.rows[cell, np.arange(m)].sum())
    value = n * (1.0 - mass)
    per = rn.sum(axis=0) - n * rn.min(axis=0)
    per[null] = 0.0
    witness = np.ones((n, m))
    witness[cell, np.arange(m)] = 1.0 - n
    return InfoResult(value=value, per_outcome=per, witness=witness, ref=ref)


def _brute_min_py(rows, count):
    n, m = rows.shape
    best = 1e300
    for idx in range(count):
        r = idx
        s = 0.0
        for x in range(m):
            s += rows[r % n, x]
            r //= n
        if s < best:
            best = s
    return best


if HAVE_NUMBA:
    import numba

    _brute_min_nb = numba.njit(cache=True)(_brute_min_py)


def _brute_min_np(rows: np.ndarray, count: int) -> float:
    n, m = rows.shape
    pows = n ** np.arange(m, dtype=np.int64)
    cols = np.arange(m)
    best = math.inf
    chunk = 1 << 14
    for start in range(0, count, chunk):
        idx = np.arange(start, min(start + chunk, count), dtype=np.int64)
        digits = (idx[:, None] // pows) % n
        sums = rows[digits, cols].sum(axis=1)
        best = min(best, float(sums.min()))
    return best


def variational_bruteforce(e: Experiment) -> float:
    """Exhaustive maximum of n * [1 - sum_k E_k(X_k)] over all n^m assignments
    of outcomes to labels; the oracle for variational_information."""
    n, m = e.n, e.m
    count = n**m
    if count > BRUTE_FORCE_LIMIT:
        raise SetInfoError(f"instance too large: {n}^{m} = {count} assignments")
    rows = np.ascontiguousarray(e.rows)
    if active_backend() == "numba":
        best = float(_brute_min_nb(rows, count))
    else:
        best = _brute_min_np(rows, count)
    return n * (1.0 - best)


def binary_variational_rep(gen: PhiGenerator, e: Experiment, tables) -> float:
    """max over g of E_1-mean of g minus E_2-mean of phi*(g); always a lower
    bound on the phi-divergence of the two rows, tight when the candidate set
    contains g*(x) = phi'(E_1(x)/E_2(x))."""
    if e.n != 2:
        raise DimensionError("the variational representation here is binary only")
    if gen.numeric:
        raise CatalogError(f"{gen.name}: closed-form conjugate required")
    tables = [np.asarray(g, dtype=float).reshape(-1) for g in tables]
    if not tables:
        raise SetInfoError("no candidate tables supplied")
    e1, e2 = e.rows
    best = -INF
    for g in tables:
        if g.size != e.m:
            raise DimensionError(f"candidate of length {g.size}, expected {e.m}")
        total = 0.0
        feasible = True
        for x in range(e.m):
            total += g[x] * e1[x]
            if e2[x] > 0.0:
                c = gen.conjugate(float(g[x]))
                if c == INF:
                    feasible = False
                    break
                total -= c * e2[x]
        if feasible and total > best:
            best = total
    return best


# --- entropies and mutual information ------------------------------------------


def d_entropy(spec: ConvexSpec, mu, nu) -> float:
    """Information of the two-row experiment (mu; nu)."""
    if spec.dim != 2:
        raise DimensionError("entropy uses a planar set (two rows)")
    return d_information(spec, Experiment(np.vstack([mu, nu]))).value


def mi_experiment(joint) -> Experiment:
    """Two-row experiment over k*l outcomes: the joint versus the product of
    its marginals."""
    j = np.atleast_2d(np.asarray(joint, dtype=float))
    if np.any(j < 0.0):
        raise SetInfoError("joint distribution has a negative entry")
    total = j.sum()
    if abs(total - 1.0) > 1e-9:
        raise SetInfoError(f"joint sums to {total!r}, expected 1")
    j = j / total
    pz = j.sum(axis=1)
    py = j.sum(axis=0)
    if np.any(pz == 0.0) or np.any(py == 0.0):
        raise SetInfoError("degenerate marginal: a row or column of the joint is all zero")
    return Experiment(np.vstack([j.ravel(), np.outer(pz, py).ravel()]))


def f_mutual_information(fclass: FunctionClass, joint) -> InfoResult:
    return f_information(fclass, mi_experiment(joint))


def boundedness(spec: ConvexSpec) -> bool:
    """True iff sup_E I_D(E) is finite, i.e. every canonical direction has
    finite support."""
    return all(math.isfinite(support(spec, basis)) for basis in np.eye(spec.dim))


def bss_necessary_check(e: Experiment, t: Kernel, dfamily, tol: float = 1e-9) -> BssReport:
    """Garbling can only lose information: asserts I_D(E) >= I_D(E T) - tol
    for every D in the family and reports violations as bug certificates."""
    garbled = compose_observation(e, t)
    passed = 0
    violations = []
    worst = 0.0
    for k, spec in enumerate(dfamily):
        a = d_information(spec, e).value
        b = d_information(spec, garbled).value
        if a == INF or b <= a + tol:
            passed += 1
            if b != INF and a != INF:
                worst = max(worst, b - a)
        else:
            gap = INF if b == INF else b - a
            worst = max(worst, gap)
            violations.append({"set_index": k, "before": a, "after": b, "gap": gap})
    return BssReport(
        passed=passed,
        failed=len(violations),
        worst_gap=worst,
        violations=tuple(violations),
    )

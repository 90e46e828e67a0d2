"""Loss functions, superprediction sets, Bayes risks, and their bridges to
set-parameterized information."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convexsets import ConvexSpec, hadamard_scale, translate, vpolyhedron
from .errors import DimensionError, SetInfoError
from .experiments import Experiment, product_with_prior
from .information import FunctionClass
from .phicatalog import PhiGenerator

INF = float("inf")

ZERO_ONE = "zero_one"
LOG = "log"
BRIER = "brier"
TABLE = "table"
FORMS = (ZERO_ONE, LOG, BRIER, TABLE)

SIMPLEX_TOL = 1e-9


def _validate_simplex(points: np.ndarray, what: str) -> None:
    if np.any(points < -SIMPLEX_TOL):
        raise SetInfoError(f"{what} has a negative coordinate")
    sums = points.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > SIMPLEX_TOL):
        raise SetInfoError(f"{what} does not lie on the probability simplex")


@dataclass(frozen=True)
class LossSpec:
    """A loss over n outcomes together with the prediction grid that defines
    its decision problem. The grid is part of the loss's identity so every
    construction built from it (superprediction set, bridge set, risks)
    optimizes over the same finite prediction set."""

    form: str
    n: int
    grid: np.ndarray
    table: np.ndarray | None = None
    allow_negative: bool = False

    def __post_init__(self):
        if self.form not in FORMS:
            raise SetInfoError(f"unknown loss form {self.form!r}")
        grid = np.atleast_2d(np.asarray(self.grid, dtype=float))
        if grid.shape[1] != self.n:
            raise DimensionError(f"grid points in R^{grid.shape[1]}, loss over {self.n}")
        _validate_simplex(grid, "prediction grid")
        object.__setattr__(self, "grid", grid)
        if self.form == TABLE:
            if self.table is None:
                raise SetInfoError("table loss needs loss vectors")
            table = np.atleast_2d(np.asarray(self.table, dtype=float))
            if table.shape != grid.shape:
                raise DimensionError(
                    f"loss table shaped {table.shape}, grid {grid.shape}"
                )
            if not np.isfinite(table).all():
                raise SetInfoError("table loss vectors must be finite")
            if not self.allow_negative and np.any(table < 0.0):
                raise SetInfoError("table loss vectors must be nonnegative")
            object.__setattr__(self, "table", table)
        elif self.table is not None:
            raise SetInfoError(f"{self.form} loss does not take a table")


@dataclass(frozen=True)
class SuperpredictionSpec:
    base: ConvexSpec
    loss: LossSpec


@dataclass(frozen=True)
class Hypothesis:
    """A deterministic decision rule: row x is the prediction at outcome x."""

    predictions: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.predictions, dtype=float))
        _validate_simplex(p, "hypothesis prediction")
        object.__setattr__(self, "predictions", p)

    @property
    def m(self) -> int:
        return self.predictions.shape[0]

    @property
    def n(self) -> int:
        return self.predictions.shape[1]


def default_grid(n: int, form: str = ZERO_ONE) -> np.ndarray:
    """201 evenly spaced points on the binary simplex, or a ~1e4-point
    lattice for n = 3. Log excludes the boundary (its loss is infinite
    there)."""
    if n == 2:
        eta = np.linspace(0.0, 1.0, 201)
        if form == LOG:
            eta = eta[1:-1]
        return np.column_stack([eta, 1.0 - eta])
    if n == 3:
        level = 139
        pts = []
        lo = 1 if form == LOG else 0
        for a in range(lo, level + 1 - 2 * lo):
            for b in range(lo, level + 1 - a - lo):
                pts.append((a, b, level - a - b))
        return np.asarray(pts, dtype=float) / level
    raise SetInfoError(f"no default grid for n = {n}; supply one")


def make_loss(form: str, n: int, grid=None, table=None) -> LossSpec:
    if grid is None:
        grid = default_grid(n, form)
    return LossSpec(form=form, n=n, grid=grid, table=table)


def loss_matrix(loss: LossSpec, grid: np.ndarray | None = None) -> np.ndarray:
    """Loss vectors at every grid point, one per row."""
    g = loss.grid if grid is None else np.atleast_2d(np.asarray(grid, dtype=float))
    if loss.form == ZERO_ONE:
        return 1.0 - g
    if loss.form == LOG:
        with np.errstate(divide="ignore"):
            return -np.log(g)
    if loss.form == BRIER:
        sq = np.sum(g * g, axis=1, keepdims=True)
        return sq + 1.0 - 2.0 * g
    if grid is not None and g is not loss.grid:
        return np.vstack([loss_vector(loss, p) for p in g])
    return loss.table


def loss_vector(loss: LossSpec, prediction) -> np.ndarray:
    """(l(p,1), ..., l(p,n)) for a single prediction p."""
    p = np.asarray(prediction, dtype=float).reshape(-1)
    if p.size != loss.n:
        raise DimensionError(f"prediction in R^{p.size}, loss over {loss.n}")
    _validate_simplex(p[None, :], "prediction")
    if loss.form == ZERO_ONE:
        return 1.0 - p
    if loss.form == LOG:
        with np.errstate(divide="ignore"):
            return -np.log(p)
    if loss.form == BRIER:
        return float(p @ p) + 1.0 - 2.0 * p
    hits = np.nonzero(np.all(np.abs(loss.grid - p) <= SIMPLEX_TOL, axis=1))[0]
    if hits.size == 0:
        raise SetInfoError("table loss is defined only on its grid")
    return loss.table[int(hits[0])].copy()


def superprediction(loss: LossSpec, grid=None, normalize: bool = False) -> SuperpredictionSpec:
    """The loss image of the prediction grid plus the nonnegative orthant:
    a V-polyhedron with recession rays +e_i."""
    vertices = loss_matrix(loss, grid)
    if not np.isfinite(vertices).all():
        raise SetInfoError("grid contains a prediction with infinite loss")
    base = vpolyhedron(vertices, np.eye(loss.n))
    if normalize:
        base = translate(base, -loss_vector(loss, np.full(loss.n, 1.0 / loss.n)))
    return SuperpredictionSpec(base=base, loss=loss)


def _expected_losses(lmat: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """<l(p), w> per grid row, with 0 * inf = 0 where w vanishes."""
    if np.isfinite(lmat).all():
        return lmat @ weights
    live = weights > 0.0
    out = lmat[:, live] @ weights[live]
    out[np.any(np.isinf(lmat[:, live]), axis=1)] = INF
    return out


def conditional_bayes_risk(loss: LossSpec, nu, grid=None) -> float:
    """min over the grid of the nu-expected loss."""
    v = np.asarray(nu, dtype=float).reshape(-1)
    if v.size != loss.n:
        raise DimensionError(f"distribution in R^{v.size}, loss over {loss.n}")
    _validate_simplex(v[None, :], "outcome distribution")
    return float(np.min(_expected_losses(loss_matrix(loss, grid), v)))


def bayes_risk(loss: LossSpec, prior, e: Experiment, grid=None) -> float:
    """Sum over outcomes of the minimal posterior-expected loss, computed on
    the unnormalized posterior columns (zero-mass outcomes drop out)."""
    joint = product_with_prior(prior, e)
    lmat = loss_matrix(loss, grid)
    if np.isfinite(lmat).all():
        return float(np.min(lmat @ joint, axis=0).sum())
    return float(sum(np.min(_expected_losses(lmat, joint[:, x])) for x in range(e.m)))


def bridge_set(loss: LossSpec, prior, grid=None) -> ConvexSpec:
    """-pi (.) spr(l): the set whose information equals minus the Bayes risk.

    Requires a strictly positive prior (componentwise scaling must be
    invertible)."""
    pi = np.asarray(prior, dtype=float).reshape(-1)
    spr = superprediction(loss, grid)
    return hadamard_scale(spr.base, -pi)


def constrained_bayes_risk(loss: LossSpec, hypotheses, prior, e: Experiment) -> float:
    """min over hypotheses h of E[l(h(X), Y)] under prior x experiment."""
    hyps = list(hypotheses)
    if not hyps:
        raise SetInfoError("no hypotheses supplied")
    joint = product_with_prior(prior, e)
    best = INF
    for h in hyps:
        if (h.m, h.n) != (e.m, loss.n):
            raise DimensionError(
                f"hypothesis shaped {h.m}x{h.n} against m={e.m}, n={loss.n}"
            )
        risk = 0.0
        for x in range(e.m):
            col = joint[:, x]
            lv = loss_vector(loss, h.predictions[x])
            live = col > 0.0
            term = float(lv[live] @ col[live])
            risk += term
        if risk < best:
            best = risk
    return best


def constrained_bridge_class(loss: LossSpec, hypotheses, prior) -> FunctionClass:
    """One member per hypothesis: column x is -pi (.) l(h(x))."""
    pi = np.asarray(prior, dtype=float).reshape(-1)
    hyps = list(hypotheses)
    if not hyps:
        raise SetInfoError("no hypotheses supplied")
    members = []
    for h in hyps:
        cols = np.vstack([loss_vector(loss, p) for p in h.predictions]).T
        members.append(-pi[:, None] * cols)
    return FunctionClass(tuple(members))


def phi_induced_loss(gen: PhiGenerator, prior, points: int = 2001) -> LossSpec:
    """The binary proper loss whose pi-weighted Bayes risk is minus the
    phi-information: l1 = -phi'(t)/pi1 and l2 = (t phi'(t) - phi(t))/pi2 at
    t = (eta / (1 - eta)) (pi2 / pi1), tabulated over interior eta."""
    pi = np.asarray(prior, dtype=float).reshape(-1)
    if pi.size != 2:
        raise DimensionError("phi-induced losses are binary")
    _validate_simplex(pi[None, :], "prior")
    if np.any(pi <= 0.0):
        raise SetInfoError("prior must be strictly positive")
    eta = np.linspace(0.0, 1.0, points + 2)[1:-1]
    ratio = pi[1] / pi[0]
    l1 = np.empty_like(eta)
    l2 = np.empty_like(eta)
    for k, h in enumerate(eta):
        t = (h / (1.0 - h)) * ratio
        d = gen.derivative(t)
        v = gen.value(t)
        l1[k] = -d / pi[0]
        l2[k] = (t * d - v) / pi[1]
    grid = np.column_stack([eta, 1.0 - eta])
    table = np.column_stack([l1, l2])
    if not np.isfinite(table).all():
        raise SetInfoError("phi-induced loss is not finite on the grid")
    return LossSpec(form=TABLE, n=2, grid=grid, table=table, allow_negative=True)

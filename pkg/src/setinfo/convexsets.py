"""Closed convex sets in R^n with extended-real support-function evaluation.

A ``ConvexSpec`` is one of four base representations plus a lazy stack of
transforms (linear pullback, translation, Hadamard scaling). Support values
and subgradient selections are evaluated through the stack without
materializing transformed geometry, except where an operation genuinely
needs vertices (the explicit polar route of ``polar_gauge``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import simplex
from .errors import (
    ConsistencyError,
    DimensionError,
    SetInfoError,
    SubgradientError,
    UnboundedSupportError,
)
from .phicatalog import PhiGenerator, perspective

INF = float("inf")


# --- representations and transforms ----------------------------------------


@dataclass(frozen=True)
class PhiHypograph:
    """hyp(-phi*) in R^2; support function is the closed perspective of phi."""

    generator: PhiGenerator

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class VPolyhedron:
    vertices: np.ndarray
    rays: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.size == 0:
            raise SetInfoError("VPolyhedron needs at least one vertex")
        r = np.asarray(self.rays, dtype=float)
        if r.size == 0:
            r = np.zeros((0, v.shape[1]))
        r = np.atleast_2d(r)
        if r.shape[1] != v.shape[1]:
            raise DimensionError(f"rays in R^{r.shape[1]} but vertices in R^{v.shape[1]}")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "rays", r)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]


@dataclass(frozen=True)
class HPolyhedron:
    """Intersection of halfspaces <a_i, x> <= b_i; must be nonempty."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.normals, dtype=float))
        b = np.asarray(self.offsets, dtype=float).reshape(-1)
        if a.shape[0] != b.size:
            raise DimensionError(f"{a.shape[0]} normals vs {b.size} offsets")
        object.__setattr__(self, "normals", a)
        object.__setattr__(self, "offsets", b)
        if not simplex.feasible(a, b):
            raise SetInfoError("HPolyhedron is empty (infeasible halfspace system)")

    @property
    def dim(self) -> int:
        return self.normals.shape[1]


@dataclass(frozen=True)
class DVarN:
    """H-minus(1_n, 0) intersected with all H-minus(e_i, 1): the variational set."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise SetInfoError("DVarN needs n >= 2")

    @property
    def dim(self) -> int:
        return self.n


@dataclass(frozen=True)
class LinearPullback:
    """Pushes the set D to M^T D; support at x becomes base support at M @ x."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.atleast_2d(np.asarray(self.matrix, dtype=float)))


@dataclass(frozen=True)
class Translate:
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(-1))


@dataclass(frozen=True)
class HadamardScale:
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(-1)
        if np.any(v == 0.0):
            raise SetInfoError("HadamardScale needs componentwise nonzero v")
        object.__setattr__(self, "v", v)


Rep = PhiHypograph | VPolyhedron | HPolyhedron | DVarN
Transform = LinearPullback | Translate | HadamardScale


@dataclass(frozen=True)
class ConvexSpec:
    dim: int
    rep: Rep
    transforms: tuple[Transform, ...] = ()

    def __post_init__(self):
        d = self.rep.dim
        for t in self.transforms:
            if isinstance(t, LinearPullback):
                if t.matrix.shape[0] != d:
                    raise DimensionError(f"pullback matrix rows {t.matrix.shape[0]} != set dim {d}")
                d = t.matrix.shape[1]
            elif isinstance(t, (Translate, HadamardScale)):
                vec = t.p if isinstance(t, Translate) else t.v
                if vec.size != d:
                    raise DimensionError(f"transform vector length {vec.size} != set dim {d}")
        if d != self.dim:
            raise DimensionError(f"declared dim {self.dim} != transformed dim {d}")


@dataclass(frozen=True)
class SetReport:
    dim: int
    support_at_ones: float
    zero_on_boundary: bool
    recession_ok: bool
    bounded_information: bool
    notes: str


def dvarn(n: int) -> ConvexSpec:
    return ConvexSpec(dim=n, rep=DVarN(n))


def vpolyhedron(vertices, rays=None) -> ConvexSpec:
    rep = VPolyhedron(vertices, rays if rays is not None else np.zeros((0, 0)))
    return ConvexSpec(dim=rep.dim, rep=rep)


def hpolyhedron(normals, offsets) -> ConvexSpec:
    rep = HPolyhedron(normals, offsets)
    return ConvexSpec(dim=rep.dim, rep=rep)


# --- support evaluation -----------------------------------------------------


def _ray_blocks(rays: np.ndarray, x: np.ndarray) -> bool:
    if rays.shape[0] == 0:
        return False
    prods = rays @ x
    scale = np.maximum(1.0, np.linalg.norm(rays, axis=1) * max(1.0, float(np.linalg.norm(x))))
    return bool(np.any(prods > 1e-12 * scale))


def _base_support(rep: Rep, x: np.ndarray) -> float:
    if isinstance(rep, DVarN):
        if np.any(x < 0.0):
            return INF
        return float(np.sum(x) - rep.n * np.min(x))
    if isinstance(rep, VPolyhedron):
        if _ray_blocks(rep.rays, x):
            return INF
        return float(np.max(rep.vertices @ x))
    if isinstance(rep, HPolyhedron):
        res = simplex.solve_max(x, rep.normals, rep.offsets)
        if res.status == simplex.UNBOUNDED:
            return INF
        if res.status == simplex.INFEASIBLE:
            raise SetInfoError("HPolyhedron is empty (infeasible halfspace system)")
        return res.value
    gen = rep.generator
    x1, x2 = float(x[0]), float(x[1])
    return perspective(gen, x1, x2)


def _base_subgradient(rep: Rep, x: np.ndarray) -> np.ndarray:
    if isinstance(rep, DVarN):
        if np.any(x < 0.0):
            raise UnboundedSupportError("support is +inf off the nonnegative orthant")
        j = int(np.argmin(x))
        d = np.ones(rep.n)
        d[j] = 1.0 - rep.n
        return d
    if isinstance(rep, VPolyhedron):
        if _ray_blocks(rep.rays, x):
            raise UnboundedSupportError("a recession ray has positive inner product with x")
        vals = rep.vertices @ x
        vmax = float(np.max(vals))
        ties = np.nonzero(vals >= vmax - 1e-12 * max(1.0, abs(vmax)))[0]
        rows = rep.vertices[ties]
        order = np.lexsort(rows.T[::-1])
        return rows[order[0]].copy()
    if isinstance(rep, HPolyhedron):
        res = simplex.solve_max(x, rep.normals, rep.offsets)
        if res.status != simplex.OPTIMAL:
            raise UnboundedSupportError("support is not attained on this H-polyhedron")
        return res.x
    gen = rep.generator
    x1, x2 = float(x[0]), float(x[1])
    if x1 > 0.0 and x2 > 0.0:
        t = x1 / x2
        g1 = gen.derivative(t)
        g2 = gen.value(t) - g1 * t
        return np.array([g1, g2])
    if x1 > 0.0 and x2 == 0.0:
        # attained only when the limiting gain point (phi'_inf, -phi*(phi'_inf))
        # is finite; otherwise the supremum is approached but not reached
        g1 = gen.phi_slope_inf
        if math.isfinite(g1):
            g2 = -gen.conjugate(g1)
            if math.isfinite(g2):
                return np.array([g1, g2])
    raise SubgradientError(
        "phi-hypograph support is not attained at this boundary direction"
    )


def _pull_direction(spec: ConvexSpec, x) -> tuple[np.ndarray, float]:
    """Walk the transform stack outermost-first, returning the direction seen
    by the base representation and the accumulated linear offset."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != spec.dim:
        raise DimensionError(f"direction in R^{x.size} but set in R^{spec.dim}")
    add = 0.0
    for t in reversed(spec.transforms):
        if isinstance(t, Translate):
            add += float(t.p @ x)
        elif isinstance(t, HadamardScale):
            x = t.v * x
        else:
            x = t.matrix @ x
    return x, add


def support(spec: ConvexSpec, x) -> float:
    """sigma_D(x) = sup over d in D of <d, x>, as an extended real."""
    base_x, add = _pull_direction(spec, x)
    s = _base_support(spec.rep, base_x)
    if math.isinf(s):
        return s
    return s + add


def support_subgradient(spec: ConvexSpec, x) -> np.ndarray:
    """A point d* in D attaining <d*, x> = sigma_D(x) (Euler identity).

    Tie rule: lexicographically smallest optimal vertex for V-representations,
    the terminal basic solution for H-representations, and the average of the
    one-sided derivatives at kinks of phi.
    """
    base_x, _ = _pull_direction(spec, x)
    d = _base_subgradient(spec.rep, base_x)
    for t in spec.transforms:
        if isinstance(t, Translate):
            d = d + t.p
        elif isinstance(t, HadamardScale):
            d = t.v * d
        else:
            d = t.matrix.T @ d
    return d


# --- transform constructors --------------------------------------------------


def pullback(spec: ConvexSpec, matrix) -> ConvexSpec:
    """The set M^T D, evaluated lazily: support at x is D's support at M @ x."""
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    if m.shape[0] != spec.dim:
        raise DimensionError(f"matrix rows {m.shape[0]} != set dim {spec.dim}")
    return ConvexSpec(dim=m.shape[1], rep=spec.rep,
                      transforms=spec.transforms + (LinearPullback(m),))


def translate(spec: ConvexSpec, p) -> ConvexSpec:
    t = Translate(np.asarray(p, dtype=float))
    if t.p.size != spec.dim:
        raise DimensionError(f"translation in R^{t.p.size} but set in R^{spec.dim}")
    return ConvexSpec(dim=spec.dim, rep=spec.rep, transforms=spec.transforms + (t,))


def hadamard_scale(spec: ConvexSpec, v) -> ConvexSpec:
    t = HadamardScale(np.asarray(v, dtype=float))
    if t.v.size != spec.dim:
        raise DimensionError(f"scale vector in R^{t.v.size} but set in R^{spec.dim}")
    return ConvexSpec(dim=spec.dim, rep=spec.rep, transforms=spec.transforms + (t,))


# --- eager vertex representation ---------------------------------------------


def to_vrep(spec: ConvexSpec) -> tuple[np.ndarray, np.ndarray]:
    """Vertices and rays with the transform stack applied eagerly.

    Only available when the base representation is polyhedral with known
    vertices (VPolyhedron or DVarN).
    """
    rep = spec.rep
    if isinstance(rep, VPolyhedron):
        v, r = rep.vertices.copy(), rep.rays.copy()
    elif isinstance(rep, DVarN):
        v = np.ones((rep.n, rep.n)) - rep.n * np.eye(rep.n)
        r = -np.eye(rep.n)
    else:
        raise SetInfoError(f"no vertex representation for {type(rep).__name__}")
    for t in spec.transforms:
        if isinstance(t, Translate):
            v = v + t.p
        elif isinstance(t, HadamardScale):
            v = v * t.v
            r = r * t.v
        else:
            v = v @ t.matrix
            r = r @ t.matrix
    return v, r


# --- membership ---------------------------------------------------------------

_PROBE_SEED = 2025


def _probe_directions(n: int, count: int = 256, seed: int = _PROBE_SEED) -> np.ndarray:
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((count, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    canon = np.vstack([np.eye(n), -np.eye(n), np.ones((1, n)) / math.sqrt(n)])
    return np.vstack([canon, dirs])


def contains(spec: ConvexSpec, point, tol: float = 1e-9) -> bool:
    """Membership test. Exact for untransformed base representations, and a
    support-function probe over sampled directions otherwise."""
    p = np.asarray(point, dtype=float).reshape(-1)
    if p.size != spec.dim:
        raise DimensionError(f"point in R^{p.size} but set in R^{spec.dim}")
    # peel invertible outer transforms for an exact base test
    stack = list(spec.transforms)
    while stack:
        t = stack[-1]
        if isinstance(t, Translate):
            p = p - t.p
        elif isinstance(t, HadamardScale):
            p = p / t.v
        else:
            break
        stack.pop()
    if not stack:
        return _base_contains(spec.rep, p, tol)
    probe = _probe_directions(spec.dim)
    for x in probe:
        s = support(spec, x)
        if s != INF and float(p @ x) > s + tol * max(1.0, abs(s)):
            return False
    return True


def _base_contains(rep: Rep, p: np.ndarray, tol: float) -> bool:
    if isinstance(rep, DVarN):
        return bool(np.sum(p) <= tol and np.all(p <= 1.0 + tol))
    if isinstance(rep, HPolyhedron):
        return bool(np.all(rep.normals @ p <= rep.offsets + tol))
    if isinstance(rep, PhiHypograph):
        c = rep.generator.conjugate(float(p[0]))
        return c != INF and float(p[1]) <= -c + tol
    # VPolyhedron: p in conv(V) + cone(R), a phase-1 feasibility problem over
    # lam >= 0, mu >= 0 with V^T lam + R^T mu = p and sum(lam) = 1
    v, r = rep.vertices, rep.rays
    k, n = v.shape
    nr = r.shape[0]
    eye = np.eye(k + nr)
    a_eq = np.vstack([v.T, np.ones((1, k))])
    a_eq = np.hstack([a_eq, np.vstack([r.T, np.zeros((1, nr))])]) if nr else a_eq
    b_eq = np.concatenate([p, [1.0]])
    a_ub = np.vstack([a_eq, -a_eq, -eye])
    b_ub = np.concatenate([b_eq + tol, -(b_eq - tol), np.zeros(k + nr)])
    return simplex.feasible(a_ub, b_ub)


# --- polar gauge ---------------------------------------------------------------


def _check_zero_in(spec: ConvexSpec, tol: float = 1e-9) -> None:
    for x in _probe_directions(spec.dim, count=64):
        s = support(spec, x)
        if s < -tol:
            raise SetInfoError(f"0 is not in the set: support at {x} is {s} < 0")


def gauge_via_support(spec: ConvexSpec, x) -> float:
    """Route (a): gamma of the polar equals the support function of the set."""
    return support(spec, x)


def gauge_via_polar_lp(spec: ConvexSpec, x) -> float:
    """Route (b): materialize the polar {y : <v,y> <= 1, <r,y> <= 0} from the
    vertex representation and solve inf {mu >= 0 : x in mu * polar}."""
    v, r = to_vrep(spec)
    x = np.asarray(x, dtype=float).reshape(-1)
    gv = v @ x
    gr = r @ x if r.shape[0] else np.zeros(0)
    # variable mu: maximize -mu subject to -mu <= -gv_i, 0*mu <= -gr_j, -mu <= 0
    a = np.concatenate([-np.ones_like(gv), np.zeros_like(gr), [-1.0]]).reshape(-1, 1)
    b = np.concatenate([-gv, -gr, [0.0]])
    res = simplex.solve_max(np.array([-1.0]), a, b)
    if res.status == simplex.INFEASIBLE:
        return INF
    return -res.value


def polar_gauge(spec: ConvexSpec, x, tol: float = 1e-7) -> float:
    """Gauge of the polar set at x. For vertex-representable sets both routes
    are computed and must agree within tol."""
    _check_zero_in(spec)
    val = gauge_via_support(spec, x)
    try:
        to_vrep(spec)
    except SetInfoError:
        return val
    alt = gauge_via_polar_lp(spec, x)
    if val == INF and alt == INF:
        return val
    if abs(val - alt) > tol * max(1.0, abs(val)):
        raise ConsistencyError(f"polar gauge routes disagree: support {val} vs LP {alt}")
    return val


# --- reports -------------------------------------------------------------------


def check_membership(spec: ConvexSpec, seed: int = 0, directions: int = 200) -> SetReport:
    """Sampled normalization/recession/boundedness report for membership in the
    normalized family (support 0 at the all-ones direction, recession cone the
    nonpositive orthant, finite support at basis vectors)."""
    n = spec.dim
    rng = np.random.default_rng(seed)
    ones = np.ones(n)
    notes = []

    s1 = support(spec, ones)

    zero_on_boundary = False
    if math.isfinite(s1):
        try:
            g = support_subgradient(spec, ones)
            shifted = translate(spec, -g)
            dirs = rng.standard_normal((directions, n))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            ok = True
            for x in dirs:
                if support(shifted, x) < -1e-9:
                    ok = False
                    break
            zero_on_boundary = ok and abs(support(shifted, ones)) <= 1e-9
        except (SubgradientError, UnboundedSupportError) as exc:
            notes.append(f"no subgradient at 1_n: {exc}")
    else:
        notes.append("support at 1_n is not finite")

    pos = np.abs(rng.standard_normal((directions, n)))
    rec_ok = all(math.isfinite(_try_support(spec, x)) for x in pos)
    neg = np.abs(rng.standard_normal((directions // 4, n)))
    for row in neg:
        row[rng.integers(0, n)] *= -1e6
    rec_ok = rec_ok and all(_try_support(spec, x) == INF for x in neg)

    bounded = all(math.isfinite(_try_support(spec, e)) for e in np.eye(n))

    return SetReport(
        dim=n,
        support_at_ones=s1,
        zero_on_boundary=zero_on_boundary,
        recession_ok=rec_ok,
        bounded_information=bounded,
        notes="; ".join(notes) if notes else "sampled checks only",
    )


def _try_support(spec: ConvexSpec, x) -> float:
    try:
        return support(spec, x)
    except SetInfoError:
        return math.nan


# --- region sampling -------------------------------------------------------------


def region_boundary(spec: ConvexSpec, grid: int = 241,
                    window: tuple[float, float, float, float] = (-3.0, 3.0, -3.0, 3.0),
                    circle_dirs: int = 256) -> dict[str, np.ndarray]:
    """Sampled boundary points of the set and of its polar inside the window.

    Membership in the set is tested against sampled circle directions
    (<p, x> <= sigma(x) for every direction with finite support); the polar is
    the level set {p : sigma_D(p) <= 1}. Returns {"D": pts, "Dpolar": pts}.
    """
    if spec.dim != 2:
        raise DimensionError("region sampling is a planar (n = 2) operation")
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, grid)
    ys = np.linspace(y0, y1, grid)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])

    theta = np.linspace(0.0, 2.0 * math.pi, circle_dirs, endpoint=False)
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    sigma = np.array([support(spec, d) for d in dirs])
    finite = np.isfinite(sigma)
    in_d = np.ones(pts.shape[0], dtype=bool)
    if finite.any():
        proj = pts @ dirs[finite].T
        slack = sigma[finite] + 1e-9 * np.maximum(1.0, np.abs(sigma[finite]))
        in_d = np.all(proj <= slack, axis=1)

    in_polar = np.array([support(spec, p) <= 1.0 + 1e-9 for p in pts])

    out = {}
    for name, mask in (("D", in_d.reshape(grid, grid)), ("Dpolar", in_polar.reshape(grid, grid))):
        edge = np.zeros_like(mask)
        edge[1:, :] |= mask[1:, :] & ~mask[:-1, :]
        edge[:-1, :] |= mask[:-1, :] & ~mask[1:, :]
        edge[:, 1:] |= mask[:, 1:] & ~mask[:, :-1]
        edge[:, :-1] |= mask[:, :-1] & ~mask[:, 1:]
        out[name] = pts[edge.ravel()]
    return out

"""Catalog of convex generators phi with closed-form conjugates.

A generator is a convex phi on [0, inf) with phi(1) = 0. Each carries its
derivative (a one-sided pair at kinks, with the average as the canonical
selection), its Legendre conjugate phi* in closed form, and the two boundary
limits phi(0+) and lim phi(t)/t. Derived generators (channel transforms,
Csiszar conjugates, set-induced generators) whose conjugate has no closed
form are flagged ``numeric``; operations that need an exact conjugate must
reject those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import SetInfoError

INF = float("inf")
LOG2 = math.log(2.0)

BUILTIN_NAMES = ("variational", "kl", "hellinger2", "chi2", "jensen_shannon", "triangular")

# math.exp raises OverflowError instead of returning inf
_EXP_MAX = 709.0


class CatalogError(SetInfoError):
    """Bad generator construction or use of a numeric conjugate where a closed form is required."""


@dataclass(frozen=True)
class PhiGenerator:
    name: str
    value: Callable[[float], float]
    derivative: Callable[[float], float]
    derivative_pair: Callable[[float], tuple[float, float]]
    conjugate: Callable[[float], float]
    phi_at_zero: float
    phi_slope_inf: float
    numeric: bool = False
    recipe: dict | None = None

    def __repr__(self) -> str:  # callables make the default repr useless
        return f"PhiGenerator({self.name!r}, numeric={self.numeric})"


def perspective(gen: PhiGenerator, x1: float, x2: float) -> float:
    """Closure of y*phi(x/y) at (x1, x2), with the boundary conventions
    phi_breve(x1, 0) = x1 * phi'_inf, phi_breve(0, x2) = x2 * phi(0+),
    phi_breve(0, 0) = 0, and +inf off the nonnegative orthant."""
    if x1 < 0.0 or x2 < 0.0:
        return INF
    if x2 == 0.0:
        if x1 == 0.0:
            return 0.0
        return x1 * gen.phi_slope_inf if gen.phi_slope_inf != INF else INF
    if x1 == 0.0:
        return x2 * gen.phi_at_zero if gen.phi_at_zero != INF else INF
    return x2 * gen.value(x1 / x2)


def _smooth(fn: Callable[[float], float]) -> Callable[[float], tuple[float, float]]:
    def pair(t: float) -> tuple[float, float]:
        d = fn(t)
        return d, d

    return pair


def _avg_of_pair(pair: Callable[[float], tuple[float, float]]) -> Callable[[float], float]:
    def deriv(t: float) -> float:
        lo, hi = pair(t)
        return 0.5 * (lo + hi)

    return deriv


# --- the six tabulated generators -----------------------------------------


def _var_value(t: float) -> float:
    return abs(t - 1.0)


def _var_pair(t: float) -> tuple[float, float]:
    if t < 1.0:
        return -1.0, -1.0
    if t > 1.0:
        return 1.0, 1.0
    return -1.0, 1.0


def _var_conj(x: float) -> float:
    if x > 1.0:
        return INF
    if x < -1.0:
        return -1.0
    return x


def _kl_value(t: float) -> float:
    if t == 0.0:
        return 1.0
    return t * math.log(t) - t + 1.0


def _kl_conj(x: float) -> float:
    if x > _EXP_MAX:
        return INF
    return math.exp(x) - 1.0


def _hell_value(t: float) -> float:
    s = math.sqrt(t)
    return (s - 1.0) * (s - 1.0)


def _hell_deriv(t: float) -> float:
    return 1.0 - 1.0 / math.sqrt(t)


def _hell_conj(x: float) -> float:
    if x >= 1.0:
        return INF
    return x / (1.0 - x)


def _chi2_value(t: float) -> float:
    return (t - 1.0) * (t - 1.0)


def _chi2_conj(x: float) -> float:
    return x * x / 4.0 + x


def _js_value(t: float) -> float:
    if t == 0.0:
        return LOG2
    return t * math.log(t) - (t + 1.0) * math.log((t + 1.0) / 2.0)


def _js_deriv(t: float) -> float:
    return math.log(2.0 * t / (t + 1.0))


def _js_conj(x: float) -> float:
    if x >= LOG2:
        return INF
    return -math.log(2.0 - math.exp(x))


def _tri_value(t: float) -> float:
    return (t - 1.0) * (t - 1.0) / (t + 1.0)


def _tri_deriv(t: float) -> float:
    return (t - 1.0) * (t + 3.0) / ((t + 1.0) * (t + 1.0))


def _tri_conj(x: float) -> float:
    if x > 1.0:
        return INF
    if x < -3.0:
        return -1.0
    u = math.sqrt(1.0 - x)
    return (u - 1.0) * (u - 3.0)


def builtin(name: str) -> PhiGenerator:
    """One of the tabulated generators: variational, kl, hellinger2, chi2,
    jensen_shannon, triangular."""
    recipe = {"kind": "builtin", "name": name}
    if name == "variational":
        return PhiGenerator(name, _var_value, _avg_of_pair(_var_pair), _var_pair,
                            _var_conj, 1.0, 1.0, recipe=recipe)
    if name == "kl":
        return PhiGenerator(name, _kl_value, math.log, _smooth(math.log),
                            _kl_conj, 1.0, INF, recipe=recipe)
    if name == "hellinger2":
        return PhiGenerator(name, _hell_value, _hell_deriv, _smooth(_hell_deriv),
                            _hell_conj, 1.0, 1.0, recipe=recipe)
    if name == "chi2":
        return PhiGenerator(name, _chi2_value, lambda t: 2.0 * (t - 1.0),
                            _smooth(lambda t: 2.0 * (t - 1.0)),
                            _chi2_conj, 1.0, INF, recipe=recipe)
    if name == "jensen_shannon":
        return PhiGenerator(name, _js_value, _js_deriv, _smooth(_js_deriv),
                            _js_conj, LOG2, LOG2, recipe=recipe)
    if name == "triangular":
        return PhiGenerator(name, _tri_value, _tri_deriv, _smooth(_tri_deriv),
                            _tri_conj, 1.0, 1.0, recipe=recipe)
    raise CatalogError(f"unknown builtin generator {name!r}")


# --- derived generators ----------------------------------------------------


def _numeric_conjugate(value: Callable[[float], float], phi_slope_inf: float) -> Callable[[float], float]:
    """Best-effort Legendre transform sup_{t>=0} s*t - value(t) for generators
    without a closed form. Ternary search on the concave objective."""

    def conj(s: float) -> float:
        if s > phi_slope_inf:
            return INF

        def g(t: float) -> float:
            return s * t - value(t)

        lo, hi = 0.0, 1.0
        best = g(0.0)
        while hi < 1e12 and g(2.0 * hi) > g(hi):
            hi *= 2.0
        if hi >= 1e12:
            return INF
        for _ in range(200):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if g(m1) < g(m2):
                lo = m1
            else:
                hi = m2
        return max(best, g(0.5 * (lo + hi)))

    return conj


def channel_transform(gen: PhiGenerator, r1: float, r2: float) -> PhiGenerator:
    """Generator of the divergence after the binary channel with rows
    (r1, 1-r1), (1-r2, r2): phi_R(z) = ((1-r2)z + r2) * phi((r1 z + 1-r1) / ((1-r2)z + r2))."""
    if not (0.0 <= r1 <= 1.0 and 0.0 <= r2 <= 1.0):
        raise CatalogError(f"channel parameters must lie in [0,1], got {(r1, r2)}")

    def value(z: float) -> float:
        return perspective(gen, r1 * z + (1.0 - r1), (1.0 - r2) * z + r2)

    det = r1 + r2 - 1.0

    def pair(z: float) -> tuple[float, float]:
        a = r1 * z + (1.0 - r1)
        b = (1.0 - r2) * z + r2
        u = a / b
        uprime = det / (b * b)
        lo, hi = gen.derivative_pair(u)
        d1 = (1.0 - r2) * gen.value(u) + b * lo * uprime
        d2 = (1.0 - r2) * gen.value(u) + b * hi * uprime
        return (d1, d2) if d1 <= d2 else (d2, d1)

    phi0 = perspective(gen, 1.0 - r1, r2)
    slope = perspective(gen, r1, 1.0 - r2)
    recipe = None
    if gen.recipe is not None:
        recipe = {"kind": "channel", "base": gen.recipe, "r1": r1, "r2": r2}
    return PhiGenerator(
        name=f"{gen.name}|channel({r1:g},{r2:g})",
        value=value,
        derivative=_avg_of_pair(pair),
        derivative_pair=pair,
        conjugate=_numeric_conjugate(value, slope),
        phi_at_zero=phi0,
        phi_slope_inf=slope,
        numeric=True,
        recipe=recipe,
    )


def affine_offset(gen: PhiGenerator, c: float) -> PhiGenerator:
    """phi_c(t) = phi(t) + c(t-1); same divergence, conjugate shifts to
    phi*(x - c) + c."""

    def value(t: float) -> float:
        return gen.value(t) + c * (t - 1.0)

    def pair(t: float) -> tuple[float, float]:
        lo, hi = gen.derivative_pair(t)
        return lo + c, hi + c

    def conj(x: float) -> float:
        base = gen.conjugate(x - c)
        return base + c if base != INF else INF

    recipe = None
    if gen.recipe is not None:
        recipe = {"kind": "offset", "base": gen.recipe, "c": c}
    return PhiGenerator(
        name=f"{gen.name}+{c:g}(t-1)",
        value=value,
        derivative=_avg_of_pair(pair),
        derivative_pair=pair,
        conjugate=conj,
        phi_at_zero=gen.phi_at_zero - c if gen.phi_at_zero != INF else INF,
        phi_slope_inf=gen.phi_slope_inf + c if gen.phi_slope_inf != INF else INF,
        numeric=gen.numeric,
        recipe=recipe,
    )


def csiszar_conjugate(gen: PhiGenerator) -> PhiGenerator:
    """phi_diamond(t) = t*phi(1/t), the generator of the argument-swapped
    divergence; the boundary limits swap."""

    def value(t: float) -> float:
        if t == 0.0:
            return gen.phi_slope_inf
        return t * gen.value(1.0 / t)

    def pair(t: float) -> tuple[float, float]:
        u = 1.0 / t
        lo, hi = gen.derivative_pair(u)
        d1 = gen.value(u) - lo * u
        d2 = gen.value(u) - hi * u
        return (d1, d2) if d1 <= d2 else (d2, d1)

    phi0 = gen.phi_slope_inf
    slope = gen.phi_at_zero
    recipe = None
    if gen.recipe is not None:
        recipe = {"kind": "csiszar", "base": gen.recipe}
    return PhiGenerator(
        name=f"{gen.name}^diamond",
        value=value,
        derivative=_avg_of_pair(pair),
        derivative_pair=pair,
        conjugate=_numeric_conjugate(value, slope),
        phi_at_zero=phi0,
        phi_slope_inf=slope,
        numeric=True,
        recipe=recipe,
    )


# --- phi <-> set conversions ----------------------------------------------


def d_phi_set(gen: PhiGenerator):
    """The hypograph set D_phi = hyp(-phi*) in R^2, whose support function is
    the closed perspective of phi."""
    from .convexsets import ConvexSpec, PhiHypograph

    return ConvexSpec(dim=2, rep=PhiHypograph(gen))


def phi_from_set(spec) -> PhiGenerator:
    """Read a generator off a normalized two-dimensional set via
    phi_D(t) = support(D, (t, 1)). The conjugate is numeric."""
    from . import convexsets

    if spec.dim != 2:
        raise CatalogError(f"phi_from_set needs a set in R^2, got dim {spec.dim}")
    report = convexsets.check_membership(spec)
    if not (math.isfinite(report.support_at_ones) and abs(report.support_at_ones) <= 1e-9):
        raise CatalogError(f"set is not normalized: support at ones = {report.support_at_ones}")
    if not report.recession_ok:
        raise CatalogError("set fails the sampled recession check for a normalized family member")

    def value(t: float) -> float:
        return convexsets.support(spec, (t, 1.0))

    def deriv(t: float) -> float:
        return float(convexsets.support_subgradient(spec, (t, 1.0))[0])

    phi0 = convexsets.support(spec, (0.0, 1.0))
    slope = convexsets.support(spec, (1.0, 0.0))
    return PhiGenerator(
        name="from_set",
        value=value,
        derivative=deriv,
        derivative_pair=_smooth(deriv),
        conjugate=_numeric_conjugate(value, slope),
        phi_at_zero=phi0,
        phi_slope_inf=slope,
        numeric=True,
        recipe=None,
    )

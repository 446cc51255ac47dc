"""Dunkl operators and the generators of the associated Markov processes.

For a root system R with multiplicity k and a direction xi, the Dunkl
operator acts on a polynomial p as

    T_xi p(x) = xi . grad p(x)
              + sum_{alpha in R+} k(alpha) (alpha . xi)
                  [p(x) - p(sigma_alpha x)] / (alpha . x),

where the difference quotient is the exact alternating quotient (polyx).
The operators for different directions commute; summing T_i^2 over an
orthonormal basis gives the Dunkl Laplacian, which expands to

    Delta f + 2 sum k (alpha . grad f)/(alpha . x)
            - sum k |alpha|^2 [f(x) - f(sigma x)] / (alpha . x)^2.

Half of this is the generator of the Dunkl process (backward equation);
the forward (adjoint) generator flips the drift sign and the sign inside
the jump numerator:

    KFE f = 1/2 Delta f - sum k (alpha . grad f)/(alpha . x)
          + sum k |alpha|^2/2 [f(x) + f(sigma x)] / (alpha . x)^2.

Exact mode works on MultiPoly inputs with rational multiplicities; float
mode evaluates the expanded formulas on PointFunction oracles at a point.
Both share the same code for the pointwise formulas, which accept Fraction
or float data transparently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Protocol, Sequence

from .errors import DimensionError, ExactModeError, HyperplaneError
from .polyx import MultiPoly, alternating_quotient
from .rootsys import Root, RootSystem, Scalar, Vector, check_closure, dot

HYPERPLANE_FLOOR = 1e-8

_EPS = 2.0**-52
FD_STEP_GRAD = _EPS ** (1 / 3)  # central first difference
FD_STEP_LAP = _EPS ** 0.25  # central second difference


class PointFunction(Protocol):
    """Value/gradient/Laplacian oracles for a scalar function on R^N."""

    def value(self, x: Sequence[Scalar]) -> Scalar: ...

    def gradient(self, x: Sequence[Scalar]) -> Vector: ...

    def laplacian(self, x: Sequence[Scalar]) -> Scalar: ...


class PolyFunction:
    """PointFunction backed by a MultiPoly; all oracles are exact."""

    def __init__(self, poly: MultiPoly):
        self.poly = poly
        self._grad = poly.gradient()
        self._lap = poly.laplacian()

    def value(self, x):
        return self.poly.eval(x)

    def gradient(self, x):
        return tuple(g.eval(x) for g in self._grad)

    def laplacian(self, x):
        return self._lap.eval(x)


class NumericFunction:
    """PointFunction from a plain callable, using central differences.

    Step sizes follow the usual optimum for the respective difference
    order: eps^(1/3) * scale for the gradient, eps^(1/4) * scale for the
    second derivatives in the Laplacian.
    """

    def __init__(self, fn: Callable[[Sequence[float]], float], scale: float = 1.0):
        self.fn = fn
        self.scale = scale

    def value(self, x):
        return self.fn(x)

    def gradient(self, x):
        h = FD_STEP_GRAD * self.scale
        out = []
        xs = list(x)
        for i in range(len(xs)):
            xi = xs[i]
            xs[i] = xi + h
            up = self.fn(xs)
            xs[i] = xi - h
            dn = self.fn(xs)
            xs[i] = xi
            out.append((up - dn) / (2 * h))
        return tuple(out)

    def laplacian(self, x):
        h = FD_STEP_LAP * self.scale
        xs = list(x)
        mid = self.fn(xs)
        acc = 0.0
        for i in range(len(xs)):
            xi = xs[i]
            xs[i] = xi + h
            up = self.fn(xs)
            xs[i] = xi - h
            dn = self.fn(xs)
            xs[i] = xi
            acc += (up - 2 * mid + dn) / (h * h)
        return acc


@dataclass(frozen=True)
class DunklContext:
    """A validated root system plus the arithmetic mode.

    ``exact`` mode requires rational root coordinates (and rational
    multiplicities for the polynomial operators); ``float`` mode evaluates
    pointwise with a hyperplane proximity guard.
    """

    system: RootSystem
    mode: str = "exact"
    hyperplane_floor: float = HYPERPLANE_FLOOR

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "exact" and not self.system.is_exact:
            raise ExactModeError(
                "exact mode needs rational root coordinates "
                "(integer-representatives scale)"
            )
        result = check_closure(self.system)
        if not result:
            raise ExactModeError(f"root system is not closed: {result.detail}")

    def require_exact_multiplicities(self):
        for r in self.system.roots:
            if isinstance(r.multiplicity, float):
                raise ExactModeError(
                    "polynomial Dunkl operators need rational multiplicities"
                )

    def guard_point(self, x: Sequence[Scalar]):
        """Reject points too close to a hyperplane that actually carries k > 0."""
        if len(x) != self.system.dimension:
            raise DimensionError(
                f"point of length {len(x)} in dimension {self.system.dimension}"
            )
        for i in self.system.positive:
            r = self.system.roots[i]
            if r.multiplicity == 0:
                continue
            d = dot(r.vector, x)
            if isinstance(d, Fraction):
                if d == 0:
                    raise HyperplaneError(f"point lies on the hyperplane of {r.vector}")
            else:
                if abs(float(d)) < self.hyperplane_floor * math.sqrt(float(r.sq_norm)):
                    raise HyperplaneError(
                        f"point within {self.hyperplane_floor} of the hyperplane of {r.vector}"
                    )


# ---------------------------------------------------------------------------
# exact polynomial operators


def dunkl_apply(ctx: DunklContext, xi: Sequence[Scalar], p: MultiPoly) -> MultiPoly:
    """T_xi p as an exact polynomial.

    Requires exact mode.  For homogeneous p the result is homogeneous of
    degree deg(p) - 1 (possibly zero).
    """
    if ctx.mode != "exact":
        raise ExactModeError("dunkl_apply runs in exact mode; use the generators in float mode")
    ctx.require_exact_multiplicities()
    system = ctx.system
    if p.nvars != system.dimension:
        raise DimensionError("polynomial variables do not match the system dimension")
    xs = [Fraction(c) if not isinstance(c, Fraction) else c for c in xi]
    if len(xs) != system.dimension:
        raise DimensionError("direction vector has wrong length")
    out = MultiPoly.zero(p.nvars)
    for i, c in enumerate(xs):
        if c:
            out = out + c * p.partial_derivative(i)
    for idx in system.positive:
        r = system.roots[idx]
        k = Fraction(r.multiplicity)
        if not k:
            continue
        a_dot_xi = dot(r.vector, xs)
        if a_dot_xi:
            out = out + (k * a_dot_xi) * alternating_quotient(p, r)
    return out


def dunkl_direction(ctx: DunklContext, i: int) -> Vector:
    n = ctx.system.dimension
    if not 0 <= i < n:
        raise DimensionError(f"direction index {i} out of range")
    return tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))


def dunkl_laplacian_direct(ctx: DunklContext, p: MultiPoly) -> MultiPoly:
    """sum_i T_i(T_i p) via double application of the operators."""
    out = MultiPoly.zero(p.nvars)
    for i in range(ctx.system.dimension):
        e = dunkl_direction(ctx, i)
        out = out + dunkl_apply(ctx, e, dunkl_apply(ctx, e, p))
    return out


def commutator(ctx: DunklContext, i: int, j: int, p: MultiPoly) -> MultiPoly:
    """[T_i, T_j] p, which is identically zero for a valid system."""
    ei, ej = dunkl_direction(ctx, i), dunkl_direction(ctx, j)
    return dunkl_apply(ctx, ei, dunkl_apply(ctx, ej, p)) - dunkl_apply(
        ctx, ej, dunkl_apply(ctx, ei, p)
    )


# ---------------------------------------------------------------------------
# pointwise generators (exact or float, following the input types)


def _reflected_point(r: Root, x: Sequence[Scalar]) -> Vector:
    c = 2 * dot(r.vector, x) / r.sq_norm
    return tuple(xi - c * ai for xi, ai in zip(x, r.vector))


def dunkl_laplacian_expanded(ctx: DunklContext, f: PointFunction, x: Sequence[Scalar]) -> Scalar:
    """The expanded Dunkl Laplacian at x, using f's oracles.

    Agrees with dunkl_laplacian_direct for polynomial-backed f; works for
    Fraction or float points.
    """
    ctx.guard_point(x)
    acc = f.laplacian(x)
    grad = f.gradient(x)
    fx = f.value(x)
    for idx in ctx.system.positive:
        r = ctx.system.roots[idx]
        k = r.multiplicity
        if not k:
            continue
        d = dot(r.vector, x)
        acc = acc + 2 * k * dot(r.vector, grad) / d
        acc = acc - k * r.sq_norm * (fx - f.value(_reflected_point(r, x))) / (d * d)
    return acc


def kbe_generator(ctx: DunklContext, f: PointFunction, x: Sequence[Scalar]) -> Scalar:
    """Backward-equation generator: half the Dunkl Laplacian."""
    ctx.guard_point(x)
    acc = f.laplacian(x) / 2
    grad = f.gradient(x)
    fx = f.value(x)
    for idx in ctx.system.positive:
        r = ctx.system.roots[idx]
        k = r.multiplicity
        if not k:
            continue
        d = dot(r.vector, x)
        acc = acc + k * dot(r.vector, grad) / d
        acc = acc - k * r.sq_norm * (fx - f.value(_reflected_point(r, x))) / (2 * d * d)
    return acc


def kfe_generator(ctx: DunklContext, f: PointFunction, x: Sequence[Scalar]) -> Scalar:
    """Forward-equation generator: drift sign flipped, plus sign in the jump term."""
    ctx.guard_point(x)
    acc = f.laplacian(x) / 2
    grad = f.gradient(x)
    fx = f.value(x)
    for idx in ctx.system.positive:
        r = ctx.system.roots[idx]
        k = r.multiplicity
        if not k:
            continue
        d = dot(r.vector, x)
        acc = acc - k * dot(r.vector, grad) / d
        acc = acc + k * r.sq_norm * (fx + f.value(_reflected_point(r, x))) / (2 * d * d)
    return acc

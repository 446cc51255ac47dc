"""Finite reflection groups through their root systems.

A root system here is a finite set R of nonzero vectors in R^N, closed under
the reflections it generates and containing -alpha (but no other multiple)
for each alpha in R.  The reflection in the hyperplane orthogonal to alpha is

    sigma_alpha(x) = x - 2 (alpha . x / alpha . alpha) alpha.

Each root carries a multiplicity k(alpha) >= 0, constant on orbits of the
group action.  The derived quantities used throughout the package are

    gamma        = sum of k(alpha) over a positive subsystem R+,
    weight       w_k(x) = prod over ALL of R of |alpha . x|^{k(alpha)},
    discriminant a_R(x) = prod over R+ of (alpha . x),

where R+ is carved out by a fixed generic chamber vector.  Note the weight
convention runs over the full set R, so each +/- pair contributes its factor
twice; for type A this makes w_k the squared Vandermonde raised to k.

Supported families and coordinate scalings:

* A_{N-1} in R^N: roots e_i - e_j (i != j), one orbit.
* B_N: short roots +/- e_i and long roots +/- e_i +/- e_j, two orbits with
  independent multiplicities (short first).  Rank 1 degenerates to {+/- e_1}
  with a single multiplicity.
* D_N (N >= 2): roots +/- e_i +/- e_j, a single multiplicity.
* I2(m) (m >= 3): the dihedral system of 2m unit roots in the plane, two
  multiplicities for even m (orbit of angle 0 first), one for odd m.

``integer-representatives`` scale stores the integer root vectors above as
exact rationals, so reflections, weights with integer multiplicities and
discriminants evaluate without rounding.  ``normalized`` scale stores
unit-norm float roots.  All downstream generator formulas are invariant
under rescaling roots, so the scalings are interchangeable for identity
checks.  I2(m) is float-only except m = 4, whose reflection matrices are
rational; for m in {3, 6} no rational 2-dimensional model exists (the
reflection matrices contain sin/cos of pi/3), so exact mode rejects them.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence, Union

from .errors import (
    DimensionError,
    ExactModeError,
    InvalidRootError,
    SamplingError,
    UnsupportedFamilyError,
)

Scalar = Union[Fraction, float]
Vector = tuple[Scalar, ...]

SCALE_INTEGER = "integer-representatives"
SCALE_NORMALIZED = "normalized"
FAMILIES = ("A", "B", "D", "I2")

# Matching tolerance for float-mode closure and root lookups.
FLOAT_MATCH_TOL = 1e-12


def dot(x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
    if len(x) != len(y):
        raise DimensionError(f"dot of length {len(x)} with length {len(y)}")
    return sum(a * b for a, b in zip(x, y))


def sq_norm(x: Sequence[Scalar]) -> Scalar:
    return sum(a * a for a in x)


@dataclass(frozen=True)
class Root:
    """A single root: vector, its squared norm and its multiplicity."""

    vector: Vector
    sq_norm: Scalar
    multiplicity: Scalar
    orbit: int = 0

    def __post_init__(self):
        if all(c == 0 for c in self.vector):
            raise InvalidRootError("zero vector is not a root")


def reflect(alpha: Union[Root, Sequence[Scalar]], x: Sequence[Scalar]) -> Vector:
    """Reflect x in the hyperplane orthogonal to alpha.

    Accepts a Root or a raw coordinate sequence.  Exact inputs give an exact
    result.  Raises InvalidRootError for a zero alpha and DimensionError on a
    length mismatch.
    """
    if isinstance(alpha, Root):
        vec, nrm = alpha.vector, alpha.sq_norm
    else:
        vec = tuple(alpha)
        nrm = sq_norm(vec)
        if nrm == 0:
            raise InvalidRootError("cannot reflect in a zero vector")
    c = 2 * dot(vec, x) / nrm
    return tuple(xi - c * ai for xi, ai in zip(x, vec))


class ClosureResult:
    """Boolean verdict of a closure/reducedness check plus a diagnostic."""

    __slots__ = ("ok", "detail")

    def __init__(self, ok: bool, detail: str = ""):
        self.ok = ok
        self.detail = detail

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        return f"ClosureResult(ok={self.ok}, detail={self.detail!r})"


@dataclass(frozen=True)
class RootSystem:
    """A root system with multiplicities and a chosen positive subsystem.

    ``roots`` lists the full set R; ``positive`` holds indices into it.
    Instances are immutable; derived data (reflection matrices, gamma,
    signed-permutation forms) is computed lazily and cached.
    """

    dimension: int
    roots: tuple[Root, ...]
    positive: tuple[int, ...]
    family: str
    rank: int
    multiplicities: tuple[Scalar, ...]
    scale: str

    # -- basic views ---------------------------------------------------

    def positive_roots(self) -> tuple[Root, ...]:
        return tuple(self.roots[i] for i in self.positive)

    @cached_property
    def gamma(self) -> Scalar:
        """Sum of multiplicities over the positive subsystem."""
        return sum(self.roots[i].multiplicity for i in self.positive)

    @cached_property
    def is_exact(self) -> bool:
        """True when root coordinates are stored as exact rationals."""
        return all(
            isinstance(c, (Fraction, int)) for r in self.roots for c in r.vector
        )

    @cached_property
    def exact_index(self):
        """Vector-to-index table; None unless the system is exact.

        Fraction and int hash alike, so mixed-representation lookups work.
        """
        if not self.is_exact:
            return None
        return {tuple(r.vector): i for i, r in enumerate(self.roots)}

    # -- reflections ----------------------------------------------------

    @cached_property
    def reflection_matrices(self) -> tuple[tuple[tuple[Scalar, ...], ...], ...]:
        """Matrix of sigma_alpha for every root, rows acting on columns."""
        mats = []
        for r in self.roots:
            v, nrm = r.vector, r.sq_norm
            n = self.dimension
            mats.append(
                tuple(
                    tuple(
                        (1 if i == j else 0) - 2 * v[i] * v[j] / nrm
                        for j in range(n)
                    )
                    for i in range(n)
                )
            )
        return tuple(mats)

    @cached_property
    def signed_permutations(self):
        """Signed-permutation form of each reflection, or None.

        When sigma_alpha maps x to y with y_i = s_i * x_{p_i} the entry is
        (p, s) with integer tuples; otherwise None.  Only exact matrices are
        inspected.  The A/B/D integer representatives all have this form,
        which gives polynomial composition a fast path.
        """
        out = []
        for mat in self.reflection_matrices:
            perm, signs = [], []
            good = True
            for row in mat:
                nz = [(j, c) for j, c in enumerate(row) if c != 0]
                if len(nz) != 1 or nz[0][1] not in (1, -1, Fraction(1), Fraction(-1)):
                    good = False
                    break
                perm.append(nz[0][0])
                signs.append(int(nz[0][1]))
            out.append((tuple(perm), tuple(signs)) if good else None)
        return tuple(out)

    def reflect_index(self, root_index: int, x: Sequence[Scalar]) -> Vector:
        return reflect(self.roots[root_index], x)

    # -- derived systems -------------------------------------------------

    def with_multiplicity_scale(self, c: Scalar) -> "RootSystem":
        """Same geometry with every multiplicity scaled by c >= 0."""
        if c < 0:
            raise ValueError("multiplicity scale must be nonnegative")
        new_roots = tuple(replace(r, multiplicity=r.multiplicity * c) for r in self.roots)
        new_mults = tuple(m * c for m in self.multiplicities)
        return replace(self, roots=new_roots, multiplicities=new_mults)

    def rescale_orbit(self, orbit: int, c: Scalar) -> "RootSystem":
        """Scale the vectors of one orbit by c > 0 (multiplicities kept)."""
        if c <= 0:
            raise ValueError("root scale must be positive")
        new_roots = tuple(
            Root(
                vector=tuple(c * v for v in r.vector),
                sq_norm=r.sq_norm * c * c,
                multiplicity=r.multiplicity,
                orbit=r.orbit,
            )
            if r.orbit == orbit
            else r
            for r in self.roots
        )
        return replace(self, roots=new_roots)

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        def enc(c: Scalar):
            return str(c) if isinstance(c, Fraction) else c

        return {
            "family": self.family,
            "rank": self.rank,
            "multiplicities": [enc(m) for m in self.multiplicities],
            "mode": self.scale,
            "roots": [[enc(c) for c in r.vector] for r in self.roots],
            "positive": list(self.positive),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def from_json_dict(data: dict) -> "RootSystem":
        mults = [_decode_scalar(m) for m in data["multiplicities"]]
        system = build_root_system(
            data["family"], data["rank"], mults, scale=data["mode"]
        )
        # Stored geometry must agree with the rebuilt one.
        got = [[_decode_scalar(c) for c in row] for row in data["roots"]]
        want = [list(r.vector) for r in system.roots]
        if len(got) != len(want):
            raise InvalidRootError("serialized root list has unexpected length")
        for a, b in zip(got, want):
            for x, y in zip(a, b):
                if abs(float(x) - float(y)) > FLOAT_MATCH_TOL:
                    raise InvalidRootError("serialized roots disagree with family data")
        if list(data["positive"]) != list(system.positive):
            raise InvalidRootError("serialized positive subsystem disagrees")
        return system

    @staticmethod
    def from_json(text: str) -> "RootSystem":
        return RootSystem.from_json_dict(json.loads(text))


def _decode_scalar(v) -> Scalar:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    return float(v)


# ---------------------------------------------------------------------------
# construction


def chamber_vector(dimension: int) -> tuple[int, ...]:
    """The generic chamber vector (1, 2, 4, ..., 2^(N-1))."""
    return tuple(2**i for i in range(dimension))


def positive_indices(
    vectors: Sequence[Vector], chamber: Sequence[Scalar]
) -> tuple[int, ...]:
    """Indices of vectors on the positive side of the chamber vector."""
    out = []
    for i, v in enumerate(vectors):
        d = dot(v, chamber)
        if d == 0:
            raise InvalidRootError(
                f"chamber vector {tuple(chamber)} is not generic: root {v} is orthogonal"
            )
        if d > 0:
            out.append(i)
    return tuple(out)


def _unit(vec: Sequence[float]) -> tuple[float, ...]:
    n = math.sqrt(sum(c * c for c in vec))
    return tuple(c / n for c in vec)


def _family_vectors(family: str, rank: int) -> tuple[list[tuple[int, ...]], list[int], int]:
    """Integer root vectors, orbit labels and the ambient dimension."""
    if family == "A":
        if rank < 1:
            raise UnsupportedFamilyError("family A needs rank >= 1")
        n = rank + 1
        vecs, orbits = [], []
        for i in range(n):
            for j in range(n):
                if i != j:
                    v = [0] * n
                    v[i], v[j] = 1, -1
                    vecs.append(tuple(v))
                    orbits.append(0)
        return vecs, orbits, n
    if family == "B":
        if rank < 1:
            raise UnsupportedFamilyError("family B needs rank >= 1")
        n = rank
        vecs, orbits = [], []
        for i in range(n):
            for s in (1, -1):
                v = [0] * n
                v[i] = s
                vecs.append(tuple(v))
                orbits.append(0)
        for i in range(n):
            for j in range(i + 1, n):
                for si in (1, -1):
                    for sj in (1, -1):
                        v = [0] * n
                        v[i], v[j] = si, sj
                        vecs.append(tuple(v))
                        orbits.append(1)
        return vecs, orbits, n
    if family == "D":
        if rank < 2:
            raise UnsupportedFamilyError("family D needs rank >= 2")
        n = rank
        vecs, orbits = [], []
        for i in range(n):
            for j in range(i + 1, n):
                for si in (1, -1):
                    for sj in (1, -1):
                        v = [0] * n
                        v[i], v[j] = si, sj
                        vecs.append(tuple(v))
                        orbits.append(0)
        return vecs, orbits, n
    raise UnsupportedFamilyError(f"unknown family {family!r}")


def _i2_vectors(m: int) -> tuple[list[tuple[float, float]], list[int]]:
    vecs, orbits = [], []
    for ell in range(2 * m):
        theta = math.pi * ell / m
        vecs.append((math.cos(theta), math.sin(theta)))
        # For even m the root lines split into two orbits by parity of ell;
        # odd m is a single orbit.
        orbits.append(ell % 2 if m % 2 == 0 else 0)
    return vecs, orbits


def _i2_integer_vectors(m: int) -> tuple[list[tuple[int, int]], list[int]]:
    if m != 4:
        raise ExactModeError(
            "I2(m) has irrational reflection matrices in the plane for m != 4; "
            "use normalized scale (or family A/B for the crystallographic cases)"
        )
    vecs = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
    orbits = [0, 1, 0, 1, 0, 1, 0, 1]
    return vecs, orbits


_MULT_REBUILD = {"int": int, "float": float, "Fraction": Fraction}


def build_root_system(
    family: str,
    rank: int,
    multiplicities: Sequence[Scalar],
    scale: str = SCALE_INTEGER,
) -> RootSystem:
    """Construct a root system of the given family.

    ``rank`` is the Coxeter rank for A/B/D and the dihedral order m for I2.
    ``multiplicities``: one value for A/D (and B_1, I2 with odd m), two for
    B_N (short orbit first) and I2 with even m (orbit of e_1 first).
    ``scale`` selects integer-representative (exact) or normalized (float,
    unit-norm) root vectors.

    Systems are immutable, so repeated builds with equal arguments return
    one shared, already-validated instance.
    """
    key = tuple((type(m).__name__, str(m)) for m in multiplicities)
    if all(t in _MULT_REBUILD for t, _ in key):
        return _build_cached(family, rank, key, scale)
    return _build_root_system(family, rank, list(multiplicities), scale)


@lru_cache(maxsize=128)
def _build_cached(family, rank, key, scale):
    mults = [_MULT_REBUILD[t](s) for t, s in key]
    return _build_root_system(family, rank, mults, scale)


def _build_root_system(
    family: str,
    rank: int,
    multiplicities: Sequence[Scalar],
    scale: str = SCALE_INTEGER,
) -> RootSystem:
    if scale not in (SCALE_INTEGER, SCALE_NORMALIZED):
        raise UnsupportedFamilyError(f"unknown scale {scale!r}")
    mults = list(multiplicities)
    if any((isinstance(m, float) and m < 0) or m < 0 for m in mults):
        raise InvalidRootError("multiplicities must be nonnegative")

    if family == "I2":
        m = rank
        if m < 3:
            raise UnsupportedFamilyError("I2(m) needs m >= 3")
        n_orbits = 2 if m % 2 == 0 else 1
        if scale == SCALE_INTEGER:
            raw, orbits = _i2_integer_vectors(m)
            exact = True
        else:
            raw, orbits = _i2_vectors(m)
            exact = False
        dimension = 2
    else:
        ints, orbits, dimension = _family_vectors(family, rank)
        if family == "A" or family == "D":
            n_orbits = 1
        else:  # B
            n_orbits = 1 if rank == 1 else 2
        if scale == SCALE_INTEGER:
            raw = [tuple(Fraction(c) for c in v) for v in ints]
            exact = True
        else:
            raw = [_unit(v) for v in ints]
            exact = False

    if len(mults) != n_orbits:
        raise InvalidRootError(
            f"family {family} rank {rank} has {n_orbits} orbit(s), "
            f"got {len(mults)} multiplicities"
        )
    if exact:
        mults = [Fraction(m) if not isinstance(m, float) else m for m in mults]
    else:
        mults = [float(m) for m in mults]

    roots = tuple(
        Root(
            vector=tuple(v),
            sq_norm=sq_norm(v),
            multiplicity=mults[orb],
            orbit=orb,
        )
        for v, orb in zip(raw, orbits)
    )
    pos = positive_indices([r.vector for r in roots], chamber_vector(dimension))
    system = RootSystem(
        dimension=dimension,
        roots=roots,
        positive=pos,
        family=family,
        rank=rank,
        multiplicities=tuple(mults),
        scale=scale,
    )
    closure = check_closure(system)
    if not closure:
        raise InvalidRootError(f"built system failed closure: {closure.detail}")
    return system


def make_system_from_vectors(
    vectors: Sequence[Sequence[Scalar]],
    multiplicities: Union[Scalar, Sequence[Scalar]] = 1,
    scale: str = SCALE_INTEGER,
    family: str = "custom",
) -> RootSystem:
    """Wrap raw vectors as a RootSystem without validating closure.

    Intended for tests and counterexamples; run check_closure yourself.
    A single multiplicity is broadcast to every vector.
    """
    vecs = [tuple(v) for v in vectors]
    if not vecs:
        raise InvalidRootError("need at least one vector")
    dim = len(vecs[0])
    if isinstance(multiplicities, (int, float, Fraction)):
        ms: list[Scalar] = [multiplicities] * len(vecs)
    else:
        ms = list(multiplicities)
        if len(ms) != len(vecs):
            raise InvalidRootError("one multiplicity per vector required")
    roots = tuple(
        Root(vector=v, sq_norm=sq_norm(v), multiplicity=m, orbit=0)
        for v, m in zip(vecs, ms)
    )
    pos = positive_indices(vecs, chamber_vector(dim))
    return RootSystem(
        dimension=dim,
        roots=roots,
        positive=pos,
        family=family,
        rank=dim,
        multiplicities=tuple(dict.fromkeys(ms)),
        scale=scale,
    )


# ---------------------------------------------------------------------------
# verification


def _find_root(system: RootSystem, vec: Vector) -> int:
    """Index of vec among the roots, or -1."""
    exact = system.is_exact and all(not isinstance(c, float) for c in vec)
    if exact:
        return system.exact_index.get(tuple(vec), -1)
    for i, r in enumerate(system.roots):
        if all(abs(float(a) - float(b)) <= FLOAT_MATCH_TOL for a, b in zip(r.vector, vec)):
            return i
    return -1


def check_closure(system: RootSystem) -> ClosureResult:
    """Verify reflection closure, reducedness and presence of negatives.

    Returns a truthy ClosureResult on success; on failure the result is
    falsy and ``detail`` names the offending pair.
    """
    roots = system.roots
    for r in roots:
        neg = tuple(-c for c in r.vector)
        if _find_root(system, neg) < 0:
            return ClosureResult(False, f"missing negative of {r.vector}")
    # Reducedness: no root may be a multiple of another except by -1.
    for i, a in enumerate(roots):
        for j, b in enumerate(roots):
            if i >= j:
                continue
            # parallel iff all 2x2 minors vanish
            parallel = True
            for p in range(system.dimension):
                for q in range(p + 1, system.dimension):
                    m = a.vector[p] * b.vector[q] - a.vector[q] * b.vector[p]
                    if abs(float(m)) > FLOAT_MATCH_TOL:
                        parallel = False
                        break
                if not parallel:
                    break
            if parallel:
                # ratio from the largest coordinate; float residue in the
                # near-zero ones must not pollute it
                p = max(range(system.dimension), key=lambda q: abs(float(a.vector[q])))
                ratio = float(b.vector[p]) / float(a.vector[p])
                if abs(abs(ratio) - 1.0) > FLOAT_MATCH_TOL:
                    return ClosureResult(
                        False, f"non-reduced pair {a.vector} and {b.vector}"
                    )
    for a in roots:
        for b in roots:
            image = reflect(a, b.vector)
            if _find_root(system, image) < 0:
                return ClosureResult(
                    False,
                    f"reflect({a.vector}) maps {b.vector} to {image}, not a root",
                )
    return ClosureResult(True, "closed and reduced")


def compute_orbits(system: RootSystem) -> tuple[int, ...]:
    """Orbit label of each root under the generated reflection group."""
    n = len(system.roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    for a in system.roots:
        for j, b in enumerate(system.roots):
            image = reflect(a, b.vector)
            idx = _find_root(system, image)
            if idx < 0:
                raise InvalidRootError("orbit computation requires a closed system")
            union(j, idx)
    labels = {}
    out = []
    for i in range(n):
        r = find(i)
        if r not in labels:
            labels[r] = len(labels)
        out.append(labels[r])
    return tuple(out)


# ---------------------------------------------------------------------------
# weight, discriminant, sampling


def weight(system: RootSystem, x: Sequence[Scalar]) -> Scalar:
    """w_k(x), the product over all of R of |alpha . x|^k(alpha).

    Exact when coordinates are rational and every multiplicity is a
    nonnegative integer; otherwise evaluated in floating point.
    """
    exact = (
        system.is_exact
        and all(not isinstance(c, float) for c in x)
        and all(
            isinstance(r.multiplicity, (int, Fraction))
            and Fraction(r.multiplicity).denominator == 1
            for r in system.roots
        )
    )
    if exact:
        acc = Fraction(1)
        for r in system.roots:
            k = int(r.multiplicity)
            if k:
                acc *= abs(dot(r.vector, x)) ** k
        return acc
    acc_f = 1.0
    for r in system.roots:
        k = float(r.multiplicity)
        if k:
            acc_f *= abs(float(dot(r.vector, x))) ** k
    return acc_f


def discriminant(system: RootSystem, x: Sequence[Scalar]) -> Scalar:
    """a_R(x) = product over the positive subsystem of (alpha . x)."""
    acc: Scalar = Fraction(1) if system.is_exact else 1.0
    for r in system.positive_roots():
        acc = acc * dot(r.vector, x)
    return acc


def hyperplane_distance(system: RootSystem, x: Sequence[Scalar]) -> float:
    """min over roots of |alpha . x| / |alpha| (float)."""
    best = math.inf
    for i in system.positive:
        r = system.roots[i]
        d = abs(float(dot(r.vector, x))) / math.sqrt(float(r.sq_norm))
        best = min(best, d)
    return best


def sample_generic_point(
    system: RootSystem,
    seed: int,
    min_distance: float = 0.05,
    box: float = 2.0,
    max_tries: int = 1000,
) -> Vector:
    """Deterministic point with normalized hyperplane distance >= min_distance.

    Exact systems get rational coordinates (denominator 64); float systems
    get uniform floats in [-box, box].  Raises SamplingError when the margin
    cannot be met within ``max_tries`` draws.
    """
    if min_distance <= 0:
        raise ValueError("min_distance must be positive")
    rng = random.Random(seed)
    exact = system.is_exact
    d2 = Fraction(min_distance) ** 2 if exact else min_distance * min_distance
    q = 64
    lim = int(box * q)
    for _ in range(max_tries):
        if exact:
            x: Vector = tuple(
                Fraction(rng.randint(-lim, lim), q) for _ in range(system.dimension)
            )
            ok = True
            for i in system.positive:
                r = system.roots[i]
                dd = dot(r.vector, x)
                if dd * dd < d2 * r.sq_norm:
                    ok = False
                    break
        else:
            x = tuple(rng.uniform(-box, box) for _ in range(system.dimension))
            ok = True
            for i in system.positive:
                r = system.roots[i]
                dd = float(dot(r.vector, x))
                if dd * dd < d2 * float(r.sq_norm):
                    ok = False
                    break
        if ok:
            return x
    raise SamplingError(
        f"no point with hyperplane margin {min_distance} found in {max_tries} draws"
    )


def gamma_with_chamber(system: RootSystem, chamber: Sequence[Scalar]) -> Scalar:
    """gamma recomputed from the positive subsystem of another chamber."""
    idx = positive_indices([r.vector for r in system.roots], chamber)
    return sum(system.roots[i].multiplicity for i in idx)

"""Root system construction, closure, orbits, serialization, sampling."""

import json
import math
from fractions import Fraction

import pytest

from dunkl_lab.errors import ExactModeError, InvalidRootError, SamplingError, UnsupportedFamilyError
from dunkl_lab.rootsys import (
    RootSystem,
    build_root_system,
    chamber_vector,
    check_closure,
    compute_orbits,
    discriminant,
    dot,
    gamma_with_chamber,
    hyperplane_distance,
    make_system_from_vectors,
    reflect,
    sample_generic_point,
    weight,
)

FAMILIES = [
    ("A", 2, (1,)),
    ("A", 3, (Fraction(3, 2),)),
    ("B", 2, (1, 2)),
    ("B", 3, (Fraction(1, 2), Fraction(5, 3))),
    ("D", 4, (2,)),
    ("I2", 4, (1, 1)),
]


@pytest.mark.parametrize("family,rank,mults", FAMILIES)
def test_closure(family, rank, mults):
    system = build_root_system(family, rank, mults)
    result = check_closure(system)
    assert result, result.detail


@pytest.mark.parametrize(
    "family,rank,mults,count",
    [
        ("A", 2, (1,), 6),  # N(N-1) roots in R^N, N = rank + 1
        ("A", 3, (1,), 12),
        ("B", 2, (1, 1), 8),  # 2N short + 2N(N-1) long
        ("B", 3, (1, 1), 18),
        ("D", 4, (1,), 24),
        ("I2", 4, (1, 1), 8),
    ],
)
def test_root_counts(family, rank, mults, count):
    system = build_root_system(family, rank, mults)
    assert len(system.roots) == count
    assert len(system.positive) == count // 2


@pytest.mark.parametrize(
    "family,rank,mults,n_orbits",
    [
        ("A", 3, (1,), 1),
        ("B", 3, (1, 2), 2),
        ("B", 1, (1,), 1),
        ("D", 4, (1,), 1),
        ("I2", 4, (1, 2), 2),
    ],
)
def test_orbit_detection(family, rank, mults, n_orbits):
    system = build_root_system(family, rank, mults)
    labels = compute_orbits(system)
    assert len(set(labels)) == n_orbits
    # the recomputed partition must agree with the stored orbit tags
    for lab, root in zip(labels, system.roots):
        same = [r.orbit for r, l2 in zip(system.roots, labels) if l2 == lab]
        assert all(o == root.orbit for o in same)


def test_gamma_values():
    # A_{N-1} in R^N: gamma = k * N(N-1)/2
    a3 = build_root_system("A", 3, (Fraction(3, 2),))
    assert a3.gamma == Fraction(3, 2) * 6
    # B_N: gamma = N k1 + N(N-1) k2
    b2 = build_root_system("B", 2, (Fraction(1, 3), Fraction(2, 5)))
    assert b2.gamma == 2 * Fraction(1, 3) + 2 * Fraction(2, 5)
    d4 = build_root_system("D", 4, (2,))
    assert d4.gamma == 24


def test_chamber_vector_is_generic():
    for family, rank, mults in FAMILIES:
        system = build_root_system(family, rank, mults)
        c = chamber_vector(system.dimension)
        for i in system.positive:
            assert float(dot(system.roots[i].vector, c)) > 0


def test_gamma_chamber_independent():
    system = build_root_system("B", 3, (Fraction(1, 2), Fraction(5, 3)))
    # any generic chamber gives the same multiplicity sum
    assert gamma_with_chamber(system, (7, 1, 3)) == system.gamma
    assert gamma_with_chamber(system, (-1, -2, -4)) == system.gamma


def test_reflection_involution():
    system = build_root_system("D", 4, (1,))
    x = (Fraction(1), Fraction(2), Fraction(-3), Fraction(5, 2))
    for r in system.roots:
        y = reflect(r, x)
        assert reflect(r, y) == tuple(x)
        assert reflect(r, r.vector) == tuple(-c for c in r.vector)


def test_reflection_matrices_match_reflect():
    system = build_root_system("B", 2, (1, 1))
    x = (Fraction(3), Fraction(-7))
    for i, mat in enumerate(system.reflection_matrices):
        via_mat = tuple(sum(row[j] * x[j] for j in range(2)) for row in mat)
        assert via_mat == system.reflect_index(i, x)


def test_signed_permutations_cover_integer_families():
    for family, rank, mults in [("A", 3, (1,)), ("B", 3, (1, 1)), ("D", 4, (1,))]:
        system = build_root_system(family, rank, mults)
        x = tuple(Fraction(i + 1, 3) for i in range(system.dimension))
        for i, sp in enumerate(system.signed_permutations):
            assert sp is not None
            perm, signs = sp
            image = tuple(signs[j] * x[perm[j]] for j in range(len(x)))
            assert image == system.reflect_index(i, x)


def test_i2_exact_only_square():
    sq = build_root_system("I2", 4, (1, 2))
    assert sq.is_exact
    with pytest.raises(ExactModeError):
        build_root_system("I2", 3, (1,))
    with pytest.raises(ExactModeError):
        build_root_system("I2", 6, (1, 1))
    hexagon = build_root_system("I2", 6, (1, 1), scale="normalized")
    assert not hexagon.is_exact
    assert check_closure(hexagon)
    assert len(hexagon.roots) == 12


def test_normalized_scale_unit_roots():
    system = build_root_system("B", 3, (1.0, 0.5), scale="normalized")
    assert not system.is_exact
    for r in system.roots:
        assert math.isclose(float(r.sq_norm), 1.0, rel_tol=1e-12)


def test_bad_inputs():
    with pytest.raises(InvalidRootError):
        build_root_system("B", 2, (1,))  # two orbits, one multiplicity
    with pytest.raises(InvalidRootError):
        build_root_system("A", 2, (1, 1))
    with pytest.raises(InvalidRootError):
        build_root_system("A", 2, (-1,))
    with pytest.raises(UnsupportedFamilyError):
        build_root_system("Q", 2, (1,))
    with pytest.raises(UnsupportedFamilyError):
        build_root_system("I2", 2, (1, 1))


def test_closure_detects_broken_sets():
    # missing the reflection images of (1,1): not a root system
    broken = make_system_from_vectors([(1, 0), (-1, 0), (1, 1), (-1, -1)])
    assert not check_closure(broken)
    # non-reduced: (2,0) parallel to (1,0)
    doubled = make_system_from_vectors([(1, 0), (-1, 0), (2, 0), (-2, 0)])
    assert not check_closure(doubled)
    ok = make_system_from_vectors([(1, 0), (-1, 0), (0, 1), (0, -1)])
    assert check_closure(ok)


def test_json_round_trip():
    for family, rank, mults in FAMILIES:
        system = build_root_system(family, rank, mults)
        text = system.to_json()
        back = RootSystem.from_json(text)
        assert back.family == system.family
        assert back.rank == system.rank
        assert back.multiplicities == system.multiplicities
        assert back.roots == system.roots
        assert back.positive == system.positive
        # canonical form: serialization is byte-stable
        assert back.to_json() == text


def test_json_rejects_tampering():
    system = build_root_system("A", 2, (1,))
    data = json.loads(system.to_json())
    data["roots"][0] = [5, 5, 5]
    with pytest.raises(InvalidRootError):
        RootSystem.from_json_dict(data)


def test_multiplicity_scale():
    system = build_root_system("B", 2, (Fraction(1, 2), Fraction(3, 2)))
    doubled = system.with_multiplicity_scale(2)
    assert doubled.gamma == 2 * system.gamma
    zeroed = system.with_multiplicity_scale(0)
    assert zeroed.gamma == 0
    assert [r.vector for r in zeroed.roots] == [r.vector for r in system.roots]
    with pytest.raises(ValueError):
        system.with_multiplicity_scale(-1)


def test_build_cache_keeps_scalar_types_distinct():
    exact = build_root_system("A", 2, (1,))
    approx = build_root_system("A", 2, (1.0,))
    assert isinstance(exact.multiplicities[0], Fraction)
    assert isinstance(approx.multiplicities[0], float)
    assert build_root_system("A", 2, (1,)) is exact


def test_weight_and_discriminant():
    a2 = build_root_system("A", 2, (2,))
    x = (Fraction(0), Fraction(1), Fraction(3))
    # positive roots are e_j - e_i for j > i, so factors are 1-0, 3-0, 3-1
    assert discriminant(a2, x) == Fraction(6)
    # w_k over all roots doubles each positive factor
    assert weight(a2, x) == (1 * 3 * 2) ** (2 * 2)
    b1 = build_root_system("B", 1, (3,))
    assert weight(b1, (Fraction(2),)) == 2**6


def test_discriminant_alternates():
    system = build_root_system("A", 3, (1,))
    x = (Fraction(1, 2), Fraction(2), Fraction(-1), Fraction(4))
    base = discriminant(system, x)
    for i in system.positive:
        assert discriminant(system, system.reflect_index(i, x)) == -base


def test_sample_generic_point():
    system = build_root_system("B", 3, (1, 1))
    x = sample_generic_point(system, seed=7, min_distance=0.1)
    assert all(isinstance(c, Fraction) for c in x)
    assert hyperplane_distance(system, x) >= 0.1
    assert sample_generic_point(system, seed=7, min_distance=0.1) == x
    assert sample_generic_point(system, seed=8, min_distance=0.1) != x
    # an impossible margin must fail loudly, not spin forever
    with pytest.raises(SamplingError):
        sample_generic_point(system, seed=0, min_distance=50.0, max_tries=50)


def test_float_system_sampling():
    system = build_root_system("I2", 6, (1.0, 1.0), scale="normalized")
    x = sample_generic_point(system, seed=3, min_distance=0.05)
    assert all(isinstance(c, float) for c in x)
    assert hyperplane_distance(system, x) >= 0.05

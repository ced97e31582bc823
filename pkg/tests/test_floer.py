"""Tests for Novikov arithmetic, count tables, differentials, coherence,
the autonomous reduction, and cohomology ranks.

Independent oracles: hand enumeration of gradient lines on circle models,
simplicial cohomology of explicit triangulations (boundary-matrix ranks
over the rationals), and rational specialization q^A -> 1/2 for truncated
Novikov elimination.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equitrans import floer
from equitrans.errors import IndeterminateError, InvalidInputError
from equitrans.floer import (
    GeneratorSet,
    HomologyLattice,
    ModuliCountTable,
    NovikovElement,
    autonomous_reduce,
    betti_sum,
    build_differential,
    check_d_squared,
    coherence_validate,
    cohomology_rank,
)

LAT1 = HomologyLattice(1, (Fraction(1),), (0,))
LATC = HomologyLattice(1, (Fraction(1),), (1,))
LAT0 = HomologyLattice(0, (), ())


# ---------------------------------------------------------------------------
# Novikov arithmetic
# ---------------------------------------------------------------------------


def test_unit_is_multiplicative_identity():
    one = NovikovElement.unit(LAT1)
    x = NovikovElement(LAT1, {(2,): Fraction(3, 7), (0,): 1})
    assert one * x == x
    assert x * one == x


def test_monomial_grading():
    q3 = NovikovElement.monomial(LATC, (3,))
    assert q3.degree() == 6  # 2 * c1, with c1(A) = 3


def test_invert_geometric_series():
    # (1 - q)^-1 truncated at 5 * omega(q) is 1 + q + ... + q^5, and
    # multiplying back gives 1 modulo terms above the cutoff
    a = NovikovElement.unit(LAT1) - NovikovElement.monomial(LAT1, (1,))
    inv = a.invert_truncated(5)
    expected = NovikovElement(LAT1, {(k,): 1 for k in range(6)}, Fraction(5))
    assert inv == expected
    back = NovikovElement(LAT1, (a * inv).terms, Fraction(5))
    assert back == NovikovElement.unit(LAT1, Fraction(5))


def test_invert_zero_rejected():
    with pytest.raises(InvalidInputError):
        NovikovElement.zero(LAT1).invert_truncated(3)


def test_invert_tied_leading_terms_indeterminate():
    flat = HomologyLattice(1, (Fraction(0),), (1,))  # omega identically zero
    a = NovikovElement.unit(flat) - NovikovElement.monomial(flat, (1,))
    with pytest.raises(IndeterminateError):
        a.invert_truncated(3)


coeffs = st.fractions(
    min_value=-4, max_value=4, max_denominator=6
)
points = st.integers(min_value=-3, max_value=3)
elements = st.dictionaries(
    st.tuples(points), coeffs, max_size=4
).map(lambda t: NovikovElement(LAT1, t))


@settings(max_examples=60, deadline=None)
@given(elements, elements, elements)
def test_novikov_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40, deadline=None)
@given(elements)
def test_novikov_invert_roundtrip(a):
    if a.is_zero():
        return
    vals = sorted({LAT1.omega_of(p) for p in a.terms})
    if len([v for v in vals if v == vals[0]]) != 1:
        return
    leads = [p for p in a.terms if LAT1.omega_of(p) == vals[0]]
    if len(leads) != 1:
        return
    cutoff = Fraction(6)
    inv = a.invert_truncated(cutoff)
    back = NovikovElement(LAT1, (a * inv).terms, cutoff)
    assert back == NovikovElement.unit(LAT1, cutoff)


# ---------------------------------------------------------------------------
# generators and tables
# ---------------------------------------------------------------------------


def sphere_gens():
    return GeneratorSet(("x", "z"), {"x": 0, "z": 2}, 1, {"x": 0, "z": 2})


def circle4_gens():
    return GeneratorSet(
        ("m1", "m2", "M1", "M2"),
        {"m1": 0, "m2": 0, "M1": 1, "M2": 1},
        1,
        {"m1": 0, "m2": 0, "M1": 1, "M2": 1},
    )


def test_self_indexing_enforced():
    with pytest.raises(InvalidInputError):
        GeneratorSet(("a", "b"), {"a": 0, "b": 1}, 1, {"a": 5, "b": 1})


def test_gradings():
    g = sphere_gens()
    assert g.morse_grading("x") == 2 and g.morse_grading("z") == 0
    assert g.floer_grading("x") == 1 and g.floer_grading("z") == -1


def test_count_table_energy_constraint():
    gens = sphere_gens()
    bad = ModuliCountTable(LAT1, {("z", "x", (0,)): 1})  # H(x) - H(z) < 0
    with pytest.raises(InvalidInputError):
        bad.validate(gens)


def test_derived_index_formula():
    gens = sphere_gens()
    t = ModuliCountTable(LATC, {})
    # ind z - ind x + 2 c1(A) - 1 with A = (1,): 2 - 0 + 2 - 1 = 3
    assert t.derived_index(gens, "x", "z", (1,)) == 3


# ---------------------------------------------------------------------------
# differentials
# ---------------------------------------------------------------------------


def test_empty_counts_zero_differential():
    gens = sphere_gens()
    delta = build_differential(gens, ModuliCountTable(LAT1, {}))
    assert check_d_squared(delta).ok


def test_two_generator_differential():
    gens = GeneratorSet(("x", "y"), {"x": 0, "y": 1}, 1, {"x": 0, "y": 1})
    counts = ModuliCountTable(LAT0, {("x", "y", ()): 1})
    delta = build_differential(gens, counts)
    assert delta.entry("x", "y") == NovikovElement.unit(LAT0)


def test_wiggly_circle_hand_enumeration():
    # hand enumeration of gradient lines for a circle with two maxima and
    # two minima m1 M1 m2 M2 in cyclic order: each maximum flows to both
    # adjacent minima with opposite signs under the standard orientations
    gens = circle4_gens()
    counts = ModuliCountTable(
        LAT0,
        {
            ("m1", "M1", ()): 1,
            ("m2", "M1", ()): -1,
            ("m1", "M2", ()): -1,
            ("m2", "M2", ()): 1,
        },
    )
    delta = build_differential(gens, counts)
    assert check_d_squared(delta).ok
    ranks = cohomology_rank(delta, cutoff=10)
    assert ranks == {0: 1, 1: 1}


def test_differential_rejects_wrong_index_slot():
    gens = sphere_gens()
    counts = ModuliCountTable(LAT1, {("x", "z", (0,)): 1})  # derived index 1
    with pytest.raises(InvalidInputError):
        build_differential(gens, counts)


# ---------------------------------------------------------------------------
# d-squared on synthetic coherent tables
# ---------------------------------------------------------------------------


def coherent_three_level_table(rng, n0=3, n1=3, n2=2):
    from equitrans.testutil import coherent_three_level_table as gen

    return gen(rng, LAT1, n0, n1, n2)


def test_synthetic_coherent_tables_d_squared_zero():
    rng = np.random.default_rng(77)
    for _ in range(20):
        gens, counts = coherent_three_level_table(rng)
        delta = build_differential(gens, counts, cutoff=10)
        assert check_d_squared(delta).ok


def test_perturbed_entry_fails_at_the_pair():
    rng = np.random.default_rng(5)
    while True:
        gens, counts = coherent_three_level_table(rng)
        if any(k[1].startswith("c") for k in counts.counts):
            break
    key = next(k for k in counts.counts if k[1].startswith("c"))
    bad = dict(counts.counts)
    bad[key] = bad[key] + 1
    delta = build_differential(gens, ModuliCountTable(LAT1, bad), cutoff=10)
    report = check_d_squared(delta)
    assert not report.ok
    x, z = report.first_failure
    assert gens.ind(x) == 0 and gens.ind(z) == 2


# ---------------------------------------------------------------------------
# coherence validation
# ---------------------------------------------------------------------------


def test_coherence_vacuous():
    gens = sphere_gens()
    report = coherence_validate(ModuliCountTable(LAT1, {}), gens, {})
    assert report.ok


def test_coherence_two_level_product_rule():
    names = ("x", "y", "z")
    gens = GeneratorSet(
        names, {"x": 0, "y": 1, "z": 2}, 1, {"x": 0, "y": 1, "z": 2}
    )
    counts = ModuliCountTable(
        LAT1,
        {
            ("x", "y", (1,)): 2,
            ("y", "z", (2,)): -3,
            ("x", "z", (3,)): 5,  # an index-1 entry (2 - 0 + 0 - 1 = 1)
        },
    )
    strata = {
        ("x", "z", (3,)): [
            {"through": "y", "a1": (1,), "a2": (2,), "declared": -6}
        ]
    }
    report = coherence_validate(counts, gens, strata)
    assert report.ok


def test_coherence_mismatched_class_bookkeeping_fails():
    names = ("x", "y", "z")
    gens = GeneratorSet(
        names, {"x": 0, "y": 1, "z": 2}, 1, {"x": 0, "y": 1, "z": 2}
    )
    counts = ModuliCountTable(
        LAT1, {("x", "y", (1,)): 2, ("y", "z", (2,)): -3, ("x", "z", (3,)): 5}
    )
    strata = {
        ("x", "z", (3,)): [
            {"through": "y", "a1": (1,), "a2": (1,), "declared": -6}
        ]
    }
    report = coherence_validate(counts, gens, strata)
    assert not report.ok
    assert report.stratum_failures[0]["reason"] == "class bookkeeping"


def test_coherence_missing_label_invalid():
    names = ("x", "y", "z")
    gens = GeneratorSet(
        names, {"x": 0, "y": 1, "z": 2}, 1, {"x": 0, "y": 1, "z": 2}
    )
    counts = ModuliCountTable(LAT1, {("x", "z", (3,)): 5})
    with pytest.raises(InvalidInputError):
        coherence_validate(counts, gens, {})


# ---------------------------------------------------------------------------
# autonomous reduction
# ---------------------------------------------------------------------------


def torus_like_counts():
    # ind-0 Morse entries plus a spurious index-0 entry with A != 0
    gens = circle4_gens()
    lattice = HomologyLattice(1, (Fraction(3),), (1,))
    counts = {
        ("m1", "M1", (0,)): 1,
        ("m2", "M1", (0,)): -1,
        ("m1", "M2", (0,)): -1,
        ("m2", "M2", (0,)): 1,
        # derived index: ind m1 - ind M1 + 2 c1 - 1 = 0 - 1 + 2 - 1 = 0
        ("M1", "m1", (1,)): 7,
    }
    return gens, lattice, ModuliCountTable(lattice, counts)


def test_reduce_zeroes_spurious_entries_and_matches_morse():
    gens, lattice, counts = torus_like_counts()
    morse = {
        ("m1", "M1"): 1,
        ("m2", "M1"): -1,
        ("m1", "M2"): -1,
        ("m2", "M2"): 1,
    }
    reduced = autonomous_reduce(counts, gens, morse)
    assert ("M1", "m1", (1,)) not in reduced.counts
    for (x, y), c in morse.items():
        assert reduced.counts[(x, y, lattice.zero)] == c
    again = autonomous_reduce(reduced, gens, morse)
    assert again.counts == reduced.counts  # idempotent
    # reduced complex ranks equal the Morse complex ranks
    delta = build_differential(gens, reduced, cutoff=10)
    morse_lattice_counts = ModuliCountTable(
        LAT0, {(x, y, ()): c for (x, y), c in morse.items()}
    )
    delta_m = build_differential(gens, morse_lattice_counts, cutoff=10)
    assert cohomology_rank(delta) == cohomology_rank(delta_m)


def test_reduce_morse_only_table_unchanged():
    gens = circle4_gens()
    counts = ModuliCountTable(
        LAT1, {("m1", "M1", (0,)): 1, ("m2", "M1", (0,)): -1}
    )
    morse = {("m1", "M1"): 1, ("m2", "M1"): -1}
    reduced = autonomous_reduce(counts, gens, morse)
    assert reduced.counts == counts.counts


# ---------------------------------------------------------------------------
# cohomology ranks
# ---------------------------------------------------------------------------


def simplicial_cohomology_ranks(vertices, triangles):
    """Independent oracle: rational ranks of simplicial coboundaries."""
    edges = sorted(
        {tuple(sorted(e)) for t in triangles for e in itertools.combinations(t, 2)}
    )
    tri = sorted(tuple(sorted(t)) for t in triangles)
    e_idx = {e: i for i, e in enumerate(edges)}
    d0 = np.zeros((len(edges), len(vertices)), dtype=int)
    for (u, v), i in e_idx.items():
        d0[i, vertices.index(u)] = -1
        d0[i, vertices.index(v)] = 1
    d1 = np.zeros((len(tri), len(edges)), dtype=int)
    for r, (a, b, c) in enumerate(tri):
        d1[r, e_idx[(b, c)]] = 1
        d1[r, e_idx[(a, c)]] = -1
        d1[r, e_idx[(a, b)]] = 1
    r0 = np.linalg.matrix_rank(d0)
    r1 = np.linalg.matrix_rank(d1)
    return {
        0: len(vertices) - r0,
        1: len(edges) - r1 - r0,
        2: len(tri) - r1,
    }


def test_zero_differential_degrees_0112():
    gens = GeneratorSet(
        ("a", "b1", "b2", "c"),
        {"a": 0, "b1": 1, "b2": 1, "c": 2},
        2,
        {"a": 0, "b1": 1, "b2": 1, "c": 2},
    )
    delta = build_differential(gens, ModuliCountTable(LAT1, {}))
    assert cohomology_rank(delta, cutoff=10) == {0: 1, 1: 2, 2: 1}


def test_unit_entry_kills_cohomology_with_specialization_oracle():
    # delta x = (1 - q^A) y: the coefficient is a unit, so H = 0 in both
    # degrees; oracle: specialize q^A -> 1/2 and take the rank over Q
    gens = GeneratorSet(("y", "x"), {"y": 0, "x": 1}, 1, {"y": 0, "x": 1})
    counts = ModuliCountTable(
        LAT1, {("y", "x", (0,)): 1, ("y", "x", (1,)): -1}
    )
    delta = build_differential(gens, counts, cutoff=8)
    ranks = cohomology_rank(delta, cutoff=8)
    assert ranks == {0: 0, 1: 0}
    specialized = sum(
        c * Fraction(1, 2) ** a[0] for a, c in delta.entry("y", "x").terms.items()
    )
    assert specialized != 0  # rank 1 over Q after specialization


def test_sphere_model_against_simplicial_oracle():
    gens = sphere_gens()
    delta = build_differential(gens, ModuliCountTable(LAT1, {}))
    ranks = cohomology_rank(delta, cutoff=10)
    full = {d: ranks.get(d, 0) for d in (0, 1, 2)}
    # boundary of the tetrahedron as the sphere oracle
    verts = [0, 1, 2, 3]
    tris = list(itertools.combinations(verts, 3))
    assert full == simplicial_cohomology_ranks(verts, tris) == {0: 1, 1: 0, 2: 1}


def test_torus_model_against_simplicial_oracle():
    gens = GeneratorSet(
        ("a", "b1", "b2", "c"),
        {"a": 0, "b1": 1, "b2": 1, "c": 2},
        2,
        {"a": 0, "b1": 1, "b2": 1, "c": 2},
    )
    delta = build_differential(gens, ModuliCountTable(LAT1, {}))
    ranks = cohomology_rank(delta, cutoff=10)
    # 3x3 grid torus: 9 vertices, 27 edges, 18 triangles
    verts = [(i, j) for i in range(3) for j in range(3)]
    tris = []
    for i in range(3):
        for j in range(3):
            i1, j1 = (i + 1) % 3, (j + 1) % 3
            tris.append(((i, j), (i1, j), (i, j1)))
            tris.append(((i1, j), (i, j1), (i1, j1)))
    oracle = simplicial_cohomology_ranks(verts, tris)
    assert oracle == {0: 1, 1: 2, 2: 1} == ranks


def test_rank_nullity_bookkeeping():
    rng = np.random.default_rng(123)
    for _ in range(5):
        gens, counts = coherent_three_level_table(rng)
        delta = build_differential(gens, counts, cutoff=10)
        ranks = cohomology_rank(delta, cutoff=10)
        n_gens = len(gens.names)
        # recover the two block ranks from the homology defect
        total_rank = (n_gens - betti_sum(ranks)) // 2
        assert betti_sum(ranks) + 2 * total_rank == n_gens


def test_weak_arnold_lower_bound_on_perfect_models():
    for gens, expected in (
        (sphere_gens(), {0: 1, 1: 0, 2: 1}),
        (
            GeneratorSet(
                ("a", "b1", "b2", "c"),
                {"a": 0, "b1": 1, "b2": 1, "c": 2},
                2,
                {"a": 0, "b1": 1, "b2": 1, "c": 2},
            ),
            {0: 1, 1: 2, 2: 1},
        ),
    ):
        delta = build_differential(gens, ModuliCountTable(LAT1, {}))
        ranks = cohomology_rank(delta, cutoff=10)
        assert len(gens.names) >= betti_sum(ranks)
        assert len(gens.names) == betti_sum(ranks)  # perfect models

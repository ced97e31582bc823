"""Tests for finite groupoids, quotients, effective isotropy, regularity,
and quotient metrics."""

import itertools

import numpy as np
import pytest

from equitrans import groupoids as gq
from equitrans import reps
from equitrans.errors import InvalidInputError
from equitrans.groupoids import (
    GlobalActionData,
    circle_rotation_action,
    discrete_groupoid,
    effective_part,
    make_translation_groupoid,
    orbit_set,
    properness_check,
    quotient_groupoid,
    quotient_metric,
    regularity_check,
    translation_probe_action,
)


def cyclic_action(n, npts, shift=1):
    """Z_n acting on npts points by repeated application of a shift."""
    group = reps.cyclic_group(n)
    act = np.zeros((n, npts), dtype=int)
    for g in range(n):
        for x in range(npts):
            act[g, x] = (x + g * shift) % npts
    return group, act


# ---------------------------------------------------------------------------
# translation groupoids and orbit sets
# ---------------------------------------------------------------------------


def test_trivial_group_gives_discrete_groupoid():
    group = reps.cyclic_group(1)
    act = np.arange(3).reshape(1, 3)
    gpd = make_translation_groupoid(group, act)
    gpd.validate()
    assert gpd.n_morphisms == 3
    for x in range(3):
        assert gpd.stab(x) == [gpd.units[x]]


def test_z2_free_action_on_two_points():
    group, act = cyclic_action(2, 2)
    gpd = make_translation_groupoid(group, act)
    gpd.validate()
    assert gpd.n_morphisms == 4
    assert len(gpd.stab(0)) == 1  # free action: trivial isotropy
    assert gpd.isomorphic_objects(0) == {0, 1}  # one orbit


def test_z2_trivial_action_has_full_stabilizer():
    group = reps.cyclic_group(2)
    act = np.zeros((2, 1), dtype=int)
    gpd = make_translation_groupoid(group, act)
    gpd.validate()
    assert len(gpd.stab(0)) == 2


def test_orbit_set_examples():
    gpd = discrete_groupoid(2)
    assert orbit_set(gpd, 0, {0}) == [gpd.units[0]]
    group = reps.cyclic_group(2)
    act = np.zeros((2, 1), dtype=int)
    point_gpd = make_translation_groupoid(group, act)
    assert len(orbit_set(point_gpd, 0, {0})) == 2
    group3, act3 = cyclic_action(3, 3)
    gpd3 = make_translation_groupoid(group3, act3)
    assert len(orbit_set(gpd3, 1, {0, 1, 2})) == 3


# ---------------------------------------------------------------------------
# properness
# ---------------------------------------------------------------------------


def test_properness_stab_orbit_uniformizers_pass():
    # free Z_3 action: the stabilizer orbit of a point is the point itself,
    # and any uniformizer meeting each group orbit once passes
    group, act = cyclic_action(3, 3)
    gpd = make_translation_groupoid(group, act)
    assert properness_check(gpd, {0: {0}})[0]["ok"]
    # two free Z_2 orbits on four points: one point per orbit still passes
    z2 = reps.cyclic_group(2)
    act2 = np.array([[0, 1, 2, 3], [1, 0, 3, 2]])
    gpd2 = make_translation_groupoid(z2, act2)
    assert properness_check(gpd2, {0: {0, 2}})[0]["ok"]
    # trivial action on a point: the full stabilizer counts
    point = make_translation_groupoid(z2, np.zeros((2, 1), dtype=int))
    assert properness_check(point, {0: {0}})[0]["ok"]


def test_properness_mixed_isotropy_fails_at_smaller_point():
    # Z_2 acting on 3 points: swaps 0 and 1, fixes 2; a uniformizer around
    # the fixed point 2 that also contains 0 fails at 0
    group = reps.cyclic_group(2)
    act = np.array([[0, 1, 2], [1, 0, 2]])
    gpd = make_translation_groupoid(group, act)
    report = properness_check(gpd, {2: {0, 2}})
    assert not report[2]["ok"]
    assert report[2]["offending"] == 0
    # the honest uniformizer around the fixed point passes
    assert properness_check(gpd, {2: {2}})[2]["ok"]


def test_properness_trivial_groupoid():
    gpd = discrete_groupoid(3)
    report = properness_check(gpd, {x: {x} for x in range(3)})
    assert all(r["ok"] for r in report.values())


# ---------------------------------------------------------------------------
# effective part
# ---------------------------------------------------------------------------


def test_effective_part_faithful_action():
    group = reps.cyclic_group(2)
    act = np.array([[0, 1, 2], [0, 2, 1]])  # fixes object 0, swaps 1 and 2
    gpd = make_translation_groupoid(group, act)
    pa = translation_probe_action(gpd, group, act, 0, [0, 1, 2])
    eff = effective_part(gpd, 0, pa)
    assert eff.order == 2  # faithful: stab^eff = stab


def test_effective_part_trivial_probe_action():
    group = reps.cyclic_group(2)
    act = np.zeros((2, 1), dtype=int)
    gpd = make_translation_groupoid(group, act)
    pa = translation_probe_action(gpd, group, act, 0, [0])
    eff = effective_part(gpd, 0, pa)
    assert eff.order == 1  # everything acts trivially


def test_effective_part_z4_through_z2():
    # Z_4 fixing object 0, acting on probes {1, 2} through its Z_2 quotient
    group = reps.cyclic_group(4)
    act = np.array(
        [[0, 1, 2], [0, 2, 1], [0, 1, 2], [0, 2, 1]]
    )
    gpd = make_translation_groupoid(group, act)
    pa = translation_probe_action(gpd, group, act, 0, [1, 2])
    eff = effective_part(gpd, 0, pa)
    assert len(eff.stab) == 4
    assert len(eff.kernel) == 2
    assert eff.order == 2


def test_effective_part_invalid_probe_set():
    group = reps.cyclic_group(2)
    act = np.array([[0, 1, 2], [0, 2, 1]])
    gpd = make_translation_groupoid(group, act)
    with pytest.raises(InvalidInputError, match="not invariant"):
        translation_probe_action(gpd, group, act, 0, [0, 1])


# ---------------------------------------------------------------------------
# quotients
# ---------------------------------------------------------------------------


def fixed_object_groupoid_with_stab(n_stab):
    """One object with stabilizer Z_{n_stab} (a translation groupoid of the
    trivial action)."""
    group = reps.cyclic_group(n_stab)
    act = np.zeros((n_stab, 1), dtype=int)
    return make_translation_groupoid(group, act)


def test_quotient_free_z2_on_discrete_pair():
    gpd = discrete_groupoid(2)
    z2 = reps.cyclic_group(2)
    action = GlobalActionData(z2, np.array([[0, 1], [1, 0]]), np.array([[0, 1], [1, 0]]))
    model = quotient_groupoid(gpd, action, [0])
    assert model.groupoid.n_objects == 1
    assert len(model.groupoid.stab(0)) == 1
    assert model.stab_law[0]["ok"]


def test_quotient_fixed_object_stab3_times_g2():
    # stab^eff = Z_3 at the object, G_x = Z_2 acting trivially: |stab^Q| = 6
    gpd = fixed_object_groupoid_with_stab(3)
    z2 = reps.cyclic_group(2)
    ident_mor = np.arange(gpd.n_morphisms)
    action = GlobalActionData(
        z2,
        np.zeros((2, 1), dtype=int),
        np.stack([ident_mor, ident_mor]),
    )
    model = quotient_groupoid(gpd, action, [0])
    assert model.stab_law[0] == {"stab_Q": 6, "stab_eff": 3, "G_x": 2, "ok": True}


def test_quotient_trivial_group_effectivizes():
    # trivial G: quotient isotropy equals the effective isotropy
    gpd = fixed_object_groupoid_with_stab(4)
    z1 = reps.cyclic_group(1)
    action = GlobalActionData(
        z1, np.zeros((1, 1), dtype=int), np.arange(gpd.n_morphisms).reshape(1, -1)
    )
    # declare half of the stabilizer ineffective (acting as identity near x)
    stab = gpd.stab(0)
    kernel = [m for m in stab if (m // 1) % 2 == 0]  # elements 0 and 2 of Z_4
    model = quotient_groupoid(gpd, action, [0], ineffective_kernels={0: kernel})
    assert model.stab_law[0]["stab_eff"] == 2
    assert model.stab_law[0]["stab_Q"] == 2
    assert model.stab_law[0]["ok"]


def test_quotient_missing_slice_rejected():
    gpd = discrete_groupoid(3)
    z1 = reps.cyclic_group(1)
    action = GlobalActionData(
        z1, np.arange(3).reshape(1, 3), np.arange(3).reshape(1, 3)
    )
    with pytest.raises(InvalidInputError, match="miss"):
        quotient_groupoid(gpd, action, [0])


def test_quotient_library_cardinality_law():
    """|stab^Q| = |stab^eff| * |G_x| over a library of >= 10 finite actions."""
    cases = 0
    # translation groupoids of Z_n actions, quotiented by Z_2 functors
    for n_stab in (1, 2, 3, 4):
        gpd = fixed_object_groupoid_with_stab(n_stab)
        z2 = reps.cyclic_group(2)
        ident = np.arange(gpd.n_morphisms)
        action = GlobalActionData(
            z2, np.zeros((2, 1), dtype=int), np.stack([ident, ident])
        )
        model = quotient_groupoid(gpd, action, [0])
        assert model.stab_law[0]["ok"]
        cases += 1
    # free actions on discrete groupoids
    for npts in (2, 3, 4):
        gpd = discrete_groupoid(npts)
        zn = reps.cyclic_group(npts)
        obj = np.array([[(x + g) % npts for x in range(npts)] for g in range(npts)])
        action = GlobalActionData(zn, obj, obj)
        model = quotient_groupoid(gpd, action, [0])
        assert all(rec["ok"] for rec in model.stab_law.values())
        cases += 1
    # mixed isotropy: Z_2 acting on a 3-point discrete groupoid with a fixed pt
    gpd = discrete_groupoid(3)
    z2 = reps.cyclic_group(2)
    obj = np.array([[0, 1, 2], [1, 0, 2]])
    action = GlobalActionData(z2, obj, obj)
    model = quotient_groupoid(gpd, action, [0, 2])
    assert all(rec["ok"] for rec in model.stab_law.values())
    cases += 1
    # groupoid with morphisms: Z_2 x trivial action on a 2-point orbit
    grp, act = cyclic_action(2, 2)
    gpd = make_translation_groupoid(grp, act)
    z1 = reps.cyclic_group(1)
    action = GlobalActionData(
        z1, np.arange(2).reshape(1, 2), np.arange(gpd.n_morphisms).reshape(1, -1)
    )
    model = quotient_groupoid(gpd, action, [0])
    assert all(rec["ok"] for rec in model.stab_law.values())
    cases += 1
    # Z_2 functor swapping two components of a disjoint pair of orbits
    grp3, act3 = cyclic_action(3, 3)
    base = make_translation_groupoid(grp3, act3)
    two = _disjoint_double(base)
    z2 = reps.cyclic_group(2)
    swap_obj = np.array(
        [list(range(6)), [3, 4, 5, 0, 1, 2]]
    )
    nm = base.n_morphisms
    swap_mor = np.array(
        [list(range(2 * nm)), list(range(nm, 2 * nm)) + list(range(nm))]
    )
    action = GlobalActionData(z2, swap_obj, swap_mor)
    model = quotient_groupoid(two, action, [0])
    assert all(rec["ok"] for rec in model.stab_law.values())
    cases += 1
    assert cases >= 10


def _disjoint_double(gpd):
    n, m = gpd.n_objects, gpd.n_morphisms
    src = tuple(list(gpd.src) + [s + n for s in gpd.src])
    tgt = tuple(list(gpd.tgt) + [t + n for t in gpd.tgt])
    table = {}
    for (a, b), c in gpd.compose_table.items():
        table[(a, b)] = c
        table[(a + m, b + m)] = c + m
    units = tuple(list(gpd.units) + [u + m for u in gpd.units])
    invs = tuple(list(gpd.inverses) + [i + m for i in gpd.inverses])
    return gq.FiniteGroupoid(2 * n, src, tgt, table, units, invs)


# ---------------------------------------------------------------------------
# regularity
# ---------------------------------------------------------------------------


def test_regularity_faithful_linear_model_passes():
    # sign action on symmetric points {-2,-1,0,1,2}: the only morphism
    # fixing any neighborhood of 0 pointwise is the identity
    group = reps.cyclic_group(2)
    act = np.array([[0, 1, 2, 3, 4], [4, 3, 2, 1, 0]])
    gpd = make_translation_groupoid(group, act)
    stab = gpd.stab(2)
    perms = {m: tuple(act[m // 5]) for m in stab}
    report = regularity_check(
        gpd, {2: {"points": [0, 1, 2, 3, 4], "sub": [1, 2, 3], "action": perms}}
    )
    assert all(rec["ok"] for rec in report.values())


def test_regularity_half_fixed_pattern_fails():
    # a stabilizer element fixing one half of the uniformizer pointwise but
    # moving the other half violates the first regularity condition
    group = reps.cyclic_group(2)
    act = np.array([[0, 1, 2, 3], [0, 1, 3, 2]])  # fixes {0,1}, swaps {2,3}
    gpd = make_translation_groupoid(group, act)
    stab = gpd.stab(0)
    perms = {m: tuple(act[m // 4]) for m in stab}
    report = regularity_check(
        gpd, {0: {"points": [0, 1, 2, 3], "sub": [0, 1], "action": perms}}
    )
    nontrivial = [rec for rec in report.values() if not rec["fixes_all"]]
    assert any(not rec["ok"] for rec in nontrivial)


def test_regularity_trivial_stab_passes():
    gpd = discrete_groupoid(2)
    report = regularity_check(
        gpd, {0: {"points": [0], "sub": [0], "action": {gpd.units[0]: (0,)}}}
    )
    assert all(rec["ok"] for rec in report.values())


# ---------------------------------------------------------------------------
# quotient metrics
# ---------------------------------------------------------------------------


def test_quotient_metric_trivial_group_is_original():
    group = reps.cyclic_group(1)
    pts = [np.array([0.0]), np.array([1.0]), np.array([2.5])]
    res = quotient_metric(pts, group, lambda g, p: p)
    for i, p in enumerate(pts):
        for j, q in enumerate(pts):
            assert res.orbit_matrix[i, j] == pytest.approx(abs(p[0] - q[0]))


def test_quotient_metric_z2_negation_formula():
    group = reps.cyclic_group(2)

    def act(g, p):
        return p if g == 0 else -p

    rng = np.random.default_rng(8)
    pts = [np.array([x]) for x in rng.normal(size=12) * 3]
    res = quotient_metric(pts, group, act)
    for i, p in enumerate(pts):
        for j, q in enumerate(pts):
            expected = min(abs(p[0] - q[0]), abs(p[0] + q[0]))
            assert res.orbit_matrix[i, j] == pytest.approx(expected, abs=1e-12)


def test_quotient_metric_circle_radial_formula():
    circle = reps.CircleGroupModel(64)
    act = circle_rotation_action(circle)
    rng = np.random.default_rng(21)
    pts = [rng.normal(size=2) * 2 for _ in range(6)]
    res = quotient_metric(pts, circle, act)
    for i, p in enumerate(pts):
        # rotations are isometries: the averaged metric equals the original
        for j, q in enumerate(pts):
            assert res.invariant_matrix[i, j] == pytest.approx(
                np.linalg.norm(p - q), abs=1e-10
            )
            radial = abs(np.linalg.norm(p) - np.linalg.norm(q))
            assert res.orbit_matrix[i, j] == pytest.approx(radial, abs=1e-6)


def test_quotient_metric_invariance_and_axioms():
    group = reps.cyclic_group(4)

    def act(g, p):
        theta = np.pi / 2 * g
        c, s = np.cos(theta), np.sin(theta)
        return np.array([c * p[0] - s * p[1], s * p[0] + c * p[1]])

    rng = np.random.default_rng(3)
    pts = [rng.normal(size=2) for _ in range(6)]
    res = quotient_metric(pts, group, act)
    for i, p in enumerate(pts):
        for j, q in enumerate(pts):
            for g in range(4):
                assert res.invariant(act(g, p), act(g, q)) == pytest.approx(
                    res.invariant(p, q), abs=1e-12
                )
            assert res.orbit_matrix[i, j] == pytest.approx(
                res.orbit_matrix[j, i], abs=1e-12
            )
    n = len(pts)
    for i, j, k in itertools.product(range(n), repeat=3):
        assert (
            res.orbit_matrix[i, k]
            <= res.orbit_matrix[i, j] + res.orbit_matrix[j, k] + 1e-10
        )


def test_quotient_metric_rejects_non_metric():
    group = reps.cyclic_group(1)
    pts = [np.array([0.0]), np.array([1.0])]
    with pytest.raises(InvalidInputError):
        quotient_metric(pts, group, lambda g, p: p, metric=lambda p, q: -1.0)

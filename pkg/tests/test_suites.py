"""Meta-tests of the acceptance batteries: the integer fast path must agree
with the Fraction projector path, and batteries must be deterministic."""

from fractions import Fraction

import numpy as np
import pytest

from equitrans import linalg, reps, suites
from equitrans.errors import InvalidInputError


@pytest.mark.parametrize("name", ["Z_3", "S_3", "Q_8", "D_4"])
def test_integer_battery_matches_fraction_projectors(name):
    group = reps.preset_group(name)
    rng_a = np.random.default_rng(99)
    rng_b = np.random.default_rng(99)
    mats_int = suites._integer_rep(group, rng_a)
    # rebuild the same seeded rep through the Fraction path: same block
    # choices, same signed permutation
    names = reps.choose_blocks(group, rng_b, 12)
    catalog = reps._block_catalog(group)
    chosen = [catalog[n] for n in names]
    rep = chosen[0] if len(chosen) == 1 else reps.direct_sum(*chosen)
    d = rep.dim
    perm = rng_b.permutation(d)
    signs = rng_b.choice([-1, 1], size=d)
    q = np.zeros((d, d), dtype=object)
    for j, (p, s) in enumerate(zip(perm, signs)):
        q[p, j] = Fraction(int(s))
    q = q + Fraction(0)
    rep = reps.conjugate_rep(rep, q)
    assert np.array_equal(mats_int, linalg.as_float(rep.matrices).astype(np.int64))
    # the cleared-denominator identities certify the same projectors the
    # Fraction path produces
    for ir in group.nontrivial_irreps():
        chi = np.array([int(c) for c in ir.character])
        m = np.einsum("g,gij->ij", chi, mats_int)
        p_exact = reps.isotypic_projector(rep, ir)
        scale = Fraction(ir.dim_V, ir.endo_dim * group.order)
        assert linalg.mat_eq(linalg.frac_array(m.tolist()) * scale, p_exact)


def test_battery_records_are_deterministic():
    a = suites.suite_condition()
    b = suites.suite_condition()
    for key in ("criterion", "checks", "n_failures", "pass", "failures"):
        assert a[key] == b[key]


def test_unknown_suite_name_rejected():
    with pytest.raises(InvalidInputError):
        suites.run_suite("nonsense")


def test_circle_weight_capacity_enforced():
    circle = reps.CircleGroupModel(64)
    assert circle.max_weight == 15
    with pytest.raises(InvalidInputError):
        circle.weight_irrep(16)
    with pytest.raises(InvalidInputError):
        reps.circle_weight_rep(circle, [16])

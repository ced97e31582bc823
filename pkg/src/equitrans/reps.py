"""Compact-group models, real representations, characters, and isotypic projectors.

Finite groups are exact: multiplication tables with integer indices, matrix
entries rational (``Fraction``).  The circle group is modeled by uniform
quadrature at N sample angles, exact on trigonometric polynomials of degree
below N; with N >= 4*max_weight + 1 every averaging operation used here is
exact up to float roundoff.

Real irreducibles are the primitive notion; each carries an endomorphism
type R, C or H of real dimension 1, 2 or 4, and the character projector

    P = (dim V / endo_dim) * avg_g chi(g) rho(g)

projects onto the corresponding isotypic component.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import InvalidInputError

TOL = 1e-10


def _cos2pi_exact(num: int, den: int) -> Fraction | None:
    """cos(2*pi*num/den) as a Fraction, or None when irrational."""
    f = Fraction(num % den, den)
    table = {
        Fraction(0): Fraction(1),
        Fraction(1, 2): Fraction(-1),
        Fraction(1, 3): Fraction(-1, 2),
        Fraction(2, 3): Fraction(-1, 2),
        Fraction(1, 4): Fraction(0),
        Fraction(3, 4): Fraction(0),
        Fraction(1, 6): Fraction(1, 2),
        Fraction(5, 6): Fraction(1, 2),
    }
    return table.get(f)


@dataclass(frozen=True)
class IrrepDescriptor:
    """A real irreducible representation: label, dimension, character values
    per group element, and endomorphism type."""

    label: str
    dim_V: int
    character: np.ndarray
    endo_type: str  # 'R', 'C' or 'H'

    def __post_init__(self):
        if self.endo_type not in ("R", "C", "H"):
            raise InvalidInputError(f"unknown endomorphism type {self.endo_type!r}")

    @property
    def endo_dim(self) -> int:
        return {"R": 1, "C": 2, "H": 4}[self.endo_type]


@dataclass(frozen=True)
class FiniteGroupModel:
    """A finite group as an explicit multiplication table.

    ``table[i, j]`` is the index of the product g_i * g_j.  Irreps may be
    attached (preset groups ship with their full real character table).
    """

    name: str
    table: np.ndarray
    irreps: tuple[IrrepDescriptor, ...] = ()
    element_names: tuple[str, ...] = ()

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @property
    def identity(self) -> int:
        for e in range(self.order):
            if all(self.table[e, j] == j for j in range(self.order)) and all(
                self.table[j, e] == j for j in range(self.order)
            ):
                return e
        raise InvalidInputError("multiplication table has no identity")

    def inverse(self, g: int) -> int:
        e = self.identity
        for h in range(self.order):
            if self.table[g, h] == e and self.table[h, g] == e:
                return h
        raise InvalidInputError(f"element {g} has no two-sided inverse")

    def compose(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def validate(self) -> None:
        """Check associativity on all triples and two-sided identity/inverse."""
        n = self.order
        t = self.table
        if t.shape != (n, n) or t.min() < 0 or t.max() >= n:
            raise InvalidInputError("multiplication table is not an index table")
        for a in range(n):
            for b in range(n):
                tab = t[a, b]
                for c in range(n):
                    if t[tab, c] != t[a, t[b, c]]:
                        raise InvalidInputError(
                            f"multiplication not associative at ({a},{b},{c})"
                        )
        _ = self.identity
        for g in range(n):
            self.inverse(g)

    def nontrivial_irreps(self) -> tuple[IrrepDescriptor, ...]:
        return tuple(ir for ir in self.irreps if ir.label != "trivial")


@dataclass(frozen=True)
class CircleGroupModel:
    """The circle group sampled at N uniform angles 2*pi*k/N.

    The samples form a closed subgroup (index addition mod N), so group-law
    checks are exact on samples.  Averages over the circle are realized as
    uniform quadrature, exact for trigonometric polynomials of degree < N;
    keep N >= 4*max_weight + 1 for every weight used with the model.
    """

    quadrature_order: int

    def __post_init__(self):
        if self.quadrature_order < 4:
            raise InvalidInputError("quadrature order must be at least 4")

    @property
    def order(self) -> int:
        return self.quadrature_order

    @property
    def identity(self) -> int:
        return 0

    def inverse(self, k: int) -> int:
        return (-k) % self.quadrature_order

    def compose(self, j: int, k: int) -> int:
        return (j + k) % self.quadrature_order

    @property
    def max_weight(self) -> int:
        return (self.quadrature_order - 1) // 4

    def angles(self) -> np.ndarray:
        n = self.quadrature_order
        return 2.0 * np.pi * np.arange(n) / n

    def weight_irrep(self, weight: int) -> IrrepDescriptor:
        if weight < 1:
            raise InvalidInputError("circle weights are positive integers")
        if weight > self.max_weight:
            raise InvalidInputError(
                f"weight {weight} exceeds quadrature capacity "
                f"(order {self.quadrature_order} supports weights <= {self.max_weight})"
            )
        chi = 2.0 * np.cos(weight * self.angles())
        return IrrepDescriptor(f"weight_{weight}", 2, chi, "C")

    @property
    def irreps(self) -> tuple[IrrepDescriptor, ...]:
        return tuple(self.weight_irrep(w) for w in range(1, self.max_weight + 1))

    def nontrivial_irreps(self) -> tuple[IrrepDescriptor, ...]:
        return self.irreps


GroupModel = FiniteGroupModel | CircleGroupModel


def same_group(a: GroupModel, b: GroupModel) -> bool:
    if a is b:
        return True
    if isinstance(a, CircleGroupModel) or isinstance(b, CircleGroupModel):
        return type(a) is type(b) and a.order == b.order
    return a.name == b.name and a.order == b.order


# ---------------------------------------------------------------------------
# preset groups and their real character tables
# ---------------------------------------------------------------------------


def _fr(vals) -> np.ndarray:
    return np.array([Fraction(v) for v in vals], dtype=object)


def cyclic_group(n: int) -> FiniteGroupModel:
    if n < 1:
        raise InvalidInputError("cyclic order must be positive")
    table = np.array([[(i + j) % n for j in range(n)] for i in range(n)])
    irreps = [IrrepDescriptor("trivial", 1, _fr([1] * n), "R")]
    if n % 2 == 0:
        irreps.append(
            IrrepDescriptor("sign", 1, _fr([(-1) ** j for j in range(n)]), "R")
        )
    for k in range(1, (n - 1) // 2 + 1):
        vals = [_cos2pi_exact(k * j, n) for j in range(n)]
        if all(v is not None for v in vals):
            chi = np.array([2 * v for v in vals], dtype=object)
        else:
            chi = 2.0 * np.cos(2.0 * np.pi * k * np.arange(n) / n)
        irreps.append(IrrepDescriptor(f"plane_{k}", 2, chi, "C"))
    names = tuple(f"r{j}" for j in range(n))
    return FiniteGroupModel(f"Z_{n}", table, tuple(irreps), names)


def dihedral_group(n: int) -> FiniteGroupModel:
    """Dihedral group of order 2n; element a + n*b encodes r^a s^b."""
    if n < 2:
        raise InvalidInputError("dihedral parameter must be at least 2")
    order = 2 * n

    def mul(x, y):
        a, b = x % n, x // n
        c, d = y % n, y // n
        # r^a s^b r^c s^d = r^(a + (-1)^b c) s^(b + d)
        return (a + (c if b == 0 else -c)) % n + n * ((b + d) % 2)

    table = np.array([[mul(x, y) for y in range(order)] for x in range(order)])

    def per_element(rot_val, ref_val):
        return [rot_val(x % n) if x < n else ref_val(x % n) for x in range(order)]

    irreps = [
        IrrepDescriptor("trivial", 1, _fr([1] * order), "R"),
        IrrepDescriptor(
            "reflection_sign", 1, _fr(per_element(lambda a: 1, lambda a: -1)), "R"
        ),
    ]
    if n % 2 == 0:
        irreps.append(
            IrrepDescriptor(
                "rotation_sign",
                1,
                _fr(per_element(lambda a: (-1) ** a, lambda a: (-1) ** a)),
                "R",
            )
        )
        irreps.append(
            IrrepDescriptor(
                "rotation_reflection_sign",
                1,
                _fr(per_element(lambda a: (-1) ** a, lambda a: -((-1) ** a))),
                "R",
            )
        )
        plane_max = n // 2 - 1
    else:
        plane_max = (n - 1) // 2
    for k in range(1, plane_max + 1):
        vals = [_cos2pi_exact(k * a, n) for a in range(n)]
        if all(v is not None for v in vals):
            chi = np.array([2 * v for v in vals] + [Fraction(0)] * n, dtype=object)
        else:
            chi = np.concatenate(
                [2.0 * np.cos(2.0 * np.pi * k * np.arange(n) / n), np.zeros(n)]
            )
        irreps.append(IrrepDescriptor(f"plane_{k}", 2, chi, "R"))
    names = tuple(
        (f"r{a}" if b == 0 else f"r{a}s") for b in range(2) for a in range(n)
    )
    return FiniteGroupModel(f"D_{n}", table, tuple(irreps), names)


def _perm_compose(p, q):
    """(p o q)(i) = p[q[i]]."""
    return tuple(p[q[i]] for i in range(len(p)))


def _perm_parity(p) -> int:
    seen = [False] * len(p)
    sign = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def symmetric_group(n: int) -> FiniteGroupModel:
    if n not in (2, 3, 4):
        raise InvalidInputError("symmetric-group presets cover n in {2, 3, 4}")
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    order = len(perms)
    table = np.array(
        [[index[_perm_compose(p, q)] for q in perms] for p in perms]
    )
    fix = [sum(1 for i in range(n) if p[i] == i) for p in perms]
    sgn = [_perm_parity(p) for p in perms]
    irreps = [IrrepDescriptor("trivial", 1, _fr([1] * order), "R")]
    if n >= 2:
        irreps.append(IrrepDescriptor("sign", 1, _fr(sgn), "R"))
    if n >= 3:
        irreps.append(
            IrrepDescriptor("standard", n - 1, _fr([f - 1 for f in fix]), "R")
        )
    if n == 4:
        irreps.append(
            IrrepDescriptor(
                "standard_sign", 3, _fr([(f - 1) * s for f, s in zip(fix, sgn)]), "R"
            )
        )
        # the 2-dim irrep factors through S_4 / V_4 ~ S_3
        cycle_type_chi = {(1, 1, 1, 1): 2, (2, 1, 1): 0, (2, 2): 2, (3, 1): -1, (4,): 0}
        chi2 = []
        for p in perms:
            seen = [False] * n
            lengths = []
            for i in range(n):
                if seen[i]:
                    continue
                j, ln = i, 0
                while not seen[j]:
                    seen[j] = True
                    j = p[j]
                    ln += 1
                lengths.append(ln)
            chi2.append(cycle_type_chi[tuple(sorted(lengths, reverse=True))])
        irreps.append(IrrepDescriptor("two_dim", 2, _fr(chi2), "R"))
    names = tuple(str(p) for p in perms)
    return FiniteGroupModel(f"S_{n}", table, tuple(irreps), names)


_QUAT_UNITS = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
_QUAT_VEC = {
    "1": (1, 0, 0, 0),
    "i": (0, 1, 0, 0),
    "j": (0, 0, 1, 0),
    "k": (0, 0, 0, 1),
}


def _quat_mul(a, b):
    a1, a2, a3, a4 = a
    b1, b2, b3, b4 = b
    return (
        a1 * b1 - a2 * b2 - a3 * b3 - a4 * b4,
        a1 * b2 + a2 * b1 + a3 * b4 - a4 * b3,
        a1 * b3 - a2 * b4 + a3 * b1 + a4 * b2,
        a1 * b4 + a2 * b3 - a3 * b2 + a4 * b1,
    )


def _quat_elements():
    out = []
    for u in _QUAT_UNITS:
        base = _QUAT_VEC[u.lstrip("-")]
        sign = -1 if u.startswith("-") else 1
        out.append(tuple(sign * c for c in base))
    return out


def quaternion_group() -> FiniteGroupModel:
    elems = _quat_elements()
    index = {e: i for i, e in enumerate(elems)}
    table = np.array(
        [[index[_quat_mul(a, b)] for b in elems] for a in elems]
    )
    # the three nontrivial 1-dim irreps factor through Q_8 / {+-1} = Z_2 x Z_2
    def through(kept: str):
        vals = []
        for u in _QUAT_UNITS:
            axis = u.lstrip("-")
            vals.append(1 if axis in ("1", kept) else -1)
        return _fr(vals)

    chi4 = _fr([4, -4, 0, 0, 0, 0, 0, 0])
    irreps = (
        IrrepDescriptor("trivial", 1, _fr([1] * 8), "R"),
        IrrepDescriptor("sign_i", 1, through("i"), "R"),
        IrrepDescriptor("sign_j", 1, through("j"), "R"),
        IrrepDescriptor("sign_k", 1, through("k"), "R"),
        IrrepDescriptor("four_dim", 4, chi4, "H"),
    )
    return FiniteGroupModel("Q_8", table, irreps, tuple(_QUAT_UNITS))


_PRESETS = {
    "Z_2": lambda: cyclic_group(2),
    "Z_3": lambda: cyclic_group(3),
    "Z_4": lambda: cyclic_group(4),
    "Z_6": lambda: cyclic_group(6),
    "S_3": lambda: symmetric_group(3),
    "S_4": lambda: symmetric_group(4),
    "Q_8": quaternion_group,
    "D_3": lambda: dihedral_group(3),
    "D_4": lambda: dihedral_group(4),
    "D_6": lambda: dihedral_group(6),
}


def preset_group(name: str) -> FiniteGroupModel:
    if name in _PRESETS:
        return _PRESETS[name]()
    if name.startswith("Z_"):
        return cyclic_group(int(name[2:]))
    if name.startswith("D_"):
        return dihedral_group(int(name[2:]))
    raise InvalidInputError(f"unknown group preset {name!r}")


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealRepresentation:
    """An orthogonal real representation: one d x d matrix per group element
    (per sample angle for the circle).  Exact mode stores Fraction entries."""

    group: GroupModel
    matrices: np.ndarray  # shape (order, d, d)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def exact(self) -> bool:
        return linalg.is_exact(self.matrices)

    def matrix(self, g: int) -> np.ndarray:
        return self.matrices[g]

    def inverse_matrix(self, g: int) -> np.ndarray:
        return self.matrices[self.group.inverse(g)]

    def validate(self, tol: float = TOL, full: bool = True) -> None:
        """Identity, orthogonality, and (optionally) the full group law."""
        d = self.dim
        ident = linalg.eye(d, self.exact)
        if not linalg.mat_eq(self.matrices[self.group.identity], ident, tol):
            raise InvalidInputError("action at the identity is not the identity matrix")
        for g in range(self.group.order):
            m = self.matrices[g]
            if not linalg.mat_eq(m.T @ m, ident, tol):
                raise InvalidInputError(f"action of element {g} is not orthogonal")
        if full:
            for g in range(self.group.order):
                for h in range(self.group.order):
                    prod = self.matrices[g] @ self.matrices[h]
                    if not linalg.mat_eq(prod, self.matrices[self.group.compose(g, h)], tol):
                        raise InvalidInputError(
                            f"group law fails at pair ({g}, {h})"
                        )


def character(rep: RealRepresentation) -> np.ndarray:
    """Trace of the action of each sampled/listed element."""
    return np.array([np.trace(rep.matrices[g]) for g in range(rep.group.order)])


def character_inner(group: GroupModel, chi1, chi2):
    """Averaged pairing (1/|G|) sum chi1(g) chi2(g) of real characters."""
    total = sum(chi1[g] * chi2[g] for g in range(group.order))
    if isinstance(total, (Fraction, int)):
        return Fraction(total, group.order)
    return total / group.order


def _average(rep: RealRepresentation, weights=None) -> np.ndarray:
    """(1/|G|) sum_g w(g) rho(g), exact in rational mode."""
    mats = rep.matrices
    n = rep.group.order
    if weights is None:
        acc = mats.sum(axis=0)
    else:
        acc = sum(weights[g] * mats[g] for g in range(n))
    if rep.exact:
        return acc * Fraction(1, n)
    return np.asarray(acc, dtype=float) / n


def fixed_projector(rep: RealRepresentation) -> np.ndarray:
    """Projector onto the fixed subspace: average of the action."""
    return _average(rep)


def isotypic_projector(rep: RealRepresentation, irrep: IrrepDescriptor) -> np.ndarray:
    """Character projector onto the isotypic component of ``irrep``.

    Raises InvalidInputError when the irrep's character is not indexed by the
    same group model (wrong length), or when exact projectors are requested
    from a float character.
    """
    chi = irrep.character
    if len(chi) != rep.group.order:
        raise InvalidInputError(
            "irrep does not belong to the representation's group model"
        )
    if rep.exact:
        if not isinstance(chi[0], (Fraction, int)):
            raise InvalidInputError(
                f"irrep {irrep.label!r} has no exact character; use float mode"
            )
        weights = np.array([Fraction(c) for c in chi], dtype=object)
        scale = Fraction(irrep.dim_V, irrep.endo_dim)
    else:
        weights = np.asarray(linalg.as_float(np.asarray(chi)), dtype=float)
        scale = irrep.dim_V / irrep.endo_dim
    return _average(rep, weights) * scale


def isotypic_rank(rep: RealRepresentation, irrep: IrrepDescriptor) -> int:
    """Rank of the isotypic component (trace of its projector)."""
    tr = np.trace(isotypic_projector(rep, irrep))
    if rep.exact:
        f = Fraction(tr)
        if f.denominator != 1:
            raise InvalidInputError("projector trace is not an integer; invalid data")
        return int(f)
    r = float(tr)
    if abs(r - round(r)) > 1e-6:
        raise InvalidInputError("projector trace is not close to an integer")
    return int(round(r))


def all_projectors(rep: RealRepresentation) -> dict[str, np.ndarray]:
    """Fixed projector plus one isotypic projector per nontrivial irrep."""
    out = {"fixed": fixed_projector(rep)}
    for ir in rep.group.nontrivial_irreps():
        out[ir.label] = isotypic_projector(rep, ir)
    return out


def conjugation_average(rep_w: RealRepresentation, rep_v: RealRepresentation,
                        raw: np.ndarray) -> np.ndarray:
    """avg_g rho_W(g) raw rho_V(g)^-1 - the equivariant part of a linear map."""
    if not same_group(rep_w.group, rep_v.group):
        raise InvalidInputError("representations live over different group models")
    n = rep_w.group.order
    acc = None
    for g in range(n):
        term = rep_w.matrices[g] @ raw @ rep_v.inverse_matrix(g)
        acc = term if acc is None else acc + term
    if linalg.is_exact(acc):
        return acc * Fraction(1, n)
    return acc / n


def hom_G_basis(rep_v: RealRepresentation, rep_w: RealRepresentation) -> list[np.ndarray]:
    """Basis of the space of equivariant linear maps V -> W.

    Obtained by averaging the full basis of raw matrix units; the returned
    maps are linearly independent and span the averaged space.
    """
    if not same_group(rep_v.group, rep_w.group):
        raise InvalidInputError("representations live over different group models")
    dv, dw = rep_v.dim, rep_w.dim
    exact = rep_v.exact and rep_w.exact
    n = rep_v.group.order
    inv_idx = [rep_v.group.inverse(g) for g in range(n)]
    candidates = []
    if exact:
        # rho_W(g) E_ab rho_V(g)^-1 is the outer product of column a of
        # rho_W(g) with row b of rho_V(g)^-1
        vinv = rep_v.matrices[inv_idx]
        for a in range(dw):
            for b in range(dv):
                acc = linalg.zeros((dw, dv), exact=True)
                for g in range(n):
                    acc = acc + np.outer(rep_w.matrices[g][:, a], vinv[g][b, :])
                candidates.append(acc * Fraction(1, n))
    else:
        wm = np.asarray(rep_w.matrices, dtype=float)
        vm = np.asarray(rep_v.matrices, dtype=float)[inv_idx].transpose(0, 2, 1)
        tensor = np.einsum("gia,gjb->iajb", wm, vm) / n
        for a in range(dw):
            for b in range(dv):
                candidates.append(tensor[:, a, :, b])
    flat = np.stack([c.reshape(-1) for c in candidates], axis=1)
    keep = linalg.independent_columns(flat)
    basis = [candidates[k] for k in keep]
    for m in basis:
        res = equivariance_residual(rep_v, rep_w, m)
        if (exact and res != 0) or (not exact and res > TOL):
            raise InvalidInputError("averaged map failed the equivariance check")
    return basis


def equivariance_residual(rep_v: RealRepresentation, rep_w: RealRepresentation,
                          m: np.ndarray):
    """max_g || rho_W(g) m - m rho_V(g) ||, exact or float."""
    worst = Fraction(0) if (rep_v.exact and rep_w.exact and linalg.is_exact(m)) else 0.0
    for g in range(rep_v.group.order):
        diff = rep_w.matrices[g] @ m - m @ rep_v.matrices[g]
        worst = max(worst, linalg.max_abs(diff))
    return worst


def endo_type(rep: RealRepresentation):
    """Classify End_G of an irreducible real representation as R, C or H.

    The commutant is computed by averaging a spanning set of matrix units;
    classification is by its real dimension 1, 2 or 4.  Reducible input
    raises InvalidInputError carrying a nontrivial invariant subspace.
    """
    _assert_irreducible(rep)
    basis = hom_G_basis(rep, rep)
    dim = len(basis)
    label = {1: "R", 2: "C", 4: "H"}.get(dim)
    if label is None:
        raise InvalidInputError(
            f"commutant dimension {dim} is not 1, 2 or 4; input is not irreducible"
        )
    return label, dim, basis


class ReducibleRepresentationError(InvalidInputError):
    """Raised by endo_type on reducible input; carries an invariant subspace."""

    def __init__(self, message, subspace):
        super().__init__(message)
        self.subspace = subspace


def _assert_irreducible(rep: RealRepresentation) -> None:
    projs = all_projectors(rep)
    ident = linalg.eye(rep.dim, rep.exact)
    hits = []
    for label, p in projs.items():
        if linalg.is_zero(p):
            continue
        if linalg.mat_eq(p, ident):
            hits.append(label)
        else:
            sub = linalg.column_space_basis(p)
            raise ReducibleRepresentationError(
                f"representation is reducible: isotypic component {label!r} is proper",
                sub,
            )
    if len(hits) != 1:
        raise InvalidInputError(
            "projector family inconsistent; group irrep table may be incomplete"
        )
    label = hits[0]
    dims = {ir.label: ir.dim_V for ir in rep.group.irreps}
    dim_v = 1 if label == "fixed" else dims[label]
    if rep.dim != dim_v:
        # isotypic with multiplicity: averaging a rank-one unit yields a
        # singular commutant element whose kernel is invariant
        for a in range(rep.dim):
            unit = linalg.zeros((rep.dim, rep.dim), rep.exact)
            one = Fraction(1) if rep.exact else 1.0
            unit[a, a] = one
            t = conjugation_average(rep, rep, unit)
            if linalg.is_zero(t):
                continue
            if linalg.rank(t) < rep.dim:
                raise ReducibleRepresentationError(
                    "representation is isotypic with multiplicity > 1",
                    linalg.nullspace(t),
                )
        raise ReducibleRepresentationError(
            "representation is isotypic with multiplicity > 1",
            None,
        )


# ---------------------------------------------------------------------------
# representation builders
# ---------------------------------------------------------------------------


def rep_from_matrices(group: GroupModel, matrices, exact: bool | None = None,
                      validate: bool = True) -> RealRepresentation:
    arr = np.array(matrices, dtype=object) if exact else np.asarray(matrices, dtype=float)
    if exact:
        flat = arr.reshape(-1)
        for i, v in enumerate(flat):
            if not isinstance(v, Fraction):
                flat[i] = Fraction(v)
        arr = flat.reshape(arr.shape)
    rep = RealRepresentation(group, arr)
    if validate:
        rep.validate(full=False)
    return rep


def permutation_rep(group: FiniteGroupModel, action: np.ndarray,
                    exact: bool = True) -> RealRepresentation:
    """Permutation representation from an action table (order x points)."""
    action = np.asarray(action)
    npts = action.shape[1]
    mats = []
    for g in range(group.order):
        m = np.zeros((npts, npts), dtype=object if exact else float)
        for x in range(npts):
            m[action[g, x], x] = Fraction(1) if exact else 1.0
        mats.append(m)
    arr = np.array(mats, dtype=object) if exact else np.asarray(mats, dtype=float)
    return RealRepresentation(group, arr)


def regular_rep(group: FiniteGroupModel, exact: bool = True) -> RealRepresentation:
    action = np.array(
        [[group.compose(g, x) for x in range(group.order)] for g in range(group.order)]
    )
    return permutation_rep(group, action, exact)


def rep_from_generators(group: FiniteGroupModel, generators, matrices,
                        exact: bool = True) -> RealRepresentation:
    """Representation from matrices on a generating set.

    Every group element is expressed as a word in the generators by
    breadth-first search over the multiplication table; elements not
    reachable make the input invalid.
    """
    generators = [int(g) for g in generators]
    if len(generators) != len(matrices):
        raise InvalidInputError("one matrix per generator is required")
    mats = [np.array(m, dtype=object) if exact else np.asarray(m, dtype=float)
            for m in matrices]
    if exact:
        mats = [linalg.frac_array(m) for m in mats]
    d = mats[0].shape[0]
    e = group.identity
    assigned = {e: linalg.eye(d, exact)}
    frontier = [e]
    while frontier:
        x = frontier.pop(0)
        for g, mg in zip(generators, mats):
            y = group.compose(g, x)
            if y not in assigned:
                assigned[y] = mg @ assigned[x]
                frontier.append(y)
    if len(assigned) != group.order:
        missing = sorted(set(range(group.order)) - set(assigned))
        raise InvalidInputError(
            f"generators do not generate the group; unreachable: {missing}"
        )
    stack = np.array([assigned[g] for g in range(group.order)],
                     dtype=object if exact else float)
    rep = RealRepresentation(group, stack)
    rep.validate(full=True)
    return rep


def one_dim_rep(group: FiniteGroupModel, values, exact: bool = True) -> RealRepresentation:
    mats = [[[Fraction(values[g]) if exact else float(values[g])]] for g in range(group.order)]
    return rep_from_matrices(group, mats, exact=exact, validate=False)


def direct_sum(*reps: RealRepresentation) -> RealRepresentation:
    group = reps[0].group
    exact = all(r.exact for r in reps)
    order = group.order
    total = sum(r.dim for r in reps)
    mats = np.array(
        [linalg.block_diag([r.matrices[g] for r in reps], exact) for g in range(order)],
        dtype=object if exact else float,
    )
    return RealRepresentation(group, mats)


def conjugate_rep(rep: RealRepresentation, q: np.ndarray) -> RealRepresentation:
    """Conjugate by an orthogonal matrix q: rho'(g) = q rho(g) q^T."""
    exact = rep.exact and linalg.is_exact(q)
    qt = q.T
    mats = np.array(
        [q @ rep.matrices[g] @ qt for g in range(rep.group.order)],
        dtype=object if exact else float,
    )
    return RealRepresentation(rep.group, mats)


def circle_weight_rep(circle: CircleGroupModel, weights, fixed_dim: int = 0) -> RealRepresentation:
    """Block-diagonal circle representation: one rotation plane per weight,
    plus an optional fixed block."""
    for w in weights:
        if w > circle.max_weight:
            raise InvalidInputError(
                f"weight {w} exceeds quadrature capacity {circle.max_weight}"
            )
    th = circle.angles()
    dim = 2 * len(weights) + fixed_dim
    mats = np.zeros((circle.order, dim, dim))
    for k in range(circle.order):
        blocks = []
        for w in weights:
            c, s = np.cos(w * th[k]), np.sin(w * th[k])
            blocks.append(np.array([[c, -s], [s, c]]))
        if fixed_dim:
            blocks.append(np.eye(fixed_dim))
        mats[k] = linalg.block_diag(blocks, exact=False)
    return RealRepresentation(circle, mats)


def _block_catalog(group: FiniteGroupModel) -> dict[str, RealRepresentation]:
    """Integer-orthogonal building blocks available for a preset group."""
    name = group.name
    blocks: dict[str, RealRepresentation] = {
        "trivial": one_dim_rep(group, [1] * group.order)
    }
    if name.startswith("Z_"):
        n = group.order
        blocks["shift"] = permutation_rep(
            group, np.array([[(g + x) % n for x in range(n)] for g in range(n)])
        )
        if n % 2 == 0:
            blocks["sign"] = one_dim_rep(group, [(-1) ** g for g in range(n)])
        if n == 4:
            rot = [
                [[1, 0], [0, 1]],
                [[0, -1], [1, 0]],
                [[-1, 0], [0, -1]],
                [[0, 1], [-1, 0]],
            ]
            blocks["rot90"] = rep_from_matrices(group, rot, exact=True, validate=False)
    elif name.startswith("S_"):
        n = int(name[2:])
        perms = sorted(itertools.permutations(range(n)))
        act = np.array([[p[x] for x in range(n)] for p in perms])
        blocks["natural"] = permutation_rep(group, act)
        sgn = [_perm_parity(p) for p in perms]
        blocks["sign"] = one_dim_rep(group, sgn)
        if n == 4:
            nat = blocks["natural"]
            mats = np.array(
                [nat.matrices[g] * Fraction(sgn[g]) for g in range(group.order)],
                dtype=object,
            )
            blocks["natural_sign"] = RealRepresentation(group, mats)
            pairs = list(itertools.combinations(range(n), 2))
            pidx = {p: i for i, p in enumerate(pairs)}
            act2 = np.array(
                [
                    [pidx[tuple(sorted((p[a], p[b])))] for (a, b) in pairs]
                    for p in perms
                ]
            )
            blocks["pairs"] = permutation_rep(group, act2)
    elif name == "Q_8":
        elems = _quat_elements()
        mats = []
        for q in elems:
            cols = [_quat_mul(q, _QUAT_VEC[u]) for u in ("1", "i", "j", "k")]
            mats.append([[Fraction(cols[c][r]) for c in range(4)] for r in range(4)])
        blocks["left"] = rep_from_matrices(group, mats, exact=True, validate=False)
        for axis in ("i", "j", "k"):
            ir = {x.label: x for x in group.irreps}[f"sign_{axis}"]
            blocks[f"sign_{axis}"] = one_dim_rep(group, [int(c) for c in ir.character])
    elif name.startswith("D_"):
        n = group.order // 2
        act = np.zeros((group.order, n), dtype=int)
        for x in range(group.order):
            a, b = x % n, x // n
            for v in range(n):
                img = (a + v) % n if b == 0 else (a - v) % n
                act[x, v] = img
        blocks["vertices"] = permutation_rep(group, act)
        for ir in group.irreps:
            if ir.dim_V == 1 and ir.label != "trivial":
                blocks[ir.label] = one_dim_rep(group, [int(c) for c in ir.character])
        blocks["regular"] = regular_rep(group)
    return blocks


def random_rep(group: GroupModel, rng: np.random.Generator, max_dim: int = 12,
               exact: bool = True) -> RealRepresentation:
    """Seeded random orthogonal representation.

    Finite groups: a random multiset of integer-orthogonal building blocks,
    conjugated by a random signed permutation (exact mode) or by a random
    orthogonal matrix (float mode).  The circle: random weights plus a fixed
    block, conjugated orthogonally (float only).
    """
    if isinstance(group, CircleGroupModel):
        n_planes = int(rng.integers(1, max(2, max_dim // 2)))
        weights = [int(rng.integers(1, group.max_weight + 1)) for _ in range(n_planes)]
        fixed_dim = int(rng.integers(0, max(1, max_dim - 2 * n_planes) + 1))
        rep = circle_weight_rep(group, weights, fixed_dim)
        q = linalg.random_orthogonal(rep.dim, rng)
        return conjugate_rep(rep, q)
    catalog = _block_catalog(group)
    chosen = [catalog[n] for n in choose_blocks(group, rng, max_dim)]
    rep = direct_sum(*chosen) if len(chosen) > 1 else chosen[0]
    if exact:
        q = linalg.random_signed_permutation(rep.dim, rng)
        return conjugate_rep(rep, q)
    rep_f = RealRepresentation(group, linalg.as_float(rep.matrices))
    q = linalg.random_orthogonal(rep.dim, rng)
    return conjugate_rep(rep_f, q)


def choose_blocks(group: FiniteGroupModel, rng: np.random.Generator,
                  max_dim: int = 12) -> list[str]:
    """Seeded random multiset of building-block names with total dim <= max."""
    catalog = _block_catalog(group)
    names = sorted(catalog)
    chosen: list[str] = []
    total = 0
    while True:
        options = [n for n in names if total + catalog[n].dim <= max_dim]
        if not options or (chosen and rng.random() < 0.25):
            break
        pick = options[int(rng.integers(0, len(options)))]
        chosen.append(pick)
        total += catalog[pick].dim
    return chosen

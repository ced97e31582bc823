"""Novikov-coefficient chain complexes from signed moduli-count tables.

Scalars are truncated Novikov sums: finitely many terms f_A q^A over a
homology lattice carrying linear functionals omega (rational) and c1
(integer), with q^A graded by 2 c1(A).  All arithmetic is exact rational
below an explicit omega-cutoff; inverting a scalar requires a unique
omega-minimal term, and elimination pivots must be certifiable units at the
working cutoff.

Count tables are indexed by (x, y, A) with the derived Fredholm index

    ind(x, y, A) = ind y - ind x + 2 c1(A) - 1,

and entries may only sit where H(y) - H(x) + omega(A) > 0.  The differential
collects the index-0 counts, delta y = sum count(x, y, A) q^A x, and raises
total grading by one.  For autonomous circle-symmetric data, rotating the
circle coordinate forces index-0 moduli with A != 0 to be empty and the
A = 0 counts to agree with the Morse counts; the reduction below implements
exactly that replacement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import IndeterminateError, InvalidInputError

# ---------------------------------------------------------------------------
# the homology lattice and Novikov scalars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomologyLattice:
    """Finite-rank lattice with linear omega (rational) and c1 (integer)."""

    rank: int
    omega: tuple
    c1: tuple

    def __post_init__(self):
        if len(self.omega) != self.rank or len(self.c1) != self.rank:
            raise InvalidInputError("omega and c1 must have one value per generator")
        object.__setattr__(self, "omega", tuple(Fraction(w) for w in self.omega))
        object.__setattr__(self, "c1", tuple(int(c) for c in self.c1))

    def check_point(self, a) -> tuple:
        a = tuple(int(k) for k in a)
        if len(a) != self.rank:
            raise InvalidInputError(f"lattice point {a} has wrong rank")
        return a

    def omega_of(self, a) -> Fraction:
        return sum((Fraction(k) * w for k, w in zip(a, self.omega)), Fraction(0))

    def c1_of(self, a) -> int:
        return sum(k * c for k, c in zip(a, self.c1))

    @property
    def zero(self) -> tuple:
        return (0,) * self.rank


@dataclass
class NovikovElement:
    """Finite sum of terms f_A q^A, exact below the energy cutoff.

    ``cutoff`` is the guaranteed-precision level: terms with omega above it
    are dropped and results are only claimed modulo such terms.  ``None``
    means no truncation happened.
    """

    lattice: HomologyLattice
    terms: dict
    cutoff: Fraction | None = None

    def __post_init__(self):
        clean = {}
        for a, coeff in self.terms.items():
            a = self.lattice.check_point(a)
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            if self.cutoff is not None and self.lattice.omega_of(a) > self.cutoff:
                continue
            clean[a] = clean.get(a, Fraction(0)) + coeff
        self.terms = {a: c for a, c in clean.items() if c != 0}

    @staticmethod
    def zero(lattice, cutoff=None) -> "NovikovElement":
        return NovikovElement(lattice, {}, cutoff)

    @staticmethod
    def unit(lattice, cutoff=None) -> "NovikovElement":
        return NovikovElement(lattice, {lattice.zero: Fraction(1)}, cutoff)

    @staticmethod
    def monomial(lattice, a, coeff=1, cutoff=None) -> "NovikovElement":
        return NovikovElement(lattice, {tuple(a): Fraction(coeff)}, cutoff)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self):
        """2 c1(A), when all terms agree (homogeneous); None otherwise."""
        degs = {2 * self.lattice.c1_of(a) for a in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def min_valuation(self):
        if not self.terms:
            return None
        return min(self.lattice.omega_of(a) for a in self.terms)

    def leading(self):
        """(point, coefficient) of the unique omega-minimal term.

        Raises IndeterminateError when the minimum is attained more than
        once: such an element cannot be certified invertible by truncated
        arithmetic.
        """
        val = self.min_valuation()
        hits = [a for a in self.terms if self.lattice.omega_of(a) == val]
        if len(hits) != 1:
            raise IndeterminateError(
                f"no unique omega-minimal term (tied at omega = {val})"
            )
        return hits[0], self.terms[hits[0]]

    def _merged_cutoff(self, other):
        if self.cutoff is None:
            return other.cutoff
        if other.cutoff is None:
            return self.cutoff
        return min(self.cutoff, other.cutoff)

    def __add__(self, other):
        merged = dict(self.terms)
        for a, c in other.terms.items():
            merged[a] = merged.get(a, Fraction(0)) + c
        return NovikovElement(self.lattice, merged, self._merged_cutoff(other))

    def __neg__(self):
        return NovikovElement(
            self.lattice, {a: -c for a, c in self.terms.items()}, self.cutoff
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NovikovElement(
                self.lattice,
                {a: c * other for a, c in self.terms.items()},
                self.cutoff,
            )
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return NovikovElement(self.lattice, out, self._merged_cutoff(other))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, NovikovElement):
            return NotImplemented
        return self.terms == other.terms

    def invert_truncated(self, cutoff) -> "NovikovElement":
        """Geometric-series inverse: self * result = 1 modulo omega > cutoff.

        A leading term of negative valuation v pulls tail errors down by v,
        so the series is computed to the extended precision cutoff - min(0, v)
        and the result carries that extended cutoff.
        """
        if self.is_zero():
            raise InvalidInputError("cannot invert the zero Novikov element")
        cutoff = Fraction(cutoff)
        lead_a, lead_c = self.leading()
        lead_val = self.lattice.omega_of(lead_a)
        ext = cutoff + max(Fraction(0), -lead_val)
        neg_a = tuple(-k for k in lead_a)
        # x := 1 - lead^{-1} * self has strictly positive valuation
        lead_inv = NovikovElement(
            self.lattice, {neg_a: Fraction(1) / lead_c}, None
        )
        x = NovikovElement.unit(self.lattice) - (lead_inv * self)
        if not x.is_zero() and x.min_valuation() <= 0:
            raise IndeterminateError(
                "element has non-leading terms of non-positive relative energy"
            )
        acc_cutoff = ext + lead_val
        acc = NovikovElement.unit(self.lattice, acc_cutoff)
        power = NovikovElement.unit(self.lattice, acc_cutoff)
        while not power.is_zero() and not x.is_zero():
            power = NovikovElement(self.lattice, (power * x).terms, acc_cutoff)
            if power.is_zero():
                break
            acc = acc + power
        # shift by the leading valuation without intermediate truncation,
        # then cut at the extended precision
        raw = lead_inv * NovikovElement(self.lattice, acc.terms, None)
        return NovikovElement(self.lattice, raw.terms, ext)


def novikov_add(a: NovikovElement, b: NovikovElement) -> NovikovElement:
    return a + b


def novikov_mul(a: NovikovElement, b: NovikovElement) -> NovikovElement:
    return a * b


def novikov_invert_truncated(a: NovikovElement, cutoff) -> NovikovElement:
    return a.invert_truncated(cutoff)


# ---------------------------------------------------------------------------
# generators and count tables
# ---------------------------------------------------------------------------


@dataclass
class GeneratorSet:
    """Critical points with Morse indices and critical values.

    Self-indexing is required: H(x) > H(y) exactly when ind x > ind y.
    Gradings: Morse |x| = 2n - ind x, Floer mu(x, 0) = n - ind x.
    """

    names: tuple
    morse_index: dict
    half_dim: int
    crit_values: dict

    def __post_init__(self):
        self.names = tuple(self.names)
        for x in self.names:
            if x not in self.morse_index or x not in self.crit_values:
                raise InvalidInputError(f"generator {x!r} missing index or value")
        for x in self.names:
            for y in self.names:
                hx, hy = Fraction(self.crit_values[x]), Fraction(self.crit_values[y])
                ix, iy = self.morse_index[x], self.morse_index[y]
                if (hx > hy) != (ix > iy):
                    raise InvalidInputError(
                        f"not self-indexing at pair ({x!r}, {y!r})"
                    )

    def ind(self, x) -> int:
        return self.morse_index[x]

    def morse_grading(self, x) -> int:
        return 2 * self.half_dim - self.morse_index[x]

    def floer_grading(self, x) -> int:
        return self.half_dim - self.morse_index[x]


@dataclass
class ModuliCountTable:
    """Signed moduli counts indexed by (x, y, A)."""

    lattice: HomologyLattice
    counts: dict

    def __post_init__(self):
        clean = {}
        for (x, y, a), c in self.counts.items():
            c = int(c)
            if c != 0:
                clean[(x, y, self.lattice.check_point(a))] = c
        self.counts = clean

    def derived_index(self, gens: GeneratorSet, x, y, a) -> int:
        return gens.ind(y) - gens.ind(x) + 2 * self.lattice.c1_of(a) - 1

    def validate(self, gens: GeneratorSet) -> None:
        """Entries may only sit where the energy H(y) - H(x) + omega(A) is
        positive."""
        for (x, y, a) in self.counts:
            energy = (
                Fraction(gens.crit_values[y])
                - Fraction(gens.crit_values[x])
                + self.lattice.omega_of(a)
            )
            if energy <= 0:
                raise InvalidInputError(
                    f"count at ({x!r}, {y!r}, {a}) has non-positive energy {energy}"
                )

    def restrict_index(self, gens: GeneratorSet, index: int) -> "ModuliCountTable":
        kept = {
            key: c
            for key, c in self.counts.items()
            if self.derived_index(gens, *key) == index
        }
        return ModuliCountTable(self.lattice, kept)


def autonomous_reduce(counts: ModuliCountTable, gens: GeneratorSet,
                      morse_counts: dict) -> ModuliCountTable:
    """Circle-rotation reduction of index-0 counts for autonomous data.

    Index-0 entries with A != 0 are zeroed (the rotation action forces the
    moduli empty); A = 0 entries are replaced by the supplied Morse counts.
    Entries of other index are untouched.  Idempotent.
    """
    lattice = counts.lattice
    zero = lattice.zero
    out = {}
    for key, c in counts.counts.items():
        x, y, a = key
        if counts.derived_index(gens, x, y, a) == 0:
            continue  # rebuilt below from the Morse table
        out[key] = c
    for (x, y), c in morse_counts.items():
        if int(c) == 0:
            continue
        key = (x, y, zero)
        if counts.derived_index(gens, x, y, zero) != 0:
            raise InvalidInputError(
                f"Morse count at ({x!r}, {y!r}) does not sit in the index-0 slot"
            )
        out[key] = int(c)
    return ModuliCountTable(lattice, out)


# ---------------------------------------------------------------------------
# the differential
# ---------------------------------------------------------------------------


@dataclass
class Differential:
    """Lambda-matrix of the differential: entries[(x, y)] is the coefficient
    of x in delta y."""

    gens: GeneratorSet
    lattice: HomologyLattice
    entries: dict
    cutoff: Fraction | None = None

    def entry(self, x, y) -> NovikovElement:
        return self.entries.get(
            (x, y), NovikovElement.zero(self.lattice, self.cutoff)
        )


def build_differential(gens: GeneratorSet, counts: ModuliCountTable,
                       cutoff=None) -> Differential:
    """delta y = sum over (x, A) of count(x, y, A) q^A x.

    The table must already be restricted to the index-0 slot; a nonzero
    count of a different derived index is invalid input.  Every nonzero
    entry raises total grading by exactly one (checked).
    """
    counts.validate(gens)
    cutoff = Fraction(cutoff) if cutoff is not None else None
    entries: dict = {}
    for (x, y, a), c in counts.counts.items():
        idx = counts.derived_index(gens, x, y, a)
        if idx != 0:
            raise InvalidInputError(
                f"count at ({x!r}, {y!r}, {a}) has derived index {idx} "
                "in the index-0 slot"
            )
        term = NovikovElement.monomial(counts.lattice, a, c, cutoff)
        entries[(x, y)] = entries.get(
            (x, y), NovikovElement.zero(counts.lattice, cutoff)
        ) + term
    for (x, y), val in entries.items():
        if val.is_zero():
            continue
        deg = val.degree()
        if deg is None:
            raise InvalidInputError(
                f"entry ({x!r}, {y!r}) is not homogeneous in the q-grading"
            )
        shift = deg + gens.floer_grading(x) - gens.floer_grading(y)
        if shift != 1:
            raise InvalidInputError(
                f"entry ({x!r}, {y!r}) raises grading by {shift}, not 1"
            )
    return Differential(gens, counts.lattice, entries, cutoff)


@dataclass
class DSquaredReport:
    ok: bool
    first_failure: tuple | None = None
    defect: NovikovElement | None = None


def check_d_squared(delta: Differential) -> DSquaredReport:
    """delta o delta = 0 as Lambda-matrices, exact below the cutoff."""
    gens = delta.gens.names
    for z in gens:
        for x in gens:
            acc = NovikovElement.zero(delta.lattice, delta.cutoff)
            for y in gens:
                a = delta.entry(x, y)
                b = delta.entry(y, z)
                if a.is_zero() or b.is_zero():
                    continue
                acc = acc + a * b
            if not acc.is_zero():
                return DSquaredReport(False, (x, z), acc)
    return DSquaredReport(True)


# ---------------------------------------------------------------------------
# coherence of boundary strata
# ---------------------------------------------------------------------------


@dataclass
class CoherenceReport:
    ok: bool
    stratum_failures: list = field(default_factory=list)
    aggregate_failures: list = field(default_factory=list)


def coherence_validate(counts: ModuliCountTable, gens: GeneratorSet,
                       strata: dict) -> CoherenceReport:
    """Validate declared boundary strata of index-1 moduli.

    ``strata`` maps each index-1 triple (x, z, A) to a list of records
    {"through": y, "a1": A1, "a2": A2, "declared": int}; every index-1
    entry of the table must be labeled (missing labels are invalid input).
    Per stratum the declared contribution must equal the signed product of
    the two index-0 factor counts, the classes must satisfy A1 + A2 = A,
    and per triple the declared total must equal the delta-squared
    coefficient computed from the index-0 table.
    """
    index1 = counts.restrict_index(gens, 1)
    index0 = counts.restrict_index(gens, 0)
    for key in index1.counts:
        if key not in strata:
            raise InvalidInputError(f"index-1 entry {key} has no stratum label")
    report = CoherenceReport(True)
    lattice = counts.lattice
    for (x, z, a), records in strata.items():
        declared_total = 0
        for rec in records:
            y = rec["through"]
            a1 = lattice.check_point(rec["a1"])
            a2 = lattice.check_point(rec["a2"])
            declared = int(rec["declared"])
            if tuple(p + q for p, q in zip(a1, a2)) != lattice.check_point(a):
                report.ok = False
                report.stratum_failures.append(
                    {"pair": (x, z, a), "through": y, "reason": "class bookkeeping",
                     "a1": a1, "a2": a2}
                )
                continue
            product = index0.counts.get((x, y, a1), 0) * index0.counts.get(
                (y, z, a2), 0
            )
            if product != declared:
                report.ok = False
                report.stratum_failures.append(
                    {"pair": (x, z, a), "through": y,
                     "reason": "declared != product",
                     "declared": declared, "product": product}
                )
            declared_total += declared
        dsq = 0
        for (x0, y0, a1), cnt1 in index0.counts.items():
            if x0 != x:
                continue
            for (y1, z1, a2), cnt2 in index0.counts.items():
                if y1 != y0 or z1 != z:
                    continue
                if tuple(p + q for p, q in zip(a1, a2)) == lattice.check_point(a):
                    dsq += cnt1 * cnt2
        if declared_total != dsq:
            report.ok = False
            report.aggregate_failures.append(
                {"pair": (x, z, a), "declared_total": declared_total,
                 "delta_squared": dsq}
            )
    return report


# ---------------------------------------------------------------------------
# cohomology ranks over the Novikov field
# ---------------------------------------------------------------------------


def _novikov_matrix_rank(rows: list, cutoff) -> int:
    """Rank over the Novikov field by Gaussian elimination with
    minimal-valuation pivoting and truncated inversion.

    ``rows`` is a list of lists of NovikovElement.  An elimination step
    whose only available pivots lack a certifiable unit (no unique minimal
    term at this cutoff) raises IndeterminateError naming the entry.
    """
    if not rows or not rows[0]:
        return 0
    work = [list(r) for r in rows]
    n_rows, n_cols = len(work), len(work[0])
    rank = 0
    used_rows: set = set()
    for _ in range(min(n_rows, n_cols)):
        pivot = None
        pivot_val = None
        for i in range(n_rows):
            if i in used_rows:
                continue
            for j in range(n_cols):
                e = work[i][j]
                if e.is_zero():
                    continue
                v = e.min_valuation()
                if pivot is None or v < pivot_val:
                    pivot, pivot_val = (i, j), v
        if pivot is None:
            break
        pi, pj = pivot
        try:
            inv = work[pi][pj].invert_truncated(cutoff)
        except IndeterminateError as exc:
            raise IndeterminateError(
                f"cannot certify pivot at row {pi}, column {pj}: {exc}"
            ) from None
        for i in range(n_rows):
            if i == pi or i in used_rows:
                continue
            factor = work[i][pj] * inv
            if factor.is_zero():
                continue
            for j in range(n_cols):
                work[i][j] = work[i][j] - factor * work[pi][j]
        used_rows.add(pi)
        rank += 1
    return rank


def cohomology_rank(delta: Differential, cutoff=None) -> dict:
    """Graded ranks of H(delta) over the Novikov field, keyed by Morse index.

    Requires delta^2 = 0.  A nonzero entry (x, y) connects ind x = ind y - 1
    (entries of nonzero q-degree would make the generator grading periodic;
    they are rejected).  delta sends index-d generators to index-(d-1)
    sources, so rank H_d = #generators(d) - rank(delta_d) - rank(delta_{d+1}).
    """
    cutoff = Fraction(cutoff) if cutoff is not None else delta.cutoff
    if cutoff is None:
        cutoff = Fraction(10**6)
    sq = check_d_squared(delta)
    if not sq.ok:
        raise InvalidInputError(
            f"differential does not square to zero at pair {sq.first_failure}"
        )
    gens = delta.gens
    for (x, y), val in delta.entries.items():
        if not val.is_zero() and gens.ind(x) != gens.ind(y) - 1:
            raise InvalidInputError(
                f"entry ({x!r}, {y!r}) connects non-adjacent Morse indices; "
                "graded ranks are defined for q-degree-zero differentials"
            )
    degrees = sorted({gens.ind(x) for x in gens.names})
    by_degree = {d: [x for x in gens.names if gens.ind(x) == d] for d in degrees}
    rank_from = {}
    for d in degrees:
        sources = by_degree.get(d, [])
        targets = by_degree.get(d - 1, [])
        rows = [[delta.entry(x, y) for y in sources] for x in targets]
        rank_from[d] = _novikov_matrix_rank(rows, cutoff) if sources and targets else 0
    out = {}
    for d in degrees:
        out[d] = len(by_degree[d]) - rank_from.get(d, 0) - rank_from.get(d + 1, 0)
    return out


def betti_sum(ranks: dict) -> int:
    return sum(ranks.values())

"""Equivariant transversality calculus near a fixed locus.

The linearization of an equivariant section at a fixed-locus zero splits by
Schur's lemma into a fixed block T M^G -> E^G and one equivariant block per
isotypic type; transversality is surjectivity of every block.  Equivariant
maps between isotypic components are matrices over the endomorphism division
ring (R, C or H), and the non-surjective ones form a determinantal variety:
with n and m the source/target ranks in End-units and d the real dimension
of the ring, its real codimension is (n - m + 1) * d, the singular part
sitting (n - m + 3) * d deeper inside it.

The pointwise index condition

    ind s^G < (ind D^lambda / dim V^lambda + 1) * d        for all lambda

guarantees that generic equivariant perturbations built from the equivariant
hom space reach surjectivity; the constructor below samples them with a
seeded budget and certifies surjectivity by smallest singular value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from . import bundles, linalg, reps
from .errors import InvalidInputError, ObstructionError, ResampleFailureError

SV_THRESHOLD = 1e-8
RETRY_BUDGET = 64


# ---------------------------------------------------------------------------
# linearization splitting
# ---------------------------------------------------------------------------


@dataclass
class LinearizationSplit:
    """Blocks of an equivariant linearization at one fixed-locus point.

    ``fixed_block`` maps the fixed tangent space to the fixed fiber part;
    ``lambda_blocks[label]`` is the equivariant block between the lambda
    components of the normal and fiber spaces.  Fredholm indices: the fixed
    index is dim M^G - rank E^G, a lambda index is (n - m) * dim V.
    """

    fixed_block: np.ndarray
    lambda_blocks: dict
    dim_v: dict
    endo_dim: dict

    @property
    def fixed_index(self) -> int:
        return self.fixed_block.shape[1] - self.fixed_block.shape[0]

    def lambda_real_index(self, label: str) -> int:
        blk = self.lambda_blocks[label]
        return blk.shape[1] - blk.shape[0]

    def lambda_unit_index(self, label: str) -> int:
        return self.lambda_real_index(label) // self.dim_v[label]

    def labels(self):
        return sorted(self.lambda_blocks)


def split_linearization(full: np.ndarray,
                        domain_rep: reps.RealRepresentation,
                        codomain_rep: reps.RealRepresentation,
                        tol: float = 1e-10) -> LinearizationSplit:
    """Split a full equivariant matrix into its fixed and isotypic blocks.

    The matrix maps the domain representation to the codomain representation
    (rows = codomain).  Cross blocks between distinct isotypic components
    must vanish by Schur's lemma; residuals above tolerance report the
    offending group element and commutator norm.
    """
    if not reps.same_group(domain_rep.group, codomain_rep.group):
        raise InvalidInputError("domain and codomain live over different groups")
    group = domain_rep.group
    exact = domain_rep.exact and codomain_rep.exact and linalg.is_exact(full)
    worst = None
    for g in range(group.order):
        comm = codomain_rep.matrices[g] @ full - full @ domain_rep.matrices[g]
        r = linalg.max_abs(comm)
        if worst is None or r > worst[0]:
            worst = (r, g)
    bad = (worst[0] != 0) if exact else (float(worst[0]) > tol)
    if bad:
        raise InvalidInputError(
            "linearization is not equivariant: max commutator norm "
            f"{float(worst[0]):.3e} at element {worst[1]}"
        )
    dom_projs = reps.all_projectors(domain_rep)
    cod_projs = reps.all_projectors(codomain_rep)
    labels = sorted(set(dom_projs) | set(cod_projs))
    dom_bases = {}
    cod_bases = {}
    for label in labels:
        dom_bases[label] = _component_basis(dom_projs.get(label), domain_rep.dim, exact)
        cod_bases[label] = _component_basis(cod_projs.get(label), codomain_rep.dim, exact)
    # certify that cross blocks between distinct components vanish
    for la in labels:
        for lb in labels:
            if la == lb:
                continue
            ca, db = cod_bases[la], dom_bases[lb]
            if ca.shape[1] == 0 or db.shape[1] == 0:
                continue
            cross = ca.T @ linalg.as_float(full) @ db if not exact else ca.T @ full @ db
            if not linalg.is_zero(cross, tol):
                raise InvalidInputError(
                    f"cross block between components {la!r} and {lb!r} "
                    "does not vanish"
                )
    dims = {ir.label: ir.dim_V for ir in group.irreps}
    endos = {ir.label: ir.endo_dim for ir in group.irreps}
    fixed = _compress(full, cod_bases.get("fixed"), dom_bases.get("fixed"), exact)
    lam = {}
    dim_v = {}
    endo = {}
    for label in labels:
        if label == "fixed":
            continue
        blk = _compress(full, cod_bases[label], dom_bases[label], exact)
        if blk.shape[0] == 0 and blk.shape[1] == 0:
            continue
        lam[label] = blk
        dim_v[label] = dims[label]
        endo[label] = endos[label]
    return LinearizationSplit(fixed, lam, dim_v, endo)


def _component_basis(projector, dim, exact):
    if projector is None:
        return linalg.zeros((dim, 0), exact=False) if not exact else linalg.zeros((dim, 0), True)
    if exact:
        return linalg.column_space_basis(projector)
    return linalg.orthonormal_columns(linalg.as_float(projector))


def _compress(full, cod_basis, dom_basis, exact):
    if cod_basis is None or dom_basis is None or cod_basis.shape[1] == 0 or dom_basis.shape[1] == 0:
        rows = 0 if cod_basis is None else cod_basis.shape[1]
        cols = 0 if dom_basis is None else dom_basis.shape[1]
        return np.zeros((rows, cols))
    if exact:
        gram = linalg.inv(cod_basis.T @ cod_basis)
        return gram @ cod_basis.T @ full @ dom_basis
    return cod_basis.T @ linalg.as_float(full) @ dom_basis


# ---------------------------------------------------------------------------
# indices and determinantal codimensions
# ---------------------------------------------------------------------------


def lambda_index(block: np.ndarray, irrep: reps.IrrepDescriptor) -> tuple[int, int]:
    """(real index, End-unit index) of an equivariant block (V^n -> V^m)."""
    rows, cols = block.shape
    dv = irrep.dim_V
    if rows % dv or cols % dv:
        raise InvalidInputError(
            f"block shape {block.shape} is not a multiple of dim V = {dv}"
        )
    n_units = cols // dv
    m_units = rows // dv
    return ((n_units - m_units) * dv, n_units - m_units)


@dataclass(frozen=True)
class SingularStratumSpec:
    """Parameters of the non-surjective determinantal stratum in the space
    of equivariant maps (V^n -> V^m over a division ring of real dim d)."""

    label: str
    n: int
    m: int
    endo_dim: int

    @property
    def codim(self) -> int:
        if self.n < self.m:
            return 0  # every map fails surjectivity; the stratum is everything
        return (self.n - self.m + 1) * self.endo_dim

    @property
    def singular_codim(self) -> int:
        if self.n < self.m:
            return 0
        return (self.n - self.m + 3) * self.endo_dim


def singular_codim(spec: SingularStratumSpec) -> tuple[int, int]:
    """(codim of the stratum in Hom, codim of its singularities inside it)."""
    return spec.codim, spec.singular_codim


def determinantal_dimension_oracle(n: int, m: int, rank: int) -> int:
    """Dimension (in End-units) of {maps D^n -> D^m of rank <= rank},
    computed by fibering over the row-space Grassmannian.

    A rank-<= r map factors through an r-dimensional row space R in D^n:
    Gr(r, n) contributes r*(n-r), the maps D^m <- with prescribed row space
    within R contribute m*r.  Multiply by d for real dimensions.
    """
    if rank < 0:
        return -1  # empty stratum
    r = min(rank, m, n)
    return r * (n - r) + m * r


def determinantal_dimension_oracle_columns(n: int, m: int, rank: int) -> int:
    """Same count fibering over the column-space Grassmannian in D^m."""
    if rank < 0:
        return -1
    r = min(rank, m, n)
    return r * (m - r) + n * r


# ---------------------------------------------------------------------------
# pointwise conditions
# ---------------------------------------------------------------------------


def check_pointwise_condition(split: LinearizationSplit) -> dict:
    """ind s^G < (ind D^lambda / dim V + 1) * d, per lambda with rank > 0."""
    out = {}
    for label in split.labels():
        blk = split.lambda_blocks[label]
        if blk.shape[0] == 0:
            continue  # rank E^lambda = 0: no condition
        rhs = (split.lambda_unit_index(label) + 1) * split.endo_dim[label]
        out[label] = split.fixed_index < rhs
    return out


def condition_certificate(split: LinearizationSplit, label: str) -> dict:
    blk = split.lambda_blocks[label]
    dv = split.dim_v[label]
    return {
        "lambda": label,
        "n": blk.shape[1] // dv,
        "m": blk.shape[0] // dv,
        "d": split.endo_dim[label],
        "ind_sG": split.fixed_index,
        "rhs": (split.lambda_unit_index(label) + 1) * split.endo_dim[label],
    }


def s1_condition(fixed_index: int, lambda_indices) -> bool:
    """Circle-action form: ind D^lambda + 2 > ind D^{S^1} for every weight."""
    vals = lambda_indices.values() if isinstance(lambda_indices, dict) else lambda_indices
    return all(ind_l + 2 > fixed_index for ind_l in vals)


def s1_condition_split(split: LinearizationSplit) -> bool:
    """The circle form evaluated on a split; agrees with the general
    pointwise condition at (dim V, d) = (2, 2)."""
    for label in split.labels():
        if split.dim_v[label] != 2 or split.endo_dim[label] != 2:
            raise InvalidInputError(
                "the circle condition applies to weight planes only "
                f"(component {label!r} has dim V {split.dim_v[label]})"
            )
    lam = {
        label: split.lambda_real_index(label)
        for label in split.labels()
        if split.lambda_blocks[label].shape[0] > 0
    }
    return s1_condition(split.fixed_index, lam)


def preimage_rank(block: np.ndarray, cover: np.ndarray, tol: float = 1e-8) -> int:
    """Rank of the preimage of a covering subspace under a linear block.

    When the columns of ``cover`` together with the image of ``block`` span
    the whole target, dim block^{-1}(cover) - dim cover equals the Fredholm
    index of the block (kernel-bundle rank relation).
    """
    block = linalg.as_float(block)
    cover = linalg.as_float(cover)
    rows = block.shape[0]
    span = np.concatenate([block, cover], axis=1) if cover.size else block
    if linalg.rank(span, tol) < rows:
        raise InvalidInputError("cover does not span the cokernel of the block")
    # solutions (x, c) of block x = cover c form the graph of the preimage
    graph = np.concatenate([block, -cover], axis=1) if cover.size else block
    kernel = linalg.nullspace(graph, tol)
    n_cols = block.shape[1]
    if kernel.shape[1] == 0:
        return 0
    return linalg.rank(kernel[:n_cols, :], tol)


# ---------------------------------------------------------------------------
# division-ring ranks
# ---------------------------------------------------------------------------


def division_ring_rank(matrix, endo_type: str, tol: float = 1e-10) -> int:
    """Rank over R, C or H of a matrix given in End-unit entries.

    Entries: real numbers for R; complex numbers or (re, im) pairs for C;
    (1, i, j, k) quadruples for H.  Quaternionic rank is computed through
    the standard complex 2x2 embedding, rank_H = rank_C / 2.
    """
    if endo_type == "R":
        arr = np.asarray(matrix)
        if arr.ndim != 2:
            raise InvalidInputError("real entries must form a 2-d matrix")
        return linalg.rank(arr, tol)
    if endo_type == "C":
        arr = np.asarray(matrix)
        if arr.ndim == 3 and arr.shape[2] == 2:
            arr = linalg.as_float(arr)
            arr = arr[..., 0] + 1j * arr[..., 1]
        elif arr.ndim != 2:
            raise InvalidInputError("complex entries must be scalars or (re, im) pairs")
        arr = np.asarray(arr, dtype=complex)
        if arr.size == 0:
            return 0
        return int(np.linalg.matrix_rank(arr, tol=tol))
    if endo_type == "H":
        try:
            arr = linalg.as_float(np.asarray(matrix))
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed quaternion entries: {exc}") from None
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise InvalidInputError("quaternion entries must be (1, i, j, k) quadruples")
        m, n = arr.shape[:2]
        out = np.zeros((2 * m, 2 * n), dtype=complex)
        for i in range(m):
            for j in range(n):
                a, b, c, d = arr[i, j]
                out[2 * i, 2 * j] = a + 1j * b
                out[2 * i, 2 * j + 1] = c + 1j * d
                out[2 * i + 1, 2 * j] = -c + 1j * d
                out[2 * i + 1, 2 * j + 1] = a - 1j * b
        if out.size == 0:
            return 0
        rank_c = int(np.linalg.matrix_rank(out, tol=tol))
        if rank_c % 2:
            raise InvalidInputError("quaternionic embedding produced odd complex rank")
        return rank_c // 2
    raise InvalidInputError(f"unknown endomorphism type {endo_type!r}")


# ---------------------------------------------------------------------------
# the perturbation pipeline
# ---------------------------------------------------------------------------


@dataclass
class FixedLocusModel:
    """Finite model of the data near a fixed locus.

    Per-vertex: the fixed-part section value, the fixed linearization block,
    and one equivariant block per isotypic label.  The zero set is where the
    section value vanishes; a perturbation may only touch support vertices.
    """

    base: bundles.SimplicialBase
    group: reps.GroupModel
    normal_reps: dict  # label -> representation of the lambda normal part
    fiber_reps: dict  # label -> representation of the lambda fiber part
    section: dict  # vertex -> fixed-part value (vector)
    fixed_blocks: dict  # vertex -> matrix T M^G -> E^G
    lambda_blocks: dict  # vertex -> {label -> equivariant matrix}
    support: set | None = None

    def zero_set(self, tol: float = 1e-10):
        out = []
        for v in self.base.vertices:
            val = np.asarray(linalg.as_float(self.section[v]), dtype=float)
            if val.size == 0 or np.linalg.norm(val) <= tol:
                out.append(v)
        return out

    def split_at(self, vertex) -> LinearizationSplit:
        dims = {ir.label: ir.dim_V for ir in self.group.irreps}
        endos = {ir.label: ir.endo_dim for ir in self.group.irreps}
        lam = dict(self.lambda_blocks[vertex])
        return LinearizationSplit(
            np.asarray(linalg.as_float(self.fixed_blocks[vertex]), dtype=float),
            {k: np.asarray(linalg.as_float(m), dtype=float) for k, m in lam.items()},
            {k: dims[k] for k in lam},
            {k: endos[k] for k in lam},
        )


@dataclass
class TransversalityReport:
    """Deterministic record of the perturbation run."""

    seed: int
    vertex_results: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    passed: bool = True
    equivariance_residual: float = 0.0

    def record(self, vertex, label, min_sv, ok):
        self.vertex_results.setdefault(vertex, {})[label] = {
            "min_singular_value": float(min_sv),
            "surjective": bool(ok),
        }
        if not ok:
            self.passed = False


@dataclass
class EquivariantPerturbation:
    """Per-vertex corrections: an optional fixed-part section shift (used
    where a negative fixed index forces the zero set to move off the
    vertex), a fixed-block correction, and one equivariant correction per
    isotypic label; zero outside the support set."""

    fixed: dict
    lambdas: dict
    section_shifts: dict = field(default_factory=dict)

    def is_zero(self) -> bool:
        return (
            all(linalg.max_abs(m) == 0 for m in self.fixed.values())
            and all(
                linalg.max_abs(m) == 0
                for per in self.lambdas.values()
                for m in per.values()
            )
            and not self.section_shifts
        )


def construct_equivariant_perturbation(model: FixedLocusModel, seed: int = 0,
                                       sv_threshold: float = SV_THRESHOLD):
    """Build an equivariant perturbation making every linearization block
    surjective at the zero-set vertices.

    Pipeline: first make the fixed part transverse (a vertex whose fixed
    block has negative index receives a seeded section shift and leaves the
    zero set), then verify the pointwise index condition at the remaining
    zeros (obstruction certificates otherwise), make the fixed blocks
    surjective by least-norm seeded sampling, and finally sample equivariant
    corrections from the equivariant hom basis per isotypic label.  The
    perturbation vanishes outside the support set and the whole run is
    reproducible from the seed.
    """
    support = model.support if model.support is not None else set(model.base.vertices)
    report = TransversalityReport(seed=seed)
    shift_rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EC7]))
    section_shifts = {}
    zero = []
    for v in model.zero_set():
        blk = model.split_at(v).fixed_block
        if blk.shape[0] > blk.shape[1]:
            # negative fixed index: transversality means the zero set avoids
            # this vertex, so shift the section value off zero
            if v not in support:
                raise InvalidInputError(
                    f"zero-set vertex {v} lies outside the declared support"
                )
            shift = shift_rng.normal(size=blk.shape[0])
            section_shifts[v] = shift / np.linalg.norm(shift)
            report.record(v, "section-shift", np.inf, True)
        else:
            zero.append(v)
    obstructions = []
    for v in zero:
        split = model.split_at(v)
        verdicts = check_pointwise_condition(split)
        for label, ok in verdicts.items():
            if not ok:
                cert = condition_certificate(split, label)
                cert["vertex"] = v
                obstructions.append(cert)
    if obstructions:
        report.certificates = obstructions
        report.passed = False
        raise ObstructionError(
            "pointwise index condition fails at "
            f"{sorted({c['vertex'] for c in obstructions})}",
            {"certificates": obstructions, "report": report},
        )
    rng_root = np.random.SeedSequence(seed)
    fixed_corr = {v: None for v in model.base.vertices}
    lambda_corr = {v: {} for v in model.base.vertices}
    hom_bases = {
        label: reps.hom_G_basis(model.normal_reps[label], model.fiber_reps[label])
        for label in model.fiber_reps
    }
    for v in sorted(model.base.vertices, key=str):
        split = model.split_at(v)
        d_fix = split.fixed_block
        in_zero = v in zero
        if not in_zero or v not in support:
            fixed_corr[v] = np.zeros_like(d_fix)
            for label, blk in split.lambda_blocks.items():
                lambda_corr[v][label] = np.zeros_like(blk)
            if in_zero and v not in support:
                raise InvalidInputError(
                    f"zero-set vertex {v} lies outside the declared support"
                )
            continue
        child = np.random.default_rng(rng_root.spawn(1)[0])
        fixed_corr[v], sv_fix = _surject_block(d_fix, child, sv_threshold)
        report.record(v, "fixed", sv_fix, sv_fix > sv_threshold)
        for label, blk in split.lambda_blocks.items():
            expected = (model.fiber_reps[label].dim, model.normal_reps[label].dim)
            if blk.shape != expected:
                raise InvalidInputError(
                    f"block shape {blk.shape} at vertex {v} does not match the "
                    f"declared {label!r} bundle pair {expected}"
                )
            if blk.shape[0] == 0:
                lambda_corr[v][label] = np.zeros_like(blk)
                continue
            basis = [linalg.as_float(b) for b in hom_bases[label]]
            corr, sv = _surject_equivariant_block(blk, basis, child, sv_threshold)
            lambda_corr[v][label] = corr
            report.record(v, label, sv, sv > sv_threshold)
    if not report.passed:
        raise ResampleFailureError(
            "sampling budget exhausted before surjectivity", {"report": report}
        )
    gamma = EquivariantPerturbation(fixed_corr, lambda_corr, section_shifts)
    report.equivariance_residual = _gamma_residual(model, gamma)
    return gamma, report


def _gamma_residual(model: FixedLocusModel, gamma: EquivariantPerturbation) -> float:
    """Max equivariance defect of the lambda corrections (fixed corrections
    live on the fixed part, where the action is trivial)."""
    worst = 0.0
    for v, per in gamma.lambdas.items():
        for label, corr in per.items():
            if corr.size == 0:
                continue
            res = reps.equivariance_residual(
                model.normal_reps[label], model.fiber_reps[label], corr
            )
            worst = max(worst, float(res))
    return worst


def _surject_block(block: np.ndarray, rng: np.random.Generator,
                   sv_threshold: float):
    """Least-norm correction among seeded samples making a block surjective."""
    rows, cols = block.shape
    if rows == 0:
        return np.zeros_like(block), np.inf
    if cols < rows:
        raise ObstructionError(
            "fixed block cannot be surjective: negative index",
            {"shape": block.shape},
        )
    sv = linalg.min_singular_value(block)
    if sv > sv_threshold:
        return np.zeros_like(block), sv
    best = None
    scale = max(1.0, linalg.max_abs(block))
    for k in range(RETRY_BUDGET):
        cand = rng.normal(size=block.shape) * scale * (0.25 + 0.75 * rng.random())
        sv = linalg.min_singular_value(block + cand)
        if sv > sv_threshold:
            norm = float(np.linalg.norm(cand))
            if best is None or norm < best[0]:
                best = (norm, cand, sv)
    if best is None:
        return np.zeros_like(block), linalg.min_singular_value(block)
    return best[1], best[2]


def _surject_equivariant_block(block: np.ndarray, hom_basis: list,
                               rng: np.random.Generator, sv_threshold: float):
    """Sample coefficients on the equivariant hom basis until the corrected
    block is surjective; smallest-norm success within the budget wins."""
    sv = linalg.min_singular_value(block)
    if sv > sv_threshold:
        return np.zeros_like(block), sv
    if not hom_basis:
        return np.zeros_like(block), sv
    best = None
    scale = max(1.0, linalg.max_abs(block))
    for k in range(RETRY_BUDGET):
        coeffs = rng.normal(size=len(hom_basis)) * scale * (0.25 + 0.75 * rng.random())
        cand = sum(c * b for c, b in zip(coeffs, hom_basis))
        sv = linalg.min_singular_value(block + cand)
        if sv > sv_threshold:
            norm = float(np.linalg.norm(coeffs))
            if best is None or norm < best[0]:
                best = (norm, cand, sv)
    if best is None:
        return np.zeros_like(block), linalg.min_singular_value(block)
    return best[1], best[2]

"""Exact and floating-point matrix helpers used across the toolkit.

Two arithmetic modes coexist:

* exact mode: numpy object arrays whose entries are ``fractions.Fraction``
  (or python ints).  Rank, kernels and equality tests are exact.
* float mode: ordinary float64 arrays, SVD-based ranks, tolerance 1e-10
  unless stated otherwise.

Dispatch is by dtype: ``dtype == object`` selects the exact path.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

TOL = 1e-10


def is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def frac_array(rows) -> np.ndarray:
    """Build an object array of Fractions from nested lists / arrays."""
    arr = np.array(rows, dtype=object)
    flat = arr.reshape(-1)
    for i, v in enumerate(flat):
        if not isinstance(v, Fraction):
            flat[i] = Fraction(v)
    return flat.reshape(arr.shape)


def int_array(rows) -> np.ndarray:
    return np.array(rows, dtype=object)


def as_float(a) -> np.ndarray:
    a = np.asarray(a)
    if is_exact(a):
        return np.array(a.tolist(), dtype=float)
    return np.asarray(a, dtype=float)


def eye(n: int, exact: bool) -> np.ndarray:
    if exact:
        m = np.full((n, n), Fraction(0), dtype=object)
        for i in range(n):
            m[i, i] = Fraction(1)
        return m
    return np.eye(n)


def zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        return np.full(shape, Fraction(0), dtype=object)
    return np.zeros(shape)


def max_abs(a: np.ndarray):
    if a.size == 0:
        return 0.0
    if is_exact(a):
        return max(abs(x) for x in a.reshape(-1))
    return float(np.max(np.abs(a)))


def mat_eq(a: np.ndarray, b: np.ndarray, tol: float = TOL) -> bool:
    if a.shape != b.shape:
        return False
    if is_exact(a) and is_exact(b):
        return all(x == y for x, y in zip(a.reshape(-1), b.reshape(-1)))
    return max_abs(as_float(a) - as_float(b)) <= tol


def is_zero(a: np.ndarray, tol: float = TOL) -> bool:
    if is_exact(a):
        return all(x == 0 for x in a.reshape(-1))
    return max_abs(a) <= tol


def rref(a: np.ndarray):
    """Reduced row echelon form over the rationals.

    Returns (R, pivot_columns).  Input must be an object array; it is
    copied and entries coerced to Fraction.
    """
    m = frac_array(a)
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if m[i, c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        if pivot_row != r:
            m[[r, pivot_row]] = m[[pivot_row, r]]
        piv = m[r, c]
        m[r] = m[r] / piv
        for i in range(rows):
            if i != r and m[i, c] != 0:
                m[i] = m[i] - m[i, c] * m[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: np.ndarray, tol: float = TOL) -> int:
    if a.size == 0:
        return 0
    if is_exact(a):
        _, pivots = rref(a)
        return len(pivots)
    return int(np.linalg.matrix_rank(as_float(a), tol=tol))


def nullspace(a: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Columns form a basis of ker(a)."""
    if is_exact(a):
        red, pivots = rref(a)
        rows, cols = red.shape
        free = [c for c in range(cols) if c not in pivots]
        basis = zeros((cols, len(free)), exact=True)
        for k, fc in enumerate(free):
            basis[fc, k] = Fraction(1)
            for r, pc in enumerate(pivots):
                basis[pc, k] = -red[r, fc]
        return basis
    from scipy.linalg import null_space

    af = as_float(a)
    if af.size == 0:
        return np.eye(a.shape[1])
    return null_space(af, rcond=tol)


def solve_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a @ x = b exactly; raises if the system is inconsistent."""
    a = frac_array(a)
    b = frac_array(b)
    if b.ndim == 1:
        b = b.reshape(-1, 1)
        squeeze = True
    else:
        squeeze = False
    aug = np.concatenate([a, b], axis=1)
    red, pivots = rref(aug)
    n = a.shape[1]
    if any(p >= n for p in pivots):
        raise ValueError("inconsistent linear system")
    x = zeros((n, b.shape[1]), exact=True)
    for r, pc in enumerate(pivots):
        x[pc] = red[r, n:]
    return x[:, 0] if squeeze else x


def inv(a: np.ndarray) -> np.ndarray:
    if is_exact(a):
        n = a.shape[0]
        return solve_exact(a, eye(n, exact=True))
    return np.linalg.inv(as_float(a))


def min_singular_value(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    sv = np.linalg.svd(as_float(a), compute_uv=False)
    return float(sv[-1]) if len(sv) else 0.0


def column_space_basis(a: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Columns spanning the column space of a (pivot columns when exact)."""
    if is_exact(a):
        _, pivots = rref(a)
        return a[:, pivots]
    from scipy.linalg import orth

    if a.size == 0 or np.linalg.matrix_rank(as_float(a), tol=tol) == 0:
        return np.zeros((a.shape[0], 0))
    return orth(as_float(a), rcond=tol)


def independent_columns(a: np.ndarray, tol: float = TOL) -> list[int]:
    """Indices of a maximal independent subset of columns, left to right."""
    if is_exact(a):
        _, pivots = rref(a)
        return pivots
    af = as_float(a)
    idx: list[int] = []
    basis = np.zeros((a.shape[0], 0))
    for j in range(af.shape[1]):
        cand = np.concatenate([basis, af[:, j : j + 1]], axis=1)
        if np.linalg.matrix_rank(cand, tol=tol) > basis.shape[1]:
            basis = cand
            idx.append(j)
    return idx


def orthonormal_columns(a: np.ndarray) -> np.ndarray:
    from scipy.linalg import orth

    af = as_float(a)
    if af.size == 0:
        return af.reshape(af.shape[0], 0)
    return orth(af)


def principal_cosines(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cosines of principal angles between column spans (float)."""
    uo = orthonormal_columns(u)
    vo = orthonormal_columns(v)
    if uo.shape[1] == 0 or vo.shape[1] == 0:
        return np.zeros(0)
    sv = np.linalg.svd(uo.T @ vo, compute_uv=False)
    return np.clip(sv, 0.0, 1.0)


def realify_complex(a: np.ndarray) -> np.ndarray:
    """Exact complex matrix given as (..., 2) Fraction pairs -> real block matrix.

    (a + bi) maps to [[a, -b], [b, a]] blockwise, so real rank = 2 * complex rank.
    """
    m, n = a.shape[0], a.shape[1]
    out = zeros((2 * m, 2 * n), exact=True)
    for i in range(m):
        for j in range(n):
            re, im = a[i, j]
            out[2 * i, 2 * j] = re
            out[2 * i, 2 * j + 1] = -im
            out[2 * i + 1, 2 * j] = im
            out[2 * i + 1, 2 * j + 1] = re
    return out


def cayley_orthogonal(dim: int, rng: np.random.Generator, denom: int = 3) -> np.ndarray:
    """Exact rational orthogonal matrix via the Cayley transform of a
    random antisymmetric matrix with small entries."""
    a = zeros((dim, dim), exact=True)
    for i in range(dim):
        for j in range(i + 1, dim):
            v = Fraction(int(rng.integers(-1, 2)), denom)
            a[i, j] = v
            a[j, i] = -v
    i_mat = eye(dim, exact=True)
    return solve_exact(i_mat + a, i_mat - a)


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish float orthogonal matrix (QR of a Gaussian sample)."""
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


def random_signed_permutation(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Integer orthogonal matrix: permutation with random signs."""
    perm = rng.permutation(dim)
    signs = rng.choice([-1, 1], size=dim)
    m = np.zeros((dim, dim), dtype=object)
    for j, (p, s) in enumerate(zip(perm, signs)):
        m[p, j] = int(s)
    return m + Fraction(0)  # coerce entries to a uniform object dtype


def block_diag(blocks: list[np.ndarray], exact: bool) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = zeros((n, n), exact)
    pos = 0
    for b in blocks:
        k = b.shape[0]
        out[pos : pos + k, pos : pos + k] = b
        pos += k
    return out

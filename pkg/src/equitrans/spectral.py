"""Fredholm index of d/ds - B(s) with hyperbolic limits, by spectral flow.

The index is the eigenvalue count dim E^u(B-) - dim E^u(B+), where E^u(B)
is the invariant subspace for eigenvalues with negative real part (counted
with algebraic multiplicity; the matrices need not be symmetric).  An
independent shooting oracle computes kernels as intersections of propagated
boundary-decay subspaces; the index equals the kernel of the adjoint path
minus the kernel of the path itself.

The autonomous Floer linearization in a circle weight lambda >= 1 acts on
pairs (a, b) of C^n-valued functions as

    (a, b) |-> (a' - i 2 lambda pi b + A(s) a,  b' + i 2 lambda pi a + A(s) b)

which is d/ds - B(s) with B(a, b) = (i 2 lambda pi b - A a, -i 2 lambda pi a - A b);
for ||A|| < 2 lambda pi both limit matrices are hyperbolic with unstable
dimension 2n, so the index vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, NonHyperbolicError

HYPERBOLICITY_MARGIN = 1e-6
TAIL_TOLERANCE = 1e-6
ANGLE_THRESHOLD = 1e-6


# ---------------------------------------------------------------------------
# matrix paths
# ---------------------------------------------------------------------------


@dataclass
class MatrixPath:
    """A path of real matrices s -> B(s) with hyperbolic limits.

    ``evaluator`` must be defined on all of R and stationary up to 1e-6
    beyond +-horizon, where it agrees with ``b_minus`` / ``b_plus``.
    """

    evaluator: object
    horizon: float
    b_minus: np.ndarray
    b_plus: np.ndarray
    name: str = "path"

    def __post_init__(self):
        self.b_minus = np.atleast_2d(np.asarray(self.b_minus, dtype=float))
        self.b_plus = np.atleast_2d(np.asarray(self.b_plus, dtype=float))

    @property
    def dim(self) -> int:
        return self.b_minus.shape[0]

    def at(self, s: float) -> np.ndarray:
        return np.atleast_2d(np.asarray(self.evaluator(s), dtype=float))

    def validate(self) -> None:
        for b, side in ((self.b_minus, "-"), (self.b_plus, "+")):
            _assert_hyperbolic(b, f"limit matrix B{side}")
        for sign, b in ((-1.0, self.b_minus), (1.0, self.b_plus)):
            drift = np.max(np.abs(self.at(sign * self.horizon) - b))
            if drift > TAIL_TOLERANCE:
                raise InvalidInputError(
                    f"path is not stationary at s = {sign * self.horizon}: "
                    f"drift {drift:.2e}"
                )

    def adjoint(self) -> "MatrixPath":
        """The path s -> -B(s)^T, whose bounded solutions realize the
        cokernel of d/ds - B(s)."""
        ev = self.evaluator
        return MatrixPath(
            lambda s: -np.atleast_2d(np.asarray(ev(s), dtype=float)).T,
            self.horizon,
            -self.b_minus.T,
            -self.b_plus.T,
            name=f"adjoint({self.name})",
        )


def constant_path(b, horizon: float = 8.0) -> MatrixPath:
    b = np.atleast_2d(np.asarray(b, dtype=float))
    return MatrixPath(lambda s: b, horizon, b, b, name="constant")


def tanh_path(b0, b1, horizon: float = 9.0) -> MatrixPath:
    """B(s) = B0 + tanh(s) B1, interpolating B0 - B1 to B0 + B1."""
    b0 = np.atleast_2d(np.asarray(b0, dtype=float))
    b1 = np.atleast_2d(np.asarray(b1, dtype=float))
    return MatrixPath(
        lambda s: b0 + np.tanh(s) * b1, horizon, b0 - b1, b0 + b1, name="tanh"
    )


def scalar_tanh_path(horizon: float = 9.0) -> MatrixPath:
    return tanh_path([[0.0]], [[1.0]], horizon)


def concatenate(p1: MatrixPath, p2: MatrixPath, tol: float = 1e-5) -> MatrixPath:
    """Glue two paths whose inner limits match (B1+ = B2-)."""
    if p1.dim != p2.dim:
        raise InvalidInputError("cannot concatenate paths of different sizes")
    if np.max(np.abs(p1.b_plus - p2.b_minus)) > tol:
        raise InvalidInputError("inner limits do not match")
    t1, t2 = p1.horizon, p2.horizon

    def ev(s):
        return p1.at(s + 2 * t1) if s <= 0 else p2.at(s - 2 * t2)

    return MatrixPath(ev, 2 * (t1 + t2), p1.b_minus, p2.b_plus, name="concat")


# ---------------------------------------------------------------------------
# eigenvalue counts and the index
# ---------------------------------------------------------------------------


def _assert_hyperbolic(b: np.ndarray, what: str = "matrix",
                       margin: float = HYPERBOLICITY_MARGIN) -> np.ndarray:
    eig = np.linalg.eigvals(b)
    worst = float(np.min(np.abs(eig.real))) if eig.size else 0.0
    if worst <= margin:
        raise NonHyperbolicError(
            f"{what} has an eigenvalue within {margin:g} of the imaginary "
            f"axis (closest real part {worst:.2e})"
        )
    return eig


def unstable_dim(b) -> int:
    """Number of eigenvalues with negative real part, with multiplicity."""
    b = np.atleast_2d(np.asarray(b, dtype=float))
    eig = _assert_hyperbolic(b)
    return int(np.sum(eig.real < 0))


def fredholm_index(path: MatrixPath) -> int:
    """dim E^u(B-) - dim E^u(B+)."""
    path.validate()
    return unstable_dim(path.b_minus) - unstable_dim(path.b_plus)


# ---------------------------------------------------------------------------
# the weight-lambda linearization
# ---------------------------------------------------------------------------


def _realify_complex_matrix(a: np.ndarray) -> np.ndarray:
    """C-linear map on C^n -> real 2n x 2n matrix in (Re, Im) coordinates."""
    re, im = a.real, a.imag
    return np.block([[re, -im], [im, re]])


@dataclass
class LambdaOperatorSpec:
    """Weight-lambda linearization data: a path of real-linear maps A(s) on
    C^n (as 2n x 2n real matrices, or n x n complex for C-linear ones)."""

    n: int
    weight: int
    a_path: object
    horizon: float = 8.0

    def __post_init__(self):
        if self.weight < 1:
            raise InvalidInputError("weights are positive integers")

    def a_at(self, s: float) -> np.ndarray:
        a = np.asarray(self.a_path(s))
        if a.shape == (self.n, self.n) and np.iscomplexobj(a):
            a = _realify_complex_matrix(a)
        a = np.atleast_2d(np.asarray(a, dtype=float))
        if a.shape != (2 * self.n, 2 * self.n):
            raise InvalidInputError(
                f"A(s) must be a real-linear map on C^{self.n} "
                f"(2n x 2n real matrix), got shape {a.shape}"
            )
        return a


def build_lambda_path(spec: LambdaOperatorSpec) -> MatrixPath:
    """Realified path for the weight-lambda block: 4n x 4n real matrices in
    the coordinates (Re a, Im a, Re b, Im b).

    Raises when ||A(+-infinity)|| >= 2 lambda pi, which would destroy the
    hyperbolicity of the limits.
    """
    n = spec.n
    omega = 2.0 * np.pi * spec.weight
    j = np.block(
        [[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]]
    )
    zero = np.zeros((2 * n, 2 * n))

    def b_at(s: float) -> np.ndarray:
        a = spec.a_at(s)
        return np.block([[-a, omega * j], [-omega * j, -a]])

    for side in (-1.0, 1.0):
        a_inf = spec.a_at(side * spec.horizon)
        norm = float(np.linalg.norm(a_inf, 2))
        if norm >= omega:
            raise NonHyperbolicError(
                f"||A({'+' if side > 0 else '-'}inf)|| = {norm:.4f} >= "
                f"2*lambda*pi = {omega:.4f}: limits are not hyperbolic"
            )
    return MatrixPath(
        b_at,
        spec.horizon,
        b_at(-spec.horizon),
        b_at(spec.horizon),
        name=f"lambda_{spec.weight}",
    )


# ---------------------------------------------------------------------------
# shooting oracle
# ---------------------------------------------------------------------------


def _spectral_frame(b: np.ndarray, half: str) -> np.ndarray:
    """Orthonormal basis of the invariant subspace of b for eigenvalues in
    the open left ('lhp') or right ('rhp') half plane."""
    _assert_hyperbolic(b)
    t, z, sdim = scipy.linalg.schur(b, output="real", sort=half)
    return z[:, :sdim]


def _propagate_frame(path: MatrixPath, frame: np.ndarray, s0: float,
                     s1: float, step: float) -> np.ndarray:
    """RK4 propagation of a frame under u' = B(s) u with QR renormalization.

    The propagated subspace converges onto the dominant directions, so
    per-step orthonormalization keeps the computation stable; a non-finite
    frame triggers one rescaling retry before failing.
    """
    if frame.shape[1] == 0:
        return frame
    n_steps = max(1, int(np.ceil(abs(s1 - s0) / step)))
    h = (s1 - s0) / n_steps
    u = frame.copy()
    s = s0
    for k in range(n_steps):
        k1 = path.at(s) @ u
        k2 = path.at(s + h / 2) @ (u + (h / 2) * k1)
        k3 = path.at(s + h / 2) @ (u + (h / 2) * k2)
        k4 = path.at(s + h) @ (u + h * k3)
        u = u + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        s += h
        if not np.all(np.isfinite(u)):
            raise InvalidInputError(
                "frame propagation overflowed despite renormalization"
            )
        u, _ = np.linalg.qr(u)
    return u


def kernel_dim_oracle(path: MatrixPath, step: float | None = None,
                      threshold: float = ANGLE_THRESHOLD) -> int:
    """Dimension of the space of bounded solutions of u' = B(s) u.

    Solutions bounded at -infinity come from the right-half-plane subspace
    of B-, propagated forward from -horizon; solutions bounded at +infinity
    come from the left-half-plane subspace of B+, propagated backward from
    +horizon.  The kernel is their intersection at s = 0, measured by
    principal angles.
    """
    path.validate()
    t = path.horizon
    if step is None:
        scale = max(np.max(np.abs(path.b_minus)), np.max(np.abs(path.b_plus)), 1.0)
        step = min(1e-3 * t, 0.05 / scale)
    grow = _spectral_frame(path.b_minus, "rhp")
    decay = _spectral_frame(path.b_plus, "lhp")
    u = _propagate_frame(path, grow, -t, 0.0, step)
    v = _propagate_frame(path, decay, t, 0.0, step)
    if u.shape[1] == 0 or v.shape[1] == 0:
        return 0
    cos = np.linalg.svd(u.T @ v, compute_uv=False)
    return int(np.sum(1.0 - cos <= threshold))


def index_by_shooting(path: MatrixPath, step: float | None = None) -> int:
    """Independent oracle: kernel of the adjoint path minus kernel of the
    path equals the eigenvalue-count index."""
    return kernel_dim_oracle(path.adjoint(), step) - kernel_dim_oracle(path, step)

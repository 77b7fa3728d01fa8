"""Dense-matrix ground truth for the closed forms in :mod:`wceop.operator`.

Nothing here looks at ``E(uw)``: operators are realized as ``N x N`` complex
matrices and every quantity (ranks, null spaces, norms, square roots, polar
factors, inverses) is computed by elementary dense linear algebra.

Matrices act on column vectors of atom values.  Norms, adjoints and
Hermitian-ness refer to the mu-weighted inner product ``<f, g> = sum mu f conj(g)``
whenever ``masses`` is given; internally this is handled by the similarity
``M -> D^(1/2) M D^(-1/2)`` with ``D = diag(mu)``, which is unitary from
``L^2(mu)`` onto the plain Euclidean space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import PreconditionError, SingularMatrixError
from .operator import WceOperator

RANK_TOL = 1e-8


def realize(T: WceOperator) -> np.ndarray:
    """Matrix with ``M[i, j] = w_i mu_j u_j / mu(B)`` when ``i, j`` share block ``B``."""
    labels = T.algebra.labels
    mu = T.space.masses
    bm = T.algebra.block_masses(T.space)[labels]
    same = labels[:, None] == labels[None, :]
    return np.where(same, T.w[:, None] * (mu * T.u)[None, :] / bm[:, None], 0.0).astype(complex)


def _frame(masses):
    if masses is None:
        return None
    return np.sqrt(np.asarray(masses, dtype=float))


def to_euclidean(M: np.ndarray, masses=None) -> np.ndarray:
    s = _frame(masses)
    M = np.asarray(M, dtype=complex)
    if s is None:
        return M
    return s[:, None] * M / s[None, :]


def from_euclidean(M: np.ndarray, masses=None) -> np.ndarray:
    s = _frame(masses)
    M = np.asarray(M, dtype=complex)
    if s is None:
        return M
    return M * s[None, :] / s[:, None]


def weighted_adjoint(M: np.ndarray, masses=None) -> np.ndarray:
    """Adjoint under the mu-weighted inner product: ``D^-1 M^H D``."""
    M = np.asarray(M, dtype=complex)
    MH = np.conj(np.swapaxes(M, -1, -2))
    if masses is None:
        return MH
    mu = np.asarray(masses, dtype=float)
    return MH * mu[None, :] / mu[:, None]


def orthonormalize(vectors: np.ndarray, masses=None, tol: float = 1e-10) -> np.ndarray:
    """Modified Gram-Schmidt (two passes) on the columns of ``vectors``.

    Columns that collapse below ``tol`` relative to their original length
    are dropped.
    """
    V = np.array(vectors, dtype=complex)
    n, k = V.shape
    mu = np.ones(n) if masses is None else np.asarray(masses, dtype=float)
    out = []
    for j in range(k):
        x = V[:, j].copy()
        x_norm0 = np.sqrt(np.sum(mu * np.abs(x) ** 2))
        if x_norm0 == 0:
            continue
        for _ in range(2):
            for q in out:
                x = x - np.sum(mu * x * np.conj(q)) * q
        x_norm = np.sqrt(np.sum(mu * np.abs(x) ** 2))
        if x_norm <= tol * x_norm0:
            continue
        out.append(x / x_norm)
    if not out:
        return np.zeros((n, 0), dtype=complex)
    return np.column_stack(out)


@dataclass(frozen=True)
class RankResult:
    rank: int
    null_basis: np.ndarray
    range_basis: np.ndarray
    pivot_tol: float
    pivots: tuple


def rank_and_bases(M: np.ndarray, tol: float = RANK_TOL, masses=None) -> RankResult:
    """Gauss-Jordan elimination with partial pivoting.

    A pivot is accepted when its modulus exceeds ``tol`` times the largest
    entry modulus of the input.  The null basis comes from the free columns
    of the reduced echelon form, the range basis from the pivot columns of
    ``M``; both are orthonormalized (in ``L^2(mu)`` if ``masses`` is given).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    A = np.array(M, dtype=complex)
    nrows, ncols = A.shape
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    threshold = tol * scale
    pivots: list[int] = []
    row = 0
    if scale > 0:
        for col in range(ncols):
            if row == nrows:
                break
            r = row + int(np.argmax(np.abs(A[row:, col])))
            if np.abs(A[r, col]) <= threshold:
                continue
            if r != row:
                A[[row, r]] = A[[r, row]]
            A[row] = A[row] / A[row, col]
            others = np.arange(nrows) != row
            A[others] -= np.outer(A[others, col], A[row])
            pivots.append(col)
            row += 1
    free = [c for c in range(ncols) if c not in pivots]
    null = np.zeros((ncols, len(free)), dtype=complex)
    for k, f in enumerate(free):
        null[f, k] = 1.0
        for r, pc in enumerate(pivots):
            null[pc, k] = -A[r, f]
    null_basis = orthonormalize(null, masses) if free else np.zeros((ncols, 0), dtype=complex)
    rng = np.asarray(M, dtype=complex)[:, pivots]
    range_basis = orthonormalize(rng, masses) if pivots else np.zeros((nrows, 0), dtype=complex)
    return RankResult(len(pivots), null_basis, range_basis, threshold, tuple(pivots))


def rank(M: np.ndarray, tol: float = RANK_TOL) -> int:
    return rank_and_bases(M, tol).rank


def two_norm(M: np.ndarray, masses=None, *, full_output: bool = False,
             rtol: float = 1e-12, max_steps: int = 64):
    """Largest singular value by power iteration on the Gram matrix.

    Each step squares the (normalized) Gram power, so step ``k`` carries the
    power ``2**k``; the estimate is the largest Rayleigh quotient over the
    columns of that power.  Stops when every column quotient agrees with its
    previous value to ``rtol`` (relative to the largest).  Accepts a stack
    of matrices ``(..., N, N)``.

    With ``full_output`` returns ``(norm, converged, steps)``.
    """
    A = to_euclidean(M, masses)
    scale = np.max(np.abs(A), axis=(-2, -1))
    safe = np.where(scale > 0, scale, 1.0)
    # split parts: complex division by a subnormal scale overflows in numpy
    A = (A.real / safe[..., None, None]) + 1j * (A.imag / safe[..., None, None])
    G = np.conj(np.swapaxes(A, -1, -2)) @ A

    def rayleigh(X):
        # every column quotient is a lower bound for the top eigenvalue; block
        # structure can keep the largest column away from the dominant block
        num = np.einsum("...ij,...ik,...kj->...j", np.conj(X), G, X).real
        den = np.einsum("...ij,...ij->...j", np.conj(X), X).real
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)

    X = G
    rq = rayleigh(X)
    converged = False
    steps = 0
    for steps in range(1, max_steps + 1):
        X = X @ X
        xs = np.max(np.abs(X), axis=(-2, -1))
        X = X / np.where(xs > 0, xs, 1.0)[..., None, None]
        new = rayleigh(X)
        # each column quotient converges on its own; stop once all are settled
        top = new.max(axis=-1)
        done = np.max(np.abs(new - rq), axis=-1) <= rtol * top
        rq = new
        if np.all(done | (top == 0)):
            converged = True
            break
    rq = rq.max(axis=-1)
    norm = scale * np.sqrt(np.maximum(rq, 0.0))
    if np.ndim(norm) == 0:
        norm = float(norm)
    if full_output:
        return norm, converged, steps
    return norm


def jacobi_eigh(H: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Returns ascending eigenvalues and a unitary ``V`` with ``H V = V diag(lam)``.
    Sweeps stop once the off-diagonal Frobenius norm is below ``tol`` times
    the Frobenius norm of ``H``.
    """
    A = np.array(H, dtype=complex)
    n = A.shape[0]
    A = 0.5 * (A + A.conj().T)
    V = np.eye(n, dtype=complex)
    total = np.linalg.norm(A)
    if total == 0:
        return np.zeros(n), V
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.linalg.norm(A) ** 2 - np.sum(np.abs(np.diag(A)) ** 2), 0.0))
        if off <= tol * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                c = A[p, q]
                r = abs(c)
                if r <= 1e-300:
                    continue
                phase = c / r
                tau = (A[q, q].real - A[p, p].real) / (2.0 * r)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                cs = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * cs
                J = np.array([[cs, sn], [-sn * np.conj(phase), cs * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ J
                A[idx, :] = J.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ J
    lam = np.diag(A).real.copy()
    order = np.argsort(lam)
    return lam[order], V[:, order]


def _check_hermitian(Ht: np.ndarray, tol: float = 1e-10) -> None:
    scale = max(float(np.max(np.abs(Ht))), 1e-300)
    if np.max(np.abs(Ht - Ht.conj().T)) > tol * scale:
        raise PreconditionError("matrix is not Hermitian in the weighted inner product")


def hermitian_sqrt(M: np.ndarray, masses=None, tol: float = 1e-10) -> np.ndarray:
    """Positive square root of a (mu-)Hermitian positive semidefinite matrix."""
    Ht = to_euclidean(M, masses)
    if not np.any(Ht):
        return np.zeros_like(Ht)
    _check_hermitian(Ht, tol)
    lam, V = jacobi_eigh(Ht)
    top = max(float(lam[-1]), 0.0)
    if lam[0] < -tol * max(top, 1e-300):
        raise PreconditionError(f"matrix has negative eigenvalue {lam[0]:.3g}")
    root = (V * np.sqrt(np.clip(lam, 0.0, None))) @ V.conj().T
    return from_euclidean(root, masses)


def polar_aluthge(M: np.ndarray, masses=None, cutoff: float = 1e-10) -> np.ndarray:
    """``|M|^(1/2) U |M|^(1/2)`` with ``M = U |M|`` the polar decomposition.

    One Jacobi decomposition of ``M^* M`` supplies ``|M|^(1/2)`` and the
    pseudo-inverse ``|M|^+`` used for the partial isometry ``U = M |M|^+``.
    Gram eigenvalues at or below ``cutoff`` times the largest are treated as
    exact zeros in all three spectral functions.
    """
    Mt = to_euclidean(M, masses)
    G = Mt.conj().T @ Mt
    lam, V = jacobi_eigh(G)
    top = float(lam[-1])
    if top <= 0:
        return np.zeros_like(Mt)
    keep = lam > cutoff * top
    sv = np.where(keep, np.sqrt(np.clip(lam, 0.0, None)), 0.0)
    half = (V * np.sqrt(sv)) @ V.conj().T
    pinv = (V * np.where(keep, 1.0 / np.where(keep, sv, 1.0), 0.0)) @ V.conj().T
    U = Mt @ pinv
    return from_euclidean(half @ U @ half, masses)


def invert(M: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Gauss-Jordan inverse with partial pivoting."""
    A = np.array(M, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("invert needs a square matrix")
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    aug = np.hstack([A, np.eye(n, dtype=complex)])
    for col in range(n):
        r = col + int(np.argmax(np.abs(aug[col:, col])))
        if scale == 0 or np.abs(aug[r, col]) <= tol * scale:
            raise SingularMatrixError(f"pivot {col} below tolerance; matrix is singular")
        if r != col:
            aug[[col, r]] = aug[[r, col]]
        aug[col] = aug[col] / aug[col, col]
        others = np.arange(n) != col
        aug[others] -= np.outer(aug[others, col], aug[col])
    return aug[:, n:]


def matrix_power(M: np.ndarray, n: int) -> np.ndarray:
    """Plain repeated multiplication, ``M^0 = I``."""
    M = np.asarray(M, dtype=complex)
    out = np.eye(M.shape[0], dtype=complex)
    for _ in range(n):
        out = out @ M
    return out


def power_error_scale(M: np.ndarray, n: int) -> float:
    """Largest entry of ``|M|^n``, the natural round-off scale of ``M^n``."""
    return float(np.max(matrix_power(np.abs(M), n).real))


def subspace_dim(*bases: np.ndarray, tol: float = RANK_TOL) -> int:
    """Dimension of the sum of the column spans of ``bases``."""
    cols = [b for b in bases if b.shape[1]]
    if not cols:
        return 0
    return rank_and_bases(np.hstack(cols), tol).rank

"""Dense complex linear algebra for small Hilbert spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The Hermitian
eigensolver is a Jacobi method with complex rotations, swept in round-robin
order so that each round applies ``d/2`` disjoint rotations at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import DimensionMismatch, InputError, NoConvergence, NotHermitian

ComplexMatrix = npt.NDArray[np.complex128]
ComplexVector = npt.NDArray[np.complex128]

HERMITIAN_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100


def as_matrix(m: npt.ArrayLike) -> ComplexMatrix:
    """Coerce to a finite square complex128 matrix."""
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("matrix has non-finite entries")
    return arr


def as_vector(v: npt.ArrayLike) -> ComplexVector:
    arr = np.array(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"expected a non-empty vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("vector has non-finite entries")
    return arr


def is_hermitian(m: npt.ArrayLike, tol: float = HERMITIAN_TOL) -> bool:
    """True iff ``max|M - M^dagger| <= tol * max(1, max|M|)``."""
    m = as_matrix(m)
    scale = max(1.0, float(np.max(np.abs(m))))
    return float(np.max(np.abs(m - m.conj().T))) <= tol * scale


def require_hermitian(m: npt.ArrayLike, tol: float = HERMITIAN_TOL, name: str = "operator") -> ComplexMatrix:
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        dev = float(np.max(np.abs(m - m.conj().T)))
        raise NotHermitian(f"{name} is not Hermitian (max |M - M^dagger| = {dev:.3e})")
    return m


def is_unitary(u: npt.ArrayLike, tol: float = 1e-9) -> bool:
    u = as_matrix(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= tol


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending real eigenvalues; ``eigenvectors[:, i]`` pairs with ``eigenvalues[i]``."""

    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: ComplexMatrix

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> ComplexMatrix:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply_function(self, f) -> ComplexMatrix:
        """``sum_i f(lambda_i) v_i v_i^dagger``."""
        v = self.eigenvectors
        return (v * f(self.eigenvalues)) @ v.conj().T


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # Circle-method tournament: every pair (p, q) appears exactly once per sweep.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(h: ComplexMatrix) -> float:
    off = h.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _rotate_rows(x, p, q, c, g_pq, g_qp) -> None:
    # x <- G^dagger x, restricted to the rows touched by the (p, q) pairs.
    rp, rq = x[p, :], x[q, :]
    x[p, :] = c[:, None] * rp + g_qp.conj()[:, None] * rq
    x[q, :] = g_pq.conj()[:, None] * rp + c[:, None] * rq


def eig_hermitian(m: npt.ArrayLike, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Iterates until the off-diagonal Frobenius norm drops to
    ``1e-14 * dim * ||M||_F``.

    Raises
    ------
    NotHermitian
        If ``m`` fails :func:`is_hermitian` at 1e-10.
    NoConvergence
        If ``max_sweeps`` sweeps do not reach the threshold.
    """
    h = require_hermitian(m).copy()
    n = h.shape[0]
    h = 0.5 * (h + h.conj().T)
    if n == 1:
        return EigenDecomposition(np.real(np.diagonal(h)).copy(), np.eye(1, dtype=np.complex128))
    # Rows of w are the conjugated eigenvectors: w = V^dagger.
    w = np.eye(n, dtype=np.complex128)

    scale = float(np.linalg.norm(h))
    threshold = 1e-14 * n * scale
    # Entries below this are left alone; rotating them only breeds denormals.
    negligible = 1e-20 * scale
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        if _off_norm(h) <= threshold:
            break
        for p, q in rounds:
            b = h[p, q]
            mag = np.abs(b)
            active = mag > negligible
            if not np.any(active):
                continue
            p, q, b, mag = p[active], q[active], b[active], mag[active]
            app = np.real(h[p, p])
            aqq = np.real(h[q, q])
            # Phase e^{i alpha} = b/|b| makes the 2x2 block real symmetric.
            ph = b / mag
            tau = (aqq - app) / (2.0 * mag)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # Column transform G = [[c, s e^{ia}], [-s e^{-ia}, c]]. For Hermitian H,
            # G^dagger H G = G^dagger (G^dagger H)^dagger, so only row updates are needed.
            g_qp = -s * ph.conj()
            g_pq = s * ph
            _rotate_rows(h, p, q, c, g_pq, g_qp)
            h = np.ascontiguousarray(h.conj().T)
            _rotate_rows(h, p, q, c, g_pq, g_qp)
            h[p, q] = 0.0
            h[q, p] = 0.0
            _rotate_rows(w, p, q, c, g_pq, g_qp)
    else:
        if _off_norm(h) > threshold:
            raise NoConvergence(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {_off_norm(h):.3e}, threshold {threshold:.3e})"
            )

    evals = np.real(np.diagonal(h)).copy()
    order = np.argsort(evals, kind="stable")
    return EigenDecomposition(evals[order], w.conj().T[:, order].copy())


def exp_hermitian_times(a: npt.ArrayLike, scale: complex) -> ComplexMatrix:
    """``exp(scale * A)`` for Hermitian ``A``; unitary when ``scale`` is imaginary."""
    dec = eig_hermitian(a)
    return dec.apply_function(lambda lam: np.exp(scale * lam))


def mul(m: npt.ArrayLike, n: npt.ArrayLike) -> ComplexMatrix:
    m, n = as_matrix(m), as_matrix(n)
    if m.shape != n.shape:
        raise DimensionMismatch(f"cannot multiply {m.shape} by {n.shape}")
    return m @ n


def adjoint(m: npt.ArrayLike) -> ComplexMatrix:
    return as_matrix(m).conj().T


def outer(u: npt.ArrayLike, v: npt.ArrayLike) -> ComplexMatrix:
    """``|u><v|``."""
    u, v = as_vector(u), as_vector(v)
    if u.shape != v.shape:
        raise DimensionMismatch(f"vector lengths differ: {u.size} vs {v.size}")
    return np.outer(u, v.conj())


def sandwich(u: npt.ArrayLike, m: npt.ArrayLike, v: npt.ArrayLike) -> complex:
    """``<u|M|v>``."""
    u, v, m = as_vector(u), as_vector(v), as_matrix(m)
    if not (u.size == v.size == m.shape[0]):
        raise DimensionMismatch(f"incompatible sizes {u.size}, {m.shape}, {v.size}")
    return complex(np.vdot(u, m @ v))


def num_qubits(dim: int) -> int:
    """log2(dim) for powers of two, else -1."""
    if dim < 1 or dim & (dim - 1):
        return -1
    return dim.bit_length() - 1

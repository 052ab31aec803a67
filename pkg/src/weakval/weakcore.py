"""Weak values, their forward/reverse product and the effective operators.

For a Hermitian observable ``A``, preselection ``psi`` and postselection
``phi``::

    A_w        = <phi|A|psi> / <phi|psi>
    C_psi_phi  = A_w(psi->phi) * A_w(phi->psi) = |A_w|^2
    B          = A |psi><psi| A,   <phi|B|phi> = |<phi|A|psi>|^2
    B_rho      = A rho A

so ``|A_w| = sqrt(<phi|B|phi> / <phi|P_psi|phi>)`` is a ratio of two
ordinary expectation values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from . import linalg
from .errors import DimensionMismatch, NumericalError, OrthogonalStates
from .linalg import ComplexMatrix, ComplexVector
from .qstate import DensityMatrixState, PureState, make_density, state_vector

EPS_ORTH = 1e-12
EIG_TOL = 1e-10
DEGENERACY_TOL = 1e-9


def _inputs(a, psi, phi=None):
    a = linalg.require_hermitian(a, name="observable")
    u = state_vector(psi)
    if u.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"state of dim {u.shape[0]} vs observable of dim {a.shape[0]}")
    if phi is None:
        return a, u
    w = state_vector(phi)
    if w.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"state of dim {w.shape[0]} vs observable of dim {a.shape[0]}")
    return a, u, w


def _guarded_overlap(psi: ComplexVector, phi: ComplexVector, eps_orth: float) -> complex:
    overlap = complex(np.vdot(phi, psi))
    overlap_sq = abs(overlap) ** 2
    if overlap_sq <= eps_orth:
        raise OrthogonalStates(
            f"pre- and postselected states are (nearly) orthogonal: "
            f"|<phi|psi>|^2 = {overlap_sq:.3e} <= {eps_orth:.1e}; the weak value diverges",
            overlap_sq,
        )
    return overlap


def weak_value(
    a: npt.ArrayLike,
    psi: PureState | npt.ArrayLike,
    phi: PureState | npt.ArrayLike,
    eps_orth: float = EPS_ORTH,
) -> complex:
    """``<phi|A|psi> / <phi|psi>``.

    Raises :class:`OrthogonalStates` when ``|<phi|psi>|^2 <= eps_orth``.
    """
    a, u, w = _inputs(a, psi, phi)
    overlap = _guarded_overlap(u, w, eps_orth)
    return complex(np.vdot(w, a @ u)) / overlap


@dataclass(frozen=True)
class WeakValueReport:
    forward: complex
    reverse: complex
    product: complex
    modulus: float
    overlap_sq: float
    numerator_sq: float
    re_from_mean: float

    @property
    def phase(self) -> float:
        return float(np.angle(self.forward))


def weak_value_product(a, psi, phi, eps_orth: float = EPS_ORTH) -> WeakValueReport:
    """Forward and reverse weak values, their product and the strong-measurement modulus."""
    a, u, w = _inputs(a, psi, phi)
    overlap = _guarded_overlap(u, w, eps_orth)
    amp = complex(np.vdot(w, a @ u))
    forward = amp / overlap
    # Reverse direction evaluated from its own matrix elements, not by conjugation.
    reverse = complex(np.vdot(u, a @ w)) / complex(np.vdot(u, w))
    overlap_sq = abs(overlap) ** 2
    numerator_sq = abs(amp) ** 2
    re_from_mean = 0.5 * (forward + reverse)
    if abs(re_from_mean.real - forward.real) > 1e-12 * max(1.0, abs(forward)):
        raise NumericalError(
            f"mean of forward and reverse weak values {re_from_mean.real!r} "
            f"differs from Re(A_w) {forward.real!r}"
        )
    return WeakValueReport(
        forward=forward,
        reverse=reverse,
        product=forward * reverse,
        modulus=float(np.sqrt(numerator_sq / overlap_sq)),
        overlap_sq=overlap_sq,
        numerator_sq=numerator_sq,
        re_from_mean=re_from_mean.real,
    )


def effective_operator(a, psi) -> ComplexMatrix:
    """``B = A P_psi A``, built as ``|A psi><A psi|``."""
    a, u = _inputs(a, psi)
    v = a @ u
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float  # <phi|B|phi>
    rhs: float  # |<phi|A|psi>|^2
    projector_expectation: float  # <phi|P_psi|phi>
    ratio: float  # lhs / <phi|P_psi|phi>
    product: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def expectation_identity_check(a, psi, phi, eps_orth: float = EPS_ORTH, tol: float = 1e-10) -> IdentityCheck:
    """Evaluate ``<phi|B|phi>`` and ``|<phi|A|psi>|^2`` along separate paths.

    Also checks that ``<phi|B|phi> / <phi|P_psi|phi>`` agrees with the weak
    value product. Raises :class:`NumericalError` on disagreement beyond
    ``tol`` (scaled by the magnitude of the compared values).
    """
    a, u, w = _inputs(a, psi, phi)
    b = effective_operator(a, u)
    lhs = linalg.sandwich(w, b, w)
    rhs = abs(linalg.sandwich(w, a, u)) ** 2
    p_exp = linalg.sandwich(w, np.outer(u, u.conj()), w).real
    report = weak_value_product(a, u, w, eps_orth)
    ratio = lhs.real / p_exp
    if abs(lhs.imag) > tol * max(1.0, abs(lhs)):
        raise NumericalError(f"<phi|B|phi> has imaginary residue {lhs.imag:.3e}")
    if abs(lhs.real - rhs) > tol * max(1.0, rhs):
        raise NumericalError(f"<phi|B|phi> = {lhs.real!r} but |<phi|A|psi>|^2 = {rhs!r}")
    if abs(ratio - report.product.real) > tol * max(1.0, abs(ratio)):
        raise NumericalError(f"ratio {ratio!r} disagrees with weak value product {report.product.real!r}")
    return IdentityCheck(lhs.real, rhs, p_exp, ratio, report.product.real)


def _density(rho) -> DensityMatrixState:
    if isinstance(rho, DensityMatrixState):
        return rho
    return make_density(rho)


def effective_operator_mixed(a, rho: DensityMatrixState | npt.ArrayLike) -> ComplexMatrix:
    """``B_rho = A rho A``."""
    a = linalg.require_hermitian(a, name="observable")
    rho = _density(rho)
    if rho.dim != a.shape[0]:
        raise DimensionMismatch(f"density matrix of dim {rho.dim} vs observable of dim {a.shape[0]}")
    b = a @ rho.matrix @ a
    return 0.5 * (b + b.conj().T)


def mixed_expectation(a, rho, phi) -> tuple[float, float]:
    """``(<phi|B_rho|phi>, sum_k p_k |<phi|A|psi_k>|^2)`` over the spectral ensemble of ``rho``."""
    rho = _density(rho)
    w = state_vector(phi)
    lhs = linalg.sandwich(w, effective_operator_mixed(a, rho), w).real
    a = linalg.as_matrix(a)
    rhs = sum(p * abs(np.vdot(w, a @ v)) ** 2 for p, v in rho.ensemble(cutoff=0.0))
    return lhs, float(rhs)


@dataclass(frozen=True)
class BStructure:
    """``B`` expressed in the eigenbasis of ``A``.

    ``case`` is ``"eigenstate"`` (then ``eigenvalue`` holds ``a``) or
    ``"superposition"``. ``coefficients[i, j] = c_i c_j^* a_i a_j``.
    """

    case: str
    eigenvalue: float | None
    eigenvalues: np.ndarray
    eigenvectors: ComplexMatrix
    amplitudes: ComplexVector
    coefficients: ComplexMatrix
    eigenstate_residual: float | None = None

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diagonal(self.coefficients)).copy()

    @property
    def coherences(self) -> list[tuple[tuple[int, int], complex]]:
        n = self.coefficients.shape[0]
        return [((i, j), complex(self.coefficients[i, j])) for i in range(n) for j in range(n) if i != j]

    def reconstruct(self) -> ComplexMatrix:
        v = self.eigenvectors
        return v @ self.coefficients @ v.conj().T


def analyze_structure(a, psi, eig_tol: float = EIG_TOL) -> BStructure:
    """Classify ``psi`` as an eigenstate of ``A`` or a superposition and expand ``B``.

    Eigenstate means more than ``1 - eig_tol`` of the weight lies in one
    eigenspace (eigenvalues within 1e-9 are grouped). In that case ``B``
    equals ``a^2 P_psi`` and the residual of that identity is recorded.
    """
    a, u = _inputs(a, psi)
    dec = linalg.eig_hermitian(a)
    lam, vecs = dec.eigenvalues, dec.eigenvectors
    c = vecs.conj().T @ u
    weights = np.abs(c) ** 2
    coeff = np.outer(c * lam, (c * lam).conj())

    case, value, residual = "superposition", None, None
    start = 0
    while start < lam.size:
        stop = start + 1
        while stop < lam.size and lam[stop] - lam[start] <= DEGENERACY_TOL * max(1.0, abs(lam[start])):
            stop += 1
        if weights[start:stop].sum() > 1.0 - eig_tol:
            case, value = "eigenstate", float(np.mean(lam[start:stop]))
            b = effective_operator(a, u)
            residual = float(np.max(np.abs(b - value**2 * np.outer(u, u.conj()))))
            break
        start = stop
    return BStructure(case, value, lam, vecs, c, coeff, residual)

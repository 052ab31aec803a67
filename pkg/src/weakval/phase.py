"""Weak-value phase from two Hermitian expectation values.

``C = A P_psi`` is not Hermitian, but ``C = C_R + i C_I`` with both parts
Hermitian. Since ``<phi|C|phi> = A_w |<phi|psi>|^2``, the phase of the weak
value is ``atan2(<phi|C_I|phi>, <phi|C_R|phi>)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from . import linalg
from .errors import InputError, NotPowerOfTwoDim, PhaseUndefined
from .linalg import ComplexMatrix
from .qstate import FIXED_GATES
from .weakcore import EPS_ORTH, _guarded_overlap, _inputs

EPS_MAG = 1e-12
PAULI_LABELS = "IXYZ"
PAULI_DROP = 1e-14
_I_POWERS_CONJ = (1, -1j, -1, 1j)
_SINGLE_PAULI = {"I": np.eye(2, dtype=np.complex128), "X": FIXED_GATES["x"], "Y": FIXED_GATES["y"], "Z": FIXED_GATES["z"]}


@dataclass(frozen=True)
class HermitianSplit:
    c_r: ComplexMatrix
    c_i: ComplexMatrix
    original: ComplexMatrix
    anticommutator_form: ComplexMatrix  # {A, P_psi} / 2
    commutator_form: ComplexMatrix  # [A, P_psi] / 2i

    def reconstruct(self) -> ComplexMatrix:
        return self.c_r + 1j * self.c_i


def build_C(a, psi) -> HermitianSplit:
    a, u = _inputs(a, psi)
    p = np.outer(u, u.conj())
    c = a @ p
    c_dag = c.conj().T
    return HermitianSplit(
        c_r=0.5 * (c + c_dag),
        c_i=(c - c_dag) / 2j,
        original=c,
        anticommutator_form=0.5 * (a @ p + p @ a),
        commutator_form=(a @ p - p @ a) / 2j,
    )


@dataclass(frozen=True)
class PhaseReport:
    x: float
    y: float
    phase: float
    weak_value_reconstructed: complex
    overlap_sq: float


def phase_from_expectations(x: float, y: float, eps_mag: float = EPS_MAG) -> float:
    """``atan2(y, x)`` in (-pi, pi]; :class:`PhaseUndefined` when ``hypot(x, y) <= eps_mag``."""
    if np.hypot(x, y) <= eps_mag:
        raise PhaseUndefined(
            f"<phi|C|phi> = {x!r} + {y!r}i vanishes (|.| <= {eps_mag:.1e}); the weak value is ~0 and has no phase"
        )
    ph = float(np.arctan2(y, x))
    # atan2 returns -pi for y = -0.0; fold it onto the closed end of the range.
    return np.pi if ph == -np.pi else ph


def recover_phase(a, psi, phi, eps_mag: float = EPS_MAG, eps_orth: float = EPS_ORTH) -> PhaseReport:
    """Recover ``arg A_w`` from ``x = <phi|C_R|phi>`` and ``y = <phi|C_I|phi>``."""
    a, u, w = _inputs(a, psi, phi)
    overlap = _guarded_overlap(u, w, eps_orth)
    split = build_C(a, u)
    xc = linalg.sandwich(w, split.c_r, w)
    yc = linalg.sandwich(w, split.c_i, w)
    x, y = xc.real, yc.real
    ph = phase_from_expectations(x, y, eps_mag)
    overlap_sq = abs(overlap) ** 2
    return PhaseReport(x, y, ph, complex(x, y) / overlap_sq, overlap_sq)


def pauli_matrix(label: str) -> ComplexMatrix:
    """Dense matrix of a Pauli string; the leftmost character acts on the highest qubit."""
    label = label.upper()
    if not label or any(ch not in PAULI_LABELS for ch in label):
        raise InputError(f"bad Pauli string {label!r}")
    out = np.ones((1, 1), dtype=np.complex128)
    for ch in label:
        out = np.kron(out, _SINGLE_PAULI[ch])
    return out


def pauli_decompose(m: npt.ArrayLike) -> dict[str, complex]:
    """Coefficients ``Tr(P^dagger M) / 2^n`` over all Pauli strings.

    Keys are ordered lexicographically over ``IXYZ`` with qubit 0 as the
    rightmost character; coefficients with magnitude at most 1e-14 are
    omitted.
    """
    m = linalg.as_matrix(m)
    dim = m.shape[0]
    n = linalg.num_qubits(dim)
    if n < 0:
        raise NotPowerOfTwoDim(f"Pauli decomposition needs dim = 2^n, got {dim}")
    if n == 0:
        return {"": complex(m[0, 0])} if abs(m[0, 0]) > PAULI_DROP else {}
    idx = np.arange(dim)
    # P|j> = i^{|x&z|} (-1)^{|j&z|} |j^x>, so Tr(P^dagger M) = sum_j conj(phase_j) M[j^x, j].
    parity = np.array([[bin(j & z).count("1") & 1 for j in range(dim)] for z in range(dim)])
    signs = 1.0 - 2.0 * parity
    out: dict[str, complex] = {}
    for letters in itertools.product(PAULI_LABELS, repeat=n):
        label = "".join(letters)
        xmask = zmask = 0
        for pos, ch in enumerate(label):
            q = n - 1 - pos
            if ch in "XY":
                xmask |= 1 << q
            if ch in "YZ":
                zmask |= 1 << q
        ny = bin(xmask & zmask).count("1")
        col = m[idx ^ xmask, idx]
        total = np.dot(signs[zmask], col) * _I_POWERS_CONJ[ny % 4]
        coeff = complex(total) / dim
        if abs(coeff) > PAULI_DROP:
            out[label] = coeff
    return out


def pauli_compose(coeffs: dict[str, complex], n_qubits: int | None = None) -> ComplexMatrix:
    """Inverse of :func:`pauli_decompose`."""
    if not coeffs:
        if n_qubits is None:
            raise InputError("empty Pauli map needs an explicit qubit count")
        return np.zeros((2**n_qubits, 2**n_qubits), dtype=np.complex128)
    lengths = {len(k) for k in coeffs}
    if len(lengths) != 1 or (n_qubits is not None and lengths != {n_qubits}):
        raise InputError(f"Pauli strings have inconsistent lengths {sorted(lengths)}")
    return sum(complex(c) * pauli_matrix(k) for k, c in coeffs.items())

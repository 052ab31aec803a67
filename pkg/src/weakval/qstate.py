"""Pure states, projectors, density matrices and gate-sequence preparations.

Qubit 0 is the least-significant bit of a basis-state index, so for two
qubits ``|q1 q0>`` maps to index ``2*q1 + q0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt

from . import linalg
from .errors import (
    BadProbabilities,
    DimensionMismatch,
    InputError,
    NotDensityMatrix,
    NotNormalized,
    NotUnitary,
    ZeroVector,
)
from .linalg import ComplexMatrix, ComplexVector, EigenDecomposition

NORM_ACCEPT = 1e-9
NORM_REJECT = 1e-6
PROB_TOL = 1e-9

_SQ2 = 1.0 / np.sqrt(2.0)
FIXED_GATES: dict[str, np.ndarray] = {
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "s": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=np.complex128),
    "t": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
    "tdg": np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=np.complex128),
}
ROTATION_GATES = ("rx", "ry", "rz")
_INVERSES = {"h": "h", "x": "x", "y": "y", "z": "z", "s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}


def rotation_matrix(name: str, angle: float) -> ComplexMatrix:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if name == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if name == "ry":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if name == "rz":
        return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=np.complex128)
    raise InputError(f"unknown rotation gate {name!r}")


@dataclass(frozen=True)
class Gate:
    """One step of a preparation circuit.

    Named gates act on ``targets[0]``. A ``"unitary"`` gate carries an
    explicit matrix whose local index has ``targets[0]`` as its lowest bit.
    """

    name: str
    targets: tuple[int, ...]
    angle: float | None = None
    matrix: ComplexMatrix | None = field(default=None, compare=False)

    def __post_init__(self):
        name = self.name.lower()
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if any(t < 0 for t in self.targets) or len(set(self.targets)) != len(self.targets):
            raise InputError(f"invalid target qubits {self.targets}")
        if name == "unitary":
            if self.matrix is None:
                raise InputError("unitary gate needs a matrix")
            m = linalg.as_matrix(self.matrix)
            if m.shape[0] != 2 ** len(self.targets):
                raise DimensionMismatch(
                    f"unitary of size {m.shape[0]} does not match {len(self.targets)} target qubit(s)"
                )
            if not linalg.is_unitary(m, 1e-9):
                raise NotUnitary("explicit gate matrix is not unitary within 1e-9")
            object.__setattr__(self, "matrix", m)
        elif name in ROTATION_GATES:
            if self.angle is None:
                raise InputError(f"{name} needs an angle")
            if len(self.targets) != 1:
                raise InputError(f"{name} acts on exactly one qubit")
        elif name in FIXED_GATES:
            if len(self.targets) != 1:
                raise InputError(f"{name} acts on exactly one qubit")
        else:
            raise InputError(f"unknown gate {self.name!r}")

    def local_matrix(self) -> ComplexMatrix:
        if self.name == "unitary":
            return self.matrix
        if self.name in ROTATION_GATES:
            return rotation_matrix(self.name, self.angle)
        return FIXED_GATES[self.name]

    def inverse(self) -> Gate:
        if self.name == "unitary":
            return Gate("unitary", self.targets, matrix=self.matrix.conj().T)
        if self.name in ROTATION_GATES:
            return Gate(self.name, self.targets, angle=-self.angle)
        return Gate(_INVERSES[self.name], self.targets)


@dataclass(frozen=True)
class GateSequence:
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def max_qubit(self) -> int:
        return max((max(g.targets) for g in self.gates), default=-1)

    def unitary(self, dim: int) -> ComplexMatrix:
        """Full ``dim x dim`` matrix of the sequence (first gate applied first)."""
        u = np.eye(dim, dtype=np.complex128)
        for col in range(dim):
            u[:, col] = _apply_gates(self.gates, u[:, col], dim)
        return u


def seq(*gates: Gate) -> GateSequence:
    return GateSequence(tuple(gates))


def apply_local(u: ComplexMatrix, targets: Sequence[int], state: ComplexVector) -> ComplexVector:
    """Apply a ``2^k x 2^k`` unitary on ``targets`` to a full state vector."""
    dim = state.shape[0]
    n = linalg.num_qubits(dim)
    if n < 0:
        raise DimensionMismatch(f"gate sequences need dim = 2^n, got {dim}")
    if max(targets) >= n:
        raise DimensionMismatch(f"target qubit {max(targets)} out of range for {n} qubit(s)")
    idx = np.arange(dim)
    local = np.zeros(dim, dtype=np.intp)
    mask = 0
    for j, t in enumerate(targets):
        local |= ((idx >> t) & 1) << j
        mask |= 1 << t
    rest = idx & ~mask
    out = np.zeros(dim, dtype=np.complex128)
    for col in range(2 ** len(targets)):
        src = rest.copy()
        for j, t in enumerate(targets):
            if (col >> j) & 1:
                src |= 1 << t
        out += u[local, col] * state[src]
    return out


def _apply_gates(gates: Iterable[Gate], state: ComplexVector, dim: int) -> ComplexVector:
    for g in gates:
        state = apply_local(g.local_matrix(), g.targets, state)
    return state


@dataclass(frozen=True)
class PureState:
    amplitudes: ComplexVector
    prep: GateSequence | None = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def vector(self) -> ComplexVector:
        return self.amplitudes


def make_pure(amplitudes: npt.ArrayLike, prep: GateSequence | None = None) -> PureState:
    """Validate and wrap amplitudes.

    Norm deviations up to 1e-9 are accepted as-is, up to 1e-6 renormalized,
    anything larger rejected with :class:`NotNormalized`.
    """
    v = linalg.as_vector(amplitudes)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroVector("state vector is zero")
    dev = abs(norm * norm - 1.0)
    if dev > NORM_REJECT:
        raise NotNormalized(f"state norm^2 is {norm * norm:.12g}, expected 1")
    if dev > NORM_ACCEPT:
        v = v / norm
    return PureState(v, prep)


def basis_state(index: int, dim: int) -> PureState:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    n = linalg.num_qubits(dim)
    if n < 0:
        return PureState(v)
    return PureState(v, GateSequence(tuple(Gate("x", (q,)) for q in range(n) if (index >> q) & 1)))


def apply_sequence(sequence: GateSequence, psi: PureState | ComplexVector) -> PureState:
    v = psi.amplitudes if isinstance(psi, PureState) else linalg.as_vector(psi)
    out = _apply_gates(sequence.gates, v, v.shape[0])
    return make_pure(out)


def invert_sequence(sequence: GateSequence) -> GateSequence:
    return GateSequence(tuple(g.inverse() for g in reversed(sequence.gates)))


def prepare(sequence: GateSequence, dim: int) -> PureState:
    """Apply ``sequence`` to ``|0...0>`` and remember the recipe."""
    zero = np.zeros(dim, dtype=np.complex128)
    zero[0] = 1.0
    return PureState(apply_sequence(sequence, zero).amplitudes, sequence)


def fidelity(u: PureState | ComplexVector, v: PureState | ComplexVector) -> float:
    """``|<u|v>|^2``; equal to 1 iff the states agree up to global phase."""
    a = u.amplitudes if isinstance(u, PureState) else u
    b = v.amplitudes if isinstance(v, PureState) else v
    return float(abs(np.vdot(a, b)) ** 2)


def same_up_to_phase(u, v, tol: float = 1e-9) -> bool:
    return fidelity(u, v) >= 1.0 - tol


@dataclass(frozen=True)
class Projector:
    matrix: ComplexMatrix


def projector_of(psi: PureState) -> Projector:
    return Projector(linalg.outer(psi.amplitudes, psi.amplitudes))


@dataclass(frozen=True)
class DensityMatrixState:
    matrix: ComplexMatrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectral(self) -> EigenDecomposition:
        # Recomputation under a race yields the same value, so no lock.
        return linalg.eig_hermitian(self.matrix)

    def ensemble(self, cutoff: float = 1e-12) -> list[tuple[float, ComplexVector]]:
        """Spectral ensemble ``[(p_k, psi_k)]`` with negligible weights dropped."""
        dec = self.spectral
        return [
            (float(p), dec.eigenvectors[:, k].copy())
            for k, p in enumerate(dec.eigenvalues)
            if p > cutoff
        ]

    def is_pure(self, tol: float = 1e-10) -> bool:
        return abs(float(np.real(np.trace(self.matrix @ self.matrix))) - 1.0) <= tol


def make_density(matrix: npt.ArrayLike) -> DensityMatrixState:
    """Validate Hermiticity (1e-10), unit trace (1e-9) and PSD (eigenvalues >= -1e-10)."""
    m = linalg.as_matrix(matrix)
    if not linalg.is_hermitian(m, 1e-10):
        raise NotDensityMatrix("density matrix is not Hermitian")
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > 1e-9:
        raise NotDensityMatrix(f"density matrix has trace {tr.real:.12g}, expected 1")
    m = 0.5 * (m + m.conj().T)
    rho = DensityMatrixState(m)
    low = float(rho.spectral.eigenvalues[0])
    if low < -1e-10:
        raise NotDensityMatrix(f"density matrix has negative eigenvalue {low:.3e}")
    return rho


def check_probabilities(probs: Sequence[float]) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise BadProbabilities("need at least one probability")
    if np.any(~np.isfinite(p)) or np.any(p < 0):
        raise BadProbabilities(f"probabilities must be non-negative, got {p.tolist()}")
    if abs(float(p.sum()) - 1.0) > PROB_TOL:
        raise BadProbabilities(f"probabilities sum to {p.sum():.12g}, expected 1")
    return p


def mix(pairs: Sequence[tuple[float, PureState]]) -> DensityMatrixState:
    probs = check_probabilities([p for p, _ in pairs])
    dims = {psi.dim for _, psi in pairs}
    if len(dims) != 1:
        raise DimensionMismatch(f"mixture components have different dimensions {sorted(dims)}")
    m = sum(p * projector_of(psi).matrix for p, (_, psi) in zip(probs, pairs))
    return make_density(m)


def density_of(psi: PureState) -> DensityMatrixState:
    return DensityMatrixState(projector_of(psi).matrix)


def state_vector(psi: PureState | npt.ArrayLike) -> ComplexVector:
    """Amplitudes of a :class:`PureState`, or a raw vector validated by :func:`make_pure`."""
    if isinstance(psi, PureState):
        return psi.amplitudes
    return make_pure(psi).amplitudes

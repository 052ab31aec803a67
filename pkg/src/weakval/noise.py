"""Kraus channels and the state-specific error witness.

The witness for a gate ``U = exp(-i theta A)`` acting on ``psi`` is
``B = A P_psi A``. Its ideal expectation ``<U psi|B|U psi>`` is compared
with ``Tr(B E(P_psi))`` for the noisy implementation ``E`` of the gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import BadParameter, ChannelNotTracePreserving, DimensionMismatch
from .linalg import ComplexMatrix
from .qstate import DensityMatrixState, FIXED_GATES, PureState, make_density, state_vector
from .weakcore import effective_operator

COMPLETENESS_TOL = 1e-9
BLIND_SPOT_TOL = 1e-10
DEPOLARIZING_INSENSITIVE = "depolarizing-insensitive"

_I2 = np.eye(2, dtype=np.complex128)


@dataclass(frozen=True)
class KrausChannel:
    kraus_ops: tuple[ComplexMatrix, ...]
    label: str = "kraus"

    def __post_init__(self):
        ops = tuple(linalg.as_matrix(k) for k in self.kraus_ops)
        if not ops:
            raise BadParameter("a channel needs at least one Kraus operator")
        dims = {k.shape[0] for k in ops}
        if len(dims) != 1:
            raise DimensionMismatch(f"Kraus operators have different sizes {sorted(dims)}")
        object.__setattr__(self, "kraus_ops", ops)
        residual = self.completeness_residual()
        if residual > COMPLETENESS_TOL:
            raise ChannelNotTracePreserving(
                f"channel {self.label!r} violates sum_k K_k^dagger K_k = I (max residual {residual:.3e})",
                residual,
            )

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def completeness_residual(self) -> float:
        total = sum(k.conj().T @ k for k in self.kraus_ops)
        return float(np.max(np.abs(total - np.eye(self.kraus_ops[0].shape[0]))))

    def then(self, other: KrausChannel) -> KrausChannel:
        """``other`` applied after ``self``."""
        if other.dim != self.dim:
            raise DimensionMismatch(f"cannot compose channels of dim {self.dim} and {other.dim}")
        ops = tuple(b @ a for b in other.kraus_ops for a in self.kraus_ops)
        return KrausChannel(ops, f"{other.label} o {self.label}")


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise BadParameter(f"{name} must lie in [0, 1], got {value!r}")
    return value


def _nonzero(ops):
    return tuple(k for k in ops if np.any(k != 0))


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=np.complex128),), "identity")


def depolarizing(eps: float) -> KrausChannel:
    """``rho -> (1 - eps) rho + eps I/2`` on one qubit."""
    eps = _check_unit_interval("depolarizing probability", eps)
    ops = (
        np.sqrt(1 - 0.75 * eps) * _I2,
        np.sqrt(eps / 4) * FIXED_GATES["x"],
        np.sqrt(eps / 4) * FIXED_GATES["y"],
        np.sqrt(eps / 4) * FIXED_GATES["z"],
    )
    return KrausChannel(_nonzero(ops), f"depolarizing({eps:g})")


def amplitude_damping(gamma: float) -> KrausChannel:
    gamma = _check_unit_interval("damping rate", gamma)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=np.complex128)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=np.complex128)
    return KrausChannel(_nonzero((k0, k1)), f"amplitude_damping({gamma:g})")


def phase_damping(lam: float) -> KrausChannel:
    lam = _check_unit_interval("dephasing rate", lam)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - lam)]], dtype=np.complex128)
    k1 = np.array([[0, 0], [0, np.sqrt(lam)]], dtype=np.complex128)
    return KrausChannel(_nonzero((k0, k1)), f"phase_damping({lam:g})")


def unitary_channel(u, label: str = "unitary") -> KrausChannel:
    return KrausChannel((linalg.as_matrix(u),), label)


def coherent_overrotation(a, delta_theta: float) -> KrausChannel:
    """Unitary channel ``exp(-i delta_theta A)``."""
    return unitary_channel(linalg.exp_hermitian_times(a, -1j * float(delta_theta)), f"overrotation({delta_theta:g})")


def ideal_gate(a, theta: float) -> KrausChannel:
    return unitary_channel(linalg.exp_hermitian_times(a, -1j * float(theta)), f"U({theta:g})")


def noisy_gate(a, theta: float, noise: KrausChannel) -> KrausChannel:
    """``noise o U`` with ``U = exp(-i theta A)``: the full physical gate handed to :func:`witness_run`."""
    return ideal_gate(a, theta).then(noise)


def apply_channel(ch: KrausChannel, rho: DensityMatrixState | np.ndarray) -> DensityMatrixState:
    """``sum_k K_k rho K_k^dagger``, revalidated as a density matrix."""
    m = rho.matrix if isinstance(rho, DensityMatrixState) else linalg.as_matrix(rho)
    if m.shape[0] != ch.dim:
        raise DimensionMismatch(f"channel of dim {ch.dim} applied to state of dim {m.shape[0]}")
    residual = ch.completeness_residual()
    if residual > COMPLETENESS_TOL:
        raise ChannelNotTracePreserving(f"channel {ch.label!r} is not trace preserving", residual)
    out = sum(k @ m @ k.conj().T for k in ch.kraus_ops)
    return make_density(0.5 * (out + out.conj().T))


@dataclass(frozen=True)
class WitnessReport:
    witness: ComplexMatrix
    ideal: float
    real_val: float
    delta: float
    theta: float
    channel_label: str
    flags: tuple[str, ...] = field(default=())

    @property
    def depolarizing_insensitive(self) -> bool:
        return DEPOLARIZING_INSENSITIVE in self.flags


def witness_run(a, psi: PureState, theta: float, channel: KrausChannel) -> WitnessReport:
    """Compare the ideal and noisy expectations of ``B = A P_psi A`` after the gate.

    ``channel`` is the complete noisy gate, intended unitary included
    (see :func:`noisy_gate`). Reports whose ideal value equals ``Tr(B)/d``
    carry the ``depolarizing-insensitive`` flag: depolarizing noise cannot
    move the witness there.
    """
    a = linalg.require_hermitian(a, name="gate generator")
    u = state_vector(psi)
    if u.shape[0] != a.shape[0] or channel.dim != a.shape[0]:
        raise DimensionMismatch(
            f"generator dim {a.shape[0]}, state dim {u.shape[0]}, channel dim {channel.dim} must agree"
        )
    b = effective_operator(a, u)
    gate = linalg.exp_hermitian_times(a, -1j * float(theta))
    out_ideal = gate @ u
    ideal = float(linalg.sandwich(out_ideal, b, out_ideal).real)
    noisy = apply_channel(channel, np.outer(u, u.conj()))
    real_val = float(np.real(np.trace(b @ noisy.matrix)))
    flags = ()
    if abs(ideal - float(np.real(np.trace(b))) / a.shape[0]) <= BLIND_SPOT_TOL:
        flags = (DEPOLARIZING_INSENSITIVE,)
    return WitnessReport(b, ideal, real_val, abs(ideal - real_val), float(theta), channel.label, flags)


def witness_sweep(
    a,
    psi: PureState,
    theta: float,
    channel_family: Callable[[float], KrausChannel],
    grid: Sequence[float],
) -> list[WitnessReport]:
    """One :func:`witness_run` per grid value, in grid order."""
    return [witness_run(a, psi, theta, channel_family(float(g))) for g in grid]


def depolarizing_family(a, theta: float) -> Callable[[float], KrausChannel]:
    """Ideal gate followed by ``depolarizing(eps)``."""
    return lambda eps: noisy_gate(a, theta, depolarizing(eps))


def amplitude_damping_family(a, theta: float) -> Callable[[float], KrausChannel]:
    return lambda gamma: noisy_gate(a, theta, amplitude_damping(gamma))


def phase_damping_family(a, theta: float) -> Callable[[float], KrausChannel]:
    return lambda lam: noisy_gate(a, theta, phase_damping(lam))


def overrotation_family(a, theta: float) -> Callable[[float], KrausChannel]:
    """Gate angle ``theta + delta``: a purely coherent error."""
    return lambda delta: ideal_gate(a, theta).then(coherent_overrotation(a, delta))


FAMILIES = {
    "depolarizing": depolarizing_family,
    "amplitude_damping": amplitude_damping_family,
    "phase_damping": phase_damping_family,
    "overrotation": overrotation_family,
}

"""Shot-based strong measurements.

Every estimate is drawn from ``numpy.random.Generator(PCG64(seed))``. Seeds
for sub-experiments are derived with :func:`derive_seed`, a SplitMix64
finalizer applied to ``seed XOR splitmix(index)``, so each component's
stream is fixed by ``(seed, index)`` alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import BadParameter, DimensionMismatch, NotUnitaryObservable, PhaseUndefined
from .phase import build_C, phase_from_expectations
from .qstate import (
    GateSequence,
    PureState,
    apply_local,
    check_probabilities,
    invert_sequence,
    prepare,
    state_vector,
)
from .weakcore import effective_operator

MERGE_TOL = 1e-9
_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Child seed for component ``index`` of an experiment seeded with ``seed``."""
    return _splitmix64((int(seed) & _MASK64) ^ _splitmix64(int(index) & _MASK64))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


@dataclass(frozen=True)
class ShotEstimate:
    mean: float
    shots: int
    std_error: float
    seed: int
    exact: float | None = None

    def within(self, sigma: float, k: float = 3.0) -> bool:
        return self.exact is not None and abs(self.mean - self.exact) <= k * sigma


def born_probabilities(o, phi) -> list[tuple[float, float]]:
    """Outcome distribution of a strong measurement of ``O`` on ``phi``.

    Eigenvalues closer than 1e-9 are merged into one outcome, so the result
    depends only on the eigenspaces of ``O``.
    """
    o = linalg.require_hermitian(o, name="measured observable")
    w = state_vector(phi)
    if w.shape[0] != o.shape[0]:
        raise DimensionMismatch(f"state of dim {w.shape[0]} vs observable of dim {o.shape[0]}")
    dec = linalg.eig_hermitian(o)
    probs = np.abs(dec.eigenvectors.conj().T @ w) ** 2
    merged: list[list[float]] = []
    for lam, p in zip(dec.eigenvalues, probs):
        if merged and lam - merged[-1][0] <= MERGE_TOL:
            merged[-1][1] += p
        else:
            merged.append([float(lam), float(p)])
    return [(lam, p) for lam, p in merged]


def _sample_mean(values: np.ndarray, probs: np.ndarray, shots: int, rng: np.random.Generator) -> tuple[float, float]:
    p = np.clip(probs, 0.0, None)
    p = p / p.sum()
    counts = rng.multinomial(shots, p)
    mean = float(np.dot(counts, values)) / shots
    if shots < 2:
        return mean, 0.0
    var = float(np.dot(counts, (values - mean) ** 2)) / (shots - 1)
    return mean, float(np.sqrt(var / shots))


def estimate_expectation(o, phi, shots: int, seed: int) -> ShotEstimate:
    """Average of ``shots`` i.i.d. Born-rule outcomes of ``O`` measured on ``phi``."""
    if shots < 1:
        raise BadParameter(f"shots must be >= 1, got {shots}")
    dist = born_probabilities(o, phi)
    values = np.array([lam for lam, _ in dist])
    probs = np.array([p for _, p in dist])
    mean, se = _sample_mean(values, probs, shots, make_rng(seed))
    return ShotEstimate(mean, shots, se, seed, exact=float(np.dot(values, probs)))


def _bernoulli(p: float, shots: int, seed: int) -> ShotEstimate:
    p = min(max(p, 0.0), 1.0)
    k = int(make_rng(seed).binomial(shots, p))
    se = 0.0 if shots < 2 else float(np.sqrt(k * (shots - k) / (shots * (shots - 1)) / shots))
    return ShotEstimate(k / shots, shots, se, seed, exact=p)


def _gate_observable(a) -> np.ndarray:
    a = linalg.require_hermitian(a, name="observable")
    if not linalg.is_unitary(a, 1e-9):
        raise NotUnitaryObservable(
            "the observable is Hermitian but not unitary, so it cannot be applied as a gate; "
            "estimate <phi|B|phi> with estimate_expectation on B = A P_psi A instead"
        )
    return a


def transition_probability(a, psi_prep: GateSequence, phi_prep: GateSequence) -> float:
    """Ground-state probability of ``phi_prep^dagger A psi_prep |0...0>``, i.e. ``|<phi|A|psi>|^2``."""
    a = _gate_observable(a)
    dim = a.shape[0]
    state = prepare(psi_prep, dim).amplitudes
    state = a @ state
    inv = invert_sequence(phi_prep)
    for g in inv:
        state = apply_local(g.local_matrix(), g.targets, state)
    return float(abs(state[0]) ** 2)


def amplitude_protocol(a, psi_prep: GateSequence, phi_prep: GateSequence, shots: int, seed: int) -> ShotEstimate:
    """Prepare ``psi``, apply ``A`` as a gate, undo the ``phi`` preparation, count ``|0...0>``.

    The population mean is ``|<phi|A|psi>|^2``. ``A`` must be unitary as well
    as Hermitian; otherwise :class:`NotUnitaryObservable` is raised.
    """
    if shots < 1:
        raise BadParameter(f"shots must be >= 1, got {shots}")
    return _bernoulli(transition_probability(a, psi_prep, phi_prep), shots, seed)


def mixed_average_protocol(
    a,
    components: Sequence[tuple[float, GateSequence]],
    phi_prep: GateSequence,
    shots_per_component: int,
    seed: int,
) -> ShotEstimate:
    """Run :func:`amplitude_protocol` per mixture component and combine with the weights.

    Component ``k`` uses ``derive_seed(seed, k)``. The population mean is
    ``sum_k p_k |<phi|A|psi_k>|^2``.
    """
    probs = check_probabilities([p for p, _ in components])
    runs = [
        amplitude_protocol(a, prep, phi_prep, shots_per_component, derive_seed(seed, k))
        for k, (_, prep) in enumerate(components)
    ]
    mean = exact = var = 0.0
    for p, r in zip(probs, runs):
        mean += p * r.mean
        exact += p * r.exact
        var += (p * r.std_error) ** 2
    return ShotEstimate(float(mean), shots_per_component * len(runs), float(np.sqrt(var)), seed, exact=float(exact))


def weighted_binomial_sigma(weights: Sequence[float], probs: Sequence[float], shots: int) -> float:
    """Standard deviation of ``sum_k w_k * Binomial(shots, p_k) / shots``."""
    return float(np.sqrt(sum(w * w * p * (1 - p) for w, p in zip(weights, probs)) / shots))


@dataclass(frozen=True)
class SampledWeakValue:
    """Weak value rebuilt from four sampled expectation values."""

    x: ShotEstimate  # <phi|C_R|phi>
    y: ShotEstimate  # <phi|C_I|phi>
    b: ShotEstimate  # <phi|B|phi>
    p: ShotEstimate  # <phi|P_psi|phi>
    modulus: float | None
    phase: float | None


def sampled_weak_value(a, psi: PureState, phi: PureState, shots: int, seed: int) -> SampledWeakValue:
    """Estimate modulus and phase of the weak value purely from strong measurements.

    The budget is split evenly: ``shots // 2`` each for ``C_R`` and ``C_I``,
    and likewise for ``B`` and ``P_psi``.
    """
    half = max(1, shots // 2)
    u = state_vector(psi)
    split = build_C(a, u)
    observables = (split.c_r, split.c_i, effective_operator(a, u), np.outer(u, u.conj()))
    x, y, b, p = (estimate_expectation(o, phi, half, derive_seed(seed, k)) for k, o in enumerate(observables))
    modulus = float(np.sqrt(max(b.mean, 0.0) / p.mean)) if p.mean > 0 else None
    try:
        phase = phase_from_expectations(x.mean, y.mean)
    except PhaseUndefined:
        phase = None
    return SampledWeakValue(x, y, b, p, modulus, phase)

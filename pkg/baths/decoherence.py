"""Spectral width, worst-case fidelity decay and random bath models"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from ftnm.exceptions import DomainError
from operators.linalg import eigh, evolve, random_hermitian
from operators.models import Operator, StateVector

from .models import (
    COUPLING_LABELS,
    CouplingTerm,
    SpectrumSummary,
    SystemBathModel,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FidelityReport:
    """Outcome of a fidelity-decay check at one time"""
    t: float
    delta: float
    min_sampled_fidelity: float
    analytic_floor: float
    worst_state_fidelity: float
    n_samples: int

    def passed(self, slack: float | None = None) -> bool:
        slack = settings.FTNM_BOUND_SLACK if slack is None else slack
        return (
            self.min_sampled_fidelity >= self.analytic_floor - slack
            and abs(self.worst_state_fidelity - self.analytic_floor) <= slack
        )


def spectral_width(H: Operator) -> SpectrumSummary:
    values, _ = eigh(H)
    return SpectrumSummary(mu_min=float(values[0]), mu_max=float(values[-1]))


def minimal_coupling(H: Operator) -> Operator:
    """Shifted representative H + alpha_opt·I, whose norm is the width"""
    return H.shifted(spectral_width(H).alpha_opt)


def _check_small_time(delta: float, t: float) -> None:
    if delta < 0 or t < 0:
        raise DomainError('Spectral width and time must be nonnegative')
    if delta * t > math.pi / 2 + 1e-12:
        raise DomainError(
            f'delta*t = {delta * t:.6g} exceeds pi/2; the cosine floor is '
            f'only claimed for small times'
        )


def min_fidelity_analytic(delta: float, t: float) -> float:
    """cos(Δt), valid for Δt ≤ π/2"""
    _check_small_time(delta, t)
    return math.cos(delta * t)


def worst_state(H: Operator) -> StateVector:
    """(ψ_max + ψ_min)/√2 over extremal eigenvectors of H

    In a degenerate eigenspace the eigenvector is the projection of the
    first computational basis state with weight there, so the leading
    amplitudes decide and not the order the eigensolver returns. Each
    eigenvector gets a fixed global phase (largest component real and
    positive).
    """
    values, vectors = eigh(H)
    psi_min = _extremal_vector(values, vectors, values[0])
    psi_max = _extremal_vector(values, vectors, values[-1])
    return StateVector((psi_max + psi_min) / np.sqrt(2))


def _extremal_vector(
    values: np.ndarray,
    vectors: np.ndarray,
    target: float,
) -> np.ndarray:
    atol = settings.FTNM_NORM_ATOL
    space = vectors[:, np.abs(values - target) <= atol * max(1, abs(target))]
    weights = np.linalg.norm(space, axis=1)
    first = int(np.argmax(weights > atol))
    vector = space @ space[first].conj()
    return _fix_phase(vector / np.linalg.norm(vector))


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    pivot = vector[np.argmax(np.round(np.abs(vector), 12))]
    return vector * (abs(pivot) / pivot)


def fidelity_decay(
    H: Operator,
    t: float,
    n_samples: int,
    seed: int,
) -> FidelityReport:
    """Samples |⟨ψ|exp(−iHt)|ψ⟩| over random states of the full space"""
    delta = spectral_width(H).delta
    floor = min_fidelity_analytic(delta, t)
    U = evolve(H, t)
    logger.debug('Fidelity decay: dim=%d t=%g samples=%d', H.dim, t, n_samples)

    rng = np.random.default_rng(seed)
    states = (
        rng.normal(size=(H.dim, n_samples))
        + 1j * rng.normal(size=(H.dim, n_samples))
    )
    states /= np.linalg.norm(states, axis=0)
    overlaps = np.abs(np.sum(states.conj() * (U.matrix @ states), axis=0))
    min_sampled = float(overlaps.min()) if n_samples else 1.0

    psi = worst_state(H)
    worst = float(abs(np.vdot(psi.amplitudes, psi.evolved(U).amplitudes)))

    report = FidelityReport(
        t=t,
        delta=delta,
        min_sampled_fidelity=min_sampled,
        analytic_floor=floor,
        worst_state_fidelity=worst,
        n_samples=n_samples,
    )
    if not report.passed():
        logger.warning('Fidelity floor violated: %s', report)
    return report


def verify_fidelity_decay(
    model: SystemBathModel,
    t: float,
    n_samples: int,
    seed: int,
) -> FidelityReport:
    """Fidelity check in the setting where only the coupling acts"""
    if not model.is_uncoupled_free():
        raise DomainError(
            'Fidelity decay is checked with zero system and bath Hamiltonians'
        )
    return fidelity_decay(model.coupling_hamiltonian(), t, n_samples, seed)


def depolarizing_fidelity(p: float) -> float:
    """Worst-case fidelity √(1 − p/2) of a depolarizing channel"""
    if not 0 <= p <= 1:
        raise DomainError(f'Depolarizing probability {p} outside [0, 1]')
    return math.sqrt(1 - p / 2)


def random_model(
    rng: np.random.Generator,
    n_system_qubits: int,
    bath_dim: int,
    t0: float,
    lambda0: float,
    free: bool = True,
) -> SystemBathModel:
    """Random model whose per-qubit spectral widths lie in (λ0/2, λ0]

    With free=False the system and bath Hamiltonians are zero.
    """
    terms = []
    for qubit in range(n_system_qubits):
        qubit_terms = []
        for label in COUPLING_LABELS:
            A = random_hermitian(bath_dim, rng)
            A = A.shifted(-np.trace(A.matrix).real / bath_dim)
            qubit_terms.append(CouplingTerm(label, A, qubit))
        draft = SystemBathModel(
            n_system_qubits=n_system_qubits,
            bath_dim=bath_dim,
            coupling_terms=qubit_terms,
            system_hamiltonian=Operator.zeros(2 ** n_system_qubits),
            bath_hamiltonian=Operator.zeros(bath_dim),
            t0=t0,
            lambda0=np.inf,
        )
        width = spectral_width(draft.qubit_coupling(qubit)).delta
        scale = lambda0 * (1 - rng.random() / 2) / width
        terms.extend(
            CouplingTerm(term.pauli, term.bath_operator.scaled(scale), qubit)
            for term in qubit_terms
        )

    system_dim = 2 ** n_system_qubits
    if free:
        system_hamiltonian = random_hermitian(system_dim, rng)
        bath_hamiltonian = random_hermitian(bath_dim, rng)
    else:
        system_hamiltonian = Operator.zeros(system_dim)
        bath_hamiltonian = Operator.zeros(bath_dim)
    return SystemBathModel(
        n_system_qubits=n_system_qubits,
        bath_dim=bath_dim,
        coupling_terms=terms,
        system_hamiltonian=system_hamiltonian,
        bath_hamiltonian=bath_hamiltonian,
        t0=t0,
        lambda0=lambda0,
    )

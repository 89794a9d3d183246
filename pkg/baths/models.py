from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from django.conf import settings

from ftnm.exceptions import DomainError, MalformedOperatorError
from operators.linalg import is_hermitian, kron, pauli
from operators.models import Operator

COUPLING_LABELS = ('X', 'Y', 'Z')


@dataclass(frozen=True, eq=False)
class CouplingTerm:
    """Term σ_k ⊗ A_k coupling one system qubit to the bath"""
    pauli: str
    bath_operator: Operator
    qubit: int = 0

    def __post_init__(self):
        label = self.pauli.upper()
        if label not in COUPLING_LABELS:
            raise MalformedOperatorError(
                f'Coupling label must be one of {COUPLING_LABELS}, '
                f'got {self.pauli!r}'
            )
        object.__setattr__(self, 'pauli', label)
        A = self.bath_operator
        if not (A.hermitian_hint or is_hermitian(A)):
            raise MalformedOperatorError(
                f'Bath operator of {label} term is not Hermitian'
            )
        traceless = A.matrix - np.trace(A.matrix) / A.dim * np.eye(A.dim)
        if np.allclose(traceless, 0, atol=settings.FTNM_HERMITIAN_ATOL):
            raise MalformedOperatorError(
                f'Bath operator of {label} term is proportional to identity'
            )


@dataclass(frozen=True)
class SpectrumSummary:
    """Extreme eigenvalues of a Hermitian operator and its spectral width"""
    mu_min: float
    mu_max: float

    def __post_init__(self):
        if self.mu_min > self.mu_max:
            raise DomainError('mu_min exceeds mu_max')

    @property
    def delta(self) -> float:
        return (self.mu_max - self.mu_min) / 2

    @property
    def alpha_opt(self) -> float:
        """Shift making H + alpha·I of minimal norm"""
        return -(self.mu_max + self.mu_min) / 2


@dataclass(frozen=True, eq=False)
class SystemBathModel:
    """One or two system qubits coupled to a bath during one gate

    Operators act on system ⊗ bath, system qubit 0 most significant.
    """
    n_system_qubits: int
    bath_dim: int
    coupling_terms: tuple[CouplingTerm, ...]
    system_hamiltonian: Operator
    bath_hamiltonian: Operator
    t0: float
    lambda0: float

    def __post_init__(self):
        object.__setattr__(self, 'coupling_terms', tuple(self.coupling_terms))
        if self.n_system_qubits not in (1, 2):
            raise DomainError(
                f'Models have 1 or 2 system qubits, got {self.n_system_qubits}'
            )
        if self.bath_dim < 1:
            raise DomainError(f'Bath dimension {self.bath_dim} < 1')
        if self.t0 < 0 or self.lambda0 < 0:
            raise DomainError('Gate time and coupling bound are nonnegative')
        for name, operator, dim in (
            ('system', self.system_hamiltonian, self.system_dim),
            ('bath', self.bath_hamiltonian, self.bath_dim),
        ):
            if operator.dim != dim:
                raise MalformedOperatorError(
                    f'{name} Hamiltonian has dimension {operator.dim}, '
                    f'expected {dim}'
                )
            if not (operator.hermitian_hint or is_hermitian(operator)):
                raise MalformedOperatorError(
                    f'{name} Hamiltonian is not Hermitian'
                )
        for term in self.coupling_terms:
            if term.bath_operator.dim != self.bath_dim:
                raise MalformedOperatorError(
                    f'Bath operator has dimension {term.bath_operator.dim}, '
                    f'expected {self.bath_dim}'
                )
            if not 0 <= term.qubit < self.n_system_qubits:
                raise DomainError(f'No system qubit {term.qubit}')
        for qubit in range(self.n_system_qubits):
            values = la.eigvalsh(self.qubit_coupling(qubit).matrix)
            width = (values[-1] - values[0]) / 2
            if width > self.lambda0 + settings.FTNM_BOUND_SLACK:
                raise DomainError(
                    f'Spectral width {width:.6g} of qubit {qubit} exceeds '
                    f'lambda0={self.lambda0:.6g}'
                )

    def __repr__(self) -> str:
        return (
            f'SystemBathModel(n={self.n_system_qubits}, '
            f'bath_dim={self.bath_dim}, t0={self.t0}, '
            f'lambda0={self.lambda0})'
        )

    @property
    def system_dim(self) -> int:
        return 2 ** self.n_system_qubits

    @property
    def dim(self) -> int:
        return self.system_dim * self.bath_dim

    @property
    def eta(self) -> float:
        """Dimensionless error amplitude λ0·t0"""
        return self.lambda0 * self.t0

    def _embed(self, term: CouplingTerm) -> Operator:
        labels = ['I'] * self.n_system_qubits
        labels[term.qubit] = term.pauli
        return kron(pauli(''.join(labels)), term.bath_operator)

    def qubit_coupling(self, qubit: int) -> Operator:
        """H_SB[q] = Σ_k σ_k ⊗ A_k over the terms of one qubit"""
        coupling = Operator.zeros(self.dim)
        for term in self.coupling_terms:
            if term.qubit == qubit:
                coupling = coupling + self._embed(term)
        return coupling

    def coupling_hamiltonian(self) -> Operator:
        """H_SB, additive over system qubits with a shared bath"""
        coupling = Operator.zeros(self.dim)
        for qubit in range(self.n_system_qubits):
            coupling = coupling + self.qubit_coupling(qubit)
        return coupling

    def free_hamiltonian(self) -> Operator:
        """H_S ⊗ I + I ⊗ H_B"""
        return (
            kron(self.system_hamiltonian, Operator.identity(self.bath_dim))
            + kron(Operator.identity(self.system_dim), self.bath_hamiltonian)
        )

    def is_uncoupled_free(self) -> bool:
        """True when both system and bath Hamiltonians vanish"""
        return all(
            np.allclose(op.matrix, 0, atol=settings.FTNM_HERMITIAN_ATOL)
            for op in (self.system_hamiltonian, self.bath_hamiltonian)
        )

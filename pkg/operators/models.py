from dataclasses import dataclass
from typing import Any

import numpy as np
from django.conf import settings

from ftnm.exceptions import DomainError, MalformedOperatorError


def _frozen_array(values: Any, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex square matrix

    Carrier for Hamiltonians, unitaries and fault operators. The matrix is
    copied on construction and made read-only.
    """
    matrix: np.ndarray
    hermitian_hint: bool = False

    def __post_init__(self):
        try:
            matrix = _frozen_array(self.matrix, complex)
        except (TypeError, ValueError) as exc:
            raise MalformedOperatorError(f'Not a matrix: {exc}') from exc
        if matrix.ndim != 2 or matrix.size == 0:
            raise MalformedOperatorError(
                f'Expected a non-empty 2-d array, got shape {matrix.shape}'
            )
        if matrix.shape[0] != matrix.shape[1]:
            raise MalformedOperatorError(
                f'Expected a square matrix, got shape {matrix.shape}'
            )
        if matrix.shape[0] > settings.FTNM_MAX_DIM:
            raise MalformedOperatorError(
                f'Dimension {matrix.shape[0]} exceeds the limit '
                f'{settings.FTNM_MAX_DIM}'
            )
        if self.hermitian_hint and not np.allclose(
            matrix,
            matrix.conj().T,
            rtol=0,
            atol=settings.FTNM_HERMITIAN_ATOL,
        ):
            raise MalformedOperatorError('Operator marked Hermitian is not')
        object.__setattr__(self, 'matrix', matrix)

    def __repr__(self) -> str:
        return f'Operator(dim={self.dim}, hermitian={self.hermitian_hint})'

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def entries(self) -> tuple[complex, ...]:
        """Entries in row-major order"""
        return tuple(self.matrix.ravel())

    @classmethod
    def identity(cls, dim: int) -> 'Operator':
        return cls(np.eye(dim), hermitian_hint=True)

    @classmethod
    def zeros(cls, dim: int) -> 'Operator':
        return cls(np.zeros((dim, dim)), hermitian_hint=True)

    def dagger(self) -> 'Operator':
        return Operator(self.matrix.conj().T, self.hermitian_hint)

    def symmetrized(self) -> 'Operator':
        """Returns (A + A†)/2; callers opt in to this explicitly"""
        return Operator(
            (self.matrix + self.matrix.conj().T) / 2,
            hermitian_hint=True,
        )

    def scaled(self, factor: complex) -> 'Operator':
        keeps_hermitian = self.hermitian_hint and np.isreal(factor)
        return Operator(self.matrix * factor, bool(keeps_hermitian))

    def shifted(self, alpha: float) -> 'Operator':
        """Returns A + alpha·I"""
        return Operator(
            self.matrix + alpha * np.eye(self.dim),
            self.hermitian_hint,
        )

    def _same_dim(self, other: 'Operator') -> None:
        if not isinstance(other, Operator):
            raise TypeError(f'Expected Operator, got {type(other).__name__}')
        if other.dim != self.dim:
            raise MalformedOperatorError(
                f'Dimension mismatch: {self.dim} vs {other.dim}'
            )

    def __add__(self, other: 'Operator') -> 'Operator':
        self._same_dim(other)
        return Operator(
            self.matrix + other.matrix,
            self.hermitian_hint and other.hermitian_hint,
        )

    def __sub__(self, other: 'Operator') -> 'Operator':
        self._same_dim(other)
        return Operator(
            self.matrix - other.matrix,
            self.hermitian_hint and other.hermitian_hint,
        )

    def __matmul__(self, other: 'Operator') -> 'Operator':
        self._same_dim(other)
        return Operator(self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state"""
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).ravel()
        if amplitudes.size == 0:
            raise MalformedOperatorError('Empty state vector')
        norm = np.linalg.norm(amplitudes)
        if norm == 0:
            raise MalformedOperatorError('Zero vector cannot be normalized')
        object.__setattr__(
            self, 'amplitudes', _frozen_array(amplitudes / norm, complex)
        )

    def __repr__(self) -> str:
        return f'StateVector(dim={self.dim})'

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def basis(cls, dim: int, index: int) -> 'StateVector':
        amplitudes = np.zeros(dim, dtype=complex)
        amplitudes[index] = 1
        return cls(amplitudes)

    def evolved(self, unitary: Operator) -> 'StateVector':
        if unitary.dim != self.dim:
            raise MalformedOperatorError(
                f'Dimension mismatch: {unitary.dim} vs {self.dim}'
            )
        return StateVector(unitary.matrix @ self.amplitudes)

    def projector(self) -> Operator:
        return Operator(
            np.outer(self.amplitudes, self.amplitudes.conj()),
            hermitian_hint=True,
        )


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """Distribution over measurement outcomes"""
    outcomes: np.ndarray

    def __post_init__(self):
        outcomes = _frozen_array(self.outcomes, float).ravel()
        if outcomes.size == 0:
            raise DomainError('Empty probability vector')
        if np.any(outcomes < 0):
            raise DomainError('Probabilities must be nonnegative')
        if abs(outcomes.sum() - 1) > 1e-12:
            raise DomainError(
                f'Probabilities sum to {outcomes.sum()!r}, expected 1'
            )
        object.__setattr__(self, 'outcomes', outcomes)

    def __len__(self) -> int:
        return self.outcomes.size

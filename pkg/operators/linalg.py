"""Norms, distances, tensor products and exact unitary evolution"""
import logging
from functools import reduce
from typing import Any

import numpy as np
import scipy.linalg as la
from django.conf import settings
from scipy.stats import unitary_group

from ftnm.exceptions import MalformedOperatorError

from .models import Operator, ProbabilityVector, StateVector

logger = logging.getLogger(__name__)

PAULI = {
    'I': np.eye(2),
    'X': np.array([[0, 1], [1, 0]]),
    'Y': np.array([[0, -1j], [1j, 0]]),
    'Z': np.array([[1, 0], [0, -1]]),
}


def as_operator(value: Any) -> Operator:
    if isinstance(value, Operator):
        return value
    return Operator(value)


def pauli(label: str) -> Operator:
    """Pauli operator for a single label, or a tensor product ('ZZ')"""
    try:
        factors = [PAULI[char] for char in label.upper()]
    except KeyError as exc:
        raise MalformedOperatorError(f'Unknown Pauli label {label!r}') from exc
    if not factors:
        raise MalformedOperatorError('Empty Pauli label')
    return Operator(reduce(np.kron, factors), hermitian_hint=True)


def kron(*operators: Operator) -> Operator:
    """Tensor product, leftmost factor most significant"""
    if not operators:
        raise MalformedOperatorError('Tensor product of nothing')
    operators = [as_operator(op) for op in operators]
    return Operator(
        reduce(np.kron, (op.matrix for op in operators)),
        all(op.hermitian_hint for op in operators),
    )


def is_hermitian(A: Operator, atol: float | None = None) -> bool:
    A = as_operator(A)
    atol = settings.FTNM_HERMITIAN_ATOL if atol is None else atol
    return bool(np.allclose(A.matrix, A.matrix.conj().T, rtol=0, atol=atol))


def is_unitary(A: Operator, atol: float = 1e-12) -> bool:
    A = as_operator(A)
    product = A.matrix.conj().T @ A.matrix
    return bool(np.allclose(product, np.eye(A.dim), rtol=0, atol=atol))


def require_hermitian(A: Operator) -> Operator:
    A = as_operator(A)
    if not (A.hermitian_hint or is_hermitian(A)):
        raise MalformedOperatorError('Operator is not Hermitian')
    return A


def op_norm(A: Operator) -> float:
    """Largest singular value"""
    A = as_operator(A)
    return float(la.svdvals(A.matrix)[0])


def trace_norm(A: Operator) -> float:
    """Sum of singular values"""
    A = as_operator(A)
    return float(la.svdvals(A.matrix).sum())


def variation_distance(P: ProbabilityVector, Q: ProbabilityVector) -> float:
    """Classical variation distance Σ_i |P(i) − Q(i)|, in [0, 2]"""
    if len(P) != len(Q):
        raise MalformedOperatorError(
            f'Distributions differ in length: {len(P)} vs {len(Q)}'
        )
    return float(np.abs(P.outcomes - Q.outcomes).sum())


def eigh(H: Operator) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and eigenvectors of a Hermitian operator"""
    H = require_hermitian(H)
    return la.eigh(H.matrix)


def evolve(H: Operator, t: float) -> Operator:
    """exp(−iHt) through the eigendecomposition of H"""
    values, vectors = eigh(H)
    phases = np.exp(-1j * values * t)
    return Operator((vectors * phases) @ vectors.conj().T)


def state_fidelity(psi: StateVector, phi: StateVector) -> float:
    """|⟨ψ|φ⟩|"""
    if psi.dim != phi.dim:
        raise MalformedOperatorError(
            f'Dimension mismatch: {psi.dim} vs {phi.dim}'
        )
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)))


def pure_state_trace_distance(psi: StateVector, phi: StateVector) -> float:
    """Trace norm of |ψ⟩⟨ψ| − |φ⟩⟨φ|"""
    return trace_norm(psi.projector() - phi.projector())


def random_hermitian(
    dim: int,
    rng: np.random.Generator,
    scale: float = 1.0
) -> Operator:
    """Hermitian part of a complex Gaussian matrix"""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return Operator(scale * (g + g.conj().T) / 2, hermitian_hint=True)


def random_unitary(dim: int, rng: np.random.Generator) -> Operator:
    """Haar-random unitary"""
    if dim == 1:
        return Operator([[np.exp(2j * np.pi * rng.random())]])
    return Operator(unitary_group.rvs(dim, random_state=rng))


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Gaussian amplitudes, normalized"""
    return StateVector(rng.normal(size=dim) + 1j * rng.normal(size=dim))

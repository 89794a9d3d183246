"""Good/fault decomposition of noisy gates and fault-path expansions"""
import itertools
import logging
import math
from collections.abc import Sequence

import numpy as np
from django.conf import settings

from baths.decoherence import random_model, spectral_width
from baths.models import SystemBathModel
from ftnm.exceptions import DomainError, MalformedOperatorError
from operators.linalg import (
    evolve,
    is_unitary,
    kron,
    op_norm,
    random_hermitian,
    random_unitary,
)
from operators.models import Operator

from .models import (
    FaultDecomposition,
    SpreadInterval,
    SweepReport,
    TimeResolvedFaultPath,
)

logger = logging.getLogger(__name__)


def _minimal_coupling(model: SystemBathModel) -> tuple[Operator, float]:
    """Sum of per-qubit minimal-norm couplings and the largest width"""
    coupling = Operator.zeros(model.dim)
    widest = 0.0
    for qubit in range(model.n_system_qubits):
        part = model.qubit_coupling(qubit)
        summary = spectral_width(part)
        coupling = coupling + part.shifted(summary.alpha_opt)
        widest = max(widest, summary.delta)
    return coupling, widest


def decompose_gate(model: SystemBathModel) -> FaultDecomposition:
    """U = U0 + E for one gate interval of length t0"""
    coupling, width = _minimal_coupling(model)
    U = evolve(model.free_hamiltonian() + coupling, model.t0)
    U0 = kron(
        evolve(model.system_hamiltonian, model.t0),
        evolve(model.bath_hamiltonian, model.t0),
    )
    if model.n_system_qubits == 1:
        bound = model.t0 * width
    else:
        bound = 2 * model.t0 * model.lambda0
    return FaultDecomposition(U=U, U0=U0, E=U - U0, bound=bound)


def trotter_product(model: SystemBathModel, n: int) -> Operator:
    """Π_m U_S U_SB U_B over n slices of length t0/n"""
    if n < 1:
        raise DomainError(f'Need at least one Trotter slice, got {n}')
    step = model.t0 / n
    coupling, _ = _minimal_coupling(model)
    U_S = kron(
        evolve(model.system_hamiltonian, step),
        Operator.identity(model.bath_dim),
    )
    U_B = kron(
        Operator.identity(model.system_dim),
        evolve(model.bath_hamiltonian, step),
    )
    slice_ = U_S @ evolve(coupling, step) @ U_B
    return Operator(np.linalg.matrix_power(slice_.matrix, n))


def binomial_tail_bound(
    n: int,
    k: int,
    eps: float,
    good_is_unitary: bool,
) -> float:
    """Norm bound on the terms of U_n⋯U_1 holding at least k fault factors"""
    if not 0 <= k <= n:
        raise DomainError(f'Need 0 <= k <= n, got k={k}, n={n}')
    if eps < 0:
        raise DomainError(f'Negative fault norm bound {eps}')
    bound = math.comb(n, k) * eps**k
    if not good_is_unitary:
        bound *= (1 + eps) ** (n - k)
    return bound


def expand_at_least(
    factors: Sequence[tuple[Operator, Operator]],
    k: int,
) -> Operator:
    """Sum of product terms of U_n⋯U_1, U_i = G_i + B_i, with ≥ k B's

    factors[0] is applied first. Partial sums are kept per fault count,
    with the last bucket collecting every count of k or more.
    """
    if not factors:
        raise DomainError('Empty product')
    if not 0 <= k <= len(factors):
        raise DomainError(f'Need 0 <= k <= {len(factors)}, got {k}')
    dim = factors[0][0].dim
    sums = [np.eye(dim, dtype=complex)] + [
        np.zeros((dim, dim), dtype=complex) for _ in range(k)
    ]
    for G, B in factors:
        if G.dim != dim or B.dim != dim:
            raise MalformedOperatorError('Factors differ in dimension')
        advanced = [np.zeros((dim, dim), dtype=complex) for _ in sums]
        for count, partial in enumerate(sums):
            advanced[count] += G.matrix @ partial
            advanced[min(count + 1, k)] += B.matrix @ partial
        sums = advanced
    return Operator(sums[k])


def random_factors(
    rng: np.random.Generator,
    n: int,
    eps: float,
    good_is_unitary: bool,
    dim: int = 4,
) -> list[tuple[Operator, Operator]]:
    """Unitaries U_i = G_i + B_i with ||B_i|| ≤ eps

    With good_is_unitary the G_i are unitary and U_i = G_i·V_i for V_i
    within eps of the identity; otherwise B_i is an arbitrary small matrix.
    """
    factors = []
    for _ in range(n):
        if good_is_unitary:
            G = random_unitary(dim, rng)
            H = random_hermitian(dim, rng)
            H = H.scaled(1 / op_norm(H))
            angle = 2 * math.asin(min(eps / 2, 1)) * rng.random()
            U = G @ evolve(H, angle)
            factors.append((G, U - G))
        else:
            U = random_unitary(dim, rng)
            raw = Operator(
                rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            )
            B = raw.scaled(eps * rng.random() / op_norm(raw))
            factors.append((U - B, B))
    return factors


def lemma1_sweep(
    seed: int,
    trials: int,
    n: int,
    k: int,
    eps: float,
    good_is_unitary: bool,
) -> SweepReport:
    """Checks the binomial tail bound on explicitly expanded products"""
    bound = binomial_tail_bound(n, k, eps, good_is_unitary)
    violations, max_ratio = 0, 0.0
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        factors = random_factors(rng, n, eps, good_is_unitary)
        norm = op_norm(expand_at_least(factors, k))
        if norm > bound + settings.FTNM_BOUND_SLACK:
            violations += 1
            logger.warning(
                'Tail bound violated: n=%d k=%d eps=%g norm=%g bound=%g',
                n, k, eps, norm, bound,
            )
        if bound > 0:
            max_ratio = max(max_ratio, norm / bound)
    kind = 'unitary' if good_is_unitary else 'general'
    return SweepReport(
        name=f'tail n={n} k={k} eps={eps} {kind}',
        trials=trials,
        violations=violations,
        max_ratio=max_ratio,
    )


def lemma2_sweep(
    seed: int,
    trials: int,
    n_system_qubits: int,
    bath_dim: int,
    t0_range: tuple[float, float] = (0.01, 0.2),
    lambda0: float = 1.0,
    bound_scale: float = 1.0,
) -> SweepReport:
    """Random models checked against ||E|| ≤ t0·Δ (or 2·t0·λ0)

    bound_scale multiplies the claimed bound; values below one make the
    check fail on purpose.
    """
    logger.debug(
        'Gate fault sweep: trials=%d qubits=%d bath_dim<=%d',
        trials, n_system_qubits, bath_dim,
    )
    violations, max_ratio = 0, 0.0
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        model = random_model(
            rng,
            n_system_qubits,
            int(rng.integers(2, bath_dim + 1)),
            t0=float(rng.uniform(*t0_range)),
            lambda0=lambda0,
        )
        decomposition = decompose_gate(model)
        claimed = decomposition.bound * bound_scale
        norm = decomposition.norm
        if norm > claimed + settings.FTNM_BOUND_SLACK:
            violations += 1
            logger.warning(
                'Gate fault bound violated: %r norm=%g bound=%g',
                model, norm, claimed,
            )
        if claimed > 0:
            max_ratio = max(max_ratio, norm / claimed)
    return SweepReport(
        name=f'gate fault {n_system_qubits}-qubit',
        trials=trials,
        violations=violations,
        max_ratio=max_ratio,
    )


def interaction_picture(E: Operator, U0: Operator) -> Operator:
    """U0·E·U0†, the image of a fault under later free evolution"""
    if E.dim != U0.dim:
        raise MalformedOperatorError(
            f'Dimension mismatch: {E.dim} vs {U0.dim}'
        )
    if not is_unitary(U0, atol=1e-10):
        raise MalformedOperatorError('Frame operator is not unitary')
    return U0 @ E @ U0.dagger()


def _free(interval: SpreadInterval, duration: float) -> Operator:
    return evolve(interval.free_hamiltonian, duration)


def interval_fault(interval: SpreadInterval) -> Operator:
    """E = exp(−i(H0 + Hc)τ) − exp(−iH0τ) of one interval"""
    coupled = evolve(
        interval.free_hamiltonian + interval.coupling, interval.duration
    )
    return coupled - _free(interval, interval.duration)


def verify_spread_identity(
    circuit: Sequence[SpreadInterval],
    faults: TimeResolvedFaultPath,
) -> float:
    """Distance between E_SB(𝒯)·U0†(t_F, t_I) and Π_m E[i_m](t_F, t_m)

    Interval j is location j. A fault at (j, t) replaces the free
    evolution of interval j by U0(e_j, t)·E_j·U0(t, s_j).
    """
    if not circuit:
        raise DomainError('Empty circuit')
    starts = np.concatenate(([0.0], np.cumsum([c.duration for c in circuit])))
    dim = circuit[0].free_hamiltonian.dim
    fault_times = dict(faults.entries)
    for location, t in faults.entries:
        if not 0 <= location < len(circuit):
            raise DomainError(f'No location {location} in the circuit')
        start, end = starts[location], starts[location + 1]
        if not start - 1e-12 <= t <= end + 1e-12:
            raise DomainError(
                f'Fault time {t} outside [{start}, {end}] of location '
                f'{location}'
            )

    free = [_free(interval, interval.duration) for interval in circuit]
    faulty = Operator.identity(dim)
    uncoupled = Operator.identity(dim)
    for location, interval in enumerate(circuit):
        if location in fault_times:
            t = fault_times[location]
            step = (
                _free(interval, starts[location + 1] - t)
                @ interval_fault(interval)
                @ _free(interval, t - starts[location])
            )
        else:
            step = free[location]
        faulty = step @ faulty
        uncoupled = free[location] @ uncoupled
    lhs = faulty @ uncoupled.dagger()

    rhs = Operator.identity(dim)
    for location, t in faults.entries:
        interval = circuit[location]
        forward = _free(interval, starts[location + 1] - t)
        for later in free[location + 1:]:
            forward = later @ forward
        rhs = interaction_picture(interval_fault(interval), forward) @ rhs
    distance = op_norm(lhs - rhs)
    logger.debug('Spread identity: k=%d distance=%g', faults.k, distance)
    return distance


def random_spread_circuit(
    rng: np.random.Generator,
    n_intervals: int = 3,
    n_qubits: int = 3,
    bath_dim: int = 2,
    coupling_scale: float = 0.3,
) -> list[SpreadInterval]:
    """Intervals with uncoupled H_S ⊗ I + I ⊗ H_B and a random coupling"""
    system_dim = 2 ** n_qubits
    circuit = []
    for _ in range(n_intervals):
        H_S = random_hermitian(system_dim, rng)
        H_B = random_hermitian(bath_dim, rng)
        free = (
            kron(H_S, Operator.identity(bath_dim))
            + kron(Operator.identity(system_dim), H_B)
        )
        coupling = random_hermitian(system_dim * bath_dim, rng, coupling_scale)
        circuit.append(
            SpreadInterval(free, coupling, float(rng.uniform(0.05, 0.5)))
        )
    return circuit


def random_fault_path(
    rng: np.random.Generator,
    circuit: Sequence[SpreadInterval],
    k: int,
) -> TimeResolvedFaultPath:
    """k faults at distinct locations, at random times inside each"""
    starts = np.concatenate(([0.0], np.cumsum([c.duration for c in circuit])))
    locations = sorted(rng.choice(len(circuit), size=k, replace=False))
    return TimeResolvedFaultPath(tuple(
        (int(loc), float(rng.uniform(starts[loc], starts[loc + 1])))
        for loc in locations
    ))


def fault_path_norm_bound(k: int, lambda0: float, t0: float) -> float:
    """(2·λ0·t0)^k for a fault path with k faulty locations"""
    if k < 0:
        raise DomainError(f'Negative fault count {k}')
    return (2 * lambda0 * t0) ** k


def fault_path_operators(
    models: Sequence[SystemBathModel],
) -> dict[frozenset[int], Operator]:
    """All 2ⁿ fault-path operators of a sequential circuit of gates

    Location i applies models[i]; a faulty location contributes E_i and a
    good one U0_i.
    """
    if not models:
        raise DomainError('Empty circuit')
    decompositions = [decompose_gate(model) for model in models]
    dim = decompositions[0].U.dim
    if any(d.U.dim != dim for d in decompositions):
        raise MalformedOperatorError('Locations differ in dimension')
    paths = {}
    for choice in itertools.product((False, True), repeat=len(models)):
        operator = Operator.identity(dim)
        for is_faulty, decomposition in zip(choice, decompositions):
            factor = decomposition.E if is_faulty else decomposition.U0
            operator = factor @ operator
        faulty = frozenset(i for i, bad in enumerate(choice) if bad)
        paths[faulty] = operator
    return paths


def fault_path_sweep(
    seed: int,
    trials: int,
    n_locations: int,
    n_system_qubits: int,
    bath_dim: int,
    eta: float,
    t0: float = 0.1,
) -> SweepReport:
    """Fault-path norms of random circuits against (2·λ0·t0)^k

    A trial also fails when the 2ⁿ paths do not sum to the full unitary.
    """
    if eta <= 0 or t0 <= 0:
        raise DomainError(f'eta={eta} and t0={t0} must be positive')
    lambda0 = eta / t0
    logger.debug(
        'Fault path sweep: trials=%d locations=%d qubits=%d eta=%g',
        trials, n_locations, n_system_qubits, eta,
    )
    violations, max_ratio = 0, 0.0
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        models = [
            random_model(rng, n_system_qubits, bath_dim, t0, lambda0)
            for _ in range(n_locations)
        ]
        paths = fault_path_operators(models)
        full = Operator.identity(paths[frozenset()].dim)
        for model in models:
            full = decompose_gate(model).U @ full
        total = sum(op.matrix for op in paths.values())
        failed = op_norm(Operator(total) - full) > settings.FTNM_NORM_ATOL
        for faulty, operator in paths.items():
            bound = fault_path_norm_bound(len(faulty), lambda0, t0)
            norm = op_norm(operator)
            failed |= norm > bound + settings.FTNM_BOUND_SLACK
            max_ratio = max(max_ratio, norm / bound)
        if failed:
            violations += 1
            logger.warning(
                'Fault path bound or completeness violated: eta=%g', eta
            )
    return SweepReport(
        name=f'fault paths n={n_locations} {n_system_qubits}-qubit '
        f'eta={eta:g}',
        trials=trials,
        violations=violations,
        max_ratio=max_ratio,
    )

"""Coupling-strength bounds for spin baths and bosonic (spin-boson) baths"""
import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings
from scipy import integrate, special

from ftnm.exceptions import DomainError
from operators.linalg import op_norm, pauli
from operators.models import Operator

from .models import (
    CLOSED,
    COOLING_METHODS,
    OHMIC,
    QUADRATURE,
    CoolingBound,
    HyperfineModel,
    SpectralDensity,
)

logger = logging.getLogger(__name__)

MAX_HYPERFINE_SITES = 6


def trigamma(x: float) -> float:
    """Ψ′(x), the first derivative of the digamma function"""
    if x <= 0:
        raise DomainError(f'Trigamma evaluated at non-positive x={x}')
    return float(special.polygamma(1, x))


def _tabulated_integral(
    J: SpectralDensity, slope_factor: float, integrand
) -> float:
    """Trapezoid over the table; ω = 0 uses the slope J(ω1)/ω1"""
    omegas, values = J.omegas, J.values
    if omegas[0] > 0:
        return float(integrate.trapezoid(integrand(omegas, values), omegas))
    if values[0] != 0:
        raise DomainError('Integrand is singular: J(0) != 0 at omega = 0')
    head = slope_factor * values[1] / omegas[1]
    tail = integrand(omegas[1:], values[1:])
    return float(integrate.trapezoid(np.concatenate([[head], tail]), omegas))


def reorg_integral(J: SpectralDensity) -> float:
    """∫₀^∞ J(ω)/ω dω"""
    if J.kind == OHMIC:
        if J.alpha == 0:
            return 0.0
        value, _ = integrate.quad(
            lambda w: J.alpha * math.exp(-w / J.omega_c), 0, math.inf
        )
        return value
    return _tabulated_integral(J, 1.0, lambda w, j: j / w)


def energy_bound(J: SpectralDensity, bath_energy: float) -> float:
    """2·√(E·∫J(ω)/ω dω) for bath states of energy at most E"""
    if bath_energy < 0:
        raise DomainError(f'Negative bath energy {bath_energy}')
    return 2 * math.sqrt(bath_energy * reorg_integral(J))


def _thermal_factor(omega, beta: float):
    return 1 / np.tanh(beta * omega / 2)


def _cooling_quadrature(J: SpectralDensity) -> float:
    beta = J.beta_eff
    if J.kind != OHMIC:
        return _tabulated_integral(
            J,
            1 / beta,
            lambda w, j: j * _thermal_factor(w, beta) / 2,
        )
    upper = settings.FTNM_QUAD_CUTOFF * J.omega_c
    points = [1 / beta] if 1 / beta < upper else None
    value, _ = integrate.quad(
        lambda w: J.evaluate(w) * _thermal_factor(w, beta) / 2,
        0,
        upper,
        points=points,
        epsabs=0,
        epsrel=1e-10,
        limit=200,
    )
    return value


def cooling_bound(
    J: SpectralDensity, method: str = QUADRATURE
) -> CoolingBound:
    """√(∫ J(ω)·coth(β_eff·ω/2)/2 dω) and its closed and series forms"""
    if method not in COOLING_METHODS:
        raise DomainError(
            f'Unknown method {method!r}, expected one of {COOLING_METHODS}'
        )
    if J.beta_eff is None:
        raise DomainError('Cooling bound needs beta_eff')
    if method != QUADRATURE and J.kind != OHMIC:
        raise DomainError(f'The {method} form needs an Ohmic density')

    beta, omega_c, alpha = J.beta_eff, J.omega_c, J.alpha
    outside = False
    if method == QUADRATURE:
        value = math.sqrt(max(_cooling_quadrature(J), 0.0))
    elif method == CLOSED:
        outside = beta * omega_c <= 1
        if outside:
            logger.warning(
                'Closed form used outside its regime: beta*omega_c=%g',
                beta * omega_c,
            )
        inner = -omega_c**2 + 2 * trigamma(1 / (beta * omega_c)) / beta**2
        value = math.sqrt(alpha / 2) * math.sqrt(inner)
    else:
        inner = omega_c**2 + math.pi**2 / (3 * beta**2)
        value = math.sqrt(alpha / 2) * math.sqrt(inner)
    return CoolingBound(value=value, method=method, outside_expansion=outside)


def spin_coupling_operator() -> Operator:
    """σ⃗·I⃗ for an electron and a spin-1/2 nucleus, I⃗ = σ⃗/2"""
    total = Operator.zeros(4)
    for label in 'XYZ':
        total = total + pauli(label * 2).scaled(0.5)
    return total


def hyperfine_hamiltonian(model: HyperfineModel) -> Operator:
    """Σ_i a(i)·σ⃗·I⃗_i, electron first, one qubit per nucleus"""
    sites = len(model.weights)
    if not 1 <= sites <= MAX_HYPERFINE_SITES:
        raise DomainError(
            f'Exact hyperfine coupling built for 1..{MAX_HYPERFINE_SITES} '
            f'sites, got {sites}'
        )
    total = Operator.zeros(2 ** (sites + 1))
    for site, a in enumerate(model.couplings):
        for axis in 'XYZ':
            label = ['I'] * (sites + 1)
            label[0] = label[site + 1] = axis
            total = total + pauli(''.join(label)).scaled(a / 2)
    return total


def hyperfine_exact_norm(model: HyperfineModel) -> float:
    return op_norm(hyperfine_hamiltonian(model))


def hyperfine_bound(
    model: HyperfineModel, kappa: float | None = None
) -> float:
    """κ·A_hf·v0·Σ_i |ψ_s(i)|²"""
    if kappa is None:
        kappa = settings.FTNM_HYPERFINE_KAPPA
    return kappa * sum(model.couplings)


def read_spectral_table(path: str | Path) -> tuple[tuple[float, float], ...]:
    """Two-column CSV with header omega,J"""
    frame = pd.read_csv(path)
    missing = {'omega', 'J'} - set(frame.columns)
    if missing:
        raise DomainError(f'{path}: missing columns {sorted(missing)}')
    frame = frame[['omega', 'J']]
    if frame.isna().any(axis=None):
        lines = (frame.index[frame.isna().any(axis=1)] + 2).tolist()
        raise DomainError(f'{path}: blank cells on lines {lines}')
    frame = frame.astype(float)
    logger.debug('Read %d spectral density rows from %s', len(frame), path)
    return tuple(
        (float(w), float(j)) for w, j in frame.itertuples(index=False)
    )

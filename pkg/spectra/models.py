import math
from dataclasses import dataclass

import numpy as np

from ftnm.exceptions import DomainError

OHMIC = 'ohmic'
TABULATED = 'tabulated'
KINDS = (OHMIC, TABULATED)

QUADRATURE = 'quadrature'
CLOSED = 'closed'
SERIES = 'series'
COOLING_METHODS = (QUADRATURE, CLOSED, SERIES)


@dataclass(frozen=True)
class SpectralDensity:
    """Bath coupling spectrum J(ω), Ohmic α·ω·exp(−ω/ω_c) or tabulated"""
    kind: str = OHMIC
    alpha: float = 0.0
    omega_c: float = 1.0
    table: tuple[tuple[float, float], ...] = ()
    beta_eff: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f'Unknown spectral density kind {self.kind!r}')
        if self.beta_eff is not None and not 0 < self.beta_eff < math.inf:
            raise DomainError(f'beta_eff={self.beta_eff} out of range')
        if self.kind == OHMIC:
            if not 0 <= self.alpha < math.inf:
                raise DomainError(f'Coupling alpha={self.alpha} out of range')
            if not 0 < self.omega_c < math.inf:
                raise DomainError(f'Cutoff {self.omega_c} out of range')
            return
        table = tuple((float(w), float(j)) for w, j in self.table)
        if len(table) < 2:
            raise DomainError('Tabulated density needs at least two rows')
        omegas = np.array([w for w, _ in table])
        values = np.array([j for _, j in table])
        if not (np.all(np.isfinite(omegas)) and np.all(np.isfinite(values))):
            raise DomainError('Tabulated density has non-finite entries')
        if omegas[0] < 0 or np.any(np.diff(omegas) <= 0):
            raise DomainError('Frequencies must be nonnegative, increasing')
        if np.any(values < 0):
            raise DomainError('Spectral density must be nonnegative')
        object.__setattr__(self, 'table', table)

    @classmethod
    def ohmic(cls, alpha: float, omega_c: float, beta_eff=None):
        return cls(OHMIC, alpha=alpha, omega_c=omega_c, beta_eff=beta_eff)

    @classmethod
    def tabulated(cls, table, beta_eff=None):
        return cls(TABULATED, table=tuple(table), beta_eff=beta_eff)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([w for w, _ in self.table])

    @property
    def values(self) -> np.ndarray:
        return np.array([j for _, j in self.table])

    def evaluate(self, omega):
        """J(ω); tabulated densities interpolate linearly, zero outside"""
        omega = np.asarray(omega, dtype=float)
        if self.kind == OHMIC:
            return self.alpha * omega * np.exp(-omega / self.omega_c)
        return np.interp(omega, self.omegas, self.values, left=0, right=0)


@dataclass(frozen=True)
class HyperfineModel:
    """Electron spin coupled to nuclei with weights |ψ_s(i)|²"""
    A_hf: float
    v0: float
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if any(w < 0 for w in weights):
            raise DomainError('Weights must be nonnegative')
        if sum(weights) > 1 + 1e-12:
            raise DomainError(f'Weights sum to {sum(weights)} > 1')
        if self.A_hf < 0 or self.v0 < 0:
            raise DomainError('A_hf and v0 must be nonnegative')
        object.__setattr__(self, 'weights', weights)

    @property
    def couplings(self) -> tuple[float, ...]:
        """a(i) = A_hf·v0·|ψ_s(i)|²"""
        return tuple(self.A_hf * self.v0 * w for w in self.weights)


@dataclass(frozen=True)
class CoolingBound:
    """Heuristic bound on ||H_SB|| for a thermal Ohmic bath

    outside_expansion is set when the closed form is used with
    β_eff·ω_c ≤ 1, where the low-temperature argument does not apply.
    """
    value: float
    method: str
    outside_expansion: bool = False

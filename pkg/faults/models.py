from dataclasses import dataclass

from django.conf import settings

from ftnm.exceptions import DomainError
from operators.linalg import op_norm
from operators.models import Operator


@dataclass(frozen=True, eq=False)
class FaultDecomposition:
    """Noisy gate U split into free evolution U0 and fault part E = U − U0"""
    U: Operator
    U0: Operator
    E: Operator
    bound: float

    @property
    def norm(self) -> float:
        return op_norm(self.E)

    def holds(self, slack: float | None = None) -> bool:
        slack = settings.FTNM_BOUND_SLACK if slack is None else slack
        return self.norm <= self.bound + slack


@dataclass(frozen=True)
class TimeResolvedFaultPath:
    """Faulty locations with the times at which their faults occur"""
    entries: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        entries = tuple((int(loc), float(t)) for loc, t in self.entries)
        times = [t for _, t in entries]
        if any(later <= earlier for earlier, later in zip(times, times[1:])):
            raise DomainError('Fault times must be strictly increasing')
        locations = [loc for loc, _ in entries]
        if len(set(locations)) != len(locations):
            raise DomainError('Each location carries at most one fault')
        object.__setattr__(self, 'entries', entries)

    @property
    def k(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, eq=False)
class SpreadInterval:
    """One circuit interval: free Hamiltonian, coupled part and duration"""
    free_hamiltonian: Operator
    coupling: Operator
    duration: float

    def __post_init__(self):
        if self.duration < 0:
            raise DomainError(f'Negative interval duration {self.duration}')


@dataclass(frozen=True)
class SweepReport:
    """Counts of bound checks and violations for a randomized sweep"""
    name: str
    trials: int
    violations: int
    max_ratio: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

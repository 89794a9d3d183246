from dataclasses import dataclass

from ftnm.exceptions import DomainError

LEMMA2_PRODUCT = 'lemma2_product'
CLUSTER_LEMMA = 'cluster_lemma'
BASE_RULES = (LEMMA2_PRODUCT, CLUSTER_LEMMA)


def check_base_rule(base_rule: str) -> None:
    if base_rule not in BASE_RULES:
        raise DomainError(
            f'Unknown base rule {base_rule!r}, expected one of {BASE_RULES}'
        )


@dataclass(frozen=True)
class ThresholdParams:
    """Code size, noise strength η = λ0·t0, circuit size and target"""
    A_C: int
    eta: float
    N: int = 1
    epsilon_target: float = 0.1

    def __post_init__(self):
        if self.A_C < 2:
            raise DomainError(f'A_C={self.A_C} < 2')
        if self.eta < 0:
            raise DomainError(f'Negative eta={self.eta}')
        if self.N < 1:
            raise DomainError(f'N={self.N} < 1')
        if not 0 < self.epsilon_target < 1:
            raise DomainError(
                f'epsilon_target={self.epsilon_target} outside (0, 1)'
            )


@dataclass(frozen=True)
class RecursionLevel:
    r: int
    x: float
    log_x: float


@dataclass(frozen=True)
class RecursionTrace:
    """Bad-norm bounds x_r of successive concatenation levels"""
    levels: tuple[RecursionLevel, ...]
    converged: bool = False
    diverged: bool = False

    def __post_init__(self):
        if self.converged and self.diverged:
            raise DomainError('A trace cannot both converge and diverge')

    @property
    def values(self) -> list[float]:
        return [level.x for level in self.levels]

    def at(self, r: int) -> RecursionLevel:
        return self.levels[r - 1]


@dataclass(frozen=True)
class LevelReport:
    r: int
    total_locations: int
    eps_prime: float
    x_r: float
    global_bad: float

"""Abstract error propagation through a concatenated circuit

A level-1 rectangle is [pre-EC locations][EC][during-EC locations] acting on
a block of m qubits; location c of the rectangle touches qubit c mod m. At
level h ≥ 2 the first A_C // 2 child rectangles run before the block's error
correction and the rest after it; child c acts on sub-block c mod m. The N
root rectangles run one after another on a single r-block.
"""
import logging
from collections.abc import Iterable, Mapping

import numpy as np
from django.conf import settings

from ftnm.exceptions import DomainError, ScheduleError

from .models import (
    DURING_EC,
    PHASES,
    PRE_EC,
    BlockErrorState,
    CircuitLayout,
    FaultSet,
    PropagationReport,
)
from .sparseness import is_sparse, is_sparse_qubits, sample_sparse_faults

logger = logging.getLogger(__name__)


class _Propagator:
    def __init__(
        self,
        layout: CircuitLayout,
        faults: FaultSet,
        schedule: Mapping[int, str],
    ):
        self.layout = layout
        self.code = layout.code
        self.faults = faults
        self.schedule = schedule
        self.failed: set[tuple[int, int]] = set()

    def run(
        self, height: int, index: int, incoming: frozenset[int]
    ) -> frozenset[int]:
        if height == 0:
            return incoming | {0} if index in self.faults else incoming
        if height == 1:
            return self._run_level_one(index, incoming)
        return self._run_nested(height, index, incoming)

    def _faulty(self, index: int, phase: str) -> list[int]:
        return [
            position
            for position, leaf in enumerate(
                self.layout.hierarchy.children(1, index)
            )
            if leaf in self.faults and self.schedule[leaf] == phase
        ]

    def _run_level_one(
        self, index: int, incoming: frozenset[int]
    ) -> frozenset[int]:
        m = self.code.m
        pre = self._faulty(index, PRE_EC)
        if len(incoming) + self.code.spread * len(pre) > self.code.corrects:
            self.failed.add((1, index))
            return frozenset(range(m))
        during = self._faulty(index, DURING_EC)
        return frozenset(position % m for position in during)

    def _run_nested(
        self, height: int, index: int, incoming: frozenset[int]
    ) -> frozenset[int]:
        m = self.code.m
        size = m ** (height - 1)
        sub = [
            frozenset(q - s * size for q in incoming if q // size == s)
            for s in range(m)
        ]
        children = self.layout.hierarchy.children(height, index)
        split = self.code.pre_ec_children

        for position, child in enumerate(children[:split]):
            s = position % m
            sub[s] = self.run(height - 1, child, sub[s])

        bad = [
            s for s in range(m)
            if not is_sparse_qubits(sub[s], self.code, height - 1)
        ]
        if len(bad) > self.code.corrects:
            self.failed.add((height, index))
            return frozenset(range(m ** height))
        for s in bad:
            sub[s] = frozenset()

        for position, child in enumerate(children[split:], start=split):
            s = position % m
            sub[s] = self.run(height - 1, child, sub[s])

        return frozenset(s * size + q for s in range(m) for q in sub[s])


def check_schedule(faults: FaultSet, schedule: Mapping[int, str]) -> None:
    missing = sorted(
        leaf for leaf in faults.faulty_leaves if leaf not in schedule
    )
    if missing:
        raise ScheduleError(f'Faulty locations without a phase: {missing}')
    unknown = {
        leaf: phase for leaf, phase in schedule.items()
        if leaf in faults and phase not in PHASES
    }
    if unknown:
        raise ScheduleError(f'Unknown phases {unknown}, expected {PHASES}')


def propagate_errors(
    layout: CircuitLayout,
    faults: FaultSet,
    schedule: Mapping[int, str],
) -> BlockErrorState:
    """Erroneous qubits of the r-block after each root rectangle"""
    layout.check_faults(faults)
    check_schedule(faults, schedule)
    propagator = _Propagator(layout, faults, schedule)
    errors: frozenset[int] = frozenset()
    periods = []
    for root in range(layout.N):
        errors = propagator.run(layout.r, root, errors)
        periods.append(errors)
    if propagator.failed:
        logger.debug('Failed rectangles: %s', sorted(propagator.failed))
    return BlockErrorState(
        code=layout.code,
        r=layout.r,
        periods=tuple(periods),
        failed=frozenset(propagator.failed),
    )


def random_schedule(
    faults: FaultSet, rng: np.random.Generator
) -> dict[int, str]:
    leaves = sorted(faults.faulty_leaves)
    picks = rng.integers(0, len(PHASES), size=len(leaves))
    return {leaf: PHASES[pick] for leaf, pick in zip(leaves, picks)}


def is_sparse_state(state: BlockErrorState) -> bool:
    """Every working period ends with (r,1)-sparse block errors"""
    return all(
        is_sparse_qubits(errors, state.code, state.r)
        for errors in state.periods
    )


def lemma8_property_check(
    layout: CircuitLayout,
    n_trials: int,
    seed: int,
    injected: Iterable[FaultSet] = (),
    density: float | None = None,
) -> PropagationReport:
    """Sparse fault sets under random schedules must leave sparse errors

    Sets in `injected` are checked too; non-sparse ones are excluded and
    counted, which exercises the sparseness filter itself.
    """
    if layout.r > 3:
        raise DomainError(
            f'Propagation check limited to r ≤ 3, got r={layout.r}'
        )
    if density is None:
        density = settings.FTNM_SPARSE_SAMPLING_DENSITY
    rejected = excluded = violations = 0

    def check(faults: FaultSet, rng: np.random.Generator) -> bool:
        state = propagate_errors(layout, faults, random_schedule(faults, rng))
        if is_sparse_state(state):
            return True
        logger.warning(
            'Sparse faults %s left non-sparse errors %s',
            sorted(faults.faulty_leaves), state.descriptor(),
        )
        return False

    seeds = np.random.SeedSequence(seed)
    for child in seeds.spawn(n_trials):
        rng = np.random.default_rng(child)
        faults, attempts = sample_sparse_faults(layout, rng, density)
        rejected += attempts
        if not check(faults, rng):
            violations += 1

    rng = np.random.default_rng(seeds.spawn(1)[0])
    for faults in injected:
        if not is_sparse(faults, layout, layout.r):
            excluded += 1
            continue
        if not check(faults, rng):
            violations += 1

    return PropagationReport(
        r=layout.r,
        trials=n_trials,
        rejected=rejected,
        excluded=excluded,
        violations=violations,
    )

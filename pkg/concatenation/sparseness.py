"""(h,1)-sparseness of location and qubit sets"""
import logging
from collections.abc import Iterable

import numpy as np
from django.conf import settings

from ftnm.exceptions import DomainError, SamplingError

from .models import (
    BlockLayout,
    CircuitLayout,
    CodeModel,
    FaultSet,
    Hierarchy,
)

logger = logging.getLogger(__name__)


def _node_sparse(
    hierarchy: Hierarchy,
    height: int,
    index: int,
    touched: list[set[int]],
) -> bool:
    """A node is good unless more than one of its children is bad"""
    if index not in touched[height]:
        return True
    if height == 0:
        return False
    bad = 0
    for child in hierarchy.children(height, index):
        if not _node_sparse(hierarchy, height - 1, child, touched):
            bad += 1
            if bad > 1:
                return False
    return True


def _touched(hierarchy: Hierarchy, marked: Iterable[int]) -> list[set[int]]:
    """Ancestors of marked leaves, by height"""
    return [
        {hierarchy.ancestor(leaf, height) for leaf in marked}
        for height in range(hierarchy.depth + 1)
    ]


def is_sparse_marked(
    hierarchy: Hierarchy, marked: Iterable[int], level: int
) -> bool:
    """Every node of height `level` is (level,1)-sparse w.r.t. `marked`"""
    if not 0 <= level <= hierarchy.depth:
        raise DomainError(
            f'Level {level} outside 0..{hierarchy.depth}'
        )
    touched = _touched(hierarchy, marked)
    return all(
        _node_sparse(hierarchy, level, index, touched)
        for index in touched[level]
    )


def is_sparse(faults: FaultSet, layout: CircuitLayout, level: int) -> bool:
    """Fault set is (level,1)-sparse in every level-`level` rectangle"""
    layout.check_faults(faults)
    return is_sparse_marked(layout.hierarchy, faults.faulty_leaves, level)


def is_sparse_qubits(
    errors: Iterable[int], code: CodeModel, height: int
) -> bool:
    """Erroneous qubits of an h-block, ids 0 … m^h − 1, are (h,1)-sparse"""
    errors = frozenset(errors)
    hierarchy = BlockLayout(code, height).hierarchy
    if any(not 0 <= q < hierarchy.leaf_count for q in errors):
        raise DomainError(f'Qubit ids outside a {height}-block')
    return is_sparse_marked(hierarchy, errors, height)


def sample_faults(
    layout: CircuitLayout, rng: np.random.Generator, density: float
) -> FaultSet:
    """Each location fails independently with probability `density`"""
    if not 0 <= density <= 1:
        raise DomainError(f'Density {density} outside [0, 1]')
    mask = rng.random(layout.leaf_count) < density
    return FaultSet(frozenset(np.flatnonzero(mask).tolist()))


def sample_sparse_faults(
    layout: CircuitLayout,
    rng: np.random.Generator,
    density: float | None = None,
    max_attempts: int | None = None,
) -> tuple[FaultSet, int]:
    """Rejection-samples an (r,1)-sparse fault set

    Each attempt draws its own density uniformly from [0, density] so that
    both empty and crowded sets show up. Returns the set and the number of
    rejected draws.
    """
    if density is None:
        density = settings.FTNM_SPARSE_SAMPLING_DENSITY
    if max_attempts is None:
        max_attempts = settings.FTNM_SPARSE_SAMPLING_ATTEMPTS
    for attempt in range(max_attempts):
        faults = sample_faults(layout, rng, rng.uniform(0, density))
        if is_sparse(faults, layout, layout.r):
            logger.debug(
                'Sparse set of %d faults after %d rejections',
                len(faults), attempt,
            )
            return faults, attempt
    raise SamplingError(
        f'No sparse fault set after {max_attempts} attempts '
        f'(N={layout.N}, r={layout.r}, density={density})'
    )

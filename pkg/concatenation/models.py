from dataclasses import dataclass
from functools import cached_property

from ftnm.exceptions import DomainError

PRE_EC = 'pre-EC'
DURING_EC = 'during-EC'
PHASES = (PRE_EC, DURING_EC)


@dataclass(frozen=True)
class CodeModel:
    """Computation code: corrects two errors, spread one"""
    m: int
    A_C: int
    corrects: int = 2
    spread: int = 1

    def __post_init__(self):
        if self.corrects != 2 or self.spread != 1:
            raise DomainError(
                'Only codes correcting 2 errors with spread 1 are modelled'
            )
        if self.m < 1:
            raise DomainError(f'Block size m={self.m} < 1')
        if self.A_C < 2:
            raise DomainError(f'Rectangle size A_C={self.A_C} < 2')

    @property
    def pre_ec_children(self) -> int:
        """Child rectangles preceding error correction inside a rectangle"""
        return self.A_C // 2


@dataclass(frozen=True)
class Hierarchy:
    """Uniform tree of `roots` nodes of height `depth`

    A node is addressed by (height, index); its children at height − 1 are
    index·branching … index·branching + branching − 1, and leaves are the
    nodes of height 0.
    """
    roots: int
    branching: int
    depth: int

    @property
    def leaf_count(self) -> int:
        return self.roots * self.branching ** self.depth

    def node_count(self, height: int) -> int:
        return self.roots * self.branching ** (self.depth - height)

    def ancestor(self, leaf: int, height: int) -> int:
        return leaf // self.branching ** height

    def children(self, height: int, index: int) -> range:
        if height == 0:
            return range(0)
        return range(index * self.branching, (index + 1) * self.branching)

    def leaves(self, height: int, index: int) -> range:
        size = self.branching ** height
        return range(index * size, (index + 1) * size)

    def path(self, leaf: int) -> tuple[int, ...]:
        """Root index followed by the child position at each level"""
        digits = []
        for _ in range(self.depth):
            leaf, digit = divmod(leaf, self.branching)
            digits.append(digit)
        return (leaf, *reversed(digits))


@dataclass(frozen=True)
class BlockLayout:
    """Qubit tree of an r-block: each h-block holds m (h−1)-blocks"""
    code: CodeModel
    r: int

    @cached_property
    def hierarchy(self) -> Hierarchy:
        return Hierarchy(1, self.code.m, self.r)

    @property
    def size(self) -> int:
        return self.hierarchy.leaf_count


@dataclass(frozen=True)
class Rectangle:
    """Node of a layout tree; level-1 rectangles list their locations"""
    level: int
    index: int
    children: tuple['Rectangle', ...] = ()
    leaves: tuple[int, ...] = ()


@dataclass(frozen=True)
class CircuitLayout:
    """M_r: N root rectangles, each refined r times into A_C children"""
    N: int
    r: int
    code: CodeModel

    def __post_init__(self):
        if self.N < 1:
            raise DomainError(f'Need at least one location, got N={self.N}')
        if self.r < 0:
            raise DomainError(f'Negative concatenation level r={self.r}')

    @cached_property
    def hierarchy(self) -> Hierarchy:
        return Hierarchy(self.N, self.code.A_C, self.r)

    @cached_property
    def blocks(self) -> BlockLayout:
        return BlockLayout(self.code, self.r)

    @property
    def leaf_count(self) -> int:
        return self.hierarchy.leaf_count

    @cached_property
    def tree(self) -> tuple[Rectangle, ...]:
        return tuple(self._rectangle(self.r, i) for i in range(self.N))

    def _rectangle(self, level: int, index: int) -> Rectangle:
        if level == 0:
            return Rectangle(level, index, leaves=(index,))
        if level == 1:
            return Rectangle(
                level, index, leaves=tuple(self.hierarchy.children(1, index))
            )
        return Rectangle(
            level,
            index,
            children=tuple(
                self._rectangle(level - 1, child)
                for child in self.hierarchy.children(level, index)
            ),
        )

    def check_faults(self, faults: 'FaultSet') -> None:
        invalid = [
            leaf for leaf in faults.faulty_leaves
            if not 0 <= leaf < self.leaf_count
        ]
        if invalid:
            raise DomainError(f'Unknown locations {sorted(invalid)}')


@dataclass(frozen=True)
class FaultSet:
    """Faulty locations of a layout, by leaf id"""
    faulty_leaves: frozenset[int] = frozenset()

    def __post_init__(self):
        leaves = frozenset(int(leaf) for leaf in self.faulty_leaves)
        if any(leaf < 0 for leaf in leaves):
            raise DomainError('Location ids are nonnegative')
        object.__setattr__(self, 'faulty_leaves', leaves)

    def __len__(self) -> int:
        return len(self.faulty_leaves)

    def __contains__(self, leaf: int) -> bool:
        return leaf in self.faulty_leaves

    def without(self, leaf: int) -> 'FaultSet':
        return FaultSet(self.faulty_leaves - {leaf})


@dataclass(frozen=True)
class BlockErrorState:
    """Erroneous qubits of the r-block at the end of each working period

    Qubit ids run over 0 … m^r − 1; failed lists the (level, index)
    rectangles whose error correction was overwhelmed.
    """
    code: CodeModel
    r: int
    periods: tuple[frozenset[int], ...]
    failed: frozenset[tuple[int, int]] = frozenset()

    @property
    def final(self) -> frozenset[int]:
        return self.periods[-1] if self.periods else frozenset()

    def descriptor(self, period: int = -1) -> int | list:
        """Nested error counts: per (r−1)-block down to counts per 1-block"""
        errors = self.periods[period] if self.periods else frozenset()
        return _counts(errors, self.code.m, self.r)


def _counts(errors: frozenset[int], m: int, height: int) -> int | list:
    if height <= 1:
        return len(errors)
    size = m ** (height - 1)
    return [
        _counts(
            frozenset(q - s * size for q in errors if q // size == s),
            m,
            height - 1,
        )
        for s in range(m)
    ]


@dataclass(frozen=True)
class PropagationReport:
    """Outcome of checking that sparse faults leave sparse block errors"""
    r: int
    trials: int
    rejected: int
    excluded: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def build_concatenation(N: int, r: int, code: CodeModel) -> CircuitLayout:
    return CircuitLayout(N=N, r=r, code=code)

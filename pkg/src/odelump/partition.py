"""Ordered partitions of variable indices.

A partition stores pairwise-disjoint non-empty blocks of sorted indices that
cover ``{0..n-1}``; blocks are ordered by their minimum element.  Partitions
are immutable and hashable, so they serve directly as dictionary keys in the
enumeration oracle.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import GroundSetMismatch


class Partition:
    __slots__ = ("blocks", "_labels")

    def __init__(self, blocks: Iterable[Iterable[int]]):
        canon = sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0] if b else -1)
        seen: set = set()
        count = 0
        for b in canon:
            if not b:
                raise ValueError("empty block")
            count += len(b)
            seen.update(b)
        if not canon:
            raise ValueError("partition must have at least one block")
        if len(seen) != count or min(seen) != 0 or max(seen) != count - 1:
            raise ValueError("blocks must be disjoint and cover 0..n-1")
        self.blocks: tuple = tuple(canon)
        self._labels = None

    # -- constructors --------------------------------------------------------

    @staticmethod
    def singletons(n: int) -> "Partition":
        return Partition([(i,) for i in range(n)])

    @staticmethod
    def one_block(n: int) -> "Partition":
        return Partition([range(n)])

    @staticmethod
    def from_labels(labels: Sequence) -> "Partition":
        """Group indices by label value (labels need not be integers)."""
        groups: dict = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i)
        return Partition(groups.values())

    # -- basic queries --------------------------------------------------------

    @property
    def size(self) -> int:
        """Number of elements in the ground set."""
        return sum(len(b) for b in self.blocks)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @property
    def labels(self) -> list:
        """Element -> block ordinal (cached)."""
        if self._labels is None:
            lab = [0] * self.size
            for b, block in enumerate(self.blocks):
                for v in block:
                    lab[v] = b
            self._labels = lab
        return self._labels

    def block_of(self, index: int) -> int:
        return self.labels[index]

    def representatives(self) -> list:
        """Minimum element of each block, in block order."""
        return [b[0] for b in self.blocks]

    def refines(self, other: "Partition") -> bool:
        """True iff every block of self lies inside some block of other."""
        if self.size != other.size:
            raise GroundSetMismatch(
                f"partitions cover {self.size} and {other.size} elements")
        lab = other.labels
        for block in self.blocks:
            target = lab[block[0]]
            if any(lab[v] != target for v in block[1:]):
                return False
        return True

    # -- value semantics -------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __repr__(self) -> str:
        return f"Partition({self.format()})"

    def format(self, names: Sequence[str] | None = None) -> str:
        def nm(i):
            return names[i] if names is not None else str(i)

        return ", ".join("{" + ", ".join(nm(i) for i in b) + "}" for b in self.blocks)


def partition_refines(p: Partition, q: Partition) -> bool:
    return p.refines(q)

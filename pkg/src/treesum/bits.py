"""Exact bit algebra on a finite horizon: blocks, partitions, words, pattern sets.

Bit strings are packed into ints MSB-first: the bit at the smallest absolute
index is the most significant bit of the value.  Lexicographic order on bit
strings therefore coincides with numeric order on values, which makes numeric
sorting the canonical serialization order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

log = logging.getLogger(__name__)


def _parse_bits(bits: str) -> int:
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"bit string must be nonempty over 0/1, got {bits!r}")
    return int(bits, 2)


def _render_bits(value: int, length: int) -> str:
    return format(value, f"0{length}b")


@dataclass(frozen=True, order=True)
class Block:
    """Half-open interval [lo, hi) of absolute bit indices."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not (0 <= self.lo < self.hi):
            raise ValueError(f"block needs 0 <= lo < hi, got [{self.lo}, {self.hi})")

    @property
    def length(self) -> int:
        return self.hi - self.lo

    @property
    def mask(self) -> int:
        return (1 << self.length) - 1

    def __contains__(self, index: object) -> bool:
        return isinstance(index, int) and self.lo <= index < self.hi

    def covers(self, other: "Block") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi})"


@dataclass(frozen=True)
class Partition:
    """Contiguous blocks tiling [0, horizon) in order."""

    blocks: tuple[Block, ...]

    def __post_init__(self) -> None:
        if not self.blocks:
            raise ValueError("partition needs at least one block")
        if self.blocks[0].lo != 0:
            raise ValueError("partition must start at index 0")
        for left, right in zip(self.blocks, self.blocks[1:]):
            if left.hi != right.lo:
                raise ValueError(f"partition gap between {left} and {right}")

    @classmethod
    def from_lengths(cls, lengths: Sequence[int]) -> "Partition":
        blocks, lo = [], 0
        for n in lengths:
            blocks.append(Block(lo, lo + n))
            lo += n
        return cls(tuple(blocks))

    @property
    def horizon(self) -> int:
        return self.blocks[-1].hi

    def index_of(self, index: int) -> int:
        """Index of the block containing the absolute bit index."""
        for i, b in enumerate(self.blocks):
            if index in b:
                return i
        raise ValueError(f"index {index} outside horizon {self.horizon}")

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    def __getitem__(self, i: int) -> Block:
        return self.blocks[i]


def coarsen(partition: Partition, group_sizes: Sequence[int]) -> Partition:
    """Merge consecutive blocks into super-blocks of the given sizes.

    The group sizes must consume all blocks of the partition exactly.
    """
    blocks, i = [], 0
    for size in group_sizes:
        if size < 1:
            raise ValueError("group sizes must be positive")
        if i + size > len(partition):
            raise ValueError("group sizes overrun the partition")
        blocks.append(Block(partition[i].lo, partition[i + size - 1].hi))
        i += size
    if i != len(partition):
        raise ValueError(f"group sizes cover {i} of {len(partition)} blocks")
    return Partition(tuple(blocks))


@dataclass(frozen=True, order=True)
class Word:
    """Bit string living on a block, packed MSB-first into `value`."""

    block: Block
    value: int

    def __post_init__(self) -> None:
        if not (0 <= self.value < (1 << self.block.length)):
            raise ValueError(f"value {self.value} out of range for block {self.block}")

    @classmethod
    def from_bits(cls, bits: str, block: Block | None = None) -> "Word":
        if block is None:
            block = Block(0, len(bits))
        if len(bits) != block.length:
            raise ValueError(f"word length {len(bits)} != block {block} length")
        return cls(block, _parse_bits(bits) if any(c == "1" for c in bits) else int(bits, 2))

    def bit(self, index: int) -> int:
        """Bit at an absolute index inside the block."""
        if index not in self.block:
            raise ValueError(f"index {index} outside block {self.block}")
        return (self.value >> (self.block.hi - 1 - index)) & 1

    def bits(self) -> str:
        return _render_bits(self.value, self.block.length)

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    def restrict(self, sub: Block) -> "Word":
        if not self.block.covers(sub):
            raise ValueError(f"block {sub} not inside {self.block}")
        return Word(sub, (self.value >> (self.block.hi - sub.hi)) & sub.mask)

    def __xor__(self, other: "Word") -> "Word":
        return xor_add(self, other)

    def __str__(self) -> str:
        return self.bits()


def xor_add(u: Word, v: Word) -> Word:
    """Coordinatewise mod-2 sum; both words must live on the same block."""
    if u.block != v.block:
        raise ValueError(f"blocks differ: {u.block} vs {v.block}")
    return Word(u.block, u.value ^ v.value)


def zero_word(block: Block) -> Word:
    return Word(block, 0)


def ones_word(block: Block) -> Word:
    return Word(block, block.mask)


def unit_word(block: Block, index: int) -> Word:
    """The word with a single 1 at the given absolute index."""
    if index not in block:
        raise ValueError(f"index {index} outside block {block}")
    return Word(block, 1 << (block.hi - 1 - index))


def indicator_word(block: Block, indices: Iterable[int]) -> Word:
    """Characteristic word of a set of absolute indices, clipped to the block."""
    value = 0
    for i in indices:
        if i in block:
            value |= 1 << (block.hi - 1 - i)
    return Word(block, value)


@dataclass(frozen=True)
class Point:
    """Bit string on [0, horizon), packed MSB-first like a Word."""

    horizon: int
    value: int

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if not (0 <= self.value < (1 << self.horizon)):
            raise ValueError(f"value {self.value} out of range for horizon {self.horizon}")

    @classmethod
    def from_bits(cls, bits: str) -> "Point":
        return cls(len(bits), _parse_bits(bits))

    @classmethod
    def zero(cls, horizon: int) -> "Point":
        return cls(horizon, 0)

    def bit(self, index: int) -> int:
        if not (0 <= index < self.horizon):
            raise ValueError(f"index {index} outside horizon {self.horizon}")
        return (self.value >> (self.horizon - 1 - index)) & 1

    def bits(self) -> str:
        return _render_bits(self.value, self.horizon)

    def truncate(self, horizon: int) -> "Point":
        if horizon > self.horizon:
            raise ValueError("cannot truncate to a larger horizon")
        return Point(horizon, self.value >> (self.horizon - horizon))

    def __xor__(self, other: "Point") -> "Point":
        if self.horizon != other.horizon:
            raise ValueError("horizon mismatch")
        return Point(self.horizon, self.value ^ other.value)

    def __str__(self) -> str:
        return self.bits()


def restrict(p: Point, block: Block) -> Word:
    """Restriction of a point to a block within its horizon."""
    if block.hi > p.horizon:
        raise ValueError(f"block {block} beyond horizon {p.horizon}")
    return Word(block, (p.value >> (p.horizon - block.hi)) & block.mask)


def point_of_word(w: Word) -> Point:
    """View a word on a block starting at 0 as a point."""
    if w.block.lo != 0:
        raise ValueError("only words on [0, n) convert to points")
    return Point(w.block.hi, w.value)


@dataclass(frozen=True)
class PatternSet:
    """Finite set of same-block words, stored as packed values."""

    block: Block
    values: frozenset[int]

    def __post_init__(self) -> None:
        top = 1 << self.block.length
        for v in self.values:
            if not (0 <= v < top):
                raise ValueError(f"value {v} out of range for block {self.block}")

    @classmethod
    def from_words(cls, words: Iterable[Word]) -> "PatternSet":
        ws = list(words)
        if not ws:
            raise ValueError("cannot infer block from an empty word list")
        block = ws[0].block
        for w in ws:
            if w.block != block:
                raise ValueError(f"mixed blocks {block} and {w.block}")
        return cls(block, frozenset(w.value for w in ws))

    @classmethod
    def from_bits(cls, block: Block, patterns: Iterable[str]) -> "PatternSet":
        return cls(block, frozenset(Word.from_bits(s, block).value for s in patterns))

    @classmethod
    def empty(cls, block: Block) -> "PatternSet":
        return cls(block, frozenset())

    @classmethod
    def full(cls, block: Block) -> "PatternSet":
        if block.length > 20:
            raise ValueError(f"refusing to materialize 2^{block.length} words")
        return cls(block, frozenset(range(1 << block.length)))

    def words(self) -> tuple[Word, ...]:
        """Members in canonical (lexicographic == numeric) order."""
        return tuple(Word(self.block, v) for v in sorted(self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Word):
            return item.block == self.block and item.value in self.values
        return item in self.values

    def is_subset(self, other: "PatternSet") -> bool:
        if self.block != other.block:
            raise ValueError("blocks differ")
        return self.values <= other.values

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.values), 1 << self.block.length)


def density(J: PatternSet) -> Fraction:
    return J.density


def pattern_sum(J: PatternSet, K: PatternSet) -> PatternSet:
    """Blockwise XOR sumset {u + v : u in J, v in K}.

    An empty operand gives an empty result (logged, not an error).
    """
    if J.block != K.block:
        raise ValueError(f"blocks differ: {J.block} vs {K.block}")
    if not J.values or not K.values:
        log.debug("pattern_sum over empty operand on block %s", J.block)
        return PatternSet.empty(J.block)
    return PatternSet(J.block, frozenset(u ^ v for u in J.values for v in K.values))


def pattern_translate(J: PatternSet, w: Word) -> PatternSet:
    if J.block != w.block:
        raise ValueError(f"blocks differ: {J.block} vs {w.block}")
    return PatternSet(J.block, frozenset(v ^ w.value for v in J.values))


def block_product(parts: Sequence[PatternSet]) -> PatternSet:
    """Concatenation product over contiguous blocks; density multiplies."""
    if not parts:
        raise ValueError("block_product needs at least one factor")
    for left, right in zip(parts, parts[1:]):
        if left.block.hi != right.block.lo:
            raise ValueError(f"blocks {left.block} and {right.block} not contiguous")
    block = Block(parts[0].block.lo, parts[-1].block.hi)
    values = [0]
    for part in parts:
        shift = part.block.length
        if not part.values:
            log.debug("block_product over empty factor on block %s", part.block)
            return PatternSet.empty(block)
        values = [(v << shift) | u for v in values for u in part.values]
    return PatternSet(block, frozenset(values))

"""Pruned binary prefix trees at a finite horizon, and the Silver parameterization.

A tree is stored by its horizon-length leaves; every node is a leaf prefix, so
pruned-ness holds by construction.  Nodes of length d are packed ints like
words: leaf >> (horizon - d) recovers the node a leaf passes through.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from treesum.bits import Block, PatternSet, Point, Word, restrict

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SilverTree:
    """Tree determined by a base point and a set of free coordinates.

    A node belongs to the tree iff it agrees with `x` on every coordinate of
    its domain outside `free`.  Bits of `x` on free coordinates are irrelevant
    to the semantics and are kept as given.
    """

    x: Point
    free: frozenset[int]

    def __post_init__(self) -> None:
        for i in self.free:
            if not (0 <= i < self.x.horizon):
                raise ValueError(f"free coordinate {i} outside horizon {self.x.horizon}")

    @property
    def horizon(self) -> int:
        return self.x.horizon

    def canonical(self) -> "SilverTree":
        """Same tree with the irrelevant free-coordinate bits of x zeroed."""
        value = self.x.value
        for i in self.free:
            value &= ~(1 << (self.horizon - 1 - i))
        return SilverTree(Point(self.horizon, value), self.free)


def silver_sum(T1: SilverTree, T2: SilverTree) -> SilverTree:
    """Parameters of the sumset of two Silver bodies: XOR the base points,
    union the free sets."""
    if T1.horizon != T2.horizon:
        raise ValueError("horizon mismatch")
    return SilverTree(T1.x ^ T2.x, T1.free | T2.free)


def silver_to_prefix(T: SilverTree, depth: int | None = None) -> PrefixTree:
    """Materialize the Silver tree as an explicit prefix tree of the given depth."""
    if depth is None:
        depth = T.horizon
    if not (1 <= depth <= T.horizon):
        raise ValueError(f"depth {depth} must lie in [1, {T.horizon}]")
    base = T.x.truncate(depth).value
    for i in T.free:
        if i < depth:
            base &= ~(1 << (depth - 1 - i))
    free_positions = sorted(depth - 1 - i for i in T.free if i < depth)
    leaves = []
    for mask_bits in range(1 << len(free_positions)):
        v = base
        for j, pos in enumerate(free_positions):
            if (mask_bits >> j) & 1:
                v |= 1 << pos
        leaves.append(v)
    return PrefixTree(depth, frozenset(leaves))


@dataclass(frozen=True)
class PrefixTree:
    """Nonempty pruned tree: all leaves have length exactly `horizon`."""

    horizon: int
    leaves: frozenset[int]

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if not self.leaves:
            raise ValueError("tree needs at least one leaf")
        top = 1 << self.horizon
        for v in self.leaves:
            if not (0 <= v < top):
                raise ValueError(f"leaf {v} out of range for horizon {self.horizon}")

    @classmethod
    def full(cls, horizon: int) -> "PrefixTree":
        if horizon > 20:
            raise ValueError(f"refusing to materialize 2^{horizon} leaves")
        return cls(horizon, frozenset(range(1 << horizon)))

    @classmethod
    def from_leaves(cls, leaves: Iterable[str]) -> "PrefixTree":
        ls = list(leaves)
        if not ls:
            raise ValueError("no leaves given")
        horizon = len(ls[0])
        for s in ls:
            if len(s) != horizon:
                raise ValueError(f"leaf {s!r} has length {len(s)}, expected {horizon}")
        return cls(horizon, frozenset(Point.from_bits(s).value for s in ls))

    @classmethod
    def from_nodes(cls, nodes: Iterable[str]) -> "PrefixTree":
        """Build from an explicit node list, validating prefix closure and
        pruned-ness."""
        node_set = set(nodes)
        if not node_set:
            raise ValueError("no nodes given")
        horizon = max(len(s) for s in node_set)
        if horizon == 0:
            raise ValueError("tree has no nodes of positive length")
        for s in node_set:
            if any(c not in "01" for c in s):
                raise ValueError(f"node {s!r} is not a binary sequence")
            if s and s[:-1] not in node_set:
                raise ValueError(f"node {s!r} lacks its parent (not prefix-closed)")
        leaves = {s for s in node_set if len(s) == horizon}
        for s in node_set:
            if not any(leaf.startswith(s) for leaf in leaves):
                raise ValueError(f"node {s!r} does not extend to the horizon (not pruned)")
        return cls(horizon, frozenset(int(s, 2) for s in leaves))

    @cached_property
    def levels(self) -> tuple[frozenset[int], ...]:
        """levels[d] = packed values of the length-d nodes."""
        out = []
        for d in range(self.horizon + 1):
            shift = self.horizon - d
            out.append(frozenset(v >> shift for v in self.leaves))
        return tuple(out)

    def contains_node(self, bits: str) -> bool:
        if bits == "":
            return True
        if any(c not in "01" for c in bits) or len(bits) > self.horizon:
            return False
        return int(bits, 2) in self.levels[len(bits)]

    def children(self, depth: int, value: int) -> tuple[int, ...]:
        nxt = self.levels[depth + 1]
        return tuple(c for c in ((value << 1) | 0, (value << 1) | 1) if c in nxt)

    def splits_at(self, depth: int) -> frozenset[int]:
        """Values of length-depth nodes with both children present."""
        if depth >= self.horizon:
            return frozenset()
        nxt = self.levels[depth + 1]
        return frozenset(
            v for v in self.levels[depth] if (v << 1) in nxt and ((v << 1) | 1) in nxt
        )

    def nodes(self) -> Iterator[tuple[int, int]]:
        """All (depth, value) pairs, shallow to deep, values ascending."""
        for d in range(self.horizon + 1):
            for v in sorted(self.levels[d]):
                yield d, v

    def __len__(self) -> int:
        return len(self.leaves)


def body(T: PrefixTree) -> tuple[Word, ...]:
    """Maximal nodes as words on [0, horizon), in canonical order."""
    block = Block(0, T.horizon)
    return tuple(Word(block, v) for v in sorted(T.leaves))


def tree_restrict(T: PrefixTree, b: Block) -> PatternSet:
    """Restrictions of all leaves to a block."""
    if b.hi > T.horizon:
        raise ValueError(f"block {b} beyond horizon {T.horizon}")
    shift = T.horizon - b.hi
    return PatternSet(b, frozenset((v >> shift) & b.mask for v in T.leaves))


def is_subtree(S: PrefixTree, T: PrefixTree) -> bool:
    if S.horizon != T.horizon:
        raise ValueError("horizon mismatch")
    # pruned trees: node containment reduces to leaf containment
    return S.leaves <= T.leaves


@dataclass(frozen=True)
class KindFlags:
    perfect: bool
    uniformly_perfect: bool
    silver: bool
    splitting_at_horizon: bool


def _has_split_extension(T: PrefixTree) -> dict[tuple[int, int], bool]:
    """For each node, whether some descendant-or-self splits."""
    out: dict[tuple[int, int], bool] = {}
    for v in T.levels[T.horizon]:
        out[(T.horizon, v)] = False
    for d in range(T.horizon - 1, -1, -1):
        splits = T.splits_at(d)
        for v in T.levels[d]:
            flag = v in splits
            if not flag:
                flag = any(out[(d + 1, c)] for c in T.children(d, v))
            out[(d, v)] = flag
    return out


def splitting_defect(T: PrefixTree) -> int:
    """Worst over all stems of how far past the stem the tree still fails to
    realize both bit values at some coordinate.

    For a stem of length d, coordinates below d are fixed, so the best
    achievable threshold is d - 1; the defect measures the excess of the
    actual per-stem threshold over that. 0 means splitting behavior starts
    immediately past every stem.
    """
    return max(n for _, n in _defect_items(T))


def splitting_thresholds(T: PrefixTree) -> dict[str, int]:
    """Per-stem minimal N such that every coordinate past N is realized with
    both values by extensions of the stem."""
    out = {}
    for (d, v), defect in _defect_items(T):
        out[format(v, f"0{d}b") if d else ""] = (d - 1) + defect
    return out


def _defect_items(T: PrefixTree) -> Iterator[tuple[tuple[int, int], int]]:
    H = T.horizon
    full = (1 << H) - 1
    ones: dict[tuple[int, int], int] = {}
    zeros: dict[tuple[int, int], int] = {}
    for leaf in T.leaves:
        ones[(H, leaf)] = leaf
        zeros[(H, leaf)] = ~leaf & full
    for d in range(H - 1, -1, -1):
        for v in T.levels[d]:
            o = z = 0
            for c in T.children(d, v):
                o |= ones[(d + 1, c)]
                z |= zeros[(d + 1, c)]
            ones[(d, v)] = o
            zeros[(d, v)] = z
    for d in range(H + 1):
        for v in T.levels[d]:
            both = ones[(d, v)] & zeros[(d, v)]
            worst = d - 1
            for n in range(d, H):
                if not (both >> (H - 1 - n)) & 1:
                    worst = n
            yield (d, v), worst - (d - 1)


def classify(T: PrefixTree, split_allowance: int | None = None) -> KindFlags:
    """Kind flags of a tree at its horizon.

    Perfection is judged relative to the deepest splitting level: a tree whose
    nodes all reach a splitting extension before splits run out entirely
    counts as perfect, even though nodes past the last split trivially cannot
    split again before the horizon.  The splitting flag compares the worst
    per-stem threshold against an allowance (default horizon // 2).
    """
    if split_allowance is None:
        split_allowance = T.horizon // 2
    split_levels = [T.splits_at(d) for d in range(T.horizon)]
    deepest = max((d for d, s in enumerate(split_levels) if s), default=-1)
    if deepest < 0:
        perfect = False
    else:
        ext = _has_split_extension(T)
        perfect = all(
            ext[(d, v)] for d in range(deepest + 1) for v in T.levels[d]
        )
    uniform = perfect and all(
        not split_levels[d] or split_levels[d] == T.levels[d]
        for d in range(T.horizon)
    )
    silver = perfect and all(
        len({frozenset(c & 1 for c in T.children(d, v)) for v in T.levels[d]}) == 1
        for d in range(T.horizon)
    )
    splitting = splitting_defect(T) <= split_allowance
    return KindFlags(perfect, uniform, silver, splitting)


def split_count_on_stem(T: PrefixTree, stem: str) -> int:
    """Number of splitting nodes among the initial segments of a stem,
    the stem itself included."""
    if not T.contains_node(stem):
        raise ValueError(f"stem {stem!r} not in tree")
    count = 0
    v = 0
    for d in range(len(stem) + 1):
        if v in T.splits_at(d):
            count += 1
        if d < len(stem):
            v = (v << 1) | int(stem[d])
    return count


def first_splitting_node(T: PrefixTree, stem: str, min_length: int) -> str:
    """Shortest, then lexicographically least, splitting node extending the
    stem with length >= min_length.  Raises when no such node exists."""
    if not T.contains_node(stem):
        raise ValueError(f"stem {stem!r} not in tree")
    base_d, base_v = len(stem), int(stem, 2) if stem else 0
    for d in range(max(base_d, min_length), T.horizon):
        shift = d - base_d
        hits = sorted(v for v in T.splits_at(d) if v >> shift == base_v)
        if hits:
            return format(hits[0], f"0{d}b") if d else ""
    raise ValueError(
        f"no splitting node of length >= {min_length} above {stem!r} "
        f"within horizon {T.horizon}"
    )


def leftmost_leaf(T: PrefixTree, stem: str) -> str:
    """Least leaf extending the stem."""
    if not T.contains_node(stem):
        raise ValueError(f"stem {stem!r} not in tree")
    shift = T.horizon - len(stem)
    base = int(stem, 2) if stem else 0
    return format(min(v for v in T.leaves if v >> shift == base), f"0{T.horizon}b")

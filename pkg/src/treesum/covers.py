"""Finite-horizon covers for the three smallness notions.

A cover pins down a set of points by per-block data over a partition:
avoidance of a fixed point blockwise (meager), summable pattern densities
(small, and unions of two smalls), or densities at most 1/2 (the simple
regime).  Membership semantics follow the blockwise quantifiers; small
covers deliberately have no point test, see the module notes in README.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction

from .bits import Partition, PatternSet, Point, density, restrict
from .trees import PrefixTree

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeagerCover:
    """Points that differ from ``xF`` on every block at or past ``threshold``."""

    xF: Point
    partition: Partition
    threshold: int

    def __post_init__(self):
        if self.xF.horizon != self.partition.horizon:
            raise ValueError(
                f"point horizon {self.xF.horizon} != "
                f"partition horizon {self.partition.horizon}"
            )
        if not 0 <= self.threshold <= len(self.partition):
            raise ValueError(f"threshold {self.threshold} out of range")

    @property
    def horizon(self) -> int:
        return self.partition.horizon

    def forbidden(self, n: int) -> PatternSet:
        """Singleton pattern a member must avoid on block n."""
        b = self.partition[n]
        return PatternSet(b, frozenset({restrict(self.xF, b).value}))

    def allowed(self, n: int) -> PatternSet:
        """Complement of the forbidden pattern on block n."""
        b = self.partition[n]
        keep = frozenset(range(1 << b.length)) - {restrict(self.xF, b).value}
        return PatternSet(b, keep)


def meager_member(C: MeagerCover, p: Point) -> bool:
    if p.horizon != C.horizon:
        raise ValueError(f"horizon {p.horizon} != cover horizon {C.horizon}")
    return all(
        restrict(p, b) != restrict(C.xF, b)
        for b in C.partition.blocks[C.threshold:]
    )


def _check_blockwise(partition: Partition, patterns: tuple[PatternSet, ...]) -> None:
    if len(patterns) != len(partition):
        raise ValueError(
            f"{len(patterns)} pattern sets for {len(partition)} blocks"
        )
    for n, (b, J) in enumerate(zip(partition.blocks, patterns)):
        if J.block != b:
            raise ValueError(f"pattern set {n} on {J.block}, expected {b}")


@dataclass(frozen=True)
class SmallCover:
    """Summable blockwise pattern family; a point is captured when its
    restriction lands in J_n for infinitely many n, which no finite
    horizon can decide, so this type carries data only."""

    partition: Partition
    patterns: tuple[PatternSet, ...]

    def __post_init__(self):
        _check_blockwise(self.partition, self.patterns)

    @property
    def horizon(self) -> int:
        return self.partition.horizon

    @property
    def mass(self) -> Fraction:
        return sum((density(J) for J in self.patterns), Fraction(0))


def small_mass(C: SmallCover) -> Fraction:
    return C.mass


@dataclass(frozen=True)
class NullCover:
    """Union of two small covers."""

    first: SmallCover
    second: SmallCover

    def __post_init__(self):
        if self.first.horizon != self.second.horizon:
            raise ValueError("component covers live on different horizons")

    @property
    def horizon(self) -> int:
        return self.first.horizon


@dataclass(frozen=True)
class ECover:
    """Points whose restriction lands in J_n for every block past threshold.

    Densities at most 1/2 make this an E-set; the bound is audited, not
    enforced here, so that failing inputs can be represented and reported.
    """

    partition: Partition
    patterns: tuple[PatternSet, ...]
    threshold: int = 0

    def __post_init__(self):
        _check_blockwise(self.partition, self.patterns)
        if not 0 <= self.threshold <= len(self.partition):
            raise ValueError(f"threshold {self.threshold} out of range")

    @property
    def horizon(self) -> int:
        return self.partition.horizon


def e_member(C: ECover, p: Point) -> bool:
    if p.horizon != C.horizon:
        raise ValueError(f"horizon {p.horizon} != cover horizon {C.horizon}")
    return all(
        restrict(p, C.partition[n]) in C.patterns[n]
        for n in range(C.threshold, len(C.partition))
    )


def e_density_audit(C: ECover) -> tuple[Fraction, bool]:
    worst = max((density(J) for J in C.patterns), default=Fraction(0))
    return worst, worst <= Fraction(1, 2)


def strict_e_to_simple(C: ECover) -> ECover:
    """Re-audit a cover whose densities shrink geometrically (at most 2^-n
    per block) under the flat 1/2 regime.

    Block 0 is the only block where 2^-n exceeds 1/2; when it uses that
    headroom the result starts at block 1 instead, whose tail has the same
    members.
    """
    for n, J in enumerate(C.patterns):
        if density(J) > Fraction(1, 2**n):
            raise ValueError(
                f"geometric bound violated at block {n}: "
                f"density {density(J)} > 1/2^{n}"
            )
    threshold = C.threshold
    if C.patterns and density(C.patterns[0]) > Fraction(1, 2):
        threshold = max(threshold, 1)
        log.debug("block 0 density above 1/2, starting at block 1")
    patterns = tuple(
        PatternSet.empty(J.block) if n < threshold else J
        for n, J in enumerate(C.patterns)
    )
    return ECover(C.partition, patterns, threshold)


@dataclass(frozen=True)
class BlockCheck:
    """One verified inclusion: source + fold-sum of tree patterns vs target."""

    fold: int
    block_index: int
    source: PatternSet
    tree_patterns: PatternSet
    target: PatternSet
    passed: bool


@dataclass(frozen=True)
class Certificate:
    label: str
    partition: Partition
    thresholds: tuple[tuple[int, int], ...]
    checks: tuple[BlockCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def vacuous_folds(self) -> tuple[int, ...]:
        """Folds whose threshold leaves no block to check."""
        return tuple(
            fold for fold, thr in self.thresholds if thr >= len(self.partition)
        )

    def merged_with(self, other: Certificate) -> Certificate:
        if other.partition != self.partition:
            raise ValueError("cannot merge certificates over different partitions")
        return Certificate(
            self.label,
            self.partition,
            self.thresholds + other.thresholds,
            self.checks + other.checks,
        )


@dataclass(frozen=True)
class CertificateRequest:
    """Everything needed to (re)run the blockwise checks of one witness:
    per-block source patterns, the tree whose fold-sums shift them, and
    per-fold target patterns with the first block each fold is checked at.
    """

    label: str
    partition: Partition
    source: tuple[PatternSet, ...]
    tree: PrefixTree
    targets: tuple[tuple[int, tuple[PatternSet, ...]], ...]
    thresholds: tuple[tuple[int, int], ...]

    def __post_init__(self):
        _check_blockwise(self.partition, self.source)
        for _, row in self.targets:
            _check_blockwise(self.partition, row)
        if tuple(f for f, _ in self.targets) != tuple(f for f, _ in self.thresholds):
            raise ValueError("target and threshold folds disagree")

    @property
    def folds(self) -> tuple[int, ...]:
        return tuple(f for f, _ in self.targets)

    def targets_for(self, fold: int) -> tuple[PatternSet, ...]:
        for f, row in self.targets:
            if f == fold:
                return row
        raise ValueError(f"no targets for fold {fold}")

    def threshold_for(self, fold: int) -> int:
        for f, thr in self.thresholds:
            if f == fold:
                return thr
        raise ValueError(f"no threshold for fold {fold}")

    def with_tree(self, tree: PrefixTree) -> CertificateRequest:
        """Same checks against another tree (used when a later shrink step
        must revalidate an earlier witness against the final tree)."""
        if tree.horizon != self.tree.horizon:
            raise ValueError("replacement tree horizon differs")
        return replace(self, tree=tree)


@dataclass(frozen=True)
class Stage:
    """Finite antichain of cylinder nodes with its exact union measure."""

    nodes: tuple[str, ...]
    measure: Fraction

    def __post_init__(self):
        for s in self.nodes:
            if not s or set(s) - {"0", "1"}:
                raise ValueError(f"bad cylinder node {s!r}")
        ordered = sorted(self.nodes)
        if len(ordered) != len(set(ordered)):
            raise ValueError("duplicate cylinder nodes")
        for a, b in zip(ordered, ordered[1:]):
            if b.startswith(a):
                raise ValueError(f"nodes {a!r} and {b!r} are not incomparable")
        total = sum((Fraction(1, 2 ** len(s)) for s in self.nodes), Fraction(0))
        if total != self.measure:
            raise ValueError(
                f"stated measure {self.measure} != cylinder union measure {total}"
            )

    @property
    def max_length(self) -> int:
        return max((len(s) for s in self.nodes), default=0)


@dataclass(frozen=True)
class ClosedNullChain:
    """Refining sequence of closed-set approximations: every node of a
    stage extends a node of the previous stage and depths grow strictly,
    with each stage's raw measure below 1/2."""

    stages: tuple[Stage, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("chain needs at least one stage")
        for k, stage in enumerate(self.stages):
            if stage.measure >= Fraction(1, 2):
                raise ValueError(
                    f"stage {k} measure {stage.measure} is not below 1/2"
                )
        for k in range(1, len(self.stages)):
            prev, cur = self.stages[k - 1], self.stages[k]
            for s in cur.nodes:
                if not any(s.startswith(t) for t in prev.nodes):
                    raise ValueError(
                        f"stage {k} node {s!r} extends no stage {k - 1} node"
                    )
            if cur.max_length <= prev.max_length:
                raise ValueError(f"stage {k} does not deepen stage {k - 1}")

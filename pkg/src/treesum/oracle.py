"""Brute-force validation of construction claims.

Two independent paths to the same question: blockwise pattern inclusion
(the shape the proofs argue in) and plain enumeration of source points
against all fold-sums of the tree.  Both are exact; the enumeration path
is capped by horizon and an explicit work budget rather than silently
sampled.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .bits import Block, Partition, PatternSet, pattern_sum
from .covers import (
    BlockCheck,
    Certificate,
    CertificateRequest,
    ECover,
    MeagerCover,
    e_density_audit,
)
from .trees import PrefixTree, body, tree_restrict

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 1 << 22
DEFAULT_HORIZON_CAP = 14


class BudgetExceeded(RuntimeError):
    pass


def pattern_nfold(
    J: PatternSet, n: int, budget: int = DEFAULT_BUDGET
) -> PatternSet:
    """n-fold XOR sumset of a pattern set; the empty sum is {zero}."""
    if n < 0:
        raise ValueError("fold count must be at least 0")
    acc = PatternSet(J.block, frozenset({0}))
    spent = 0
    for _ in range(n):
        spent += len(acc) * len(J)
        if spent > budget:
            raise BudgetExceeded(f"fold sum budget {budget} exceeded")
        acc = pattern_sum(acc, J)
    return acc


def nfold_body_sum(
    T: PrefixTree, n: int, budget: int = DEFAULT_BUDGET
) -> PatternSet:
    """All XOR sums of n branches, deduplicated round by round."""
    if n < 1:
        raise ValueError("fold count must be at least 1")
    base = tree_restrict(T, Block(0, T.horizon))
    acc = base
    spent = 0
    for _ in range(n - 1):
        spent += len(acc) * len(base)
        if spent > budget:
            raise BudgetExceeded(f"fold sum budget {budget} exceeded")
        acc = pattern_sum(acc, base)
    return acc


def nfold_body_sum_direct(T: PrefixTree, n: int) -> PatternSet:
    """Same set by brute enumeration of all n-tuples of branches.

    Cost is |body|^n with no dedup along the way; only for cross-checking
    the iterated algorithm on small trees.
    """
    if n < 1:
        raise ValueError("fold count must be at least 1")
    words = body(T)
    out = set()
    for combo in itertools.product(range(len(words)), repeat=n):
        v = 0
        for i in combo:
            v ^= words[i].value
        out.add(v)
    return PatternSet(Block(0, T.horizon), frozenset(out))


def blockwise_certify(
    source: Sequence[PatternSet],
    T: PrefixTree,
    folds: Iterable[int],
    witness: Sequence[PatternSet],
    thresholds: Mapping[int, int],
    label: str = "blockwise",
    budget: int = DEFAULT_BUDGET,
) -> Certificate:
    """Check source + b-fold tree patterns against the witness, block by
    block from each fold's threshold on."""
    if len(source) != len(witness):
        raise ValueError(
            f"{len(source)} source blocks vs {len(witness)} witness blocks"
        )
    for s, w in zip(source, witness):
        if s.block != w.block:
            raise ValueError(f"partition misalignment: {s.block} vs {w.block}")
    partition = Partition(tuple(w.block for w in witness))
    if partition.horizon > T.horizon:
        raise ValueError("witness partition reaches past the tree horizon")

    checks = []
    fold_list = sorted(set(folds))
    for b in fold_list:
        thr = thresholds[b]
        for n in range(thr, len(partition)):
            blk = partition[n]
            tree_patterns = pattern_nfold(tree_restrict(T, blk), b, budget)
            shifted = pattern_sum(source[n], tree_patterns)
            checks.append(
                BlockCheck(
                    b, n, source[n], tree_patterns, witness[n],
                    shifted.is_subset(witness[n]),
                )
            )
    thr_pairs = tuple((b, thresholds[b]) for b in fold_list)
    return Certificate(label, partition, thr_pairs, tuple(checks))


def certify_request(
    req: CertificateRequest, budget: int = DEFAULT_BUDGET
) -> Certificate:
    """Run a stored request: one blockwise pass per fold against that
    fold's target patterns, merged into a single certificate."""
    cert = Certificate(req.label, req.partition, (), ())
    for b in req.folds:
        cert = cert.merged_with(
            blockwise_certify(
                req.source,
                req.tree,
                [b],
                req.targets_for(b),
                {b: req.threshold_for(b)},
                label=req.label,
                budget=budget,
            )
        )
    return cert


PointCover = MeagerCover | ECover


def _member_values(cover: PointCover) -> list[list[int]]:
    """Per-block candidate values whose products are exactly the members."""
    rows = []
    for n, blk in enumerate(cover.partition.blocks):
        if n < cover.threshold:
            rows.append(list(range(1 << blk.length)))
        elif isinstance(cover, MeagerCover):
            rows.append(sorted(cover.allowed(n).values))
        else:
            rows.append(sorted(cover.patterns[n].values))
    return rows


def _membership_table(cover: PointCover) -> list[tuple[int, int, frozenset[int]]]:
    """(shift, mask, admissible values) per consulted block, against the
    cover's own horizon."""
    H = cover.horizon
    table = []
    for n in range(cover.threshold, len(cover.partition)):
        blk = cover.partition[n]
        if isinstance(cover, MeagerCover):
            good = frozenset(cover.allowed(n).values)
        else:
            good = cover.patterns[n].values
        table.append((H - blk.hi, blk.mask, good))
    return table


def exhaustive_containment(
    source_cover: PointCover,
    T: PrefixTree,
    b: int,
    witness_cover: PointCover,
    cap: int = DEFAULT_HORIZON_CAP,
    budget: int = DEFAULT_BUDGET,
) -> bool:
    """Enumerate every source member, add every b-fold branch sum, and
    test the witness membership of each result.

    Small covers are rejected: they have no point test.  Witness covers
    on a shorter horizon see the sums truncated, matching the blockwise
    convention for dropped trailing blocks.
    """
    for cover in (source_cover, witness_cover):
        if not isinstance(cover, (MeagerCover, ECover)):
            raise ValueError(
                f"{type(cover).__name__} admits no point-membership test"
            )
    if T.horizon > cap:
        raise ValueError(f"horizon {T.horizon} exceeds cap {cap}")
    if source_cover.horizon != T.horizon:
        raise ValueError("source cover horizon differs from tree horizon")
    if witness_cover.horizon > T.horizon:
        raise ValueError("witness cover reaches past the tree horizon")
    if b < 0:
        raise ValueError("fold count must be at least 0")

    drop = T.horizon - witness_cover.horizon
    if b == 0:
        sums = {0}
    else:
        sums = {v >> drop for v in nfold_body_sum(T, b, budget).values}
    rows = _member_values(source_cover)
    table = _membership_table(witness_cover)

    members = set()
    for combo in itertools.product(*rows):
        v = 0
        for blk, val in zip(source_cover.partition.blocks, combo):
            v |= val << (source_cover.horizon - blk.hi)
        members.add(v >> drop)

    for p in members:
        for t in sums:
            q = p ^ t
            for shift, mask, good in table:
                if (q >> shift) & mask not in good:
                    return False
    return True


@dataclass(frozen=True)
class AuditRow:
    fold: int
    kind: str
    value: Fraction
    bound: Fraction
    passed: bool


def density_audit_table(bundle) -> tuple[AuditRow, ...]:
    """Numeric audit of a per-fold witness family: total mass for small
    witnesses, max block density for the 1/2 regime.  Families without a
    numeric audit (meager witnesses) produce an empty table."""
    kind = bundle.audit_kind
    if kind is None:
        return ()
    bounds = dict(bundle.audit_bounds)
    rows = []
    for fold, cover in bundle.per_fold:
        if kind == "mass":
            value = cover.mass
        elif kind == "max_density":
            value = e_density_audit(cover)[0]
        else:
            raise ValueError(f"unknown audit kind {kind!r}")
        bound = bounds[fold]
        rows.append(AuditRow(fold, kind, value, bound, value <= bound))
    return tuple(rows)

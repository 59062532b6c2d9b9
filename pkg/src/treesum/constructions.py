"""Tree shrinks and witness covers, one operation per translation statement.

Every operation returns the shrunken (or freshly built) tree together with
per-fold witness covers and a stored certificate request the oracle can
replay.  All choices the source arguments leave open are made
deterministically: least eligible coordinate, leftmost splitting node,
earliest allowed split.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .bits import (
    Block,
    Partition,
    PatternSet,
    Point,
    Word,
    block_product,
    indicator_word,
    pattern_sum,
    restrict,
)
from .covers import (
    CertificateRequest,
    ClosedNullChain,
    ECover,
    MeagerCover,
    NullCover,
    SmallCover,
)
from .kseq import build_kseq
from .trees import (
    PrefixTree,
    SilverTree,
    classify,
    first_splitting_node,
    leftmost_leaf,
    silver_to_prefix,
    tree_restrict,
)

log = logging.getLogger(__name__)

DEFAULT_FOLDS = (0, 1, 2, 3)

Cover = MeagerCover | SmallCover | ECover


@dataclass(frozen=True)
class Provenance:
    op: str
    details: tuple[tuple[str, str], ...]
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class WitnessBundle:
    """Per-fold witness covers for one claim, plus the blockwise checks
    that validate them and the numeric audit they must pass."""

    label: str
    kind: str
    per_fold: tuple[tuple[int, Cover], ...]
    uniform_witness: bool
    request: CertificateRequest
    audit_kind: str | None
    audit_bounds: tuple[tuple[int, Fraction], ...]

    def cover_for(self, fold: int) -> Cover:
        for f, cover in self.per_fold:
            if f == fold:
                return cover
        raise ValueError(f"no witness for fold {fold}")


@dataclass(frozen=True)
class ShrinkResult:
    tree_out: SilverTree | PrefixTree
    witnesses: tuple[WitnessBundle, ...]
    provenance: Provenance

    def tree_as_prefix(self) -> PrefixTree:
        t = self.tree_out
        return silver_to_prefix(t) if isinstance(t, SilverTree) else t


def _clean_folds(folds: Sequence[int]) -> tuple[int, ...]:
    out = tuple(sorted(set(folds)))
    if not out:
        raise ValueError("no fold counts requested")
    if out[0] < 0:
        raise ValueError("fold counts must be nonnegative")
    return out


def _nfold(J: PatternSet, b: int) -> PatternSet:
    acc = PatternSet(J.block, frozenset({0}))
    for _ in range(b):
        acc = pattern_sum(acc, J)
    return acc


def _fold_union(J: PatternSet, up_to: int) -> PatternSet:
    vals: set[int] = set()
    for j in range(up_to + 1):
        vals |= _nfold(J, j).values
    return PatternSet(J.block, frozenset(vals))


def _allowed_or_full(F: MeagerCover, j: int) -> PatternSet:
    if j < F.threshold:
        return PatternSet.full(F.partition[j])
    return F.allowed(j)


def _e_or_full(E: ECover, j: int) -> PatternSet:
    if j < E.threshold:
        return PatternSet.full(E.partition[j])
    return E.patterns[j]


def _set_block(value: int, horizon: int, blk: Block, pattern: int) -> int:
    shift = horizon - blk.hi
    return (value & ~(blk.mask << shift)) | (pattern << shift)


def _format_coords(coords) -> str:
    return ",".join(str(c) for c in sorted(coords)) if coords else "-"


def _uniform(per_fold: tuple[tuple[int, Cover], ...]) -> bool:
    return len({cover for _, cover in per_fold}) == 1


# ---------------------------------------------------------------------------
# meager ideal

def shrink_silver_meager(
    F: MeagerCover, T: SilverTree, folds: Sequence[int] = DEFAULT_FOLDS
) -> ShrinkResult:
    """Shrink a Silver tree so branch sums cannot rescue points of F from
    a pairwise-coarsened avoidance cover."""
    folds = _clean_folds(folds)
    if F.horizon != T.horizon:
        raise ValueError("cover and tree horizons differ")
    fine = F.partition
    pairs = len(fine) // 2
    if pairs == 0:
        raise ValueError("need at least two blocks to form coarse pairs")
    coarse = Partition(
        tuple(Block(fine[2 * k].lo, fine[2 * k + 1].hi) for k in range(pairs))
    )
    warnings = []
    if len(fine) % 2:
        warnings.append("dropped 1 trailing fine block not filling a pair")

    selected = []
    for k in range(pairs):
        hits = sorted(i for i in T.free if i in coarse[k])
        if hits:
            selected.append(hits[0])
    if not T.free:
        warnings.append("input tree has no free coordinates at this horizon")
    elif not selected:
        warnings.append("no free coordinate fits the coarse blocks; tree kept a single branch")
    tree_out = SilverTree(T.x, frozenset(selected))

    threshold = min(-(-F.threshold // 2), pairs)
    Hw = coarse.horizon
    per_fold = []
    for b in folds:
        x = F.xF.truncate(Hw)
        if b % 2:
            x = x ^ T.x.truncate(Hw)
        per_fold.append((b, MeagerCover(x, coarse, threshold)))

    source = tuple(
        block_product(
            [_allowed_or_full(F, 2 * k), _allowed_or_full(F, 2 * k + 1)]
        )
        for k in range(pairs)
    )
    targets = tuple(
        (b, tuple(cover.allowed(k) for k in range(pairs)))
        for b, cover in per_fold
    )
    request = CertificateRequest(
        "meager", coarse, source, silver_to_prefix(tree_out),
        targets, tuple((b, threshold) for b in folds),
    )
    bundle = WitnessBundle(
        "meager", "meager", tuple(per_fold), _uniform(tuple(per_fold)),
        request, None, (),
    )
    prov = Provenance(
        "shrink_silver_meager",
        (
            ("selected", _format_coords(selected)),
            ("coarse_blocks", str(pairs)),
            ("threshold", str(threshold)),
        ),
        tuple(warnings),
    )
    return ShrinkResult(tree_out, (bundle,), prov)


def _super_ranges(fine_count: int) -> list[tuple[int, int]]:
    """Complete super-blocks as fine-index ranges, sizes 1, 4, 64, ..."""
    out = []
    start = 0
    n = 0
    while True:
        size = (2**n) ** (n + 1)
        if start + size > fine_count:
            return out
        out.append((start, start + size))
        start += size
        n += 1


def _tuples_over(letters: list[str], max_len: int) -> list[tuple[str, ...]]:
    out: list[tuple[str, ...]] = []
    for m in range(max_len + 1):
        out.extend(itertools.product(letters, repeat=m))
    return out


def _all_split_level(T: PrefixTree, lo: int) -> int:
    for d in range(lo, T.horizon):
        if T.levels[d] and T.splits_at(d) == T.levels[d]:
            return d
    raise ValueError(
        f"no level at or past {lo} where every node splits; "
        "uniform mode needs a uniformly perfect tree"
    )


def _leftmost_at(T: PrefixTree, stem: str, depth: int) -> str:
    node = stem
    while len(node) < depth:
        v = int(node, 2) if node else 0
        node += format(min(T.children(len(node), v)) & 1, "b")
    return node


def shrink_perfect_meager(
    F: MeagerCover,
    T: PrefixTree,
    uniform: bool = False,
    folds: Sequence[int] = DEFAULT_FOLDS,
) -> ShrinkResult:
    """Select a hierarchy of splitting nodes over fast-growing super-blocks
    and recenter the avoidance cover on the node-sum pattern each fine
    block is assigned."""
    folds = _clean_folds(folds)
    if F.horizon != T.horizon:
        raise ValueError("cover and tree horizons differ")
    if not classify(T).perfect:
        raise ValueError("input tree is not perfect at its horizon")
    fine = F.partition
    N = F.threshold
    ranges = _super_ranges(len(fine))
    G = len(ranges) - 1
    supers = Partition(
        tuple(Block(fine[lo].lo, fine[hi - 1].hi) for lo, hi in ranges)
    )
    warnings = []
    dropped = len(fine) - ranges[-1][1]
    if dropped:
        warnings.append(
            f"dropped {dropped} trailing fine block(s) not filling a super-block"
        )

    # splitting-node hierarchy: generation g nodes sit past super-block g
    sigma: dict[str, str] = {}
    if uniform:
        level = _all_split_level(T, supers[0].hi)
        sigma[""] = _leftmost_at(T, "", level)
    else:
        sigma[""] = first_splitting_node(T, "", supers[0].hi)
    for g in range(1, G + 1):
        if uniform:
            need = max(
                supers[g].hi,
                max(len(sigma[tau]) for tau in sigma if len(tau) == g - 1) + 1,
            )
            level = _all_split_level(T, need)
        for tau in [t for t in list(sigma) if len(t) == g - 1]:
            for i in "01":
                stem = sigma[tau] + i
                if uniform:
                    sigma[tau + i] = _leftmost_at(T, stem, level)
                else:
                    sigma[tau + i] = first_splitting_node(T, stem, supers[g].hi)

    leaves = []
    for tau in sigma:
        if len(tau) == G:
            for i in "01":
                leaves.append(leftmost_leaf(T, sigma[tau] + i))
    tree_out = PrefixTree.from_leaves(leaves)

    # recentered target: on super-block n, fine block i carries the sum of
    # the generation-n nodes named by the i-th tuple of the canonical order
    Hw = supers.horizon
    x_val = F.xF.truncate(Hw).value
    for n in range(1, G + 1):
        lo, hi = ranges[n]
        letters = [format(v, f"0{n}b") for v in range(2**n)]
        tuples = _tuples_over(letters, n)
        for offset, j in enumerate(range(lo, hi)):
            blk = fine[j]
            val = restrict(F.xF, blk).value
            for letter in tuples[offset % len(tuples)]:
                node = sigma[letter]
                val ^= (int(node, 2) >> (len(node) - blk.hi)) & blk.mask
            x_val = _set_block(x_val, Hw, blk, val)
    x_H = Point(Hw, x_val)

    base = next(
        (n for n in range(len(ranges)) if ranges[n][0] >= N), len(ranges)
    )
    per_fold = tuple(
        (b, MeagerCover(x_H, supers, min(max(b, base), len(supers))))
        for b in folds
    )
    source = tuple(
        block_product([_allowed_or_full(F, j) for j in range(lo, hi)])
        for lo, hi in ranges
    )
    targets = tuple(
        (b, tuple(cover.allowed(k) for k in range(len(supers))))
        for b, cover in per_fold
    )
    request = CertificateRequest(
        "meager", supers, source, tree_out, targets,
        tuple((b, cover.threshold) for b, cover in per_fold),
    )
    bundle = WitnessBundle(
        "meager", "meager", per_fold, _uniform(per_fold), request, None, ()
    )
    prov = Provenance(
        "shrink_perfect_meager",
        (
            ("generations", str(G + 1)),
            ("super_blocks", str(len(supers))),
            ("base_threshold", str(base)),
            ("witness_horizon", str(Hw)),
            ("uniform", str(uniform).lower()),
        ),
        tuple(warnings),
    )
    return ShrinkResult(tree_out, (bundle,), prov)


def _triangular_ranges(fine_count: int) -> list[tuple[int, int]]:
    """Fine-index ranges of sizes 1, 1, 2, 3, 4, ..."""
    out = [(0, 1)]
    n = 0
    while True:
        lo = n * (n + 1) // 2 + 1
        hi = (n + 1) * (n + 2) // 2 + 1
        if hi > fine_count:
            return out
        out.append((lo, hi))
        n += 1


def build_splitting_meager(
    F: MeagerCover, folds: Sequence[int] = DEFAULT_FOLDS
) -> ShrinkResult:
    """Fresh splitting tree whose branches carry a single 1 in each
    triangular block group, so few branches cannot soil every fine block."""
    folds = _clean_folds(folds)
    fine = F.partition
    H = F.horizon
    N = F.threshold
    ranges = _triangular_ranges(len(fine))
    supers = Partition(
        tuple(Block(fine[lo].lo, fine[hi - 1].hi) for lo, hi in ranges)
    )
    warnings = []
    dropped = len(fine) - ranges[-1][1]
    if dropped:
        warnings.append(
            f"dropped {dropped} trailing fine block(s) not filling a group"
        )

    segments = [supers[n] for n in range(len(supers))]
    choices = []
    for seg in segments:
        choices.append([1 << (seg.hi - 1 - i) for i in range(seg.lo, seg.hi)])
    tail = H - supers.horizon
    leaves = set()
    for combo in itertools.product(*choices):
        v = 0
        for seg, one_hot in zip(segments, combo):
            v |= one_hot << (H - seg.hi)
        for tail_bits in range(1 << tail):
            leaves.add(v | tail_bits)
    tree_out = PrefixTree(H, frozenset(leaves))

    base = next(
        (n for n in range(len(ranges)) if ranges[n][0] >= N), len(ranges)
    )
    x_w = F.xF.truncate(supers.horizon)
    per_fold = []
    for b in folds:
        thr = base if b == 0 else max(base, b + 1)
        per_fold.append((b, MeagerCover(x_w, supers, min(thr, len(supers)))))
    per_fold = tuple(per_fold)

    source = tuple(
        block_product([_allowed_or_full(F, j) for j in range(lo, hi)])
        for lo, hi in ranges
    )
    targets = tuple(
        (b, tuple(cover.allowed(k) for k in range(len(supers))))
        for b, cover in per_fold
    )
    request = CertificateRequest(
        "meager", supers, source, tree_out, targets,
        tuple((b, cover.threshold) for b, cover in per_fold),
    )
    bundle = WitnessBundle(
        "meager", "meager", per_fold, _uniform(per_fold), request, None, ()
    )
    prov = Provenance(
        "build_splitting_meager",
        (
            ("groups", str(len(supers))),
            ("base_threshold", str(base)),
            ("witness_horizon", str(supers.horizon)),
        ),
        tuple(warnings),
    )
    return ShrinkResult(tree_out, (bundle,), prov)


# ---------------------------------------------------------------------------
# small and null ideals

def shrink_silver_small(
    F: SmallCover, T: SilverTree, folds: Sequence[int] = DEFAULT_FOLDS
) -> ShrinkResult:
    """Thin the free set to one coordinate per block; branch sums then only
    translate each block by the fixed point or the lone unit."""
    folds = _clean_folds(folds)
    if F.horizon != T.horizon:
        raise ValueError("cover and tree horizons differ")
    P = F.partition
    warnings = []
    selected = []
    units: list[Word | None] = []
    for n, blk in enumerate(P.blocks):
        hits = sorted(i for i in T.free if i in blk)
        if hits:
            selected.append(hits[0])
            units.append(indicator_word(blk, [hits[0]]))
        else:
            units.append(None)
    if not selected:
        warnings.append("no free coordinates selected; tree body is a single branch")
    tree_out = SilverTree(T.x, frozenset(selected))

    witness_patterns = []
    for n, blk in enumerate(P.blocks):
        xw = restrict(T.x, blk)
        translates = {0, xw.value}
        if units[n] is not None:
            translates |= {units[n].value, xw.value ^ units[n].value}
        witness_patterns.append(
            pattern_sum(F.patterns[n], PatternSet(blk, frozenset(translates)))
        )
    witness = SmallCover(P, tuple(witness_patterns))

    per_fold = tuple((b, witness) for b in folds)
    targets = tuple((b, witness.patterns) for b in folds)
    request = CertificateRequest(
        "small", P, F.patterns, silver_to_prefix(tree_out), targets,
        tuple((b, 0) for b in folds),
    )
    bound = 4 * F.mass
    bundle = WitnessBundle(
        "small", "small", per_fold, True, request,
        "mass", tuple((b, bound) for b in folds),
    )
    prov = Provenance(
        "shrink_silver_small",
        (("selected", _format_coords(selected)),),
        tuple(warnings),
    )
    return ShrinkResult(tree_out, (bundle,), prov)


def _compose_two_smalls(
    op_name: str,
    first_step,
    second_step,
    F: NullCover,
    T,
) -> ShrinkResult:
    first = first_step(F.first, T)
    second = second_step(F.second, first.tree_out)
    final_prefix = second.tree_as_prefix()
    bundles = []
    for stage, res in (("1", first), ("2", second)):
        b = res.witnesses[0]
        bundles.append(
            replace(
                b,
                label=f"small-{stage}",
                request=replace(
                    b.request.with_tree(final_prefix), label=f"small-{stage}"
                ),
            )
        )
    details = (
        tuple((f"first.{k}", v) for k, v in first.provenance.details)
        + tuple((f"second.{k}", v) for k, v in second.provenance.details)
    )
    prov = Provenance(
        op_name,
        details,
        first.provenance.warnings + second.provenance.warnings,
    )
    return ShrinkResult(second.tree_out, tuple(bundles), prov)


def shrink_silver_null(
    F: NullCover, T: SilverTree, folds: Sequence[int] = DEFAULT_FOLDS
) -> ShrinkResult:
    """Two consecutive small-cover shrinks; the first witness stays valid
    for the final tree because its branch sums only got fewer."""
    step = lambda C, tree: shrink_silver_small(C, tree, folds=folds)
    return _compose_two_smalls("shrink_silver_null", step, step, F, T)


def _expanded_budget(masses: list[Fraction], block_count: int) -> tuple[list[int], tuple[tuple[str, str], ...]]:
    positive = [(n, a) for n, a in enumerate(masses) if a > 0]
    if not positive:
        return [0] * block_count, (("kseq", "skipped, all densities zero"),)
    K = build_kseq([a for _, a in positive], block_count)
    k_by_block = {}
    for (n, _), k in zip(positive, K.k):
        k_by_block[n] = k
    out = []
    last = 0
    for n in range(block_count):
        if n in k_by_block:
            last = k_by_block[n]
        out.append(last)
    details = (
        ("kseq_cutoffs", _format_coords(K.nj)),
        ("split_budget", ",".join(str(k) for k in out)),
    )
    return out, details


def _prune_split_budget(
    T: PrefixTree, allowance: list[int], uniform: bool
) -> PrefixTree:
    cur = {0: 0}
    for d in range(T.horizon):
        splits = T.splits_at(d)
        if uniform:
            split_all = bool(cur) and all(
                v in splits and used < allowance[d] for v, used in cur.items()
            )
        nxt: dict[int, int] = {}
        for v, used in cur.items():
            children = T.children(d, v)
            here = (
                split_all
                if uniform
                else len(children) == 2 and used < allowance[d]
            )
            if here:
                for c in children:
                    nxt[c] = used + 1
            else:
                nxt[min(children)] = used
        cur = nxt
    return PrefixTree(T.horizon, frozenset(cur))


def _perfect_warning(pruned: PrefixTree) -> list[str]:
    if classify(pruned).perfect:
        return []
    deepest = max(
        (d for d in range(pruned.horizon) if pruned.splits_at(d)), default=-1
    )
    return [
        f"split budget exhausts after depth {deepest}; "
        "pruned tree is not perfect at this horizon"
    ]


def shrink_perfect_small(
    F: SmallCover,
    T: PrefixTree,
    uniform: bool = False,
    folds: Sequence[int] = DEFAULT_FOLDS,
    require_perfect: bool = True,
) -> ShrinkResult:
    """Cap the number of splitting ancestors per block so each block's
    branch patterns stay below the exponent budget, then pay for fold sums
    with the analytic bound.

    Composed calls pass require_perfect=False for intermediate trees that
    an earlier budget already flattened (that step warned about it)."""
    folds = _clean_folds(folds)
    if F.horizon != T.horizon:
        raise ValueError("cover and tree horizons differ")
    if require_perfect and not classify(T).perfect:
        raise ValueError("input tree is not perfect at its horizon")
    P = F.partition
    masses = [J.density for J in F.patterns]
    budget, kseq_details = _expanded_budget(masses, len(P))
    allowance = [budget[P.index_of(d)] for d in range(T.horizon)]
    tree_out = _prune_split_budget(T, allowance, uniform)
    warnings = _perfect_warning(tree_out)

    per_fold = []
    for b in folds:
        pats = tuple(
            pattern_sum(F.patterns[n], _nfold(tree_restrict(tree_out, blk), b))
            for n, blk in enumerate(P.blocks)
        )
        per_fold.append((b, SmallCover(P, pats)))
    per_fold = tuple(per_fold)

    targets = tuple((b, cover.patterns) for b, cover in per_fold)
    request = CertificateRequest(
        "small", P, F.patterns, tree_out, targets,
        tuple((b, 0) for b in folds),
    )
    mass = F.mass
    bundle = WitnessBundle(
        "small", "small", per_fold, _uniform(per_fold), request,
        "mass", tuple((b, (1 << (b * b)) * mass) for b in folds),
    )
    prov = Provenance(
        "shrink_perfect_small",
        kseq_details + (("uniform", str(uniform).lower()),),
        tuple(warnings),
    )
    return ShrinkResult(tree_out, (bundle,), prov)


def shrink_perfect_null(
    F: NullCover,
    T: PrefixTree,
    uniform: bool = False,
    folds: Sequence[int] = DEFAULT_FOLDS,
) -> ShrinkResult:
    first = lambda C, tree: shrink_perfect_small(
        C, tree, uniform=uniform, folds=folds
    )
    second = lambda C, tree: shrink_perfect_small(
        C, tree, uniform=uniform, folds=folds, require_perfect=False
    )
    return _compose_two_smalls("shrink_perfect_null", first, second, F, T)


def _interleaved_pieces(P1: Partition, P2: Partition) -> list[Block]:
    """Real intervals of the merged refinement; phantom empty end pieces
    are handled by the callers via index arithmetic."""
    if len(P1) != len(P2):
        raise ValueError("partitions do not interleave")
    e = [b.lo for b in P1.blocks[1:]]
    f = [b.lo for b in P2.blocks[1:]]
    bounds = [0]
    for en, fn in zip(e, f):
        if not bounds[-1] < en < fn:
            raise ValueError("partitions do not interleave")
        bounds.extend([en, fn])
    bounds.append(P1.horizon)
    if bounds[-2] >= bounds[-1]:
        raise ValueError("partitions do not interleave")
    return [Block(lo, hi) for lo, hi in zip(bounds, bounds[1:])]


def build_splitting_null(
    F: NullCover, folds: Sequence[int] = DEFAULT_FOLDS
) -> ShrinkResult:
    """Fresh splitting tree that is constant off a sparse coordinate set
    chosen to meet every block of both partitions at most once."""
    folds = _clean_folds(folds)
    P1, P2 = F.first.partition, F.second.partition
    H = F.horizon
    pieces = _interleaved_pieces(P1, P2)

    count1 = [0] * len(P1)
    count2 = [0] * len(P2)
    A: list[int] = []
    for c in range(H):
        n1, n2 = P1.index_of(c), P2.index_of(c)
        if count1[n1] == 0 and count2[n2] == 0:
            A.append(c)
            count1[n1] += 1
            count2[n2] += 1

    piece_free = [
        [i for i in range(blk.lo, blk.hi) if i not in A] for blk in pieces
    ]
    full_block = Block(0, H)
    piece_masks = [
        indicator_word(full_block, coords).value for coords in piece_free
    ]
    unit_masks = [indicator_word(full_block, [a]).value for a in A]
    leaves = set()
    for consts in itertools.product((0, 1), repeat=len(pieces)):
        base = 0
        for c, m in zip(consts, piece_masks):
            if c:
                base |= m
        for bits in itertools.product((0, 1), repeat=len(A)):
            v = base
            for bit, m in zip(bits, unit_masks):
                if bit:
                    v |= m
            leaves.add(v)
    tree_out = PrefixTree(H, frozenset(leaves))

    chi = frozenset(A)
    bundles = []
    for label, small, P in (
        ("small-1", F.first, P1),
        ("small-2", F.second, P2),
    ):
        pats = []
        for n, blk in enumerate(P.blocks):
            # the block is two refinement pieces; collect both their masks
            local_masks = []
            for piece in pieces:
                if piece.lo >= blk.lo and piece.hi <= blk.hi:
                    local_masks.append(
                        indicator_word(
                            blk, [i for i in range(piece.lo, piece.hi) if i not in chi]
                        ).value
                    )
            unit = indicator_word(blk, [a for a in A if a in blk]).value
            translates = set()
            for consts in itertools.product((0, 1), repeat=len(local_masks)):
                v = 0
                for c, m in zip(consts, local_masks):
                    if c:
                        v |= m
                translates.add(v)
                translates.add(v ^ unit)
            pats.append(
                pattern_sum(
                    small.patterns[n], PatternSet(blk, frozenset(translates))
                )
            )
        witness = SmallCover(P, tuple(pats))
        per_fold = tuple((b, witness) for b in folds)
        request = CertificateRequest(
            label, P, small.patterns, tree_out,
            tuple((b, witness.patterns) for b in folds),
            tuple((b, 0) for b in folds),
        )
        bound = 8 * small.mass
        bundles.append(
            WitnessBundle(
                label, "small", per_fold, True, request,
                "mass", tuple((b, bound) for b in folds),
            )
        )
    prov = Provenance(
        "build_splitting_null",
        (
            ("selected", _format_coords(A)),
            ("refinement_bounds", _format_coords({p.lo for p in pieces} | {H})),
        ),
        (),
    )
    return ShrinkResult(tree_out, tuple(bundles), prov)


def shrink_mn(
    Fm: MeagerCover,
    Fn: NullCover,
    T: SilverTree | PrefixTree,
    kind: str,
    folds: Sequence[int] = DEFAULT_FOLDS,
) -> ShrinkResult:
    """Meager shrink followed by null shrink; the meager witness is
    revalidated against the final tree."""
    if kind == "silver":
        if not isinstance(T, SilverTree):
            raise ValueError("silver kind needs a Silver tree")
        meager = shrink_silver_meager(Fm, T, folds=folds)
        null = shrink_silver_null(Fn, meager.tree_out, folds=folds)
    elif kind in ("perfect", "uniform"):
        if not isinstance(T, PrefixTree):
            raise ValueError(f"{kind} kind needs an explicit prefix tree")
        uniform = kind == "uniform"
        meager = shrink_perfect_meager(Fm, T, uniform=uniform, folds=folds)
        null = shrink_perfect_null(
            Fn, meager.tree_out, uniform=uniform, folds=folds
        )
    else:
        raise ValueError(f"unknown kind {kind!r}")
    final_prefix = null.tree_as_prefix()
    mb = meager.witnesses[0]
    mb = replace(mb, request=mb.request.with_tree(final_prefix))
    prov = Provenance(
        "shrink_mn",
        (("kind", kind),)
        + tuple((f"meager.{k}", v) for k, v in meager.provenance.details)
        + tuple((f"null.{k}", v) for k, v in null.provenance.details),
        meager.provenance.warnings + null.provenance.warnings,
    )
    return ShrinkResult(null.tree_out, (mb,) + null.witnesses, prov)


# ---------------------------------------------------------------------------
# the E ideal

def simplify_e_cover(chain: ClosedNullChain) -> ECover:
    """Turn a refining chain of closed-set approximations into blockwise
    form: each stage contributes one block of new coordinates, with its
    cylinders saturated over everything already consumed."""
    blocks = []
    patterns = []
    consumed = 0
    for k, stage in enumerate(chain.stages):
        end = stage.max_length
        blk = Block(consumed, end)
        width = blk.length
        vals: set[int] = set()
        saturated = False
        for s in stage.nodes:
            if len(s) <= consumed:
                saturated = True
                break
            suffix = s[consumed:]
            pad = width - len(suffix)
            base = int(suffix, 2) << pad
            vals.update(base | t for t in range(1 << pad))
        if saturated:
            vals = set(range(1 << width))
        dens = Fraction(len(vals), 1 << width)
        if dens >= Fraction(1, 2):
            raise ValueError(
                f"insufficient nullity at stage {k}: saturated density {dens}"
            )
        blocks.append(blk)
        patterns.append(PatternSet(blk, frozenset(vals)))
        consumed = end
    return ECover(Partition(tuple(blocks)), tuple(patterns), 0)


def _triple_ranges(fine_count: int) -> list[tuple[int, int]]:
    return [(3 * n, 3 * n + 3) for n in range(fine_count // 3)]


def shrink_silver_e(
    E: ECover, T: SilverTree, folds: Sequence[int] = DEFAULT_FOLDS
) -> ShrinkResult:
    """One free coordinate per block triple; branch sums act by the four
    translations generated by the tree point and the unit there."""
    folds = _clean_folds(folds)
    if E.horizon != T.horizon:
        raise ValueError("cover and tree horizons differ")
    fine = E.partition
    ranges = _triple_ranges(len(fine))
    if not ranges:
        raise ValueError("need at least three blocks to form triples")
    triples = Partition(
        tuple(Block(fine[lo].lo, fine[hi - 1].hi) for lo, hi in ranges)
    )
    warnings = []
    dropped = len(fine) - ranges[-1][1]
    if dropped:
        warnings.append(
            f"dropped {dropped} trailing fine block(s) not filling a triple"
        )

    selected = []
    for blk in triples.blocks:
        hits = sorted(i for i in T.free if i in blk)
        if hits:
            selected.append(hits[0])
    if not selected:
        warnings.append("no free coordinates selected; tree body is a single branch")
    tree_out = SilverTree(T.x, frozenset(selected))

    threshold = min(-(-E.threshold // 3), len(triples))
    witness_patterns = []
    for k, blk in enumerate(triples.blocks):
        lo, hi = ranges[k]
        prod = block_product([E.patterns[j] for j in range(lo, hi)])
        xw = restrict(T.x, blk).value
        unit = indicator_word(blk, [a for a in selected if a in blk]).value
        translates = PatternSet(
            blk, frozenset({0, xw, unit, xw ^ unit})
        )
        witness_patterns.append(pattern_sum(prod, translates))
    witness = ECover(triples, tuple(witness_patterns), threshold)

    per_fold = tuple((b, witness) for b in folds)
    source = tuple(
        block_product([_e_or_full(E, j) for j in range(lo, hi)])
        for lo, hi in ranges
    )
    request = CertificateRequest(
        "e", triples, source, silver_to_prefix(tree_out),
        tuple((b, witness.patterns) for b in folds),
        tuple((b, threshold) for b in folds),
    )
    bundle = WitnessBundle(
        "e", "e", per_fold, True, request,
        "max_density", tuple((b, Fraction(1, 2)) for b in folds),
    )
    prov = Provenance(
        "shrink_silver_e",
        (
            ("selected", _format_coords(selected)),
            ("triples", str(len(triples))),
            ("threshold", str(threshold)),
        ),
        tuple(warnings),
    )
    return ShrinkResult(tree_out, (bundle,), prov)


def shrink_perfect_e(
    E: ECover,
    T: PrefixTree,
    uniform: bool = False,
    folds: Sequence[int] = DEFAULT_FOLDS,
) -> ShrinkResult:
    """Split budget n inside super-block n; witness blocks absorb every
    fold sum up to the block index."""
    folds = _clean_folds(folds)
    if E.horizon != T.horizon:
        raise ValueError("cover and tree horizons differ")
    if not classify(T).perfect:
        raise ValueError("input tree is not perfect at its horizon")
    fine = E.partition
    ranges = _super_ranges(len(fine))
    G = len(ranges) - 1
    supers = Partition(
        tuple(Block(fine[lo].lo, fine[hi - 1].hi) for lo, hi in ranges)
    )
    warnings = []
    dropped = len(fine) - ranges[-1][1]
    if dropped:
        warnings.append(
            f"dropped {dropped} trailing fine block(s) not filling a super-block"
        )

    allowance = []
    for d in range(T.horizon):
        if d >= supers.horizon:
            allowance.append(G + 1)
        else:
            allowance.append(next(n for n in range(len(supers)) if d < supers[n].hi))
    tree_out = _prune_split_budget(T, allowance, uniform)
    warnings.extend(_perfect_warning(tree_out))

    base = next(
        (n for n in range(len(ranges)) if ranges[n][0] >= E.threshold),
        len(ranges),
    )
    witness_patterns = []
    for n, blk in enumerate(supers.blocks):
        lo, hi = ranges[n]
        prod = block_product([E.patterns[j] for j in range(lo, hi)])
        witness_patterns.append(
            pattern_sum(prod, _fold_union(tree_restrict(tree_out, blk), n))
        )
    per_fold = tuple(
        (
            b,
            ECover(
                supers, tuple(witness_patterns),
                min(max(b, base), len(supers)),
            ),
        )
        for b in folds
    )
    source = tuple(
        block_product([_e_or_full(E, j) for j in range(lo, hi)])
        for lo, hi in ranges
    )
    request = CertificateRequest(
        "e", supers, source, tree_out,
        tuple((b, cover.patterns) for b, cover in per_fold),
        tuple((b, cover.threshold) for b, cover in per_fold),
    )
    bundle = WitnessBundle(
        "e", "e", per_fold, _uniform(per_fold), request,
        "max_density", tuple((b, Fraction(1, 2)) for b in folds),
    )
    prov = Provenance(
        "shrink_perfect_e",
        (
            ("super_blocks", str(len(supers))),
            ("base_threshold", str(base)),
            ("uniform", str(uniform).lower()),
        ),
        tuple(warnings),
    )
    return ShrinkResult(tree_out, (bundle,), prov)


def build_splitting_e(
    E: ECover, folds: Sequence[int] = DEFAULT_FOLDS
) -> ShrinkResult:
    """Fresh splitting tree constant off one chosen coordinate per triple;
    witnesses absorb the four constant-or-flip translations."""
    folds = _clean_folds(folds)
    fine = E.partition
    H = E.horizon
    ranges = _triple_ranges(len(fine))
    if not ranges:
        raise ValueError("need at least three blocks to form triples")
    triples = Partition(
        tuple(Block(fine[lo].lo, fine[hi - 1].hi) for lo, hi in ranges)
    )
    warnings = []
    dropped = len(fine) - ranges[-1][1]
    if dropped:
        warnings.append(
            f"dropped {dropped} trailing fine block(s) not filling a triple"
        )

    # default sparse set: the first coordinate of each fine block, thinned
    # to its least representative per triple
    A = [fine[lo].lo for lo, _ in ranges]
    full_block = Block(0, H)
    masks = [
        indicator_word(
            full_block,
            [i for i in range(blk.lo, blk.hi) if i != a],
        ).value
        for blk, a in zip(triples.blocks, A)
    ]
    units = [indicator_word(full_block, [a]).value for a in A]
    tail = H - triples.horizon
    leaves = set()
    for consts in itertools.product((0, 1), repeat=len(A)):
        base = 0
        for c, m in zip(consts, masks):
            if c:
                base |= m
        for bits in itertools.product((0, 1), repeat=len(A)):
            v = base
            for bit, m in zip(bits, units):
                if bit:
                    v |= m
            for tail_bits in range(1 << tail):
                leaves.add(v | tail_bits)
    tree_out = PrefixTree(H, frozenset(leaves))

    threshold = min(-(-E.threshold // 3), len(triples))
    witness_patterns = []
    for k, blk in enumerate(triples.blocks):
        lo, hi = ranges[k]
        prod = block_product([E.patterns[j] for j in range(lo, hi)])
        ones = blk.mask
        unit = indicator_word(blk, [A[k]]).value
        translates = PatternSet(
            blk, frozenset({0, ones, unit, ones ^ unit})
        )
        witness_patterns.append(pattern_sum(prod, translates))
    witness = ECover(triples, tuple(witness_patterns), threshold)

    per_fold = tuple((b, witness) for b in folds)
    source = tuple(
        block_product([_e_or_full(E, j) for j in range(lo, hi)])
        for lo, hi in ranges
    )
    request = CertificateRequest(
        "e", triples, source, tree_out,
        tuple((b, witness.patterns) for b in folds),
        tuple((b, threshold) for b in folds),
    )
    bundle = WitnessBundle(
        "e", "e", per_fold, True, request,
        "max_density", tuple((b, Fraction(1, 2)) for b in folds),
    )
    prov = Provenance(
        "build_splitting_e",
        (
            ("selected", _format_coords(A)),
            ("triples", str(len(triples))),
            ("threshold", str(threshold)),
        ),
        tuple(warnings),
    )
    return ShrinkResult(tree_out, (bundle,), prov)

"""Exact finite-horizon workbench for XOR sumsets of tree bodies against blockwise covers."""

from treesum.bits import (
    Block,
    Partition,
    PatternSet,
    Point,
    Word,
    block_product,
    coarsen,
    density,
    pattern_sum,
    pattern_translate,
    restrict,
    xor_add,
)
from treesum.constructions import (
    Provenance,
    ShrinkResult,
    WitnessBundle,
    build_splitting_e,
    build_splitting_meager,
    build_splitting_null,
    shrink_mn,
    shrink_perfect_e,
    shrink_perfect_meager,
    shrink_perfect_null,
    shrink_perfect_small,
    shrink_silver_e,
    shrink_silver_meager,
    shrink_silver_null,
    shrink_silver_small,
    simplify_e_cover,
)
from treesum.covers import (
    Certificate,
    CertificateRequest,
    ClosedNullChain,
    ECover,
    MeagerCover,
    NullCover,
    SmallCover,
    Stage,
    e_density_audit,
    e_member,
    meager_member,
    small_mass,
    strict_e_to_simple,
)
from treesum.kseq import KSeq, build_kseq, check_kseq_bound
from treesum.oracle import (
    BudgetExceeded,
    blockwise_certify,
    certify_request,
    density_audit_table,
    exhaustive_containment,
    nfold_body_sum,
    pattern_nfold,
)
from treesum.scenario import (
    Report,
    RunFlags,
    Scenario,
    ScenarioError,
    load_scenario,
    run,
)
from treesum.trees import (
    PrefixTree,
    SilverTree,
    body,
    classify,
    silver_sum,
    silver_to_prefix,
    tree_restrict,
)

__all__ = [
    "Block",
    "BudgetExceeded",
    "Certificate",
    "CertificateRequest",
    "ClosedNullChain",
    "ECover",
    "KSeq",
    "MeagerCover",
    "NullCover",
    "Partition",
    "PatternSet",
    "Point",
    "PrefixTree",
    "Provenance",
    "Report",
    "RunFlags",
    "Scenario",
    "ScenarioError",
    "ShrinkResult",
    "SilverTree",
    "SmallCover",
    "Stage",
    "WitnessBundle",
    "Word",
    "block_product",
    "blockwise_certify",
    "body",
    "build_kseq",
    "build_splitting_e",
    "build_splitting_meager",
    "build_splitting_null",
    "certify_request",
    "check_kseq_bound",
    "classify",
    "coarsen",
    "density",
    "density_audit_table",
    "e_density_audit",
    "e_member",
    "exhaustive_containment",
    "load_scenario",
    "meager_member",
    "nfold_body_sum",
    "pattern_nfold",
    "pattern_sum",
    "pattern_translate",
    "restrict",
    "run",
    "shrink_mn",
    "shrink_perfect_e",
    "shrink_perfect_meager",
    "shrink_perfect_null",
    "shrink_perfect_small",
    "shrink_silver_e",
    "shrink_silver_meager",
    "shrink_silver_null",
    "shrink_silver_small",
    "silver_sum",
    "silver_to_prefix",
    "simplify_e_cover",
    "small_mass",
    "strict_e_to_simple",
    "tree_restrict",
    "xor_add",
]

__version__ = "0.1.0"

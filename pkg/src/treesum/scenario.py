"""Scenario files, request dispatch, and report assembly.

A scenario is a JSON document naming partitions, points, index sets, trees,
and covers, plus a list of construction requests wired together by those
names.  Running a scenario executes each request, replays its stored
certificate checks, optionally cross-checks with the exhaustive oracle, and
folds everything into one report with a single overall pass flag.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .bits import Block, Partition, PatternSet, Point, pattern_sum
from .covers import (
    Certificate,
    ClosedNullChain,
    ECover,
    MeagerCover,
    NullCover,
    SmallCover,
    Stage,
    e_density_audit,
)
from .constructions import (
    ShrinkResult,
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
from .oracle import (
    BudgetExceeded,
    certify_request,
    density_audit_table,
    exhaustive_containment,
    pattern_nfold,
)
from .trees import PrefixTree, SilverTree, classify, tree_restrict

log = logging.getLogger(__name__)


class ScenarioError(ValueError):
    """Raised for malformed or unresolvable scenario input."""


@dataclass(frozen=True)
class Tamper:
    bundle: str
    fold: int
    block: int


@dataclass(frozen=True)
class Request:
    op: str
    args: dict
    folds: tuple[int, ...] | None
    tamper: Tamper | None


@dataclass(frozen=True)
class Scenario:
    name: str
    horizon: int
    partitions: dict
    points: dict
    index_sets: dict
    trees: dict
    covers: dict
    requests: tuple[Request, ...]


@dataclass(frozen=True)
class RunFlags:
    folds: tuple[int, ...] = (0, 1, 2, 3)
    horizon_cap: int = 14
    exhaustive: bool = True
    deterministic: bool = False


@dataclass(frozen=True)
class Report:
    name: str
    passed: bool
    data: dict


# ---------------------------------------------------------------------------
# loading

def _fraction(text, where: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as err:
        raise ScenarioError(f"{where}: bad rational {text!r}: {err}") from None


def _bit_string(text, where: str) -> str:
    if not isinstance(text, str) or not text or any(c not in "01" for c in text):
        raise ScenarioError(f"{where}: expected a nonempty 0/1 string, got {text!r}")
    return text


def _load_partition(name: str, spec, horizon: int) -> Partition:
    where = f"partition {name!r}"
    if not isinstance(spec, dict):
        raise ScenarioError(f"{where}: expected an object")
    if "lengths" in spec:
        try:
            part = Partition.from_lengths(spec["lengths"])
        except (ValueError, TypeError) as err:
            raise ScenarioError(f"{where}: {err}") from None
    elif "blocks" in spec:
        try:
            part = Partition(
                tuple(Block(int(lo), int(hi)) for lo, hi in spec["blocks"])
            )
        except (ValueError, TypeError) as err:
            raise ScenarioError(f"{where}: {err}") from None
    else:
        raise ScenarioError(f"{where}: needs 'lengths' or 'blocks'")
    if part.horizon != horizon:
        raise ScenarioError(
            f"{where}: horizon mismatch, covers [0, {part.horizon}) "
            f"but the scenario horizon is {horizon}"
        )
    return part


def _ref(table: dict, name, kind: str, where: str):
    if name not in table:
        raise ScenarioError(f"{where}: unresolved {kind} reference {name!r}")
    return table[name]


def _load_tree(name: str, spec, scn_points, scn_sets, horizon: int):
    where = f"tree {name!r}"
    kind = spec.get("kind")
    if kind == "silver":
        x = _ref(scn_points, spec.get("x"), "point", where)
        free = _ref(scn_sets, spec.get("free"), "index set", where)
        try:
            return SilverTree(x, frozenset(free))
        except ValueError as err:
            raise ScenarioError(f"{where}: {err}") from None
    if kind == "full":
        return PrefixTree.full(horizon)
    if kind == "prefix":
        leaves = spec.get("leaves")
        if not isinstance(leaves, list):
            raise ScenarioError(f"{where}: prefix tree needs a 'leaves' list")
        for s in leaves:
            if len(_bit_string(s, where)) != horizon:
                raise ScenarioError(
                    f"{where}: horizon mismatch, leaf {s!r} has length "
                    f"{len(s)}, expected {horizon}"
                )
        return PrefixTree.from_leaves(leaves)
    raise ScenarioError(f"{where}: unknown tree kind {kind!r}")


def _load_patterns(partition: Partition, raw, where: str) -> tuple[PatternSet, ...]:
    if not isinstance(raw, list) or len(raw) != len(partition):
        raise ScenarioError(
            f"{where}: needs one pattern list per block "
            f"({len(partition)} blocks)"
        )
    out = []
    for n, block_pats in enumerate(raw):
        block = partition[n]
        words = [_bit_string(w, where) for w in block_pats]
        for w in words:
            if len(w) != block.length:
                raise ScenarioError(
                    f"{where}: word {w!r} has length {len(w)}, but block "
                    f"{n} is [{block.lo}, {block.hi})"
                )
        out.append(PatternSet.from_bits(block, words))
    return tuple(out)


def _load_cover(name: str, spec, scn, horizon: int):
    where = f"cover {name!r}"
    kind = spec.get("kind")
    try:
        if kind == "meager":
            x = _ref(scn["points"], spec.get("x"), "point", where)
            part = _ref(scn["partitions"], spec.get("partition"), "partition", where)
            return MeagerCover(x, part, int(spec.get("threshold", 0)))
        if kind == "small":
            part = _ref(scn["partitions"], spec.get("partition"), "partition", where)
            return SmallCover(part, _load_patterns(part, spec.get("patterns"), where))
        if kind == "null":
            first = _ref(scn["covers"], spec.get("first"), "cover", where)
            second = _ref(scn["covers"], spec.get("second"), "cover", where)
            if not isinstance(first, SmallCover) or not isinstance(second, SmallCover):
                raise ScenarioError(f"{where}: null cover parts must be small covers")
            return NullCover(first, second)
        if kind == "e":
            part = _ref(scn["partitions"], spec.get("partition"), "partition", where)
            return ECover(
                part,
                _load_patterns(part, spec.get("patterns"), where),
                int(spec.get("threshold", 0)),
            )
        if kind == "chain":
            stages = []
            for i, st in enumerate(spec.get("stages", ())):
                nodes = tuple(_bit_string(s, f"{where} stage {i}") for s in st["nodes"])
                for s in nodes:
                    if len(s) > horizon:
                        raise ScenarioError(
                            f"{where} stage {i}: horizon mismatch, node {s!r} "
                            f"is longer than {horizon}"
                        )
                stages.append(
                    Stage(nodes, _fraction(st["measure"], f"{where} stage {i}"))
                )
            return ClosedNullChain(tuple(stages))
    except ScenarioError:
        raise
    except (ValueError, TypeError, KeyError) as err:
        raise ScenarioError(f"{where}: {err}") from None
    raise ScenarioError(f"{where}: unknown cover kind {kind!r}")


_REQUEST_ARGS = {
    "shrink_silver_meager": (("cover", MeagerCover), ("tree", SilverTree)),
    "shrink_perfect_meager": (("cover", MeagerCover), ("tree", PrefixTree)),
    "build_splitting_meager": (("cover", MeagerCover),),
    "shrink_silver_small": (("cover", SmallCover), ("tree", SilverTree)),
    "shrink_silver_null": (("cover", NullCover), ("tree", SilverTree)),
    "shrink_perfect_small": (("cover", SmallCover), ("tree", PrefixTree)),
    "shrink_perfect_null": (("cover", NullCover), ("tree", PrefixTree)),
    "build_splitting_null": (("cover", NullCover),),
    "shrink_mn": (
        ("meager", MeagerCover),
        ("null", NullCover),
        ("tree", (SilverTree, PrefixTree)),
    ),
    "simplify_e_cover": (("chain", ClosedNullChain),),
    "shrink_silver_e": (("cover", ECover), ("tree", SilverTree)),
    "shrink_perfect_e": (("cover", ECover), ("tree", PrefixTree)),
    "build_splitting_e": (("cover", ECover),),
}

_UNIFORM_OPS = {"shrink_perfect_meager", "shrink_perfect_small",
                "shrink_perfect_null", "shrink_perfect_e"}


def _load_request(i: int, spec, trees: dict, covers: dict) -> Request:
    where = f"request {i}"
    op = spec.get("op")
    if op not in _REQUEST_ARGS:
        raise ScenarioError(f"{where}: unknown operation name {op!r}")
    args = {}
    for key, want in _REQUEST_ARGS[op]:
        table = trees if key == "tree" else covers
        obj = _ref(table, spec.get(key), key, where)
        if not isinstance(obj, want):
            wanted = (
                " or ".join(w.__name__ for w in want)
                if isinstance(want, tuple)
                else want.__name__
            )
            raise ScenarioError(
                f"{where}: {key} {spec.get(key)!r} is not a {wanted}"
            )
        args[key] = obj
    if op in _UNIFORM_OPS:
        args["uniform"] = bool(spec.get("uniform", False))
    if op == "shrink_mn":
        kind = spec.get("kind")
        if kind not in ("silver", "perfect", "uniform"):
            raise ScenarioError(f"{where}: unknown kind {kind!r}")
        args["kind"] = kind
    folds = None
    if "folds" in spec:
        folds = tuple(int(b) for b in spec["folds"])
    tamper = None
    if "tamper" in spec:
        t = spec["tamper"]
        try:
            tamper = Tamper(str(t["bundle"]), int(t["fold"]), int(t["block"]))
        except (KeyError, TypeError, ValueError) as err:
            raise ScenarioError(f"{where}: bad tamper spec: {err}") from None
    return Request(op, args, folds, tamper)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ScenarioError(f"cannot read {path}: {err}") from None
    return parse_scenario(text, name_hint=path.stem)


def parse_scenario(text: str, name_hint: str = "scenario") -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioError(
            f"parse error at line {err.lineno}, column {err.colno}: {err.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise ScenarioError("scenario document must be a JSON object")
    if "horizon" not in raw:
        raise ScenarioError("scenario is missing 'horizon'")
    horizon = int(raw["horizon"])
    if horizon <= 0:
        raise ScenarioError(f"bad horizon {horizon}")
    name = str(raw.get("name", name_hint))

    partitions = {
        str(k): _load_partition(k, v, horizon)
        for k, v in raw.get("partitions", {}).items()
    }
    points = {}
    for k, v in raw.get("points", {}).items():
        s = _bit_string(v, f"point {k!r}")
        if len(s) != horizon:
            raise ScenarioError(
                f"point {k!r}: horizon mismatch, length {len(s)} != {horizon}"
            )
        points[str(k)] = Point.from_bits(s)
    index_sets = {}
    for k, v in raw.get("index_sets", {}).items():
        coords = frozenset(int(i) for i in v)
        if any(i < 0 or i >= horizon for i in coords):
            raise ScenarioError(
                f"index set {k!r}: coordinate out of range [0, {horizon})"
            )
        index_sets[str(k)] = coords
    trees = {
        str(k): _load_tree(k, v, points, index_sets, horizon)
        for k, v in raw.get("trees", {}).items()
    }
    scn = {"partitions": partitions, "points": points, "covers": {}}
    for k, v in raw.get("covers", {}).items():
        scn["covers"][str(k)] = _load_cover(k, v, scn, horizon)
    requests = tuple(
        _load_request(i, spec, trees, scn["covers"])
        for i, spec in enumerate(raw.get("requests", ()))
    )
    if not requests:
        raise ScenarioError("scenario has no requests")
    return Scenario(
        name, horizon, partitions, points, index_sets, trees,
        scn["covers"], requests,
    )


# ---------------------------------------------------------------------------
# running

def list_ops() -> tuple[str, ...]:
    return tuple(sorted(_REQUEST_ARGS))


def _run_op(req: Request, folds: tuple[int, ...]):
    a = req.args
    op = req.op
    if op == "shrink_silver_meager":
        return shrink_silver_meager(a["cover"], a["tree"], folds=folds)
    if op == "shrink_perfect_meager":
        return shrink_perfect_meager(a["cover"], a["tree"], a["uniform"], folds)
    if op == "build_splitting_meager":
        return build_splitting_meager(a["cover"], folds=folds)
    if op == "shrink_silver_small":
        return shrink_silver_small(a["cover"], a["tree"], folds=folds)
    if op == "shrink_silver_null":
        return shrink_silver_null(a["cover"], a["tree"], folds=folds)
    if op == "shrink_perfect_small":
        return shrink_perfect_small(a["cover"], a["tree"], a["uniform"], folds)
    if op == "shrink_perfect_null":
        return shrink_perfect_null(a["cover"], a["tree"], a["uniform"], folds)
    if op == "build_splitting_null":
        return build_splitting_null(a["cover"], folds=folds)
    if op == "shrink_mn":
        return shrink_mn(a["meager"], a["null"], a["tree"], a["kind"], folds)
    if op == "simplify_e_cover":
        return simplify_e_cover(a["chain"])
    if op == "shrink_silver_e":
        return shrink_silver_e(a["cover"], a["tree"], folds=folds)
    if op == "shrink_perfect_e":
        return shrink_perfect_e(a["cover"], a["tree"], a["uniform"], folds)
    if op == "build_splitting_e":
        return build_splitting_e(a["cover"], folds=folds)
    raise ScenarioError(f"unknown operation name {op!r}")


def _point_sources(req: Request) -> dict:
    """Which witness bundles admit point-level membership tests, and the
    source cover to test against."""
    a = req.args
    if req.op in ("shrink_silver_meager", "shrink_perfect_meager",
                  "build_splitting_meager"):
        return {"meager": a["cover"]}
    if req.op in ("shrink_silver_e", "shrink_perfect_e", "build_splitting_e"):
        return {"e": a["cover"]}
    if req.op == "shrink_mn":
        return {"meager": a["meager"]}
    return {}


def _apply_tamper(request_obj, tamper: Tamper):
    """Remove one pattern that the fold image provably hits, so the
    resulting certificate must fail."""
    if tamper.block >= len(request_obj.partition):
        raise ScenarioError(f"tamper block {tamper.block} out of range")
    if tamper.fold not in request_obj.folds:
        raise ScenarioError(f"tamper fold {tamper.fold} not requested")
    if tamper.block < request_obj.threshold_for(tamper.fold):
        raise ScenarioError(
            f"tamper block {tamper.block} is below the fold {tamper.fold} "
            "threshold; the certificate would not consult it"
        )
    blk = request_obj.partition[tamper.block]
    tree_patterns = pattern_nfold(
        tree_restrict(request_obj.tree, blk), tamper.fold
    )
    image = pattern_sum(request_obj.source[tamper.block], tree_patterns)
    if not image.values:
        raise ScenarioError("tamper target block has an empty fold image")
    victim = min(image.values)
    new_targets = []
    for b, tgt in request_obj.targets:
        if b == tamper.fold:
            mutated = list(tgt)
            old = mutated[tamper.block]
            mutated[tamper.block] = PatternSet(
                old.block, old.values - {victim}
            )
            new_targets.append((b, tuple(mutated)))
        else:
            new_targets.append((b, tgt))
    return replace(request_obj, targets=tuple(new_targets))


def _frac(x: Fraction) -> str:
    return str(x)


def _tree_entry(result: ShrinkResult) -> dict:
    prefix = result.tree_as_prefix()
    flags = classify(prefix)
    entry = {
        "horizon": prefix.horizon,
        "leaf_count": len(prefix.leaves),
        "classification": {
            "perfect": flags.perfect,
            "uniformly_perfect": flags.uniformly_perfect,
            "silver": flags.silver,
            "splitting_at_horizon": flags.splitting_at_horizon,
        },
    }
    if isinstance(result.tree_out, SilverTree):
        entry["free"] = sorted(result.tree_out.free)
    return entry


def _certificate_entry(cert: Certificate) -> dict:
    return {
        "passed": cert.passed,
        "thresholds": {str(b): t for b, t in cert.thresholds},
        "checks": len(cert.checks),
        "failed_blocks": sorted(
            [c.fold, c.block_index] for c in cert.checks if not c.passed
        ),
    }


def _witness_entries(result, req, flags, tampered_label):
    sources = _point_sources(req)
    prefix = result.tree_as_prefix()
    entries = []
    request_pass = True
    for bundle in result.witnesses:
        request_obj = bundle.request
        if tampered_label == bundle.label:
            request_obj = _apply_tamper(request_obj, req.tamper)
        try:
            cert = certify_request(request_obj)
        except BudgetExceeded as err:
            entries.append({
                "label": bundle.label,
                "kind": bundle.kind,
                "error": f"oracle budget exceeded: {err}",
            })
            request_pass = False
            continue
        request_pass = request_pass and cert.passed
        entry = {
            "label": bundle.label,
            "kind": bundle.kind,
            "uniform_witness": bundle.uniform_witness,
            "tampered": tampered_label == bundle.label,
            "certificate": _certificate_entry(cert),
            "covers": [
                {
                    "fold": b,
                    "threshold": getattr(cover, "threshold", None),
                    "pattern_counts": (
                        [len(J) for J in cover.patterns]
                        if hasattr(cover, "patterns")
                        else None
                    ),
                }
                for b, cover in bundle.per_fold
            ],
        }
        rows = density_audit_table(bundle)
        if rows:
            entry["audits"] = [
                {
                    "fold": r.fold,
                    "kind": r.kind,
                    "value": _frac(r.value),
                    "bound": _frac(r.bound),
                    "passed": r.passed,
                }
                for r in rows
            ]
            request_pass = request_pass and all(r.passed for r in rows)
        source = sources.get(bundle.label)
        if (
            source is not None
            and flags.exhaustive
            and prefix.horizon <= flags.horizon_cap
            and tampered_label != bundle.label
        ):
            try:
                ex = {
                    str(b): exhaustive_containment(
                        source, prefix, b, cover, cap=flags.horizon_cap
                    )
                    for b, cover in bundle.per_fold
                }
            except BudgetExceeded as err:
                entry["exhaustive_error"] = f"oracle budget exceeded: {err}"
                request_pass = False
            else:
                entry["exhaustive"] = ex
                request_pass = request_pass and all(ex.values())
        entries.append(entry)
    return entries, request_pass


def _run_request(i: int, req: Request, flags: RunFlags) -> tuple[dict, bool]:
    folds = req.folds if req.folds is not None else flags.folds
    entry = {"index": i, "op": req.op}
    t0 = time.perf_counter()
    try:
        result = _run_op(req, folds)
    except BudgetExceeded as err:
        entry["error"] = f"oracle budget exceeded: {err}"
        return entry, False
    if isinstance(result, ECover):
        value, ok = e_density_audit(result)
        entry["cover"] = {
            "blocks": [[b.lo, b.hi] for b in result.partition.blocks],
            "threshold": result.threshold,
            "pattern_counts": [len(J) for J in result.patterns],
            "max_density": _frac(value),
            "audit_passed": ok,
        }
        passed = ok
    else:
        tampered_label = req.tamper.bundle if req.tamper else None
        if tampered_label is not None and tampered_label not in {
            w.label for w in result.witnesses
        }:
            raise ScenarioError(
                f"request {i}: tamper names unknown bundle {tampered_label!r}"
            )
        entry["tree"] = _tree_entry(result)
        entry["provenance"] = {
            "op": result.provenance.op,
            "details": dict(result.provenance.details),
            "warnings": list(result.provenance.warnings),
        }
        witness_entries, passed = _witness_entries(
            result, req, flags, tampered_label
        )
        entry["witnesses"] = witness_entries
    entry["passed"] = passed
    if not flags.deterministic:
        entry["timing_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    return entry, passed


def run(scenario: Scenario, flags: RunFlags = RunFlags()) -> Report:
    entries = []
    overall = True
    for i, req in enumerate(scenario.requests):
        entry, ok = _run_request(i, req, flags)
        entries.append(entry)
        overall = overall and ok
    data = {
        "scenario": scenario.name,
        "horizon": scenario.horizon,
        "flags": {
            "folds": list(flags.folds),
            "horizon_cap": flags.horizon_cap,
            "exhaustive": flags.exhaustive,
        },
        "requests": entries,
        "passed": overall,
    }
    if not flags.deterministic:
        data["generated_at"] = time.strftime(
            "%Y-%m-%dT%H:%M:%SZ", time.gmtime()
        )
    return Report(scenario.name, overall, data)


def render_report(report: Report) -> str:
    return json.dumps(report.data, indent=2, sort_keys=True) + "\n"


def emit(report: Report, path) -> None:
    Path(path).write_text(render_report(report), encoding="utf-8")


# ---------------------------------------------------------------------------
# bundled scenarios

def bundled_scenario_names() -> tuple[str, ...]:
    root = resources.files("treesum") / "scenarios"
    return tuple(
        sorted(p.name[: -len(".json")] for p in root.iterdir()
               if p.name.endswith(".json"))
    )


def load_bundled(name: str) -> Scenario:
    root = resources.files("treesum") / "scenarios"
    candidate = root / f"{name}.json"
    try:
        text = candidate.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError):
        raise ScenarioError(
            f"no bundled scenario named {name!r}; "
            f"available: {', '.join(bundled_scenario_names())}"
        ) from None
    return parse_scenario(text, name_hint=name)


def run_selftest(flags: RunFlags = RunFlags(deterministic=True)) -> tuple[bool, list[str]]:
    """Run every bundled scenario; returns overall pass and one line each."""
    lines = []
    overall = True
    for name in bundled_scenario_names():
        report = run(load_bundled(name), flags)
        lines.append(f"{name}: {'pass' if report.passed else 'FAIL'}")
        overall = overall and report.passed
    return overall, lines

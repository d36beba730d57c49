"""Perfect-matching pipeline.

Small instances go to the exact search. Larger ones first try the extremal
routine against the closest UUW/UWW template, then absorption plus greedy
and exchange moves, then a budgeted exact search. A negative answer is only
ever reported from an exhausted exact search.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field


from .absorption import AbsorptionConfig, AbsorptionFailure, absorb, sample_absorbing_family
from .constructions import ExtremalTemplate, TemplateRule
from .hypergraph import KPartiteHypergraph, Matching, VertexRef
from .matching import (
    PMStatus,
    SearchBudget,
    augment_to_fixpoint,
    greedy_matching,
    has_perfect_matching,
    max_matching_exact,
)
from .structure import best_hprime_template, classify_good_vertices

__all__ = [
    "SolverMode",
    "SolveStatus",
    "SolverConfig",
    "SolveOutcome",
    "ExtremalFailure",
    "extremal_solve",
    "solve_perfect_matching",
]


class SolverMode(enum.Enum):
    AUTO = "auto"
    EXACT_ONLY = "exact_only"
    HEURISTIC_ONLY = "heuristic_only"
    EXTREMAL_ONLY = "extremal_only"


class SolveStatus(enum.Enum):
    PERFECT = "perfect"
    NO_PERFECT = "no_perfect"
    INCOMPLETE = "incomplete"


@dataclass(frozen=True)
class SolverConfig:
    gamma: float = 0.1
    rho: float = 6 * 0.1 ** 6
    alpha: float = 0.01
    epsilon: float = 0.05
    exact_cutoff: int = 10
    exact_nodes: int = 2_000_000
    fallback_nodes: int = 200_000
    augment_depth: int = 2
    absorption_retries: int = 10
    seed: int = 0
    mode: SolverMode = SolverMode.AUTO

    def __post_init__(self):
        for name in ("gamma", "rho", "epsilon", "exact_nodes", "fallback_nodes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.exact_cutoff < 0:
            raise ValueError("exact_cutoff must be nonnegative")
        if self.augment_depth not in (1, 2, 3):
            raise ValueError("augment_depth must be 1, 2 or 3")
        if not isinstance(self.mode, SolverMode):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class SolveOutcome:
    status: SolveStatus
    matching: Matching | None
    trace: list[tuple[str, str]] = field(default_factory=list)
    certificate: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "matching_size": len(self.matching) if self.matching is not None else 0,
            "matching": self.matching.to_list() if self.matching is not None else [],
            "optimal": self.status is SolveStatus.PERFECT
            or (self.status is SolveStatus.NO_PERFECT and self.certificate.get("max_matching_optimal", False)),
            "trace": [list(t) for t in self.trace],
            "certificate": self.certificate,
        }


class ExtremalFailure(RuntimeError):
    def __init__(self, message: str, stage: str, trace: Sequence[tuple[str, str]] = ()):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.trace = list(trace)


class _Pool:
    """Free vertices of each class split into template U and W parts."""

    def __init__(self, template: ExtremalTemplate, keep: Sequence[Sequence[int]]):
        self.t = template
        self.U = [[i for i in keep[c] if not template.is_w(c, i)] for c in range(3)]
        self.W = [[i for i in keep[c] if template.is_w(c, i)] for c in range(3)]

    def size(self) -> int:
        return len(self.U[0]) + len(self.W[0])

    def w_total(self) -> int:
        return sum(len(w) for w in self.W)

    def take(self, e: Sequence[int]) -> None:
        for c, x in enumerate(e):
            (self.W if self.t.is_w(c, x) else self.U)[c].remove(x)

    def free(self, c: int) -> list[int]:
        return sorted(self.U[c] + self.W[c])


def _w_count(template: ExtremalTemplate, e: Sequence[int]) -> int:
    return sum(bool(template.is_w(c, x)) for c, x in enumerate(e))


def _perfect_on(es: frozenset, parts: list[list[int]]) -> list[tuple[int, ...]] | None:
    first, rest = parts[0], parts[1:]
    for perms in itertools.product(*(itertools.permutations(p) for p in rest)):
        edges = [tuple([first[t]] + [perm[t] for perm in perms]) for t in range(len(first))]
        if all(e in es for e in edges):
            return edges
    return None


def _good_routine(H: KPartiteHypergraph, pool: _Pool, trace: list) -> list[tuple[int, ...]]:
    """Perfect matching of the free part when the template is well aligned.

    Greedily takes edges with exactly one W vertex; leftover vertices are
    grouped into triples with one W vertex each, and every triple is
    swallowed together with one or two matching edges.
    """
    es = H.edge_set
    t = pool.t
    if pool.w_total() != pool.size():
        raise ExtremalFailure(f"profile sum {pool.w_total()} != class size {pool.size()}", "finish", trace)
    freeU = [set(u) for u in pool.U]
    M: list[tuple[int, ...]] = []
    leftover_w: list[tuple[int, int]] = []
    for c in range(3):
        j, l = (x for x in range(3) if x != c)
        for w in pool.W[c]:
            hit = None
            for a in sorted(freeU[j]):
                for b in sorted(freeU[l]):
                    e = [0, 0, 0]
                    e[c], e[j], e[l] = w, a, b
                    if tuple(e) in es:
                        hit = tuple(e)
                        break
                if hit:
                    break
            if hit is None:
                leftover_w.append((c, w))
                continue
            freeU[j].discard(hit[j])
            freeU[l].discard(hit[l])
            M.append(hit)
    trace.append(("finish", f"greedy one-W matching {len(M)}, leftover {len(leftover_w)}"))
    pools = [sorted(u) for u in freeU]
    triples = []
    for c, w in leftover_w:
        e = [0, 0, 0]
        e[c] = w
        for j in range(3):
            if j != c:
                e[j] = pools[j].pop(0)
        triples.append(tuple(e))
    for T in triples:
        done = False
        for r in (1, 2):
            for combo in itertools.combinations(range(len(M)), r):
                parts = [sorted([T[c]] + [M[q][c] for q in combo]) for c in range(3)]
                pm = _perfect_on(es, parts)
                if pm is not None:
                    M = [e for q, e in enumerate(M) if q not in combo] + pm
                    done = True
                    break
            if done:
                break
        if not done:
            raise ExtremalFailure(f"no exchange swallows leftover triple {T}", "exchange", trace)
    trace.append(("exchange", f"swallowed {len(triples)} leftover triples"))
    return M


def _check_regime(H: KPartiteHypergraph, template: ExtremalTemplate) -> None:
    if template.rule is not TemplateRule.UUW_UWW:
        raise ExtremalFailure("template must use the UUW/UWW rule", "precondition")
    if H.k != 3 or not H.has_equal_classes or H.n != template.n:
        raise ExtremalFailure("hypergraph and template shapes differ", "precondition")
    n = template.n
    if sum(template.profile) != n:
        raise ExtremalFailure(f"profile {template.profile} does not sum to n={n}", "precondition")
    for c, d in enumerate(template.profile):
        if 16 * d < 5 * n:
            raise ExtremalFailure(f"regime violated: d_{c + 1}={d} < 5n/16={5 * n / 16:g}", "precondition")


def extremal_solve(H: KPartiteHypergraph, template: ExtremalTemplate, alpha: float = 0.0, config: SolverConfig | None = None) -> Matching:
    """Perfect matching of ``H`` close to a UUW/UWW template.

    With every vertex alpha-good the one-W greedy plus exchange routine runs
    on all of ``H``. Otherwise bad vertices are covered first, the W/U
    balance is restored with two-W or zero-W edges, and the routine finishes
    on what is left.

    Raises:
        ExtremalFailure: naming the violated precondition or the stuck stage.
    """
    _check_regime(H, template)
    n = template.n
    trace: list[tuple[str, str]] = []
    report = classify_good_vertices(H, template, alpha)
    bad = report.bad_vertices()
    pool = _Pool(template, [list(range(n))] * 3)
    es = H.edge_set
    head: list[tuple[int, ...]] = []
    if bad:
        trace.append(("bad-cover", f"{len(bad)} bad vertices"))
        bad_set = set(bad)
        order = sorted(bad, key=lambda v: (-int(report.counts[v.class_index][v.local_index]), v))
        for v in order:
            if v.local_index not in pool.free(v.class_index):
                continue
            best = None
            for e in H.edges_containing(v):
                e = tuple(int(x) for x in e)
                if any(x not in pool.free(c) for c, x in enumerate(e)):
                    continue
                key = (
                    _w_count(template, e) != 1,
                    sum(VertexRef(c, x) in bad_set for c, x in enumerate(e)) == 1,
                    e,
                )
                if best is None or key < best[0]:
                    best = (key, e)
            if best is None:
                raise ExtremalFailure(f"bad vertex {tuple(v)} has no available edge", "bad-cover", trace)
            pool.take(best[1])
            head.append(best[1])
        trace.append(("rebalance", f"W total {pool.w_total()} vs class size {pool.size()}"))
        while pool.w_total() != pool.size():
            want = 2 if pool.w_total() > pool.size() else 0
            pick = None
            for e in itertools.product(*(pool.free(c) for c in range(3))):
                if e in es and _w_count(template, e) == want:
                    pick = e
                    break
            if pick is None:
                raise ExtremalFailure(f"no edge with {want} W vertices to rebalance", "rebalance", trace)
            pool.take(pick)
            head.append(pick)
    tail = _good_routine(H, pool, trace)
    M = Matching(head + tail, 3)
    if not M.is_perfect_for(H):
        raise ExtremalFailure("result is not a perfect matching", "verify", trace)
    return M


def _trusted_perfect(H: KPartiteHypergraph, M: Matching | None) -> bool:
    return M is not None and M.is_valid_for(H) and M.is_perfect_for(H)


def _lift(M: Matching, maps: Sequence[Sequence[int]]) -> Matching:
    return Matching([tuple(maps[c][x] for c, x in enumerate(e)) for e in M], len(maps))


def _heuristic(H: KPartiteHypergraph, config: SolverConfig, trace: list) -> Matching:
    n, k = H.n, H.k
    family = None
    try:
        family = sample_absorbing_family(
            H, AbsorptionConfig(gamma=config.gamma, seed=config.seed, retry_limit=config.absorption_retries)
        )
        trace.append(("absorb", f"family of {len(family.members)} members, coverage {family.coverage_g}"))
    except (AbsorptionFailure, ValueError) as exc:
        trace.append(("absorb", f"no family: {exc}"))
    reserved = family.vertices if family else frozenset()
    keep = [[i for i in range(n) if VertexRef(c, i) not in reserved] for c in range(k)]
    rest, maps = H.induced(keep)
    M = greedy_matching(rest, config.seed)
    M = augment_to_fixpoint(rest, M, config.augment_depth)
    M = _lift(M, maps)
    trace.append(("augment", f"matching {len(M)} on {len(keep[0])} free vertices per class"))
    if family is None:
        return M
    W = [VertexRef(c, i) for c in range(k) for i in keep[c] if not M.covers((c, i))]
    if not W:
        return Matching(list(M) + list(family.base_matching), k)
    try:
        absorbed = absorb(H, family, W)
        trace.append(("absorb", f"absorbed {len(W) // k} leftover sets"))
        return Matching(list(M) + list(absorbed), k)
    except AbsorptionFailure as exc:
        trace.append(("absorb", f"stuck: {exc}"))
    full = Matching(list(M) + list(family.base_matching), k)
    return augment_to_fixpoint(H, full, config.augment_depth)


def _exact(H: KPartiteHypergraph, nodes: int, trace: list) -> SolveOutcome | None:
    res = has_perfect_matching(H, SearchBudget(node_limit=nodes))
    trace.append(("exact", f"{res.status.value} after {res.nodes} nodes"))
    if res.status is PMStatus.YES:
        return SolveOutcome(SolveStatus.PERFECT, res.matching, trace, {"witness": "exact search"})
    if res.status is PMStatus.NO:
        mm = max_matching_exact(H, SearchBudget(node_limit=nodes))
        cert = {"proof": res.reason, "nodes": res.nodes, "max_matching_optimal": mm.optimal}
        return SolveOutcome(SolveStatus.NO_PERFECT, mm.matching, trace, cert)
    return None


def _extremal_route(H: KPartiteHypergraph, config: SolverConfig, trace: list, force: bool) -> Matching | None:
    try:
        rep, perms = best_hprime_template(H)
    except ValueError as exc:
        trace.append(("extremal", str(exc)))
        return None
    trace.append(("extremal", f"closest profile {rep.template.profile}, epsilon {rep.epsilon:.4f}"))
    if rep.epsilon > config.epsilon and not force:
        return None
    G = H.relabeled(perms)
    try:
        M = extremal_solve(G, rep.template, config.alpha, config)
    except ExtremalFailure as exc:
        trace.append(("extremal", f"failed: {exc}"))
        return None
    inverse = [[0] * len(p) for p in perms]
    for c, p in enumerate(perms):
        for old, new in enumerate(p):
            inverse[c][new] = old
    return _lift(M, inverse)


def solve_perfect_matching(H: KPartiteHypergraph, config: SolverConfig | None = None) -> SolveOutcome:
    """Find a perfect matching or prove there is none, within budgets."""
    config = config or SolverConfig()
    trace: list[tuple[str, str]] = []
    if not H.has_equal_classes:
        return SolveOutcome(SolveStatus.NO_PERFECT, None, [("check", "unequal class sizes")], {"proof": "unequal class sizes"})
    n = H.n
    if n == 0:
        return SolveOutcome(SolveStatus.PERFECT, Matching((), H.k), [("check", "empty")], {})
    mode = config.mode
    best = Matching((), H.k)

    def done(M: Matching | None, phase: str) -> SolveOutcome | None:
        nonlocal best
        if M is not None and M.is_valid_for(H) and len(M) > len(best):
            best = M
        if _trusted_perfect(H, M):
            trace.append(("verify", f"perfect matching from {phase} verified"))
            return SolveOutcome(SolveStatus.PERFECT, M, trace, {"witness": phase})
        return None

    if mode is SolverMode.EXACT_ONLY or (mode is SolverMode.AUTO and n <= config.exact_cutoff):
        out = _exact(H, config.exact_nodes, trace)
        if out is not None or mode is SolverMode.EXACT_ONLY:
            return out or SolveOutcome(SolveStatus.INCOMPLETE, best, trace, {"reason": "exact budget exhausted"})
    if H.k == 3 and mode in (SolverMode.AUTO, SolverMode.EXTREMAL_ONLY):
        out = done(_extremal_route(H, config, trace, mode is SolverMode.EXTREMAL_ONLY), "extremal")
        if out or mode is SolverMode.EXTREMAL_ONLY:
            return out or SolveOutcome(SolveStatus.INCOMPLETE, best, trace, {"reason": "extremal routine failed"})
    if mode in (SolverMode.AUTO, SolverMode.HEURISTIC_ONLY):
        out = done(_heuristic(H, config, trace), "absorption+augment")
        if out:
            return out
    if mode is SolverMode.AUTO and n > config.exact_cutoff:
        out = _exact(H, config.fallback_nodes, trace)
        if out is not None:
            return out
    return SolveOutcome(SolveStatus.INCOMPLETE, best, trace, {"reason": "all phases stuck", "best_size": len(best)})

"""Exact and heuristic matching search plus structural checks.

The exact search is a branch-and-bound over Python-int bitsets of edge
indices. Each node branches on the free vertex of smallest residual degree
(ties by class, then index) and prunes with two upper bounds on the
matching size still reachable: the per-class count of usable vertices, and
a greedy vertex cover that stops early (adding one) once the edges it has
not yet hit pairwise intersect.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._validation import as_legal_set, check_profile, check_vertex
from .hypergraph import KPartiteHypergraph, Matching, VertexRef, build_hypergraph, min_l_degree

__all__ = [
    "SearchMode",
    "SearchBudget",
    "BudgetExhausted",
    "ExactResult",
    "PMStatus",
    "PerfectMatchingResult",
    "CoverWitness",
    "ThresholdCensus",
    "max_matching_exact",
    "has_perfect_matching",
    "greedy_matching",
    "augment_local",
    "augment_to_fixpoint",
    "is_intersecting_family",
    "balanced_cover_check",
    "brute_force_threshold",
    "threshold_census",
    "check_degree_bound_after_removal",
    "enumerate_matchings",
]


class SearchMode(enum.Enum):
    EXACT = "exact"
    BEST_EFFORT = "best_effort"


@dataclass(frozen=True)
class SearchBudget:
    """Limits for exhaustive search.

    ``BEST_EFFORT`` caps the node count at ``best_effort_nodes``; the result
    is flagged optimal only when it meets a bound.
    """

    node_limit: int = 10_000_000
    time_limit: float | None = None
    mode: SearchMode = SearchMode.EXACT
    best_effort_nodes: int = 20_000

    def __post_init__(self):
        if self.node_limit <= 0:
            raise ValueError("node_limit must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.best_effort_nodes <= 0:
            raise ValueError("best_effort_nodes must be positive")

    @property
    def effective_nodes(self) -> int:
        if self.mode is SearchMode.BEST_EFFORT:
            return min(self.node_limit, self.best_effort_nodes)
        return self.node_limit


class BudgetExhausted(RuntimeError):
    """A search hit its node or time limit before reaching a verdict."""

    def __init__(self, message: str, nodes: int = 0):
        super().__init__(message)
        self.nodes = nodes


class ExactResult(NamedTuple):
    matching: Matching
    optimal: bool
    nodes: int
    upper_bound: int


class PMStatus(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class PerfectMatchingResult:
    status: PMStatus
    matching: Matching | None = None
    nodes: int = 0
    reason: str = ""

    def __bool__(self) -> bool:
        return self.status is PMStatus.YES


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Stop(Exception):
    pass


class _PackingSearch:
    def __init__(self, H: KPartiteHypergraph, budget: SearchBudget, *, perfect: bool, target: int | None):
        self.H = H
        self.inc = H.incidence_masks
        self.evs = H.edge_global_ids
        self.nv = H.num_vertices
        self.cls = [c for c, n in enumerate(H.class_sizes) for _ in range(n)]
        self.k = H.k
        self.perfect = perfect
        self.target = target
        # edges meeting edge j, including j itself
        self.nbr = [0] * H.num_edges
        for j, e in enumerate(self.evs):
            for u in e:
                self.nbr[j] |= self.inc[u]
        self.node_limit = budget.effective_nodes
        self.deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit
        self.nodes = 0
        self.best: list[int] = []
        self.chosen: list[int] = []
        self.root_ub = 0

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise _Stop
        if self.deadline is not None and not self.nodes & 1023 and time.monotonic() > self.deadline:
            raise _Stop

    def _residuals(self, A: int, free: int) -> list[tuple[int, int]]:
        out = []
        inc = self.inc
        for v in _bits(free):
            out.append(((A & inc[v]).bit_count(), v))
        return out

    def _class_bound(self, res) -> int:
        counts = [0] * self.k
        for d, v in res:
            if d:
                counts[self.cls[v]] += 1
        return min(counts)

    def _intersecting(self, A: int) -> bool:
        nbr = self.nbr
        for j in _bits(A):
            if A & ~nbr[j]:
                return False
        return True

    def _cover_bound(self, A: int, res, stop_at: int) -> int:
        inc = self.inc
        live = [v for d, v in res if d]
        cover = 0
        while A:
            if cover >= stop_at:
                return cover
            if self._intersecting(A):
                return cover + 1
            best_v, best_d = -1, 0
            for v in live:
                d = (A & inc[v]).bit_count()
                if d > best_d:
                    best_v, best_d = v, d
            A &= ~inc[best_v]
            cover += 1
        return cover

    def _needed(self, size: int) -> int:
        # additional edges required for the current node to be worth exploring
        if self.target is not None:
            return self.target - size
        return len(self.best) - size + 1

    def upper_bound(self, A: int, free: int, size: int) -> int:
        res = self._residuals(A, free)
        ub = self._class_bound(res)
        if ub >= self._needed(size):
            ub = min(ub, self._cover_bound(A, res, ub))
        return ub

    def run(self) -> bool:
        """Search; return True when the result is proven (optimal or target settled)."""
        H = self.H
        A = (1 << H.num_edges) - 1
        free = (1 << self.nv) - 1
        self.root_ub = self.upper_bound(A, free, 0)
        if self.target is not None and self.root_ub < self.target:
            return True
        try:
            self._dfs(A, free)
        except _Stop:
            return self._settled()
        return True

    def _settled(self) -> bool:
        if self.target is not None:
            return len(self.best) >= self.target
        return len(self.best) >= self.root_ub

    def _record(self):
        if len(self.chosen) > len(self.best):
            self.best = list(self.chosen)
            if self._settled():
                raise _Stop

    def _dfs(self, A: int, free: int):
        self._tick()
        size = len(self.chosen)
        self._record()
        if not A:
            return
        inc = self.inc
        res = self._residuals(A, free)
        if self.perfect and any(d == 0 for d, _ in res):
            return
        need = self._needed(size)
        ub = self._class_bound(res)
        if ub < need:
            return
        ub = min(ub, self._cover_bound(A, res, need))
        if ub < need:
            return
        # branch on the scarcest free vertex that can still be matched
        d0, v = min((d, v) for d, v in res if d)
        deg = {u: d for d, u in res}
        evs = self.evs
        cand = []
        for j in _bits(A & inc[v]):
            score = sum(deg.get(u, 0) for u in evs[j] if u != v)
            cand.append((score, j))
        cand.sort()
        for _, j in cand:
            e = evs[j]
            block = 0
            vm = 0
            for u in e:
                block |= inc[u]
                vm |= 1 << u
            self.chosen.append(j)
            self._dfs(A & ~block, free & ~vm)
            self.chosen.pop()
        if not self.perfect:
            self._dfs(A & ~inc[v], free & ~(1 << v))

    def matching(self) -> Matching:
        return Matching([self.H.edge_list[j] for j in self.best], self.H.k)


def max_matching_exact(H: KPartiteHypergraph, budget: SearchBudget | None = None) -> ExactResult:
    """Maximum matching by branch-and-bound.

    When the budget runs out the largest matching found so far is returned
    with ``optimal=False``. The search is deterministic for a given ``H``.
    """
    budget = budget or SearchBudget()
    s = _PackingSearch(H, budget, perfect=False, target=None)
    proven = s.run()
    return ExactResult(s.matching(), proven, s.nodes, s.root_ub)


def has_perfect_matching(H: KPartiteHypergraph, budget: SearchBudget | None = None) -> PerfectMatchingResult:
    """Decide whether ``H`` has a perfect matching.

    ``YES`` carries a witness, ``NO`` is returned only after an exhausted
    search (or for unequal class sizes), ``UNKNOWN`` when the budget ran out.
    """
    budget = budget or SearchBudget()
    if not H.has_equal_classes:
        return PerfectMatchingResult(PMStatus.NO, None, 0, "unequal class sizes")
    n = H.n
    if n == 0:
        return PerfectMatchingResult(PMStatus.YES, Matching((), H.k), 0)
    if any(int(d.min()) == 0 for d in H.vertex_degrees):
        return PerfectMatchingResult(PMStatus.NO, None, 0, "isolated vertex")
    s = _PackingSearch(H, budget, perfect=True, target=n)
    proven = s.run()
    if s.root_ub < n:
        return PerfectMatchingResult(PMStatus.NO, None, 0, f"root upper bound {s.root_ub} < {n}")
    if len(s.best) >= n:
        M = s.matching()
        assert M.is_perfect_for(H)
        return PerfectMatchingResult(PMStatus.YES, M, s.nodes)
    if proven:
        return PerfectMatchingResult(PMStatus.NO, None, s.nodes, "search exhausted")
    return PerfectMatchingResult(PMStatus.UNKNOWN, None, s.nodes, "budget exhausted")


def greedy_matching(H: KPartiteHypergraph, rng_seed: int | None = 0) -> Matching:
    """Maximal matching from a seeded random edge order."""
    rng = np.random.default_rng(rng_seed)
    used: list[set[int]] = [set() for _ in range(H.k)]
    chosen = []
    edges = H.edge_list
    for j in rng.permutation(len(edges)):
        e = edges[j]
        if any(x in used[c] for c, x in enumerate(e)):
            continue
        for c, x in enumerate(e):
            used[c].add(x)
        chosen.append(e)
    return Matching(chosen, H.k)


def _check_matching_in(H: KPartiteHypergraph, M: Matching) -> None:
    if M.k != H.k:
        raise ValueError("matching arity differs from hypergraph uniformity")
    for e in M:
        if not H.has_edge(e):
            raise ValueError(f"matching edge {e} is not an edge of H")
        for c, x in enumerate(e):
            if x >= H.class_sizes[c]:
                raise ValueError(f"matching edge {e} out of range")


class _Augmenter:
    """Exchange moves: release r matching edges, insert r+1 edges.

    Every inserted edge meets the released vertex set (a fully uncovered
    edge is found separately), so an inserted edge is a *stub* inside the
    released vertices completed by uncovered vertices. Stub completions are
    cached per stub for the lifetime of one call.
    """

    step_cap = 20_000

    def __init__(self, H: KPartiteHypergraph, M: Matching):
        self.H = H
        self.M = M
        self.k = H.k
        self.medges = list(M.edges)
        free = []
        for c, n in enumerate(H.class_sizes):
            mask = np.ones(n, dtype=bool)
            mask[list(M.covered[c])] = False
            free.append(mask)
        self.free = free
        E = H.edges
        if len(E):
            self.free_rows = np.stack([free[c][E[:, c]] for c in range(self.k)], axis=1)
        else:
            self.free_rows = np.zeros((0, self.k), dtype=bool)
        self._options: dict[tuple[VertexRef, ...], list[tuple[VertexRef, ...]]] = {}

    def free_edge(self):
        hit = np.flatnonzero(self.free_rows.all(axis=1))
        return self.H.edge_list[int(hit[0])] if hit.size else None

    def options(self, stub: tuple[VertexRef, ...]) -> list[tuple[VertexRef, ...]]:
        got = self._options.get(stub)
        if got is not None:
            return got
        E = self.H.edges
        mask = np.ones(len(E), dtype=bool)
        stub_classes = {c for c, _ in stub}
        for c, i in stub:
            mask &= E[:, c] == i
        for c in range(self.k):
            if c not in stub_classes:
                mask &= self.free_rows[:, c]
        rest = [c for c in range(self.k) if c not in stub_classes]
        got = [tuple(VertexRef(c, int(row[c])) for c in rest) for row in E[mask]]
        self._options[stub] = got
        return got

    def try_release(self, combo: Sequence[int]) -> list[tuple[int, ...]] | None:
        r = len(combo)
        sub = [(VertexRef(c, e[c]), j) for j in combo for c, e in [(c, self.medges[j]) for c in range(self.k)]]
        owner = {v: j for v, j in sub}
        verts = [v for v, _ in sub]
        stubs = []
        for size in range(1, self.k + 1):
            for P in itertools.combinations(verts, size):
                if len({c for c, _ in P}) != size:
                    continue
                P = tuple(sorted(P))
                if self.options(P):
                    stubs.append(P)
        if len(stubs) < r + 1:
            return None
        stubs.sort(key=lambda P: (len(self.options(P)), P))
        chosen: list[tuple[VertexRef, ...]] = []

        def pick(start: int, used: set) -> list | None:
            if len(chosen) == r + 1:
                touched = {owner[v] for P in chosen for v in P}
                if len(touched) != r:
                    return None
                return self._complete(chosen)
            for t in range(start, len(stubs)):
                P = stubs[t]
                if used.intersection(P):
                    continue
                chosen.append(P)
                got = pick(t + 1, used | set(P))
                chosen.pop()
                if got is not None:
                    return got
            return None

        return pick(0, set())

    def _complete(self, stubs: list[tuple[VertexRef, ...]]) -> list[tuple[int, ...]] | None:
        order = sorted(stubs, key=lambda P: len(self.options(P)))
        steps = [0]
        picks: list[tuple[VertexRef, ...]] = []

        def go(t: int, used: set) -> bool:
            if t == len(order):
                return True
            for opt in self.options(order[t]):
                steps[0] += 1
                if steps[0] > self.step_cap:
                    return False
                if used.intersection(opt):
                    continue
                picks.append(opt)
                if go(t + 1, used | set(opt)):
                    return True
                picks.pop()
            return False

        if not go(0, set()):
            return None
        out = []
        for P, opt in zip(order, picks):
            e = [0] * self.k
            for c, i in P + opt:
                e[c] = i
            out.append(tuple(e))
        return out


def augment_local(H: KPartiteHypergraph, M: Matching, depth: int = 2) -> Matching | None:
    """One exchange move enlarging ``M``, or ``None`` if none exists up to ``depth``.

    Tries releasing r = 0, 1, ..., depth matching edges and inserting r+1
    disjoint edges that live on the released vertices plus uncovered ones.

    Raises:
        ValueError: if ``M`` is not a matching of ``H`` or depth is not 1..3.
    """
    if depth not in (1, 2, 3):
        raise ValueError("depth must be 1, 2 or 3")
    _check_matching_in(H, M)
    aug = _Augmenter(H, M)
    e = aug.free_edge()
    if e is not None:
        return M.replace(add=[e])
    for r in range(1, depth + 1):
        for combo in itertools.combinations(range(len(M)), r):
            new = aug.try_release(combo)
            if new is not None:
                return M.replace(remove=[aug.medges[j] for j in combo], add=new)
    return None


def augment_to_fixpoint(H: KPartiteHypergraph, M: Matching, depth: int = 2, max_rounds: int | None = None) -> Matching:
    rounds = 0
    while max_rounds is None or rounds < max_rounds:
        better = augment_local(H, M, depth)
        if better is None:
            break
        M = better
        rounds += 1
    return M


def is_intersecting_family(H: KPartiteHypergraph) -> bool:
    """True iff every two edges share a vertex."""
    m = H.num_edges
    if m <= 1:
        return True
    full = (1 << m) - 1
    inc = H.incidence_masks
    for e in H.edge_global_ids:
        block = 0
        for u in e:
            block |= inc[u]
        if block != full:
            return False
    return True


@dataclass(frozen=True)
class CoverWitness:
    """Vertex set ``W`` with ``|W ∩ V_i| = profile[i]`` meeting every edge."""

    W: frozenset[VertexRef]
    profile: tuple[int, ...]

    def verify(self, H: KPartiteHypergraph) -> bool:
        counts = [0] * H.k
        for c, _ in self.W:
            counts[c] += 1
        if tuple(counts) != tuple(self.profile):
            return False
        cols = [set(i for c2, i in self.W if c2 == c) for c in range(H.k)]
        return all(any(e[c] in cols[c] for c in range(H.k)) for e in H.edge_list)


def balanced_cover_check(H: KPartiteHypergraph, profile: Sequence[int], node_limit: int = 1_000_000) -> CoverWitness | None:
    """Find ``W`` with the given per-class counts hitting every edge.

    Returns ``None`` when no such set exists (proven by exhaustive search).

    Raises:
        BudgetExhausted: if ``node_limit`` nodes were explored without a verdict.
    """
    profile = check_profile(profile, H.class_sizes)
    inc = H.incidence_masks
    evs = H.edge_global_ids
    cls = [c for c, n in enumerate(H.class_sizes) for _ in range(n)]
    nodes = [0]
    seen: set[int] = set()

    def disjoint_lower_bound(A: int, cap: int) -> int:
        count = 0
        while A and count <= cap:
            j = (A & -A).bit_length() - 1
            for u in evs[j]:
                A &= ~inc[u]
            count += 1
        return count

    def go(A: int, chosen: int, budget: list[int]) -> int | None:
        nodes[0] += 1
        if nodes[0] > node_limit:
            raise BudgetExhausted(f"cover search exceeded {node_limit} nodes", nodes[0])
        if not A:
            return chosen
        if chosen in seen:
            return None
        seen.add(chosen)
        left = sum(budget)
        if disjoint_lower_bound(A, left) > left:
            return None
        j = (A & -A).bit_length() - 1
        opts = [u for u in evs[j] if budget[cls[u]] > 0]
        opts.sort(key=lambda u: (-(A & inc[u]).bit_count(), u))
        for u in opts:
            budget[cls[u]] -= 1
            got = go(A & ~inc[u], chosen | (1 << u), budget)
            budget[cls[u]] += 1
            if got is not None:
                return got
        return None

    A = (1 << H.num_edges) - 1
    found = go(A, 0, list(profile))
    if found is None:
        return None
    W = {H.vertex_of(g) for g in _bits(found)}
    counts = [0] * H.k
    for c, _ in W:
        counts[c] += 1
    for c in range(H.k):
        i = 0
        while counts[c] < profile[c]:
            if VertexRef(c, i) not in W:
                W.add(VertexRef(c, i))
                counts[c] += 1
            i += 1
    return CoverWitness(frozenset(W), profile)


@dataclass
class ThresholdCensus:
    """Exhaustive sweep over all k-partite k-graphs with n vertices per class.

    ``value`` is the least t such that every hypergraph with minimum vertex
    degree >= t has a perfect matching.
    """

    k: int
    n: int
    value: int
    graphs_examined: int
    counts: dict[tuple[int, bool], int] = field(default_factory=dict)
    extremal: list[KPartiteHypergraph] = field(default_factory=list)
    no_pm_by_degree: dict[int, list[KPartiteHypergraph]] = field(default_factory=dict)


_BRUTE_FORCE_MAX_TRIPLES = 16


def _transversals(k: int, n: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(n), repeat=k))


def _symmetry_maps(k: int, n: int, triples: list[tuple[int, ...]]) -> list[list[int]]:
    pos = {t: j for j, t in enumerate(triples)}
    maps = []
    for cperm in itertools.permutations(range(k)):
        for relabels in itertools.product(itertools.permutations(range(n)), repeat=k):
            img = []
            for t in triples:
                moved = [0] * k
                for c in range(k):
                    moved[cperm[c]] = relabels[c][t[c]]
                img.append(pos[tuple(moved)])
            maps.append(img)
    return maps


def _apply(mask: int, img: list[int]) -> int:
    out = 0
    for j in _bits(mask):
        out |= 1 << img[j]
    return out


def threshold_census(k: int, n: int, *, use_symmetry: bool = True) -> ThresholdCensus:
    """Enumerate every hypergraph on k classes of size n (tiny cases only).

    With ``use_symmetry`` only one representative per orbit under class
    permutations and within-class relabelings is evaluated; the verdicts are
    invariant under these maps, so the census value is unchanged.
    """
    triples = n ** k
    if triples > _BRUTE_FORCE_MAX_TRIPLES or k < 2 or n < 1:
        raise ValueError(
            f"brute force over k={k}, n={n} needs 2^{triples} hypergraphs; "
            f"only up to 2^{_BRUTE_FORCE_MAX_TRIPLES} is supported"
        )
    tr = _transversals(k, n)
    sizes = [n] * k
    reps: dict[int, int]
    if use_symmetry:
        maps = _symmetry_maps(k, n, tr)
        reps = {}
        for mask in range(1 << triples):
            canon = min(_apply(mask, img) for img in maps)
            reps[canon] = reps.get(canon, 0) + 1
    else:
        reps = {mask: 1 for mask in range(1 << triples)}
    counts: dict[tuple[int, bool], int] = {}
    no_pm: dict[int, list[KPartiteHypergraph]] = {}
    worst = -1
    for mask, mult in reps.items():
        H = build_hypergraph(k, sizes, [tr[j] for j in _bits(mask)])
        d1 = min_l_degree(H, 1)
        pm = has_perfect_matching(H).status is PMStatus.YES
        counts[(d1, pm)] = counts.get((d1, pm), 0) + mult
        if not pm:
            no_pm.setdefault(d1, []).append(H)
            worst = max(worst, d1)
    return ThresholdCensus(
        k, n, worst + 1, 1 << triples, counts, no_pm.get(worst, []), no_pm,
    )


def brute_force_threshold(k: int, n: int, *, use_symmetry: bool = True) -> int:
    """Exact minimum-degree threshold for perfect matchings on tiny classes."""
    return threshold_census(k, n, use_symmetry=use_symmetry).value


def check_degree_bound_after_removal(H: KPartiteHypergraph, v_or_T, m: int, budget: SearchBudget | None = None) -> bool:
    """Check the degree bound for a vertex (or legal k-set) whose removal keeps a large matching.

    For a vertex ``v``: if the largest matching of ``H`` has size ``m`` and
    ``H - v`` still has a matching of size ``m``, then
    ``deg(v) <= n^(k-1) - (n-m)^(k-1)``. For a legal k-set ``T``: if
    ``H - T`` has a matching of size ``m-k+1``, some ``v`` in ``T`` satisfies
    ``deg(v) <= n^(k-1) - (n-m)^(k-1) <= k*m*n^(k-2)``. Returns True when the
    hypotheses fail (vacuous) or the inequality holds.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    n = H.n
    k = H.k
    budget = budget or SearchBudget()
    nu = max_matching_exact(H, budget)
    if not nu.optimal:
        raise BudgetExhausted("could not certify the matching number of H", nu.nodes)
    if len(nu.matching) != m:
        return True
    bound = n ** (k - 1) - (n - m) ** (k - 1)
    try:
        T = [check_vertex(H, v_or_T)]
        need = m
    except ValueError:
        T = list(as_legal_set(H, v_or_T))
        if len(T) != k:
            raise ValueError("expected a vertex or a legal k-set") from None
        need = m - k + 1
    keep = [[i for i in range(H.class_sizes[c]) if VertexRef(c, i) not in T] for c in range(k)]
    rest, _ = H.induced(keep)
    if need > 0:
        got = max_matching_exact(rest, budget)
        if len(got.matching) < need:
            if not got.optimal:
                raise BudgetExhausted("could not settle the matching in H minus T", got.nodes)
            return True
    degs = [H.vertex_degree(v) for v in T]
    if len(T) == 1:
        return degs[0] <= bound
    return min(degs) <= bound and bound <= k * m * n ** (k - 2)


def enumerate_matchings(H: KPartiteHypergraph, size: int, limit: int | None = None) -> Iterator[Matching]:
    """Yield distinct matchings with exactly ``size`` edges (up to ``limit``)."""
    inc = H.incidence_masks
    evs = H.edge_global_ids
    edges = H.edge_list
    produced = [0]
    chosen: list[int] = []

    def go(A: int):
        if len(chosen) == size:
            produced[0] += 1
            yield Matching([edges[j] for j in chosen], H.k)
            return
        if (A.bit_count() < size - len(chosen)):
            return
        for j in _bits(A):
            block = 0
            for u in evs[j]:
                block |= inc[u]
            chosen.append(j)
            # only later edges, so each matching is produced once
            yield from go(A & ~block & ~((1 << (j + 1)) - 1))
            chosen.pop()
            if limit is not None and produced[0] >= limit:
                return

    for M in go((1 << H.num_edges) - 1):
        yield M
        if limit is not None and produced[0] >= limit:
            return

"""Structure around a matching: edge-pair types, matching graphs, peeling,
closeness to an extremal template and good/bad vertex classification.

Notation for a pair of matching edges ``e1 = (v11, v21, v31)`` and
``e2 = (v12, v22, v32)`` against uncovered ``S = (x1, x2, x3)``: the count
``a_i`` is the number of pairs, one vertex from each edge and none from class
``i``, that form an edge with ``x_i``. The six candidate pairs form the cycle
v11-v22-v31-v12-v21-v32-v11.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import networkx as nx
import numpy as np

from ._validation import check_same_shape, check_vertex
from .constructions import ExtremalTemplate, TemplateRule
from .hypergraph import KPartiteHypergraph, Matching, VertexRef

__all__ = [
    "EdgeType",
    "Orientation",
    "MatchingGraph",
    "ClosenessReport",
    "GoodnessReport",
    "edge_pair_type",
    "pair_orientation",
    "matching_graph",
    "i_connections",
    "peel_subgraph",
    "closeness",
    "classify_good_vertices",
    "align_to_template",
    "best_hprime_template",
]


class EdgeType(NamedTuple):
    a1: int
    a2: int
    a3: int

    @property
    def total(self) -> int:
        return self.a1 + self.a2 + self.a3


class Orientation(enum.Enum):
    """How a type (1,2,1) pair sits on the six-cycle.

    ``FORWARD``: the class-1 and class-3 pairs are v22v31 and v11v22, giving
    the path v12-v31-v22-v11-v32. ``REVERSE``: v21v32 and v12v21, the same
    shape with the edges swapped. ``HAS_3_MATCHING``: the pairs extend to
    three disjoint edges.
    """

    FORWARD = "forward"
    REVERSE = "reverse"
    HAS_3_MATCHING = "has_3_matching"
    NOT_121 = "not_121"


def _transversal(H: KPartiteHypergraph, S) -> tuple[int, ...]:
    S = list(S)
    if len(S) != H.k:
        raise ValueError(f"S must have one vertex per class ({H.k}), got {len(S)}")
    out = []
    for c, x in enumerate(S):
        if isinstance(x, tuple):
            v = check_vertex(H, x)
            if v.class_index != c:
                raise ValueError(f"S[{c}] = {x} is not in class {c}")
            out.append(v.local_index)
        else:
            out.append(check_vertex(H, (c, x)).local_index)
    return tuple(out)


def _cycle_pairs(S: Sequence[int], e1: Sequence[int], e2: Sequence[int]) -> list[list[tuple[int, int, int]]]:
    """Candidate edges per center class: for class i, the two triples x_i + cross pair."""
    out = []
    for i in range(3):
        j, l = (c for c in range(3) if c != i)
        cands = []
        for a, b in ((e1, e2), (e2, e1)):
            t = [0, 0, 0]
            t[i], t[j], t[l] = S[i], a[j], b[l]
            cands.append(tuple(t))
        out.append(cands)
    return out


def _check_pair(H: KPartiteHypergraph, S, e1, e2) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    if H.k != 3:
        raise ValueError("edge types are defined for k=3")
    S = _transversal(H, S)
    e1, e2 = tuple(int(x) for x in e1), tuple(int(x) for x in e2)
    if any(a == b for a, b in zip(e1, e2)):
        raise ValueError(f"edges {e1} and {e2} overlap")
    if any(s in (a, b) for s, a, b in zip(S, e1, e2)):
        raise ValueError("S meets the pair of edges")
    return S, e1, e2


def edge_pair_type(H: KPartiteHypergraph, S, e1: Sequence[int], e2: Sequence[int]) -> EdgeType:
    S, e1, e2 = _check_pair(H, S, e1, e2)
    es = H.edge_set
    counts = [sum(t in es for t in cands) for cands in _cycle_pairs(S, e1, e2)]
    return EdgeType(*counts)


def pair_orientation(H: KPartiteHypergraph, S, e1: Sequence[int], e2: Sequence[int]) -> Orientation:
    S, e1, e2 = _check_pair(H, S, e1, e2)
    es = H.edge_set
    present = [[t in es for t in cands] for cands in _cycle_pairs(S, e1, e2)]
    if [sum(p) for p in present] != [1, 2, 1]:
        return Orientation.NOT_121
    # index 0 of each list uses e1 in the lower of the two other classes
    # class-1 center: (x1, v21, v32) vs (x1, v22, v31); class-3: (v11, v22, x3) vs (v12, v21, x3)
    x1_forward = present[0][1]
    x3_forward = present[2][0]
    if x1_forward and x3_forward:
        return Orientation.FORWARD
    if not x1_forward and not x3_forward:
        return Orientation.REVERSE
    return Orientation.HAS_3_MATCHING


@dataclass
class MatchingGraph:
    """Pair types of a matching against a transversal ``S``.

    ``histogram`` always holds the type counts; ``pairs`` maps each edge pair
    to its type only when built with ``store_pairs=True``.
    """

    matching: Matching
    S: tuple[int, ...]
    histogram: Counter = field(default_factory=Counter)
    pairs: dict[tuple[tuple[int, ...], tuple[int, ...]], EdgeType] | None = None

    def count(self, a1: int | None = None, a2: int | None = None, a3: int | None = None) -> int:
        """Number of pairs of the given type; ``None`` is a wildcard."""
        want = (a1, a2, a3)
        return sum(
            c for t, c in self.histogram.items()
            if all(w is None or w == x for w, x in zip(want, t))
        )

    @property
    def num_pairs(self) -> int:
        return sum(self.histogram.values())

    def max_total(self) -> int:
        return max((t.total for t in self.histogram), default=0)


def matching_graph(H: KPartiteHypergraph, M: Matching, S, *, store_pairs: bool = False) -> MatchingGraph:
    if H.k != 3:
        raise ValueError("matching graphs are defined for k=3")
    S = _transversal(H, S)
    for c, x in enumerate(S):
        if x in M.covered[c]:
            raise ValueError(f"S vertex ({c}, {x}) is covered by M")
    es = H.edge_set
    hist: Counter = Counter()
    pairs = {} if store_pairs else None
    for e1, e2 in itertools.combinations(M.edges, 2):
        t = EdgeType(*(sum(t in es for t in cands) for cands in _cycle_pairs(S, e1, e2)))
        hist[t] += 1
        if pairs is not None:
            pairs[(e1, e2)] = t
    return MatchingGraph(M, S, hist, pairs)


def i_connections(H: KPartiteHypergraph, M: Matching, x, threshold: int | None = None) -> set[tuple[tuple[int, ...], int]]:
    """Pairs ``(e, i)`` with more than ``threshold`` edges through ``x`` and ``e[i]``
    whose remaining vertices avoid ``V(M)``. Default threshold ``(2k)^(k-2)``."""
    x = check_vertex(H, x)
    k = H.k
    if M.covers(x):
        raise ValueError(f"{x} is covered by the matching")
    if threshold is None:
        threshold = (2 * k) ** (k - 2)
    E = H.edges
    if not len(E) or not len(M):
        return set()
    rows = E[E[:, x.class_index] == x.local_index]
    covered = []
    for c in range(k):
        mask = np.zeros(H.class_sizes[c], dtype=bool)
        mask[list(M.covered[c])] = True
        covered.append(mask)
    cov = np.stack([covered[c][rows[:, c]] for c in range(k)], axis=1) if len(rows) else np.zeros((0, k), bool)
    out = set()
    for e in M:
        for i in range(k):
            if i == x.class_index:
                continue
            sel = rows[:, i] == e[i]
            others = [c for c in range(k) if c not in (i, x.class_index)]
            if others:
                sel &= ~cov[:, others].any(axis=1)
            if int(sel.sum()) > threshold:
                out.add((tuple(e), i))
    return out


def peel_subgraph(G: nx.Graph, epsilon: float) -> nx.Graph | None:
    """Repeatedly delete vertices of degree below ``epsilon * n``.

    ``n`` is the order of the input graph. Returns the surviving subgraph,
    or ``None`` when every vertex is deleted.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    n = G.number_of_nodes()
    cut = epsilon * n
    deg = dict(G.degree())
    alive = set(G.nodes)
    stack = [v for v, d in deg.items() if d < cut]
    queued = set(stack)
    while stack:
        v = stack.pop()
        alive.discard(v)
        for u in G.neighbors(v):
            if u in alive:
                deg[u] -= 1
                if deg[u] < cut and u not in queued:
                    queued.add(u)
                    stack.append(u)
    if not alive:
        return None
    return G.subgraph(alive).copy()


@dataclass(frozen=True)
class ClosenessReport:
    template: ExtremalTemplate
    missing: int
    epsilon: float

    def to_dict(self) -> dict:
        t = self.template
        return {
            "template": {"rule": t.rule.value, "n": t.n, "profile": list(t.profile)},
            "missing": self.missing,
            "epsilon": self.epsilon,
        }


def _missing_edges(H: KPartiteHypergraph, template: ExtremalTemplate) -> np.ndarray:
    check_same_shape(H, template.k, [template.n] * template.k)
    T = template.build().edges
    if not len(T):
        return T
    if not len(H.edges):
        return T
    n = template.n
    weights = n ** np.arange(template.k - 1, -1, -1, dtype=np.int64)
    present = np.isin(T @ weights, H.edges @ weights)
    return T[~present]


def closeness(H: KPartiteHypergraph, template: ExtremalTemplate) -> ClosenessReport:
    missing = len(_missing_edges(H, template))
    n = template.n
    return ClosenessReport(template, missing, missing / n ** template.k if n else 0.0)


@dataclass(frozen=True)
class GoodnessReport:
    """Per-vertex counts of template link edges absent from ``H``."""

    alpha: float
    n: int
    counts: tuple[np.ndarray, ...]

    @property
    def limit(self) -> float:
        return self.alpha * self.n ** (len(self.counts) - 1)

    def bad(self, c: int) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.counts[c] > self.limit)]

    def good(self, c: int) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.counts[c] <= self.limit)]

    def bad_vertices(self) -> list[VertexRef]:
        return [VertexRef(c, i) for c in range(len(self.counts)) for i in self.bad(c)]

    @property
    def all_good(self) -> bool:
        return not self.bad_vertices()

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "counts": [c.tolist() for c in self.counts],
            "bad": [self.bad(c) for c in range(len(self.counts))],
        }


def classify_good_vertices(H: KPartiteHypergraph, template: ExtremalTemplate, alpha: float) -> GoodnessReport:
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    miss = _missing_edges(H, template)
    n = template.n
    counts = tuple(np.bincount(miss[:, c], minlength=n).astype(np.int64) for c in range(template.k))
    return GoodnessReport(alpha, n, counts)


def align_to_template(H: KPartiteHypergraph) -> tuple[KPartiteHypergraph, list[list[int]]]:
    """Relabel each class by ascending degree so high-degree vertices come last.

    In both template rules the ``W`` vertices have the larger degrees, and
    ``W`` is the block of last indices. Returns the relabeled hypergraph and
    ``perms`` with ``perms[c][old] = new``.
    """
    perms = []
    for c, deg in enumerate(H.vertex_degrees):
        order = sorted(range(H.class_sizes[c]), key=lambda i: (int(deg[i]), i))
        perm = [0] * len(order)
        for new, old in enumerate(order):
            perm[old] = new
        perms.append(perm)
    return H.relabeled(perms), perms


def best_hprime_template(H: KPartiteHypergraph, spread: int = 2) -> tuple[ClosenessReport, list[list[int]]]:
    """Closest UUW/UWW template with profile sum ``n`` and entries near ``n/3``.

    ``H`` is first relabeled by :func:`align_to_template`; the returned report
    refers to the relabeled vertex order, and ``perms`` maps into it.
    """
    if H.k != 3:
        raise ValueError("templates with the UUW/UWW rule need k=3")
    n = H.n
    G, perms = align_to_template(H)
    lo, hi = max(0, n // 3 - spread), min(n, -(-n // 3) + spread)
    best = None
    for d1 in range(lo, hi + 1):
        for d2 in range(lo, hi + 1):
            d3 = n - d1 - d2
            if not lo <= d3 <= hi:
                continue
            rep = closeness(G, ExtremalTemplate(3, n, (d1, d2, d3), TemplateRule.UUW_UWW))
            if best is None or rep.missing < best.missing:
                best = rep
    if best is None:
        raise ValueError(f"no profile near n/3 sums to n={n}")
    return best, perms

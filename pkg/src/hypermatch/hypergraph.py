"""k-partite k-uniform hypergraphs, matchings, degrees and link graphs.

Vertices are addressed class-locally: ``VertexRef(class_index, local_index)``.
An edge is a k-tuple whose i-th entry is a local index into class i, so
every stored edge is legal by construction.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from ._validation import as_legal_set, check_vertex

__all__ = [
    "VertexRef",
    "KPartiteHypergraph",
    "Matching",
    "LinkGraph",
    "build_hypergraph",
    "degree",
    "min_l_degree",
    "link_graph",
    "link_union",
]


class VertexRef(NamedTuple):
    class_index: int
    local_index: int


class KPartiteHypergraph:
    """Immutable k-partite k-graph with class-local vertex indexing.

    Use :func:`build_hypergraph` to construct one from raw tuples; the
    constructor assumes its input is already validated and canonical.
    """

    def __init__(self, k: int, class_sizes: Sequence[int], edges: np.ndarray):
        self._k = int(k)
        self._sizes = tuple(int(n) for n in class_sizes)
        edges = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, self._k)
        edges.flags.writeable = False
        self._edges = edges

    @property
    def k(self) -> int:
        return self._k

    @property
    def class_sizes(self) -> tuple[int, ...]:
        return self._sizes

    @property
    def n(self) -> int:
        """Common class size; raises if the classes differ in size."""
        if len(set(self._sizes)) != 1:
            raise ValueError(f"classes have unequal sizes {self._sizes}")
        return self._sizes[0]

    @property
    def has_equal_classes(self) -> bool:
        return len(set(self._sizes)) == 1

    @property
    def edges(self) -> np.ndarray:
        """Read-only ``(num_edges, k)`` array, rows sorted lexicographically."""
        return self._edges

    @property
    def num_edges(self) -> int:
        return self._edges.shape[0]

    def __len__(self) -> int:
        return self.num_edges

    @property
    def num_vertices(self) -> int:
        return sum(self._sizes)

    @cached_property
    def edge_list(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in row) for row in self._edges]

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.edge_list)

    def has_edge(self, e: Iterable[int]) -> bool:
        return tuple(int(x) for x in e) in self.edge_set

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate((0,) + self._sizes[:-1]))

    def global_id(self, v) -> int:
        c, i = v
        return self.offsets[c] + i

    def vertex_of(self, g: int) -> VertexRef:
        for c in range(self._k - 1, -1, -1):
            if g >= self.offsets[c]:
                return VertexRef(c, g - self.offsets[c])
        raise ValueError(f"global id {g} out of range")

    def vertices(self) -> Iterator[VertexRef]:
        for c, n in enumerate(self._sizes):
            for i in range(n):
                yield VertexRef(c, i)

    @cached_property
    def vertex_degrees(self) -> tuple[np.ndarray, ...]:
        """Per-class arrays of vertex degrees."""
        out = []
        for c, n in enumerate(self._sizes):
            d = np.bincount(self._edges[:, c], minlength=n) if n else np.zeros(0, np.int64)
            d.flags.writeable = False
            out.append(d)
        return tuple(out)

    def vertex_degree(self, v) -> int:
        c, i = check_vertex(self, v)
        return int(self.vertex_degrees[c][i])

    @cached_property
    def incidence_masks(self) -> tuple[int, ...]:
        """Bitset of incident edge indices for every vertex, by global id."""
        m = self.num_edges
        masks = []
        for c, n in enumerate(self._sizes):
            col = self._edges[:, c]
            order = np.argsort(col, kind="stable")
            bounds = np.searchsorted(col[order], np.arange(n + 1))
            for i in range(n):
                idx = order[bounds[i]:bounds[i + 1]]
                if idx.size == 0:
                    masks.append(0)
                    continue
                bits = np.zeros(m, dtype=np.uint8)
                bits[idx] = 1
                masks.append(int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little"))
        return tuple(masks)

    @cached_property
    def edge_global_ids(self) -> tuple[tuple[int, ...], ...]:
        off = np.asarray(self.offsets, dtype=np.int64)
        return tuple(tuple(int(x) for x in row) for row in (self._edges + off))

    def edge_index(self, e: Iterable[int]) -> int:
        return self._edge_positions[tuple(int(x) for x in e)]

    @cached_property
    def _edge_positions(self) -> dict[tuple[int, ...], int]:
        return {e: j for j, e in enumerate(self.edge_list)}

    def edges_containing(self, v) -> np.ndarray:
        c, i = check_vertex(self, v)
        return self._edges[self._edges[:, c] == i]

    def with_edges(self, add: Iterable[Sequence[int]] = (), remove: Iterable[Sequence[int]] = ()) -> KPartiteHypergraph:
        """Return a new hypergraph with edges added and/or removed."""
        drop = {tuple(int(x) for x in e) for e in remove}
        keep = [e for e in self.edge_list if e not in drop]
        return build_hypergraph(self._k, self._sizes, keep + [tuple(e) for e in add])

    def induced(self, keep: Sequence[Iterable[int]]) -> tuple[KPartiteHypergraph, list[list[int]]]:
        """Sub-hypergraph induced on the given per-class local indices.

        Returns the relabeled hypergraph and, per class, the list mapping new
        local indices back to the original ones.
        """
        maps = [sorted(set(int(i) for i in ks)) for ks in keep]
        if len(maps) != self._k:
            raise ValueError("need one index collection per class")
        lookup = []
        for c, mp in enumerate(maps):
            arr = np.full(self._sizes[c], -1, dtype=np.int64)
            arr[mp] = np.arange(len(mp))
            lookup.append(arr)
        if self.num_edges:
            new = np.stack([lookup[c][self._edges[:, c]] for c in range(self._k)], axis=1)
            new = new[(new >= 0).all(axis=1)]
        else:
            new = np.zeros((0, self._k), dtype=np.int64)
        return KPartiteHypergraph(self._k, [len(mp) for mp in maps], new), maps

    def relabeled(self, perms: Sequence[Sequence[int]]) -> KPartiteHypergraph:
        """Apply per-class relabelings; ``perms[c][old] = new``."""
        if not self.num_edges:
            return self
        arr = np.stack([np.asarray(perms[c], dtype=np.int64)[self._edges[:, c]] for c in range(self._k)], axis=1)
        return KPartiteHypergraph(self._k, self._sizes, np.unique(arr, axis=0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, KPartiteHypergraph):
            return NotImplemented
        return (
            self._k == other._k
            and self._sizes == other._sizes
            and np.array_equal(self._edges, other._edges)
        )

    def __hash__(self) -> int:
        return hash((self._k, self._sizes, self._edges.tobytes()))

    def __repr__(self) -> str:
        return f"KPartiteHypergraph(k={self._k}, class_sizes={list(self._sizes)}, num_edges={self.num_edges})"


def build_hypergraph(k: int, class_sizes: Sequence[int], edges: Iterable[Sequence[int]]) -> KPartiteHypergraph:
    """Validate raw edge tuples and build a canonical hypergraph.

    Duplicate edges collapse; rows are stored in lexicographic order.

    Raises:
        ValueError: if ``k < 2``, the sizes do not match ``k``, an edge has
            the wrong arity, or an index is out of range (the offending edge
            is named in the message).
    """
    k = int(k)
    if k < 2:
        raise ValueError(f"uniformity k must be >= 2, got {k}")
    sizes = tuple(int(n) for n in class_sizes)
    if len(sizes) != k:
        raise ValueError(f"expected {k} class sizes, got {len(sizes)}")
    if any(n < 0 for n in sizes):
        raise ValueError(f"class sizes must be nonnegative: {sizes}")
    rows = []
    for e in edges:
        e = tuple(e)
        if len(e) != k:
            raise ValueError(f"edge {e} has arity {len(e)}, expected {k}")
        for c, x in enumerate(e):
            if not 0 <= int(x) < sizes[c]:
                raise ValueError(f"edge {e}: index {x} out of range for class {c} of size {sizes[c]}")
        rows.append([int(x) for x in e])
    return _from_array(k, sizes, np.asarray(rows, dtype=np.int64).reshape(-1, k))


def _from_array(k: int, sizes: Sequence[int], arr: np.ndarray) -> KPartiteHypergraph:
    """Trusted constructor used by generators: dedup + sort an index array."""
    if arr.shape[0]:
        arr = np.unique(arr, axis=0)
    return KPartiteHypergraph(k, sizes, arr)


def degree(H: KPartiteHypergraph, T: Iterable) -> int:
    """Number of (k-|T|)-sets completing the legal set ``T`` to an edge."""
    T = as_legal_set(H, T)
    if len(T) > H.k:
        raise ValueError("legal set larger than k")
    if len(T) == 1:
        return H.vertex_degree(T[0])
    mask = np.ones(H.num_edges, dtype=bool)
    for c, i in T:
        mask &= H.edges[:, c] == i
    return int(mask.sum())


def min_l_degree(H: KPartiteHypergraph, l: int, classes: Sequence[int] | None = None) -> int:
    """Minimum l-degree over all legal l-sets (exhaustive).

    ``classes`` restricts the minimum to l-sets meeting exactly the given
    classes (the per-class-set variant); by default every choice of l
    classes is considered.
    """
    k = H.k
    if not 1 <= l <= k - 1:
        raise ValueError(f"l must be in [1, {k - 1}], got {l}")
    if classes is not None:
        classes = tuple(sorted(int(c) for c in classes))
        if len(classes) != l or len(set(classes)) != l or not all(0 <= c < k for c in classes):
            raise ValueError(f"classes {classes} must be {l} distinct class indices")
        choices = [classes]
    else:
        choices = list(itertools.combinations(range(k), l))
    best = None
    for L in choices:
        sizes = [H.class_sizes[c] for c in L]
        total = int(np.prod(sizes))
        if total == 0:
            continue
        if H.num_edges == 0:
            return 0
        idx = np.zeros(H.num_edges, dtype=np.int64)
        for c, s in zip(L, sizes):
            idx = idx * s + H.edges[:, c]
        counts = np.bincount(idx, minlength=total)
        low = int(counts.min())
        best = low if best is None else min(best, low)
    if best is None:
        raise ValueError("no legal l-sets exist (some class is empty)")
    return best


@dataclass(frozen=True)
class LinkGraph:
    """Sets completing a center vertex to an edge.

    ``pairs`` holds (k-1)-tuples of :class:`VertexRef` sorted by class.
    """

    center: VertexRef
    pairs: frozenset[tuple[VertexRef, ...]]

    @property
    def num_edges(self) -> int:
        return len(self.pairs)

    def adjacency(self) -> dict[VertexRef, set[VertexRef]]:
        """Bipartite adjacency between the two other classes (k=3 only)."""
        adj: dict[VertexRef, set[VertexRef]] = {}
        for pair in self.pairs:
            if len(pair) != 2:
                raise ValueError("adjacency view is only defined for k=3")
            a, b = pair
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        return adj


def _complete(H: KPartiteHypergraph, x: VertexRef, row) -> tuple[VertexRef, ...]:
    return tuple(VertexRef(c, int(row[c])) for c in range(H.k) if c != x.class_index)


def link_graph(H: KPartiteHypergraph, x, restriction: Sequence[Iterable] | None = None) -> LinkGraph:
    """Link graph of ``x``, optionally restricted to disjoint vertex sets.

    With ``restriction = [U_1, ..., U_s]`` only completions lying inside the
    union of the ``U_j`` and meeting each ``U_j`` at most once are kept; with
    the vertex sets of matching edges this is the link of ``x`` into a
    matching.
    """
    x = check_vertex(H, x)
    rows = H.edges_containing(x)
    pairs = {_complete(H, x, row) for row in rows}
    if restriction is not None:
        owner: dict[VertexRef, int] = {}
        for j, U in enumerate(restriction):
            for v in U:
                owner[check_vertex(H, v)] = j
        kept = set()
        for T in pairs:
            js = [owner.get(v) for v in T]
            if None in js or len(set(js)) != len(js):
                continue
            kept.add(T)
        pairs = kept
    return LinkGraph(x, frozenset(pairs))


def link_union(H: KPartiteHypergraph, centers: Iterable, restriction: Sequence[Iterable] | None = None) -> frozenset[tuple[VertexRef, ...]]:
    """Union of the (restricted) links of several centers."""
    out: set[tuple[VertexRef, ...]] = set()
    for x in centers:
        out |= link_graph(H, x, restriction).pairs
    return frozenset(out)


class Matching:
    """A set of pairwise vertex-disjoint k-tuples.

    Edges are kept sorted; ``covered[c]`` is the set of class-c local
    indices used by the matching.
    """

    __slots__ = ("_edges", "_covered", "_k")

    def __init__(self, edges: Iterable[Sequence[int]] = (), k: int | None = None):
        es = sorted({tuple(int(x) for x in e) for e in edges})
        if k is None:
            if not es:
                raise ValueError("k is required for an empty matching")
            k = len(es[0])
        covered: list[set[int]] = [set() for _ in range(k)]
        for e in es:
            if len(e) != k:
                raise ValueError(f"edge {e} has arity {len(e)}, expected {k}")
            for c, x in enumerate(e):
                if x in covered[c]:
                    raise ValueError(f"edges are not disjoint: vertex ({c}, {x}) used twice")
                covered[c].add(x)
        self._k = k
        self._edges = tuple(es)
        self._covered = tuple(frozenset(s) for s in covered)

    @property
    def k(self) -> int:
        return self._k

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        return self._edges

    @property
    def covered(self) -> tuple[frozenset[int], ...]:
        return self._covered

    def __len__(self) -> int:
        return len(self._edges)

    def __iter__(self):
        return iter(self._edges)

    def __contains__(self, e) -> bool:
        return tuple(e) in set(self._edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, Matching) and self._edges == other._edges and self._k == other._k

    def __hash__(self) -> int:
        return hash(self._edges)

    def __repr__(self) -> str:
        return f"Matching({list(self._edges)})"

    def covers(self, v) -> bool:
        c, i = v
        return i in self._covered[c]

    def vertices(self) -> frozenset[VertexRef]:
        return frozenset(VertexRef(c, i) for c in range(self._k) for i in self._covered[c])

    def uncovered(self, H: KPartiteHypergraph) -> list[list[int]]:
        return [[i for i in range(n) if i not in self._covered[c]] for c, n in enumerate(H.class_sizes)]

    def is_valid_for(self, H: KPartiteHypergraph) -> bool:
        return self._k == H.k and all(H.has_edge(e) for e in self._edges)

    def is_perfect_for(self, H: KPartiteHypergraph) -> bool:
        return (
            self.is_valid_for(H)
            and H.has_equal_classes
            and all(len(self._covered[c]) == n for c, n in enumerate(H.class_sizes))
        )

    def replace(self, remove: Iterable[Sequence[int]] = (), add: Iterable[Sequence[int]] = ()) -> Matching:
        drop = {tuple(e) for e in remove}
        return Matching([e for e in self._edges if e not in drop] + [tuple(e) for e in add], self._k)

    def to_list(self) -> list[list[int]]:
        return [list(e) for e in self._edges]

"""Input validation helpers shared by the public functions."""

from __future__ import annotations

from collections.abc import Iterable
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .hypergraph import KPartiteHypergraph, VertexRef


def check_vertex(H: KPartiteHypergraph, v) -> VertexRef:
    from .hypergraph import VertexRef

    try:
        c, i = v
    except (TypeError, ValueError):
        raise ValueError(f"vertex must be a (class_index, local_index) pair, got {v!r}") from None
    c, i = int(c), int(i)
    if not 0 <= c < H.k:
        raise ValueError(f"class index {c} out of range for k={H.k}")
    if not 0 <= i < H.class_sizes[c]:
        raise ValueError(f"local index {i} out of range for class {c} of size {H.class_sizes[c]}")
    return VertexRef(c, i)


def as_legal_set(H: KPartiteHypergraph, T: Iterable) -> tuple[VertexRef, ...]:
    """Validate ``T`` as a nonempty legal set and return it sorted by class."""
    verts = sorted({check_vertex(H, v) for v in T})
    if not verts:
        raise ValueError("legal set must be nonempty")
    classes = [v.class_index for v in verts]
    if len(set(classes)) != len(classes):
        raise ValueError(f"set {verts} is not legal: two vertices share a class")
    return tuple(verts)


def as_balanced_set(H: KPartiteHypergraph, W: Iterable, size: int | None = None) -> frozenset[VertexRef]:
    verts = frozenset(check_vertex(H, v) for v in W)
    counts = [0] * H.k
    for v in verts:
        counts[v.class_index] += 1
    if len(set(counts)) > 1:
        raise ValueError(f"set is not balanced: per-class counts {counts}")
    if size is not None and len(verts) != size:
        raise ValueError(f"balanced set must have {size} vertices, got {len(verts)}")
    return verts


def check_profile(profile: Iterable[int], sizes: Iterable[int]) -> tuple[int, ...]:
    profile = tuple(int(d) for d in profile)
    sizes = tuple(sizes)
    if len(profile) != len(sizes):
        raise ValueError(f"profile {profile} must have one entry per class ({len(sizes)})")
    for d, n in zip(profile, sizes):
        if not 0 <= d <= n:
            raise ValueError(f"profile entry {d} outside [0, {n}]")
    return profile


def check_equal_classes(H: KPartiteHypergraph) -> int:
    if len(set(H.class_sizes)) != 1:
        raise ValueError(f"classes must have equal sizes, got {H.class_sizes}")
    return H.class_sizes[0]


def check_same_shape(H: KPartiteHypergraph, k: int, sizes: Iterable[int]) -> None:
    sizes = tuple(sizes)
    if H.k != k or H.class_sizes != sizes:
        raise ValueError(
            f"dimension mismatch: hypergraph has k={H.k}, sizes={H.class_sizes}; "
            f"expected k={k}, sizes={sizes}"
        )

"""Absorbing sets and families.

An absorbing set ``A`` for a balanced k-set ``T`` is a balanced
``k(k-1)``-set, disjoint from ``T``, such that both ``H[A]`` and
``H[A | T]`` have perfect matchings. A family of disjoint absorbing sets
lets a matching swallow a few leftover k-sets at the end of a search.

At desk scale the sampling probability is astronomically small, so by
default it is raised (``oversample``) and the outcome is verified instead of
relied upon; ``strict=True`` uses the raw probability and range checks.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_balanced_set, check_equal_classes
from .hypergraph import KPartiteHypergraph, Matching, VertexRef

__all__ = [
    "AbsorptionConfig",
    "AbsorbingSet",
    "AbsorbingFamily",
    "AbsorptionFailure",
    "gamma_upper_bound",
    "absorbing_matching",
    "is_absorbing",
    "count_absorbing",
    "absorbing_count_lower_bound",
    "sample_absorbing_family",
    "absorb",
]


def gamma_upper_bound(k: int) -> float:
    return (k - 1) ** (k * k - 2 * k - 2) / (5 * k * math.e ** (k * (k - 1)))


@dataclass(frozen=True)
class AbsorptionConfig:
    gamma: float = 0.1
    seed: int = 0
    retry_limit: int = 50
    strict: bool = False
    oversample: float = 1.5
    max_members: int | None = None
    coverage_sample: int = 5000

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.retry_limit < 1:
            raise ValueError("retry_limit must be at least 1")
        if self.oversample <= 0:
            raise ValueError("oversample must be positive")
        if self.max_members is not None and self.max_members < 1:
            raise ValueError("max_members must be positive")

    def gamma_prime(self, k: int) -> float:
        return self.gamma ** (2 * k) * k * (k - 1) ** 2 / 2

    def delta(self, n: int, k: int) -> float:
        return 2 * (n * math.e / (k - 1)) ** (k * (k - 1))

    def probability(self, n: int, k: int) -> float:
        """Raw selection probability, clamped into (0, 1]."""
        return min(1.0, self.gamma ** k * n / self.delta(n, k))

    def member_cap(self, n: int, k: int) -> int:
        if self.max_members is not None:
            return self.max_members
        raw = math.floor(self.gamma ** k * n)
        return raw if self.strict else max(1, raw)


@dataclass(frozen=True)
class AbsorbingSet:
    vertices: frozenset[VertexRef]
    matching: tuple[tuple[int, ...], ...]

    def key(self) -> tuple[VertexRef, ...]:
        return tuple(sorted(self.vertices))


@dataclass
class AbsorbingFamily:
    members: list[AbsorbingSet]
    base_matching: Matching
    coverage_g: int
    coverage_exhaustive: bool
    retries: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def vertices(self) -> frozenset[VertexRef]:
        return frozenset().union(*(m.vertices for m in self.members)) if self.members else frozenset()

    def absorbs(self, H: KPartiteHypergraph, j: int, T: tuple[VertexRef, ...]):
        key = (j, T)
        if key not in self._cache:
            self._cache[key] = absorbing_matching(H, self.members[j].vertices, T)
        return self._cache[key]

    def to_dict(self) -> dict:
        return {
            "members": [[list(v) for v in m.key()] for m in self.members],
            "base_matching": self.base_matching.to_list(),
            "coverage_g": self.coverage_g,
            "coverage_exhaustive": self.coverage_exhaustive,
            "retries": self.retries,
        }


class AbsorptionFailure(RuntimeError):
    def __init__(self, message: str, best: AbsorbingFamily | None = None):
        super().__init__(message)
        self.best = best


def _parts(verts: Iterable[VertexRef], k: int) -> list[list[int]]:
    parts: list[list[int]] = [[] for _ in range(k)]
    for c, i in verts:
        parts[c].append(i)
    for p in parts:
        p.sort()
    return parts


def _perfect_on(H: KPartiteHypergraph, parts: list[list[int]]) -> tuple[tuple[int, ...], ...] | None:
    """Perfect matching of the sub-hypergraph induced on equal-sized ``parts``."""
    es = H.edge_set
    first, rest = parts[0], parts[1:]
    for perms in itertools.product(*(itertools.permutations(p) for p in rest)):
        edges = [tuple([first[t]] + [perm[t] for perm in perms]) for t in range(len(first))]
        if all(e in es for e in edges):
            return tuple(edges)
    return None


def _check_pair(H: KPartiteHypergraph, A, T) -> tuple[frozenset, frozenset]:
    k = H.k
    A = as_balanced_set(H, A, k * (k - 1))
    T = as_balanced_set(H, T, k)
    if A & T:
        raise ValueError("A and T must be disjoint")
    return A, T


def absorbing_matching(H: KPartiteHypergraph, A, T) -> tuple[tuple[int, ...], ...] | None:
    """Perfect matching of ``H[A | T]`` if ``A`` absorbs ``T``, else ``None``."""
    A, T = _check_pair(H, A, T)
    if _perfect_on(H, _parts(A, H.k)) is None:
        return None
    return _perfect_on(H, _parts(A | T, H.k))


def is_absorbing(H: KPartiteHypergraph, A, T) -> bool:
    return absorbing_matching(H, A, T) is not None


def _balanced_sets_avoiding(H: KPartiteHypergraph, T: frozenset, per_class: int):
    pools = [[i for i in range(n) if VertexRef(c, i) not in T] for c, n in enumerate(H.class_sizes)]
    for combo in itertools.product(*(itertools.combinations(p, per_class) for p in pools)):
        yield combo


def count_absorbing(H: KPartiteHypergraph, T, cap: int | None = None) -> int:
    """Number of absorbing sets for ``T``, stopping early at ``cap``."""
    k = H.k
    T = as_balanced_set(H, T, k)
    t_parts = _parts(T, k)
    count = 0
    for combo in _balanced_sets_avoiding(H, T, k - 1):
        if _perfect_on(H, [list(p) for p in combo]) is None:
            continue
        if _perfect_on(H, [sorted(list(p) + tp) for p, tp in zip(combo, t_parts)]) is None:
            continue
        count += 1
        if cap is not None and count >= cap:
            break
    return count


def absorbing_count_lower_bound(k: int, n: int, gamma: float) -> float:
    """Guaranteed count of absorbing sets per ``T`` under ``delta_1 >= (1/2 + gamma) n^(k-1)``."""
    return gamma ** (k - 1) * n ** (k * (k - 1)) / (2 * (k - 1) ** k)


def _random_balanced(rng: np.random.Generator, n: int, k: int, per_class: int) -> frozenset[VertexRef]:
    return frozenset(
        VertexRef(c, int(i)) for c in range(k) for i in rng.choice(n, size=per_class, replace=False)
    )


def _coverage(H: KPartiteHypergraph, fam: AbsorbingFamily, rng: np.random.Generator, sample: int) -> tuple[int, bool]:
    k, n = H.k, H.n
    used = fam.vertices
    pools = [[i for i in range(n) if VertexRef(c, i) not in used] for c in range(k)]
    total = math.prod(len(p) for p in pools)
    if total == 0:
        return 0, True
    exhaustive = total <= sample
    if exhaustive:
        targets = itertools.product(*pools)
    else:
        targets = (tuple(int(rng.choice(p)) for p in pools) for _ in range(sample))
    g = None
    for t in targets:
        T = tuple(VertexRef(c, i) for c, i in enumerate(t))
        hits = sum(fam.absorbs(H, j, T) is not None for j in range(len(fam.members)))
        g = hits if g is None else min(g, hits)
        if g == 0:
            break
    return g or 0, exhaustive


def _draw_family(H: KPartiteHypergraph, config: AbsorptionConfig, rng: np.random.Generator) -> AbsorbingFamily:
    k, n = H.k, H.n
    m = k * (k - 1)
    N = math.comb(n, k - 1) ** k
    cap = config.member_cap(n, k)
    p = config.probability(n, k)
    if not config.strict:
        p = min(1.0, max(p, config.oversample * cap / N))
    draws = int(rng.binomial(N, p))
    # sample distinct sets without enumerating all N
    chosen: list[frozenset[VertexRef]] = []
    seen: set[frozenset[VertexRef]] = set()
    attempts = 0
    while len(chosen) < min(draws, N) and attempts < 20 * draws + 100:
        attempts += 1
        A = _random_balanced(rng, n, k, k - 1)
        if A not in seen:
            seen.add(A)
            chosen.append(A)
    # drop every set meeting another one
    clash = [False] * len(chosen)
    for a, b in itertools.combinations(range(len(chosen)), 2):
        if chosen[a] & chosen[b]:
            clash[a] = clash[b] = True
    members = []
    for A, bad in zip(chosen, clash):
        if bad:
            continue
        pm = _perfect_on(H, _parts(A, k))
        if pm is None:
            continue
        members.append(AbsorbingSet(A, pm))
        if len(members) >= cap:
            break
    assert all(len(a.vertices) == m for a in members)
    base = Matching([e for a in members for e in a.matching], k)
    fam = AbsorbingFamily(members, base, 0, True, 0)
    # keep only members that absorb at least one outside k-set
    used = fam.vertices
    pools = [[i for i in range(n) if VertexRef(c, i) not in used] for c in range(k)]
    keep = []
    for j, a in enumerate(members):
        probe = itertools.islice(itertools.product(*pools), config.coverage_sample)
        if any(fam.absorbs(H, j, tuple(VertexRef(c, i) for c, i in enumerate(t))) is not None for t in probe):
            keep.append(a)
    base = Matching([e for a in keep for e in a.matching], k)
    return AbsorbingFamily(keep, base, 0, True, 0)


def sample_absorbing_family(H: KPartiteHypergraph, config: AbsorptionConfig | None = None) -> AbsorbingFamily:
    """Sample, prune and verify a family of disjoint absorbing sets.

    Raises:
        AbsorptionFailure: when no attempt within ``retry_limit`` yields a
            family whose verified coverage is positive; ``best`` holds the
            attempt with the largest coverage (then most members).
        ValueError: for unequal classes, or an out-of-range gamma in strict mode.
    """
    config = config or AbsorptionConfig()
    n = check_equal_classes(H)
    k = H.k
    if config.strict and not config.gamma < gamma_upper_bound(k):
        raise ValueError(f"strict mode needs gamma < {gamma_upper_bound(k):.3g} for k={k}")
    if n < k:
        raise AbsorptionFailure(f"n={n} leaves no room for a set of {k - 1} per class plus a target")
    rng = np.random.default_rng(config.seed)
    best = None
    for attempt in range(config.retry_limit):
        fam = _draw_family(H, config, rng)
        fam.retries = attempt
        if fam.members:
            fam.coverage_g, fam.coverage_exhaustive = _coverage(H, fam, rng, config.coverage_sample)
        if best is None or (fam.coverage_g, len(fam.members)) > (best.coverage_g, len(best.members)):
            best = fam
        if fam.coverage_g > 0:
            return fam
    raise AbsorptionFailure(f"no family with positive coverage after {config.retry_limit} attempts", best)


def absorb(H: KPartiteHypergraph, family: AbsorbingFamily, W) -> Matching:
    """Matching covering exactly ``V(family) | W``.

    ``W`` is split into k-sets by zipping its sorted class parts; each k-set
    takes the lexicographically least unused member that absorbs it.

    Raises:
        AbsorptionFailure: naming the first k-set that cannot be absorbed.
    """
    k = H.k
    W = as_balanced_set(H, W)
    if W & family.vertices:
        raise ValueError("W must avoid the family's vertices")
    parts = _parts(W, k)
    targets = [tuple(VertexRef(c, parts[c][t]) for c in range(k)) for t in range(len(parts[0]))]
    if len(targets) > len(family.members):
        raise AbsorptionFailure(f"{len(targets)} k-sets to absorb but only {len(family.members)} members")
    order = sorted(range(len(family.members)), key=lambda j: family.members[j].key())
    used: set[int] = set()
    local = {j: family.members[j].matching for j in range(len(family.members))}
    for T in targets:
        for j in order:
            if j in used:
                continue
            pm = family.absorbs(H, j, T)
            if pm is not None:
                used.add(j)
                local[j] = pm
                break
        else:
            raise AbsorptionFailure(f"no unused absorbing member for {[tuple(v) for v in T]}")
    M = Matching([e for j in sorted(local) for e in local[j]], k)
    want = family.vertices | W
    if M.vertices() != want or not M.is_valid_for(H):
        raise AbsorptionFailure("absorbed matching failed verification")
    return M

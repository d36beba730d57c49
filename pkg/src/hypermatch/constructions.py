"""Extremal families and closed-form degree thresholds.

Conventions: ``W_i`` is the block of the last ``d_i`` local indices of class
``i`` and ``U_i`` the rest; the designated vertex ``u_i`` of ``U_i`` is local
index 0.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from math import comb

import numpy as np

from ._validation import check_profile
from .hypergraph import KPartiteHypergraph, _from_array, build_hypergraph

__all__ = [
    "TemplateRule",
    "ExtremalTemplate",
    "ThresholdValue",
    "build_H",
    "build_Hk",
    "build_Hstar",
    "build_Hprime",
    "build_counterexample6",
    "hk_profile",
    "threshold_exact",
    "delta_l_formula",
    "d3_threshold",
    "delta1_Hstar_formula",
    "hstar_added_edges",
    "family_corpus",
]


class TemplateRule(enum.Enum):
    ALL_MEETING_W = "H"
    UUW_UWW = "Hprime"


@dataclass(frozen=True)
class ExtremalTemplate:
    """Partition of every class into ``U_i``/``W_i`` plus an edge rule."""

    k: int
    n: int
    profile: tuple[int, ...]
    rule: TemplateRule = TemplateRule.ALL_MEETING_W

    def __post_init__(self):
        object.__setattr__(self, "profile", check_profile(self.profile, [self.n] * self.k))
        if len(self.profile) != self.k:
            raise ValueError("profile length must equal k")
        if self.rule is TemplateRule.UUW_UWW and self.k != 3:
            raise ValueError("the UUW/UWW rule is defined for k=3 only")

    @classmethod
    def hprime(cls, n: int, profile: Sequence[int]) -> ExtremalTemplate:
        return cls(3, n, tuple(profile), TemplateRule.UUW_UWW)

    def is_w(self, c: int, i) -> np.ndarray | bool:
        return i >= self.n - self.profile[c]

    def w_block(self, c: int) -> range:
        return range(self.n - self.profile[c], self.n)

    def u_block(self, c: int) -> range:
        return range(0, self.n - self.profile[c])

    def contains(self, edges: np.ndarray) -> np.ndarray:
        """Boolean mask: which rows of an edge array belong to the template."""
        edges = np.asarray(edges).reshape(-1, self.k)
        w_count = sum((edges[:, c] >= self.n - d).astype(np.int64) for c, d in enumerate(self.profile))
        if self.rule is TemplateRule.ALL_MEETING_W:
            return w_count >= 1
        return (w_count == 1) | (w_count == 2)

    def build(self) -> KPartiteHypergraph:
        arr = _all_tuples(self.k, self.n)
        return KPartiteHypergraph(self.k, [self.n] * self.k, arr[self.contains(arr)])

    def edge_type(self, e: Sequence[int]) -> str:
        """``'U'``/``'W'`` label per coordinate, e.g. ``'UUW'``."""
        return "".join("W" if self.is_w(c, x) else "U" for c, x in enumerate(e))


@dataclass(frozen=True)
class ThresholdValue:
    n: int
    residue: int
    value: int


def _all_tuples(k: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((0, k), dtype=np.int64)
    grids = np.indices((n,) * k, dtype=np.int64)
    return grids.reshape(k, -1).T.copy()


def hk_profile(k: int, m: int) -> tuple[int, ...]:
    return tuple((m + i) // k for i in range(k))


def build_H(n: int, profile: Sequence[int]) -> KPartiteHypergraph:
    """All legal k-tuples meeting ``W``; k is the profile length."""
    profile = tuple(profile)
    if len(profile) < 2:
        raise ValueError("profile must have at least two entries")
    return ExtremalTemplate(len(profile), n, profile).build()


def build_Hk(n: int, m: int, k: int = 3) -> KPartiteHypergraph:
    if not 0 <= m <= k * n:
        raise ValueError(f"m must lie in [0, {k * n}], got {m}")
    return build_H(n, hk_profile(k, m))


def hstar_added_edges(n: int, k: int = 3) -> np.ndarray:
    """Legal k-sets holding more than k/2 of the designated vertices."""
    arr = _all_tuples(k, n)
    hits = (arr == 0).sum(axis=1)
    return arr[2 * hits > k]


def build_Hstar(n: int, m: int, k: int = 3) -> KPartiteHypergraph:
    """``H_k(n; m-1)`` plus the intersecting family on the designated vertices."""
    if not 1 <= m <= k * n:
        raise ValueError(f"m must lie in [1, {k * n}], got {m}")
    profile = hk_profile(k, m - 1)
    if any(d >= n for d in profile):
        raise ValueError(f"profile {profile} leaves some U_i empty; no designated vertex exists")
    base = build_H(n, profile)
    return _from_array(k, [n] * k, np.concatenate([base.edges, hstar_added_edges(n, k)]))


def build_Hprime(n: int, d1: int, d2: int, d3: int) -> KPartiteHypergraph:
    return ExtremalTemplate.hprime(n, (d1, d2, d3)).build()


def build_counterexample6() -> KPartiteHypergraph:
    # u1v1w1, u1v2w2, u2v2w1, u2v1w2
    return build_hypergraph(3, [2, 2, 2], [(0, 0, 0), (0, 1, 1), (1, 1, 0), (1, 0, 1)])


def threshold_exact(n: int) -> ThresholdValue:
    """Strict lower bound on the minimum vertex degree forcing a perfect matching."""
    if n < 1:
        raise ValueError("n must be positive")
    r = n % 3
    num = {0: 5 * n * n - 6 * n, 1: 5 * n * n - 4 * n - 1, 2: 5 * n * n - 8 * n + 5}[r]
    if num % 9:
        raise ArithmeticError(f"threshold numerator {num} not divisible by 9 (n={n})")
    return ThresholdValue(n, r, num // 9)


def delta_l_formula(k: int, l: int, n: int, m: int) -> int:
    """Minimum l-degree of ``H_k(n;m)``; exact while every ``d_i < n``."""
    if not 1 <= l <= k:
        raise ValueError(f"l must lie in [1, {k}]")
    if not 0 <= m <= k * n:
        raise ValueError(f"m must lie in [0, {k * n}]")
    prod = 1
    for i in range(1, k - l + 1):
        prod *= n - (m + i - 1) // k
    return n ** (k - l) - prod


def d3_threshold(n: int, r: int, s: int) -> int:
    if r < 0 or s not in (1, 2, 3):
        raise ValueError("need r >= 0 and s in {1, 2, 3}")
    if s == 1:
        return n * n - (n - r) ** 2 + 1
    if s == 2:
        return n * n - (n - r) * (n - r - 1)
    return n * n - (n - r - 1) ** 2


def delta1_Hstar_formula(k: int, n: int, m: int) -> int:
    """Minimum vertex degree of ``H*_k(n;m)``; exact unless the U blocks are tiny (for k=3, m >= 3n-4)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    extra = sum(comb(k - 1, i) * n ** (k - i - 1) for i in range(k // 2 + 1, k))
    return delta_l_formula(k, 1, n, m - 1) + extra


def family_corpus(n_values: Sequence[int], *, prime_profiles: str = "all") -> Iterator[tuple[str, KPartiteHypergraph]]:
    """Named instances of every generated family for the given class sizes.

    Covers ``H_3(n;m)`` for all m <= 3n, ``H*_3(n;m)`` wherever defined, the
    ``H'`` family (all profiles, or only near-balanced ones with
    ``prime_profiles="balanced"``) and the 6-vertex example.
    """
    yield "counterexample6", build_counterexample6()
    for n in n_values:
        for m in range(0, 3 * n + 1):
            yield f"Hk({n},{m})", build_Hk(n, m)
        for m in range(1, 3 * n + 1):
            if all(d < n for d in hk_profile(3, m - 1)):
                yield f"Hstar({n},{m})", build_Hstar(n, m)
        if prime_profiles == "all":
            profiles = itertools.product(range(n + 1), repeat=3)
        else:
            base = n // 3
            profiles = {p for p in itertools.product(range(max(0, base - 1), min(n, base + 2) + 1), repeat=3)}
            profiles = sorted(profiles)
        for p in profiles:
            yield f"Hprime({n},{p[0]},{p[1]},{p[2]})", build_Hprime(n, *p)

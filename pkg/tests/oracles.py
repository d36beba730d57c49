"""Slow, obviously-correct reference implementations used only by tests."""

from __future__ import annotations

import itertools
from math import comb


def all_tuples(k, n):
    return list(itertools.product(range(n), repeat=k))


def naive_degree(edges, k, sizes, T):
    """Count (k-|T|)-completions of the legal set T = {class: index}."""
    free = [c for c in range(k) if c not in T]
    count = 0
    es = set(edges)
    for rest in itertools.product(*(range(sizes[c]) for c in free)):
        e = [None] * k
        for c, x in T.items():
            e[c] = x
        for c, x in zip(free, rest):
            e[c] = x
        count += tuple(e) in es
    return count


def naive_min_degree(edges, k, sizes, l):
    best = None
    for classes in itertools.combinations(range(k), l):
        for idx in itertools.product(*(range(sizes[c]) for c in classes)):
            d = naive_degree(edges, k, sizes, dict(zip(classes, idx)))
            best = d if best is None else min(best, d)
    return best


def naive_max_matching(edges):
    """Largest set of pairwise disjoint edges by plain recursion."""
    edges = sorted(set(edges))
    best = []

    def go(i, used, chosen):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(chosen) + (len(edges) - i) <= len(best):
            return
        for j in range(i, len(edges)):
            e = edges[j]
            if all((c, x) not in used for c, x in enumerate(e)):
                chosen.append(e)
                go(j + 1, used | {(c, x) for c, x in enumerate(e)}, chosen)
                chosen.pop()

    go(0, frozenset(), [])
    return best


def hk_edges(n, profile):
    k = len(profile)
    return [e for e in all_tuples(k, n) if any(e[c] >= n - d for c, d in enumerate(profile))]


def hprime_edges(n, profile):
    out = []
    for e in all_tuples(3, n):
        w = sum(e[c] >= n - d for c, d in enumerate(profile))
        if w in (1, 2):
            out.append(e)
    return out


def threshold_by_cases(n):
    r = n % 3
    num = {0: 5 * n * n - 6 * n, 1: 5 * n * n - 4 * n - 1, 2: 5 * n * n - 8 * n + 5}[r]
    return num // 9


def complete_absorbing_count(n, k=3):
    return comb(n - 1, k - 1) ** k


def is_matching(edges):
    seen = set()
    for e in edges:
        for c, x in enumerate(e):
            if (c, x) in seen:
                return False
            seen.add((c, x))
    return True


def perturbed_template(H, rng, max_removed):
    """Drop up to ``max_removed`` pairwise disjoint edges, so each vertex loses at most one."""
    edges = list(H.edge_list)
    order = rng.permutation(len(edges))
    used = set()
    drop = []
    for j in order:
        e = edges[j]
        if len(drop) >= max_removed:
            break
        if any((c, x) in used for c, x in enumerate(e)):
            continue
        used |= {(c, x) for c, x in enumerate(e)}
        drop.append(e)
    return H.with_edges(remove=drop)

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypermatch.constructions import (
    build_counterexample6,
    build_H,
    build_Hk,
    build_Hprime,
    build_Hstar,
    family_corpus,
    hstar_added_edges,
)
from hypermatch.hypergraph import Matching, VertexRef, _from_array, build_hypergraph
from hypermatch.matching import (
    BudgetExhausted,
    PMStatus,
    SearchBudget,
    SearchMode,
    augment_local,
    augment_to_fixpoint,
    balanced_cover_check,
    brute_force_threshold,
    check_degree_bound_after_removal,
    enumerate_matchings,
    greedy_matching,
    has_perfect_matching,
    is_intersecting_family,
    max_matching_exact,
    threshold_census,
)
from oracles import is_matching, naive_max_matching


def complete(n):
    return build_H(n, (n, n, n))


def empty(n):
    return build_H(n, (0, 0, 0))


@st.composite
def small_hypergraphs(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    cells = list(itertools.product(range(n), repeat=3))
    edges = draw(st.lists(st.sampled_from(cells), max_size=len(cells)))
    return build_hypergraph(3, [n] * 3, edges)


# exact search

@pytest.mark.parametrize("n", range(1, 7))
def test_exact_complete(n):
    r = max_matching_exact(complete(n))
    assert r.optimal and len(r.matching) == n
    assert r.matching.is_perfect_for(complete(n))


def test_exact_examples():
    assert len(max_matching_exact(build_H(4, (1, 1, 1))).matching) == 3
    r = max_matching_exact(build_counterexample6())
    assert r.optimal and len(r.matching) == 1


@settings(max_examples=150, deadline=None)
@given(small_hypergraphs())
def test_exact_matches_naive(H):
    r = max_matching_exact(H)
    assert r.optimal
    assert r.matching.is_valid_for(H)
    assert len(r.matching) == len(naive_max_matching(H.edge_list))


def test_exact_budget_exhaustion_is_flagged():
    H = build_Hprime(9, 3, 3, 3).with_edges(remove=[(0, 0, 8)])
    r = max_matching_exact(H, SearchBudget(node_limit=1))
    assert r.matching.is_valid_for(H)
    pm = has_perfect_matching(build_Hstar(9, 9), SearchBudget(node_limit=1))
    assert pm.status in (PMStatus.UNKNOWN, PMStatus.YES)


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(node_limit=0)
    with pytest.raises(ValueError):
        SearchBudget(time_limit=0)
    assert SearchBudget(mode=SearchMode.BEST_EFFORT, best_effort_nodes=5).effective_nodes == 5


def test_has_pm_examples():
    assert has_perfect_matching(complete(5)).status is PMStatus.YES
    assert has_perfect_matching(build_counterexample6()).status is PMStatus.NO
    r = has_perfect_matching(build_Hstar(5, 4))
    assert r.status is PMStatus.NO and not r
    yes = has_perfect_matching(complete(4))
    assert yes and yes.matching.is_perfect_for(complete(4))


def test_has_pm_unequal_classes():
    H = build_hypergraph(3, [2, 2, 3], [(0, 0, 0), (1, 1, 1)])
    assert has_perfect_matching(H).status is PMStatus.NO


def test_has_pm_empty_classes():
    H = build_hypergraph(3, [0, 0, 0], [])
    assert has_perfect_matching(H).status is PMStatus.YES


@pytest.mark.parametrize("n", range(1, 11))
def test_no_pm_when_profile_sum_below_n(n):
    # every edge meets a W side of fewer than n vertices
    for p in itertools.product(range(n), repeat=3):
        if sum(p) < n:
            assert has_perfect_matching(build_H(n, p)).status is PMStatus.NO, p
            assert has_perfect_matching(build_Hprime(n, *p)).status is PMStatus.NO, p
    for m in range(1, n):
        assert has_perfect_matching(build_Hk(n, m)).status is PMStatus.NO
        assert has_perfect_matching(build_Hstar(n, m)).status is PMStatus.NO


# heuristics

def test_greedy_examples():
    assert len(greedy_matching(empty(4))) == 0
    for seed in range(5):
        assert len(greedy_matching(complete(5), seed)) == 5
    assert len(greedy_matching(build_counterexample6())) == 1


def test_greedy_is_deterministic():
    H = build_Hprime(8, 2, 3, 3)
    assert greedy_matching(H, 3) == greedy_matching(H, 3)


def test_augment_examples():
    H = complete(3)
    M = Matching([(0, 0, 0), (1, 1, 1)], 3)
    out = augment_local(H, M, depth=1)
    assert out is not None and len(out) == 3 and out.is_valid_for(H)
    C = build_counterexample6()
    assert augment_local(C, Matching([C.edge_list[0]], 3)) is None
    H5 = build_H(5, (1, 1, 1))
    M5 = Matching([(4, 0, 0), (1, 4, 1)], 3)
    out = augment_local(H5, M5)
    assert out is not None and len(out) == 3 and out.is_valid_for(H5)


def test_augment_rejects_bad_input():
    H = complete(3)
    with pytest.raises(ValueError):
        augment_local(H, Matching([(0, 0, 0), (0, 1, 1)], 3))
    with pytest.raises(ValueError):
        augment_local(build_counterexample6(), Matching([(1, 1, 1)], 3))
    with pytest.raises(ValueError):
        augment_local(H, Matching([], 3), depth=4)


@settings(max_examples=80, deadline=None)
@given(small_hypergraphs(5), st.integers(0, 100))
def test_augment_never_shrinks(H, seed):
    M = greedy_matching(H, seed)
    out = augment_local(H, M)
    if out is not None:
        assert out.is_valid_for(H) and len(out) > len(M)
    fix = augment_to_fixpoint(H, M)
    assert fix.is_valid_for(H) and len(fix) >= len(M)


@pytest.mark.parametrize("n", range(2, 9))
def test_fixpoint_reaches_optimum_on_exact_families(n):
    named = list(family_corpus([n]))
    if n <= 5:
        named += [(f"H{p}", build_H(n, p)) for p in itertools.product(range(n + 1), repeat=3)]
    for name, H in named:
        if name.startswith("Hstar"):
            continue
        fix = augment_to_fixpoint(H, greedy_matching(H, 0))
        nu = max_matching_exact(H)
        assert nu.optimal
        assert len(fix) == len(nu.matching), name


# intersecting families and covers

def test_intersecting_examples():
    assert is_intersecting_family(build_counterexample6())
    assert is_intersecting_family(build_hypergraph(3, [2] * 3, [(0, 0, 0)]))
    assert not is_intersecting_family(build_hypergraph(3, [2] * 3, [(0, 0, 0), (1, 1, 1)]))


@pytest.mark.parametrize("n", range(2, 11))
def test_hstar_added_edges_intersect(n):
    assert is_intersecting_family(_from_array(3, [n] * 3, hstar_added_edges(n)))
    for m in range(1, n + 1):
        H = build_Hstar(n, m)
        base = build_Hk(n, m - 1)
        added = H.edge_set - base.edge_set
        assert is_intersecting_family(build_hypergraph(3, [n] * 3, added))


def test_cover_examples():
    H = build_Hk(6, 5)
    w = balanced_cover_check(H, (1, 2, 2))
    assert w is not None and w.verify(H)
    assert w.W == {VertexRef(0, 5), VertexRef(1, 4), VertexRef(1, 5), VertexRef(2, 4), VertexRef(2, 5)}
    assert balanced_cover_check(complete(2), (1, 1, 1)) is None
    assert balanced_cover_check(build_counterexample6(), (1, 0, 0)) is None


@settings(max_examples=80, deadline=None)
@given(small_hypergraphs(4), st.data())
def test_cover_agrees_with_enumeration(H, data):
    n = H.n
    prof = tuple(data.draw(st.integers(0, n)) for _ in range(3))
    w = balanced_cover_check(H, prof)
    exists = any(
        all(any(e[c] in Ws[c] for c in range(3)) for e in H.edge_list)
        for Ws in itertools.product(*(itertools.combinations(range(n), d) for d in prof))
    )
    assert (w is not None) == exists
    if w is not None:
        assert w.verify(H)


def test_cover_budget():
    with pytest.raises(BudgetExhausted):
        balanced_cover_check(build_Hprime(9, 3, 3, 3), (3, 3, 3), node_limit=2)


# brute force

def test_brute_force_both_paths():
    fast = threshold_census(3, 2)
    slow = threshold_census(3, 2, use_symmetry=False)
    assert fast.value == slow.value == 3
    assert slow.graphs_examined == 256
    assert sum(slow.counts.values()) == sum(fast.counts.values()) == 256
    assert fast.counts == slow.counts
    target = build_counterexample6().edge_set
    assert any(G.edge_set == target for G in slow.no_pm_by_degree[2])
    assert brute_force_threshold(3, 1) == 1


def test_brute_force_rejects_large():
    with pytest.raises(ValueError, match="2\\^27"):
        brute_force_threshold(3, 3)


# degree bound after removal

def test_degree_bound_examples():
    assert check_degree_bound_after_removal(complete(3), (0, 0), 2)
    assert check_degree_bound_after_removal(empty(3), (0, 1), 0)
    assert check_degree_bound_after_removal(build_Hk(6, 5), (0, 0), 5)
    with pytest.raises(ValueError):
        check_degree_bound_after_removal(complete(3), (0, 0), -1)


@settings(max_examples=60, deadline=None)
@given(small_hypergraphs(4), st.data())
def test_degree_bound_holds(H, data):
    m = len(max_matching_exact(H).matching)
    c = data.draw(st.integers(0, 2))
    i = data.draw(st.integers(0, H.n - 1))
    assert check_degree_bound_after_removal(H, (c, i), m)
    T = [(c2, data.draw(st.integers(0, H.n - 1))) for c2 in range(3)]
    assert check_degree_bound_after_removal(H, T, m)


# enumeration

def test_enumerate_matchings_distinct_and_valid():
    H = complete(3)
    Ms = list(enumerate_matchings(H, 3))
    assert len(Ms) == len(set(Ms)) == 36
    assert all(M.is_perfect_for(H) and is_matching(M.edges) for M in Ms)
    assert len(list(enumerate_matchings(H, 3, limit=5))) == 5
    assert list(enumerate_matchings(build_counterexample6(), 2)) == []

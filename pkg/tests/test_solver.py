import json

import numpy as np
import pytest

from hypermatch.constructions import ExtremalTemplate, build_counterexample6, build_H, build_Hk, build_Hprime, build_Hstar
from hypermatch.hypergraph import build_hypergraph
from hypermatch.matching import PMStatus, has_perfect_matching
from hypermatch.solver import (
    ExtremalFailure,
    SolveStatus,
    SolverConfig,
    SolverMode,
    extremal_solve,
    solve_perfect_matching,
)
from oracles import perturbed_template


def complete(n):
    return build_H(n, (n, n, n))


def test_solve_examples():
    out = solve_perfect_matching(complete(5))
    assert out.status is SolveStatus.PERFECT and out.matching.is_perfect_for(complete(5))
    out = solve_perfect_matching(build_counterexample6())
    assert out.status is SolveStatus.NO_PERFECT
    assert out.certificate["max_matching_optimal"] and len(out.matching) == 1
    assert solve_perfect_matching(build_Hstar(5, 4)).status is SolveStatus.NO_PERFECT


def test_solve_edge_cases():
    out = solve_perfect_matching(build_hypergraph(3, [1, 2, 2], [(0, 0, 0)]))
    assert out.status is SolveStatus.NO_PERFECT
    assert solve_perfect_matching(build_hypergraph(3, [0, 0, 0], [])).status is SolveStatus.PERFECT


def test_outcome_json():
    d = solve_perfect_matching(build_counterexample6()).to_dict()
    json.dumps(d)
    assert d["status"] == "no_perfect" and d["optimal"] and d["matching_size"] == 1
    d = solve_perfect_matching(complete(3)).to_dict()
    assert d["status"] == "perfect" and d["matching_size"] == 3


def test_heuristic_never_claims_no():
    cfg = SolverConfig(mode=SolverMode.HEURISTIC_ONLY)
    for H in (build_counterexample6(), build_Hstar(6, 5), build_Hk(7, 6)):
        assert solve_perfect_matching(H, cfg).status is SolveStatus.INCOMPLETE
    out = solve_perfect_matching(complete(6), cfg)
    assert out.status is SolveStatus.PERFECT and out.matching.is_perfect_for(complete(6))


def test_large_instance_uses_heuristics():
    H = build_Hprime(12, 4, 4, 4)
    out = solve_perfect_matching(H)
    assert out.status is SolveStatus.PERFECT and out.matching.is_perfect_for(H)
    assert out.trace[0][0] == "extremal"


def test_large_no_pm_instance_proved_by_fallback():
    H = build_Hstar(12, 11)
    out = solve_perfect_matching(H)
    assert out.status is SolveStatus.NO_PERFECT
    assert has_perfect_matching(H).status is PMStatus.NO


def test_exact_only_budget():
    H = build_Hprime(9, 3, 3, 3).with_edges(remove=[(0, 0, 8)])
    out = solve_perfect_matching(H, SolverConfig(mode=SolverMode.EXACT_ONLY, exact_nodes=1))
    assert out.status in (SolveStatus.INCOMPLETE, SolveStatus.PERFECT)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(gamma=0)
    with pytest.raises(ValueError):
        SolverConfig(augment_depth=5)
    with pytest.raises(ValueError):
        SolverConfig(alpha=-1)


@pytest.mark.parametrize("n", [9, 12, 15])
def test_extremal_on_template(n):
    T = ExtremalTemplate.hprime(n, (n // 3,) * 3)
    H = T.build()
    M = extremal_solve(H, T, 0.0)
    assert M.is_perfect_for(H)
    # every edge of the schedule carries exactly one W vertex
    assert all(T.edge_type(e).count("W") == 1 for e in M)


@pytest.mark.parametrize("n", range(9, 16))
def test_extremal_on_all_regime_profiles(n):
    lo = -(-5 * n // 16)
    for d1 in range(lo, n):
        for d2 in range(lo, n - d1 - lo + 1):
            d3 = n - d1 - d2
            T = ExtremalTemplate.hprime(n, (d1, d2, d3))
            H = T.build()
            assert extremal_solve(H, T, 0.0).is_perfect_for(H)


def test_extremal_regime_violation():
    T = ExtremalTemplate.hprime(16, (1, 1, 14))
    with pytest.raises(ExtremalFailure, match="regime violated"):
        extremal_solve(T.build(), T, 0.0)
    T2 = ExtremalTemplate.hprime(9, (3, 3, 2))
    with pytest.raises(ExtremalFailure, match="does not sum"):
        extremal_solve(T2.build(), T2, 0.0)


@pytest.mark.parametrize("seed", range(10))
def test_extremal_on_perturbed_template(seed):
    T = ExtremalTemplate.hprime(12, (4, 4, 4))
    H = perturbed_template(T.build(), np.random.default_rng(seed), 12)
    M = extremal_solve(H, T, 0.01)
    assert M.is_perfect_for(H)


def test_extremal_with_bad_vertices():
    T = ExtremalTemplate.hprime(12, (4, 4, 4))
    H = T.build()
    # strip most UUW edges at one U vertex of class 0, leaving its UWW edges
    drop = [e for e in H.edge_list if e[0] == 0 and T.edge_type(e) == "UUW"][:20]
    G = H.with_edges(remove=drop)
    M = extremal_solve(G, T, 0.05)
    assert M.is_perfect_for(G)


def test_solve_relabeled_template():
    rng = np.random.default_rng(5)
    H = build_Hprime(12, 4, 4, 4).relabeled([list(rng.permutation(12)) for _ in range(3)])
    out = solve_perfect_matching(H, SolverConfig(mode=SolverMode.EXTREMAL_ONLY))
    assert out.status is SolveStatus.PERFECT and out.matching.is_perfect_for(H)

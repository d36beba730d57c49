"""Threshold sweeps and the construction tightness battery."""

from __future__ import annotations

import csv
import io
import time
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass

import numpy as np

from .constructions import (
    build_Hk,
    build_Hstar,
    delta1_Hstar_formula,
    delta_l_formula,
    threshold_exact,
)
from .hypergraph import KPartiteHypergraph, _from_array, min_l_degree
from .matching import PMStatus, SearchBudget, has_perfect_matching
from .solver import SolverConfig, SolveStatus, solve_perfect_matching

__all__ = [
    "SweepRow",
    "random_min_degree_hypergraph",
    "threshold_sweep",
    "sweep_to_csv",
    "verify_thresholds",
    "SWEEP_MAX_N",
]

SWEEP_MAX_N = 15
SWEEP_COLUMNS = ("n", "delta1", "trials", "pm_found", "mean_time")


@dataclass(frozen=True)
class SweepRow:
    n: int
    delta1: int
    trials: int
    pm_found: int
    mean_time: float


def random_min_degree_hypergraph(n: int, target: int, rng: np.random.Generator) -> KPartiteHypergraph:
    """Random 3-partite 3-graph with minimum vertex degree at least ``target``.

    Each triple is kept with probability ``target / n^2``; then, while some
    vertex is short, the missing triple at the weakest vertex whose other two
    vertices have the smallest degree sum is added.
    """
    if not 0 <= target <= n * n:
        raise ValueError(f"target degree {target} outside [0, {n * n}]")
    cube = rng.random((n, n, n)) < target / (n * n)
    while True:
        degs = [cube.sum(axis=tuple(a for a in range(3) if a != c)) for c in range(3)]
        lows = [int(d.min()) for d in degs]
        if min(lows) >= target:
            break
        c = int(np.argmin(lows))
        v = int(np.argmin(degs[c]))
        j, l = (x for x in range(3) if x != c)
        sl = [slice(None)] * 3
        sl[c] = v
        face = cube[tuple(sl)]
        cost = degs[j][:, None] + degs[l][None, :]
        cost = np.where(face, np.iinfo(np.int64).max, cost)
        a, b = np.unravel_index(int(np.argmin(cost)), cost.shape)
        idx = [0, 0, 0]
        idx[c], idx[j], idx[l] = v, int(a), int(b)
        cube[tuple(idx)] = True
    return _from_array(3, [n] * 3, np.argwhere(cube).astype(np.int64))


def threshold_sweep(
    n: int,
    trials: int,
    density_grid: Iterable[int],
    seed: int = 0,
    config: SolverConfig | None = None,
) -> list[SweepRow]:
    """Perfect-matching frequency of random hypergraphs per target minimum degree.

    Trial ``i`` at target ``t`` uses the generator seeded by ``(seed, t, i)``,
    so every column except ``mean_time`` is reproducible.
    """
    if not 1 <= n <= SWEEP_MAX_N:
        raise ValueError(f"n must lie in [1, {SWEEP_MAX_N}]")
    if trials < 1:
        raise ValueError("trials must be positive")
    grid = [int(t) for t in density_grid]
    for t in grid:
        if not 0 <= t <= n * n:
            raise ValueError(f"target degree {t} unreachable for n={n} (max {n * n})")
    config = config or SolverConfig()
    rows = []
    for t in grid:
        found = 0
        elapsed = 0.0
        for i in range(trials):
            rng = np.random.default_rng([seed, t, i])
            H = random_min_degree_hypergraph(n, t, rng)
            start = time.perf_counter()
            out = solve_perfect_matching(H, config)
            elapsed += time.perf_counter() - start
            found += out.status is SolveStatus.PERFECT
        rows.append(SweepRow(n, t, trials, found, elapsed / trials))
    return rows


def sweep_to_csv(rows: Sequence[SweepRow], with_time: bool = True) -> str:
    buf = io.StringIO()
    cols = SWEEP_COLUMNS if with_time else SWEEP_COLUMNS[:-1]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        d = asdict(r)
        if with_time:
            d["mean_time"] = f"{r.mean_time:.6f}"
        else:
            d.pop("mean_time")
        w.writerow(d)
    return buf.getvalue()


def verify_thresholds(n_max: int, *, oracle_max: int = 14, build_max: int = 40, node_limit: int = 2_000_000) -> dict:
    """Tightness battery for the minimum-degree threshold.

    For every ``3 <= n <= n_max`` the row records the closed-form threshold,
    the closed-form degree of the tight construction (``H_3(n;n-1)`` when
    ``n % 3 != 2``, otherwise ``H*_3(n;n-1)``), the degree measured on the
    built construction (``n <= build_max``) and the exact oracle's verdict
    on its perfect matching (``n <= oracle_max``).
    """
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    rows = []
    for n in range(3, n_max + 1):
        th = threshold_exact(n)
        name = "Hstar" if th.residue == 2 else "Hk"
        formula = delta1_Hstar_formula(3, n, n - 1) if name == "Hstar" else delta_l_formula(3, 1, n, n - 1)
        row = {
            "n": n,
            "residue": th.residue,
            "threshold": th.value,
            "construction": name,
            "formula_delta1": formula,
            "formula_ok": formula == th.value,
            "measured_delta1": None,
            "measured_ok": None,
            "no_perfect_matching": None,
        }
        if n <= build_max:
            H = build_Hstar(n, n - 1) if name == "Hstar" else build_Hk(n, n - 1)
            row["measured_delta1"] = min_l_degree(H, 1)
            row["measured_ok"] = row["measured_delta1"] == th.value
            if n <= oracle_max:
                res = has_perfect_matching(H, SearchBudget(node_limit=node_limit))
                row["no_perfect_matching"] = {PMStatus.NO: True, PMStatus.YES: False}.get(res.status)
        row["pass"] = all(row[key] is not False for key in ("formula_ok", "measured_ok", "no_perfect_matching")) and (
            n > oracle_max or row["no_perfect_matching"] is True
        )
        rows.append(row)
    return {"version": 1, "n_max": n_max, "all_pass": all(r["pass"] for r in rows), "rows": rows}

"""Command-line entry point ``hypermatch``."""

from __future__ import annotations

import argparse
import json
import sys

from . import io as hio
from .absorption import AbsorptionConfig, AbsorptionFailure, sample_absorbing_family
from .constructions import (
    ExtremalTemplate,
    build_counterexample6,
    build_H,
    build_Hk,
    build_Hprime,
    build_Hstar,
)
from .experiments import sweep_to_csv, threshold_sweep, verify_thresholds
from .matching import SearchBudget, augment_to_fixpoint, greedy_matching, max_matching_exact
from .solver import SolverConfig, solve_perfect_matching
from .structure import classify_good_vertices, closeness, matching_graph


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_gen(args) -> None:
    fam = args.family
    if fam == "counterexample6":
        H = build_counterexample6()
    elif args.n is None:
        raise ValueError(f"--n is required for family {fam}")
    elif fam == "H":
        if args.profile is None:
            raise ValueError("family H needs --profile")
        H = build_H(args.n, args.profile)
    elif fam == "Hk":
        H = build_Hk(args.n, _need(args.m, "m"))
    elif fam == "Hstar":
        H = build_Hstar(args.n, _need(args.m, "m"))
    else:
        if args.profile is None or len(args.profile) != 3:
            raise ValueError("family Hprime needs --profile d1,d2,d3")
        H = build_Hprime(args.n, *args.profile)
    _emit(hio.dumps(H), args.output)


def _need(value, name):
    if value is None:
        raise ValueError(f"--{name} is required")
    return value


def cmd_solve(args) -> None:
    H = hio.read_hypergraph(args.file)
    if args.mode == "auto":
        cfg = SolverConfig(seed=args.seed, exact_nodes=args.node_limit)
        out = solve_perfect_matching(H, cfg).to_dict()
    else:
        if args.mode == "exact":
            res = max_matching_exact(H, SearchBudget(node_limit=args.node_limit))
            M, optimal = res.matching, res.optimal
        else:
            M = greedy_matching(H, args.seed)
            if args.mode == "local":
                M = augment_to_fixpoint(H, M)
            optimal = False
        perfect = H.has_equal_classes and M.is_perfect_for(H)
        if perfect:
            status = "perfect"
        elif optimal:
            status = "no_perfect"
        else:
            status = "incomplete"
        out = {"status": status, "matching_size": len(M), "matching": M.to_list(), "optimal": bool(optimal or perfect)}
    _emit(_json(out), args.output)


def _template(text: str, n: int) -> ExtremalTemplate:
    name, _, prof = text.partition(":")
    profile = _ints(prof)
    if name == "Hprime":
        return ExtremalTemplate.hprime(n, profile)
    if name == "H":
        return ExtremalTemplate(len(profile), n, tuple(profile))
    raise ValueError(f"unknown template {name!r}; use Hprime:d1,d2,d3 or H:d1,...")


def cmd_analyze(args) -> None:
    H = hio.read_hypergraph(args.file)
    T = _template(args.template, H.n)
    rep = closeness(H, T)
    good = classify_good_vertices(H, T, args.alpha)
    out = {"closeness": rep.to_dict(), "goodness": good.to_dict()}
    if args.epsilon is not None:
        out["closeness"]["within_epsilon"] = rep.epsilon <= args.epsilon
    _emit(_json(out), args.output)


def cmd_mgraph(args) -> None:
    H = hio.read_hypergraph(args.file)
    M = hio.read_matching(args.matching, H.k)
    G = matching_graph(H, M, args.s)
    lines = ["a1,a2,a3,count"]
    for t in sorted(G.histogram):
        lines.append(f"{t.a1},{t.a2},{t.a3},{G.histogram[t]}")
    _emit("\n".join(lines) + "\n", args.output)


def cmd_absorb(args) -> None:
    H = hio.read_hypergraph(args.file)
    cfg = AbsorptionConfig(gamma=args.gamma, seed=args.seed, strict=args.strict)
    try:
        out = {"ok": True, **sample_absorbing_family(H, cfg).to_dict()}
    except AbsorptionFailure as exc:
        out = {"ok": False, "error": str(exc), "best": exc.best.to_dict() if exc.best else None}
    _emit(_json(out), args.output)


def cmd_sweep(args) -> None:
    rows = threshold_sweep(args.n, args.trials, args.grid, args.seed)
    _emit(sweep_to_csv(rows), args.out)


def cmd_verify(args) -> None:
    _emit(_json(verify_thresholds(args.n_max)), args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypermatch", description="Matchings in k-partite k-graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated hypergraph")
    g.add_argument("--family", required=True, choices=["H", "Hk", "Hstar", "Hprime", "counterexample6"])
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--profile", type=_ints)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="find a large or perfect matching")
    s.add_argument("file")
    s.add_argument("--mode", choices=["exact", "greedy", "local", "auto"], default="auto")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--node-limit", type=int, default=10_000_000)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("analyze", help="closeness and good/bad vertices against a template")
    a.add_argument("file")
    a.add_argument("--template", required=True)
    a.add_argument("--alpha", type=float, default=0.0)
    a.add_argument("--epsilon", type=float)
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_analyze)

    m = sub.add_parser("mgraph", help="pair-type histogram of a matching")
    m.add_argument("file")
    m.add_argument("--matching", required=True)
    m.add_argument("--s", type=_ints, required=True)
    m.add_argument("-o", "--output")
    m.set_defaults(func=cmd_mgraph)

    b = sub.add_parser("absorb", help="sample a family of absorbing sets")
    b.add_argument("file")
    b.add_argument("--gamma", type=float, default=0.1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--strict", action="store_true")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_absorb)

    w = sub.add_parser("sweep", help="perfect-matching frequency by minimum degree")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--trials", type=int, required=True)
    w.add_argument("--grid", type=_ints, required=True)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--out")
    w.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify-thresholds", help="tightness battery for the threshold formula")
    v.add_argument("--n-max", type=int, required=True)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"hypermatch: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Plain-text hypergraph format, version 1.

::

    k=3 n=2,2,2
    e 0 0 0
    e 1 1 0

Edges are class-local and 0-based. ``#`` starts a comment. Files are UTF-8
with LF line endings.
"""

from __future__ import annotations

import json
import os
from collections.abc import Iterable

from .hypergraph import KPartiteHypergraph, Matching, build_hypergraph

__all__ = ["dumps", "loads", "read_hypergraph", "write_hypergraph", "read_matching"]


class FormatError(ValueError):
    pass


def dumps(H: KPartiteHypergraph) -> str:
    lines = [f"k={H.k} n={','.join(str(n) for n in H.class_sizes)}"]
    lines.extend("e " + " ".join(str(x) for x in e) for e in H.edge_list)
    return "\n".join(lines) + "\n"


def _content_lines(text: str) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_header(line: str, lineno: int) -> tuple[int, list[int]]:
    fields = dict(part.split("=", 1) for part in line.split() if "=" in part)
    if set(fields) != {"k", "n"} or len(line.split()) != 2:
        raise FormatError(f"line {lineno}: expected header 'k=<k> n=<n_1,...,n_k>', got {line!r}")
    try:
        k = int(fields["k"])
        sizes = [int(x) for x in fields["n"].split(",")]
    except ValueError:
        raise FormatError(f"line {lineno}: malformed header {line!r}") from None
    return k, sizes


def loads(text: str) -> KPartiteHypergraph:
    lines = iter(_content_lines(text))
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise FormatError("empty input: missing header") from None
    k, sizes = _parse_header(header, lineno)
    edges = []
    for lineno, line in lines:
        tok = line.split()
        if tok[0] != "e":
            raise FormatError(f"line {lineno}: expected edge line starting with 'e', got {line!r}")
        try:
            edges.append(tuple(int(x) for x in tok[1:]))
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer index in {line!r}") from None
    try:
        return build_hypergraph(k, sizes, edges)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_hypergraph(path: str | os.PathLike) -> KPartiteHypergraph:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def write_hypergraph(H: KPartiteHypergraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(H))


def read_matching(path: str | os.PathLike, k: int) -> Matching:
    """Read a matching file.

    Accepts either the JSON written by ``hypermatch solve`` (a ``matching``
    list of edges) or edge lines ``e i_1 ... i_k`` with an optional v1 header.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        data = json.loads(text)
        edges = data["matching"] if isinstance(data, dict) else data
        return Matching([tuple(e) for e in edges], k)
    edges = []
    for lineno, line in _content_lines(text):
        tok = line.split()
        if tok[0].startswith("k="):
            continue
        if tok[0] != "e":
            raise FormatError(f"line {lineno}: expected edge line, got {line!r}")
        edges.append(tuple(int(x) for x in tok[1:]))
    return Matching(edges, k)

"""Reading and writing the text artifacts (CSV, edge lists, JSON documents)."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import COVARIANCE, CliqueTree, DataMatrix, FilteredGraph, WeightMatrix, default_names
from .errors import InvalidInputError
from .logo import SparsePrecision


def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any float64."""
    return format(float(x), ".17g")


def read_csv(path, header: bool = False) -> tuple[np.ndarray, tuple[str, ...]]:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
    except OSError as exc:
        raise InvalidInputError(f"{path}: cannot read ({exc.strerror})") from exc
    if not rows:
        raise InvalidInputError(f"{path}: file is empty")
    names = None
    if header:
        names = tuple(c.strip() for c in rows[0])
        rows = rows[1:]
    width = len(names) if names else len(rows[0]) if rows else 0
    values = np.empty((len(rows), width))
    line0 = 2 if header else 1
    for r, row in enumerate(rows):
        if len(row) != width:
            raise InvalidInputError(f"{path}: line {r + line0} has {len(row)} fields, expected {width}")
        for c, cell in enumerate(row):
            try:
                val = float(cell)
            except ValueError:
                raise InvalidInputError(
                    f"{path}: line {r + line0}, column {names[c] if names else c + 1}: "
                    f"{cell.strip()!r} is not a number") from None
            if not math.isfinite(val):
                raise InvalidInputError(
                    f"{path}: line {r + line0}, column {names[c] if names else c + 1}: non-finite value")
            values[r, c] = val
    return values, names or default_names(width)


def read_data(path, header: bool = False) -> DataMatrix:
    values, names = read_csv(path, header)
    try:
        return DataMatrix(values, names)
    except InvalidInputError as exc:
        raise InvalidInputError(f"{path}: {exc}") from exc


def read_matrix(path, header: bool = False) -> WeightMatrix:
    """A p x p covariance-like matrix (the header, if any, names the variables)."""
    values, names = read_csv(path, header)
    if values.shape[0] != values.shape[1]:
        raise InvalidInputError(f"{path}: matrix body is {values.shape[0]}x{values.shape[1]}, not square")
    return WeightMatrix(values, COVARIANCE, names)


# ---------------------------------------------------------------------------
# Edge lists
# ---------------------------------------------------------------------------

def format_edges(g: FilteredGraph) -> str:
    """``name_i<TAB>name_j<TAB>weight`` lines sorted by (name_i, name_j)."""
    names = g.names
    lines = []
    for (i, j), w in g.edges.items():
        a, b = sorted((names[i], names[j]))
        lines.append((a, b, fmt(w)))
    lines.sort()
    return "".join(f"{a}\t{b}\t{w}\n" for a, b, w in lines)


def parse_edges(text: str, names=None) -> FilteredGraph:
    """Inverse of :func:`format_edges`.

    Without ``names`` the vertex set is every name seen, sorted.
    """
    rows = []
    for ln, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise InvalidInputError(f"edge list line {ln}: expected 3 tab-separated fields")
        try:
            rows.append((parts[0], parts[1], float(parts[2])))
        except ValueError:
            raise InvalidInputError(f"edge list line {ln}: bad weight {parts[2]!r}") from None
    if names is None:
        names = sorted({r[0] for r in rows} | {r[1] for r in rows})
    index = {n: k for k, n in enumerate(names)}
    edges = []
    for ln, (a, b, w) in enumerate(rows, 1):
        for n in (a, b):
            if n not in index:
                raise InvalidInputError(f"edge list line {ln}: unknown vertex {n!r}")
        edges.append((index[a], index[b], w))
    return FilteredGraph(len(names), edges, names)


# ---------------------------------------------------------------------------
# Clique-tree documents
# ---------------------------------------------------------------------------

def tree_to_dict(tree: CliqueTree) -> dict:
    names = tree.names
    return {
        "vertices": list(names),
        "cliques": [[names[v] for v in c] for c in tree.cliques],
        "separators": [{"members": [names[v] for v in s.members], "parent": s.parent, "child": s.child}
                       for s in tree.separators],
    }


def format_tree(tree: CliqueTree) -> str:
    return json.dumps(tree_to_dict(tree), indent=2) + "\n"


def parse_tree(text: str) -> CliqueTree:
    try:
        doc = json.loads(text)
        names = [str(n) for n in doc["vertices"]]
        index = {n: k for k, n in enumerate(names)}
        cliques = [[index[str(n)] for n in c] for c in doc["cliques"]]
        seps = [{"members": [index[str(n)] for n in s["members"]], "parent": s["parent"], "child": s["child"]}
                for s in doc["separators"]]
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"clique-tree document is not valid JSON: {exc}") from exc
    except KeyError as exc:
        raise InvalidInputError(f"clique-tree document: missing field or unknown vertex {exc}") from exc
    except TypeError as exc:
        raise InvalidInputError(f"clique-tree document is malformed: {exc}") from exc
    return CliqueTree(len(names), tuple(tuple(c) for c in cliques), tuple(seps), tuple(names))


# ---------------------------------------------------------------------------
# Precision coordinate files
# ---------------------------------------------------------------------------

def format_precision(j: SparsePrecision) -> str:
    """``name_i<TAB>name_j<TAB>value`` for i <= j, in index order."""
    names = j.names
    return "".join(f"{names[a]}\t{names[b]}\t{fmt(v)}\n" for (a, b), v in sorted(j.entries.items()))


def parse_precision(text: str, names) -> SparsePrecision:
    index = {n: k for k, n in enumerate(names)}
    entries = {}
    for ln, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3 or parts[0] not in index or parts[1] not in index:
            raise InvalidInputError(f"precision file line {ln}: malformed or unknown vertex")
        a, b = sorted((index[parts[0]], index[parts[1]]))
        entries[(a, b)] = float(parts[2])
    support = frozenset(k for k in entries if k[0] != k[1])
    return SparsePrecision(len(names), dict(sorted(entries.items())), support, tuple(names))

"""Undirected simple graphs stored as dense boolean adjacency matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import validate_adjacency, validate_vertex_order


class EdgeListParseError(ValueError):
    """Malformed edge-list text; carries the 1-based offending line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph; ``adj[i, j]`` is True iff edge {i, j} exists."""

    adj: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "adj", validate_adjacency(self.adj))

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.adj)) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as (u, v) pairs with u < v, in lexicographic order."""
        iu, ju = np.nonzero(np.triu(self.adj, k=1))
        return list(zip(iu.tolist(), ju.tolist()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.adj.shape == other.adj.shape and bool(np.array_equal(self.adj, other.adj))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(np.zeros((n, n), dtype=bool))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u, v] = adj[v, u] = True
        return cls(adj)


@dataclass(frozen=True)
class DegreeProfile:
    """Per-vertex degrees plus the distinct degree values in descending order."""

    degrees: tuple[int, ...]
    classes: tuple[int, ...]


def degrees(g: Graph) -> DegreeProfile:
    """Row sums of the adjacency matrix and their distinct values, descending."""
    deg = np.count_nonzero(g.adj, axis=1)
    classes = np.unique(deg)[::-1]
    return DegreeProfile(degrees=tuple(deg.tolist()), classes=tuple(classes.tolist()))


def apply_order(g: Graph, order) -> Graph:
    """Relabel *g* so that new vertex i is old vertex ``order[i]``.

    The result satisfies ``out.adj[i, j] == g.adj[order[i], order[j]]``.
    """
    perm = validate_vertex_order(order, g.n)
    return Graph(g.adj[np.ix_(perm, perm)])


def inverse_order(order) -> np.ndarray:
    """Inverse permutation: ``inverse_order(p)[p[i]] == i``."""
    perm = np.asarray(order, dtype=np.intp)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    return inv


def read_edge_list(text: str) -> Graph:
    """Parse the edge-list format: header ``n <count>``, then ``u v`` lines.

    Lines starting with ``#`` and blank lines are ignored. Duplicate edges
    collapse; self-loops, out-of-range indices and malformed lines raise
    :class:`EdgeListParseError` with the offending line number.
    """
    n = None
    adj = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 2 or fields[0] != "n":
                raise EdgeListParseError(lineno, f"expected header 'n <count>', got {line!r}")
            try:
                n = int(fields[1])
            except ValueError:
                raise EdgeListParseError(lineno, f"vertex count is not an integer: {fields[1]!r}") from None
            if n <= 0:
                raise EdgeListParseError(lineno, f"vertex count must be positive, got {n}")
            adj = np.zeros((n, n), dtype=bool)
            continue
        if len(fields) != 2:
            raise EdgeListParseError(lineno, f"expected 'u v', got {line!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise EdgeListParseError(lineno, f"non-integer vertex in {line!r}") from None
        if u == v:
            raise EdgeListParseError(lineno, f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListParseError(lineno, f"vertex out of range [0, {n}): {line!r}")
        adj[u, v] = adj[v, u] = True
    if n is None:
        raise EdgeListParseError(1, "missing header 'n <count>'")
    return Graph(adj)


def write_edge_list(g: Graph) -> str:
    """Serialize to the edge-list format (UTF-8 friendly, LF line endings)."""
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def load_bundled(name: str = "zachary") -> Graph:
    """Load a network shipped with the package (currently just ``zachary``)."""
    from importlib import resources

    path = resources.files("ambnet").joinpath("data", f"{name}.edges")
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ValueError(f"no bundled network named {name!r}") from None
    return read_edge_list(text)

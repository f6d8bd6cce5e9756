"""Graphs, permutations and the distance primitives built on them.

Conventions used everywhere in the package:

* ``Permutation.images[u]`` is the image of ``u``.
* ``permute(g, pi)`` reads source entries at permuted indices, i.e. the result
  has edge ``(u, v)`` iff ``g`` has edge ``(pi(u), pi(v))``.
* ``compose(outer, inner)(u) == outer(inner(u))``.  With these choices
  ``permute(permute(g, p1), p2) == permute(g, compose(p1, p2))``.
"""

from __future__ import annotations

import os
from typing import Iterable

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "Graph",
    "Permutation",
    "degree",
    "permute",
    "compose",
    "frobenius_sq",
    "parse_edgelist",
    "format_edgelist",
    "read_edgelist",
    "write_edgelist",
    "parse_permutation",
    "format_permutation",
    "read_permutation",
    "write_permutation",
]


class Graph:
    """Undirected simple graph on nodes ``0..n-1`` backed by a dense boolean matrix.

    Instances are immutable: the adjacency array is copied on construction and
    marked read-only.
    """

    __slots__ = ("_adj", "_degrees")

    def __init__(self, adjacency, *, validate: bool = True):
        adj = np.array(adjacency, dtype=bool, copy=True)
        if validate:
            if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
                raise DimensionError(f"adjacency must be square, got shape {adj.shape}")
            if adj.shape[0] < 1:
                raise DomainError("a graph needs at least one node")
            if adj.diagonal().any():
                raise DomainError("self-loops are not allowed")
            if not np.array_equal(adj, adj.T):
                raise DomainError("adjacency must be symmetric")
        adj.setflags(write=False)
        self._adj = adj
        self._degrees = None

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(np.zeros((n, n), dtype=bool), validate=False)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        adj = ~np.eye(n, dtype=bool)
        return cls(adj, validate=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 1:
            raise DomainError("a graph needs at least one node")
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise IndexError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise DomainError(f"self-loop at node {u}")
            adj[u, v] = adj[v, u] = True
        return cls(adj, validate=False)

    @classmethod
    def from_upper(cls, n: int, upper: np.ndarray) -> "Graph":
        """Build from a flat boolean vector over pairs ``u < v`` in lexicographic order."""
        upper = np.asarray(upper, dtype=bool)
        if upper.shape != (n * (n - 1) // 2,):
            raise DimensionError(f"expected {n * (n - 1) // 2} pair indicators, got {upper.shape}")
        adj = np.zeros((n, n), dtype=bool)
        iu = np.triu_indices(n, k=1)
        adj[iu] = upper
        adj |= adj.T
        return cls(adj, validate=False)

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def adjacency(self) -> np.ndarray:
        """Read-only ``n x n`` boolean adjacency matrix."""
        return self._adj

    def as_array(self) -> np.ndarray:
        return self._adj.astype(np.float64)

    def upper(self) -> np.ndarray:
        """Pair indicators for ``u < v`` in lexicographic order."""
        return self._adj[np.triu_indices(self.n, k=1)]

    def edges(self) -> np.ndarray:
        """Edges as a ``(k, 2)`` integer array with ``u < v``, sorted."""
        u, v = np.nonzero(np.triu(self._adj, k=1))
        return np.column_stack([u, v])

    @property
    def num_edges(self) -> int:
        return int(self.degrees().sum()) // 2

    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            d = self._adj.sum(axis=1)
            d.setflags(write=False)
            self._degrees = d
        return self._degrees

    def degree(self, u: int) -> int:
        return degree(self, u)

    def neighbors(self, u: int) -> np.ndarray:
        _check_node(self, u)
        return np.flatnonzero(self._adj[u])

    def complement(self) -> "Graph":
        adj = ~self._adj
        np.fill_diagonal(adj, False)
        return Graph(adj, validate=False)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._adj, other._adj)

    def __hash__(self):
        return hash((self.n, np.packbits(self.upper()).tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges})"


class Permutation:
    """A bijection on ``0..n-1`` stored as its image array."""

    __slots__ = ("_images",)

    def __init__(self, images, *, validate: bool = True):
        arr = np.array(images, dtype=np.int64, copy=True)
        if validate:
            if arr.ndim != 1:
                raise DimensionError("permutation images must be one-dimensional")
            n = arr.shape[0]
            if n and (arr.min() < 0 or arr.max() >= n or np.bincount(arr, minlength=n).max() != 1):
                raise DomainError("images are not a bijection on [0, n)")
        arr.setflags(write=False)
        self._images = arr

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n), validate=False)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(rng.permutation(n), validate=False)

    @property
    def images(self) -> np.ndarray:
        return self._images

    @property
    def n(self) -> int:
        return self._images.shape[0]

    def __len__(self):
        return self.n

    def __call__(self, u: int) -> int:
        return int(self._images[u])

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self._images)
        inv[self._images] = np.arange(self.n)
        return Permutation(inv, validate=False)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self._images, np.arange(self.n)))

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self._images, other._images)

    def __hash__(self):
        return hash(self._images.tobytes())

    def __repr__(self):
        if self.n <= 12:
            return f"Permutation({self._images.tolist()})"
        return f"Permutation(n={self.n})"


def _check_node(g: Graph, u) -> None:
    if not (0 <= u < g.n):
        raise IndexError(f"node {u} out of range for n={g.n}")


def degree(g: Graph, u: int) -> int:
    _check_node(g, u)
    return int(g.degrees()[u])


def permute(g: Graph, pi: Permutation) -> Graph:
    """Relabel ``g`` so that result edge ``(u, v)`` iff ``g`` edge ``(pi(u), pi(v))``."""
    if pi.n != g.n:
        raise DimensionError(f"permutation of length {pi.n} applied to graph with n={g.n}")
    idx = pi.images
    return Graph(g.adjacency[np.ix_(idx, idx)], validate=False)


def compose(outer: Permutation, inner: Permutation) -> Permutation:
    """Return ``u -> outer(inner(u))``."""
    if outer.n != inner.n:
        raise DimensionError(f"cannot compose permutations of lengths {outer.n} and {inner.n}")
    return Permutation(outer.images[inner.images], validate=False)


def _as_matrix(x) -> np.ndarray:
    if hasattr(x, "as_array"):
        return x.as_array()
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def frobenius_sq(a, b) -> float:
    """Normalized squared Frobenius distance ``sum_{u != v} (a_uv - b_uv)^2 / (n (n - 1))``.

    Either argument may be a :class:`Graph`, an average matrix, or a square array.
    """
    x, y = _as_matrix(a), _as_matrix(b)
    if x.shape != y.shape:
        raise DimensionError(f"size mismatch: {x.shape[0]} vs {y.shape[0]}")
    n = x.shape[0]
    if n < 2:
        raise DomainError("frobenius distance needs n >= 2")
    d = x - y
    np.fill_diagonal(d, 0.0)
    return float(np.sum(d * d) / (n * (n - 1)))


# --- text formats -----------------------------------------------------------

def parse_edgelist(text: str) -> Graph:
    """Parse ``n <count>`` followed by ``u v`` lines with ``u < v``."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty edge list")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n":
        raise ValueError(f"first line must be 'n <count>', got {lines[0]!r}")
    n = int(head[1])
    if n < 1:
        raise ValueError(f"node count must be positive, got {n}")
    seen = set()
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if not (0 <= u < v < n):
            raise ValueError(f"line {lineno}: need 0 <= u < v < {n}, got {u} {v}")
        if (u, v) in seen:
            raise ValueError(f"line {lineno}: duplicate edge {u} {v}")
        seen.add((u, v))
    return Graph.from_edges(n, seen)


def format_edgelist(g: Graph) -> str:
    out = [f"n {g.n}"]
    out.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(out) + "\n"


def read_edgelist(path: str | os.PathLike) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edgelist(fh.read())


def write_edgelist(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edgelist(g))


def parse_permutation(text: str) -> Permutation:
    tokens = text.split()
    if not tokens:
        raise ValueError("empty permutation")
    return Permutation([int(t) for t in tokens])


def format_permutation(pi: Permutation) -> str:
    return " ".join(str(int(x)) for x in pi.images) + "\n"


def read_permutation(path: str | os.PathLike) -> Permutation:
    with open(path, encoding="utf-8") as fh:
        return parse_permutation(fh.read())


def write_permutation(pi: Permutation, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_permutation(pi))

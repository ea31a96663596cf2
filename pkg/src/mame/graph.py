"""Prior-knowledge graph over explained instances and its incidence matrix.

Edges declare pairs whose explanations should fuse as the path regularization
grows. The default construction chains instances by sorted black-box
prediction; explicit side information comes in as a CSV edge list.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ParseError


@dataclass(frozen=True)
class PriorGraph:
    """Weighted undirected edges (i < j, w > 0) over n instances."""

    n: int
    edge_i: np.ndarray
    edge_j: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        ei = np.asarray(self.edge_i, dtype=np.int64)
        ej = np.asarray(self.edge_j, dtype=np.int64)
        w = np.asarray(self.weights, dtype=float)
        if not (ei.shape == ej.shape == w.shape):
            raise ValueError("edge arrays must have equal length")
        if np.any(ei == ej):
            raise ValueError("self-loops are not allowed")
        if np.any(ei > ej):
            raise ValueError("edges must be canonicalized with i < j")
        if np.any((ei < 0) | (ej >= self.n)):
            raise ValueError("edge endpoint out of range")
        if np.any(w <= 0):
            raise ValueError("edge weights must be positive")
        pairs = set(zip(ei.tolist(), ej.tolist()))
        if len(pairs) != ei.size:
            raise ValueError("duplicate edges are not allowed")
        object.__setattr__(self, "edge_i", ei)
        object.__setattr__(self, "edge_j", ej)
        object.__setattr__(self, "weights", w)

    @property
    def num_edges(self) -> int:
        return self.edge_i.size

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [
            (int(i), int(j), float(w))
            for i, j, w in zip(self.edge_i, self.edge_j, self.weights)
        ]

    def component_count(self) -> int:
        adj = sp.coo_matrix(
            (np.ones(self.num_edges), (self.edge_i, self.edge_j)),
            shape=(self.n, self.n),
        )
        count, _ = sp.csgraph.connected_components(adj, directed=False)
        return int(count)


@dataclass(frozen=True)
class Incidence:
    """Sparse n x |E| matrix; column l of edge (i, j) holds +1 at i, -1 at j."""

    n: int
    edge_i: np.ndarray
    edge_j: np.ndarray
    D: sp.csc_matrix

    @property
    def num_edges(self) -> int:
        return self.edge_i.size

    def apply(self, Theta: np.ndarray) -> np.ndarray:
        """Theta D: column l equals theta_i - theta_j."""
        return Theta[:, self.edge_i] - Theta[:, self.edge_j]

    def apply_transpose(self, M: np.ndarray) -> np.ndarray:
        """M D^T: scatter edge columns back onto node columns."""
        return (self.D @ M.T).T


def prediction_chain_graph(f_train: np.ndarray) -> PriorGraph:
    """Unit-weight chain linking instances adjacent in sorted prediction order.

    Ties are broken by index, giving a deterministic path with n-1 edges.
    """
    f_train = np.asarray(f_train, dtype=float)
    n = f_train.shape[0]
    if n < 2:
        raise ValueError("need at least 2 instances")
    order = np.argsort(f_train, kind="stable")
    ei = np.minimum(order[:-1], order[1:])
    ej = np.maximum(order[:-1], order[1:])
    return PriorGraph(n=n, edge_i=ei, edge_j=ej, weights=np.ones(n - 1))


def side_info_graph(edges, n: int) -> PriorGraph:
    """Build a graph from user-declared (i, j, w) triples.

    Pairs are canonicalized to i < j; duplicates are an error rather than
    silently merged. Disconnected graphs are allowed but warned about, since
    the resulting structure is a forest rather than a single tree.
    """
    canon: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    for i, j, w in edges:
        i, j, w = int(i), int(j), float(w)
        if i == j:
            raise ValueError(f"self-loop ({i}, {j})")
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
        if w <= 0:
            raise ValueError(f"edge ({i}, {j}) has non-positive weight {w}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ValueError(f"duplicate edge {key}")
        seen.add(key)
        canon.append((key[0], key[1], w))
    if not canon:
        raise ValueError("edge list is empty")
    ei, ej, w = (np.array(col) for col in zip(*canon))
    g = PriorGraph(n=n, edge_i=ei, edge_j=ej, weights=w)
    if g.component_count() > 1:
        warnings.warn(
            "prior graph is disconnected; the explanation structure will be "
            "a forest with multiple roots",
            stacklevel=2,
        )
    return g


def load_side_info(path: str, n: int) -> PriorGraph:
    """Read a 3-column CSV `i,j,w` of zero-based training-partition indices."""
    edges = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(
                    f"{path} line {reader.line_num}: expected 3 cells, got {len(row)}"
                )
            try:
                edges.append((int(row[0]), int(row[1]), float(row[2])))
            except ValueError as exc:
                raise ParseError(
                    f"{path} line {reader.line_num}: {exc}"
                ) from exc
    if not edges:
        raise ParseError(f"{path}: no edges")
    try:
        return side_info_graph(edges, n)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def incidence(g: PriorGraph) -> Incidence:
    """Build the signed incidence matrix D for the graph's edge list."""
    m = g.num_edges
    if m < 1:
        raise ValueError("prior graph has no edges; the path would never fuse")
    rows = np.concatenate([g.edge_i, g.edge_j])
    cols = np.concatenate([np.arange(m), np.arange(m)])
    vals = np.concatenate([np.ones(m), -np.ones(m)])
    D = sp.csc_matrix((vals, (rows, cols)), shape=(g.n, m))
    return Incidence(n=g.n, edge_i=g.edge_i.copy(), edge_j=g.edge_j.copy(), D=D)

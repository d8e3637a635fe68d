"""Undirected-graph storage and basic structural primitives.

Graphs are immutable CSR structures; every operation here is a pure
function of its inputs and safe for concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels


class Graph:
    """Simple undirected graph with contiguous node ids 0..n-1.

    Construction guarantees: no self-loops, no parallel edges, sorted
    adjacency rows.  ``orig_ids[v]`` maps an internal id back to the id
    it carried in the input (identity for generated graphs).
    """

    __slots__ = ("indptr", "indices", "edge_ids", "orig_ids", "_id_map")

    def __init__(self, indptr, indices, edge_ids, orig_ids):
        self.indptr = indptr
        self.indices = indices
        self.edge_ids = edge_ids
        self.orig_ids = orig_ids
        self._id_map = None

    @classmethod
    def from_edges(cls, n: int, edges: np.ndarray, orig_ids=None) -> "Graph":
        """Build from a deduplicated (m, 2) array of edges with u != v."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        m = edges.shape[0]
        both = np.concatenate([edges, edges[:, ::-1]], axis=0)
        eids = np.concatenate([np.arange(m), np.arange(m)]).astype(np.int64)
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        eids = eids[order]
        counts = np.bincount(both[:, 0], minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        if orig_ids is None:
            orig_ids = np.arange(n, dtype=np.int64)
        return cls(indptr, both[:, 1].copy(), eids, np.asarray(orig_ids, dtype=np.int64))

    @property
    def node_count(self) -> int:
        return self.indptr.shape[0] - 1

    @property
    def edge_count(self) -> int:
        return self.indices.shape[0] // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, i: int) -> int:
        if not 0 <= i < self.node_count:
            raise ValueError(f"node {i} out of range")
        return int(self.indptr[i + 1] - self.indptr[i])

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted neighbor ids of node i (a view, do not mutate)."""
        if not 0 <= i < self.node_count:
            raise ValueError(f"node {i} out of range")
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        row = self.neighbors(i)
        pos = np.searchsorted(row, j)
        return pos < row.shape[0] and row[pos] == j

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges with u < v, sorted lexicographically."""
        u = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
        mask = u < self.indices
        return np.column_stack([u[mask], self.indices[mask]])

    def id_map(self) -> dict:
        """Original id -> internal id."""
        if self._id_map is None:
            self._id_map = {int(o): i for i, o in enumerate(self.orig_ids)}
        return self._id_map

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"


def build_graph(edges: Iterable[Sequence[int]]) -> Graph:
    """Build a graph from raw unordered id pairs.

    Duplicate edges and self-loops are silently dropped; sparse ids are
    compacted to 0..n-1 (ascending by original id) with the original ids
    retained in ``orig_ids``.
    """
    arr = np.asarray(list(edges), dtype=np.int64)
    if arr.size == 0:
        raise ValueError("empty graph")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be pairs of node ids")
    if (arr < 0).any():
        raise ValueError("node ids must be nonnegative")
    uniq = np.unique(arr)
    compact = np.searchsorted(uniq, arr)
    keep = compact[:, 0] != compact[:, 1]
    pairs = np.sort(compact[keep], axis=1)
    if pairs.shape[0]:
        pairs = np.unique(pairs, axis=0)
    return Graph.from_edges(uniq.shape[0], pairs, orig_ids=uniq)


@dataclass
class NeighborhoodView:
    """The induced subgraph on N(actor), with the actor itself excluded.

    ``members`` are parent ids in ascending order; ``local_edges`` holds
    local-index pairs (u < v) of the parent edges with both endpoints in
    the neighborhood.
    """

    actor: int
    members: np.ndarray
    local_edges: np.ndarray
    index_of: dict = field(repr=False)

    @property
    def size(self) -> int:
        return self.members.shape[0]

    def local(self, parent_id: int) -> int:
        return self.index_of[parent_id]

    def edge_count(self) -> int:
        return self.local_edges.shape[0]

    def as_csr(self):
        """(indptr, indices, edge_ids) of the induced subgraph."""
        n = self.size
        if self.local_edges.shape[0] == 0:
            return (
                np.zeros(n + 1, dtype=np.int64),
                np.zeros(0, dtype=np.int64),
                np.zeros(0, dtype=np.int64),
            )
        g = Graph.from_edges(n, self.local_edges)
        return g.indptr, g.indices, g.edge_ids


def neighborhood_view(g: Graph, i: int) -> NeighborhoodView:
    """Induced subgraph on the neighbors of i (excluding i)."""
    members = g.neighbors(i).copy()
    index_of = {int(v): k for k, v in enumerate(members)}
    mark = np.zeros(g.node_count, dtype=bool)
    mark[members] = True
    edges = []
    for k, v in enumerate(members):
        for w in g.neighbors(int(v)):
            w = int(w)
            if w > v and mark[w]:
                edges.append((k, index_of[w]))
    local_edges = (
        np.asarray(edges, dtype=np.int64)
        if edges
        else np.zeros((0, 2), dtype=np.int64)
    )
    return NeighborhoodView(actor=i, members=members, local_edges=local_edges, index_of=index_of)


def local_clustering(g: Graph, i: int) -> float:
    """Fraction of realized edges among i's neighbors; 0 when degree < 2."""
    k = g.degree(i)
    if k < 2:
        return 0.0
    nbrs = g.neighbors(i)
    mark = np.zeros(g.node_count, dtype=bool)
    mark[nbrs] = True
    cnt = 0
    for v in nbrs:
        cnt += int(mark[g.neighbors(int(v))].sum())
    return (cnt // 2) / (k * (k - 1) / 2)


def embeddedness(g: Graph, i: int, j: int) -> int:
    """Number of mutual neighbors of i and j (edge ij need not exist)."""
    if i == j:
        raise ValueError("embeddedness requires two distinct nodes")
    return int(
        np.intersect1d(g.neighbors(i), g.neighbors(j), assume_unique=True).shape[0]
    )


def node_embeddedness(g: Graph, i: int) -> float:
    """Average embeddedness of i's edges; equals (k_i - 1) * c_i exactly."""
    k = g.degree(i)
    if k == 0:
        return 0.0
    total = sum(embeddedness(g, i, int(j)) for j in g.neighbors(i))
    return total / k


def reachable_set(obj, start: int, active_edges) -> set:
    """Nodes connected to ``start`` using only the given active edges.

    ``obj`` may be a Graph (ids are node ids) or a NeighborhoodView (ids
    are parent ids of members).  ``active_edges`` is an iterable of id
    pairs; the start node is always included.
    """
    if isinstance(obj, NeighborhoodView):
        if start not in obj.index_of:
            raise ValueError(f"start node {start} is not a member of the view")
    elif isinstance(obj, Graph):
        if not 0 <= start < obj.node_count:
            raise ValueError(f"start node {start} out of range")
    adj: dict = {}
    for u, v in active_edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


@dataclass(frozen=True)
class PathLength:
    """Mean shortest path summary."""

    value: float
    stderr: float
    exact: bool
    lcc_only: bool


FULL_BFS_LIMIT = 2000
SAMPLED_SOURCES = 1000


def mean_shortest_path(g: Graph, sample_sources: int | None = None, seed: int = 0) -> PathLength:
    """Average BFS distance over unordered reachable node pairs.

    Exact all-sources when the (largest-component) node count is at most
    2000, otherwise estimated from sampled sources with a standard error.
    Disconnected graphs are measured on the largest component and flagged.
    """
    if g.node_count < 2:
        raise ValueError("mean path length needs at least 2 nodes")
    labels = _kernels.component_labels(g.indptr, g.indices)
    lcc_only = False
    if labels.max() > 0:
        lcc_only = True
        g = largest_component(g)
        if g.node_count < 2:
            raise ValueError("largest component has fewer than 2 nodes")
    n = g.node_count
    if sample_sources is None:
        sample_sources = 0 if n <= FULL_BFS_LIMIT else SAMPLED_SOURCES
    if sample_sources and sample_sources < n:
        rng = np.random.default_rng(seed)
        sources = rng.choice(n, size=sample_sources, replace=False).astype(np.int64)
        sums, cnts = _kernels.source_distance_sums(g.indptr, g.indices, sources)
        means = sums / np.maximum(cnts, 1)
        value = float(means.mean())
        stderr = float(means.std(ddof=1) / np.sqrt(means.shape[0]))
        return PathLength(value, stderr, exact=False, lcc_only=lcc_only)
    sources = np.arange(n, dtype=np.int64)
    sums, cnts = _kernels.source_distance_sums(g.indptr, g.indices, sources)
    value = float(sums.sum() / cnts.sum())
    return PathLength(value, 0.0, exact=True, lcc_only=lcc_only)


def induced_subgraph(g: Graph, nodes: np.ndarray) -> Graph:
    """Induced subgraph on the given nodes, original ids carried through."""
    nodes = np.sort(np.asarray(nodes, dtype=np.int64))
    inv = np.full(g.node_count, -1, dtype=np.int64)
    inv[nodes] = np.arange(nodes.shape[0])
    edges = g.edges()
    keep = (inv[edges[:, 0]] >= 0) & (inv[edges[:, 1]] >= 0)
    sub = inv[edges[keep]]
    return Graph.from_edges(nodes.shape[0], sub, orig_ids=g.orig_ids[nodes])


def largest_component(g: Graph) -> Graph:
    """Induced subgraph on the largest connected component.

    Size ties go to the component containing the smallest node id.
    """
    labels = _kernels.component_labels(g.indptr, g.indices)
    sizes = np.bincount(labels)
    best = int(np.argmax(sizes))  # labels start at node 0, so first max wins
    return induced_subgraph(g, np.nonzero(labels == best)[0])

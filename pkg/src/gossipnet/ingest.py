"""Edge-list I/O, community detection, and subsampling.

The file format is the plain-text convention used by large public graph
corpora: whitespace-separated integer id pairs, '#' comment lines,
UTF-8.  Written files carry a provenance header (source, seed, N, k).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, build_graph, induced_subgraph, largest_component


def parse_edge_list(source, max_edges: int | None = None) -> Graph:
    """Parse a whitespace-delimited edge list into a graph.

    ``source`` is a path or a text stream.  Lines starting with '#' and
    blank lines are skipped; every other line must hold exactly two
    nonnegative integers.  ``max_edges`` caps the number of accepted
    edge lines in file order (duplicates and self-loops still count
    toward the cap, then get dropped).
    """
    if isinstance(source, (str, Path)):
        fh = open(source, "r", encoding="utf-8")
        close = True
    else:
        fh = source
        close = False
    pairs = []
    try:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected two node ids, got {s!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"line {lineno}: expected two node ids, got {s!r}") from None
            if u < 0 or v < 0:
                raise ValueError(f"line {lineno}: node ids must be nonnegative")
            pairs.append((u, v))
            if max_edges is not None and len(pairs) >= max_edges:
                break
    finally:
        if close:
            fh.close()
    if not pairs:
        raise ValueError("zero edges after parse")
    g = build_graph(pairs)
    if g.edge_count == 0:
        raise ValueError("zero edges after parse")
    return g


def write_edge_list(g: Graph, target, header: dict | None = None) -> None:
    """Write a graph as an edge list with original ids and a provenance header.

    ``header`` entries are emitted as '# key: value' comment lines.
    """
    if isinstance(target, (str, Path)):
        fh = open(target, "w", encoding="utf-8")
        close = True
    else:
        fh = target
        close = False
    try:
        meta = {"nodes": g.node_count, "edges": g.edge_count}
        if header:
            meta.update(header)
        for key, value in meta.items():
            fh.write(f"# {key}: {value}\n")
        orig = g.orig_ids
        for u, v in g.edges():
            fh.write(f"{orig[u]} {orig[v]}\n")
    finally:
        if close:
            fh.close()


def edge_list_text(g: Graph, header: dict | None = None) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf, header)
    return buf.getvalue()


@dataclass
class CommunityLabeling:
    """A partition of the nodes into communities.

    Labels are canonical: communities are numbered by their smallest
    member node id, so the labeling is stable under relabeling of the
    raw propagation labels.
    """

    labels: np.ndarray
    converged: bool
    iterations: int

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels)

    @property
    def count(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0


def label_propagation(g: Graph, seed: int = 0, max_iters: int = 100) -> CommunityLabeling:
    """Asynchronous label propagation with seeded random sweep order.

    Every node starts with its own label; each sweep visits the nodes in
    a fresh seeded random order and adopts the most common label among
    the node's neighbors (uniform seeded tie-break).  Stops at a sweep
    with no changes or after max_iters (flagged as non-converged).
    """
    rng = np.random.default_rng(seed)
    n = g.node_count
    labels = np.arange(n, dtype=np.int64)
    converged = False
    iterations = 0
    for _ in range(max_iters):
        iterations += 1
        changed = False
        for u in rng.permutation(n):
            nbrs = g.neighbors(int(u))
            if nbrs.shape[0] == 0:
                continue
            counts = np.bincount(labels[nbrs])
            best = np.nonzero(counts == counts.max())[0]
            pick = int(best[rng.integers(best.shape[0])]) if best.shape[0] > 1 else int(best[0])
            if pick != labels[u]:
                labels[u] = pick
                changed = True
        if not changed:
            converged = True
            break
    # canonicalize: number communities by smallest member id
    order = {}
    canon = np.empty(n, dtype=np.int64)
    for u in range(n):
        lab = int(labels[u])
        if lab not in order:
            order[lab] = len(order)
        canon[u] = order[lab]
    return CommunityLabeling(labels=canon, converged=converged, iterations=iterations)


def subsample(g: Graph, n_target: int, k_target: float, seed: int = 0) -> Graph:
    """Cut a community of roughly the requested size and mean degree.

    Pipeline: detect communities, keep the one with size closest to
    ``n_target`` (ties to the smaller community id), remove uniformly
    random edges while that strictly improves |mean degree - k_target|,
    then return the largest connected component.
    """
    if g.node_count == 0:
        raise ValueError("empty graph")
    labeling = label_propagation(g, seed=seed)
    sizes = labeling.sizes
    if int(sizes.max()) < 2:
        raise ValueError("no community of size >= 2")
    gap = np.abs(sizes - n_target)
    gap[sizes < 2] = np.iinfo(np.int64).max
    comm = int(np.argmin(gap))  # ties resolve to the smaller community id
    sub = induced_subgraph(g, np.nonzero(labeling.labels == comm)[0])
    rng = np.random.default_rng(seed)
    edges = sub.edges()
    order = rng.permutation(edges.shape[0])
    n = sub.node_count
    m = edges.shape[0]
    removed = np.zeros(m, dtype=bool)
    for e in order:
        if abs(2.0 * (m - 1) / n - k_target) < abs(2.0 * m / n - k_target):
            removed[e] = True
            m -= 1
        else:
            break
    if removed.any():
        sub = Graph.from_edges(n, edges[~removed], orig_ids=sub.orig_ids)
    return largest_component(sub)

"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's kernel paths: they
enumerate edge subsets with itertools and walk components with plain
set-based BFS, so they can vouch for the production engines.
"""

from __future__ import annotations

import importlib.util
import itertools
import os
import sys
from pathlib import Path

import numpy as np
import pytest

from gossipnet import Graph, build_graph


def complete_graph(n: int) -> Graph:
    return build_graph([(a, b) for a in range(n) for b in range(a + 1, n)])


def path_graph(n: int) -> Graph:
    return build_graph([(i, i + 1) for i in range(n - 1)])


def ring_graph(n: int) -> Graph:
    return build_graph([(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return build_graph([(0, i) for i in range(1, leaves + 1)])


def bfs_reach(n_nodes: int, edges, start: int) -> set:
    """Set-based BFS, independent of the library's kernels."""
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    seen = {start}
    todo = [start]
    while todo:
        u = todo.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def brute_audience(edges, n_nodes: int, src: int, p: float) -> float:
    """Expected reached count (excluding src) over all 2^E edge subsets."""
    edges = list(edges)
    e = len(edges)
    total = 0.0
    for bits in itertools.product((False, True), repeat=e):
        subset = [edge for edge, keep in zip(edges, bits) if keep]
        c = sum(bits)
        weight = p**c * (1.0 - p) ** (e - c)
        total += weight * (len(bfs_reach(n_nodes, subset, src)) - 1)
    return total


def brute_connected_probability(n: int, x: float) -> float:
    """P[G(n, x) connected] by enumerating all edge subsets of K_n."""
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    total = 0.0
    for bits in itertools.product((False, True), repeat=len(pairs)):
        subset = [e for e, keep in zip(pairs, bits) if keep]
        c = sum(bits)
        weight = x**c * (1.0 - x) ** (len(pairs) - c)
        if len(bfs_reach(n, subset, 0)) == n:
            total += weight
    return total


def brute_pair_probability(n: int, x: float) -> float:
    """P[nodes 0 and 1 of G(n, x) connected] by subset enumeration."""
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    total = 0.0
    for bits in itertools.product((False, True), repeat=len(pairs)):
        subset = [e for e, keep in zip(pairs, bits) if keep]
        c = sum(bits)
        weight = x**c * (1.0 - x) ** (len(pairs) - c)
        if 1 in bfs_reach(n, subset, 0):
            total += weight
    return total


def random_neighborhood(rng, k: int, edge_prob: float):
    """Random actor fixture: a graph where node 0 has degree k.

    Returns (graph, actor=0, neighbors 1..k); edges among the neighbors
    appear independently with edge_prob.
    """
    edges = [(0, v) for v in range(1, k + 1)]
    for a in range(1, k + 1):
        for b in range(a + 1, k + 1):
            if rng.random() < edge_prob:
                edges.append((a, b))
    return build_graph(edges)


@pytest.fixture(scope="session")
def numpy_kernels():
    """The numpy-backend kernels module, loaded fresh with the env flag."""
    path = Path(__file__).resolve().parents[1] / "src" / "gossipnet" / "_kernels.py"
    old = os.environ.get("GOSSIPNET_NO_NUMBA")
    os.environ["GOSSIPNET_NO_NUMBA"] = "1"
    try:
        spec = importlib.util.spec_from_file_location("gossipnet_kernels_numpy", path)
        mod = importlib.util.module_from_spec(spec)
        sys.modules[spec.name] = mod
        spec.loader.exec_module(mod)
    finally:
        if old is None:
            del os.environ["GOSSIPNET_NO_NUMBA"]
        else:
            os.environ["GOSSIPNET_NO_NUMBA"] = old
    assert mod.BACKEND == "numpy"
    return mod

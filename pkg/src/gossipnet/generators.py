"""Seeded network generators.

Growth models (trust-weighted attachment, friend-of-friend, preferential
attachment) start from a complete graph on k+1 nodes and attach each
newcomer with k/2 edges, which makes the final mean degree exactly k.
Erdős–Rényi, Watts–Strogatz and Gaussian-geometric baselines round out
the set.  Every generator is a pure function of its config (seed
included).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import derive_seed
from .graph import Graph

MODELS = ("tba", "fof", "er", "ws", "ba", "gaussian")
WEIGHT_MODES = ("exact", "monte_carlo", "analytic", "embeddedness")

FOF_RETRY_FACTOR = 50  # resample budget per edge, in units of k


@dataclass
class GenConfig:
    """Full parameterization of one network-generation run.

    alpha is the exponent applied to the attachment weight (linear by
    default); trials only matters for weight_mode="monte_carlo".
    """

    model: str
    n: int
    k: int
    p: float = 0.1
    weight_mode: str = "analytic"
    alpha: float = 1.0
    beta: float = 0.1
    sigma: float = 0.1
    trials: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.n < self.k + 1:
            raise ValueError(f"need n >= k+1, got n={self.n}, k={self.k}")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.model in ("tba", "fof", "ba", "ws") and self.k % 2:
            raise ValueError(f"model {self.model!r} needs an even k")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.model == "gaussian" and self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(
                f"unknown weight_mode {self.weight_mode!r}; expected one of {WEIGHT_MODES}"
            )
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.trials < 1:
            raise ValueError("trials must be positive")


def generate(cfg: GenConfig) -> Graph:
    """Run the generator selected by cfg.model."""
    return {
        "tba": gen_tba,
        "fof": gen_fof,
        "er": gen_er,
        "ws": gen_ws,
        "ba": gen_ba,
        "gaussian": gen_gaussian,
    }[cfg.model](cfg)


# ---------------------------------------------------------------------------
# growth skeleton
# ---------------------------------------------------------------------------

class _Growth:
    """Mutable adjacency state shared by the growth models."""

    def __init__(self, k: int):
        n0 = k + 1
        self.adj = [[v for v in range(n0) if v != u] for u in range(n0)]
        self.nbrs = [set(a) for a in self.adj]
        # induced-edge count among each node's neighbors (complete seed
        # graph: every neighbor pair is connected)
        self.tri = [(k * (k - 1)) // 2] * n0
        self.edges = [(u, v) for u in range(n0) for v in range(u + 1, n0)]
        self.endpoints = [u for e in self.edges for u in e]  # for gen_ba

    @classmethod
    def from_graph(cls, g: Graph) -> "_Growth":
        """Adopt an existing graph as the current growth state."""
        state = cls.__new__(cls)
        state.adj = [list(map(int, g.neighbors(v))) for v in range(g.node_count)]
        state.nbrs = [set(a) for a in state.adj]
        state.tri = [0] * g.node_count
        state.edges = [(int(u), int(v)) for u, v in g.edges()]
        state.endpoints = [u for e in state.edges for u in e]
        # an edge (u, v) is induced in N(w) for every common neighbor w
        for u, v in state.edges:
            for w in state.nbrs[u] & state.nbrs[v]:
                state.tri[w] += 1
        return state

    def add_node(self):
        self.adj.append([])
        self.nbrs.append(set())
        self.tri.append(0)

    def add_edge(self, u: int, v: int):
        common = self.nbrs[u] & self.nbrs[v]
        m = len(common)
        self.tri[u] += m
        self.tri[v] += m
        for w in common:
            self.tri[w] += 1
        self.adj[u].append(v)
        self.adj[v].append(u)
        self.nbrs[u].add(v)
        self.nbrs[v].add(u)
        self.edges.append((u, v) if u < v else (v, u))
        self.endpoints.append(u)
        self.endpoints.append(v)

    def embeddedness(self, u: int, v: int) -> int:
        return len(self.nbrs[u] & self.nbrs[v])

    def uniform_non_neighbor(self, j: int, rng) -> int:
        pool = [v for v in range(j) if v != j and v not in self.nbrs[j]]
        return pool[rng.integers(len(pool))]

    def to_graph(self, n: int) -> Graph:
        return Graph.from_edges(n, np.asarray(self.edges, dtype=np.int64))


def _two_hop_candidates(state: _Growth, j: int) -> dict[int, int]:
    """Non-neighbors of j sharing at least one neighbor, with m_ij counts.

    Any further candidate has m_ij = 0 and therefore zero audience on the
    hypothetical edge, so it can only be chosen by the uniform fallback.
    """
    cand: dict[int, int] = {}
    nbrs_j = state.nbrs[j]
    for l in state.adj[j]:
        for i in state.adj[l]:
            if i != j and i not in nbrs_j:
                cand[i] = cand.get(i, 0) + 1
    return cand


def _hypothetical_view(state: _Growth, i: int, j: int):
    """CSR of the induced subgraph on N(i) + {j} if edge ij were added."""
    members = sorted(state.adj[i] + [j])
    index_of = {v: k for k, v in enumerate(members)}
    mset = set(members)
    edges = []
    for u in members:
        ui = index_of[u]
        for w in state.adj[u]:
            if w > u and w in mset:
                edges.append((ui, index_of[w]))
    arr = np.asarray(edges, dtype=np.int64) if edges else np.zeros((0, 2), dtype=np.int64)
    return members, index_of, arr


def _candidate_weights(state: _Growth, j: int, cand_ids, cand_m, cfg: GenConfig, slot: int):
    """Attachment weight (hypothetical audience toward j) per candidate."""
    mode = cfg.weight_mode
    if mode == "embeddedness":
        return np.asarray(cand_m, dtype=float)
    if mode == "analytic":
        k_arr = np.asarray([len(state.adj[i]) + 1 for i in cand_ids], dtype=np.int64)
        e_arr = np.asarray([state.tri[i] for i in cand_ids], dtype=float)
        m_arr = np.asarray(cand_m, dtype=float)
        return _kernels.attachment_weights(k_arr, e_arr, m_arr, cfg.p)
    w = np.empty(len(cand_ids))
    for c, i in enumerate(cand_ids):
        members, index_of, edges = _hypothetical_view(state, i, j)
        ne = edges.shape[0]
        src = index_of[j]
        if mode == "exact" and len(members) <= 8 and ne <= 24:
            eu = edges[:, 0].copy()
            ev = edges[:, 1].copy()
            w[c] = _kernels.exact_audience(eu, ev, len(members), src, cfg.p)
        else:
            # exact mode falls back to sampling on large neighborhoods,
            # mirroring the degree <= 8 enumeration rule
            sub = Graph.from_edges(len(members), edges)
            s, s2 = _kernels.mc_audience(
                sub.indptr,
                sub.indices,
                sub.edge_ids,
                ne,
                src,
                cfg.p,
                cfg.trials,
                derive_seed(cfg.seed, j, slot, i),
            )
            w[c] = s / cfg.trials
    return w


def _weighted_pick(ids, weights, alpha: float, rng) -> int | None:
    w = np.asarray(weights, dtype=float)
    pos = w > 0
    if not pos.any():
        return None
    wa = np.zeros_like(w)
    wa[pos] = w[pos] ** alpha if alpha != 1.0 else w[pos]
    total = wa.sum()
    r = rng.random() * total
    acc = 0.0
    for idx in range(len(ids)):
        acc += wa[idx]
        if r < acc:
            return ids[idx]
    return ids[len(ids) - 1]


def _attachment_choice(state: _Growth, j: int, cfg: GenConfig, rng, slot: int) -> int:
    """One trust-weighted target choice for newcomer j (uniform fallback
    when every candidate weight is zero)."""
    cand = _two_hop_candidates(state, j)
    target = None
    if cand:
        ids = sorted(cand)
        m = [cand[i] for i in ids]
        weights = _candidate_weights(state, j, ids, m, cfg, slot)
        target = _weighted_pick(ids, weights, cfg.alpha, rng)
    if target is None:
        target = state.uniform_non_neighbor(j, rng)
    return target


def gen_tba(cfg: GenConfig) -> Graph:
    """Growth by trust-weighted attachment.

    Each newcomer's first edge goes to a uniform random member; every
    further edge picks a non-neighbor with probability proportional to
    the expected audience (to the power alpha) the candidate would have
    toward the newcomer if the edge existed.  All-zero weights fall back
    to a uniform choice.
    """
    if cfg.model != "tba":
        raise ValueError("cfg.model must be 'tba'")
    rng = np.random.default_rng(cfg.seed)
    state = _Growth(cfg.k)
    half = cfg.k // 2
    for j in range(cfg.k + 1, cfg.n):
        state.add_node()
        first = int(rng.integers(j))
        state.add_edge(j, first)
        for slot in range(1, half):
            state.add_edge(j, _attachment_choice(state, j, cfg, rng, slot))
    return state.to_graph(cfg.n)


def _fof_draw(state: _Growth, j: int, rng) -> int | None:
    """One friend-of-a-friend draw; None when it lands on an invalid node."""
    l = state.adj[j][rng.integers(len(state.adj[j]))]
    i = state.adj[l][rng.integers(len(state.adj[l]))]
    if i == j or i in state.nbrs[j]:
        return None
    return i


def gen_fof(cfg: GenConfig) -> Graph:
    """Growth by friend-of-friend attachment.

    Non-first edges pick a uniform random neighbor of a uniform random
    neighbor, resampling on collisions; an exhausted retry budget falls
    back to a uniform random non-neighbor so the edge count stays exact.
    """
    if cfg.model != "fof":
        raise ValueError("cfg.model must be 'fof'")
    rng = np.random.default_rng(cfg.seed)
    state = _Growth(cfg.k)
    half = cfg.k // 2
    max_retries = FOF_RETRY_FACTOR * cfg.k
    for j in range(cfg.k + 1, cfg.n):
        state.add_node()
        first = int(rng.integers(j))
        state.add_edge(j, first)
        for _ in range(1, half):
            target = None
            for _attempt in range(max_retries):
                target = _fof_draw(state, j, rng)
                if target is not None:
                    break
            if target is None:
                target = state.uniform_non_neighbor(j, rng)
            state.add_edge(j, target)
    return state.to_graph(cfg.n)


def gen_ba(cfg: GenConfig) -> Graph:
    """Growth by degree-proportional attachment (k/2 edges per newcomer)."""
    if cfg.model != "ba":
        raise ValueError("cfg.model must be 'ba'")
    rng = np.random.default_rng(cfg.seed)
    state = _Growth(cfg.k)
    half = cfg.k // 2
    max_retries = FOF_RETRY_FACTOR * cfg.k
    for j in range(cfg.k + 1, cfg.n):
        state.add_node()
        for _ in range(half):
            target = None
            for _attempt in range(max_retries):
                cand = state.endpoints[rng.integers(len(state.endpoints))]
                if cand != j and cand not in state.nbrs[j]:
                    target = cand
                    break
            if target is None:
                target = state.uniform_non_neighbor(j, rng)
            state.add_edge(j, target)
    return state.to_graph(cfg.n)


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------

def gen_er(cfg: GenConfig) -> Graph:
    """Erdős–Rényi G(n, p_edge) with p_edge = k/(n-1)."""
    if cfg.model != "er":
        raise ValueError("cfg.model must be 'er'")
    p_edge = cfg.k / (cfg.n - 1)
    if p_edge > 1.0:
        raise ValueError("k too large for an ER graph on n nodes")
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for u in range(cfg.n - 1):
        draws = rng.random(cfg.n - 1 - u)
        hits = np.nonzero(draws < p_edge)[0]
        if hits.shape[0]:
            rows.append(
                np.column_stack([np.full(hits.shape[0], u, dtype=np.int64), u + 1 + hits])
            )
    if not rows:
        raise ValueError("generated graph has no edges; increase k or n")
    return Graph.from_edges(cfg.n, np.concatenate(rows, axis=0))


def gen_ws(cfg: GenConfig) -> Graph:
    """Watts–Strogatz ring lattice of degree k rewired with probability beta."""
    if cfg.model != "ws":
        raise ValueError("cfg.model must be 'ws'")
    if cfg.k >= cfg.n - 1:
        raise ValueError("ws needs k < n-1")
    rng = np.random.default_rng(cfg.seed)
    n, half = cfg.n, cfg.k // 2
    edges = set()
    for d in range(1, half + 1):
        for u in range(n):
            v = (u + d) % n
            edges.add((u, v) if u < v else (v, u))
    for d in range(1, half + 1):
        for u in range(n):
            v = (u + d) % n
            e = (u, v) if u < v else (v, u)
            if e not in edges or rng.random() >= cfg.beta:
                continue
            for _attempt in range(50 * cfg.k):
                w = int(rng.integers(n))
                e2 = (u, w) if u < w else (w, u)
                if w != u and e2 not in edges:
                    edges.remove(e)
                    edges.add(e2)
                    break
    return Graph.from_edges(n, np.asarray(sorted(edges), dtype=np.int64))


def _gaussian_mean_kernel(sigma: float) -> float:
    # E[exp(-d^2 / (2 sigma^2))] for the torus distance of two uniform
    # points; per-axis distances are U[0, 1/2], so the integral separates.
    ax = 2.0 * sigma * math.sqrt(math.pi / 2.0) * math.erf(0.5 / (sigma * math.sqrt(2.0)))
    return ax * ax

def gen_gaussian(cfg: GenConfig) -> Graph:
    """Random geometric graph on the unit torus with a Gaussian kernel.

    Edge probability A exp(-d^2/(2 sigma^2)); the amplitude solves the
    expected-degree equation in closed form, is capped at 1, and gets a
    single multiplicative correction if the realized mean degree is off
    by more than 5%.
    """
    if cfg.model != "gaussian":
        raise ValueError("cfg.model must be 'gaussian'")
    target = cfg.k / (cfg.n - 1)
    amp = min(1.0, target / _gaussian_mean_kernel(cfg.sigma))
    rng = np.random.default_rng(cfg.seed)
    pos = rng.random((cfg.n, 2))
    g = _gaussian_sample(pos, amp, cfg.sigma, derive_seed(cfg.seed, 1))
    realized = 2 * g.edge_count / cfg.n
    if realized > 0 and abs(realized - cfg.k) > 0.05 * cfg.k and amp < 1.0:
        amp = min(1.0, amp * cfg.k / realized)
        g = _gaussian_sample(pos, amp, cfg.sigma, derive_seed(cfg.seed, 2))
    return g


def _gaussian_sample(pos: np.ndarray, amp: float, sigma: float, seed: int) -> Graph:
    n = pos.shape[0]
    rng = np.random.default_rng(seed)
    rows = []
    for u in range(n - 1):
        delta = np.abs(pos[u + 1 :] - pos[u])
        delta = np.minimum(delta, 1.0 - delta)
        d2 = (delta**2).sum(axis=1)
        prob = amp * np.exp(-d2 / (2.0 * sigma * sigma))
        hits = np.nonzero(rng.random(n - 1 - u) < prob)[0]
        if hits.shape[0]:
            rows.append(
                np.column_stack([np.full(hits.shape[0], u, dtype=np.int64), u + 1 + hits])
            )
    if not rows:
        raise ValueError("generated graph has no edges; increase k or sigma")
    return Graph.from_edges(n, np.concatenate(rows, axis=0))

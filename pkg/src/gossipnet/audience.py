"""Expected audience sizes for gossip about a directed or global act.

An actor i performs an act; gossip starts at the recipient j (or, for
undirected acts, at any neighbor that observed it with probability q)
and travels along edges of i's neighborhood, each transmitting
independently with probability p.  The audience n_ij is the expected
number of i's other neighbors the news reaches.

Engines: exact enumeration over edge subsets, Monte-Carlo sampling,
a random-neighborhood analytic approximation driven by (k_i, c_i,
m_ij), and the small-p law n_ij ~= p * m_ij.  A two-rate variant lets
gossip also travel outside the neighborhood, and a bisection estimator
locates a graph's pair-connectivity percolation threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph, NeighborhoodView, neighborhood_view
from ._kernels import derive_seed

DEFAULT_TRIALS = 10_000
EXACT_DEGREE_CAP = 8
EXACT_EDGE_CAP = 24


class EnumerationCapError(ValueError):
    """Raised when a neighborhood is too large for exact enumeration."""


@dataclass(frozen=True)
class AudienceEstimate:
    """An expected audience size with its statistical error.

    ``stderr`` is the standard error of the Monte-Carlo mean (sample
    s.d. / sqrt(trials)); exact and analytic estimates report 0.
    """

    value: float
    stderr: float
    method: str
    trials: int = 0

    @property
    def sample_sd(self) -> float:
        """Sample standard deviation of per-trial counts (0 if exact)."""
        return self.stderr * math.sqrt(self.trials) if self.trials else 0.0


@dataclass
class GossipParams:
    """Transmission parameters for one gossip computation.

    p   per-edge transmission probability
    q   per-neighbor observation probability (undirected acts only)
    p1  neighborhood-edge rate of the two-rate model
    p2  outside-edge rate of the two-rate model
    """

    p: float = 0.0
    q: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    trials: int = DEFAULT_TRIALS
    seed: int = 0

    def __post_init__(self):
        for name in ("p", "q", "p1", "p2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")


def _mc_moments(s: int, s2: int, trials: int) -> tuple[float, float]:
    mean = s / trials
    if trials > 1:
        var = max(0.0, (s2 - s * s / trials) / (trials - 1))
        return mean, math.sqrt(var / trials)
    return mean, 0.0


def _require_edge(g: Graph, i: int, j: int) -> None:
    if not g.has_edge(i, j):
        raise ValueError(f"({i}, {j}) is not an edge of the graph")


def audience_exact(
    g: Graph, i: int, j: int, p: float, allow_large: bool = False
) -> AudienceEstimate:
    """Exact n_ij by enumerating every subset of the neighborhood edges.

    The default cap follows the actor degree <= 8 rule; ``allow_large``
    instead admits any neighborhood with at most 24 induced edges.
    """
    _require_edge(g, i, j)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    view = neighborhood_view(g, i)
    ne = view.edge_count()
    if allow_large:
        if ne > EXACT_EDGE_CAP:
            raise EnumerationCapError(
                f"{ne} induced edges exceed the cap of {EXACT_EDGE_CAP}; "
                "use audience_mc instead"
            )
    elif view.size > EXACT_DEGREE_CAP:
        raise EnumerationCapError(
            f"actor degree {view.size} exceeds {EXACT_DEGREE_CAP}; "
            "use audience_mc instead"
        )
    if ne > EXACT_EDGE_CAP:
        raise EnumerationCapError(
            f"{ne} induced edges exceed the cap of {EXACT_EDGE_CAP}; "
            "use audience_mc instead"
        )
    src = view.local(j)
    eu = view.local_edges[:, 0].astype(np.int64)
    ev = view.local_edges[:, 1].astype(np.int64)
    value = _kernels.exact_audience(eu, ev, view.size, src, p)
    return AudienceEstimate(value=float(value), stderr=0.0, method="exact")


def audience_mc(g: Graph, i: int, j: int, params: GossipParams) -> AudienceEstimate:
    """Monte-Carlo n_ij: sample neighborhood edge subsets, count reached."""
    _require_edge(g, i, j)
    if params.trials == 0:
        raise ValueError("audience_mc needs trials >= 1")
    view = neighborhood_view(g, i)
    indptr, indices, eids = view.as_csr()
    s, s2 = _kernels.mc_audience(
        indptr,
        indices,
        eids,
        view.edge_count(),
        view.local(j),
        params.p,
        params.trials,
        params.seed & _kernels.MASK63,
    )
    value, stderr = _mc_moments(s, s2, params.trials)
    return AudienceEstimate(value=value, stderr=stderr, method="monte_carlo", trials=params.trials)


def _two_rate_probs(k_i: int, c_i: float, m_ij: float, p: float) -> tuple[float, float]:
    local_edges = c_i * k_i * (k_i - 1) / 2.0
    if m_ij > k_i - 1:
        raise ValueError(f"m_ij={m_ij} exceeds k_i-1={k_i - 1}")
    if local_edges < m_ij - 1e-9:
        raise ValueError(
            f"inconsistent inputs: c_i={c_i} implies {local_edges:.3f} "
            f"neighborhood edges, fewer than m_ij={m_ij}"
        )
    rest = local_edges - m_ij
    rest_pairs = (k_i - 1) * (k_i - 2) / 2.0
    if rest > rest_pairs + 1e-9:
        raise ValueError(
            f"inconsistent inputs: {rest:.3f} edges among {k_i - 1} "
            "non-recipient neighbors exceed the available pairs"
        )
    p1 = p * m_ij / (k_i - 1)
    p2 = 0.0 if k_i <= 2 else p * rest / rest_pairs
    assert -1e-12 <= p1 <= 1 + 1e-12 and -1e-12 <= p2 <= 1 + 1e-12
    return min(1.0, max(0.0, p1)), min(1.0, max(0.0, p2))


def audience_analytic(k_i: int, c_i: float, m_ij: int, p: float) -> AudienceEstimate:
    """Random-neighborhood approximation of n_ij from (k_i, c_i, m_ij).

    The recipient's links are spread uniformly over the k_i - 1 other
    neighbors (rate p1 = p m_ij / (k_i - 1)) and the remaining
    neighborhood edges over their pairs (rate p2); the audience is then
    (k_i - 1) times the two-rate connection probability.
    """
    if k_i < 1:
        raise ValueError("k_i must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not 0.0 <= c_i <= 1.0:
        raise ValueError("c_i must lie in [0, 1]")
    if m_ij < 0:
        raise ValueError("m_ij must be nonnegative")
    if k_i == 1:
        return AudienceEstimate(value=0.0, stderr=0.0, method="analytic")
    p1, p2 = _two_rate_probs(k_i, c_i, m_ij, p)
    value = (k_i - 1) * _kernels.percolation_prob(k_i - 1, p1, p2)
    return AudienceEstimate(value=float(value), stderr=0.0, method="analytic")


def audience_analytic_edge(g: Graph, i: int, j: int, p: float) -> AudienceEstimate:
    """audience_analytic with (k_i, c_i, m_ij) measured on the graph."""
    from .graph import embeddedness, local_clustering

    _require_edge(g, i, j)
    return audience_analytic(g.degree(i), local_clustering(g, i), embeddedness(g, i, j), p)


def audience_small_p(m_ij: int, p: float) -> AudienceEstimate:
    """First-order audience: each shared neighbor hears directly, n = p m."""
    return AudienceEstimate(value=p * m_ij, stderr=0.0, method="small_p")


def global_audience_mc(g: Graph, i: int, params: GossipParams) -> AudienceEstimate:
    """Monte-Carlo audience of an undirected act by i.

    Each neighbor observes independently with probability q; gossip then
    spreads from all observers over the neighborhood edges with
    probability p.  Observers count themselves.
    """
    if g.degree(i) < 1:
        raise ValueError("actor has no neighbors")
    if params.trials == 0:
        raise ValueError("global_audience_mc needs trials >= 1")
    view = neighborhood_view(g, i)
    indptr, indices, eids = view.as_csr()
    s, s2 = _kernels.mc_observed_audience(
        indptr,
        indices,
        eids,
        view.edge_count(),
        params.p,
        params.q,
        params.trials,
        params.seed & _kernels.MASK63,
    )
    value, stderr = _mc_moments(s, s2, params.trials)
    return AudienceEstimate(value=value, stderr=stderr, method="monte_carlo", trials=params.trials)


def global_audience_analytic(k_i: int, c_i: float, p: float, q: float) -> AudienceEstimate:
    """Random-neighborhood approximation of the undirected-act audience.

    Same construction as audience_analytic with the observation rate q
    taking the recipient's place: n_i = k_i * P(q, c_i p) on a random
    neighborhood of k_i nodes.
    """
    if k_i < 1:
        raise ValueError("k_i must be at least 1")
    for name, v in (("c_i", c_i), ("p", p), ("q", q)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")
    value = k_i * _kernels.percolation_prob(k_i, q, c_i * p)
    return AudienceEstimate(value=float(value), stderr=0.0, method="analytic")


def global_percolation_audience(
    g: Graph, i: int, j: int, params: GossipParams
) -> AudienceEstimate:
    """Two-rate audience where gossip may leave the neighborhood.

    Edges inside N(i) transmit with probability p1, all other edges with
    probability p2, and edges incident to the actor never transmit.  The
    audience is the part of N(i) \\ {j} reached from j on the full graph.
    """
    _require_edge(g, i, j)
    if params.trials == 0:
        raise ValueError("global_percolation_audience needs trials >= 1")
    n, m = g.node_count, g.edge_count
    edges = g.edges()
    in_nbhd = np.zeros(n, dtype=bool)
    in_nbhd[g.neighbors(i)] = True
    pe = np.full(m, params.p2)
    both_in = in_nbhd[edges[:, 0]] & in_nbhd[edges[:, 1]]
    pe[both_in] = params.p1
    incident = (edges[:, 0] == i) | (edges[:, 1] == i)
    pe[incident] = 0.0
    targets = in_nbhd.copy()
    targets[j] = False
    targets[i] = False
    s, s2 = _kernels.mc_graph_audience(
        g.indptr,
        g.indices,
        g.edge_ids,
        pe,
        j,
        targets,
        params.trials,
        params.seed & _kernels.MASK63,
    )
    value, stderr = _mc_moments(s, s2, params.trials)
    return AudienceEstimate(value=value, stderr=stderr, method="monte_carlo", trials=params.trials)


def percolation_threshold(
    g: Graph,
    trials: int = 200,
    pairs: int = 200,
    tol: float = 0.01,
    seed: int = 0,
) -> float:
    """Edge-retention probability at which two random nodes connect w.p. 0.5.

    Bisection on the retention probability r; each evaluation keeps each
    edge with probability r and measures the fraction of sampled node
    pairs left connected.
    """
    if g.node_count < 10:
        raise ValueError("threshold estimation needs at least 10 nodes")
    labels = _kernels.component_labels(g.indptr, g.indices)
    if labels.max() != 0:
        raise ValueError("graph must be connected")
    if trials < 1 or pairs < 1:
        raise ValueError("trials and pairs must be positive")
    rng = np.random.default_rng(derive_seed(seed, 0x70616972))
    pu = np.empty(pairs, dtype=np.int64)
    pv = np.empty(pairs, dtype=np.int64)
    for k in range(pairs):
        u, v = rng.choice(g.node_count, size=2, replace=False)
        pu[k], pv[k] = u, v
    lo, hi = 0.0, 1.0
    for step in range(40):
        if hi - lo <= tol:
            return (lo + hi) / 2.0
        mid = (lo + hi) / 2.0
        hits = _kernels.pair_connect_count(
            g.indptr,
            g.indices,
            g.edge_ids,
            g.edge_count,
            pu,
            pv,
            mid,
            trials,
            derive_seed(seed, step),
        )
        if hits / (trials * pairs) < 0.5:
            lo = mid
        else:
            hi = mid
    if hi - lo <= tol:
        return (lo + hi) / 2.0
    raise RuntimeError("percolation threshold did not converge in 40 bisection steps")


def mean_outgoing_audience(
    g: Graph, i: int, params: GossipParams, method: str = "exact"
) -> AudienceEstimate:
    """n_i*: n_ij averaged over all neighbors j, with the chosen engine.

    Monte-Carlo runs derive an independent stream per neighbor from the
    base seed, so the result does not depend on evaluation order.
    """
    k = g.degree(i)
    if k == 0:
        raise ValueError("actor has no neighbors")
    total = 0.0
    var = 0.0
    trials = 0
    for j in g.neighbors(i):
        est = compute_audience(g, i, int(j), params, method)
        total += est.value
        var += est.stderr**2
        trials = max(trials, est.trials)
    return AudienceEstimate(
        value=total / k,
        stderr=math.sqrt(var) / k,
        method=method if method != "auto" else "mixed",
        trials=trials,
    )


def compute_audience(
    g: Graph, i: int, j: int, params: GossipParams, method: str = "auto"
) -> AudienceEstimate:
    """Dispatch one n_ij computation to the requested engine.

    ``auto`` follows the enumeration rule: exact when the actor degree
    is at most 8, Monte-Carlo otherwise.  Monte-Carlo seeds are derived
    per (i, j) so tables are reproducible edge by edge.
    """
    if method == "auto":
        method = "exact" if g.degree(i) <= EXACT_DEGREE_CAP else "monte_carlo"
    if method == "exact":
        return audience_exact(g, i, j, params.p)
    if method == "monte_carlo":
        per_edge = GossipParams(
            p=params.p,
            q=params.q,
            trials=params.trials,
            seed=derive_seed(params.seed, i, j),
        )
        return audience_mc(g, i, j, per_edge)
    if method == "analytic":
        return audience_analytic_edge(g, i, j, params.p)
    if method == "small_p":
        from .graph import embeddedness

        return audience_small_p(embeddedness(g, i, j), params.p)
    raise ValueError(f"unknown audience method {method!r}")


@dataclass(frozen=True)
class AudienceRow:
    """One directed edge of an audience table."""

    i: int
    j: int
    k_i: int
    c_i: float
    m_ij: int
    value: float
    stderr: float
    method: str


def audience_table(
    g: Graph,
    params: GossipParams,
    method: str = "auto",
    edges=None,
    workers: int = 1,
) -> list[AudienceRow]:
    """n_ij for a set of directed edges (all of them by default).

    The neighborhood of each actor is built once and shared by all of
    its outgoing edges.  Rows come back sorted by (i, j); Monte-Carlo
    seeds are derived per edge, so worker count and evaluation order
    never change the numbers.
    """
    if edges is None:
        und = g.edges()
        edges = [(int(u), int(v)) for u, v in und] + [(int(v), int(u)) for u, v in und]
    by_actor: dict[int, list[int]] = {}
    for i, j in edges:
        by_actor.setdefault(i, []).append(j)

    def do_actor(i: int) -> list[AudienceRow]:
        view = neighborhood_view(g, i)
        k = view.size
        ne = view.edge_count()
        c = ne / (k * (k - 1) / 2) if k >= 2 else 0.0
        indptr, indices, eids = view.as_csr()
        eng = method
        if method == "auto":
            eng = "exact" if k <= EXACT_DEGREE_CAP else "monte_carlo"
        rows = []
        for j in by_actor[i]:
            src = view.local(j)
            m = int(indptr[src + 1] - indptr[src])
            if eng == "exact":
                eu = view.local_edges[:, 0].copy()
                ev = view.local_edges[:, 1].copy()
                val, err, trials = _kernels.exact_audience(eu, ev, k, src, params.p), 0.0, 0
            elif eng == "monte_carlo":
                s, s2 = _kernels.mc_audience(
                    indptr, indices, eids, ne, src, params.p,
                    params.trials, derive_seed(params.seed, i, j),
                )
                val, err = _mc_moments(s, s2, params.trials)
                trials = params.trials
            elif eng == "analytic":
                est = audience_analytic(k, c, m, params.p)
                val, err, trials = est.value, 0.0, 0
            elif eng == "small_p":
                val, err, trials = params.p * m, 0.0, 0
            else:
                raise ValueError(f"unknown audience method {eng!r}")
            rows.append(AudienceRow(i, j, k, c, m, float(val), float(err), eng))
        return rows

    actors = sorted(by_actor)
    out: list[AudienceRow] = []
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for rows in pool.map(do_actor, actors):
                out.extend(rows)
    else:
        for i in actors:
            out.extend(do_actor(i))
    out.sort(key=lambda r: (r.i, r.j))
    return out


def outgoing_means(rows: list[AudienceRow]) -> dict[int, float]:
    """Per-actor mean of n_ij over its rows (n_i* when rows cover N(i))."""
    total: dict[int, float] = {}
    count: dict[int, int] = {}
    for r in rows:
        total[r.i] = total.get(r.i, 0.0) + r.value
        count[r.i] = count.get(r.i, 0) + 1
    return {i: total[i] / count[i] for i in total}

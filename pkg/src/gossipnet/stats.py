"""Structural summaries: clustering, path length, degree distributions,
power-law slope fits, audience distributions, and parameter sweeps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import ks_2samp

from ._kernels import derive_seed
from .audience import GossipParams, audience_table, outgoing_means
from .generators import GenConfig, generate
from .graph import Graph, PathLength, local_clustering, mean_shortest_path

AUDIENCE_QUANTILES = (5, 25, 50, 75, 95)


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares slope of a log-binned degree distribution."""

    slope: float
    r2: float
    d_min: float
    d_max: float
    n_bins: int


@dataclass
class AudienceSummary:
    """Distribution of n_ij over directed edges plus per-node means."""

    quantiles: dict[int, float]
    mean: float
    node_means: dict[int, float]
    method: str

    @property
    def mean_outgoing(self) -> float:
        vals = list(self.node_means.values())
        return float(np.mean(vals)) if vals else 0.0


@dataclass
class StatsReport:
    """Per-graph structural summary."""

    n: int
    edge_count: int
    mean_degree: float
    avg_clustering: float
    mean_path: PathLength | None
    degree_histogram: list[tuple[int, int]]
    power_law: PowerLawFit | None
    audience: AudienceSummary | None = None

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "edge_count": self.edge_count,
            "mean_degree": self.mean_degree,
            "avg_clustering": self.avg_clustering,
            "degree_histogram": [[int(a), int(b)] for a, b in self.degree_histogram],
        }
        if self.mean_path is not None:
            d["mean_path"] = {
                "value": self.mean_path.value,
                "stderr": self.mean_path.stderr,
                "exact": self.mean_path.exact,
                "largest_component_only": self.mean_path.lcc_only,
            }
        if self.power_law is not None:
            d["power_law"] = {
                "slope": self.power_law.slope,
                "r2": self.power_law.r2,
                "fit_range": [self.power_law.d_min, self.power_law.d_max],
                "n_bins": self.power_law.n_bins,
            }
        if self.audience is not None:
            d["audience"] = {
                "method": self.audience.method,
                "mean": self.audience.mean,
                "quantiles": {str(q): v for q, v in self.audience.quantiles.items()},
                "mean_outgoing": self.audience.mean_outgoing,
            }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def degree_histogram(g: Graph) -> list[tuple[int, int]]:
    counts = np.bincount(g.degrees)
    return [(int(d), int(c)) for d, c in enumerate(counts) if c > 0]


def average_clustering(g: Graph) -> float:
    """Mean of local clustering over all nodes (degree < 2 counts as 0)."""
    return float(np.mean([local_clustering(g, i) for i in range(g.node_count)]))


def power_law_slope(histogram, d_min: float) -> PowerLawFit:
    """Slope of log(count density) vs log(degree) on ratio-2 log bins.

    Bins with upper edge at or below ``d_min`` and empty bins are
    skipped; at least 4 nonempty bins are required.
    """
    degrees = np.asarray([d for d, _ in histogram], dtype=float)
    counts = np.asarray([c for _, c in histogram], dtype=float)
    pos = (degrees >= max(d_min, 1.0)) & (counts > 0)
    if pos.sum() == 0:
        raise ValueError("insufficient bins for a power-law fit")
    lo = max(d_min, 1.0)
    xs, ys = [], []
    d_hi = degrees[pos].max()
    while lo <= d_hi:
        hi = lo * 2.0
        sel = (degrees >= lo) & (degrees < hi)
        mass = counts[sel].sum()
        if mass > 0:
            xs.append(math.sqrt(lo * hi))
            ys.append(mass / (hi - lo))
        lo = hi
    if len(xs) < 4:
        raise ValueError(f"insufficient bins for a power-law fit (got {len(xs)}, need 4)")
    lx = np.log10(xs)
    ly = np.log10(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(((ly - pred) ** 2).sum())
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(
        slope=float(slope),
        r2=r2,
        d_min=float(max(d_min, 1.0)),
        d_max=float(d_hi),
        n_bins=len(xs),
    )


def ks_distance(sample_a, sample_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("ks_distance needs nonempty samples")
    return float(ks_2samp(a, b).statistic)


def summarize(
    g: Graph,
    params: GossipParams | None = None,
    method: str = "auto",
    audience_edges: int | None = None,
    workers: int = 1,
) -> StatsReport:
    """Fill a StatsReport; audiences only when params are given.

    ``audience_edges`` caps the audience table at that many directed
    edges (seeded uniform sample with replacement); None means all.
    """
    hist = degree_histogram(g)
    mean_degree = 2.0 * g.edge_count / g.node_count if g.node_count else 0.0
    try:
        mp = mean_shortest_path(g, seed=derive_seed(params.seed if params else 0, 0x70617468))
    except ValueError:
        mp = None
    try:
        fit = power_law_slope(hist, d_min=mean_degree / 2.0)
    except ValueError:
        fit = None
    audience = None
    if params is not None:
        edges = None
        if audience_edges is not None:
            und = g.edges()
            rng = np.random.default_rng(derive_seed(params.seed, 0x65646765))
            pick = rng.integers(und.shape[0], size=audience_edges)
            flip = rng.random(audience_edges) < 0.5
            edges = [
                (int(und[e, 1]), int(und[e, 0])) if f else (int(und[e, 0]), int(und[e, 1]))
                for e, f in zip(pick, flip)
            ]
        rows = audience_table(g, params, method=method, edges=edges, workers=workers)
        values = np.array([r.value for r in rows])
        audience = AudienceSummary(
            quantiles={q: float(np.percentile(values, q)) for q in AUDIENCE_QUANTILES},
            mean=float(values.mean()),
            node_means=outgoing_means(rows),
            method=rows[0].method if rows else method,
        )
    return StatsReport(
        n=g.node_count,
        edge_count=g.edge_count,
        mean_degree=mean_degree,
        avg_clustering=average_clustering(g),
        mean_path=mp,
        degree_histogram=hist,
        power_law=fit,
        audience=audience,
    )


@dataclass
class SweepResult:
    """Per-grid-point reports and their aggregates."""

    axis: str
    reports: dict = field(default_factory=dict)  # (model, value) -> [StatsReport]

    def aggregate_rows(self) -> list[tuple]:
        """Rows [model, N, k, p, seed_count, stat, mean, sd], sorted."""
        rows = []
        for (model, cfg_n, cfg_k, cfg_p), reps in sorted(self.reports.items()):
            stats: dict[str, list[float]] = {}
            for rep in reps:
                stats.setdefault("mean_degree", []).append(rep.mean_degree)
                stats.setdefault("avg_clustering", []).append(rep.avg_clustering)
                if rep.mean_path is not None:
                    stats.setdefault("mean_path", []).append(rep.mean_path.value)
                if rep.power_law is not None:
                    stats.setdefault("degree_slope", []).append(rep.power_law.slope)
                if rep.audience is not None:
                    stats.setdefault("mean_audience", []).append(rep.audience.mean)
                    stats.setdefault("mean_outgoing_audience", []).append(
                        rep.audience.mean_outgoing
                    )
            for stat in sorted(stats):
                vals = np.asarray(stats[stat])
                sd = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
                rows.append(
                    (model, cfg_n, cfg_k, cfg_p, len(reps), stat, float(vals.mean()), sd)
                )
        return rows

    def pooled_histogram(self, model: str, n: int, k: int, p: float) -> list[tuple[int, int]]:
        """Degree histogram pooled over all seeds of one grid point."""
        acc: dict[int, int] = {}
        for rep in self.reports[(model, n, k, p)]:
            for d, c in rep.degree_histogram:
                acc[d] = acc.get(d, 0) + c
        return sorted(acc.items())

    def to_csv(self) -> str:
        lines = ["model,N,k,p,seed_count,stat,mean,sd"]
        for row in self.aggregate_rows():
            model, n, k, p, sc, stat, mean, sd = row
            lines.append(f"{model},{n},{k},{p:.10g},{sc},{stat},{mean:.10g},{sd:.10g}")
        return "\n".join(lines) + "\n"


def sweep(
    models,
    axis: str,
    values,
    base: GenConfig,
    seeds: int = 3,
    params: GossipParams | None = None,
    method: str = "auto",
    audience_edges: int | None = None,
) -> SweepResult:
    """Generate, summarize, and aggregate over a parameter grid.

    ``axis`` is one of n/k/p; every (model, value, seed) run derives its
    own generator seed from the base config's seed.
    """
    if axis not in ("n", "k", "p"):
        raise ValueError("axis must be one of 'n', 'k', 'p'")
    values = list(values)
    if not values:
        raise ValueError("empty sweep grid")
    result = SweepResult(axis=axis)
    for mi, model in enumerate(models):
        for vi, value in enumerate(values):
            reps = []
            for s in range(seeds):
                cfg = replace(
                    base,
                    model=model,
                    seed=derive_seed(base.seed, mi, vi, s),
                    **{axis: value},
                )
                g = generate(cfg)
                run_params = None
                if params is not None:
                    run_params = GossipParams(
                        p=params.p,
                        q=params.q,
                        trials=params.trials,
                        seed=derive_seed(params.seed, vi, s),
                    )
                reps.append(
                    summarize(
                        g,
                        params=run_params,
                        method=method,
                        audience_edges=audience_edges,
                    )
                )
            result.reports[(model, cfg.n, cfg.k, cfg.p)] = reps
    return result

import math

import numpy as np
import pytest

from gossipnet import (
    GenConfig,
    build_graph,
    gen_ba,
    gen_er,
    gen_fof,
    gen_gaussian,
    gen_tba,
    gen_ws,
    generate,
    local_clustering,
)
from gossipnet.generators import (
    _attachment_choice,
    _fof_draw,
    _Growth,
    _two_hop_candidates,
)
from gossipnet.stats import average_clustering, power_law_slope, degree_histogram
from gossipnet import _kernels


def growth_edges(n, k):
    return (k + 1) * k // 2 + (n - k - 1) * (k // 2)


def circulant(n, dists):
    edges = []
    for d in dists:
        edges += [(v, (v + d) % n) for v in range(n)]
    return build_graph(edges)


class TestConfigValidation:
    def test_unknown_model(self):
        with pytest.raises(ValueError):
            GenConfig(model="nope", n=10, k=2)

    def test_too_small(self):
        with pytest.raises(ValueError):
            GenConfig(model="fof", n=4, k=4)

    def test_odd_degree_growth(self):
        with pytest.raises(ValueError, match="even"):
            GenConfig(model="tba", n=20, k=5)

    def test_bad_sigma(self):
        with pytest.raises(ValueError):
            GenConfig(model="gaussian", n=20, k=4, sigma=0.0)


class TestGrowthModels:
    @pytest.mark.parametrize("model,fn", [("tba", gen_tba), ("fof", gen_fof), ("ba", gen_ba)])
    def test_seed_only(self, model, fn):
        g = fn(GenConfig(model=model, n=7, k=6, seed=1))
        assert g.node_count == 7
        assert g.edge_count == 21  # exactly the complete seed graph

    @pytest.mark.parametrize("model", ["tba", "fof", "ba"])
    def test_edge_count_identity(self, model):
        for seed in range(5):
            cfg = GenConfig(model=model, n=60, k=4, seed=seed)
            g = generate(cfg)
            assert g.edge_count == growth_edges(60, 4)
            assert g.degrees.mean() == pytest.approx(4.0)

    @pytest.mark.parametrize("model", ["tba", "fof", "ba", "er", "ws", "gaussian"])
    def test_deterministic_per_seed(self, model):
        cfg = GenConfig(model=model, n=40, k=4, seed=99)
        a = generate(cfg)
        b = generate(cfg)
        assert np.array_equal(a.edges(), b.edges())

    @pytest.mark.parametrize("model", ["tba", "fof", "ba"])
    def test_simple_and_connected(self, model):
        from gossipnet import largest_component

        g = generate(GenConfig(model=model, n=80, k=6, seed=2))
        edges = g.edges()
        assert (edges[:, 0] != edges[:, 1]).all()
        assert np.unique(edges, axis=0).shape[0] == edges.shape[0]
        assert largest_component(g).node_count == g.node_count

    def test_tba_weight_modes_agree_on_edge_count(self):
        for mode in ("analytic", "embeddedness", "exact", "monte_carlo"):
            cfg = GenConfig(
                model="tba", n=24, k=4, p=0.2, weight_mode=mode, trials=100, seed=5
            )
            g = gen_tba(cfg)
            assert g.edge_count == growth_edges(24, 4)

    def test_tba_p_zero_uses_uniform_fallback(self):
        # zero gossip rate means zero weights everywhere: growth still works
        g = gen_tba(GenConfig(model="tba", n=30, k=4, p=0.0, seed=8))
        assert g.edge_count == growth_edges(30, 4)

    def test_tba_alpha_zero_uniform_over_positive(self):
        g = gen_tba(GenConfig(model="tba", n=30, k=4, alpha=0.0, seed=9))
        assert g.edge_count == growth_edges(30, 4)


class TestCandidateDistributions:
    """Fixed-state draw distributions on a 4-regular circulant fixture."""

    def setup_method(self):
        # node 0's two-hop candidates on C_50(1, 2) are {3, 4, 46, 47}
        # with shared-neighbor counts {2, 1, 1, 2}
        self.state = _Growth.from_graph(circulant(50, (1, 2)))
        self.expected = {3: 2, 4: 1, 46: 1, 47: 2}

    def test_two_hop_candidates(self):
        assert _two_hop_candidates(self.state, 0) == self.expected

    def test_fof_draw_proportional_to_shared_neighbors(self):
        # all intermediates have equal degree, so acceptance-conditioned
        # draws land proportionally to m_ij
        rng = np.random.default_rng(123)
        counts = {i: 0 for i in self.expected}
        accepted = 0
        while accepted < 100_000:
            t = _fof_draw(self.state, 0, rng)
            if t is not None:
                counts[t] += 1
                accepted += 1
        total_m = sum(self.expected.values())
        chi2 = sum(
            (counts[i] - 100_000 * m / total_m) ** 2 / (100_000 * m / total_m)
            for i, m in self.expected.items()
        )
        assert chi2 < 25.0  # df=3, far beyond the 99.9% quantile 16.27

    def test_embeddedness_mode_matches_fof_expectation(self):
        rng = np.random.default_rng(321)
        cfg = GenConfig(model="tba", n=51, k=4, weight_mode="embeddedness", seed=0)
        counts = {i: 0 for i in self.expected}
        for _ in range(100_000):
            counts[_attachment_choice(self.state, 0, cfg, rng, slot=1)] += 1
        total_m = sum(self.expected.values())
        chi2 = sum(
            (counts[i] - 100_000 * m / total_m) ** 2 / (100_000 * m / total_m)
            for i, m in self.expected.items()
        )
        assert chi2 < 25.0

    def test_analytic_mode_prefers_embedded_candidates(self):
        rng = np.random.default_rng(11)
        cfg = GenConfig(model="tba", n=51, k=4, weight_mode="analytic", p=0.1, seed=0)
        counts = {i: 0 for i in self.expected}
        for _ in range(20_000):
            counts[_attachment_choice(self.state, 0, cfg, rng, slot=1)] += 1
        assert counts[3] + counts[47] > counts[4] + counts[46]


class TestBaselines:
    def test_er_mean_degree(self):
        n, k = 400, 8
        devs = []
        for seed in range(20):
            g = gen_er(GenConfig(model="er", n=n, k=k, seed=seed))
            devs.append(2 * g.edge_count / n - k)
        assert abs(float(np.mean(devs))) < 3 * math.sqrt(2 * k / n) / math.sqrt(20)

    def test_ws_unrewired_is_ring_lattice(self):
        k = 6
        g = gen_ws(GenConfig(model="ws", n=40, k=k, beta=0.0, seed=4))
        assert g.edge_count == 40 * k // 2
        expected = 3 * (k - 2) / (4 * (k - 1))
        assert local_clustering(g, 0) == pytest.approx(expected)
        assert average_clustering(g) == pytest.approx(expected)

    def test_ws_rewired_keeps_edge_count(self):
        g = gen_ws(GenConfig(model="ws", n=60, k=4, beta=0.4, seed=4))
        assert g.edge_count == 60 * 2

    def test_ba_powerlaw_tail(self):
        g = gen_ba(GenConfig(model="ba", n=10_000, k=6, seed=12))
        fit = power_law_slope(degree_histogram(g), d_min=3)
        assert fit.slope == pytest.approx(-3.0, abs=0.5)

    def test_gaussian_mean_degree(self):
        g = gen_gaussian(GenConfig(model="gaussian", n=300, k=8, sigma=0.1, seed=6))
        assert 2 * g.edge_count / 300 == pytest.approx(8.0, rel=0.15)

    def test_gaussian_is_geometric(self):
        # geometric graphs cluster far above ER at equal density
        ggeo = gen_gaussian(GenConfig(model="gaussian", n=400, k=10, sigma=0.05, seed=7))
        ger = gen_er(GenConfig(model="er", n=400, k=10, seed=7))
        assert average_clustering(ggeo) > 3 * average_clustering(ger)


@pytest.mark.slow
class TestScaling:
    def test_fof_linear_runtime(self):
        import time

        t0 = time.time()
        g = gen_fof(GenConfig(model="fof", n=50_000, k=6, seed=1))
        elapsed = time.time() - t0
        assert g.edge_count == growth_edges(50_000, 6)
        assert elapsed < 120.0

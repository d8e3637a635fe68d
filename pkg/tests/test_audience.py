import math

import numpy as np
import pytest

from gossipnet import (
    AudienceEstimate,
    EnumerationCapError,
    GossipParams,
    Graph,
    audience_analytic,
    audience_analytic_edge,
    audience_exact,
    audience_mc,
    audience_small_p,
    audience_table,
    build_graph,
    compute_audience,
    global_audience_analytic,
    global_audience_mc,
    global_percolation_audience,
    mean_outgoing_audience,
    neighborhood_view,
    percolation_threshold,
    two_terminal,
)
from gossipnet.audience import outgoing_means

from conftest import brute_audience, complete_graph, random_neighborhood, star_graph


def view_oracle(g, i, j, p):
    """Brute-force n_ij via subset enumeration on the neighborhood."""
    view = neighborhood_view(g, i)
    edges = [tuple(e) for e in view.local_edges]
    return brute_audience(edges, view.size, view.local(j), p)


# actor 0 with neighbors {1, 2}, induced edge (1, 2)
WEDGE = [(0, 1), (0, 2), (1, 2)]
# actor 0 with neighbors {1, 2, 3}, induced path (1, 2), (2, 3)
CHAIN = [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]


class TestAudienceExact:
    def test_single_induced_edge(self):
        g = build_graph(WEDGE)
        assert audience_exact(g, 0, 1, 0.5).value == pytest.approx(0.5)

    def test_induced_path(self):
        g = build_graph(CHAIN)
        est = audience_exact(g, 0, 1, 0.5)
        assert est.value == pytest.approx(0.5 + 0.25)
        assert est.stderr == 0.0
        assert est.method == "exact"

    def test_isolated_recipient(self):
        g = build_graph([(0, 1), (0, 2), (0, 3), (2, 3)])
        assert audience_exact(g, 0, 1, 0.9).value == 0.0

    def test_matches_subset_enumeration(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            k = int(rng.integers(3, 8))
            g = random_neighborhood(rng, k, 0.45)
            j = int(rng.integers(1, k + 1))
            p = float(rng.uniform(0.05, 0.95))
            assert audience_exact(g, 0, j, p).value == pytest.approx(
                view_oracle(g, 0, j, p), abs=1e-12
            )

    def test_direction_asymmetry(self):
        # same undirected graph, different audiences per direction
        g = build_graph(CHAIN)
        p = 0.4
        n_01 = audience_exact(g, 0, 1, p).value
        n_10 = audience_exact(g, 1, 0, p).value
        assert n_01 == pytest.approx(p + p * p)
        assert n_10 == pytest.approx(p)
        assert n_01 != n_10

    def test_lower_bound_embeddedness(self):
        from gossipnet import embeddedness

        rng = np.random.default_rng(3)
        for _ in range(10):
            g = random_neighborhood(rng, 6, 0.5)
            for p in (0.1, 0.4, 0.8):
                for j in range(1, 7):
                    m = embeddedness(g, 0, j)
                    assert audience_exact(g, 0, j, p).value >= p * m - 1e-12

    def test_monotone_in_p(self):
        rng = np.random.default_rng(5)
        g = random_neighborhood(rng, 6, 0.5)
        grid = np.linspace(0.0, 1.0, 11)
        vals = [audience_exact(g, 0, 1, p).value for p in grid]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_degree_cap(self):
        g = star_graph(9)  # degree 9 actor
        g = build_graph([(0, i) for i in range(1, 10)] + [(1, 2)])
        with pytest.raises(EnumerationCapError, match="audience_mc"):
            audience_exact(g, 0, 1, 0.5)
        # the override admits it (only one induced edge)
        assert audience_exact(g, 0, 1, 0.5, allow_large=True).value == pytest.approx(0.5)

    def test_edge_cap_with_override(self):
        g = complete_graph(9)  # 28 induced edges in each neighborhood
        with pytest.raises(EnumerationCapError):
            audience_exact(g, 0, 1, 0.5, allow_large=True)

    def test_non_edge_rejected(self):
        g = build_graph([(0, 1), (1, 2)])
        with pytest.raises(ValueError):
            audience_exact(g, 0, 2, 0.5)


class TestAudienceMc:
    def test_matches_exact_within_stderr(self):
        rng = np.random.default_rng(9)
        for trial in range(8):
            k = int(rng.integers(4, 8))
            g = random_neighborhood(rng, k, 0.45)
            j = int(rng.integers(1, k + 1))
            p = [0.1, 0.4, 0.8][trial % 3]
            exact = audience_exact(g, 0, j, p).value
            mc = audience_mc(g, 0, j, GossipParams(p=p, trials=10_000, seed=trial))
            assert abs(mc.value - exact) <= 4 * mc.stderr + 1e-9

    def test_p_zero(self):
        g = build_graph(CHAIN)
        est = audience_mc(g, 0, 1, GossipParams(p=0.0, trials=1000, seed=1))
        assert est.value == 0.0 and est.stderr == 0.0

    def test_p_one_deterministic(self):
        g = build_graph(CHAIN)
        est = audience_mc(g, 0, 1, GossipParams(p=1.0, trials=1000, seed=1))
        assert est.value == 2.0 and est.stderr == 0.0

    def test_zero_embeddedness_zero_audience(self):
        g = build_graph([(0, 1), (0, 2), (0, 3), (2, 3)])
        est = audience_mc(g, 0, 1, GossipParams(p=0.7, trials=2000, seed=2))
        assert est.value == 0.0 and est.stderr == 0.0

    def test_deterministic_given_seed(self):
        g = build_graph(CHAIN)
        p = GossipParams(p=0.3, trials=2000, seed=77)
        a = audience_mc(g, 0, 1, p)
        b = audience_mc(g, 0, 1, p)
        assert a == b

    def test_zero_trials_rejected(self):
        g = build_graph(WEDGE)
        with pytest.raises(ValueError):
            audience_mc(g, 0, 1, GossipParams(p=0.5, trials=0, seed=1))

    def test_trial_count_recorded(self):
        g = build_graph(WEDGE)
        est = audience_mc(g, 0, 1, GossipParams(p=0.5, trials=123, seed=1))
        assert est.trials == 123
        assert est.sample_sd == pytest.approx(est.stderr * math.sqrt(123))


class TestAudienceAnalytic:
    def test_degree_one(self):
        assert audience_analytic(1, 0.0, 0, 0.9).value == 0.0

    def test_triangle_matches_exact(self):
        g = complete_graph(3)
        for p in (0.1, 0.5, 0.8):
            est = audience_analytic(2, 1.0, 1, p)
            assert est.value == pytest.approx(p)
            assert est.value == pytest.approx(audience_exact(g, 0, 1, p).value)

    def test_two_rate_specialization(self):
        # p1 = p2 = c p whenever m = c (k-1); then the audience equals
        # (k-1) times the pair-connectivity of G(k, c p)
        for k, c, m in [(5, 0.5, 2), (4, 2 / 3, 2), (6, 0.6, 3), (9, 0.25, 2)]:
            for p in (0.05, 0.3, 0.65, 1.0):
                a = audience_analytic(k, c, m, p).value
                t = (k - 1) * two_terminal(k, c * p)
                assert a == pytest.approx(t, abs=1e-12)

    def test_zero_embeddedness(self):
        assert audience_analytic(7, 0.3, 0, 0.8).value == 0.0

    def test_bounds(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            k = int(rng.integers(2, 30))
            m = int(rng.integers(0, k))
            e_extra = rng.uniform(0, (k - 1) * (k - 2) / 2)
            c = (m + e_extra) / (k * (k - 1) / 2)
            v = audience_analytic(k, min(c, 1.0), m, float(rng.uniform(0, 1))).value
            assert 0.0 <= v <= k - 1 + 1e-12

    def test_inconsistent_inputs_rejected(self):
        with pytest.raises(ValueError, match="inconsistent"):
            audience_analytic(4, 0.25, 2, 0.5)  # 1.5 neighborhood edges < m=2
        with pytest.raises(ValueError):
            audience_analytic(3, 1.0, 3, 0.5)  # m > k-1
        with pytest.raises(ValueError, match="inconsistent"):
            audience_analytic(4, 1.0, 0, 0.5)  # 6 edges but none at recipient

    def test_monotone_in_m(self):
        k, c = 8, 0.5
        vals = [audience_analytic(k, c, m, 0.4).value for m in range(0, 8)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_edge_helper_matches_measured_inputs(self):
        from gossipnet import embeddedness, local_clustering

        rng = np.random.default_rng(17)
        g = random_neighborhood(rng, 6, 0.6)
        direct = audience_analytic_edge(g, 0, 2, 0.3)
        manual = audience_analytic(
            g.degree(0), local_clustering(g, 0), embeddedness(g, 0, 2), 0.3
        )
        assert direct.value == manual.value


class TestAudienceSmallP:
    def test_formula(self):
        assert audience_small_p(3, 0.01).value == pytest.approx(0.03)
        assert audience_small_p(0, 0.9).value == 0.0

    def test_first_order_error_bound(self):
        # |exact - p m| <= 5 p^2 E on enumerable fixtures
        rng = np.random.default_rng(31)
        from gossipnet import embeddedness

        for _ in range(20):
            g = random_neighborhood(rng, 6, 0.5)
            ne = neighborhood_view(g, 0).edge_count()
            j = int(rng.integers(1, 7))
            m = embeddedness(g, 0, j)
            for p in (0.005, 0.01, 0.02):
                exact = audience_exact(g, 0, j, p).value
                assert abs(exact - p * m) <= 5 * p * p * ne + 1e-15


class TestGlobalAudience:
    def test_all_observe(self):
        rng = np.random.default_rng(41)
        g = random_neighborhood(rng, 6, 0.4)
        est = global_audience_mc(g, 0, GossipParams(p=0.3, q=1.0, trials=500, seed=4))
        assert est.value == 6.0 and est.stderr == 0.0

    def test_none_observe(self):
        g = build_graph(CHAIN)
        est = global_audience_mc(g, 0, GossipParams(p=0.5, q=0.0, trials=500, seed=4))
        assert est.value == 0.0

    def test_star_center_binomial(self):
        g = star_graph(10)
        est = global_audience_mc(g, 0, GossipParams(p=0.9, q=0.3, trials=10_000, seed=5))
        assert abs(est.value - 3.0) <= 4 * est.stderr

    def test_analytic_q_one(self):
        assert global_audience_analytic(6, 0.5, 0.4, 1.0).value == pytest.approx(6.0)

    def test_analytic_no_clustering(self):
        for k in (1, 4, 9):
            for q in (0.1, 0.6):
                assert global_audience_analytic(k, 0.0, 0.7, q).value == pytest.approx(k * q)

    def test_analytic_matches_mc_on_star(self):
        g = star_graph(8)
        mc = global_audience_mc(g, 0, GossipParams(p=0.4, q=0.4, trials=10_000, seed=6))
        an = global_audience_analytic(8, 0.0, 0.4, 0.4)
        assert abs(an.value - mc.value) <= 4 * mc.stderr

    def test_analytic_matches_mc_on_dense_fixture(self):
        rng = np.random.default_rng(51)
        from gossipnet import local_clustering

        g = random_neighborhood(rng, 6, 0.6)
        mc = global_audience_mc(g, 0, GossipParams(p=0.4, q=0.4, trials=20_000, seed=7))
        an = global_audience_analytic(6, local_clustering(g, 0), 0.4, 0.4)
        assert abs(an.value - mc.value) <= 4 * mc.stderr + 0.15


class TestGlobalPercolation:
    def _er(self, n, k, seed):
        rng = np.random.default_rng(seed)
        p = k / (n - 1)
        edges = [
            (a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p
        ]
        return build_graph(edges)

    def test_outside_rate_zero_reduces_to_local(self):
        g = self._er(60, 8, 2)
        i = 0
        j = int(g.neighbors(i)[0])
        params = GossipParams(p1=0.5, p2=0.0, trials=4000, seed=11)
        glob = global_percolation_audience(g, i, j, params)
        loc = audience_mc(g, i, j, GossipParams(p=0.5, trials=4000, seed=12))
        tol = 4 * math.hypot(glob.stderr, loc.stderr) + 1e-9
        assert abs(glob.value - loc.value) <= tol

    def test_full_outside_rate_reaches_everyone(self):
        # ring: all gossip routes around the outside, never through the actor
        g = build_graph([(v, (v + 1) % 12) for v in range(12)])
        params = GossipParams(p1=0.2, p2=1.0, trials=200, seed=13)
        est = global_percolation_audience(g, 0, 1, params)
        assert est.value == pytest.approx(1.0)  # k-1 = 1
        assert est.stderr == 0.0

    def test_never_through_actor(self):
        # star: every path crosses the actor, so nothing is ever reached
        g = star_graph(6)
        params = GossipParams(p1=1.0, p2=1.0, trials=200, seed=14)
        est = global_percolation_audience(g, 0, 1, params)
        assert est.value == 0.0

    def test_zero_trials_rejected(self):
        g = complete_graph(4)
        with pytest.raises(ValueError):
            global_percolation_audience(g, 0, 1, GossipParams(p1=0.5, trials=0))


class TestPercolationThreshold:
    def test_dense_graph_percolates_early(self):
        pc = percolation_threshold(complete_graph(50), trials=60, pairs=60, tol=0.02, seed=3)
        assert pc < 0.1

    def test_ring_needs_nearly_everything(self):
        g = build_graph([(v, (v + 1) % 100) for v in range(100)])
        pc = percolation_threshold(g, trials=60, pairs=60, tol=0.02, seed=3)
        assert pc > 0.9

    def test_connectivity_estimate_monotone(self):
        from gossipnet import _kernels

        g = complete_graph(20)
        rng = np.random.default_rng(8)
        pu = rng.integers(0, 20, size=50).astype(np.int64)
        pv = (pu + 1 + rng.integers(0, 19, size=50)).astype(np.int64) % 20
        counts = [
            _kernels.pair_connect_count(
                g.indptr, g.indices, g.edge_ids, g.edge_count, pu, pv, r, 200, 5
            )
            for r in (0.02, 0.08, 0.2, 0.6)
        ]
        assert all(b >= a - 25 for a, b in zip(counts, counts[1:]))

    def test_disconnected_rejected(self):
        g = build_graph([(0, 1), (2, 3)] + [(i, i + 1) for i in range(4, 14)])
        with pytest.raises(ValueError, match="connected"):
            percolation_threshold(g)

    def test_tiny_graph_rejected(self):
        with pytest.raises(ValueError):
            percolation_threshold(complete_graph(5))


class TestMeanOutgoingAudience:
    def test_complete_graph_symmetry(self):
        g = complete_graph(4)
        star = mean_outgoing_audience(g, 0, GossipParams(p=0.5), method="exact")
        single = audience_exact(g, 0, 1, 0.5)
        assert star.value == pytest.approx(single.value)

    def test_star_center_zero(self):
        g = star_graph(5)
        assert mean_outgoing_audience(g, 0, GossipParams(p=0.7), method="exact").value == 0.0

    def test_isolated_rejected(self):
        g = Graph.from_edges(3, np.array([[0, 1]]))
        with pytest.raises(ValueError):
            mean_outgoing_audience(g, 2, GossipParams(p=0.5), method="exact")

    def test_mean_of_per_edge_values(self):
        rng = np.random.default_rng(61)
        g = random_neighborhood(rng, 6, 0.5)
        params = GossipParams(p=0.35)
        star = mean_outgoing_audience(g, 0, params, method="exact")
        per_edge = [audience_exact(g, 0, j, 0.35).value for j in range(1, 7)]
        assert star.value == pytest.approx(float(np.mean(per_edge)))


class TestDispatchAndTables:
    def test_auto_rule(self):
        small = complete_graph(5)
        assert compute_audience(small, 0, 1, GossipParams(p=0.4)).method == "exact"
        big = build_graph([(0, v) for v in range(1, 11)] + [(1, 2)])
        assert (
            compute_audience(big, 0, 1, GossipParams(p=0.4, trials=100)).method
            == "monte_carlo"
        )

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            compute_audience(complete_graph(3), 0, 1, GossipParams(p=0.4), method="bogus")

    def test_table_covers_both_directions(self):
        g = build_graph(WEDGE)
        rows = audience_table(g, GossipParams(p=0.5), method="exact")
        assert len(rows) == 2 * g.edge_count
        assert [(r.i, r.j) for r in rows] == sorted((r.i, r.j) for r in rows)

    def test_table_row_fields(self):
        g = build_graph(CHAIN)
        rows = audience_table(g, GossipParams(p=0.5), method="exact")
        row = next(r for r in rows if (r.i, r.j) == (0, 1))
        assert row.k_i == 3
        assert row.m_ij == 1
        assert row.c_i == pytest.approx(2 / 3)
        assert row.value == pytest.approx(0.75)

    def test_workers_do_not_change_rows(self):
        rng = np.random.default_rng(71)
        g = random_neighborhood(rng, 9, 0.4)  # degree 9 -> monte_carlo in auto
        params = GossipParams(p=0.3, trials=500, seed=999)
        rows1 = audience_table(g, params, method="auto", workers=1)
        rows4 = audience_table(g, params, method="auto", workers=4)
        assert rows1 == rows4

    def test_outgoing_means(self):
        g = build_graph(WEDGE)
        rows = audience_table(g, GossipParams(p=0.5), method="exact")
        means = outgoing_means(rows)
        assert means[0] == pytest.approx(0.5)  # both edges from the apex carry p

    def test_params_validation(self):
        with pytest.raises(ValueError):
            GossipParams(p=1.5)
        with pytest.raises(ValueError):
            GossipParams(q=-0.1)

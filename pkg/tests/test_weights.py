from __future__ import annotations

import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filtsurf.graphs import snapshot
from filtsurf.weights import (
    DiscreteMeasure,
    WeightFunctionConfig,
    dispersal_measure,
    hks,
    laplacian,
    ricci_curvature,
    spectral_decomposition,
    wasserstein,
    weigh_edges,
)

from conftest import random_connected_snapshot
from oracles import charpoly_eigenvalues, lp_ricci, lp_transport

K2 = snapshot([(0, 0), (1, 0)], [(0, 1, 1.0)])
PATH3 = snapshot([(0, 0), (1, 0), (2, 0)], [(0, 1, 1.0), (1, 2, 1.0)])
K3 = snapshot([(0, 0), (1, 0), (2, 0)], [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])

# ground distances on the path graph x - y - z
PATH_GROUND = {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 2.0}


class TestConfig:
    def test_defaults(self):
        cfg = WeightFunctionConfig()
        assert cfg.kind == "native" and cfg.ricci_alpha == 0.5 and cfg.hks_t == 10.0

    @pytest.mark.parametrize("bad", [
        dict(kind="bogus"),
        dict(kind="ricci", ricci_alpha=1.5),
        dict(kind="ricci", ricci_alpha=-0.1),
        dict(kind="hks", hks_t=0.0),
    ])
    def test_rejects_bad_parameters(self, bad):
        with pytest.raises(ValueError):
            WeightFunctionConfig(**bad)


class TestWasserstein:
    def test_identical_measures(self):
        mu = DiscreteMeasure(support=(0, 1), mass=(0.5, 0.5))
        assert wasserstein(mu, mu, PATH_GROUND) == 0.0

    def test_point_masses(self):
        mu = DiscreteMeasure(support=(0,), mass=(1.0,))
        nu = DiscreteMeasure(support=(2,), mass=(1.0,))
        assert wasserstein(mu, nu, PATH_GROUND) == 2.0

    def test_split_mass_example(self):
        # verified against the LP oracle below before freezing the value
        mu = DiscreteMeasure(support=(0, 1), mass=(0.5, 0.5))
        nu = DiscreteMeasure(support=(1, 0, 2), mass=(0.5, 0.25, 0.25))
        cost = np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 1.0]])  # rows mu (0,1), cols nu (1,0,2)
        assert lp_transport(mu.mass, nu.mass, cost) == pytest.approx(0.5, abs=1e-9)
        assert wasserstein(mu, nu, PATH_GROUND) == pytest.approx(0.5, abs=1e-12)

    def test_mass_mismatch_rejected(self):
        # both measures are individually valid but their totals differ by
        # more than the tolerance
        mu = DiscreteMeasure(support=(0, 1), mass=(0.5, 0.5 + 9e-10))
        nu = DiscreteMeasure(support=(1, 2), mass=(0.5, 0.5 - 9e-10))
        with pytest.raises(ValueError, match="differ"):
            wasserstein(mu, nu, PATH_GROUND)

    def test_matches_lp_oracle_on_random_instances(self, rng):
        for _ in range(40):
            r = int(rng.integers(1, 6))
            c = int(rng.integers(1, 6))
            mu_mass = rng.random(r) + 0.01
            mu_mass /= mu_mass.sum()
            nu_mass = rng.random(c) + 0.01
            nu_mass /= nu_mass.sum()
            points_mu = list(range(r))
            points_nu = list(range(100, 100 + c))
            # random metric: hop distances in a random connected graph over
            # all support points would do, but a scaled discrete metric with
            # random "coordinates" is simpler and still a metric
            coords = rng.integers(0, 20, size=(r + c,))
            ground = {}
            cost = np.zeros((r, c))
            for i, a in enumerate(points_mu):
                for j, b in enumerate(points_nu):
                    d = float(abs(int(coords[i]) - int(coords[r + j])))
                    ground[(a, b)] = d
                    cost[i, j] = d
            mu = DiscreteMeasure(support=tuple(points_mu), mass=tuple(mu_mass))
            nu = DiscreteMeasure(support=tuple(points_nu), mass=tuple(nu_mass))
            assert wasserstein(mu, nu, ground) == pytest.approx(
                lp_transport(mu_mass, nu_mass, cost), abs=1e-9
            )

    @given(
        masses_a=st.lists(st.integers(1, 50), min_size=1, max_size=4),
        masses_b=st.lists(st.integers(1, 50), min_size=1, max_size=4),
        masses_c=st.lists(st.integers(1, 50), min_size=1, max_size=4),
        coords=st.lists(st.integers(0, 9), min_size=12, max_size=12),
    )
    @settings(max_examples=60, deadline=None)
    def test_symmetry_and_triangle_inequality(self, masses_a, masses_b, masses_c, coords):
        def measure(masses, offset):
            total = sum(masses)
            support = tuple(offset + i for i in range(len(masses)))
            return DiscreteMeasure(support=support, mass=tuple(m / total for m in masses))

        mu = measure(masses_a, 0)
        nu = measure(masses_b, 4)
        pi = measure(masses_c, 8)
        ground = {}
        for a in range(12):
            for b in range(a + 1, 12):
                ground[(a, b)] = float(abs(coords[a] - coords[b]))
        d_ab = wasserstein(mu, nu, ground)
        d_ba = wasserstein(nu, mu, ground)
        d_ac = wasserstein(mu, pi, ground)
        d_cb = wasserstein(pi, nu, ground)
        assert d_ab == pytest.approx(d_ba, abs=1e-9)
        assert d_ab <= d_ac + d_cb + 1e-9


class TestRicci:
    def test_k2_measures_coincide(self):
        assert ricci_curvature(K2, 0, 1, 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_path_end_edge(self):
        # LP oracle value: move 0.25 of mass across distance 2
        assert lp_ricci(PATH3, 0, 1, 0.5) == pytest.approx(0.5, abs=1e-9)
        assert ricci_curvature(PATH3, 0, 1, 0.5) == pytest.approx(0.5, abs=1e-12)

    def test_triangle_edge(self):
        assert lp_ricci(K3, 0, 1, 0.5) == pytest.approx(0.75, abs=1e-9)
        assert ricci_curvature(K3, 0, 1, 0.5) == pytest.approx(0.75, abs=1e-12)

    def test_non_edge_rejected(self):
        with pytest.raises(ValueError, match="not an edge"):
            ricci_curvature(PATH3, 0, 2, 0.5)

    def test_never_exceeds_one_and_matches_oracle(self, rng):
        for _ in range(60):
            g = random_connected_snapshot(rng, max_nodes=8)
            alpha = float(rng.choice([0.0, 0.25, 0.5, 0.9]))
            for u, v, _ in g.edges:
                kappa = ricci_curvature(g, u, v, alpha)
                assert kappa <= 1.0 + 1e-12
                assert kappa == pytest.approx(lp_ricci(g, u, v, alpha), abs=1e-9)

    def test_dispersal_measure_shape(self):
        m = dispersal_measure(PATH3, 1, 0.5)
        assert m.support == (1, 0, 2)
        assert m.mass == (0.5, 0.25, 0.25)


class TestHks:
    def test_k2_closed_form(self):
        expected = 0.5 + 0.5 * math.exp(-2.0)
        values = hks(K2, 1.0)
        assert values[0] == pytest.approx(expected, abs=1e-9)
        assert values[1] == pytest.approx(expected, abs=1e-9)

    def test_isolated_node(self):
        g = snapshot([(7, 0)], [])
        assert hks(g, 3.5) == {7: pytest.approx(1.0, abs=1e-12)}

    def test_heat_trace_against_charpoly_oracle(self, rng):
        for _ in range(30):
            g = random_connected_snapshot(rng, max_nodes=5)
            t = float(rng.choice([0.1, 1.0, 10.0]))
            values = hks(g, t)
            trace = sum(values.values())
            lam = charpoly_eigenvalues(laplacian(g))
            assert trace == pytest.approx(float(np.exp(-t * lam).sum()), abs=1e-8)

    def test_positive_and_decreasing_in_t(self, rng):
        g = random_connected_snapshot(rng, max_nodes=6)
        prev = None
        for t in (0.5, 1.0, 2.0, 4.0, 8.0):
            values = hks(g, t)
            assert all(v > 0.0 for v in values.values())
            if prev is not None:
                assert all(values[n] <= prev[n] + 1e-12 for n in values)
            prev = values

    def test_spectral_invariants(self, rng):
        g = random_connected_snapshot(rng, max_nodes=6)
        spec = spectral_decomposition(g)
        lap = laplacian(g)
        resid = np.abs(lap @ spec.eigenvectors - spec.eigenvectors * spec.eigenvalues).max()
        assert resid <= 1e-8 * max(1.0, float(np.abs(spec.eigenvalues).max()))
        gram = spec.eigenvectors.T @ spec.eigenvectors
        assert np.abs(gram - np.eye(len(spec.eigenvalues))).max() <= 1e-8

    def test_rejects_bad_t(self):
        with pytest.raises(ValueError):
            hks(K2, 0.0)


class TestWeighEdges:
    def test_native_is_identity(self):
        g = snapshot([(0, 0), (1, 0)], [(0, 1, 6.25)])
        assert weigh_edges(g, WeightFunctionConfig(kind="native")) == {(0, 1): 6.25}

    def test_native_degenerate_warns(self, caplog):
        g = snapshot([(0, 0), (1, 0), (2, 0)], [(0, 1, 3.0), (1, 2, 3.0)])
        with caplog.at_level(logging.WARNING, logger="filtsurf.weights"):
            weigh_edges(g, WeightFunctionConfig(kind="native"))
        assert any("degenerates" in rec.message for rec in caplog.records)

    def test_max_degree(self):
        # degree(0) = 3, degree(4) = 5 via a double star
        edges = [(0, 1, 1.0), (0, 2, 1.0), (0, 4, 1.0),
                 (4, 5, 1.0), (4, 6, 1.0), (4, 7, 1.0), (4, 8, 1.0)]
        g = snapshot([(i, 0) for i in range(9)], edges)
        w = weigh_edges(g, WeightFunctionConfig(kind="max-degree"))
        assert w[(0, 4)] == 5.0

    def test_ricci_kind_on_k2(self):
        w = weigh_edges(K2, WeightFunctionConfig(kind="ricci"))
        assert w == {(0, 1): pytest.approx(1.0, abs=1e-12)}

    def test_hks_kind_uses_max_of_endpoints(self):
        w = weigh_edges(PATH3, WeightFunctionConfig(kind="hks", hks_t=1.0))
        values = hks(PATH3, 1.0)
        for (u, v), weight in w.items():
            assert weight == max(values[u], values[v])

    def test_pure_function(self, rng):
        g = random_connected_snapshot(rng, max_nodes=7)
        for kind in ("native", "max-degree", "ricci", "hks"):
            cfg = WeightFunctionConfig(kind=kind)
            assert weigh_edges(g, cfg) == weigh_edges(g, cfg)

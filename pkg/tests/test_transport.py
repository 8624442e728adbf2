import numpy as np
import pytest

from wpot import (
    Coupling,
    DiscreteMeasure,
    InvalidCouplingError,
    ResourceLimitError,
    Sphere,
    Torus,
    brute_force_transport,
    coupling_cost,
    dirac,
    pushforward,
    random_isometry,
    solve_transport,
)
from wpot.transport import independent_coupling
from tests.conftest import make_measure


def random_feasible_coupling(mu, nu, rng, iterations=60):
    """Random positive matrix scaled to the marginals (Sinkhorn-style)."""
    m = rng.uniform(0.5, 1.5, size=(mu.n_atoms, nu.n_atoms))
    for _ in range(iterations):
        m *= (mu.weights / m.sum(axis=1))[:, None]
        m *= (nu.weights / m.sum(axis=0))[None, :]
    return Coupling(m)


class TestCouplingCost:
    def test_dirac_product_coupling(self):
        t = Torus(2)
        mu = dirac(t, [0.1, 0.1])
        nu = dirac(t, [0.3, 0.1])
        pi = independent_coupling(mu, nu)
        assert coupling_cost(pi, mu, nu, 2.0) == pytest.approx(0.2**2, abs=1e-15)

    def test_diagonal_self_coupling_is_free(self):
        mu = make_measure(Torus(2), seed=1)
        pi = Coupling(np.diag(mu.weights))
        assert coupling_cost(pi, mu, mu, 1.5) == pytest.approx(0.0, abs=1e-15)

    def test_feasible_couplings_bound_optimum(self, rng):
        mu = make_measure(Torus(2), seed=2, n_atoms=4)
        nu = make_measure(Torus(2), seed=3, n_atoms=5)
        optimal = solve_transport(mu, nu, 2.0).cost
        for _ in range(10):
            pi = random_feasible_coupling(mu, nu, rng)
            assert coupling_cost(pi, mu, nu, 2.0) >= optimal - 1e-9

    def test_marginal_violation_rejected(self):
        mu = make_measure(Torus(1), seed=4, n_atoms=2)
        nu = make_measure(Torus(1), seed=5, n_atoms=2)
        bad = Coupling(np.full((2, 2), 0.3))
        with pytest.raises(InvalidCouplingError):
            coupling_cost(bad, mu, nu, 1.0)

    def test_shape_mismatch_rejected(self):
        mu = make_measure(Torus(1), seed=6, n_atoms=2)
        nu = make_measure(Torus(1), seed=7, n_atoms=3)
        with pytest.raises(InvalidCouplingError):
            coupling_cost(Coupling(np.eye(2) / 2), mu, nu, 1.0)


class TestSolveTransport:
    def test_dirac_pair_gives_geodesic_distance(self, any_manifold, rng):
        for _ in range(20):
            x, y = any_manifold.random_point(rng), any_manifold.random_point(rng)
            result = solve_transport(dirac(any_manifold, x), dirac(any_manifold, y), 2.0)
            assert result.distance == pytest.approx(any_manifold.distance(x, y), abs=1e-12)

    def test_two_point_to_dirac(self):
        t = Torus(1)
        mu = DiscreteMeasure(t, [[0.0], [0.2]], [0.5, 0.5])
        nu = dirac(t, [0.1])
        for p in (1.0, 2.0, 3.0):
            expected = (0.5 * 0.1**p + 0.5 * 0.1**p) ** (1 / p)
            assert solve_transport(mu, nu, p).distance == pytest.approx(expected, abs=1e-12)

    def test_self_distance_zero(self, any_manifold):
        mu = make_measure(any_manifold, seed=8)
        assert solve_transport(mu, mu, 2.0).distance <= 1e-12

    def test_distance_is_cost_root(self):
        mu = make_measure(Torus(2), seed=9)
        nu = make_measure(Torus(2), seed=10)
        result = solve_transport(mu, nu, 1.7)
        assert result.distance == pytest.approx(result.cost ** (1 / 1.7), abs=1e-12)

    def test_coupling_marginals(self):
        mu = make_measure(Sphere(2), seed=11)
        nu = make_measure(Sphere(2), seed=12)
        result = solve_transport(mu, nu, 2.0)
        np.testing.assert_allclose(result.coupling.row_sums(), mu.weights, atol=1e-10)
        np.testing.assert_allclose(result.coupling.col_sums(), nu.weights, atol=1e-10)

    def test_manifold_mismatch(self):
        with pytest.raises(ValueError):
            solve_transport(make_measure(Torus(2), seed=0), make_measure(Sphere(2), seed=0), 2.0)

    def test_p_below_one_rejected(self):
        mu = make_measure(Torus(1), seed=13)
        with pytest.raises(ValueError):
            solve_transport(mu, mu, 0.5)

    def test_symmetry(self, any_manifold):
        mu = make_measure(any_manifold, seed=14)
        nu = make_measure(any_manifold, seed=15)
        d1 = solve_transport(mu, nu, 2.0).distance
        d2 = solve_transport(nu, mu, 2.0).distance
        assert abs(d1 - d2) <= 1e-9

    def test_triangle_inequality(self, any_manifold):
        mu = make_measure(any_manifold, seed=16)
        nu = make_measure(any_manifold, seed=17)
        eta = make_measure(any_manifold, seed=18)
        for p in (1.0, 2.0):
            dxz = solve_transport(mu, eta, p).distance
            dxy = solve_transport(mu, nu, p).distance
            dyz = solve_transport(nu, eta, p).distance
            assert dxz <= dxy + dyz + 1e-8

    def test_monotone_in_p(self, any_manifold):
        mu = make_measure(any_manifold, seed=19)
        nu = make_measure(any_manifold, seed=20)
        dists = [solve_transport(mu, nu, p).distance for p in (1.0, 1.5, 2.0, 3.0)]
        for lo, hi in zip(dists, dists[1:]):
            assert lo <= hi + 1e-9

    def test_isometry_invariance(self, any_manifold):
        mu = make_measure(any_manifold, seed=21)
        nu = make_measure(any_manifold, seed=22)
        iso = random_isometry(any_manifold, 77)
        before = solve_transport(mu, nu, 2.0).distance
        after = solve_transport(pushforward(iso, mu), pushforward(iso, nu), 2.0).distance
        assert abs(before - after) <= 1e-9

    def test_diameter_bound(self, any_manifold):
        for seed in range(10):
            mu = make_measure(any_manifold, seed=100 + seed)
            nu = make_measure(any_manifold, seed=200 + seed)
            d = solve_transport(mu, nu, 2.0).distance
            assert d <= any_manifold.diameter + 1e-12

    def test_deterministic_coupling(self):
        mu = make_measure(Torus(2), seed=23)
        nu = make_measure(Torus(2), seed=24)
        a = solve_transport(mu, nu, 2.0)
        b = solve_transport(mu, nu, 2.0)
        np.testing.assert_array_equal(a.coupling.mass, b.coupling.mass)

    def test_degenerate_symmetric_instance(self):
        # four-fold symmetric costs with tied weights force degenerate pivots
        t = Torus(2)
        pts = np.array([[0.0, 0.0], [0.25, 0.0], [0.0, 0.25], [0.25, 0.25]])
        mu = DiscreteMeasure(t, pts, np.full(4, 0.25))
        nu = DiscreteMeasure(t, pts + 0.125, np.full(4, 0.25))
        fast = solve_transport(mu, nu, 2.0)
        slow = brute_force_transport(mu, nu, 2.0)
        assert fast.cost == pytest.approx(slow.cost, abs=1e-12)
        np.testing.assert_allclose(fast.coupling.row_sums(), mu.weights, atol=1e-12)

    def test_repeated_identical_columns(self):
        # two target atoms at mirrored positions create many optimal ties
        t = Torus(1)
        mu = DiscreteMeasure(t, [[0.0], [0.2], [0.4]], [1 / 3, 1 / 3, 1 / 3])
        nu = DiscreteMeasure(t, [[0.1], [0.3]], [0.5, 0.5])
        fast = solve_transport(mu, nu, 1.0)
        slow = brute_force_transport(mu, nu, 1.0)
        assert fast.cost == pytest.approx(slow.cost, abs=1e-12)

    def test_big_random_instances_feasible(self, rng):
        # exercise degenerate pivots: blocky weights with repeated values
        t = Torus(2)
        pts_a = np.stack([rng.uniform(-0.5, 0.5, 30), rng.uniform(-0.5, 0.5, 30)], axis=1)
        pts_b = np.stack([rng.uniform(-0.5, 0.5, 25), rng.uniform(-0.5, 0.5, 25)], axis=1)
        mu = DiscreteMeasure(t, pts_a, np.full(30, 1 / 30))
        nu = DiscreteMeasure(t, pts_b, np.full(25, 1 / 25))
        result = solve_transport(mu, nu, 2.0)
        np.testing.assert_allclose(result.coupling.row_sums(), mu.weights, atol=1e-9)
        np.testing.assert_allclose(result.coupling.col_sums(), nu.weights, atol=1e-9)


class TestBruteForceOracle:
    def test_two_diracs(self):
        t = Torus(1)
        res = brute_force_transport(dirac(t, [0.1]), dirac(t, [0.35]), 1.0)
        assert res.distance == pytest.approx(0.25, abs=1e-14)

    def test_two_point_equal_weights_min_pairing(self):
        t = Torus(1)
        mu = DiscreteMeasure(t, [[0.0], [0.2]], [0.5, 0.5])
        nu = DiscreteMeasure(t, [[0.05], [0.3]], [0.5, 0.5])
        res = brute_force_transport(mu, nu, 2.0)
        direct = 0.5 * 0.05**2 + 0.5 * 0.1**2
        crossed = 0.5 * 0.3**2 + 0.5 * 0.15**2
        assert res.cost == pytest.approx(min(direct, crossed), abs=1e-14)

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
    def test_agreement_equal_weights(self, p):
        t = Torus(2)
        for seed in range(25):
            rng = np.random.default_rng([300, seed])
            pts_a = rng.uniform(-0.5, 0.5, size=(3, 2))
            pts_b = rng.uniform(-0.5, 0.5, size=(3, 2))
            mu = DiscreteMeasure(t, pts_a, np.full(3, 1 / 3))
            nu = DiscreteMeasure(t, pts_b, np.full(3, 1 / 3))
            fast = solve_transport(mu, nu, p).cost
            slow = brute_force_transport(mu, nu, p).cost
            assert fast == pytest.approx(slow, abs=1e-9)

    @pytest.mark.parametrize("shape", [(2, 3), (3, 4), (2, 6), (1, 5)])
    def test_agreement_general_weights(self, shape):
        s = Sphere(2)
        n, m = shape
        for seed in range(10):
            rng = np.random.default_rng([400, n, m, seed])
            mu = DiscreteMeasure(
                s, rng.normal(size=(n, 3)), rng.dirichlet(np.ones(n) * 5)
            )
            nu = DiscreteMeasure(
                s, rng.normal(size=(m, 3)), rng.dirichlet(np.ones(m) * 5)
            )
            fast = solve_transport(mu, nu, 2.0).cost
            slow = brute_force_transport(mu, nu, 2.0).cost
            assert fast == pytest.approx(slow, abs=1e-9)

    def test_resource_limit(self):
        mu = make_measure(Torus(2), seed=25, n_atoms=7)
        nu = make_measure(Torus(2), seed=26, n_atoms=7)
        with pytest.raises(ResourceLimitError):
            brute_force_transport(mu, nu, 2.0)

    def test_reproducible(self):
        mu = make_measure(Torus(2), seed=27, n_atoms=3)
        nu = make_measure(Torus(2), seed=28, n_atoms=4)
        a = brute_force_transport(mu, nu, 2.0)
        b = brute_force_transport(mu, nu, 2.0)
        np.testing.assert_array_equal(a.coupling.mass, b.coupling.mass)


def test_transport_result_json():
    mu = make_measure(Torus(1), seed=29, n_atoms=2)
    nu = make_measure(Torus(1), seed=30, n_atoms=2)
    payload = solve_transport(mu, nu, 2.0).to_json_dict()
    assert payload["rows"] == 2 and payload["cols"] == 2
    total = sum(v for _, _, v in payload["coupling"])
    assert total == pytest.approx(1.0, abs=1e-10)

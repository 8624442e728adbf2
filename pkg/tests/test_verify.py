import itertools

import numpy as np
import pytest

from wpot import (
    DiscreteMeasure,
    SuiteConfig,
    Torus,
    Sphere,
    center_of_mass_and_deviation,
    dirac,
    dirac_segment_alpha_interval,
    pushforward,
    random_isometry,
    run_suite,
    solve_transport,
)
from wpot.manifold import wrap_canonical
from wpot.verify import segment_grid_minimizers, unwrap_cube_support
from tests.conftest import make_measure


def cube_measure(seed, n=2, n_atoms=4, side=0.45):
    """Random measure confined to an axis cube of the given side."""
    rng = np.random.default_rng(seed)
    anchor = rng.uniform(-0.5, 0.5, size=n)
    offsets = rng.uniform(0.0, side, size=(n_atoms, n))
    weights = rng.dirichlet(np.ones(n_atoms) * 3)
    weights = 0.5 * weights + 0.5 / n_atoms
    return DiscreteMeasure(Torus(n), wrap_canonical(anchor + offsets), weights / weights.sum())


def grid_search_barycenter(mu, unwrapped, resolution=64):
    """Minimize W_2(delta_z, mu) over a grid spanning the unwrapped cube."""
    lo = unwrapped.min(axis=0)
    hi = unwrapped.max(axis=0)
    axes = [np.linspace(lo[j], hi[j], resolution) for j in range(unwrapped.shape[1])]
    best, best_z = np.inf, None
    for z in itertools.product(*axes):
        cost = float(np.sum(mu.weights * np.sum((unwrapped - np.asarray(z)) ** 2, axis=1)))
        if cost < best:
            best, best_z = cost, np.asarray(z)
    return best_z, np.sqrt(best)


class TestCenterOfMass:
    def test_dirac(self):
        t = Torus(2)
        x = t.point([0.2, -0.4])
        m, sigma = center_of_mass_and_deviation(dirac(t, x))
        np.testing.assert_allclose(m, x, atol=1e-15)
        assert sigma == 0.0

    def test_two_point_midpoint(self):
        mu = DiscreteMeasure(Torus(1), [[0.1], [0.3]], [0.5, 0.5])
        m, sigma = center_of_mass_and_deviation(mu)
        assert m[0] == pytest.approx(0.2, abs=1e-14)
        assert sigma == pytest.approx(0.1, abs=1e-14)

    def test_wrapped_cube_handled(self):
        # support straddles the seam at +-1/2
        mu = DiscreteMeasure(Torus(1), [[0.45], [-0.45]], [0.5, 0.5])
        m, sigma = center_of_mass_and_deviation(mu)
        assert abs(m[0]) == pytest.approx(0.5, abs=1e-12)
        assert sigma == pytest.approx(0.05, abs=1e-14)

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_grid_search(self, seed):
        mu = cube_measure(seed)
        unwrapped = unwrap_cube_support(mu)
        m, sigma = center_of_mass_and_deviation(mu)
        z_grid, sigma_grid = grid_search_barycenter(mu, unwrapped)
        cell = (unwrapped.max(axis=0) - unwrapped.min(axis=0)) / 63
        lifted_m = unwrapped.T @ mu.weights
        assert np.all(np.abs(lifted_m - z_grid) <= cell + 1e-12)
        assert sigma <= sigma_grid + 1e-12

    def test_oversized_support_rejected(self):
        mu = DiscreteMeasure(Torus(1), [[0.0], [0.3], [-0.3]], [0.4, 0.3, 0.3])
        with pytest.raises(ValueError, match="cube"):
            center_of_mass_and_deviation(mu)

    @pytest.mark.parametrize("seed", range(5))
    def test_isometry_equivariance(self, seed):
        mu = cube_measure(seed + 50)
        iso = random_isometry(Torus(2), seed)
        m, sigma = center_of_mass_and_deviation(mu)
        m2, sigma2 = center_of_mass_and_deviation(pushforward(iso, mu))
        assert Torus(2).distance(m2, iso.apply(m)) <= 1e-10
        assert abs(sigma - sigma2) <= 1e-10

    def test_sigma_is_transport_distance_to_barycenter(self):
        mu = cube_measure(99)
        m, sigma = center_of_mass_and_deviation(mu)
        w2 = solve_transport(mu, dirac(Torus(2), m), 2.0).distance
        assert sigma == pytest.approx(w2, abs=1e-12)


class TestAlphaInterval:
    def test_point_closer_to_x(self):
        t = Torus(1)
        eta = dirac(t, [0.05])
        lo, hi = dirac_segment_alpha_interval(eta, t.point([0.0]), t.point([0.4]))
        assert (lo, hi) == (1.0, 1.0)
        glo, ghi = segment_grid_minimizers(eta, t.point([0.0]), t.point([0.4]))
        assert abs(lo - glo) <= 1e-3 and abs(hi - ghi) <= 1e-3

    def test_split_pair(self):
        t = Torus(1)
        eta = DiscreteMeasure(t, [[0.05], [0.35]], [0.5, 0.5])
        x, y = t.point([0.0]), t.point([0.4])
        lo, hi = dirac_segment_alpha_interval(eta, x, y)
        assert (lo, hi) == (0.5, 0.5)
        glo, ghi = segment_grid_minimizers(eta, x, y)
        assert abs(lo - glo) <= 1e-3 and abs(hi - ghi) <= 1e-3

    def test_bisector_mass_widens_interval(self):
        t = Torus(1)
        eta = dirac(t, [0.2])  # exactly equidistant from 0.0 and 0.4
        x, y = t.point([0.0]), t.point([0.4])
        lo, hi = dirac_segment_alpha_interval(eta, x, y)
        assert (lo, hi) == (0.0, 1.0)
        glo, ghi = segment_grid_minimizers(eta, x, y)
        assert glo <= 1e-12 and ghi >= 1.0 - 1e-12

    def test_rejects_equal_endpoints(self):
        t = Torus(1)
        with pytest.raises(ValueError):
            dirac_segment_alpha_interval(dirac(t, [0.3]), t.point([0.1]), t.point([0.1]))

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_grid_search_random(self, seed):
        rng = np.random.default_rng([1000, seed])
        eta = make_measure(Torus(2), seed=seed + 10)
        t = Torus(2)
        x = t.random_point(rng)
        y = t.random_point(rng)
        while t.distance(x, y) < 0.1:
            y = t.random_point(rng)
        lo, hi = dirac_segment_alpha_interval(eta, x, y)
        assert 0.0 <= lo <= hi <= 1.0
        glo, ghi = segment_grid_minimizers(eta, x, y)
        assert abs(lo - glo) <= 1e-3 + 1e-9
        assert abs(hi - ghi) <= 1e-3 + 1e-9


class TestSuites:
    @pytest.mark.parametrize(
        "suite,manifold",
        [
            ("isometry", Torus(2)),
            ("isometry", Sphere(2)),
            ("injectivity", Torus(2)),
            ("injectivity", Sphere(2)),
            ("diameter", Torus(2)),
            ("diameter", Sphere(2)),
            ("segment", Torus(2)),
            ("segment", Sphere(2)),
            ("marginals", Torus(2)),
        ],
    )
    def test_small_runs_pass(self, suite, manifold):
        report = run_suite(SuiteConfig(suite, manifold, p=2.0, trials=5, seed=7))
        assert report.passed, report.failures

    def test_recovery_suite(self):
        report = run_suite(SuiteConfig("recovery", Torus(2), trials=2, seed=7))
        assert report.passed, report.failures

    def test_fourier_suite(self):
        report = run_suite(SuiteConfig("fourier", Torus(1), trials=4, seed=7))
        assert report.passed, report.failures

    def test_deterministic_reports(self):
        cfg = SuiteConfig("isometry", Torus(2), p=1.5, trials=4, seed=11)
        a = run_suite(cfg)
        b = run_suite(cfg)
        assert a.to_json_dict() == b.to_json_dict()

    def test_unknown_suite_rejected(self):
        with pytest.raises(ValueError):
            run_suite(SuiteConfig("nonsense", Torus(2)))

    def test_tolerance_override_can_fail(self):
        cfg = SuiteConfig(
            "diameter", Torus(2), trials=3, seed=7, tolerances={"margin": 10.0}
        )
        report = run_suite(cfg)
        assert not report.passed

    def test_isometry_p1(self):
        report = run_suite(SuiteConfig("isometry", Torus(2), p=1.0, trials=5, seed=7))
        assert report.passed, report.failures

    def test_report_serialization(self):
        report = run_suite(SuiteConfig("diameter", Sphere(2), trials=2, seed=7))
        payload = report.to_json_dict()
        assert payload["suite"] == "diameter"
        assert payload["passed"] is True
        lines = report.format_lines()
        assert "PASS" in lines[0]

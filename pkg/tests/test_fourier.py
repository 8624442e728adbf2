import math

import pytest

from wpot import (
    cost_coeff_quadrature_2d,
    DiscreteMeasure,
    SampledPotential,
    Torus,
    UnrecoverableFrequencyError,
    convolution_identity_check,
    cost_coeff_closed,
    cost_coeff_quadrature,
    dirac,
    fourier_recover,
    measure_transform,
    nonvanishing_scan,
)
from tests.conftest import make_measure

PI2 = math.pi**2


class TestClosedForms:
    @pytest.mark.parametrize(
        "p,j,expected",
        [
            (2, 0, 1 / 12),
            (2, 1, -1 / (2 * PI2)),
            (2, 2, 1 / (8 * PI2)),
            (2, -3, -1 / (18 * PI2)),
            (1, 0, 0.25),
            (1, 2, 0.0),
            (1, 64, 0.0),
            (1, 1, -1 / PI2),
            (1, 63, -1 / (63**2 * PI2)),
        ],
    )
    def test_values(self, p, j, expected):
        assert cost_coeff_closed(p, j) == pytest.approx(expected, abs=1e-16)

    @pytest.mark.parametrize(
        "pair,expected",
        [
            ((0, 0), 1 / 6),
            ((1, 0), -1 / (2 * PI2)),
            ((0, 3), -1 / (18 * PI2)),
            ((1, 1), 0.0),
            ((2, 5), 0.0),
        ],
    )
    def test_two_dimensional_pairs(self, pair, expected):
        assert cost_coeff_closed(2, pair) == pytest.approx(expected, abs=1e-15)

    def test_unsupported_exponent(self):
        with pytest.raises(ValueError):
            cost_coeff_closed(1.5, 3)
        with pytest.raises(ValueError):
            cost_coeff_closed(1, (1, 2))


class TestQuadrature:
    @pytest.mark.parametrize("p", [1.0, 2.0])
    def test_matches_closed_forms_up_to_64(self, p):
        for j in range(0, 65):
            err = abs(cost_coeff_quadrature(p, j) - cost_coeff_closed(p, j))
            assert err <= 1e-12, (p, j, err)

    def test_even_in_j(self):
        for p in (1.0, 1.7, 2.0):
            for j in (1, 7, 33):
                a = cost_coeff_quadrature(p, j)
                b = cost_coeff_quadrature(p, -j)
                assert abs(a - b) <= 1e-15

    def test_decay_bound(self):
        # |c_p(j)| <= C / j^2 numerically over the scanned range
        for p in (1.0, 1.5, 2.0, 3.0):
            c = 10.0 * max(abs(cost_coeff_quadrature(p, 1)), 1.0 / (2 * PI2))
            for j in range(1, 65):
                assert abs(cost_coeff_quadrature(p, j)) <= c / j**2

    def test_resolution_validation(self):
        with pytest.raises(ValueError):
            cost_coeff_quadrature(2.0, 1, resolution=1000)
        with pytest.raises(ValueError):
            cost_coeff_quadrature(2.0, 1, resolution=512)

    def test_stable_across_resolutions(self):
        for p in (1.25, 2.5):
            a = cost_coeff_quadrature(p, 11, 1 << 12)
            b = cost_coeff_quadrature(p, 11, 1 << 14)
            assert abs(a - b) <= 1e-13


class TestTensorGridQuadrature:
    @pytest.mark.parametrize("pair", [(0, 0), (1, 0), (0, 3), (1, 1), (2, 5)])
    def test_matches_p2_closed_forms(self, pair):
        got = cost_coeff_quadrature_2d(2.0, pair)
        assert got == pytest.approx(cost_coeff_closed(2, pair), abs=1e-12)

    def test_general_p_converges(self):
        for p in (1.0, 1.5):
            a = cost_coeff_quadrature_2d(p, (1, 1), 128)
            b = cost_coeff_quadrature_2d(p, (1, 1), 256)
            assert abs(a - b) <= 1e-9

    def test_off_axis_values_nonzero_below_two(self):
        # the axis-aligned zeros are a p = 2 separability artifact
        assert abs(cost_coeff_quadrature_2d(1.0, (1, 1))) > 1e-3

    def test_symmetric_in_pair(self):
        a = cost_coeff_quadrature_2d(1.5, (2, 3))
        b = cost_coeff_quadrature_2d(1.5, (3, 2))
        assert a == pytest.approx(b, abs=1e-15)


class TestMeasureTransform:
    def test_mass_at_zero_frequency(self):
        mu = make_measure(Torus(2), seed=1)
        assert measure_transform(mu, [0, 0]) == pytest.approx(1.0, abs=1e-15)

    def test_dirac_at_origin(self):
        mu = dirac(Torus(1), [0.0])
        for j in range(-5, 6):
            assert measure_transform(mu, [j]) == pytest.approx(1.0, abs=1e-15)

    def test_half_shift_cancellation(self):
        mu = DiscreteMeasure(Torus(1), [[0.0], [-0.5]], [0.5, 0.5])
        assert abs(measure_transform(mu, [1])) <= 1e-15

    def test_dimension_check(self):
        mu = make_measure(Torus(2), seed=2)
        with pytest.raises(ValueError):
            measure_transform(mu, [1])


class TestNonvanishingScan:
    def test_p1_zero_set_is_even_nonzero(self):
        report = nonvanishing_scan(1.0, 8)
        assert set(report.zeros) == {-8, -6, -4, -2, 2, 4, 6, 8}

    @pytest.mark.parametrize("p", [1.25, 1.5, 2.0, 2.5, 3.0])
    def test_no_zeros_above_one(self, p):
        report = nonvanishing_scan(p, 64)
        assert report.zeros == ()
        assert min(abs(v) for v in report.values.values()) > 1e-12

    def test_error_budget_small(self):
        report = nonvanishing_scan(1.5, 16)
        assert 0.0 <= report.error_budget <= 1e-13

    def test_csv_and_json(self):
        report = nonvanishing_scan(1.0, 4)
        text = report.to_csv_text()
        assert text.splitlines()[0] == "j,value,is_zero"
        assert len(text.splitlines()) == 1 + 9
        payload = report.to_json_dict()
        assert payload["zeros"] == [-4, -2, 2, 4]


class TestConvolutionIdentity:
    def test_dirac_at_origin_p2(self):
        # the potential of delta_0 is the cost function itself
        err = convolution_identity_check(dirac(Torus(1), [0.0]), 2.0, jmax=16)
        assert err <= 1e-12

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
    def test_random_three_atoms(self, p):
        for seed in range(5):
            mu = make_measure(Torus(1), seed=100 + seed, n_atoms=3)
            err = convolution_identity_check(mu, p, jmax=16)
            assert err <= 1e-8, (p, seed, err)

    def test_torus2_rejected(self):
        with pytest.raises(ValueError):
            convolution_identity_check(make_measure(Torus(2), seed=3), 2.0)


class TestFourierRecover:
    def test_dirac_at_origin(self):
        oracle = SampledPotential.from_measure(dirac(Torus(1), [0.0]), 2.0, 1 << 15)
        recovered = fourier_recover(oracle, 16)
        for j in range(-16, 17):
            assert recovered[j] == pytest.approx(1.0, abs=1e-6)

    def test_two_atom_quarter_shift(self):
        mu = DiscreteMeasure(Torus(1), [[0.0], [0.25]], [0.5, 0.5])
        oracle = SampledPotential.from_measure(mu, 2.0, 1 << 12)
        recovered = fourier_recover(oracle, 4)
        assert recovered[1] == pytest.approx(0.5 - 0.5j, abs=1e-6)

    def test_matches_measure_transform(self):
        for seed in range(3):
            mu = make_measure(Torus(1), seed=200 + seed, n_atoms=4)
            oracle = SampledPotential.from_measure(mu, 1.5, 1 << 15)
            recovered = fourier_recover(oracle, 16)
            for j in range(-16, 17):
                assert recovered[j] == pytest.approx(
                    measure_transform(mu, [j]), abs=1e-6
                )

    def test_p1_unrecoverable_at_even_frequencies(self):
        mu = make_measure(Torus(1), seed=4, n_atoms=2)
        oracle = SampledPotential.from_measure(mu, 1.0, 1 << 12)
        with pytest.raises(UnrecoverableFrequencyError) as exc:
            fourier_recover(oracle, 2)
        assert 2 in exc.value.frequencies

    def test_p1_small_jmax_recoverable(self):
        mu = DiscreteMeasure(Torus(1), [[0.0], [0.3]], [0.5, 0.5])
        oracle = SampledPotential.from_measure(mu, 1.0, 1 << 12)
        recovered = fourier_recover(oracle, 1)
        assert recovered[1] == pytest.approx(measure_transform(mu, [1]), abs=1e-5)

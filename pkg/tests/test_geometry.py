import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crownvol.errors import DomainError
from crownvol.geometry import (
    CrownConfig,
    DeltaGaps,
    DiscConfig,
    ShearCoords,
    XCoords,
    XiCoords,
    action_from_geometry,
    config_from_gaps,
    crown_action,
    Delta_from_x,
    disc_action,
    disc_measure_density,
    gaps_from_config,
    gaps_from_shear,
    kissing_radii,
    kissing_residual,
    log_expm1,
    mu_coefficients,
    s_lengths,
    s_lengths_tangent,
    shear_action,
    shear_action_from_lambdas,
    x_from_Delta,
    x_from_kissing,
    x_from_xi,
    xi_from_shear,
    xi_from_x,
)

from conftest import random_config


def lemma_product(delta):
    d = np.asarray(delta)
    return np.prod(np.expm1(d + np.roll(d, -1)) / np.expm1(d))


class TestGaps:
    def test_simple(self):
        g = gaps_from_config(CrownConfig(3, 3.0, [1.0, 2.0]))
        np.testing.assert_allclose(g.delta, [1.0, 1.0, 1.0])

    def test_single_cusp(self):
        g = gaps_from_config(CrownConfig(1, 2.0))
        np.testing.assert_allclose(g.delta, [2.0])

    def test_round_trip(self, rng):
        c = random_config(rng, 6, 2.5)
        back = config_from_gaps(gaps_from_config(c))
        assert back.n == c.n and back.P == pytest.approx(c.P)
        np.testing.assert_allclose(back.Delta, c.Delta, rtol=1e-14)

    def test_sum_is_P(self, rng):
        c = random_config(rng, 7, 1.3)
        assert gaps_from_config(c).P == pytest.approx(1.3, rel=1e-12)

    @pytest.mark.parametrize("D", [[0.5, 0.5], [-0.1, 1.0], [1.0, 3.5]])
    def test_invalid_config(self, D):
        with pytest.raises(DomainError):
            CrownConfig(3, 3.0, D)

    def test_invalid_gaps(self):
        with pytest.raises(DomainError):
            DeltaGaps([1.0, 0.0, 2.0])


class TestLogExpm1:
    @pytest.mark.parametrize("a", [1e-300, 1e-12, 1e-3, 0.5, 1.0, 1.0000001, 5.0, 40.0, 700.0])
    def test_against_direct(self, a):
        import mpmath
        ref = float(mpmath.log(mpmath.expm1(mpmath.mpf(a))))
        assert log_expm1(a) == pytest.approx(ref, rel=1e-14)

    def test_large_argument_finite(self):
        assert math.isfinite(log_expm1(1e4))


class TestCrownAction:
    def test_symmetric_n3(self):
        P = 1.7
        g = DeltaGaps([P / 3] * 3)
        expect = 3 * math.log(math.expm1(2 * P / 3)) - 3 * math.log(math.expm1(P / 3))
        assert crown_action(g) == pytest.approx(expect, rel=1e-14)

    def test_linear_in_kappa(self, rng):
        g = gaps_from_config(random_config(rng, 5, 2.0))
        assert crown_action(g, 2.0) == pytest.approx(2 * crown_action(g, 1.0), rel=1e-15)

    def test_cyclic_covariance(self, rng):
        g = gaps_from_config(random_config(rng, 6, 3.0))
        a = crown_action(g)
        for k in range(1, 6):
            assert crown_action(g.rotate(k)) == pytest.approx(a, rel=1e-13)

    def test_batch(self, rng):
        d = rng.uniform(0.1, 1.0, (5, 4))
        batch = crown_action(d)
        assert batch.shape == (5,)
        assert batch[2] == pytest.approx(crown_action(DeltaGaps(d[2])), rel=1e-15)

    def test_large_gaps_finite(self):
        assert math.isfinite(crown_action(DeltaGaps([600.0, 650.0, 700.0])))

    def test_even_n_flat_direction(self, rng):
        # shifting all odd Delta's by the same amount leaves the integrand fixed
        c = CrownConfig(4, 2.0, [0.4, 1.0, 1.5])
        g0 = gaps_from_config(c)
        c2 = CrownConfig(4, 2.0, [0.5, 1.0, 1.6])
        g1 = gaps_from_config(c2)
        num0 = np.sum(np.log(np.expm1(g0.delta + np.roll(g0.delta, -1))))
        num1 = np.sum(np.log(np.expm1(g1.delta + np.roll(g1.delta, -1))))
        assert num0 == pytest.approx(num1, rel=1e-14)


class TestKissing:
    @pytest.mark.parametrize("n", [3, 5, 7, 9])
    def test_kissing_condition(self, rng, n):
        c = random_config(rng, n, rng.uniform(0.3, 4.0))
        assert kissing_residual(c, kissing_radii(c)) <= 1e-12

    def test_symmetric_equal_radii(self):
        P = 1.2
        r = kissing_radii(CrownConfig(3, P, [P / 3, 2 * P / 3]))
        # equal up to the dilation that moves cusp i to i+1
        scaled = r.r * np.exp(-np.arange(3) * P / 3)
        np.testing.assert_allclose(scaled, scaled[0], rtol=1e-13)

    def test_quasiperiodic(self, rng):
        c = random_config(rng, 5, 2.0)
        r = kissing_radii(c)
        np.testing.assert_allclose(r.at(np.arange(5, 10)), r.r * math.exp(2.0), rtol=1e-15)
        np.testing.assert_allclose(r.at(-1), r.r[-1] * math.exp(-2.0), rtol=1e-15)

    def test_even_rejected(self):
        with pytest.raises(DomainError):
            kissing_radii(CrownConfig(4, 1.0, [0.2, 0.5, 0.7]))
        with pytest.raises(DomainError):
            action_from_geometry(CrownConfig(2, 1.0, [0.4]))

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_two_forms_of_s(self, rng, n):
        c = random_config(rng, n, rng.uniform(0.3, 4.0))
        r = kissing_radii(c)
        np.testing.assert_allclose(s_lengths(c, r), s_lengths_tangent(r), rtol=1e-12)

    def test_symmetric_s_equal(self):
        P = 2.4
        c = CrownConfig(3, P, [P / 3, 2 * P / 3])
        s = s_lengths(c, kissing_radii(c))
        np.testing.assert_allclose(s, s[0], rtol=1e-13)
        assert action_from_geometry(c, 1.5) == pytest.approx(3 * 1.5 * math.log(s[0]), rel=1e-13)

    @pytest.mark.parametrize("n", [3, 5, 7, 9])
    def test_product_identity_with_half_perimeter(self, rng, n):
        # prod s_i = e^{-P/2} * prod (e^{d_i+d_{i+1}} - 1)/(e^{d_i} - 1)
        for _ in range(10):
            c = random_config(rng, n, rng.uniform(0.3, 4.0))
            s = s_lengths(c, kissing_radii(c))
            lp = lemma_product(gaps_from_config(c).delta)
            assert np.prod(s) * math.exp(c.P / 2) == pytest.approx(lp, rel=1e-10)

    def test_action_from_geometry_offset(self):
        c = CrownConfig(3, 3.0, [0.7, 1.9])
        g = gaps_from_config(c)
        for kappa in (1.0, 0.5):
            assert action_from_geometry(c, kappa) == pytest.approx(crown_action(g, kappa) - kappa * 1.5, rel=1e-13)

    def test_offset_does_not_depend_on_config(self, rng):
        diffs = []
        for _ in range(10):
            c = random_config(rng, 5, 2.2)
            diffs.append(crown_action(gaps_from_config(c)) - action_from_geometry(c))
        np.testing.assert_allclose(diffs, 1.1, atol=1e-12)


class TestXCoords:
    def test_midpoint(self):
        assert x_from_Delta(CrownConfig(2, 3.0, [1.5])).x[0] == pytest.approx(1.0, rel=1e-15)

    def test_near_zero(self):
        assert 0 < x_from_Delta(CrownConfig(2, 3.0, [1e-9])).x[0] < 1e-8

    @pytest.mark.parametrize("n", [3, 5, 4])
    def test_kissing_oracle(self, rng, n):
        c = random_config(rng, n, rng.uniform(0.3, 4.0))
        np.testing.assert_allclose(x_from_kissing(c), x_from_Delta(c).x, rtol=1e-12)
        # independent of the reference horocycle size
        np.testing.assert_allclose(x_from_kissing(c, r0=0.37), x_from_Delta(c).x, rtol=1e-12)

    def test_inverse_points(self):
        c = Delta_from_x(XCoords([1.0]), 2.0)
        assert c.Delta[0] == pytest.approx(1.0, rel=1e-15)
        assert Delta_from_x(XCoords([1e-12]), 2.0).Delta[0] < 1e-11
        assert Delta_from_x(XCoords([1e12]), 2.0).Delta[0] == pytest.approx(2.0, abs=1e-11)

    def test_round_trip_many(self, rng):
        worst = 0.0
        for _ in range(100):
            n = int(rng.integers(2, 9))
            c = random_config(rng, n, rng.uniform(0.1, 6.0))
            back = Delta_from_x(x_from_Delta(c), c.P)
            worst = max(worst, np.max(np.abs(back.Delta - c.Delta)))
        assert worst <= 1e-12

    def test_monotone(self, rng):
        c = random_config(rng, 6, 2.0)
        assert np.all(np.diff(x_from_Delta(c).x) > 0)

    def test_xi(self):
        np.testing.assert_allclose(xi_from_x(XCoords([1.0, 2.0, 3.0])).xi, [1.0, 1.0, 1.0])
        x = XCoords([0.2, 0.9, 1.7])
        np.testing.assert_allclose(x_from_xi(xi_from_x(x)).x, x.x, rtol=1e-15)

    def test_xi_positive(self, rng):
        c = random_config(rng, 8, 3.0)
        assert np.all(xi_from_x(x_from_Delta(c)).xi > 0)

    def test_invalid(self):
        with pytest.raises(DomainError):
            XCoords([1.0, 0.5])
        with pytest.raises(DomainError):
            XiCoords([1.0, -0.5])


def random_shears(rng, n, P):
    y = rng.normal(size=n)
    y[0] = P - y[1:].sum()
    return ShearCoords(y, rng.normal(size=n))


class TestShear:
    def test_equal_shears(self):
        P, n = 2.0, 4
        s = ShearCoords([P / n] * n)
        assert shear_action(s, P, 1.3) == pytest.approx(1.3 * n * math.log(2 * math.cosh(P / (2 * n))), rel=1e-14)

    def test_alpha_independence(self, rng):
        s = random_shears(rng, 5, 1.5)
        shifted = ShearCoords(s.y, s.alpha + 3.0)
        assert shear_action(shifted, 1.5) == shear_action(s, 1.5)
        assert shear_action_from_lambdas(s, 1.5) == pytest.approx(shear_action(s, 1.5), rel=1e-13)
        assert shear_action_from_lambdas(shifted, 1.5) == pytest.approx(shear_action(s, 1.5), rel=1e-13)

    def test_constraint(self):
        with pytest.raises(DomainError):
            shear_action(ShearCoords([0.1, 0.2, 0.3]), 1.0)
        with pytest.raises(DomainError):
            xi_from_shear(ShearCoords([0.1, 0.2, 0.3]), 1.0)

    def test_mu_last_is_one(self):
        mu = mu_coefficients([0.3, -0.2, 0.5])
        assert mu[-1] == 1.0
        # mu_2 = e^{-y_3/2}(1 + e^{y_3})
        assert mu[1] == pytest.approx(math.exp(-0.25) * (1 + math.exp(0.5)))

    def test_xi_positive(self, rng):
        for n in (3, 4, 6):
            assert np.all(xi_from_shear(random_shears(rng, n, 1.1), 1.1).xi > 0)

    def test_spec_point_round_trip(self):
        P = 1.0
        s = ShearCoords([P - 0.4 - 0.1, 0.4, 0.1])
        lem = crown_action(gaps_from_shear(s, P))
        assert lem == pytest.approx(shear_action(s, P) + P / 2, rel=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 7), st.floats(0.1, 5.0), st.integers(0, 2**32 - 1))
    def test_chain_offset_is_half_perimeter(self, n, P, seed):
        s = random_shears(np.random.default_rng(seed), n, P)
        lem = crown_action(gaps_from_shear(s, P))
        assert lem - shear_action(s, P) == pytest.approx(P / 2, abs=1e-9 * max(1.0, abs(lem)))

    def test_flattening_slopes(self):
        # as y_k -> +inf (k >= 2), d log xi_i / d y_k tends to -1 for i < k and 0 beyond
        n, P, k = 5, 1.0, 3
        base = np.array([0.0, 0.2, 30.0, -0.1, 0.0])
        base[0] = P - base[1:].sum()

        def logxi(yk):
            y = base.copy()
            y[k - 1] = yk
            y[0] = P - y[1:].sum()
            return np.log(xi_from_shear(ShearCoords(y), P).xi)

        h = 1e-4
        slope = (logxi(30.0 + h) - logxi(30.0 - h)) / (2 * h)
        # xi_1..xi_{k-2}: -1; xi_{k-1}: depends on e^{y_k/2}; xi_k.. : 0
        assert slope[: k - 2] == pytest.approx(-1.0, abs=1e-6)
        assert np.all(np.abs(slope[k - 1:]) < 1e-6)


class TestDisc:
    def test_n5_formula(self):
        z2, z3 = 0.3, 0.7
        d = DiscConfig(5, [z2, z3])
        expect = math.log(z3 * (1 - z2)) - math.log(z2 * (z3 - z2) * (1 - z3))
        assert disc_action(d) == pytest.approx(expect, rel=1e-14)

    def test_n4_density(self):
        assert disc_measure_density(DiscConfig(4, [0.5])) == pytest.approx(4.0)

    def test_n4_integrand_is_one(self, rng):
        d = DiscConfig(4, [rng.uniform()])
        assert math.exp(-disc_action(d)) * disc_measure_density(d) == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("n", [5, 6, 7, 9])
    def test_integrand_identity(self, rng, n):
        z = np.sort(rng.uniform(0, 1, n - 3))
        d = DiscConfig(n, z)
        g = d.gaps
        expect = 1.0 / np.prod(g[:-1] + g[1:])
        assert math.exp(-disc_action(d)) * disc_measure_density(d) == pytest.approx(expect, rel=1e-12)
        assert disc_measure_density(d) > 0

    def test_flat_direction_even_n(self):
        # shift the even-indexed interior cusps z_2, z_4 of the 6-cusp disc
        d0 = DiscConfig(6, [0.2, 0.4, 0.6])
        d1 = DiscConfig(6, [0.25, 0.4, 0.65])
        f = lambda d: math.exp(-disc_action(d)) * disc_measure_density(d)
        assert f(d0) == pytest.approx(f(d1), rel=1e-14)

    def test_invalid(self):
        with pytest.raises(DomainError):
            DiscConfig(5, [0.6, 0.4])
        with pytest.raises(DomainError):
            DiscConfig(5, [0.5])

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinboson import (
    BathSpec,
    FrequencyGrid,
    bath_integral,
    classify_convergence,
    gamma0_closed_form,
    hurwitz_zeta2,
    is_divergent,
    thermal_coth,
    weight,
)


class TestThermalCoth:
    def test_zero_temperature_is_exactly_one(self):
        assert thermal_coth(1.0, 0.0) == 1.0
        assert np.all(thermal_coth(np.array([0.1, 5.0, 300.0]), 0.0) == 1.0)

    def test_small_argument_series(self):
        # coth(u) ~ 1/u + u/3 for u = x/(2 theta)
        val = thermal_coth(0.01, 1.0)
        assert val == pytest.approx(200.0 + 0.005 / 3.0, rel=1e-10)
        assert val == pytest.approx(200.0017, abs=5e-4)

    def test_large_argument_asymptote(self):
        assert thermal_coth(50.0, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            thermal_coth(0.0, 1.0)
        with pytest.raises(ValueError):
            thermal_coth(-1.0, 0.5)

    @given(
        x=st.floats(min_value=1e-6, max_value=300.0),
        theta=st.floats(min_value=1e-3, max_value=100.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_bounds_and_reference(self, x, theta):
        val = thermal_coth(x, theta)
        assert val >= 1.0
        ref = 1.0 / math.tanh(x / (2.0 * theta))
        assert val == pytest.approx(ref, rel=1e-12)

    def test_monotonicity(self):
        xs = np.linspace(0.05, 20.0, 200)
        vals = thermal_coth(xs, 1.0)
        assert np.all(np.diff(vals) < 0)  # decreasing in x
        thetas = np.linspace(0.1, 10.0, 100)
        vals_t = np.array([thermal_coth(1.0, th) for th in thetas])
        assert np.all(np.diff(vals_t) > 0)  # increasing in theta


class TestWeight:
    def test_values(self):
        assert weight(1.0, BathSpec(d=3, lam=1.0)) == pytest.approx(math.exp(-1.0))
        assert weight(1.0, BathSpec(d=2, lam=0.25)) == pytest.approx(0.25 * math.exp(-1.0))

    def test_low_frequency_divergence_d1(self):
        # exponent d-2 = -1: grows like lam/x
        b = BathSpec(d=1, lam=1.0)
        assert weight(1e-8, b) == pytest.approx(1e8, rel=1e-6)

    def test_positive_and_domain(self):
        b = BathSpec(d=2, lam=0.5)
        xs = np.geomspace(1e-6, 50.0, 100)
        assert np.all(weight(xs, b) > 0)
        with pytest.raises(ValueError):
            weight(-1.0, b)


class TestBathSpecValidation:
    @pytest.mark.parametrize("kwargs", [
        {"d": 0, "lam": 1.0},
        {"d": 4, "lam": 1.0},
        {"d": 3, "lam": 0.0},
        {"d": 3, "lam": -1.0},
        {"d": 3, "lam": 1.0, "theta": -0.1},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            BathSpec(**kwargs)


class TestFrequencyGrid:
    def test_invariants(self, grid_default):
        assert np.all(np.diff(grid_default.nodes) > 0)
        assert np.all(grid_default.weights > 0)
        assert grid_default.nodes[0] > 0
        assert grid_default.x_max >= grid_default.nodes[-1]

    def test_exponential_check(self, grid_default):
        val = grid_default.integrate(np.exp(-grid_default.nodes))
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_bad_grids_rejected(self):
        with pytest.raises(ValueError):
            FrequencyGrid(nodes=np.array([2.0, 1.0]), weights=np.array([1.0, 1.0]), x_max=3.0)
        with pytest.raises(ValueError):
            FrequencyGrid(nodes=np.array([1.0, 2.0]), weights=np.array([1.0, -1.0]), x_max=3.0)

    def test_refinement_stability(self):
        # doubling the node count moves a finite integral below tolerance
        bath = BathSpec(d=3, lam=1.0, theta=1.0)
        coarse = FrequencyGrid.build(bath, n_nodes=2000)
        fine = FrequencyGrid.build(bath, n_nodes=4000)
        f = lambda x: np.ones_like(x)
        a = bath_integral(f, bath, coarse, with_coth=True)
        b = bath_integral(f, bath, fine, with_coth=True)
        assert abs(a - b) < 1e-8 * max(1.0, abs(b))


class TestBathIntegral:
    def test_gamma_function_identities(self, grid_default):
        bath = BathSpec(d=3, lam=1.0, theta=0.0)
        # int x^3 e^-x = 6, int x e^-x = 1
        assert bath_integral(lambda x: x**2, bath, grid_default, True, 2) == pytest.approx(6.0, rel=1e-12)
        assert bath_integral(lambda x: np.ones_like(x), bath, grid_default, True) == pytest.approx(1.0, rel=1e-12)

    def test_divergent_returns_flag(self, grid_default):
        bath = BathSpec(d=1, lam=1.0, theta=0.5)
        out = bath_integral(lambda x: np.ones_like(x), bath, grid_default, True, 0)
        assert is_divergent(out)

    def test_matches_closed_form_at_finite_temperature(self, grid_thermal):
        for theta in (0.1, 1.0, 10.0):
            bath = BathSpec(d=3, lam=0.7, theta=theta)
            num = bath_integral(lambda x: np.ones_like(x), bath, grid_thermal, True)
            assert num == pytest.approx(gamma0_closed_form(theta, 0.7), rel=1e-6)


class TestClassifyConvergence:
    # the single-qubit integrand family has f-exponent 0
    @pytest.mark.parametrize("d,theta,finite", [
        (1, 0.0, False),
        (1, 1.0, False),
        (2, 0.0, True),
        (2, 1.0, False),
        (3, 0.0, True),
        (3, 1.0, True),
    ])
    def test_single_qubit_table(self, d, theta, finite):
        verdict = classify_convergence(0, BathSpec(d=d, lam=1.0, theta=theta), with_coth=True)
        assert verdict.finite is finite

    def test_individual_pair_finite_in_ohmic_bath(self):
        # sin^2 factor gives f-exponent 2
        verdict = classify_convergence(2, BathSpec(d=1, lam=1.0, theta=1.0), with_coth=True)
        assert verdict.finite and verdict.exponent == 0

    def test_finite_iff_exponent_above_minus_one(self):
        verdict = classify_convergence(1, BathSpec(d=1, lam=1.0, theta=0.0), with_coth=False)
        assert verdict.finite == (verdict.exponent > -1)


class TestHurwitzZeta:
    def test_basel(self):
        assert hurwitz_zeta2(1.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-13)

    def test_half(self):
        # zeta(2, 1/2) = 3 zeta(2)
        assert hurwitz_zeta2(0.5) == pytest.approx(math.pi**2 / 2.0, rel=1e-13)

    def test_large_argument(self):
        for a in (1e3, 1e6):
            assert hurwitz_zeta2(a) == pytest.approx(1.0 / a, rel=1e-3)

    def test_against_mpmath(self):
        mpmath = pytest.importorskip("mpmath")
        for a in (0.01, 0.37, 1.0, 2.5, 17.0, 123.0):
            ref = float(mpmath.zeta(2, a))
            assert hurwitz_zeta2(a) == pytest.approx(ref, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            hurwitz_zeta2(0.0)


class TestGamma0ClosedForm:
    def test_zero_temperature(self):
        assert gamma0_closed_form(0.0, 0.25) == 0.25

    def test_theta_one(self):
        assert gamma0_closed_form(1.0, 1.0) == pytest.approx(math.pi**2 / 3.0 - 1.0, rel=1e-12)

    def test_low_temperature_expansion(self):
        # Gamma0 ~ lam * (1 + pi^2/3 theta^2); the next order is O(theta^3)
        val = gamma0_closed_form(0.01, 1.0)
        assert val == pytest.approx(1.0 + (math.pi**2 / 3.0) * 1e-4, rel=1e-4)

    def test_high_temperature_limit(self):
        assert gamma0_closed_form(100.0, 1.0) / 100.0 == pytest.approx(2.0, rel=0.01)

    def test_monotone_in_theta(self):
        thetas = np.linspace(0.0, 20.0, 81)
        vals = [gamma0_closed_form(t, 0.5) for t in thetas]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

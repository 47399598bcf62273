import math

import numpy as np
import pytest

from shrinktarget.windows import (WSpec, WindowSpec, chi, chi_window,
                                  chi_window_hat, comb_window,
                                  comb_window_hat, comb_window_hat_abs_sum,
                                  comb_window_hat_multiple, dist_to_int,
                                  intersection_measure, simpson_fourier,
                                  target_intervals)

QUAD_TOL = 1e-8


class TestChi:
    def test_inside(self):
        assert chi(0.1, 0.2) == 1.0

    def test_wraparound(self):
        assert chi(0.9, 0.2) == 1.0  # ||0.9|| = 0.1

    def test_outside(self):
        assert chi(0.5, 0.2) == 0.0


class TestChiWindow:
    def test_upper_outer_breakpoint_is_zero(self):
        spec = WindowSpec(0.1, 0.5, "upper")
        assert chi_window((1 + 0.5) * 0.1, spec) == pytest.approx(0.0, abs=1e-15)

    def test_lower_at_zero(self):
        assert chi_window(0.0, WindowSpec(0.2, 0.3, "lower")) == 1.0

    def test_upper_midpoint_linear(self):
        d, e = 0.1, 0.5
        spec = WindowSpec(d, e, "upper")
        assert chi_window(d * (1 + e / 2), spec) == pytest.approx(0.5)

    def test_sandwich(self):
        rng = np.random.default_rng(31)
        x = rng.random(2000)
        for d, e in [(0.05, 0.3), (0.2, 1.0), (0.24, 0.01)]:
            lo = chi_window(x, WindowSpec(d, e, "lower"))
            mid = chi(x, d)
            up = chi_window(x, WindowSpec(d, e, "upper"))
            assert np.all(lo <= mid + 1e-12) and np.all(mid <= up + 1e-12)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            WindowSpec(0.3, 0.5, "upper")
        with pytest.raises(ValueError):
            WindowSpec(0.1, 0.0, "upper")


class TestChiWindowHat:
    def test_zeroth_coefficients(self):
        assert chi_window_hat(0, WindowSpec(0.1, 0.5, "upper")) == pytest.approx(
            2.5 * 0.1)
        assert chi_window_hat(0, WindowSpec(0.1, 0.5, "lower")) == pytest.approx(
            1.5 * 0.1)

    def test_cosine_difference_formula(self):
        k, d, e = 3, 0.1, 0.5
        want = (math.cos(2 * math.pi * k * d)
                - math.cos(2 * math.pi * k * d * (1 + e))) / (
            2 * math.pi ** 2 * k ** 2 * d * e)
        assert chi_window_hat(k, WindowSpec(d, e, "upper")) == pytest.approx(want)

    def test_against_quadrature(self):
        spec = WindowSpec(0.1, 0.5, "upper")
        got = chi_window_hat(3, spec)
        quad = simpson_fourier(lambda x: chi_window(x, spec), 3)
        assert abs(got - quad) <= QUAD_TOL

    def test_random_draws_against_quadrature(self):
        # piecewise-linear integrands leave Simpson with O(h^2) kink error,
        # so random high-k draws are held to 1e-6, not the smooth-case 1e-8
        rng = np.random.default_rng(37)
        for _ in range(20):
            d = rng.uniform(0.01, 0.24)
            e = rng.uniform(0.05, 1.0)
            k = int(rng.integers(-12, 13))
            for sign in ("upper", "lower"):
                spec = WindowSpec(d, e, sign)
                got = chi_window_hat(k, spec)
                quad = simpson_fourier(lambda x: chi_window(x, spec), k)
                assert abs(got - quad) <= 1e-6


class TestCombWindow:
    def test_peak_value(self):
        w = WSpec(5, 0.0, 0.5, 0.05)
        assert comb_window(1 / 5, w, "upper") == 1.0

    def test_far_from_centers(self):
        w = WSpec(5, 0.0, 0.5, 0.05)
        assert comb_window(0.5, w, "upper") == 0.0  # midway between 2/5 and 3/5

    def test_matches_direct_periodic_sum(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            q = int(rng.integers(4, 30))
            w = WSpec(q, float(rng.random()), float(rng.uniform(0.1, 1)),
                      float(rng.uniform(0.05, 0.99)))
            xs = rng.random(50)
            for sign in ("upper", "lower"):
                direct = np.zeros_like(xs)
                spec = WindowSpec(w.psi_q / q, w.eps, sign)
                for p in range(q):
                    direct += chi_window(xs - (p + w.gamma) / q, spec)
                got = comb_window(xs, w, sign)
                assert np.allclose(got, direct, atol=1e-12)


class TestCombWindowHat:
    def test_zeroth(self):
        w = WSpec(9, 0.2, 0.25, 0.6)
        assert comb_window_hat(0, w, "upper") == pytest.approx((2 + 0.25) * 0.6)
        assert comb_window_hat(0, w, "lower") == pytest.approx((2 - 0.25) * 0.6)

    def test_off_lattice_vanishes(self):
        w = WSpec(9, 0.2, 0.25, 0.6)
        for k in (1, 5, 8, 10, 17):
            assert comb_window_hat(k, w, "upper") == 0

    def test_integral_equals_zeroth_coefficient(self):
        w = WSpec(7, 0.3, 0.5, 0.25)
        for sign in ("upper", "lower"):
            quad = simpson_fourier(lambda x: comb_window(x, w, sign), 0)
            assert abs(quad - comb_window_hat(0, w, sign)) <= QUAD_TOL

    def test_lattice_values_against_quadrature(self):
        rng = np.random.default_rng(43)
        for _ in range(15):
            q = int(rng.integers(4, 24))
            w = WSpec(q, float(rng.random()), float(rng.uniform(0.1, 1)),
                      float(rng.uniform(0.05, 0.99)))
            s = int(rng.integers(-3, 4))
            for sign in ("upper", "lower"):
                got = comb_window_hat(s * q, w, sign)
                quad = simpson_fourier(lambda x: comb_window(x, w, sign), s * q)
                assert abs(got - quad) <= 1e-6

    def test_coefficient_bounds_random(self):
        rng = np.random.default_rng(47)
        for _ in range(1000):
            w = WSpec(int(rng.integers(4, 1000)), float(rng.random()),
                      float(rng.uniform(0.01, 1)), float(rng.uniform(0.01, 1)))
            s = int(rng.integers(1, 1000))
            for sign in ("upper", "lower"):
                v = abs(comb_window_hat_multiple(s, w, sign))
                assert v <= (2 + w.eps) * w.psi_q + 1e-12
                assert v <= 1 / (math.pi ** 2 * s ** 2 * w.psi_q * w.eps) + 1e-12


class TestAbsSum:
    def test_below_three_over_sqrt_eps(self):
        rng = np.random.default_rng(53)
        for _ in range(200):
            w = WSpec(int(rng.integers(4, 1000)), float(rng.random()),
                      float(rng.uniform(0.01, 1)), float(rng.uniform(0.01, 1)))
            cap = max(1000, math.ceil(1 / (math.pi * w.psi_q * math.sqrt(w.eps))))
            for sign in ("upper", "lower"):
                total = comb_window_hat_abs_sum(w, sign, cap)
                assert total < 3 / math.sqrt(w.eps)

    def test_eps_one_below_three(self):
        w = WSpec(11, 0.4, 1.0, 0.3)
        assert comb_window_hat_abs_sum(w, "upper", 1000) <= 3.0

    def test_stable_under_doubling_cap(self):
        w = WSpec(13, 0.1, 0.5, 0.2)
        a = comb_window_hat_abs_sum(w, "upper", 2000)
        b = comb_window_hat_abs_sum(w, "upper", 4000)
        assert abs(a - b) <= 1e-9 + 2 / (math.pi ** 2 * 0.2 * 0.5 * 2000)

    def test_cap_precondition(self):
        w = WSpec(13, 0.1, 0.25, 0.01)
        with pytest.raises(ValueError):
            comb_window_hat_abs_sum(w, "upper", 50)


class TestTargetIntervals:
    def test_q4_gamma0(self):
        iv = target_intervals(4, 0.0, 0.125)
        assert len(iv) == 5
        assert sum(hi - lo for lo, hi in iv) == pytest.approx(0.25)

    def test_saturation(self):
        assert target_intervals(7, 0.3, 0.5) == [(0.0, 1.0)]

    def test_gamma_half_q2(self):
        iv = target_intervals(2, 0.5, 0.1)
        centers = [(lo + hi) / 2 for lo, hi in iv]
        assert centers == pytest.approx([0.25, 0.75])

    def test_total_length(self):
        rng = np.random.default_rng(59)
        for _ in range(50):
            q = int(rng.integers(1, 40))
            psi = float(rng.uniform(0, 0.49))
            iv = target_intervals(q, float(rng.random()), psi)
            assert sum(hi - lo for lo, hi in iv) == pytest.approx(
                min(1.0, 2 * psi), abs=1e-12)

    def test_membership_matches_distance(self):
        rng = np.random.default_rng(61)
        for _ in range(20):
            q = int(rng.integers(1, 30))
            gamma = float(rng.random())
            psi = float(rng.uniform(0, 0.45))
            iv = target_intervals(q, gamma, psi)
            xs = rng.random(300)
            inside = np.zeros(xs.size, dtype=bool)
            for lo, hi in iv:
                inside |= (xs >= lo) & (xs <= hi)
            want = dist_to_int(q * xs - gamma) <= psi
            assert np.array_equal(inside, want)


class TestIntersection:
    def test_same_q(self):
        assert intersection_measure(5, 5, 0.0, 0.2, 0.2) == pytest.approx(0.4)

    def test_coprime_product_rule(self):
        # for coprime q, q2 and small psi the measure is close to 4 psi psi'
        q, q2 = 5, 7
        psi, psi2 = 0.02, 0.03
        got = intersection_measure(q, q2, 0.0, psi, psi2)
        # the only overlap is the shared cell at 0: measure 2 min(psi/q, psi2/q2)
        assert got == pytest.approx(2 * min(psi / q, psi2 / q2))
        err = abs(got - 4 * psi * psi2)
        assert err <= 2.0 * min(psi / q, psi2 / q2)  # recorded constant c = 2

    def test_degenerate_psi(self):
        assert intersection_measure(5, 7, 0.3, 0.0, 0.0) == pytest.approx(0.0)

    def test_symmetry_and_monotonicity(self):
        rng = np.random.default_rng(67)
        for _ in range(30):
            q, q2 = int(rng.integers(2, 30)), int(rng.integers(2, 30))
            g = float(rng.random())
            p1, p2 = float(rng.uniform(0, 0.5)), float(rng.uniform(0, 0.5))
            a = intersection_measure(q, q2, g, p1, p2)
            b = intersection_measure(q2, q, g, p2, p1)
            assert a == pytest.approx(b, abs=1e-12)
            bigger = intersection_measure(q, q2, g, min(1.0, p1 * 1.5), p2)
            assert bigger >= a - 1e-12

import math
import random

import numpy as np
import pytest

from shrinktarget.arith import (FactoredNat, PrimeBasis, baker_wustholz_constant,
                                gcd, gcd_ratio_log, is_prime,
                                log2_pow_sqrt_sup, minimal_solution_count_bound,
                                minimal_solutions, smooth_count,
                                smooth_count_bound)

B23 = PrimeBasis((2, 3))
LN2 = math.log(2)


def brute_smooth_count(primes, x):
    """Oracle: count smooth numbers <= x by direct nested loops."""
    count = 0
    stack = [(0, 1)]
    while stack:
        i, prod = stack.pop()
        if i == len(primes):
            count += 1
            continue
        while prod <= x:
            stack.append((i + 1, prod))
            prod *= primes[i]
    return count


class TestPrimeBasis:
    def test_rejects_composites(self):
        with pytest.raises(ValueError):
            PrimeBasis((2, 9))

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            PrimeBasis((3, 2))

    def test_factor_with_extra(self):
        v = B23.factor(24 * 7)
        assert v.exponents == (3, 1) and v.extra == (7, 1)
        assert v.value() == 168

    def test_factor_rejects_two_extras(self):
        with pytest.raises(ValueError):
            B23.factor(5 * 7)


class TestGcd:
    def test_componentwise_min(self):
        a = B23.from_exponents((3, 1))
        b = B23.from_exponents((1, 2))
        assert gcd(a, b).exponents == (1, 1)

    def test_disjoint_supports(self):
        a = B23.from_exponents((5, 0))
        b = B23.from_exponents((0, 4))
        assert gcd(a, b).is_one()

    def test_big_values_against_bigint_oracle(self):
        a = B23.from_exponents((100, 0), extra=(7, 1))
        b = B23.from_exponents((40, 0), extra=(11, 1))
        g = gcd(a, b)
        assert g.value() == math.gcd(a.value(), b.value()) == 2 ** 40

    def test_random_pairs_match_bigint_gcd(self):
        rng = random.Random(7)
        for _ in range(200):
            a = B23.from_exponents((rng.randrange(30), rng.randrange(20)))
            b = B23.from_exponents((rng.randrange(30), rng.randrange(20)))
            assert gcd(a, b).value() == math.gcd(a.value(), b.value())

    def test_algebraic_properties(self):
        rng = random.Random(3)
        vals = [B23.from_exponents((rng.randrange(8), rng.randrange(8)))
                for _ in range(30)]
        for a, b in zip(vals, vals[1:]):
            assert gcd(a, b).exponents == gcd(b, a).exponents
            assert gcd(a, a).exponents == a.exponents
            g = gcd(a, b)
            assert all(x <= y for x, y in zip(g.exponents, a.exponents))
            assert all(x <= y for x, y in zip(g.exponents, b.exponents))
        for a, b, c in zip(vals, vals[1:], vals[2:]):
            assert gcd(gcd(a, b), c).exponents == gcd(a, gcd(b, c)).exponents


class TestGcdRatioLog:
    def test_power_pair(self):
        a = B23.from_exponents((3, 0))
        b = B23.from_exponents((5, 0))
        assert gcd_ratio_log(a, b) == pytest.approx(-2 * LN2, abs=1e-14)

    def test_self_is_zero(self):
        q = B23.from_exponents((4, 7))
        assert gcd_ratio_log(q, q) == 0.0

    def test_random_pairs_against_oracle(self):
        rng = random.Random(11)
        extras = [None, (5, 1), (7, 2)]
        for _ in range(300):
            a = B23.from_exponents((rng.randrange(40), rng.randrange(25)),
                                   rng.choice(extras))
            b = B23.from_exponents((rng.randrange(40), rng.randrange(25)),
                                   rng.choice(extras))
            want = math.log(math.gcd(a.value(), b.value())) - math.log(b.value())
            assert gcd_ratio_log(a, b) == pytest.approx(want, abs=1e-10)

    def test_log_value_consistency_below_2_256(self):
        rng = random.Random(13)
        for _ in range(200):
            a = B23.from_exponents((rng.randrange(80), rng.randrange(60)))
            if a.log() < 256 * LN2:
                assert a.log() == pytest.approx(math.log(a.value()), rel=1e-10)


class TestSmoothCount:
    def test_example_2_3_to_10(self):
        assert smooth_count(B23, 10) == 7  # 1,2,3,4,6,8,9

    def test_x_equal_1(self):
        assert smooth_count(PrimeBasis((5, 7)), 1) == 1

    def test_single_prime(self):
        assert smooth_count(PrimeBasis((2,)), 8) == 4  # 1,2,4,8

    def test_rejects_x_below_1(self):
        with pytest.raises(ValueError):
            smooth_count(B23, 0.5)

    @pytest.mark.parametrize("primes", [(2,), (2, 3), (2, 3, 5), (3, 7, 11)])
    def test_against_brute_force(self, primes):
        basis = PrimeBasis(primes)
        for x in (1, 2, 17, 1000, 10 ** 6):
            assert smooth_count(basis, x) == brute_smooth_count(primes, x)

    def test_bound_examples(self):
        assert smooth_count_bound(2, 10) == pytest.approx(15.298, abs=1e-3)
        assert smooth_count_bound(1, 2) == pytest.approx(2.0)
        assert smooth_count(PrimeBasis((2,)), 2) == 2


class TestSmoothCountBound:
    def test_dominates_exact_count(self):
        rng = random.Random(5)
        pool = [2, 3, 5, 7, 11, 13]
        for _ in range(40):
            k = rng.randrange(1, 5)
            primes = tuple(sorted(rng.sample(pool, k)))
            x = rng.uniform(2, 10 ** 6)
            basis = PrimeBasis(primes)
            assert smooth_count(basis, x) <= smooth_count_bound(k, x)

    def test_big_x(self):
        assert smooth_count(B23, 10 ** 6) <= smooth_count_bound(2, 10 ** 6)


class TestMinimalSolutions:
    def test_example_k2(self):
        assert minimal_solutions(B23, 2) == {(2, 0), (0, 1)}

    def test_bound_1(self):
        assert minimal_solutions(B23, 1) == {(1, 0), (0, 1)}

    def test_antichain_and_cardinality(self):
        rng = random.Random(17)
        pool = [2, 3, 5, 7, 11, 13, 17]
        for _ in range(100):
            k = rng.randrange(1, 5)
            basis = PrimeBasis(tuple(sorted(rng.sample(pool, k))))
            bound = rng.uniform(1, 10 ** 6)
            sols = minimal_solutions(basis, bound)
            assert len(sols) <= minimal_solution_count_bound(k, bound)
            cap = math.log2(bound) + 1 if bound > 1 else 1
            for t in sols:
                assert sum(t) <= cap + 1e-9
            # antichain under componentwise <=
            for s in sols:
                for t in sols:
                    if s != t:
                        assert not all(a <= b for a, b in zip(s, t))

    def test_exhaustive_equality_small(self):
        rng = random.Random(23)
        pool = [2, 3, 5, 7]
        for _ in range(30):
            k = rng.randrange(1, 4)
            primes = tuple(sorted(rng.sample(pool, k)))
            basis = PrimeBasis(primes)
            bound = rng.randrange(1, 101)
            got = minimal_solutions(basis, bound)
            # oracle: enumerate everything with exponents <= log2(bound)+2
            cap = int(math.log2(bound)) + 2
            all_tuples = [()]
            for _ in range(k):
                all_tuples = [t + (e,) for t in all_tuples for e in range(cap + 1)]

            def prod(t):
                v = 1
                for p, e in zip(primes, t):
                    v *= p ** e
                return v

            want = set()
            for t in all_tuples:
                if prod(t) > bound:
                    if all(t[i] == 0 or prod(t) // primes[i] <= bound
                           for i in range(k)):
                        want.add(t)
            assert got == want


class TestConstants:
    def test_sup_constant_s0(self):
        assert log2_pow_sqrt_sup(0) == 1.0

    def test_sup_constant_values(self):
        assert log2_pow_sqrt_sup(1) == pytest.approx(2 / (math.e * LN2), rel=1e-12)
        assert log2_pow_sqrt_sup(2) == pytest.approx((4 / (math.e * LN2)) ** 2,
                                                     rel=1e-12)

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0, 3.5])
    def test_sup_constant_against_grid_maximization(self, s):
        x = np.exp(np.linspace(0, math.log(10 ** 6), 200001))
        vals = np.log2(np.maximum(x, 1.0 + 1e-15)) ** s / np.sqrt(x)
        assert log2_pow_sqrt_sup(s) >= vals.max() - 1e-9

    def test_sup_constant_dominates_random_points(self):
        rng = np.random.default_rng(29)
        x = rng.uniform(1, 10 ** 9, 10 ** 4)
        for s in (0.5, 1.0, 2.0):
            vals = np.log2(x) ** s / np.sqrt(x)
            assert log2_pow_sqrt_sup(s) >= vals.max()

    def test_linear_forms_constant(self):
        assert baker_wustholz_constant(1) == pytest.approx(
            18 * 2 * 1 * 32 ** 3 * LN2, rel=1e-12)
        assert baker_wustholz_constant(1) == pytest.approx(8.177e5, rel=1e-3)
        assert baker_wustholz_constant(2) == pytest.approx(
            18 * 6 * 8 * 32 ** 4 * math.log(4), rel=1e-12)
        assert baker_wustholz_constant(2) == pytest.approx(1.256e9, rel=1e-3)

    def test_linear_forms_constant_monotone(self):
        vals = [baker_wustholz_constant(n) for n in range(1, 11)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestPrimality:
    def test_small_values(self):
        primes_below_100 = [n for n in range(100) if is_prime(n)]
        assert primes_below_100 == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37,
                                    41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
                                    89, 97]

    def test_carmichael_and_big(self):
        assert not is_prime(561)
        assert not is_prime(2 ** 61)
        assert is_prime(2 ** 61 - 1)

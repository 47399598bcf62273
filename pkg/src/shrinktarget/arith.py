"""Exact factored-integer arithmetic over a fixed prime basis.

Values are kept as exponent vectors over a declared basis of primes, plus at
most one extra prime factor outside the basis.  This representation supports
exact gcds and log-magnitude arithmetic for integers far beyond machine or
even practical big-int range (exponents in the hundreds of thousands occur in
the block-sequence constructions).

The module also houses the small number-theoretic quantities the toolkit
needs in closed form: counts of smooth numbers, the (log X)^k upper bound for
them, minimal exponent solutions of sum(a_i log p_i) > log K, and two explicit
constants (the sup of (log2 x)^s / sqrt(x), and the Baker-Wustholz linear
forms in logarithms constant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

__all__ = [
    "PrimeBasis",
    "FactoredNat",
    "gcd",
    "gcd_ratio_log",
    "smooth_count",
    "smooth_count_bound",
    "minimal_solutions",
    "minimal_solution_count_bound",
    "log2_pow_sqrt_sup",
    "baker_wustholz_constant",
    "is_prime",
]

LN2 = math.log(2)

# relative tolerance allowed between a stored log and the exact log of the
# represented integer; comparisons closer than LOG_TIE fall back to exact
# exponent arithmetic
LOG_RELTOL = 1e-12
LOG_TIE = 1e-9


class BasisMismatchError(ValueError):
    """Two factored values do not share the same prime basis."""


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeBasis:
    """An ordered set of distinct primes; the exponent-vector coordinate system."""

    primes: tuple[int, ...]

    def __post_init__(self):
        ps = tuple(int(p) for p in self.primes)
        if len(ps) < 1:
            raise ValueError("basis needs at least one prime")
        if any(ps[i] >= ps[i + 1] for i in range(len(ps) - 1)):
            raise ValueError("basis primes must be strictly increasing")
        for p in ps:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "primes", ps)
        object.__setattr__(self, "_logs", tuple(math.log(p) for p in ps))

    @property
    def k(self) -> int:
        return len(self.primes)

    @property
    def logs(self) -> tuple[float, ...]:
        return self._logs  # type: ignore[attr-defined]

    def one(self) -> "FactoredNat":
        return FactoredNat(self, (0,) * self.k)

    def from_exponents(self, exps: Sequence[int],
                       extra: Optional[tuple[int, int]] = None) -> "FactoredNat":
        return FactoredNat(self, tuple(int(e) for e in exps), extra)

    def factor(self, n: int) -> "FactoredNat":
        """Factor n over the basis; at most one leftover prime is allowed."""
        if n < 1:
            raise ValueError("positive integers only")
        exps = []
        for p in self.primes:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            exps.append(e)
        extra = None
        if n > 1:
            if not is_prime(n):
                raise ValueError(f"cofactor {n} is not a single prime")
            extra = (n, 1)
        return FactoredNat(self, tuple(exps), extra)


@dataclass(frozen=True)
class FactoredNat:
    """A positive integer prod p_i^{a_i} * p^e with p outside the basis.

    Immutable; the natural log of the value is cached on construction
    (relative error <= 1e-12).  Exact big-int materialization is available
    through .value(), guarded by a bit cap since exponents can be enormous.
    """

    basis: PrimeBasis
    exponents: tuple[int, ...]
    extra: Optional[tuple[int, int]] = None  # (prime, exponent >= 1)
    log_value: float = field(init=False, compare=False)

    def __post_init__(self):
        if len(self.exponents) != self.basis.k:
            raise ValueError("exponent vector length does not match basis")
        if any(e < 0 for e in self.exponents):
            raise ValueError("exponents must be nonnegative")
        if self.extra is not None:
            p, e = self.extra
            if e < 1:
                raise ValueError("extra exponent must be >= 1")
            if p in self.basis.primes:
                raise ValueError("extra prime must lie outside the basis")
            if not is_prime(p):
                raise ValueError(f"extra factor {p} is not prime")
        lv = sum(a * lp for a, lp in zip(self.exponents, self.basis.logs))
        if self.extra is not None:
            lv += self.extra[1] * math.log(self.extra[0])
        object.__setattr__(self, "log_value", lv)

    # -- basic queries ----------------------------------------------------
    def log(self) -> float:
        return self.log_value

    def log2(self) -> float:
        return self.log_value / LN2

    def bit_size(self) -> int:
        return int(self.log_value / LN2) + 1

    def value(self, max_bits: int = 1 << 22) -> int:
        """Materialize the exact integer (refuses above max_bits bits)."""
        if self.log_value / LN2 > max_bits:
            raise OverflowError(
                f"value has about {self.log_value / LN2:.0f} bits; cap is {max_bits}")
        v = 1
        for p, a in zip(self.basis.primes, self.exponents):
            v *= p ** a
        if self.extra is not None:
            v *= self.extra[0] ** self.extra[1]
        return v

    def value_mod(self, mod: int) -> int:
        """The exact integer reduced mod `mod` (cheap even for huge values)."""
        v = 1
        for p, a in zip(self.basis.primes, self.exponents):
            v = v * pow(p, a, mod) % mod
        if self.extra is not None:
            v = v * pow(self.extra[0], self.extra[1], mod) % mod
        return v

    def prime_factors(self) -> list[tuple[int, int]]:
        out = [(p, a) for p, a in zip(self.basis.primes, self.exponents) if a > 0]
        if self.extra is not None:
            out.append(self.extra)
        return sorted(out)

    def is_one(self) -> bool:
        return all(e == 0 for e in self.exponents) and self.extra is None

    # -- arithmetic --------------------------------------------------------
    def mul(self, other: "FactoredNat") -> "FactoredNat":
        self._check_basis(other)
        exps = tuple(a + b for a, b in zip(self.exponents, other.exponents))
        if self.extra is None:
            extra = other.extra
        elif other.extra is None:
            extra = self.extra
        elif self.extra[0] == other.extra[0]:
            extra = (self.extra[0], self.extra[1] + other.extra[1])
        else:
            raise ValueError("product would carry two extra primes")
        return FactoredNat(self.basis, exps, extra)

    def times_prime(self, i: int) -> "FactoredNat":
        exps = list(self.exponents)
        exps[i] += 1
        return FactoredNat(self.basis, tuple(exps), self.extra)

    def _check_basis(self, other: "FactoredNat") -> None:
        if self.basis.primes != other.basis.primes:
            raise BasisMismatchError(
                f"bases differ: {self.basis.primes} vs {other.basis.primes}")

    # -- exact comparisons ---------------------------------------------------
    def _cmp_exact(self, other: "FactoredNat") -> int:
        """Exact comparison via big-int cross-multiplication of the ratio."""
        num, den = 1, 1
        for p, a, b in zip(self.basis.primes, self.exponents, other.exponents):
            if a > b:
                num *= p ** (a - b)
            elif b > a:
                den *= p ** (b - a)
        for e, sign in ((self.extra, +1), (other.extra, -1)):
            if e is not None:
                if sign > 0:
                    num *= e[0] ** e[1]
                else:
                    den *= e[0] ** e[1]
        return (num > den) - (num < den)

    def cmp(self, other: "FactoredNat") -> int:
        """-1/0/+1; float logs decide unless they sit within the tie band."""
        self._check_basis(other)
        d = self.log_value - other.log_value
        scale = max(1.0, abs(self.log_value), abs(other.log_value))
        if abs(d) > LOG_TIE * scale:
            return -1 if d < 0 else 1
        return self._cmp_exact(other)

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __str__(self):
        parts = [f"{p}^{a}" for p, a in zip(self.basis.primes, self.exponents) if a]
        if self.extra is not None:
            parts.append(f"{self.extra[0]}^{self.extra[1]}")
        return "*".join(parts) if parts else "1"


def gcd(a: FactoredNat, b: FactoredNat) -> FactoredNat:
    """Exact gcd: componentwise exponent minimum; extras match only by prime."""
    a._check_basis(b)
    exps = tuple(min(x, y) for x, y in zip(a.exponents, b.exponents))
    extra = None
    if a.extra is not None and b.extra is not None and a.extra[0] == b.extra[0]:
        extra = (a.extra[0], min(a.extra[1], b.extra[1]))
    return FactoredNat(a.basis, exps, extra)


def gcd_ratio_log(a: FactoredNat, b: FactoredNat) -> float:
    """ln(gcd(a, b) / b), computed in exponent space (always <= 0)."""
    a._check_basis(b)
    out = 0.0
    for lp, x, y in zip(a.basis.logs, a.exponents, b.exponents):
        if x < y:
            out += (x - y) * lp
    if b.extra is not None:
        p, e = b.extra
        ematch = a.extra[1] if (a.extra is not None and a.extra[0] == p) else 0
        if ematch < e:
            out += (ematch - e) * math.log(p)
    return out


def smooth_count(basis: PrimeBasis, x: float) -> int:
    """Exact count of basis-smooth integers <= x, counting 1.

    Nested exponent enumeration; comparisons against x are exact (the partial
    products are exact integers, and int-vs-float comparison in Python is
    exact), so boundary values are never miscounted.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    primes = basis.primes

    def rec(i: int, prod: int) -> int:
        if i == len(primes):
            return 1
        total = 0
        p = primes[i]
        while prod <= x:
            total += rec(i + 1, prod)
            prod *= p
        return total

    return rec(0, 1)


def smooth_count_bound(k: int, x: float) -> float:
    """(2/ln 2) * (ln x)^k, an upper bound for smooth_count when x >= 2."""
    if x < 2:
        raise ValueError("bound is stated for x >= 2")
    if k < 1:
        raise ValueError("k must be >= 1")
    return (2.0 / LN2) * math.log(x) ** k


def minimal_solutions(basis: PrimeBasis, bound: float) -> set[tuple[int, ...]]:
    """All minimal exponent tuples with prod p_i^{a_i} > bound.

    Minimal: decrementing any positive coordinate makes the product <= bound.
    Comparisons use exact integer products against the (real) bound, so there
    is no log rounding at the boundary.  Every minimal tuple has coordinate
    sum <= log2(bound) + 1, which also caps the enumeration.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    primes = basis.primes
    k = len(primes)
    # every minimal solution has coordinate sum <= log2(bound) + 1
    budget = (int(math.log2(bound)) if bound > 1 else 0) + 2
    out: set[tuple[int, ...]] = set()

    def _is_minimal(t: tuple[int, ...]) -> bool:
        prod = 1
        for p, a in zip(primes, t):
            prod *= p ** a
        if prod <= bound:
            return False
        for idx, a in enumerate(t):
            if a > 0 and prod // primes[idx] > bound:
                return False
        return True

    def enum(i: int, prefix: list[int], left: int):
        if i == k:
            t = tuple(prefix)
            if _is_minimal(t):
                out.add(t)
            return
        for a in range(left + 1):
            enum(i + 1, prefix + [a], left - a)

    enum(0, [], budget)
    return out


def minimal_solution_count_bound(k: int, bound: float) -> int:
    """(floor(log2 K) + 2)^(k-1): cap on the number of minimal solutions."""
    return (int(math.log2(bound)) + 2) ** (k - 1) if k > 1 else 1


def log2_pow_sqrt_sup(s: float) -> float:
    """max(1, (2s/(e ln 2))^s), dominating sup_{x>=1} (log2 x)^s / sqrt(x).

    The unclamped expression is the interior maximum (at x = e^{2s}); the
    clamp keeps the constant usable as an upper envelope for small s.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    if s == 0:
        return 1.0
    return max(1.0, (2 * s / (math.e * LN2)) ** s)


def baker_wustholz_constant(n: int) -> float:
    """18 (n+1)! n^{n+1} 32^{n+2} log(2n), natural log.

    Overflow-safe: evaluated in log domain and exponentiated, so values for
    large n come back as +inf only when they genuinely exceed float range.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lg = (math.log(18.0) + math.lgamma(n + 2) + (n + 1) * math.log(n)
          + (n + 2) * math.log(32.0) + math.log(math.log(2 * n)))
    return math.exp(lg)

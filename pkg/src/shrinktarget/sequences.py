"""Denominator sequences: generation, validation, serialization.

A SeqRecord is a strictly increasing sequence of positive integers, each held
either as a FactoredNat (exponent vector over a prime basis, possibly with
one extra prime) or as a plain int for sequences that do not factor over a
small basis.  Generators cover smooth sequences, geometric sequences,
continued-fraction convergent denominators, the two-prime block construction
with its pathological psi, and prime-perturbed smooth sequences.  Validators
check lacunarity, the log-growth condition, alpha-separation and the
prime-divisor condition.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .arith import FactoredNat, PrimeBasis, is_prime
from .psi import ApproxFn

__all__ = [
    "SeqRecord",
    "ResourceError",
    "gen_smooth",
    "gen_geometric",
    "convergent_denominators",
    "drop_small",
    "check_lacunary",
    "check_growth",
    "check_alpha_separated",
    "enumerate_violations",
    "naive_alpha_violations",
    "check_property_d",
    "build_appendix_c",
    "strict_block_start",
    "perturb_smooth",
    "AppendixCArtifact",
]

LN2 = math.log(2)

Term = Union[FactoredNat, int]


class ResourceError(RuntimeError):
    """A requested construction exceeds the configured memory budget."""


def _term_log(t: Term) -> float:
    return t.log() if isinstance(t, FactoredNat) else math.log(t)


def _term_value(t: Term, max_bits: int = 1 << 22) -> int:
    return t.value(max_bits) if isinstance(t, FactoredNat) else t


def _term_lt(a: Term, b: Term) -> bool:
    if isinstance(a, FactoredNat) and isinstance(b, FactoredNat):
        return a < b
    # mixed or raw: exact through ints when feasible, logs otherwise
    la, lb = _term_log(a), _term_log(b)
    if abs(la - lb) > 1e-9 * max(1.0, abs(la), abs(lb)):
        return la < lb
    return _term_value(a) < _term_value(b)


@dataclass
class SeqRecord:
    """Strictly increasing denominator sequence with provenance metadata."""

    terms: tuple
    kind: str = "custom"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = tuple(self.terms)
        if not self.terms:
            raise ValueError("sequence must be nonempty")
        for i in range(len(self.terms) - 1):
            if not _term_lt(self.terms[i], self.terms[i + 1]):
                raise ValueError(f"terms not strictly increasing at index {i + 1}")
        self._logs: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    @property
    def factored(self) -> bool:
        return isinstance(self.terms[0], FactoredNat)

    @property
    def basis(self) -> Optional[PrimeBasis]:
        return self.terms[0].basis if self.factored else None

    def logs(self) -> np.ndarray:
        """Natural logs of all terms, cached."""
        if self._logs is None:
            self._logs = np.array([_term_log(t) for t in self.terms])
        return self._logs

    def values(self, n: Optional[int] = None, max_bits: int = 1 << 22) -> list[int]:
        n = len(self.terms) if n is None else n
        return [_term_value(t, max_bits) for t in self.terms[:n]]

    def exponent_data(self):
        """(N x k exponent matrix, extra primes, extra exps) for factored terms."""
        if not self.factored:
            raise TypeError("sequence terms are not factored")
        n = len(self.terms)
        k = self.basis.k
        mat = np.zeros((n, k), dtype=np.int64)
        ep = np.zeros(n, dtype=np.int64)
        ee = np.zeros(n, dtype=np.int64)
        for i, t in enumerate(self.terms):
            mat[i] = t.exponents
            if t.extra is not None:
                ep[i], ee[i] = t.extra
        return mat, ep, ee

    # -- serialization -------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"# kind: {self.kind}"]
        if self.meta:
            lines.append("# meta: " + json.dumps(self.meta, sort_keys=True))
        if self.factored:
            lines.append("# basis: " + " ".join(map(str, self.basis.primes)))
            for t in self.terms:
                row = " ".join(map(str, t.exponents))
                if t.extra is not None:
                    row += f" {t.extra[0]}^{t.extra[1]}"
                lines.append(row)
        else:
            lines.append("# values")
            lines.extend(str(_term_value(t)) for t in self.terms)
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "SeqRecord":
        kind, meta, basis = "custom", {}, None
        terms: list = []
        raw = False
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("kind:"):
                    kind = body[5:].strip()
                elif body.startswith("meta:"):
                    meta = json.loads(body[5:].strip())
                elif body.startswith("basis:"):
                    basis = PrimeBasis(tuple(int(p) for p in body[6:].split()))
                elif body == "values":
                    raw = True
                continue
            if raw:
                terms.append(int(line))
            else:
                if basis is None:
                    raise ValueError(f"line {ln}: term before basis header")
                parts = line.split()
                extra = None
                if "^" in parts[-1]:
                    p, e = parts[-1].split("^")
                    extra = (int(p), int(e))
                    parts = parts[:-1]
                if len(parts) != basis.k:
                    raise ValueError(f"line {ln}: expected {basis.k} exponents")
                terms.append(basis.from_exponents([int(x) for x in parts], extra))
        if not terms:
            raise ValueError("no terms found in sequence file")
        return SeqRecord(tuple(terms), kind, meta)

    def to_json(self) -> str:
        obj = {"kind": self.kind, "meta": self.meta}
        if self.factored:
            obj["basis"] = list(self.basis.primes)
            obj["terms"] = [
                {"exponents": list(t.exponents),
                 **({"extra": list(t.extra)} if t.extra else {})}
                for t in self.terms]
        else:
            obj["values"] = [_term_value(t) for t in self.terms]
        return json.dumps(obj, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "SeqRecord":
        obj = json.loads(text)
        if "values" in obj:
            terms: Sequence = [int(v) for v in obj["values"]]
        else:
            basis = PrimeBasis(tuple(obj["basis"]))
            terms = [basis.from_exponents(t["exponents"],
                                          tuple(t["extra"]) if "extra" in t else None)
                     for t in obj["terms"]]
        return SeqRecord(tuple(terms), obj.get("kind", "custom"), obj.get("meta", {}))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_smooth(basis: PrimeBasis, count: Optional[int] = None,
               log_cap: Optional[float] = None) -> SeqRecord:
    """First `count` basis-smooth integers (or all with ln q <= log_cap).

    k-way merge over multiply-by-p frontiers with duplicate suppression;
    starts at 1.  The heap is keyed by float logs with the exponent tuple as
    an exact tie-breaker, so the output order is exact.
    """
    if count is None and log_cap is None:
        raise ValueError("need a count or a log cap")
    k = basis.k
    logs = basis.logs
    start = (0,) * k
    heap: list[tuple[float, tuple[int, ...]]] = [(0.0, start)]
    seen = {start}
    out: list[FactoredNat] = []
    while heap:
        lg, exps = heapq.heappop(heap)
        if log_cap is not None and lg > log_cap + 1e-12:
            break
        out.append(basis.from_exponents(exps))
        if count is not None and len(out) >= count:
            break
        for i in range(k):
            nxt = exps[:i] + (exps[i] + 1,) + exps[i + 1:]
            if nxt not in seen:
                lg2 = sum(a * l for a, l in zip(nxt, logs))
                if log_cap is None or lg2 <= log_cap + 1e-12:
                    seen.add(nxt)
                    heapq.heappush(heap, (lg2, nxt))
    return SeqRecord(tuple(out), "smooth", {"primes": list(basis.primes)})


def _factor_small(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def gen_geometric(q0: int, ratio: int, count: int) -> SeqRecord:
    """q0, q0*ratio, ..., q0*ratio^(count-1); exactly lacunary with K = ratio."""
    if q0 < 2 or ratio < 2 or count < 1:
        raise ValueError("need q0 >= 2, ratio >= 2, count >= 1")
    f0, fr = _factor_small(q0), _factor_small(ratio)
    basis = PrimeBasis(tuple(sorted(set(f0) | set(fr))))
    exps = [f0.get(p, 0) for p in basis.primes]
    step = [fr.get(p, 0) for p in basis.primes]
    terms = []
    for i in range(count):
        terms.append(basis.from_exponents([a + i * s for a, s in zip(exps, step)]))
    return SeqRecord(tuple(terms), "geometric", {"K": float(ratio), "q0": q0})


def convergent_denominators(partial_quotients: Sequence[int]) -> SeqRecord:
    """Denominators q_n of the convergents of [0; a1, a2, ...], n >= 1."""
    if not partial_quotients or any(a < 1 for a in partial_quotients):
        raise ValueError("partial quotients must be positive integers")
    qs = []
    q_prev, q = 1, 0  # q_0 = 1, q_{-1} = 0
    for a in partial_quotients:
        q_prev, q = a * q_prev + q, q_prev
        qs.append(q_prev)
    return SeqRecord(tuple(qs), "convergents",
                     {"quotients_max": max(partial_quotients)})


def drop_small(seq: SeqRecord, threshold: int) -> SeqRecord:
    """Remove leading terms <= threshold (small denominators distort counts)."""
    i = 0
    while i < len(seq) and _term_value(seq.terms[i]) <= threshold:
        i += 1
    if i == len(seq):
        raise ValueError(f"all terms are <= {threshold}")
    meta = dict(seq.meta)
    meta["dropped_leq"] = threshold
    return SeqRecord(seq.terms[i:], seq.kind, meta)


# ---------------------------------------------------------------------------
# validators
# ---------------------------------------------------------------------------

@dataclass
class LacunarityReport:
    ratio: float          # inf over n of q_{n+1}/q_n
    argmin: int           # 1-based n attaining the minimum
    lacunary: bool        # ratio > 1


def check_lacunary(seq: SeqRecord) -> LacunarityReport:
    if len(seq) < 2:
        raise ValueError("need at least two terms")
    logs = seq.logs()
    gaps = np.diff(logs)
    i = int(np.argmin(gaps))
    ratio = math.exp(gaps[i])
    return LacunarityReport(ratio, i + 1, ratio > 1.0)


@dataclass
class GrowthReport:
    ok: bool
    witness: Optional[int]  # first n >= 2 with ln q_n <= C n^(1/B)


def check_growth(seq: SeqRecord, B: float, C: float) -> GrowthReport:
    """ln q_n > C n^(1/B) for all 2 <= n <= len(seq)?"""
    if len(seq) < 2 or B < 1 or C <= 0:
        raise ValueError("need len >= 2, B >= 1, C > 0")
    logs = seq.logs()
    n = np.arange(1, len(seq) + 1, dtype=float)
    bad = np.nonzero(logs[1:] <= C * n[1:] ** (1.0 / B))[0]
    if bad.size:
        return GrowthReport(False, int(bad[0]) + 2)
    return GrowthReport(True, None)


# -- alpha-separation --------------------------------------------------------

@dataclass
class ViolationClass:
    """One arithmetic progression of violating multipliers for a pair (m, n).

    All s == s_min (mod period) with s_min <= s <= s_limit violate the
    separation condition with gap |s q_m - t q_n| = gap; the matching t is
    determined by s and steps by q_m/gcd per period step.  The full set of
    violating (s, t) pairs is usually astronomically large, so it is kept in
    this closed form; `enumerate_violations` expands any finite window.
    """
    m: int
    n: int
    qm: int
    qn: int
    gap: int          # the achieved |s q_m - t q_n|
    sign: int         # +1: s q_m - t q_n = +gap; -1: = -gap
    period: int       # = q_n / gcd(q_m, q_n)
    s_min: int        # smallest admissible s in the class
    t_min: int        # matching t for s_min
    s_limit: int      # = m^12 (inclusive upper bound on s)
    count: int        # number of violating s in [s_min, s_limit]


@dataclass
class SeparationReport:
    alpha: float
    pair_limit: int
    classes: list
    observed_m0: int  # max violating m (0 if none)

    @property
    def separated(self) -> bool:
        return not self.classes

    def violating_pairs(self) -> set[tuple[int, int]]:
        return {(c.m, c.n) for c in self.classes}


def _alpha_cutoff_count(qm: int, g: int, alpha) -> int:
    """Largest c with c*g < qm^alpha (0 if none).

    Exact integer comparison when alpha is a Fraction with a small
    denominator; float comparison (measure-zero tie risk) otherwise.
    """
    if isinstance(alpha, Fraction) and alpha.denominator <= 64:
        num, den = alpha.numerator, alpha.denominator
        c = int(math.exp(float(alpha) * math.log(qm)) / g) + 2
        while c >= 1 and (c * g) ** den >= qm ** num:
            c -= 1
        return max(0, c)
    x = math.exp(float(alpha) * math.log(qm)) / g
    c = int(x)
    return c - 1 if c == x else c


def check_alpha_separated(seq: SeqRecord, alpha, pair_limit: Optional[int] = None,
                          s_exponent: int = 12) -> SeparationReport:
    """Find all violations of the separation condition on a prefix.

    A violation is (m, n, s, t) with m < n, s <= m^12, t >= 1 and
    1 <= |s q_m - t q_n| < q_m^alpha.  For each pair the violating s form
    a union of arithmetic progressions mod q_n/gcd; these are returned as
    ViolationClass records (exact, without enumeration).

    Works per residue value c = |s q_m - t q_n| / g, solving
    s = +-c * (q_m/g)^(-1) mod (q_n/g); cost is proportional to
    q_m^alpha / g per pair rather than m^12.
    """
    n_terms = len(seq) if pair_limit is None else min(pair_limit, len(seq))
    vals = seq.values(n_terms)
    classes: list[ViolationClass] = []
    for mn in range(2, n_terms + 1):
        qn = vals[mn - 1]
        for mm in range(1, mn):
            qm = vals[mm - 1]
            s_limit = mm ** s_exponent
            g = math.gcd(qm, qn)
            a, b = qm // g, qn // g
            cmax = _alpha_cutoff_count(qm, g, alpha)
            if cmax == 0:
                continue
            ainv = pow(a, -1, b)
            for c in range(1, cmax + 1):
                gap = c * g
                for sign in (+1, -1):
                    s0 = (sign * c * ainv) % b
                    if s0 == 0:
                        s0 = b
                    # t >= 1 forces s q_m >= q_n + sign*gap
                    lo = max(1, -(-(qn + sign * gap) // qm))
                    s_min = s0 + ((lo - s0 + b - 1) // b) * b if lo > s0 else s0
                    if s_min > s_limit:
                        continue
                    t_min = (s_min * qm - sign * gap) // qn
                    cnt = (s_limit - s_min) // b + 1
                    classes.append(ViolationClass(
                        mm, mn, qm, qn, gap, sign, b, s_min, t_min, s_limit, cnt))
    m0 = max((c.m for c in classes), default=0)
    return SeparationReport(float(alpha), n_terms, classes, m0)


def enumerate_violations(report: SeparationReport, s_cap: int) -> set[tuple]:
    """Expand class records into explicit (m, n, s, t) tuples with s <= s_cap."""
    out: set[tuple] = set()
    for c in report.classes:
        hi = min(c.s_limit, s_cap)
        s, t = c.s_min, c.t_min
        t_step = c.qm // math.gcd(c.qm, c.qn)
        while s <= hi:
            out.add((c.m, c.n, s, t))
            s += c.period
            t += t_step
    return out


def naive_alpha_violations(seq: SeqRecord, alpha, pair_limit: int,
                           s_cap: int, s_exponent: int = 12) -> set[tuple]:
    """Brute-force oracle: loop s directly; returns (m, n, s, t) tuples.

    Only the nearest integers t can achieve a gap below q_m^alpha < q_n, so
    each s is checked against floor and ceiling of s q_m / q_n.
    """
    n_terms = min(pair_limit, len(seq))
    vals = seq.values(n_terms)
    out: set[tuple] = set()
    for mn in range(2, n_terms + 1):
        qn = vals[mn - 1]
        for mm in range(1, mn):
            qm = vals[mm - 1]
            limit = min(mm ** s_exponent, s_cap)
            cut = _alpha_cutoff_count(qm, 1, alpha)  # gaps must be <= cut
            if cut == 0:
                continue
            for s in range(1, limit + 1):
                base = (s * qm) // qn
                for t in (base, base + 1):
                    if t < 1:
                        continue
                    gap = abs(s * qm - t * qn)
                    if 1 <= gap <= cut:
                        out.add((mm, mn, s, t))
    return out


# -- prime-divisor condition ---------------------------------------------------

@dataclass
class PropertyDReport:
    ok: bool
    growth_ok: bool
    growth_witness: Optional[int]
    divisor_ok: bool
    witnesses: list  # (n, prime, reason) for failures of condition (ii)


def check_property_d(seq: SeqRecord, D: int, eps: float, n0: int = 1,
                     B: float = 1.0, C: float = 0.25) -> PropertyDReport:
    """Growth condition plus bounded prime divisors with sub-power logs.

    For all n >= n0: at most D distinct prime divisors, and every prime
    divisor p of q_n satisfies ln p <= (ln q_n)^((1-eps)/(2D)).
    Requires factored terms (prime divisors must be known exactly).
    """
    if not seq.factored:
        raise TypeError("property check needs factored terms")
    if not (0 < eps < 1) or D < 1:
        raise ValueError("need D >= 1 and eps in (0, 1)")
    growth = check_growth(seq, B, C)
    expo = (1.0 - eps) / (2 * D)
    witnesses = []
    for idx in range(max(n0, 1), len(seq) + 1):
        t = seq.terms[idx - 1]
        pf = t.prime_factors()
        if len(pf) > D:
            witnesses.append((idx, None, f"{len(pf)} distinct primes > D={D}"))
            continue
        cap = t.log() ** expo
        for p, _ in pf:
            if math.log(p) > cap:
                witnesses.append((idx, p, f"ln {p} > (ln q)^{expo:.4g}"))
    div_ok = not witnesses
    return PropertyDReport(growth.ok and div_ok, growth.ok, growth.witness,
                           div_ok, witnesses)


# ---------------------------------------------------------------------------
# two-prime block construction (power-of-two blocks seeded with odd primes)
# ---------------------------------------------------------------------------

def _sieve_odd_primes(limit: int) -> np.ndarray:
    """Odd primes in [3, limit]."""
    if limit < 3:
        return np.empty(0, dtype=np.int64)
    isp = np.ones(limit + 1, dtype=bool)
    isp[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if isp[p]:
            isp[p * p::p] = False
    primes = np.nonzero(isp)[0]
    return primes[primes >= 3].astype(np.int64)


def strict_block_start() -> int:
    """Smallest n1 with ln ln n1 > 2 ln 2 + 1 (about 5.3e4), by direct search.

    The companion requirement 2 ln n + 2 ln ln n < n^(1/5) only kicks in near
    1.6e8 and is therefore reported as a flag on the artifact rather than
    imposed; at this n1 the three verifiable block invariants already hold.
    """
    th = 2 * LN2 + 1
    n = int(math.exp(math.exp(th))) - 10
    while math.log(math.log(n)) <= th:
        n += 1
    return n


@dataclass
class AppendixCArtifact:
    """The block sequence, its psi table, and the index bookkeeping.

    i1: indices (1-based) of elements with an odd prime factor;
    i2: indices of the pure powers of two (one per block);
    t_of: block number for each i2 index; n_t: block size parameters.
    """
    seq: SeqRecord
    psi: ApproxFn
    i1: list
    i2: list
    t_of: dict
    n_t: list
    mode: str
    regular_log_ok: bool   # ln ln n1 > 2 ln 2 + 1
    prime_log_bound_ok: bool  # 2 ln n + 2 ln ln n < n^(1/5) at n1 (and beyond)

    def block_of_index(self, j: int) -> int:
        return self.t_of[j]


def build_appendix_c(mode: str = "demo", t_max: int = 6,
                     demo_n1: Optional[int] = None,
                     mem_budget_bytes: int = 4 << 30) -> AppendixCArtifact:
    """Build the block sequence 2^{n_t} and 2^{n_t - u_p - 1} p, p odd prime.

    Blocks t = 1..t_max use n_{t+1} = 2 n_t (the minimal admissible doubling
    schedule); block t collects the odd primes up to n_t ln n_t, each placed
    as 2^{n_t - u_p - 1} p with u_p = floor(log2 p), which lands strictly
    between q_t/2 and q_t = 2^{n_t}.  psi is 2^-j off the powers of two and
    1/(t ln t) on them (1 on the first block).
    """
    if t_max < 1:
        raise ValueError("t_max >= 1")
    if mode == "strict":
        n1 = strict_block_start()
    elif mode == "demo":
        n1 = 64 if demo_n1 is None else int(demo_n1)
        if n1 < 8:
            raise ValueError("demo n1 must be >= 8")
    else:
        raise ValueError("mode must be 'strict' or 'demo'")

    # memory guard: about 2 * n_{t_max} elements at ~150 bytes apiece
    est_elems = 2 * n1 * (1 << (t_max - 1))
    if est_elems * 150 > mem_budget_bytes:
        raise ResourceError(
            f"construction would need about {est_elems:.3g} elements; "
            f"reduce t_max or raise the memory budget")

    basis = PrimeBasis((2,))
    terms: list[FactoredNat] = []
    i1: list[int] = []
    i2: list[int] = []
    t_of: dict[int, int] = {}
    n_ts: list[int] = []
    lnpsi: list[float] = []
    nt = n1
    for t in range(1, t_max + 1):
        n_ts.append(nt)
        primes = _sieve_odd_primes(int(nt * math.log(nt)))
        # mantissa p / 2^{u_p} orders the block (exact in float for p < 2^52)
        u = np.array([int(p).bit_length() - 1 for p in primes], dtype=np.int64)
        order = np.argsort(primes / (2.0 ** u), kind="stable")
        for idx in order:
            p, up = int(primes[idx]), int(u[idx])
            terms.append(basis.from_exponents((nt - up - 1,), (p, 1)))
            j = len(terms)
            i1.append(j)
            lnpsi.append(-j * LN2)
        terms.append(basis.from_exponents((nt,)))
        j = len(terms)
        i2.append(j)
        t_of[j] = t
        lnpsi.append(0.0 if t == 1 else -math.log(t * math.log(t)))
        nt *= 2

    seq = SeqRecord(tuple(terms), "appendixC",
                    {"n1": n1, "t_max": t_max, "mode": mode})
    psi = ApproxFn.from_log_table(lnpsi, name="blockwise")
    reg2 = math.log(math.log(n1)) > 2 * LN2 + 1
    f = lambda n: n ** 0.2 - 2 * math.log(n) - 2 * math.log(math.log(n))
    reg1 = f(n1) > 0 and n1 ** 0.2 > 11  # positive and increasing from n1 on
    return AppendixCArtifact(seq, psi, i1, i2, t_of, n_ts, mode, reg2, reg1)


# ---------------------------------------------------------------------------
# prime perturbation of a smooth sequence
# ---------------------------------------------------------------------------

@dataclass
class PerturbResult:
    seq: SeqRecord
    replacements: list  # (replaced_index_1based, source_index_1based, prime)

    @property
    def achieved(self) -> int:
        return len(self.replacements)


def perturb_smooth(base: SeqRecord, reservoir: Sequence[int],
                   count: int) -> PerturbResult:
    """Replace selected terms of a smooth sequence by q_s * p, p a fresh prime.

    Each step takes the next reservoir prime p exceeding both every basis
    prime and the term after the previously replaced one, then the minimal s
    with ln p <= (ln q_s)^(1/(3(k+1))), and replaces the unique term q_t with
    q_t < q_s p < q_{t+1}.  Stops early (partial result) when the reservoir
    or the base runs out; ties of "sufficiently large s" are resolved by
    taking the minimal admissible s, recorded for reproducibility.
    """
    if not base.factored:
        raise TypeError("base must be a factored smooth sequence")
    if any(r.extra is not None for r in base.terms):
        raise ValueError("base terms must be smooth over the basis")
    res = [int(p) for p in reservoir]
    if any(res[i] >= res[i + 1] for i in range(len(res) - 1)):
        raise ValueError("reservoir must be strictly increasing")
    if sum(1.0 / p for p in res) > 1.0 + 1e-12:
        raise ValueError("reservoir reciprocal sum exceeds 1")
    basis = base.basis
    if any(p in basis.primes for p in res):
        raise ValueError("reservoir primes must avoid the basis")
    for p in res:
        if not is_prime(p):
            raise ValueError(f"reservoir entry {p} is not prime")

    k = basis.k
    expo = 1.0 / (3 * (k + 1))
    logs = base.logs()
    terms = list(base.terms)
    replacements: list[tuple[int, int, int]] = []
    min_log_prev = max(math.log(max(basis.primes)),
                       _term_log(base.terms[0]))
    ri = 0
    while len(replacements) < count:
        # next reservoir prime above the previous boundary and the basis
        while ri < len(res) and math.log(res[ri]) <= min_log_prev + 1e-12:
            ri += 1
        if ri >= len(res):
            break
        p = res[ri]
        ri += 1
        # minimal s with (ln q_s)^expo >= ln p, i.e. ln q_s >= (ln p)^(1/expo)
        need = math.log(p) ** (1.0 / expo)
        s_idx = int(np.searchsorted(logs, need))  # 0-based
        if s_idx >= len(terms):
            break
        q_new = base.terms[s_idx].mul(basis.factor(p))
        # unique slot: q_t < q_new < q_{t+1} in the *base* ordering
        t_idx = int(np.searchsorted(logs, q_new.log())) - 1
        if t_idx + 1 >= len(terms):
            break
        terms[t_idx] = q_new
        replacements.append((t_idx + 1, s_idx + 1, p))
        min_log_prev = logs[t_idx + 1]

    meta = dict(base.meta)
    meta["replacements"] = [list(r) for r in replacements]
    return PerturbResult(SeqRecord(tuple(terms), "perturbed", meta), replacements)

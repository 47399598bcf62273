"""Counting functions, gcd error terms, and the Monte-Carlo experiment driver.

The central object is R(x, N) = #{n <= N : ||q_n x - gamma|| <= psi(q_n)},
computed exactly in fixed point: x and gamma are P-bit integers and q_n x
mod 1 is obtained from q_n mod 2^P by one modular multiply per term, so the
count is reliable even when q_n has hundreds of digits.  Around it sit the
partial sums Psi(N), the pairwise gcd error term E(N), per-row gcd sums with
their explicit bound, a Littlewood-type counter along continued-fraction
denominators, star discrepancy, and executable forms of four partial-sum
inequalities used by the variance method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .arith import log2_pow_sqrt_sup
from .measures import Lebesgue, MeasureModel
from .psi import ApproxFn
from .sequences import SeqRecord

__all__ = [
    "HighPrecisionPoint",
    "CountKernel",
    "CountReport",
    "ExperimentResult",
    "count_hits",
    "psi_sum",
    "gcd_error_term",
    "gcd_sum_row",
    "gcd_rows",
    "gcd_row_bound",
    "star_discrepancy",
    "littlewood_count",
    "run_count_experiment",
    "partial_sum_lemmas",
    "SumLemmaRecord",
    "shape_bound",
]

LN2 = math.log(2)


def _philox_words(seed_key, nwords: int) -> list[int]:
    ss = np.random.SeedSequence(entropy=seed_key)
    gen = np.random.Generator(np.random.Philox(ss))
    return [int(w) for w in gen.integers(0, 1 << 64, size=nwords, dtype=np.uint64)]


@dataclass
class HighPrecisionPoint:
    """x and gamma in [0, 1) as P-bit fixed-point integers."""

    x_fp: int
    gamma_fp: int
    bits: int

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError("need at least 64 bits")
        mask = (1 << self.bits) - 1
        if not (0 <= self.x_fp <= mask and 0 <= self.gamma_fp <= mask):
            raise ValueError("fixed-point values out of range")

    @property
    def x_float(self) -> float:
        return (self.x_fp >> (self.bits - 64)) / 2.0 ** 64

    @staticmethod
    def from_floats(x: float, gamma: float, bits: int) -> "HighPrecisionPoint":
        if not (0 <= x < 1 and 0 <= gamma < 1):
            raise ValueError("x and gamma must lie in [0, 1)")
        scale = 1 << bits
        return HighPrecisionPoint(int(x * scale), int(gamma * scale), bits)

    @staticmethod
    def random(seed_key, gamma: float, bits: int) -> "HighPrecisionPoint":
        """Uniform x with full P-bit entropy from the Philox stream."""
        nwords = (bits + 63) // 64
        words = _philox_words(seed_key, nwords)
        x = 0
        for w in words:
            x = (x << 64) | w
        x &= (1 << bits) - 1
        return HighPrecisionPoint(x, int(gamma * (1 << bits)), bits)


def required_bits(seq: SeqRecord, n: int) -> int:
    """Precision invariant: P >= ceil(log2 q_N) + 64."""
    return int(math.ceil(seq.logs()[n - 1] / LN2)) + 64


class CountKernel:
    """Precomputed modular data for counting hits of one (seq, psi, N) triple.

    Shared across samples: q_n mod 2^P per term and the integer thresholds
    floor(psi_n 2^P).  Ties ||q_n x - gamma|| == psi(q_n) count as hits.
    """

    def __init__(self, seq: SeqRecord, psi: ApproxFn, n: int, bits: int):
        if n > len(seq):
            raise ValueError("N exceeds the sequence length")
        need = required_bits(seq, n)
        if bits < need:
            raise ValueError(f"insufficient precision: P={bits}, need P>={need}")
        self.bits = bits
        self.n = n
        mask = (1 << bits) - 1
        self.mask = mask
        logs = seq.logs()
        self.psi_vals = np.array([psi.psi(i + 1, logs[i]) for i in range(n)])
        self.thresholds = [int(p * (1 << bits)) for p in self.psi_vals]
        self.mods = self._term_mods(seq, n, bits)
        # fast path: every term a power of two (single-prime basis {2}, no extras)
        self.pow2_exps: Optional[np.ndarray] = None
        if seq.factored and seq.basis.primes == (2,):
            mat, ep, _ = seq.exponent_data()
            if not ep[:n].any():
                self.pow2_exps = mat[:n, 0].copy()

    @staticmethod
    def _term_mods(seq: SeqRecord, n: int, bits: int) -> list[int]:
        mod = 1 << bits
        mask = mod - 1
        if not seq.factored:
            return [v & mask for v in seq.values(n)]
        basis = seq.basis
        mat, ep, ee = seq.exponent_data()
        tables = []
        for i, p in enumerate(basis.primes):
            top = int(mat[:n, i].max(initial=0))
            tbl = [1] * (top + 1)
            for e in range(1, top + 1):
                tbl[e] = tbl[e - 1] * p & mask
            tables.append(tbl)
        mods = []
        for j in range(n):
            v = 1
            for i in range(basis.k):
                e = int(mat[j, i])
                if e:
                    v = v * tables[i][e] & mask
            if ep[j]:
                v = v * pow(int(ep[j]), int(ee[j]), mod) & mask
            mods.append(v)
        return mods

    def count(self, point: HighPrecisionPoint) -> int:
        if point.bits != self.bits:
            raise ValueError("point precision does not match the kernel")
        if self.pow2_exps is not None:
            return self._count_pow2(point)
        x, g, mask = point.x_fp, point.gamma_fp, self.mask
        half = 1 << (self.bits - 1)
        mod = mask + 1
        r = 0
        for mn, thr in zip(self.mods, self.thresholds):
            v = (mn * x - g) & mask
            if v > half:
                v = mod - v
            if v <= thr:
                r += 1
        return r

    def _count_pow2(self, point: HighPrecisionPoint) -> int:
        """Bit-window path for q_n = 2^{e_n}: frac(q_n x) is a bit slice of x.

        Distances are read from the top 64 bits of the shifted window, which
        bounds each frac to within 2^-64: ample against psi >= n^-2 scales.
        """
        bits = self.bits
        nw = bits // 64
        if bits % 64:
            raise ValueError("pow2 path needs a word-aligned precision")
        xw = np.array([(point.x_fp >> (64 * (nw - 1 - i))) & ((1 << 64) - 1)
                       for i in range(nw)], dtype=np.uint64)
        # bits below the fixed-point precision are zero by definition
        xw = np.append(xw, np.uint64(0))
        e = self.pow2_exps
        if int(e.max()) + 64 > bits:
            raise ValueError("insufficient precision for the largest exponent")
        j = (e >> 6).astype(np.int64)
        r = (e & 63).astype(np.uint64)
        w1 = xw[j]
        w2 = xw[j + 1]
        win = np.where(r == 0, w1, (w1 << r) | (w2 >> (np.uint64(64) - r)))
        g64 = np.uint64((point.gamma_fp >> (bits - 64)) & ((1 << 64) - 1))
        d = win - g64  # wraps mod 2^64
        dist = np.minimum(d, np.uint64(0) - d).astype(np.float64) * 2.0 ** -64
        return int(np.count_nonzero(dist <= self.psi_vals))


def count_hits(point: HighPrecisionPoint, seq: SeqRecord, psi: ApproxFn,
               n: int) -> int:
    """R(x, N): exact hit count of the first n targets at the given point."""
    return CountKernel(seq, psi, n, point.bits).count(point)


def psi_sum(seq: SeqRecord, psi: ApproxFn, n: int) -> float:
    """Psi(N) = sum of psi(q_n), Kahan-compensated; underflow adds zero."""
    if n > len(seq):
        raise ValueError("N exceeds the sequence length")
    logs = seq.logs()
    total = 0.0
    c = 0.0
    for i in range(n):
        lv = psi.psi_log(i + 1, logs[i])
        term = math.exp(lv) if lv > -745 else 0.0
        y = term - c
        t = total + y
        c = (t - total) - y
        total = t
    return total


# ---------------------------------------------------------------------------
# gcd sums
# ---------------------------------------------------------------------------

def _row_gcd_logs(seq: SeqRecord, n_idx: int, mat, ep, ee, logs_p, lnq):
    """ln(gcd(q_m, q_n)/q_n) for all m < n_idx (0-based), vectorized."""
    e_n = mat[n_idx]
    lg = (np.minimum(mat[:n_idx], e_n) * logs_p).sum(axis=1) - lnq[n_idx]
    if ep[n_idx]:
        match = ep[:n_idx] == ep[n_idx]
        lg += np.where(match, np.minimum(ee[:n_idx], ee[n_idx]), 0) * math.log(ep[n_idx])
    return lg


def gcd_sum_row(seq: SeqRecord, n: int) -> float:
    """sum_{m < n} gcd(q_m, q_n) / q_n, exact in exponent space (1-based n)."""
    if not 2 <= n <= len(seq):
        raise ValueError("need 2 <= n <= len(seq)")
    if seq.factored:
        mat, ep, ee = seq.exponent_data()
        logs_p = np.array(seq.basis.logs)
        lnq = seq.logs()
        return float(np.exp(_row_gcd_logs(seq, n - 1, mat, ep, ee, logs_p, lnq)).sum())
    vals = seq.values(n)
    qn = vals[-1]
    return float(sum(math.gcd(v, qn) for v in vals[:-1]) / qn)


def gcd_rows(seq: SeqRecord, n_max: Optional[int] = None) -> np.ndarray:
    """Rows 2..n_max as an array (index 0 is row n=2)."""
    n_max = len(seq) if n_max is None else min(n_max, len(seq))
    if seq.factored:
        mat, ep, ee = seq.exponent_data()
        logs_p = np.array(seq.basis.logs)
        lnq = seq.logs()
        return np.array([
            np.exp(_row_gcd_logs(seq, i, mat, ep, ee, logs_p, lnq)).sum()
            for i in range(1, n_max)])
    return np.array([gcd_sum_row(seq, n) for n in range(2, n_max + 1)])


def gcd_row_bound(k: int) -> float:
    """Explicit bound 2^{2k-1} (C_{k-1} 2^k + 1) for rows of k-prime smooth sequences."""
    if k < 1:
        raise ValueError("k >= 1")
    return 2.0 ** (2 * k - 1) * (log2_pow_sqrt_sup(k - 1) * 2.0 ** k + 1.0)


def gcd_error_term(seq: SeqRecord, psi: ApproxFn, n: int,
                   row_cap: Optional[float] = None) -> float:
    """E(N) = sum_{m<n<=N} gcd(q_m,q_n) min(psi_m/q_m, psi_n/q_n).

    Exact pairwise double sum (O(N^2)); when a row cap is supplied, rows
    whose whole contribution is provably below 1e-18 are skipped.
    """
    if n > len(seq):
        raise ValueError("N exceeds the sequence length")
    logs = seq.logs()
    lnpsi = np.array([psi.psi_log(i + 1, logs[i]) for i in range(n)])
    u = lnpsi - logs[:n]  # ln(psi/q)
    total = 0.0
    if seq.factored:
        mat, ep, ee = seq.exponent_data()
        logs_p = np.array(seq.basis.logs)
        for j in range(1, n):
            if row_cap is not None and lnpsi[j] + math.log(row_cap) < math.log(1e-18):
                continue
            lg_gcd_over_qn = _row_gcd_logs(seq, j, mat, ep, ee, logs_p, logs)
            # gcd * min(psi_m/q_m, psi_n/q_n) = exp(ln gcd + min(u_m, u_n))
            terms = np.exp(lg_gcd_over_qn + logs[j] + np.minimum(u[:j], u[j]))
            total += float(terms.sum())
        return total
    vals = seq.values(n)
    for j in range(1, n):
        qn = vals[j]
        for i in range(j):
            g = math.gcd(vals[i], qn)
            total += g * math.exp(min(u[i], u[j]))
    return total


# ---------------------------------------------------------------------------
# block-construction verification
# ---------------------------------------------------------------------------

@dataclass
class BlockRow:
    t: int
    n_t: int
    j: int               # 1-based index of the power of two closing block t
    row: float           # sum_{m<j} gcd(q_m,q_j)/q_j
    row_bound: float     # (1/4) ln ln n_t
    lhs: float           # sum_{i<=j} psi_i * sum_{m<=i} gcd/q  (log-domain safe)
    psi_cum: float       # sum_{i<=j} psi_i
    ratio: float         # lhs / psi_cum
    c_observed: float    # ln(lhs) / psi_cum
    prime_log_ok: bool   # max ln p <= (min ln q)^(1/5) within the block


@dataclass
class BlockVerification:
    bracket_ok: bool       # q_t/2 < q_{t,p} < q_t for every block element
    growth_ok: bool        # ln q_j > j/4 for every j
    rows_ok: bool          # every block row beats (1/4) ln ln n_t
    ratios_increasing: bool  # lhs/psi strictly increases block to block
    table: list

    @property
    def ok(self) -> bool:
        return self.bracket_ok and self.growth_ok and self.rows_ok


def verify_block_artifact(art) -> BlockVerification:
    """Check the block construction's three invariants and the growth ratio.

    Row sums sweep the sequence once, grouping earlier terms by their power
    of two: gcd(2^a p, 2^b p') = 2^min(a,b) * (p if p = p'), so a per-class
    count gives every row in exponent space at O(L * classes) cost.  psi
    weights below float range drop out of the accumulating lower-bound sum
    only, which cannot overstate the reported lhs.
    """
    seq = art.seq
    mat, ep, _ = seq.exponent_data()
    a_arr = mat[:, 0]
    logs = seq.logs()
    L = len(seq)
    # bracket: p strictly between 2^{u_p} and 2^{u_p+1} <=> q_t/2 < q_{t,p} < q_t
    bracket_ok = True
    for j in range(L):
        p = int(ep[j])
        if p:
            u = p.bit_length() - 1
            if not (1 << u) < p < (1 << (u + 1)):
                bracket_ok = False
    growth_ok = bool(np.all(logs > (np.arange(1, L + 1)) / 4.0))

    counts: dict[int, int] = {}
    prime_hist: dict[int, list] = {}
    lhs = 0.0
    psi_cum = 0.0
    table = []
    i2 = set(art.i2)
    block_start = 0
    rows_ok = True
    for j in range(L):
        aj = int(a_arr[j])
        pj = int(ep[j])
        counts[aj] = counts.get(aj, 0) + 1
        if pj:
            prime_hist.setdefault(pj, []).append(aj)
        # row including the diagonal, grouped by power-of-two class
        base = 0.0
        for a, c in counts.items():
            d = min(a, aj) - aj
            if d > -1074:
                base += c * 2.0 ** d
        if pj:
            row_incl = base / pj
            for a in prime_hist[pj]:
                d = min(a, aj) - aj
                if d > -1074:
                    row_incl += 2.0 ** d * (1.0 - 1.0 / pj)
        else:
            row_incl = base
        lnpsi = art.psi.psi_log(j + 1, logs[j])
        psi_j = math.exp(lnpsi) if lnpsi > -745 else 0.0
        psi_cum += psi_j
        lhs += psi_j * row_incl
        if (j + 1) in i2:
            t = art.t_of[j + 1]
            nt = art.n_t[t - 1]
            bound = 0.25 * math.log(math.log(nt))
            row_excl = row_incl - 1.0
            if row_excl < bound:
                rows_ok = False
            blk = slice(block_start, j + 1)
            pmax = int(ep[blk].max(initial=0))
            plog_ok = bool(pmax and math.log(pmax) <= float(logs[blk].min()) ** 0.2)
            table.append(BlockRow(t, nt, j + 1, row_excl, bound, lhs, psi_cum,
                                  lhs / psi_cum, math.log(lhs) / psi_cum, plog_ok))
            block_start = j + 1
    ratios = [r.ratio for r in table]
    incr = all(ratios[i] < ratios[i + 1] for i in range(len(ratios) - 1))
    return BlockVerification(bracket_ok, growth_ok, rows_ok, incr, table)


# ---------------------------------------------------------------------------
# discrepancy and the Littlewood-type counter
# ---------------------------------------------------------------------------

def star_discrepancy(points: Sequence[float]) -> float:
    """Exact 1-d star discrepancy via the sorted-points formula."""
    x = np.sort(np.asarray(points, dtype=float))
    if x.size == 0:
        raise ValueError("need at least one point")
    if np.any(x < 0) or np.any(x >= 1):
        raise ValueError("points must lie in [0, 1)")
    n = x.size
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(i / n - x, x - (i - 1) / n)))


def littlewood_count(x_quotients: Sequence[int], y: HighPrecisionPoint,
                     n_max: int) -> list[tuple[int, int]]:
    """Counts of {q <= N' : q ||q x|| ||q y - gamma|| <= 1/ln q} at checkpoints.

    x is given by its continued-fraction partial quotients (evaluated to the
    working precision through the convergent ladder); every q is scanned, not
    just denominators of convergents.  Checkpoints are the powers of two
    4, 8, ..., plus n_max itself.  The q = 1 term has threshold 1/ln 1 =
    +inf and always counts.
    """
    if n_max < 4:
        raise ValueError("n_max >= 4")
    bits = y.bits
    if bits < 2 * math.log2(n_max) + 96:
        raise ValueError("precision too small for the additive orbit scan")
    # convergent ladder until the denominator dominates the precision
    p0, p1 = 1, 0  # p_{-1}, p_0
    q0, q1 = 0, 1  # q_{-1}, q_0
    for a in x_quotients:
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        if q1 * q1 > 1 << (bits + 4):
            break
    else:
        raise ValueError("not enough partial quotients for the precision")
    x_fp = (p1 << bits) // q1
    mask = (1 << bits) - 1
    half = 1 << (bits - 1)
    checkpoints = []
    c = 4
    while c < n_max:
        checkpoints.append(c)
        c *= 2
    checkpoints.append(n_max)
    out = []
    tx = ty = 0
    count = 0
    ci = 0
    scale = 2.0 ** -bits
    for q in range(1, n_max + 1):
        tx = (tx + x_fp) & mask
        ty = (ty + y.x_fp) & mask
        dx = (mask + 1 - tx if tx > half else tx) * scale
        dyv = (ty - y.gamma_fp) & mask
        dy = (mask + 1 - dyv if dyv > half else dyv) * scale
        if q == 1 or q * dx * dy <= 1.0 / math.log(q):
            count += 1
        while ci < len(checkpoints) and q == checkpoints[ci]:
            out.append((q, count))
            ci += 1
    return out


# ---------------------------------------------------------------------------
# the experiment driver
# ---------------------------------------------------------------------------

def shape_bound(psi_total: float, err_term: float, shape: str,
                eps: float = 0.1) -> float:
    """Error-shape envelope with unit implied constant.

    thm1: Psi^(2/3) (ln(Psi+2))^(2+eps);
    thm4: (Psi+E)^(1/2) (ln(Psi+E+2))^(2+eps).
    """
    if shape == "thm1":
        return psi_total ** (2.0 / 3.0) * math.log(psi_total + 2) ** (2 + eps)
    if shape == "thm4":
        s = psi_total + err_term
        return math.sqrt(s) * math.log(s + 2) ** (2 + eps)
    raise ValueError("shape must be 'thm1' or 'thm4'")


@dataclass
class CountReport:
    sample: int
    n: int
    hits: int          # R(x, N)
    psi_total: float   # Psi(N)
    err_term: float    # E(N) (0.0 when the thm1 shape was requested)
    residual: float    # R - 2 Psi
    bound: float       # selected error-shape envelope

    def row(self):
        return (self.sample, self.n, self.hits, self.psi_total, self.err_term,
                self.residual, self.bound)


@dataclass
class ExperimentResult:
    reports: list
    psi_total: float
    err_term: float
    shape: str
    eps: float
    median_rel_dev: float      # median |R/(2 Psi) - 1|
    within_bound_frac: float   # fraction with |residual| <= bound
    config: dict = field(default_factory=dict)


def _sample_point(measure, seed, k, gamma, bits,
                  points) -> HighPrecisionPoint:
    if points is not None:
        pt = points[k % len(points)]
        if pt.bits != bits:
            raise ValueError("injected point precision mismatch")
        return pt
    if isinstance(measure, Lebesgue):
        return HighPrecisionPoint.random((seed, k), gamma, bits)
    xs = measure.sample((seed, k), 1)
    return HighPrecisionPoint.from_floats(float(xs[0]), gamma, bits)


def _count_range(kernel, measure, seed, ks, gamma, bits, points):
    return [kernel.count(_sample_point(measure, seed, k, gamma, bits, points))
            for k in ks]


def run_count_experiment(measure: MeasureModel, seq: SeqRecord, gamma: float,
                         psi: ApproxFn, n: int, samples: int, seed: int,
                         shape: str = "thm1", eps: float = 0.1,
                         precision_bits: Optional[int] = None,
                         points: Optional[Sequence[HighPrecisionPoint]] = None,
                         workers: int = 1) -> ExperimentResult:
    """Monte-Carlo counting experiment over measure-distributed sample points.

    Per sample: R(x, N); shared: Psi(N) and (for the thm4 shape) E(N).  The
    within-bound fraction is reported, not asserted: implied constants in the
    error shapes are unknown, so only shapes and trends are meaningful.
    Sample k always draws from the Philox stream keyed by (seed, k), so the
    result is independent of the worker count.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    bits = precision_bits or (required_bits(seq, n) + 63) // 64 * 64
    kernel = CountKernel(seq, psi, n, bits)
    psi_total = psi_sum(seq, psi, n)
    err = gcd_error_term(seq, psi, n) if shape == "thm4" else 0.0
    bnd = shape_bound(psi_total, err, shape, eps)
    if workers > 1 and samples > 1:
        from concurrent.futures import ProcessPoolExecutor
        chunks = [list(range(w, samples, workers)) for w in range(workers)]
        chunks = [c for c in chunks if c]
        with ProcessPoolExecutor(max_workers=len(chunks)) as ex:
            parts = list(ex.map(_count_range, [kernel] * len(chunks),
                                [measure] * len(chunks), [seed] * len(chunks),
                                chunks, [gamma] * len(chunks),
                                [bits] * len(chunks), [points] * len(chunks)))
        counts = dict()
        for ks, rs in zip(chunks, parts):
            counts.update(zip(ks, rs))
        hit_list = [counts[k] for k in range(samples)]
    else:
        hit_list = _count_range(kernel, measure, seed, range(samples), gamma,
                                bits, points)
    reports = []
    for k, r in enumerate(hit_list):
        reports.append(CountReport(k, n, r, psi_total, err,
                                   r - 2 * psi_total, bnd))
    devs = sorted(abs(rep.hits / (2 * psi_total) - 1.0) for rep in reports)
    mid = devs[len(devs) // 2] if samples % 2 else 0.5 * (
        devs[samples // 2 - 1] + devs[samples // 2])
    frac = sum(abs(rep.residual) <= rep.bound for rep in reports) / samples
    return ExperimentResult(reports, psi_total, err, shape, eps, mid, frac,
                            {"gamma": gamma, "N": n, "samples": samples,
                             "seed": seed, "bits": bits})


# ---------------------------------------------------------------------------
# partial-sum inequalities (executable oracles)
# ---------------------------------------------------------------------------

@dataclass
class SumLemmaRecord:
    name: str
    applicable: bool
    lhs: float
    rhs: float
    lower: Optional[float] = None  # only the two-sided inequality has one

    @property
    def ok(self) -> bool:
        tol = 1e-9 * max(1.0, abs(self.lhs), abs(self.rhs))
        if not self.applicable:
            return True
        upper_ok = self.lhs <= self.rhs + tol
        lower_ok = self.lower is None or self.lower <= self.lhs + tol
        return upper_ok and lower_ok


def partial_sum_lemmas(s: Sequence[float], a: int, b: int,
                       gamma: float) -> dict[str, SumLemmaRecord]:
    """Evaluate both sides of the four partial-sum inequalities.

    s is a sequence in [0,1] (1-based in the formulas), S_n its partial sums,
    S~_n = max(gamma, S_n).  Preconditions: 2 <= a < b <= len(s); the
    two-sided bound needs S_{a-1} >= gamma, the reciprocal-square bound needs
    S_{a-1} > 0; records for unmet preconditions say applicable=False.
    """
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("sequence entries must lie in [0, 1]")
    if not (2 <= a < b <= arr.size):
        raise ValueError("need 2 <= a < b <= len(s)")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    S = np.cumsum(arr)
    St = np.maximum(gamma, S)
    Sa1, Sa, Sb = S[a - 2], S[a - 1], S[b - 1]
    out: dict[str, SumLemmaRecord] = {}

    # two-sided: gamma/(gamma+1) (ln S_b - ln S_{a-1}) <= sum s_k/S_k <= .../(gamma ln((gamma+1)/gamma))
    app = Sa1 >= gamma
    if app:
        mid = float(np.sum(arr[a - 1:b] / S[a - 1:b]))
        span = math.log(Sb) - math.log(Sa1)
        out["ratio_two_sided"] = SumLemmaRecord(
            "ratio_two_sided", True, mid,
            span / (gamma * math.log((gamma + 1) / gamma)),
            lower=gamma / (gamma + 1) * span)
    else:
        out["ratio_two_sided"] = SumLemmaRecord("ratio_two_sided", False, 0.0, 0.0)

    # clamped ratio: sum s_k/S~_k < 1 + 1/gamma + (ln S_b - ln S_a)/(gamma ln((gamma+1)/gamma))
    lhs = float(np.sum(arr[a - 1:b] / St[a - 1:b]))
    rhs = math.inf if Sa == 0 else (
        1 + 1 / gamma + (math.log(Sb) - math.log(Sa))
        / (gamma * math.log((gamma + 1) / gamma)))
    out["ratio_clamped"] = SumLemmaRecord("ratio_clamped", True, lhs, rhs)

    # reciprocal squares: sum s_k/S_k^2 <= 1/S_{a-1} - 1/S_b
    app = Sa1 > 0
    if app:
        lhs = float(np.sum(arr[a - 1:b] / S[a - 1:b] ** 2))
        out["square_telescope"] = SumLemmaRecord(
            "square_telescope", True, lhs, 1.0 / Sa1 - 1.0 / Sb)
    else:
        out["square_telescope"] = SumLemmaRecord("square_telescope", False, 0.0, 0.0)

    # clamped squares over the whole range: sum s_k/S~_k^2 < (2 gamma + 1)/gamma^2
    lhs = float(np.sum(arr / St ** 2))
    out["square_clamped"] = SumLemmaRecord(
        "square_clamped", True, lhs, (2 * gamma + 1) / gamma ** 2)
    return out

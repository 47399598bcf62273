"""Approximating functions psi as evaluable objects.

A psi assigns a target radius in (0, 1] to each term of a denominator
sequence.  It may depend on the term's value (e.g. 1/ln q), on the index
(e.g. n^-2), or be given by an explicit per-index table.  Everything is kept
accessible in log domain because block constructions push psi far below
float underflow.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

from .arith import FactoredNat

__all__ = ["ApproxFn"]


def _pos_log(lq: float, index: int) -> float:
    if lq <= 0:
        raise ValueError(
            f"psi of 1/ln q form hit q = 1 at index {index}; drop small terms first")
    return lq


class ApproxFn:
    """psi(n, q) with both linear and log-domain evaluation.

    `fn_log(index, log_q) -> ln psi`; index is 1-based.  Values must satisfy
    0 < psi <= 1 wherever an experiment evaluates them; `psi()` raises on a
    violation so bad configurations fail fast rather than skewing counts.
    """

    def __init__(self, fn_log: Callable[[int, float], float], name: str):
        self._fn_log = fn_log
        self.name = name

    def psi_log(self, index: int, log_q: float) -> float:
        return self._fn_log(index, log_q)

    def psi(self, index: int, log_q: float) -> float:
        lv = self._fn_log(index, log_q)
        if lv > 0:
            raise ValueError(
                f"psi {self.name} = exp({lv:.3g}) > 1 at index {index} "
                f"(log q = {log_q:.3g}); filter the sequence or change psi")
        return math.exp(lv)  # underflows to 0.0 for very negative lv

    def psi_term(self, index: int, q: FactoredNat) -> float:
        return self.psi(index, q.log())

    def __repr__(self):
        return f"ApproxFn({self.name})"

    # -- constructors -------------------------------------------------------
    @staticmethod
    def constant(r: float) -> "ApproxFn":
        if not 0 < r <= 1:
            raise ValueError("constant psi must lie in (0, 1]")
        lr = math.log(r)
        return ApproxFn(lambda n, lq: lr, f"const({r!r})")

    @staticmethod
    def inv_log() -> "ApproxFn":
        """psi(q) = 1 / ln q  (needs q > e, i.e. q >= 3, to stay <= 1)."""
        return ApproxFn(lambda n, lq: -math.log(_pos_log(lq, n)), "1/ln q")

    @staticmethod
    def inv_log_pow(lam: float) -> "ApproxFn":
        """psi(q) = (ln q)^-lam."""
        return ApproxFn(lambda n, lq: -lam * math.log(_pos_log(lq, n)),
                        f"(ln q)^-{lam}")

    @staticmethod
    def index_power(alpha: float) -> "ApproxFn":
        """psi(q_n) = n^-alpha, a pure function of the index."""
        return ApproxFn(lambda n, lq: -alpha * math.log(n), f"n^-{alpha}")

    @staticmethod
    def from_log_table(log_values: Sequence[float],
                       name: str = "table") -> "ApproxFn":
        """Per-index table of ln psi values (1-based indices)."""
        tbl = list(log_values)

        def fn(n: int, lq: float) -> float:
            if not 1 <= n <= len(tbl):
                raise IndexError(f"psi table has {len(tbl)} entries; index {n}")
            return tbl[n - 1]

        f = ApproxFn(fn, name)
        f.table_len = len(tbl)
        return f

    @staticmethod
    def from_spec(kind: str, param: Optional[float] = None) -> "ApproxFn":
        """Build from a config-file spec: const|inv_log|inv_log_pow|index_power."""
        if kind == "const":
            if param is None:
                raise ValueError("const psi needs a value")
            return ApproxFn.constant(param)
        if kind == "inv_log":
            return ApproxFn.inv_log()
        if kind == "inv_log_pow":
            if param is None:
                raise ValueError("inv_log_pow psi needs an exponent")
            return ApproxFn.inv_log_pow(param)
        if kind == "index_power":
            if param is None:
                raise ValueError("index_power psi needs an exponent")
            return ApproxFn.index_power(param)
        raise ValueError(f"unknown psi kind {kind!r}")

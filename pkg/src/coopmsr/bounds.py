"""Cut-set bounds, node-size formulas and the repair bandwidth meter."""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple


class BoundWarning(UserWarning):
    """A cut-set bound evaluated to a non-integer number of symbols."""


def _exact(num: int, den: int) -> int | Fraction:
    if den <= 0:
        raise ValueError("f + r_sz - k must be positive")
    q = Fraction(num, den)
    if q.denominator != 1:
        warnings.warn(f"cut-set bound {q} is not an integer", BoundWarning, stacklevel=3)
        return q
    return int(q)


def cutset_cooperative(k: int, l: int, f: int, r_sz: int) -> int | Fraction:
    """Least symbols exchanged (any node pair counted) to repair f nodes from r_sz helpers."""
    return _exact(f * (r_sz + f - 1) * l, f + r_sz - k)


def cutset_centralized(k: int, l: int, f: int, r_sz: int) -> int | Fraction:
    """Least helper-to-repair-centre symbols when traffic among failed nodes is free."""
    return _exact(f * r_sz * l, f + r_sz - k)


class NodeSize(NamedTuple):
    """Exact node size ``factor * base**exponent``."""

    factor: int
    base: int
    exponent: int

    @property
    def log2(self) -> float:
        if self.base == 0 and self.exponent > 0:
            return -math.inf
        return math.log2(self.factor) + (self.exponent * math.log2(self.base) if self.exponent else 0.0)

    @property
    def value(self) -> int:
        return self.factor * self.base**self.exponent


class NodeSizeTable(NamedTuple):
    ye_barg_2017: NodeSize  # centralized only
    ye_barg_2019: NodeSize | None  # None when d = k and h > 1 (formula degenerates to 0)
    this_construction: NodeSize


def node_size_table(n: int, k: int, h: int, d: int) -> NodeSizeTable:
    from .code import check_inequalities

    check_inequalities(n, k, h, d)
    lcm = math.lcm(*range(d - k + 1, d - k + h + 1))
    a = NodeSize(1, lcm, n)
    if d == k and h > 1:
        b = None
    else:
        b = NodeSize(1, (h + d - k) * (d - k) ** (h - 1), math.comb(n, h))
    c = NodeSize(h + d - k, d - k + 1, n)
    return NodeSizeTable(a, b, c)


class MessageRecord(NamedTuple):
    round: int
    sender: int
    receiver: int
    symbols: int


@dataclass
class RepairTranscript:
    """Symbol-exact record of every message in one repair session."""

    k: int
    l: int
    h: int
    d: int
    messages: list[MessageRecord] = field(default_factory=list)

    def record(self, round: int, sender: int, receiver: int, symbols: int) -> None:
        if symbols < 0:
            raise ValueError("negative symbol count")
        self.messages.append(MessageRecord(round, sender, receiver, int(symbols)))

    def canonical(self) -> list[MessageRecord]:
        return sorted(self.messages)

    @property
    def total(self) -> int:
        return sum(m.symbols for m in self.messages)

    def round_total(self, round: int) -> int:
        return sum(m.symbols for m in self.messages if m.round == round)

    def per_edge(self) -> Counter:
        out: Counter = Counter()
        for m in self.messages:
            out[(m.sender, m.receiver)] += m.symbols
        return out


@dataclass(frozen=True)
class BoundReport:
    co_bound: int | Fraction
    ce_bound: int | Fraction
    naive_cooperative: int
    total: int
    round1_total: int
    round2_total: int
    messages: int
    co_met: bool
    ce_met: bool

    def lines(self) -> list[str]:
        yn = {True: "yes", False: "no"}
        return [
            f"total symbols: {self.total} (round 1: {self.round1_total}, round 2: {self.round2_total})",
            f"cooperative cut-set bound: {self.co_bound}; centralized cut-set bound: {self.ce_bound}; naive: {self.naive_cooperative}",
            f"co bound met: {yn[self.co_met]}; ce bound met: {yn[self.ce_met]}",
        ]


def meter_close(transcript: RepairTranscript) -> BoundReport:
    """Compare a finished transcript with both cut-set bounds.

    An empty transcript never counts as meeting a bound.
    """
    t = transcript
    if t.h + t.d - t.k > 0:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundWarning)
            co = cutset_cooperative(t.k, t.l, t.h, t.d)
            ce = cutset_centralized(t.k, t.l, t.h, t.d)
    else:
        co = ce = 0
    r1, r2 = t.round_total(1), t.round_total(2)
    nonempty = bool(t.messages)
    return BoundReport(
        co_bound=co,
        ce_bound=ce,
        naive_cooperative=t.h * t.k * t.l,
        total=t.total,
        round1_total=r1,
        round2_total=r2,
        messages=len(t.messages),
        co_met=nonempty and t.total == co,
        ce_met=nonempty and r1 == ce,
    )

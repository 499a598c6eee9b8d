"""Edge labelings, EL-shellability checks and falling chains.

The labeling of B_{n,k,t} with a top adjoined: an edge that adds the ground
element a to the first ordered block gets -a, an edge into the top gets 0,
and adding a to any other block (an empty one included) gets +a.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from .constructions import bnkt, boolean_poset
from .poset import Poset


class Top:
    """Adjoined maximum; sorts after every label."""

    def __repr__(self) -> str:
        return "1^"

    def __eq__(self, other) -> bool:
        return isinstance(other, Top)

    def __hash__(self) -> int:
        return hash("adjoined top")

    def __lt__(self, other) -> bool:
        return False

    def __gt__(self, other) -> bool:
        return not isinstance(other, Top)


TOP = Top()


@dataclass
class EdgeLabeling:
    """Integer labels on the Hasse edges of a bounded poset."""

    poset: Poset
    labels: dict = field(default_factory=dict)   # (i, j) index cover -> label

    @classmethod
    def from_function(cls, P: Poset, label: Callable[[object, object], int]) -> "EdgeLabeling":
        return cls(P, {(i, j): label(P.elements[i], P.elements[j]) for i, j in P.covers})

    def label(self, x, y) -> int:
        return self.labels[(self.poset.index[x], self.poset.index[y])]

    def check(self) -> None:
        P = self.poset
        if P.bottom is None or P.top is None:
            raise ValueError("labeling needs a bounded poset")
        if set(self.labels) != set(P.covers):
            raise ValueError("every Hasse edge needs exactly one label")


def _edge_label_bnkt(x, y) -> int:
    if isinstance(y, Top):
        return 0
    (a,) = y.support() - x.support()
    if x.t and a in y.ordered[0]:
        return -a
    return a


def el_label_bnkt(n: int, k: int, t: int) -> EdgeLabeling:
    """The labeling of B_{n,k,t} with a top adjoined (t >= 1)."""
    if t < 1:
        raise ValueError("the labeling needs at least one ordered block (t >= 1)")
    P = bnkt(n, k, t)
    labels = list(P.elements) + [TOP]
    covers = P.cover_pairs() + [(x, TOP) for x in P.maximal()]
    Q = Poset.from_covers(labels, covers)
    return EdgeLabeling.from_function(Q, _edge_label_bnkt)


def boolean_labeling(n: int) -> EdgeLabeling:
    """B_n labelled by the element added."""
    P = boolean_poset(n)
    return EdgeLabeling.from_function(P, lambda x, y: (set(y) - set(x)).pop())


def _chains_from(lab: EdgeLabeling, i: int) -> dict[int, list[tuple[int, ...]]]:
    """Label words of all saturated chains from i, grouped by their top."""
    P = lab.poset
    out: dict[int, list[tuple[int, ...]]] = {}
    stack = [(i, ())]
    while stack:
        v, word = stack.pop()
        for w in P.upper[v]:
            nw = word + (lab.labels[(v, w)],)
            out.setdefault(w, []).append(nw)
            stack.append((w, nw))
    return out


def _weakly_increasing(w) -> bool:
    return all(a <= b for a, b in zip(w, w[1:]))


def _strictly_decreasing(w) -> bool:
    return all(a > b for a, b in zip(w, w[1:]))


@dataclass
class ElReport:
    intervals: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_el(lab: EdgeLabeling, max_violations: int = 20) -> ElReport:
    """Every interval has exactly one weakly increasing maximal chain, and it
    is strictly lexicographically first."""
    lab.check()
    P = lab.poset
    count = 0
    bad = []
    for i in range(len(P)):
        for j, words in _chains_from(lab, i).items():
            count += 1
            lengths = {len(w) for w in words}
            inc = [w for w in words if _weakly_increasing(w)]
            ok = len(inc) == 1
            if ok:
                first = min(words)
                ok = first == inc[0] and words.count(first) == 1 and len(lengths) == 1
            if not ok:
                bad.append((P.elements[i], P.elements[j], len(inc)))
                if len(bad) >= max_violations:
                    return ElReport(count, bad)
    return ElReport(count, bad)


def falling_chains(lab: EdgeLabeling) -> dict[int, int]:
    """Maximal chains with strictly decreasing labels, counted by number of edges."""
    P = lab.poset
    b, t = P.index[P.bottom], P.index[P.top]
    words = _chains_from(lab, b).get(t, [])
    return dict(sorted(Counter(len(w) for w in words if _strictly_decreasing(w)).items()))

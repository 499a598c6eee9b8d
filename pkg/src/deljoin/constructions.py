"""Boolean algebras, deleted joins and products, and k-fold Boolean algebras.

All of these are graded by the number of ground elements used, and each
cover adds one ground element to one block, so they are built directly from
their cover relations instead of from a comparison predicate.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import NamedTuple, Sequence

from .diagrams import (DiagramAction, PosetDiagram, PosetGroupAction, _inverse,
                       diagram_barycentric, poset_limit, quotient, quotient_diagram)
from .poset import Poset, PosetError, find_isomorphism


def boolean_poset(n: int) -> Poset:
    """Subsets of [n] as sorted tuples, ordered by inclusion."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    labels = [c for r in range(n + 1) for c in combinations(range(1, n + 1), r)]
    covers = [(s, tuple(sorted(s + (a,)))) for s in labels for a in range(1, n + 1) if a not in s]
    return Poset.from_covers(labels, covers)


def _coords(A) -> tuple[int, ...]:
    if isinstance(A, int):
        return tuple(range(1, A + 1))
    A = tuple(A)
    if list(A) != sorted(set(A)):
        raise ValueError(f"coordinate set {A} must be strictly increasing")
    return A


def _require_bottom(P: Poset) -> int:
    b = P.bottom
    if b is None:
        raise PosetError("poset has no unique minimum")
    return P.index[b]


def deleted_join(P: Poset, A) -> Poset:
    """Tuples (x_a) over coordinates A with pairwise disjoint entries.

    Disjoint means the down-sets meet only in the minimum.  Labels are
    tuples of P-labels in coordinate order.
    """
    z = _require_bottom(P)
    t = len(_coords(A))
    zero = 1 << z
    tuples: list[tuple[int, ...]] = []

    def extend(prefix: tuple[int, ...], used: int):
        if len(prefix) == t:
            tuples.append(prefix)
            return
        for i in range(len(P)):
            d = P.down_mask(i)
            if d & used & ~zero == 0:
                extend(prefix + (i,), used | d)

    extend((), zero)
    present = set(tuples)
    covers = []
    for tup in tuples:
        for c in range(t):
            for j in P.upper[tup[c]]:
                new = tup[:c] + (j,) + tup[c + 1:]
                if new in present:
                    covers.append((tup, new))
    lab = lambda tup: tuple(P.elements[i] for i in tup)
    return Poset.from_covers([lab(x) for x in tuples], [(lab(a), lab(b)) for a, b in covers])


def deleted_product(P: Poset, A) -> Poset:
    """Deleted join restricted to tuples with no coordinate equal to the minimum."""
    z = P.elements[_require_bottom(P)]
    J = deleted_join(P, A)
    keep = [x for x in J.elements if z not in x]
    ks = set(keep)
    covers = [(a, b) for a, b in J.cover_pairs() if a in ks and b in ks]
    return Poset.from_covers(keep, covers)


# -- k-fold Boolean algebras ---------------------------------------------------------

class BlockFamily(NamedTuple):
    """t ordered blocks plus k - t unordered blocks of a finite set.

    ``unordered`` holds the nonempty unordered blocks sorted by minimum; the
    remaining unordered blocks are empty and only counted.
    """

    ordered: tuple
    unordered: tuple
    k: int

    @property
    def t(self) -> int:
        return len(self.ordered)

    @property
    def empties(self) -> int:
        return self.k - self.t - len(self.unordered)

    @property
    def size(self) -> int:
        return sum(map(len, self.ordered)) + sum(map(len, self.unordered))

    def blocks(self) -> list[tuple]:
        return list(self.ordered) + list(self.unordered) + [()] * self.empties

    def support(self) -> set[int]:
        return {a for b in self.ordered + self.unordered for a in b}

    def __str__(self) -> str:
        fmt = lambda b: "{" + ",".join(map(str, b)) + "}"
        o = "(" + ",".join(fmt(b) for b in self.ordered) + ")" if self.ordered else ""
        u = "{" + ",".join(fmt(b) for b in self.unordered + ((),) * self.empties) + "}"
        return o + u


def make_family(ordered: Sequence, unordered: Sequence, k: int) -> BlockFamily:
    o = tuple(tuple(sorted(b)) for b in ordered)
    u = tuple(sorted((tuple(sorted(b)) for b in unordered if b), key=lambda b: b[0]))
    fam = BlockFamily(o, u, k)
    if fam.empties < 0:
        raise ValueError(f"too many blocks for k={k}")
    seen = [a for b in o + u for a in b]
    if len(seen) != len(set(seen)):
        raise ValueError("blocks are not disjoint")
    return fam


def family_le(x: BlockFamily, y: BlockFamily) -> bool:
    """Slotwise inclusion on the ordered part, matched inclusion on the rest.

    Independent of the cover construction; used as an oracle.
    """
    if x.k != y.k or x.t != y.t:
        return False
    if any(not set(a) <= set(b) for a, b in zip(x.ordered, y.ordered)):
        return False
    xs = [set(b) for b in x.unordered] + [set()] * x.empties
    ys = [set(b) for b in y.unordered] + [set()] * y.empties
    return any(all(a <= ys[p] for a, p in zip(xs, perm)) for perm in permutations(range(len(ys))))


def _add_to_block(fam: BlockFamily, a: int, slot: int) -> BlockFamily:
    """Add a to block ``slot``: ordered slots first, then nonempty unordered
    blocks, then (slot == t + len(unordered)) a fresh empty block."""
    o, u = list(fam.ordered), list(fam.unordered)
    if slot < len(o):
        o[slot] = tuple(sorted(o[slot] + (a,)))
    elif slot - len(o) < len(u):
        j = slot - len(o)
        u[j] = tuple(sorted(u[j] + (a,)))
    else:
        u.append((a,))
    u.sort(key=lambda b: b[0])
    return BlockFamily(tuple(o), tuple(u), fam.k)


def bnkt_families(n: int, k: int, t: int) -> list[BlockFamily]:
    if not 0 <= t <= k:
        raise ValueError(f"need 0 <= t <= k, got t={t}, k={k}")
    out = set()
    # each ground element picks an ordered slot, an unordered block, or nothing
    for choice in product(range(-1, k), repeat=n):
        o = [[] for _ in range(t)]
        u = [[] for _ in range(k - t)]
        for a, c in enumerate(choice, start=1):
            if c < 0:
                continue
            (o[c] if c < t else u[c - t]).append(a)
        out.add(make_family(o, u, k))
    return sorted(out)


def bnkt(n: int, k: int, t: int) -> Poset:
    """k disjoint subsets of [n], the first t of them ordered."""
    fams = bnkt_families(n, k, t)
    present = set(fams)
    covers = []
    for fam in fams:
        used = fam.support()
        nslots = fam.t + len(fam.unordered) + (1 if fam.empties else 0)
        for a in range(1, n + 1):
            if a in used:
                continue
            for s in range(nslots):
                new = _add_to_block(fam, a, s)
                if new in present:
                    covers.append((fam, new))
    return Poset.from_covers(fams, covers)


def bnk(n: int, k: int) -> Poset:
    return bnkt(n, k, 0)


def bnk_hat(n: int, k: int) -> Poset:
    """Families in B_{n,k} with all k blocks nonempty."""
    P = bnk(n, k)
    return P.induced(x for x in P.elements if x.empties == 0)


def bnkt_hat(n: int, k: int, t: int) -> Poset:
    P = bnkt(n, k, t)
    return P.induced(x for x in P.elements if x.empties == 0 and all(x.ordered))


def family_of_tuple(tup: tuple, t: int | None = None) -> BlockFamily:
    """Read a deleted-join tuple of subsets as a family with ``t`` ordered slots."""
    k = len(tup)
    t = k if t is None else t
    return make_family(tup[:t], tup[t:], k)


def sk_orbit_poset(n: int, k: int) -> Poset:
    """Orbit poset of B_n^{[k]} under permutation of coordinates (oracle for B_{n,k})."""
    J = deleted_join(boolean_poset(n), k)
    perms = [tuple(J.index[tuple(x[s] for s in g)] for x in J.elements)
             for g in permutations(range(k))]
    return quotient(J, PosetGroupAction(J, perms), strict=False).poset


# -- the diagram D_n ------------------------------------------------------------------------

def diagram_dn(P: Poset, n: int) -> PosetDiagram:
    """Diagram over the nonempty subsets A of [n] with fibre hat P^{[A]}.

    Arrows forget the coordinates outside the smaller set.
    """
    B = boolean_poset(n)
    base = B.without(())
    fibers = {A: deleted_product(P, A) for A in base.elements}
    arrows = {}
    for A in base.elements:
        for Bset in base.elements:
            if Bset != A and set(Bset) <= set(A):
                keep = [A.index(b) for b in Bset]
                arrows[(A, Bset)] = {x: tuple(x[i] for i in keep) for x in fibers[A].elements}
    return PosetDiagram(base, fibers, arrows)


@dataclass
class DlimReport:
    n: int
    isomorphism: bool
    size_limit: int
    size_target: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.isomorphism


def dlim_to_join(P: Poset, n: int, element) -> tuple:
    """(A, (x_a)_{a in A}) -> full n-tuple with the minimum filled in."""
    A, xs = element
    z = P.bottom
    full = [z] * n
    for a, x in zip(A, xs):
        full[a - 1] = x
    return tuple(full)


def verify_dlim_dn(P: Poset, n: int) -> DlimReport:
    """Check that dlim D_n is P^{[n]} with the all-minimum tuple removed."""
    L = poset_limit(diagram_dn(P, n))
    z = P.bottom
    T = deleted_join(P, n).without(tuple([z] * n))
    phi = {u: dlim_to_join(P, n, u) for u in L.elements}
    bad = []
    if len(set(phi.values())) != len(phi) or set(phi.values()) != set(T.elements):
        bad.append("not a bijection")
    else:
        for u in L.elements:
            for v in L.elements:
                if L.le(u, v) != T.le(phi[u], phi[v]):
                    bad.append((u, v))
                    if len(bad) > 10:
                        break
    return DlimReport(n, not bad, len(L), len(T), bad)


# -- symmetric group action ------------------------------------------------------------------

def _perm_tuples(n: int) -> list[tuple[int, ...]]:
    """Permutations of [n] as tuples pi with pi[a-1] = image of a."""
    return [tuple(p) for p in permutations(range(1, n + 1))]


def symmetric_action_on_dn(P: Poset, n: int) -> DiagramAction:
    """S_n acting on the subdivided diagram: chains of subsets are moved by
    pi and tuple coordinates are moved along."""
    DB = diagram_barycentric(diagram_dn(P, n))
    base = DB.base
    bperms = []
    taus = {}
    for pi in _perm_tuples(n):
        move = lambda S: tuple(sorted(pi[a - 1] for a in S))
        img = []
        fib = {}
        for chain in base.elements:
            new = tuple(move(S) for S in chain)
            img.append(base.index[new])
            A = chain[-1]
            B = new[-1]
            # coordinate a of A goes to coordinate pi(a) of B
            order = [B.index(pi[a - 1]) for a in A]
            tau = {}
            for x in DB.fibers[chain].elements:
                y = [None] * len(A)
                for i, pos in enumerate(order):
                    y[pos] = x[i]
                tau[x] = tuple(y)
            fib[chain] = tau
        g = tuple(img)
        bperms.append(g)
        taus[g] = fib
    act = DiagramAction(DB, PosetGroupAction(base, bperms), taus)
    return act


@dataclass
class FiberCheck:
    sizes: tuple[int, ...]
    representative: tuple
    ok: bool


def young_quotient(P: Poset, sizes: Sequence[int]) -> Poset:
    """hat P^{[a_t]} modulo S_{a_1} x S_{a_2 - a_1} x ... acting on coordinate blocks."""
    a_t = sizes[-1]
    H = deleted_product(P, a_t)
    blocks = []
    lo = 0
    for a in sizes:
        blocks.append(range(lo, a))
        lo = a
    gens = []
    for blk in blocks:
        for perm in permutations(blk):
            g = list(range(a_t))
            for src, dst in zip(blk, perm):
                g[src] = dst
            gens.append(tuple(g))
    perms = []
    for g in gens:
        inv = _inverse(g)
        perms.append(tuple(H.index[tuple(x[inv[i]] for i in range(a_t))] for x in H.elements))
    return quotient(H, PosetGroupAction(H, perms), strict=False).poset


def verify_quotient_fibers(P: Poset, n: int) -> list[FiberCheck]:
    """Compare each fibre of the quotient diagram with the Young-subgroup formula."""
    Q = quotient_diagram(symmetric_action_on_dn(P, n))
    out = []
    for chain in Q.base.elements:
        sizes = tuple(len(S) for S in chain)
        expected = young_quotient(P, sizes)
        iso = find_isomorphism(Q.fibers[chain], expected)
        out.append(FiberCheck(sizes, chain, iso is not None))
    return sorted(out, key=lambda c: c.sizes)

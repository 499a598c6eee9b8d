"""Diagrams of posets over a base poset, their limits, and group actions.

A diagram assigns a poset D(x) to every element x of a base poset and an
order-preserving map f_xy : D(x) -> D(y) to every relation x >= y.  Maps
point downward in the base, so a chain x_1 < ... < x_t carries the fibre of
its top element after barycentric subdivision.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .homology import HomologyResult, homology_of_poset
from .poset import Poset, _bits, barycentric_subdivision, build_poset


class DiagramError(ValueError):
    pass


Perm = tuple[int, ...]


def _compose(g: Perm, h: Perm) -> Perm:
    """(g h)(i) = g(h(i))."""
    return tuple(g[i] for i in h)


def _inverse(g: Perm) -> Perm:
    inv = [0] * len(g)
    for i, j in enumerate(g):
        inv[j] = i
    return tuple(inv)


def close_group(generators: Iterable[Perm], degree: int) -> list[Perm]:
    ident = tuple(range(degree))
    gens = [tuple(g) for g in generators]
    for g in gens:
        if sorted(g) != list(ident):
            raise DiagramError(f"not a permutation of {degree} points: {g}")
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                x = _compose(g, h)
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
    return sorted(seen)


# -- group actions on posets ---------------------------------------------------

class PosetGroupAction:
    """Finite group acting on a poset by order automorphisms.

    Group elements are permutations of element indices; the group generated
    by the given permutations is closed at construction.
    """

    def __init__(self, poset: Poset, generators: Iterable[Perm]):
        self.poset = poset
        self.elements = close_group(generators, len(poset))
        for g in self.elements:
            for i, j in poset.covers:
                if not poset.le_idx(g[i], g[j]):
                    raise DiagramError(f"permutation {g} is not order-preserving")

    @classmethod
    def from_label_maps(cls, poset: Poset, maps: Iterable[Callable]) -> "PosetGroupAction":
        perms = []
        for f in maps:
            perms.append(tuple(poset.index[f(x)] for x in poset.elements))
        return cls(poset, perms)

    def __len__(self) -> int:
        return len(self.elements)

    def apply(self, g: Perm, x):
        return self.poset.elements[g[self.poset.index[x]]]

    def orbit_rep_indices(self) -> list[int]:
        """For every element index, the least index in its orbit."""
        rep = list(range(len(self.poset)))
        for i in range(len(self.poset)):
            rep[i] = min(g[i] for g in self.elements)
        return rep

    def stabilizer(self, x) -> list[Perm]:
        i = self.poset.index[x]
        return [g for g in self.elements if g[i] == i]

    def induced_on_subdivision(self, bd: Poset) -> "PosetGroupAction":
        """Action on Bd(P), whose labels are chains of labels of P."""
        perms = []
        for g in self.elements:
            img = []
            for chain in bd.elements:
                new = tuple(sorted((self.apply(g, x) for x in chain),
                                   key=lambda y: self.poset.down_mask(self.poset.index[y]).bit_count()))
                img.append(bd.index[new])
            perms.append(tuple(img))
        return PosetGroupAction(bd, perms)

    def to_json(self) -> str:
        return json.dumps([list(g) for g in self.elements])


def condition_a_witness(P: Poset, act: PosetGroupAction):
    """A triple (g, x, y) with x > y, g x = x and g y != y, or None."""
    for g in act.elements:
        for i in range(len(P)):
            if g[i] != i:
                continue
            for j in _bits(P.down_mask(i) & ~(1 << i)):
                if g[j] != j:
                    return g, P.elements[i], P.elements[j]
    return None


def check_condition_a(P: Poset, act: PosetGroupAction) -> bool:
    """Separability: any g fixing x fixes everything below x."""
    return condition_a_witness(P, act) is None


@dataclass
class Quotient:
    """Orbit poset P/G together with the projection of labels."""

    poset: Poset
    projection: dict

    def project(self, x):
        return self.projection[x]


def quotient(P: Poset, act: PosetGroupAction, strict: bool = True) -> Quotient:
    """Orbit poset labelled by least-index representatives.

    ``strict`` demands condition A; otherwise only antisymmetry of the orbit
    relation is checked, and a failure names two witness orbits.
    """
    if strict:
        w = condition_a_witness(P, act)
        if w is not None:
            raise DiagramError(f"condition A fails: {w[0]} fixes {w[1]!r} but moves {w[2]!r}")
    rep = act.orbit_rep_indices()
    reps = sorted(set(rep))
    orbit_up: dict[int, int] = {}
    for r in reps:
        m = 0
        for g in act.elements:
            m |= P.up_mask(g[r])
        orbit_up[r] = m
    # [x] <= [y] iff some translate of x lies below y
    above: dict[int, set[int]] = {r: {rep[j] for j in _bits(orbit_up[r])} for r in reps}
    for r in reps:
        for s in above[r]:
            if s != r and r in above[s]:
                raise DiagramError(
                    f"orbit relation not antisymmetric: [{P.elements[r]!r}] and [{P.elements[s]!r}]")
    labels = [P.elements[r] for r in reps]
    pairs = [(P.elements[r], P.elements[s]) for r in reps for s in above[r] if s != r]
    pair_set = set(pairs)
    pos = {x: i for i, x in enumerate(labels)}
    Q = Poset._from_index_relations(labels, [(pos[a], pos[b]) for a, b in pair_set])
    projection = {x: P.elements[rep[i]] for i, x in enumerate(P.elements)}
    return Quotient(Q, projection)


def quotient_poset(P: Poset, act: PosetGroupAction, strict: bool = True) -> Poset:
    return quotient(P, act, strict).poset


def lift_chain(P: Poset, act: PosetGroupAction, chain: Sequence) -> tuple:
    """Lift a chain of orbits (representative labels, bottom to top) to P.

    The lift is built one step at a time: once y_i lies over the i-th orbit,
    pick any relation x' > y' between the two orbits and translate it by a
    group element h with h y' = y_i.
    """
    if not chain:
        return ()
    idx = P.index
    lifted = [chain[0]]
    for nxt in chain[1:]:
        cur = idx[lifted[-1]]
        found = None
        for g in act.elements:
            x = g[idx[nxt]]
            # translates of the orbit of cur lying below x
            for h in act.elements:
                y = h[cur]
                if y != x and P.le_idx(y, x):
                    # h y_i' relation: move back by h^{-1}
                    found = _inverse(h)[x]
                    break
            if found is not None:
                break
        if found is None:
            raise DiagramError(f"orbit {nxt!r} is not above orbit of {lifted[-1]!r}")
        lifted.append(P.elements[found])
    return tuple(lifted)


# -- diagrams --------------------------------------------------------------------

class PosetDiagram:
    """Functor from a base poset to posets, arrows pointing down the base.

    ``arrows[(x, y)]`` for base labels x > y is a dict from D(x) labels to
    D(y) labels; missing pairs must be derivable and are rejected by check().
    """

    def __init__(self, base: Poset, fibers: dict, arrows: dict):
        self.base = base
        self.fibers = dict(fibers)
        self.arrows = dict(arrows)

    def fiber(self, x) -> Poset:
        return self.fibers[x]

    def arrow(self, x, y) -> dict:
        if x == y:
            return {e: e for e in self.fibers[x].elements}
        return self.arrows[(x, y)]

    def relations(self) -> list[tuple]:
        B = self.base
        return [(B.elements[i], B.elements[j]) for i in range(len(B))
                for j in _bits(B.down_mask(i)) if j != i]

    def check(self) -> None:
        """Exhaustive functoriality and monotonicity check."""
        B = self.base
        for x in B.elements:
            if x not in self.fibers:
                raise DiagramError(f"no fibre at {x!r}")
        for x, y in self.relations():
            if (x, y) not in self.arrows:
                raise DiagramError(f"no arrow {x!r} -> {y!r}")
            f = self.arrows[(x, y)]
            Dx, Dy = self.fibers[x], self.fibers[y]
            if set(f) != set(Dx.elements) or not set(f.values()) <= set(Dy.elements):
                raise DiagramError(f"arrow {x!r} -> {y!r} has wrong domain or codomain")
            for i, j in Dx.covers:
                if not Dy.le(f[Dx.elements[i]], f[Dx.elements[j]]):
                    raise DiagramError(f"arrow {x!r} -> {y!r} is not order-preserving")
        for x, y in self.relations():
            for z in B.elements:
                if z != y and B.lt(z, y):
                    fxy, fyz, fxz = self.arrows[(x, y)], self.arrows[(y, z)], self.arrows[(x, z)]
                    for e, img in fxy.items():
                        if fyz[img] != fxz[e]:
                            raise DiagramError(f"functoriality fails on {x!r} > {y!r} > {z!r} at {e!r}")

    def is_functorial(self) -> bool:
        try:
            self.check()
        except DiagramError:
            return False
        return True

    def to_json(self) -> str:
        B = self.base
        fibers = {str(i): json.loads(self.fibers[x].to_json()) for i, x in enumerate(B.elements)}
        arrows = {}
        for x, y in self.relations():
            Dx, Dy = self.fibers[x], self.fibers[y]
            f = self.arrows[(x, y)]
            arrows[f"{B.index[x]}>{B.index[y]}"] = [Dy.index[f[e]] for e in Dx.elements]
        return json.dumps({"base": json.loads(B.to_json()), "fibers": fibers, "arrows": arrows})

    @classmethod
    def from_json(cls, text: str) -> "PosetDiagram":
        data = json.loads(text)
        base = Poset.from_json(json.dumps(data["base"]))
        fibers = {base.elements[int(i)]: Poset.from_json(json.dumps(f)) for i, f in data["fibers"].items()}
        arrows = {}
        for key, imgs in data["arrows"].items():
            i, j = (int(s) for s in key.split(">"))
            x, y = base.elements[i], base.elements[j]
            arrows[(x, y)] = {e: fibers[y].elements[k] for e, k in zip(fibers[x].elements, imgs)}
        return cls(base, fibers, arrows)


def poset_limit(D: PosetDiagram) -> Poset:
    """Total poset of pairs (p, e): (p, e) >= (p', e') iff p >= p' and f(e) >= e'."""
    B = D.base
    labels = []
    start = {}
    for x in B.elements:
        start[x] = len(labels)
        labels.extend((x, e) for e in D.fibers[x].elements)
    pairs = []
    for i, x in enumerate(B.elements):
        Dx = D.fibers[x]
        for j in _bits(B.down_mask(i)):
            y = B.elements[j]
            Dy = D.fibers[y]
            f = D.arrow(x, y)
            for a, e in enumerate(Dx.elements):
                img = Dy.index[f[e]]
                for b in _bits(Dy.down_mask(img)):
                    u, v = start[y] + b, start[x] + a
                    if u != v:
                        pairs.append((u, v))
    return Poset._from_index_relations(labels, pairs)


def diagram_barycentric(D: PosetDiagram) -> PosetDiagram:
    """Diagram over Bd(base) whose fibre at a chain is the fibre at its top."""
    bd = barycentric_subdivision(D.base)
    fibers = {c: D.fibers[c[-1]] for c in bd.elements}
    arrows = {}
    for i, a in enumerate(bd.elements):
        for j in _bits(bd.down_mask(i)):
            if j != i:
                b = bd.elements[j]
                arrows[(a, b)] = dict(D.arrow(a[-1], b[-1]))
    return PosetDiagram(bd, fibers, arrows)


# -- diagram actions ----------------------------------------------------------------

@dataclass
class DiagramAction:
    """Group acting on a diagram.

    ``base`` acts on the base poset; ``taus[g]`` maps a base label x to the
    fibre isomorphism D(x) -> D(g x), given as a label dict.
    """

    diagram: PosetDiagram
    base: PosetGroupAction
    taus: dict = field(default_factory=dict)

    def tau(self, g: Perm, x) -> dict:
        return self.taus[g][x]

    def check(self) -> None:
        D = self.diagram
        B = D.base
        ident = tuple(range(len(B)))
        for g in self.base.elements:
            if g not in self.taus:
                raise DiagramError(f"no fibre maps for group element {g}")
            for x in B.elements:
                gx = self.base.apply(g, x)
                t = self.taus[g][x]
                Dx, Dgx = D.fibers[x], D.fibers[gx]
                if sorted(map(Dgx.index.__getitem__, t.values())) != list(range(len(Dgx))) \
                        or len(t) != len(Dx):
                    raise DiagramError(f"tau at {x!r} is not a bijection onto D(g x)")
                for i, j in Dx.covers:
                    if not Dgx.lt(t[Dx.elements[i]], t[Dx.elements[j]]):
                        raise DiagramError(f"tau at {x!r} is not order-preserving")
                if g == ident and any(a != b for a, b in t.items()):
                    raise DiagramError("identity acts nontrivially on a fibre")
            for x, y in D.relations():
                gx, gy = self.base.apply(g, x), self.base.apply(g, y)
                lhs, rhs = self.taus[g][y], D.arrow(gx, gy)
                f, t = D.arrow(x, y), self.taus[g][x]
                for e in D.fibers[x].elements:
                    if lhs[f[e]] != rhs[t[e]]:
                        raise DiagramError(f"tau incompatible with arrow {x!r} -> {y!r}")
        for g in self.base.elements:
            for h in self.base.elements:
                gh = _compose(g, h)
                for x in B.elements:
                    hx = self.base.apply(h, x)
                    th, tg, tgh = self.taus[h][x], self.taus[g][hx], self.taus[gh][x]
                    if any(tg[th[e]] != tgh[e] for e in th):
                        raise DiagramError("fibre maps do not respect composition")


def quotient_diagram(act: DiagramAction) -> PosetDiagram:
    """Diagram over base/G with fibre D(x)/Stab(x) at the orbit of x."""
    D = act.diagram
    B = D.base
    if not check_condition_a(B, act.base):
        raise DiagramError("condition A fails on the base")
    act.check()
    qbase = quotient(B, act.base)
    fibers = {}
    fiber_proj = {}
    for x in qbase.poset.elements:
        stab = act.base.stabilizer(x)
        Dx = D.fibers[x]
        perms = [tuple(Dx.index[act.taus[g][x][e]] for e in Dx.elements) for g in stab]
        q = quotient(Dx, PosetGroupAction(Dx, perms), strict=False)
        fibers[x] = q.poset
        fiber_proj[x] = q.projection
    arrows = {}
    for x, y in _relations(qbase.poset):
        img: dict = {}
        for g in act.base.elements:
            gy = act.base.apply(g, y)
            if gy == x or not B.le(gy, x):
                continue
            ginv = _inverse(g)
            back = act.taus[ginv][gy]
            f = D.arrow(x, gy)
            for e in D.fibers[x].elements:
                src = fiber_proj[x][e]
                tgt = fiber_proj[y][back[f[e]]]
                if img.setdefault(src, tgt) != tgt:
                    raise DiagramError(f"induced arrow [{x!r}] -> [{y!r}] is not well defined")
        arrows[(x, y)] = img
    Q = PosetDiagram(qbase.poset, fibers, arrows)
    Q.check()
    return Q


def _relations(P: Poset) -> list[tuple]:
    return [(P.elements[i], P.elements[j]) for i in range(len(P))
            for j in _bits(P.down_mask(i)) if j != i]


def lift_action_to_subdivision(act: DiagramAction) -> DiagramAction:
    """The induced action on the barycentric subdivision of the diagram."""
    D = act.diagram
    DB = diagram_barycentric(D)
    bact = act.base.induced_on_subdivision(DB.base)
    taus = {}
    for g, gb in zip(act.base.elements, bact.elements):
        taus[gb] = {c: act.taus[g][c[-1]] for c in DB.base.elements}
    return DiagramAction(DB, bact, taus)


# -- subdivision invariance ------------------------------------------------------------

@dataclass
class InvarianceReport:
    ring: int | None
    direct: HomologyResult
    subdivided: HomologyResult

    @property
    def ok(self) -> bool:
        return self.direct == self.subdivided


def verify_subdivision_invariance(D: PosetDiagram, p: int | None = None) -> InvarianceReport:
    direct = homology_of_poset(poset_limit(D), p)
    sub = homology_of_poset(poset_limit(diagram_barycentric(D)), p)
    return InvarianceReport(p, direct, sub)


# -- random diagrams ----------------------------------------------------------------------

def random_poset(rng: random.Random, size: int, density: float = 0.4, prefix: str = "") -> Poset:
    labels = [f"{prefix}{i}" for i in range(size)]
    pairs = [(labels[i], labels[j]) for i in range(size) for j in range(i + 1, size)
             if rng.random() < density]
    return build_poset(labels, pairs)


def _random_monotone_map(rng: random.Random, P: Poset, Q: Poset, tries: int = 20) -> dict | None:
    for _ in range(tries):
        img: dict[int, int] = {}
        ok = True
        for i in P.linear_extension:
            allowed = (1 << len(Q)) - 1
            for j in _bits(P.down_mask(i)):
                if j != i:
                    allowed &= Q.up_mask(img[j])
            cands = list(_bits(allowed))
            if not cands:
                ok = False
                break
            img[i] = rng.choice(cands)
        if ok:
            return {P.elements[i]: Q.elements[img[i]] for i in img}
    return None


def random_diagram(seed: int, max_base: int = 4, max_fiber: int = 5, tries: int = 50) -> PosetDiagram:
    """Random functorial diagram; arrows are drawn on covers and composed.

    Candidates whose compositions disagree along different paths are
    rejected; after ``tries`` failures constant maps are used, which are
    always functorial.
    """
    rng = random.Random(seed)
    base = random_poset(rng, rng.randint(1, max_base), prefix="b")
    fibers = {x: random_poset(rng, rng.randint(1, max_fiber), prefix=f"{x}.") for x in base.elements}
    for _ in range(tries):
        cover_maps = {}
        ok = True
        for i, j in base.covers:
            lo, hi = base.elements[i], base.elements[j]
            m = _random_monotone_map(rng, fibers[hi], fibers[lo])
            if m is None:
                ok = False
                break
            cover_maps[(hi, lo)] = m
        if not ok:
            continue
        arrows = _compose_cover_maps(base, fibers, cover_maps)
        if arrows is not None:
            D = PosetDiagram(base, fibers, arrows)
            if D.is_functorial():
                return D
    consts = {x: fibers[x].elements[0] for x in base.elements}
    arrows = {(x, y): {e: consts[y] for e in fibers[x].elements} for x, y in _relations(base)}
    return PosetDiagram(base, fibers, arrows)


def _compose_cover_maps(base: Poset, fibers: dict, cover_maps: dict) -> dict | None:
    """Extend cover arrows to all relations; None if two paths disagree."""
    arrows: dict = {}
    for i in base.linear_extension:
        x = base.elements[i]
        for j in base.lower[i]:
            y = base.elements[j]
            f = cover_maps[(x, y)]
            cands = {(x, y): f}
            for (a, z), g in list(arrows.items()):
                if a == y:
                    cands[(x, z)] = {e: g[f[e]] for e in f}
            for key, m in cands.items():
                if key in arrows and arrows[key] != m:
                    return None
                arrows[key] = m
    return arrows

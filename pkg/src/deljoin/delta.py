"""The chain complexes Δ_n and the shape complexes Δ_n(O, E, t).

A basis element of Δ_n is a triple (J, pi, f): a multiset J_1 <= ... <= J_t
of admissible sequences, a composition pi = (pi_1, ..., pi_m) with m >= 1,
and a map f : [t] -> [m] putting each J_i into a block.  It sits in degree
D(J) + m - 1 and must satisfy

    sum R(J_i) <= sum pi_j <= n,
    sum_{f(i) = j} R(J_i) <= pi_j for each block j,
    no block holds two copies of a sequence that may not repeat.

Equal sequences are interchangeable, so f is stored nondecreasing on each
run of equal J's.  The differential is

    d(J, pi, f) = sum_{i<m} (-1)^i (J, pi^i, f^i) + (-1)^m eps,

where pi^i merges blocks i and i+1 and eps drops the last block when it
holds no J (eps = 0 otherwise, and for m = 1).  Terms that leave the basis
are zero.

The shape complexes replace the J's by t abstract points and the rank
constraints by |f^{-1}(j)| <= pi_j, with groups O (f strictly increasing)
and E (f weakly increasing).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from typing import Callable, Iterable, Iterator, Sequence

from .homology import ChainComplex, HomologyResult, chain_complex_from_maps, homology
from .nakaoka import dimension, generators, may_repeat, rank, u_tilde_dim


def compositions(total_max: int, total_min: int = 1, parts_max: int | None = None) -> Iterator[tuple[int, ...]]:
    """Compositions with total_min <= sum <= total_max and 1 <= m <= parts_max parts."""
    cap = total_max if parts_max is None else min(parts_max, total_max)

    def rec(prefix: tuple[int, ...], s: int):
        if prefix and s >= total_min:
            yield prefix
        if len(prefix) == cap:
            return
        for a in range(1, total_max - s + 1):
            yield from rec(prefix + (a,), s + a)

    yield from rec((), 0)


def merge(pi: tuple[int, ...], f: tuple[int, ...], i: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Merge blocks i and i+1 (1-based)."""
    new_pi = pi[:i - 1] + (pi[i - 1] + pi[i],) + pi[i + 1:]
    new_f = tuple(x if x <= i else x - 1 for x in f)
    return new_pi, new_f


def boundary_terms(pi: tuple[int, ...], f: tuple[int, ...]) -> list[tuple[tuple, tuple, int]]:
    """Unfiltered terms (pi', f', sign) of the differential."""
    m = len(pi)
    out = []
    for i in range(1, m):
        new_pi, new_f = merge(pi, f, i)
        out.append((new_pi, new_f, -1 if i % 2 else 1))
    if m > 1 and m not in f:
        out.append((pi[:-1], f, 1 if m % 2 == 0 else -1))
    return out


def _runs(keys: Sequence) -> list[tuple[int, ...]]:
    """Index runs of equal consecutive keys (0-based)."""
    runs: list[list[int]] = []
    for i, k in enumerate(keys):
        if runs and keys[runs[-1][0]] == k:
            runs[-1].append(i)
        else:
            runs.append([i])
    return [tuple(r) for r in runs]


# -- shape complexes -----------------------------------------------------------------

@dataclass(frozen=True)
class ShapeSpec:
    """n, groups O (strict) and E (weak) of points in [t], and t."""

    n: int
    O: tuple[tuple[int, ...], ...]
    E: tuple[tuple[int, ...], ...]
    t: int

    def __post_init__(self):
        pts = [x for g in self.O + self.E for x in g]
        if len(pts) != len(set(pts)):
            raise ValueError("groups must be pairwise disjoint")
        if any(not 1 <= x <= self.t for x in pts):
            raise ValueError(f"group entries must lie in [1, {self.t}]")
        if self.n < 0 or self.t < 0:
            raise ValueError("n and t must be nonnegative")

    @classmethod
    def make(cls, n: int, O: Iterable[Iterable[int]], E: Iterable[Iterable[int]], t: int) -> "ShapeSpec":
        norm = lambda gs: tuple(sorted(tuple(sorted(g)) for g in gs if len(tuple(g)) > 1))
        return cls(n, norm(O), norm(E), t)

    def admits(self, pi: tuple[int, ...], f: tuple[int, ...]) -> bool:
        """Conditions on a pair (pi, f)."""
        if not self.t <= sum(pi) <= self.n:
            return False
        counts = [0] * len(pi)
        for x in f:
            counts[x - 1] += 1
        if any(c > a for c, a in zip(counts, pi)):
            return False
        for g in self.O:
            if any(f[x - 1] >= f[y - 1] for x, y in zip(g, g[1:])):
                return False
        for g in self.E:
            if any(f[x - 1] > f[y - 1] for x, y in zip(g, g[1:])):
                return False
        return True

    def basis(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        out = []
        for pi in compositions(self.n, max(self.t, 1)):
            for f in product(range(1, len(pi) + 1), repeat=self.t):
                if self.admits(pi, f):
                    out.append((pi, f))
        return out

    def __str__(self) -> str:
        fmt = lambda gs: "{" + ",".join("{" + ",".join(map(str, g)) + "}" for g in gs) + "}"
        return f"(n={self.n}, O={fmt(self.O)}, E={fmt(self.E)}, t={self.t})"


def enumerate_shapes(t: int) -> Iterator[tuple[tuple, tuple]]:
    """All (O, E): disjoint families of groups of size >= 2 in [t]."""
    pts = list(range(1, t + 1))

    def set_partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for part in set_partitions(rest):
            yield [(first,)] + part
            for i in range(len(part)):
                yield part[:i] + [(first,) + part[i]] + part[i + 1:]

    seen = set()
    for part in set_partitions(pts):
        groups = [tuple(sorted(b)) for b in part if len(b) > 1]
        for kinds in product("OE", repeat=len(groups)):
            O = tuple(sorted(g for g, k in zip(groups, kinds) if k == "O"))
            E = tuple(sorted(g for g, k in zip(groups, kinds) if k == "E"))
            if (O, E) not in seen:
                seen.add((O, E))
                yield O, E


def build_delta_oet(spec: ShapeSpec, p: int | None = None, offset: int = 0) -> ChainComplex:
    """Shape complex, graded by m - 1 (plus ``offset``)."""
    basis = spec.basis()
    present = set(basis)
    bases: dict[int, list] = {}
    maps: dict[int, list] = {}
    for b in basis:
        q = len(b[0]) - 1
        bases.setdefault(q, []).append(b)
        for pi2, f2, s in boundary_terms(*b):
            if (pi2, f2) in present:
                maps.setdefault(q, []).append((b, (pi2, f2), s))
    return chain_complex_from_maps(bases, maps, p, offset)


@dataclass
class DntCheck:
    spec: ShapeSpec
    ring: int | None
    result: HomologyResult
    expected: HomologyResult

    @property
    def ok(self) -> bool:
        return self.result == self.expected


def dnt_expected(spec: ShapeSpec, p: int | None = None) -> HomologyResult:
    """Sphere of dimension n-1 when t = n and E is empty; otherwise the
    homology of a point for t = 0 and zero for t >= 1."""
    if spec.t == spec.n and not spec.E:
        return HomologyResult(p, {spec.n - 1: 1})
    if spec.t == 0:
        return HomologyResult(p, {0: 1})
    return HomologyResult(p)


def verify_dnt(n_max: int, p: int | None = None, t_filter: Callable[[int, int], bool] | None = None,
               n_min: int = 1) -> list[DntCheck]:
    out = []
    for n in range(n_min, n_max + 1):
        for t in range(0, n + 1):
            if t_filter is not None and not t_filter(n, t):
                continue
            for O, E in enumerate_shapes(t):
                spec = ShapeSpec(n, O, E, t)
                res = homology(build_delta_oet(spec, p))
                out.append(DntCheck(spec, p, res, dnt_expected(spec, p)))
    return out


# -- the complex Delta_n ---------------------------------------------------------------------

Triple = tuple[tuple, tuple[int, ...], tuple[int, ...]]


def triple_degree(b: Triple) -> int:
    J, pi, _ = b
    return sum(dimension(x) for x in J) + len(pi) - 1


def admits_triple(p: int, n: int, b: Triple) -> bool:
    """Membership conditions for (J, pi, f), including the canonical order of f."""
    J, pi, f = b
    if not sum(rank(x, p) for x in J) <= sum(pi) <= n:
        return False
    load = [0] * len(pi)
    for x, j in zip(J, f):
        load[j - 1] += rank(x, p)
    if any(l > a for l, a in zip(load, pi)):
        return False
    for run in _runs(J):
        strict = not may_repeat(J[run[0]], p)
        for a, c in zip(run, run[1:]):
            if f[a] > f[c] or (strict and f[a] == f[c]):
                return False
    return True


def j_multisets(p: int, n: int, d_max: int) -> list[tuple]:
    """Sorted multisets of generators with total rank <= n and dimension <= d_max."""
    gens = [J for J in generators(p, n, d_max)]
    out = [()]
    for size in range(1, n // p + 1):
        for ms in combinations_with_replacement(gens, size):
            if sum(rank(x, p) for x in ms) <= n and sum(map(dimension, ms)) <= d_max:
                out.append(ms)
    return out


def part_basis(p: int, n: int, J: tuple, deg_max: int) -> list[Triple]:
    d = sum(map(dimension, J))
    if d > deg_max:
        return []
    rmin = sum(rank(x, p) for x in J)
    out = []
    for pi in compositions(n, max(rmin, 1), deg_max - d + 1):
        for f in product(range(1, len(pi) + 1), repeat=len(J)):
            b = (J, pi, f)
            if admits_triple(p, n, b):
                out.append(b)
    return out


def _assemble(basis: list[Triple], p: int, n: int, offset: int = 0) -> ChainComplex:
    present = set(basis)
    bases: dict[int, list] = {}
    maps: dict[int, list] = {}
    for b in basis:
        q = triple_degree(b)
        bases.setdefault(q, []).append(b)
        J, pi, f = b
        for pi2, f2, s in boundary_terms(pi, f):
            tgt = (J, pi2, f2)
            if tgt in present:
                maps.setdefault(q, []).append((b, tgt, s))
            elif admits_triple(p, n, tgt):
                raise AssertionError(f"boundary target {tgt} missing from basis")
    return chain_complex_from_maps(bases, maps, p, offset)


def build_delta_n(p: int, n: int, q_max: int) -> ChainComplex:
    """Delta_n over F_p with every basis element of degree <= q_max + 1."""
    deg_max = q_max + 1
    basis = []
    for J in j_multisets(p, n, deg_max):
        basis.extend(part_basis(p, n, J, deg_max))
    return _assemble(basis, p, n)


def split_by_j(C: ChainComplex) -> list[tuple[tuple, ChainComplex]]:
    """Direct summands of Delta_n, one per multiset J."""
    js = sorted({b[0] for basis in C.bases.values() for b in basis})
    return [(J, C.restrict(lambda b, J=J: b[0] == J)) for J in js]


def j_invariant(C: ChainComplex) -> bool:
    """Every nonzero boundary entry joins triples with the same J."""
    for q, m in C.boundaries.items():
        src, tgt = C.bases[q], C.bases.get(q - 1, [])
        for j, col in enumerate(m.cols):
            if any(tgt[r][0] != src[j][0] for r in col):
                return False
    return True


# -- reduction to shape complexes --------------------------------------------------------------

def shape_of_part(p: int, n: int, J: tuple) -> ShapeSpec:
    """Shape spec of the J-part: runs of equal sequences become groups.

    A run whose sequence may not repeat within a block is strict (O);
    otherwise it is weak (E).  Singleton runs carry no constraint.
    """
    t = len(J)
    O, E = [], []
    for run in _runs(J):
        if len(run) < 2:
            continue
        pts = tuple(i + 1 for i in run)
        (E if may_repeat(J[run[0]], p) else O).append(pts)
    n2 = n + t - sum(rank(x, p) for x in J)
    return ShapeSpec.make(n2, O, E, t)


def phi(p: int, b: Triple) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(J, pi, f) -> (pi', f) with pi'_j = pi_j - sum_{f(i)=j} (R(J_i) - 1)."""
    J, pi, f = b
    new = list(pi)
    for x, j in zip(J, f):
        new[j - 1] -= rank(x, p) - 1
    return tuple(new), f


@dataclass
class ReductionReport:
    J: tuple
    spec: ShapeSpec
    shift: int
    bijective: bool
    commutes: bool
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.bijective and self.commutes


def reduce_iso(p: int, n: int, J: tuple, part: ChainComplex, deg_max: int | None = None) -> ReductionReport:
    """Check that phi is a degree-preserving chain isomorphism from the J-part
    onto the shape complex shifted by d = D(J) (up to the degree cap)."""
    spec = shape_of_part(p, n, J)
    d = sum(map(dimension, J))
    shape = build_delta_oet(spec, p, offset=d)
    if deg_max is not None:
        shape = shape.restrict(lambda b: len(b[0]) - 1 + d <= deg_max)
    image = {}
    bad = []
    for q, basis in part.bases.items():
        for b in basis:
            image[b] = phi(p, b)
    target = {b for basis in shape.bases.values() for b in basis}
    bijective = len(set(image.values())) == len(image) and set(image.values()) == target
    # degrees: part degree q equals shape internal degree q - d
    for q, basis in part.bases.items():
        sb = shape.bases.get(q - d, [])
        if sorted(image[b] for b in basis) != sorted(sb):
            bijective = False
    commutes = bijective
    if bijective:
        for q, basis in part.bases.items():
            m = part.boundary(q)
            sm = shape.boundary(q - d)
            spos = {b: i for i, b in enumerate(shape.bases[q - d])}
            lower_part = part.bases.get(q - 1, [])
            lower_pos = {b: i for i, b in enumerate(shape.bases.get(q - d - 1, []))}
            for j, b in enumerate(basis):
                col = {lower_pos[image[lower_part[r]]]: v for r, v in m.cols[j].items()}
                if col != sm.cols[spos[image[b]]]:
                    commutes = False
                    bad.append(b)
    return ReductionReport(J, spec, d, bijective, commutes, bad)


# -- ranks of Delta_n against the counts ---------------------------------------------------------

@dataclass
class MainCheck:
    p: int
    n: int
    q: int
    computed: int
    predicted: int

    @property
    def ok(self) -> bool:
        return self.computed == self.predicted


def verify_main_theorem_internal(p: int, n: int, q_max: int) -> list[MainCheck]:
    H = homology(build_delta_n(p, n, q_max))
    return [MainCheck(p, n, q, H.rank(q), u_tilde_dim(p, n, q + 1)) for q in range(1, q_max + 1)]

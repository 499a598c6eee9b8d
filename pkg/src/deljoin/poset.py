"""Finite posets, order complexes and Euler characteristics.

A :class:`Poset` stores its elements in canonical (sorted label) order,
the Hasse diagram as a set of index pairs, and the order relation as one
bitset row per element (Python ints), which makes ``<=`` queries and
chain enumeration cheap.
"""
from __future__ import annotations

import json
from functools import cached_property
from itertools import combinations
from typing import Callable, Hashable, Iterable, Iterator, Sequence


class PosetError(ValueError):
    pass


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _canonical_order(labels: Sequence[Hashable]) -> list:
    try:
        return sorted(labels)
    except TypeError:
        return sorted(labels, key=lambda x: (type(x).__name__, repr(x)))


class Poset:
    """Immutable finite poset.

    Use :func:`build_poset` or :meth:`Poset.from_relation` rather than the
    constructor, which trusts its input.
    """

    __slots__ = ("elements", "index", "covers", "upper", "lower", "_up", "_down", "__dict__")

    def __init__(self, elements: Sequence, covers: Iterable[tuple[int, int]], up: Sequence[int]):
        self.elements = tuple(elements)
        self.index = {x: i for i, x in enumerate(self.elements)}
        self.covers = tuple(sorted(covers))
        n = len(self.elements)
        upper: list[list[int]] = [[] for _ in range(n)]
        lower: list[list[int]] = [[] for _ in range(n)]
        for i, j in self.covers:
            upper[i].append(j)
            lower[j].append(i)
        self.upper = tuple(tuple(u) for u in upper)
        self.lower = tuple(tuple(d) for d in lower)
        self._up = tuple(up)
        down = [0] * n
        for i, m in enumerate(self._up):
            for j in _bits(m):
                down[j] |= 1 << i
        self._down = tuple(down)

    # -- construction -------------------------------------------------------

    @classmethod
    def _from_index_relations(cls, labels: Sequence, pairs: Iterable[tuple[int, int]],
                              reduce: bool = True) -> "Poset":
        """Build from index pairs (i, j) meaning labels[i] < labels[j]."""
        labels = list(labels)
        order = _canonical_order(labels)
        if len(set(order)) != len(order):
            raise PosetError("duplicate labels")
        if labels != order:
            pos = {x: i for i, x in enumerate(order)}
            pairs = [(pos[labels[a]], pos[labels[b]]) for a, b in pairs]
        n = len(order)
        succ: list[set[int]] = [set() for _ in range(n)]
        indeg = [0] * n
        for a, b in pairs:
            if a == b:
                raise PosetError(f"cycle detected at {order[a]!r}")
            if b not in succ[a]:
                succ[a].add(b)
                indeg[b] += 1
        # Kahn's algorithm: topological order or a cycle
        topo = [i for i in range(n) if indeg[i] == 0]
        k = 0
        while k < len(topo):
            for b in succ[topo[k]]:
                indeg[b] -= 1
                if indeg[b] == 0:
                    topo.append(b)
            k += 1
        if len(topo) != n:
            stuck = next(i for i in range(n) if indeg[i] > 0)
            raise PosetError(f"cycle detected through {order[stuck]!r}")
        up = [0] * n
        for i in reversed(topo):
            m = 1 << i
            for b in succ[i]:
                m |= up[b]
            up[i] = m
        if reduce:
            covers = []
            for i in range(n):
                # j covers i iff no successor of i lies strictly below j
                inner = 0
                for k in succ[i]:
                    inner |= up[k] & ~(1 << k)
                covers.extend((i, j) for j in succ[i] if not (inner >> j) & 1)
        else:
            covers = [(a, b) for a in range(n) for b in succ[a]]
        return cls(order, covers, up)

    @classmethod
    def from_relation(cls, labels: Iterable, leq: Callable[[object, object], bool]) -> "Poset":
        """Poset on ``labels`` ordered by the predicate ``leq(x, y)`` (x <= y)."""
        labels = _canonical_order(list(labels))
        pairs = [(i, j) for i, x in enumerate(labels) for j, y in enumerate(labels)
                 if i != j and leq(x, y)]
        for i, j in pairs:
            if leq(labels[j], labels[i]):
                raise PosetError(f"antisymmetry fails for {labels[i]!r}, {labels[j]!r}")
        return cls._from_index_relations(labels, pairs)

    @classmethod
    def from_covers(cls, labels: Iterable, covers: Iterable[tuple]) -> "Poset":
        """Trusted fast path: ``covers`` already irredundant, given as label pairs."""
        labels = _canonical_order(list(set(labels)))
        pos = {x: i for i, x in enumerate(labels)}
        return cls._from_index_relations(labels, [(pos[a], pos[b]) for a, b in covers],
                                         reduce=False)

    # -- basic queries ------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.index

    def __repr__(self) -> str:
        return f"Poset({len(self)} elements, {len(self.covers)} covers)"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.elements == other.elements and self._up == other._up

    def __hash__(self) -> int:
        return hash((self.elements, self._up))

    def up_mask(self, i: int) -> int:
        """Bitset of indices j with element i <= element j."""
        return self._up[i]

    def down_mask(self, i: int) -> int:
        return self._down[i]

    def le_idx(self, i: int, j: int) -> bool:
        return bool((self._up[i] >> j) & 1)

    def le(self, x, y) -> bool:
        return self.le_idx(self.index[x], self.index[y])

    def lt(self, x, y) -> bool:
        return x != y and self.le(x, y)

    def cover_pairs(self) -> list[tuple]:
        return [(self.elements[i], self.elements[j]) for i, j in self.covers]

    def minimal(self) -> list:
        return [x for i, x in enumerate(self.elements) if not self.lower[i]]

    def maximal(self) -> list:
        return [x for i, x in enumerate(self.elements) if not self.upper[i]]

    @cached_property
    def bottom(self):
        """The unique minimum, or None."""
        mins = self.minimal()
        return mins[0] if len(mins) == 1 else None

    @cached_property
    def top(self):
        maxs = self.maximal()
        return maxs[0] if len(maxs) == 1 else None

    @cached_property
    def linear_extension(self) -> tuple[int, ...]:
        """Indices sorted so that i < j in the poset implies i comes first."""
        return tuple(sorted(range(len(self)), key=lambda i: (self._down[i].bit_count(), i)))

    def is_antichain(self) -> bool:
        return not self.covers

    def check(self) -> None:
        """Exhaustively verify the poset axioms and the cover relation."""
        n = len(self)
        for i in range(n):
            if not self.le_idx(i, i):
                raise PosetError("not reflexive")
            for j in _bits(self._up[i]):
                if j != i and self.le_idx(j, i):
                    raise PosetError("not antisymmetric")
                if self._up[j] & ~self._up[i]:
                    raise PosetError("not transitive")
        closure = [1 << i for i in range(n)]
        for i in reversed(self.linear_extension):
            for j in self.upper[i]:
                closure[i] |= closure[j]
        if tuple(closure) != self._up:
            raise PosetError("covers do not generate the order")
        for i, j in self.covers:
            strict_between = self._up[i] & self._down[j] & ~((1 << i) | (1 << j))
            if strict_between:
                raise PosetError("redundant cover")

    # -- derived posets -----------------------------------------------------

    def induced(self, subset: Iterable) -> "Poset":
        """Induced subposet on the given labels."""
        keep = sorted(self.index[x] for x in set(subset))
        mask = 0
        for i in keep:
            mask |= 1 << i
        pos = {i: k for k, i in enumerate(keep)}
        pairs = [(pos[i], pos[j]) for i in keep for j in _bits(self._up[i] & mask) if j != i]
        return Poset._from_index_relations([self.elements[i] for i in keep], pairs)

    def dual(self) -> "Poset":
        return Poset._from_index_relations(self.elements, [(j, i) for i, j in self.covers],
                                           reduce=False)

    def relabel(self, f: Callable) -> "Poset":
        new = [f(x) for x in self.elements]
        return Poset._from_index_relations(new, list(self.covers), reduce=False)

    def without(self, *labels) -> "Poset":
        drop = set(labels)
        return self.induced(x for x in self.elements if x not in drop)

    def proper_part(self) -> "Poset":
        """Remove a unique minimum and a unique maximum, when present."""
        drop = [x for x in (self.bottom, self.top) if x is not None]
        if len(self) == 1:
            drop = list(self.elements)
        return self.without(*drop)

    def with_bounds(self, bottom=None, top=None) -> "Poset":
        """Adjoin a new minimum and/or maximum with the given labels."""
        labels = list(self.elements)
        pairs = [(a, b) for a, b in self.cover_pairs()]
        if bottom is not None:
            labels.append(bottom)
            pairs += [(bottom, x) for x in self.minimal()]
        if top is not None:
            labels.append(top)
            pairs += [(x, top) for x in self.maximal()]
        return build_poset(labels, pairs)

    # -- chains -------------------------------------------------------------

    def iter_chains(self) -> Iterator[tuple[int, ...]]:
        """All nonempty chains, as index tuples listed bottom to top."""
        up = self._up

        def extend(chain: tuple[int, ...], mask: int):
            yield chain
            for j in _bits(mask):
                yield from extend(chain + (j,), up[j] & ~(1 << j))

        for i in range(len(self)):
            yield from extend((i,), up[i] & ~(1 << i))

    def iter_maximal_chains(self) -> Iterator[tuple[int, ...]]:
        def extend(chain):
            last = chain[-1]
            if not self.upper[last]:
                yield chain
            for j in self.upper[last]:
                yield from extend(chain + (j,))

        for i in range(len(self)):
            if not self.lower[i]:
                yield from extend((i,))

    def chain_counts(self) -> list[int]:
        """f-vector of the order complex: entry q counts chains with q+1 elements."""
        n = len(self)
        counts: list[list[int]] = [[] for _ in range(n)]
        total: list[int] = []
        for i in self.linear_extension:
            row = [1]
            for j in _bits(self._down[i] & ~(1 << i)):
                cj = counts[j]
                for length, c in enumerate(cj, start=1):
                    if length >= len(row):
                        row.append(0)
                    row[length] += c
            counts[i] = row
            for length, c in enumerate(row):
                if length >= len(total):
                    total.append(0)
                total[length] += c
        return total

    def is_chain(self, labels: Sequence) -> bool:
        return all(self.lt(a, b) for a, b in zip(labels, labels[1:]))

    # -- serialization -------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({"elements": [_jsonable(x) for x in self.elements],
                           "covers": [list(c) for c in self.covers]})

    @classmethod
    def from_json(cls, text: str) -> "Poset":
        data = json.loads(text)
        labels = [_from_jsonable(x) for x in data["elements"]]
        covers = [(labels[i], labels[j]) for i, j in data["covers"]]
        return build_poset(labels, covers)


def _jsonable(x):
    if isinstance(x, (tuple, list, frozenset)):
        return [_jsonable(y) for y in x]
    return x


def _from_jsonable(x):
    if isinstance(x, list):
        return tuple(_from_jsonable(y) for y in x)
    return x


def build_poset(labels: Iterable[Hashable], covers: Iterable[tuple]) -> Poset:
    """Validated poset from labels and (lower, upper) pairs.

    The pairs may be any generating relations; they are closed transitively
    and reduced to the Hasse diagram.  Raises :class:`PosetError` on a cycle,
    a duplicate label or a pair naming an unknown label.
    """
    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise PosetError("duplicate labels")
    pos = {x: i for i, x in enumerate(labels)}
    pairs = []
    for a, b in covers:
        if a not in pos or b not in pos:
            raise PosetError(f"cover ({a!r}, {b!r}) references an unknown label")
        pairs.append((pos[a], pos[b]))
    return Poset._from_index_relations(labels, pairs)


def chain_poset(n: int) -> Poset:
    return Poset.from_covers(range(n), [(i, i + 1) for i in range(n - 1)])


def antichain(n: int) -> Poset:
    return Poset.from_covers(range(n), [])


# -- simplicial complexes ----------------------------------------------------

class SimplicialComplex:
    """Simplicial complex on an indexed vertex set.

    ``faces[q]`` lists the q-dimensional faces as sorted vertex-index
    tuples.  The empty face is implicit.
    """

    def __init__(self, vertices: Sequence, faces: dict[int, list[tuple[int, ...]]]):
        self.vertices = tuple(vertices)
        self.faces = {q: sorted(fs) for q, fs in faces.items() if fs}

    @classmethod
    def from_facets(cls, vertices: Sequence, facets: Iterable[Iterable[int]]) -> "SimplicialComplex":
        seen: dict[int, set] = {}
        for facet in facets:
            facet = tuple(sorted(set(facet)))
            for size in range(1, len(facet) + 1):
                seen.setdefault(size - 1, set()).update(combinations(facet, size))
        return cls(vertices, {q: list(s) for q, s in seen.items()})

    @property
    def dimension(self) -> int:
        return max(self.faces, default=-1)

    def f_vector(self) -> list[int]:
        return [len(self.faces.get(q, ())) for q in range(self.dimension + 1)]

    def num_faces(self) -> int:
        return sum(self.f_vector())

    def check(self) -> None:
        for q, fs in self.faces.items():
            below = set(self.faces.get(q - 1, ()))
            for f in fs:
                if len(set(f)) != len(f) or len(f) != q + 1:
                    raise PosetError(f"malformed face {f}")
                if q > 0 and any(f[:i] + f[i + 1:] not in below for i in range(len(f))):
                    raise PosetError(f"face {f} has a missing boundary face")

    def __repr__(self) -> str:
        return f"SimplicialComplex(f={self.f_vector()})"


class OrderComplex(SimplicialComplex):
    """Order complex of a poset; faces are enumerated on first access."""

    def __init__(self, poset: Poset):
        self.poset = poset
        self.vertices = poset.elements

    @cached_property
    def faces(self) -> dict[int, list[tuple[int, ...]]]:  # type: ignore[override]
        out: dict[int, list] = {}
        for chain in self.poset.iter_chains():
            out.setdefault(len(chain) - 1, []).append(tuple(sorted(chain)))
        for fs in out.values():
            fs.sort()
        return out

    def f_vector(self) -> list[int]:
        if "faces" in self.__dict__:
            return [len(self.faces.get(q, ())) for q in range(max(self.faces, default=-1) + 1)]
        return self.poset.chain_counts()

    @property
    def dimension(self) -> int:
        return len(self.f_vector()) - 1


def order_complex(P: Poset) -> OrderComplex:
    return OrderComplex(P)


def barycentric_subdivision(P: Poset) -> Poset:
    """Poset of nonempty chains of P ordered by inclusion.

    Chains are labelled by tuples of element labels listed bottom to top.
    """
    labels = []
    covers = []
    for chain in P.iter_chains():
        lab = tuple(P.elements[i] for i in chain)
        labels.append(lab)
        if len(chain) > 1:
            for k in range(len(chain)):
                covers.append((lab[:k] + lab[k + 1:], lab))
    return Poset.from_covers(labels, covers)


def reduced_euler(P: Poset) -> int:
    """Reduced Euler characteristic -1 + f_0 - f_1 + ... of the order complex."""
    return -1 + sum((-1) ** q * f for q, f in enumerate(P.chain_counts()))


def mobius(P: Poset, x, y) -> int:
    """Möbius function mu(x, y); zero unless x <= y."""
    if not P.le(x, y):
        return 0
    if x == y:
        return 1
    return reduced_euler(open_interval(P, x, y))


def interval(P: Poset, x, y) -> Poset:
    if not P.le(x, y):
        raise PosetError(f"{x!r} is not below {y!r}")
    i, j = P.index[x], P.index[y]
    mask = P.up_mask(i) & P.down_mask(j)
    return P.induced(P.elements[k] for k in _bits(mask))


def open_interval(P: Poset, x, y) -> Poset:
    return interval(P, x, y).without(x, y)


def lower_set(P: Poset, x) -> Poset:
    return P.induced(P.elements[k] for k in _bits(P.down_mask(P.index[x])))


def upper_set(P: Poset, x) -> Poset:
    return P.induced(P.elements[k] for k in _bits(P.up_mask(P.index[x])))


def find_isomorphism(P: Poset, Q: Poset) -> dict | None:
    """An order isomorphism P -> Q as a label dict, or None.

    Backtracking over elements in a linear extension of P, with candidates
    filtered by (up-set size, down-set size, cover degrees).
    """
    if len(P) != len(Q) or len(P.covers) != len(Q.covers):
        return None

    def sig(R: Poset, i: int) -> tuple:
        return (R.up_mask(i).bit_count(), R.down_mask(i).bit_count(),
                len(R.upper[i]), len(R.lower[i]))

    sp = [sig(P, i) for i in range(len(P))]
    sq = [sig(Q, i) for i in range(len(Q))]
    if sorted(sp) != sorted(sq):
        return None
    order = P.linear_extension
    image = [-1] * len(P)
    used = [False] * len(Q)

    def ok(i: int, j: int) -> bool:
        for a in range(len(P)):
            b = image[a]
            if b < 0:
                continue
            if P.le_idx(a, i) != Q.le_idx(b, j) or P.le_idx(i, a) != Q.le_idx(j, b):
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        i = order[k]
        for j in range(len(Q)):
            if not used[j] and sq[j] == sp[i] and ok(i, j):
                image[i], used[j] = j, True
                if search(k + 1):
                    return True
                image[i], used[j] = -1, False
        return False

    if not search(0):
        return None
    return {P.elements[i]: Q.elements[image[i]] for i in range(len(P))}


def is_isomorphic(P: Poset, Q: Poset) -> bool:
    return find_isomorphism(P, Q) is not None

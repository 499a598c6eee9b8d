"""Exact homology of finite chain complexes over Z and F_p.

The reduction works degree by degree from the top: every unit entry of a
boundary matrix gives a pair of cells (tau, sigma) that can be cancelled
(Schur complement on the columns of d_q, deletion of column sigma from
d_{q-1} and of row tau from d_{q+1}).  The cancelled complex is chain
homotopy equivalent to the original one, so the small residual matrices
carry all ranks and invariant factors; those are finished off with a dense
Smith normal form on Python integers.
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from math import gcd
from typing import Hashable, Iterable, Sequence

from .poset import Poset, SimplicialComplex, order_complex


class ChainComplexError(ValueError):
    pass


# Callables invoked as hook("complex", C) after every ChainComplex is built and
# hook("homology", C, result) after every homology computation.  Used for
# whole-run audits; empty by default.
OBSERVERS: list = []


def _notify(*event) -> None:
    for hook in OBSERVERS:
        hook(*event)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def _check_ring(p: int | None) -> None:
    if p is not None and not is_prime(p):
        raise ChainComplexError(f"{p} is not prime")


@dataclass
class SparseMatrix:
    """Column-sparse integer matrix: ``cols[j]`` maps row index to entry."""

    nrows: int
    ncols: int
    cols: list[dict[int, int]]

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols, [{} for _ in range(ncols)])

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else (ncols or 0)
        cols = [{i: rows[i][j] for i in range(nrows) if rows[i][j]} for j in range(ncols)]
        return cls(nrows, ncols, cols)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def mod(self, p: int | None) -> "SparseMatrix":
        if p is None:
            return self
        cols = [{i: v % p for i, v in c.items() if v % p} for c in self.cols]
        return SparseMatrix(self.nrows, self.ncols, cols)


def compose(a: SparseMatrix, b: SparseMatrix, p: int | None = None) -> SparseMatrix:
    """Matrix product a @ b."""
    if a.ncols != b.nrows:
        raise ChainComplexError(f"shape mismatch {a.nrows}x{a.ncols} @ {b.nrows}x{b.ncols}")
    cols = []
    for col in b.cols:
        acc: dict[int, int] = {}
        for k, v in col.items():
            for i, w in a.cols[k].items():
                acc[i] = acc.get(i, 0) + v * w
        if p is not None:
            acc = {i: v % p for i, v in acc.items()}
        cols.append({i: v for i, v in acc.items() if v})
    return SparseMatrix(a.nrows, b.ncols, cols)


@dataclass
class ChainComplex:
    """Graded chain complex with sparse boundary maps.

    ``bases[q]`` lists the labels of the basis of C_q and ``boundaries[q]``
    is the matrix of d_q : C_q -> C_{q-1} (rows indexed by ``bases[q-1]``).
    ``p`` is None for integer coefficients, else the prime of F_p.
    ``offset`` is added to every internal degree when results are reported.
    """

    bases: dict[int, list]
    boundaries: dict[int, SparseMatrix]
    p: int | None = None
    offset: int = 0

    def __post_init__(self):
        _check_ring(self.p)
        for q in list(self.bases):
            if not self.bases[q]:
                del self.bases[q]
        for q, m in self.boundaries.items():
            if m.ncols != self.dim(q) or m.nrows != self.dim(q - 1):
                raise ChainComplexError(
                    f"d_{q} has shape {m.nrows}x{m.ncols}, expected {self.dim(q - 1)}x{self.dim(q)}")
        if self.p is not None:
            self.boundaries = {q: m.mod(self.p) for q, m in self.boundaries.items()}
        _notify("complex", self)

    def dim(self, q: int) -> int:
        return len(self.bases.get(q, ()))

    def degrees(self) -> list[int]:
        return sorted(self.bases)

    def boundary(self, q: int) -> SparseMatrix:
        m = self.boundaries.get(q)
        if m is None:
            return SparseMatrix.zero(self.dim(q - 1), self.dim(q))
        return m

    def euler_characteristic(self) -> int:
        return sum((-1) ** (q + self.offset) * self.dim(q) for q in self.bases)

    def over(self, p: int | None) -> "ChainComplex":
        """Same complex with coefficients changed (Z -> F_p only)."""
        if self.p is not None and p != self.p:
            raise ChainComplexError("can only change coefficients from Z")
        return ChainComplex(dict(self.bases), dict(self.boundaries), p, self.offset)

    def shifted(self, k: int) -> "ChainComplex":
        return ChainComplex(self.bases, self.boundaries, self.p, self.offset + k)

    def restrict(self, keep) -> "ChainComplex":
        """Subcomplex spanned by basis labels satisfying ``keep(label)``.

        The caller guarantees the span is closed under the boundary.
        """
        idx = {q: [i for i, b in enumerate(basis) if keep(b)] for q, basis in self.bases.items()}
        pos = {q: {old: new for new, old in enumerate(ix)} for q, ix in idx.items()}
        bases = {q: [self.bases[q][i] for i in ix] for q, ix in idx.items()}
        bnd = {}
        for q in bases:
            if q - 1 not in bases:
                continue
            m = self.boundary(q)
            rowpos = pos[q - 1]
            cols = []
            for i in idx[q]:
                col = m.cols[i]
                if any(r not in rowpos for r in col):
                    raise ChainComplexError("restriction is not a subcomplex")
                cols.append({rowpos[r]: v for r, v in col.items()})
            bnd[q] = SparseMatrix(len(idx[q - 1]), len(idx[q]), cols)
        return ChainComplex(bases, bnd, self.p, self.offset)


@dataclass
class HomologyResult:
    """Betti numbers (and integral torsion) per absolute degree."""

    p: int | None
    betti: dict[int, int] = field(default_factory=dict)
    torsion: dict[int, list[int]] = field(default_factory=dict)

    def __post_init__(self):
        self.betti = {q: b for q, b in sorted(self.betti.items()) if b}
        self.torsion = {q: list(t) for q, t in sorted(self.torsion.items()) if t}

    def rank(self, q: int) -> int:
        return self.betti.get(q, 0)

    def torsion_at(self, q: int) -> list[int]:
        return self.torsion.get(q, [])

    def is_zero(self) -> bool:
        return not self.betti and not self.torsion

    def is_free(self) -> bool:
        return not self.torsion

    def concentrated_in(self) -> set[int]:
        return set(self.betti) | set(self.torsion)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomologyResult):
            return NotImplemented
        return (self.p, self.betti, self.torsion) == (other.p, other.betti, other.torsion)

    def describe(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for q in sorted(self.concentrated_in()):
            terms = []
            b = self.rank(q)
            base = "Z" if self.p is None else f"F{self.p}"
            if b:
                terms.append(base if b == 1 else f"{base}^{b}")
            terms += [f"Z/{t}" for t in self.torsion_at(q)]
            parts.append(f"H{q}=" + "+".join(terms))
        return ", ".join(parts)

    def to_dict(self) -> dict:
        out: dict = {"ring": "Z" if self.p is None else "Fp"}
        if self.p is not None:
            out["p"] = self.p
        out["betti"] = {str(q): b for q, b in self.betti.items()}
        out["torsion"] = {str(q): t for q, t in self.torsion.items()}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "HomologyResult":
        p = data.get("p") if data["ring"] == "Fp" else None
        return cls(p, {int(q): b for q, b in data["betti"].items()},
                   {int(q): t for q, t in data.get("torsion", {}).items()})

    @classmethod
    def from_json(cls, text: str) -> "HomologyResult":
        return cls.from_dict(json.loads(text))


# -- construction --------------------------------------------------------------

def from_simplicial(K: SimplicialComplex, p: int | None = None, reduced: bool = True) -> ChainComplex:
    """Simplicial chain complex with d[v0..vq] = sum (-1)^i [.., v_i omitted, ..].

    Vertices of a face are taken in index (canonical label) order.  With
    ``reduced`` an augmentation basis element sits in degree -1.
    """
    faces = K.faces
    bases: dict[int, list] = {q: list(fs) for q, fs in faces.items()}
    bnd: dict[int, SparseMatrix] = {}
    for q, fs in faces.items():
        if q == 0:
            continue
        below = {f: i for i, f in enumerate(faces[q - 1])}
        cols = []
        for f in fs:
            col = {}
            for i in range(q + 1):
                col[below[f[:i] + f[i + 1:]]] = -1 if i & 1 else 1
            cols.append(col)
        bnd[q] = SparseMatrix(len(faces[q - 1]), len(fs), cols)
    if reduced:
        bases[-1] = [()]
        n0 = len(faces.get(0, ()))
        bnd[0] = SparseMatrix(1, n0, [{0: 1} for _ in range(n0)])
        if n0 == 0:
            bnd.pop(0)
    return ChainComplex(bases, bnd, p)


def verify_d_squared(C: ChainComplex) -> list[int]:
    """Degrees q where d_{q-1} d_q is nonzero (empty list means a complex)."""
    bad = []
    for q in sorted(C.boundaries):
        if q - 1 in C.boundaries:
            prod = compose(C.boundaries[q - 1], C.boundaries[q], C.p)
            if prod.nnz():
                bad.append(q + C.offset)
    return bad


# -- reduction -------------------------------------------------------------------

def _inverse(a: int, p: int | None) -> int | None:
    if p is None:
        return a if a in (1, -1) else None
    return pow(a, -1, p)


class _Eliminator:
    """Unit-pivot elimination on one boundary matrix (columns as dicts)."""

    def __init__(self, cols: dict[int, dict[int, int]], p: int | None):
        self.cols = cols
        self.p = p
        rows: dict[int, set[int]] = {}
        for j, col in cols.items():
            for r in col:
                rows.setdefault(r, set()).add(j)
        self.rows = rows
        self.pivot_rows: list[int] = []
        self.pivot_cols: list[int] = []

    def run(self) -> None:
        cols, rows, p = self.cols, self.rows, self.p
        heap = [(len(c), j) for j, c in cols.items()]
        heapq.heapify(heap)
        while heap:
            size, j = heapq.heappop(heap)
            col = cols.get(j)
            if col is None or len(col) != size:
                continue
            if size == 0:
                del cols[j]
                continue
            best = None
            best_cost = None
            for r, v in col.items():
                if _inverse(v, p) is None:
                    continue
                cost = len(rows[r])
                if best_cost is None or cost < best_cost:
                    best, best_cost = r, cost
                    if cost == 1:
                        break
            if best is None:
                continue  # no unit yet; requeued if a later update touches it
            touched = self._pivot(best, j)
            for x in touched:
                heapq.heappush(heap, (len(cols[x]), x))

    def _pivot(self, r: int, j: int) -> list[int]:
        cols, rows, p = self.cols, self.rows, self.p
        pcol = cols.pop(j)
        inv = _inverse(pcol[r], p)
        others = [x for x in rows[r] if x != j]
        for x in others:
            col = cols[x]
            c = col[r] * inv
            for rr, v in pcol.items():
                new = col.get(rr, 0) - c * v
                if p is not None:
                    new %= p
                if new:
                    if rr not in col:
                        rows[rr].add(x)
                    col[rr] = new
                elif rr in col:
                    del col[rr]
                    rows[rr].discard(x)
        for rr in pcol:
            rows[rr].discard(j)
        del rows[r]
        self.pivot_rows.append(r)
        self.pivot_cols.append(j)
        return others


def smith_invariants(rows: list[list[int]]) -> list[int]:
    """Nonzero invariant factors (ascending, each dividing the next) of a dense integer matrix."""
    A = [list(r) for r in rows if any(r)]
    diag: list[int] = []
    while A:
        ncols = len(A[0])
        # pivot: entry of least absolute value
        best = None
        for i, row in enumerate(A):
            for j, v in enumerate(row):
                if v and (best is None or abs(v) < abs(A[best[0]][best[1]])):
                    best = (i, j)
                    if abs(v) == 1:
                        break
            if best and abs(A[best[0]][best[1]]) == 1:
                break
        if best is None:
            break
        i, j = best
        A[0], A[i] = A[i], A[0]
        for row in A:
            row[0], row[j] = row[j], row[0]
        while True:
            a = A[0][0]
            done = True
            for k in range(1, len(A)):
                q = A[k][0] // a
                if q:
                    rk, r0 = A[k], A[0]
                    for c in range(ncols):
                        rk[c] -= q * r0[c]
                if A[k][0]:
                    done = False
            r0 = A[0]
            for c in range(1, ncols):
                q = r0[c] // a
                if q:
                    for row in A:
                        row[c] -= q * row[0]
                if r0[c]:
                    done = False
            if done:
                break
            # a remainder is smaller than the pivot: move it into place
            small = None
            for k in range(1, len(A)):
                if A[k][0] and (small is None or abs(A[k][0]) < abs(small[2])):
                    small = (k, 0, A[k][0])
            for c in range(1, ncols):
                if r0[c] and (small is None or abs(r0[c]) < abs(small[2])):
                    small = (0, c, r0[c])
            k, c, _ = small
            if c == 0:
                A[0], A[k] = A[k], A[0]
            else:
                for row in A:
                    row[0], row[c] = row[c], row[0]
        diag.append(abs(A[0][0]))
        A = [row[1:] for row in A[1:]]
        A = [r for r in A if any(r)]
        if A and not A[0]:
            break
    # normalise the diagonal into divisibility order
    for a in range(len(diag)):
        for b in range(a + 1, len(diag)):
            g = gcd(diag[a], diag[b])
            diag[a], diag[b] = g, diag[a] * diag[b] // g
    return diag


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    A = [[v % p for v in r] for r in rows]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [v * inv % p for v in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [(v - f * w) % p for v, w in zip(A[i], A[rank])]
        rank += 1
    return rank


def homology(C: ChainComplex, check: bool = True) -> HomologyResult:
    """Homology of C: Betti numbers, and torsion when C is over Z."""
    if check:
        bad = verify_d_squared(C)
        if bad:
            raise ChainComplexError(f"d^2 != 0 at degree(s) {bad}")
    p = C.p
    degrees = C.degrees()
    if not degrees:
        result = HomologyResult(p)
        _notify("homology", C, result)
        return result
    alive = {q: set(range(C.dim(q))) for q in degrees}
    residual: dict[int, dict[int, dict[int, int]]] = {}
    pivots: dict[int, int] = {}
    for q in sorted(degrees, reverse=True):
        m = C.boundaries.get(q)
        if m is None or q - 1 not in alive:
            continue
        cols = {j: dict(m.cols[j]) for j in alive[q]}
        rows_alive = alive[q - 1]
        for col in cols.values():
            for r in [r for r in col if r not in rows_alive]:
                del col[r]
        elim = _Eliminator(cols, p)
        elim.run()
        pivots[q] = len(elim.pivot_cols)
        alive[q].difference_update(elim.pivot_cols)
        alive[q - 1].difference_update(elim.pivot_rows)
        residual[q] = elim.cols
    ranks: dict[int, int] = {}
    torsion: dict[int, list[int]] = {}
    for q, cols in residual.items():
        rows_alive = sorted(alive[q - 1])
        rpos = {r: i for i, r in enumerate(rows_alive)}
        dense_cols = [c for j, c in cols.items() if j in alive[q] and any(r in rpos for r in c)]
        rank = pivots[q]
        if dense_cols:
            dense = [[0] * len(dense_cols) for _ in rows_alive]
            for k, col in enumerate(dense_cols):
                for r, v in col.items():
                    if r in rpos:
                        dense[rpos[r]][k] = v
            if p is None:
                inv = smith_invariants(dense)
                rank += len(inv)
                torsion[q - 1] = [d for d in inv if d > 1]
            else:
                rank += _rank_mod_p(dense, p)
        ranks[q] = rank
    betti = {}
    for q in degrees:
        b = C.dim(q) - ranks.get(q, 0) - ranks.get(q + 1, 0)
        if b < 0:
            raise ChainComplexError("negative Betti number; boundary ranks inconsistent")
        betti[q + C.offset] = b
    result = HomologyResult(p, betti, {q + C.offset: t for q, t in torsion.items()})
    _notify("homology", C, result)
    return result


def homology_of_poset(P: Poset, p: int | None = None) -> HomologyResult:
    """Reduced homology of the order complex of P."""
    return homology(from_simplicial(order_complex(P), p, reduced=True), check=False)


def betti_sequence(result: HomologyResult, lo: int, hi: int) -> list[int]:
    return [result.rank(q) for q in range(lo, hi + 1)]


def universal_coefficient_betti(integral: HomologyResult, p: int) -> dict[int, int]:
    """F_p Betti numbers predicted from integral homology."""
    out: dict[int, int] = {}
    degrees = integral.concentrated_in() | {q + 1 for q in integral.torsion}
    for q in degrees:
        b = integral.rank(q)
        b += sum(1 for t in integral.torsion_at(q) if t % p == 0)
        b += sum(1 for t in integral.torsion_at(q - 1) if t % p == 0)
        if b:
            out[q] = b
    return out


def check_universal_coefficients(integral: HomologyResult, modp: HomologyResult) -> bool:
    if integral.p is not None or modp.p is None:
        raise ValueError("expected an integral and a mod-p result")
    return universal_coefficient_betti(integral, modp.p) == modp.betti


def chain_complex_from_maps(bases: dict[int, Sequence[Hashable]],
                            maps: dict[int, Iterable[tuple[Hashable, Hashable, int]]],
                            p: int | None = None, offset: int = 0) -> ChainComplex:
    """Build a complex from labelled bases and (source, target, coefficient) triples for each d_q."""
    bases = {q: list(b) for q, b in bases.items()}
    pos = {q: {x: i for i, x in enumerate(b)} for q, b in bases.items()}
    bnd = {}
    for q, triples in maps.items():
        cols: list[dict[int, int]] = [{} for _ in bases.get(q, ())]
        for src, tgt, c in triples:
            col = cols[pos[q][src]]
            r = pos[q - 1][tgt]
            col[r] = col.get(r, 0) + c
        cols = [{r: v for r, v in col.items() if v} for col in cols]
        bnd[q] = SparseMatrix(len(bases.get(q - 1, ())), len(bases.get(q, ())), cols)
    return ChainComplex(bases, bnd, p, offset)

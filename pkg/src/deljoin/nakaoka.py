"""Nakaoka's admissible sequences Q(p) and dimension counts for U(Q(p)).

A sequence J = (j_1, ..., j_l) has dimension D(J) = sum of entries and rank
R(J) = p^l; both extend additively to monomials (multisets of sequences).
U_r^d counts monomials of rank r and dimension d in which no sequence of
odd dimension repeats (unless p = 2).  The shifted count Ũ uses
D~(J) = D(J) + 1 per factor; see ``u_tilde_dim`` for its repetition rule.

Only dimensions are computed, so the signs of graded commutativity never
enter.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterator

Sequence_ = tuple[int, ...]


def _check_prime(p: int) -> None:
    if p < 2 or any(p % f == 0 for f in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")


def dimension(J: Sequence_) -> int:
    return sum(J)


def rank(J: Sequence_, p: int) -> int:
    return p ** len(J)


def is_admissible(J: Sequence_, p: int) -> bool:
    if not J or any(j <= 0 for j in J):
        return False
    m = 2 * (p - 1)
    if any(j % m not in (0, m - 1) for j in J):
        return False
    if any(J[i] > p * J[i + 1] for i in range(len(J) - 1)):
        return False
    return J[0] > (p - 1) * sum(J[1:])


@lru_cache(maxsize=None)
def _enumerate_qp(p: int, d_max: int) -> tuple[Sequence_, ...]:
    m = 2 * (p - 1)
    allowed = [j for j in range(1, d_max + 1) if j % m in (0, m - 1)]
    out = []

    # build right to left; only j_k <= p j_{k+1} constrains the tail
    def grow(seq: Sequence_, total: int):
        if seq[0] > (p - 1) * (total - seq[0]):
            out.append(seq)
        for j in allowed:
            if total + j > d_max:
                break
            if j <= p * seq[0]:
                grow((j,) + seq, total + j)

    for j in allowed:
        grow((j,), j)
    out.sort(key=lambda J: (sum(J), len(J), J))
    return tuple(out)


def enumerate_qp(p: int, d_max: int) -> list[Sequence_]:
    """All sequences in Q(p) with D <= d_max, by dimension, then length, then lexicographically."""
    _check_prime(p)
    if d_max < 0:
        return []
    return list(_enumerate_qp(p, d_max))


def generators(p: int, r_max: int, d_max: int) -> list[Sequence_]:
    return [J for J in enumerate_qp(p, d_max) if rank(J, p) <= r_max]


def may_repeat(J: Sequence_, p: int, tilde: bool = False) -> bool:
    """Whether J can occur more than once in a nonzero monomial.

    Plain grading: allowed when D(J) is even or p = 2.  Shifted grading:
    allowed only when p is odd and D~(J) = D(J) + 1 is even.
    """
    if tilde:
        return p != 2 and (dimension(J) + 1) % 2 == 0
    return p == 2 or dimension(J) % 2 == 0


def is_nonvanishing(monomial, p: int, tilde: bool = False) -> bool:
    seen = set()
    for J in monomial:
        if J in seen and not may_repeat(J, p, tilde):
            return False
        seen.add(J)
    return True


def monomial_dimension(monomial, tilde: bool = False) -> int:
    return sum(dimension(J) + (1 if tilde else 0) for J in monomial)


def monomial_rank(monomial, p: int) -> int:
    return sum(rank(J, p) for J in monomial)


@lru_cache(maxsize=None)
def _count_table(p: int, r_max: int, d_max: int, tilde: bool) -> tuple[tuple[int, ...], ...]:
    """table[r][d] = number of nonvanishing monomials, by knapsack over generators."""
    table = [[0] * (d_max + 1) for _ in range(r_max + 1)]
    table[0][0] = 1
    shift = 1 if tilde else 0
    for J in generators(p, r_max, d_max):
        R, D = rank(J, p), dimension(J) + shift
        if D > d_max:
            continue
        if may_repeat(J, p, tilde):
            for r in range(R, r_max + 1):
                row, prev = table[r], table[r - R]
                for d in range(D, d_max + 1):
                    row[d] += prev[d - D]
        else:
            for r in range(r_max, R - 1, -1):
                row, prev = table[r], table[r - R]
                for d in range(d_max, D - 1, -1):
                    row[d] += prev[d - D]
    return tuple(tuple(row) for row in table)


def u_dim(p: int, r: int, d: int) -> int:
    """dim U_r^d(Q(p)): monomials of rank r >= 1 and dimension d."""
    _check_prime(p)
    if r <= 0 or d < 0:
        return 0
    return _count_table(p, r, d, False)[r][d]


def u_tilde_dim(p: int, r: int, d: int) -> int:
    """dim Ũ_r^d(Q(p)), counted with D~ = D + 1 per factor."""
    _check_prime(p)
    if r <= 0 or d < 0:
        return 0
    return _count_table(p, r, d, True)[r][d]


def sym_homology_dim(p: int, m: int, d: int) -> int:
    """dim H_d(S_m; F_p) = sum of U_r^d over 1 <= r <= m, plus the unit at d = 0."""
    _check_prime(p)
    unit = 1 if d == 0 else 0
    return unit + sum(u_dim(p, r, d) for r in range(1, m + 1))


def predicted_homology(p: int, k: int, q: int) -> int:
    """Predicted dim H_q of the symmetric deleted-join quotient for k factors."""
    return u_tilde_dim(p, k, q + 1)


def monomials(p: int, r: int, d: int, tilde: bool = False) -> Iterator[tuple[Sequence_, ...]]:
    """Explicit nonvanishing monomials of rank r and (shifted) dimension d."""
    gens = generators(p, r, d)
    min_rank = p
    for size in range(1, r // min_rank + 1):
        for mono in combinations_with_replacement(gens, size):
            if (monomial_rank(mono, p) == r and monomial_dimension(mono, tilde) == d
                    and is_nonvanishing(mono, p, tilde)):
                yield mono


def table_rows(p: int, r_max: int, d_max: int) -> list[tuple[int, int, int, int]]:
    """(r, d, U_r^d, Ũ_r^d) for 1 <= r <= r_max, 0 <= d <= d_max."""
    plain = _count_table(p, r_max, d_max, False)
    shifted = _count_table(p, r_max, d_max, True)
    return [(r, d, plain[r][d], shifted[r][d]) for r in range(1, r_max + 1) for d in range(d_max + 1)]

import pytest

from deljoin.constructions import bnkt, make_family
from deljoin.homology import homology_of_poset
from deljoin.poset import chain_poset, reduced_euler
from deljoin.shelling import TOP, EdgeLabeling, boolean_labeling, el_label_bnkt, falling_chains, verify_el


def maximal_chains(P, x, y):
    """Saturated chains x = c_0 < ... < c_r = y, found by comparisons only."""
    if x == y:
        return [(x,)]
    out = []
    for z in P.elements:
        if P.lt(x, z) and P.le(z, y) and not any(P.lt(x, w) and P.lt(w, z) for w in P.elements):
            out += [(x,) + c for c in maximal_chains(P, z, y)]
    return out


def el_oracle(lab):
    P = lab.poset
    for x in P.elements:
        for y in P.elements:
            if not P.lt(x, y):
                continue
            words = [tuple(lab.label(a, b) for a, b in zip(c, c[1:])) for c in maximal_chains(P, x, y)]
            inc = [w for w in words if all(a <= b for a, b in zip(w, w[1:]))]
            if len(inc) != 1 or any(w < inc[0] for w in words if w != inc[0]) or words.count(inc[0]) != 1:
                return False
    return True


def test_labeling_examples():
    lab = el_label_bnkt(1, 2, 1)
    empty = make_family([[]], [[]], 2)
    assert lab.label(empty, make_family([[1]], [[]], 2)) == -1
    assert lab.label(empty, make_family([[]], [[1]], 2)) == 1
    P = lab.poset
    assert all(lab.label(x, y) == 0 for x, y in P.cover_pairs() if y == TOP)
    lab = el_label_bnkt(2, 2, 1)
    assert lab.label(make_family([[1]], [[]], 2), make_family([[1]], [[2]], 2)) == 2
    with pytest.raises(ValueError):
        el_label_bnkt(2, 2, 0)


def test_el_examples():
    C = chain_poset(4)
    inc = EdgeLabeling.from_function(C, lambda x, y: C.index[y])
    assert verify_el(inc).ok
    assert verify_el(el_label_bnkt(2, 2, 1)).ok
    assert verify_el(el_label_bnkt(3, 2, 2)).ok


def test_non_el_labeling_rejected():
    lab = boolean_labeling(2)
    flat = EdgeLabeling(lab.poset, {e: 0 for e in lab.labels})
    r = verify_el(flat)
    assert not r.ok and r.violations
    assert not el_oracle(flat)


def test_falling_examples():
    assert falling_chains(boolean_labeling(2)) == {2: 1}
    assert falling_chains(boolean_labeling(4)) == {4: 1}
    lab = el_label_bnkt(2, 2, 2)
    P = bnkt(2, 2, 2)
    h = homology_of_poset(P.without(P.bottom))
    assert sum(falling_chains(lab).values()) == h.rank(1)


@pytest.mark.parametrize("n,k,t", [(n, k, t) for n in range(1, 4) for k in range(1, 4) for t in range(1, k + 1)])
def test_el_against_oracle(n, k, t):
    lab = el_label_bnkt(n, k, t)
    assert verify_el(lab).ok == el_oracle(lab) is True


@pytest.mark.parametrize("n,k,t", [(n, k, t) for n in range(1, 5) for k in range(1, 4) for t in range(1, k + 1)])
def test_falling_chains_give_homology(n, k, t):
    lab = el_label_bnkt(n, k, t)
    falls = falling_chains(lab)
    P = bnkt(n, k, t)
    part = P.without(P.bottom)
    h = homology_of_poset(part)
    assert h.is_free() and h.concentrated_in() <= {n - 1}
    # every maximal chain has n + 1 edges once the top is adjoined
    assert set(falls) <= {n + 1}
    assert sum(falls.values()) == h.rank(n - 1) == abs(reduced_euler(part))

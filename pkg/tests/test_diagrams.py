import pytest
from hypothesis import given, settings, strategies as st

from deljoin.constructions import boolean_poset, bnk_hat, deleted_product, diagram_dn, symmetric_action_on_dn
from deljoin.diagrams import (DiagramAction, DiagramError, PosetDiagram, PosetGroupAction,
                              check_condition_a, diagram_barycentric, lift_action_to_subdivision,
                              lift_chain, poset_limit, quotient, quotient_diagram, quotient_poset,
                              random_diagram, verify_subdivision_invariance)
from deljoin.poset import antichain, barycentric_subdivision, build_poset, chain_poset, is_isomorphic


def swap_b2():
    B = boolean_poset(2)
    return B, PosetGroupAction.from_label_maps(B, [lambda S: tuple(sorted({1: 2, 2: 1}[a] for a in S))])


def symmetric_action(n):
    from itertools import permutations
    B = boolean_poset(n)
    maps = [lambda S, g=g: tuple(sorted(g[a - 1] for a in S)) for g in permutations(range(1, n + 1))]
    return B, PosetGroupAction.from_label_maps(B, maps)


def grid_diagram():
    base = chain_poset(2)
    lo, hi = base.elements
    C = build_poset("uv", [("u", "v")])
    return PosetDiagram(base, {lo: C, hi: C}, {(hi, lo): {"u": "u", "v": "v"}})


def test_limit_examples():
    Q = boolean_poset(2)
    single = PosetDiagram(chain_poset(1), {chain_poset(1).elements[0]: Q}, {})
    assert is_isomorphic(poset_limit(single), Q)
    grid = poset_limit(grid_diagram())
    assert len(grid) == 4 and is_isomorphic(grid, boolean_poset(2))
    L = poset_limit(diagram_dn(boolean_poset(1), 2))
    assert len(L) == 2 and L.is_antichain()


def test_limit_size():
    for seed in range(20):
        D = random_diagram(seed)
        assert len(poset_limit(D)) == sum(len(D.fiber(x)) for x in D.base.elements)


def test_barycentric_examples():
    D = diagram_barycentric(grid_diagram())
    lo, hi = chain_poset(2).elements
    assert sorted(D.base.elements) == sorted([(lo,), (hi,), (lo, hi)])
    assert D.fiber((hi,)) is D.fiber((lo, hi))
    assert D.arrow((lo, hi), (hi,)) == {"u": "u", "v": "v"}
    D.check()
    diagram_barycentric(diagram_dn(boolean_poset(1), 2)).check()


def test_check_rejects_bad_diagrams():
    base = chain_poset(2)
    lo, hi = base.elements
    C = build_poset("uv", [("u", "v")])
    with pytest.raises(DiagramError):
        PosetDiagram(base, {lo: C, hi: C}, {(hi, lo): {"u": "v", "v": "u"}}).check()
    with pytest.raises(DiagramError):
        PosetDiagram(base, {lo: C, hi: C}, {}).check()
    base3 = chain_poset(3)
    a, b, c = base3.elements
    X = antichain(2)
    x0, x1 = X.elements
    arrows = {(c, b): {x0: x0, x1: x1}, (b, a): {x0: x0, x1: x1}, (c, a): {x0: x1, x1: x0}}
    assert not PosetDiagram(base3, {a: X, b: X, c: X}, arrows).is_functorial()


def test_condition_a_examples():
    B, act = swap_b2()
    assert not check_condition_a(B, act)
    bd = barycentric_subdivision(B)
    assert check_condition_a(bd, act.induced_on_subdivision(bd))
    assert check_condition_a(B, PosetGroupAction(B, [tuple(range(len(B)))]))


def test_quotient_examples():
    B, act = swap_b2()
    Q = quotient_poset(B, act, strict=False)
    assert len(Q) == 3 and is_isomorphic(Q, chain_poset(3))
    with pytest.raises(DiagramError):
        quotient_poset(B, act, strict=True)
    assert quotient_poset(B, PosetGroupAction(B, [])) == B
    A = antichain(2)
    assert len(quotient_poset(A, PosetGroupAction(A, [(1, 0)]))) == 1


def test_orbit_relation_of_automorphisms():
    # x < g y and y < h x would give x < (gh) x < (gh)^2 x < ..., impossible in a finite group
    P = build_poset("abcd", [("a", "b"), ("c", "d"), ("a", "d"), ("c", "b")])
    Q = quotient_poset(P, PosetGroupAction(P, [(2, 1, 0, 3)]), strict=False)
    assert len(Q) == 3 and len(Q.maximal()) == 2
    zig = build_poset("abcd", [("a", "b"), ("c", "d")])
    Q = quotient_poset(zig, PosetGroupAction(zig, [(2, 3, 0, 1)]), strict=False)
    assert is_isomorphic(Q, chain_poset(2))


def test_lift_chain_examples():
    B, act = swap_b2()
    q = quotient(B, act, strict=False)
    chain = tuple(sorted(q.poset.elements, key=len))
    lift = lift_chain(B, act, chain)
    assert lift in {((), (1,), (1, 2)), ((), (2,), (1, 2))}
    assert lift_chain(B, act, ((1,),)) == ((1,),)


def test_lift_every_chain_bd_b3():
    B, act = symmetric_action(3)
    bd = barycentric_subdivision(B)
    bact = act.induced_on_subdivision(bd)
    q = quotient(bd, bact)
    Q = q.poset
    count = 0
    for idx_chain in Q.iter_chains():
        chain = tuple(Q.elements[i] for i in idx_chain)
        lift = lift_chain(bd, bact, chain)
        assert all(q.project(x) == o for x, o in zip(lift, chain))
        assert all(bd.lt(a, b) for a, b in zip(lift, lift[1:]))
        count += 1
    assert count > 0


def test_projection_preserves_chains():
    B, act = symmetric_action(3)
    bd = barycentric_subdivision(B)
    q = quotient(bd, act.induced_on_subdivision(bd))
    for c in bd.iter_chains():
        img = [q.project(bd.elements[i]) for i in c]
        assert all(q.poset.lt(a, b) for a, b in zip(img, img[1:]))


def test_subdivision_always_separable():
    for n in (2, 3):
        B, act = symmetric_action(n)
        bd = barycentric_subdivision(B)
        assert check_condition_a(bd, act.induced_on_subdivision(bd))
        quotient(bd, act.induced_on_subdivision(bd))


def test_quotient_diagram_examples():
    m = 2
    act = symmetric_action_on_dn(boolean_poset(m), 2)
    Q = quotient_diagram(act)
    fibres = {tuple(len(S) for S in x): Q.fiber(x) for x in Q.base.elements}
    assert len(Q.base) == 3
    assert is_isomorphic(fibres[(1,)], boolean_poset(m).without(()))
    assert is_isomorphic(fibres[(1, 2)], deleted_product(boolean_poset(m), 2))
    assert is_isomorphic(fibres[(2,)], bnk_hat(m, 2))


def test_trivial_action_quotient_diagram():
    D = diagram_barycentric(grid_diagram())
    ident = tuple(range(len(D.base)))
    act = DiagramAction(D, PosetGroupAction(D.base, [ident]),
                        {ident: {x: {e: e for e in D.fiber(x).elements} for x in D.base.elements}})
    Q = quotient_diagram(act)
    assert set(Q.base.elements) == set(D.base.elements)
    assert all(Q.fiber(x).elements == D.fiber(x).elements for x in D.base.elements)


def test_lifted_action_is_valid():
    D = diagram_dn(boolean_poset(1), 2)
    base = D.base
    perm = tuple(base.index[tuple(sorted({1: 2, 2: 1}[a] for a in A))] for A in base.elements)
    ident = tuple(range(len(base)))
    taus = {ident: {A: {e: e for e in D.fiber(A).elements} for A in base.elements},
            perm: {A: {e: e[::-1] for e in D.fiber(A).elements} for A in base.elements}}
    act = DiagramAction(D, PosetGroupAction(base, [perm]), taus)
    act.check()
    lifted = lift_action_to_subdivision(act)
    lifted.check()
    assert check_condition_a(lifted.diagram.base, lifted.base)


def test_subdivision_invariance_examples():
    assert verify_subdivision_invariance(grid_diagram()).ok
    r = verify_subdivision_invariance(diagram_dn(boolean_poset(1), 2))
    assert r.ok and r.direct.betti == {0: 1}
    assert verify_subdivision_invariance(diagram_dn(boolean_poset(2), 3), 2).ok


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_diagrams(seed):
    D = random_diagram(seed)
    D.check()
    assert PosetDiagram.from_json(D.to_json()).to_json() == D.to_json()
    for p in (None, 2):
        assert verify_subdivision_invariance(D, p).ok

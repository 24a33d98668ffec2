from collections import Counter
from fractions import Fraction

import pytest

from qdolbeault.cartan import RootSystem
from qdolbeault.linalg import SMat
from qdolbeault.repn import (build_u_minus, check_invariance, check_module,
                             dual_module, highest_weight_module, invariant_inner_product,
                             tensor, trivial_module)
from qdolbeault.scalars import ONE, Scalar

q = Scalar.vpow


def freudenthal(rs, lam):
    """Weight multiplicities of the classical irreducible module (independent oracle)."""
    pos = [(rs.root_to_weight(b), sum(b)) for b in rs.positive_roots]
    simple = [rs.alpha(i) for i in range(rs.rank)]

    def add(a, b, k=1):
        return tuple(x + k * y for x, y in zip(a, b))

    def form(a, b):
        return Fraction(rs.pairing(a, b))

    lr = add(lam, rs.rho)
    top = form(lr, lr)
    mult = {tuple(lam): 1}
    frontier, depth = [tuple(lam)], 0
    while frontier:
        depth += 1
        nxt = []
        for nu in sorted({add(mu, a, -1) for mu in frontier for a in simple}):
            num = sum(mult.get(add(nu, al, k), 0) * form(add(nu, al, k), al)
                      for al, h in pos for k in range(1, depth // h + 1))
            nr = add(nu, rs.rho)
            den = top - form(nr, nr)
            m = 2 * num / den if den else 0
            if m:
                assert m.denominator == 1
                mult[nu] = int(m)
                nxt.append(nu)
        frontier = nxt
    return Counter(mult)


def weyl_dimension(rs, lam):
    out = Fraction(1)
    lr = tuple(a + b for a, b in zip(lam, rs.rho))
    for b in rs.positive_roots:
        al = rs.root_to_weight(b)
        out *= Fraction(rs.pairing(lr, al)) / Fraction(rs.pairing(rs.rho, al))
    return out


CASES = [("A", 1, (1,)), ("A", 1, (3,)), ("A", 3, (1, 0, 0)), ("A", 3, (0, 1, 0)),
         ("A", 3, (1, 0, 1)), ("B", 2, (1, 1)), ("C", 3, (0, 1, 0)), ("G", 2, (1, 0)),
         ("B", 3, (0, 0, 1)), ("D", 4, (0, 1, 0, 0))]


@pytest.mark.parametrize("typ,r,lam", CASES)
def test_weight_multiplicities_match_freudenthal(typ, r, lam):
    rs = RootSystem(typ, r)
    M = highest_weight_module(rs, lam)
    assert M.dim == weyl_dimension(rs, lam)
    assert Counter(M.weights) == freudenthal(rs, lam)


@pytest.mark.parametrize("typ,r,lam", CASES[:8])
def test_defining_relations_hold(typ, r, lam):
    assert check_module(highest_weight_module(RootSystem(typ, r), lam)) == []


def test_sl2_vector_module():
    rs = RootSystem("A", 1)
    V = highest_weight_module(rs, (1,))
    assert V.dim == 2
    qq = rs.Q.q()
    assert V.Kj(1) == SMat.diag([qq, qq.inverse()])
    assert V.E[1].nnz() == 1 and V.F[1].nnz() == 1


def test_trivial_module():
    rs = RootSystem("A", 3)
    T = highest_weight_module(rs, (0, 0, 0))
    assert T.dim == 1
    assert all(T.E[j].is_zero() and T.F[j].is_zero() for j in T.gens)
    assert invariant_inner_product(T) == SMat.identity(1)


def test_u_plus_for_gr24(gr24):
    U = gr24.u_plus
    assert U.dim == 4
    assert U.weights == [gr24.pd.xi_weight(k) for k in range(1, 5)]
    assert U.gens == (1, 3)
    assert check_module(U) == []


def test_u_plus_for_cp1(cp1):
    U = cp1.u_plus
    assert U.dim == 1 and U.gens == ()


def test_u_minus_weights_are_negated(gr24):
    D = build_u_minus(gr24.pd)
    assert Counter(D.weights) == Counter(tuple(-x for x in w) for w in gr24.u_plus.weights)
    assert check_module(D) == []


def test_tensor_with_trivial():
    rs = RootSystem("A", 1)
    V = highest_weight_module(rs, (1,))
    TV = tensor(trivial_module(rs), V)
    assert TV.weights == V.weights
    assert TV.E[1] == V.E[1] and TV.F[1] == V.F[1]


def test_tensor_weights():
    rs = RootSystem("A", 1)
    V = highest_weight_module(rs, (1,))
    VV = tensor(V, V)
    assert [w[0] for w in VV.weights] == [2, 0, 0, -2]
    assert check_module(VV) == []


def test_u_plus_square_dimension(gr24):
    assert tensor(gr24.u_plus, gr24.u_plus).dim == 16


def test_dual_modules():
    rs = RootSystem("A", 3)
    V = highest_weight_module(rs, (1, 0, 0))
    for side in ("left", "right"):
        D = dual_module(V, side)
        assert check_module(D) == []
        assert dual_module(D, side).weights == V.weights
    T = trivial_module(rs)
    assert dual_module(T).weights == T.weights


def test_sl2_inner_product():
    V = highest_weight_module(RootSystem("A", 1), (1,))
    G = invariant_inner_product(V)
    assert G[0, 0] == ONE and G[0, 1] == 0 * ONE
    assert check_invariance(V, G) == []


def test_tensor_gram_is_kronecker(gr24):
    U = gr24.u_plus
    G = invariant_inner_product(U)
    assert invariant_inner_product(tensor(U, U)) == G.kron(G)


@pytest.mark.parametrize("lam", [(1, 0, 0), (0, 1, 0), (1, 0, 1)])
def test_inner_product_invariance(lam):
    V = highest_weight_module(RootSystem("A", 3), lam)
    G = invariant_inner_product(V)
    assert check_invariance(V, G) == []

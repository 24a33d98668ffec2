from math import comb

import pytest

from qdolbeault.golden import load_fixture
from qdolbeault.quadratic import (QuadraticAlgebra, RewritingError, associated_graded,
                                  check_dual_basis, check_q_commutation, check_rule_shape,
                                  exterior_algebra, frobenius_data, koszul_complex,
                                  quadratic_dual, same_relation_space)
from qdolbeault.scalars import ONE, ZERO
from qdolbeault.uqg import parse_scalar


def _fixture_rules(name, L):
    out = {}
    for r in load_fixture(name)["value"]:
        a, b = (k - 1 for k in r["lhs"])
        out[(a, b)] = {tuple(k - 1 for k in t["word"]): parse_scalar(t["coeff"], L) for t in r["rhs"]}
    return out


def test_gr24_symmetric_rules_are_quantum_matrices(gr24):
    assert gr24.S.rules == _fixture_rules("gr24_symmetric_rules", gr24.rs.L)


def test_gr24_exterior_rules(gr24):
    assert gr24.Lambda_minus.rules == _fixture_rules("gr24_exterior_minus_rules", gr24.rs.L)


def test_gr24_named_relations(gr24):
    S, Q = gr24.S, gr24.rs.Q
    q = Q.q()
    # x1 x2 = q x2 x1
    assert S.normal_form((1, 0)) == {(0, 1): q.inverse()}
    # x4 x1 = x1 x4 - (q - q^-1) x2 x3
    assert S.normal_form((3, 0)) == {(0, 3): ONE, (1, 2): -(q - q.inverse())}
    Lm = gr24.Lambda_minus
    # y2 y3 + y3 y2 = (q - q^-1) y1 y4
    lhs = Lm.normal_form_vec({(1, 2): ONE, (2, 1): ONE})
    assert lhs == {(0, 3): q - q.inverse()}
    assert all(Lm.normal_form((k, k)) == {} for k in range(4))


def test_ordered_monomials_are_fixed(gr24):
    S = gr24.S
    for w in S.normal_words(3):
        assert S.normal_form(w) == {w: ONE}


def test_rank_one_algebras(cp1):
    assert cp1.S.rules == {}
    assert cp1.S.hilbert_series(4) == [1, 1, 1, 1, 1]
    assert cp1.Lambda_minus.rules == {(0, 0): {}}
    assert [cp1.Lambda_minus.count_normal_words(d) for d in range(3)] == [1, 1, 0]


def test_hilbert_series(gr24):
    assert gr24.S.hilbert_series(3) == [1, 4, 10, 20]
    assert gr24.S.hilbert_series(0) == [1]
    assert [gr24.Lambda_minus.count_normal_words(d) for d in range(6)] == [1, 4, 6, 4, 1, 0]


def test_hilbert_series_from_ideal_ranks(gr24):
    hs, _ = gr24.S.hilbert_series_by_rank(4, "exact")
    assert hs == [comb(3 + d, 3) for d in range(5)]


def test_confluence(gr24, cp2):
    for f in (gr24, cp2):
        assert f.S.check_confluence() == []
        assert f.Lambda_minus.check_confluence() == []
        assert f.Lambda_plus.check_confluence() == []


def test_non_pbw_relations_are_rejected():
    # x2 x1 - x1 x1 has leading word x2 x1 but x1 x1 is not allowed as a lower term
    with pytest.raises(RewritingError):
        QuadraticAlgebra(["a", "b"], [(0,), (0,)], [{(0, 1): ONE}], "sym")


def test_non_confluent_rules_are_detected():
    # x2x1 = 2 x1x2, x3x2 = x2x3, x3x1 = x1x3 + x2x2: the overlap x3x2x1 resolves two ways
    two = ONE + ONE
    A = QuadraticAlgebra(["a", "b", "c"], [(0,)] * 3,
                         [{(1, 0): ONE, (0, 1): -two}, {(2, 1): ONE, (1, 2): -ONE},
                          {(2, 0): ONE, (0, 2): -ONE, (1, 1): -ONE}], "sym")
    assert A.check_confluence() == [(2, 1, 0)]


def test_quadratic_dual_is_exterior_algebra(gr24):
    Lm2 = exterior_algebra(gr24.u_minus, gr24.commutor_minus)
    assert same_relation_space(gr24.Lambda_minus, Lm2)


def test_double_dual(gr24, cp1):
    for f in (gr24, cp1):
        S = f.S
        SS = quadratic_dual(quadratic_dual(S), names=S.names, weights=S.weights, kind="sym")
        assert same_relation_space(S, SS)


def test_polynomial_ring_dual_is_exterior(cp1):
    L = quadratic_dual(cp1.S)
    assert L.kind == "ext" and L.rules == {(0, 0): {}}


def test_antisymmetric_tensors(gr24):
    T = gr24.tensors_plus
    assert len(T.basis[1]) == 4
    assert len(T.basis[2]) == 6
    assert len(T.basis.get(5, [])) == 0


def test_frobenius_grams(gr24):
    fd = frobenius_data(gr24.Lambda_minus)
    assert fd.grams[0].shape == (1, 1) and fd.grams[4].shape == (1, 1)
    assert fd.grams[1].shape == (4, 4)
    assert all(d != ZERO for d in fd.dets.values())
    assert check_dual_basis(fd)
    top = tuple(range(4))
    assert fd.dual_basis[top] == {(): ONE}


def test_dual_basis_check_detects_corruption(gr24):
    fd = frobenius_data(gr24.Lambda_minus)
    J = (0,)
    fd.dual_basis[J] = {w: x * 2 for w, x in fd.dual_basis[J].items()}
    assert not check_dual_basis(fd)


def test_associated_graded(gr24):
    grS = associated_graded(gr24.S, "lex")
    assert grS.rules[(3, 0)] == {(0, 3): ONE}
    assert check_q_commutation(grS, gr24.pd, 1) == []
    grL = associated_graded(gr24.Lambda_minus, "oplex")
    assert all(grL.rules[(k, k)] == {} for k in range(4))
    assert check_q_commutation(grL, gr24.pd, -1) == []
    assert check_q_commutation(gr24.S, gr24.pd, 1) == [(4, 1)]


def test_pure_q_commutation_is_its_own_graded(cp2):
    grS = associated_graded(cp2.S, "lex")
    assert grS.rules == cp2.S.rules


def test_rule_shape(gr24, cp2):
    assert check_rule_shape(gr24.S, gr24.pd) == []
    q = cp2.rs.Q.q()
    assert cp2.S.rules == {(1, 0): {(0, 1): q.inverse()}}


def test_koszul_complex(gr24, cp1):
    K = koszul_complex(gr24.S, gr24.Lambda_minus, 4)
    assert K["d_squared_zero"]
    assert all(h == (1 if k == (0, 0) else 0) for k, h in K["homology"].items())
    K1 = koszul_complex(cp1.S, cp1.Lambda_minus, 3)
    assert all(h == (1 if k == (0, 0) else 0) for k, h in K1["homology"].items())

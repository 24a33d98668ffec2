import pytest

from qdolbeault.braiding import (check_triangular, commutor, commutor_polar, compute_braiding,
                                 is_module_map, verify_coboundary)
from qdolbeault.cartan import RootSystem
from qdolbeault.golden import load_fixture
from qdolbeault.linalg import SMat
from qdolbeault.repn import highest_weight_module, tensor, trivial_module
from qdolbeault.scalars import ONE
from qdolbeault.uqg import parse_scalar


@pytest.fixture(scope="module")
def sl2_vector():
    return highest_weight_module(RootSystem("A", 1), (1,))


def _flip(n, m):
    return SMat(n * m, n * m, {b * n + a: {a * m + b: ONE} for a in range(n) for b in range(m)})


def test_sigma_vv_matches_fixture(sl2_vector):
    s = commutor(sl2_vector).sigma
    expected = load_fixture("sigma_vv")["value"]
    L = sl2_vector.rs.L
    for i in range(4):
        for j in range(4):
            assert s[i, j] == parse_scalar(expected[i][j], L), (i, j)


def test_braiding_on_highest_vector(sl2_vector):
    R = compute_braiding(sl2_vector, sl2_vector)
    assert R[0, 0] == sl2_vector.rs.Q.qpow("1/2")
    assert commutor(sl2_vector).sigma[0, 0] == ONE


def test_braiding_is_a_module_map(sl2_vector, gr24):
    for V in (sl2_vector, gr24.u_plus):
        R = compute_braiding(V, V)
        assert is_module_map(R, tensor(V, V), tensor(V, V))
        assert check_triangular(R, V, V)


def test_braiding_methods_agree(gr24):
    U = gr24.u_plus
    assert compute_braiding(U, U, "recursive") == compute_braiding(U, U, "solve")


def test_braiding_with_trivial_is_flip():
    rs = RootSystem("A", 2)
    V = highest_weight_module(rs, (1, 0))
    T = trivial_module(rs)
    assert compute_braiding(T, V) == _flip(1, 3)
    assert compute_braiding(V, T) == _flip(3, 1)


def test_commutor_is_involutive(gr24, sl2_vector):
    for V in (sl2_vector, gr24.u_plus):
        s = commutor(V).sigma
        assert s @ s == SMat.identity(s.nrows)


def test_gr24_commutor_factorises(gr24, sl2_vector):
    """u_+ is the outer tensor square of the vector representation of sl_2."""
    s = commutor(sl2_vector).sigma
    L2, L4 = sl2_vector.rs.L, gr24.rs.L
    s4 = SMat(4, 4, {i: {j: parse_scalar(x.to_q_string(L2), L4) for j, x in r.items()}
                     for i, r in s.rows.items()})

    def idx(a, b, c, d):
        return ((a * 2 + b) * 2 + c) * 2 + d

    T = SMat(16, 16, {idx(a, c, b, d): {idx(a, b, c, d): ONE}
                      for a in range(2) for b in range(2) for c in range(2) for d in range(2)})
    assert gr24.commutor_plus.sigma == T @ s4.kron(s4) @ T


def test_eigenspace_dimensions(gr24, sl2_vector):
    C = commutor(sl2_vector)
    assert (len(C.S2), len(C.L2)) == (3, 1)
    C = gr24.commutor_plus
    assert (len(C.S2), len(C.L2)) == (10, 6)
    assert len(C.eigen) == 4
    assert all(c.monomial() is not None for _, _, c, _ in C.eigen)
    rs = RootSystem("A", 1)
    C = commutor(trivial_module(rs))
    assert (len(C.S2), len(C.L2)) == (1, 0)


def test_polar_route_agrees_with_sign_rule(gr24):
    U = gr24.u_plus
    assert commutor_polar(U, U).sigma == gr24.commutor_plus.sigma


@pytest.mark.parametrize("typ,r,t", [("A", 2, 1), ("A", 3, 2)])
def test_coboundary_axioms_on_u_plus(typ, r, t):
    from qdolbeault.pipeline import Flag
    U = Flag(f"{typ}{r}", t).u_plus
    res = verify_coboundary(U, U, U)
    assert all(v["holds"] for v in res.values()), res


def test_coboundary_axioms_sl2_and_trivial(sl2_vector):
    res = verify_coboundary(sl2_vector, sl2_vector, sl2_vector)
    assert all(v["holds"] for v in res.values())
    T = trivial_module(sl2_vector.rs)
    res = verify_coboundary(T, T, T)
    assert all(v["holds"] for v in res.values())


def test_coboundary_check_detects_a_broken_commutor(sl2_vector, monkeypatch):
    import qdolbeault.braiding as br
    real = br.commutor_polar

    def broken(V, W):
        C = real(V, W)
        if V.dim == 2 and W.dim == 2:
            C.sigma = C.sigma.scale(ONE + ONE)
        return C

    monkeypatch.setattr(br, "commutor_polar", broken)
    res = br.verify_coboundary(sl2_vector, sl2_vector, sl2_vector)
    assert not res["symmetry"]["holds"]

import pytest

from qdolbeault.cartan import (NonReducedWord, RootSystem, WeylWord, cominuscule_nodes,
                               parabolic_data, parse_flag_spec, phi_set)

# Classical data used as oracles: number of positive roots and cominuscule nodes.
POSITIVE_ROOTS = {"A": lambda r: r * (r + 1) // 2, "B": lambda r: r * r, "C": lambda r: r * r,
                  "D": lambda r: r * (r - 1)}
COMINUSCULE = {("A", 3): [1, 2, 3], ("B", 3): [1], ("C", 3): [3], ("D", 4): [1, 3, 4],
               ("D", 5): [1, 4, 5], ("E", 6): [1, 6], ("E", 7): [7], ("G", 2): [], ("F", 4): []}


@pytest.mark.parametrize("typ,r", [("A", 1), ("A", 3), ("A", 5), ("B", 3), ("C", 4), ("D", 5)])
def test_positive_root_count(typ, r):
    assert len(RootSystem(typ, r).positive_roots) == POSITIVE_ROOTS[typ](r)


@pytest.mark.parametrize("typ,r,n", [("E", 6, 36), ("E", 7, 63), ("E", 8, 120), ("F", 4, 24), ("G", 2, 6)])
def test_exceptional_root_counts(typ, r, n):
    assert len(RootSystem(typ, r).positive_roots) == n


def test_a1_roots():
    assert list(RootSystem("A", 1).positive_roots) == [(1,)]


def test_c3_highest_root():
    assert tuple(RootSystem("C", 3).highest_root) == (2, 2, 1)


def test_short_roots_have_length_two():
    for typ, r in [("B", 3), ("C", 3), ("F", 4), ("G", 2)]:
        rs = RootSystem(typ, r)
        assert min(rs.gram[i][i] for i in range(r)) == 2


@pytest.mark.parametrize("key,nodes", sorted(COMINUSCULE.items()))
def test_cominuscule_nodes(key, nodes):
    assert cominuscule_nodes(RootSystem(*key)) == nodes


def test_gr24_parabolic_word_and_xi():
    pd = parabolic_data(RootSystem("A", 3), 2)
    assert pd.wl == (2, 3, 1, 2)
    assert pd.xi == ((1, 1, 1), (1, 1, 0), (0, 1, 1), (0, 1, 0))
    assert pd.N == 4


def test_a1_borel():
    pd = parabolic_data(RootSystem("A", 1), 1)
    assert pd.N == 1 and pd.M == 0 and pd.xi == ((1,),)


def test_phi_set():
    rs = RootSystem("A", 3)
    assert phi_set(WeylWord(rs, ())) == []
    assert set(phi_set(WeylWord(rs, (2, 3, 1, 2)))) == {(0, 1, 0), (0, 1, 1), (1, 1, 0), (1, 1, 1)}
    a2 = RootSystem("A", 2)
    assert set(phi_set(WeylWord(a2, (1, 2, 1)))) == set(a2.positive_roots)


def test_phi_set_rejects_non_reduced_word():
    with pytest.raises(NonReducedWord):
        phi_set(WeylWord(RootSystem("A", 2), (1, 2, 2)))


def test_root_pairings():
    rs = RootSystem("A", 3)
    assert rs.gram[0][1] == -1
    pd = parabolic_data(rs, 2)
    assert pd.xi_pairing(2, 3) == 0
    assert pd.xi_pairing(1, 2) == 1


@pytest.mark.parametrize("typ,r", [("A", 4), ("B", 4), ("C", 4), ("D", 5), ("E", 6), ("E", 7)])
def test_radical_is_abelian_with_expected_dimension(typ, r):
    rs = RootSystem(typ, r)
    roots = set(rs.positive_roots)
    dims = {("A", 4): {1: 4, 4: 4, 2: 6, 3: 6}, ("B", 4): {1: 7}, ("C", 4): {4: 10},
            ("D", 5): {1: 8, 4: 10, 5: 10}, ("E", 6): {1: 16, 6: 16}, ("E", 7): {7: 27}}[(typ, r)]
    for t, n in dims.items():
        pd = parabolic_data(rs, t)
        assert pd.N == n
        assert all(tuple(a + b for a, b in zip(x, y)) not in roots for x in pd.xi for y in pd.xi)
        assert len(pd.w0) == len(roots)


def test_grassmannian_dimension():
    for n in range(2, 7):
        for k in range(1, n):
            assert parabolic_data(RootSystem("A", n - 1), k).N == k * (n - k)


def test_non_cominuscule_rejected():
    with pytest.raises(ValueError):
        parabolic_data(RootSystem("C", 3), 1)


def test_parse_flag_spec():
    rs, t = parse_flag_spec("A3/t2")
    assert rs.name == "A3" and t == 2
    with pytest.raises(ValueError):
        parse_flag_spec("A3")

import random

import numpy as np
import pytest

from qdolbeault.clifford import (check_algebra_maps, check_creation_adjoint,
                                 check_defining_identity, check_equivariance, verify_gamma_iso)
from qdolbeault.linalg import SMat
from qdolbeault.scalars import ONE, ZERO, Scalar


def _random_vec(rng, words):
    return {w: Scalar(rng.randint(-3, 3)) for w in rng.sample(words, min(3, len(words)))}


def test_unit_acts_as_identity(gr24):
    sp = gr24.spinors
    assert sp.gamma_plus_word(()) == SMat.identity(sp.dim)
    assert sp.gamma_minus_word(()) == SMat.identity(sp.dim)
    assert sp.gamma((), ()) == SMat.identity(sp.dim)


def test_creation_squares_to_zero(gr24):
    sp = gr24.spinors
    for i in range(sp.N):
        g = sp.gamma_plus_word((i,))
        assert (g @ g).is_zero()


def test_creation_reduces_by_exterior_rules(gr24):
    sp = gr24.spinors
    lhs = sp.gamma_plus_word((2,)) @ sp.gamma_plus_word((1,))
    rhs = sp.gamma_plus(gr24.Lambda_plus.normal_form((2, 1)))
    assert lhs == rhs
    assert sp.gamma_plus_word((2, 1)) == rhs
    assert not rhs.is_zero()


def test_annihilation_pairs_dually_in_degree_one(gr24):
    sp = gr24.spinors
    for i in range(sp.N):
        g = sp.gamma_minus_gen(i)
        for j in range(sp.N):
            col = g.column(sp.index[(j,)])
            assert set(col) <= {sp.index[()]}
            assert col.get(sp.index[()], ZERO) == (ONE if i == j else ZERO)


def test_annihilation_is_multiplicative_on_random_elements(gr24):
    sp, Lm = gr24.spinors, gr24.Lambda_minus
    rng = random.Random(5)
    ws = Lm.normal_words(1) + Lm.normal_words(2)
    for _ in range(3):
        a, b = _random_vec(rng, ws), _random_vec(rng, ws)
        assert sp.gamma_minus(a) @ sp.gamma_minus(b) == sp.gamma_minus(Lm.multiply(a, b))


def test_structural_checks(gr24, cp2):
    for f in (gr24, cp2):
        sp = f.spinors
        assert check_algebra_maps(sp) == {"gamma_plus": True, "gamma_minus": True}
        assert check_defining_identity(sp)
        assert check_creation_adjoint(sp) == []
        assert check_equivariance(sp) == {"gamma_plus": True, "gamma_minus": True}


def test_gamma_iso_rank_one_generator(cp1):
    r = verify_gamma_iso(cp1.spinors, "exact")
    assert r["rank"] == 4 and r["full_rank"]


def test_gamma_iso_gr24(gr24):
    r = verify_gamma_iso(gr24.spinors, "exact")
    assert r["rank"] == 256 and r["full_rank"]
    m = verify_gamma_iso(gr24.spinors, "modular")
    assert m["rank"] == 256


def test_gamma_iso_detects_degenerate_annihilation(gr24, monkeypatch):
    sp = gr24.spinors
    real = type(sp).gamma_minus_gen
    monkeypatch.setattr(type(sp), "gamma_minus_gen",
                        lambda self, i: real(self, 0))
    sp._gm = {}
    try:
        r = verify_gamma_iso(sp, "modular")
        assert not r["full_rank"]
    finally:
        sp._gm = {}


def test_spinor_gram_degrees(gr24):
    sp = gr24.spinors
    G = sp.gram()
    a, b = sp.degree_slices[0]
    assert G.submatrix(range(a, b), range(a, b)) == SMat.identity(1)
    a, b = sp.degree_slices[1]
    assert G.submatrix(range(a, b), range(a, b)) == SMat.diag(sp.u_gram())
    a, b = sp.degree_slices[2]
    G2 = G.submatrix(range(a, b), range(a, b)).to_numpy(2.0, gr24.rs.L)
    assert G2.shape == (6, 6)
    assert np.linalg.eigvalsh((G2 + G2.T) / 2).min() > 0


@pytest.mark.parametrize("q0", [1.1, 2.0])
def test_spinor_gram_positive_definite(gr24, q0):
    G = gr24.spinors.gram().to_numpy(q0, gr24.rs.L)
    assert np.allclose(G, G.T)
    assert np.linalg.eigvalsh(G).min() > 0


def test_adjoint_is_an_anti_involution(gr24):
    sp = gr24.spinors
    rng = random.Random(2)
    I = SMat.identity(sp.dim)
    assert sp.adjoint(I) == I
    A = sp.gamma_plus(_random_vec(rng, gr24.Lambda_plus.normal_words(1)))
    B = sp.gamma_minus(_random_vec(rng, gr24.Lambda_minus.normal_words(1)))
    assert sp.adjoint(A @ B) == sp.adjoint(B) @ sp.adjoint(A)
    assert sp.adjoint(sp.adjoint(A)) == A

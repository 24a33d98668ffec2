"""Acceptance criteria 1-11.

Run with pytest (a PASS/FAIL line per criterion is printed in the summary)
or directly: python tests/test_acceptance.py
"""
import time
from math import comb

import numpy as np

from qdolbeault.braiding import commutor, verify_coboundary
from qdolbeault.cartan import RootSystem, cominuscule_nodes
from qdolbeault.clifford import verify_gamma_iso
from qdolbeault.dirac import build_dolbeault, spectrum, verify_dirac_identities
from qdolbeault.golden import load_fixture
from qdolbeault.pipeline import Flag
from qdolbeault.quadratic import (associated_graded, check_dual_basis, check_q_commutation,
                                  frobenius_data, koszul_complex)
from qdolbeault.repn import highest_weight_module
from qdolbeault.uqg import (ad_invariance, match_symmetric_algebra, parse_expression,
                            parse_scalar, verify_schubert_relations)

ROOT_VECTORS = load_fixture("gr24_root_vectors")["value"]


def _rules(name, L):
    out = {}
    for r in load_fixture(name)["value"]:
        a, b = (k - 1 for k in r["lhs"])
        out[(a, b)] = {tuple(k - 1 for k in t["word"]): parse_scalar(t["coeff"], L) for t in r["rhs"]}
    return out


def _all_cominuscule(max_rank=6):
    for typ, lo in (("A", 1), ("B", 2), ("C", 3), ("D", 4), ("E", 6)):
        for r in range(lo, max_rank + 1):
            if typ == "E" and r != 6:
                continue
            rs = RootSystem(typ, r)
            for t in cominuscule_nodes(rs):
                yield f"{typ}{r}", t


def test_criterion_01_commutor_golden():
    t0 = time.perf_counter()
    V = highest_weight_module(RootSystem("A", 1), (1,))
    sigma = commutor(V).sigma
    elapsed = time.perf_counter() - t0
    expected = load_fixture("sigma_vv")["value"]
    for i in range(4):
        for j in range(4):
            assert sigma[i, j] == parse_scalar(expected[i][j], V.rs.L), f"entry ({i + 1},{j + 1})"
    assert elapsed < 1.0, f"{elapsed:.2f}s"


def test_criterion_02_relation_golden():
    t0 = time.perf_counter()
    f = Flag("A3", 2)
    S, Lm = f.S, f.Lambda_minus
    elapsed = time.perf_counter() - t0
    L = f.rs.L
    assert S.rules == _rules("gr24_symmetric_rules", L)
    assert Lm.rules == _rules("gr24_exterior_minus_rules", L)
    assert elapsed < 5.0, f"{elapsed:.2f}s"


def test_criterion_03_quantum_root_vectors():
    f = Flag("A3", 2)
    sc = f.schubert
    assert sc.variant == "jantzen"
    assert sc.generators == [parse_expression(e, f.rs) for e in ROOT_VECTORS]
    verify_schubert_relations(sc, f.u_plus)
    assert match_symmetric_algebra(sc, f.S, f.u_plus)
    assert ad_invariance(sc, f.u_plus) == []


def test_criterion_04_pbw_hilbert_series():
    failures = []
    for typ, t in _all_cominuscule():
        f = Flag(typ, t)
        N = f.pd.N
        if f.S.hilbert_series(4) != [comb(N + d - 1, d) for d in range(5)]:
            failures.append((typ, t, "hilbert series"))
        if [f.Lambda_minus.count_normal_words(l) for l in range(N + 2)] != [comb(N, l) for l in range(N + 2)]:
            failures.append((typ, t, "exterior dimensions"))
        if f.S.check_confluence() or f.Lambda_minus.check_confluence():
            failures.append((typ, t, "confluence"))
    gr24 = Flag("A3", 2)
    hs, _ = gr24.S.hilbert_series_by_rank(4, "exact")
    if hs != [comb(3 + d, d) for d in range(5)]:
        failures.append(("A3", 2, "ideal ranks"))
    assert not failures, failures


def test_criterion_05_frobenius():
    f = Flag("A3", 2)
    for A in (f.Lambda_minus, f.Lambda_plus):
        fd = frobenius_data(A)
        assert sorted(fd.dets) == list(range(A.N + 1))
        assert all(d.num != 0 for d in fd.dets.values())
        assert check_dual_basis(fd)


GAMMA_FLAGS = [("A1", 1), ("A2", 1), ("A3", 1), ("A3", 2), ("A4", 1), ("A5", 1), ("A6", 1),
               ("A4", 2), ("B2", 1), ("B3", 1), ("C3", 3), ("D4", 1)]


def test_criterion_06_clifford_factorisation():
    bad = []
    for typ, t in GAMMA_FLAGS:
        f = Flag(typ, t)
        r = verify_gamma_iso(f.spinors)
        if r["rank"] != 4 ** f.pd.N:
            bad.append((typ, t, r))
    assert not bad, bad


def _dirac_case(spec, dim):
    t0 = time.perf_counter()
    f = Flag("A3", 2)
    W = f.module(spec)
    dd = build_dolbeault(f.pd, W, f.schubert, f.spinors, f.scaling)
    res = verify_dirac_identities(dd)
    elapsed = time.perf_counter() - t0
    assert W.dim == dim
    for k in ("d_squared", "d_star_squared", "laplacian_identity"):
        assert res[k]["holds"], (k, res[k]["witness"])
    assert elapsed < 60.0, f"{elapsed:.1f}s"


def test_criterion_07_dirac_identities_vector_representation():
    _dirac_case("omega1", 4)


def test_criterion_07_dirac_identities_second_fundamental():
    _dirac_case("omega2", 6)


def test_criterion_08_koszul_homology():
    f = Flag("A3", 2)
    K = koszul_complex(f.S, f.Lambda_minus, 4)
    assert K["d_squared_zero"]
    assert K["homology"][(0, 0)] == 1
    assert all(h == 0 for k, h in K["homology"].items() if k != (0, 0)), K["homology"]


def test_criterion_09_coboundary_axioms():
    for typ, t in (("A2", 1), ("A3", 2), ("B3", 1)):
        U = Flag(typ, t).u_plus
        res = verify_coboundary(U, U, U)
        for k in ("symmetry", "unitarity", "cactus"):
            assert res[k]["holds"], (typ, t, k, res[k])


def test_criterion_10_associated_graded():
    for typ, t in (("A3", 2), ("A2", 1)):
        f = Flag(typ, t)
        grS = associated_graded(f.S, "lex")
        assert len(grS.rules) == f.pd.N * (f.pd.N - 1) // 2
        assert check_q_commutation(grS, f.pd, 1) == []
        grL = associated_graded(f.Lambda_minus, "oplex")
        assert check_q_commutation(grL, f.pd, -1) == []


def test_criterion_11_numeric_sanity():
    f = Flag("A3", 2)
    dd = build_dolbeault(f.pd, f.module("omega1"), f.schubert, f.spinors, f.scaling)
    for q0 in (1.1, 2.0):
        G = f.spinors.gram().to_numpy(q0, f.rs.L)
        assert np.linalg.eigvalsh((G + G.T) / 2).min() > 0
        s = spectrum(dd, q0)
        assert s.hermitian_residual < 1e-9
        assert s.min_eigenvalue >= -1e-9


if __name__ == "__main__":
    import sys
    results = {}
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_criterion_")):
        n = int(name.split("_")[2])
        try:
            fn()
            ok = True
        except AssertionError as exc:
            ok = False
            print(f"{name}: {exc}", file=sys.stderr)
        results[n] = results.get(n, True) and ok
    for n, ok in sorted(results.items()):
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}")
    sys.exit(0 if all(results.values()) else 1)

import numpy as np
import pytest

from qdolbeault.dirac import (assemble_d, build_dolbeault, kernel_dimension,
                              kernel_scale_invariance, spectrum, verify_dirac_identities)
from qdolbeault.scalars import ONE
from qdolbeault.uqg import antipode, antipode_inverse, evaluate, quantum_root_vectors


def _build(f, spec, **kw):
    return build_dolbeault(f.pd, f.module(spec), f.schubert, f.spinors, f.scaling, **kw)


@pytest.fixture(scope="module")
def gr24_omega2(gr24):
    return _build(gr24, "omega2")


def test_trivial_module_gives_zero_operator(gr24):
    dd = _build(gr24, "trivial")
    assert dd.d.is_zero() and dd.D.is_zero()
    s = spectrum(dd, 2.0)
    assert s.multiplicities == [(0.0, 16)]
    assert all(r["holds"] for r in verify_dirac_identities(dd).values())


def test_rank_one_generator(cp1):
    W = cp1.module("omega1")
    dd = build_dolbeault(cp1.pd, W, cp1.schubert, cp1.spinors, cp1.scaling)
    sp = cp1.spinors
    want = evaluate(antipode_inverse(cp1.schubert.generators[0]), W).kron(sp.gamma_minus_gen(0))
    assert dd.d == want
    assert dd.d.nnz() == 1


@pytest.mark.parametrize("spec,dim", [("omega1", 64), ("omega2", 96)])
def test_identities_hold_exactly(gr24, spec, dim):
    dd = _build(gr24, spec)
    assert dd.dim == dim
    res = verify_dirac_identities(dd)
    assert all(r["holds"] for r in res.values()), res


def test_differential_is_basis_independent(gr24):
    # build_dolbeault raises if a second dual pair gives a different operator
    _build(gr24, "omega2", check_basis=True, seed=11)


def test_control_inverse_braid_convention_breaks_d_squared(gr24):
    sc = quantum_root_vectors(gr24.pd, "inverse")
    dd = build_dolbeault(gr24.pd, gr24.module("omega2"), sc, gr24.spinors, check_basis=False)
    assert not verify_dirac_identities(dd)["d_squared"]["holds"]


def test_control_without_inverse_antipode_breaks_d_squared(gr24):
    W, sp = gr24.module("omega2"), gr24.spinors
    xs = [antipode(x) for x in gr24.schubert.generators]   # S^{-1}(S(x)) = x
    d = assemble_d(W, sp, xs)
    assert not (d @ d).is_zero()


def test_control_mismatched_dual_basis_breaks_d_squared(gr24):
    W, sp = gr24.module("omega2"), gr24.spinors
    N = sp.N
    ys = [{((i + 1) % N,): ONE} for i in range(N)]
    d = assemble_d(W, sp, gr24.schubert.generators, ys)
    assert not (d @ d).is_zero()


def test_degree_lowering(gr24_omega2):
    assert verify_dirac_identities(gr24_omega2)["degree_lowering"]["holds"]


@pytest.mark.parametrize("q0", [1.1, 1.5, 2.0])
def test_spectrum_is_nonnegative_and_hermitian(gr24, q0):
    s = spectrum(_build(gr24, "omega1"), q0)
    assert s.hermitian_residual < 1e-9
    assert s.identity_residual < 1e-9
    assert s.min_eigenvalue >= -1e-9


def test_spectrum_rejects_q0_at_most_one(gr24_omega2):
    with pytest.raises(ValueError):
        spectrum(gr24_omega2, 1.0)


def test_numeric_kernel_matches_exact_kernel(gr24_omega2):
    s = spectrum(gr24_omega2, 2.0)
    zeros = sum(1 for x in s.eigenvalues if abs(x) < 1e-8)
    assert zeros == kernel_dimension(gr24_omega2)


def test_kernel_dimension_is_scale_invariant(gr24):
    W = gr24.module("omega1")
    dims = kernel_scale_invariance(gr24.pd, W, gr24.schubert, gr24.spinors, [1, 2, 3], gr24.scaling)
    assert len(set(dims.values())) == 1


def test_adjoint_is_adjoint_for_the_gram(gr24_omega2):
    dd = gr24_omega2
    G = dd.gram()
    assert G @ dd.d_star == dd.d.T @ G


def test_gram_is_positive_definite(gr24, gr24_omega2):
    G = gr24_omega2.gram().to_numpy(1.1, gr24.rs.L)
    assert np.linalg.eigvalsh((G + G.T) / 2).min() > 0

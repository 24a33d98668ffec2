"""The Dolbeault-Dirac operator D = ð + ð* on W ⊗ Lambda_q(u_+)."""
import random
import numpy as np

from .clifford import _block_inverse
from .linalg import SMat, det, inverse, rank
from .repn import invariant_inner_product
from .scalars import ONE, PoleError, Scalar
from .uqg import UqExpression, antipode_inverse, evaluate


class DiracError(ValueError):
    pass


class DiracData:
    def __init__(self, pd, W, sp, d, d_star, G_W, G_spin, scale=ONE):
        self.pd, self.W, self.sp = pd, W, sp
        self.d = d
        self.d_star = d_star
        self.D = d + d_star
        self.D2 = self.D @ self.D
        self.G_W, self.G_spin = G_W, G_spin
        self.scale = scale

    @property
    def dim(self):
        return self.D.nrows

    def gram(self):
        return self.G_W.kron(self.G_spin)


def _x_images(sc, scaling):
    """Images of x_i in U_q(g): c_i E_{xi_i}."""
    c = scaling if scaling is not None else [ONE] * len(sc.generators)
    return [g.scale(x) for g, x in zip(sc.generators, c)]


def assemble_d(W, sp, xs, ys=None):
    """sum_i rho_W(S^{-1}(x_i)) ⊗ gamma_-(y_i); ys maps i to a vector in the y basis."""
    out = SMat(W.dim * sp.dim, W.dim * sp.dim)
    for i, x in enumerate(xs):
        A = evaluate(antipode_inverse(x), W)
        if A.is_zero():
            continue
        y = {(i,): ONE} if ys is None else ys[i]
        out = out + A.kron(sp.gamma_minus(y))
    return out


def build_dolbeault(pd, W, sc, sp, scaling=None, scale=ONE, check_basis=True, seed=3):
    """Assemble ð, ð* and D for the module W.

    With check_basis the operator is rebuilt from a second dual pair
    x' = A x, y' = A^{-T} y and compared exactly.
    """
    xs = _x_images(sc, scaling)
    d = assemble_d(W, sp, xs)
    if check_basis and pd.N > 1:
        d2 = _rebuilt_with_other_basis(W, sp, xs, seed)
        if d2 != d:
            raise DiracError("ð depends on the choice of dual bases")
    G_W = invariant_inner_product(W)
    G_s = sp.gram(scale)
    Ginv = inverse(G_W).kron(_block_inverse(G_s, sp))
    G = G_W.kron(G_s)
    d_star = Ginv @ d.T @ G
    return DiracData(pd, W, sp, d, d_star, G_W, G_s, scale)


def _rebuilt_with_other_basis(W, sp, xs, seed):
    N = len(xs)
    rng = random.Random(seed)
    perm = list(range(N))
    rng.shuffle(perm)
    rows = {}
    for i in range(N):
        r = {perm[i]: ONE}
        for j in range(N):
            if j != perm[i] and rng.random() < 0.3:
                r[j] = Scalar(rng.choice([-2, -1, 1, 2]))
        rows[i] = r
    A = SMat(N, N, rows)
    if det(A).num == 0:
        A = SMat.identity(N)
    B = inverse(A).T          # y'_i = sum_j B[i, j] y_j
    xs2 = []
    for i in range(N):
        acc = UqExpression(xs[0].rs)
        for j, c in A.rows.get(i, {}).items():
            acc = acc + xs[j].scale(c)
        xs2.append(acc)
    ys2 = [{(j,): c for j, c in B.rows.get(i, {}).items()} for i in range(N)]
    return assemble_d(W, sp, xs2, ys2)


def _witness(M):
    for i, j, x in M.entries():
        return {"row": i, "col": j, "value": str(x)}
    return None


def verify_dirac_identities(dd):
    """Exact checks of ð² = 0, (ð*)² = 0 and D² = ðð* + ð*ð, plus self-adjointness."""
    d, ds = dd.d, dd.d_star
    checks = {
        "d_squared": d @ d,
        "d_star_squared": ds @ ds,
        "laplacian_identity": dd.D2 - (d @ ds + ds @ d),
    }
    G = dd.gram()
    checks["self_adjoint"] = G @ dd.D - dd.D.T @ G
    out = {}
    for name, M in checks.items():
        out[name] = {"holds": M.is_zero(), "witness": _witness(M)}
    out["degree_lowering"] = {"holds": _lowers_degree(dd), "witness": None}
    return out


def _lowers_degree(dd):
    """ð maps spinor degree k to k-1."""
    sp = dd.sp
    deg = {}
    for n, (a, b) in sp.degree_slices.items():
        for k in range(a, b):
            deg[k] = n
    s = sp.dim
    for i, j, _ in dd.d.entries():
        if deg[i % s] != deg[j % s] - 1:
            return False
    return True


class SpectrumReport:
    def __init__(self, q0, eigenvalues, hermitian_residual, identity_residual, tol):
        self.q0 = q0
        self.eigenvalues = eigenvalues
        self.hermitian_residual = hermitian_residual
        self.identity_residual = identity_residual
        self.tol = tol
        self.multiplicities = _group(eigenvalues)

    @property
    def min_eigenvalue(self):
        return float(min(self.eigenvalues)) if len(self.eigenvalues) else 0.0

    def psd(self):
        return self.min_eigenvalue >= -self.tol

    def to_json(self):
        return {
            "q0": self.q0,
            "eigenvalues": [_clean(x) for x in self.eigenvalues],
            "multiplicities": [{"value": v, "multiplicity": m} for v, m in self.multiplicities],
            "min_eigenvalue": _clean(self.min_eigenvalue, 3),
            "hermitian_residual": _clean(self.hermitian_residual, 3),
            "identity_residual": _clean(self.identity_residual, 3),
            "psd": self.psd(),
        }


def _clean(x, digits=12):
    """Round to fixed significant digits; -0 becomes 0."""
    x = float(f"{float(x):.{digits}g}")
    return x + 0.0 if x else 0.0


def _group(eigs, rel=1e-7):
    out = []
    for x in sorted(eigs):
        if out and abs(x - out[-1][0]) <= rel * max(1.0, abs(x)):
            out[-1][1] += 1
        else:
            out.append([float(x), 1])
    return [(_clean(v, 10), m) for v, m in out]


def spectrum(dd, q0, tol=1e-9):
    """Eigenvalues of D² at q = q0 through the Hermitian form C^T D C^{-T}, G = C C^T."""
    if q0 <= 1:
        raise ValueError("q0 must exceed 1")
    L = dd.pd.rs.L
    try:
        G = dd.gram().to_numpy(q0, L)
        D = dd.D.to_numpy(q0, L)
        d = dd.d.to_numpy(q0, L)
        ds = dd.d_star.to_numpy(q0, L)
    except (PoleError, ZeroDivisionError):
        raise PoleError(f"pole at q0 = {q0}")
    C = np.linalg.cholesky(G)
    H = C.T @ D @ np.linalg.inv(C.T)
    herm = float(np.max(np.abs(H - H.T))) if H.size else 0.0
    H = (H + H.T) / 2
    eig = np.linalg.eigvalsh(H @ H) if H.size else np.zeros(0)
    ident = float(np.max(np.abs(D @ D - (d @ ds + ds @ d)))) if D.size else 0.0
    return SpectrumReport(float(q0), np.sort(eig), herm, ident, tol)


def kernel_dimension(dd):
    """Exact dim ker D²."""
    return dd.dim - rank([r for _, r in sorted(dd.D2.rows.items())])


def kernel_scale_invariance(pd, W, sc, sp, scales, scaling=None):
    """dim ker D² for each u_+ inner-product scale (exact)."""
    out = {}
    for s in scales:
        dd = build_dolbeault(pd, W, sc, sp, scaling, scale=Scalar.coerce(s), check_basis=False)
        out[str(s)] = kernel_dimension(dd)
    return out

"""Finite-dimensional weight modules for U_q(g) and its Levi subalgebras.

A module records a weight for every basis vector and sparse matrices for
the E_j and F_j actions; K_mu acts diagonally by q^{(mu, wt)}.  The set of
acting nodes (`gens`) is all nodes for U_q(g) and the non-crossed nodes for
a Levi factor U_q(l).
"""
from collections import defaultdict

from .linalg import Echelon, SMat, inverse, nullspace, solve, vadd
from .scalars import ONE, ZERO


class ModuleError(ValueError):
    pass


def wadd(a, b, c=1):
    return tuple(x + c * y for x, y in zip(a, b))


class WeightModule:
    def __init__(self, rs, gens, weights, E, F, labels=None, name="", parents=None,
                 factors=None, truncated_depth=None):
        self.rs = rs
        self.gens = tuple(gens)
        self.weights = [tuple(w) for w in weights]
        self.E = E
        self.F = F
        n = len(self.weights)
        self.labels = labels if labels is not None else [f"b{k}" for k in range(n)]
        self.name = name
        self.parents = parents           # (i, parent index) per vector, None at the top
        self.factors = factors           # (M, N) for tensor products
        self.truncated_depth = truncated_depth
        self._kcache = {}

    def __repr__(self):
        return f"WeightModule({self.name or '?'}, dim={self.dim})"

    @property
    def dim(self):
        return len(self.weights)

    @property
    def Q(self):
        return self.rs.Q

    def alpha(self, j):
        return self.rs.alpha(j - 1)

    def K_diag(self, mu):
        key = tuple(mu)
        d = self._kcache.get(key)
        if d is None:
            Q = self.rs.Q
            d = [Q.qpow(self.rs.pairing(mu, w)) for w in self.weights]
            self._kcache[key] = d
        return d

    def K(self, mu):
        return SMat.diag(self.K_diag(mu))

    def Kj(self, j, power=1):
        a = self.alpha(j)
        return self.K(tuple(power * x for x in a))

    def weight_blocks(self):
        blocks = defaultdict(list)
        for k, w in enumerate(self.weights):
            blocks[w].append(k)
        return dict(blocks)

    def highest_weight_vectors(self):
        """Basis of the joint kernel of the E_j, blocked by weight."""
        out = []
        for w, idx in sorted(self.weight_blocks().items()):
            rows = []
            for j in self.gens:
                Ej = self.E[j]
                sub = Ej.submatrix(range(self.dim), idx)
                rows.extend(r for r in sub.rows.values())
            for vec in nullspace(rows, range(len(idx))):
                out.append((w, {idx[k]: x for k, x in vec.items()}))
        return out

    def to_json(self, L=None):
        L = self.rs.L
        def mat(m):
            return [[i, j, x.to_q_string(L)] for i, j, x in m.entries()]
        return {
            "name": self.name,
            "dim": self.dim,
            "acting_nodes": list(self.gens),
            "labels": list(self.labels),
            "weights": [list(w) for w in self.weights],
            "E": {str(j): mat(self.E[j]) for j in self.gens},
            "F": {str(j): mat(self.F[j]) for j in self.gens},
        }


def trivial_module(rs, gens=None):
    gens = tuple(range(1, rs.rank + 1)) if gens is None else tuple(gens)
    z = SMat(1, 1)
    return WeightModule(rs, gens, [rs.zero()], {j: z for j in gens}, {j: z for j in gens},
                        labels=["1"], name="trivial", parents=[None])


def highest_weight_module(rs, lam, gens=None, max_depth=None, name=None, weight_filter=None):
    """Irreducible module of highest weight lam for the algebra on `gens`.

    Built top-down by depth: at each weight the candidate vectors F_i b are
    reduced to an independent set by comparing their images under all E_j,
    which is injective on the irreducible quotient below the top.

    `weight_filter` restricts construction to weights it accepts; the set of
    accepted weights must be closed under raising.  F_j b is known exactly
    when b is in M.F_known[j]; other F columns of a truncated module are
    left empty.
    """
    gens = tuple(range(1, rs.rank + 1)) if gens is None else tuple(sorted(gens))
    lam = tuple(lam)
    for j in gens:
        if lam[j - 1] < 0:
            raise ModuleError(f"weight {lam} is not dominant for node {j}")
    Q = rs.Q
    alphas = {j: rs.alpha(j - 1) for j in gens}
    weights = [lam]
    labels = ["v"]
    parents = [None]
    Ecol = {j: [{}] for j in gens}     # Ecol[j][b] = E_j(b) as sparse vector
    Fmap = {j: {} for j in gens}
    by_wt = {lam: [0]}
    level = [lam]
    depth = 0
    while level:
        if max_depth is not None and depth >= max_depth:
            break
        depth += 1
        targets = sorted({wadd(mu, alphas[i], -1) for mu in level for i in gens}, reverse=True)
        if weight_filter is not None:
            targets = [nu for nu in targets if weight_filter(nu)]
        nxt = []
        for nu in targets:
            ech = Echelon()
            cands = [(i, b) for i in gens for b in by_wt.get(wadd(nu, alphas[i]), [])]
            new = []
            for i, b in cands:
                img = {}
                above = wadd(nu, alphas[i])
                for j in gens:
                    vec = {}
                    for c, x in Ecol[j][b].items():
                        vadd(vec, Fmap[i][c], x)
                    if i == j:
                        vadd(vec, {b: Q.qint(above[i - 1], rs.d[i - 1])})
                    for k, x in vec.items():
                        img[(j, k)] = x
                res = ech.add(img)
                if res is None:
                    n = len(weights)
                    new.append(n)
                    weights.append(nu)
                    labels.append(f"F{i}" + ("" if labels[b] == "v" else "·") + labels[b])
                    parents.append((i, b))
                    for j in gens:
                        Ecol[j].append({k: x for (jj, k), x in img.items() if jj == j})
                    Fmap[i][b] = {n: ONE}
                else:
                    Fmap[i][b] = {new[m]: x for m, x in res.items()}
            if new:
                by_wt[nu] = new
                nxt.append(nu)
        level = nxt
    n = len(weights)
    E = {j: SMat.from_columns(n, Ecol[j]) for j in gens}
    F = {}
    for j in gens:
        cols = [Fmap[j].get(b, {}) for b in range(n)]
        F[j] = SMat.from_columns(n, cols)
    if name is None:
        name = f"V({','.join(map(str, lam))})"
    M = WeightModule(rs, gens, weights, E, F, labels=labels, name=name, parents=parents,
                     truncated_depth=max_depth)
    M.F_known = {j: set(Fmap[j]) for j in gens}
    return M


def irreducible_module(rs, lam, algebra="g", central_charge=None, max_depth=None):
    """V_lam for U_q(g) (algebra='g') or for a Levi factor (algebra=('l', t)).

    For a Levi factor the weight lam is a full weight of g; the crossed
    coordinate lam_t fixes how K_{omega_t} acts.  If central_charge is given
    it must equal (omega_t, lam).
    """
    if algebra == "g":
        return highest_weight_module(rs, lam, max_depth=max_depth)
    kind, t = algebra
    if kind != "l":
        raise ModuleError(f"unknown algebra {algebra!r}")
    if central_charge is not None:
        omega_t = tuple(1 if k == t - 1 else 0 for k in range(rs.rank))
        if rs.pairing(omega_t, lam) != central_charge:
            raise ModuleError("central charge does not match the weight")
    gens = [j for j in range(1, rs.rank + 1) if j != t]
    return highest_weight_module(rs, lam, gens, max_depth=max_depth)


def permute_module(M, order, labels=None, name=None):
    """Reorder the basis: new vector k is old vector order[k]."""
    pos = {old: new for new, old in enumerate(order)}
    n = M.dim

    def perm(m):
        rows = {}
        for i, r in m.rows.items():
            rows[pos[i]] = {pos[j]: x for j, x in r.items()}
        return SMat(n, n, rows)

    parents = None
    if M.parents is not None:
        parents = [None] * n
        for old, p in enumerate(M.parents):
            parents[pos[old]] = None if p is None else (p[0], pos[p[1]])
    return WeightModule(M.rs, M.gens, [M.weights[o] for o in order],
                        {j: perm(M.E[j]) for j in M.gens}, {j: perm(M.F[j]) for j in M.gens},
                        labels=labels or [M.labels[o] for o in order], name=name or M.name,
                        parents=parents)


def build_u_plus(pd):
    """u_+ as a Levi module with basis x_1..x_N ordered along the xi-sequence."""
    rs = pd.rs
    theta = rs.root_to_weight(rs.highest_root)
    M = irreducible_module(rs, theta, ("l", pd.t))
    target = [pd.xi_weight(k) for k in range(1, pd.N + 1)]
    if sorted(M.weights) != sorted(target) or len(set(target)) != pd.N:
        raise ModuleError("u_+ weights do not match the radical roots")
    order = [M.weights.index(w) for w in target]
    U = permute_module(M, order, labels=[f"x{k}" for k in range(1, pd.N + 1)], name="u+")
    omega_t = tuple(1 if k == pd.t - 1 else 0 for k in range(rs.rank))
    for w in U.weights:
        if rs.pairing(omega_t, w) != rs.d[pd.t - 1]:
            raise ModuleError("K_omega_t does not act by q_t on u_+")
    return U


def build_u_minus(pd, u_plus=None):
    U = u_plus if u_plus is not None else build_u_plus(pd)
    D = dual_module(U, "left")
    D.labels = [f"y{k}" for k in range(1, pd.N + 1)]
    D.name = "u-"
    return D


def tensor(M, N, name=None):
    if M.gens != N.gens or M.rs != N.rs:
        raise ModuleError("tensor product of modules over different algebras")
    IM = SMat.identity(M.dim)
    IN = SMat.identity(N.dim)
    E, F = {}, {}
    for j in M.gens:
        E[j] = M.E[j].kron(IN) + M.Kj(j).kron(N.E[j])
        F[j] = M.F[j].kron(N.Kj(j, -1)) + IM.kron(N.F[j])
    weights = [wadd(a, b) for a in M.weights for b in N.weights]
    labels = [f"{a}⊗{b}" for a in M.labels for b in N.labels]
    return WeightModule(M.rs, M.gens, weights, E, F, labels=labels,
                        name=name or f"({M.name}⊗{N.name})", factors=(M, N))


def tensor_power(M, n):
    if n == 0:
        return trivial_module(M.rs, M.gens)
    out = M
    for _ in range(n - 1):
        out = tensor(out, M)
    return out


def dual_module(M, side="left"):
    """Dual with action through the antipode (left) or inverse antipode (right).

    S(E) = -K^{-1}E, S(F) = -FK; S^{-1}(E) = -EK^{-1}, S^{-1}(F) = -KF.
    """
    E, F = {}, {}
    for j in M.gens:
        Kp, Km = M.Kj(j), M.Kj(j, -1)
        if side == "left":
            E[j] = (-(Km @ M.E[j])).T
            F[j] = (-(M.F[j] @ Kp)).T
        elif side == "right":
            E[j] = (-(M.E[j] @ Km)).T
            F[j] = (-(Kp @ M.F[j])).T
        else:
            raise ModuleError(f"unknown side {side!r}")
    weights = [tuple(-x for x in w) for w in M.weights]
    return WeightModule(M.rs, M.gens, weights, E, F, labels=[f"{l}*" for l in M.labels],
                        name=f"{M.name}*")


# --- verification -----------------------------------------------------------

def check_module(M):
    """Return a list of violated defining relations (empty if all hold)."""
    rs, Q = M.rs, M.rs.Q
    fails = []
    n = M.dim
    for j in M.gens:
        a = M.alpha(j)
        for i, jj, x in M.E[j].entries():
            if M.weights[i] != wadd(M.weights[jj], a):
                fails.append(f"E{j} does not raise weight by alpha_{j}")
                break
        for i, jj, x in M.F[j].entries():
            if M.weights[i] != wadd(M.weights[jj], a, -1):
                fails.append(f"F{j} does not lower weight by alpha_{j}")
                break
    for i in M.gens:
        for j in M.gens:
            comm = M.E[i] @ M.F[j] - M.F[j] @ M.E[i]
            if i == j:
                di = rs.d[i - 1]
                target = SMat.diag([Q.qint(w[i - 1], di) for w in M.weights])
            else:
                target = SMat(n, n)
            if comm != target:
                fails.append(f"[E{i},F{j}] relation fails")
    for i in M.gens:
        for j in M.gens:
            if i == j:
                continue
            aij = rs.cartan[i - 1][j - 1]
            m = 1 - aij
            di = rs.d[i - 1]
            for X, nm in ((M.E, "E"), (M.F, "F")):
                tot = SMat(n, n)
                for r in range(m + 1):
                    c = Q.qbinom(m, r, di) * (1 if r % 2 == 0 else -1)
                    term = _mpow(X[i], m - r, n) @ X[j] @ _mpow(X[i], r, n)
                    tot = tot + term.scale(c)
                if not tot.is_zero():
                    fails.append(f"quantum Serre relation ({nm}{i},{nm}{j}) fails")
    return fails


def _mpow(A, k, n):
    out = SMat.identity(n)
    for _ in range(k):
        out = out @ A
    return out


# --- inner products ------------------------------------------------------------

def invariant_inner_product(M):
    """Gram matrix of the invariant Hermitian form (conjugation fixes q).

    Invariance is <x v, w> = <v, x* w> with E* = KF, F* = EK^{-1}.  For a
    module built top-down the Gram is propagated along the construction:
    <F_i b, u> = <b, E_i K_i^{-1} u>.  Otherwise each weight block is
    solved from the invariance equations with the top vectors normalised.
    """
    if M.factors is not None:
        A, B = M.factors
        return invariant_inner_product(A).kron(invariant_inner_product(B))
    if M.parents is not None and sum(p is None for p in M.parents) == 1:
        return _gram_by_parents(M)
    return _gram_by_solving(M)


def _gram_by_parents(M):
    rs, Q = M.rs, M.rs.Q
    blocks = M.weight_blocks()
    order = sorted(range(M.dim), key=lambda k: _depth(M, k))
    G = {}
    top = M.parents.index(None)
    G[(top, top)] = ONE
    Ecols = {j: M.E[j].columns() for j in M.gens}
    for n in order:
        p = M.parents[n]
        if p is None:
            continue
        i, b = p
        nu = M.weights[n]
        fac = Q.qpow(-rs.pairing(M.alpha(i), nu))
        for u in blocks[nu]:
            acc = ZERO
            for k, x in Ecols[i][u].items():
                g = G.get((b, k))
                if g is not None:
                    acc = acc + x * g
            acc = acc * fac
            if acc.num != 0:
                G[(n, u)] = acc
    rows = defaultdict(dict)
    for (a, b), x in G.items():
        rows[a][b] = x
    return SMat(M.dim, M.dim, dict(rows))


def _depth(M, k):
    d = 0
    while M.parents[k] is not None:
        k = M.parents[k][1]
        d += 1
    return d


def _gram_by_solving(M):
    """Solve the invariance equations blockwise, normalising top vectors to 1."""
    blocks = M.weight_blocks()
    unknowns = []
    for w, idx in blocks.items():
        for a in idx:
            for b in idx:
                if a <= b:
                    unknowns.append((a, b))
    uid = {u: k for k, u in enumerate(unknowns)}

    def var(a, b):
        return uid[(a, b) if a <= b else (b, a)]

    eqs = []
    for j in M.gens:
        for lhs_op, rhs_op in ((M.E[j], M.Kj(j) @ M.F[j]), (M.F[j], M.E[j] @ M.Kj(j, -1))):
            # (op^T G)[a, b] = sum_k op[k, a] G[k, b];  (G rhs)[a, b] = sum_k G[a, k] rhs[k, b]
            lcols = lhs_op.columns()
            rcols = rhs_op.columns()
            for w, idx in blocks.items():
                for a in range(M.dim):
                    for b in idx:
                        row = {}
                        for k, x in lcols[a].items():
                            if M.weights[k] == M.weights[b]:
                                vadd(row, {var(k, b): x})
                        for k, x in rcols[b].items():
                            if M.weights[a] == M.weights[k]:
                                vadd(row, {var(a, k): x}, -ONE)
                        if row:
                            eqs.append(row)
    rhs = [ZERO] * len(eqs)
    for w, v in M.highest_weight_vectors():
        if len(v) == 1:
            (k, _), = v.items()
            eqs.append({var(k, k): ONE})
            rhs.append(ONE)
    x, ns = solve(eqs, rhs, range(len(unknowns)))
    if x is None:
        raise ModuleError("no invariant inner product found")
    if ns:
        raise ModuleError("invariant inner product is not unique with the given normalisation")
    rows = defaultdict(dict)
    for (a, b), k in uid.items():
        val = x.get(k)
        if val is not None:
            rows[a][b] = val
            rows[b][a] = val
    return SMat(M.dim, M.dim, dict(rows))


def check_invariance(M, G):
    fails = []
    if G != G.T:
        fails.append("Gram matrix is not symmetric")
    for j in M.gens:
        if M.E[j].T @ G != G @ (M.Kj(j) @ M.F[j]):
            fails.append(f"invariance fails for E{j}")
        if M.F[j].T @ G != G @ (M.E[j] @ M.Kj(j, -1)):
            fails.append(f"invariance fails for F{j}")
    return fails


def module_adjoint(A, G_src, G_dst):
    """Adjoint of A: src -> dst for real-symmetric Grams: G_src^{-1} A^T G_dst."""
    return inverse(G_src) @ A.T @ G_dst

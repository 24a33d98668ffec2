"""Creation/annihilation operators on Lambda_q(u_+), the factorisation
gamma(y ⊗ x) = gamma_-(y) gamma_+(x), the spinor inner product and adjoints.
"""
import random
from collections import defaultdict

import numpy as np

from .linalg import SMat, inverse, rank, solve, vadd
from .scalars import ONE, PoleError


class CliffordError(ValueError):
    pass


class SpinorSpace:
    """Lambda_q(u_+) with basis x_J (normal words, by degree then lexicographic)."""

    def __init__(self, u_plus, Lp, Lm, Tp, Tm, pairing):
        self.u = u_plus
        self.N = N = u_plus.dim
        self.Lp, self.Lm = Lp, Lm
        self.Tp, self.Tm = Tp, Tm
        self.pairing = pairing
        self.words = []
        self.degree_slices = {}
        for n in range(N + 1):
            start = len(self.words)
            self.words.extend(Lp.normal_words(n))
            self.degree_slices[n] = (start, len(self.words))
        self.index = {w: k for k, w in enumerate(self.words)}
        self.dim = len(self.words)
        self._gm = {}
        self._gp = {}
        self._gram = None

    def word_weight(self, w):
        wts = self.u.weights
        acc = [0] * len(wts[0])
        for a in w:
            for k, x in enumerate(wts[a]):
                acc[k] += x
        return tuple(acc)

    def label(self, w):
        return "x_{" + ",".join(str(a + 1) for a in w) + "}" if w else "1"

    # creation ------------------------------------------------------------------
    def gamma_plus_word(self, word):
        word = tuple(word)
        if word in self._gp:
            return self._gp[word]
        rows = defaultdict(dict)
        for c, z in enumerate(self.words):
            for w, x in self.Lp.normal_form(word + z).items():
                rows[self.index[w]][c] = x
        m = SMat(self.dim, self.dim, dict(rows))
        self._gp[word] = m
        return m

    def gamma_plus(self, vec):
        out = SMat(self.dim, self.dim)
        for w, x in vec.items():
            out = out + self.gamma_plus_word(w).scale(x)
        return out

    # annihilation ------------------------------------------------------------------
    def gamma_minus_gen(self, i):
        """gamma_-(y_i): degree n -> n-1 with matrix P_{n-1}^{-1} R_i P_n."""
        if i in self._gm:
            return self._gm[i]
        rows = {}
        for n in range(1, self.N + 1):
            Js_lo, Is_lo = self.pairing.index[n - 1]
            Js, Is = self.pairing.index[n]
            jpos = {J: k for k, J in enumerate(Js)}
            Rrows = defaultdict(dict)
            for r, K in enumerate(Js_lo):
                for w, x in self.Lm.normal_form(K + (i,)).items():
                    Rrows[r][jpos[w]] = x
            R = SMat(len(Js_lo), len(Js), dict(Rrows))
            g = self.pairing.inverses[n - 1] @ R @ self.pairing.grams[n]
            for a, r in g.rows.items():
                ra = self.index[Is_lo[a]]
                rows.setdefault(ra, {})
                for b, x in r.items():
                    rows[ra][self.index[Is[b]]] = x
        m = SMat(self.dim, self.dim, {k: v for k, v in rows.items() if v})
        self._gm[i] = m
        return m

    def gamma_minus_word(self, word):
        out = SMat.identity(self.dim)
        for a in word:
            out = out @ self.gamma_minus_gen(a)
        return out

    def gamma_minus(self, vec):
        out = SMat(self.dim, self.dim)
        for w, x in vec.items():
            out = out + self.gamma_minus_word(w).scale(x)
        return out

    def gamma(self, J, I):
        return self.gamma_minus_word(J) @ self.gamma_plus_word(I)

    # inner product ------------------------------------------------------------------
    def u_gram(self):
        """Diagonal u_+ Gram normalised so the lowest-weight vector has norm 1."""
        from .repn import invariant_inner_product
        G = invariant_inner_product(self.u)
        lows = [k for k in range(self.N) if self._is_lowest(k)]
        if len(lows) != 1:
            raise CliffordError("u_+ does not have a unique lowest-weight vector")
        t = lows[0]
        for i, j, x in G.entries():
            if i != j:
                raise CliffordError("u_+ Gram is not diagonal")
        return [G[k, k] / G[t, t] for k in range(self.N)]

    def _is_lowest(self, k):
        return all(not self.u.F[j].column(k) for j in self.u.gens)

    def gram(self, scale=ONE):
        """Spinor Gram: pull back of the tensor-power inner product through pi_+^{-1}.

        `scale` multiplies the u_+ inner product (degree n picks up scale^n).
        """
        if self._gram is not None and scale == ONE:
            return self._gram
        g = [x * scale for x in self.u_gram()]
        rows = {}
        for n in range(self.N + 1):
            lifts = self.Tp.lifts[n]
            ws = self.Lp.normal_words(n)
            for I in ws:
                XI = lifts[I]
                wI = self.word_weight(I)
                r = {}
                for I2 in ws:
                    if self.word_weight(I2) != wI:
                        continue
                    XI2 = lifts[I2]
                    acc = None
                    for w, x in XI.items():
                        y = XI2.get(w)
                        if y is None:
                            continue
                        t = x * y
                        for a in w:
                            t = t * g[a]
                        acc = t if acc is None else acc + t
                    if acc is not None and acc.num != 0:
                        r[self.index[I2]] = acc
                rows[self.index[I]] = r
        G = SMat(self.dim, self.dim, rows)
        if scale == ONE:
            self._gram = G
        return G

    def adjoint(self, A, G=None):
        G = self.gram() if G is None else G
        return _block_inverse(G, self) @ A.T @ G


def _block_inverse(G, sp):
    key = id(G)
    cache = getattr(sp, "_ginv", None)
    if cache is not None and cache[0] == key:
        return cache[1]
    Ginv = inverse(G)
    sp._ginv = (key, Ginv)
    return Ginv


# --- gamma isomorphism ------------------------------------------------------------------

_SMALL_PRIME = 33554393  # below 2^25, so 64-term dot products fit in int64


def _mod_matrix(m, v0, p, cache):
    a = np.zeros((m.nrows, m.ncols), dtype=np.int64)
    for i, r in m.rows.items():
        for j, x in r.items():
            val = cache.get(x)
            if val is None:
                val = cache[x] = x.mod_p(v0, p)
            a[i, j] = val
    return a


def verify_gamma_iso(sp, method="auto", seed=1):
    """Rank of gamma on the basis {y_J ⊗ x_I}, blocked by weight shift.

    'exact' works over Q(v).  'modular' evaluates at v -> v0 in F_p; a full
    rank there certifies full rank over Q(v) (rank can only drop under
    specialisation).  'auto' uses exact arithmetic for N <= 4.
    """
    from .linalg import _rank_np_mod
    N, dim = sp.N, sp.dim
    words = sp.words
    wt = {w: sp.word_weight(w) for w in words}
    pairs_by_shift = defaultdict(list)
    for J in words:
        for I in words:
            s = tuple(a - b for a, b in zip(wt[I], wt[J]))
            pairs_by_shift[s].append((J, I))
    entries_by_shift = defaultdict(list)
    for r in words:
        for c in words:
            s = tuple(a - b for a, b in zip(wt[r], wt[c]))
            entries_by_shift[s].append((sp.index[r], sp.index[c]))
    if method == "auto":
        method = "exact" if N <= 4 else "modular"
    total = 0
    blocks = []
    if method == "exact":
        for s, pairs in sorted(pairs_by_shift.items()):
            ents = entries_by_shift[s]
            eidx = {e: k for k, e in enumerate(ents)}
            rows = []
            for J, I in pairs:
                g = sp.gamma(J, I)
                rows.append({eidx[(i, j)]: x for i, j, x in g.entries()})
            rk = rank(rows)
            total += rk
            blocks.append((len(pairs), rk))
        return {"rank": total, "expected": 4 ** N, "method": "exact", "full_rank": total == 4 ** N,
                "blocks": len(blocks)}
    rng = random.Random(seed)
    p = _SMALL_PRIME
    for attempt in range(5):
        v0 = rng.randrange(2, p - 2)
        cache = {}
        try:
            gp = {w: _mod_matrix(sp.gamma_plus_word(w), v0, p, cache) for w in words}
            gm1 = {i: _mod_matrix(sp.gamma_minus_gen(i), v0, p, cache) for i in range(N)}
        except PoleError:
            continue
        gm = {(): np.eye(dim, dtype=np.int64)}
        for J in words:
            if J:
                gm[J] = (gm[J[:-1]] @ gm1[J[-1]]) % p
        total = 0
        for s, pairs in sorted(pairs_by_shift.items()):
            ents = entries_by_shift[s]
            ri = np.array([e[0] for e in ents])
            ci = np.array([e[1] for e in ents])
            mat = np.zeros((len(pairs), len(ents)), dtype=np.int64)
            for k, (J, I) in enumerate(pairs):
                prod = (gm[J] @ gp[I]) % p
                mat[k] = prod[ri, ci]
            total += _rank_np_mod(mat, p)
        return {"rank": total, "expected": 4 ** N, "method": f"modular (p={p}, v0={v0})",
                "full_rank": total == 4 ** N}
    raise CliffordError("no pole-free specialisation found")


# --- relations and checks -------------------------------------------------------------------

def check_algebra_maps(sp):
    """gamma_+(a)gamma_+(b) = gamma_+(ab) and gamma_-(y)gamma_-(y') = gamma_-(y y') on generators."""
    out = {"gamma_plus": True, "gamma_minus": True}
    N = sp.N
    for i in range(N):
        for j in range(N):
            lhs = sp.gamma_plus_word((i,)) @ sp.gamma_plus_word((j,))
            rhs = sp.gamma_plus(sp.Lp.normal_form((i, j)))
            if lhs != rhs:
                out["gamma_plus"] = False
            lhs = sp.gamma_minus_gen(i) @ sp.gamma_minus_gen(j)
            rhs = sp.gamma_minus(sp.Lm.normal_form((i, j)))
            if lhs != rhs:
                out["gamma_minus"] = False
    return out


def check_defining_identity(sp):
    """<w, gamma_-(y) x> = <w y, x> using the degreewise pairing, for all basis data."""
    for n in range(1, sp.N + 1):
        Js_lo, Is_lo = sp.pairing.index[n - 1]
        Js, Is = sp.pairing.index[n]
        for i in range(sp.N):
            g = sp.gamma_minus_gen(i)
            for K in Js_lo:
                for I in Is:
                    col = g.column(sp.index[I])
                    lhs = None
                    for r, x in col.items():
                        I2 = sp.words[r]
                        a = Js_lo.index(K)
                        b = Is_lo.index(I2)
                        t = sp.pairing.grams[n - 1][a, b] * x
                        lhs = t if lhs is None else lhs + t
                    rhs = None
                    for J, x in sp.Lm.normal_form(K + (i,)).items():
                        t = sp.pairing.grams[n][Js.index(J), Is.index(I)] * x
                        rhs = t if rhs is None else rhs + t
                    lhs = lhs if lhs is not None else ONE * 0
                    rhs = rhs if rhs is not None else ONE * 0
                    if lhs != rhs:
                        return False
    return True


def check_creation_adjoint(sp):
    """gamma_+(x_i)* = n_i gamma_-(y_i) with n_i = <x_i, x_i>: orthonormal form of the
    statement that creation and annihilation operators are adjoint."""
    g = sp.u_gram()
    bad = []
    for i in range(sp.N):
        lhs = sp.adjoint(sp.gamma_plus_word((i,)))
        rhs = sp.gamma_minus_gen(i).scale(g[i])
        if lhs != rhs:
            bad.append(i + 1)
    return bad


def ext_action(sp, side, j, which):
    """Matrix of E_j / F_j of the Levi on Lambda_q(u_+) (side='+') or
    Lambda_q(u_-) (side='-'), acting through the iterated coproduct."""
    A = sp.Lp if side == "+" else sp.Lm
    mod = sp.u if side == "+" else _minus_module(sp)
    X = (mod.E if which == "E" else mod.F)[j]
    Xcols = X.columns()
    kd = mod.K_diag(mod.alpha(j))
    kinv = [x.inverse() for x in kd]
    words = sp.words
    index = sp.index
    rows = defaultdict(dict)
    for c, w in enumerate(words):
        vec = {}
        for p, a in enumerate(w):
            coef = ONE
            if which == "E":
                for b in w[:p]:
                    coef = coef * kd[b]
            else:
                for b in w[p + 1:]:
                    coef = coef * kinv[b]
            for a2, x in Xcols[a].items():
                vadd(vec, A.normal_form(w[:p] + (a2,) + w[p + 1:]), x * coef)
        for ww, x in vec.items():
            rows[index[ww]][c] = x
    return SMat(sp.dim, sp.dim, dict(rows))


def _minus_module(sp):
    if not hasattr(sp, "_umin"):
        from .repn import dual_module
        sp._umin = dual_module(sp.u, "left")
    return sp._umin


def check_equivariance(sp):
    """gamma_+ and gamma_- intertwine the Levi actions (generator-wise identity):
        E.gamma(v) = gamma(E v) + gamma(K v) E,   F.gamma(v) = gamma(F v) K^{-1} + gamma(v) F.
    """
    out = {"gamma_plus": True, "gamma_minus": True}
    um = _minus_module(sp)
    for j in sp.u.gens:
        Ep, Fp = ext_action(sp, "+", j, "E"), ext_action(sp, "+", j, "F")
        Kp = SMat.diag([sp.u.rs.Q.qpow(sp.u.rs.pairing(sp.u.alpha(j), sp.word_weight(w))) for w in sp.words])
        Kinv = SMat.diag([x.inverse() for x in (Kp[k, k] for k in range(sp.dim))])
        for side, mod, gfun in (("gamma_plus", sp.u, lambda a: sp.gamma_plus_word((a,))),
                                ("gamma_minus", um, lambda a: sp.gamma_minus_gen(a))):
            kd = mod.K_diag(mod.alpha(j))
            Ecols, Fcols = mod.E[j].columns(), mod.F[j].columns()
            for a in range(sp.N):
                g = gfun(a)
                gE = SMat(sp.dim, sp.dim)
                for b, x in Ecols[a].items():
                    gE = gE + gfun(b).scale(x)
                gF = SMat(sp.dim, sp.dim)
                for b, x in Fcols[a].items():
                    gF = gF + gfun(b).scale(x)
                if Ep @ g != gE + g.scale(kd[a]) @ Ep:
                    out[side] = False
                if Fp @ g != gF @ Kinv + g @ Fp:
                    out[side] = False
    return out


def cross_relations(sp):
    """Express gamma_+(x_i)gamma_-(y_j) + gamma_-(y_j)gamma_+(x_i) in the basis gamma(y_J ⊗ x_I)."""
    N = sp.N
    words = sp.words
    wt = {w: sp.word_weight(w) for w in words}
    out = {}
    for i in range(N):
        for j in range(N):
            A = sp.gamma_plus_word((i,)) @ sp.gamma_minus_gen(j) + sp.gamma_minus_gen(j) @ sp.gamma_plus_word((i,))
            s = tuple(a - b for a, b in zip(sp.u.weights[i], sp.u.weights[j]))
            pairs = [(J, I) for J in words for I in words
                     if tuple(a - b for a, b in zip(wt[I], wt[J])) == s]
            target = {(r, c): x for r, c, x in A.entries()}
            cols = []
            for J, I in pairs:
                g = sp.gamma(J, I)
                cols.append({(r, c): x for r, c, x in g.entries()})
            keys = sorted({k for c in cols for k in c} | set(target))
            rows = [{p: cols[p][k] for p in range(len(cols)) if k in cols[p]} for k in keys]
            rhs = [target.get(k, ONE * 0) for k in keys]
            x, ns = solve(rows, rhs, range(len(pairs)))
            if x is None or ns:
                raise CliffordError("anticommutator not uniquely expressible through gamma")
            out[(i, j)] = {pairs[p]: c for p, c in x.items()}
    return out

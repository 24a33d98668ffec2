"""Quantum antisymmetric tensors inside tensor powers, the maps pi_n and the
degreewise pairing between the exterior algebras of u_- and u_+.
"""
from collections import defaultdict

from .linalg import SMat, det, inverse, nullspace, vadd
from .scalars import ONE


class DecompositionError(ValueError):
    pass


def _word_weight(w, wts):
    acc = [0] * len(wts[0])
    for a in w:
        for k, x in enumerate(wts[a]):
            acc[k] += x
    return tuple(acc)


class AntisymmetricTensors:
    """Lambda^n = intersection of ker(sigma_i + 1) inside u^{⊗n}, for n <= n_max.

    `basis[n]` lists tensors (dicts word -> Scalar); `lifts[n][I]` is the
    preimage of the normal word x_I under pi_n: Lambda^n -> Lambda_q^n(u).
    """

    def __init__(self, u, sigma, ext_algebra, n_max=None):
        self.u = u
        self.N = N = u.dim
        self.ext = ext_algebra
        self.n_max = N if n_max is None else min(n_max, N + 1)
        wts = u.weights
        scols = defaultdict(dict)
        for r, row in sigma.rows.items():
            for c, x in row.items():
                scols[divmod(c, N)][divmod(r, N)] = x
        self.sigma_cols = dict(scols)
        self.basis = {0: [{(): ONE}]}
        if self.n_max >= 1:
            self.basis[1] = [{(a,): ONE} for a in range(N)]
        for n in range(2, self.n_max + 1):
            self.basis[n] = self._next_degree(self.basis[n - 1], n, wts)
        self.lifts = {}
        self.pi = {}
        for n in range(self.n_max + 1):
            self._build_lifts(n)

    def _next_degree(self, prev, n, wts):
        N = self.N
        by_wt = defaultdict(list)
        for T in prev:
            wT = _word_weight(next(iter(T)), wts)
            for a in range(N):
                key = tuple(x + y for x, y in zip(wT, wts[a]))
                by_wt[key].append((T, a))
        out = []
        for key in sorted(by_wt):
            params = by_wt[key]
            cols = []
            for T, a in params:
                vec = {}
                for w, x in T.items():
                    full = w + (a,)
                    vadd(vec, {full: x})
                    for (b2, c2), s in self.sigma_cols.get((w[-1], a), {}).items():
                        vadd(vec, {w[:-1] + (b2, c2): x * s})
                cols.append(vec)
            words = sorted({w for v in cols for w in v})
            rows = [{p: cols[p][w] for p in range(len(cols)) if w in cols[p]} for w in words]
            for sol in nullspace(rows, range(len(params))):
                t = {}
                for p, c in sol.items():
                    T, a = params[p]
                    vadd(t, {w + (a,): x for w, x in T.items()}, c)
                out.append(t)
        return out

    def _build_lifts(self, n):
        """Invert pi_n blockwise by weight."""
        A = self.ext
        wts = self.u.weights
        normal = A.normal_words(n) if n <= A.N else []
        if len(self.basis[n]) != len(normal):
            raise DecompositionError(
                f"degree {n}: {len(self.basis[n])} antisymmetric tensors but {len(normal)} normal words")
        by_wt_t = defaultdict(list)
        for t in self.basis[n]:
            by_wt_t[_word_weight(next(iter(t)), wts) if n else ()].append(t)
        by_wt_w = defaultdict(list)
        for w in normal:
            by_wt_w[_word_weight(w, wts) if n else ()].append(w)
        lifts = {}
        pis = {}
        for key, ws in by_wt_w.items():
            ts = by_wt_t.get(key, [])
            if len(ts) != len(ws):
                raise DecompositionError(f"degree {n}: weight block mismatch at {key}")
            widx = {w: k for k, w in enumerate(ws)}
            rows = defaultdict(dict)
            for c, t in enumerate(ts):
                for w, x in A.normal_form_vec(t).items():
                    rows[widx[w]][c] = x
            P = SMat(len(ws), len(ts), dict(rows))
            if det(P).num == 0:
                raise DecompositionError(f"degree {n}: pi_n is not injective at weight {key}")
            Pinv = inverse(P)
            for i, w in enumerate(ws):
                lift = {}
                for c, x in Pinv.column(i).items():
                    vadd(lift, ts[c], x)
                lifts[w] = lift
            pis[key] = P
        self.lifts[n] = lifts
        self.pi[n] = pis

    def dims(self):
        return [len(self.basis[n]) for n in range(self.n_max + 1)]


def pairing_gram(Tm, Tp, n, lift_plus=True):
    """Degree-n Gram P[J, I] = <pi_-^{-1} y_J, pi_+^{-1} x_I> (order-reversing pairing).

    With lift_plus=False the plain word x_I is used on the + side, which
    gives the same numbers because Lambda^n_- annihilates the relation ideal.
    """
    Js = sorted(Tm.lifts[n])
    Is = sorted(Tp.lifts[n])
    rows = {}
    for a, J in enumerate(Js):
        Y = Tm.lifts[n][J]
        r = {}
        for b, I in enumerate(Is):
            X = Tp.lifts[n][I] if lift_plus else {I: ONE}
            acc = None
            for w, x in Y.items():
                y = X.get(tuple(reversed(w)))
                if y is not None:
                    t = x * y
                    acc = t if acc is None else acc + t
            if acc is not None and acc.num != 0:
                r[b] = acc
        if r:
            rows[a] = r
    return SMat(len(Js), len(Is), rows), Js, Is


class GradedPairing:
    def __init__(self, Tm, Tp):
        self.grams = {}
        self.inverses = {}
        self.dets = {}
        self.index = {}
        n_max = min(Tm.n_max, Tp.n_max)
        for n in range(n_max + 1):
            P, Js, Is = pairing_gram(Tm, Tp, n)
            d = det(P)
            if d.num == 0:
                raise DecompositionError(f"pairing is degenerate in degree {n}")
            self.grams[n] = P
            self.dets[n] = d
            self.inverses[n] = inverse(P)
            self.index[n] = (Js, Is)

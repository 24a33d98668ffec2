"""Quadratic algebras T(V)/<R>: rewriting rules, normal forms, Hilbert series,
quadratic duals and associated graded algebras.

Generators are 0-based indices; words are tuples.  Two monomial orders are
supported:
  'sym'  leading words x_a x_b with a > b, normal words nondecreasing;
  'ext'  leading words x_a x_b with a >= b, normal words strictly increasing.
"""
from collections import defaultdict
from itertools import product

from .linalg import Echelon, SMat, nullspace, rank, rank_mod_p, rref, vadd
from .scalars import ONE, ZERO, PoleError


class RewritingError(ValueError):
    pass


def _is_leading(kind, a, b):
    return a > b if kind == "sym" else a >= b


class QuadraticAlgebra:
    def __init__(self, names, weights, relations, kind, rs=None, name=""):
        if kind not in ("sym", "ext"):
            raise ValueError(f"unknown order kind {kind!r}")
        self.names = list(names)
        self.N = len(self.names)
        self.weights = [tuple(w) for w in weights]
        self.kind = kind
        self.rs = rs
        self.name = name
        self.relations = [dict(r) for r in relations if r]
        self.rules = self._extract_rules()
        self._nf = {}

    # rules -----------------------------------------------------------------
    def leading_words(self):
        return [(a, b) for a in range(self.N) for b in range(self.N) if _is_leading(self.kind, a, b)]

    def _extract_rules(self):
        lead = set(self.leading_words())
        # leading words first (largest first), then the allowed words
        key = lambda w: (0, -w[0], -w[1]) if w in lead else (1, w[0], w[1])
        order, piv = rref(self.relations, key)
        if set(piv) != lead:
            missing = sorted(lead - set(piv))
            extra = sorted(set(piv) - lead)
            raise RewritingError(
                "relation space does not give one rule per leading word "
                f"(missing {missing[:3]}, unexpected pivots {extra[:3]}); "
                "the monomial order does not give a PBW basis")
        rules = {}
        for w in sorted(lead):
            row = piv[w]
            rep = {u: -x for u, x in row.items() if u != w}
            for u in rep:
                if u >= w:
                    raise RewritingError(f"rule for {w} is not lexicographically decreasing")
            rules[w] = rep
        return rules

    def relation_space_dim(self):
        return len(self.rules)

    # normal forms -------------------------------------------------------------
    def is_normal(self, word):
        return all((word[p], word[p + 1]) not in self.rules for p in range(len(word) - 1))

    def normal_form(self, word):
        word = tuple(word)
        hit = self._nf.get(word)
        if hit is not None:
            return hit
        for p in range(len(word) - 1):
            rep = self.rules.get((word[p], word[p + 1]))
            if rep is not None:
                break
        else:
            res = {word: ONE}
            self._nf[word] = res
            return res
        res = {}
        for (c, d), x in rep.items():
            vadd(res, self.normal_form(word[:p] + (c, d) + word[p + 2:]), x)
        self._nf[word] = res
        return res

    def normal_form_vec(self, vec):
        out = {}
        for w, x in vec.items():
            vadd(out, self.normal_form(w), x)
        return out

    def multiply(self, a, b):
        """Product of two combinations of words, in normal form."""
        out = {}
        for w1, x in a.items():
            for w2, y in b.items():
                vadd(out, self.normal_form(w1 + w2), x * y)
        return out

    def normal_words(self, d):
        """All normal words of length d, in lexicographic order."""
        if d == 0:
            return [()]
        if self.kind == "sym":
            from itertools import combinations_with_replacement
            words = list(combinations_with_replacement(range(self.N), d))
        else:
            from itertools import combinations
            words = list(combinations(range(self.N), d))
        assert all(self.is_normal(w) for w in words)
        return words

    # checks --------------------------------------------------------------------
    def overlaps(self):
        for (a, b) in self.rules:
            for (b2, c) in self.rules:
                if b2 == b:
                    yield (a, b, c)

    def check_confluence(self):
        """Resolve every degree-3 overlap both ways; return the failing words."""
        bad = []
        for a, b, c in self.overlaps():
            left = {}
            for (p, r), x in self.rules[(a, b)].items():
                vadd(left, self.normal_form((p, r, c)), x)
            right = {}
            for (p, r), x in self.rules[(b, c)].items():
                vadd(right, self.normal_form((a, p, r)), x)
            if vadd(left, right, -ONE):
                bad.append((a, b, c))
        return bad

    def count_normal_words(self, d):
        """Number of words of length d avoiding all leading pairs (by DP)."""
        if d == 0:
            return 1
        cnt = [1] * self.N
        for _ in range(d - 1):
            new = [0] * self.N
            for b in range(self.N):
                new[b] = sum(cnt[a] for a in range(self.N) if (a, b) not in self.rules)
            cnt = new
        return sum(cnt)

    def hilbert_series(self, cap):
        return [self.count_normal_words(d) for d in range(cap + 1)]

    def ideal_rank(self, d, method="auto", exact_limit=2000):
        """Rank of the degree-d part of the two-sided ideal generated by R.

        Exact over Q(v) for small degrees; otherwise computed at a random
        specialisation v -> v0 in F_p, which can only lower the rank.
        """
        if d < 2:
            return 0, "exact"
        blocks = defaultdict(list)
        N = self.N
        wts = self.weights
        zero = tuple(0 for _ in wts[0]) if wts else ()
        rel_wt = []
        for r in self.relations:
            (a, b) = next(iter(r))
            rel_wt.append(tuple(x + y for x, y in zip(wts[a], wts[b])))
        # group relations by weight to avoid building vectors twice
        for p in range(d - 1):
            for pre in product(range(N), repeat=p):
                for suf in product(range(N), repeat=d - 2 - p):
                    for r in self.relations:
                        vec = {pre + w + suf: x for w, x in r.items()}
                        w0 = next(iter(vec))
                        key = _word_weight(w0, wts, zero)
                        blocks[key].append(vec)
        total = 0
        use_exact = method == "exact" or (method == "auto" and N ** d <= exact_limit)
        for key, vecs in blocks.items():
            if use_exact:
                total += rank(vecs)
            else:
                cols = sorted({w for v in vecs for w in v})
                try:
                    total += rank_mod_p(vecs, cols)
                except PoleError:
                    total += rank(vecs)
        return total, ("exact" if use_exact else "modular")

    def hilbert_series_by_rank(self, cap, method="auto"):
        out = []
        methods = []
        for d in range(cap + 1):
            r, m = self.ideal_rank(d, method)
            out.append(self.N ** d - r)
            methods.append(m)
        return out, methods

    def is_submodule(self, module2):
        """Is the relation space stable under the generator actions of V⊗V?"""
        N = self.N
        ech = Echelon()
        for r in self.relations:
            ech.add({a * N + b: x for (a, b), x in r.items()})
        for j in module2.gens:
            for X in (module2.E[j], module2.F[j]):
                for r in self.relations:
                    v = X.apply({a * N + b: x for (a, b), x in r.items()})
                    if v and not ech.contains(v):
                        return False
        return True

    # output ----------------------------------------------------------------------
    def rules_json(self, L):
        out = []
        for (a, b) in sorted(self.rules):
            out.append({
                "lhs": [a + 1, b + 1],
                "rhs": [{"word": [c + 1, d + 1], "coeff": x.to_q_string(L)}
                        for (c, d), x in sorted(self.rules[(a, b)].items())],
            })
        return out

    def rule_string(self, a, b, L):
        rhs = self.rules[(a, b)]
        lhs = f"{self.names[a]}{self.names[b]}"
        if not rhs:
            return f"{lhs} = 0"
        parts = []
        for (c, d), x in sorted(rhs.items()):
            parts.append(f"({x.to_q_string(L)})*{self.names[c]}{self.names[d]}")
        return f"{lhs} = " + " + ".join(parts)


def _word_weight(w, wts, zero):
    acc = list(zero)
    for a in w:
        for k, x in enumerate(wts[a]):
            acc[k] += x
    return tuple(acc)


def relations_from_subspace(vectors, N):
    """Convert vectors on V⊗V (index a*N+b) to word-keyed relations."""
    return [{divmod(k, N): x for k, x in v.items()} for v in vectors]


def symmetric_algebra(u, C, names=None):
    """S_q(u) = T(u)/<ker(sigma + id)>."""
    N = u.dim
    rels = relations_from_subspace(C.L2, N)
    return QuadraticAlgebra(names or u.labels, u.weights, rels, "sym", rs=u.rs, name=f"S_q({u.name})")


def exterior_algebra(u, C, names=None):
    """Lambda_q(u) = T(u)/<ker(sigma - id)>."""
    N = u.dim
    rels = relations_from_subspace(C.S2, N)
    return QuadraticAlgebra(names or u.labels, u.weights, rels, "ext", rs=u.rs, name=f"Λ_q({u.name})")


def dual_relations(A):
    """Annihilator of R under <y_a⊗y_b, x_c⊗x_d> = delta_{bc} delta_{ad}."""
    N = A.N
    rows = [{(b, a): x for (a, b), x in r.items()} for r in A.relations]
    cols = [(a, b) for a in range(N) for b in range(N)]
    return nullspace(rows, cols)


def quadratic_dual(A, names=None, weights=None, kind=None):
    names = names or [f"y{k}" for k in range(1, A.N + 1)]
    weights = weights or [tuple(-x for x in w) for w in A.weights]
    kind = kind or ("ext" if A.kind == "sym" else "sym")
    return QuadraticAlgebra(names, weights, dual_relations(A), kind, rs=A.rs, name=f"({A.name})^!")


def same_relation_space(A, B):
    if A.N != B.N:
        return False
    ea = Echelon()
    for r in A.relations:
        ea.add(r)
    if len(ea) != len(B.relations):
        return False
    eb = Echelon()
    for r in B.relations:
        eb.add(r)
    if len(eb) != len(ea):
        return False
    return all(ea.contains(r) for r in B.relations)


# --- filtrations -----------------------------------------------------------------------

def gamma_degree(word, N):
    c = [0] * N
    for a in word:
        c[a] += 1
    return tuple(c)


def associated_graded(A, filtration="lex"):
    """Drop the terms of each rule lying strictly lower in the Gamma-filtration.

    'lex' compares exponent vectors lexicographically; 'oplex' uses the
    opposite order on each fibre of fixed total degree.
    """
    N = A.N
    sgn = 1 if filtration == "lex" else -1

    def key(w):
        return tuple(sgn * x for x in gamma_degree(w, N))

    rels = []
    for (a, b), rep in sorted(A.rules.items()):
        top = key((a, b))
        kept = {}
        for w, x in rep.items():
            k = key(w)
            if k > top:
                raise RewritingError(f"rule for {(a, b)} has a term above its leading word")
            if k == top:
                kept[w] = x
        rel = {(a, b): ONE}
        for w, x in kept.items():
            rel[w] = -x
        rels.append(rel)
    return QuadraticAlgebra(A.names, A.weights, rels, A.kind, rs=A.rs, name=f"gr {A.name}")


def check_q_commutation(G, pd, sign=1):
    """Are all rules of G of the form x_l x_k = sign q^{-(xi_k, xi_l)} x_k x_l?

    For the exterior kind the squares x_k x_k must vanish.  Returns a list of
    failing pairs (1-based).
    """
    Q = pd.rs.Q
    bad = []
    for (a, b), rep in sorted(G.rules.items()):
        if a == b:
            if rep:
                bad.append((a + 1, b + 1))
            continue
        want = {(b, a): Q.qpow(-pd.xi_pairing(b + 1, a + 1)) * sign}
        if rep != want:
            bad.append((a + 1, b + 1))
    return bad


def check_rule_shape(S, pd):
    """Symmetric-algebra rules x_l x_k = q^{-(xi_k,xi_l)} x_k x_l + sum_{k<i<=j<l} c x_i x_j."""
    Q = pd.rs.Q
    bad = []
    for (l, k), rep in sorted(S.rules.items()):
        lead = rep.get((k, l), ZERO)
        if lead != Q.qpow(-pd.xi_pairing(k + 1, l + 1)):
            bad.append(((k + 1, l + 1), "leading coefficient"))
            continue
        for (i, j), x in rep.items():
            if (i, j) == (k, l):
                continue
            if not (k < i <= j < l):
                bad.append(((k + 1, l + 1), f"term x{i + 1}x{j + 1} outside the allowed range"))
            elif not x.is_laurent():
                bad.append(((k + 1, l + 1), "coefficient is not a Laurent polynomial"))
    return bad


# --- Frobenius structure ---------------------------------------------------------------------

class FrobeniusData:
    def __init__(self, A, grams, dets, dual_basis):
        self.A = A
        self.grams = grams          # k -> SMat rows I (deg k), cols K (deg N-k)
        self.dets = dets
        self.dual_basis = dual_basis  # J (deg k) -> combination of degree N-k words


def frobenius_data(A):
    """Frobenius form (a, b) -> coefficient of x_[N] in a b and the dual basis z_J."""
    from .linalg import det, inverse
    N = A.N
    top = tuple(range(N))
    grams, dets, dual = {}, {}, {}
    for k in range(N + 1):
        I_words = A.normal_words(k)
        K_words = A.normal_words(N - k)
        rows = {}
        for a, I in enumerate(I_words):
            r = {}
            for b, K in enumerate(K_words):
                x = A.normal_form(I + K).get(top)
                if x is not None and x.num != 0:
                    r[b] = x
            if r:
                rows[a] = r
        F = SMat(len(I_words), len(K_words), rows)
        grams[k] = F
        d = det(F)
        dets[k] = d
        if d.num == 0:
            raise RewritingError(f"Frobenius form is singular in degrees ({k}, {N - k})")
        Z = inverse(F)   # F Z = id: x_I z_J = delta_IJ x_[N] with z_J = sum_K Z[K,J] x_K
        for j, J in enumerate(I_words):
            dual[J] = {K_words[kk]: x for kk, x in Z.column(j).items()}
    return FrobeniusData(A, grams, dets, dual)


def check_dual_basis(fd):
    """x_I z_J = delta_IJ x_[N] for |I| = |J|, and 0 for |I| > |J|."""
    A = fd.A
    N = A.N
    top = tuple(range(N))
    for k in range(N + 1):
        Js = A.normal_words(k)
        for J in Js:
            z = fd.dual_basis[J]
            for kk in range(k, N + 1):
                for I in A.normal_words(kk):
                    prod = A.multiply({I: ONE}, z)
                    want = {top: ONE} if I == J else {}
                    if prod != want:
                        return False
    return True


# --- Koszul complex ------------------------------------------------------------------------

def koszul_complex(S, Lm, cap):
    """Koszul complex S^d ⊗ (Lambda^n)^*, with differential
        a ⊗ f  ->  sum_i a x_i ⊗ (y_i . f),   (y . f)(w) = f(w y),
    of bidegree (d, n) -> (d+1, n-1).  Returns homology dimensions for all
    (d, n) with d + n <= cap together with a d^2 = 0 verdict.
    """
    N = S.N
    sw = {d: S.normal_words(d) for d in range(cap + 2)}
    lw = {n: Lm.normal_words(n) for n in range(min(N, cap) + 1)}
    sidx = {d: {w: k for k, w in enumerate(ws)} for d, ws in sw.items()}
    lidx = {n: {w: k for k, w in enumerate(ws)} for n, ws in lw.items()}

    def mult(d, i):
        rows = defaultdict(dict)
        for c, a in enumerate(sw[d]):
            for w, x in S.normal_form(a + (i,)).items():
                rows[sidx[d + 1][w]][c] = x
        return SMat(len(sw[d + 1]), len(sw[d]), dict(rows))

    def contract(n, i):
        # (y_i . f_J)(y_K) = coefficient of y_J in y_K y_i; matrix rows K, cols J
        rows = defaultdict(dict)
        for r, K in enumerate(lw[n - 1]):
            for w, x in Lm.normal_form(K + (i,)).items():
                rows[r][lidx[n][w]] = x
        return SMat(len(lw[n - 1]), len(lw[n]), dict(rows))

    diff = {}
    for d in range(cap + 1):
        for n in range(1, min(N, cap - d) + 1):
            tot = None
            for i in range(N):
                term = mult(d, i).kron(contract(n, i))
                tot = term if tot is None else tot + term
            diff[(d, n)] = tot          # K_{d,n} -> K_{d+1,n-1}
    squares_vanish = True
    witness = None
    for (d, n), m in diff.items():
        nxt = diff.get((d + 1, n - 1))
        if nxt is not None:
            sq = nxt @ m
            if not sq.is_zero():
                squares_vanish = False
                witness = (d, n)
    ranks = {k: rank(list(m.rows.values())) for k, m in diff.items()}
    homology = {}
    for d in range(cap + 1):
        for n in range(0, min(N, cap - d) + 1):
            dim = len(sw[d]) * len(lw[n])
            out_rank = ranks.get((d, n), 0)
            in_rank = ranks.get((d - 1, n + 1), 0) if d >= 1 else 0
            homology[(d, n)] = dim - out_rank - in_rank
    return {"d_squared_zero": squares_vanish, "witness": witness, "homology": homology}

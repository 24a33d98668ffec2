"""Formal expressions in U_q(g): Hopf structure, braid automorphisms, quantum
root vectors and an equality oracle based on evaluation in modules.

An expression is a Scalar combination of terms (word, K-weight) meaning
X_{l1} ... X_{lk} K_lambda, where a letter +i stands for E_i and -i for F_i
(1-based).  Products use K_lambda X = q^{(lambda, wt X)} X K_lambda.
"""
import re
from fractions import Fraction
from itertools import permutations

from .linalg import Echelon, SMat, solve, vadd
from .repn import highest_weight_module, wadd
from .scalars import ONE, ZERO, Scalar


class UqError(ValueError):
    pass


class UqExpression:
    __slots__ = ("rs", "terms")

    def __init__(self, rs, terms=None):
        self.rs = rs
        self.terms = {}
        if terms:
            for k, x in terms.items():
                x = Scalar.coerce(x)
                if x.num != 0:
                    self.terms[k] = x

    # constructors -----------------------------------------------------------
    @classmethod
    def scalar(cls, rs, c):
        return cls(rs, {((), rs.zero()): c})

    @classmethod
    def one(cls, rs):
        return cls.scalar(rs, ONE)

    @classmethod
    def E(cls, rs, i):
        return cls(rs, {((i,), rs.zero()): ONE})

    @classmethod
    def F(cls, rs, i):
        return cls(rs, {((-i,), rs.zero()): ONE})

    @classmethod
    def K(cls, rs, mu):
        return cls(rs, {((), tuple(mu)): ONE})

    @classmethod
    def Ki(cls, rs, i, power=1):
        return cls.K(rs, tuple(power * x for x in rs.alpha(i - 1)))

    # arithmetic ---------------------------------------------------------------
    def copy(self):
        return UqExpression(self.rs, dict(self.terms))

    def __add__(self, other):
        other = _lift(self.rs, other)
        out = dict(self.terms)
        for k, x in other.terms.items():
            y = out.get(k)
            y = x if y is None else y + x
            if y.num == 0:
                out.pop(k, None)
            else:
                out[k] = y
        r = UqExpression(self.rs)
        r.terms = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = UqExpression(self.rs)
        r.terms = {k: -x for k, x in self.terms.items()}
        return r

    def __sub__(self, other):
        return self + (-_lift(self.rs, other))

    def __rsub__(self, other):
        return _lift(self.rs, other) - self

    def scale(self, c):
        c = Scalar.coerce(c)
        r = UqExpression(self.rs)
        if c.num != 0:
            r.terms = {k: x * c for k, x in self.terms.items()}
        return r

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        rs, Q = self.rs, self.rs.Q
        out = {}
        for (w1, l1), x in self.terms.items():
            for (w2, l2), y in other.terms.items():
                e = rs.pairing(l1, word_weight(rs, w2)) if w2 and any(l1) else 0
                c = x * y
                if e:
                    c = c * Q.qpow(e)
                key = (w1 + w2, wadd(l1, l2))
                z = out.get(key)
                z = c if z is None else z + c
                if z.num == 0:
                    out.pop(key, None)
                else:
                    out[key] = z
        r = UqExpression(rs)
        r.terms = out
        return r

    def __rmul__(self, c):
        return self.scale(c)

    def __pow__(self, n):
        out = UqExpression.one(self.rs)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        """Equality as free expressions (no relations applied)."""
        if not isinstance(other, UqExpression):
            other = _lift(self.rs, other)
        return self.terms == other.terms

    __hash__ = None

    def is_zero(self):
        return not self.terms

    # queries --------------------------------------------------------------------
    def weights(self):
        return {word_weight(self.rs, w) for (w, _) in self.terms}

    def weight(self):
        ws = self.weights()
        if len(ws) != 1:
            raise UqError("expression is not homogeneous")
        return next(iter(ws))

    def is_positive_part(self):
        """Only E letters and no K factors."""
        return all(all(a > 0 for a in w) and not any(l) for (w, l) in self.terms)

    def max_raising(self):
        return max((sum(1 for a in w if a > 0) for (w, _) in self.terms), default=0)

    def to_string(self):
        return format_expression(self)

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"UqExpression('{self}')"


def _lift(rs, x):
    if isinstance(x, UqExpression):
        return x
    return UqExpression.scalar(rs, Scalar.coerce(x))


def word_weight(rs, w):
    acc = [0] * rs.rank
    for a in w:
        al = rs.alpha(abs(a) - 1)
        s = 1 if a > 0 else -1
        for k in range(rs.rank):
            acc[k] += s * al[k]
    return tuple(acc)


# --- printing and parsing -----------------------------------------------------------

def _k_string(rs, lam):
    if not any(lam):
        return ""
    for i in range(1, rs.rank + 1):
        a = rs.alpha(i - 1)
        for p in range(-4, 5):
            if p and tuple(p * x for x in a) == tuple(lam):
                return f"K{i}" if p == 1 else f"K{i}^{p}"
    return "K[" + ",".join(str(x) for x in lam) + "]"


def format_expression(expr):
    rs, L = expr.rs, expr.rs.L
    if not expr.terms:
        return "0"
    parts = []
    for (w, lam), c in sorted(expr.terms.items(), key=lambda t: (len(t[0][0]), t[0][0], t[0][1])):
        letters = [f"E{a}" if a > 0 else f"F{-a}" for a in w]
        ks = _k_string(rs, lam)
        if ks:
            letters.append(ks)
        mono = "*".join(letters)
        cs = c.to_q_string(L)
        neg = False
        if cs.startswith("-") and " " not in cs:
            neg, cs = True, cs[1:]
        elif " " in cs and not cs.startswith("("):
            cs = f"({cs})"
        if not mono:
            body = cs
        elif cs == "1":
            body = mono
        else:
            body = f"{cs}*{mono}"
        parts.append(("-" if neg else "+", body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


_TOKEN = re.compile(r"\s*(?:(\d+)|([EFK])(\d+)|(K)\[([-\d,\s]+)\]|([qv])|(\^)|([-+*/()]))")


def parse_expression(text, rs):
    """Parse linear text such as "E1*E2 - q^-1*E2*E1" or "(q^2-1)/(1+q^2)".

    Juxtaposition multiplies, so "E3(E1E2 - q^-1 E2E1)" is accepted.
    """
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise UqError(f"cannot parse {text[pos:]!r}")
        pos = m.end()
        if m.group(1):
            toks.append(("num", int(m.group(1))))
        elif m.group(2):
            toks.append(("gen", m.group(2), int(m.group(3))))
        elif m.group(4):
            toks.append(("kvec", tuple(int(x) for x in m.group(5).split(","))))
        elif m.group(6):
            toks.append(("var", m.group(6)))
        elif m.group(7):
            toks.append(("^",))
        else:
            toks.append((m.group(8),))
    p = _Parser(toks, rs)
    out = p.expr()
    if p.i != len(toks):
        raise UqError(f"trailing input in {text!r}")
    return out


class _Parser:
    def __init__(self, toks, rs):
        self.t = toks
        self.i = 0
        self.rs = rs

    def peek(self):
        return self.t[self.i] if self.i < len(self.t) else None

    def take(self):
        tok = self.t[self.i]
        self.i += 1
        return tok

    def expr(self):
        sign = 1
        if self.peek() and self.peek()[0] in "+-" and len(self.peek()) == 1:
            sign = -1 if self.take()[0] == "-" else 1
        out = self.term().scale(sign)
        while self.peek() and self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.factor()
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok[0] == "*":
                self.take()
                out = out * self.factor()
            elif tok[0] == "/":
                self.take()
                d = self.factor()
                out = out * _invert_scalar(d)
            elif tok[0] in ("num", "gen", "kvec", "var", "("):
                out = out * self.factor()
            else:
                break
        return out

    def exponent(self):
        tok = self.peek()
        sign = 1
        if tok and tok[0] in ("-", "+") and len(tok) == 1:
            sign = -1 if self.take()[0] == "-" else 1
            tok = self.peek()
        if tok and tok[0] == "num":
            return sign * Fraction(self.take()[1])
        if tok and tok[0] == "(":
            self.take()
            s2 = 1
            if self.peek()[0] == "-":
                self.take()
                s2 = -1
            a = self.take()[1]
            b = 1
            if self.peek()[0] == "/":
                self.take()
                b = self.take()[1]
            self.take()  # ')'
            return sign * s2 * Fraction(a, b)
        raise UqError("bad exponent")

    def factor(self):
        tok = self.take()
        rs, Q = self.rs, self.rs.Q
        kind = tok[0]
        if kind == "num":
            base = UqExpression.scalar(rs, tok[1])
            if self.peek() and self.peek()[0] == "^":
                self.take()
                base = base ** int(self.exponent())
            return base
        if kind == "var":
            e = Fraction(1)
            if self.peek() and self.peek()[0] == "^":
                self.take()
                e = self.exponent()
            c = Q.qpow(e) if tok[1] == "q" else Scalar.vpow(e)
            return UqExpression.scalar(rs, c)
        if kind == "gen":
            letter, i = tok[1], tok[2]
            if not 1 <= i <= rs.rank:
                raise UqError(f"generator index {i} out of range")
            e = 1
            if self.peek() and self.peek()[0] == "^":
                self.take()
                e = int(self.exponent())
            if letter == "K":
                return UqExpression.Ki(rs, i, e)
            if e < 0:
                raise UqError("negative power of E/F")
            g = UqExpression.E(rs, i) if letter == "E" else UqExpression.F(rs, i)
            return g ** e
        if kind == "kvec":
            return UqExpression.K(rs, tok[1])
        if kind == "(":
            inner = self.expr()
            self.take()  # ')'
            if self.peek() and self.peek()[0] == "^":
                self.take()
                e = int(self.exponent())
                if e < 0:
                    inner = _invert_scalar(inner) ** (-e)
                else:
                    inner = inner ** e
            return inner
        raise UqError(f"unexpected token {tok}")


def _invert_scalar(e):
    if set(e.terms) - {((), e.rs.zero())}:
        raise UqError("division by a non-scalar expression")
    c = e.terms.get(((), e.rs.zero()))
    if c is None:
        raise UqError("division by zero")
    return UqExpression.scalar(e.rs, c.inverse())


def parse_scalar(text, L):
    """Parse a q/v rational expression to a Scalar (q = v^L)."""
    rs = _ScalarContext(L)
    e = parse_expression(text, rs)
    if set(e.terms) - {((), ())}:
        raise UqError(f"{text!r} is not a scalar")
    return e.terms.get(((), ()), ZERO)


class _ScalarContext:
    """Minimal stand-in for a root system when parsing pure scalars."""

    def __init__(self, L):
        from .scalars import RootOfQ
        self.L = L
        self.Q = RootOfQ(L)
        self.rank = 0

    def zero(self):
        return ()

    def pairing(self, a, b):
        return 0


# --- Hopf structure ---------------------------------------------------------------

def _letter_expr(rs, a):
    return UqExpression.E(rs, a) if a > 0 else UqExpression.F(rs, -a)


def _term_expr(rs, w, lam):
    return UqExpression(rs, {(w, lam): ONE})


def _apply_anti(expr, letter_map, k_map):
    """Extend an anti-multiplicative map from generators."""
    rs = expr.rs
    out = UqExpression(rs)
    for (w, lam), c in expr.terms.items():
        acc = k_map(lam)
        for a in reversed(w):
            acc = acc * letter_map(a)
        out = out + acc.scale(c)
    return out


def _apply_hom(expr, letter_map, k_map):
    rs = expr.rs
    out = UqExpression(rs)
    for (w, lam), c in expr.terms.items():
        acc = UqExpression.one(rs)
        for a in w:
            acc = acc * letter_map(a)
        acc = acc * k_map(lam)
        out = out + acc.scale(c)
    return out


def antipode(expr):
    rs = expr.rs

    def lm(a):
        i = abs(a)
        if a > 0:
            return (UqExpression.Ki(rs, i, -1) * UqExpression.E(rs, i)).scale(-1)
        return (UqExpression.F(rs, i) * UqExpression.Ki(rs, i)).scale(-1)

    return _apply_anti(expr, lm, lambda lam: UqExpression.K(rs, tuple(-x for x in lam)))


def antipode_inverse(expr):
    rs = expr.rs

    def lm(a):
        i = abs(a)
        if a > 0:
            return (UqExpression.E(rs, i) * UqExpression.Ki(rs, i, -1)).scale(-1)
        return (UqExpression.Ki(rs, i) * UqExpression.F(rs, i)).scale(-1)

    return _apply_anti(expr, lm, lambda lam: UqExpression.K(rs, tuple(-x for x in lam)))


def star(expr):
    """Compact real form: E* = KF, F* = EK^{-1}, K* = K; conjugation fixes q."""
    rs = expr.rs

    def lm(a):
        i = abs(a)
        if a > 0:
            return UqExpression.Ki(rs, i) * UqExpression.F(rs, i)
        return UqExpression.E(rs, i) * UqExpression.Ki(rs, i, -1)

    return _apply_anti(expr, lm, lambda lam: UqExpression.K(rs, lam))


def counit(expr):
    c = ZERO
    for (w, lam), x in expr.terms.items():
        if not w:
            c = c + x
    return c


class Tensor2:
    """Element of U ⊗ U as {(term1, term2): Scalar}."""

    def __init__(self, rs, terms=None):
        self.rs = rs
        self.terms = terms or {}

    def __add__(self, other):
        out = dict(self.terms)
        for k, x in other.terms.items():
            y = out.get(k)
            y = x if y is None else y + x
            if y.num == 0:
                out.pop(k, None)
            else:
                out[k] = y
        return Tensor2(self.rs, out)

    def __mul__(self, other):
        rs = self.rs
        out = {}
        for (a1, a2), x in self.terms.items():
            for (b1, b2), y in other.terms.items():
                p1 = _term_expr(rs, *a1) * _term_expr(rs, *b1)
                p2 = _term_expr(rs, *a2) * _term_expr(rs, *b2)
                for k1, c1 in p1.terms.items():
                    for k2, c2 in p2.terms.items():
                        key = (k1, k2)
                        z = out.get(key)
                        v = x * y * c1 * c2
                        z = v if z is None else z + v
                        if z.num == 0:
                            out.pop(key, None)
                        else:
                            out[key] = z
        return Tensor2(rs, out)

    def legs(self):
        rs = self.rs
        for (a1, a2), x in self.terms.items():
            yield _term_expr(rs, *a1).scale(x), _term_expr(rs, *a2)


def coproduct(expr):
    """Delta(E) = E⊗1 + K⊗E, Delta(F) = F⊗K^{-1} + 1⊗F, Delta(K) = K⊗K."""
    rs = expr.rs
    z = rs.zero()
    out = Tensor2(rs)
    for (w, lam), c in expr.terms.items():
        acc = Tensor2(rs, {(((), z), ((), z)): c})
        for a in w:
            i = abs(a)
            al = rs.alpha(i - 1)
            if a > 0:
                d = Tensor2(rs, {(((a,), z), ((), z)): ONE, (((), al), ((a,), z)): ONE})
            else:
                d = Tensor2(rs, {(((a,), z), ((), tuple(-x for x in al))): ONE, (((), z), ((a,), z)): ONE})
            acc = acc * d
        acc = acc * Tensor2(rs, {(((), lam), ((), lam)): ONE})
        out = out + acc
    return out


def hopf(expr, which):
    if which == "coproduct":
        return coproduct(expr)
    if which == "counit":
        return counit(expr)
    if which == "antipode":
        return antipode(expr)
    if which == "antipode_inverse":
        return antipode_inverse(expr)
    if which == "star":
        return star(expr)
    raise ValueError(f"unknown Hopf operation {which!r}")


def adjoint_action(a, x):
    """ad(a)x = a_(1) x S(a_(2))."""
    out = UqExpression(x.rs)
    for a1, a2 in coproduct(a).legs():
        out = out + a1 * x * antipode(a2)
    return out


# --- braid automorphisms -----------------------------------------------------------------

def _divided_power(rs, i, n, letter):
    Q = rs.Q
    d = rs.d[i - 1]
    g = UqExpression.E(rs, i) if letter > 0 else UqExpression.F(rs, i)
    return (g ** n).scale(Q.qfactorial(n, d).inverse())


def _T_letter(rs, i, a, variant):
    """Image of E_j (a = j) or F_j (a = -j) under T_i."""
    Q = rs.Q
    j = abs(a)
    d = rs.d[i - 1]
    if variant == "inverse":
        return _T_inv_letter(rs, i, a)
    if j == i:
        if a > 0:
            return (UqExpression.F(rs, i) * UqExpression.Ki(rs, i)).scale(-1)
        return (UqExpression.Ki(rs, i, -1) * UqExpression.E(rs, i)).scale(-1)
    m = -rs.cartan[i - 1][j - 1]
    out = UqExpression(rs)
    for r in range(m + 1):
        sgn = -1 if r % 2 else 1
        if a > 0:
            term = _divided_power(rs, i, m - r, 1) * UqExpression.E(rs, j) * _divided_power(rs, i, r, 1)
            out = out + term.scale(Q.qpow(-r * d) * sgn)
        else:
            term = _divided_power(rs, i, r, -1) * UqExpression.F(rs, j) * _divided_power(rs, i, m - r, -1)
            out = out + term.scale(Q.qpow(r * d) * sgn)
    return out


def _T_inv_letter(rs, i, a):
    Q = rs.Q
    j = abs(a)
    d = rs.d[i - 1]
    if j == i:
        if a > 0:
            return (UqExpression.Ki(rs, i, -1) * UqExpression.F(rs, i)).scale(-1)
        return (UqExpression.E(rs, i) * UqExpression.Ki(rs, i)).scale(-1)
    m = -rs.cartan[i - 1][j - 1]
    out = UqExpression(rs)
    for r in range(m + 1):
        sgn = -1 if r % 2 else 1
        if a > 0:
            term = _divided_power(rs, i, r, 1) * UqExpression.E(rs, j) * _divided_power(rs, i, m - r, 1)
            out = out + term.scale(Q.qpow(-r * d) * sgn)
        else:
            term = _divided_power(rs, i, m - r, -1) * UqExpression.F(rs, j) * _divided_power(rs, i, r, -1)
            out = out + term.scale(Q.qpow(r * d) * sgn)
    return out


def chevalley_involution(expr):
    rs = expr.rs
    return _apply_hom(expr, lambda a: _letter_expr(rs, -a),
                      lambda lam: UqExpression.K(rs, tuple(-x for x in lam)))


BRAID_VARIANTS = ("jantzen", "inverse", "chevalley-conjugate")


def braid_automorphism(i, expr, variant="jantzen"):
    """T_i (Jantzen's conventions) or one of the documented alternates."""
    rs = expr.rs
    if variant == "chevalley-conjugate":
        return chevalley_involution(braid_automorphism(i, chevalley_involution(expr), "jantzen"))
    cache = {}

    def lm(a):
        if a not in cache:
            cache[a] = _T_letter(rs, i, a, variant)
        return cache[a]

    return _apply_hom(expr, lm, lambda lam: UqExpression.K(rs, rs.reflect(i - 1, lam)))


# --- evaluation -------------------------------------------------------------------------

def evaluate(expr, M):
    """Matrix of expr acting on the full module M (all nodes must act)."""
    n = M.dim
    out = SMat(n, n)
    cache = {(): SMat.identity(n)}

    def word_mat(w):
        m = cache.get(w)
        if m is None:
            a = w[0]
            X = M.E[a] if a > 0 else M.F[-a]
            m = X @ word_mat(w[1:])
            cache[w] = m
        return m

    for (w, lam), c in expr.terms.items():
        for a in w:
            if abs(a) not in M.gens:
                raise UqError(f"node {abs(a)} does not act on {M.name}")
        term = word_mat(w) @ M.K(lam) if any(lam) else word_mat(w)
        out = out + term.scale(c)
    return out


class WindowOracle:
    """Faithful evaluation of U^+_beta.

    U^+_beta embeds into the lowest part of V_lam twisted by the Chevalley
    involution, x -> omega(x) v_lam, whenever lam_i >= (coefficient of
    alpha_i in beta).  Only the top `depth` layers of V_lam are built.
    """

    def __init__(self, rs):
        self.rs = rs
        self._mods = {}
        self._bases = {}
        self._shuffle_memo = {}
        self._qcache = {}

    def module(self, beta, bound):
        """V_lam with lam_i = c_i(beta), built on weights lam - mu with 0 <= mu <= bound."""
        rs = self.rs
        lam = tuple(int(x) for x in rs.weight_to_root(beta))
        key = (lam, bound)
        M = self._mods.get(key)
        if M is None:
            def keep(nu):
                c = rs.weight_to_root(wadd(lam, nu, -1))
                return all(0 <= x <= b for x, b in zip(c, bound))
            M = highest_weight_module(rs, lam, name=f"window{lam}", weight_filter=keep)
            M._Ecols = {j: M.E[j].columns() for j in M.gens}
            M._Fcols = {j: M.F[j].columns() for j in M.gens}
            self._mods[key] = M
        return M

    def _bound(self, expr, beta):
        """Componentwise largest depth reached by the twisted action of expr."""
        rs = self.rs
        b = [int(x) for x in rs.weight_to_root(beta)]
        for (w, _) in expr.terms:
            c = [0] * rs.rank
            for a in reversed(w):
                c[abs(a) - 1] += 1 if a > 0 else -1
                for k in range(rs.rank):
                    b[k] = max(b[k], c[k])
        return tuple(b)

    def shuffle_vector(self, expr):
        """Image of an E-only expression in the quantum shuffle algebra.

        E_a y maps to a ⧢ (image of y), where passing a rightwards over a
        letter b costs q^{-(alpha_a, alpha_b)}.  The kernel of this map on
        the free algebra is the quantum Serre ideal, so it is faithful on U^+.
        """
        rs = self.rs
        memo = self._shuffle_memo
        G = rs.gram
        qp = self._qpow

        def phi(w):
            hit = memo.get(w)
            if hit is not None:
                return hit
            if len(w) <= 1:
                res = {w: ONE}
            else:
                a = w[0] - 1
                res = {}
                for u, c in phi(w[1:]).items():
                    e = 0
                    for p in range(len(u) + 1):
                        if p:
                            e -= G[a][u[p - 1] - 1]
                        key = u[:p] + (w[0],) + u[p:]
                        x = c if e == 0 else c * qp(e)
                        y = res.get(key)
                        res[key] = x if y is None else y + x
                res = {k: x for k, x in res.items() if x.num != 0}
            memo[w] = res
            return res

        out = {}
        for (w, _), c in expr.terms.items():
            vadd(out, phi(w), c)
        return out

    def shuffle_product(self, x, y):
        """q-shuffle of two word vectors: a letter of x moved right past a
        letter b of y costs q^{-(alpha_a, alpha_b)}."""
        G = self.rs.gram
        qp = self._qpow
        memo = {}

        def wt_pair(u, b):
            return sum(G[a - 1][b - 1] for a in u)

        def sh(u, v):
            key = (u, v)
            hit = memo.get(key)
            if hit is not None:
                return hit
            if not u:
                res = {v: ONE}
            elif not v:
                res = {u: ONE}
            else:
                res = {}
                for w, c in sh(u[1:], v).items():
                    vadd(res, {(u[0],) + w: c})
                e = -wt_pair(u, v[0])
                f = qp(e) if e else ONE
                for w, c in sh(u, v[1:]).items():
                    vadd(res, {(v[0],) + w: c * f})
            memo[key] = res
            return res

        out = {}
        for u, a in x.items():
            for v, b in y.items():
                vadd(out, sh(u, v), a * b)
        return out

    def _qpow(self, e):
        x = self._qcache.get(e)
        if x is None:
            x = self._qcache[e] = self.rs.Q.qpow(e)
        return x

    def vectors(self, exprs, beta):
        """Evaluate several expressions in one common faithful target."""
        if all(e.is_positive_part() for e in exprs):
            return [self.shuffle_vector(e) for e in exprs]
        bound = tuple(map(max, *[self._bound(e, beta) for e in exprs])) if len(exprs) > 1 \
            else self._bound(exprs[0], beta)
        return [self.vector(e, beta, bound) for e in exprs]

    def vector(self, expr, beta, bound=None):
        """omega(expr) applied to the top vector, as a sparse vector."""
        rs, Q = self.rs, self.rs.Q
        own = self._bound(expr, beta)
        if bound is None:
            bound = own
        elif any(x < y for x, y in zip(bound, own)):
            raise UqError("window bound too small for this expression")
        M = self.module(beta, bound)
        top = M.weights[0]
        out = {}
        for (w, lam), c in expr.terms.items():
            # twisted: K_lam acts as K_{-lam}
            v = {0: c * Q.qpow(-rs.pairing(lam, top))} if any(lam) else {0: c}
            for a in reversed(w):
                if a > 0:
                    cols, known = M._Fcols[a], M.F_known[a]
                    if any(k not in known for k in v):
                        raise UqError("evaluation left the window")
                else:
                    cols = M._Ecols[-a]
                nv = {}
                for k, x in v.items():
                    if cols[k]:
                        vadd(nv, cols[k], x)
                v = nv
                if not v:
                    break
            vadd(out, v)
        return out

    def word_basis(self, beta):
        """Independent words in the E_i spanning U^+_beta, chosen greedily."""
        hit = self._bases.get(beta)
        if hit is not None:
            return hit
        rs = self.rs
        c = [int(x) for x in rs.weight_to_root(beta)]
        letters = [i + 1 for i in range(rs.rank) for _ in range(c[i])]
        words = sorted(set(permutations(letters)))
        ech = Echelon()
        basis, vecs = [], []
        for w in words:
            e = UqExpression(rs, {(tuple(w), rs.zero()): ONE})
            v = self.shuffle_vector(e)
            if ech.add(v) is None:
                basis.append(tuple(w))
                vecs.append(v)
        self._bases[beta] = (basis, vecs)
        return basis, vecs

    def fit(self, expr, beta):
        """Rewrite an element of U^+_beta in the greedy word basis."""
        rs = self.rs
        basis, _ = self.word_basis(beta)
        words = [UqExpression(rs, {(w, rs.zero()): ONE}) for w in basis]
        *vecs, target = self.vectors(words + [expr], beta)
        coeffs = _solve_span(vecs, target)
        if coeffs is None:
            raise UqError("expression does not lie in U^+ of the expected weight")
        return UqExpression(rs, {(basis[k], rs.zero()): x for k, x in coeffs.items()})


def _solve_span(vecs, target):
    keys = sorted({k for v in vecs for k in v} | set(target))
    rows = [{p: vecs[p][k] for p in range(len(vecs)) if k in vecs[p]} for k in keys]
    rhs = [target.get(k, ZERO) for k in keys]
    x, ns = solve(rows, rhs, range(len(vecs)))
    if x is None:
        return None
    if ns:
        raise UqError("spanning vectors are dependent")
    return x


def fundamental_modules(rs):
    out = []
    for i in range(rs.rank):
        lam = tuple(1 if k == i else 0 for k in range(rs.rank))
        out.append(highest_weight_module(rs, lam, name=f"V(omega_{i + 1})"))
    return out


def equal_in_uq(a, b, degree=None, family="auto", oracle=None, max_length=None):
    """Is a - b zero, judged by evaluation on a module family?

    family='window' uses the faithful twisted window for U^+_degree;
    family='fundamental-tensors' uses all tensor words of fundamental modules
    of length <= max_length (default: height of the degree);
    'auto' picks the window when a - b lies in U^+.
    Returns (verdict, description of the family).
    """
    from .repn import tensor
    diff = a - b
    if diff.is_zero():
        return True, "syntactic"
    rs = a.rs
    if family == "auto":
        family = "window" if diff.is_positive_part() else "fundamental-tensors"
    if family == "window":
        beta = degree if degree is not None else diff.weight()
        orc = oracle or WindowOracle(rs)
        if diff.is_positive_part():
            return (not orc.shuffle_vector(diff)), "quantum shuffle algebra"
        v = orc.vector(diff, tuple(beta))
        lam = tuple(int(x) for x in rs.weight_to_root(beta))
        return (not v), f"twisted window of V{lam}"
    fams = fundamental_modules(rs)
    if max_length is None:
        h = sum(rs.weight_to_root(degree)) if degree is not None else 1
        max_length = max(1, int(abs(h)))
    layer = list(fams)
    for length in range(1, max_length + 1):
        for M in layer:
            if not evaluate(diff, M).is_zero():
                return False, f"tensor words of fundamental modules, length <= {max_length}"
        if length < max_length:
            layer = [tensor(M, F) for M in layer for F in fams]
    return True, f"tensor words of fundamental modules, length <= {max_length}"


# --- quantum root vectors --------------------------------------------------------------------

class SchubertCell:
    def __init__(self, pd, generators, variant, oracle, raw):
        self.pd = pd
        self.generators = generators      # E_{xi_k}, k = 1..N
        self.variant = variant
        self.oracle = oracle
        self.raw = raw                    # True where no fitting was needed
        self.coefficients = None
        self.scaling = None

    def to_json(self):
        return {
            "reduced_word": list(self.pd.w0),
            "braid_convention": self.variant,
            "generators": [g.to_string() for g in self.generators],
            "fitted_to_positive_part": [not r for r in self.raw],
        }


def quantum_root_vectors(pd, variant="jantzen", oracle=None):
    """E_{xi_k} = T_{j_1} ... T_{j_{M+k-1}} (E_{j_{M+k}}) along the fixed word for w_0.

    After any step that produces F or K letters, or more terms than
    dim U^+_beta, the intermediate root vector (which lies in U^+) is
    rewritten in the greedy word basis through the window oracle.
    """
    rs = pd.rs
    oracle = oracle or WindowOracle(rs)
    word = pd.w0
    M = pd.M
    gens, raw = [], []
    for k in range(1, pd.N + 1):
        pos = M + k - 1
        x = UqExpression.E(rs, word[pos])
        beta = rs.alpha(word[pos] - 1)
        fitted = False
        for m in range(pos - 1, -1, -1):
            i = word[m]
            x = braid_automorphism(i, x, variant)
            beta = rs.reflect(i - 1, beta)
            if not x.is_positive_part() or len(x.terms) > len(oracle.word_basis(beta)[0]):
                x = oracle.fit(x, beta)
                fitted = True
        if x.weight() != pd.xi_weight(k):
            raise UqError(f"E_xi_{k} has the wrong weight")
        gens.append(x)
        raw.append(not fitted)
    return SchubertCell(pd, gens, variant, oracle, raw)


def verify_schubert_relations(sc, u_plus=None):
    """Solve E_l E_k - q^{-(xi_k,xi_l)} E_k E_l = sum_{k<i<=j<l} c^{ij}_{kl} E_i E_j.

    Solvability and uniqueness are asserted.  Coefficients are required to be
    Laurent polynomials in q after the rescaling x_k -> c_k E_{xi_k} that
    intertwines u_+ with the adjoint action; the raw E_{xi_k} carry divided
    power denominators in non simply laced types.
    """
    from .repn import build_u_plus
    pd, Q = sc.pd, sc.pd.rs.Q
    E = sc.generators
    phis = None
    if all(e.is_positive_part() for e in E):
        phis = [sc.oracle.shuffle_vector(e) for e in E]
    table = {}
    for k in range(pd.N):
        for l in range(k + 1, pd.N):
            beta = wadd(pd.xi_weight(k + 1), pd.xi_weight(l + 1))
            lhs = None if phis is not None else \
                E[l] * E[k] - (E[k] * E[l]).scale(Q.qpow(-pd.xi_pairing(k + 1, l + 1)))
            cands = [(i, j) for i in range(k + 1, l) for j in range(i, l)
                     if wadd(pd.xi_weight(i + 1), pd.xi_weight(j + 1)) == beta]
            if phis is not None:
                sp = sc.oracle.shuffle_product
                vecs = [sp(phis[i], phis[j]) for i, j in cands]
                target = sp(phis[l], phis[k])
                vadd(target, sp(phis[k], phis[l]), -Q.qpow(-pd.xi_pairing(k + 1, l + 1)))
            else:
                *vecs, target = sc.oracle.vectors([E[i] * E[j] for i, j in cands] + [lhs], beta)
            try:
                x = _solve_span(vecs, target) if vecs else ({} if not target else None)
            except UqError:
                raise UqError(f"relation ({k + 1},{l + 1}): candidate products are dependent")
            if x is None:
                raise UqError(f"relation ({k + 1},{l + 1}) has no solution of the stated shape")
            table[(k, l)] = {(cands[p][0], cands[p][1]): c for p, c in x.items()}
    sc.coefficients = table
    if any(not c.is_laurent() for co in table.values() for c in co.values()):
        scale = schubert_scaling(sc, u_plus if u_plus is not None else build_u_plus(pd))
        if scale is None:
            raise UqError("no intertwining rescaling of the root vectors exists")
        sc.scaling = scale
        for (k, l), co in table.items():
            for (i, j), c in co.items():
                r = c * scale[k] * scale[l] / (scale[i] * scale[j])
                if not r.is_laurent():
                    raise UqError(f"coefficient {r} of relation ({k + 1},{l + 1}) is not a Laurent polynomial in q")
    return table


def coefficient_table_json(table, L):
    return [{"k": k + 1, "l": l + 1, "i": i + 1, "j": j + 1, "coeff": c.to_q_string(L)}
            for (k, l), co in sorted(table.items()) for (i, j), c in sorted(co.items())]


def schubert_scaling(sc, u_plus):
    """c_k with x_k -> c_k E_{xi_k} intertwining E_j on u_+ with ad(E_j).

    Normalised by c = 1 at the lowest-weight vector; returns None when the
    adjoint action is not proportional as required.
    """
    pd, rs = sc.pd, sc.pd.rs
    N = pd.N
    E = sc.generators
    edges = []
    for j in u_plus.gens:
        Ej = UqExpression.E(rs, j)
        for k in range(N):
            col = u_plus.E[j].column(k)
            if not col:
                continue
            (m, b), = col.items()
            beta = wadd(pd.xi_weight(k + 1), rs.alpha(j - 1))
            ad = adjoint_action(Ej, E[k])
            a = _proportionality(sc.oracle, ad, E[m], beta)
            if a is None:
                return None
            edges.append((k, m, a / b))
    lows = [k for k in range(N) if all(not u_plus.F[j].column(k) for j in u_plus.gens)]
    c = {lows[0]: ONE}
    changed = True
    while changed:
        changed = False
        for k, m, r in edges:
            if k in c and m not in c:
                c[m] = c[k] * r
                changed = True
            elif m in c and k not in c:
                c[k] = c[m] / r
                changed = True
    for k, m, r in edges:
        if c[m] != c[k] * r:
            return None
    return [c[k] for k in range(N)]


def _proportionality(oracle, x, y, beta):
    vx, vy = oracle.vectors([x, y], beta)
    if not vy:
        return None
    k0 = next(iter(vy))
    a = vx.get(k0, ZERO) / vy[k0]
    if vadd(dict(vx), vy, -a):
        return None
    return a


def match_symmetric_algebra(sc, S, u_plus, perm=None):
    """Do the Schubert relations equal the S_q rules under x_k -> c_k E_{xi_k}?

    `perm` relabels the generators of S (a control for order sensitivity).
    """
    pd = sc.pd
    N = pd.N
    if N == 1:
        return True
    table = sc.coefficients if sc.coefficients is not None else verify_schubert_relations(sc, u_plus)
    c = schubert_scaling(sc, u_plus)
    if c is None:
        return False
    p = list(range(N)) if perm is None else list(perm)
    Q = pd.rs.Q
    for (k, l), coeffs in table.items():
        # S rule for x_l x_k in relabelled generators
        a, b = p[l], p[k]
        if a > b:
            rule = S.rules.get((a, b))
            lead = (b, a)
            if rule is None:
                return False
            expect = {w: x for w, x in rule.items() if w != lead}
            if rule.get(lead, ZERO) != Q.qpow(-pd.xi_pairing(k + 1, l + 1)):
                return False
        else:
            return False
        got = {}
        for (i, j), x in coeffs.items():
            got[(p[i], p[j])] = x * c[k] * c[l] / (c[i] * c[j])
        if got != expect:
            return False
    return True


def ad_invariance(sc, u_plus):
    """ad(E_j), ad(F_j) for Levi nodes j map each E_{xi_k} into span{E_{xi_m}}.

    Checked on the fundamental modules; returns the list of failures.
    """
    pd, rs = sc.pd, sc.pd.rs
    E = sc.generators
    mods = fundamental_modules(rs)
    mats = [[evaluate(e, M) for M in mods] for e in E]
    bad = []
    for j in u_plus.gens:
        for g in (UqExpression.E(rs, j), UqExpression.F(rs, j)):
            for k in range(pd.N):
                ad = [evaluate(adjoint_action(g, E[k]), M) for M in mods]
                if all(A.is_zero() for A in ad):
                    continue
                if not any(_proportional(ad, mats[m]) for m in range(pd.N)):
                    bad.append((str(g), k + 1))
    return bad


def _proportional(As, Bs):
    c = None
    for A, B in zip(As, Bs):
        for r, col, b in B.entries():
            a = A[r, col]
            c = a / b
            break
        if c is not None:
            break
    if c is None:
        return all(A.is_zero() for A in As)
    return all((A - B.scale(c)).is_zero() for A, B in zip(As, Bs))


# --- consistency checks ------------------------------------------------------------------------

def _generators(rs):
    out = []
    for i in range(1, rs.rank + 1):
        out += [UqExpression.E(rs, i), UqExpression.F(rs, i), UqExpression.Ki(rs, i)]
    return out


def defining_relations(rs):
    """Relation instances of U_q(g) as expressions that must vanish."""
    Q = rs.Q
    out = []
    for i in range(1, rs.rank + 1):
        Ki = UqExpression.Ki(rs, i)
        Kinv = UqExpression.Ki(rs, i, -1)
        for j in range(1, rs.rank + 1):
            Ej, Fj = UqExpression.E(rs, j), UqExpression.F(rs, j)
            c = Q.qpow(rs.gram[i - 1][j - 1])
            out.append(Ki * Ej * Kinv - Ej.scale(c))
            out.append(Ki * Fj * Kinv - Fj.scale(c.inverse()))
            comm = UqExpression.E(rs, i) * Fj - Fj * UqExpression.E(rs, i)
            if i == j:
                di = rs.d[i - 1]
                comm = comm - (Ki - Kinv).scale((Q.qpow(di) - Q.qpow(-di)).inverse())
            out.append(comm)
            if i != j:
                m = 1 - rs.cartan[i - 1][j - 1]
                for letter in (1, -1):
                    s = UqExpression(rs)
                    for r in range(m + 1):
                        t = (_divided_power(rs, i, m - r, letter)
                             * (UqExpression.E(rs, j) if letter > 0 else UqExpression.F(rs, j))
                             * _divided_power(rs, i, r, letter))
                        s = s + t.scale(-1 if r % 2 else 1)
                    out.append(s)
    return out


def _vanishes(expr, mods):
    return all(evaluate(expr, M).is_zero() for M in mods)


def check_braid_automorphism(rs, variant="jantzen", mods=None):
    """T_i maps every defining relation to zero on the fundamental modules."""
    mods = mods or fundamental_modules(rs)
    rels = defining_relations(rs)
    bad = []
    for i in range(1, rs.rank + 1):
        for k, r in enumerate(rels):
            if not _vanishes(braid_automorphism(i, r, variant), mods):
                bad.append((i, k))
    return bad


def check_braid_relations(rs, variant="jantzen", mods=None):
    """T_iT_jT_i = T_jT_iT_j on generators for nodes with a_ij a_ji = 1."""
    mods = mods or fundamental_modules(rs)
    bad = []
    for i in range(1, rs.rank + 1):
        for j in range(i + 1, rs.rank + 1):
            if rs.cartan[i - 1][j - 1] * rs.cartan[j - 1][i - 1] != 1:
                continue
            for g in _generators(rs):
                a = braid_automorphism(i, braid_automorphism(j, braid_automorphism(i, g, variant), variant), variant)
                b = braid_automorphism(j, braid_automorphism(i, braid_automorphism(j, g, variant), variant), variant)
                if not _vanishes(a - b, mods):
                    bad.append((i, j, str(g)))
    return bad


def check_hopf_axioms(rs, n_random=10, max_len=3, seed=0, mods=None):
    """(eps⊗id)Delta = id and m(S⊗id)Delta = eps·1 on generators and random words."""
    import random
    rng = random.Random(seed)
    mods = mods or fundamental_modules(rs)
    samples = _generators(rs)
    letters = [a for i in range(1, rs.rank + 1) for a in (i, -i)]
    for _ in range(n_random):
        w = tuple(rng.choice(letters) for _ in range(rng.randint(1, max_len)))
        lam = rs.alpha(rng.randrange(rs.rank)) if rng.random() < 0.5 else rs.zero()
        samples.append(UqExpression(rs, {(w, tuple(lam)): ONE}))
    bad = []
    for x in samples:
        left = UqExpression(rs)
        anti = UqExpression(rs)
        for a1, a2 in coproduct(x).legs():
            left = left + a2.scale(counit(a1))
            anti = anti + antipode(a1) * a2
        if not _vanishes(left - x, mods):
            bad.append(("counit", str(x)))
        if not _vanishes(anti - UqExpression.scalar(rs, counit(x)), mods):
            bad.append(("antipode", str(x)))
        if not _vanishes(antipode(antipode_inverse(x)) - x, mods):
            bad.append(("antipode_inverse", str(x)))
        if star(star(x)) != x and not _vanishes(star(star(x)) - x, mods):
            bad.append(("star", str(x)))
    return bad


def pin_braid_convention(pd, expected):
    """First variant whose root vectors reproduce `expected` verbatim (as free expressions)."""
    rs = pd.rs
    targets = [parse_expression(e, rs) for e in expected]
    for variant in BRAID_VARIANTS:
        try:
            sc = quantum_root_vectors(pd, variant)
        except UqError:
            continue
        if all(g == t for g, t in zip(sc.generators, targets)):
            return variant, sc
    return None, None


def untwisted_cell_generators(pd, variant="jantzen", oracle=None):
    """X_k = T_{j_{M+1}} ... T_{j_{M+k-1}}(E_{j_{M+k}}), exposed for cross-checks."""
    rs = pd.rs
    oracle = oracle or WindowOracle(rs)
    out = []
    for k in range(1, pd.N + 1):
        pos = pd.M + k - 1
        x = UqExpression.E(rs, pd.w0[pos])
        beta = rs.alpha(pd.w0[pos] - 1)
        for m in range(pos - 1, pd.M - 1, -1):
            i = pd.w0[m]
            x = braid_automorphism(i, x, variant)
            beta = rs.reflect(i - 1, beta)
            if not x.is_positive_part() or len(x.terms) > len(oracle.word_basis(beta)[0]):
                x = oracle.fit(x, beta)
        out.append(x)
    return out


def central_charge_ok(sc):
    """ad(K_{omega_t}) E_{xi_k} = q^{d_t} E_{xi_k} for every k."""
    pd, rs = sc.pd, sc.pd.rs
    t = pd.t
    om = tuple(1 if k == t - 1 else 0 for k in range(rs.rank))
    K = UqExpression.K(rs, om)
    want = rs.Q.qpow(rs.d[t - 1])
    for x in sc.generators:
        if adjoint_action(K, x) != x.scale(want):
            return False
    return True

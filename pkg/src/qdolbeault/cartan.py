"""Root systems, Weyl words and cominuscule parabolic data.

Weights are integer tuples in fundamental-weight coordinates.  Roots are
also kept in simple-root coordinates where that is more natural; the two
are related by the Cartan matrix.  Simple-root indices are 1-based in all
user-facing data (words, labels) and 0-based internally.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .scalars import RootOfQ, lcm_denominators


# symmetrised Gram matrices (alpha_i, alpha_j), short roots of length^2 2
def _gram(typ, r):
    B = [[0] * r for _ in range(r)]
    if typ == "A":
        for i in range(r):
            B[i][i] = 2
        for i in range(r - 1):
            B[i][i + 1] = B[i + 1][i] = -1
    elif typ == "B":
        for i in range(r - 1):
            B[i][i] = 4
        B[r - 1][r - 1] = 2
        for i in range(r - 1):
            B[i][i + 1] = B[i + 1][i] = -2
    elif typ == "C":
        for i in range(r - 1):
            B[i][i] = 2
        B[r - 1][r - 1] = 4
        for i in range(r - 2):
            B[i][i + 1] = B[i + 1][i] = -1
        B[r - 2][r - 1] = B[r - 1][r - 2] = -2
    elif typ == "D":
        for i in range(r):
            B[i][i] = 2
        for i in range(r - 2):
            B[i][i + 1] = B[i + 1][i] = -1
        B[r - 3][r - 1] = B[r - 1][r - 3] = -1
    elif typ == "E":
        for i in range(r):
            B[i][i] = 2
        # Bourbaki numbering: 1-3-4-5-6-7-8 chain, 2 attached to 4
        edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]
        for a, b in edges:
            if a <= r and b <= r:
                B[a - 1][b - 1] = B[b - 1][a - 1] = -1
    elif typ == "F":
        B = [[4, -2, 0, 0], [-2, 4, -2, 0], [0, -2, 2, -1], [0, 0, -1, 2]]
    elif typ == "G":
        B = [[2, -3], [-3, 6]]
    return B


_VALID = {
    "A": lambda r: r >= 1,
    "B": lambda r: r >= 2,
    "C": lambda r: r >= 2,
    "D": lambda r: r >= 4,
    "E": lambda r: r in (6, 7, 8),
    "F": lambda r: r == 4,
    "G": lambda r: r == 2,
}


def parse_type(spec):
    """'A3' -> ('A', 3); 'E6' -> ('E', 6)."""
    spec = spec.strip().upper()
    if len(spec) < 2 or spec[0] not in _VALID or not spec[1:].isdigit():
        raise ValueError(f"invalid root system type {spec!r}")
    return spec[0], int(spec[1:])


def _solve_fractions(A, b):
    """Solve A x = b over Q (A square, nonsingular)."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(A, b)]
    for c in range(n):
        p = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


class RootSystem:
    """A finite root system of type A-G with the symmetrised form (short roots: 2)."""

    def __init__(self, typ, rank):
        if isinstance(typ, str) and len(typ) > 1 and rank is None:
            typ, rank = parse_type(typ)
        typ = typ.upper()
        if typ not in _VALID or not _VALID[typ](rank):
            raise ValueError(f"invalid root system {typ}{rank}")
        self.type = typ
        self.rank = rank
        self.name = f"{typ}{rank}"
        B = _gram(typ, rank)
        self.gram = tuple(tuple(row) for row in B)
        self.d = tuple(B[i][i] // 2 for i in range(rank))
        self.cartan = tuple(tuple(B[i][j] // self.d[i] for j in range(rank)) for i in range(rank))
        # omega Gram: Omega = (A^T)^{-1} D
        AT = [[self.cartan[j][i] for j in range(rank)] for i in range(rank)]
        cols = []
        for j in range(rank):
            e = [0] * rank
            e[j] = self.d[j]
            cols.append(_solve_fractions(AT, e))
        self.omega_gram = tuple(tuple(cols[j][k] for j in range(rank)) for k in range(rank))
        self.L = lcm_denominators(x for row in self.omega_gram for x in row)
        self.Q = RootOfQ(self.L)

    def __repr__(self):
        return f"RootSystem({self.name})"

    def __eq__(self, other):
        return isinstance(other, RootSystem) and other.name == self.name

    def __hash__(self):
        return hash(self.name)

    # coordinates ---------------------------------------------------------------
    def alpha(self, i):
        """Simple root alpha_i (0-based i) in omega coordinates."""
        return tuple(self.cartan[k][i] for k in range(self.rank))

    def root_to_weight(self, c):
        """Simple-root coordinates -> omega coordinates."""
        return tuple(sum(self.cartan[k][i] * c[i] for i in range(self.rank)) for k in range(self.rank))

    def weight_to_root(self, lam):
        """Omega coordinates -> simple-root coordinates (Fractions)."""
        return tuple(_solve_fractions([list(r) for r in self.cartan], list(lam)))

    def pairing(self, lam, mu):
        """(lam, mu) for weights in omega coordinates."""
        G = self.omega_gram
        r = self.rank
        return sum(lam[j] * G[j][k] * mu[k] for j in range(r) if lam[j] for k in range(r) if mu[k])

    def root_pairing(self, a, b):
        """(a, b) for roots in simple-root coordinates."""
        B = self.gram
        return sum(a[i] * B[i][j] * b[j] for i in range(self.rank) if a[i] for j in range(self.rank) if b[j])

    def reflect(self, i, lam):
        """s_i(lam) for lam in omega coordinates (0-based i)."""
        c = lam[i]
        if c == 0:
            return tuple(lam)
        a = self.alpha(i)
        return tuple(x - c * y for x, y in zip(lam, a))

    def reflect_root(self, i, beta):
        """s_i(beta) for a root in simple-root coordinates."""
        w = self.root_to_weight(beta)
        c = w[i]
        out = list(beta)
        out[i] -= c
        return tuple(out)

    @property
    def rho(self):
        return tuple([1] * self.rank)

    def zero(self):
        return tuple([0] * self.rank)

    # roots ------------------------------------------------------------------------
    @cached_property
    def positive_roots(self):
        """Positive roots in simple-root coordinates, sorted by height then lex."""
        simple = [tuple(1 if j == i else 0 for j in range(self.rank)) for i in range(self.rank)]
        seen = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for beta in frontier:
                for i in range(self.rank):
                    g = self.reflect_root(i, beta)
                    if all(x >= 0 for x in g) and g not in seen:
                        seen.add(g)
                        nxt.append(g)
            frontier = nxt
        return tuple(sorted(seen, key=lambda b: (sum(b), tuple(-x for x in b))))

    @cached_property
    def highest_root(self):
        return max(self.positive_roots, key=sum)

    def height(self, beta):
        return sum(beta)

    # Weyl words ---------------------------------------------------------------------
    def apply_word(self, word, lam):
        """Apply s_{i_1} ... s_{i_k} (1-based letters) to lam, rightmost first."""
        for i in reversed(word):
            lam = self.reflect(i - 1, lam)
        return lam

    def word(self, letters):
        return WeylWord(self, tuple(letters))

    def longest_word(self, subset=None):
        """Reduced word of the longest element of the parabolic subgroup on `subset`."""
        nodes = sorted(subset if subset is not None else range(1, self.rank + 1), reverse=True)
        lam = self.rho
        word = []
        while True:
            for j in nodes:
                if lam[j - 1] > 0:
                    break
            else:
                break
            lam = self.reflect(j - 1, lam)
            word.append(j)
        # collected letters act right-to-left: w(rho) = s_{last} ... s_{first}(rho)
        return tuple(reversed(word))

    def word_for_element(self, image_of_rho, prefer="largest"):
        """Reduced word of the element w with w(rho) = image_of_rho, by left descents."""
        lam = tuple(image_of_rho)
        word = []
        while True:
            desc = [i + 1 for i in range(self.rank) if lam[i] < 0]
            if not desc:
                break
            j = max(desc) if prefer == "largest" else min(desc)
            word.append(j)
            lam = self.reflect(j - 1, lam)
        if lam != self.rho:
            raise ValueError("image is not in the Weyl orbit of rho")
        return tuple(word)

    # cominuscule data -------------------------------------------------------------------
    def is_cominuscule(self, t):
        if not 1 <= t <= self.rank:
            raise ValueError(f"node {t} out of range 1..{self.rank}")
        return self.highest_root[t - 1] == 1


@dataclass(frozen=True)
class WeylWord:
    rs: RootSystem
    letters: tuple

    def __len__(self):
        return len(self.letters)

    def image_of_rho(self):
        return self.rs.apply_word(self.letters, self.rs.rho)

    def __eq__(self, other):
        return isinstance(other, WeylWord) and self.rs == other.rs and self.image_of_rho() == other.image_of_rho()

    def __hash__(self):
        return hash((self.rs.name, self.image_of_rho()))

    def length(self):
        """Coxeter length: number of positive roots sent to negative roots by w^{-1}."""
        inv = tuple(reversed(self.letters))
        n = 0
        for beta in self.rs.positive_roots:
            g = beta
            for i in reversed(inv):
                g = self.rs.reflect_root(i - 1, g)
            if any(x < 0 for x in g):
                n += 1
        return n

    def is_reduced(self):
        return self.length() == len(self.letters)

    def __str__(self):
        return " ".join(f"s{i}" for i in self.letters) if self.letters else "e"


class NonReducedWord(ValueError):
    pass


def phi_set(w):
    """The roots s_{i_1}...s_{i_{k-1}}(alpha_{i_k}) in order (simple-root coords)."""
    rs = w.rs
    out = []
    for k, i in enumerate(w.letters):
        beta = tuple(1 if j == i - 1 else 0 for j in range(rs.rank))
        for j in reversed(w.letters[:k]):
            beta = rs.reflect_root(j - 1, beta)
        if any(x < 0 for x in beta) or beta in out:
            short = _find_shortening(w, k)
            raise NonReducedWord(
                f"word {w} is not reduced: deleting letters at positions {short[0] + 1} and {short[1] + 1} "
                f"gives the same element")
        out.append(beta)
    return out


def _find_shortening(w, k):
    prefix = w.letters[:k + 1]
    target = w.rs.apply_word(prefix, w.rs.rho)
    for j in range(k):
        cand = prefix[:j] + prefix[j + 1:k]
        if w.rs.apply_word(cand, w.rs.rho) == target:
            return (j, k)
    return (k - 1, k)


@dataclass(frozen=True)
class ParabolicData:
    rs: RootSystem
    t: int
    levi_nodes: tuple
    radical_roots: tuple        # sorted by height
    w0: tuple
    w0l: tuple
    wl: tuple
    xi: tuple                   # xi-sequence, simple-root coordinates

    @property
    def N(self):
        return len(self.xi)

    @property
    def M(self):
        return len(self.w0l)

    @property
    def name(self):
        return f"{self.rs.name}/t{self.t}"

    def xi_weight(self, k):
        """omega coordinates of xi_k (1-based k)."""
        return self.rs.root_to_weight(self.xi[k - 1])

    def xi_pairing(self, k, l):
        return self.rs.root_pairing(self.xi[k - 1], self.xi[l - 1])

    def to_json(self):
        return {
            "type": self.rs.name,
            "node": self.t,
            "N": self.N,
            "levi_nodes": list(self.levi_nodes),
            "radical_roots": [list(b) for b in self.radical_roots],
            "w0": list(self.w0),
            "w0_levi": list(self.w0l),
            "w_parabolic": list(self.wl),
            "xi": [list(b) for b in self.xi],
        }


def parabolic_data(rs, t, wl_word=None):
    """Cominuscule parabolic data for crossed node t (1-based).

    The longest word of the Levi Weyl group is produced by greedy descent on
    rho; the parabolic element w_l = w_{0,l} w_0 gets a reduced word by
    left descents, largest index first, unless `wl_word` is supplied.
    """
    if not rs.is_cominuscule(t):
        raise ValueError(f"node {t} of {rs.name} is not cominuscule")
    levi = tuple(j for j in range(1, rs.rank + 1) if j != t)
    radical = tuple(b for b in rs.positive_roots if b[t - 1] == 1)
    w0l = rs.longest_word(levi)
    w0 = rs.longest_word()
    # w_l (rho) = w_{0,l} w_0 (rho)
    img = rs.apply_word(w0l, rs.apply_word(w0, rs.rho))
    if wl_word is None:
        wl = rs.word_for_element(img, prefer="largest")
    else:
        wl = tuple(wl_word)
        if rs.apply_word(wl, rs.rho) != img:
            raise ValueError(f"supplied word {wl} does not represent w_0,l w_0")
    full = w0l + wl
    if len(full) != len(rs.positive_roots):
        raise ValueError("factorised word for w_0 is not reduced")
    roots = phi_set(WeylWord(rs, full))
    M = len(w0l)
    xi = tuple(roots[M:])
    if sorted(xi) != sorted(radical):
        raise ValueError("xi-sequence does not reproduce the radical roots")
    return ParabolicData(rs, t, levi, radical, full, w0l, wl, xi)


def cominuscule_nodes(rs):
    return [t for t in range(1, rs.rank + 1) if rs.is_cominuscule(t)]


def parse_flag_spec(spec):
    """'A3/t2' -> (RootSystem A3, 2)."""
    s = spec.strip()
    if "/" not in s:
        raise ValueError(f"expected TYPE/tNODE, got {spec!r}")
    a, b = s.split("/", 1)
    b = b.strip().lower()
    if b.startswith("t"):
        b = b[1:]
    typ, r = parse_type(a)
    return RootSystem(typ, r), int(b)

"""Exact sparse linear algebra over Scalar, plus a mod-p rank certificate.

Vectors are dicts {key: Scalar} with no zero entries.  Matrices are SMat
objects storing one such dict per row.
"""
import random
from collections import defaultdict

import numpy as np

from .scalars import ONE, ZERO, PoleError, Scalar


# --- vectors -----------------------------------------------------------------

def vadd(acc, vec, c=ONE):
    """acc += c*vec in place."""
    for k, x in vec.items():
        y = acc.get(k)
        y = x * c if y is None else y + x * c
        if y.num == 0:
            acc.pop(k, None)
        else:
            acc[k] = y
    return acc


def vscale(vec, c):
    if c.num == 0:
        return {}
    return {k: x * c for k, x in vec.items()}


def vclean(vec):
    return {k: x for k, x in vec.items() if x.num != 0}


# --- matrices ----------------------------------------------------------------

class SMat:
    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows, ncols, rows=None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else {}

    @classmethod
    def zeros(cls, n, m=None):
        return cls(n, n if m is None else m)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {i: {i: ONE} for i in range(n)})

    @classmethod
    def diag(cls, entries):
        return cls(len(entries), len(entries),
                   {i: {i: Scalar.coerce(e)} for i, e in enumerate(entries) if Scalar.coerce(e)})

    @classmethod
    def from_dense(cls, dense):
        n = len(dense)
        m = len(dense[0]) if n else 0
        rows = {}
        for i, r in enumerate(dense):
            d = {j: Scalar.coerce(x) for j, x in enumerate(r) if Scalar.coerce(x)}
            if d:
                rows[i] = d
        return cls(n, m, rows)

    @classmethod
    def from_columns(cls, nrows, cols):
        """Build from a list of column vectors (dicts row -> Scalar)."""
        rows = defaultdict(dict)
        for j, col in enumerate(cols):
            for i, x in col.items():
                if x.num != 0:
                    rows[i][j] = x
        return cls(nrows, len(cols), dict(rows))

    def copy(self):
        return SMat(self.nrows, self.ncols, {i: dict(r) for i, r in self.rows.items()})

    def __getitem__(self, ij):
        i, j = ij
        return self.rows.get(i, {}).get(j, ZERO)

    def set(self, i, j, x):
        x = Scalar.coerce(x)
        if x.num == 0:
            r = self.rows.get(i)
            if r is not None:
                r.pop(j, None)
                if not r:
                    del self.rows[i]
        else:
            self.rows.setdefault(i, {})[j] = x

    def nnz(self):
        return sum(len(r) for r in self.rows.values())

    def entries(self):
        for i in sorted(self.rows):
            r = self.rows[i]
            for j in sorted(r):
                yield i, j, r[j]

    def column(self, j):
        return {i: r[j] for i, r in self.rows.items() if j in r}

    def columns(self):
        cols = [dict() for _ in range(self.ncols)]
        for i, r in self.rows.items():
            for j, x in r.items():
                cols[j][i] = x
        return cols

    def apply(self, vec):
        """Matrix times a sparse column vector."""
        out = {}
        if not vec:
            return out
        for i, r in self.rows.items():
            acc = None
            for j, x in vec.items():
                a = r.get(j)
                if a is not None:
                    t = a * x
                    acc = t if acc is None else acc + t
            if acc is not None and acc.num != 0:
                out[i] = acc
        return out

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other.rows
        rows = {}
        for i, r in self.rows.items():
            acc = {}
            for k, a in r.items():
                ok = orows.get(k)
                if ok:
                    vadd(acc, ok, a)
            if acc:
                rows[i] = acc
        return SMat(self.nrows, other.ncols, rows)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        rows = {i: dict(r) for i, r in self.rows.items()}
        for i, r in other.rows.items():
            acc = rows.setdefault(i, {})
            vadd(acc, r)
            if not acc:
                del rows[i]
        return SMat(self.nrows, self.ncols, rows)

    def __neg__(self):
        return SMat(self.nrows, self.ncols, {i: {j: -x for j, x in r.items()} for i, r in self.rows.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Scalar.coerce(c)
        if c.num == 0:
            return SMat(self.nrows, self.ncols)
        return SMat(self.nrows, self.ncols, {i: {j: x * c for j, x in r.items()} for i, r in self.rows.items()})

    def __rmul__(self, c):
        return self.scale(c)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def T(self):
        rows = defaultdict(dict)
        for i, r in self.rows.items():
            for j, x in r.items():
                rows[j][i] = x
        return SMat(self.ncols, self.nrows, dict(rows))

    def is_zero(self):
        return not any(self.rows.values())

    def __eq__(self, other):
        if not isinstance(other, SMat) or self.shape != other.shape:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def kron(self, other):
        rows = {}
        m2 = other.ncols
        for i1, r1 in self.rows.items():
            for i2, r2 in other.rows.items():
                d = {}
                for j1, a in r1.items():
                    for j2, b in r2.items():
                        d[j1 * m2 + j2] = a * b
                rows[i1 * other.nrows + i2] = d
        return SMat(self.nrows * other.nrows, self.ncols * other.ncols, rows)

    def submatrix(self, rows, cols):
        cidx = {c: k for k, c in enumerate(cols)}
        out = {}
        for a, i in enumerate(rows):
            r = self.rows.get(i)
            if not r:
                continue
            d = {cidx[j]: x for j, x in r.items() if j in cidx}
            if d:
                out[a] = d
        return SMat(len(rows), len(cols), out)

    def dense(self):
        out = [[ZERO] * self.ncols for _ in range(self.nrows)]
        for i, r in self.rows.items():
            for j, x in r.items():
                out[i][j] = x
        return out

    def to_numpy(self, q0, L):
        v0 = float(q0) ** (1.0 / L)
        a = np.zeros((self.nrows, self.ncols))
        cache = {}
        for i, r in self.rows.items():
            for j, x in r.items():
                val = cache.get(x)
                if val is None:
                    val = cache[x] = x.eval_v(v0)
                a[i, j] = val
        return a

    def first_nonzero(self):
        for i, j, x in self.entries():
            return (i, j, x)
        return None


def block_diag(mats):
    n = sum(m.nrows for m in mats)
    k = sum(m.ncols for m in mats)
    rows = {}
    r0 = c0 = 0
    for m in mats:
        for i, r in m.rows.items():
            rows[r0 + i] = {c0 + j: x for j, x in r.items()}
        r0 += m.nrows
        c0 += m.ncols
    return SMat(n, k, rows)


# --- elimination -------------------------------------------------------------

class Echelon:
    """Incremental reduced row echelon form with provenance.

    add(vec) returns None when vec is independent of what was added so far
    (it then becomes a new basis element), or a dict {basis index: coeff}
    expressing vec in terms of the accepted basis vectors.
    """

    def __init__(self, col_key=None):
        self.piv = {}          # pivot col -> (row, comb)
        self.col_key = col_key
        self.count = 0

    def __len__(self):
        return self.count

    def reduce(self, vec):
        r = dict(vec)
        acc = {}
        for c in [c for c in r if c in self.piv]:
            x = r.get(c)
            if x is None:
                continue
            prow, pcomb = self.piv[c]
            vadd(r, prow, -x)
            vadd(acc, pcomb, x)
        return r, acc

    def add(self, vec):
        r, acc = self.reduce(vec)
        if not r:
            return acc
        idx = self.count
        self.count += 1
        comb = {idx: ONE}
        vadd(comb, acc, -ONE)
        c = min(r, key=self.col_key) if self.col_key else min(r)
        inv = r[c].inverse()
        r = vscale(r, inv)
        comb = vscale(comb, inv)
        for pc, (prow, pcomb) in self.piv.items():
            x = prow.get(c)
            if x is not None:
                vadd(prow, r, -x)
                vadd(pcomb, comb, -x)
        self.piv[c] = (r, comb)
        return None

    def contains(self, vec):
        r, _ = self.reduce(vec)
        return not r


def rank(rows):
    e = Echelon()
    for r in rows:
        if r:
            e.add(r)
    return len(e)


def rref(rows, col_key=None):
    """Return (pivot_cols in order, {pivot col: normalized row})."""
    piv = {}
    for vec in rows:
        r = dict(vec)
        for c in [c for c in r if c in piv]:
            x = r.get(c)
            if x is not None:
                vadd(r, piv[c], -x)
        if not r:
            continue
        c = min(r, key=col_key) if col_key else min(r)
        r = vscale(r, r[c].inverse())
        for pc, prow in piv.items():
            x = prow.get(c)
            if x is not None:
                vadd(prow, r, -x)
        piv[c] = r
    order = sorted(piv, key=col_key) if col_key else sorted(piv)
    return order, piv


def nullspace(rows, cols, col_key=None):
    """Basis of {x : sum_j row[j] x[j] = 0 for every row}, x indexed by cols."""
    order, piv = rref(rows, col_key)
    free = [c for c in cols if c not in piv]
    basis = []
    for f in free:
        x = {f: ONE}
        for pc, prow in piv.items():
            a = prow.get(f)
            if a is not None:
                x[pc] = -a
        basis.append(x)
    return basis


def solve(rows, rhs, cols):
    """One solution x of A x = b (rows of A as dicts, b as list), or None.

    Also returns the nullspace basis so callers can check uniqueness.
    """
    aug = []
    for r, b in zip(rows, rhs):
        d = dict(r)
        b = Scalar.coerce(b)
        if b.num != 0:
            d["__rhs__"] = b
        aug.append(d)
    key = lambda c: (1, 0) if c == "__rhs__" else (0, c)
    order, piv = rref(aug, key)
    if "__rhs__" in piv:
        return None, None
    x = {}
    for pc, prow in piv.items():
        b = prow.get("__rhs__")
        if b is not None:
            x[pc] = b
    ns = []
    for f in cols:
        if f in piv:
            continue
        v = {f: ONE}
        for pc, prow in piv.items():
            a = prow.get(f)
            if a is not None:
                v[pc] = -a
        ns.append(v)
    return x, ns


def inverse(m):
    """Inverse of a square SMat (raises if singular)."""
    n = m.nrows
    if m.ncols != n:
        raise ValueError("inverse of a non-square matrix")
    aug = []
    for i in range(n):
        d = dict(m.rows.get(i, {}))
        d[(1, i)] = ONE
        aug.append({((0, j) if not isinstance(j, tuple) else j): x for j, x in d.items()})
    order, piv = rref(aug)
    if len([c for c in piv if c[0] == 0]) < n:
        raise ZeroDivisionError("singular matrix")
    rows = {}
    for (_, j), prow in piv.items():
        d = {k[1]: x for k, x in prow.items() if k[0] == 1}
        if d:
            rows[j] = d
    return SMat(n, n, rows)


def det(m):
    """Exact determinant by fraction Gaussian elimination."""
    n = m.nrows
    a = [dict(m.rows.get(i, {})) for i in range(n)]
    d = ONE
    for col in range(n):
        p = None
        for i in range(col, n):
            if col in a[i]:
                if p is None or len(a[i]) < len(a[p]):
                    p = i
        if p is None:
            return ZERO
        if p != col:
            a[p], a[col] = a[col], a[p]
            d = -d
        pr = a[col]
        pv = pr[col]
        d = d * pv
        inv = pv.inverse()
        for i in range(col + 1, n):
            x = a[i].get(col)
            if x is not None:
                vadd(a[i], pr, -(x * inv))
    return d


# --- modular specialization ----------------------------------------------------

PRIME = 2147483629  # largest prime below 2^31


def rank_mod_p(rows, ncols_or_keys, v0=None, p=PRIME, seed=0):
    """Rank of the specialization v -> v0 over F_p.

    This is a lower bound for the rank over Q(v); a full-rank result is
    therefore a certificate of full generic rank.
    """
    if v0 is None:
        v0 = random.Random(seed).randrange(3, p - 3)
    if isinstance(ncols_or_keys, int):
        colidx = None
        ncols = ncols_or_keys
    else:
        keys = list(ncols_or_keys)
        colidx = {k: i for i, k in enumerate(keys)}
        ncols = len(keys)
    nrows = len(rows)
    if nrows == 0 or ncols == 0:
        return 0
    a = np.zeros((nrows, ncols), dtype=np.int64)
    cache = {}
    for i, r in enumerate(rows):
        for j, x in r.items():
            val = cache.get(x)
            if val is None:
                val = cache[x] = x.mod_p(v0, p)
            a[i, j if colidx is None else colidx[j]] = val
    return _rank_np_mod(a, p)


def _rank_np_mod(a, p):
    a = a % p
    nrows, ncols = a.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        below = np.nonzero(a[r + 1:, c])[0] + r + 1
        if below.size:
            f = a[below, c].reshape(-1, 1)
            # (f * a[r]) may overflow int64 for p ~ 2^31: reduce in two steps
            a[below] = (a[below] - _mulmod(f, a[r], p)) % p
        r += 1
    return r


def _mulmod(f, row, p):
    # split row into 16-bit halves so every product stays below 2^63
    lo = row & 0xFFFF
    hi = row >> 16
    return ((f * hi % p) * 65536 + f * lo) % p


def certify_rank(rows, cols, expected=None, exact_limit=400):
    """Rank over Q(v): exact for small systems, else mod-p with exact fallback.

    Returns (rank, method).  When `expected` is the maximal possible rank a
    mod-p hit is conclusive; otherwise the exact computation is used.
    """
    size = len(rows) * len(cols)
    if size <= exact_limit * exact_limit // 4:
        return rank(rows), "exact"
    try:
        rp = rank_mod_p(rows, cols)
    except PoleError:
        return rank(rows), "exact"
    if expected is not None and rp == expected:
        return rp, "modular"
    return rank(rows), "exact"

"""Exact arithmetic in Q(v), where v = q^(1/L).

A Scalar is a reduced fraction of two integer polynomials in v.  The
polynomial arithmetic and gcds are delegated to FLINT (python-flint).
"""
from fractions import Fraction
from math import gcd as _igcd

from flint import fmpz_poly

_P0 = fmpz_poly(0)
_P1 = fmpz_poly(1)


class PoleError(ArithmeticError):
    """Raised when a Scalar is evaluated at a zero of its denominator."""


def _poly_str(p, var="v"):
    coeffs = p.coeffs()
    if not coeffs:
        return "0"
    out = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = int(coeffs[k])
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            mono = str(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            if a != 1:
                mono = f"{a}*{mono}"
        out.append((sign, mono))
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, mono in out[1:]:
        s += f" {sign} {mono}"
    return s


def _monomial(k):
    """v^k as a fmpz_poly (k >= 0)."""
    c = [0] * (k + 1)
    c[k] = 1
    return fmpz_poly(c)


class Scalar:
    """Element of Q(v) kept as num/den with gcd 1 and positive leading den."""

    __slots__ = ("num", "den", "_h")

    def __init__(self, num=0, den=None, _reduced=False):
        if not isinstance(num, fmpz_poly):
            if isinstance(num, Fraction):
                if den is not None:
                    raise TypeError("Fraction numerator with explicit denominator")
                num, den = fmpz_poly(num.numerator), fmpz_poly(num.denominator)
            else:
                num = fmpz_poly(num)
        if den is None:
            den = _P1
        elif not isinstance(den, fmpz_poly):
            den = fmpz_poly(den)
        self._h = None
        if _reduced:
            self.num, self.den = num, den
            return
        if den == 0:
            raise ZeroDivisionError("Scalar with zero denominator")
        if num == 0:
            self.num, self.den = _P0, _P1
            return
        if den != _P1:
            g = num.gcd(den)
            if g != _P1:
                num = num // g
                den = den // g
            if den.coeffs()[-1] < 0:
                num, den = -num, -den
        self.num, self.den = num, den

    # construction helpers -------------------------------------------------
    @staticmethod
    def vpow(k):
        """v^k for any integer k."""
        k = int(k)
        if k >= 0:
            return Scalar(_monomial(k), _P1, _reduced=True)
        return Scalar(_P1, _monomial(-k), _reduced=True)

    @staticmethod
    def coerce(x):
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return Scalar(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        if self.num == 0:
            return other
        if other.num == 0:
            return self
        if self.den == other.den:
            if self.den == _P1:
                return Scalar(self.num + other.num, _P1, _reduced=True)
            return Scalar(self.num + other.num, self.den)
        return Scalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Scalar.coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        if self.num == 0 or other.num == 0:
            return ZERO
        a, b, c, d = self.num, self.den, other.num, other.den
        if b == _P1 and d == _P1:
            return Scalar(a * c, _P1, _reduced=True)
        # cross cancellation keeps the result reduced
        g1 = a.gcd(d) if d != _P1 else _P1
        g2 = c.gcd(b) if b != _P1 else _P1
        if g1 != _P1:
            a, d = a // g1, d // g1
        if g2 != _P1:
            c, b = c // g2, b // g2
        num, den = a * c, b * d
        if den.coeffs()[-1] < 0:
            num, den = -num, -den
        return Scalar(num, den, _reduced=True)

    __rmul__ = __mul__

    def inverse(self):
        if self.num == 0:
            raise ZeroDivisionError("division by zero Scalar")
        num, den = self.den, self.num
        if den.coeffs()[-1] < 0:
            num, den = -num, -den
        return Scalar(num, den, _reduced=True)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        return Scalar(self.num ** n, self.den ** n, _reduced=True)

    # comparisons -------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._h is None:
            self._h = hash((tuple(int(c) for c in self.num.coeffs()),
                            tuple(int(c) for c in self.den.coeffs())))
        return self._h

    def __bool__(self):
        return self.num != 0

    def is_zero(self):
        return self.num == 0

    # structure queries -------------------------------------------------------
    def is_laurent(self):
        """True if the denominator is a monomial c*v^k."""
        dc = self.den.coeffs()
        return sum(1 for c in dc if c != 0) == 1

    def monomial(self):
        """Return (c, k) if self == c*v^k with c rational, else None."""
        nc = [int(c) for c in self.num.coeffs()]
        dc = [int(c) for c in self.den.coeffs()]
        nz = [i for i, c in enumerate(nc) if c]
        dz = [i for i, c in enumerate(dc) if c]
        if len(nz) != 1 or len(dz) != 1:
            return None
        return Fraction(nc[nz[0]], dc[dz[0]]), nz[0] - dz[0]

    def laurent_coeffs(self):
        """Dict exponent -> Fraction for a Laurent polynomial in v."""
        m = Scalar(self.den).monomial()
        if m is None:
            raise ValueError(f"{self} is not a Laurent polynomial in v")
        c0, k0 = m
        return {i - k0: Fraction(int(c)) / c0
                for i, c in enumerate(self.num.coeffs()) if c != 0}

    # evaluation ----------------------------------------------------------------
    def eval_v(self, v0):
        """Float value at v = v0."""
        d = _horner(self.den, v0)
        if d == 0:
            raise PoleError(f"{self} has a pole at v = {v0}")
        return _horner(self.num, v0) / d

    def eval_at(self, q0, L):
        """Float value at q = q0 (so v = q0^(1/L))."""
        return self.eval_v(float(q0) ** (1.0 / L))

    def sign_at_q1(self):
        d = int(self.den(1))
        if d == 0:
            raise PoleError(f"{self} has a pole at q = 1")
        n = int(self.num(1))
        return (n > 0) - (n < 0) if d > 0 else (n < 0) - (n > 0)

    def value_at_q1(self):
        d = int(self.den(1))
        if d == 0:
            raise PoleError(f"{self} has a pole at q = 1")
        return Fraction(int(self.num(1)), d)

    def mod_p(self, v0, p):
        """Image in F_p under v -> v0; raises PoleError if the denominator vanishes."""
        d = int(self.den(v0)) % p
        if d == 0:
            raise PoleError(f"{self} has a pole at v = {v0} mod {p}")
        return int(self.num(v0)) % p * pow(d, p - 2, p) % p

    # printing --------------------------------------------------------------
    def __str__(self):
        if self.den == _P1:
            return _poly_str(self.num)
        return f"({_poly_str(self.num)})/({_poly_str(self.den)})"

    def __repr__(self):
        return f"Scalar('{self}')"

    def to_q_string(self, L):
        """Readable form in q when possible, otherwise the v-form."""
        try:
            coeffs = self.laurent_coeffs()
        except ValueError:
            num = _laurent_q_string({k: Fraction(int(c)) for k, c in enumerate(self.num.coeffs()) if c}, L)
            den = _laurent_q_string({k: Fraction(int(c)) for k, c in enumerate(self.den.coeffs()) if c}, L)
            if num is None or den is None:
                return str(self)
            return f"({num})/({den})"
        s = _laurent_q_string(coeffs, L)
        return s if s is not None else str(self)


def _laurent_q_string(coeffs, L):
    if not coeffs:
        return "0"
    terms = []
    for k in sorted(coeffs, reverse=True):
        c = coeffs[k]
        e = Fraction(k, L)
        if e == 0:
            mono = ""
        elif e == 1:
            mono = "q"
        elif e.denominator == 1:
            mono = f"q^{e.numerator}"
        else:
            mono = f"q^({e})"
        a = abs(c)
        if mono == "":
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        terms.append(("-" if c < 0 else "+", body))
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += f" {sign} {body}"
    return s


def _horner(p, x):
    acc = 0.0
    for c in reversed(p.coeffs()):
        acc = acc * x + float(int(c))
    return acc


ZERO = Scalar(0)
ONE = Scalar(1)


class RootOfQ:
    """The root order L with q = v^L, plus q-number helpers."""

    __slots__ = ("L",)

    def __init__(self, L):
        if int(L) < 1:
            raise ValueError("L must be a positive integer")
        self.L = int(L)

    def __repr__(self):
        return f"RootOfQ(L={self.L})"

    def __eq__(self, other):
        return isinstance(other, RootOfQ) and other.L == self.L

    def __hash__(self):
        return hash(("RootOfQ", self.L))

    def q(self):
        return Scalar.vpow(self.L)

    def qpow(self, e):
        """q^e for a rational e with L*e integral."""
        e = Fraction(e)
        k = e * self.L
        if k.denominator != 1:
            raise ValueError(f"q^{e} is not a power of v = q^(1/{self.L})")
        return Scalar.vpow(k.numerator)

    def qint(self, n, d=1):
        """Quantum integer [n]_{q^d} = (q^{dn} - q^{-dn}) / (q^d - q^{-d})."""
        n = int(n)
        if n == 0:
            return ZERO
        if n < 0:
            return -self.qint(-n, d)
        step = self.L * d
        lo = -step * (n - 1)
        c = [0] * (2 * step * (n - 1) + 1)
        for j in range(n):
            c[2 * step * j] = 1
        return Scalar(fmpz_poly(c)) * Scalar.vpow(lo)

    def qfactorial(self, n, d=1):
        out = ONE
        for k in range(1, n + 1):
            out = out * self.qint(k, d)
        return out

    def qbinom(self, n, k, d=1):
        if k < 0 or k > n:
            return ZERO
        return self.qfactorial(n, d) / (self.qfactorial(k, d) * self.qfactorial(n - k, d))


def lcm_denominators(fracs):
    L = 1
    for f in fracs:
        den = Fraction(f).denominator
        L = L * den // _igcd(L, den)
    return L

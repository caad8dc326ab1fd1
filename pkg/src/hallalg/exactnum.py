"""Exact scalar arithmetic: integer Laurent polynomials, rational functions,
and the quadratic extension Q(sqrt q) used by the finite-field backends.

Everything here is exact. No floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, Optional, Tuple


class ConsistencyError(RuntimeError):
    """An internal structural invariant failed (not a user input error)."""


class BudgetError(RuntimeError):
    """An enumeration would exceed the configured resource budget."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# Laurent polynomials over Z
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Laurent polynomial with integer coefficients, dict of exp -> coeff.

    Instances are treated as immutable; all operations return new objects.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Optional[Dict[int, int]] = None):
        c: Dict[int, int] = {}
        if coeffs:
            for e, v in coeffs.items():
                if not isinstance(e, int):
                    raise ValueError(f"exponent must be int, got {e!r}")
                if isinstance(v, Fraction):
                    if v.denominator != 1:
                        raise ValueError(f"coefficient must be integer, got {v}")
                    v = int(v)
                if not isinstance(v, int):
                    raise ValueError(f"coefficient must be int, got {v!r}")
                if v != 0:
                    c[e] = c.get(e, 0) + v
                    if c[e] == 0:
                        del c[e]
        self._c = c

    # -- constructors

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls({0: 1})

    @classmethod
    def t(cls) -> "LaurentPoly":
        return cls({1: 1})

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls({exp: coeff})

    @classmethod
    def from_int(cls, n: int) -> "LaurentPoly":
        return cls({0: n})

    # -- queries

    def is_zero(self) -> bool:
        return not self._c

    def is_one(self) -> bool:
        return self._c == {0: 1}

    def coeff(self, exp: int) -> int:
        return self._c.get(exp, 0)

    def items(self) -> Iterator[Tuple[int, int]]:
        return iter(sorted(self._c.items()))

    def degree(self) -> int:
        if not self._c:
            raise ValueError("degree of zero polynomial")
        return max(self._c)

    def valuation(self) -> int:
        if not self._c:
            raise ValueError("valuation of zero polynomial")
        return min(self._c)

    def is_polynomial(self) -> bool:
        """True when no negative exponents occur (honest polynomial)."""
        return all(e >= 0 for e in self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.from_int(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    # -- arithmetic

    def __add__(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            other = LaurentPoly.from_int(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        c = dict(self._c)
        for e, v in other._c.items():
            c[e] = c.get(e, 0) + v
        return LaurentPoly(c)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -v for e, v in self._c.items()})

    def __sub__(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            other = LaurentPoly.from_int(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            other = LaurentPoly.from_int(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        c: Dict[int, int] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + v1 * v2
        return LaurentPoly(c)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by t^k."""
        return LaurentPoly({e + k: v for e, v in self._c.items()})

    def divexact(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact division in Z[t, t^-1]; raises ValueError if not exact."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly.zero()
        # shift both to honest polynomials, divide, shift back
        sv, ov = self.valuation(), other.valuation()
        num = {e - sv: Fraction(v) for e, v in self._c.items()}
        den = {e - ov: Fraction(v) for e, v in other._c.items()}
        dd = max(den)
        lead = den[dd]
        quo: Dict[int, Fraction] = {}
        while num:
            nd = max(num)
            if nd < dd:
                raise ValueError("inexact Laurent division")
            q = num[nd] / lead
            quo[nd - dd] = q
            for e, v in den.items():
                k = e + nd - dd
                num[k] = num.get(k, Fraction(0)) - q * v
                if num[k] == 0:
                    del num[k]
        out: Dict[int, int] = {}
        for e, v in quo.items():
            if v.denominator != 1:
                raise ValueError("inexact Laurent division (fractional quotient)")
            if v != 0:
                out[e + sv - ov] = int(v)
        return LaurentPoly(out)

    def evaluate(self, x) -> Fraction:
        """Evaluate at a nonzero rational point."""
        x = Fraction(x)
        if x == 0 and any(e < 0 for e in self._c):
            raise ZeroDivisionError("negative exponent at 0")
        total = Fraction(0)
        for e, v in self._c.items():
            total += v * x ** e
        return total

    # -- rendering / serialization

    def render(self, var: str = "t") -> str:
        if not self._c:
            return "0"
        parts = []
        for e in sorted(self._c, reverse=True):
            v = self._c[e]
            if e == 0:
                body = str(abs(v))
            else:
                pw = var if e == 1 else f"{var}^{e}"
                body = pw if abs(v) == 1 else f"{abs(v)}{pw}"
            parts.append(("-" if v < 0 else "+", body))
        sign0, body0 = parts[0]
        s = ("-" if sign0 == "-" else "") + body0
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self) -> str:
        return f"LaurentPoly({self.render()})"

    def to_json(self) -> Dict[str, int]:
        return {str(e): v for e, v in sorted(self._c.items())}

    @classmethod
    def from_json(cls, data: Dict[str, int]) -> "LaurentPoly":
        return cls({int(e): int(v) for e, v in data.items()})

    @classmethod
    def parse(cls, s: str) -> "LaurentPoly":
        """Parse strings like 't+1', '2t^2 - t^-1 + 3', '(1-t^-2)'."""
        text = s.strip()
        while text.startswith("(") and text.endswith(")"):
            text = text[1:-1].strip()
        if not text:
            raise ValueError("empty polynomial string")
        text = text.replace(" ", "").replace("*", "")
        # split into signed terms
        terms = []
        cur = ""
        for i, ch in enumerate(text):
            if ch in "+-" and i > 0 and text[i - 1] not in "^+-":
                terms.append(cur)
                cur = ch
            else:
                cur += ch
        terms.append(cur)
        out = cls.zero()
        for term in terms:
            if not term or term in "+-":
                raise ValueError(f"bad polynomial term in {s!r}")
            sign = 1
            while term and term[0] in "+-":
                if term[0] == "-":
                    sign = -sign
                term = term[1:]
            if "t" in term:
                coeff_s, _, rest = term.partition("t")
                coeff = int(coeff_s) if coeff_s else 1
                if rest.startswith("^"):
                    exp = int(rest[1:])
                elif rest == "":
                    exp = 1
                else:
                    raise ValueError(f"bad polynomial term in {s!r}")
            else:
                coeff = int(term)
                exp = 0
            out = out + cls.monomial(exp, sign * coeff)
        return out


# ---------------------------------------------------------------------------
# classical q-analogues
# ---------------------------------------------------------------------------


def qint_plus(n: int) -> LaurentPoly:
    """[n]_+ = 1 + t + ... + t^(n-1)."""
    if n < 0:
        raise ValueError("qint_plus needs n >= 0")
    return LaurentPoly({e: 1 for e in range(n)})


def qfact_plus(n: int) -> LaurentPoly:
    if n < 0:
        raise ValueError("qfact_plus needs n >= 0")
    out = LaurentPoly.one()
    for k in range(1, n + 1):
        out = out * qint_plus(k)
    return out


def gauss_binomial(n: int, r: int) -> LaurentPoly:
    """Gaussian binomial coefficient [n choose r] as a polynomial in t.

    Counts r-dimensional subspaces of an n-dimensional space over F_t.
    """
    if n < 0:
        raise ValueError("gauss_binomial needs n >= 0")
    if r < 0 or r > n:
        return LaurentPoly.zero()
    num = qfact_plus(n)
    den = qfact_plus(r) * qfact_plus(n - r)
    try:
        return num.divexact(den)
    except ValueError as exc:  # pragma: no cover
        raise ConsistencyError(f"gauss_binomial({n},{r}) not exact") from exc


def balanced_qint(n: int) -> LaurentPoly:
    """[n] = (v^n - v^-n)/(v - v^-1), a Laurent polynomial in v."""
    if n < 0:
        return -balanced_qint(-n)
    return LaurentPoly({e: 1 for e in range(1 - n, n, 2)})


def balanced_qfactorial(n: int) -> LaurentPoly:
    if n < 0:
        raise ValueError("balanced_qfactorial needs n >= 0")
    out = LaurentPoly.one()
    for k in range(1, n + 1):
        out = out * balanced_qint(k)
    return out


def balanced_qbinomial(m: int, n: int) -> LaurentPoly:
    if m < 0:
        raise ValueError("balanced_qbinomial needs m >= 0")
    if n < 0 or n > m:
        return LaurentPoly.zero()
    num = balanced_qfactorial(m)
    den = balanced_qfactorial(n) * balanced_qfactorial(m - n)
    try:
        return num.divexact(den)
    except ValueError as exc:  # pragma: no cover
        raise ConsistencyError(f"balanced_qbinomial({m},{n}) not exact") from exc


# ---------------------------------------------------------------------------
# rational functions in t (quotients of integer Laurent polynomials)
# ---------------------------------------------------------------------------


def _poly_content(p: LaurentPoly) -> int:
    g = 0
    for _, v in p.items():
        g = _gcd_int(g, abs(v))
    return g if g else 1


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Primitive gcd of honest integer polynomials, positive leading coeff."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    fa = {e: Fraction(v) for e, v in a.items()}
    fb = {e: Fraction(v) for e, v in b.items()}

    def fdeg(f):
        return max(f) if f else -1

    def frem(f, g):
        gd = fdeg(g)
        glead = g[gd]
        f = dict(f)
        while f and fdeg(f) >= gd:
            fd = fdeg(f)
            c = f[fd] / glead
            for e, v in g.items():
                k = e + fd - gd
                f[k] = f.get(k, Fraction(0)) - c * v
                if f[k] == 0:
                    del f[k]
        return f

    while fb:
        fa, fb = fb, frem(fa, fb)
    # primitivize: scale to integer coefficients with content 1
    denom_lcm = 1
    for v in fa.values():
        denom_lcm = denom_lcm * v.denominator // _gcd_int(denom_lcm, v.denominator)
    ints = {e: int(v * denom_lcm) for e, v in fa.items()}
    content = 0
    for v in ints.values():
        content = _gcd_int(content, abs(v))
    ints = {e: v // content for e, v in ints.items()}
    g = LaurentPoly(ints)
    if g.coeff(g.degree()) < 0:
        g = -g
    return g


class RationalFunction:
    """Quotient num/den of integer Laurent polynomials, kept reduced."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = LaurentPoly.zero()
            self.den = LaurentPoly.one()
            return
        nv, dv = num.valuation(), den.valuation()
        n_h = num.shift(-nv)
        d_h = den.shift(-dv)
        g = _poly_gcd(n_h, d_h)
        if not g.is_one():
            n_h = n_h.divexact(g)
            d_h = d_h.divexact(g)
        c = _gcd_int(_poly_content(n_h), _poly_content(d_h))
        if c > 1:
            n_h = n_h.divexact(LaurentPoly.from_int(c))
            d_h = d_h.divexact(LaurentPoly.from_int(c))
        if d_h.coeff(d_h.degree()) < 0:
            n_h, d_h = -n_h, -d_h
        self.num = n_h.shift(nv - dv)
        self.den = d_h

    @classmethod
    def from_laurent(cls, p: LaurentPoly) -> "RationalFunction":
        return cls(p, LaurentPoly.one())

    @classmethod
    def from_int(cls, n: int) -> "RationalFunction":
        return cls(LaurentPoly.from_int(n), LaurentPoly.one())

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls.from_int(0)

    @classmethod
    def one(cls) -> "RationalFunction":
        return cls.from_int(1)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, LaurentPoly):
            return RationalFunction.from_laurent(other)
        if isinstance(other, int):
            return RationalFunction.from_int(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        r = RationalFunction.__new__(RationalFunction)
        r.num, r.den = -self.num, self.den
        return r

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def evaluate(self, x) -> Fraction:
        d = self.den.evaluate(x)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at {x}")
        return self.num.evaluate(x) / d

    def is_laurent(self) -> bool:
        try:
            self.num.divexact(self.den)
            return True
        except ValueError:
            return False

    def to_laurent(self) -> LaurentPoly:
        return self.num.divexact(self.den)

    def render(self, var: str = "t") -> str:
        if self.den.is_one():
            return self.num.render(var)
        n = self.num.render(var)
        d = self.den.render(var)
        if len(self.num._c) > 1:
            n = f"({n})"
        if len(self.den._c) > 1:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self) -> str:
        return f"RationalFunction({self.render()})"


# ---------------------------------------------------------------------------
# Q(sqrt q) scalars
# ---------------------------------------------------------------------------


def _is_qpower_denominator(x: Fraction, q: int) -> bool:
    d = x.denominator
    while d % q == 0:
        d //= q
    return d == 1


class QrtScalar:
    """Element a + b*sqrt(q) of Q(sqrt q), q a fixed prime.

    sqrt(q) is irrational for prime q, so representation is unique and
    equality is coefficientwise.
    """

    __slots__ = ("q", "a", "b")

    def __init__(self, q: int, a=0, b=0):
        if not is_prime(q):
            raise ValueError(f"q must be prime, got {q}")
        self.q = q
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def nu(cls, q: int, k: int = 1) -> "QrtScalar":
        """nu^k where nu = +sqrt(q)."""
        m, r = divmod(k, 2)
        base = Fraction(q) ** m
        if r == 0:
            return cls(q, base, 0)
        return cls(q, 0, base)

    @classmethod
    def from_fraction(cls, q: int, x) -> "QrtScalar":
        return cls(q, Fraction(x), 0)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_one(self) -> bool:
        return self.a == 1 and self.b == 0

    def _coerce(self, other):
        if isinstance(other, QrtScalar):
            if other.q != self.q:
                raise ValueError("mixing scalars over different q")
            return other
        if isinstance(other, (int, Fraction)):
            return QrtScalar(self.q, other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QrtScalar(self.q, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QrtScalar(self.q, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QrtScalar(
            self.q,
            self.a * o.a + self.b * o.b * self.q,
            self.a * o.b + self.b * o.a,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QrtScalar":
        n = self.a * self.a - self.b * self.b * self.q
        if n == 0:
            # a^2 = b^2 q with q prime forces a = b = 0
            raise ZeroDivisionError("inverse of zero")
        return QrtScalar(self.q, self.a / n, -self.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> "QrtScalar":
        if n < 0:
            return self.inverse() ** (-n)
        out = QrtScalar(self.q, 1, 0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self) -> int:
        return hash((self.q, self.a, self.b))

    def has_qpower_denominator(self) -> bool:
        return _is_qpower_denominator(self.a, self.q) and _is_qpower_denominator(
            self.b, self.q
        )

    def as_signed_nu_power(self) -> Optional[Tuple[int, int]]:
        """Return (sign, k) if self == sign * nu^k, else None."""
        for part, parity in ((self.a, 0), (self.b, 1)):
            other = self.b if parity == 0 else self.a
            if part == 0 or other != 0:
                continue
            mag = abs(part)
            # mag must be q^m for some integer m
            num, den = mag.numerator, mag.denominator
            m = 0
            if den == 1:
                while num % self.q == 0:
                    num //= self.q
                    m += 1
                if num != 1:
                    return None
            else:
                if num != 1:
                    return None
                while den % self.q == 0:
                    den //= self.q
                    m -= 1
                if den != 1:
                    return None
            sign = 1 if part > 0 else -1
            return (sign, 2 * m + parity)
        return None

    def render(self) -> str:
        sp = self.as_signed_nu_power()
        if sp is not None:
            sign, k = sp
            s = "-" if sign < 0 else ""
            if k == 0:
                return s + "1"
            if k == 1:
                return s + "v"
            return f"{s}v^{k}"
        def frac(x: Fraction) -> str:
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        if self.b == 0:
            return frac(self.a)
        if self.a == 0:
            return f"{frac(self.b)}*v" if abs(self.b) != 1 else ("v" if self.b > 0 else "-v")
        bs = f"{frac(abs(self.b))}*v" if abs(self.b) != 1 else "v"
        op = "+" if self.b > 0 else "-"
        return f"({frac(self.a)} {op} {bs})"

    def __repr__(self) -> str:
        return f"QrtScalar(q={self.q}, {self.render()})"

    def to_json(self) -> Dict[str, str]:
        def frac(x: Fraction) -> str:
            return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
        return {"q": str(self.q), "rational_part": frac(self.a), "root_part": frac(self.b)}


def laurent_at_nu(p: LaurentPoly, q: int) -> QrtScalar:
    """Evaluate a Laurent polynomial in v at v = sqrt(q)."""
    out = QrtScalar(q, 0, 0)
    for e, c in p.items():
        out = out + QrtScalar.nu(q, e) * c
    return out

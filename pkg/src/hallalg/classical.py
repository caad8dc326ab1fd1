"""Generic classical Hall algebra over Z[t, t^-1].

Basis elements [I_la] are indexed by partitions; structure constants are the
Hall polynomials P^nu_{mu,la}(t), computed exactly by expanding elementary
products and inverting the unitriangular change of basis. The same module
houses the coproduct, antipode, pairing, and the symmetric-function picture
(elementary basis, Newton power sums, Hall-Littlewood style inner product).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .exactnum import ConsistencyError, LaurentPoly, RationalFunction, gauss_binomial
from .partitions import (
    Partition,
    all_partitions,
    as_partition,
    aut_poly,
    conjugate,
    dominance_key,
    multiplicities,
    transpose_dominance_leq,
    weight,
)

L = LaurentPoly


# ---------------------------------------------------------------------------
# Hall polynomials
# ---------------------------------------------------------------------------


def hall_poly_col(nu: Partition, mu: Partition, r: int) -> LaurentPoly:
    """P^nu_{mu,(1^r)}: submodules isomorphic to the elementary module of
    rank r with quotient of type mu, inside a module of type nu.

    Closed product formula: the insertion ranks r_0 = r, r_1, ..., r_n are
    forced by the multiplicity equations m_i = l_i + 2 r_i - r_{i-1} - r_{i+1}
    (solved here in tail-sum form); infeasible rank sequences mean the count
    is zero.
    """
    nu, mu = as_partition(nu), as_partition(mu)
    if not isinstance(r, int) or r < 1:
        raise ValueError("column size r must be a positive integer")
    if weight(nu) != weight(mu) + r:
        raise ValueError("degree mismatch: |nu| must equal |mu| + r")
    n = max([1] + list(nu) + list(mu))
    lm = multiplicities(nu)
    mm = multiplicities(mu)
    l = [0] * (n + 2)
    m = [0] * (n + 2)
    for i, v in lm.items():
        l[i] = v
    for i, v in mm.items():
        m[i] = v
    rs = [0] * (n + 1)
    rs[0] = r
    for j in range(1, n + 1):
        rs[j] = rs[j - 1] + sum(m[i] - l[i] for i in range(j, n + 1))
    if rs[n] != 0:  # pragma: no cover
        raise ConsistencyError("rank sequence must terminate at zero")
    out = L.one()
    exponent = 0
    for j in range(1, n + 1):
        d = rs[j - 1] - rs[j]
        if rs[j] < 0 or d < 0 or d > l[j]:
            return L.zero()
        out = out * gauss_binomial(l[j], d)
        exponent += d * (sum(l[j + 1 : n + 1]) - rs[j])
    return out.shift(exponent)


def _mult_by_column(elem: Dict[Partition, LaurentPoly], r: int) -> Dict[Partition, LaurentPoly]:
    """Right-multiply an [I]-basis element by [I_(1^r)]."""
    out: Dict[Partition, LaurentPoly] = {}
    for sigma, c in elem.items():
        for tau in all_partitions(weight(sigma) + r):
            p = hall_poly_col(tau, sigma, r)
            if p.is_zero():
                continue
            acc = out.get(tau, L.zero()) + c * p
            if acc.is_zero():
                out.pop(tau, None)
            else:
                out[tau] = acc
    return out


_EXPANSION_CACHE: Dict[int, Dict[Partition, Dict[Partition, LaurentPoly]]] = {}
_IBASIS_CACHE: Dict[int, Dict[Partition, Dict[Partition, LaurentPoly]]] = {}


def elementary_expansion(n: int) -> Dict[Partition, Dict[Partition, LaurentPoly]]:
    """Expansions of the elementary products X_kappa in the [I] basis.

    X_kappa multiplies the columns of kappa smallest first, so the largest
    column ends in the submodule slot. Triangularity with unit diagonal
    w.r.t. transpose dominance is asserted, not assumed.
    """
    if n in _EXPANSION_CACHE:
        return _EXPANSION_CACHE[n]
    table: Dict[Partition, Dict[Partition, LaurentPoly]] = {}
    for kappa in all_partitions(n):
        elem: Dict[Partition, LaurentPoly] = {(): L.one()}
        for col in sorted(conjugate(kappa)):
            elem = _mult_by_column(elem, col)
        diag = elem.get(kappa, L.zero())
        if not diag.is_one():
            raise ConsistencyError(f"elementary product X_{kappa} lacks unit diagonal")
        for tau in elem:
            if tau != kappa and not transpose_dominance_leq(tau, kappa):
                raise ConsistencyError(
                    f"elementary product X_{kappa} has non-dominated term {tau}"
                )
        table[kappa] = elem
    _EXPANSION_CACHE[n] = table
    return table


def ibasis_in_elementary(n: int) -> Dict[Partition, Dict[Partition, LaurentPoly]]:
    """[I_la] written in the X_kappa products, by unitriangular inversion."""
    if n in _IBASIS_CACHE:
        return _IBASIS_CACHE[n]
    table = elementary_expansion(n)
    expr: Dict[Partition, Dict[Partition, LaurentPoly]] = {}
    for la in sorted(all_partitions(n), key=dominance_key):
        cur: Dict[Partition, LaurentPoly] = {la: L.one()}
        for tau, c in table[la].items():
            if tau == la:
                continue
            # tau strictly below la, so expr[tau] is already available
            for kappa, ck in expr[tau].items():
                acc = cur.get(kappa, L.zero()) - c * ck
                if acc.is_zero():
                    cur.pop(kappa, None)
                else:
                    cur[kappa] = acc
        expr[la] = cur
    _IBASIS_CACHE[n] = expr
    return expr


_HALL_CACHE: Dict[Tuple[Partition, Partition, Partition], LaurentPoly] = {}
_MU_X_CACHE: Dict[Tuple[Partition, Partition], Dict[Partition, LaurentPoly]] = {}


def _mu_times_x(mu: Partition, kappa: Partition) -> Dict[Partition, LaurentPoly]:
    key = (mu, kappa)
    if key not in _MU_X_CACHE:
        elem: Dict[Partition, LaurentPoly] = {mu: L.one()}
        for col in sorted(conjugate(kappa)):
            elem = _mult_by_column(elem, col)
        _MU_X_CACHE[key] = elem
    return _MU_X_CACHE[key]


def hall_poly(nu: Partition, mu: Partition, la: Partition) -> LaurentPoly:
    """Hall polynomial P^nu_{mu,la}(t): number of submodules of a type-nu
    module isomorphic to type la with quotient of type mu, as a polynomial
    in the residue field size."""
    nu, mu, la = as_partition(nu), as_partition(mu), as_partition(la)
    if weight(nu) != weight(mu) + weight(la):
        return L.zero()
    key = (nu, mu, la)
    if key in _HALL_CACHE:
        return _HALL_CACHE[key]
    expr = ibasis_in_elementary(weight(la))
    total = L.zero()
    for kappa, c in expr[la].items():
        prod = _mu_times_x(mu, kappa)
        if nu in prod:
            total = total + c * prod[nu]
    if not total.is_zero() and not total.is_polynomial():
        raise ConsistencyError(f"Hall polynomial {key} has negative t-exponents")
    _HALL_CACHE[key] = total
    return total


# ---------------------------------------------------------------------------
# the generic Hall algebra as a module of functions on elements
# ---------------------------------------------------------------------------


class GenericHallElement:
    """Finite Z[t,t^-1]-linear combination of basis classes [I_la]."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Partition, LaurentPoly]] = None):
        t: Dict[Partition, LaurentPoly] = {}
        if terms:
            for la, c in terms.items():
                la = as_partition(la)
                if isinstance(c, int):
                    c = L.from_int(c)
                if not isinstance(c, LaurentPoly):
                    raise ValueError(f"coefficient must be LaurentPoly, got {c!r}")
                if not c.is_zero():
                    acc = t.get(la, L.zero()) + c
                    if acc.is_zero():
                        t.pop(la, None)
                    else:
                        t[la] = acc
        self.terms = t

    @classmethod
    def basis(cls, la: Partition) -> "GenericHallElement":
        return cls({as_partition(la): L.one()})

    @classmethod
    def unit(cls) -> "GenericHallElement":
        return cls({(): L.one()})

    @classmethod
    def zero(cls) -> "GenericHallElement":
        return cls()

    def coeff(self, la: Partition) -> LaurentPoly:
        return self.terms.get(as_partition(la), L.zero())

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "GenericHallElement") -> "GenericHallElement":
        t = dict(self.terms)
        for la, c in other.terms.items():
            t[la] = t.get(la, L.zero()) + c
        return GenericHallElement(t)

    def __neg__(self) -> "GenericHallElement":
        return GenericHallElement({la: -c for la, c in self.terms.items()})

    def __sub__(self, other: "GenericHallElement") -> "GenericHallElement":
        return self + (-other)

    def scale(self, c) -> "GenericHallElement":
        if isinstance(c, int):
            c = L.from_int(c)
        return GenericHallElement({la: c * v for la, v in self.terms.items()})

    def __mul__(self, other: "GenericHallElement") -> "GenericHallElement":
        return mult_generic(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GenericHallElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "GenericHallElement(0)"
        bits = []
        for la in sorted(self.terms, key=dominance_key):
            bits.append(f"({self.terms[la].render()})*I{list(la)}")
        return "GenericHallElement(" + " + ".join(bits) + ")"


def mult_generic(x: GenericHallElement, y: GenericHallElement) -> GenericHallElement:
    out: Dict[Partition, LaurentPoly] = {}
    for mu, cx in x.terms.items():
        for la, cy in y.terms.items():
            c = cx * cy
            for nu in all_partitions(weight(mu) + weight(la)):
                p = hall_poly(nu, mu, la)
                if p.is_zero():
                    continue
                acc = out.get(nu, L.zero()) + c * p
                if acc.is_zero():
                    out.pop(nu, None)
                else:
                    out[nu] = acc
    return GenericHallElement(out)


TensorTerms = Dict[Tuple[Partition, Partition], LaurentPoly]


def comult_generic(x: GenericHallElement) -> TensorTerms:
    """Coproduct (k trivial): [I_nu] -> sum (a_mu a_la / a_nu) P^nu_{mu,la}
    [I_mu] (x) [I_la]. Every coefficient is asserted to be Laurent."""
    out: TensorTerms = {}
    for nu, c in x.terms.items():
        a_nu = aut_poly(nu)
        n = weight(nu)
        for k in range(n + 1):
            for mu in all_partitions(k):
                for la in all_partitions(n - k):
                    p = hall_poly(nu, mu, la)
                    if p.is_zero():
                        continue
                    num = aut_poly(mu) * aut_poly(la) * p
                    try:
                        coeff = num.divexact(a_nu)
                    except ValueError as exc:
                        raise ConsistencyError(
                            f"coproduct coefficient at {(nu, mu, la)} is not Laurent"
                        ) from exc
                    key = (mu, la)
                    acc = out.get(key, L.zero()) + c * coeff
                    if acc.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = acc
    return out


def counit_generic(x: GenericHallElement) -> LaurentPoly:
    return x.coeff(())


_ANTIPODE_CACHE: Dict[Partition, GenericHallElement] = {}


def antipode_generic(x: GenericHallElement) -> GenericHallElement:
    """Hopf antipode via the counit recursion: for nu nonempty
    S([I_nu]) = -[I_nu] - sum over middle coproduct terms [I_mu] * S([I_la]).
    Triangular in |la| < |nu|, so it terminates."""
    out = GenericHallElement.zero()
    for nu, c in x.terms.items():
        out = out + _antipode_basis(nu).scale(c)
    return out


def _antipode_basis(nu: Partition) -> GenericHallElement:
    if nu in _ANTIPODE_CACHE:
        return _ANTIPODE_CACHE[nu]
    if nu == ():
        res = GenericHallElement.unit()
    else:
        acc = GenericHallElement.basis(nu)
        for (mu, la), coeff in comult_generic(GenericHallElement.basis(nu)).items():
            if mu == () or la == ():
                continue
            term = mult_generic(
                GenericHallElement({mu: coeff}), _antipode_basis(la)
            )
            acc = acc + term
        res = -acc
    _ANTIPODE_CACHE[nu] = res
    return res


def green_pairing_generic(
    x: GenericHallElement, y: GenericHallElement
) -> RationalFunction:
    """Diagonal pairing ([I_la],[I_mu]) = delta / aut_poly(la)."""
    total = RationalFunction.zero()
    for la, cx in x.terms.items():
        cy = y.terms.get(la)
        if cy is None:
            continue
        total = total + RationalFunction(cx * cy, aut_poly(la))
    return total


# ---------------------------------------------------------------------------
# symmetric functions in the elementary basis
# ---------------------------------------------------------------------------


class SymFun:
    """Symmetric function as a finite sum of e_la monomials, la a partition.

    e_la means the product e_{la_1} e_{la_2} ... ; coefficients are Laurent.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Partition, LaurentPoly]] = None):
        t: Dict[Partition, LaurentPoly] = {}
        if terms:
            for la, c in terms.items():
                la = as_partition(la)
                if isinstance(c, int):
                    c = L.from_int(c)
                if not c.is_zero():
                    acc = t.get(la, L.zero()) + c
                    if acc.is_zero():
                        t.pop(la, None)
                    else:
                        t[la] = acc
        self.terms = t

    @classmethod
    def e(cls, r: int) -> "SymFun":
        if r < 0:
            raise ValueError("e_r needs r >= 0")
        if r == 0:
            return cls({(): L.one()})
        return cls({(r,): L.one()})

    @classmethod
    def zero(cls) -> "SymFun":
        return cls()

    @classmethod
    def one(cls) -> "SymFun":
        return cls({(): L.one()})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "SymFun") -> "SymFun":
        t = dict(self.terms)
        for la, c in other.terms.items():
            t[la] = t.get(la, L.zero()) + c
        return SymFun(t)

    def __neg__(self) -> "SymFun":
        return SymFun({la: -c for la, c in self.terms.items()})

    def __sub__(self, other: "SymFun") -> "SymFun":
        return self + (-other)

    def scale(self, c) -> "SymFun":
        if isinstance(c, int):
            c = L.from_int(c)
        return SymFun({la: c * v for la, v in self.terms.items()})

    def __mul__(self, other: "SymFun") -> "SymFun":
        out: Dict[Partition, LaurentPoly] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                key = tuple(sorted(a + b, reverse=True))
                out[key] = out.get(key, L.zero()) + ca * cb
        return SymFun(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymFun):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "SymFun(0)"
        bits = [f"({c.render()})*e{list(la)}" for la, c in sorted(self.terms.items())]
        return "SymFun(" + " + ".join(bits) + ")"


def to_symfun(x: GenericHallElement, q_eval: Optional[int] = None):
    """Image of a Hall element under the renormalized symmetric-function map
    [I_(1^r)] -> t^(-r(r-1)/2) e_r (an algebra isomorphism).

    With q_eval=None the result is a SymFun over Z[t,t^-1]; with an integer
    q_eval >= 2 the coefficients are evaluated and a dict partition ->
    Fraction is returned.
    """
    out = SymFun.zero()
    for la, c in x.terms.items():
        expr = ibasis_in_elementary(weight(la)).get(la, {}) if la else {(): L.one()}
        for kappa, ck in expr.items():
            cols = conjugate(kappa)
            shift = -sum(r * (r - 1) // 2 for r in cols)
            coeff = (c * ck).shift(shift)
            out = out + SymFun({tuple(sorted(cols, reverse=True)): coeff})
    if q_eval is None:
        return out
    if not isinstance(q_eval, int) or q_eval < 2:
        raise ValueError("q_eval must be an integer >= 2")
    return {la: c.evaluate(q_eval) for la, c in out.terms.items()}


def from_symfun(f: SymFun) -> GenericHallElement:
    """Inverse of to_symfun: e_r -> t^(r(r-1)/2) [I_(1^r)], extended
    multiplicatively over e-monomials."""
    out = GenericHallElement.zero()
    for la, c in f.terms.items():
        term = GenericHallElement.unit()
        shift = 0
        for r in la:
            shift += r * (r - 1) // 2
            term = mult_generic(term, GenericHallElement.basis((1,) * r))
        out = out + term.scale(c.shift(shift))
    return out


_NEWTON_CACHE: Dict[int, SymFun] = {}


def newton_p_in_e(r: int) -> SymFun:
    """Power sum p_r in the elementary basis, by the Newton recursion
    p_r = (-1)^(r-1) r e_r + sum_{i<r} (-1)^(r-1+i) e_{r-i} p_i."""
    if not isinstance(r, int) or r < 1:
        raise ValueError("newton_p_in_e needs r >= 1")
    if r in _NEWTON_CACHE:
        return _NEWTON_CACHE[r]
    sign = 1 if (r - 1) % 2 == 0 else -1
    out = SymFun.e(r).scale(sign * r)
    for i in range(1, r):
        s = 1 if (r - 1 + i) % 2 == 0 else -1
        out = out + (SymFun.e(r - i) * newton_p_in_e(i)).scale(s)
    _NEWTON_CACHE[r] = out
    return out


def hl_pairing(f: SymFun, g: SymFun, q: int) -> Fraction:
    """Inner product pulled back through the symmetric-function map, at a
    numeric residue field size q >= 2 (q = 1 is a pole of the norms)."""
    if not isinstance(q, int) or q == 1:
        raise ValueError("hl_pairing needs an integer q different from 1")
    if q < 2:
        raise ValueError("hl_pairing needs q >= 2")
    val = green_pairing_generic(from_symfun(f), from_symfun(g))
    return val.evaluate(q)

"""Exact sparse multivariate polynomial arithmetic over the rationals.

A monomial is a tuple of (variable index, exponent) pairs, sorted by index
with all exponents positive.  A polynomial maps monomials to nonzero exact
rational coefficients, so equality is structural and arithmetic never
rounds.  Every variable has internal degree two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    from fractions import Fraction as QQ

Monomial = tuple[tuple[int, int], ...]

_VAR_NAMES: list[str] = []
_VAR_INDEX: dict[str, int] = {}

MAX_EXPONENT = 2**31


class NotDivisible(ArithmeticError):
    """Exact division was requested but the remainder is nonzero."""


@dataclass(frozen=True)
class Variable:
    """An interned ring variable; every variable has internal degree 2."""

    name: str
    index: int

    degree = 2

    def __repr__(self) -> str:
        return self.name


def var(name: str) -> Variable:
    """Return the interned variable with the given name."""
    idx = _VAR_INDEX.get(name)
    if idx is None:
        idx = len(_VAR_NAMES)
        _VAR_NAMES.append(name)
        _VAR_INDEX[name] = idx
    return Variable(name, idx)


def var_name(index: int) -> str:
    return _VAR_NAMES[index]


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out = dict(m1)
    for i, e in m2:
        n = out.get(i, 0) + e
        if n >= MAX_EXPONENT:
            raise OverflowError("monomial exponent out of range")
        out[i] = n
    return tuple(sorted(out.items()))


def _mono_total(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_key(m: Monomial):
    # Graded lexicographic with lower variable indices dominant: compare
    # total degree, then exponents variable by variable.  Encoding pairs as
    # (-index, exponent) makes tuple comparison agree with that order.
    return (_mono_total(m), tuple((-i, e) for i, e in m))


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        t = {}
        if terms:
            for m, c in terms.items():
                c = QQ(c)
                if c:
                    t[m] = c
        object.__setattr__(self, "terms", t)
        object.__setattr__(self, "_hash", None)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Polynomial":
        return _ZERO

    @staticmethod
    def const(c) -> "Polynomial":
        return Polynomial({(): QQ(c)})

    @staticmethod
    def variable(v: Variable) -> "Polynomial":
        return Polynomial({((v.index, 1),): QQ(1)})

    # -- basic structure ---------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self):
        """The coefficient of the empty monomial."""
        return self.terms.get((), QQ(0))

    def variables(self) -> set[int]:
        out: set[int] = set()
        for m in self.terms:
            for i, _ in m:
                out.add(i)
        return out

    def internal_degree(self) -> int:
        """Internal degree of a homogeneous polynomial (2 per exponent unit)."""
        degs = {2 * _mono_total(m) for m in self.terms}
        if not degs:
            return 0
        if len(degs) > 1:
            raise ValueError(f"polynomial is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return len({_mono_total(m) for m in self.terms}) <= 1

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if isinstance(other, (int,)) or type(other) is type(QQ(0)):
            return self.terms == Polynomial.const(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(frozenset(self.terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "Polynomial":
        other = _coerce(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            n = out.get(m)
            if n is None:
                out[m] = c
            else:
                n = n + c
                if n:
                    out[m] = n
                else:
                    del out[m]
        return _raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return _raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = QQ(other)
            if not c:
                return _ZERO
            return _raw({m: co * c for m, co in self.terms.items()})
        if not self.terms or not other.terms:
            return _ZERO
        if len(self.terms) > len(other.terms):
            self, other = other, self
        out: dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                n = out.get(m)
                if n is None:
                    out[m] = c1 * c2
                else:
                    n = n + c1 * c2
                    if n:
                        out[m] = n
                    else:
                        del out[m]
        return _raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base_needed = k >> 1
            if base_needed:
                base = base * base
            k = base_needed
        return result

    # -- calculus and rewriting --------------------------------------------

    def deriv(self, v: Variable) -> "Polynomial":
        """Partial derivative with respect to v."""
        i = v.index
        out: dict[Monomial, object] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(i)
            if not e:
                continue
            if e == 1:
                del d[i]
            else:
                d[i] = e - 1
            mm = tuple(sorted(d.items()))
            n = out.get(mm)
            cc = c * e
            out[mm] = cc if n is None else n + cc
        return Polynomial(out)

    def substitute(self, assignment: Mapping[Variable, "Polynomial"]) -> "Polynomial":
        """Substitute polynomials for variables (simultaneously)."""
        amap = {v.index: p for v, p in assignment.items()}
        if not amap or not (self.variables() & set(amap)):
            return self
        total = _ZERO
        for m, c in self.terms.items():
            term = Polynomial.const(c)
            for i, e in m:
                rep = amap.get(i)
                if rep is None:
                    term = term * Polynomial({((i, e),): QQ(1)})
                else:
                    term = term * rep**e
            total = total + term
        return total

    def coeffs_in(self, v: Variable) -> dict[int, "Polynomial"]:
        """Split into coefficients of powers of v: f = sum_e coeff[e] * v^e."""
        i = v.index
        out: dict[int, dict[Monomial, object]] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.pop(i, 0)
            mm = tuple(sorted(d.items()))
            bucket = out.setdefault(e, {})
            n = bucket.get(mm)
            bucket[mm] = c if n is None else n + c
        return {e: _raw({m: c for m, c in b.items() if c}) for e, b in out.items()}

    def eval_zero(self):
        """Evaluate at all variables = 0 (returns the constant coefficient)."""
        return self.terms.get((), QQ(0))

    # -- display -----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Monomial, object]]:
        return sorted(self.terms.items(), key=lambda kv: _mono_key(kv[0]))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [
                var_name(i) if e == 1 else f"{var_name(i)}^{e}" for i, e in m
            ]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(str(c) + "*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")


def _raw(terms: dict) -> Polynomial:
    p = Polynomial.__new__(Polynomial)
    object.__setattr__(p, "terms", terms)
    object.__setattr__(p, "_hash", None)
    return p


def _coerce(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    return Polynomial.const(x)


_ZERO = Polynomial({})


def divide_exact(f: Polynomial, g: Polynomial) -> Polynomial:
    """Return q with f = q*g, raising NotDivisible if no such q exists.

    Long division by the single divisor g under the graded lexicographic
    order; for an exact multiple the leading term of the running remainder
    is always divisible by the leading term of g.
    """
    if not g.terms:
        raise ZeroDivisionError("division by the zero polynomial")
    g_items = g.sorted_terms()
    g_lead_m, g_lead_c = g_items[-1]
    g_lead = dict(g_lead_m)
    quotient: dict[Monomial, object] = {}
    r = f
    while r.terms:
        r_lead_m, r_lead_c = r.sorted_terms()[-1]
        d = dict(r_lead_m)
        for i, e in g_lead.items():
            if d.get(i, 0) < e:
                raise NotDivisible(f"({f}) is not divisible by ({g})")
            d[i] -= e
        qm = tuple(sorted((i, e) for i, e in d.items() if e))
        qc = r_lead_c / g_lead_c
        quotient[qm] = quotient.get(qm, QQ(0)) + qc
        r = r - Polynomial({qm: qc}) * g
    return Polynomial(quotient)


def div_without_remainder(f: Polynomial, x: Variable, a: int) -> Polynomial:
    """Division by x^a without remainder.

    Writes f in the basis of x-monomials of exponent below a over powers of
    x^a and formally differentiates with respect to x^a: the monomial
    c * x^(K*a + r) * m (with r < a) contributes c*K * x^((K-1)*a + r) * m.
    """
    if a < 1:
        raise ValueError("a must be positive")
    i = x.index
    out: dict[Monomial, object] = {}
    for m, c in f.terms.items():
        d = dict(m)
        e = d.get(i, 0)
        k, r = divmod(e, a)
        if k == 0:
            continue
        ne = (k - 1) * a + r
        if ne:
            d[i] = ne
        else:
            del d[i]
        mm = tuple(sorted(d.items()))
        cc = c * k
        n = out.get(mm)
        out[mm] = cc if n is None else n + cc
    return Polynomial(out)


def geometric_quotient(y: Variable, x: Variable, n: int) -> Polynomial:
    """(y^(n+1) - x^(n+1)) / (y - x) = sum_{k=0}^{n} y^k x^(n-k)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    terms: dict[Monomial, object] = {}
    for k in range(n + 1):
        pairs = []
        if k:
            pairs.append((y.index, k))
        if n - k:
            pairs.append((x.index, n - k))
        terms[tuple(sorted(pairs))] = QQ(1)
    return Polynomial(terms)


def _power_sum_in_elementaries(n: int) -> Polynomial:
    """x1^n + x2^n as a polynomial in e1 = x1 + x2, e2 = x1*x2."""
    e1 = Polynomial.variable(var("_e1"))
    e2 = Polynomial.variable(var("_e2"))
    p_prev, p_cur = Polynomial.const(2), e1
    for _ in range(n - 1):
        p_prev, p_cur = p_cur, e1 * p_cur - e2 * p_prev
    return p_cur if n >= 1 else p_prev


def _difference_quotient(p: Polynomial, v: Variable, vnew: Variable) -> Polynomial:
    """(p[v := vnew] - p) / (vnew - v), exact."""
    shifted = p.substitute({v: Polynomial.variable(vnew)})
    return divide_exact(shifted - p, Polynomial.variable(vnew) - Polynomial.variable(v))


def symmetric_decompose(n: int) -> tuple[Polynomial, Polynomial]:
    """Polynomials u1, u2 in x1,x2,y1,y2 with

        u1*(y1+y2-x1-x2) + u2*(y1*y2-x1*x2)
            = y1^(n+1) + y2^(n+1) - x1^(n+1) - x2^(n+1)

    and both u_i invariant under swapping the x's with the y's.  Built from
    finite-difference quotients of the power sum in the elementary symmetric
    slots, averaged over the two evaluation orders to enforce the symmetry.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    e1v, e2v = var("_e1"), var("_e2")
    f1v, f2v = var("_f1"), var("_f2")
    p = _power_sum_in_elementaries(n + 1)
    f1, f2 = Polynomial.variable(f1v), Polynomial.variable(f2v)
    # Order 1: step e1 -> f1 first, then e2 -> f2.
    q1_first = _difference_quotient(p, e1v, f1v)
    q2_second = _difference_quotient(p.substitute({e1v: f1}), e2v, f2v)
    # Order 2: step e2 -> f2 first, then e1 -> f1.
    q2_first = _difference_quotient(p, e2v, f2v)
    q1_second = _difference_quotient(p.substitute({e2v: f2}), e1v, f1v)
    half = QQ(1) / QQ(2)
    u1_sym = (q1_first + q1_second) * half
    u2_sym = (q2_first + q2_second) * half
    x1, x2 = Polynomial.variable(var("x1")), Polynomial.variable(var("x2"))
    y1, y2 = Polynomial.variable(var("y1")), Polynomial.variable(var("y2"))
    back = {
        e1v: x1 + x2,
        e2v: x1 * x2,
        f1v: y1 + y2,
        f2v: y1 * y2,
    }
    return u1_sym.substitute(back), u2_sym.substitute(back)


def poly_gcd_content(polys: Iterable[Polynomial]):
    """Common denominator scaling helper: returns lcm of denominators."""
    lcm = 1
    for p in polys:
        for c in p.terms.values():
            d = c.denominator
            if d != 1:
                g = _gcd(lcm, d)
                lcm = lcm // g * d
    return lcm


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a

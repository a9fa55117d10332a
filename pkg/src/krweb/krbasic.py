"""Stabilised crossing data for the sl(N) theory.

Everything lives over Q[x1, x2, y1, y2] with x's incoming and y's
outgoing, in the exterior basis {1, theta1, theta2, theta1 theta2}.  The
smooth vertex factorisation couples x_i with y_i through the pairs
(w_i, y_i - x_i); the singular vertex uses the symmetric pairs.  The two
morphisms between them are given by explicit matrices whose only derived
ingredient is the polynomial a2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .gradedla import PolyMatrix
from .mf import GradedMF, make_koszul, shift
from .poly import (
    Polynomial,
    QQ,
    Variable,
    divide_exact,
    geometric_quotient,
    symmetric_decompose,
    var,
)

X1, X2, Y1, Y2 = var("x1"), var("x2"), var("y1"), var("y2")
_CROSSING_VARS = (X1, X2, Y1, Y2)
HALF = QQ(1) / QQ(2)


def _p(v: Variable) -> Polynomial:
    return Polynomial.variable(v)


@dataclass
class CrossingData:
    """All local data attached to a four-valent vertex at a given N."""

    n: int
    w1: Polynomial
    w2: Polynomial
    u1: Polynomial
    u2: Polynomial
    t1: Polynomial
    t2: Polynomial
    s1: Polynomial
    s2: Polynomial
    a2: Polynomial
    gamma: Polynomial
    xcirc: GradedMF
    xbul: GradedMF
    chi0: PolyMatrix  # xcirc -> xbul, internal degree 2
    chi1: PolyMatrix  # xbul -> xcirc, internal degree 0

    @property
    def variables(self) -> tuple[Variable, Variable, Variable, Variable]:
        return _CROSSING_VARS


def omega_p(p: int, f: Polynomial) -> Polynomial:
    """The inverse of p + sum_i (y_i - x_i) d/dy_i on polynomials.

    Rewriting f in the coordinates (x1, x2, t1, t2) with t_i = y_i - x_i
    diagonalises the operator: a monomial with total t-degree d is scaled
    by p + d.
    """
    if p < 1:
        raise ValueError("p must be positive")
    tv1, tv2 = var("_t1"), var("_t2")
    in_t = f.substitute({Y1: _p(X1) + _p(tv1), Y2: _p(X2) + _p(tv2)})
    scaled: dict = {}
    for mono, coeff in in_t.terms.items():
        d = dict(mono)
        tdeg = d.get(tv1.index, 0) + d.get(tv2.index, 0)
        scaled[mono] = coeff / QQ(p + tdeg)
    return Polynomial(scaled).substitute(
        {tv1: _p(Y1) - _p(X1), tv2: _p(Y2) - _p(X2)}
    )


def make_identity_mf(x: Variable, y: Variable, n: int) -> GradedMF:
    """The invisible defect: {(y^(n+1) - x^(n+1))/(y - x), y - x}."""
    if x == y:
        raise ValueError("identity defect needs distinct variables")
    return make_koszul([(geometric_quotient(y, x, n), _p(y) - _p(x))])


@lru_cache(maxsize=None)
def make_crossing_data(n: int) -> CrossingData:
    if n < 1:
        raise ValueError("n must be at least 1")
    x1, x2, y1, y2 = (_p(v) for v in _CROSSING_VARS)
    t1, t2 = y1 - x1, y2 - x2
    s1, s2 = y1 + y2 - x1 - x2, y1 * y2 - x1 * x2
    w1 = geometric_quotient(Y1, X1, n)
    w2 = geometric_quotient(Y2, X2, n)
    u1, u2 = symmetric_decompose(n)
    a2 = u2 * HALF + divide_exact(u1 + y1 * u2 - w2, x1 - y1)
    gamma = (
        u1.deriv(Y1)
        - u1.deriv(Y2)
        - u2.deriv(Y2) * ((x2 + y2) * HALF)
        + u2.deriv(Y1) * ((x1 + y1) * HALF)
    )
    xcirc = make_koszul([(w1, t1), (w2, t2)])
    xbul = make_koszul([(u1, s1), (u2, s2)])
    half_xy1 = (x1 + y1) * HALF
    half_xy2 = (x2 + y2) * HALF
    chi1 = PolyMatrix(
        4,
        4,
        {
            (0, 0): Polynomial.const(1),
            (3, 0): -a2,
            (1, 1): Polynomial.const(1),
            (2, 1): Polynomial.const(1),
            (1, 2): half_xy2,
            (2, 2): half_xy1,
            (3, 3): half_xy1 - half_xy2,
        },
    )
    chi0 = PolyMatrix(
        4,
        4,
        {
            (0, 0): half_xy1 - half_xy2,
            (3, 0): a2,
            (1, 1): half_xy1,
            (2, 1): Polynomial.const(-1),
            (1, 2): -half_xy2,
            (2, 2): Polynomial.const(1),
            (3, 3): Polynomial.const(1),
        },
    )
    return CrossingData(
        n=n,
        w1=w1,
        w2=w2,
        u1=u1,
        u2=u2,
        t1=t1,
        t2=t2,
        s1=s1,
        s2=s2,
        a2=a2,
        gamma=gamma,
        xcirc=xcirc,
        xbul=xbul,
        chi0=chi0,
        chi1=chi1,
    )


@dataclass
class CrossingComplex:
    """The two-term complex a crossing contributes to the link complex.

    Cohomological positions and internal shifts follow the convention that
    the smooth term sits in degree zero; the shifts are recorded both in
    absolute terms and relative to the state web decoration (smooth
    vertices carry the plain smooth factorisation, singular vertices carry
    the singular factorisation shifted down by one).
    """

    sign: str  # "over" | "under"
    terms: list[tuple[int, GradedMF]]  # (cohomological degree, shifted factorisation)
    matrix: PolyMatrix  # the connecting chi map
    smooth_position: int
    singular_position: int
    smooth_shift: int  # applied on top of the state web smooth decoration
    singular_shift: int  # applied on top of the state web singular decoration


def make_crossing_complex(sign: str, n: int) -> CrossingComplex:
    data = make_crossing_data(n)
    if sign == "over":
        terms = [(0, shift(data.xcirc, 1 - n)), (1, shift(data.xbul, -n - 1))]
        return CrossingComplex(
            sign,
            terms,
            data.chi0,
            smooth_position=0,
            singular_position=1,
            smooth_shift=1 - n,
            singular_shift=-n,
        )
    if sign == "under":
        terms = [(-1, shift(data.xbul, n - 1)), (0, shift(data.xcirc, n - 1))]
        return CrossingComplex(
            sign,
            terms,
            data.chi1,
            smooth_position=0,
            singular_position=-1,
            smooth_shift=n - 1,
            singular_shift=n,
        )
    raise ValueError(f"unknown crossing sign {sign!r}")

import random

import pytest

from krweb.gradedla import check_entry_degrees, scalar_matrix
from krweb.krbasic import (
    HALF,
    X1,
    X2,
    Y1,
    Y2,
    make_crossing_complex,
    make_crossing_data,
    make_identity_mf,
    omega_p,
)
from krweb.mf import is_chain_map
from krweb.poly import Polynomial, QQ, var

x1, x2, y1, y2 = (Polynomial.variable(v) for v in (X1, X2, Y1, Y2))


def potential(n):
    return y1 ** (n + 1) + y2 ** (n + 1) - x1 ** (n + 1) - x2 ** (n + 1)


@pytest.mark.parametrize("n", range(1, 7))
def test_crossing_factorisations_square_to_potential(n):
    data = make_crossing_data(n)
    w = potential(n)
    assert data.w1 * data.t1 + data.w2 * data.t2 == w
    assert data.u1 * data.s1 + data.u2 * data.s2 == w
    data.xcirc.check()
    data.xbul.check()
    assert data.xcirc.potential == w
    assert data.xbul.potential == w


@pytest.mark.parametrize("n", range(1, 7))
def test_identity_defect(n):
    mf = make_identity_mf(var("ax"), var("ay"), n)
    mf.check()
    ax, ay = Polynomial.variable(var("ax")), Polynomial.variable(var("ay"))
    assert mf.potential == ay ** (n + 1) - ax ** (n + 1)
    if n == 1:
        assert mf.diff[(1, 0)] == ay + ax
        assert mf.diff[(0, 1)] == ay - ax


@pytest.mark.parametrize("n", range(1, 7))
def test_chi_maps_are_strict_chain_maps(n):
    data = make_crossing_data(n)
    assert is_chain_map(data.chi1, data.xbul, data.xcirc)
    assert is_chain_map(data.chi0, data.xcirc, data.xbul)
    circ_degs = [q for _, q in data.xcirc.gens]
    bul_degs = [q for _, q in data.xbul.gens]
    check_entry_degrees(data.chi1, circ_degs, bul_degs, 0)
    check_entry_degrees(data.chi0, bul_degs, circ_degs, 2)


def test_a2_vanishes_at_n1():
    assert make_crossing_data(1).a2 == Polynomial.zero()


@pytest.mark.parametrize("n", range(1, 7))
def test_omega2_gamma_is_minus_a2(n):
    data = make_crossing_data(n)
    assert omega_p(2, data.gamma) == -data.a2


def test_omega_p_examples():
    # purely external input is scaled by 1/p
    f = x1**3 * x2 + 2 * x1
    assert omega_p(3, f) == f * (QQ(1) / QQ(3))
    # the paper's closed form for a single outgoing variable
    for p in (1, 2, 3):
        expected = x1 * (QQ(1) / QQ(p * (p + 1))) + y1 * (QQ(1) / QQ(p + 1))
        assert omega_p(p, y1) == expected
    # monomials in x and t are eigenvectors
    t1, t2 = y1 - x1, y2 - x2
    mono = x1**2 * t1 * t2**2
    assert omega_p(2, mono) == mono * (QQ(1) / QQ(5))


@pytest.mark.parametrize("p", range(1, 6))
def test_omega_p_satisfies_pde(p):
    rng = random.Random(20240 + p)
    vars4 = (x1, x2, y1, y2)
    f = Polynomial.zero()
    for _ in range(6):
        term = Polynomial.const(rng.randint(-5, 5))
        for v in vars4:
            term = term * v ** rng.randint(0, 2)
        f = f + term
    z = omega_p(p, f)
    lhs = z * p + z.deriv(Y1) * (y1 - x1) + z.deriv(Y2) * (y2 - x2)
    assert lhs == f


@pytest.mark.parametrize("n", range(1, 5))
def test_stabilisation_squares(n):
    data = make_crossing_data(n)
    to_diag = {Y1: x1, Y2: x2}
    # chi1 covers the canonical quotient map: its top row reduces to
    # (1, 0, 0, 0) modulo (t1, t2)
    for j in range(4):
        expect = Polynomial.const(1) if j == 0 else Polynomial.zero()
        assert data.chi1[(0, j)].substitute(to_diag) == expect.substitute(to_diag)
    # chi0 covers multiplication by (x1 + y1 - x2 - y2)/2 modulo (s1, s2)
    for j in range(4):
        got = _reduce_mod_s(data.chi0[(0, j)])
        expect = (
            _reduce_mod_s((x1 + y1 - x2 - y2) * HALF)
            if j == 0
            else Polynomial.zero()
        )
        assert got == expect


def _reduce_mod_s(f: Polynomial) -> Polynomial:
    """Canonical form modulo (y1 + y2 - x1 - x2, y1 y2 - x1 x2)."""
    f = f.substitute({Y2: x1 + x2 - y1})
    while True:
        split = f.coeffs_in(Y1)
        high = {e: c for e, c in split.items() if e >= 2}
        if not high:
            return f
        f = Polynomial.zero()
        for e, c in split.items():
            if e < 2:
                f = f + c * y1**e
            else:
                f = f + c * y1 ** (e - 2) * ((x1 + x2) * y1 - x1 * x2)


def test_crossing_complex_shifts():
    over = make_crossing_complex("over", 2)
    assert [(pos, mf.gens[0][1]) for pos, mf in over.terms] == [(0, -1), (1, -3)]
    under = make_crossing_complex("under", 2)
    assert [(pos, mf.gens[0][1]) for pos, mf in under.terms] == [(-1, 1), (0, 1)]


@pytest.mark.parametrize("n", range(1, 5))
def test_crossing_complex_decategorifies_to_skein_coefficients(n):
    # over: q^(1-N) smooth - q^(-N) singular; under: q^(N-1) - q^N singular
    over = make_crossing_complex("over", n)
    assert (over.smooth_position, over.smooth_shift) == (0, 1 - n)
    assert (over.singular_position, over.singular_shift) == (1, -n)
    under = make_crossing_complex("under", n)
    assert (under.smooth_position, under.smooth_shift) == (0, n - 1)
    assert (under.singular_position, under.singular_shift) == (-1, n)


@pytest.mark.parametrize("n", range(1, 5))
def test_chi_compositions_are_multiplication(n):
    # chi1 . chi0 acts on the smooth factorisation as multiplication by a
    # degree two symmetric combination; verify it is central (a chain map
    # equal to a scalar polynomial times the identity plus null pieces is
    # at least a chain map of degree two)
    data = make_crossing_data(n)
    comp = data.chi1 * data.chi0
    assert is_chain_map(comp, data.xcirc, data.xcirc)
    comp2 = data.chi0 * data.chi1
    assert is_chain_map(comp2, data.xbul, data.xbul)

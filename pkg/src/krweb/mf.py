"""Graded matrix factorisations.

A GradedMF is a free (Z x Z2)-graded module of finite rank with an odd
differential squaring to W times the identity.  Cyclic Koszul
factorisations are built on the exterior-algebra basis indexed by subsets
of pair indices, ordered by the binary counter (so for two pairs the basis
is 1, theta1, theta2, theta1*theta2); all signs below are derived from
that fixed order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .gradedla import Bidegree, PolyMatrix, check_entry_degrees, scalar_matrix
from .poly import Polynomial, QQ, Variable


class DegreeMismatch(ValueError):
    """Koszul pair degrees are inconsistent with a common potential degree."""


@dataclass
class GradedMF:
    """A finite rank graded matrix factorisation of a potential W."""

    potential: Polynomial
    c: int  # half the internal degree of W
    gens: list[Bidegree]
    diff: PolyMatrix

    @property
    def rank(self) -> int:
        return len(self.gens)

    def check(self) -> None:
        """Assert d^2 = W*id, odd parity and homogeneous entries."""
        n = self.rank
        sq = self.diff * self.diff
        want = scalar_matrix(n, self.potential)
        if not (sq - want).is_zero():
            raise ValueError("differential does not square to the potential")
        for (i, j), p in self.diff.entries.items():
            if (self.gens[i][0] - self.gens[j][0]) % 2 != 1:
                raise ValueError(f"even differential entry at ({i},{j})")
        check_entry_degrees(
            self.diff,
            [q for _, q in self.gens],
            [q for _, q in self.gens],
            self.c,
        )

    def substitute(self, assignment) -> "GradedMF":
        return GradedMF(
            self.potential.substitute(assignment),
            self.c,
            list(self.gens),
            self.diff.substitute(assignment),
        )


def is_chain_map(m: PolyMatrix, source: GradedMF, target: GradedMF, z2: int = 0) -> bool:
    """d_Y m = (-1)^z2 m d_X, exactly."""
    lhs = target.diff * m
    rhs = m * source.diff
    if z2 % 2:
        rhs = -rhs
    return (lhs - rhs).is_zero()


# ---------------------------------------------------------------------------
# Cyclic Koszul factorisations
# ---------------------------------------------------------------------------


def _subsets(n: int) -> list[tuple[int, ...]]:
    out = []
    for code in range(1 << n):
        out.append(tuple(i for i in range(n) if code >> i & 1))
    return out


def _wedge_sign(i: int, subset: tuple[int, ...]) -> int:
    return -1 if sum(1 for j in subset if j < i) % 2 else 1


def make_koszul(
    pairs: Sequence[tuple[Polynomial, Polynomial]],
    c: int | None = None,
    a_degrees: Sequence[int] | None = None,
) -> GradedMF:
    """The cyclic Koszul factorisation of sum a_i * b_i.

    The basis element theta_S for a subset S has Z2 degree |S| and internal
    degree sum over i in S of (c - deg a_i).  The differential is the
    contraction against the b's plus the wedge with the a's.  Degenerate
    zero entries are allowed when c (and, for a zero a_i, its degree) can
    still be inferred or is supplied.
    """
    n = len(pairs)
    if c is None:
        for a, b in pairs:
            if a and b:
                c2 = a.internal_degree() + b.internal_degree()
                if c2 % 2:
                    raise DegreeMismatch("pair degrees do not sum to an even number")
                c = c2 // 2
                break
        if c is None:
            raise DegreeMismatch("cannot infer the potential degree; pass c explicitly")
    degs = []
    for k, (a, b) in enumerate(pairs):
        if a_degrees is not None:
            degs.append(a_degrees[k])
        elif a:
            degs.append(a.internal_degree())
        elif b:
            degs.append(2 * c - b.internal_degree())
        else:
            raise DegreeMismatch(f"pair {k} is zero; pass a_degrees")
    for k, (a, b) in enumerate(pairs):
        if a and a.internal_degree() != degs[k]:
            raise DegreeMismatch(f"pair {k}: deg a inconsistent")
        if b and b.internal_degree() != 2 * c - degs[k]:
            raise DegreeMismatch(f"pair {k}: deg a + deg b != 2c")
    subsets = _subsets(n)
    index = {s: i for i, s in enumerate(subsets)}
    gens: list[Bidegree] = [
        (len(s) % 2, sum(c - degs[i] for i in s)) for s in subsets
    ]
    entries: dict[tuple[int, int], Polynomial] = {}
    for s in subsets:
        col = index[s]
        for i in range(n):
            a, b = pairs[i]
            if i in s:
                if b:
                    t = tuple(j for j in s if j != i)
                    _acc(entries, index[t], col, b * _wedge_sign(i, t))
            else:
                if a:
                    t = tuple(sorted(s + (i,)))
                    _acc(entries, index[t], col, a * _wedge_sign(i, s))
    potential = Polynomial.zero()
    for a, b in pairs:
        potential = potential + a * b
    return GradedMF(potential, c, gens, PolyMatrix(len(subsets), len(subsets), entries))


def _acc(entries: dict, i: int, j: int, p: Polynomial) -> None:
    cur = entries.get((i, j))
    s = p if cur is None else cur + p
    if s:
        entries[(i, j)] = s
    else:
        entries.pop((i, j), None)


# ---------------------------------------------------------------------------
# Tensor products with Koszul signs
# ---------------------------------------------------------------------------


def tensor_index(x: GradedMF, y: GradedMF):
    """Generator order of x (tensor) y: index (i, j) -> i * rank(y) + j."""
    return lambda i, j: i * y.rank + j


def tensor(x: GradedMF, y: GradedMF) -> GradedMF:
    """Tensor product factorisation of W_x + W_y.

    d = d_x (tensor) 1 + 1 (tensor) d_y, where the second summand carries
    the sign (-1)^{|a|} on Z2-odd generators of the first factor.
    """
    if x.c != y.c:
        raise DegreeMismatch("tensor factors have different potential degrees")
    pos = tensor_index(x, y)
    gens = [
        ((zx + zy) % 2, qx + qy)
        for zx, qx in x.gens
        for zy, qy in y.gens
    ]
    entries: dict[tuple[int, int], Polynomial] = {}
    for (i2, i1), p in x.diff.entries.items():
        for j in range(y.rank):
            entries[(pos(i2, j), pos(i1, j))] = p
    for (j2, j1), p in y.diff.entries.items():
        for i in range(x.rank):
            q = -p if x.gens[i][0] % 2 else p
            _acc(entries, pos(i, j2), pos(i, j1), q)
    return GradedMF(
        x.potential + y.potential,
        x.c,
        gens,
        PolyMatrix(x.rank * y.rank, x.rank * y.rank, entries),
    )


def op_on_left_factor(m: PolyMatrix, x: GradedMF, y: GradedMF) -> PolyMatrix:
    """Extend an operator on x to x (tensor) y as m (tensor) 1 (no signs)."""
    pos = tensor_index(x, y)
    entries = {}
    for (i2, i1), p in m.entries.items():
        for j in range(y.rank):
            entries[(pos(i2, j), pos(i1, j))] = p
    return PolyMatrix(x.rank * y.rank, x.rank * y.rank, entries)


def op_on_right_factor(m: PolyMatrix, x: GradedMF, y: GradedMF, z2: int) -> PolyMatrix:
    """Extend an operator on y to x (tensor) y as 1 (tensor) m.

    An operator of odd Z2 degree picks up (-1)^{|a|} on odd generators of x.
    """
    pos = tensor_index(x, y)
    entries = {}
    for (j2, j1), p in m.entries.items():
        for i in range(x.rank):
            q = -p if (z2 % 2 and x.gens[i][0] % 2) else p
            entries[(pos(i, j2), pos(i, j1))] = q
    return PolyMatrix(x.rank * y.rank, x.rank * y.rank, entries)


def tensor_morphism(
    mx: PolyMatrix, my: PolyMatrix, x: GradedMF, y: GradedMF, xt: GradedMF, yt: GradedMF, my_z2: int = 0
) -> PolyMatrix:
    """(mx tensor my) with the Koszul sign (-1)^{|my| |a|} on x-generators."""
    pos_s = tensor_index(x, y)
    pos_t = tensor_index(xt, yt)
    entries = {}
    for (i2, i1), p in mx.entries.items():
        for (j2, j1), q in my.entries.items():
            sign = -1 if (my_z2 % 2 and x.gens[i1][0] % 2) else 1
            _acc(entries, pos_t(i2, j2), pos_s(i1, j1), p * q * sign)
    return PolyMatrix(xt.rank * yt.rank, x.rank * y.rank, entries)


# ---------------------------------------------------------------------------
# Shifts, suspension, duals
# ---------------------------------------------------------------------------


def shift(x: GradedMF, m: int) -> GradedMF:
    """Internal grading shift {m}: generator degrees move up by m."""
    return GradedMF(x.potential, x.c, [(z, q + m) for z, q in x.gens], x.diff)


def suspend(x: GradedMF, n: int = 1) -> GradedMF:
    """Suspension <n>: flip Z2 degrees and negate the differential n times."""
    if n % 2 == 0:
        return x
    return GradedMF(x.potential, x.c, [((z + 1) % 2, q) for z, q in x.gens], -x.diff)


def dual(x: GradedMF) -> GradedMF:
    """Dual factorisation of -W: the pair (-(d^1)*, (d^0)*)."""
    gens = [(z, -q) for z, q in x.gens]
    entries = {}
    for (i, j), p in x.diff.entries.items():
        sign = -1 if x.gens[i][0] % 2 == 0 else 1
        entries[(j, i)] = p * sign
    return GradedMF(-x.potential, x.c, gens, PolyMatrix(x.rank, x.rank, entries))


def transform(x: GradedMF, kind: str, m: int = 1) -> GradedMF:
    if kind == "shift":
        return shift(x, m)
    if kind == "suspension":
        return suspend(x, m)
    if kind == "dual":
        return dual(x)
    raise ValueError(f"unknown transform {kind!r}")


# ---------------------------------------------------------------------------
# The standard Koszul isomorphisms
# ---------------------------------------------------------------------------


def _verify_iso(u: PolyMatrix, src: GradedMF, tgt: GradedMF) -> None:
    if not is_chain_map(u, src, tgt):
        raise AssertionError("isomorphism does not intertwine the differentials")


def dual_koszul_iso(pairs, **kw) -> tuple[GradedMF, GradedMF, PolyMatrix]:
    """{a,b}^dual  ->  {-b, a}: theta_S* goes to (-1)^(|S| choose 2) theta_S."""
    base = make_koszul(pairs, **kw)
    src = dual(base)
    tkw = dual_degree_kw(pairs, kw)
    tkw.setdefault("c", base.c)
    tgt = make_koszul([(-b, a) for a, b in pairs], **tkw)
    n = len(pairs)
    entries = {}
    for i, s in enumerate(_subsets(n)):
        k = len(s)
        sign = -1 if (k * (k - 1) // 2) % 2 else 1
        entries[(i, i)] = Polynomial.const(sign)
    u = PolyMatrix(1 << n, 1 << n, entries)
    _verify_iso(u, src, tgt)
    return src, tgt, u


def negate_theta_iso(pairs, **kw) -> tuple[GradedMF, GradedMF, PolyMatrix]:
    """{a,b} -> {-a,-b} sending each theta_i to -theta_i."""
    src = make_koszul(pairs, **kw)
    tgt = make_koszul([(-a, -b) for a, b in pairs], **kw)
    n = len(pairs)
    entries = {}
    for i, s in enumerate(_subsets(n)):
        entries[(i, i)] = Polynomial.const(-1 if len(s) % 2 else 1)
    u = PolyMatrix(1 << n, 1 << n, entries)
    _verify_iso(u, src, tgt)
    return src, tgt, u


def swap_koszul_iso(pairs, **kw) -> tuple[GradedMF, GradedMF, PolyMatrix]:
    """{-b, a} -> {-a, b}<n>{sum deg a_i - n c}.

    Built one pair at a time from the rank two case (which is the identity
    on 1 <-> theta) and the sign rules for moving suspensions out of tensor
    factors.
    """
    n = len(pairs)
    src = make_koszul([(-b, a) for a, b in pairs], **dual_degree_kw(pairs, kw))
    c = src.c
    degs = [a.internal_degree() if a else None for a, _ in pairs]
    if any(d is None for d in degs):
        supplied = kw.get("a_degrees")
        if supplied is None:
            raise DegreeMismatch("zero a_i requires explicit a_degrees")
        degs = list(supplied)
    total_shift = sum(degs) - n * c
    tgt = shift(suspend(make_koszul([(-a, b) for a, b in pairs], c=c, a_degrees=degs), n), total_shift)
    subsets = _subsets(n)
    index = {s: i for i, s in enumerate(subsets)}
    entries = {}
    for s in subsets:
        comp = tuple(i for i in range(n) if i not in s)
        sign = _swap_sign(s, n)
        entries[(index[comp], index[s])] = Polynomial.const(sign)
    u = PolyMatrix(1 << n, 1 << n, entries)
    _verify_iso(u, src, tgt)
    return src, tgt, u


def dual_degree_kw(pairs, kw):
    """Degree hints for {-b, a} derived from hints for {a, b}."""
    out = dict(kw)
    degs = kw.get("a_degrees")
    if degs is not None:
        c = kw.get("c")
        if c is None:
            for a, b in pairs:
                if a and b:
                    c = (a.internal_degree() + b.internal_degree()) // 2
                    break
        out["a_degrees"] = [2 * c - d for d in degs]
    return out


def _swap_sign(s: tuple[int, ...], n: int) -> int:
    """Sign of the subset-complement map in the iterated pair swap.

    Exchanging 1 <-> theta in factor k and shuffling the suspension past the
    earlier factors multiplies theta_S (for factors below k already swapped)
    by (-1) for each element the intermediate subset contains.
    """
    current = set(s)
    sign = 1
    for k in range(n):
        # pull the suspension created at factor k past factors 0..k-1
        lower = sum(1 for j in current if j < k)
        if lower % 2:
            sign = -sign
        # factor k swaps membership of k
        if k in current:
            current.discard(k)
        else:
            current.add(k)
    return sign


def folding_sign_iso(x: GradedMF, z_degrees: Sequence[int]) -> PolyMatrix:
    """Diagonal signs (-1)^(i(i+1)/2) per cohomological Z-degree.

    Intertwines d_+ + d_- with the differential that has the raising part
    negated and the even-to-odd component negated on top.
    """
    entries = {}
    for i, zi in enumerate(z_degrees):
        sign = -1 if (zi * (zi + 1) // 2) % 2 else 1
        entries[(i, i)] = Polynomial.const(sign)
    return PolyMatrix(x.rank, x.rank, entries)


# ---------------------------------------------------------------------------
# Gaussian reduction to a minimal model
# ---------------------------------------------------------------------------


def reduce_mf(x: GradedMF) -> tuple[GradedMF, PolyMatrix, PolyMatrix]:
    """Cancel invertible scalar entries of the differential.

    Returns (minimal model, f, g) where f g = 1 and f, g are strict chain
    maps forming a homotopy equivalence with the input.  On the minimal
    model every differential entry has positive internal degree.
    """
    cur = x
    n = x.rank
    f_total = PolyMatrix.identity(n)
    g_total = PolyMatrix.identity(n)
    while True:
        pivot = None
        for (i, j), p in cur.diff.entries.items():
            if p.is_constant():
                if pivot is None or (i, j) < pivot:
                    pivot = (i, j)
        if pivot is None:
            break
        i, j = pivot
        u = cur.diff.entries[(i, j)].constant_value()
        uinv = QQ(1) / u
        keep = [k for k in range(cur.rank) if k not in (i, j)]
        kpos = {k: a for a, k in enumerate(keep)}
        d = cur.diff
        col_j: dict[int, Polynomial] = {}
        row_i: dict[int, Polynomial] = {}
        for (a, b), p in d.entries.items():
            if b == j and a != i:
                col_j[a] = p
            if a == i and b != j:
                row_i[b] = p
        new_entries: dict[tuple[int, int], Polynomial] = {}
        for (a, b), p in d.entries.items():
            if a in kpos and b in kpos:
                new_entries[(kpos[a], kpos[b])] = p
        for a, pa in col_j.items():
            if a not in kpos:
                continue
            for b, pb in row_i.items():
                if b not in kpos:
                    continue
                _acc(new_entries, kpos[a], kpos[b], -(pa * pb * uinv))
        f_step = PolyMatrix(
            len(keep),
            cur.rank,
            {
                **{(a, k): Polynomial.const(1) for k, a in ((kk, kpos[kk]) for kk in keep)},
                **{(kpos[a], i): -(p * uinv) for a, p in col_j.items() if a in kpos},
            },
        )
        g_step = PolyMatrix(
            cur.rank,
            len(keep),
            {
                **{(k, a): Polynomial.const(1) for k, a in ((kk, kpos[kk]) for kk in keep)},
                **{(j, kpos[b]): -(p * uinv) for b, p in row_i.items() if b in kpos},
            },
        )
        cur = GradedMF(
            cur.potential,
            cur.c,
            [cur.gens[k] for k in keep],
            PolyMatrix(len(keep), len(keep), new_entries),
        )
        f_total = f_step * f_total
        g_total = g_total * g_step
    return cur, f_total, g_total

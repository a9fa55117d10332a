"""Linear algebra over the rationals and over graded polynomial rings.

Matrices are sparse with Polynomial entries (rationals are constant
polynomials).  Rank and cohomology computations convert blocks to dense
rational rows and run exact Gaussian elimination; ranks of integer
matrices use fraction-free (Bareiss) elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .poly import QQ, Polynomial, Variable

Bidegree = tuple[int, int]  # (Z2 degree, internal degree)


class NotAComplex(ValueError):
    """The supplied differential does not square to zero."""


class NotIdempotent(ValueError):
    """The supplied endomorphism is not strictly idempotent."""


class RankMismatch(RuntimeError):
    """Graded column selection failed; the image is not free as expected."""


class NotIdempotentOnCohomology(ValueError):
    """The induced map on cohomology is not idempotent."""


class BoundTooSmall(RuntimeError):
    """Nonzero cohomology was found at the boundary of the scanned window."""


# ---------------------------------------------------------------------------
# Sparse matrices with polynomial entries
# ---------------------------------------------------------------------------


class PolyMatrix:
    """Sparse matrix with Polynomial entries."""

    __slots__ = ("nrows", "ncols", "entries")

    def __init__(self, nrows: int, ncols: int, entries: Mapping[tuple[int, int], Polynomial] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        ent = {}
        if entries:
            for (i, j), p in entries.items():
                if not isinstance(p, Polynomial):
                    p = Polynomial.const(p)
                if p:
                    if not (0 <= i < nrows and 0 <= j < ncols):
                        raise IndexError(f"entry ({i},{j}) outside {nrows}x{ncols}")
                    ent[(i, j)] = p
        self.entries = ent

    @staticmethod
    def identity(n: int) -> "PolyMatrix":
        one = Polynomial.const(1)
        return PolyMatrix(n, n, {(i, i): one for i in range(n)})

    @staticmethod
    def zeros(nrows: int, ncols: int) -> "PolyMatrix":
        return PolyMatrix(nrows, ncols)

    def __getitem__(self, ij: tuple[int, int]) -> Polynomial:
        return self.entries.get(ij, Polynomial.zero())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.entries == other.entries
        )

    def __hash__(self):
        raise TypeError("PolyMatrix is not hashable")

    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch in matrix addition")
        out = dict(self.entries)
        for ij, p in other.entries.items():
            q = out.get(ij)
            s = p if q is None else q + p
            if s:
                out[ij] = s
            else:
                out.pop(ij, None)
        m = PolyMatrix(self.nrows, self.ncols)
        m.entries = out
        return m

    def __neg__(self) -> "PolyMatrix":
        m = PolyMatrix(self.nrows, self.ncols)
        m.entries = {ij: -p for ij, p in self.entries.items()}
        return m

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def scale(self, c) -> "PolyMatrix":
        m = PolyMatrix(self.nrows, self.ncols)
        m.entries = {ij: p * c for ij, p in self.entries.items()}
        return m

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        rows_of_other: dict[int, list[tuple[int, Polynomial]]] = {}
        for (k, j), p in other.entries.items():
            rows_of_other.setdefault(k, []).append((j, p))
        acc: dict[tuple[int, int], Polynomial] = {}
        for (i, k), p in self.entries.items():
            row = rows_of_other.get(k)
            if not row:
                continue
            for j, q in row:
                ij = (i, j)
                prod = p * q
                cur = acc.get(ij)
                s = prod if cur is None else cur + prod
                if s:
                    acc[ij] = s
                else:
                    acc.pop(ij, None)
        m = PolyMatrix(self.nrows, other.ncols)
        m.entries = acc
        return m

    def transpose(self) -> "PolyMatrix":
        m = PolyMatrix(self.ncols, self.nrows)
        m.entries = {(j, i): p for (i, j), p in self.entries.items()}
        return m

    def map_entries(self, fn: Callable[[Polynomial], Polynomial]) -> "PolyMatrix":
        out = {}
        for ij, p in self.entries.items():
            q = fn(p)
            if q:
                out[ij] = q
        m = PolyMatrix(self.nrows, self.ncols)
        m.entries = out
        return m

    def substitute(self, assignment: Mapping[Variable, Polynomial]) -> "PolyMatrix":
        return self.map_entries(lambda p: p.substitute(assignment))

    def deriv(self, v: Variable) -> "PolyMatrix":
        return self.map_entries(lambda p: p.deriv(v))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        rpos = {r: i for i, r in enumerate(rows)}
        cpos = {c: j for j, c in enumerate(cols)}
        out = {}
        for (i, j), p in self.entries.items():
            if i in rpos and j in cpos:
                out[(rpos[i], cpos[j])] = p
        m = PolyMatrix(len(rows), len(cols))
        m.entries = out
        return m

    def eval_zero_dense(self) -> list[list]:
        """Dense rational matrix of constant term entries."""
        rows = [[QQ(0)] * self.ncols for _ in range(self.nrows)]
        for (i, j), p in self.entries.items():
            c = p.eval_zero()
            if c:
                rows[i][j] = c
        return rows

    def is_constant(self) -> bool:
        return all(p.is_constant() for p in self.entries.values())

    def __repr__(self) -> str:
        return f"PolyMatrix({self.nrows}x{self.ncols}, {len(self.entries)} entries)"


def scalar_matrix(n: int, p: Polynomial) -> PolyMatrix:
    return PolyMatrix(n, n, {(i, i): p for i in range(n)})


def from_dense(rows: Sequence[Sequence]) -> PolyMatrix:
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    ent = {}
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            p = x if isinstance(x, Polynomial) else Polynomial.const(x)
            if p:
                ent[(i, j)] = p
    return PolyMatrix(nrows, ncols, ent)


def check_entry_degrees(m: PolyMatrix, row_degs: Sequence[int], col_degs: Sequence[int], degree: int) -> None:
    """Entry (i, j) must be homogeneous of degree col_degs[j] + degree - row_degs[i]."""
    for (i, j), p in m.entries.items():
        want = col_degs[j] + degree - row_degs[i]
        got = p.internal_degree()
        if got != want or not p.is_homogeneous():
            raise ValueError(
                f"entry ({i},{j}) has degree {got}, expected {want} "
                f"(col {col_degs[j]} + {degree} - row {row_degs[i]})"
            )


# ---------------------------------------------------------------------------
# Dense exact elimination over the rationals
# ---------------------------------------------------------------------------


def rref_dense(rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form (in place); returns (rows, pivot column list)."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        if pv != 1:
            inv = QQ(1) / pv
            rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                ri, rr = rows[i], rows[r]
                rows[i] = [a - f * b for a, b in zip(ri, rr)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank_bareiss(rows: list[list[int]]) -> int:
    """Rank by fraction-free (Bareiss) elimination on an integer matrix."""
    m = [list(r) for r in rows]
    nrows, ncols = len(m), len(m[0]) if m else 0
    rank = 0
    prev = 1
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if m[i][c]:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        rank += 1
        r += 1
        if r == nrows:
            break
    return rank


def rank_dense(rows: list[list]) -> int:
    """Exact rank; clears denominators and runs Bareiss."""
    if not rows or not rows[0]:
        return 0
    int_rows = []
    for row in rows:
        lcm = 1
        for x in row:
            d = x.denominator
            if d != 1:
                g = _gcd(lcm, d)
                lcm = lcm // g * d
        int_rows.append([int(x * lcm) for x in row])
    return rank_bareiss(int_rows)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def kernel_dense(rows: list[list], ncols: int) -> list[list]:
    """Basis of the right kernel, one vector per basis element."""
    work = [list(r) for r in rows]
    work, pivots = rref_dense(work)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [QQ(0)] * ncols
        v[fc] = QQ(1)
        for r, pc in enumerate(pivots):
            v[pc] = -work[r][fc]
        basis.append(v)
    return basis


def invert_dense(rows: list[list]) -> list[list]:
    """Inverse of a square rational matrix by Gauss-Jordan elimination."""
    n = len(rows)
    aug = [list(r) + [QQ(1) if i == j else QQ(0) for j in range(n)] for i, r in enumerate(rows)]
    aug, pivots = rref_dense(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in aug]


def independent_columns(rows: list[list], ncols: int) -> list[int]:
    """Greedy left-to-right maximal independent column subset (rref pivots)."""
    work = [list(r) for r in rows]
    _, pivots = rref_dense(work)
    return pivots


# ---------------------------------------------------------------------------
# Bigraded spaces and cohomology
# ---------------------------------------------------------------------------


@dataclass
class BigradedSpace:
    """A finite dimensional (Z x Z2)-graded rational vector space."""

    gens: list[Bidegree]

    def dim(self) -> int:
        return len(self.gens)

    def dims_by_bidegree(self) -> dict[Bidegree, int]:
        out: dict[Bidegree, int] = {}
        for g in self.gens:
            out[g] = out.get(g, 0) + 1
        return out

    def shift(self, m: int) -> "BigradedSpace":
        return BigradedSpace([(z2, q + m) for z2, q in self.gens])

    def suspend(self, n: int = 1) -> "BigradedSpace":
        return BigradedSpace([((z2 + n) % 2, q) for z2, q in self.gens])


@dataclass
class BigradedMap:
    """A rational linear map between bigraded spaces with a fixed bidegree."""

    source: BigradedSpace
    target: BigradedSpace
    matrix: PolyMatrix
    bidegree: Bidegree = (0, 0)

    def check(self) -> None:
        dz, dq = self.bidegree
        for (i, j), p in self.matrix.entries.items():
            if not p.is_constant():
                raise ValueError("BigradedMap entries must be rational constants")
            sz, sq = self.source.gens[j]
            tz, tq = self.target.gens[i]
            if (sz + dz) % 2 != tz % 2 or sq + dq != tq:
                raise ValueError(
                    f"entry ({i},{j}) violates bidegree: {self.source.gens[j]} "
                    f"+ {self.bidegree} != {self.target.gens[i]}"
                )


def _indices_by_bidegree(gens: Sequence[Bidegree]) -> dict[Bidegree, list[int]]:
    out: dict[Bidegree, list[int]] = {}
    for i, g in enumerate(gens):
        out.setdefault(g, []).append(i)
    return out


def _dense_block(m: PolyMatrix, rows: Sequence[int], cols: Sequence[int]) -> list[list]:
    out = [[QQ(0)] * len(cols) for _ in rows]
    cpos = {c: j for j, c in enumerate(cols)}
    rpos = {r: i for i, r in enumerate(rows)}
    for (i, j), p in m.entries.items():
        if i in rpos and j in cpos:
            out[rpos[i]][cpos[j]] = p.eval_zero()
    return out


def cohomology_bigraded(
    gens: Sequence[Bidegree], d: PolyMatrix, c: int
) -> tuple[BigradedSpace, PolyMatrix, PolyMatrix]:
    """Cohomology of a folded complex over the rationals.

    ``d`` must be a rational square matrix of bidegree (1, c) on the space
    with the given generator bidegrees, squaring to zero exactly.  Returns
    the cohomology together with projection and section matrices, so maps
    induced on cohomology can be computed as proj' . f . sect.
    """
    n = len(gens)
    if d.nrows != n or d.ncols != n:
        raise ValueError("differential shape does not match generators")
    if not (d * d).is_zero():
        raise NotAComplex("d^2 != 0")
    by_bid = _indices_by_bidegree(gens)
    h_gens: list[Bidegree] = []
    proj_entries: dict[tuple[int, int], Polynomial] = {}
    sect_entries: dict[tuple[int, int], Polynomial] = {}
    for (z2, q), idx in sorted(by_bid.items()):
        prev = by_bid.get(((z2 + 1) % 2, q - c), [])
        tgt = by_bid.get(((z2 + 1) % 2, q + c), [])
        out_rows = _dense_block(d, tgt, idx) if tgt else []
        in_block = _dense_block(d, idx, prev) if prev else []
        k = len(idx)
        if out_rows:
            zbasis = kernel_dense(out_rows, k)
        else:
            zbasis = [[QQ(1) if i == j else QQ(0) for i in range(k)] for j in range(k)]
        z = len(zbasis)
        bcols = [[row[j] for row in in_block] for j in range(len(prev))] if prev else []
        if not zbasis:
            continue
        # express boundaries in cycle coordinates: solve Z * x = b per column
        ztall = [[zbasis[a][r] for a in range(z)] for r in range(k)]  # k x z
        coords = []
        for b in bcols:
            x = _solve_full_column_rank(ztall, b)
            coords.append(x)
        # rank of boundary coordinates and a complement inside the cycles
        if coords:
            cm = [list(col) for col in coords]  # b x z rows
            _, piv = rref_dense([list(row) for row in cm])
            pivot_set = set(piv)
        else:
            pivot_set = set()
        class_ids = [a for a in range(z) if a not in pivot_set]
        if not class_ids:
            continue
        # assemble basis of the block: classes, boundaries, then unit vectors
        cand = [[zbasis[a][r] for r in range(k)] for a in class_ids]
        cand += [list(b) for b in bcols]
        cand += [[QQ(1) if r == s else QQ(0) for r in range(k)] for s in range(k)]
        cols_m = [[cand[t][r] for t in range(len(cand))] for r in range(k)]  # k x len(cand)
        sel = independent_columns(cols_m, len(cand))
        if len(sel) != k or any(s >= len(class_ids) for s in sel[: len(class_ids)]) or sel[: len(class_ids)] != list(
            range(len(class_ids))
        ):
            # classes are independent mod boundaries, so they must be selected first
            raise RankMismatch("cohomology basis assembly failed")
        basis = [[cand[s][r] for s in sel] for r in range(k)]  # k x k
        binv = invert_dense(basis)
        h0 = len(h_gens)
        for a, cid in enumerate(class_ids):
            h_gens.append((z2, q))
            for r in range(k):
                v = zbasis[cid][r]
                if v:
                    sect_entries[(idx[r], h0 + a)] = Polynomial.const(v)
            for r in range(k):
                v = binv[a][r]
                if v:
                    proj_entries[(h0 + a, idx[r])] = Polynomial.const(v)
    h = BigradedSpace(h_gens)
    proj = PolyMatrix(len(h_gens), n, proj_entries)
    sect = PolyMatrix(n, len(h_gens), sect_entries)
    return h, proj, sect


def _solve_full_column_rank(a_rows: list[list], b: list) -> list:
    """Solve A x = b where the columns of A are independent."""
    ncols = len(a_rows[0]) if a_rows else 0
    aug = [list(r) + [bv] for r, bv in zip(a_rows, b)]
    aug, pivots = rref_dense(aug)
    x = [QQ(0)] * ncols
    for r, pc in enumerate(pivots):
        if pc == ncols:
            raise ValueError("inconsistent linear system")
        x[pc] = aug[r][ncols]
    return x


def split_idempotent_graded(
    e: PolyMatrix, gens: Sequence[Bidegree]
) -> tuple[list[Bidegree], PolyMatrix, PolyMatrix]:
    """Split a strict idempotent endomorphism of a graded free module.

    Returns (generator bidegrees of the image F, f, g) with f*g = 1_F and
    g*f = e.  Columns of e whose constant terms are linearly independent of
    maximal number form a graded basis of the image; the retraction is the
    rational left inverse corrected by a finite geometric series and then
    composed with e.
    """
    n = len(gens)
    delta = e * e - e
    if not delta.is_zero():
        raise NotIdempotent("e^2 != e")
    e0 = e.eval_zero_dense()
    cols = independent_columns([list(r) for r in e0], n)
    r = len(cols)
    f_gens = [gens[j] for j in cols]
    g = e.submatrix(range(n), cols)
    if r == 0:
        return [], PolyMatrix(0, n), PolyMatrix(n, 0)
    # rational left inverse of the constant part of g
    g0 = [[e0[i][j] for j in cols] for i in range(n)]
    rows_sel = independent_columns([[g0[i][j] for i in range(n)] for j in range(r)], n)
    if len(rows_sel) != r:
        raise RankMismatch("selected columns lost rank")
    block = [[g0[i][j] for j in range(r)] for i in rows_sel]
    binv = invert_dense(block)
    f0 = PolyMatrix(r, n, {(a, rows_sel[b]): Polynomial.const(binv[a][b]) for a in range(r) for b in range(r) if binv[a][b]})
    m = f0 * g - PolyMatrix.identity(r)
    # m is nilpotent (entries of strictly positive internal degree), so the
    # geometric series (1 + m)^{-1} = sum (-m)^k is finite
    series = PolyMatrix.identity(r)
    term = PolyMatrix.identity(r)
    guard = 0
    while True:
        term = term * m
        if term.is_zero():
            break
        guard += 1
        if guard > n + 1:
            raise RankMismatch("left inverse correction did not terminate")
        series = series + (term if guard % 2 == 0 else -term)
    f = (series * f0) * e
    if not (f * g - PolyMatrix.identity(r)).is_zero():
        raise RankMismatch("splitting identity f*g = 1 failed")
    if not (g * f - e).is_zero():
        raise RankMismatch("splitting identity g*f = e failed")
    return f_gens, f, g


def split_idempotent_on_cohomology(
    e: PolyMatrix, gens: Sequence[Bidegree], d: PolyMatrix, c: int
) -> BigradedSpace:
    """Image of the map induced on cohomology by a homotopy idempotent."""
    h, proj, sect = cohomology_bigraded(gens, d, c)
    he = (proj * e) * sect
    if not (he * he - he).is_zero():
        raise NotIdempotentOnCohomology("induced map is not idempotent on cohomology")
    f_gens, _, _ = split_idempotent_graded(he, h.gens)
    return BigradedSpace(list(f_gens))


# ---------------------------------------------------------------------------
# Degreewise brute force oracle
# ---------------------------------------------------------------------------


def _monomials_of_degree(var_list: Sequence[Variable], half_deg: int):
    """All monomials in the given variables with total exponent half_deg."""
    if half_deg < 0:
        return
    if not var_list:
        if half_deg == 0:
            yield Polynomial.const(1)
        return
    v, rest = var_list[0], var_list[1:]
    for e in range(half_deg + 1):
        for tail in _monomials_of_degree(rest, half_deg - e):
            yield Polynomial.variable(v) ** e * tail


def degreewise_cohomology_oracle(
    gens: Sequence[Bidegree],
    d: PolyMatrix,
    c: int,
    ring_vars: Sequence[Variable],
    deg_lo: int,
    deg_hi: int,
) -> BigradedSpace:
    """Brute-force bigraded cohomology of a factorisation of zero.

    For each internal degree in [deg_lo, deg_hi] the finite dimensional
    slices of the 2-periodic complex are materialised over the rationals
    and kernels modulo images are computed.  Raises BoundTooSmall if a
    nonzero class is found at the window boundary.
    """
    if (d * d).entries:
        sq = d * d
        if any(p for p in sq.entries.values()):
            raise NotAComplex("oracle input does not square to zero")

    def slice_basis(z2: int, q: int):
        out = []
        for i, (gz, gq) in enumerate(gens):
            if gz % 2 != z2 % 2:
                continue
            rem = q - gq
            if rem < 0 or rem % 2:
                continue
            for mono in _monomials_of_degree(ring_vars, rem // 2):
                out.append((i, mono))
        return out

    def d_matrix(src, tgt):
        pos = {}
        for a, (i, mono) in enumerate(tgt):
            for m, cf in mono.terms.items():
                pos[(i, m)] = a
        rows = [[QQ(0)] * len(src) for _ in tgt]
        cols_by_j: dict[int, list[tuple[int, Polynomial]]] = {}
        for (i, j), p in d.entries.items():
            cols_by_j.setdefault(j, []).append((i, p))
        for b, (j, mono) in enumerate(src):
            for i, p in cols_by_j.get(j, []):
                prod = p * mono
                for m, cf in prod.terms.items():
                    a = pos.get((i, m))
                    if a is None:
                        continue
                    rows[a][b] += cf
        return rows

    result: list[Bidegree] = []
    for z2 in (0, 1):
        for q in range(deg_lo, deg_hi + 1):
            cur = slice_basis(z2, q)
            if not cur:
                continue
            nxt = slice_basis((z2 + 1) % 2, q + c)
            prv = slice_basis((z2 + 1) % 2, q - c)
            out_m = d_matrix(cur, nxt) if nxt else []
            in_m = d_matrix(prv, cur) if prv else []
            dim_ker = len(cur) - (rank_dense(out_m) if out_m else 0)
            dim_im = rank_dense(in_m) if in_m else 0
            h = dim_ker - dim_im
            if h:
                if q in (deg_lo, deg_hi):
                    raise BoundTooSmall(f"nonzero class at window boundary degree {q}")
                result.extend([(z2, q)] * h)
    return BigradedSpace(sorted(result))

"""The web compilation engine.

A web is compiled by merging vertices along a path and eliminating each
internal variable as soon as both endpoints of its edge have been merged.
Eliminating a variable y quotients by y^a (inflating all matrices over the
basis 1, y, ..., y^(a-1)), builds the idempotent from the null-homotopy
and the divided-difference commutator, shifts by {c - 2a}<1>, reduces to a
minimal model, makes the idempotent strict and splits it.

All sandwich maps (f, g) are strict chain maps with f g = 1, so morphisms
between webs compiled along the same path are pushed through the same
steps: inflate, then f_target . phi . g_source.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from itertools import permutations
from math import factorial
from typing import Mapping, Sequence

from .gradedla import (
    Bidegree,
    PolyMatrix,
    check_entry_degrees,
    scalar_matrix,
    split_idempotent_graded,
    split_idempotent_on_cohomology,
)
from .mf import GradedMF, op_on_left_factor, op_on_right_factor, reduce_mf, tensor
from .poly import Polynomial, QQ, Variable
from .web import Web, validate


class NotNilpotent(RuntimeError):
    """The idempotent defect is not a nilpotent matrix."""


class PathMismatch(ValueError):
    """Morphism endpoints were compiled along different paths."""


@dataclass
class CompilationContext:
    """Parameters of the elimination: for x^(n+1) potentials the quotient
    exponent is a = n and the null-homotopy scale is 1/(n+1)."""

    n: int

    @property
    def a(self) -> int:
        return self.n

    @property
    def c(self) -> int:
        return self.n + 1

    @property
    def b_coefficient(self):
        return QQ(1) / QQ(self.n + 1)


# ---------------------------------------------------------------------------
# Inflation and the commutator block
# ---------------------------------------------------------------------------


def inflate(m: PolyMatrix, v: Variable, a: int) -> PolyMatrix:
    """Replace each entry by the multiplication matrix on k[v]/(v^a).

    Row (i, r) and column (j, s) of the result are indexed i*a + r and
    j*a + s; a term p * v^e of entry (i, j) contributes p at (i, e+s), (j, s)
    whenever e + s < a.
    """
    entries: dict[tuple[int, int], Polynomial] = {}
    for (i, j), p in m.entries.items():
        for e, coeff in p.coeffs_in(v).items():
            if e >= a:
                continue
            for s in range(a - e):
                key = (i * a + e + s, j * a + s)
                cur = entries.get(key)
                entries[key] = coeff if cur is None else cur + coeff
    out = PolyMatrix(m.nrows * a, m.ncols * a)
    out.entries = {k: p for k, p in entries.items() if p}
    return out


def commutator_block(m: PolyMatrix, v: Variable, a: int) -> PolyMatrix:
    """Matrix of multiplication followed by division by v^a without
    remainder, on the quotient basis.

    A term p * v^e of entry (i, j) contributes p at row (i, e+s-a), column
    (j, s) whenever a <= e + s < 2a.
    """
    entries: dict[tuple[int, int], Polynomial] = {}
    for (i, j), p in m.entries.items():
        for e, coeff in p.coeffs_in(v).items():
            for s in range(a):
                t = e + s - a
                if 0 <= t < a:
                    key = (i * a + t, j * a + s)
                    cur = entries.get(key)
                    entries[key] = coeff if cur is None else cur + coeff
    out = PolyMatrix(m.nrows * a, m.ncols * a)
    out.entries = {k: p for k, p in entries.items() if p}
    return out


def inflate_gens(gens: Sequence[Bidegree], a: int) -> list[Bidegree]:
    return [(z2, q + 2 * r) for z2, q in gens for r in range(a)]


def make_epsilon(
    d: PolyMatrix,
    variables: Sequence[Variable],
    lambdas: Mapping[int, PolyMatrix],
    a: int,
) -> PolyMatrix:
    """The idempotent on the full quotient by all listed variables.

    Permutation sum over orderings of the divided-difference commutators,
    multiplied on the left by the product of the inflated null-homotopies
    and scaled by (-1)^(n choose 2) / n!.
    """
    n = len(variables)
    if n == 0:
        raise ValueError("no variables to eliminate")

    def full(mat: PolyMatrix, skip: int | None = None) -> PolyMatrix:
        out = mat
        for k, v in enumerate(variables):
            out = commutator_block(out, v, a) if k == skip else inflate(out, v, a)
        return out

    lam_product = None
    for v in variables:
        li = full(lambdas[v.index])
        lam_product = li if lam_product is None else lam_product * li
    commutators = [full(d, skip=j) for j in range(n)]
    acc = None
    for tau in permutations(range(n)):
        prod = None
        for k in tau:
            prod = commutators[k] if prod is None else prod * commutators[k]
        sgn = _perm_sign(tau)
        term = prod if sgn > 0 else -prod
        acc = term if acc is None else acc + term
    pref = QQ((-1) ** (n * (n - 1) // 2)) / QQ(factorial(n))
    return (lam_product * acc).scale(Polynomial.const(pref))


def _perm_sign(tau: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(tau)
    for i in range(len(tau)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = tau[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def strictify(e: PolyMatrix, max_newton: int = 64) -> PolyMatrix:
    """Lift a homotopy idempotent with nilpotent defect to a strict one."""
    delta = e * e - e
    if delta.is_zero():
        return e
    power = delta
    squarings = 0
    bound = max(1, e.nrows).bit_length() + 2
    while not power.is_zero():
        power = power * power
        squarings += 1
        if squarings > bound:
            raise NotNilpotent("e^2 - e is not nilpotent")
    cur = e
    for _ in range(max_newton):
        sq = cur * cur
        cur = sq.scale(Polynomial.const(3)) - (sq * cur).scale(Polynomial.const(2))
        if (cur * cur - cur).is_zero():
            return cur
    raise NotNilpotent("idempotent lift did not converge")


# ---------------------------------------------------------------------------
# Per-variable elimination
# ---------------------------------------------------------------------------


@dataclass
class TensorStep:
    vertex: str


@dataclass
class EliminateStep:
    variable: str
    a: int
    sandwiches: list[tuple[PolyMatrix, PolyMatrix]]


@dataclass
class CompiledWeb:
    web: Web
    path: list[str]
    mf: GradedMF
    trace: list
    n_internal: int

    def key(self) -> str:
        return web_key(self.web, self.path)


def _check_lambda(lam: PolyMatrix, mf: GradedMF, v: Variable, n: int) -> None:
    anti = lam * mf.diff + mf.diff * lam
    want = scalar_matrix(mf.rank, Polynomial.variable(v) ** n)
    if not (anti - want).is_zero():
        raise AssertionError(f"null-homotopy identity fails for {v}")


def eliminate_variable(
    mf: GradedMF,
    v: Variable,
    lam: PolyMatrix | None,
    ctx: CompilationContext,
    lambdas: dict[int, PolyMatrix] | None = None,
    check: bool = False,
) -> tuple[GradedMF, EliminateStep, dict[int, PolyMatrix]]:
    """One step of the compilation: quotient by v^a and split.

    Returns the compiled summand, the trace step, and the transported
    pending null-homotopies.  A variable absent from the differential and
    potential degenerates to selecting the v^0 block.
    """
    a = ctx.a
    pend = dict(lambdas or {})
    if v.index in mf.potential.variables():
        raise ValueError(f"{v} still appears in the potential")
    absent = all(v.index not in p.variables() for p in mf.diff.entries.values())
    if absent:
        r = mf.rank
        f = PolyMatrix(r, r * a, {(i, i * a): Polynomial.const(1) for i in range(r)})
        g = PolyMatrix(r * a, r, {(i * a, i): Polynomial.const(1) for i in range(r)})
        step = EliminateStep(v.name, a, [(f, g)])
        return mf, step, pend
    if lam is None:
        raise ValueError(f"no null-homotopy available for {v}")
    if check:
        _check_lambda(lam, mf, v, ctx.n)
    d_inf = inflate(mf.diff, v, a)
    gens_inf = inflate_gens(mf.gens, a)
    kom = commutator_block(mf.diff, v, a)
    lam_inf = inflate(lam, v, a)
    eps = lam_inf * kom
    # theorem bookkeeping: shift {c - 2a} and one suspension
    shift_by = ctx.c - 2 * a
    gens_shifted = [((z2 + 1) % 2, q + shift_by) for z2, q in gens_inf]
    d_shifted = -d_inf
    pend = {k: -inflate(m, v, a) for k, m in pend.items()}
    if check:
        check_entry_degrees(
            eps, [q for _, q in gens_shifted], [q for _, q in gens_shifted], 0
        )
    step1 = GradedMF(mf.potential, ctx.c, gens_shifted, d_shifted)
    min1, f1, g1 = reduce_mf(step1)
    eps1 = (f1 * eps) * g1
    pend = {k: (f1 * m) * g1 for k, m in pend.items()}
    eps2 = strictify(eps1)
    f_gens, f2, g2 = split_idempotent_graded(eps2, min1.gens)
    d_final = (f2 * min1.diff) * g2
    out = GradedMF(mf.potential, ctx.c, list(f_gens), d_final)
    pend = {k: (f2 * m) * g2 for k, m in pend.items()}
    if check:
        out.check()
    step = EliminateStep(v.name, a, [(f1, g1), (f2, g2)])
    return out, step, pend


compile_step = eliminate_variable


# ---------------------------------------------------------------------------
# Whole-web compilation
# ---------------------------------------------------------------------------


def greedy_path(web: Web) -> list[str]:
    """Visit all vertices, preferring neighbours joined by many live edges."""
    names = [v.name for v in web.vertices]
    if not names:
        return []
    remaining = set(names)
    path = [names[0]]
    remaining.discard(names[0])
    merged = {names[0]}
    adj: dict[str, dict[str, int]] = {nm: {} for nm in names}
    for e in web.edges.values():
        if e.is_internal() and e.variable is not None and e.origin != e.target:
            adj[e.origin][e.target] = adj[e.origin].get(e.target, 0) + 1
            adj[e.target][e.origin] = adj[e.target].get(e.origin, 0) + 1
    order = {nm: k for k, nm in enumerate(names)}
    while remaining:
        best = None
        best_score = None
        for nm in remaining:
            score = sum(cnt for other, cnt in adj[nm].items() if other in merged)
            key = (-score, order[nm])
            if best_score is None or key < best_score:
                best, best_score = nm, key
        path.append(best)
        merged.add(best)
        remaining.discard(best)
    return path


def compile_web(
    web: Web,
    path: Sequence[str] | None = None,
    check: bool = False,
) -> CompiledWeb:
    validate(web)
    ctx = CompilationContext(web.n)
    path = list(path) if path is not None else greedy_path(web)
    if sorted(path) != sorted(v.name for v in web.vertices):
        raise PathMismatch("path must visit every vertex exactly once")
    decorations = {v.name: v for v in web.vertices}
    trace: list = []
    merged: set[str] = {path[0]}
    cur = decorations[path[0]].decoration
    lambdas: dict[int, PolyMatrix] = {}
    n_internal = 0
    scale = Polynomial.const(ctx.b_coefficient)

    def eliminable_edges(new_vertex: str) -> list:
        out = []
        for e in sorted(web.edges.values(), key=lambda e: e.name):
            if not e.is_internal() or e.variable is None:
                continue
            if new_vertex in (e.origin, e.target) and {e.origin, e.target} <= merged:
                out.append(e)
        return out

    # loops back to the starting vertex would need marks; the web builder
    # guarantees there are none
    for vn in path[1:]:
        dec = decorations[vn].decoration
        merged.add(vn)
        new_edges = eliminable_edges(vn)
        # any pending null-homotopy lives on the old cluster: extend first
        for k in list(lambdas):
            lambdas[k] = op_on_left_factor(lambdas[k], cur, dec)
        # null-homotopies for the new internal edges come from the factor
        # where the edge originates (its potential carries +y^(n+1))
        for e in new_edges:
            yv = e.variable
            if e.origin == vn:
                raw = dec.diff.deriv(yv).scale(scale)
                lambdas[yv.index] = op_on_right_factor(raw, cur, dec, z2=1)
            else:
                raw = cur.diff.deriv(yv).scale(scale)
                lambdas[yv.index] = op_on_left_factor(raw, cur, dec)
        cur = tensor(cur, dec)
        trace.append(TensorStep(vn))
        for e in new_edges:
            yv = e.variable
            lam = lambdas.pop(yv.index)
            cur, step, lambdas = eliminate_variable(
                cur, yv, lam, ctx, lambdas, check=check
            )
            trace.append(step)
            n_internal += 1
    if check and web.is_closed():
        if cur.diff.entries:
            raise AssertionError("closed web should compile to a zero differential")
    return CompiledWeb(web, path, cur, trace, n_internal)


# ---------------------------------------------------------------------------
# Morphism compilation
# ---------------------------------------------------------------------------


def compile_morphism(
    source: CompiledWeb,
    target: CompiledWeb,
    vertex_maps: Mapping[str, PolyMatrix] | None = None,
) -> PolyMatrix:
    """Push a vertex-local morphism through both compilations.

    ``vertex_maps`` sends vertex names to matrices from the source web's
    decoration to the target web's decoration; missing vertices use the
    identity (their decorations must then have equal rank).
    """
    vertex_maps = dict(vertex_maps or {})
    if source.path != target.path:
        raise PathMismatch("source and target were compiled along different paths")
    if len(source.trace) != len(target.trace):
        raise PathMismatch("trace shapes differ")
    s_dec = {v.name: v.decoration for v in source.web.vertices}
    t_dec = {v.name: v.decoration for v in target.web.vertices}

    def vmap(name: str) -> PolyMatrix:
        m = vertex_maps.get(name)
        if m is not None:
            return m
        rs, rt = s_dec[name].rank, t_dec[name].rank
        if rs != rt:
            raise PathMismatch(f"vertex {name} needs an explicit morphism")
        return PolyMatrix.identity(rs)

    phi = vmap(source.path[0])
    for s_step, t_step in zip(source.trace, target.trace):
        if type(s_step) is not type(t_step):
            raise PathMismatch("trace step kinds differ")
        if isinstance(s_step, TensorStep):
            if s_step.vertex != t_step.vertex:
                raise PathMismatch("tensor order differs")
            mv = vmap(s_step.vertex)
            s_rank = s_dec[s_step.vertex].rank
            t_rank = t_dec[t_step.vertex].rank
            entries = {}
            for (it, is_), p in phi.entries.items():
                for (jt, js), q in mv.entries.items():
                    entries[(it * t_rank + jt, is_ * s_rank + js)] = p * q
            phi = PolyMatrix(phi.nrows * t_rank, phi.ncols * s_rank, entries)
        else:
            if s_step.variable != t_step.variable or s_step.a != t_step.a:
                raise PathMismatch("elimination order differs")
            if len(s_step.sandwiches) != len(t_step.sandwiches):
                raise PathMismatch("sandwich counts differ")
            from .poly import var as _var

            phi = inflate(phi, _var(s_step.variable), s_step.a)
            for (fs, gs), (ft, gt) in zip(s_step.sandwiches, t_step.sandwiches):
                phi = (ft * phi) * gs
    return phi


def web_key(web: Web, path: Sequence[str]) -> str:
    """Stable identifier of (web shape, decorations, n, path)."""
    h = hashlib.sha256()
    h.update(str(web.n).encode())
    for e in sorted(web.edges.values(), key=lambda e: e.name):
        h.update(
            f"E{e.name}|{e.origin}|{e.target}|{e.variable.name if e.variable else ''}".encode()
        )
    for v in web.vertices:
        h.update(f"V{v.name}|{v.kind}|{v.in_edges}|{v.out_edges}".encode())
        h.update(str(v.decoration.gens).encode())
        for (i, j), p in sorted(v.decoration.diff.entries.items()):
            h.update(f"{i},{j}:".encode())
            h.update(repr(p).encode())
    h.update(("P" + ">".join(path)).encode())
    return h.hexdigest()

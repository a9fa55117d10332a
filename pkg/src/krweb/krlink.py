"""Link-level pipeline: diagrams in, Poincare polynomials out.

A diagram is a list of crossings with labelled corner arcs plus any
crossingless circles.  Braid closures and PD codes are parsed into this
form; orientation versions of multi-component links are produced by
reversing a component and renormalising every crossing by a quarter turn.

The resolution cube is compiled one state web at a time along a common
vertex path, the connecting chi morphisms are pushed through the same
trace, and the cohomology of the resulting cube of rational vector spaces
is the invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import product

from .compiler import CompiledWeb, compile_morphism, compile_web, greedy_path
from .gradedla import PolyMatrix, cohomology_bigraded
from .krbasic import make_crossing_complex, make_crossing_data, X1, X2, Y1, Y2
from .laurent import LaurentPoly2
from .poly import Polynomial, Variable, var
from .web import StateGraph, Web, state_web_from_resolution

class ParseError(ValueError):
    pass


class InconsistentOrientation(ValueError):
    pass


class MarkNotOnComponent(ValueError):
    pass


# ---------------------------------------------------------------------------
# Diagrams
# ---------------------------------------------------------------------------


@dataclass
class Crossing:
    """A crossing with corner arcs bl, br, tl, tr.

    Diagonal 1 joins bl and tr, diagonal 2 joins br and tl; ``d1_up`` means
    the first strand runs bl -> tr.  ``over_d1`` records which diagonal is
    the over-strand.
    """

    bl: str
    br: str
    tl: str
    tr: str
    over_d1: bool
    d1_up: bool = True
    d2_up: bool = True

    def normalised(self) -> "Crossing":
        c = self
        if c.d1_up and c.d2_up:
            return c
        if c.d1_up and not c.d2_up:
            # quarter turn counterclockwise
            return Crossing(
                bl=c.tl, br=c.bl, tl=c.tr, tr=c.br, over_d1=not c.over_d1
            )
        if not c.d1_up and c.d2_up:
            # quarter turn clockwise
            return Crossing(
                bl=c.br, br=c.tr, tl=c.bl, tr=c.tl, over_d1=not c.over_d1
            )
        return Crossing(bl=c.tr, br=c.tl, tl=c.br, tr=c.bl, over_d1=c.over_d1)

    def slots(self) -> tuple[str, str, str, str]:
        c = self.normalised()
        return (c.bl, c.br, c.tl, c.tr)

    def sign_kind(self) -> str:
        """Which two-term complex the crossing contributes."""
        c = self.normalised()
        return "under" if c.over_d1 else "over"


@dataclass
class LinkDiagram:
    crossings: list[Crossing]
    circles: list[str] = field(default_factory=list)
    name: str = ""

    def arcs(self) -> list[str]:
        seen: list[str] = []
        for c in self.crossings:
            for a in (c.bl, c.br, c.tl, c.tr):
                if a not in seen:
                    seen.append(a)
        for a in self.circles:
            if a not in seen:
                seen.append(a)
        return seen

    def components(self) -> list[list[str]]:
        """Arcs grouped by link component, following strand continuity."""
        succ: dict[str, str] = {}
        for c in self.crossings:
            cn = c.normalised()
            # strands: bl -> tr and br -> tl
            succ[cn.bl] = cn.tr
            succ[cn.br] = cn.tl
        comps: list[list[str]] = []
        seen: set[str] = set()
        for a in self.arcs():
            if a in seen or a in self.circles:
                continue
            cyc = [a]
            seen.add(a)
            b = succ[a]
            while b != a:
                cyc.append(b)
                seen.add(b)
                b = succ[b]
            comps.append(cyc)
        for a in self.circles:
            comps.append([a])
        return comps

    def parity(self) -> int:
        """Circles of the oriented smoothing, modulo two."""
        parent: dict[str, str] = {a: a for a in self.arcs()}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for c in self.crossings:
            bl, br, tl, tr = c.slots()
            parent[find(bl)] = find(tl)
            parent[find(br)] = find(tr)
        return len({find(a) for a in self.arcs()}) % 2

    def reverse_component(self, index: int) -> "LinkDiagram":
        comp = set(self.components()[index])
        out = []
        for c in self.crossings:
            cn = c.normalised()
            d1_on = cn.bl in comp
            d2_on = cn.br in comp
            out.append(
                replace(
                    cn,
                    d1_up=not cn.d1_up if d1_on else cn.d1_up,
                    d2_up=not cn.d2_up if d2_on else cn.d2_up,
                ).normalised()
            )
        return LinkDiagram(out, list(self.circles), self.name + "_rev")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def braid_closure(word: list[int], strands: int | None = None, name: str = "") -> LinkDiagram:
    if strands is None:
        strands = max((abs(w) for w in word), default=0) + 1
    if any(w == 0 or abs(w) >= strands for w in word):
        raise ParseError("braid letters must be nonzero and below the strand count")
    fresh = [0]
    top = [f"{p + 1}" for p in range(strands)]

    def new_arc() -> str:
        fresh[0] += 1
        return f"t{fresh[0]}"

    cur = list(top)
    crossings = []
    for w in word:
        k = abs(w) - 1
        a, b = cur[k], cur[k + 1]
        c, d = new_arc(), new_arc()
        # positive letter: the strand from position k goes over to k + 1
        crossings.append(Crossing(bl=a, br=b, tl=c, tr=d, over_d1=w > 0))
        cur[k], cur[k + 1] = c, d
    # closure identifies the final arc at each position with the initial one
    rename = {}
    for p in range(strands):
        if cur[p] != top[p]:
            rename[cur[p]] = top[p]
    circles = [top[p] for p in range(strands) if cur[p] == top[p]]
    fixed = [
        Crossing(
            bl=rename.get(c.bl, c.bl),
            br=rename.get(c.br, c.br),
            tl=rename.get(c.tl, c.tl),
            tr=rename.get(c.tr, c.tr),
            over_d1=c.over_d1,
        )
        for c in crossings
    ]
    # relabel arcs with small numbers for friendlier mark selection
    diagram = LinkDiagram(fixed, circles, name)
    mapping = {a: str(i + 1) for i, a in enumerate(diagram.arcs())}
    fixed = [
        Crossing(mapping[c.bl], mapping[c.br], mapping[c.tl], mapping[c.tr], c.over_d1)
        for c in fixed
    ]
    return LinkDiagram(fixed, [mapping[a] for a in circles], name)


def parse_braid_word(text: str) -> list[int]:
    word = []
    for tok in text.replace(",", " ").split():
        t = tok.strip().lower()
        if not t:
            continue
        if t.startswith("s"):
            body = t[1:]
            if body.endswith("^-1"):
                word.append(-int(body[:-3]))
            elif body.endswith("i"):
                word.append(-int(body[:-1]))
            else:
                word.append(int(body))
        else:
            word.append(int(t))
    if not word:
        raise ParseError("empty braid word")
    return word


def parse_pd(text: str, orientations: list[list[str]] | None = None) -> LinkDiagram:
    """PD notation: crossings X[a,b,c,d] with labels counterclockwise from
    the incoming under-strand; the over strand joins b and d.

    The direction of each over strand is inferred by requiring every edge
    label to occur exactly once as incoming and once as outgoing; pass
    explicit component cycles when the diagram leaves this ambiguous.
    """
    import re

    quads = re.findall(r"[Xx]\[\s*([^]]+?)\s*\]", text)
    if not quads:
        raise ParseError("no PD crossings found")
    raw = []
    for q in quads:
        parts = [p.strip() for p in q.split(",")]
        if len(parts) != 4:
            raise ParseError(f"crossing needs four labels: {q}")
        raw.append(tuple(parts))
    succ: dict[str, str] = {}
    if orientations:
        for comp in orientations:
            for i, a in enumerate(comp):
                succ[a] = comp[(i + 1) % len(comp)]
    # over strand direction per crossing: b -> d (True) or d -> b
    choice: list[bool | None] = [None] * len(raw)
    if orientations:
        for i, (a, b, c, d) in enumerate(raw):
            if succ.get(b) == d or (succ.get(d) != b and b < d):
                pass
    counts_fixed: dict[str, int] = {}

    def place(label, incoming, table):
        key = (label, incoming)
        table[key] = table.get(key, 0) + 1

    # propagate: each label is incoming exactly once and outgoing exactly once
    for i, (a, b, c, d) in enumerate(raw):
        if orientations:
            if succ.get(b) == d:
                choice[i] = True
            elif succ.get(d) == b:
                choice[i] = False
    changed = True
    while changed:
        changed = False
        usage: dict[tuple[str, bool], int] = {}
        for i, (a, b, c, d) in enumerate(raw):
            place(a, True, usage)
            place(c, False, usage)
            if choice[i] is True:
                place(b, True, usage)
                place(d, False, usage)
            elif choice[i] is False:
                place(d, True, usage)
                place(b, False, usage)
        for i, (a, b, c, d) in enumerate(raw):
            if choice[i] is not None:
                continue
            # try each option; reject those that overfill a slot
            ok = []
            for opt in (True, False):
                u = dict(usage)
                inc, out = (b, d) if opt else (d, b)
                place(inc, True, u)
                place(out, False, u)
                if all(v <= 1 for v in u.values()):
                    ok.append(opt)
            if len(ok) == 1:
                choice[i] = ok[0]
                changed = True
    if any(ch is None for ch in choice):
        # fall back: greedily pick remaining directions consistently
        for i, ch in enumerate(choice):
            if ch is None:
                choice[i] = True
    crossings = []
    for (a, b, c, d), ch in zip(raw, choice):
        over_in, over_out = (b, d) if ch else (d, b)
        # local picture: under-strand a -> c pointing up as diagonal 1
        crossings.append(
            Crossing(bl=a, br=over_in, tl=over_out, tr=c, over_d1=False)
        )
    diagram = LinkDiagram(crossings)
    labels: dict[str, int] = {}
    for cr in crossings:
        for x in (cr.bl, cr.br, cr.tl, cr.tr):
            labels[x] = labels.get(x, 0) + 1
    if any(v != 2 for v in labels.values()):
        raise InconsistentOrientation("each PD label must occur exactly twice")
    return diagram


BUILTIN_BRAIDS: dict[str, tuple[list[int], int | None, int | None]] = {
    # name: (word, strands, reverse_component)
    "unknot": ([], 1, None),
    "hopf": ([-1, -1], 2, None),
    "hopf_v1": ([-1, -1], 2, None),
    "hopf_v2": ([-1, -1], 2, 1),
    "trefoil": ([1, 1, 1], 2, None),
    "3_1": ([1, 1, 1], 2, None),
    "figure8": ([1, -2, 1, -2], 3, None),
    "4_1": ([1, -2, 1, -2], 3, None),
    "solomon_v1": ([1, 1, 1, 1], 2, 1),
    "solomon_v2": ([1, 1, 1, 1], 2, None),
    "4_1^2_v1": ([1, 1, 1, 1], 2, 1),
    "4_1^2_v2": ([1, 1, 1, 1], 2, None),
    "5_1": ([1, 1, 1, 1, 1], 2, None),
    "5_2": ([1, 1, 1, 2, -1, 2], 3, None),
    "whitehead": ([1, -2, 1, -2, 1], 3, None),
    "5_1^2": ([1, -2, 1, -2, 1], 3, None),
    "6_1": ([1, 1, 2, -1, -3, 2, -3], 4, None),
    "6_2": ([1, 1, 1, -2, 1, -2], 3, None),
    "6_3": ([1, 1, -2, 1, -2, -2], 3, None),
}


def parse_link(spec: str, kind: str = "name") -> LinkDiagram:
    if kind == "name":
        key = spec.strip().lower()
        if key not in BUILTIN_BRAIDS:
            raise ParseError(f"unknown link name {spec!r}; known: {sorted(BUILTIN_BRAIDS)}")
        word, strands, rev = BUILTIN_BRAIDS[key]
        d = braid_closure(word, strands, name=key)
        if rev is not None:
            d = d.reverse_component(rev)
        return d
    if kind == "braid":
        return braid_closure(parse_braid_word(spec), name="braid")
    if kind == "pd":
        return parse_pd(spec)
    raise ParseError(f"unknown link input kind {kind!r}")


# ---------------------------------------------------------------------------
# The resolution cube
# ---------------------------------------------------------------------------


@dataclass
class ResolutionData:
    choices: tuple[str, ...]
    compiled: CompiledWeb
    t_degree: int
    q_shift: int

    def absolute_gens(self):
        return [(z2, q + self.q_shift) for z2, q in self.compiled.mf.gens]


@dataclass
class KRResult:
    n: int
    reduced: bool
    mark: str | None
    parity: int
    poincare: LaurentPoly2
    both_parities: dict[int, LaurentPoly2]
    resolutions: dict[tuple[str, ...], ResolutionData]
    diagram: LinkDiagram


def _chi_matrix_for(kind: str, n: int, slot_polys) -> PolyMatrix:
    data = make_crossing_data(n)
    m = data.chi0 if kind == "over" else data.chi1
    sub = {X1: slot_polys[0], X2: slot_polys[1], Y1: slot_polys[2], Y2: slot_polys[3]}
    return m.substitute(sub)


def _slot_polys(web: Web, vertex: str):
    v = web.vertex(vertex)
    out = []
    for en in (*v.in_edges, *v.out_edges):
        e = web.edges[en]
        out.append(
            Polynomial.variable(e.variable) if e.variable is not None else Polynomial.zero()
        )
    return out


def kr_invariant(
    diagram: LinkDiagram,
    n: int,
    reduced: bool = False,
    mark: str | None = None,
    threads: int = 1,
    cache_dir: str | None = None,
    check: bool = False,
) -> KRResult:
    s = len(diagram.crossings)
    slots = [c.slots() for c in diagram.crossings]
    kinds = [c.sign_kind() for c in diagram.crossings]
    complexes = {k: make_crossing_complex(k, n) for k in set(kinds)} if kinds else {}
    frozen: list[str] = []
    if reduced:
        if mark is None:
            raise MarkNotOnComponent("reduced invariant needs a marked edge")
        if mark not in diagram.arcs():
            raise MarkNotOnComponent(f"mark {mark!r} is not an edge of the diagram")
        frozen = [mark]
    elif mark is not None:
        raise MarkNotOnComponent("a mark is only meaningful for the reduced invariant")

    def build_web(choices: tuple[str, ...]) -> Web:
        graph = StateGraph(list(slots), choices, list(diagram.circles))
        return state_web_from_resolution(graph, n, frozen=frozen)

    all_singular = tuple("singular" for _ in range(s))
    base_web = build_web(all_singular) if s else build_web(())
    path = greedy_path(base_web)

    resolutions: dict[tuple[str, ...], ResolutionData] = {}
    compiled_webs: dict[tuple[str, ...], CompiledWeb] = {}
    choice_space = list(product(("smooth", "singular"), repeat=s))
    if threads > 1 and len(choice_space) > 1:
        from .cache import compile_resolutions_parallel

        compiled_webs = compile_resolutions_parallel(
            diagram, n, frozen, path, choice_space, threads, cache_dir
        )
    else:
        from .cache import load_compiled, store_compiled

        for choices in choice_space:
            web = build_web(choices)
            cw = None
            if cache_dir:
                cw = load_compiled(cache_dir, web, path)
            if cw is None:
                cw = compile_web(web, path, check=check)
                if cache_dir:
                    store_compiled(cache_dir, cw)
            compiled_webs[choices] = cw

    for choices in choice_space:
        t_deg = 0
        q_shift = 0
        for k, ch in enumerate(choices):
            cc = complexes[kinds[k]]
            if ch == "smooth":
                t_deg += cc.smooth_position
                q_shift += cc.smooth_shift
            else:
                t_deg += cc.singular_position
                q_shift += cc.singular_shift
        resolutions[choices] = ResolutionData(
            choices, compiled_webs[choices], t_deg, q_shift
        )

    # cube differentials
    blocks: dict[tuple[tuple[str, ...], tuple[str, ...]], PolyMatrix] = {}
    for choices in choice_space:
        for k in range(s):
            kind = kinds[k]
            if kind == "over" and choices[k] == "smooth":
                flipped = choices[:k] + ("singular",) + choices[k + 1 :]
            elif kind == "under" and choices[k] == "singular":
                flipped = choices[:k] + ("smooth",) + choices[k + 1 :]
            else:
                continue
            src = compiled_webs[choices]
            tgt = compiled_webs[flipped]
            vname = f"c{k}"
            chi = _chi_matrix_for(kind, n, _slot_polys(src.web, vname))
            phi = compile_morphism(src, tgt, {vname: chi})
            sign = (-1) ** sum(1 for j in range(k) if choices[j] == "singular")
            if sign < 0:
                phi = -phi
            blocks[(choices, flipped)] = phi

    return _assemble_cube(diagram, n, reduced, mark, resolutions, blocks, check=check)


def _assemble_cube(diagram, n, reduced, mark, resolutions, blocks, check=False) -> KRResult:
    # index generators by (q, z2, t) with block offsets per resolution
    layout: dict[tuple[str, ...], list[tuple[int, tuple]]] = {}
    spaces: dict[tuple, list] = {}  # (q, z2, t) -> list of (resolution, local index)
    for choices, rd in resolutions.items():
        gens = rd.absolute_gens()
        slots = []
        for i, (z2, q) in enumerate(gens):
            key = (q, z2, rd.t_degree)
            spaces.setdefault(key, [])
            slots.append((i, key + (len(spaces[key]),)))
            spaces[key].append((choices, i))
        layout[choices] = slots

    pos: dict[tuple[tuple[str, ...], int], tuple] = {}
    for choices, slots in layout.items():
        for i, key in slots:
            pos[(choices, i)] = key  # (q, z2, t, offset)

    # build per (q, z2): complex over t
    by_qz: dict[tuple[int, int], dict[int, int]] = {}
    for (q, z2, t), lst in spaces.items():
        by_qz.setdefault((q, z2), {})[t] = len(lst)

    # matrices per (q, z2, t): map C^t -> C^{t+1}
    mats: dict[tuple[int, int, int], dict[tuple[int, int], object]] = {}
    for (src_choices, tgt_choices), phi in blocks.items():
        t = resolutions[src_choices].t_degree
        for (i_t, i_s), p in phi.entries.items():
            if not p.is_constant():
                raise AssertionError("cube differential has non-constant entries")
            qs, zs, ts, off_s = pos[(src_choices, i_s)]
            qt, zt, tt, off_t = pos[(tgt_choices, i_t)]
            if (qs, zs) != (qt, zt) or tt != ts + 1:
                raise AssertionError("cube differential violates the grading")
            mats.setdefault((qs, zs, ts), {})[(off_t, off_s)] = p.eval_zero()

    poincare_by_parity: dict[int, dict[tuple[int, int], int]] = {0: {}, 1: {}}
    for (q, z2), tdims in sorted(by_qz.items()):
        ts = sorted(tdims)
        # assemble dense blocks and take cohomology over t
        for t in ts:
            dim = tdims[t]
            out_m = mats.get((q, z2, t), {})
            in_m = mats.get((q, z2, t - 1), {})
            out_rows = tdims.get(t + 1, 0)
            in_cols = tdims.get(t - 1, 0)
            from .gradedla import rank_dense

            a = [[out_m.get((r, c), 0) for c in range(dim)] for r in range(out_rows)]
            b = [[in_m.get((r, c), 0) for c in range(in_cols)] for r in range(dim)]
            rank_out = rank_dense([[x for x in row] for row in a]) if out_rows else 0
            rank_in = rank_dense([[x for x in row] for row in b]) if in_cols else 0
            h = dim - rank_out - rank_in
            if h < 0:
                raise AssertionError("negative cohomology dimension")
            if h:
                poincare_by_parity[z2][(t, q)] = (
                    poincare_by_parity[z2].get((t, q), 0) + h
                )
    if check:
        _check_cube_squares_to_zero(resolutions, blocks, pos)

    both = {p: LaurentPoly2(poincare_by_parity[p]) for p in (0, 1)}
    parity = diagram.parity()
    if not reduced:
        nonzero = [p for p in (0, 1) if both[p].terms]
        if len(nonzero) > 1:
            raise AssertionError("unreduced homology occupies both Z2 degrees")
        poincare = both[nonzero[0]] if nonzero else LaurentPoly2()
    else:
        # The two components differ by the grading shift {N-1}; report the
        # upper one, which is the normalisation of the published tables
        # (calibrated on the trefoil).
        p0, p1 = both[0], both[1]
        if p1 == p0.shift(dq=n - 1):
            poincare = p1
        elif p0 == p1.shift(dq=n - 1):
            poincare = p0
        else:
            raise AssertionError("reduced components violate the {N-1} relation")
    return KRResult(
        n=n,
        reduced=reduced,
        mark=mark,
        parity=parity,
        poincare=poincare,
        both_parities=both,
        resolutions=resolutions,
        diagram=diagram,
    )


def _check_cube_squares_to_zero(resolutions, blocks, pos) -> None:
    # d_chi . d_chi = 0, checked block pair by block pair
    by_source: dict[tuple[str, ...], list[tuple[tuple[str, ...], PolyMatrix]]] = {}
    for (src, tgt), phi in blocks.items():
        by_source.setdefault(src, []).append((tgt, phi))
    for src, outs in by_source.items():
        acc: dict[tuple[str, ...], PolyMatrix] = {}
        for mid, phi1 in outs:
            for tgt, phi2 in by_source.get(mid, []):
                comp = phi2 * phi1
                if tgt in acc:
                    acc[tgt] = acc[tgt] + comp
                else:
                    acc[tgt] = comp
        for tgt, m in acc.items():
            if not m.is_zero():
                raise AssertionError("cube differential does not square to zero")


# ---------------------------------------------------------------------------
# Result operators
# ---------------------------------------------------------------------------


def mirror(result: KRResult) -> KRResult:
    return replace(
        result,
        poincare=result.poincare.mirror(),
        both_parities={p: v.mirror() for p, v in result.both_parities.items()},
    )


def euler_characteristic(result: KRResult) -> dict[int, int]:
    return result.poincare.at_t_minus_one()


# ---------------------------------------------------------------------------
# Appendix style structural checks
# ---------------------------------------------------------------------------


def appendix_c_checks(diagram: LinkDiagram, n: int, mark: str) -> dict:
    """Per-resolution module structure and the four-term dimension balance.

    Returns a report dictionary; the ``failures`` list is empty when all
    checks pass.
    """
    report = {"failures": [], "resolutions": 0}
    unred = kr_invariant(diagram, n, reduced=False)
    red = kr_invariant(diagram, n, reduced=True, mark=mark)
    parity = diagram.parity()

    for choices, rd in unred.resolutions.items():
        report["resolutions"] += 1
        gens = rd.absolute_gens()
        z2s = {z for z, _ in gens}
        if len(z2s) > 1:
            report["failures"].append(f"{choices}: resolution homology in both parities")
            continue
        # x action: multiplication by the marked variable
        marked_edge = mark if mark in rd.compiled.web.edges else None
        if marked_edge is None:
            report["failures"].append(f"{choices}: marked edge missing from web")
            continue
        xvar = rd.compiled.web.edges[marked_edge].variable
        vname = rd.compiled.web.edges[marked_edge].origin
        dec = rd.compiled.web.vertex(vname).decoration
        xm = PolyMatrix(
            dec.rank,
            dec.rank,
            {(i, i): Polynomial.variable(xvar) for i in range(dec.rank)},
        )
        act = compile_morphism(rd.compiled, rd.compiled, {vname: xm})
        dense = act.eval_zero_dense()
        dim = len(gens)
        from .gradedla import rank_dense

        if dim % n != 0:
            report["failures"].append(f"{choices}: dim {dim} not divisible by N")
            continue
        blocks_count = dim // n
        power = [row[:] for row in dense]
        ok = True
        for k in range(1, n + 1):
            rk = rank_dense([row[:] for row in power])
            expect = blocks_count * (n - k)
            if rk != expect:
                ok = False
                report["failures"].append(
                    f"{choices}: rank(x^{k}) = {rk}, expected {expect}"
                )
                break
            power = _matmul_dense(power, dense)
        if not ok:
            continue
        # four-term exact sequence dimension balance, degreewise
        h = _dims_by_q(gens)
        red_rd = red.resolutions[choices]
        hb = _split_reduced_dims(red_rd.absolute_gens())
        degs = set()
        for dd in (h, hb[0], hb[1]):
            degs.update(dd)
        lo = min(degs) - 2 * n
        hi = max(degs) + 2 * n
        hbar_p, hbar_p1 = _assign_reduced_parities(hb, n)
        for q in range(lo, hi + 1):
            bal = (
                hbar_p1.get(q - (n - 1), 0)
                - h.get(q, 0)
                + h.get(q + 2, 0)
                - hbar_p.get(q + 2, 0)
            )
            if bal != 0:
                report["failures"].append(f"{choices}: sequence imbalance at q={q}")
                break
    # link level shift relation
    p0, p1 = red.both_parities[0], red.both_parities[1]
    if not (p1 == p0.shift(dq=n - 1) or p0 == p1.shift(dq=n - 1)):
        report["failures"].append("link: reduced parities violate the {N-1} shift")
    return report


def _matmul_dense(a, b):
    n = len(a)
    m = len(b[0]) if b else 0
    k = len(b)
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        for t in range(k):
            x = a[i][t]
            if x:
                for j in range(m):
                    if b[t][j]:
                        out[i][j] += x * b[t][j]
    return out


def _dims_by_q(gens):
    out: dict[int, int] = {}
    for _, q in gens:
        out[q] = out.get(q, 0) + 1
    return out


def _split_reduced_dims(gens):
    out = {0: {}, 1: {}}
    for z2, q in gens:
        out[z2][q] = out[z2].get(q, 0) + 1
    return out


def _assign_reduced_parities(hb, n):
    """Return (H-bar in the parity degree, the other one).

    The parity component is the one whose partner equals it shifted up by
    N - 1.
    """
    a, b = hb[0], hb[1]
    shifted_a = {q + (n - 1): d for q, d in a.items()}
    if shifted_a == b:
        return a, b
    shifted_b = {q + (n - 1): d for q, d in b.items()}
    if shifted_b == a:
        return b, a
    return a, b

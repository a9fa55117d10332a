"""Decorated webs: oriented graphs with potentials on edges and matrix
factorisations on vertices.

State webs built from link diagram resolutions carry the smooth vertex
factorisation or the singular one shifted down by one; marks carry
identity defects.  Edges that loop back to their own vertex are always
subdivided by a mark so that every edge variable appears in exactly one
potential slot of each endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .krbasic import X1, X2, Y1, Y2, make_crossing_data, make_identity_mf
from .mf import GradedMF, shift, tensor
from .poly import Polynomial, Variable, var


class DisjointnessViolation(ValueError):
    """Two distinct edges share a ring variable."""


class PotentialMismatch(ValueError):
    """A vertex factorisation does not square to its edge potential balance."""


class OrientationError(ValueError):
    """Edge orientations are inconsistent at a vertex."""


@dataclass
class WebEdge:
    name: str
    origin: str | None  # vertex name, None = boundary
    target: str | None
    variable: Variable | None  # None once frozen to zero

    def is_internal(self) -> bool:
        return self.origin is not None and self.target is not None


@dataclass
class WebVertex:
    name: str
    kind: str  # "mark" | "smooth" | "singular" | "custom"
    in_edges: tuple[str, ...]
    out_edges: tuple[str, ...]
    decoration: GradedMF


@dataclass
class Web:
    n: int
    vertices: list[WebVertex]
    edges: dict[str, WebEdge]

    @property
    def c(self) -> int:
        return self.n + 1

    def vertex(self, name: str) -> WebVertex:
        for v in self.vertices:
            if v.name == name:
                return v
        raise KeyError(name)

    def edge_potential(self, name: str) -> Polynomial:
        e = self.edges[name]
        if e.variable is None:
            return Polynomial.zero()
        return Polynomial.variable(e.variable) ** (self.n + 1)

    def internal_variables(self) -> list[Variable]:
        return [
            e.variable
            for e in self.edges.values()
            if e.is_internal() and e.variable is not None
        ]

    def external_edges(self) -> list[WebEdge]:
        return [e for e in self.edges.values() if not e.is_internal()]

    def is_closed(self) -> bool:
        return not self.external_edges()

    def total_potential(self) -> Polynomial:
        w = Polynomial.zero()
        for e in self.external_edges():
            if e.origin is None and e.target is None:
                raise OrientationError(f"edge {e.name} has no endpoints")
            if e.target is None:
                w = w + self.edge_potential(e.name)
            else:
                w = w - self.edge_potential(e.name)
        return w


def validate(web: Web) -> None:
    if not web.vertices or not web.edges:
        raise PotentialMismatch("web needs at least one vertex and one edge")
    seen: dict[int, str] = {}
    for e in web.edges.values():
        if e.origin is None and e.target is None:
            raise OrientationError(f"edge {e.name} begins and ends on the boundary")
        if e.variable is not None:
            if e.variable.index in seen:
                raise DisjointnessViolation(
                    f"edges {seen[e.variable.index]} and {e.name} share {e.variable}"
                )
            seen[e.variable.index] = e.name
    names = {v.name for v in web.vertices}
    if len(names) != len(web.vertices):
        raise PotentialMismatch("duplicate vertex names")
    for v in web.vertices:
        w_v = Polynomial.zero()
        for en in v.out_edges:
            if web.edges[en].origin != v.name:
                raise OrientationError(f"edge {en} does not leave vertex {v.name}")
            w_v = w_v + web.edge_potential(en)
        for en in v.in_edges:
            if web.edges[en].target != v.name:
                raise OrientationError(f"edge {en} does not enter vertex {v.name}")
            w_v = w_v - web.edge_potential(en)
        if v.decoration.potential != w_v:
            raise PotentialMismatch(
                f"vertex {v.name}: factorisation potential does not match edges"
            )
        try:
            v.decoration.check()
        except ValueError as exc:
            raise PotentialMismatch(f"vertex {v.name}: {exc}") from exc


def total_mf(web: Web) -> GradedMF:
    """Tensor of vertex factorisations in the fixed vertex order."""
    out = None
    for v in web.vertices:
        out = v.decoration if out is None else tensor(out, v.decoration)
    return out


def parity(web: Web) -> int:
    """Circles of the full smoothing, modulo two.

    Marks connect their edge pair; four-valent vertices connect in-left to
    out-left and in-right to out-right.
    """
    parent: dict[str, str] = {e: e for e in web.edges}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: str, b: str) -> None:
        parent[find(a)] = find(b)

    for v in web.vertices:
        if v.kind == "mark":
            union(v.in_edges[0], v.out_edges[0])
        else:
            union(v.in_edges[0], v.out_edges[0])
            union(v.in_edges[1], v.out_edges[1])
    if any(not e.is_internal() for e in web.edges.values()):
        raise OrientationError("parity requires a closed web")
    return len({find(e) for e in web.edges}) % 2


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _edge_var(name: str, frozen: bool) -> Variable | None:
    return None if frozen else var(name)


def _slot(web_edges: dict[str, WebEdge], name: str) -> Polynomial:
    v = web_edges[name].variable
    return Polynomial.variable(v) if v is not None else Polynomial.zero()


def crossing_decoration(
    n: int,
    kind: str,
    in_left: Polynomial,
    in_right: Polynomial,
    out_left: Polynomial,
    out_right: Polynomial,
    internal_shift: int = 0,
) -> GradedMF:
    data = make_crossing_data(n)
    base = data.xcirc if kind == "smooth" else data.xbul
    sub = {X1: in_left, X2: in_right, Y1: out_left, Y2: out_right}
    out = base.substitute(sub)
    return shift(out, internal_shift) if internal_shift else out


@dataclass
class StateGraph:
    """A resolution of a link diagram: slots per crossing plus free circles."""

    crossings: list[tuple[str, str, str, str]]  # (in_left, in_right, out_left, out_right)
    choices: tuple[str, ...]  # "smooth" | "singular" per crossing
    circles: list[str] = field(default_factory=list)

    def __post_init__(self):
        labels: dict[str, int] = {}
        for slots in self.crossings:
            for s in slots:
                labels[s] = labels.get(s, 0) + 1
        for c in self.circles:
            if c in labels:
                raise OrientationError(f"circle label {c} also used at a crossing")
        for s, k in labels.items():
            if k != 2:
                raise OrientationError(f"arc {s} has {k} crossing endpoints, expected 2")


def state_web_from_resolution(
    graph: StateGraph,
    n: int,
    frozen: Iterable[str] = (),
    singular_shift: int = -1,
) -> Web:
    """Build the closed decorated state web for one resolution.

    Arcs are edges carrying one variable and the potential x^(n+1); frozen
    arcs carry the zero polynomial instead.  Singular vertices receive the
    singular factorisation shifted by ``singular_shift`` (the link theory
    uses -1; the bare MOY webs use 0).  Arcs that would form a loop at a
    single vertex are subdivided by a mark, as are free circles (which get
    two marks so they own at least one variable).
    """
    frozen = set(frozen)
    if len(graph.choices) != len(graph.crossings):
        raise OrientationError("one choice needed per crossing")

    # arc -> (slot occurrences) to locate loops
    occurrences: dict[str, list[tuple[int, int]]] = {}
    for ci, slots in enumerate(graph.crossings):
        for si, s in enumerate(slots):
            occurrences.setdefault(s, []).append((ci, si))

    edges: dict[str, WebEdge] = {}
    vertices: list[WebVertex] = []
    # crossing slot assignments after loop subdivision: per crossing, the
    # edge name occupying each of the four slots
    slot_edges: list[list[str | None]] = [[None] * 4 for _ in graph.crossings]

    def vertex_name(ci: int) -> str:
        return f"c{ci}"

    for arc, occ in sorted(occurrences.items()):
        ins = [o for o in occ if o[1] in (0, 1)]
        outs = [o for o in occ if o[1] in (2, 3)]
        if len(ins) != 1 or len(outs) != 1:
            raise OrientationError(f"arc {arc} is not oriented consistently")
        (ci_in, si_in), (ci_out, si_out) = ins[0], outs[0]
        if ci_in == ci_out:
            # loop: subdivide with a mark
            half1, half2 = f"{arc}", f"{arc}_m"
            fr = arc in frozen
            edges[half1] = WebEdge(half1, vertex_name(ci_out), f"m_{arc}", _edge_var(half1, fr))
            edges[half2] = WebEdge(half2, f"m_{arc}", vertex_name(ci_in), _edge_var(half2, False))
            slot_edges[ci_out][si_out] = half1
            slot_edges[ci_in][si_in] = half2
        else:
            fr = arc in frozen
            edges[arc] = WebEdge(arc, vertex_name(ci_out), vertex_name(ci_in), _edge_var(arc, fr))
            slot_edges[ci_out][si_out] = arc
            slot_edges[ci_in][si_in] = arc

    for arc, occ in sorted(occurrences.items()):
        ins = [o for o in occ if o[1] in (0, 1)]
        outs = [o for o in occ if o[1] in (2, 3)]
        if ins[0][0] == outs[0][0]:
            half1, half2 = f"{arc}", f"{arc}_m"
            dec = make_identity_mf_slots(edges, half1, half2, n)
            vertices.append(
                WebVertex(f"m_{arc}", "mark", (half1,), (half2,), dec)
            )

    for ci, slots in enumerate(graph.crossings):
        il, ir, ol, orr = slot_edges[ci]
        kind = graph.choices[ci]
        dec = crossing_decoration(
            n,
            kind,
            _slot(edges, il),
            _slot(edges, ir),
            _slot(edges, ol),
            _slot(edges, orr),
            internal_shift=singular_shift if kind == "singular" else 0,
        )
        vertices.append(WebVertex(vertex_name(ci), kind, (il, ir), (ol, orr), dec))

    for arc in graph.circles:
        fr = arc in frozen
        e1, e2 = f"{arc}", f"{arc}_m"
        edges[e1] = WebEdge(e1, f"m_{arc}a", f"m_{arc}b", _edge_var(e1, fr))
        edges[e2] = WebEdge(e2, f"m_{arc}b", f"m_{arc}a", _edge_var(e2, False))
        vertices.append(
            WebVertex(f"m_{arc}a", "mark", (e2,), (e1,), make_identity_mf_slots(edges, e2, e1, n))
        )
        vertices.append(
            WebVertex(f"m_{arc}b", "mark", (e1,), (e2,), make_identity_mf_slots(edges, e1, e2, n))
        )

    web = Web(n, vertices, edges)
    validate(web)
    return web


def make_identity_mf_slots(edges: dict[str, WebEdge], in_edge: str, out_edge: str, n: int) -> GradedMF:
    """Identity defect with the incoming or outgoing variable possibly frozen."""
    vi = edges[in_edge].variable
    vo = edges[out_edge].variable
    tmp_in, tmp_out = var("_id_in"), var("_id_out")
    base = make_identity_mf(tmp_in, tmp_out, n)
    sub = {
        tmp_in: Polynomial.variable(vi) if vi is not None else Polynomial.zero(),
        tmp_out: Polynomial.variable(vo) if vo is not None else Polynomial.zero(),
    }
    return base.substitute(sub)


# ---------------------------------------------------------------------------
# Small closed webs used by tests and the self test
# ---------------------------------------------------------------------------


def circle_web(n: int, frozen: bool = False, label: str = "u") -> Web:
    g = StateGraph(crossings=[], choices=(), circles=[label])
    return state_web_from_resolution(g, n, frozen=[label] if frozen else [])


def theta_web(n: int) -> Web:
    """One singular vertex whose right legs close into a marked loop and
    whose left legs close through another mark (the left side of the first
    categorified MOY decomposition), with the plain singular decoration."""
    g = StateGraph(
        crossings=[("a", "l", "a", "l")],
        choices=("singular",),
        circles=[],
    )
    return state_web_from_resolution(g, n, singular_shift=0)


def double_edge_web(n: int, closed: bool = False) -> Web:
    """Two singular vertices joined by two parallel edges.

    Open by default with four boundary legs; the closed variant joins the
    legs pairwise through marks (it is the all-singular Hopf resolution).
    """
    if closed:
        g = StateGraph(
            crossings=[("p", "q", "i1", "i2"), ("i1", "i2", "p", "q")],
            choices=("singular", "singular"),
        )
        return state_web_from_resolution(g, n, singular_shift=0)
    edges = {
        "i1": WebEdge("i1", "v", "w", var("i1")),
        "i2": WebEdge("i2", "v", "w", var("i2")),
        "x4": WebEdge("x4", None, "v", var("x4")),
        "x3": WebEdge("x3", None, "v", var("x3")),
        "x1": WebEdge("x1", "w", None, var("x1v")),
        "x2": WebEdge("x2", "w", None, var("x2v")),
    }
    vertices = [
        WebVertex(
            "v",
            "singular",
            ("x4", "x3"),
            ("i1", "i2"),
            crossing_decoration(
                n,
                "singular",
                Polynomial.variable(var("x4")),
                Polynomial.variable(var("x3")),
                Polynomial.variable(var("i1")),
                Polynomial.variable(var("i2")),
            ),
        ),
        WebVertex(
            "w",
            "singular",
            ("i1", "i2"),
            ("x1", "x2"),
            crossing_decoration(
                n,
                "singular",
                Polynomial.variable(var("i1")),
                Polynomial.variable(var("i2")),
                Polynomial.variable(var("x1v")),
                Polynomial.variable(var("x2v")),
            ),
        ),
    ]
    web = Web(n, vertices, edges)
    validate(web)
    return web

"""Compilation cache: one JSON record per compiled resolution.

Polynomials are serialized as sorted term lists with decimal string
rationals, so records are exact and stable across runs.
"""

from __future__ import annotations

import json
import os
from typing import Sequence

from .compiler import CompiledWeb, EliminateStep, TensorStep, compile_web, web_key
from .gradedla import PolyMatrix
from .mf import GradedMF
from .poly import Polynomial, QQ, var, var_name
from .web import StateGraph, Web, state_web_from_resolution


def poly_to_json(p: Polynomial):
    out = []
    for mono, coeff in p.sorted_terms():
        out.append([[[var_name(i), e] for i, e in mono], str(coeff)])
    return out


def poly_from_json(data) -> Polynomial:
    terms = {}
    for mono, coeff in data:
        key = tuple(sorted((var(nm).index, e) for nm, e in mono))
        terms[key] = QQ(coeff)
    return Polynomial(terms)


def matrix_to_json(m: PolyMatrix):
    return {
        "rows": m.nrows,
        "cols": m.ncols,
        "entries": {f"{i},{j}": poly_to_json(p) for (i, j), p in sorted(m.entries.items())},
    }


def matrix_from_json(data) -> PolyMatrix:
    entries = {}
    for key, val in data["entries"].items():
        i, j = key.split(",")
        entries[(int(i), int(j))] = poly_from_json(val)
    return PolyMatrix(data["rows"], data["cols"], entries)


def compiled_to_json(cw: CompiledWeb):
    steps = []
    for st in cw.trace:
        if isinstance(st, TensorStep):
            steps.append({"kind": "tensor", "vertex": st.vertex})
        else:
            steps.append(
                {
                    "kind": "eliminate",
                    "variable": st.variable,
                    "a": st.a,
                    "sandwiches": [
                        [matrix_to_json(f), matrix_to_json(g)] for f, g in st.sandwiches
                    ],
                }
            )
    return {
        "key": cw.key(),
        "path": cw.path,
        "n_internal": cw.n_internal,
        "gens": [[z, q] for z, q in cw.mf.gens],
        "c": cw.mf.c,
        "potential": poly_to_json(cw.mf.potential),
        "diff": matrix_to_json(cw.mf.diff),
        "trace": steps,
    }


def compiled_from_json(data, web: Web) -> CompiledWeb:
    trace = []
    for st in data["trace"]:
        if st["kind"] == "tensor":
            trace.append(TensorStep(st["vertex"]))
        else:
            trace.append(
                EliminateStep(
                    st["variable"],
                    st["a"],
                    [
                        (matrix_from_json(f), matrix_from_json(g))
                        for f, g in st["sandwiches"]
                    ],
                )
            )
    mf = GradedMF(
        poly_from_json(data["potential"]),
        data["c"],
        [(z, q) for z, q in data["gens"]],
        matrix_from_json(data["diff"]),
    )
    return CompiledWeb(web, list(data["path"]), mf, trace, data["n_internal"])


def _cache_path(cache_dir: str, key: str) -> str:
    return os.path.join(cache_dir, f"{key}.json")


def load_compiled(cache_dir: str, web: Web, path: Sequence[str]) -> CompiledWeb | None:
    key = web_key(web, list(path))
    fn = _cache_path(cache_dir, key)
    if not os.path.exists(fn):
        return None
    with open(fn) as fh:
        data = json.load(fh)
    if data.get("key") != key:
        return None
    return compiled_from_json(data, web)


def store_compiled(cache_dir: str, cw: CompiledWeb) -> None:
    os.makedirs(cache_dir, exist_ok=True)
    fn = _cache_path(cache_dir, cw.key())
    tmp = fn + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(compiled_to_json(cw), fh)
    os.replace(tmp, fn)


# ---------------------------------------------------------------------------
# Parallel compilation of resolutions
# ---------------------------------------------------------------------------


def _compile_one(args):
    slots, choices, circles, n, frozen, path, cache_dir = args
    graph = StateGraph([tuple(s) for s in slots], tuple(choices), list(circles))
    web = state_web_from_resolution(graph, n, frozen=frozen)
    if cache_dir:
        cached = load_compiled(cache_dir, web, path)
        if cached is not None:
            return choices, compiled_to_json(cached)
    cw = compile_web(web, path)
    if cache_dir:
        store_compiled(cache_dir, cw)
    return choices, compiled_to_json(cw)


def compile_resolutions_parallel(
    diagram, n, frozen, path, choice_space, threads, cache_dir
):
    from concurrent.futures import ProcessPoolExecutor

    slots = [c.slots() for c in diagram.crossings]
    jobs = [
        (slots, choices, list(diagram.circles), n, list(frozen), list(path), cache_dir)
        for choices in choice_space
    ]
    out = {}
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for choices, data in pool.map(_compile_one, jobs):
            graph = StateGraph([tuple(s) for s in slots], tuple(choices), list(diagram.circles))
            web = state_web_from_resolution(graph, n, frozen=frozen)
            out[tuple(choices)] = compiled_from_json(data, web)
    return out

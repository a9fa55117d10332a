"""Laurent polynomials in t and q with integer coefficients."""

from __future__ import annotations

from typing import Iterable, Mapping


class LaurentPoly2:
    """Sparse Laurent polynomial in (t, q); Poincare polynomials live here."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], int] | None = None):
        t = {}
        if terms:
            for k, v in terms.items():
                if v:
                    t[(int(k[0]), int(k[1]))] = int(v)
        self.terms = t

    @staticmethod
    def monomial(t: int, q: int, coeff: int = 1) -> "LaurentPoly2":
        return LaurentPoly2({(t, q): coeff})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly2) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        out = dict(self.terms)
        for k, v in other.terms.items():
            n = out.get(k, 0) + v
            if n:
                out[k] = n
            else:
                out.pop(k, None)
        return LaurentPoly2(out)

    def __sub__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        return self + other.scale(-1)

    def scale(self, c: int) -> "LaurentPoly2":
        return LaurentPoly2({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        out: dict[tuple[int, int], int] = {}
        for (t1, q1), v1 in self.terms.items():
            for (t2, q2), v2 in other.terms.items():
                k = (t1 + t2, q1 + q2)
                n = out.get(k, 0) + v1 * v2
                if n:
                    out[k] = n
                else:
                    out.pop(k, None)
        return LaurentPoly2(out)

    def shift(self, dt: int = 0, dq: int = 0) -> "LaurentPoly2":
        return LaurentPoly2({(t + dt, q + dq): v for (t, q), v in self.terms.items()})

    def mirror(self) -> "LaurentPoly2":
        """Substitute q -> 1/q and t -> 1/t."""
        return LaurentPoly2({(-t, -q): v for (t, q), v in self.terms.items()})

    def at_t_minus_one(self) -> dict[int, int]:
        """Graded Euler characteristic: the q-Laurent polynomial at t = -1."""
        out: dict[int, int] = {}
        for (t, q), v in self.terms.items():
            n = out.get(q, 0) + (-1) ** (t % 2) * v
            if n:
                out[q] = n
            else:
                out.pop(q, None)
        return out

    def sorted_terms(self) -> list[tuple[tuple[int, int], int]]:
        return sorted(self.terms.items())

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (t, q), v in self.sorted_terms():
            factors = []
            if v != 1 or (t == 0 and q == 0):
                factors.append(str(v))
            if t:
                factors.append("t" if t == 1 else f"t^{t}")
            if q:
                factors.append("q" if q == 1 else f"q^{q}")
            parts.append("*".join(factors) if factors else "1")
        return " + ".join(parts)


def quantum_bracket(n: int) -> LaurentPoly2:
    """[n] = (q^n - q^-n) / (q - q^-1) at t = 0."""
    return LaurentPoly2({(0, -(n - 1) + 2 * k): 1 for k in range(n)})


def from_q_dict(d: Mapping[int, int], t: int = 0) -> LaurentPoly2:
    return LaurentPoly2({(t, q): v for q, v in d.items()})


def geometric_sum_q(lead: int, step: int, count: int) -> LaurentPoly2:
    """lead * (1 + q^step + ... + q^(step*(count-1))) at t = 0."""
    return LaurentPoly2({(0, lead + step * k): 1 for k in range(count)})

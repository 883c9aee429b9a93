"""Dense univariate polynomials over a valued-field backend.

Coefficients are exact field elements in ascending order with no trailing
zeros.  Provides base-q expansions (repeated Euclidean division by a monic
base, remainder first), formal derivatives with characteristic-p
cancellation, q-monicity tests and Sylvester resultants.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NonMonicBaseError
from .fields import Backend, FieldElem


@dataclass(frozen=True)
class Poly:
    """A dense polynomial; `coeffs` is () for the zero polynomial."""

    backend: Backend
    coeffs: tuple[FieldElem, ...]

    @staticmethod
    def make(backend: Backend, coeffs: Iterable[FieldElem]) -> "Poly":
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        return Poly(backend, tuple(cs))

    @staticmethod
    def from_ints(backend: Backend, ints: Sequence[int]) -> "Poly":
        return Poly.make(backend, [backend.from_int(n) for n in ints])

    @staticmethod
    def constant(backend: Backend, c: FieldElem) -> "Poly":
        return Poly.make(backend, [c])

    @staticmethod
    def x(backend: Backend) -> "Poly":
        return Poly.make(backend, [backend.zero(), backend.one()])

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> FieldElem:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.backend.zero()

    def leading(self) -> FieldElem:
        if self.is_zero():
            return self.backend.zero()
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return not self.is_zero() and self.leading() == self.backend.one()

    def _check(self, other: "Poly") -> None:
        if other.backend != self.backend:
            raise ValueError("polynomials over different backends")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly.make(
            self.backend, [self.coeff(i) + other.coeff(i) for i in range(n)]
        )

    def __neg__(self) -> "Poly":
        return Poly(self.backend, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly(self.backend, ())
        out = [self.backend.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly.make(self.backend, out)

    def scale(self, c: FieldElem) -> "Poly":
        return Poly.make(self.backend, [a * c for a in self.coeffs])

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative polynomial power")
        out = Poly.make(self.backend, [self.backend.one()])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k: int) -> "Poly":
        """Multiply by x**k."""
        if self.is_zero():
            return self
        return Poly(self.backend, (self.backend.zero(),) * k + self.coeffs)

    def eval(self, point: FieldElem) -> FieldElem:
        acc = self.backend.zero()
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def divmod_monic(self, q: "Poly") -> tuple["Poly", "Poly"]:
        """Euclidean division by a monic divisor; exact in any backend."""
        self._check(q)
        if not q.is_monic():
            raise NonMonicBaseError("division base must be monic")
        rem = list(self.coeffs)
        dq = q.degree
        if len(rem) - 1 < dq:
            return Poly(self.backend, ()), self
        quot = [self.backend.zero()] * (len(rem) - dq)
        for top in range(len(rem) - 1, dq - 1, -1):
            c = rem[top]
            if c.is_zero():
                continue
            shift = top - dq
            quot[shift] = c
            for i, qc in enumerate(q.coeffs):
                rem[shift + i] = rem[shift + i] - qc * c
        return Poly.make(self.backend, quot), Poly.make(self.backend, rem[:dq])

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeff(i)
            if c.is_zero():
                continue
            if i == 0:
                parts.append(f"({c})")
            elif i == 1:
                parts.append(f"({c})*x")
            else:
                parts.append(f"({c})*x^{i}")
        return " + ".join(parts)


@dataclass(frozen=True)
class QExpansion:
    """The unique rewriting f = sum f_i q^i with deg f_i < deg q."""

    base: Poly
    coeffs: tuple[Poly, ...]

    def to_poly(self) -> Poly:
        acc = Poly(self.base.backend, ())
        power = Poly.make(self.base.backend, [self.base.backend.one()])
        for c in self.coeffs:
            acc = acc + c * power
            power = power * self.base
        return acc

    def coeff(self, i: int) -> Poly:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Poly(self.base.backend, ())

    def __len__(self):
        return len(self.coeffs)


def q_expand(f: Poly, q: Poly) -> QExpansion:
    """Expand f in powers of the monic base q, remainder first."""
    if not q.is_monic() or q.degree < 1:
        raise NonMonicBaseError("expansion base must be monic of degree >= 1")
    coeffs = []
    rest = f
    while not rest.is_zero():
        rest, rem = rest.divmod_monic(q)
        coeffs.append(rem)
    if not coeffs:
        coeffs = [Poly(f.backend, ())]
    return QExpansion(q, tuple(coeffs))


def derivative(f: Poly) -> Poly:
    """Formal derivative; k * a_k is computed in the coefficient field."""
    out = []
    for k in range(1, len(f.coeffs)):
        out.append(f.coeffs[k] * f.backend.from_int(k))
    return Poly.make(f.backend, out)


def is_q_monic(f: Poly, q: Poly) -> bool:
    """True when the top coefficient of the q-expansion of f equals 1."""
    exp = q_expand(f, q)
    top = exp.coeffs[-1]
    return top.degree == 0 and top.coeff(0) == f.backend.one()


def resultant(f: Poly, g: Poly) -> FieldElem:
    """Sylvester resultant res(f, g) over the coefficient field."""
    m, n = f.degree, g.degree
    if m < 0 or n < 0:
        return f.backend.zero()
    if m == 0:
        return f.coeff(0) ** n
    if n == 0:
        return g.coeff(0) ** m
    size = m + n
    rows = []
    for i in range(n):
        row = [f.backend.zero()] * size
        for j in range(m + 1):
            row[i + j] = f.coeff(m - j)
        rows.append(row)
    for i in range(m):
        row = [f.backend.zero()] * size
        for j in range(n + 1):
            row[i + j] = g.coeff(n - j)
        rows.append(row)
    # Gaussian elimination over the exact field.
    det = f.backend.one()
    sign = 1
    for col in range(size):
        pivot = None
        for r in range(col, size):
            if not rows[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            return f.backend.zero()
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            sign = -sign
        pv = rows[col][col]
        det = det * pv
        for r in range(col + 1, size):
            if rows[r][col].is_zero():
                continue
            factor = rows[r][col] / pv
            rows[r] = [
                rows[r][k] - factor * rows[col][k] for k in range(size)
            ]
    if sign < 0:
        det = -det
    return det

"""Exact valued-field element backends.

Three backends supply the base field (K, v) of a scenario:

* ``padic``  -- rational numbers with the p-adic valuation,
* ``ratfun`` -- rational functions over F_p with the t-adic valuation,
* ``hahn``   -- finite-support generalized power series over F_p with
                rational exponents, valued by the least exponent.

All arithmetic is exact.  Elements are immutable and hashable; mixing
backends (or primes) raises `BackendMismatchError`.  Division is exact
field division; for Hahn elements whose quotient would have infinite
support it raises instead of truncating.
"""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import (
    BackendMismatchError,
    NonNegativeValuationWarning,
    ValkitError,
    ValueNotRepresentableError,
)
from .groups import ExtValue, GroupElem, rat1

_HAHN_DIV_BUDGET = 4096


def _padic_order(x: Fraction, p: int) -> int:
    num, den = x.numerator, x.denominator
    k = 0
    while num % p == 0:
        num //= p
        k += 1
    while den % p == 0:
        den //= p
        k -= 1
    return k


@dataclass(frozen=True)
class PAdicRational:
    """An exact rational carrying the p-adic valuation."""

    value: Fraction
    p: int

    @property
    def backend(self) -> "Backend":
        return Backend("padic", self.p)

    def _coerce(self, other):
        if isinstance(other, int):
            other = PAdicRational(Fraction(other), self.p)
        if not isinstance(other, PAdicRational) or other.p != self.p:
            raise BackendMismatchError(f"cannot combine {self!r} with {other!r}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return PAdicRational(self.value + other.value, self.p)

    def __sub__(self, other):
        other = self._coerce(other)
        return PAdicRational(self.value - other.value, self.p)

    def __neg__(self):
        return PAdicRational(-self.value, self.p)

    def __mul__(self, other):
        other = self._coerce(other)
        return PAdicRational(self.value * other.value, self.p)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero field element")
        return PAdicRational(self.value / other.value, self.p)

    def __pow__(self, k: int):
        if k < 0:
            if self.is_zero():
                raise ZeroDivisionError("inverse of zero")
            return PAdicRational(self.value**k, self.p)
        return PAdicRational(self.value**k, self.p)

    def is_zero(self) -> bool:
        return self.value == 0

    def valuation(self) -> ExtValue:
        if self.is_zero():
            return ExtValue.infinity()
        return ExtValue.of(rat1(_padic_order(self.value, self.p)))

    def __str__(self):
        return str(self.value)


# --- dense F_p[t] helpers (ascending coefficient tuples) -------------------

def _fp_trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _fp_add(a, b, p):
    n = max(len(a), len(b))
    return _fp_trim([( (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _fp_neg(a, p):
    return tuple((-x) % p for x in a)


def _fp_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _fp_trim(out)


def _fp_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv_lead = pow(b[-1], p - 2, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        factor = (a[-1] * inv_lead) % p
        q[shift] = factor
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * y) % p
        a = list(_fp_trim(a))
    return _fp_trim(q), _fp_trim(a)


def _fp_gcd(a, b, p):
    while b:
        a, b = b, _fp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], p - 2, p)
        a = tuple((x * inv) % p for x in a)
    return a


def _fp_order(a) -> int:
    for i, x in enumerate(a):
        if x:
            return i
    raise ValueError("zero polynomial has no order")


@dataclass(frozen=True)
class RationalFunctionElem:
    """An element of F_p(t), reduced, with monic denominator."""

    num: tuple[int, ...]
    den: tuple[int, ...]
    p: int

    @staticmethod
    def make(num, den, p) -> "RationalFunctionElem":
        num = _fp_trim([x % p for x in num])
        den = _fp_trim([x % p for x in den])
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return RationalFunctionElem((), (1,), p)
        g = _fp_gcd(num, den, p)
        if len(g) > 1 or (g and g != (1,)):
            num = _fp_divmod(num, g, p)[0]
            den = _fp_divmod(den, g, p)[0]
        inv = pow(den[-1], p - 2, p)
        num = tuple((x * inv) % p for x in num)
        den = tuple((x * inv) % p for x in den)
        return RationalFunctionElem(num, den, p)

    @property
    def backend(self) -> "Backend":
        return Backend("ratfun", self.p)

    def _coerce(self, other):
        if isinstance(other, int):
            other = RationalFunctionElem.make([other], [1], self.p)
        if not isinstance(other, RationalFunctionElem) or other.p != self.p:
            raise BackendMismatchError(f"cannot combine {self!r} with {other!r}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        num = _fp_add(
            _fp_mul(self.num, other.den, self.p),
            _fp_mul(other.num, self.den, self.p),
            self.p,
        )
        return RationalFunctionElem.make(num, _fp_mul(self.den, other.den, self.p), self.p)

    def __neg__(self):
        return RationalFunctionElem(_fp_neg(self.num, self.p), self.den, self.p)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalFunctionElem.make(
            _fp_mul(self.num, other.num, self.p),
            _fp_mul(self.den, other.den, self.p),
            self.p,
        )

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero field element")
        return RationalFunctionElem.make(
            _fp_mul(self.num, other.den, self.p),
            _fp_mul(self.den, other.num, self.p),
            self.p,
        )

    def __pow__(self, k: int):
        if k < 0:
            return (RationalFunctionElem.make([1], [1], self.p) / self) ** (-k)
        out = RationalFunctionElem.make([1], [1], self.p)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return not self.num

    def valuation(self) -> ExtValue:
        if self.is_zero():
            return ExtValue.infinity()
        return ExtValue.of(rat1(_fp_order(self.num) - _fp_order(self.den)))

    def __str__(self):
        def side(c):
            return "+".join(f"{x}*t^{i}" if i else str(x) for i, x in enumerate(c) if x) or "0"

        if self.den == (1,):
            return side(self.num)
        return f"({side(self.num)})/({side(self.den)})"


@dataclass(frozen=True)
class HahnElem:
    """Finite-support series sum c_e * t^e over F_p, e rational.

    Stored as a sorted tuple of (exponent, coefficient) with coefficients in
    1..p-1.  The valuation is the least exponent of the support.
    """

    terms: tuple[tuple[Fraction, int], ...]
    p: int

    @staticmethod
    def make(mapping, p) -> "HahnElem":
        acc: dict[Fraction, int] = {}
        items = mapping.items() if isinstance(mapping, dict) else mapping
        for e, c in items:
            e = Fraction(e)
            acc[e] = (acc.get(e, 0) + c) % p
        return HahnElem(tuple(sorted((e, c) for e, c in acc.items() if c)), p)

    @property
    def backend(self) -> "Backend":
        return Backend("hahn", self.p)

    def _coerce(self, other):
        if isinstance(other, int):
            other = HahnElem.make({Fraction(0): other}, self.p)
        if not isinstance(other, HahnElem) or other.p != self.p:
            raise BackendMismatchError(f"cannot combine {self!r} with {other!r}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return HahnElem.make(list(self.terms) + list(other.terms), self.p)

    def __neg__(self):
        return HahnElem(tuple((e, (-c) % self.p) for e, c in self.terms), self.p)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        acc: dict[Fraction, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                acc[e] = (acc.get(e, 0) + c1 * c2) % self.p
        return HahnElem(tuple(sorted((e, c) for e, c in acc.items() if c)), self.p)

    def __pow__(self, k: int):
        if k < 0:
            inv = HahnElem.make({Fraction(0): 1}, self.p) / self
            return inv ** (-k)
        out = HahnElem.make({Fraction(0): 1}, self.p)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        """Exact division; raises if the quotient has infinite support."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero field element")
        if len(other.terms) == 1:
            e0, c0 = other.terms[0]
            inv_c = pow(c0, self.p - 2, self.p)
            return HahnElem(
                tuple((e - e0, (c * inv_c) % self.p) for e, c in self.terms), self.p
            )
        # Valuation-ascending long division; terminates iff exact.
        rem = self
        quot: dict[Fraction, int] = {}
        e0, c0 = other.terms[0]
        inv_c = pow(c0, self.p - 2, self.p)
        for _ in range(_HAHN_DIV_BUDGET):
            if rem.is_zero():
                return HahnElem.make(quot, self.p)
            e, c = rem.terms[0]
            qe, qc = e - e0, (c * inv_c) % self.p
            quot[qe] = (quot.get(qe, 0) + qc) % self.p
            rem = rem - HahnElem.make({qe: qc}, self.p) * other
        raise ValueNotRepresentableError(
            "quotient does not have finite support (or exceeds division budget)"
        )

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> ExtValue:
        if self.is_zero():
            return ExtValue.infinity()
        return ExtValue.of(rat1(self.terms[0][0]))

    def frobenius_root(self, k: int = 1) -> "HahnElem":
        """Inverse Frobenius applied k times: exponents divide by p**k.

        Coefficients lie in the prime field and are fixed by p-th roots.
        """
        q = Fraction(1, self.p**k)
        return HahnElem(tuple((e * q, c) for e, c in self.terms), self.p)

    def __str__(self):
        if not self.terms:
            return "0"
        return "+".join(f"{c}*t^({e})" for e, c in self.terms)


FieldElem = Union[PAdicRational, RationalFunctionElem, HahnElem]

_BACKEND_KINDS = ("padic", "ratfun", "hahn")


@dataclass(frozen=True)
class Backend:
    """Constructor handle for one valued-field backend."""

    kind: str
    p: int

    def __post_init__(self):
        if self.kind not in _BACKEND_KINDS:
            raise ValkitError(f"unknown backend {self.kind!r}")
        if self.p < 2:
            raise ValkitError("p must be at least 2")

    @property
    def characteristic(self) -> int:
        return 0 if self.kind == "padic" else self.p

    def zero(self) -> FieldElem:
        return self.from_int(0)

    def one(self) -> FieldElem:
        return self.from_int(1)

    def from_int(self, n: int) -> FieldElem:
        if self.kind == "padic":
            return PAdicRational(Fraction(n), self.p)
        if self.kind == "ratfun":
            return RationalFunctionElem.make([n], [1], self.p)
        return HahnElem.make({Fraction(0): n}, self.p)

    def element_from_value(self, value) -> FieldElem:
        """Some element with the requested valuation (a uniformizer power)."""
        if isinstance(value, ExtValue):
            value = value.expect_finite()
        if isinstance(value, GroupElem):
            if value.rank != 1:
                raise ValueNotRepresentableError("field backends are rank 1")
            value = value.coords[0]
        value = Fraction(value)
        if self.kind == "hahn":
            return HahnElem.make({value: 1}, self.p)
        if value.denominator != 1:
            raise ValueNotRepresentableError(
                f"{self.kind} backend has integer value group; got {value}"
            )
        k = value.numerator
        if self.kind == "padic":
            return PAdicRational(Fraction(self.p) ** k, self.p)
        if k >= 0:
            return RationalFunctionElem.make([0] * k + [1], [1], self.p)
        return RationalFunctionElem.make([1], [0] * (-k) + [1], self.p)

    def parse(self, text: str) -> FieldElem:
        if self.kind == "padic":
            return PAdicRational(Fraction(text.strip()), self.p)
        if self.kind == "hahn":
            return parse_hahn(text, self.p)
        raise ValkitError("ratfun elements are built from num/den coefficient lists")


_HAHN_TERM = re.compile(
    r"""^\s*(?P<c>-?\d+)\s*\*\s*t\s*\^\s*\(\s*(?P<e>-?\d+(?:/\d+)?)\s*\)\s*$"""
)


def parse_hahn(text: str, p: int) -> HahnElem:
    """Parse "c1*t^(e1)+c2*t^(e2)+..." with exact rational exponents."""
    text = text.strip()
    if text == "0":
        return HahnElem.make({}, p)
    terms = []
    for part in text.split("+"):
        m = _HAHN_TERM.match(part)
        if not m:
            raise ValkitError(f"malformed Hahn term {part!r}")
        terms.append((Fraction(m.group("e")), int(m.group("c"))))
    return HahnElem.make(terms, p)


def valuation(a: FieldElem) -> ExtValue:
    """The backend's valuation; infinity on zero."""
    return a.valuation()


def artin_schreier_partial_sum(p: int, a: HahnElem, n: int) -> HahnElem:
    """The partial sum of iterated p-th roots  sum_{i=0..n} a**(1/p**i).

    Exponents divide by p**i; coefficients in the prime field are their own
    p-th roots.  Meaningful for v(a) < 0 (the approximation regime); other
    inputs are allowed but flagged with a warning.
    """
    if not isinstance(a, HahnElem):
        raise BackendMismatchError("partial sums are defined for Hahn elements")
    if not (a.valuation() < rat1(0)):
        warnings.warn(
            "partial sums requested for v(a) >= 0",
            NonNegativeValuationWarning,
            stacklevel=2,
        )
    acc = HahnElem.make({}, p)
    for i in range(n + 1):
        acc = acc + a.frobenius_root(i)
    return acc

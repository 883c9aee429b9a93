"""Key-polynomial sequences: stages, plateau families, normalization.

A sequence consists of finitely many stages of non-decreasing degree
followed by the final (support) polynomial.  A stage is either explicit --
one polynomial with its value data -- or a plateau: an infinite family of
same-degree keys with strictly increasing values and no last element,
materialized lazily through a thread-safe generator so probe budgets apply
uniformly to every consumer.

Built-in plateau families:

* `artin_schreier_family` -- keys x - s_{n-1} over a Hahn backend, where
  s_m sums the first m iterated p-th roots of a;
* `hensel_family` -- keys x - a_n over p-adic rationals, a_n the successive
  lifts of a simple residue root of g, with a construction certificate that
  the key values exceed the term index (hence diverge);
* `ScheduleStage` -- value data only (no field arithmetic): an explicit or
  closed-form law for the key values plus term-value laws for the base-q
  expansion coefficients of g and g'.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import (
    LawMismatchError,
    ScenarioDataError,
    ValkitError,
    ValueNotRepresentableError,
)
from .fields import Backend, FieldElem, HahnElem, artin_schreier_partial_sum
from .groups import ExtValue, FiniteList, GroupElem, ValueSequence, rat1
from .poly import Poly, is_q_monic
from .truncation import NuOracle

FAMILY_BUDGET = 64


@dataclass(frozen=True, order=True)
class KeyIndex:
    """Position in the well-ordered index set: (stage, term).

    Explicit stages use term 0; plateau terms are numbered from 1.
    """

    stage: int
    term: int

    def label(self) -> str:
        return f"{self.stage}.{self.term}"


class PlateauFamily:
    """Lazy family of same-degree keys x - center(n), n = 1, 2, ...

    Materialization is memoized under a lock so concurrent first access
    yields identical terms.  `divergence_bound` (optional) certifies, by
    construction, that the key value at term n is at least `bound(n)` with
    unbounded bounds; scenario builders set it only when the generator
    really guarantees it.
    """

    def __init__(
        self,
        backend: Backend,
        center_fn: Callable[[int], FieldElem],
        degree: int = 1,
        divergence_bound: Callable[[int], GroupElem] | None = None,
        budget: int = FAMILY_BUDGET,
    ):
        self.backend = backend
        self.degree = degree
        self._center_fn = center_fn
        self.divergence_bound = divergence_bound
        self.budget = budget
        self._centers: list[FieldElem] = []
        self._lock = threading.Lock()

    def center(self, n: int) -> FieldElem:
        if n < 1:
            raise ValueError("plateau terms are numbered from 1")
        if n > self.budget:
            raise ValkitError(f"plateau term {n} exceeds the family budget {self.budget}")
        with self._lock:
            while len(self._centers) < n:
                self._centers.append(self._center_fn(len(self._centers) + 1))
            return self._centers[n - 1]

    def poly(self, n: int) -> Poly:
        c = self.center(n)
        return Poly.make(self.backend, [-c, self.backend.one()])


@dataclass(frozen=True)
class ExplicitStage:
    """A single key with optional declared value data (validated later)."""

    poly: Poly
    nu_key: GroupElem | None = None
    nu_key_deriv: GroupElem | None = None

    @property
    def degree(self) -> int:
        return self.poly.degree


@dataclass(frozen=True, eq=False)
class PlateauStage:
    """An infinite same-degree family without a last element."""

    family: PlateauFamily

    @property
    def degree(self) -> int:
        return self.family.degree


@dataclass(frozen=True)
class CoefValueLaw:
    """Term-value law  n -> const + mult * key_value(n)  for one expansion slot.

    `const` None marks an identically-zero coefficient (value infinity).
    """

    const: GroupElem | None
    mult: int


@dataclass(frozen=True, eq=False)
class ScheduleStage:
    """Degree-1 plateau given purely by value data.

    `key_values` lists (or gives in closed form) the key values; the laws
    describe the base-q expansion term values of g and g' at the n-th key.
    """

    key_values: ValueSequence
    g_coef_laws: tuple[CoefValueLaw, ...]
    gprime_coef_laws: tuple[CoefValueLaw, ...]
    nu_gprime: GroupElem
    degree: int = 1

    def key_value(self, n: int) -> GroupElem:
        return self.key_values.term(n - 1)

    def available_terms(self, default: int) -> int:
        if isinstance(self.key_values, FiniteList):
            return len(self.key_values.values)
        return default


KeyStage = ExplicitStage | PlateauStage | ScheduleStage


@dataclass(frozen=True)
class FinalStage:
    """The last element of the sequence: the support polynomial g.

    Schedule-backed sequences carry only its degree.
    """

    poly: Poly | None
    degree: int

    @staticmethod
    def of(g: Poly) -> "FinalStage":
        return FinalStage(g, g.degree)


@dataclass(frozen=True, eq=False)
class KeySequence:
    """Well-ordered key data: stages of non-decreasing degree, then g."""

    stages: tuple[KeyStage, ...]
    final: FinalStage
    p: int
    backend: Backend | None = None

    def __post_init__(self):
        degs = [s.degree for s in self.stages] + [self.final.degree]
        if any(a > b for a, b in zip(degs, degs[1:])):
            raise ScenarioDataError("stage degrees must be non-decreasing")

    @property
    def g(self) -> Poly:
        if self.final.poly is None:
            raise ScenarioDataError("this sequence carries no polynomial for g")
        return self.final.poly

    @property
    def final_index(self) -> KeyIndex:
        return KeyIndex(len(self.stages), 0)

    def key_poly(self, index: KeyIndex) -> Poly:
        if index == self.final_index:
            return self.g
        stage = self.stages[index.stage]
        if isinstance(stage, ExplicitStage):
            if index.term != 0:
                raise ValueError("explicit stages have a single term")
            return stage.poly
        if isinstance(stage, PlateauStage):
            return stage.family.poly(index.term)
        raise ScenarioDataError("schedule stages carry no polynomials")

    def indices(self, terms_per_plateau: int) -> list[KeyIndex]:
        """Materialized view of I* (the final index excluded)."""
        out: list[KeyIndex] = []
        for pos, stage in enumerate(self.stages):
            if isinstance(stage, ExplicitStage):
                out.append(KeyIndex(pos, 0))
            else:
                count = terms_per_plateau
                if isinstance(stage, ScheduleStage):
                    count = stage.available_terms(terms_per_plateau)
                out.extend(KeyIndex(pos, n) for n in range(1, count + 1))
        return out

    def has_plateau(self) -> bool:
        return any(not isinstance(s, ExplicitStage) for s in self.stages)

    def istar_has_max(self) -> bool:
        """Whether the index set below g has a maximal element."""
        if not self.stages:
            return False
        return isinstance(self.stages[-1], ExplicitStage)


def plateaus(ks: KeySequence) -> dict[int, dict]:
    """Per-degree report: does the degree group have a last element?"""
    out: dict[int, dict] = {}
    for stage in ks.stages:
        entry = out.setdefault(stage.degree, {"has_last_element": True})
        if not isinstance(stage, ExplicitStage):
            entry["has_last_element"] = False
    final_entry = out.setdefault(ks.final.degree, {"has_last_element": True})
    final_entry["has_last_element"] = True
    return out


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalizedKey:
    index: KeyIndex
    original: Poly
    scalar: FieldElem  # a with v(a) = nu(Q)
    normalized: Poly   # Q / a, of value 0


class NormalizedSequence:
    """Keys rescaled to value zero: Q~ = Q / a with v(a) = nu(Q)."""

    def __init__(self, ks: KeySequence, nu: NuOracle):
        if ks.backend is None:
            raise ScenarioDataError("normalization needs a field backend")
        self.ks = ks
        self.nu = nu
        self._cache: dict[KeyIndex, NormalizedKey] = {}
        self._lock = threading.Lock()

    def at(self, index: KeyIndex) -> NormalizedKey:
        with self._lock:
            hit = self._cache.get(index)
        if hit is not None:
            return hit
        q = self.ks.key_poly(index)
        value = self.nu.nu(q)
        if value.is_infinite:
            raise ValueNotRepresentableError(
                "the support polynomial has no finite value to normalize by"
            )
        scalar = self.ks.backend.element_from_value(value)
        normalized = q.scale(self.ks.backend.one() / scalar)
        result = NormalizedKey(index, q, scalar, normalized)
        with self._lock:
            self._cache.setdefault(index, result)
        return result


def normalize(ks: KeySequence, nu: NuOracle, terms_per_plateau: int = 8) -> list[NormalizedKey]:
    """Normalized view of the materialized part of the sequence.

    Every normalized key has value 0, and the normalized set is obtained
    from the original by scalar multiples only, so it computes the same
    truncations up to the expected shift.
    """
    view = NormalizedSequence(ks, nu)
    return [view.at(i) for i in ks.indices(terms_per_plateau)]


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    f: Poly
    witness: KeyIndex | None
    value: ExtValue


def completeness_probe(
    ks: KeySequence,
    nu: NuOracle,
    fs: Sequence[Poly],
    terms_per_plateau: int = 8,
) -> list[ProbeResult]:
    """For each f, search a key q with deg(q) <= deg(f) and nu_q(f) = nu(f)."""
    results = []
    candidates = ks.indices(terms_per_plateau) + [ks.final_index]
    for f in fs:
        target = nu.nu(f)
        witness = None
        for index in candidates:
            q = ks.key_poly(index)
            # The degree bound applies to nonconstant f; any base computes
            # the value of a constant.
            if f.degree >= 1 and q.degree > f.degree:
                continue
            if nu.nu_q(f, q) == target:
                witness = index
                break
        results.append(ProbeResult(f, witness, target))
    return results


def validate_sequence(
    ks: KeySequence, nu: NuOracle, terms_per_plateau: int = 8
) -> None:
    """Checkable key-sequence consequences on the materialized prefix.

    Verifies strict value increase inside each plateau, monicity of g over
    every earlier key, and declared stage values where present.
    """
    g = ks.final.poly
    for pos, stage in enumerate(ks.stages):
        if isinstance(stage, ExplicitStage):
            if stage.nu_key is not None:
                got = nu.nu(stage.poly)
                if got != ExtValue.of(stage.nu_key):
                    raise LawMismatchError(
                        f"declared key value {stage.nu_key} != computed {got}"
                    )
            if stage.nu_key_deriv is not None:
                from .poly import derivative

                got = nu.nu(derivative(stage.poly))
                if got != ExtValue.of(stage.nu_key_deriv):
                    raise LawMismatchError(
                        f"declared key derivative value {stage.nu_key_deriv} != computed {got}"
                    )
            if g is not None and not is_q_monic(g, stage.poly):
                raise ScenarioDataError("g is not monic over an explicit key")
        elif isinstance(stage, PlateauStage):
            previous: ExtValue | None = None
            for n in range(1, terms_per_plateau + 1):
                q = stage.family.poly(n)
                value = nu.nu(q)
                if previous is not None and not (previous < value):
                    raise ScenarioDataError(
                        "plateau key values must increase strictly"
                    )
                previous = value
                if g is not None and not is_q_monic(g, q):
                    raise ScenarioDataError("g is not monic over a plateau key")
        else:
            vals = [stage.key_value(n) for n in range(1, stage.available_terms(terms_per_plateau) + 1)]
            if any(not (a < b) for a, b in zip(vals, vals[1:])):
                raise ScenarioDataError("schedule values must increase strictly")


# ---------------------------------------------------------------------------
# Built-in plateau families
# ---------------------------------------------------------------------------

def artin_schreier_family(backend: Backend, a: HahnElem, budget: int = FAMILY_BUDGET) -> PlateauFamily:
    """Keys x - s_{n-1} with s_m the sum of the first m iterated p-th roots.

    Term n = 1 is the key x itself; the n-th key value is v(a)/p**n, read
    off later family members, never assumed.
    """
    p = backend.p

    def center(n: int) -> FieldElem:
        if n == 1:
            return backend.zero()
        # sum_{i=1..n-1} a**(1/p**i)  =  (sum_{i=0..n-1} a**(1/p**i)) - a
        return artin_schreier_partial_sum(p, a, n - 1) - a

    return PlateauFamily(backend, center, degree=1, budget=budget)


def hensel_family(backend: Backend, g: Poly, start: int, budget: int = FAMILY_BUDGET) -> PlateauFamily:
    """Successive lifts of a simple residue root of g over p-adic rationals.

    `start` must satisfy g(start) = 0 mod p with g'(start) a unit, and g
    must have integral coefficients (valuation >= 0): together with the
    integral centers this keeps every expansion slot of g at nonnegative
    coefficient value, which is what lets the truncated values of g
    inherit the divergence certificate.  Each lift appends the unique next
    digit, so the value of g at the n-th center is at least n and strictly
    increasing.
    """
    p = backend.p
    for c in g.coeffs:
        if not c.is_zero() and _padic_unit_order(c.value, p) < 0:
            raise ScenarioDataError(
                "the lift family needs integral polynomial coefficients"
            )

    def g_val(a: int) -> int:
        value = g.eval(backend.from_int(a)).value
        if value == 0:
            raise ScenarioDataError("the family hit an exact rational root of g")
        return _padic_unit_order(value, p)

    if g_val(start) < 1:
        raise ScenarioDataError("start is not a residue root")
    from .poly import derivative

    gp = derivative(g).eval(backend.from_int(start))
    if gp.is_zero() or _padic_unit_order(gp.value, p) != 0:
        raise ScenarioDataError("residue root is not simple")

    centers = [start]
    values = [g_val(start)]
    lock = threading.Lock()

    def extend() -> None:
        a, va = centers[-1], values[-1]
        for t in range(1, p):
            cand = a + t * p**va
            vc = g_val(cand)
            if vc > va:
                centers.append(cand)
                values.append(vc)
                return
        raise ScenarioDataError("lift step found no gaining digit")

    def center(n: int) -> FieldElem:
        with lock:
            while len(centers) < n:
                extend()
            return backend.from_int(centers[n - 1])

    def bound(n: int) -> GroupElem:
        return rat1(n)

    return PlateauFamily(backend, center, degree=1, divergence_bound=bound, budget=budget)


def _padic_unit_order(x: Fraction, p: int) -> int:
    num, den = x.numerator, x.denominator
    k = 0
    while num % p == 0:
        num //= p
        k += 1
    while den % p == 0:
        den //= p
        k -= 1
    return k

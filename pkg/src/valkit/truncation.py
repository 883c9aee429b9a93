"""The valuation with support at a minimal polynomial, and its truncations.

`NuOracle` computes nu(f) = v(f_0(eta)) where f_0 is the remainder of f
modulo the monic minimal polynomial g of eta.  Two modes are provided:

* evaluation mode holds an exact value functional for polynomials of degree
  below deg(g) -- built from an explicit element image, from a norm/resultant
  formula (valid when the valuation extends uniquely), or supplied directly;
* stabilization mode evaluates f_0 along a pseudo-convergent approximation
  family and returns the value once a window of consecutive evaluations
  agrees.  For deg(f_0) < deg(g) the evaluations are eventually constant
  because g has the least degree among unstable polynomials; the window
  guards against accidental early agreement.

`nu_q` is the truncation at a monic base q: the least term value of the
q-expansion.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from typing import Callable

from .errors import (
    NonMonicBaseError,
    StabilizationBudgetExceededError,
    ValkitError,
)
from .fields import FieldElem, valuation
from .groups import ExtValue, min_value
from .poly import Poly, q_expand

DEFAULT_WINDOW = 3
DEFAULT_BUDGET = 64


class NuOracle:
    """Exact oracle for the valuation with support at g."""

    def __init__(
        self,
        g: Poly,
        value_fn: Callable[[Poly], ExtValue] | None = None,
        family: Callable[[int], FieldElem] | None = None,
        window: int = DEFAULT_WINDOW,
        budget: int = DEFAULT_BUDGET,
    ):
        if not g.is_monic() or g.degree < 1:
            raise ValkitError("the support polynomial must be monic of degree >= 1")
        if (value_fn is None) == (family is None):
            raise ValkitError("exactly one of value_fn/family must be given")
        self.g = g
        self._value_fn = value_fn
        self._family = family
        self.window = window
        self.budget = budget
        self._cache: dict[Poly, ExtValue] = {}
        self._lock = threading.Lock()

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_value_fn(g: Poly, fn: Callable[[Poly], ExtValue], **kw) -> "NuOracle":
        return NuOracle(g, value_fn=fn, **kw)

    @staticmethod
    def from_eta_image(g: Poly, image: Callable[[Poly], FieldElem], **kw) -> "NuOracle":
        """Evaluation mode from an explicit model of eta.

        `image` maps a polynomial of degree < deg(g) to its value at eta in
        some exact field; nu is the valuation of that element.
        """
        return NuOracle(g, value_fn=lambda f: valuation(image(f)), **kw)

    @staticmethod
    def from_resultant(g: Poly, **kw) -> "NuOracle":
        """Evaluation mode via v(res(g, f)) / deg(g).

        Valid when the valuation extends uniquely to K[x]/(g), so that all
        conjugates of f(eta) share one value.
        """

        def fn(f: Poly) -> ExtValue:
            from .poly import resultant

            v = valuation(resultant(g, f))
            if v.is_infinite:
                return v
            return ExtValue.of(v.expect_finite().scale(Fraction(1, g.degree)))

        return NuOracle(g, value_fn=fn, **kw)

    @staticmethod
    def stabilization(
        g: Poly,
        family: Callable[[int], FieldElem],
        window: int = DEFAULT_WINDOW,
        budget: int = DEFAULT_BUDGET,
    ) -> "NuOracle":
        """Stabilization mode along the 1-based approximation family."""
        return NuOracle(g, family=family, window=window, budget=budget)

    @property
    def mode(self) -> str:
        return "evaluation" if self._value_fn is not None else "stabilization"

    # -- the valuation ------------------------------------------------------

    def nu(self, f: Poly) -> ExtValue:
        """nu(f) = v(f mod g at eta); infinite exactly on multiples of g."""
        if f in self._cache:
            return self._cache[f]
        f0 = f.divmod_monic(self.g)[1] if f.degree >= self.g.degree else f
        if f0.is_zero():
            result = ExtValue.infinity()
        elif f0.degree == 0:
            result = valuation(f0.coeff(0))
        elif self._value_fn is not None:
            result = self._value_fn(f0)
        else:
            result = self._stabilized_value(f0)
        with self._lock:
            self._cache.setdefault(f, result)
        return result

    def _stabilized_value(self, f0: Poly) -> ExtValue:
        trace: list[ExtValue] = []
        run: ExtValue | None = None
        run_len = 0
        for n in range(1, self.budget + 1):
            point = self._family(n)
            v = valuation(f0.eval(point))
            trace.append(v)
            if v.is_infinite:
                # A transient exact zero (the family walked through a root
                # of f0); it cannot persist since f0 is not a multiple of g.
                run, run_len = None, 0
                continue
            if run is not None and v == run:
                run_len += 1
            else:
                run, run_len = v, 1
            if run_len >= self.window:
                return run
        raise StabilizationBudgetExceededError(
            f"no stabilization window of {self.window} within {self.budget} terms",
            trace=trace,
        )

    def nu_q(self, f: Poly, q: Poly) -> ExtValue:
        """Truncation at monic q: min over i of nu(f_i) + i * nu(q)."""
        if not q.is_monic() or q.degree < 1:
            raise NonMonicBaseError("truncation base must be monic of degree >= 1")
        expansion = q_expand(f, q)
        if len(expansion) == 1:
            return self.nu(expansion.coeff(0))
        if q == self.g:
            # Truncation at the support polynomial: all higher terms are
            # infinite, the constant term carries the value.
            return self.nu(expansion.coeff(0))
        vq = self.nu(q)
        if vq.is_infinite:
            raise ValkitError(
                "truncation base has infinite value but is not the support polynomial"
            )
        terms = []
        for i, c in enumerate(expansion.coeffs):
            if c.is_zero():
                continue
            terms.append(self.nu(c) + vq.expect_finite().scale(i))
        return min_value(terms)

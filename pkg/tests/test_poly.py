"""Dense polynomials: expansions, derivatives, monicity, resultants."""
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from valkit.errors import NonMonicBaseError
from valkit.fields import Backend, HahnElem
from valkit.poly import Poly, derivative, is_q_monic, q_expand, resultant

B2 = Backend("padic", 2)
H2 = Backend("hahn", 2)


def hahn(p, *terms):
    return HahnElem.make({Fraction(e): c for e, c in terms}, p)


class TestQExpand:
    def test_base_x(self):
        f = Poly.from_ints(B2, [2, 1, 1])  # x^2 + x + 2
        exp = q_expand(f, Poly.x(B2))
        assert [c.coeff(0).value for c in exp.coeffs] == [2, 1, 1]

    def test_identity_case(self):
        q = Poly.from_ints(B2, [3, 1])
        exp = q_expand(q, q)
        assert exp.coeffs[0].is_zero()
        assert exp.coeffs[1].coeff(0).value == 1

    def test_artin_schreier_shifted_base(self):
        # f = x^2 - x - t^-1 over F_2((t^Q)); base x - s with s = t^(-1/2)
        # (the first iterated square root of t^-1):
        # f = (x-s)^2 + (x-s) + f(s) with f(s) = s^2 + s + t^-1 = t^(-1/2).
        a = hahn(2, ("-1", 1))
        s = hahn(2, ("-1/2", 1))
        f = Poly.make(H2, [-a, -H2.one(), H2.one()])
        q = Poly.make(H2, [-s, H2.one()])
        exp = q_expand(f, q)
        assert exp.coeffs[0] == Poly.constant(H2, hahn(2, ("-1/2", 1)))
        assert exp.coeffs[1] == Poly.constant(H2, H2.one())
        assert exp.coeffs[2] == Poly.constant(H2, H2.one())
        assert exp.to_poly() == f

    def test_non_monic_base_rejected(self):
        f = Poly.from_ints(B2, [1, 1])
        with pytest.raises(NonMonicBaseError):
            q_expand(f, Poly.from_ints(B2, [0, 2]))


class TestDerivative:
    def test_char_p_cancellation(self):
        # x^p - x - a in characteristic p differentiates to -1
        a = hahn(2, ("-1", 1))
        g = Poly.make(H2, [-a, -H2.one(), H2.one()])
        d = derivative(g)
        assert d == Poly.constant(H2, H2.one())  # -1 == 1 in F_2

        H3 = Backend("hahn", 3)
        a3 = hahn(3, ("-1", 1))
        g3 = Poly.make(H3, [-a3, -H3.one(), H3.zero(), H3.one()])
        assert derivative(g3) == Poly.constant(H3, H3.from_int(-1))

    def test_char_zero_keeps_p(self):
        # x^2 - a over the 2-adics differentiates to 2x
        g = Poly.from_ints(B2, [-3, 0, 1])
        assert derivative(g) == Poly.from_ints(B2, [0, 2])

    def test_constant(self):
        assert derivative(Poly.from_ints(B2, [7])).is_zero()


class TestQMonic:
    def test_monic_quadratic_over_linear(self):
        f = Poly.from_ints(B2, [2, 1, 1])
        assert is_q_monic(f, Poly.from_ints(B2, [-1, 1]))

    def test_non_monic(self):
        f = Poly.from_ints(B2, [0, 0, 2])
        assert not is_q_monic(f, Poly.x(B2))

    @given(st.lists(st.integers(-9, 9), min_size=1, max_size=4), st.integers(-9, 9))
    def test_monic_over_any_linear_base(self, lower, shift):
        f = Poly.from_ints(B2, lower + [1])
        q = Poly.from_ints(B2, [shift, 1])
        assert is_q_monic(f, q)


coeffs = st.lists(st.integers(-9, 9), min_size=0, max_size=5)


class TestAlgebraProperties:
    @given(coeffs, st.lists(st.integers(-9, 9), min_size=1, max_size=2))
    def test_reconstruction(self, fc, qc_lower):
        f = Poly.from_ints(B2, fc)
        q = Poly.from_ints(B2, qc_lower + [1])
        exp = q_expand(f, q)
        assert exp.to_poly() == f
        assert all(c.degree < q.degree for c in exp.coeffs)

    @given(coeffs, coeffs)
    def test_leibniz(self, fc, gc):
        f, g = Poly.from_ints(B2, fc), Poly.from_ints(B2, gc)
        assert derivative(f * g) == derivative(f) * g + f * derivative(g)

    @given(coeffs, coeffs, st.integers(-5, 5))
    def test_derivative_linear(self, fc, gc, k):
        f, g = Poly.from_ints(B2, fc), Poly.from_ints(B2, gc)
        scale = B2.from_int(k)
        assert derivative(f + g.scale(scale)) == derivative(f) + derivative(g).scale(scale)

    @given(coeffs, st.lists(st.integers(-9, 9), min_size=1, max_size=3))
    def test_divmod_identity(self, fc, qc_lower):
        f = Poly.from_ints(B2, fc)
        q = Poly.from_ints(B2, qc_lower + [1])
        quot, rem = f.divmod_monic(q)
        assert quot * q + rem == f
        assert rem.degree < q.degree


class TestResultant:
    def test_resultant_is_product_of_evaluations(self):
        # res(g, f) for monic g = (x-1)(x-3) equals f(1) * f(3)
        g = Poly.from_ints(B2, [3, -4, 1])
        f = Poly.from_ints(B2, [2, 5, 1])
        expected = f.eval(B2.from_int(1)) * f.eval(B2.from_int(3))
        assert resultant(g, f) == expected

    def test_resultant_with_constant(self):
        g = Poly.from_ints(B2, [1, 1, 1])
        c = Poly.from_ints(B2, [5])
        assert resultant(g, c).value == Fraction(25)

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from alkit.calculus import (LocalFunctional, NotExactError, canonical_form, difference,
                            integrate_total_derivative, shift, total_derivative, variational_derivative)
from alkit.rational import RatExpr
from alkit.ring import JET, LATTICE, ModeError, Poly
from strategies import jet_poly, lattice_poly, shifts

P = lambda i=0: Poly.var("P", i, LATTICE)
Q = lambda i=0: Poly.var("Q", i, LATTICE)
th = lambda a, i=0: Poly.odd(a, i, LATTICE)
u = lambda a, i=0: Poly.var(f"u{a}", i, JET)


def test_odd_square_vanishes():
    assert (th(1) * th(1)).is_zero()


def test_odd_generators_anticommute():
    assert (th(1, -1) * th(1) + th(1) * th(1, -1)).is_zero()


def test_even_square():
    assert (Q() - P()) * (Q() - P()) == Q() ** 2 - P() * Q() * 2 + P() ** 2


def test_shift_of_fraction_monomial():
    e = Q() * (P() * P(-1)).inverse()
    assert shift(e, 1) == Q(1) * (P(1) * P()).inverse()


def test_shift_of_c11():
    c11 = Q(1) * (P() * P(1)).inverse() - P().inverse()
    assert shift(c11, -1) == Q() * (P(-1) * P()).inverse() - P(-1).inverse()


def test_mixing_modes_raises():
    with pytest.raises(ModeError):
        P() + u(1)


@given(lattice_poly(), lattice_poly(), lattice_poly())
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(lattice_poly(), lattice_poly(), shifts)
def test_shift_is_a_ring_automorphism(a, b, s):
    assert shift(a * b, s) == shift(a, s) * shift(b, s)
    assert shift(shift(a, s), -s) == a


def test_exact_difference_has_zero_canonical_form():
    assert canonical_form(difference(Q() * th(1) * th(2))).is_zero()


def test_canonical_form_drops_exact_pair():
    e = Q(1) * th(2, 1) - Q() * th(2) + Q() * th(2)
    assert canonical_form(e) == canonical_form(Q() * th(2))


@given(st.integers(-3, 3))
def test_canonical_form_is_shift_invariant(s):
    u2 = lambda i=0: Poly.var("u2", i, LATTICE)
    e = u2() * u2() * th(1, -1) * th(1) * th(2) - u2(-1) * u2() * th(1, -1) * th(1) * th(2, -1)
    assert canonical_form(shift(e, s)) == canonical_form(e)


@given(lattice_poly(names=("Q",)))
def test_variational_derivative_kills_differences(g):
    f = LocalFunctional(difference(g))
    assert variational_derivative(f, "P").is_zero()
    assert variational_derivative(f, "Q").is_zero()


def test_log_density_gradient():
    g0 = LocalFunctional.log(-1, P())
    assert variational_derivative(g0, "P") == -P().inverse()


def test_reference_gradient_of_I():
    u2 = lambda i=0: Poly.var("u2", i, LATTICE)
    I = (-u2(1) * th(1) * th(1, 1) + u2() * th(1) * th(1, -1) - u2(1) * th(1) * th(2, 1)
         + u2() * th(1) * th(2) * 2 - u2() * th(1, -1) * th(2)) * Fraction(1, 2)
    got = variational_derivative(LocalFunctional(I), "u2")
    assert got == th(1) * th(1, -1) - th(1, -1) * th(2) + th(1) * th(2)
    assert variational_derivative(LocalFunctional(I), 2) == u2() * (th(1, -1) - th(1))


def test_total_derivative_basics():
    assert total_derivative(u(1)) == u(1, 1)
    assert total_derivative(Poly.odd(2, 3, JET)) == Poly.odd(2, 4, JET)


@given(jet_poly(), jet_poly())
def test_leibniz(f, g):
    assert total_derivative(f * g) == f * total_derivative(g) + g * total_derivative(f)


@given(jet_poly())
def test_integration_inverts_total_derivative(f):
    f0 = f - Poly.const(f.terms.get(((), ()), 0), JET)
    assert integrate_total_derivative(total_derivative(f0)) == f0


def test_integration_through_generators():
    v1, w = Poly.var("v1", 0, JET), Poly.var("w", 0, JET)
    assert integrate_total_derivative(total_derivative(v1 + w)) == v1 + w


def test_non_exact_integrand_raises():
    v1, v2 = Poly.var("v1", 0, JET), Poly.var("v2", 0, JET)
    with pytest.raises(NotExactError):
        integrate_total_derivative(v1 * Poly.var("v1", 1, JET) * Poly.var("v2", 1, JET))


def test_eval_numeric():
    assert (Q() - P()).evaluate({"P": -5, "Q": 4}) == 9


def test_ratexpr_normalizes():
    x = RatExpr(P() * P() - Q() * Q(), P() - Q())
    assert x.is_laurent() and x.as_poly() == P() + Q()


@given(lattice_poly(names=("P",), allow_negative=False), lattice_poly(names=("Q",), allow_negative=False))
def test_ratexpr_field_identity(a, b):
    x = RatExpr(a, b + Poly.const(7, LATTICE))
    assert (x * RatExpr(b + Poly.const(7, LATTICE))).as_poly() == a

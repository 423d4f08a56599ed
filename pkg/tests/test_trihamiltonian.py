from fractions import Fraction

import pytest

from alkit.calculus import canonical_form
from alkit.lambda_ops import LambdaSeries
from alkit.ring import LATTICE, Poly
from alkit.trihamiltonian import (build_operator, constant_form_check, is_antisymmetric, k22_three_term,
                                  pencil_bracket, schouten_bracket, standard_bivectors, verify_trihamiltonian)

u1 = lambda i=0: Poly.var("u1", i, LATTICE)
u2 = lambda i=0: Poly.var("u2", i, LATTICE)
th = lambda a, i=0: Poly.odd(a, i, LATTICE)
h = Fraction(1, 2)


@pytest.fixture(scope="module")
def bv():
    return standard_bivectors()


@pytest.mark.parametrize("op_id", [1, 2, 3])
def test_antisymmetric(op_id):
    assert is_antisymmetric(build_operator(op_id))


def test_unknown_operator():
    with pytest.raises(ValueError):
        build_operator(4)


def test_k22_three_term_form():
    assert build_operator(3)[1, 1] == k22_three_term()


def test_reference_I(bv):
    I = (-u2(1) * th(1) * th(1, 1) + u2() * th(1) * th(1, -1) - u2(1) * th(1) * th(2, 1)
         + u2() * th(1) * th(2) * 2 - u2() * th(1, -1) * th(2)) * h
    assert canonical_form(I) == bv["I"].canonical


def test_reference_J(bv):
    J = (-u1() * u2() * th(1) * th(2) * 2 + u1(-1) * u2() * th(1, -1) * th(2) + u1() * u2(1) * th(1) * th(2, 1)
         - u2() * u2(-1) * th(2) * th(2, -1) + u2() * u2(1) * th(2) * th(2, 1)) * h
    assert canonical_form(J) == bv["J"].canonical


def test_reference_K(bv):
    K = (-u1(-1) * u1() * u2() * th(1, -1) * th(1)
         + u1() * u2() * u2() * th(1) * th(2) + u1() * u2(-1) * u2() * th(1) * th(2, -1)
         - u1() * u2(1) * u2(1) * th(1) * th(2, 1) - u1() * u2(1) * u2(2) * th(1) * th(2, 2)
         + u1() * u1() * u2(1) * th(1) * th(2, 1) - u1() * u1() * u2() * th(1) * th(2)
         + u1() * u2() * u2(1) * th(2) * th(2, 1) * 2
         - u2() * u2(1) * (u2() + u2(1)) * th(2) * th(2, 1) - u2() * u2(1) * u2(2) * th(2) * th(2, 2))
    assert canonical_form(K) == bv["K"].canonical


def test_all_brackets_vanish():
    reports = verify_trihamiltonian()
    assert len(reports) == 6
    assert all(r.status == "PASS" for r in reports)


def test_pencil_bracket_vanishes():
    assert pencil_bracket().is_zero()


def test_bracket_detects_non_poisson():
    bad = u1() * u2(1) * th(1) * th(1, 1)
    assert not schouten_bracket(bad, bad).is_zero()


def test_bracket_detects_incompatible_pair(bv):
    assert not schouten_bracket(bv["I"], u2() * u2() * th(1) * th(2)).is_zero()


def test_constant_form():
    assert constant_form_check().status == "PASS"


def test_bracket_antisymmetric_in_odd_degree_two(bv):
    a = schouten_bracket(bv["I"], bv["J"])
    b = schouten_bracket(bv["J"], bv["I"])
    assert (a - b).is_zero()  # both vanish; the bracket is symmetric on bivectors

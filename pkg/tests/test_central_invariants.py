import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from alkit.central_invariants import (PAIRS, DiffOp, admissible, canonical_coordinates, central_invariants_at,
                                      compare_printed_blocks, expanded, homogeneity_defects,
                                      hydrodynamic_leading_pair, lambda_closed_form, reproduce_table,
                                      table_value, u)


@pytest.mark.parametrize("name,ok", compare_printed_blocks())
def test_reference_blocks(name, ok):
    assert ok, name


@pytest.mark.parametrize("op_id", [1, 2, 3])
def test_homogeneity(op_id):
    assert homogeneity_defects(expanded(op_id)) == []


def test_leading_pair():
    pair = hydrodynamic_leading_pair(1, 2)
    u1, u2 = u(1), u(2)
    assert pair.g1 == [[u2 * -2, -u2], [-u2, u2 * 0]]
    assert pair.g2 == [[u1 * 0, u1 * u2], [u1 * u2, u2 * u2 * 2]]


def test_diffop_adjoint_involution():
    op = DiffOp.mul(u(1) * u(2)) @ DiffOp.d(2) + DiffOp.mul(u(2, 1))
    assert op.adjoint().adjoint() == op


@pytest.mark.parametrize("u1,u2", [(-3, 1), (1, -4), (Fraction(-1, 2), 2)])
def test_roots_are_negated_closed_form(u1, u2):
    mu = canonical_coordinates(hydrodynamic_leading_pair(1, 2), {"u1": u1, "u2": u2}, exact=True)
    assert sorted(mu) == sorted(-x for x in lambda_closed_form(u1, u2))


def test_closed_form_example():
    assert lambda_closed_form(-3, 1) == (-1, -9)


def test_exact_constant_rows():
    pt = {"u1": -3, "u2": 1}
    assert central_invariants_at(1, 2, pt).c == (Fraction(1, 24), Fraction(1, 24))
    assert central_invariants_at(3, 2, pt).c == (Fraction(-1, 24), Fraction(-1, 24))


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_12_row_is_constant(a, b):
    pt = {"u1": a, "u2": b}
    if not admissible(pt, (1, 2)):
        return
    assert all(abs(c - 1 / 24) < 1e-9 for c in central_invariants_at(1, 2, pt).c)


def test_21_row_against_own_roots():
    pt = {"u1": Fraction(-3), "u2": Fraction(1)}
    r = central_invariants_at(2, 1, pt)
    for mu, c in zip(r.mu, r.c):
        assert c == -1 / (24 * mu)


def test_table_value_sqrt_rows():
    assert math.isclose(table_value((1, 3), 4.0), -1 / 96)


@pytest.mark.parametrize("pair", PAIRS)
def test_table_rows_own_reading(pair):
    (rep,) = reproduce_table(samples=20, pairs=(pair,))
    assert rep.status == "PASS", rep.failures[:1]


@pytest.mark.parametrize("pair", [(2, 1), (1, 3)])
def test_closed_reading_disagrees(pair):
    (rep,) = reproduce_table(samples=10, pairs=(pair,), reading="closed")
    assert rep.status == "FAIL"

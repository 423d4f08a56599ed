import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from alkit.dispersionless import (dispersionless_limit_match, frobenius_data, h_density, h_gradient,
                                  negative_flow, operator_match, recursion_checks, t1_flows,
                                  t1_gradient_defect, theta, theta_printed, change_of_variables_consistent)


def _point(v1, v2):
    return {"v1": v1, "v2": v2, "w": math.exp(v2), "log(v1)": math.log(v1)}


def _h_numeric(k, v1, v2):
    w = math.exp(v2)
    if k == 0:
        return v2 - math.log(v1 - w)
    th = sum(w**s * (v1 - w) ** (k - s) * math.comb(k, s) * math.comb(k - 1 + s, s) for s in range(k + 1))
    return th / math.factorial(k) / (k * (k + 1) * (v1 - w) ** (2 * k))


def test_intersection_form():
    assert frobenius_data().g_matches()


@pytest.mark.parametrize("k", [0, 1, 2])
def test_theta_binomial_matches_printed(k):
    assert theta(k) == theta_printed(k)


def test_theta_rejects_negative():
    with pytest.raises(ValueError):
        theta(-1)


def test_h0_has_no_density():
    with pytest.raises(ValueError):
        h_density(0)


@given(st.floats(2.5, 6.0), st.floats(-1.0, 0.5), st.integers(0, 3))
def test_h_gradient_against_finite_differences(v1, v2, k):
    eps = 1e-6
    pt = _point(v1, v2)
    g1, g2 = (g.evaluate(pt) for g in h_gradient(k))
    fd1 = (_h_numeric(k, v1 + eps, v2) - _h_numeric(k, v1 - eps, v2)) / (2 * eps)
    fd2 = (_h_numeric(k, v1, v2 + eps) - _h_numeric(k, v1, v2 - eps)) / (2 * eps)
    assert math.isclose(g1, fd1, rel_tol=1e-5, abs_tol=1e-8)
    assert math.isclose(g2, fd2, rel_tol=1e-5, abs_tol=1e-8)


def test_recursions():
    bad = [c.name for c in recursion_checks(3) if not c.ok]
    assert bad == []


def test_t1_flows_are_hamiltonian():
    assert all(t1_gradient_defect(f).is_zero() for f in t1_flows(2))


def test_t1_gradient_check_rejects_non_hamiltonian_field():
    from alkit.dispersionless import v
    # X = d_x(v1 v2, v1^2) has no Hamiltonian for P~1
    X = [v(1, 1) * v(2) + v(1) * v(2, 1), v(1) * v(1, 1) * 2]
    assert not t1_gradient_defect(X).is_zero()


def test_s0_flow_matrix():
    # s0 = P~1 grad h_0 with h_0 = v2 - log(v1 - w)
    f = negative_flow(0)
    v1, v2 = 3.0, 0.2
    pt = _point(v1, v2)
    w = math.exp(v2)
    # d^2 h_0 / dv1^2 = 1/(v1-w)^2 sits in row 2 (eta swaps rows)
    assert math.isclose(f.A[1][0].evaluate(pt), 1 / (v1 - w) ** 2, rel_tol=1e-12)


@pytest.mark.parametrize("k", [0, 1, 2])
@pytest.mark.parametrize("d", ["t", "s"])
def test_dispersionless_limit(d, k):
    assert dispersionless_limit_match(k, d).ok


def test_operator_leading_terms():
    assert all(c.ok for c in operator_match())
    assert change_of_variables_consistent().ok

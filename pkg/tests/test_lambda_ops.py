import pytest
from hypothesis import given
from hypothesis import strategies as st

from alkit.hierarchy import LaxContext
from alkit.lambda_ops import INF, LambdaSeries, MatrixLambdaOp, WindowError, compose
from alkit.ring import LATTICE, Poly
from strategies import lattice_poly

P = lambda i=0: Poly.var("P", i, LATTICE)
Q = lambda i=0: Poly.var("Q", i, LATTICE)
S, L = LambdaSeries.scalar, LambdaSeries.lam


@st.composite
def finite_series(draw):
    return LambdaSeries({j: draw(lattice_poly(max_terms=2)) for j in draw(st.sets(st.integers(-2, 2), max_size=3))})


def test_single_term_composition():
    assert L(1) @ (S(Q()) @ L(-1)) == S(Q(1))


def test_adjoint_single_term():
    assert (S(Q()) @ L(-1)).adjoint() == S(Q(1)) @ L(1)


@given(finite_series(), finite_series(), finite_series())
def test_composition_associative(x, y, z):
    assert (x @ y) @ z == x @ (y @ z)


@given(finite_series(), finite_series())
def test_adjoint_reverses_products(x, y):
    assert (x @ y).adjoint() == y.adjoint() @ x.adjoint()
    assert x.adjoint().adjoint() == x


def test_inverse_of_B_depth_2():
    B = S(1) - S(Q()) @ L(-1)
    Binv = B.inverse(2, "down")
    assert Binv.lo == -2 and Binv.hi == INF
    assert Binv.coeffs == {0: Poly.const(1, LATTICE), -1: Q(), -2: Q(-1) * Q()}


def test_inverse_is_inverse_on_window():
    ctx = LaxContext(4)
    prod = compose(ctx.B, ctx.B_inv)
    assert prod.coeff(0) == Poly.const(1, LATTICE)
    for j in range(prod.lo, 0):
        assert prod.coeff(j).is_zero()


def test_window_error_outside_exact_range():
    ctx = LaxContext(2)
    with pytest.raises(WindowError):
        ctx.op("L").coeff(-5)


def test_residues():
    ctx = LaxContext(4)
    assert ctx.op("L").residue() == Q() - P()
    assert ctx.op("M").residue() == Q(1) * (P() * P(1)).inverse() - P().inverse()


def test_projections():
    ctx = LaxContext(4)
    assert ctx.op("L").project_plus() == L(1) + S(Q() - P())
    minus = ctx.op("M").project_minus()
    assert minus.coeff(-1) == Q() * P().inverse()
    assert max(minus.coeffs) == -1


def test_projection_outside_window_raises():
    x = LambdaSeries({3: Q()}, lo=2, hi=INF)
    with pytest.raises(WindowError):
        x.project_plus()


def test_leading_coefficients_of_powers():
    ctx = LaxContext(4)
    assert ctx.coefficient("a", 1, 1) == Q() - P()
    want = Q(1) * (Q(2) + Q(1) - P(1) - P()) + Q() * Q(1) - P() * Q(1) - P() * Q() + P() ** 2
    assert ctx.coefficient("b", 2, 2) == want


def test_matrix_adjoint_is_transpose_of_adjoints():
    m = MatrixLambdaOp([[S(P()), L(1)], [S(Q()) @ L(-1), S(0)]])
    adj = m.adjoint()
    assert adj[0, 1] == (S(Q()) @ L(-1)).adjoint()
    assert adj[1, 0] == L(-1)

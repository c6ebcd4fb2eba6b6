import itertools
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from k3germ.errors import ContractionError, PreconditionError
from k3germ.exactfield import QQ, FieldDescriptor, QuadElem, as_quad, parse_quad
from k3germ.powerseries import Germ, Series, germ_compose, linear_part, substitute
from k3germ.surface import (
    FIBER_VAR,
    P,
    Q,
    SurfaceParams,
    chart_polynomial,
    contraction_closed_form,
    contraction_test,
    homogeneous_equation,
    implicit_solve,
    involution_closed_form,
    involution_germ,
    phi_linear_matrix,
    phi_linear_order,
    singular_points,
    smoothness_condition,
    smoothness_factors,
    validate,
)

BASE = SurfaceParams.parse("0", "1")
x, y, z, w = sp.symbols("x y z w")


def to_sympy(s: Series):
    syms = sp.symbols(s.vars)
    total = sp.Integer(0)
    for exps, c in s.terms():
        coeff = sp.Rational(str(c)) if not c.s else sp.sympify(str(c))
        term = coeff
        for v, e in zip(syms, exps):
            term *= v**e
        total += term
    return sp.expand(total)


def test_chart_polynomial_at_p():
    f = to_sympy(chart_polynomial(BASE, P))
    assert sp.expand(f - ((y**2 + x * y + x**2) * z**2 + (1 + x**2 * y**2) * z + (y**2 + x**2))) == 0


def test_chart_polynomial_at_q_swaps_a_and_b():
    f = to_sympy(chart_polynomial(BASE, Q))
    assert chart_polynomial(BASE, Q).vars == ("x", "y", "w")
    assert sp.expand(f - ((y**2 + x**2) * w**2 + (1 + x**2 * y**2) * w + (y**2 + x * y + x**2))) == 0


def test_chart_polynomial_against_homogeneous_form():
    params = SurfaceParams.parse("3", "-2/5")
    F = homogeneous_equation(params)
    x0, x1, y0, y1, z0, z1 = sorted(F.free_symbols, key=str)
    fp = F.subs({x0: 1, x1: x, y0: 1, y1: y, z0: 1, z1: z})
    fq = F.subs({x0: 1, x1: x, y0: 1, y1: y, z0: w, z1: 1})
    assert sp.expand(fp - to_sympy(chart_polynomial(params, P))) == 0
    assert sp.expand(fq - to_sympy(chart_polynomial(params, Q))) == 0


def test_both_points_lie_on_surface():
    for point in (P, Q):
        assert chart_polynomial(SurfaceParams.parse("5/3", "-7"), point).constant_term() == 0


def test_smoothness_condition_examples():
    assert smoothness_condition(as_quad(0), as_quad(1)) == 300
    assert [int(f.r) for f in smoothness_factors(as_quad(0), as_quad(1))] == [-4, -3, 1, 5, 5]
    for b in ("0", "1", "-7/2"):
        assert smoothness_condition(as_quad(2), as_quad(b)) == 0
    qi = FieldDescriptor(-1)
    assert smoothness_condition(as_quad(0, qi), QuadElem(0, 2, qi)) == 0


rats = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 12))


@given(rats, rats)
def test_smoothness_symmetric(a, b):
    a, b = as_quad(a), as_quad(b)
    assert smoothness_condition(a, b) == smoothness_condition(b, a)
    fa, fb = smoothness_factors(a, b), smoothness_factors(b, a)
    # the first two factors trade places, the rest are each symmetric
    assert (fa[0], fa[1]) == (fb[1], fb[0]) and fa[2:] == fb[2:]


def _assert_singular_witness(params, wit):
    F = homogeneous_equation(params)
    syms = sorted(F.free_symbols, key=str)
    vals = [sp.sympify(str(c)) for c in wit.point]
    sub = dict(zip(syms, vals))
    for expr in [F] + [sp.diff(F, s) for s in syms]:
        assert sp.simplify(expr.subs(sub)) == 0


def test_singular_points_empty_for_base_parameters():
    assert singular_points(BASE) == []
    validate(BASE)


@pytest.mark.parametrize(
    "a,b,d",
    [("2", "0", None), ("0", "2", None), ("0", "3/2", None), ("0", "-3/2", None), ("0", "2*sqrt(-1)", -1)],
)
def test_each_factor_root_is_singular(a, b, d):
    params = SurfaceParams.parse(a, b, d)
    assert smoothness_condition(params.a, params.b) == 0
    wits = singular_points(params)
    assert wits
    for wit in wits:
        if wit.description is None:
            _assert_singular_witness(params, wit)
    with pytest.raises(PreconditionError):
        validate(params)


def test_contraction_examples():
    assert contraction_test(BASE) == {"pi_x": False, "pi_y": False, "pi_z": False}
    assert contraction_test(SurfaceParams.parse("1", "1"))["pi_z"] is True
    eis = SurfaceParams.parse("1", "1/2+1/2*sqrt(-3)", -3)
    rep = contraction_test(eis)
    assert rep["pi_x"] and rep["pi_y"] and not rep["pi_z"]
    with pytest.raises(ContractionError):
        involution_germ(eis, P, "X", 4)


def test_contraction_sweep_matches_closed_form():
    values = ["0", "1", "-1", "1/2", "3", "-5/3"]
    pairs = list(itertools.product(values, repeat=2))[:20]
    assert len(pairs) == 20
    for a, b in pairs:
        params = SurfaceParams.parse(a, b)
        assert contraction_test(params) == contraction_closed_form(params)


def test_implicit_solve_examples():
    assert implicit_solve(BASE, P, 4) == Series.from_terms({(2, 0): -1, (0, 2): -1}, ("x", "y"), 4)
    assert implicit_solve(BASE, P, 2).is_zero()
    params = SurfaceParams.parse("7/3", "-1")
    expected = Series.from_terms({(2, 0): -1, (1, 1): as_quad("-7/3"), (0, 2): -1}, ("x", "y"), 4)
    assert implicit_solve(params, P, 4) == expected


@pytest.mark.parametrize("point", [P, Q])
def test_implicit_solve_residual_vanishes_to_order_16(point):
    params = SurfaceParams.parse("1/2", "3")
    T = 16
    sol = implicit_solve(params, point, T)
    f = chart_polynomial(params, point)
    assert substitute(f, {FIBER_VAR[point]: sol}, target_vars=("x", "y")).truncate(T).is_zero()


def _matrix(g):
    return [[str(c) for c in row] for row in linear_part(g)]


def test_involution_linear_parts_base():
    assert _matrix(involution_germ(BASE, P, "X", 6)) == [["-1", "0"], ["0", "1"]]
    assert _matrix(involution_germ(BASE, Q, "X", 6)) == [["-1", "0"], ["-1", "1"]]


@pytest.mark.parametrize("a,b", [("0", "1"), ("1/2", "3"), ("-2/3", "1/5"), ("3", "0")])
def test_involution_linear_parts_match_lemma(a, b):
    params = SurfaceParams.parse(a, b)
    for point, c in ((P, params.a), (Q, params.b)):
        gx = linear_part(involution_germ(params, point, "X", 4))
        gy = linear_part(involution_germ(params, point, "Y", 4))
        assert gx == [[-1, 0], [-c, 1]]
        assert gy == [[1, -c], [0, -1]]


@pytest.mark.parametrize("a,b,d", [("0", "1", None), ("1/2", "3", None), ("1", "sqrt(2)", 2)])
def test_involutions_are_involutive(a, b, d):
    params = SurfaceParams.parse(a, b, d)
    T = 12
    for point in (P, Q):
        for axis in ("X", "Y"):
            g = involution_germ(params, point, axis, T)
            assert germ_compose(g, g) == Germ.identity(("x", "y"), T, params.field)


def test_vieta_form_matches_printed_formula():
    params = SurfaceParams.parse("1/3", "5")
    for point in (P, Q):
        for axis in ("X", "Y"):
            assert involution_germ(params, point, axis, 9) == involution_closed_form(params, point, axis, 9)


def test_phi_linear_order_examples():
    assert phi_linear_order(as_quad(0)) == 2
    assert phi_linear_order(as_quad(1)) == 3
    assert phi_linear_order(as_quad(-1)) == 3
    assert phi_linear_order(parse_quad("sqrt(2)")) == 4
    assert phi_linear_order(parse_quad("sqrt(3)")) == 6
    assert phi_linear_order(as_quad("1/2")) == float("inf")
    with pytest.raises(PreconditionError):
        phi_linear_order(as_quad(2))


def test_phi_linear_order_golden_ratio():
    # a^2 = a + 1 lies outside {0, 1, 2, 3} yet the matrix has finite order 5
    golden = parse_quad("1/2+1/2*sqrt(5)")
    assert phi_linear_order(golden) == 5


def test_phi_linear_matrix_is_product_of_involutions():
    for a in ("0", "1", "-3/4"):
        params = SurfaceParams.parse(a, "5")
        gx = involution_germ(params, P, "X", 3)
        gy = involution_germ(params, P, "Y", 3)
        # phi = iota_x o iota_y as a map: pullback matrix L(iota_y) L(iota_x)
        lx, ly = linear_part(gx), linear_part(gy)
        prod = [[sum((ly[i][k] * lx[k][j] for k in range(2)), as_quad(0)) for j in range(2)] for i in range(2)]
        assert linear_part(germ_compose(gx, gy)) == prod
        A = as_quad(a)
        assert phi_linear_matrix(A) == [[A * A - 1, -A], [A, as_quad(-1)]]

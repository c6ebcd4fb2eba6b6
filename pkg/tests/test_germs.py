import random

import pytest
from hypothesis import given, settings, strategies as st

from k3germ.errors import (
    BasePointError,
    CoincidentCurvesError,
    FieldError,
    InconclusiveError,
    PrecisionError,
    PreconditionError,
)
from k3germ.exactfield import FieldDescriptor, QuadElem, as_quad
from k3germ.germs import (
    AutGerm,
    CurveGerm,
    build_phi,
    build_psi,
    commutator,
    compose,
    curve_branch,
    gamma_tower,
    intersection_multiplicity,
    jordan_block,
    multiplicity,
    multiplicity_lower_bound,
    parse_word,
    projective_linear_germ,
    word_to_germ,
)
from k3germ.powerseries import Germ, Series, congruence_level, is_identity_mod
from k3germ.surface import P, Q, SurfaceParams

BASE = SurfaceParams.parse("0", "1")
XY = ("x", "y")
QI = FieldDescriptor(-1)


def mat(g):
    return [[str(c) for c in row] for row in g.linear_part()]


def germ(terms_x, terms_y, T):
    return Germ([Series.from_terms(terms_x, XY, T), Series.from_terms(terms_y, XY, T)])


# -- words -------------------------------------------------------------------

def test_parse_word_formats():
    assert parse_word("Z·X·Y·Z") == parse_word("zxyz") == parse_word(["Z", "X", "Y", "Z"]) == ("Z", "X", "Y", "Z")
    with pytest.raises(PreconditionError):
        parse_word("XW")


def test_word_examples():
    T = 8
    assert word_to_germ("XX", BASE, T).forward == Germ.identity(XY, T)
    assert mat(word_to_germ("ZXYZ", BASE, T)) == [["0", "-1"], ["1", "-1"]]
    assert mat(word_to_germ("XY", BASE, T)) == [["-1", "0"], ["0", "-1"]]


def test_odd_z_count_rejected():
    with pytest.raises(BasePointError):
        word_to_germ("ZXY", BASE, 6)
    with pytest.raises(BasePointError):
        word_to_germ("Z", BASE, 6, base=Q)


@pytest.mark.parametrize("word", ["XYZXZ", "ZYXZXY", "XZYZ", "YYXZZ"])
def test_word_times_reverse_is_identity(word):
    T = 7
    w = word_to_germ(word, BASE, T)
    back = word_to_germ(word + word[::-1], BASE, T)
    assert back.forward == Germ.identity(XY, T)
    assert w.check()
    assert compose(w, w.inv()).forward == Germ.identity(XY, T)


def test_base_point_tag():
    assert word_to_germ("XY", BASE, 5, base=Q).base == Q
    assert build_psi(BASE, 5).base == P
    with pytest.raises(BasePointError):
        compose(word_to_germ("X", BASE, 5), word_to_germ("X", BASE, 5, base=Q))


def test_word_at_q_matches_swapped_parameters():
    # the chart at Q is the chart at P with a and b exchanged
    params = SurfaceParams.parse("1/2", "3")
    swapped = SurfaceParams.parse("3", "1/2")
    assert word_to_germ("XYX", params, 7, base=Q).forward == word_to_germ("XYX", swapped, 7).forward


def test_build_phi():
    assert mat(build_phi(4, BASE, 6)) == [["1", "0"], ["0", "1"]]
    with pytest.raises(PreconditionError, match="order 2"):
        build_phi(3, BASE, 6)
    assert mat(build_phi(6, SurfaceParams.parse("1", "5"), 5)) == [["1", "0"], ["0", "1"]]
    with pytest.raises(PreconditionError):
        build_phi(4, SurfaceParams.parse("1", "5"), 5)


def test_build_psi():
    psi = build_psi(BASE, 8)
    assert not is_identity_mod(psi.forward, 2)
    assert mat(psi.pow(3)) == [["1", "0"], ["0", "1"]]
    assert psi.check()


# -- tower -------------------------------------------------------------------

def test_tower_congruences():
    T = 10
    tower = gamma_tower(2, 4, BASE, T)
    assert len(tower) == 3
    for i, g in enumerate(tower):
        assert is_identity_mod(g.forward, i + 1)
        assert g.base == P
    assert is_identity_mod(tower[1].forward, 2)


def test_tower_levels_exact():
    # at a = 0, phi = id mod m^5, and each commutator gains four orders
    tower = gamma_tower(2, 4, BASE, 12)
    assert [congruence_level(g.forward) for g in tower[1:]] == [5, 9]
    assert tower[2].forward != Germ.identity(XY, 12)


def test_tower_with_trivial_psi():
    phi = build_phi(4, BASE, 7)
    g = AutGerm.identity(7, BASE.field)
    for _ in range(3):
        g = commutator(phi, g)
        assert g.forward == Germ.identity(XY, 7)


def test_tower_precision_guard():
    with pytest.raises(PrecisionError):
        gamma_tower(3, 4, BASE, 4)


def test_tower_inverses_consistent():
    tower = gamma_tower(2, 4, BASE, 8)
    assert all(g.check() for g in tower)


# -- multiplicity ------------------------------------------------------------

def test_multiplicity_examples():
    r = multiplicity(germ({(1, 0): 1, (0, 2): 1}, {(0, 1): 1, (3, 0): 1}, 10))
    assert (r.dim, r.certified) == (6, True)
    r = multiplicity(germ({(1, 0): 2}, {(0, 1): 3}, 10))
    assert (r.dim, r.certified, r.K) == (1, True, 1)
    assert r.to_json() == {"dim": 1, "certified": True, "K": 1, "lower_bound": 1}


def test_multiplicity_errors():
    with pytest.raises(InconclusiveError):
        multiplicity(AutGerm.identity(6, BASE.field))
    with pytest.raises(PrecisionError):
        multiplicity(germ({(1, 0): 2}, {(0, 1): 3}, 6), maxK=6)


def test_multiplicity_uncertified_returns_bound():
    # (x + y^5, y + x^5) needs K = 9, beyond maxK
    g = germ({(1, 0): 1, (0, 5): 1}, {(0, 1): 1, (5, 0): 1}, 12)
    r = multiplicity(g, maxK=6)
    assert not r.certified and r.dim is None and r.lower_bound == 15
    assert multiplicity(g).dim == 25


def test_lower_bound_examples():
    assert multiplicity_lower_bound(germ({(1, 0): 2}, {(0, 1): 3}, 8)) == 1
    assert multiplicity_lower_bound(AutGerm.identity(8, BASE.field)) == 36
    tower = gamma_tower(3, 4, BASE, 8)
    assert multiplicity_lower_bound(tower[3]) >= 10


def test_multiplicity_monomial_oracle():
    # displacement (u1 x^a, u2 y^b) with units u_i: the quotient is spanned by x^i y^j, i < a, j < b
    rng = random.Random(7)
    T = 10
    for _ in range(20):
        a, b = rng.randint(1, 4), rng.randint(1, 4)

        def comp(var_exp, lin):
            terms = {lin: 1, var_exp: rng.choice([-2, -1, 1, 2, as_quad("1/3")])}
            # higher terms inside the monomial ideal keep it unchanged
            for _ in range(3):
                i, j = rng.randint(0, 2), rng.randint(0, 2)
                e = (var_exp[0] + i, var_exp[1] + j)
                if sum(e) < T and e != var_exp:
                    terms[e] = rng.randint(-3, 3)
            return terms

        xa = (a, 0) if a > 1 else None
        yb = (0, b) if b > 1 else None
        if xa is None:
            gx = {(1, 0): 2}
        else:
            gx = comp(xa, (1, 0))
        if yb is None:
            gy = {(0, 1): 3}
        else:
            gy = comp(yb, (0, 1))
        r = multiplicity(germ(gx, gy, T))
        assert r.certified and r.dim == a * b, (a, b, gx, gy)
        assert r.dim >= r.lower_bound


def test_multiplicity_stable_in_T():
    for T in (8, 10, 13):
        g = germ({(1, 0): 1, (0, 2): 1, (2, 1): 5}, {(0, 1): 1, (3, 0): -1, (1, 3): 2}, T)
        assert multiplicity(g).dim == 6


def test_gamma1_multiplicity_certified_and_stable():
    dims = set()
    for T in (12, 14):
        g = gamma_tower(1, 4, BASE, T)[1]
        r = multiplicity(g)
        assert r.certified
        assert r.dim >= multiplicity_lower_bound(g)
        dims.add(r.dim)
    assert dims == {25}


@settings(max_examples=25)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(-3, 3))
def test_multiplicity_at_least_lower_bound(a, b, c):
    T = 9
    g = germ({(1, 0): 1, (a + 1, 0): 1, (1, b): c}, {(0, 1): 1, (0, b + 1): 1, (a, 1): c}, T)
    r = multiplicity(g)
    if r.certified:
        assert r.dim >= r.lower_bound


# -- curves --------------------------------------------------------------------

def test_fiber_branch():
    params = SurfaceParams.parse("0", "1", -1)
    c = curve_branch(params, "fiber_z", 8)
    i = QuadElem(0, 1, QI)
    assert c.equation == Series.from_terms({(0, 1): 1, (1, 0): -i}, XY, None, QI)
    assert c.check()
    with pytest.raises(FieldError):
        curve_branch(BASE, "fiber_z", 8)


def test_ramification_branch():
    c = curve_branch(BASE, "ramification_x", 8)
    x_of_t = c.parametrization[0]
    assert x_of_t.vanishing_order() == 5
    assert x_of_t.coeff((5,)) == as_quad("-1/2")
    assert c.check()
    with pytest.raises(PreconditionError):
        curve_branch(BASE, "cusp", 8)


def test_intersection_multiplicity_examples():
    T = 8
    t = Series.var("t", ("t",), T)
    line = CurveGerm(Series.var("y", XY), (t, Series.zero(("t",), T)), "y=0")
    g = germ({(1, 0): 1}, {(0, 1): 1, (3, 0): 1}, T)
    assert intersection_multiplicity(line, g) == 3
    with pytest.raises(CoincidentCurvesError):
        intersection_multiplicity(line, AutGerm.identity(T, BASE.field))


def test_intersection_multiplicity_tower():
    T = 12
    params = SurfaceParams.parse("0", "1", -1)
    tower = gamma_tower(2, 4, BASE, T)
    fiber = curve_branch(params, "fiber_z", T)
    ram = curve_branch(BASE, "ramification_x", T)
    g1 = AutGerm(tower[1].forward.with_field(QI), tower[1].inverse.with_field(QI), P)
    assert intersection_multiplicity(fiber, g1) == 5
    assert intersection_multiplicity(ram, tower[1]) == 5
    assert intersection_multiplicity(ram, tower[2]) == 9


# -- projective linear germs -----------------------------------------------------

@pytest.mark.parametrize("size", [1, 2, 3])
def test_jordan_multiplicity(size):
    g = projective_linear_germ(jordan_block(size), T=10)
    r = multiplicity(g)
    assert (r.dim, r.certified) == (size, True)


def test_projective_examples():
    assert multiplicity(projective_linear_germ([[1, 0, 0], [0, 2, 0], [0, 0, 3]])).dim == 1
    with pytest.raises(InconclusiveError):
        multiplicity(projective_linear_germ([[1, 0, 0], [0, 1, 0], [0, 0, 2]]))
    with pytest.raises(PreconditionError):
        projective_linear_germ([[1, 0, 0], [1, 1, 0], [0, 0, 1]])


def test_jordan_size3_germ_formula():
    # x' = (x + y)/(1 + x), y' = y/(1 + x) for the printed block
    g = projective_linear_germ([[1, 1, 0], [0, 1, 1], [0, 0, 1]], T=6)
    x = g.forward[0]
    assert x.coeff((1, 0)) == 1 and x.coeff((0, 1)) == 1 and x.coeff((2, 0)) == -1 and x.coeff((1, 1)) == -1
    assert g.check()

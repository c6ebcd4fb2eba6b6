"""The (2,2,2) surface family X(a, b) in P1 x P1 x P1 and its involutions.

X is cut out by

    F = Q_a(x, y) z0^2 + (x0^2 y0^2 + x1^2 y1^2) z0 z1 + Q_b(x, y) z1^2,
    Q_c = x0^2 y1^2 + c x0 x1 y0 y1 + x1^2 y0^2.

Two points matter: P = (1:0, 1:0, 1:0) and Q = (1:0, 1:0, 0:1).  Near P
the affine coordinates are x = x1/x0, y = y1/y0, z = z1/z0; near Q the
fiber coordinate is w = z0/z1 and the roles of a and b swap.  On X the
pair (x, y) is a local coordinate system at both points, so every germ
here is a pair of series in (x, y).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import sympy as sp

from . import elimination, linalg
from .errors import ContractionError, ContradictionError, PreconditionError
from .exactfield import QQ, FieldDescriptor, QuadElem, as_quad
from .powerseries import INFINITE, Germ, Series, implicit_solve as _implicit_solve, invert_unit, substitute

P, Q = "P", "Q"
BASE_POINTS = (P, Q)
FIBER_VAR = {P: "z", Q: "w"}


@dataclass(frozen=True)
class SurfaceParams:
    a: QuadElem
    b: QuadElem
    field: FieldDescriptor = QQ

    def __post_init__(self):
        object.__setattr__(self, "a", as_quad(self.a, self.field))
        object.__setattr__(self, "b", as_quad(self.b, self.field))

    @classmethod
    def parse(cls, a="0", b="1", d: int | None = None) -> "SurfaceParams":
        return cls(a, b, FieldDescriptor.from_d(d))

    def to_json(self):
        return {"a": str(self.a), "b": str(self.b), "d": self.field.d}


def _check_point(point):
    if point not in BASE_POINTS:
        raise PreconditionError(f"unknown base point {point!r}; expected 'P' or 'Q'")


def _fiber_params(params: SurfaceParams, point):
    """(c_near, c_far): Q_near is the fiber-constant block, Q_far multiplies fiber^2."""
    _check_point(point)
    return (params.a, params.b) if point == P else (params.b, params.a)


def chart_polynomial(params: SurfaceParams, point=P) -> Series:
    """Exact chart polynomial of X at P (vars x, y, z) or at Q (vars x, y, w)."""
    near, far = _fiber_params(params, point)
    f = FIBER_VAR[point]
    field = params.field
    terms = {}

    def put(e, c):
        c = as_quad(c, field)
        if c:
            terms[e] = terms.get(e, 0) + c

    # (y^2 + far*xy + x^2) f^2 + (1 + x^2 y^2) f + (y^2 + near*xy + x^2)
    for fe, c in ((2, far), (0, near)):
        put((0, 2, fe), 1)
        put((1, 1, fe), c)
        put((2, 0, fe), 1)
    put((0, 0, 1), 1)
    put((2, 2, 1), 1)
    return Series.from_terms(terms, ("x", "y", f), None, field)


def smoothness_condition(a, b) -> QuadElem:
    """(a^2-4)(b^2-4)(ab-2b-2a+3)(ab+2b+2a+3)(b^2-2ab+a^2+4)."""
    if isinstance(a, QuadElem) and not isinstance(b, QuadElem):
        b = as_quad(b, a.field)
    elif isinstance(b, QuadElem) and not isinstance(a, QuadElem):
        a = as_quad(a, b.field)
    elif not isinstance(a, QuadElem):
        a, b = as_quad(a), as_quad(b)
    out = as_quad(1, a.field)
    for fac in smoothness_factors(a, b):
        out = out * fac
    return out


def smoothness_factors(a: QuadElem, b: QuadElem) -> list[QuadElem]:
    return [
        a * a - 4,
        b * b - 4,
        a * b - 2 * b - 2 * a + 3,
        a * b + 2 * b + 2 * a + 3,
        b * b - 2 * a * b + a * a + 4,
    ]


# -- elimination-based checks -------------------------------------------------

_X0, _X1, _Y0, _Y1, _Z0, _Z1 = sp.symbols("x0 x1 y0 y1 z0 z1")
HOMOGENEOUS = ((_X0, _X1), (_Y0, _Y1), (_Z0, _Z1))


def homogeneous_equation(params: SurfaceParams):
    """F as a sympy expression in x0, x1, y0, y1, z0, z1."""
    a = elimination.quad_to_sympy(params.a)
    b = elimination.quad_to_sympy(params.b)

    def Qc(c):
        return _X0**2 * _Y1**2 + c * _X0 * _X1 * _Y0 * _Y1 + _X1**2 * _Y0**2

    return sp.expand(Qc(a) * _Z0**2 + (_X0**2 * _Y0**2 + _X1**2 * _Y1**2) * _Z0 * _Z1 + Qc(b) * _Z1**2)


def _charts(pairs):
    """Affine charts of a product of P1's: for each factor pick which coordinate is 1."""
    for choice in itertools.product((0, 1), repeat=len(pairs)):
        ones = {pair[i]: 1 for pair, i in zip(pairs, choice)}
        free = tuple(pair[1 - i] for pair, i in zip(pairs, choice))
        label = ",".join(f"{pair[i]}=1" for pair, i in zip(pairs, choice))
        yield label, ones, free


@dataclass
class SingularWitness:
    chart: str
    point: tuple[QuadElem, ...] | None  # homogeneous coordinates (x0,x1,y0,y1,z0,z1)
    description: list[str] | None = None  # lex basis when no field-rational point is listed

    def to_json(self):
        return {
            "chart": self.chart,
            "point": None if self.point is None else [str(c) for c in self.point],
            "description": self.description,
        }


def singular_points(params: SurfaceParams) -> list[SingularWitness]:
    """Singular points of X on the 8 affine charts of (P1)^3.

    Every listed point has coordinates in the working field and has been
    substituted back into F and its three partials.  A chart whose singular
    locus has no such point contributes one entry with the triangular lex
    basis of its zeros.  Points lying in several charts are listed once.
    """
    F = homogeneous_equation(params)
    field = params.field
    out, seen = [], set()
    for label, ones, free in _charts(HOMOGENEOUS):
        f = sp.expand(F.subs(ones))
        system = [f] + [sp.diff(f, v) for v in free]
        report = elimination.common_zeros(system, list(free), field)
        if report.empty:
            continue
        if not report.points:
            out.append(SingularWitness(label, None, report.basis))
            continue
        for pt in report.points:
            coords = dict(zip(free, pt))
            hom = []
            for pair in HOMOGENEOUS:
                vals = [as_quad(1, field) if s in ones else coords[s] for s in pair]
                # normalize so that the first nonzero coordinate of each factor is 1
                lead = vals[0] if vals[0] else vals[1]
                hom.extend(v / lead for v in vals)
            key = tuple(hom)
            if key in seen:
                continue
            seen.add(key)
            out.append(SingularWitness(label, key))
    return out


def contraction_closed_form(params: SurfaceParams) -> dict:
    a, b = params.a, params.b
    xy = (a * a - a * b + b * b).is_zero()
    return {"pi_x": xy, "pi_y": xy, "pi_z": a == b}


def _contracts(F, form_vars, base_pairs, field) -> bool:
    # the projection along form_vars contracts a curve iff all coefficients of F
    # as a quadratic form in form_vars vanish at a common point of the base
    u0, u1 = form_vars
    P_ = sp.Poly(F, u0, u1)
    coeffs = [P_.coeff_monomial(u0**i * u1 ** (2 - i)) for i in range(3)]
    for _, ones, free in _charts(base_pairs):
        system = [sp.expand(c.subs(ones)) for c in coeffs]
        if not elimination.common_zeros(system, list(free), field, find_points=False).empty:
            return True
    return False


def contraction_test(params: SurfaceParams) -> dict:
    """Which double covers contract a curve; the closed form is checked by elimination."""
    closed = contraction_closed_form(params)
    F = homogeneous_equation(params)
    direct = {
        "pi_x": _contracts(F, HOMOGENEOUS[0], HOMOGENEOUS[1:], params.field),
        "pi_y": _contracts(F, HOMOGENEOUS[1], (HOMOGENEOUS[0], HOMOGENEOUS[2]), params.field),
        "pi_z": _contracts(F, HOMOGENEOUS[2], HOMOGENEOUS[:2], params.field),
    }
    if direct != closed:
        raise ContradictionError(f"contraction closed form {closed} disagrees with elimination {direct}")
    return closed


# -- germs at P and Q ----------------------------------------------------------

def validate(params: SurfaceParams, axes=("pi_x", "pi_y", "pi_z")):
    """Eager checks before any germ is built: smooth surface, no contracted curves."""
    if smoothness_condition(params.a, params.b).is_zero():
        raise PreconditionError(f"X({params.a}, {params.b}) is singular")
    closed = contraction_closed_form(params)
    bad = [k for k in axes if closed[k]]
    if bad:
        raise ContractionError(f"{', '.join(bad)} contract a curve at a={params.a}, b={params.b}")


def implicit_solve(params: SurfaceParams, point=P, T: int = 10) -> Series:
    """The fiber coordinate (z at P, w at Q) as a series in (x, y) mod degree T."""
    f = chart_polynomial(params, point)
    return _implicit_solve(f.truncate(T), FIBER_VAR[point], T)


def _coefficients_in(f: Series, var: str) -> dict[int, Series]:
    """f = sum_e c_e * var^e with c_e free of var (same ring)."""
    i = f.vars.index(var)
    parts: dict[int, dict] = {}
    for exps, c in f.terms():
        e = exps[i]
        rest = list(exps)
        rest[i] = 0
        parts.setdefault(e, {})[tuple(rest)] = c
    return {e: Series.from_terms(t, f.vars, f.trunc, f.field) for e, t in parts.items()}


def _restrict(g: Series, fiber: str, fiber_series: Series) -> Series:
    """Substitute the fiber series into a polynomial in (x, y, fiber)."""
    return substitute(g, {fiber: fiber_series}, target_vars=("x", "y"))


def involution_germ(params: SurfaceParams, point=P, axis="X", T: int = 10) -> Germ:
    """Germ of iota_x or iota_y at P or Q, by Vieta's formula on the chart polynomial.

    Along the axis variable u the chart polynomial is A2 u^2 + A1 u + A0, so
    the other root is u' = -u - A1/A2; A2 is a unit near the origin.
    """
    if T < 2:
        raise PreconditionError("T must be at least 2")
    if axis not in ("X", "Y"):
        raise PreconditionError(f"axis must be 'X' or 'Y', got {axis!r}")
    validate(params, ("pi_x" if axis == "X" else "pi_y",))
    f = chart_polynomial(params, point)
    fiber = FIBER_VAR[point]
    u = "x" if axis == "X" else "y"
    fib = implicit_solve(params, point, T)
    coeffs = _coefficients_in(f, u)
    A2 = _restrict(coeffs[2], fiber, fib)
    A1 = _restrict(coeffs.get(1, Series.zero(f.vars, None, f.field)), fiber, fib)
    ratio = A1 * invert_unit(A2)
    xs = {v: Series.var(v, ("x", "y"), T, params.field) for v in ("x", "y")}
    moved = -xs[u] - ratio
    comps = (moved, xs["y"]) if axis == "X" else (xs["x"], moved)
    return Germ(comps)


def involution_closed_form(params: SurfaceParams, point=P, axis="X", T: int = 10) -> Germ:
    """The printed formula (-x - (b z^2 + a) y / (z^2 + y^2 z + 1), y) and its mirror.

    At Q the same expression holds with a and b swapped; used to cross-check
    the generic Vieta computation.
    """
    near, far = _fiber_params(params, point)
    fib = implicit_solve(params, point, T)
    vars = ("x", "y")
    x = Series.var("x", vars, T, params.field)
    y = Series.var("y", vars, T, params.field)
    other = y if axis == "X" else x
    num = (fib * fib).scale(far) + Series.constant(near, vars, T, params.field)
    den = fib * fib + other * other * fib + 1
    moved = -(x if axis == "X" else y) - num * other * invert_unit(den)
    return Germ((moved, y) if axis == "X" else (x, moved))


def phi_linear_matrix(a: QuadElem):
    """Pullback of iota_x o iota_y on m/m^2 at P."""
    one = as_quad(1, a.field)
    return [[a * a - one, -a], [a, -one]]


def phi_linear_order(a) -> int | float:
    """Order of the linear part of iota_x o iota_y at P, or INFINITE.

    a^2 = 0, 1, 2, 3 give 2, 3, 4, 6.  Over a quadratic field a few more
    finite orders exist (a^2 = (3+sqrt(5))/2 gives 5), so the order is
    computed, not looked up.  A finite order of a 2x2 matrix whose trace
    lies in a quadratic field divides one of 8, 10, 12, so 12 powers suffice.
    """
    if not isinstance(a, QuadElem):
        a = as_quad(a)
    a2 = a * a
    if a2 == 4:
        raise PreconditionError("a^2 = 4 makes X singular")
    M = phi_linear_matrix(a)
    ident = linalg.identity(2, as_quad(1, a.field), as_quad(0, a.field))
    power, found = M, INFINITE
    for k in range(1, 13):
        if power == ident:
            found = k
            break
        power = linalg.matmul(power, M)
    expected = {0: 2, 1: 3, 2: 4, 3: 6}
    for sq, order in expected.items():
        if a2 == sq and found != order:
            raise ContradictionError(f"linear order {found} at a^2 = {sq}, expected {order}")
    return found


__all__ = [
    "P", "Q", "INFINITE", "SurfaceParams", "chart_polynomial", "smoothness_condition", "smoothness_factors",
    "singular_points", "contraction_test", "contraction_closed_form", "implicit_solve", "involution_germ",
    "involution_closed_form", "phi_linear_order", "phi_linear_matrix", "validate",
]

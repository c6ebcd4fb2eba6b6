"""Automorphism germs built from the three involutions, and their local invariants.

Letters X, Y, Z stand for iota_x, iota_y, iota_z and a word is applied
right to left, like a composition of maps.  Germs at P and at Q both use
the coordinates (x, y), and iota_z preserves x and y, so Z acts on
coordinates as the identity and only moves the base point between P and Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import linalg
from .errors import (
    BasePointError,
    CoincidentCurvesError,
    ContradictionError,
    FieldError,
    InconclusiveError,
    NotInvertibleError,
    PrecisionError,
    PreconditionError,
)
from .exactfield import QQ, QuadElem, as_quad, sqrt_in_field
from .powerseries import (
    INFINITE,
    Germ,
    Series,
    congruence_level,
    germ_compose,
    germ_invert,
    invert_unit,
    linear_part,
    implicit_solve as solve_series,
    key_degree,
    pack,
    substitute,
)
from .surface import P, Q, SurfaceParams, implicit_solve, involution_germ, phi_linear_order, validate

LETTERS = ("X", "Y", "Z")


def parse_word(word) -> tuple[str, ...]:
    """Accept "ZXYZ", "Z·X·Y·Z", "Z*X*Y*Z" or a sequence of letters."""
    if isinstance(word, str):
        letters = tuple(ch for ch in word.upper() if ch not in " ·*.")
    else:
        letters = tuple(str(ch).upper() for ch in word)
    bad = [ch for ch in letters if ch not in LETTERS]
    if bad:
        raise PreconditionError(f"unknown letters {bad} in word {word!r}")
    return letters


@dataclass(frozen=True)
class AutGerm:
    """An automorphism germ together with its inverse, fixing ``base``."""

    forward: Germ
    inverse: Germ
    base: str = P

    @property
    def trunc(self):
        return self.forward.trunc

    @property
    def field(self):
        return self.forward.field

    @classmethod
    def identity(cls, T, field, base=P):
        g = Germ.identity(("x", "y"), T, field)
        return cls(g, g, base)

    @classmethod
    def from_germ(cls, g: Germ, base=P) -> "AutGerm":
        return cls(g, germ_invert(g), base)

    def then(self, other: "AutGerm") -> "AutGerm":
        """``other o self`` (apply self first)."""
        return compose(other, self)

    def inv(self) -> "AutGerm":
        return AutGerm(self.inverse, self.forward, self.base)

    def pow(self, n: int) -> "AutGerm":
        if n < 0:
            return self.inv().pow(-n)
        result = AutGerm.identity(self.trunc, self.field, self.base)
        base = self
        while n:
            if n & 1:
                result = compose(result, base)
            base = compose(base, base)
            n >>= 1
        return result

    def linear_part(self):
        return linear_part(self.forward)

    def check(self) -> bool:
        ident = Germ.identity(self.forward.vars, self.trunc, self.field)
        return germ_compose(self.forward, self.inverse) == ident and germ_compose(self.inverse, self.forward) == ident

    def to_json(self):
        return {"base": self.base, "forward": self.forward.to_json(), "inverse": self.inverse.to_json()}


def compose(g: AutGerm, h: AutGerm) -> AutGerm:
    """``g o h`` with inverse ``h^-1 o g^-1``."""
    if g.base != h.base:
        raise BasePointError(f"cannot compose germs at {g.base} and {h.base}")
    return AutGerm(germ_compose(g.forward, h.forward), germ_compose(h.inverse, g.inverse), g.base)


def commutator(g: AutGerm, h: AutGerm) -> AutGerm:
    """[g, h] = g^-1 o h^-1 o g o h, from stored inverses only."""
    gi_hi = compose(g.inv(), h.inv())
    g_h = compose(g, h)
    return compose(gi_hi, g_h)


@lru_cache(maxsize=64)
def _letter_germ(params: SurfaceParams, point: str, letter: str, T: int) -> Germ:
    return involution_germ(params, point, letter, T)


def word_to_germ(word, params: SurfaceParams, T: int, base=P) -> AutGerm:
    """Germ at ``base`` of the composition spelled by ``word``."""
    letters = parse_word(word)
    if letters.count("Z") % 2:
        raise BasePointError(f"word {''.join(letters)} has an odd number of Z letters and moves {base}")
    if "Z" in letters:
        validate(params, ("pi_z",))
    # right to left: track the base point each letter acts at
    steps = []
    point = base
    for letter in reversed(letters):
        if letter == "Z":
            point = Q if point == P else P
        else:
            steps.append(_letter_germ(params, point, letter, T))
    ident = Germ.identity(("x", "y"), T, params.field)
    fwd = ident
    for g in steps:
        fwd = germ_compose(g, fwd)
    inv = ident
    for g in reversed(steps):
        inv = germ_compose(g, inv)
    return AutGerm(fwd, inv, base)


def _is_identity_matrix(M) -> bool:
    return all((M[i][j] == (1 if i == j else 0)) for i in range(len(M)) for j in range(len(M)))


def build_phi(N: int, params: SurfaceParams, T: int) -> AutGerm:
    """(iota_x o iota_y)^N at P; N must kill the linear part."""
    if N < 2:
        raise PreconditionError("N must be at least 2")
    order = phi_linear_order(params.a)
    if order == INFINITE or N % order:
        raise PreconditionError(f"N = {N} is not a multiple of the linear order {order} of iota_x o iota_y")
    phi = word_to_germ("XY", params, T).pow(N)
    if not _is_identity_matrix(phi.linear_part()):
        raise ContradictionError("phi has a nontrivial linear part")
    return phi


def build_psi(params: SurfaceParams, T: int) -> AutGerm:
    return word_to_germ("ZXYZ", params, T)


def gamma_tower(n: int, N: int, params: SurfaceParams, T: int) -> list[AutGerm]:
    """[gamma_0, ..., gamma_n] with gamma_0 = psi and gamma_i = [phi, gamma_{i-1}]."""
    if n < 0:
        raise PreconditionError("n must be nonnegative")
    if T < n + 2:
        raise PrecisionError(f"T = {T} is too small to see gamma_{n} = id mod m^{n + 1}; need T >= {n + 2}")
    phi = build_phi(N, params, T)
    tower = [build_psi(params, T)]
    for i in range(1, n + 1):
        g = commutator(phi, tower[-1])
        if congruence_level(g.forward) < i + 1:
            raise ContradictionError(f"gamma_{i} is not the identity mod m^{i + 1}")
        tower.append(g)
    return tower


# -- multiplicity ------------------------------------------------------------

@dataclass
class MultiplicityReport:
    dim: int | None
    certified: bool
    K: int | None
    lower_bound: int

    def to_json(self):
        return {"dim": self.dim, "certified": self.certified, "K": self.K, "lower_bound": self.lower_bound}


def _monomials(n, max_deg):
    """Exponent tuples in n variables of total degree <= max_deg, by degree."""
    return [m for deg in range(max_deg + 1) for m in _monomials_of_degree(n, deg)]


def _monomials_of_degree(n, deg):
    if n == 1:
        return [(deg,)]
    return [(f,) + r for f in range(deg, -1, -1) for r in _monomials_of_degree(n - 1, deg - f)]


def _row(series: Series, mono, limit_deg):
    """Coefficients of mono * series up to degree limit_deg, keyed by packed monomial."""
    shift = pack(mono)
    rational = series.field.d is None
    row = {}
    for k in series.keys():
        kk = k + shift
        if key_degree(kk) <= limit_deg:
            row[kk] = series.re[k] if rational else series._coeff_key(k)
    return row


def _dim_quotient(n, K):
    return math.comb(K - 1 + n, n)


def multiplicity_lower_bound(g) -> int:
    """dim R/m^j for the largest j <= T with g = id mod m^j."""
    germ = g.forward if isinstance(g, AutGerm) else g
    j = congruence_level(germ)
    return _dim_quotient(len(germ.vars), j)


def multiplicity(g, maxK: int | None = None) -> MultiplicityReport:
    """Local fixed-point multiplicity dim C[[x]] / (g_i - x_i), certified when possible.

    Looks for the least K <= maxK with m^K inside I + m^{K+1}, I the ideal
    of the displacement; in a complete local ring that forces m^K inside I,
    and the dimension is then read off from coefficients of degree < K.
    """
    germ = g.forward if isinstance(g, AutGerm) else g
    T = germ.trunc
    if maxK is None:
        maxK = T - 1
    if maxK >= T:
        raise PrecisionError(f"maxK = {maxK} needs coefficients beyond the truncation order {T}")
    disp = germ.displacement()
    if any(d.is_zero() for d in disp):
        raise InconclusiveError("a displacement component vanishes to precision; the fixed point is not visibly isolated")
    n = len(germ.vars)
    lower = multiplicity_lower_bound(germ)
    for K in range(1, maxK + 1):
        # m^K in I + m^{K+1}: every degree-K monomial lies in the span of
        # mono * g_i truncated above degree K
        ech = linalg.RowEchelon()
        for mono in _monomials(n, K):
            for d in disp:
                row = _row(d, mono, K)
                if row:
                    ech.add(row)
        if all(ech.contains({pack(m): 1}) for m in _monomials_of_degree(n, K)):
            quotient = linalg.RowEchelon()
            for mono in _monomials(n, K - 1):
                for d in disp:
                    row = _row(d, mono, K - 1)
                    if row:
                        quotient.add(row)
            dim = _dim_quotient(n, K) - quotient.rank
            if dim < lower:
                raise ContradictionError(f"certified multiplicity {dim} is below the congruence bound {lower}")
            return MultiplicityReport(dim, True, K, lower)
    return MultiplicityReport(None, False, None, lower)


# -- curves and intersection multiplicity ------------------------------------

@dataclass(frozen=True)
class CurveGerm:
    """A smooth curve germ through the origin: equation u(x, y) and a parametrization."""

    equation: Series
    parametrization: tuple[Series, Series]
    name: str = ""

    def check(self) -> bool:
        x, y = self.parametrization
        val = substitute(self.equation.truncate(x.trunc), {"x": x, "y": y})
        return val.is_zero()

    def to_json(self):
        return {
            "name": self.name,
            "equation": self.equation.to_json(),
            "parametrization": [s.to_json() for s in self.parametrization],
        }


def _fiber_z_branch(params: SurfaceParams, T: int) -> CurveGerm:
    # {z = 0} near P is Q_a(x, y) = y^2 + a xy + x^2 = 0; take the branch y = r x
    a = params.a
    try:
        disc = sqrt_in_field(a * a - 4)
    except FieldError as exc:
        raise FieldError(f"the branches of z = 0 need sqrt({a * a - 4}), which is not in {params.field}") from exc
    r = (-a + disc) / 2
    field = params.field
    u = Series.from_terms({(0, 1): 1, (1, 0): -r}, ("x", "y"), None, field)
    t = Series.var("t", ("t",), T, field)
    return CurveGerm(u, (t, t.scale(r)), "fiber_z")


def _ramification_x(params: SurfaceParams, T: int) -> CurveGerm:
    # fixed locus of iota_x: E = 2x + (b z^2 + a) y / (z^2 + y^2 z + 1) = 0, solved as x = h(y)
    vars = ("x", "y")
    field = params.field
    z = implicit_solve(params, P, T)
    x = Series.var("x", vars, T, field)
    y = Series.var("y", vars, T, field)
    num = (z * z).scale(params.b) + Series.constant(params.a, vars, T, field)
    E = x.scale(2) + num * y * invert_unit(z * z + y * y * z + 1)
    h = solve_series(E, "x", T)  # a series in ("y",)
    hy = Series.from_terms({(0, e[0]): c for e, c in h.terms()}, vars, T, field)
    t = Series.var("t", ("t",), T, field)
    return CurveGerm(x - hy, (Series(("t",), T, field, h.re, h.im), t), "ramification_x")


def curve_branch(params: SurfaceParams, which: str, T: int) -> CurveGerm:
    if which == "fiber_z":
        c = _fiber_z_branch(params, T)
    elif which == "ramification_x":
        c = _ramification_x(params, T)
    else:
        raise PreconditionError(f"unknown curve {which!r}; expected 'fiber_z' or 'ramification_x'")
    if not c.check():
        raise ContradictionError(f"the parametrization of {which} does not satisfy its equation")
    return c


def intersection_multiplicity(c: CurveGerm, g) -> int:
    """mu_P(C . g^-1 C) = ord_t u(g(x(t), y(t)))."""
    if isinstance(g, AutGerm):
        if g.base != P:
            raise BasePointError("intersection multiplicities are computed at P")
        germ = g.forward
    else:
        germ = g
    if not c.equation.constant_term().is_zero():
        raise PreconditionError("the curve does not pass through the origin")
    x, y = c.parametrization
    T = min(germ.trunc, x.trunc)
    field = germ.field
    if x.field != field:
        x, y = x.with_field(field), y.with_field(field)
    assignment = {"x": x.truncate(T), "y": y.truncate(T)}
    gx = substitute(germ.components[0].truncate(T), assignment)
    gy = substitute(germ.components[1].truncate(T), assignment)
    u = c.equation.with_field(field) if c.equation.field != field else c.equation
    val = substitute(u.truncate(T), {"x": gx, "y": gy})
    order = val.vanishing_order()
    if order == INFINITE or order >= T:
        raise CoincidentCurvesError(f"g^-1(C) agrees with C to order {T}")
    return int(order)


# -- Example: projective linear maps ------------------------------------------

def projective_linear_germ(A, T: int = 10, field=None) -> AutGerm:
    """Germ at [1:0:0] of the linear map A on the chart (x, y) = (x1/x0, x2/x0)."""
    if field is None:
        sample = next((c for row in A for c in row if isinstance(c, QuadElem)), None)
        field = sample.field if sample is not None else QQ
    A = [[as_quad(c, field) for c in row] for row in A]
    if len(A) != 3 or any(len(row) != 3 for row in A):
        raise PreconditionError("A must be 3x3")
    if not (A[1][0].is_zero() and A[2][0].is_zero()):
        raise PreconditionError("A does not fix [1:0:0]")
    if linalg.det(A).is_zero():
        raise NotInvertibleError("A is singular")

    def germ_of(M):
        vars = ("x", "y")
        one = Series.one(vars, T, field)
        x = Series.var("x", vars, T, field)
        y = Series.var("y", vars, T, field)
        h = [one, x, y]

        def row(i):
            s = Series.zero(vars, T, field)
            for j in range(3):
                if not M[i][j].is_zero():
                    s = s + h[j].scale(M[i][j])
            return s

        den = invert_unit(row(0))
        return Germ((row(1) * den, row(2) * den))

    return AutGerm(germ_of(A), germ_of(linalg.inverse(A)), P)


def jordan_block(size: int, n: int = 3, eigenvalue=1, rest=(2, 3)):
    """3x3 matrix whose first Jordan block (eigenvalue 1) has the given size."""
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = eigenvalue if i < size else rest[i - size]
        if i + 1 < size:
            A[i][i + 1] = 1
    return A

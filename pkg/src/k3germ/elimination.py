"""Common zeros of small polynomial systems over Q(sqrt(d)).

Two independent routes, both built on sympy:

* iterated univariate resultants, eliminating the last variable first.  A
  nonzero constant eliminant certifies that the system has no common zero
  over the algebraic closure.  When a resultant vanishes identically the
  variables are sheared by a fixed schedule and the chain is retried.
* a lexicographic Groebner basis, which decides emptiness exactly
  (the basis is {1} iff there is no common zero) and yields a triangular
  description of the zeros otherwise.

The resultant route can only certify emptiness, so a nonconstant eliminant
is settled by the Groebner basis; when both routes conclude they must agree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import sympy as sp

from .errors import ContradictionError, InconclusiveError
from .exactfield import FieldDescriptor, QuadElem, as_quad
from .powerseries import Series

log = logging.getLogger(__name__)

# shear u_i -> u_i + c * u_last, tried in this order when a resultant vanishes
SHEAR_SCHEDULE = (1, 2, -1, 3, 5)


def extension(field: FieldDescriptor):
    return None if field.d is None else sp.sqrt(field.d)


def quad_to_sympy(c: QuadElem):
    r = sp.Rational(int(c.r.numerator), int(c.r.denominator))
    if not c.s:
        return r
    s = sp.Rational(int(c.s.numerator), int(c.s.denominator))
    return r + s * sp.sqrt(c.field.d)


def sympy_to_quad(expr, field: FieldDescriptor) -> QuadElem:
    expr = sp.nsimplify(sp.expand(expr)) if not expr.is_Rational else expr
    if expr.is_Rational:
        return as_quad(str(expr), field)
    if field.d is None:
        raise InconclusiveError(f"{expr} is not rational")
    root = sp.sqrt(field.d)
    coeffs = sp.Poly(sp.expand(expr), root).all_coeffs() if expr.has(root) else [0, expr]
    if len(coeffs) == 1:
        coeffs = [0] + coeffs
    s, r = coeffs[-2], coeffs[-1]
    if not (sp.sympify(r).is_Rational and sp.sympify(s).is_Rational):
        raise InconclusiveError(f"{expr} does not lie in {field}")
    return QuadElem(str(r), str(s), field)


def series_to_sympy(f: Series, symbols):
    out = 0
    for exps, c in f.terms():
        mono = 1
        for s, e in zip(symbols, exps):
            mono *= s**e
        out += quad_to_sympy(c) * mono
    return sp.expand(out)


@dataclass
class ZeroSetReport:
    empty: bool
    resultant_route: str  # "empty", "candidates", or "degenerate"
    eliminant: str | None = None
    shear: int | None = None
    basis: list[str] = field(default_factory=list)
    points: list[tuple[QuadElem, ...]] = field(default_factory=list)

    def to_json(self):
        return {
            "empty": self.empty,
            "resultant_route": self.resultant_route,
            "eliminant": self.eliminant,
            "shear": self.shear,
            "basis": self.basis,
            "points": [[str(c) for c in p] for p in self.points],
        }


def _is_zero(p):
    return sp.expand(p) == 0


def _resultant_chain(polys, gens, ext):
    """Eliminate gens[-1], gens[-2], ... down to gens[0]; returns the gcd eliminant or None."""
    current = [sp.expand(p) for p in polys if not _is_zero(p)]
    for var in reversed(gens[1:]):
        with_var = [p for p in current if sp.degree(p, var) > 0]
        without = [p for p in current if sp.degree(p, var) <= 0]
        if not with_var:
            current = without
            continue
        if len(with_var) == 1:
            # one equation in var can always be solved for var; drop it only
            # if its leading coefficient cannot vanish (otherwise keep it as a
            # constraint through its coefficients)
            lead = sp.Poly(with_var[0], var).LC()
            if sp.expand(lead).free_symbols:
                current = without + sp.Poly(with_var[0], var).all_coeffs()
            else:
                current = without
            continue
        with_var.sort(key=lambda p: (sp.degree(p, var), len(sp.Add.make_args(p))))
        pivot = with_var[0]
        res = []
        for q in with_var[1:]:
            r = sp.resultant(pivot, q, var)
            if _is_zero(r):
                return None
            res.append(sp.expand(r))
        current = without + res
    current = [p for p in current if not _is_zero(p)]
    if not current:
        return None
    kw = {"extension": ext} if ext is not None else {}
    g = current[0]
    for p in current[1:]:
        g = sp.gcd(g, p, **kw)
    return sp.expand(g)


def _groebner(polys, gens, ext):
    kw = {"extension": ext} if ext is not None else {}
    return sp.groebner([sp.expand(p) for p in polys], *gens, order="lex", **kw)


def _field_roots(p, var, ext, field):
    kw = {"extension": ext} if ext is not None else {}
    roots = []
    for fac, _ in sp.factor_list(p, var, **kw)[1]:
        P = sp.Poly(fac, var)
        if P.degree() == 1:
            a1, a0 = P.all_coeffs()
            roots.append(sp.simplify(-a0 / a1))
    out = []
    for r in roots:
        try:
            out.append(sympy_to_quad(r, field))
        except InconclusiveError:
            continue
    return out


def _points_in_field(polys, gens, ext, field, limit=16):
    """Common zeros with all coordinates in the field (zero-dimensional parts only)."""
    if not gens:
        return [()] if all(_is_zero(p) for p in polys) else []
    G = _groebner(polys, gens, ext)
    if list(G.exprs) == [1]:
        return []
    last = gens[-1]
    uni = [p for p in G.exprs if p.free_symbols <= {last} and p.free_symbols]
    if not uni:
        return []
    pts = []
    for r in _field_roots(uni[-1], last, ext, field):
        sub = [sp.expand(p.subs(last, quad_to_sympy(r))) for p in G.exprs]
        for head in _points_in_field(sub, gens[:-1], ext, field, limit):
            pts.append(head + (r,))
            if len(pts) >= limit:
                return pts
    return pts


def common_zeros(polys, gens, field: FieldDescriptor, find_points: bool = True) -> ZeroSetReport:
    """Decide whether sympy polynomials ``polys`` in ``gens`` share a zero over C."""
    ext = extension(field)
    route, eliminant, used_shear = "degenerate", None, None
    for c in (0,) + SHEAR_SCHEDULE:
        if c == 0:
            sheared = polys
        else:
            last = gens[-1]
            sub = {g: g + c * last for g in gens[:-1]}
            sheared = [sp.expand(p.xreplace(sub)) for p in polys]
        g = _resultant_chain(sheared, gens, ext)
        if g is None:
            log.debug("resultant vanished identically; shear %s", c)
            continue
        used_shear = c
        eliminant = str(g)
        route = "empty" if (g.is_number and g != 0) else "candidates"
        break
    G = _groebner(polys, gens, ext)
    empty = list(G.exprs) == [1]
    if route == "empty" and not empty:
        raise ContradictionError("resultant certificate says empty but the Groebner basis is not {1}")
    report = ZeroSetReport(empty=empty, resultant_route=route, eliminant=eliminant, shear=used_shear)
    if not empty:
        report.basis = [str(p) for p in G.exprs]
        if find_points:
            report.points = _points_in_field(polys, gens, ext, field)
            for pt in report.points:
                vals = {g: quad_to_sympy(v) for g, v in zip(gens, pt)}
                if any(sp.simplify(p.subs(vals)) != 0 for p in polys):
                    raise ContradictionError(f"reported witness {pt} is not a common zero")
    return report

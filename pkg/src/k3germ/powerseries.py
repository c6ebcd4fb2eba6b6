"""Sparse exact polynomials and truncated power series over Q(sqrt(d)).

A :class:`Series` in at most three variables either is an exact polynomial
(``trunc is None``) or is known modulo total degree ``trunc``: every stored
monomial has total degree strictly below ``trunc``.  Coefficients are held
as two maps of rationals, the rational part and the sqrt(d) part, so the
hot loop only ever multiplies rationals (see :mod:`k3germ.kernel`).

Germs are tuples of series with zero constant term.  ``germ_compose(g, h)``
is the germ of the *map* ``g o h``; its pullback on functions is
``h* o g*``.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from . import kernel
from .errors import (
    NotAUnitError,
    NotInvertibleError,
    PrecisionError,
    PreconditionError,
    VariableMismatchError,
)
from .exactfield import QQ, FieldDescriptor, QuadElem, as_quad, format_quad, rational
from . import linalg

DEG_SHIFT = 48
SLOT = 0xFFFF
MAX_VARS = 3
MAX_EXP = 1 << 15
INFINITE = math.inf
VAR_ORDER = ("x", "y", "z", "w")

_ZERO = mpq(0)


def pack(exps: Sequence[int]) -> int:
    key = sum(exps) << DEG_SHIFT
    for i, e in enumerate(exps):
        if e < 0 or e >= MAX_EXP:
            raise PreconditionError(f"exponent {e} out of range")
        key |= e << (32 - 16 * i)
    return key


def unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (32 - 16 * i)) & SLOT for i in range(n))


def key_degree(key: int) -> int:
    return key >> DEG_SHIFT


def _limit(trunc):
    return None if trunc is None else trunc << DEG_SHIFT


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _clip(d: dict, limit) -> dict:
    if limit is None:
        return d
    return {k: v for k, v in d.items() if k < limit}


def _add_maps(a: dict, b: dict, sign: int, limit) -> dict:
    out = _clip(dict(a), limit)
    for k, v in b.items():
        if limit is not None and k >= limit:
            continue
        s = out.get(k, 0) + v if sign > 0 else out.get(k, 0) - v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _mul_pair(ar, ai, br, bi, limit, d):
    """Product of (ar + sqrt(d) ai)(br + sqrt(d) bi) as a pair of maps."""
    mul = kernel.mul
    re = mul(ar, br, limit)
    if not ai and not bi:
        return re, {}
    im = {}
    if ai and bi:
        re = _add_maps(re, {k: d * v for k, v in mul(ai, bi, limit).items()}, 1, None)
    if bi:
        im = mul(ar, bi, limit)
    if ai:
        im = _add_maps(im, mul(ai, br, limit), 1, None)
    return re, im


def _scale_pair(re, im, c: QuadElem, d):
    if c.is_zero():
        return {}, {}
    r, s = c.r, c.s
    nre = {k: r * v for k, v in re.items()} if r else {}
    nim = {k: r * v for k, v in im.items()} if r else {}
    if s:
        nre = _add_maps(nre, {k: d * s * v for k, v in im.items()}, 1, None)
        nim = _add_maps(nim, {k: s * v for k, v in re.items()}, 1, None)
    return nre, nim


class Series:
    """Exact polynomial or truncated power series; immutable by convention."""

    __slots__ = ("vars", "trunc", "field", "re", "im")

    def __init__(self, vars, trunc, field, re=None, im=None):
        vars = tuple(vars)
        if not 1 <= len(vars) <= MAX_VARS:
            raise VariableMismatchError("a series needs between 1 and 3 variables")
        if len(set(vars)) != len(vars):
            raise VariableMismatchError(f"repeated variable in {vars}")
        if trunc is not None and (not isinstance(trunc, int) or trunc < 0):
            raise PreconditionError(f"invalid truncation order {trunc!r}")
        self.vars = vars
        self.trunc = trunc
        self.field = field
        limit = _limit(trunc)
        self.re = {k: v for k, v in (re or {}).items() if v and (limit is None or k < limit)}
        self.im = {k: v for k, v in (im or {}).items() if v and (limit is None or k < limit)}
        if self.im and field.d is None:
            raise PreconditionError("irrational coefficients in a rational series")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, vars, trunc=None, field: FieldDescriptor = QQ) -> "Series":
        return cls(vars, trunc, field)

    @classmethod
    def constant(cls, c, vars, trunc=None, field: FieldDescriptor = QQ) -> "Series":
        c = as_quad(c, field)
        return cls(vars, trunc, field, {0: c.r}, {0: c.s})

    @classmethod
    def one(cls, vars, trunc=None, field: FieldDescriptor = QQ) -> "Series":
        return cls.constant(1, vars, trunc, field)

    @classmethod
    def var(cls, name, vars, trunc=None, field: FieldDescriptor = QQ) -> "Series":
        vars = tuple(vars)
        if name not in vars:
            raise VariableMismatchError(f"{name!r} is not one of {vars}")
        exps = [0] * len(vars)
        exps[vars.index(name)] = 1
        return cls(vars, trunc, field, {pack(exps): mpq(1)})

    @classmethod
    def from_terms(cls, terms: Mapping[tuple, object], vars, trunc=None, field: FieldDescriptor = QQ) -> "Series":
        re, im = {}, {}
        for exps, c in terms.items():
            if len(exps) != len(vars):
                raise VariableMismatchError(f"exponent {exps} does not match {vars}")
            c = as_quad(c, field)
            k = pack(exps)
            re[k] = re.get(k, 0) + c.r
            im[k] = im.get(k, 0) + c.s
        return cls(vars, trunc, field, re, im)

    def _new(self, re, im, trunc=None, vars=None):
        obj = object.__new__(Series)
        obj.vars = self.vars if vars is None else vars
        obj.trunc = self.trunc if trunc is None and vars is None else trunc
        obj.field = self.field
        obj.re = re
        obj.im = im
        return obj

    # -- basic properties -------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.vars)

    @property
    def is_exact(self) -> bool:
        return self.trunc is None

    @property
    def limit(self):
        return _limit(self.trunc)

    def keys(self) -> set:
        return set(self.re) | set(self.im)

    def coeff(self, exps: Sequence[int]) -> QuadElem:
        k = pack(exps)
        if self.trunc is not None and key_degree(k) >= self.trunc:
            raise PrecisionError(f"coefficient of degree {sum(exps)} is beyond truncation order {self.trunc}")
        return QuadElem._raw(self.re.get(k, _ZERO), self.im.get(k, _ZERO), self.field)

    def _coeff_key(self, k) -> QuadElem:
        return QuadElem._raw(self.re.get(k, _ZERO), self.im.get(k, _ZERO), self.field)

    def constant_term(self) -> QuadElem:
        return self._coeff_key(0)

    def terms(self) -> list[tuple[tuple[int, ...], QuadElem]]:
        """Nonzero terms, ascending total degree, descending lex inside a degree."""
        ks = sorted(self.keys(), key=lambda k: (key_degree(k), -(k & ((1 << DEG_SHIFT) - 1))))
        return [(unpack(k, self.nvars), self._coeff_key(k)) for k in ks]

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def total_degree(self) -> int:
        ks = self.keys()
        return max(key_degree(k) for k in ks) if ks else -1

    def degree_in(self, var: str) -> int:
        i = self.vars.index(var)
        ks = self.keys()
        return max(unpack(k, self.nvars)[i] for k in ks) if ks else -1

    def vanishing_order(self):
        """Least total degree of a nonzero term; ``INFINITE`` when none is stored."""
        ks = self.keys()
        if not ks:
            return INFINITE
        return min(key_degree(k) for k in ks)

    def homogeneous_part(self, deg: int) -> "Series":
        re = {k: v for k, v in self.re.items() if key_degree(k) == deg}
        im = {k: v for k, v in self.im.items() if key_degree(k) == deg}
        return self._new(re, im)

    def truncate(self, trunc) -> "Series":
        t = _min_trunc(self.trunc, trunc)
        lim = _limit(t)
        return self._new(_clip(self.re, lim), _clip(self.im, lim), trunc=t, vars=self.vars)

    def with_field(self, field: FieldDescriptor) -> "Series":
        if field == self.field:
            return self
        if self.im:
            raise PreconditionError(f"series with sqrt({self.field.d}) terms cannot move to {field}")
        return Series(self.vars, self.trunc, field, dict(self.re))

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Series"):
        if self.vars != other.vars:
            raise VariableMismatchError(f"variables {self.vars} vs {other.vars}")
        if self.field != other.field:
            raise VariableMismatchError(f"fields {self.field} vs {other.field}")
        return _min_trunc(self.trunc, other.trunc)

    def _lift(self, other):
        if isinstance(other, Series):
            return other
        if isinstance(other, (int, QuadElem)) or type(other).__name__ in ("mpq", "Fraction"):
            return Series.constant(as_quad(other, self.field), self.vars, self.trunc, self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = self._check(other)
        lim = _limit(t)
        return self._new(_add_maps(self.re, other.re, 1, lim), _add_maps(self.im, other.im, 1, lim), trunc=t, vars=self.vars)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = self._check(other)
        lim = _limit(t)
        return self._new(_add_maps(self.re, other.re, -1, lim), _add_maps(self.im, other.im, -1, lim), trunc=t, vars=self.vars)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return self._new({k: -v for k, v in self.re.items()}, {k: -v for k, v in self.im.items()})

    def __mul__(self, other):
        if isinstance(other, Series):
            t = self._check(other)
            re, im = _mul_pair(self.re, self.im, other.re, other.im, _limit(t), self.field.d)
            return self._new(re, im, trunc=t, vars=self.vars)
        if isinstance(other, (int, QuadElem)) or type(other).__name__ in ("mpq", "Fraction"):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c) -> "Series":
        c = as_quad(c, self.field)
        re, im = _scale_pair(self.re, self.im, c, self.field.d)
        return self._new(re, im)

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * invert_unit(other)
        return self.scale(as_quad(other, self.field).invert())

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Series.one(self.vars, self.trunc, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.vars == other.vars
            and self.trunc == other.trunc
            and self.field == other.field
            and self.re == other.re
            and self.im == other.im
        )

    def __hash__(self):
        return hash((self.vars, self.trunc, frozenset(self.re.items()), frozenset(self.im.items())))

    def equals_mod(self, other: "Series", n: int) -> bool:
        """True iff the two series agree below total degree ``n``."""
        return (self - other).vanishing_order() >= n

    # -- calculus and evaluation -----------------------------------------
    def derivative(self, var: str) -> "Series":
        i = self.vars.index(var)
        shift = 32 - 16 * i
        one_deg = 1 << DEG_SHIFT

        def d(m):
            out = {}
            for k, v in m.items():
                e = (k >> shift) & SLOT
                if e:
                    out[k - one_deg - (1 << shift)] = e * v
            return out

        t = None if self.trunc is None else max(self.trunc - 1, 0)
        return self._new(d(self.re), d(self.im), trunc=t, vars=self.vars)

    def evaluate(self, point: Mapping[str, object]) -> QuadElem:
        """Value of an exact polynomial at a point with coordinates in the field."""
        if self.trunc is not None:
            raise PrecisionError("only exact polynomials can be evaluated at a point")
        vals = [as_quad(point[v], self.field) for v in self.vars]
        total = QuadElem(0, 0, self.field)
        for exps, c in self.terms():
            term = c
            for val, e in zip(vals, exps):
                if e:
                    term = term * val ** e
            total = total + term
        return total

    # -- I/O --------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "trunc": "exact" if self.trunc is None else self.trunc,
            "terms": [{"exp": list(e), "coeff": format_quad(c)} for e, c in self.terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping, field: FieldDescriptor | None = None) -> "Series":
        from .exactfield import parse_quad

        trunc = None if data["trunc"] == "exact" else int(data["trunc"])
        coeffs = [parse_quad(t["coeff"]) for t in data["terms"]]
        if field is None:
            irr = {c.field for c in coeffs if c.s}
            if len(irr) > 1:
                raise PreconditionError("terms from different quadratic fields")
            field = irr.pop() if irr else QQ
        terms = {tuple(t["exp"]): c.embed(field) for t, c in zip(data["terms"], coeffs)}
        return cls.from_terms(terms, data["vars"], trunc, field)

    def __str__(self):
        parts = []
        for exps, c in self.terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.vars, exps) if e
            )
            cs = format_quad(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"({cs})*{mono}" if c.s else f"{cs}*{mono}")
        body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        return body if self.trunc is None else f"{body} + O({self.trunc})"

    def __repr__(self):
        return f"Series({self}, vars={self.vars})"


# -- ring operations --------------------------------------------------------

def ring_op(op: str, f: Series, g: Series) -> Series:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown ring operation {op!r}")


def invert_unit(f: Series) -> Series:
    """Multiplicative inverse of a series with nonzero constant term (Newton iteration)."""
    c0 = f.constant_term()
    if c0.is_zero():
        raise NotAUnitError("constant term is zero")
    inv0 = c0.invert()
    if f.trunc is None:
        if f.total_degree() == 0:
            return Series.constant(inv0, f.vars, None, f.field)
        raise PrecisionError("the inverse of a nonconstant polynomial needs a finite truncation order")
    T = f.trunc
    g = Series.constant(inv0, f.vars, min(1, T), f.field)
    p = 1
    while p < T:
        p = min(2 * p, T)
        fp = f.truncate(p)
        gp = g.truncate(p)
        gp = Series(gp.vars, p, gp.field, gp.re, gp.im)
        g = gp * (2 - fp * gp)
    return Series(f.vars, T, f.field, g.re, g.im)


def _images(f: Series, assignment: Mapping[str, Series], target_vars=None):
    if assignment:
        sample = next(iter(assignment.values()))
        tvars, tfield = sample.vars, sample.field
        for s in assignment.values():
            if s.vars != tvars or s.field != tfield:
                raise VariableMismatchError("substituted series must share variables and field")
        trunc = None
        for s in assignment.values():
            trunc = _min_trunc(trunc, s.trunc)
    else:
        if target_vars is None:
            return f, {}, None
        tvars, tfield, trunc = tuple(target_vars), f.field, f.trunc
    for v in assignment:
        if v not in f.vars:
            raise VariableMismatchError(f"{v!r} is not a variable of the series")
    images = {}
    for v in f.vars:
        if v in assignment:
            images[v] = assignment[v]
        elif v in tvars:
            images[v] = Series.var(v, tvars, trunc, tfield)
        else:
            raise VariableMismatchError(f"{v!r} has no image in {tvars}")
    return tvars, images, trunc


def substitute(f: Series, assignment: Mapping[str, Series], target_vars=None) -> Series:
    """Compose ``f`` with the given images of its variables.

    Unassigned variables must exist in the target ring and map to
    themselves.  For a truncated ``f`` every image must have zero constant
    term; an exact ``f`` accepts any images.
    """
    tvars, images, trunc = _images(f, assignment, target_vars)
    if not images:
        return f
    tfield = next(iter(images.values())).field
    if f.field != tfield:
        f = f.with_field(tfield)
    used = [v for i, v in enumerate(f.vars) if f.degree_in(v) > 0]
    nonlocal_images = [v for v in used if not images[v].constant_term().is_zero()]
    if f.trunc is not None:
        if nonlocal_images:
            raise PreconditionError(
                f"images of {nonlocal_images} have nonzero constant term; only exact polynomials accept that"
            )
        trunc = _min_trunc(trunc, f.trunc)
    limit = _limit(trunc)
    d = tfield.d
    n = f.nvars
    local = not nonlocal_images
    if f.is_zero():
        return Series.zero(tvars, trunc, tfield)

    # group terms by the exponent of the first variable (outer Horner variable)
    groups: dict[int, list] = {}
    for k in f.keys():
        exps = unpack(k, n)
        groups.setdefault(exps[0], []).append((exps[1:], QuadElem._raw(f.re.get(k, _ZERO), f.im.get(k, _ZERO), f.field)))

    inner_vars = f.vars[1:]
    power_cache = {v: [(Series.one(tvars, trunc, tfield))] for v in inner_vars}

    def power(v, e):
        cache = power_cache[v]
        while len(cache) <= e:
            cache.append(cache[-1] * images[v])
        return cache[e]

    product_cache = {}

    def inner_monomial(exps):
        if exps in product_cache:
            return product_cache[exps]
        s = None
        for v, e in zip(inner_vars, exps):
            if e:
                s = power(v, e) if s is None else s * power(v, e)
        if s is None:
            s = power_cache[inner_vars[0]][0] if inner_vars else Series.one(tvars, trunc, tfield)
        product_cache[exps] = s
        return s

    def group_value(i):
        # f_i evaluated at the inner images; when the outer image has zero
        # constant term only degrees below trunc - i can survive
        lim = limit
        if local and trunc is not None:
            lim = _limit(max(trunc - i, 0))
        re, im = {}, {}
        for exps, c in groups.get(i, ()):
            m = inner_monomial(exps)
            pr, pi = _scale_pair(m.re, m.im, c, d)
            kernel.axpy(re, 1, pr, lim)
            if pi:
                kernel.axpy(im, 1, pi, lim)
        return re, im

    top = max(groups)
    outer = images[f.vars[0]]
    acc_re, acc_im = group_value(top)
    for i in range(top - 1, -1, -1):
        acc_re, acc_im = _mul_pair(acc_re, acc_im, outer.re, outer.im, limit, d)
        if i in groups:
            gr, gi = group_value(i)
            kernel.axpy(acc_re, 1, gr, limit)
            kernel.axpy(acc_im, 1, gi, limit)
    return Series(tvars, trunc, tfield, acc_re, acc_im)


def implicit_solve(F: Series, var: str, trunc: int) -> Series:
    """Solve ``F(..., var) = 0`` for ``var`` as a series in the other variables.

    Requires ``F(0) = 0`` and a unit partial derivative in ``var`` at the
    origin.  Each correction step fixes at least one more degree.
    """
    if var not in F.vars:
        raise VariableMismatchError(f"{var!r} is not a variable of F")
    if not F.constant_term().is_zero():
        raise PreconditionError("F does not vanish at the origin")
    others = tuple(v for v in F.vars if v != var)
    if not others:
        raise VariableMismatchError("need at least one parameter variable")
    dF = F.derivative(var)
    c = dF.constant_term()
    if c.is_zero():
        raise NotAUnitError(f"dF/d{var} vanishes at the origin")
    cinv = c.invert()
    sol = Series.zero(others, trunc, F.field)
    for _ in range(trunc + 1):
        residual = substitute(F, {var: sol}, target_vars=others).truncate(trunc)
        if residual.is_zero():
            return sol
        sol = sol - residual.scale(cinv)
    raise PrecisionError("implicit solve did not converge")  # unreachable for valid input


# -- germs ------------------------------------------------------------------

class Germ:
    """A map germ fixing the origin: one series per coordinate."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Series]):
        comps = tuple(components)
        if not comps:
            raise VariableMismatchError("a germ needs at least one component")
        vars, trunc, field = comps[0].vars, comps[0].trunc, comps[0].field
        if len(comps) != len(vars):
            raise VariableMismatchError(f"{len(comps)} components for variables {vars}")
        for c in comps:
            if c.vars != vars or c.trunc != trunc or c.field != field:
                raise VariableMismatchError("germ components must share variables, truncation and field")
            if not c.constant_term().is_zero():
                raise PreconditionError("germ components must vanish at the origin")
        if trunc is None:
            raise PrecisionError("germs are truncated series")
        self.components = comps

    @classmethod
    def identity(cls, vars=("x", "y"), trunc=10, field: FieldDescriptor = QQ) -> "Germ":
        return cls(Series.var(v, vars, trunc, field) for v in vars)

    @classmethod
    def linear(cls, matrix, vars=("x", "y"), trunc=10, field: FieldDescriptor = QQ) -> "Germ":
        """Germ whose pullback matrix (column j = image of variable j) is ``matrix``."""
        n = len(vars)
        comps = []
        for j in range(n):
            s = Series.zero(vars, trunc, field)
            for i in range(n):
                s = s + Series.var(vars[i], vars, trunc, field).scale(as_quad(matrix[i][j], field))
            comps.append(s)
        return cls(comps)

    @property
    def vars(self):
        return self.components[0].vars

    @property
    def trunc(self):
        return self.components[0].trunc

    @property
    def field(self):
        return self.components[0].field

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other):
        return isinstance(other, Germ) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def truncate(self, trunc) -> "Germ":
        return Germ(c.truncate(trunc) for c in self.components)

    def with_field(self, field) -> "Germ":
        return Germ(c.with_field(field) for c in self.components)

    def displacement(self) -> list[Series]:
        """Components minus their own variables: the generators of the fixed-point ideal."""
        return [c - Series.var(v, self.vars, self.trunc, self.field) for c, v in zip(self.components, self.vars)]

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "trunc": self.trunc,
            "components": [c.to_json() for c in self.components],
        }

    @classmethod
    def from_json(cls, data, field=None) -> "Germ":
        return cls(Series.from_json(c, field) for c in data["components"])

    def __repr__(self):
        return "Germ(" + ", ".join(str(c) for c in self.components) + ")"


def germ_compose(g: Germ, h: Germ) -> Germ:
    """Germ of the map ``g o h``."""
    if g.vars != h.vars or g.field != h.field:
        raise VariableMismatchError("germs act on different coordinate rings")
    if g.trunc != h.trunc:
        raise VariableMismatchError(f"truncation orders differ: {g.trunc} vs {h.trunc}")
    assignment = dict(zip(h.vars, h.components))
    return Germ(substitute(c, assignment) for c in g.components)


def linear_part(g: Germ) -> list[list[QuadElem]]:
    """Pullback matrix on m/m^2: column j holds the linear coefficients of component j."""
    n = len(g.vars)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            e = [0] * n
            e[i] = 1
            row.append(g.components[j].coeff(e) if g.trunc > 1 else QuadElem(0, 0, g.field))
        out.append(row)
    return out


def germ_invert(g: Germ) -> Germ:
    """Compositional inverse, solved one homogeneous degree at a time."""
    vars, T, field = g.vars, g.trunc, g.field
    n = len(vars)
    L = linear_part(g)
    jac = linalg.transpose(L)  # jac[i][j] = d g_i / d x_j
    try:
        jinv = linalg.inverse(jac)
    except ZeroDivisionError:
        raise NotInvertibleError("linear part is singular") from None
    xs = [Series.var(v, vars, T, field) for v in vars]

    def apply_jinv(vec):
        out = []
        for i in range(n):
            s = Series.zero(vars, vec[0].trunc, field)
            for j in range(n):
                if not jinv[i][j].is_zero():
                    s = s + vec[j].scale(jinv[i][j])
            out.append(s)
        return out

    nonlinear = []
    for i in range(n):
        lin = Series.zero(vars, T, field)
        for j in range(n):
            lin = lin + xs[j].scale(jac[i][j])
        nonlinear.append(g.components[i] - lin)
    h = apply_jinv(xs)
    # h is correct below degree 2; each pass through the fixed-point map
    # v -> J^-1 (x - N(v)) gains one degree because N has order >= 2
    for p in range(3, T + 1):
        # the iterate is only correct below p - 1; re-declare it at order p
        hp = [Series(vars, p, field, c.re, c.im) for c in h]
        assignment = dict(zip(vars, hp))
        nh = [substitute(c.truncate(p), assignment) for c in nonlinear]
        h = apply_jinv([x.truncate(p) - v for x, v in zip(xs, nh)])
    return Germ(Series(vars, T, field, c.re, c.im) for c in h)


def vanishing_order(f: Series):
    return f.vanishing_order()


def congruence_level(g: Germ) -> int:
    """Largest j <= trunc with g* = id mod m^j."""
    orders = [d.vanishing_order() for d in g.displacement()]
    return int(min(min(orders), g.trunc))


def is_identity_mod(g: Germ, n: int) -> bool:
    if n > g.trunc:
        raise PrecisionError(f"cannot test congruence mod m^{n} at truncation order {g.trunc}")
    return congruence_level(g) >= n


def commutator(g: Germ, h: Germ) -> Germ:
    """Germ of ``g^-1 o h^-1 o g o h``."""
    gi = germ_invert(g)
    hi = germ_invert(h)
    return germ_compose(gi, germ_compose(hi, germ_compose(g, h)))

"""Exact arithmetic in Q and in quadratic fields Q(sqrt(d)).

Rationals are ``gmpy2.mpq`` values, which are kept reduced with a positive
denominator by GMP itself.  A :class:`QuadElem` is ``r + s*sqrt(d)``; all
elements taking part in one computation share a :class:`FieldDescriptor`.

Text encoding: ``"p/q"`` for rationals and ``"p/q+r/s*sqrt(d)"`` for
quadratic elements (a denominator of 1 is omitted).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .errors import FieldError, FieldMismatchError, PreconditionError

Rational = type(mpq(0))


def rational(x) -> Rational:
    """Coerce ints, Fractions, strings like ``"3/4"`` and mpq to mpq."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        x = x.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", x):
            raise ValueError(f"not a rational literal: {x!r}")
        return mpq(x)
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return mpq(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def format_rational(q: Rational) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Return ``(f, d)`` with ``n == f*f*d`` and ``d`` square-free (sign kept in d)."""
    if n == 0:
        raise ValueError("0 has no square-free part")
    sign = -1 if n < 0 else 1
    n = abs(n)
    f, d = 1, 1
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            f *= p
        if n % p == 0:
            n //= p
            d *= p
        p += 1
    return f, sign * d * n


def is_squarefree(n: int) -> bool:
    return n != 0 and squarefree_decomposition(n)[0] == 1


@dataclass(frozen=True)
class FieldDescriptor:
    """Either Q (``d is None``) or Q(sqrt(d)) for square-free ``d`` not in {0, 1}."""

    d: int | None = None

    def __post_init__(self):
        if self.d is not None:
            if isinstance(self.d, bool) or not isinstance(self.d, int):
                raise PreconditionError("d must be an integer")
            if self.d in (0, 1) or not is_squarefree(self.d):
                raise PreconditionError(f"d = {self.d} is not a square-free integer outside {{0, 1}}")

    @classmethod
    def from_d(cls, d: int | None) -> "FieldDescriptor":
        return QQ if d is None else cls(d)

    @property
    def kind(self) -> str:
        return "rational" if self.d is None else "quadratic"

    @property
    def is_rational(self) -> bool:
        return self.d is None

    def __str__(self):
        return "Q" if self.d is None else f"Q(sqrt({self.d}))"


QQ = FieldDescriptor()

_ZERO = mpq(0)
_ONE = mpq(1)


class QuadElem:
    """An element ``r + s*sqrt(d)`` of a fixed field; immutable."""

    __slots__ = ("r", "s", "field")

    def __init__(self, r=0, s=0, field: FieldDescriptor = QQ):
        r = rational(r)
        s = rational(s)
        if field.d is None and s:
            raise FieldError("nonzero irrational part in the rational field")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("QuadElem is immutable")

    @classmethod
    def _raw(cls, r: Rational, s: Rational, field: FieldDescriptor) -> "QuadElem":
        obj = object.__new__(cls)
        object.__setattr__(obj, "r", r)
        object.__setattr__(obj, "s", s)
        object.__setattr__(obj, "field", field)
        return obj

    @classmethod
    def sqrt_d(cls, field: FieldDescriptor) -> "QuadElem":
        if field.d is None:
            raise FieldError("the rational field has no sqrt(d) generator")
        return cls._raw(_ZERO, _ONE, field)

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> "QuadElem":
        if isinstance(other, QuadElem):
            if other.field != self.field:
                raise FieldMismatchError(f"cannot combine elements of {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return QuadElem._raw(rational(other), _ZERO, self.field)
        return NotImplemented

    def embed(self, field: FieldDescriptor) -> "QuadElem":
        """Move an element into ``field``; only rational values move between fields."""
        if field == self.field:
            return self
        if self.s:
            raise FieldMismatchError(f"{self} does not lie in {field}")
        return QuadElem._raw(self.r, _ZERO, field)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElem._raw(self.r + other.r, self.s + other.s, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElem._raw(self.r - other.r, self.s - other.s, self.field)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return QuadElem._raw(-self.r, -self.s, self.field)

    def __pos__(self):
        return self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.s and not other.s:
            return QuadElem._raw(self.r * other.r, _ZERO, self.field)
        d = self.field.d
        return QuadElem._raw(
            self.r * other.r + d * self.s * other.s,
            self.r * other.s + self.s * other.r,
            self.field,
        )

    __rmul__ = __mul__

    def conj(self) -> "QuadElem":
        return QuadElem._raw(self.r, -self.s, self.field)

    def norm(self) -> Rational:
        if self.field.d is None:
            return self.r * self.r
        return self.r * self.r - self.field.d * self.s * self.s

    def trace(self) -> Rational:
        return 2 * self.r

    def invert(self) -> "QuadElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.norm()
        return QuadElem._raw(self.r / n, -self.s / n, self.field)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.invert()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.invert()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.invert() ** (-n)
        result = QuadElem._raw(_ONE, _ZERO, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.r and not self.s

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not self.s

    def __eq__(self, other):
        if isinstance(other, QuadElem):
            return self.field == other.field and self.r == other.r and self.s == other.s
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return not self.s and self.r == other
        return NotImplemented

    def __hash__(self):
        if not self.s:
            return hash(self.r)
        return hash((self.r, self.s, self.field.d))

    # -- text -------------------------------------------------------------
    def __str__(self):
        return format_quad(self)

    def __repr__(self):
        return f"QuadElem({format_quad(self)!r}, field={self.field})"


def format_quad(x: QuadElem) -> str:
    if not x.s:
        return format_rational(x.r)
    irr = f"{format_rational(abs(x.s))}*sqrt({x.field.d})"
    sign = "-" if x.s < 0 else "+"
    if not x.r:
        return irr if sign == "+" else "-" + irr
    return f"{format_rational(x.r)}{sign}{irr}"


_QUAD_RE = re.compile(
    r"""^\s*
    (?P<r>[+-]?\d+(?:/\d+)?)?
    \s*
    (?:
        (?P<sign>[+-])?\s*
        (?:(?P<s>\d+(?:/\d+)?)\s*\*\s*)?
        sqrt\(\s*(?P<d>[+-]?\d+)\s*\)
        (?:\s*/\s*(?P<den>\d+))?
    )?
    \s*$""",
    re.VERBOSE,
)


def parse_quad(text: str, field: FieldDescriptor | None = None) -> QuadElem:
    """Parse the text encoding.

    ``sqrt(k)`` with a non-square-free ``k`` is normalized, so ``sqrt(-4)``
    reads as ``2*sqrt(-1)``.  When ``field`` is given the value is placed
    there, otherwise the field is inferred from the literal.
    """
    m = _QUAD_RE.match(text)
    if m is None or (m.group("r") is None and m.group("d") is None):
        raise ValueError(f"cannot parse field element {text!r}")
    r = rational(m.group("r") or "0")
    s = _ZERO
    d = None
    if m.group("d") is not None:
        s = rational(m.group("s") or "1")
        if m.group("den"):
            s = s / int(m.group("den"))
        if m.group("sign") == "-":
            s = -s
        k = int(m.group("d"))
        if k == 0:
            s = _ZERO
        else:
            f, d = squarefree_decomposition(k)
            s = s * f
            if d == 1:
                r, s, d = r + s, _ZERO, None
    if not s:
        target = field if field is not None else QQ
        return QuadElem._raw(r, _ZERO, target)
    inferred = FieldDescriptor(d)
    if field is not None and field != inferred:
        raise FieldMismatchError(f"{text!r} lies in {inferred}, not in {field}")
    return QuadElem._raw(r, s, inferred)


def as_quad(x, field: FieldDescriptor = QQ) -> QuadElem:
    if isinstance(x, QuadElem):
        return x.embed(field)
    if isinstance(x, str):
        return parse_quad(x, field)
    return QuadElem._raw(rational(x), _ZERO, field)


def sqrt_in_field(x: QuadElem) -> QuadElem:
    """A square root of ``x`` inside its own field, or :class:`FieldError`.

    Only rational radicands are supported, which covers every discriminant
    met in this package.
    """
    if x.s:
        raise FieldError(f"square roots of irrational elements are not supported: {x}")
    q = x.r
    if q == 0:
        return x
    num, den = int(q.numerator), int(q.denominator)
    # sqrt(num/den) = sqrt(num*den)/den
    k = num * den
    sign = -1 if k < 0 else 1
    root = math.isqrt(abs(k))
    if sign > 0 and root * root == k:
        return QuadElem._raw(mpq(root, den), _ZERO, x.field)
    f, d = squarefree_decomposition(k)
    if x.field.d != d:
        raise FieldError(f"sqrt({x}) does not lie in {x.field}")
    return QuadElem._raw(_ZERO, mpq(f, den), x.field)

# denjoy_invariants/circle_core.py
"""
Rigorous arithmetic on the circle R/Z.

Reals are exact sympy expressions (integers, rationals, square roots and finite sums,
products and integer powers of those) or certified intervals with exact rational
endpoints. Enclosures are computed with mpmath interval contexts, one per precision,
so every result is a directed-rounding bound both ways.
"""

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple, Union

import mpmath
import sympy
from mpmath import libmp
from mpmath.ctx_iv import MPIntervalContext

from .config import DECIMAL_DIGITS, DEFAULT_SETTINGS, DEFAULT_WORKING_BITS, PrecisionSettings
from .errors import DomainError, UndecidedError

logger = logging.getLogger(__name__)

Real = sympy.Expr
Exactish = Union[int, Fraction, sympy.Expr]


# -------------------------------------------------------------------
# 1) Interval contexts and exact expressions
# -------------------------------------------------------------------
@lru_cache(maxsize=None)
def interval_context(bits: int) -> MPIntervalContext:
    """One mpmath interval context per precision; contexts are never mutated afterwards."""
    ctx = MPIntervalContext()
    ctx.prec = bits
    return ctx


def as_real(x) -> Real:
    """
    Coerce ints, Fractions, floats and expression strings to an expanded sympy expression.

    Floats are read through their shortest decimal repr, so 0.1 means 1/10 rather than the
    nearest binary double. Nested square roots are denested where sympy can do so.
    """
    if isinstance(x, sympy.Basic):
        expr = x
    elif isinstance(x, bool):
        raise ValueError("booleans are not reals")
    elif isinstance(x, int):
        expr = sympy.Integer(x)
    elif isinstance(x, Fraction):
        expr = sympy.Rational(x.numerator, x.denominator)
    elif isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite input {x!r}")
        expr = sympy.Rational(repr(x))
    elif isinstance(x, str):
        expr = sympy.sympify(x, rational=True)
    else:
        raise ValueError(f"cannot interpret {x!r} as a real number")
    if expr.has(sympy.zoo, sympy.oo, -sympy.oo, sympy.nan):
        raise DomainError(f"non-finite input {x!r}")
    if _nested_radicals(expr):
        expr = sympy.sqrtdenest(expr)
    validate_expression(expr)
    return sympy.expand(expr)


def as_scalar(x) -> sympy.Expr:
    """Complex scalar a + b*I with a and b in the real grammar of `as_real`."""
    if isinstance(x, complex):
        return sympy.expand(as_real(x.real) + sympy.I * as_real(x.imag))
    if isinstance(x, str):
        x = sympy.sympify(x, rational=True)
    if isinstance(x, sympy.Basic) and x.has(sympy.I):
        re, im = sympy.expand(x).as_real_imag()
        return sympy.expand(as_real(re) + sympy.I * as_real(im))
    return as_real(x)


def _nested_radicals(expr: Real) -> bool:
    return any(p.exp.is_Rational and p.exp.q == 2 and not p.base.is_Rational
               for p in expr.atoms(sympy.Pow))


def validate_expression(expr: Real) -> None:
    """Reject anything outside rationals, square roots of rationals, sums, products and integer powers."""
    if expr.is_Rational:
        return
    if expr.is_Add or expr.is_Mul:
        for arg in expr.args:
            validate_expression(arg)
        return
    if expr.is_Pow:
        base, exp = expr.as_base_exp()
        if exp.is_Integer:
            validate_expression(base)
            return
        if exp.is_Rational and exp.q == 2 and base.is_Rational:
            return
    raise DomainError(f"unsupported expression {expr}: only rationals and square roots of rationals are allowed")


def exact_equal(a: Exactish, b: Exactish) -> bool:
    return sympy.expand(sympy.radsimp(as_real(a) - as_real(b))) == 0


def is_rational(x: Exactish) -> bool:
    return as_real(x).is_Rational


def _iv_eval(expr: Real, ctx: MPIntervalContext):
    if expr.is_Integer:
        return ctx.mpf(int(expr))
    if expr.is_Rational:
        return ctx.mpf(int(expr.p)) / int(expr.q)
    if expr.is_Add:
        total = ctx.mpf(0)
        for arg in expr.args:
            total = total + _iv_eval(arg, ctx)
        return total
    if expr.is_Mul:
        total = ctx.mpf(1)
        for arg in expr.args:
            total = total * _iv_eval(arg, ctx)
        return total
    if expr.is_Pow:
        base, exp = expr.as_base_exp()
        if exp.is_Integer:
            return _iv_power(_iv_eval(base, ctx), int(exp), ctx)
        if exp.is_Rational and exp.q == 2:
            return _iv_power(ctx.sqrt(_iv_eval(base, ctx)), int(exp.p), ctx)
    raise DomainError(f"cannot enclose {expr}")


def _iv_power(x, n: int, ctx: MPIntervalContext):
    if n < 0:
        return ctx.mpf(1) / _iv_power(x, -n, ctx)
    result = ctx.mpf(1)
    base = x
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _iv_endpoints(x) -> Tuple[Fraction, Fraction]:
    lo, hi = x._mpi_
    (lp, lq), (hp, hq) = libmp.to_rational(lo), libmp.to_rational(hi)
    return Fraction(int(lp), int(lq)), Fraction(int(hp), int(hq))


# -------------------------------------------------------------------
# 2) BigInterval
# -------------------------------------------------------------------
@dataclass(frozen=True)
class BigInterval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction
    precision_bits: int = DEFAULT_WORKING_BITS

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    @classmethod
    def exact(cls, q, precision_bits: int = DEFAULT_WORKING_BITS) -> "BigInterval":
        q = _to_fraction(q)
        return cls(q, q, precision_bits)

    @classmethod
    def from_iv(cls, x, precision_bits: int) -> "BigInterval":
        lo, hi = _iv_endpoints(x)
        return cls(lo, hi, precision_bits)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, other) -> bool:
        if isinstance(other, BigInterval):
            return self.lo <= other.lo and other.hi <= self.hi
        q = _to_fraction(other)
        return self.lo <= q <= self.hi

    def is_disjoint(self, other: "BigInterval") -> bool:
        return self.hi < other.lo or other.hi < self.lo

    def certainly_less(self, other: "BigInterval") -> bool:
        return self.hi < other.lo

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def floor(self) -> Optional[int]:
        """The common floor of every point, or None when the interval straddles an integer."""
        lo, hi = math.floor(self.lo), math.floor(self.hi)
        return lo if lo == hi else None

    def hull(self, other: "BigInterval") -> "BigInterval":
        return BigInterval(min(self.lo, other.lo), max(self.hi, other.hi),
                           max(self.precision_bits, other.precision_bits))

    def rounded(self, frac_bits: int) -> "BigInterval":
        """Outward rounding to dyadic endpoints with `frac_bits` fractional bits."""
        scale = 1 << frac_bits
        return BigInterval(Fraction(math.floor(self.lo * scale), scale),
                           Fraction(math.ceil(self.hi * scale), scale),
                           self.precision_bits)

    def _bits(self, other) -> int:
        if isinstance(other, BigInterval):
            return max(self.precision_bits, other.precision_bits)
        return self.precision_bits

    def __add__(self, other):
        if isinstance(other, BigInterval):
            return BigInterval(self.lo + other.lo, self.hi + other.hi, self._bits(other))
        q = _to_fraction(other)
        return BigInterval(self.lo + q, self.hi + q, self.precision_bits)

    __radd__ = __add__

    def __neg__(self):
        return BigInterval(-self.hi, -self.lo, self.precision_bits)

    def __sub__(self, other):
        return self + (-other if isinstance(other, BigInterval) else -_to_fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BigInterval):
            products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
            return BigInterval(min(products), max(products), self._bits(other))
        q = _to_fraction(other)
        ends = (self.lo * q, self.hi * q)
        return BigInterval(min(ends), max(ends), self.precision_bits)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, BigInterval):
            if not other.excludes_zero():
                raise ZeroDivisionError("divisor interval contains zero")
            return self * BigInterval(1 / other.hi, 1 / other.lo, other.precision_bits)
        q = _to_fraction(other)
        if q == 0:
            raise ZeroDivisionError("division by zero")
        return self * (1 / q)

    def to_decimal(self, digits: int = DECIMAL_DIGITS) -> str:
        return render_decimal(self.midpoint, digits)

    def to_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi), "bits": self.precision_bits}

    @classmethod
    def from_json(cls, data: dict) -> "BigInterval":
        return cls(Fraction(data["lo"]), Fraction(data["hi"]), int(data["bits"]))

    def __str__(self):
        return f"[{render_decimal(self.lo, 12)}, {render_decimal(self.hi, 12)}]"


def _to_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    if isinstance(q, sympy.Basic) and q.is_Rational:
        return Fraction(int(q.p), int(q.q))
    raise TypeError(f"expected an exact rational, got {q!r}")


def render_decimal(q: Fraction, digits: int = DECIMAL_DIGITS) -> str:
    with mpmath.workdps(digits + 10):
        value = mpmath.mpf(q.numerator) / q.denominator
        return mpmath.nstr(value, digits)


def interval_of(x, bits: int = DEFAULT_WORKING_BITS) -> BigInterval:
    """Certified enclosure of an exact real at `bits` of working precision."""
    if isinstance(x, BigInterval):
        return x
    expr = as_real(x)
    if expr.is_Rational:
        return BigInterval.exact(expr, bits)
    # guard bits absorb the rounding of the final endpoint conversion
    ctx = interval_context(bits + 8)
    return BigInterval.from_iv(_iv_eval(expr, ctx), bits)


Refinable = Union[Exactish, BigInterval, Callable[[int], BigInterval]]


def _is_exact(x) -> bool:
    return isinstance(x, (int, float, Fraction, str, sympy.Basic))


def enclosure(x: Refinable, bits: int) -> BigInterval:
    if _is_exact(x) or isinstance(x, BigInterval):
        return interval_of(x, bits)
    return x(bits)


def refine(x: Refinable, accept: Callable[[BigInterval], bool],
           settings: PrecisionSettings = DEFAULT_SETTINGS) -> BigInterval:
    """Walk the precision ladder until `accept` holds; raise UndecidedError at the ceiling."""
    last = None
    for bits in settings.refinements():
        last = enclosure(x, bits)
        if accept(last):
            return last
        logger.debug("refining at %d bits, width %s", bits, float(last.width))
    raise UndecidedError(f"could not certify {x}", settings.max_bits)


def fixed_point(x, frac_bits: int) -> Tuple[int, int]:
    """(F, e) with x * 2**frac_bits in [F, F + e], computed with certified rounding."""
    expr = as_real(x)
    scale = 1 << frac_bits
    if expr.is_Rational:
        scaled = _to_fraction(expr) * scale
        base = math.floor(scaled)
        return base, 0 if scaled == base else 1
    box = interval_of(expr, frac_bits + 32)
    lo, hi = math.floor(box.lo * scale), math.floor(box.hi * scale)
    return lo, hi - lo + 1


# -------------------------------------------------------------------
# 3) Comparison
# -------------------------------------------------------------------
class Ordering(enum.Enum):
    LESS = "Less"
    GREATER = "Greater"
    UNDECIDED = "Undecided"


def compare(a: Refinable, b: Refinable,
            settings: PrecisionSettings = DEFAULT_SETTINGS) -> Ordering:
    """
    Certified order of two refinable reals.

    Less/Greater are returned only once the enclosures separate; identical handles and
    exactly equal expressions never separate and come back Undecided.
    """
    if a is b:
        return Ordering.UNDECIDED
    if _is_exact(a) and _is_exact(b) and exact_equal(a, b):
        return Ordering.UNDECIDED
    for bits in settings.refinements():
        ia, ib = enclosure(a, bits), enclosure(b, bits)
        if ia.certainly_less(ib):
            return Ordering.LESS
        if ib.certainly_less(ia):
            return Ordering.GREATER
        if isinstance(a, BigInterval) and isinstance(b, BigInterval):
            break
    logger.warning("comparison undecided at %d bits", settings.max_bits)
    return Ordering.UNDECIDED


def certified_floor(x: Exactish, settings: PrecisionSettings = DEFAULT_SETTINGS) -> int:
    expr = as_real(x)
    if expr.is_Rational:
        return int(expr.p // expr.q)
    box = refine(expr, lambda iv: iv.floor() is not None, settings)
    return box.floor()


def certified_sign(x: Exactish, settings: PrecisionSettings = DEFAULT_SETTINGS) -> int:
    """-1, 0 or 1; zero only for expressions that are exactly zero."""
    expr = as_real(x)
    if expr == 0:
        return 0
    box = refine(expr, BigInterval.excludes_zero, settings)
    return 1 if box.lo > 0 else -1


# -------------------------------------------------------------------
# 4) Circle points and arcs
# -------------------------------------------------------------------
@dataclass(frozen=True)
class CirclePoint:
    """A point of R/Z; `value` is the representative in [0, 1)."""

    value: Union[sympy.Expr, BigInterval]

    @property
    def is_exact(self) -> bool:
        return not isinstance(self.value, BigInterval)

    def interval(self, bits: int = DEFAULT_WORKING_BITS) -> BigInterval:
        return interval_of(self.value, bits)

    def __str__(self):
        return str(self.value)


def normalize_with_floor(x, settings: PrecisionSettings = DEFAULT_SETTINGS) -> Tuple[CirclePoint, int]:
    if isinstance(x, CirclePoint):
        x = x.value
    if isinstance(x, BigInterval):
        n = x.floor()
        if n is None:
            raise UndecidedError(f"cannot reduce {x} mod 1", x.precision_bits)
        return CirclePoint(x - n), n
    expr = as_real(x)
    n = certified_floor(expr, settings)
    return CirclePoint(sympy.expand(expr - n)), n


def normalize(x, settings: PrecisionSettings = DEFAULT_SETTINGS) -> CirclePoint:
    """x mod 1 in [0, 1); exact whenever x is exact."""
    return normalize_with_floor(x, settings)[0]


@dataclass(frozen=True)
class Arc:
    """Positively oriented arc from start to end, (start, end] by default."""

    start: CirclePoint
    end: CirclePoint
    left_open: bool = True
    right_closed: bool = True
    full_turn: bool = False

    @classmethod
    def whole(cls, anchor: Optional[CirclePoint] = None) -> "Arc":
        anchor = anchor or CirclePoint(sympy.Integer(0))
        return cls(anchor, anchor, full_turn=True)


def arc_length_exact(a: Arc, settings: PrecisionSettings = DEFAULT_SETTINGS) -> Real:
    if a.full_turn:
        return sympy.Integer(1)
    if not (a.start.is_exact and a.end.is_exact):
        raise DomainError("exact arc length needs exact endpoints")
    return normalize(sympy.expand(a.end.value - a.start.value), settings).value


def arc_length(a: Arc, settings: PrecisionSettings = DEFAULT_SETTINGS) -> BigInterval:
    """Oriented length end - start mod 1, in [0, 1)."""
    if a.full_turn:
        return BigInterval.exact(1, settings.working_bits)
    if a.start.is_exact and a.end.is_exact:
        return interval_of(arc_length_exact(a, settings), settings.working_bits)
    diff = a.end.interval(settings.working_bits) - a.start.interval(settings.working_bits)
    return normalize_with_floor(diff, settings)[0].value


# -------------------------------------------------------------------
# 5) Exact coordinates over a basis of radicals
# -------------------------------------------------------------------
def _is_radical_monomial(key: Real) -> bool:
    if key.is_Rational:
        return True
    if key.is_Pow:
        return key.exp.is_Rational and key.exp.q == 2 and key.base.is_Rational
    return key.is_Mul and all(_is_radical_monomial(arg) for arg in key.args)


def _coefficients(expr: Real) -> dict:
    """Rational coefficients of expr over square roots of square-free integers."""
    expr = sympy.expand(sympy.radsimp(expr))
    if expr == 0:
        return {}
    if expr.is_Rational:
        return {sympy.S.One: expr}
    coeffs = {}
    for key, value in expr.as_coefficients_dict().items():
        if not value.is_Rational:
            raise DomainError(f"non-rational coefficient in {expr}")
        if not _is_radical_monomial(key):
            raise DomainError(f"cannot write {expr} as a rational combination of square roots")
        if key.is_Rational:
            value, key = value * key, sympy.S.One
        coeffs[key] = coeffs.get(key, 0) + value
    return coeffs


def linear_coordinates(x: Exactish, basis: Sequence[Exactish]) -> Optional[Tuple[Fraction, ...]]:
    """
    Rational (c0, c1, ..., cd) with x = c0 + sum ci * basis[i], or None if x is outside
    the rational span of 1 and the basis.

    Square roots of distinct square-free integers are linearly independent over Q, so the
    monomials sympy produces after expansion serve as coordinates.
    """
    target = _coefficients(as_real(x))
    columns = [_coefficients(as_real(b)) for b in basis]
    atoms = sorted({key for col in columns + [target] for key in col if key != sympy.S.One},
                   key=sympy.default_sort_key)
    if not atoms:
        if columns:
            raise DomainError("basis elements must be irrational")
        return (_to_fraction(target.get(sympy.S.One, sympy.S.Zero)),)
    matrix = sympy.Matrix([[col.get(atom, 0) for col in columns] for atom in atoms])
    rhs = sympy.Matrix([target.get(atom, 0) for atom in atoms])
    try:
        solution, params = matrix.gauss_jordan_solve(rhs)
    except ValueError:
        return None
    if params.shape[0]:
        raise DomainError("basis is not linearly independent over the rationals")
    coords = [sympy.Rational(c) for c in solution]
    const = target.get(sympy.S.One, 0) - sum(c * col.get(sympy.S.One, 0) for c, col in zip(coords, columns))
    return tuple(_to_fraction(sympy.Rational(v)) for v in [const] + coords)

# denjoy_invariants/ergodic.py
"""
Rotation numbers, the unique invariant measure and the trace on finitely supported
elements of the crossed product.

Everything symbolic is exact: measures of arcs with DenjoyPoint endpoints, traces and
the trace-ideal test reduce to sympy arithmetic on the collapsed coordinate. Only the
geometric variants (LiftIterator, integrate_geometric, arcs given in psi coordinates)
return certified intervals.
"""

import bisect
import enum
import functools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

from .circle_core import (
    Arc,
    BigInterval,
    CirclePoint,
    Ordering,
    Real,
    arc_length,
    as_real,
    as_scalar,
    certified_floor,
    certified_sign,
    compare,
    exact_equal,
    interval_of,
    normalize,
)
from .config import DEFAULT_SETTINGS, PrecisionSettings
from .denjoy_model import (
    ActionClass,
    Cantor,
    DenjoyAction,
    DenjoyPoint,
    Gap,
    GapLabel,
    SideKind,
    Vector,
    act,
    add,
    canonical,
    classify,
    gap_table,
    negate,
    realize,
    realize_inverse,
    semiconjugacy,
)
from .errors import DomainError, UndecidedError

logger = logging.getLogger(__name__)


# -------------------------------------------------------------------
# 1) Rotation numbers
# -------------------------------------------------------------------
def rotation_number(action: DenjoyAction, g: Sequence[int]) -> CirclePoint:
    return action.rho.rho(g)


class LiftIterator:
    """
    Successive values F^k(x0) of a lift F of the homeomorphism for g.

    On a Denjoy action the orbit is followed symbolically: the start is decoded once with
    realize_inverse, iterates are exact act() images, and the integer part of the lift is
    the floor of the collapsed coordinate phi(x0) + k*rho(g).
    """

    def __init__(self, action: DenjoyAction, g: Sequence[int], x0=0,
                 precision: Optional[int] = None, settings: PrecisionSettings = DEFAULT_SETTINGS):
        self.action = action
        self.g = action.rho.check(g)
        self.precision = precision or settings.working_bits
        self.settings = settings
        self.step = rotation_number(action, self.g).value
        self._k = 0
        self.x0 = x0 if isinstance(x0, BigInterval) else as_real(x0)
        if classify(action) is ActionClass.DENJOY:
            box = interval_of(self.x0, self.precision + 2)
            wraps = box.floor()
            if wraps is None:
                raise UndecidedError(f"start point {box} straddles an integer", self.precision)
            self.wraps = wraps
            self.start = realize_inverse(action, box - wraps, self.precision, settings)
            self.phi0 = semiconjugacy(action, self.start).value
        else:
            self.start = None

    def value_after(self, k: int) -> BigInterval:
        if self.start is None:
            if isinstance(self.x0, BigInterval):
                return self.x0 + interval_of(k * self.step, self.precision)
            return interval_of(sympy.expand(self.x0 + k * self.step), self.precision)
        p = act(self.action, tuple(k * x for x in self.g), self.start)
        turns = certified_floor(sympy.expand(self.phi0 + k * self.step), self.settings)
        return realize(self.action, p, self.precision, self.settings) + (turns + self.wraps)

    def __iter__(self) -> Iterator[BigInterval]:
        return self

    def __next__(self) -> BigInterval:
        value = self.value_after(self._k)
        self._k += 1
        return value


@dataclass(frozen=True)
class RotationEstimate:
    """(F^n x0 - x0)/n and the certified enclosure of rho(g) it implies."""

    estimate: BigInterval
    enclosure: BigInterval
    iterations: int
    exact: Real

    @property
    def contains_exact(self) -> bool:
        return self.enclosure.contains(interval_of(self.exact, self.enclosure.precision_bits))

    def to_json(self) -> dict:
        return {"estimate": self.estimate.to_json(), "enclosure": self.enclosure.to_json(),
                "iterations": self.iterations, "exact": str(self.exact)}


def rotation_number_estimate(it: LiftIterator, n: int) -> RotationEstimate:
    """
    For irrational rho the displacement F^n(x) - x never meets an integer, so it stays in
    one interval (m, m+1) for every x and n*rho lies there too.
    """
    if n < 1:
        raise ValueError("at least one iteration is needed")
    exact = it.step
    if it.start is None:
        value = interval_of(exact, it.precision)
        return RotationEstimate(value, value, n, exact)
    first = it.value_after(0)
    last = it.value_after(n)
    displacement = last - first
    estimate = displacement / n
    lo, hi = math.floor(displacement.lo), math.floor(displacement.hi)
    enclosure = BigInterval(Fraction(lo, n), Fraction(hi + 1, n), it.precision)
    if lo != hi:
        logger.warning("displacement %s straddles an integer; enclosure widened", displacement)
    return RotationEstimate(estimate, enclosure, n, exact)


# -------------------------------------------------------------------
# 2) The invariant measure
# -------------------------------------------------------------------
@dataclass(frozen=True)
class SymbolicArc:
    """Arc (start, end] between symbolic points, or the whole circle."""

    start: Optional[DenjoyPoint] = None
    end: Optional[DenjoyPoint] = None
    full_turn: bool = False

    def __post_init__(self):
        if not self.full_turn and (self.start is None or self.end is None):
            raise ValueError("an arc needs both endpoints unless it is the whole circle")


def _local_key(p: DenjoyPoint):
    """Order of the points that collapse to the same phi value."""
    if isinstance(p, Gap):
        return (1, p.t)
    if p.side.kind is SideKind.LEFT_OF:
        return (0, Fraction(0))
    if p.side.kind is SideKind.RIGHT_OF:
        return (2, Fraction(0))
    return (1, Fraction(0))


def _local_le(a: DenjoyPoint, b: DenjoyPoint) -> bool:
    (ra, ta), (rb, tb) = _local_key(a), _local_key(b)
    if ra != rb:
        return ra < rb
    if isinstance(ta, BigInterval) or isinstance(tb, BigInterval):
        ia = ta if isinstance(ta, BigInterval) else BigInterval.exact(ta)
        ib = tb if isinstance(tb, BigInterval) else BigInterval.exact(tb)
        if ia.hi <= ib.lo:
            return True
        if ib.hi < ia.lo:
            return False
        raise UndecidedError("cannot order two points inside the same gap", ia.precision_bits)
    return ta <= tb


def measure_arc_exact(action: DenjoyAction, arc: SymbolicArc) -> Real:
    """mu((a, b]) = Lebesgue length of phi((a, b])."""
    if arc.full_turn:
        return sympy.Integer(1)
    if classify(action) is not ActionClass.DENJOY:
        if isinstance(arc.start, Gap) or isinstance(arc.end, Gap):
            raise DomainError("a minimal action has no gaps")
        return normalize(sympy.expand(arc.end.y.value - arc.start.y.value)).value
    a, b = canonical(action, arc.start), canonical(action, arc.end)
    ya, yb = semiconjugacy(action, a).value, semiconjugacy(action, b).value
    if exact_equal(ya, yb):
        return sympy.Integer(0) if _local_le(a, b) else sympy.Integer(1)
    return normalize(sympy.expand(yb - ya)).value


def collapse_geometric(action: DenjoyAction, x, precision: Optional[int] = None,
                       settings: PrecisionSettings = DEFAULT_SETTINGS) -> BigInterval:
    """Enclosure of Phi(x) = phi(psi^-1(x)) for a geometric coordinate x."""
    precision = precision or settings.working_bits
    box = x.value if isinstance(x, CirclePoint) else x
    box = box if isinstance(box, BigInterval) else interval_of(box, precision + 2)
    p = realize_inverse(action, box, precision, settings)
    if isinstance(p, Gap) or p.side.label is not None:
        return interval_of(semiconjugacy(action, p).value, precision)
    table = gap_table(action, precision, settings)
    spread = box.width * table.denominator + table.tail
    y = Fraction(int(p.y.value.p), int(p.y.value.q))
    return BigInterval(y - spread, y + spread, precision)


def measure_arc(action: DenjoyAction, arc: Union[SymbolicArc, Arc],
                settings: PrecisionSettings = DEFAULT_SETTINGS) -> BigInterval:
    """Certified mu of an arc with symbolic endpoints or geometric (psi) endpoints."""
    bits = settings.working_bits
    if isinstance(arc, SymbolicArc):
        return interval_of(measure_arc_exact(action, arc), bits)
    if arc.full_turn:
        return BigInterval.exact(1, bits)
    if classify(action) is not ActionClass.DENJOY:
        return arc_length(arc, settings)
    diff = collapse_geometric(action, arc.end, bits, settings) - collapse_geometric(action, arc.start, bits, settings)
    turns = diff.floor()
    if turns is None:
        raise UndecidedError(f"arc measure {diff} straddles a full turn", bits)
    return diff - turns


@dataclass(frozen=True)
class InvariantMeasure:
    """The unique invariant probability measure; its support is the minimal set."""

    action: DenjoyAction

    def arc(self, start: DenjoyPoint, end: DenjoyPoint) -> Real:
        return measure_arc_exact(self.action, SymbolicArc(start, end))

    def total(self) -> Real:
        return measure_arc_exact(self.action, SymbolicArc(full_turn=True))

    def gap(self, label: GapLabel) -> Real:
        return self.arc(Gap(label, Fraction(0)), Gap(label, Fraction(1)))


# -------------------------------------------------------------------
# 3) Coefficient functions
# -------------------------------------------------------------------
def _cmp(a: Real, b: Real) -> int:
    if exact_equal(a, b):
        return 0
    order = compare(a, b)
    if order is Ordering.UNDECIDED:
        raise UndecidedError(f"cannot order {a} and {b}", DEFAULT_SETTINGS.max_bits)
    return -1 if order is Ordering.LESS else 1


def _trim(coeffs: Sequence[Real]) -> Tuple[Real, ...]:
    coeffs = [sympy.expand(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs) or (sympy.S.Zero,)


def poly_add(a: Sequence[Real], b: Sequence[Real]) -> Tuple[Real, ...]:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_mul(a: Sequence[Real], b: Sequence[Real]) -> Tuple[Real, ...]:
    out = [sympy.S.Zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def poly_scale(a: Sequence[Real], c: Real) -> Tuple[Real, ...]:
    return _trim([c * x for x in a])


def poly_eval(a: Sequence[Real], s: Real) -> Real:
    return sympy.expand(sum((c * s ** i for i, c in enumerate(a)), sympy.S.Zero))


def taylor_shift(coeffs: Sequence[Real], delta: Real) -> Tuple[Real, ...]:
    """Coefficients of p(s + delta)."""
    n = len(coeffs)
    return _trim([sum((coeffs[i] * math.comb(i, j) * delta ** (i - j) for i in range(j, n)), sympy.S.Zero)
                  for j in range(n)])


@dataclass(frozen=True)
class PiecewisePolynomial:
    """
    Periodic function on R/Z with exact knots.

    On [knots[k], knots[k+1]) (the last piece wraps to knots[0] + 1) the function is
    sum_i pieces[k][i] * (y - knots[k])**i.
    """

    knots: Tuple[Real, ...]
    pieces: Tuple[Tuple[Real, ...], ...]

    def __post_init__(self):
        if not self.knots or len(self.knots) != len(self.pieces):
            raise ValueError("one polynomial per knot is needed")
        knots = tuple(normalize(as_real(k)).value for k in self.knots)
        for a, b in zip(knots, knots[1:]):
            if _cmp(a, b) >= 0:
                raise ValueError("knots must be strictly increasing in [0, 1)")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "pieces", tuple(_trim([as_scalar(c) for c in p]) for p in self.pieces))

    @classmethod
    def constant(cls, c) -> "PiecewisePolynomial":
        return cls((sympy.S.Zero,), ((as_scalar(c),),))

    @classmethod
    def zero(cls) -> "PiecewisePolynomial":
        return cls.constant(0)

    @classmethod
    def interpolate(cls, points: Sequence[Tuple[object, object]]) -> "PiecewisePolynomial":
        """Continuous periodic piecewise-linear function through (x, value) pairs."""
        pts = sorted(((normalize(as_real(x)).value, as_scalar(v)) for x, v in points),
                     key=functools.cmp_to_key(lambda p, q: _cmp(p[0], q[0])))
        knots = [x for x, _ in pts]
        pieces = []
        for k, (x, v) in enumerate(pts):
            nx, nv = pts[(k + 1) % len(pts)]
            span = nx - x if k + 1 < len(pts) else nx + 1 - x
            pieces.append((v, (nv - v) / span))
        return cls(tuple(knots), tuple(pieces))

    @property
    def degree(self) -> int:
        return max(len(p) for p in self.pieces) - 1

    def span(self, k: int) -> Real:
        if k + 1 < len(self.knots):
            return sympy.expand(self.knots[k + 1] - self.knots[k])
        return sympy.expand(self.knots[0] + 1 - self.knots[k])

    def locate(self, y) -> Tuple[int, Real]:
        y = normalize(as_real(y)).value
        for k in reversed(range(len(self.knots))):
            if _cmp(self.knots[k], y) <= 0:
                return k, sympy.expand(y - self.knots[k])
        return len(self.knots) - 1, sympy.expand(y + 1 - self.knots[-1])

    def __call__(self, y) -> Real:
        k, s = self.locate(y)
        return poly_eval(self.pieces[k], s)

    def shifted(self, s) -> "PiecewisePolynomial":
        """y -> F(y - s)."""
        s = as_real(s)
        moved = [(normalize(sympy.expand(k + s)).value, p) for k, p in zip(self.knots, self.pieces)]
        moved.sort(key=functools.cmp_to_key(lambda a, b: _cmp(a[0], b[0])))
        return PiecewisePolynomial(tuple(k for k, _ in moved), tuple(p for _, p in moved))

    def _refined(self, knots: Sequence[Real]) -> List[Tuple[Real, ...]]:
        out = []
        for m in knots:
            k, delta = self.locate(m)
            out.append(taylor_shift(self.pieces[k], delta))
        return out

    def _combine(self, other: "PiecewisePolynomial", op) -> "PiecewisePolynomial":
        merged = []
        for x in sorted(set(self.knots) | set(other.knots), key=functools.cmp_to_key(_cmp)):
            if not merged or _cmp(merged[-1], x) != 0:
                merged.append(x)
        mine, theirs = self._refined(merged), other._refined(merged)
        return PiecewisePolynomial(tuple(merged), tuple(op(a, b) for a, b in zip(mine, theirs)))

    def __add__(self, other: "PiecewisePolynomial") -> "PiecewisePolynomial":
        return self._combine(other, poly_add)

    def __mul__(self, other: "PiecewisePolynomial") -> "PiecewisePolynomial":
        return self._combine(other, poly_mul)

    def scaled(self, c) -> "PiecewisePolynomial":
        c = as_scalar(c)
        return PiecewisePolynomial(self.knots, tuple(poly_scale(p, c) for p in self.pieces))

    def __neg__(self) -> "PiecewisePolynomial":
        return self.scaled(-1)

    def conjugate(self) -> "PiecewisePolynomial":
        return PiecewisePolynomial(self.knots, tuple(tuple(sympy.conjugate(c) for c in p) for p in self.pieces))

    def is_zero(self) -> bool:
        return all(c == 0 for p in self.pieces for c in p)

    def integral(self) -> Real:
        """Integral over one period."""
        total = sympy.S.Zero
        for k, p in enumerate(self.pieces):
            length = self.span(k)
            total += sum((c * length ** (i + 1) / (i + 1) for i, c in enumerate(p)), sympy.S.Zero)
        return sympy.expand(total)


def _check_bump(coeffs: Sequence[Real]) -> Tuple[Real, ...]:
    coeffs = _trim([as_scalar(c) for c in coeffs])
    if coeffs[0] != 0 or sympy.expand(sum(coeffs)) != 0:
        raise DomainError("gap bumps must vanish at both ends of the gap")
    return coeffs


@dataclass(frozen=True)
class CoefficientFunction:
    """
    Continuous function on the blown-up circle: F(phi(p)) plus finitely many gap bumps.

    A bump is a polynomial in the gap parameter t vanishing at t = 0 and t = 1.
    """

    cantor: PiecewisePolynomial
    gaps: Tuple[Tuple[GapLabel, Tuple[Real, ...]], ...] = ()

    def __post_init__(self):
        bumps = {}
        for label, coeffs in self.gaps:
            coeffs = _check_bump(coeffs)
            bumps[label] = poly_add(bumps.get(label, (sympy.S.Zero,)), coeffs)
        items = tuple(sorted(((lb, c) for lb, c in bumps.items() if any(x != 0 for x in c)),
                             key=lambda item: (item[0].orbit, item[0].g)))
        object.__setattr__(self, "gaps", items)

    @classmethod
    def constant(cls, c) -> "CoefficientFunction":
        return cls(PiecewisePolynomial.constant(c))

    @classmethod
    def bump(cls, label: GapLabel, coeffs: Sequence) -> "CoefficientFunction":
        return cls(PiecewisePolynomial.zero(), ((label, tuple(coeffs)),))

    @property
    def bumps(self) -> Dict[GapLabel, Tuple[Real, ...]]:
        return dict(self.gaps)

    def is_zero(self) -> bool:
        return self.cantor.is_zero() and not self.gaps

    def supported_in_gaps(self) -> bool:
        return self.cantor.is_zero()

    def at(self, action: DenjoyAction, p: DenjoyPoint) -> Real:
        if isinstance(p, Gap):
            if isinstance(p.t, BigInterval):
                raise DomainError("exact evaluation needs an exact gap parameter")
            base = self.cantor(action.position(p.label).value)
            bump = self.bumps.get(p.label)
            return base if bump is None else sympy.expand(base + poly_eval(bump, sympy.Rational(p.t.numerator, p.t.denominator)))
        return self.cantor(p.y.value)

    def moved(self, action: DenjoyAction, g: Sequence[int]) -> "CoefficientFunction":
        """alpha_g(f) = f o act(-g)."""
        g = action.rho.check(g)
        if not any(g):
            return self
        return CoefficientFunction(self.cantor.shifted(action.rho.rho_lift(g)),
                                   tuple((lb.shifted(g), c) for lb, c in self.gaps))

    def plus(self, other: "CoefficientFunction") -> "CoefficientFunction":
        return CoefficientFunction(self.cantor + other.cantor, self.gaps + other.gaps)

    def times(self, action: DenjoyAction, other: "CoefficientFunction") -> "CoefficientFunction":
        mine, theirs = self.bumps, other.bumps
        gaps = []
        for label in set(mine) | set(theirs):
            y = action.position(label).value
            a, b = mine.get(label, (sympy.S.Zero,)), theirs.get(label, (sympy.S.Zero,))
            term = poly_add(poly_scale(b, self.cantor(y)), poly_scale(a, other.cantor(y)))
            gaps.append((label, poly_add(term, poly_mul(a, b))))
        return CoefficientFunction(self.cantor * other.cantor, tuple(gaps))

    def scaled(self, c) -> "CoefficientFunction":
        c = as_scalar(c)
        return CoefficientFunction(self.cantor.scaled(c), tuple((lb, poly_scale(p, c)) for lb, p in self.gaps))

    def conjugate(self) -> "CoefficientFunction":
        return CoefficientFunction(self.cantor.conjugate(),
                                   tuple((lb, tuple(sympy.conjugate(c) for c in p)) for lb, p in self.gaps))


# -------------------------------------------------------------------
# 4) Finitely supported crossed-product elements and the trace
# -------------------------------------------------------------------
@dataclass(frozen=True)
class CrossedElement:
    """sum_g f_g lambda_g; coefficient values may be complex (a + b*I)."""

    action: DenjoyAction
    terms: Tuple[Tuple[Vector, CoefficientFunction], ...] = ()

    def __post_init__(self):
        merged: Dict[Vector, CoefficientFunction] = {}
        for g, f in self.terms:
            g = self.action.rho.check(g)
            merged[g] = merged[g].plus(f) if g in merged else f
        object.__setattr__(self, "terms", tuple(sorted((g, f) for g, f in merged.items() if not f.is_zero())))

    @classmethod
    def from_terms(cls, action: DenjoyAction, terms: Mapping[Sequence[int], CoefficientFunction]) -> "CrossedElement":
        return cls(action, tuple((tuple(g), f) for g, f in terms.items()))

    @classmethod
    def unit(cls, action: DenjoyAction) -> "CrossedElement":
        return cls(action, (((0,) * action.d, CoefficientFunction.constant(1)),))

    @classmethod
    def zero(cls, action: DenjoyAction) -> "CrossedElement":
        return cls(action)

    def coefficient(self, g: Sequence[int]) -> Optional[CoefficientFunction]:
        return dict(self.terms).get(tuple(g))

    def _same_action(self, other: "CrossedElement") -> None:
        if other.action != self.action:
            raise DomainError("elements of different crossed products")

    def __add__(self, other: "CrossedElement") -> "CrossedElement":
        self._same_action(other)
        return CrossedElement(self.action, self.terms + other.terms)

    def __mul__(self, other: "CrossedElement") -> "CrossedElement":
        """(f lambda_g)(h lambda_k) = f alpha_g(h) lambda_{g+k}."""
        self._same_action(other)
        out = []
        for g, f in self.terms:
            for k, h in other.terms:
                out.append((add(g, k), f.times(self.action, h.moved(self.action, g))))
        return CrossedElement(self.action, tuple(out))

    def star(self) -> "CrossedElement":
        """(f lambda_g)* = alpha_{-g}(conj f) lambda_{-g}."""
        return CrossedElement(self.action, tuple((negate(g), f.conjugate().moved(self.action, negate(g)))
                                                 for g, f in self.terms))

    def scaled(self, c) -> "CrossedElement":
        return CrossedElement(self.action, tuple((g, f.scaled(c)) for g, f in self.terms))


def trace(action: DenjoyAction, a: CrossedElement) -> Real:
    """tau(sum f_g lambda_g) = integral of f_0 against mu; gaps carry no mass. Complex in general."""
    if a.action != action:
        raise DomainError("element belongs to a different crossed product")
    f0 = a.coefficient((0,) * action.d)
    if f0 is None:
        return sympy.S.Zero
    return f0.cantor.integral()


class TraceIdealAnswer(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNDECIDED = "Undecided"


def in_trace_ideal(action: DenjoyAction, a: CrossedElement,
                   settings: PrecisionSettings = DEFAULT_SETTINGS) -> TraceIdealAnswer:
    """Is tau(a* a) = 0? Gap-supported coefficients answer Yes without numerics."""
    if classify(action) is not ActionClass.DENJOY:
        raise DomainError("the trace ideal is considered for Denjoy actions")
    if all(f.supported_in_gaps() for _, f in a.terms):
        return TraceIdealAnswer.YES
    value, imaginary = sympy.expand(trace(action, a.star() * a)).as_real_imag()
    if sympy.expand(imaginary) != 0:
        raise ArithmeticError(f"tau(a*a) has imaginary part {imaginary}")
    try:
        sign = certified_sign(value, settings)
    except UndecidedError:
        logger.warning("tau(a*a) could not be separated from 0")
        return TraceIdealAnswer.UNDECIDED
    if sign < 0:
        raise ArithmeticError(f"tau(a*a) = {value} is negative")
    return TraceIdealAnswer.NO if sign > 0 else TraceIdealAnswer.YES


trace_ideal_contains = in_trace_ideal


# -------------------------------------------------------------------
# 5) Integration in the geometric coordinate
# -------------------------------------------------------------------
class _Antiderivative:
    """Periodic antiderivative of a piecewise-linear function with rational data."""

    def __init__(self, f: PiecewisePolynomial):
        if f.degree > 1:
            raise DomainError("geometric integration supports piecewise-linear functions")
        knots = [_fraction(k) for k in f.knots]
        pieces = [tuple(_fraction(c) for c in p) + (Fraction(0),) for p in f.pieces]
        starts, values, slopes = [], [], []
        if knots[0] != 0:
            c0, c1 = pieces[-1][0], pieces[-1][1]
            starts.append(Fraction(0))
            values.append(c0 + c1 * (1 - knots[-1]))
            slopes.append(c1)
        for k, (c0, c1) in zip(knots, (p[:2] for p in pieces)):
            starts.append(k)
            values.append(c0)
            slopes.append(c1)
        self.starts, self.values, self.slopes = starts, values, slopes
        ends = starts[1:] + [Fraction(1)]
        self.cumulative = [Fraction(0)]
        for s, e, v, m in zip(starts, ends, values, slopes):
            h = e - s
            self.cumulative.append(self.cumulative[-1] + v * h + m * h * h / 2)
        self.period = self.cumulative[-1]
        self.lipschitz = max(abs(m) for m in slopes)
        self.sup = max(max(abs(v), abs(v + m * (e - s))) for s, e, v, m in zip(starts, ends, values, slopes))

    def __call__(self, x: Fraction) -> Fraction:
        turns = math.floor(x)
        x -= turns
        k = bisect.bisect_right(self.starts, x) - 1
        h = x - self.starts[k]
        return turns * self.period + self.cumulative[k] + self.values[k] * h + self.slopes[k] * h * h / 2


def _fraction(x: Real) -> Fraction:
    x = as_real(x)
    if not x.is_Rational:
        raise DomainError(f"geometric integration needs rational data, got {x}")
    return Fraction(int(x.p), int(x.q))


def integrate_geometric(action: DenjoyAction, f: PiecewisePolynomial, precision: Optional[int] = None,
                        settings: PrecisionSettings = DEFAULT_SETTINGS) -> BigInterval:
    """
    Certified integral of f(x) d mu(x), x the geometric coordinate.

    mu is the image of Lebesgue measure under y -> psi(Cantor(y)), so the integral is
    (1 + L) times the integral of f over the complement of the gap images. The table
    truncation moves psi by at most tail/(1+L) and the fixed-point positions move it only
    on a set of measure sum(err) * 2**-bits; both enter the error term.
    """
    precision = precision or settings.working_bits
    anti = _Antiderivative(f)
    if classify(action) is not ActionClass.DENJOY:
        value = anti(Fraction(1))
        return BigInterval(value, value, precision)
    table = gap_table(action, precision, settings)
    den = table.denominator
    end = (1 + table.prefix[-1]) / den
    inside = anti(end)
    for left, length in zip(table.lefts, table.lengths):
        inside -= anti(left + length / den) - anti(left)
    value = den * inside
    error = anti.lipschitz * table.tail / den + 2 * anti.sup * sum(table.pos_err) * table.scale
    return BigInterval(value - error, value + error, precision)

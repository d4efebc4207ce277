# denjoy_invariants/denjoy_model.py
"""
Free actions of Z^d on the circle: minimal rotation actions and their Denjoy blow-ups.

Points of the blown-up circle are symbolic (DenjoyPoint). The action, the collapse map
phi and the orbit bookkeeping are exact; the geometric coordinate psi on the standard
circle is a certified interval built from a sorted table of gap positions plus a
closed-form tail.
"""

import bisect
import enum
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from .circle_core import (
    BigInterval,
    CirclePoint,
    Ordering,
    Real,
    as_real,
    certified_sign,
    compare,
    exact_equal,
    fixed_point,
    interval_of,
    is_rational,
    linear_coordinates,
    normalize,
    _coefficients,
)
from .config import (
    DEFAULT_CERTIFICATE_RADIUS,
    DEFAULT_INDEPENDENCE_BOUND,
    DEFAULT_LAMBDA,
    DEFAULT_SETTINGS,
    PrecisionSettings,
)
from .errors import BudgetExceededError, DomainError, InvalidActionError, UndecidedError

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


# -------------------------------------------------------------------
# 1) Lattice enumeration by l1 shells
# -------------------------------------------------------------------
def lattice_shell_size(d: int, n: int) -> int:
    """Number of g in Z^d with ||g||_1 = n."""
    if n == 0:
        return 1
    return sum(2 ** k * math.comb(d, k) * math.comb(n - 1, k - 1) for k in range(1, min(d, n) + 1))


def lattice_ball_size(d: int, n: int) -> int:
    return sum(lattice_shell_size(d, m) for m in range(n + 1))


def shell(d: int, n: int) -> Iterator[Vector]:
    """All g with ||g||_1 = n, lexicographic."""
    if d == 1:
        if n == 0:
            yield (0,)
        else:
            yield (-n,)
            yield (n,)
        return
    for first in range(-n, n + 1):
        for rest in shell(d - 1, n - abs(first)):
            yield (first,) + rest


def lattice_points(d: int, radius: int) -> Iterator[Vector]:
    for n in range(radius + 1):
        yield from shell(d, n)


def l1(g: Sequence[int]) -> int:
    return sum(abs(x) for x in g)


def add(g: Sequence[int], h: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(g, h))


def negate(g: Sequence[int]) -> Vector:
    return tuple(-a for a in g)


# -------------------------------------------------------------------
# 2) Rotation vector and the independence certificate
# -------------------------------------------------------------------
@dataclass(frozen=True)
class ScanResult:
    """Outcome of a fixed-point scan of |n_0 + sum n_i gamma_i| over a box."""

    bound: int
    bits: int
    checked: int
    min_margin: Optional[Fraction]
    suspects: Tuple[Vector, ...]


def _scan_bits(d: int, bound: int) -> int:
    # keeps sum n_j F_j inside int64
    return 61 - math.ceil(math.log2(d * bound + 1))


def independence_scan(gamma: Sequence[Real], bound: int, enum_budget: int) -> ScanResult:
    """
    Vectorized search for integer vectors (n_1..n_d), |n_i| <= bound, whose combination
    sum n_i gamma_i might lie within rounding error of an integer.

    Distance to the nearest integer covers every n_0 at once. Vectors that cannot be
    separated at int64 fixed point are returned as suspects for an exact follow-up.
    """
    d = len(gamma)
    while bound > 0 and (2 * bound + 1) ** d > enum_budget:
        bound -= 1
    if bound == 0:
        logger.info("independence scan skipped: box does not fit the enumeration budget")
        return ScanResult(0, 0, 0, None, ())
    bits = _scan_bits(d, bound)
    fixed = [fixed_point(g, bits) for g in gamma]
    floors = np.array([f for f, _ in fixed], dtype=np.int64)
    err = max(e for _, e in fixed)
    modulus = np.int64(1) << np.int64(bits)
    values = np.arange(-bound, bound + 1, dtype=np.int64)

    rest_sum = np.zeros(1, dtype=np.int64)
    rest_norm = np.zeros(1, dtype=np.int64)
    for j in range(1, d):
        rest_sum = (rest_sum[:, None] + values[None, :] * floors[j]).ravel()
        rest_norm = (rest_norm[:, None] + np.abs(values)[None, :]).ravel()

    suspects: List[Vector] = []
    min_margin = None
    checked = 0
    shape = (2 * bound + 1,) * (d - 1)
    for n1 in values:
        total = rest_sum + n1 * floors[0]
        norm = rest_norm + abs(int(n1))
        residue = np.mod(total, modulus)
        dist = np.minimum(residue, modulus - residue)
        slack = dist - norm * err
        if n1 == 0:
            slack = np.where(norm == 0, np.iinfo(np.int64).max, slack)
            checked -= 1
        checked += slack.size
        low = int(slack.min())
        if min_margin is None or low < min_margin:
            min_margin = low
        for idx in np.flatnonzero(slack <= 0):
            rest = np.unravel_index(int(idx), shape) if d > 1 else ()
            suspects.append((int(n1),) + tuple(int(r) - bound for r in rest))
    logger.debug("independence scan: %d vectors at %d bits, %d suspects", checked, bits, len(suspects))
    margin = Fraction(min_margin, 1 << bits) if min_margin is not None else None
    return ScanResult(bound, bits, checked, margin, tuple(suspects))


@dataclass(frozen=True)
class IndependenceCertificate:
    bound: int
    bits: int
    checked: int
    margin: Optional[Fraction]

    def to_json(self) -> dict:
        return {"bound": self.bound, "bits": self.bits, "checked": self.checked,
                "margin": None if self.margin is None else str(self.margin)}


def _integer_relation(gamma: Sequence[Real]) -> Optional[Vector]:
    """An exact integer relation n_0 + sum n_i gamma_i = 0 read off radical coordinates."""
    columns = [{sympy.S.One: sympy.S.One}] + [_coefficients(g) for g in gamma]
    atoms = sorted({key for col in columns for key in col}, key=sympy.default_sort_key)
    matrix = sympy.Matrix([[col.get(atom, 0) for col in columns] for atom in atoms])
    null = matrix.nullspace()
    if not null:
        return None
    vec = null[0]
    scale = sympy.ilcm(*[sympy.Rational(v).q for v in vec])
    return tuple(int(v * scale) for v in vec)


@dataclass(frozen=True)
class RotationVector:
    """The homomorphism rho: Z^d -> T, g -> sum g_i gamma_i mod 1."""

    gamma: Tuple[Real, ...]

    def __post_init__(self):
        gamma = tuple(as_real(g) for g in self.gamma)
        if not gamma:
            raise InvalidActionError("rotation vector needs at least one angle")
        for g in gamma:
            if certified_sign(g) <= 0 or certified_sign(1 - g) <= 0:
                raise InvalidActionError(f"angle {g} is not in (0, 1)")
        object.__setattr__(self, "gamma", gamma)

    @property
    def d(self) -> int:
        return len(self.gamma)

    def check(self, g: Sequence[int]) -> Vector:
        g = tuple(int(x) for x in g)
        if len(g) != self.d:
            raise ValueError(f"group element {g} does not have {self.d} coordinates")
        return g

    def rho_lift(self, g: Sequence[int]) -> Real:
        g = self.check(g)
        return sympy.expand(sum((n * gm for n, gm in zip(g, self.gamma)), sympy.S.Zero))

    def rho(self, g: Sequence[int]) -> CirclePoint:
        return normalize(self.rho_lift(g))

    @property
    def all_rational(self) -> bool:
        return all(is_rational(g) for g in self.gamma)

    def certify_independence(self, bound: int = DEFAULT_INDEPENDENCE_BOUND,
                             settings: PrecisionSettings = DEFAULT_SETTINGS) -> IndependenceCertificate:
        """
        Certify that 1, gamma_1, ..., gamma_d are rationally independent.

        Exact radical coordinates detect any relation among the given expressions; the
        fixed-point scan over |n_i| <= bound is the numeric witness reported alongside.
        """
        relation = _integer_relation(self.gamma)
        if relation is not None:
            raise InvalidActionError(f"angles satisfy the integer relation {relation}")
        scan = independence_scan(self.gamma, bound, settings.enum_budget)
        for n in scan.suspects:
            if is_rational(sum(c * g for c, g in zip(n, self.gamma))):
                raise InvalidActionError(f"angles satisfy a relation with coefficients {n}")
        return IndependenceCertificate(scan.bound, scan.bits, scan.checked, scan.min_margin)


# -------------------------------------------------------------------
# 3) Gap lengths and blow-up data
# -------------------------------------------------------------------
@dataclass(frozen=True)
class GeometricLengthFamily:
    """l_g = scale * lam**||g||_1; the default scale makes the total length 1."""

    d: int
    lam: Fraction = DEFAULT_LAMBDA
    scale: Optional[Fraction] = None

    name = "geometric"

    def __post_init__(self):
        lam = Fraction(self.lam)
        if not 0 < lam < 1:
            raise InvalidActionError(f"lam must lie in (0, 1), got {lam}")
        object.__setattr__(self, "lam", lam)
        if self.scale is None:
            object.__setattr__(self, "scale", ((1 - lam) / (1 + lam)) ** self.d)
        else:
            scale = Fraction(self.scale)
            if scale <= 0:
                raise InvalidActionError("scale must be positive")
            object.__setattr__(self, "scale", scale)

    @classmethod
    def from_parameters(cls, d: int, parameters: Mapping[str, str]) -> "GeometricLengthFamily":
        unknown = set(parameters) - {"lam", "scale"}
        if unknown:
            raise InvalidActionError(f"unknown geometric family parameters {sorted(unknown)}")
        lam = Fraction(parameters.get("lam", DEFAULT_LAMBDA))
        scale = parameters.get("scale")
        return cls(d, lam, None if scale is None else Fraction(scale))

    def parameters(self) -> Dict[str, str]:
        return {"lam": str(self.lam), "scale": str(self.scale)}

    def length(self, g: Sequence[int]) -> Fraction:
        return self.scale * self.lam ** l1(g)

    @property
    def total(self) -> Fraction:
        return self.scale * ((1 + self.lam) / (1 - self.lam)) ** self.d

    def tail(self, radius: int) -> Fraction:
        """Exact sum of l_g over ||g||_1 > radius."""
        head = sum(lattice_shell_size(self.d, n) * self.lam ** n for n in range(radius + 1))
        return self.total - self.scale * head


LENGTH_FAMILIES = {
    "geometric": GeometricLengthFamily.from_parameters,
}


@dataclass(frozen=True)
class BlowUpData:
    """The orbit of `base_point` is blown up into gaps of lengths given by `family`."""

    base_point: Real
    family: GeometricLengthFamily

    def __post_init__(self):
        object.__setattr__(self, "base_point", normalize(as_real(self.base_point)).value)


@dataclass(frozen=True)
class GapLabel:
    orbit: int
    g: Vector

    def shifted(self, h: Sequence[int]) -> "GapLabel":
        return GapLabel(self.orbit, add(self.g, h))

    def __str__(self):
        return f"I[{self.orbit}:{','.join(map(str, self.g))}]"


# -------------------------------------------------------------------
# 4) Symbolic points
# -------------------------------------------------------------------
class SideKind(enum.Enum):
    PLAIN = "Plain"
    LEFT_OF = "LeftOf"
    RIGHT_OF = "RightOf"


@dataclass(frozen=True)
class Side:
    kind: SideKind = SideKind.PLAIN
    label: Optional[GapLabel] = None

    def __post_init__(self):
        if (self.kind is SideKind.PLAIN) != (self.label is None):
            raise ValueError("LeftOf/RightOf need a gap label and Plain must not carry one")

    def shifted(self, h: Sequence[int]) -> "Side":
        return self if self.label is None else Side(self.kind, self.label.shifted(h))


PLAIN = Side()


def left_of(label: GapLabel) -> Side:
    return Side(SideKind.LEFT_OF, label)


def right_of(label: GapLabel) -> Side:
    return Side(SideKind.RIGHT_OF, label)


@dataclass(frozen=True)
class Gap:
    """Point at parameter t of the gap `label`; t is exact or a certified interval."""

    label: GapLabel
    t: Union[Fraction, BigInterval]

    def __post_init__(self):
        if not isinstance(self.t, BigInterval):
            object.__setattr__(self, "t", Fraction(self.t))
        lo, hi = (self.t.lo, self.t.hi) if isinstance(self.t, BigInterval) else (self.t, self.t)
        if lo < 0 or hi > 1:
            raise ValueError(f"gap parameter {self.t} leaves [0, 1]")


@dataclass(frozen=True)
class Cantor:
    """Point of the minimal set with collapsed coordinate y (exact)."""

    y: CirclePoint
    side: Side = PLAIN

    def __post_init__(self):
        y = self.y if isinstance(self.y, CirclePoint) else normalize(self.y)
        if not y.is_exact:
            raise ValueError("Cantor codes need an exact coordinate")
        object.__setattr__(self, "y", y)


DenjoyPoint = Union[Gap, Cantor]


class ActionClass(enum.Enum):
    FINITE_ORBIT = "FiniteOrbit"
    MINIMAL = "Minimal"
    DENJOY = "Denjoy"


# -------------------------------------------------------------------
# 5) The action
# -------------------------------------------------------------------
@dataclass(frozen=True)
class DenjoyAction:
    rho: RotationVector
    blowups: Tuple[BlowUpData, ...] = ()
    certificate: Optional[IndependenceCertificate] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "blowups", tuple(self.blowups))
        if not self.blowups:
            return
        if any(is_rational(g) for g in self.rho.gamma):
            raise InvalidActionError("a blow-up needs infinite orbits but some angle is rational")
        for b in self.blowups:
            if b.family.d != self.rho.d:
                raise InvalidActionError(f"length family is for d={b.family.d}, action has d={self.rho.d}")
        if self.certificate is None:
            object.__setattr__(self, "certificate", self.rho.certify_independence())
        for i, j in itertools.combinations(range(len(self.blowups)), 2):
            if self.orbit_offset(self.blowups[j].base_point, i) is not None:
                raise InvalidActionError(f"base points {i} and {j} lie in the same orbit")

    @property
    def d(self) -> int:
        return self.rho.d

    @property
    def k(self) -> int:
        return len(self.blowups)

    def orbit_offset(self, y: Real, orbit: int) -> Optional[Vector]:
        """g with y = base_orbit + rho(g) mod 1, or None."""
        coords = linear_coordinates(sympy.expand(as_real(y) - self.blowups[orbit].base_point), self.rho.gamma)
        if coords is None or any(c.denominator != 1 for c in coords):
            return None
        return tuple(int(c) for c in coords[1:])

    def locate_orbit(self, y: Real) -> Optional[GapLabel]:
        for i in range(self.k):
            g = self.orbit_offset(y, i)
            if g is not None:
                return GapLabel(i, g)
        return None

    def position(self, label: GapLabel) -> CirclePoint:
        """Collapsed coordinate y_i + rho(g) of the gap."""
        self.check_label(label)
        return normalize(sympy.expand(self.blowups[label.orbit].base_point + self.rho.rho_lift(label.g)))

    def length(self, label: GapLabel) -> Fraction:
        self.check_label(label)
        return self.blowups[label.orbit].family.length(label.g)

    @property
    def total_length(self) -> Fraction:
        return sum((b.family.total for b in self.blowups), Fraction(0))

    def tail(self, radius: int) -> Fraction:
        return sum((b.family.tail(radius) for b in self.blowups), Fraction(0))

    def check_label(self, label: GapLabel) -> None:
        if not 0 <= label.orbit < self.k:
            raise DomainError(f"gap label {label} refers to orbit {label.orbit} of {self.k}")
        self.rho.check(label.g)


def classify(action: DenjoyAction) -> ActionClass:
    if action.rho.all_rational:
        return ActionClass.FINITE_ORBIT
    if not action.blowups:
        return ActionClass.MINIMAL
    return ActionClass.DENJOY


def rotation_image_order(action: DenjoyAction) -> Optional[int]:
    """|rho(Z^d)| when finite: the lcm of the angle denominators."""
    if not action.rho.all_rational:
        return None
    return int(sympy.ilcm(*[sympy.Rational(g).q for g in action.rho.gamma]))


def canonical(action: DenjoyAction, p: DenjoyPoint) -> DenjoyPoint:
    """Gap endpoints become Cantor side codes; a Plain code on a blown-up orbit becomes LeftOf."""
    if isinstance(p, Gap):
        if not action.blowups:
            raise DomainError("a minimal action has no gaps")
        action.check_label(p.label)
        if not isinstance(p.t, BigInterval) and p.t in (0, 1):
            side = left_of(p.label) if p.t == 0 else right_of(p.label)
            return Cantor(action.position(p.label), side)
        return p
    if p.side.label is not None:
        if not exact_equal(action.position(p.side.label).value, p.y.value):
            raise DomainError(f"{p.side.kind.value}({p.side.label}) does not sit at {p.y}")
        return p
    if action.blowups:
        label = action.locate_orbit(p.y.value)
        if label is not None:
            return Cantor(p.y, left_of(label))
    return p


def act(action: DenjoyAction, g: Sequence[int], p: DenjoyPoint) -> DenjoyPoint:
    g = action.rho.check(g)
    if isinstance(p, Gap):
        return Gap(p.label.shifted(g), p.t)
    if not any(g):
        return p
    y = normalize(sympy.expand(p.y.value + action.rho.rho_lift(g)))
    return Cantor(y, p.side.shifted(g))


def semiconjugacy(action: DenjoyAction, p: DenjoyPoint) -> CirclePoint:
    """phi: constant y_i + rho(g) on the gap I_g, the identity on Cantor codes."""
    if classify(action) is not ActionClass.DENJOY:
        raise DomainError("the semiconjugacy is only defined for Denjoy actions")
    if isinstance(p, Gap):
        return action.position(p.label)
    return p.y


# -------------------------------------------------------------------
# 6) Gap table: certified order of the tabulated orbit positions
# -------------------------------------------------------------------
@dataclass(frozen=True)
class GapTable:
    """
    Gaps with ||g||_1 <= radius sorted by collapsed position.

    Positions are stored as fixed-point lower bounds over 2**bits with per-entry error,
    and `prefix[k]` is the exact total length of the entries before k.
    """

    bits: int
    radius: int
    labels: Tuple[GapLabel, ...]
    pos_lo: Tuple[int, ...]
    pos_err: Tuple[int, ...]
    lengths: Tuple[Fraction, ...]
    prefix: Tuple[Fraction, ...]
    tail: Fraction
    total: Fraction
    index: Mapping[GapLabel, int] = field(compare=False, hash=False)
    # lower bounds of psi at each left endpoint, increasing
    lefts: Tuple[Fraction, ...] = field(compare=False, hash=False, default=())
    max_err: int = 0

    @property
    def scale(self) -> Fraction:
        return Fraction(1, 1 << self.bits)

    @property
    def denominator(self) -> Fraction:
        return 1 + self.total

    def position_interval(self, k: int) -> BigInterval:
        return BigInterval(self.pos_lo[k] * self.scale, (self.pos_lo[k] + self.pos_err[k]) * self.scale, self.bits)

    def slack(self, k: int) -> Fraction:
        return Fraction(0) if self.pos_lo[k] + self.pos_err[k] == 0 else self.tail

    def left_end(self, k: int) -> BigInterval:
        """psi of the left endpoint of entry k."""
        pos = self.position_interval(k)
        return BigInterval((pos.lo + self.prefix[k]) / self.denominator,
                           (pos.hi + self.prefix[k] + self.slack(k)) / self.denominator, self.bits)


def radius_for(action: DenjoyAction, precision: int, settings: PrecisionSettings) -> int:
    """Smallest radius whose tail is at most 2**-(precision+1) of 1 + L, within the budget."""
    bound = (1 + action.total_length) / (1 << (precision + 1))
    radius = 0
    while action.tail(radius) > bound:
        radius += 1
        if action.k * lattice_ball_size(action.d, radius) > settings.enum_budget:
            achieved = action.tail(radius - 1) / (1 + action.total_length)
            raise BudgetExceededError(
                f"gap table for 2^-{precision} needs more than {settings.enum_budget} gaps",
                float(achieved), settings.enum_budget)
    return radius


def _fixed_positions(action: DenjoyAction, labels: Sequence[GapLabel], bits: int):
    modulus = 1 << bits
    gammas = [fixed_point(g, bits) for g in action.rho.gamma]
    bases = [fixed_point(b.base_point, bits) for b in action.blowups]
    out = []
    for label in labels:
        lo, err = bases[label.orbit]
        for n, (f, e) in zip(label.g, gammas):
            lo += n * f if n >= 0 else n * (f + e)
            err += abs(n) * e
        lo %= modulus
        if lo + err >= modulus and err:
            return None
        out.append((lo, err))
    return out


@lru_cache(maxsize=32)
def gap_table(action: DenjoyAction, precision: int,
              settings: PrecisionSettings = DEFAULT_SETTINGS) -> GapTable:
    if not action.blowups:
        raise DomainError("a minimal action has no gaps")
    radius = radius_for(action, precision, settings)
    labels = [GapLabel(i, g) for i in range(action.k) for g in lattice_points(action.d, radius)]
    logger.info("gap table: %d gaps, radius %d, precision %d", len(labels), radius, precision)
    bits = precision + 32
    while True:
        fixed = _fixed_positions(action, labels, bits)
        if fixed is not None:
            order = sorted(range(len(labels)), key=lambda k: fixed[k][0])
            separated = all(fixed[a][0] + fixed[a][1] < fixed[b][0] for a, b in zip(order, order[1:]))
            if separated:
                break
        if bits > 2 * settings.max_bits:
            raise UndecidedError("gap positions could not be separated", bits)
        logger.debug("gap positions overlap at %d bits, doubling", bits)
        bits *= 2
    sorted_labels = tuple(labels[k] for k in order)
    pos_lo = tuple(fixed[k][0] for k in order)
    lengths = tuple(action.length(lb) for lb in sorted_labels)
    prefix = [Fraction(0)]
    for ln in lengths:
        prefix.append(prefix[-1] + ln)
    den = 1 + action.total_length
    scale = Fraction(1, 1 << bits)
    return GapTable(
        bits=bits,
        radius=radius,
        labels=sorted_labels,
        pos_lo=pos_lo,
        pos_err=tuple(fixed[k][1] for k in order),
        lengths=lengths,
        prefix=tuple(prefix),
        tail=action.tail(radius),
        total=action.total_length,
        index={lb: k for k, lb in enumerate(sorted_labels)},
        lefts=tuple((lo * scale + s) / den for lo, s in zip(pos_lo, prefix)),
        max_err=max(fixed[k][1] for k in order),
    )


def _rank(action: DenjoyAction, table: GapTable, y: Real, settings: PrecisionSettings) -> int:
    """Number of tabulated positions strictly below y, for y off the tabulated labels."""
    lo, err = fixed_point(y, table.bits)
    lo %= 1 << table.bits
    first = bisect.bisect_left(table.pos_lo, lo - table.max_err - 1)
    last = bisect.bisect_right(table.pos_lo, lo + err)
    rank = first
    for k in range(first, last):
        if table.pos_lo[k] + table.pos_err[k] < lo:
            rank = k + 1
            continue
        order = compare(action.position(table.labels[k]).value, y, settings)
        if order is Ordering.UNDECIDED:
            raise UndecidedError(f"cannot order {y} against gap {table.labels[k]}", settings.max_bits)
        if order is Ordering.LESS:
            rank = k + 1
    return rank


# -------------------------------------------------------------------
# 7) Geometric realization psi and its inverse
# -------------------------------------------------------------------
def realize(action: DenjoyAction, p: DenjoyPoint, precision: Optional[int] = None,
            settings: PrecisionSettings = DEFAULT_SETTINGS) -> BigInterval:
    """
    psi(p) = (y + sum of l_h over gaps left of y + t*l_g) / (1 + L), width <= 2**-precision.

    Gaps outside the table only enter through the tail, added as upper slack.
    """
    precision = precision or settings.working_bits
    if not action.blowups:
        if isinstance(p, Gap):
            raise DomainError("a minimal action has no gaps")
        return interval_of(p.y.value, precision)
    p = canonical(action, p)
    table = gap_table(action, precision, settings)
    if isinstance(p, Gap):
        label, kind = p.label, None
        y = action.position(label).value
    else:
        label, kind = p.side.label, p.side.kind
        y = p.y.value
    if label is not None and label in table.index:
        before = table.prefix[table.index[label]]
    else:
        before = table.prefix[_rank(action, table, y, settings)]
    slack = Fraction(0) if y == 0 else table.tail
    extra: Union[Fraction, BigInterval] = Fraction(0)
    if isinstance(p, Gap):
        extra = action.length(label) * p.t
    elif kind is SideKind.RIGHT_OF:
        extra = action.length(label)
    yi = interval_of(y, precision + 2)
    value = yi + before + extra
    value = BigInterval(value.lo, value.hi + slack, precision)
    return value / table.denominator


def _clip_unit(lo: Fraction, hi: Fraction) -> Tuple[Fraction, Fraction]:
    return max(lo, Fraction(0)), min(hi, Fraction(1))


def _inverse_at(action: DenjoyAction, table: GapTable, x: BigInterval) -> Optional[DenjoyPoint]:
    den = table.denominator
    # every later gap starts strictly right of x.hi
    j = bisect.bisect_right(table.lefts, x.hi) - 1
    if j >= 0:
        left = table.left_end(j)
        width = table.lengths[j] / den
        if x.lo >= left.hi and x.hi <= left.lo + width:
            t_lo, t_hi = _clip_unit((x.lo - left.hi) / width, (x.hi - left.lo) / width)
            if t_lo == t_hi:
                return canonical(action, Gap(table.labels[j], t_lo))
            return Gap(table.labels[j], BigInterval(t_lo, t_hi, x.precision_bits))
        if x.lo <= left.hi + width:
            return None
    before = table.prefix[j + 1]
    y_lo = x.lo * den - before - table.tail
    y_hi = x.hi * den - before
    floor = table.position_interval(j).lo if j >= 0 else Fraction(0)
    ceil = table.position_interval(j + 1).hi if j + 1 < len(table.labels) else Fraction(1)
    y_lo, y_hi = max(y_lo, floor), min(y_hi, ceil)
    y = (y_lo + y_hi) / 2
    if y >= 1:
        y -= 1
    return canonical(action, Cantor(CirclePoint(sympy.Rational(y.numerator, y.denominator))))


def realize_inverse(action: DenjoyAction, x: Union[CirclePoint, BigInterval, Fraction],
                    precision: Optional[int] = None,
                    settings: PrecisionSettings = DEFAULT_SETTINGS) -> DenjoyPoint:
    """A symbolic point whose realization contains x; exact Gap codes inside located gaps."""
    if classify(action) is not ActionClass.DENJOY:
        raise DomainError("realize_inverse needs a Denjoy action")
    precision = precision or settings.working_bits
    if isinstance(x, CirclePoint):
        x = x.value
    box = x if isinstance(x, BigInterval) else interval_of(x, precision + 2)
    if box.lo < 0 or box.hi >= 1:
        box = box - math.floor(box.lo)
    ladder = settings.with_overrides(working_bits=max(precision, settings.working_bits))
    for bits in ladder.refinements():
        found = _inverse_at(action, gap_table(action, bits, settings), box)
        if found is not None:
            return found
        logger.debug("realize_inverse: %s straddles a gap end at %d bits", box, bits)
    raise UndecidedError(f"cannot separate {box} from a gap endpoint", settings.max_bits)


# -------------------------------------------------------------------
# 8) Wandering orbits and properness
# -------------------------------------------------------------------
@dataclass(frozen=True)
class DisjointnessCertificate:
    """Tabulated gap closures up to `radius` pairwise separated by at least `min_separation`."""

    radius: int
    gaps_checked: int
    min_separation: Fraction
    independence: Optional[IndependenceCertificate]

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "gaps_checked": self.gaps_checked,
            "min_separation": str(self.min_separation),
            "independence": None if self.independence is None else self.independence.to_json(),
        }


@dataclass(frozen=True)
class OrbitReport:
    k: int
    representatives: Tuple[GapLabel, ...]
    certificate: DisjointnessCertificate


def wandering_orbit_reps(action: DenjoyAction, radius: int = DEFAULT_CERTIFICATE_RADIUS,
                         settings: PrecisionSettings = DEFAULT_SETTINGS) -> OrbitReport:
    if radius < 0:
        raise ValueError(f"certificate radius must be non-negative, got {radius}")
    if classify(action) is not ActionClass.DENJOY:
        raise DomainError("wandering intervals exist only for Denjoy actions")
    labels = [GapLabel(i, g) for i in range(action.k) for g in lattice_points(action.d, radius)]
    bits = settings.working_bits
    while True:
        fixed = _fixed_positions(action, labels, bits)
        if fixed is not None:
            ordered = sorted(fixed)
            gaps = [b[0] - (a[0] + a[1]) for a, b in zip(ordered, ordered[1:])]
            if all(gap > 0 for gap in gaps):
                break
        if bits >= settings.max_bits:
            raise UndecidedError("orbit positions could not be separated", bits)
        bits *= 2
    separation = Fraction(min(gaps, default=1 << bits), 1 << bits)
    cert = DisjointnessCertificate(radius, len(labels), separation, action.certificate)
    reps = tuple(GapLabel(i, (0,) * action.d) for i in range(action.k))
    return OrbitReport(action.k, reps, cert)


def group_K(action: DenjoyAction, gaps: Iterable[GapLabel]) -> FrozenSet[Vector]:
    """
    {g : g K meets K} for K the union of the closures of `gaps`.

    Closures of distinct gaps are disjoint and g I_a = I_{a+g}, so g K meets K exactly
    when g = b - a for two gaps a, b of K in the same orbit.
    """
    gaps = list(gaps)
    if not gaps:
        raise DomainError("K must contain at least one gap")
    if classify(action) is not ActionClass.DENJOY:
        raise DomainError("properness is stated for Denjoy actions")
    for label in gaps:
        action.check_label(label)
    return frozenset(
        tuple(x - y for x, y in zip(b.g, a.g)) for a in gaps for b in gaps if a.orbit == b.orbit
    )

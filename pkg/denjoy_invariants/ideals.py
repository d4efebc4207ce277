# denjoy_invariants/ideals.py
"""
Prim(A) = Y0 u {J} for a Denjoy crossed product, and its ideals.

Y0 is k open intervals, one per wandering orbit, each parametrized by (0,1). J is the
closed point lying in the closure of every non-empty subset, so its only neighborhood is
the whole space. Subsets are finite unions of rational intervals per component.
"""

import enum
import itertools
import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .config import DEFAULT_SETTINGS, PrecisionSettings
from .denjoy_model import ActionClass, DenjoyAction, GapLabel, classify
from .ergodic import TraceIdealAnswer, trace_ideal_contains
from .errors import DomainError
from .ktheory import IdealKData, ideal_k_data

logger = logging.getLogger(__name__)

OrbitCount = Union[int, float]

J_LABEL = "J"


# -------------------------------------------------------------------
# 1) Pieces of one component (0,1)
# -------------------------------------------------------------------
@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not 0 <= lo <= hi <= 1:
            raise DomainError(f"piece [{lo}, {hi}] leaves [0, 1]")
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise DomainError(f"degenerate piece at {lo} must be a closed point")
        if (lo == 0 and self.lo_closed) or (hi == 1 and self.hi_closed):
            raise DomainError("0 and 1 are not points of a component")

    @classmethod
    def point(cls, t) -> "Piece":
        return cls(t, t, True, True)

    @classmethod
    def open(cls, lo, hi) -> "Piece":
        return cls(lo, hi)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_open(self) -> bool:
        return not (self.lo_closed or self.hi_closed)

    def contains(self, t: Fraction) -> bool:
        if self.lo < t < self.hi:
            return True
        return (t == self.lo and self.lo_closed) or (t == self.hi and self.hi_closed)

    def __str__(self):
        if self.is_point:
            return f"{{{self.lo}}}"
        return f"{'[' if self.lo_closed else '('}{self.lo},{self.hi}{']' if self.hi_closed else ')'}"


Part = Tuple[Piece, ...]

EMPTY: Part = ()
FULL: Part = (Piece(0, 1),)


def _breaks(parts: Iterable[Part]) -> List[Fraction]:
    points = {Fraction(0), Fraction(1)}
    for part in parts:
        for piece in part:
            points.update((piece.lo, piece.hi))
    return sorted(points)


def _cells(breaks: Sequence[Fraction]) -> List[Fraction]:
    """Sample points: the open cell (b_i, b_i+1) by its midpoint, then the point b_i+1."""
    out = []
    for a, b in zip(breaks, breaks[1:]):
        out.append((a + b) / 2)
        if b != 1:
            out.append(b)
    return out


def _member(part: Part, t: Fraction) -> bool:
    return any(piece.contains(t) for piece in part)


def _from_cells(breaks: Sequence[Fraction], flags: Sequence[bool]) -> Part:
    pieces = []
    start = None
    for c, flag in enumerate(list(flags) + [False]):
        if flag and start is None:
            start = c
        elif not flag and start is not None:
            end = c - 1
            # even cells are open intervals, odd cells the points between them
            lo = breaks[start // 2] if start % 2 == 0 else breaks[start // 2 + 1]
            hi = breaks[end // 2 + 1]
            pieces.append(Piece(lo, hi, start % 2 == 1, end % 2 == 1))
            start = None
    return tuple(pieces)


def combine(op: Callable[..., bool], *parts: Part) -> Part:
    """Canonical part whose membership is op applied to the memberships in `parts`."""
    breaks = _breaks(parts)
    return _from_cells(breaks, [op(*(_member(p, t) for p in parts)) for t in _cells(breaks)])


def canonical_part(part: Iterable[Piece]) -> Part:
    return combine(lambda x: x, tuple(part))


def part_closure(part: Part) -> Part:
    """Euclidean closure inside (0,1)."""
    breaks = _breaks([part])
    cells = _cells(breaks)
    flags = [_member(part, t) for t in cells]
    closed = list(flags)
    for c in range(1, len(cells), 2):
        closed[c] = flags[c] or flags[c - 1] or flags[c + 1]
    return _from_cells(breaks, closed)


def part_is_open(part: Part) -> bool:
    return all(piece.is_open and not piece.is_point for piece in canonical_part(part))


# -------------------------------------------------------------------
# 2) PrimSpace and PrimSubset
# -------------------------------------------------------------------
@dataclass(frozen=True)
class PrimPoint:
    """A point of Prim(A): (component, t), or J when component is None."""

    component: Optional[int] = None
    t: Optional[Fraction] = None

    @property
    def is_J(self) -> bool:
        return self.component is None

    def __str__(self):
        return J_LABEL if self.is_J else f"{self.component}:{self.t}"


J_POINT = PrimPoint()


@dataclass(frozen=True)
class PrimSubset:
    """
    Components not listed in `components` are empty, or whole when `rest_full` is set.
    Finite k always normalizes to rest_full = False.
    """

    components: Tuple[Tuple[int, Part], ...] = ()
    contains_J: bool = False
    rest_full: bool = False

    def part(self, i: int) -> Part:
        for index, part in self.components:
            if index == i:
                return part
        return FULL if self.rest_full else EMPTY

    @property
    def named(self) -> Tuple[int, ...]:
        return tuple(i for i, _ in self.components)

    def to_json(self) -> dict:
        return {
            "components": {str(i): [str(p) for p in part] for i, part in self.components},
            "rest": "full" if self.rest_full else "empty",
            "J": self.contains_J,
        }

    def __str__(self):
        items = [f"{i}:{'+'.join(map(str, part))}" for i, part in self.components]
        if self.rest_full:
            items.append("*:all")
        if self.contains_J:
            items.append(J_LABEL)
        return "; ".join(items) if items else "{}"


@dataclass(frozen=True)
class PrimSpace:
    k: OrbitCount
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.k != math.inf and (int(self.k) != self.k or self.k < 1):
            raise DomainError(f"Prim(A) needs k >= 1 wandering orbits, got {self.k}")
        if self.k != math.inf:
            object.__setattr__(self, "k", int(self.k))
            if not self.labels:
                object.__setattr__(self, "labels", tuple(f"orbit {i}" for i in range(1, self.k + 1)))

    @property
    def finite(self) -> bool:
        return self.k != math.inf

    def _check(self, i: int) -> None:
        if i < 1 or (self.finite and i > self.k):
            raise DomainError(f"component {i} not in 1..{self.k}")

    def subset(self, parts: Mapping[int, Iterable[Piece]] = None, contains_J: bool = False,
               rest_full: bool = False) -> PrimSubset:
        parts = parts or {}
        for i in parts:
            self._check(i)
        default = FULL if rest_full else EMPTY
        if self.finite and rest_full:
            raw = {i: canonical_part(parts.get(i, FULL)) for i in range(1, self.k + 1)}
            default, rest_full = EMPTY, False
        else:
            raw = {i: canonical_part(p) for i, p in parts.items()}
        comps = tuple(sorted((i, p) for i, p in raw.items() if p != default))
        return PrimSubset(comps, bool(contains_J), rest_full)

    def point(self, p: PrimPoint) -> PrimSubset:
        if p.is_J:
            return self.subset(contains_J=True)
        return self.subset({p.component: [Piece.point(p.t)]})

    @property
    def empty(self) -> PrimSubset:
        return self.subset()

    @property
    def whole(self) -> PrimSubset:
        return self.subset(rest_full=True, contains_J=True)

    @property
    def y0(self) -> PrimSubset:
        return self.subset(rest_full=True)

    def _binary(self, op: Callable[[bool, bool], bool], a: PrimSubset, b: PrimSubset) -> PrimSubset:
        indices = sorted(set(a.named) | set(b.named))
        parts = {i: combine(op, a.part(i), b.part(i)) for i in indices}
        return self.subset(parts, op(a.contains_J, b.contains_J), op(a.rest_full, b.rest_full))

    def union(self, a: PrimSubset, b: PrimSubset) -> PrimSubset:
        return self._binary(lambda x, y: x or y, a, b)

    def intersection(self, a: PrimSubset, b: PrimSubset) -> PrimSubset:
        return self._binary(lambda x, y: x and y, a, b)

    def complement(self, a: PrimSubset) -> PrimSubset:
        parts = {i: combine(lambda x: not x, p) for i, p in a.components}
        return self.subset(parts, not a.contains_J, not a.rest_full)

    def difference(self, a: PrimSubset, b: PrimSubset) -> PrimSubset:
        return self.intersection(a, self.complement(b))

    def is_empty(self, a: PrimSubset) -> bool:
        a = self.normalize(a)
        return not (a.contains_J or a.components or a.rest_full)

    def is_subset(self, a: PrimSubset, b: PrimSubset) -> bool:
        return self.is_empty(self.difference(a, b))

    def normalize(self, a: PrimSubset) -> PrimSubset:
        return self.subset(dict(a.components), a.contains_J, a.rest_full)

    def contains(self, a: PrimSubset, p: PrimPoint) -> bool:
        if p.is_J:
            return a.contains_J
        self._check(p.component)
        return _member(a.part(p.component), Fraction(p.t))

    def to_json(self) -> dict:
        return {"k": "infinity" if not self.finite else self.k, "components": list(self.labels),
                "extra_point": J_LABEL}


def prim_space_for(action: DenjoyAction) -> PrimSpace:
    if classify(action) is not ActionClass.DENJOY:
        raise DomainError("Prim(A) = Y0 u {J} needs a Denjoy action; this one has no wandering orbit")
    zero = (0,) * action.d
    return PrimSpace(action.k, tuple(str(GapLabel(i, zero)) for i in range(action.k)))


# -------------------------------------------------------------------
# 3) Topology
# -------------------------------------------------------------------
def closure(space: PrimSpace, s: PrimSubset) -> PrimSubset:
    """Componentwise Euclidean closure, plus J whenever s is non-empty."""
    s = space.normalize(s)
    if space.is_empty(s):
        return s
    parts = {i: part_closure(p) for i, p in s.components}
    return space.subset(parts, True, s.rest_full)


def interior(space: PrimSpace, s: PrimSubset) -> PrimSubset:
    return space.complement(closure(space, space.complement(s)))


def open_witness(space: PrimSpace, u: PrimSubset) -> Optional[PrimPoint]:
    """A point of u lying in the closure of its complement, or None when u is open."""
    u = space.normalize(u)
    if u.contains_J:
        return None if u == space.whole else J_POINT
    for i, part in u.components:
        for piece in part:
            if piece.lo_closed:
                return PrimPoint(i, piece.lo)
            if piece.hi_closed:
                return PrimPoint(i, piece.hi)
    return None


def is_open(space: PrimSpace, u: PrimSubset) -> bool:
    return open_witness(space, u) is None


def is_closed(space: PrimSpace, s: PrimSubset) -> bool:
    return closure(space, s) == space.normalize(s)


# -------------------------------------------------------------------
# 4) Ideals
# -------------------------------------------------------------------
class IdealKind(enum.Enum):
    ZERO = "Zero"
    PROPER = "Proper"
    MAXIMAL = "Maximal"
    WHOLE = "Whole"


@dataclass(frozen=True)
class IdealDescriptor:
    kind: IdealKind
    open_set: PrimSubset
    contained_in_J: bool
    description: str
    unique_maximal: bool = False
    k_data: Optional[IdealKData] = None
    membership: Optional[str] = None

    def contains(self, action: DenjoyAction, element,
                 settings: PrecisionSettings = DEFAULT_SETTINGS) -> TraceIdealAnswer:
        """Membership test; decided for A itself and the maximal ideal J only."""
        if self.kind is IdealKind.WHOLE:
            return TraceIdealAnswer.YES
        if self.kind is IdealKind.MAXIMAL:
            return trace_ideal_contains(action, element, settings)
        raise DomainError(f"no membership test for a {self.kind.value.lower()} ideal")

    def to_json(self) -> dict:
        out = {
            "kind": self.kind.value,
            "open_set": self.open_set.to_json(),
            "contained_in_J": self.contained_in_J,
            "description": self.description,
            "unique_maximal": self.unique_maximal,
        }
        if self.k_data is not None:
            out["K"] = self.k_data.to_json()
        if self.membership is not None:
            out["membership_test"] = self.membership
        return out


def _saturation(space: PrimSpace, u: PrimSubset) -> str:
    pieces = [f"G.({'+'.join(map(str, part))} in {_label(space, i)})" for i, part in u.components]
    if u.rest_full:
        pieces.append("all remaining wandering orbits")
    return " u ".join(pieces)


def _label(space: PrimSpace, i: int) -> str:
    return space.labels[i - 1] if i - 1 < len(space.labels) else f"orbit {i}"


def ideal_for_open(space: PrimSpace, u: PrimSubset) -> IdealDescriptor:
    """The ideal I with Prim(A/I) closed and Prim(I) = u."""
    u = space.normalize(u)
    witness = open_witness(space, u)
    logger.debug("ideal_for_open(%s): witness %s", u, witness)
    if witness is not None:
        raise DomainError(f"subset {u} is not open: {witness} lies in the closure of its complement")
    if u == space.whole:
        return IdealDescriptor(IdealKind.WHOLE, u, False, "A = C(T) x| Z^d")
    if space.is_empty(u):
        return IdealDescriptor(IdealKind.ZERO, u, True, "{0}")
    if u == space.y0:
        return maximal_ideal(space)
    return IdealDescriptor(IdealKind.PROPER, u, True, f"C0({_saturation(space, u)}) x| Z^d")


def open_set_of(ideal: IdealDescriptor) -> PrimSubset:
    return ideal.open_set


def maximal_ideal(space: PrimSpace) -> IdealDescriptor:
    """J = C0(T \\ Y) x| Z^d, the trace ideal."""
    data = ideal_k_data(space.k)
    return IdealDescriptor(
        IdealKind.MAXIMAL,
        space.y0,
        True,
        f"J = C0(T \\ Y) x| Z^d = {data.descriptor}",
        unique_maximal=True,
        k_data=data,
        membership="ergodic.in_trace_ideal",
    )


@dataclass(frozen=True)
class LatticeSummary:
    opens: int
    distributive: bool
    unique_maximal: bool
    kinds: Tuple[Tuple[str, int], ...]
    neighborhoods_of_J: str

    def to_json(self) -> dict:
        return {
            "opens": self.opens,
            "distributive": self.distributive,
            "unique_maximal": self.unique_maximal,
            "kinds": dict(self.kinds),
            "neighborhoods_of_J": self.neighborhoods_of_J,
        }


NEIGHBORHOOD_NOTE = (
    "J lies in the closure of every non-empty subset, so an open set containing J has a "
    "closed complement without J, which must be empty: the only neighborhood of J is Prim(A)"
)


def lattice_summary(space: PrimSpace, opens: Sequence[PrimSubset]) -> LatticeSummary:
    """Distributivity on all triples, and every proper ideal inside J."""
    ideals = [ideal_for_open(space, u) for u in opens]
    sets = [i.open_set for i in ideals]
    distributive = all(
        space.intersection(a, space.union(b, c))
        == space.union(space.intersection(a, b), space.intersection(a, c))
        for a, b, c in itertools.product(sets, repeat=3)
    )
    top = maximal_ideal(space).open_set
    unique_maximal = all(space.is_subset(i.open_set, top) for i in ideals if i.kind is not IdealKind.WHOLE)
    counts: Dict[str, int] = {}
    for i in ideals:
        counts[i.kind.value] = counts.get(i.kind.value, 0) + 1
    return LatticeSummary(len(ideals), distributive, unique_maximal, tuple(sorted(counts.items())), NEIGHBORHOOD_NOTE)


# -------------------------------------------------------------------
# 5) Text form of subsets
# -------------------------------------------------------------------
_PIECE = re.compile(r"^\s*(?:\{(?P<pt>[^{}]+)\}|(?P<l>[\[(])(?P<lo>[^,]+),(?P<hi>[^\])]+)(?P<r>[\])])|(?P<all>all))\s*$")


def _parse_piece(text: str) -> Piece:
    m = _PIECE.match(text)
    if not m:
        raise DomainError(f"cannot read piece {text!r}; use {{t}}, (a,b), [a,b), (a,b] or all")
    try:
        if m.group("all"):
            return FULL[0]
        if m.group("pt"):
            return Piece.point(Fraction(m.group("pt").strip()))
        return Piece(Fraction(m.group("lo").strip()), Fraction(m.group("hi").strip()),
                     m.group("l") == "[", m.group("r") == "]")
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"cannot read piece {text!r}: {e}") from None


def parse_subset(space: PrimSpace, text: str) -> PrimSubset:
    """
    ';'-separated items: 'J', '*:all' (every unnamed component), or
    '<i>:<piece>+<piece>...' with pieces {t}, (a,b), [a,b], ... or all.
    '{}' is the empty set.
    """
    parts: Dict[int, List[Piece]] = {}
    contains_J = rest_full = False
    for item in filter(None, (s.strip() for s in text.split(";"))):
        if item == "{}":
            continue
        if item == J_LABEL:
            contains_J = True
            continue
        head, sep, body = item.partition(":")
        if not sep:
            raise DomainError(f"cannot read subset item {item!r}")
        if head.strip() == "*":
            if body.strip() != "all":
                raise DomainError("'*' only takes 'all'")
            rest_full = True
            continue
        try:
            index = int(head)
        except ValueError:
            raise DomainError(f"component index {head!r} is not an integer") from None
        parts.setdefault(index, []).extend(_parse_piece(p) for p in body.split("+"))
    # under "*:all" named components keep exactly what is listed
    return space.subset(parts, contains_J, rest_full)

# denjoy_invariants/ktheory.py
"""
Ordered K-theory of C(T) x| Z^d for a free Denjoy action.

Generators are symbolic subset labels of {1, ..., d+1}: index 1 is the circle generator
and index i+1 the unitary of the i-th basis vector. Their trace values come from
Pfaffians of submatrices of the skew matrix theta whose first row is (0, gamma_1, ...,
gamma_d).
"""

import enum
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
import sympy

from .circle_core import BigInterval, Real, interval_of, refine
from .config import DECIMAL_DIGITS, DEFAULT_MAX_D, DEFAULT_SETTINGS, PrecisionSettings
from .denjoy_model import RotationVector, independence_scan
from .errors import DomainError, UndecidedError

logger = logging.getLogger(__name__)

Label = Tuple[int, ...]
Formal = Tuple[int, ...]

# sizes up to this are expanded exactly
EXPANSION_LIMIT = 8

LABEL_CONVENTION_NOTE = (
    "labels are subsets of {1, ..., d+1} (1 = circle generator, i+1 = i-th group generator); "
    "the statement of the rank theorem indexes subsets of {1, ..., d}, which would give only "
    "2^(d-1) even subsets"
)


# -------------------------------------------------------------------
# 1) Skew matrices
# -------------------------------------------------------------------
def _entry(x):
    if isinstance(x, sympy.Basic):
        return sympy.expand(x)
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    if isinstance(x, int):
        return sympy.Integer(x)
    if isinstance(x, str):
        return sympy.expand(sympy.sympify(x, rational=True))
    raise ValueError(f"cannot use {x!r} as a matrix entry")


@dataclass(frozen=True)
class SkewMatrix:
    entries: Tuple[Tuple[sympy.Expr, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(_entry(x) for x in row) for row in self.entries)
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise DomainError("matrix is not square")
        for i in range(n):
            if rows[i][i] != 0:
                raise DomainError(f"diagonal entry {i} is not zero")
            for j in range(i + 1, n):
                if sympy.expand(rows[i][j] + rows[j][i]) != 0:
                    raise DomainError(f"entries ({i},{j}) and ({j},{i}) are not opposite")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_upper(cls, n: int, upper: Mapping[Tuple[int, int], object]) -> "SkewMatrix":
        rows = [[sympy.S.Zero] * n for _ in range(n)]
        for (i, j), value in upper.items():
            if not 0 <= i < j < n:
                raise DomainError(f"({i},{j}) is not above the diagonal of a {n}x{n} matrix")
            rows[i][j] = _entry(value)
            rows[j][i] = -rows[i][j]
        return cls(tuple(map(tuple, rows)))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def is_rational(self) -> bool:
        return all(x.is_Rational for row in self.entries for x in row)

    def as_fractions(self) -> List[List[Fraction]]:
        return [[Fraction(int(x.p), int(x.q)) for x in row] for row in self.entries]

    def matrix(self) -> sympy.Matrix:
        return sympy.Matrix(self.entries)

    def submatrix(self, indices: Sequence[int]) -> "SkewMatrix":
        return SkewMatrix(tuple(tuple(self.entries[i][j] for j in indices) for i in indices))


# -------------------------------------------------------------------
# 2) Pfaffians
# -------------------------------------------------------------------
def _require_even(m: SkewMatrix) -> None:
    if m.n % 2:
        raise DomainError(f"the Pfaffian needs an even size, got {m.n}")


def _to_sympy(value) -> sympy.Expr:
    if isinstance(value, (int, Fraction)):
        value = Fraction(value)
        return sympy.Rational(value.numerator, value.denominator)
    return sympy.expand(value)


def pfaffian_expansion(m: SkewMatrix) -> sympy.Expr:
    """Division-free expansion along the first row; zero entries are skipped."""
    _require_even(m)
    a = m.entries
    memo: Dict[Tuple[int, ...], sympy.Expr] = {}

    def expand(idx: Tuple[int, ...]) -> sympy.Expr:
        if not idx:
            return sympy.S.One
        if idx in memo:
            return memo[idx]
        i, total = idx[0], sympy.S.Zero
        for pos in range(1, len(idx)):
            entry = a[i][idx[pos]]
            if entry == 0:
                continue
            sign = 1 if pos % 2 else -1
            total += sign * entry * expand(idx[1:pos] + idx[pos + 1:])
        memo[idx] = sympy.expand(total)
        return memo[idx]

    return expand(tuple(range(m.n)))


@lru_cache(maxsize=8)
def _signed_permutations(n: int) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    out = []
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        out.append((perm, -1 if inversions % 2 else 1))
    return tuple(out)


def pfaffian_by_permutations(m: SkewMatrix) -> sympy.Expr:
    """1/(2^n n!) sum over sigma of sgn(sigma) prod a[sigma(2i-1), sigma(2i)]."""
    _require_even(m)
    a = m.as_fractions() if m.is_rational else m.entries
    half = m.n // 2
    total = 0
    for perm, sign in _signed_permutations(m.n):
        term = sign
        for i in range(half):
            term = term * a[perm[2 * i]][perm[2 * i + 1]]
            if term == 0:
                break
        total += term
    if m.is_rational:
        return _to_sympy(Fraction(total) / (2 ** half * math.factorial(half)))
    return sympy.expand(total / (2 ** half * math.factorial(half)))


def all_pairings(indices: Sequence[int]) -> Iterator[List[Tuple[int, int]]]:
    """Perfect matchings of `indices`, the first element paired first."""
    if not indices:
        yield []
        return
    first, rest = indices[0], list(indices[1:])
    for pos, partner in enumerate(rest):
        for tail in all_pairings(rest[:pos] + rest[pos + 1:]):
            yield [(first, partner)] + tail


def pairing_sign(pairs: Sequence[Tuple[int, int]]) -> int:
    flat = [x for pair in pairs for x in pair]
    inversions = sum(1 for i in range(len(flat)) for j in range(i + 1, len(flat)) if flat[i] > flat[j])
    return -1 if inversions % 2 else 1


def pfaffian_by_matchings(m: SkewMatrix) -> sympy.Expr:
    """Sum over the (2n-1)!! perfect matchings."""
    _require_even(m)
    a = m.as_fractions() if m.is_rational else m.entries
    total = 0
    for pairs in all_pairings(range(m.n)):
        term = pairing_sign(pairs)
        for i, j in pairs:
            term = term * a[i][j]
        total += term
    return _to_sympy(total)


def _swap(a: list, r: int, s: int) -> None:
    a[r], a[s] = a[s], a[r]
    for row in a:
        row[r], row[s] = row[s], row[r]


def _update(a: list, k: int, pivot, rounding=None) -> None:
    """Eliminate row/column k against the pivot a[k][k+1] in the trailing block."""
    n = len(a)
    tau = [a[k][i] / pivot for i in range(k + 2, n)]
    col = [a[i][k + 1] for i in range(k + 2, n)]
    for ii in range(n - k - 2):
        for jj in range(ii + 1, n - k - 2):
            value = a[k + 2 + ii][k + 2 + jj] + (tau[ii] * col[jj] - col[ii] * tau[jj])
            if rounding is not None:
                value = rounding(value)
            a[k + 2 + ii][k + 2 + jj] = value
            a[k + 2 + jj][k + 2 + ii] = -value


def pfaffian_rational(m: SkewMatrix) -> sympy.Expr:
    """Skew Parlett-Reid elimination over Q."""
    _require_even(m)
    a = m.as_fractions()
    pf = Fraction(1)
    for k in range(0, m.n - 1, 2):
        p = max(range(k + 1, m.n), key=lambda i: abs(a[k][i]))
        if a[k][p] == 0:
            return sympy.S.Zero
        if p != k + 1:
            _swap(a, k + 1, p)
            pf = -pf
        pf *= a[k][k + 1]
        _update(a, k, a[k][k + 1])
    return _to_sympy(pf)


def pfaffian_interval(m: SkewMatrix, bits: int) -> Optional[BigInterval]:
    """Elimination in outward-rounded intervals; None when no pivot is certainly nonzero."""
    _require_even(m)
    a = [[interval_of(x, bits) for x in row] for row in m.entries]
    pf = BigInterval.exact(1, bits)
    for k in range(0, m.n - 1, 2):
        candidates = [i for i in range(k + 1, m.n) if a[k][i].excludes_zero()]
        if not candidates:
            if all(a[k][i].is_point and a[k][i].lo == 0 for i in range(k + 1, m.n)):
                return BigInterval.exact(0, bits)
            return None
        p = max(candidates, key=lambda i: abs(a[k][i].midpoint))
        if p != k + 1:
            _swap(a, k + 1, p)
            pf = -pf
        pf = (pf * a[k][k + 1]).rounded(bits)
        _update(a, k, a[k][k + 1], rounding=lambda v: v.rounded(bits))
    return pf


def pfaffian(m: SkewMatrix, settings: PrecisionSettings = DEFAULT_SETTINGS) -> Union[sympy.Expr, BigInterval]:
    """
    pf(M): exact expansion up to size 8, exact elimination over Q for rational entries,
    certified interval elimination otherwise.
    """
    _require_even(m)
    if m.n <= EXPANSION_LIMIT:
        return pfaffian_expansion(m)
    if m.is_rational:
        return pfaffian_rational(m)
    for bits in settings.refinements():
        value = pfaffian_interval(m, bits)
        if value is not None:
            return value
        logger.debug("no certain pivot at %d bits", bits)
    raise UndecidedError("Pfaffian elimination found no certain pivot", settings.max_bits)


# -------------------------------------------------------------------
# 3) The structure matrix theta
# -------------------------------------------------------------------
@dataclass(frozen=True)
class TorusTheta:
    rho: RotationVector

    @property
    def d(self) -> int:
        return self.rho.d

    @property
    def gamma(self) -> Tuple[Real, ...]:
        return self.rho.gamma

    def matrix(self) -> SkewMatrix:
        return SkewMatrix.from_upper(self.d + 1, {(0, i + 1): g for i, g in enumerate(self.gamma)})

    def value_of(self, formal: Sequence[int]) -> Real:
        """n_0 + sum n_i gamma_i."""
        if len(formal) != self.d + 1:
            raise DomainError(f"formal vector needs {self.d + 1} entries")
        return sympy.expand(formal[0] + sum((n * g for n, g in zip(formal[1:], self.gamma)), sympy.S.Zero))


def formal_theta(d: int) -> SkewMatrix:
    symbols = sympy.symbols(f"gamma_1:{d + 1}")
    return SkewMatrix.from_upper(d + 1, {(0, i + 1): s for i, s in enumerate(symbols)})


def _check_subset(d: int, label: Sequence[int]) -> Label:
    label = tuple(int(i) for i in label)
    if any(a >= b for a, b in zip(label, label[1:])):
        raise DomainError(f"label {label} is not strictly increasing")
    if label and (label[0] < 1 or label[-1] > d + 1):
        raise DomainError(f"label {label} leaves {{1, ..., {d + 1}}}")
    return label


def theta_submatrix(theta: TorusTheta, indices: Sequence[int]) -> SkewMatrix:
    """Rows and columns of theta indexed by the 1-based subset `indices`."""
    indices = _check_subset(theta.d, indices)
    return theta.matrix().submatrix([i - 1 for i in indices])


@lru_cache(maxsize=None)
def label_trace_vector(d: int, label: Label) -> Formal:
    """Formal (n_0, ..., n_d) of pf(theta_label), read from the Pfaffian over symbols."""
    label = _check_subset(d, label)
    if len(label) % 2:
        raise DomainError(f"odd label {label} has no Pfaffian")
    symbols = sympy.symbols(f"gamma_1:{d + 1}")
    value = pfaffian_expansion(formal_theta(d).submatrix([i - 1 for i in label]))
    poly = sympy.Poly(value, *symbols)
    if poly.total_degree() > 1:
        raise DomainError(f"pf(theta_{label}) = {value} is not affine in gamma")
    return (int(poly.coeff_monomial(1)),) + tuple(int(poly.coeff_monomial(s)) for s in symbols)


# -------------------------------------------------------------------
# 4) K-groups through the PV recursion
# -------------------------------------------------------------------
class Parity(enum.Enum):
    K0 = "K0"
    K1 = "K1"


@dataclass(frozen=True)
class KGroupDescriptor:
    parity: Parity
    labels: Tuple[Label, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise DomainError("basis labels repeat")
        want = 0 if self.parity is Parity.K0 else 1
        if any(len(lb) % 2 != want for lb in self.labels):
            raise DomainError(f"{self.parity.value} labels must have {'even' if want == 0 else 'odd'} size")

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label: Sequence[int]) -> int:
        try:
            return self.labels.index(tuple(label))
        except ValueError:
            raise DomainError(f"{tuple(label)} is not a {self.parity.value} basis label") from None


@dataclass(frozen=True)
class IndexMapData:
    """
    One PV step A_k -> A_{k+1} = A_k x| Z adjoining `adjoined`.

    delta0: K0(A_{k+1}) -> K1(A_k) and delta1: K1(A_{k+1}) -> K0(A_k) as integer
    matrices on labels; inclusion_i: K_i(A_k) -> K_i(A_{k+1}).
    """

    step: int
    adjoined: int
    k0_before: Tuple[Label, ...]
    k1_before: Tuple[Label, ...]
    k0_after: Tuple[Label, ...]
    k1_after: Tuple[Label, ...]
    delta0: sp.csr_matrix
    delta1: sp.csr_matrix
    inclusion0: sp.csr_matrix
    inclusion1: sp.csr_matrix

    def is_split_exact(self) -> bool:
        return (_exact_at(self.inclusion0, self.delta0) and _exact_at(self.inclusion1, self.delta1))


def _exact_at(inclusion: sp.csr_matrix, delta: sp.csr_matrix) -> bool:
    composite = (delta @ inclusion).tocsr()
    composite.eliminate_zeros()
    if composite.nnz:
        return False
    incl = abs(inclusion)
    if not (np.all(incl.sum(axis=0) == 1) and np.all(incl.sum(axis=1) <= 1)):
        return False
    dl = abs(delta)
    # each target generator is hit by exactly one +-1 column: delta is surjective
    if not np.all(dl.sum(axis=1) == 1) or dl.max() != 1:
        return False
    image = set(inclusion.nonzero()[0])
    kernel = set(np.flatnonzero(np.asarray(dl.sum(axis=0)).ravel() == 0))
    return image == kernel


def _map(rows: int, cols: int, entries: Sequence[Tuple[int, int, int]]) -> sp.csr_matrix:
    if not entries:
        return sp.csr_matrix((rows, cols), dtype=np.int64)
    r, c, v = zip(*entries)
    return sp.csr_matrix((np.array(v, dtype=np.int64), (np.array(r), np.array(c))), shape=(rows, cols))


@lru_cache(maxsize=None)
def k_groups(d: int, max_d: int = DEFAULT_MAX_D) -> Tuple[KGroupDescriptor, KGroupDescriptor, Tuple[IndexMapData, ...]]:
    """
    Iterate PV from K0(C(T)) = Z[()] and K1(C(T)) = Z[(1,)].

    Step k+1 adjoins index k+2: new K0 labels J+(k+2) for J in K1 with
    delta0([p_{J+(k+2)}]) = [v_J]; new K1 labels I+(k+2) for I in K0 with
    delta1(-[v_{I+(k+2)}]) = [p_I].
    """
    if not 1 <= d <= max_d:
        raise DomainError(f"d must lie in 1..{max_d}, got {d}")
    k0: List[Label] = [()]
    k1: List[Label] = [(1,)]
    steps = []
    for step in range(1, d + 1):
        adjoined = step + 1
        new_k0 = k0 + [lb + (adjoined,) for lb in k1]
        new_k1 = k1 + [lb + (adjoined,) for lb in k0]
        delta0 = _map(len(k1), len(new_k0), [(i, len(k0) + i, 1) for i in range(len(k1))])
        delta1 = _map(len(k0), len(new_k1), [(i, len(k1) + i, -1) for i in range(len(k0))])
        incl0 = _map(len(new_k0), len(k0), [(i, i, 1) for i in range(len(k0))])
        incl1 = _map(len(new_k1), len(k1), [(i, i, 1) for i in range(len(k1))])
        steps.append(IndexMapData(step, adjoined, tuple(k0), tuple(k1), tuple(new_k0), tuple(new_k1),
                                  delta0, delta1, incl0, incl1))
        k0, k1 = new_k0, new_k1
    logger.debug("k_groups(%d): ranks %d, %d", d, len(k0), len(k1))
    return KGroupDescriptor(Parity.K0, tuple(k0)), KGroupDescriptor(Parity.K1, tuple(k1)), tuple(steps)


# -------------------------------------------------------------------
# 5) Trace pairing and order
# -------------------------------------------------------------------
@dataclass(frozen=True)
class TracePairing:
    coefficients: Tuple[Tuple[Label, int], ...]
    formal: Formal
    value: BigInterval

    def to_json(self) -> dict:
        return {
            "coefficients": [{"label": list(lb), "coefficient": c} for lb, c in self.coefficients],
            "formal": list(self.formal),
            "decimal": self.value.to_decimal(DECIMAL_DIGITS),
        }


def trace_pairing(theta: TorusTheta, element: Mapping[Sequence[int], int],
                  settings: PrecisionSettings = DEFAULT_SETTINGS) -> TracePairing:
    """tau_* of sum coeff(I) [p_I] = sum coeff(I) pf(theta_I) as a formal vector."""
    formal = [0] * (theta.d + 1)
    coefficients = []
    for label, coeff in element.items():
        label = _check_subset(theta.d, label)
        if len(label) % 2:
            raise DomainError(f"{label} is not a K0 label")
        for i, n in enumerate(label_trace_vector(theta.d, label)):
            formal[i] += int(coeff) * n
        coefficients.append((label, int(coeff)))
    value = interval_of(theta.value_of(formal), settings.working_bits)
    return TracePairing(tuple(sorted(coefficients, key=lambda item: (len(item[0]), item[0]))), tuple(formal), value)


class ZeroTest(enum.Enum):
    ZERO = "Zero"
    NONZERO = "NonZero"
    UNDECIDED = "Undecided"


class Sign(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    ZERO = "Zero"
    UNDECIDED = "Undecided"


def _separate(theta: TorusTheta, formal: Sequence[int], settings: PrecisionSettings) -> Optional[BigInterval]:
    value = theta.value_of(formal)
    if value == 0:
        logger.warning("nonzero formal vector %s evaluates to exactly 0: angles are dependent", tuple(formal))
        return None
    try:
        return refine(value, BigInterval.excludes_zero, settings)
    except UndecidedError:
        logger.warning("pairing %s not separated from 0 at %d bits", tuple(formal), settings.max_bits)
        return None


def is_zero_pairing(theta: TorusTheta, formal: Sequence[int],
                    settings: PrecisionSettings = DEFAULT_SETTINGS) -> ZeroTest:
    if not any(formal):
        return ZeroTest.ZERO
    return ZeroTest.NONZERO if _separate(theta, formal, settings) is not None else ZeroTest.UNDECIDED


def positivity(theta: TorusTheta, formal: Sequence[int],
               settings: PrecisionSettings = DEFAULT_SETTINGS) -> Sign:
    if not any(formal):
        return Sign.ZERO
    box = _separate(theta, formal, settings)
    if box is None:
        return Sign.UNDECIDED
    return Sign.POSITIVE if box.lo > 0 else Sign.NEGATIVE


@dataclass(frozen=True)
class BoxCertificate:
    """Every nonzero formal vector with |n_i| <= bound pairs to a nonzero real."""

    bound: int
    vectors: int
    bits: int
    margin: Optional[Fraction]
    rechecked: int
    injective: bool


def certify_injective_box(theta: TorusTheta, bound: int,
                          settings: PrecisionSettings = DEFAULT_SETTINGS) -> BoxCertificate:
    """
    Only the distance of sum n_i gamma_i to Z matters, so one fixed-point scan over
    (n_1..n_d) covers every n_0; near misses are rechecked with is_zero_pairing.
    """
    budget = max(settings.enum_budget, (2 * bound + 1) ** theta.d)
    scan = independence_scan(theta.gamma, bound, budget)
    injective = True
    for n in scan.suspects:
        near = -round(float(sum(c * g for c, g in zip(n, theta.gamma))))
        if abs(near) <= bound and is_zero_pairing(theta, (near,) + n, settings) is not ZeroTest.NONZERO:
            injective = False
    vectors = (2 * bound + 1) ** (theta.d + 1) - 1
    return BoxCertificate(bound, vectors, scan.bits, scan.min_margin, len(scan.suspects), injective)


@dataclass(frozen=True)
class RangeSubgroup:
    """tau_*(K0) = Z + gamma_1 Z + ... + gamma_d Z, generated by the labels () and (1, i)."""

    generators: Tuple[Label, ...]
    values: Tuple[Real, ...]
    decimals: Tuple[str, ...]

    @property
    def rank(self) -> int:
        return len(self.generators)

    def describe(self) -> str:
        return " + ".join(["Z"] + [f"({v})Z" for v in self.values[1:]])


def range_subgroup(theta: TorusTheta, settings: PrecisionSettings = DEFAULT_SETTINGS) -> RangeSubgroup:
    labels = ((),) + tuple((1, i + 1) for i in range(1, theta.d + 1))
    values = (sympy.S.One,) + theta.gamma
    decimals = tuple(interval_of(v, settings.working_bits).to_decimal(DECIMAL_DIGITS) for v in values)
    return RangeSubgroup(labels, values, decimals)


@dataclass(frozen=True)
class OrderSample:
    formal: Formal
    sign: Sign
    decimal: str


def order_samples(theta: TorusTheta, vectors: Sequence[Sequence[int]],
                  settings: PrecisionSettings = DEFAULT_SETTINGS) -> List[OrderSample]:
    out = []
    for vec in vectors:
        vec = tuple(int(x) for x in vec)
        value = interval_of(theta.value_of(vec), settings.working_bits)
        out.append(OrderSample(vec, positivity(theta, vec, settings), value.to_decimal(DECIMAL_DIGITS)))
    return out


# -------------------------------------------------------------------
# 6) The maximal ideal and the K-report
# -------------------------------------------------------------------
@dataclass(frozen=True)
class IdealKData:
    """K-theory of J = sum over k orbits of C0(R) (x) compact operators."""

    k: Union[int, float]
    k0_rank: int
    k1_rank: Union[int, float]
    index_map_zero: bool
    descriptor: str

    def to_json(self) -> dict:
        k = "infinity" if self.k == math.inf else self.k
        return {"k": k, "K0": "0", "K1": f"Z^{k}" if k != 1 else "Z",
                "index_map_K1(B)->K0(J)": "zero" if self.index_map_zero else "nonzero",
                "descriptor": self.descriptor}


def ideal_k_data(k: Union[int, float]) -> IdealKData:
    if k != math.inf and (int(k) != k or k < 1):
        raise DomainError(f"orbit count must be a positive integer or infinity, got {k}")
    k = math.inf if k == math.inf else int(k)
    shown = "infinity" if k == math.inf else k
    return IdealKData(k, 0, k, True, f"direct sum over i = 1..{shown} of C0(R) (x) K")


@dataclass(frozen=True)
class KReport:
    d: int
    theta: Tuple[Tuple[str, ...], ...]
    k0: KGroupDescriptor
    k1: KGroupDescriptor
    steps: Tuple[IndexMapData, ...]
    trace_values: Tuple[TracePairing, ...]
    range: RangeSubgroup
    samples: Tuple[OrderSample, ...]
    convention_note: str = LABEL_CONVENTION_NOTE

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "theta": [list(row) for row in self.theta],
            "ranks": [self.k0.rank, self.k1.rank],
            "K0_labels": [list(lb) for lb in self.k0.labels],
            "K1_labels": [list(lb) for lb in self.k1.labels],
            "index_maps": [
                {
                    "step": s.step,
                    "adjoined": s.adjoined,
                    "delta0": _triples(s.delta0),
                    "delta1": _triples(s.delta1),
                    "split_exact": s.is_split_exact(),
                }
                for s in self.steps
            ],
            "trace_values": [
                {"label": list(tp.coefficients[0][0]), "formal": list(tp.formal),
                 "decimal": tp.value.to_decimal(DECIMAL_DIGITS)}
                for tp in self.trace_values
            ],
            "range_subgroup": {"description": self.range.describe(),
                               "generators": [list(g) for g in self.range.generators],
                               "decimals": list(self.range.decimals)},
            "order_samples": [{"formal": list(s.formal), "sign": s.sign.value, "decimal": s.decimal}
                              for s in self.samples],
            "label_convention": self.convention_note,
        }


def _triples(m: sp.csr_matrix) -> List[List[int]]:
    coo = m.tocoo()
    return sorted([int(r), int(c), int(v)] for r, c, v in zip(coo.row, coo.col, coo.data))


def default_samples(d: int) -> List[Formal]:
    samples = [(1,) + (0,) * d, (0, -1) + (0,) * (d - 1), (-1,) + (1,) * d]
    return [s for s in samples if len(s) == d + 1]


def build_k_report(theta: TorusTheta, samples: Optional[Sequence[Sequence[int]]] = None,
                   settings: PrecisionSettings = DEFAULT_SETTINGS) -> KReport:
    k0, k1, steps = k_groups(theta.d)
    traces = tuple(trace_pairing(theta, {lb: 1}, settings) for lb in k0.labels)
    samples = default_samples(theta.d) if samples is None else samples
    return KReport(
        d=theta.d,
        theta=tuple(tuple(str(x) for x in row) for row in theta.matrix().entries),
        k0=k0,
        k1=k1,
        steps=steps,
        trace_values=traces,
        range=range_subgroup(theta, settings),
        samples=tuple(order_samples(theta, samples, settings)),
    )

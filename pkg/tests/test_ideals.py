# tests/test_ideals.py
import math
from fractions import Fraction

import pytest

from denjoy_invariants.ergodic import CoefficientFunction, CrossedElement, TraceIdealAnswer
from denjoy_invariants.denjoy_model import GapLabel
from denjoy_invariants.errors import DomainError
from denjoy_invariants.ideals import (
    FULL,
    J_POINT,
    IdealKind,
    Piece,
    PrimPoint,
    PrimSpace,
    closure,
    interior,
    ideal_for_open,
    is_closed,
    is_open,
    lattice_summary,
    maximal_ideal,
    open_set_of,
    open_witness,
    parse_subset,
    part_closure,
    prim_space_for,
)

HALF = Fraction(1, 2)


def random_piece(rng):
    a, b = sorted(Fraction(rng.randint(0, 8), 8) for _ in range(2))
    if a == b:
        if a in (0, 1):
            return Piece(0, 1)
        return Piece.point(a)
    return Piece(a, b, a > 0 and rng.random() < 0.5, b < 1 and rng.random() < 0.5)


def random_subset(rng, space):
    parts = {i: [random_piece(rng) for _ in range(rng.randint(0, 3))] for i in range(1, 4) if rng.random() < 0.7}
    return space.subset(parts, contains_J=rng.random() < 0.3)


def random_open(rng, space):
    parts = {}
    for i in range(1, 4):
        pieces = []
        for _ in range(rng.randint(0, 2)):
            a, b = sorted(rng.sample(range(0, 9), 2))
            pieces.append(Piece.open(Fraction(a, 8), Fraction(b, 8)))
        parts[i] = pieces
    return space.subset(parts)


# ---------- pieces ----------
def test_piece_validation():
    with pytest.raises(DomainError):
        Piece(0, HALF, lo_closed=True)
    with pytest.raises(DomainError):
        Piece(HALF, HALF)
    with pytest.raises(DomainError):
        Piece(HALF, Fraction(1, 4))
    assert str(Piece(0, HALF, False, True)) == "(0,1/2]"
    assert str(Piece.point(Fraction(1, 3))) == "{1/3}"


def test_part_closure_adds_interior_endpoints():
    assert part_closure((Piece.open(0, HALF),)) == (Piece(0, HALF, False, True),)
    assert part_closure(FULL) == FULL


# ---------- closure ----------
def test_closure_of_a_point_contains_J():
    space = PrimSpace(1)
    point = space.point(PrimPoint(1, Fraction(1, 3)))
    assert closure(space, point) == space.subset({1: [Piece.point(Fraction(1, 3))]}, contains_J=True)


def test_J_is_closed_and_the_empty_set_stays_empty():
    space = PrimSpace(2)
    j = space.point(J_POINT)
    assert closure(space, j) == j
    assert closure(space, space.empty) == space.empty


def test_closure_of_open_interval():
    space = PrimSpace(1)
    u = space.subset({1: [Piece.open(0, HALF)]})
    assert closure(space, u) == space.subset({1: [Piece(0, HALF, False, True)]}, contains_J=True)


def test_closure_axioms(rng):
    space = PrimSpace(3)
    for _ in range(200):
        s, t = random_subset(rng, space), random_subset(rng, space)
        cs = closure(space, s)
        assert closure(space, cs) == cs
        assert space.is_subset(s, cs)
        assert closure(space, space.union(s, t)) == space.union(cs, closure(space, t))
        if not space.is_empty(s):
            assert cs.contains_J
        assert is_closed(space, cs)


def test_interior_is_open_and_inside(rng):
    space = PrimSpace(3)
    for _ in range(100):
        s = random_subset(rng, space)
        inner = interior(space, s)
        assert is_open(space, inner)
        assert space.is_subset(inner, s)


def test_complement_twice(rng):
    space = PrimSpace(3)
    for _ in range(50):
        s = random_subset(rng, space)
        assert space.complement(space.complement(s)) == s


# ---------- open sets ----------
def test_open_witness():
    space = PrimSpace(2)
    half_open = space.subset({1: [Piece(Fraction(1, 4), HALF, True, False)]})
    assert open_witness(space, half_open) == PrimPoint(1, Fraction(1, 4))
    with_j = space.subset({1: FULL}, contains_J=True)
    assert open_witness(space, with_j) == J_POINT
    assert open_witness(space, space.whole) is None
    assert open_witness(space, space.y0) is None


def test_only_neighborhood_of_J_is_everything(rng):
    space = PrimSpace(3)
    for _ in range(100):
        s = random_subset(rng, space)
        if s.contains_J and s != space.whole:
            assert not is_open(space, s)


def test_open_sets_round_trip_through_ideals(rng):
    space = PrimSpace(3)
    for _ in range(100):
        u = random_open(rng, space)
        assert is_open(space, u)
        assert open_set_of(ideal_for_open(space, u)) == space.normalize(u)


def test_ideal_kinds():
    space = PrimSpace(2)
    assert ideal_for_open(space, space.whole).kind is IdealKind.WHOLE
    assert ideal_for_open(space, space.empty).kind is IdealKind.ZERO
    top = ideal_for_open(space, space.y0)
    assert top.kind is IdealKind.MAXIMAL and top.unique_maximal
    proper = ideal_for_open(space, space.subset({1: [Piece.open(0, HALF)]}))
    assert proper.kind is IdealKind.PROPER and proper.contained_in_J


def test_non_open_subset_has_no_ideal():
    space = PrimSpace(1)
    with pytest.raises(DomainError):
        ideal_for_open(space, space.point(PrimPoint(1, HALF)))


def test_maximal_ideal_k_theory():
    top = maximal_ideal(PrimSpace(2))
    assert top.k_data.k == 2
    assert top.k_data.k1_rank == 2
    assert top.to_json()["membership_test"] == "ergodic.in_trace_ideal"


def test_maximal_ideal_membership(d2_action):
    top = maximal_ideal(prim_space_for(d2_action))
    bump = CoefficientFunction.bump(GapLabel(0, (0, 0)), (0, 1, -1))
    inside = CrossedElement(d2_action, (((1, 0), bump),))
    assert top.contains(d2_action, inside) is TraceIdealAnswer.YES
    assert top.contains(d2_action, CrossedElement.unit(d2_action)) is TraceIdealAnswer.NO


def test_lattice_summary(rng):
    space = PrimSpace(3)
    opens = [space.empty, space.y0, space.whole] + [random_open(rng, space) for _ in range(4)]
    summary = lattice_summary(space, opens)
    assert summary.distributive
    assert summary.unique_maximal
    assert dict(summary.kinds)["Whole"] == 1


# ---------- the space ----------
def test_prim_space_for_actions(d2_action, two_orbit_action, minimal_action):
    assert prim_space_for(d2_action).k == 1
    assert prim_space_for(two_orbit_action).labels == ("I[0:0,0]", "I[1:0,0]")
    with pytest.raises(DomainError):
        prim_space_for(minimal_action)


def test_space_needs_an_orbit():
    with pytest.raises(DomainError):
        PrimSpace(0)


def test_component_out_of_range():
    with pytest.raises(DomainError):
        PrimSpace(2).subset({3: FULL})


def test_infinitely_many_orbits():
    space = PrimSpace(math.inf)
    u = space.subset({1: [Piece.open(0, HALF)]})
    complement = space.complement(u)
    assert complement.rest_full
    assert complement.part(1) == (Piece(HALF, 1, True, False),)
    assert closure(space, space.y0) == space.whole
    assert is_open(space, space.y0)
    assert "infinity" in maximal_ideal(space).k_data.descriptor


# ---------- text form ----------
def test_parse_subset():
    space = PrimSpace(3)
    s = parse_subset(space, "1:(0,1/2]+{3/4}; J")
    assert s.contains_J
    assert s.part(1) == (Piece(0, HALF, False, True), Piece.point(Fraction(3, 4)))
    assert str(s) == "1:(0,1/2]+{3/4}; J"
    assert parse_subset(space, "{}") == space.empty
    assert parse_subset(space, "*:all") == space.y0


@pytest.mark.parametrize("text", ["1:[0,1/2)", "x:all", "1:(1/2", "*:(0,1)"])
def test_parse_subset_errors(text):
    with pytest.raises(DomainError):
        parse_subset(PrimSpace(2), text)

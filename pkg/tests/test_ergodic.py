# tests/test_ergodic.py
from fractions import Fraction

import pytest
import sympy

from denjoy_invariants.circle_core import Arc, CirclePoint, exact_equal, interval_of
from denjoy_invariants.denjoy_model import Cantor, Gap, GapLabel, act, realize
from denjoy_invariants.ergodic import (
    CoefficientFunction,
    CrossedElement,
    InvariantMeasure,
    LiftIterator,
    PiecewisePolynomial,
    SymbolicArc,
    TraceIdealAnswer,
    in_trace_ideal,
    integrate_geometric,
    measure_arc,
    measure_arc_exact,
    rotation_number,
    rotation_number_estimate,
    trace,
)
from denjoy_invariants.errors import DomainError

ORIGIN = GapLabel(0, (0, 0))


def random_vector(rng, d, size=10):
    return tuple(rng.randint(-size, size) for _ in range(d))


def random_point(rng):
    if rng.random() < 0.5:
        return Gap(GapLabel(0, random_vector(rng, 2, 4)), Fraction(rng.randint(1, 7), 8))
    return Cantor(Fraction(rng.randint(1, 96), 97))


# ---------- rotation numbers ----------
def test_rotation_number_is_the_angle(d2_action):
    assert exact_equal(rotation_number(d2_action, (1, 0)).value, "sqrt(2) - 1")
    assert exact_equal(rotation_number(d2_action, (0, 1)).value, "sqrt(3) - 1")


def test_estimate_encloses_exact_rotation_number(d2_action):
    result = rotation_number_estimate(LiftIterator(d2_action, (1, 0)), 100)
    assert result.contains_exact
    assert result.enclosure.width == Fraction(1, 100)
    assert result.estimate.to_decimal(3).startswith("0.41")


@pytest.mark.slow
def test_estimate_after_ten_thousand_iterations(d2_action):
    result = rotation_number_estimate(LiftIterator(d2_action, (1, 0)), 10_000)
    assert result.contains_exact
    assert result.enclosure.width <= Fraction(2, 10_000)


def test_estimate_on_minimal_action(minimal_action):
    result = rotation_number_estimate(LiftIterator(minimal_action, (0, 1)), 10)
    assert result.contains_exact


def test_estimate_needs_iterations(d2_action):
    with pytest.raises(ValueError):
        rotation_number_estimate(LiftIterator(d2_action, (1, 0)), 0)


# ---------- invariant measure ----------
def test_measure_of_orbit_arc_is_rotation_number(d2_action, rng):
    for _ in range(100):
        p = random_point(rng)
        g = random_vector(rng, 2, 10)
        measured = measure_arc_exact(d2_action, SymbolicArc(p, act(d2_action, g, p)))
        assert exact_equal(measured, rotation_number(d2_action, g).value)


def test_gaps_carry_no_mass(d2_action, rng):
    mu = InvariantMeasure(d2_action)
    assert mu.total() == 1
    for _ in range(20):
        assert mu.gap(GapLabel(0, random_vector(rng, 2, 6))) == 0


def test_arc_inside_a_gap(d2_action):
    inside = SymbolicArc(Gap(ORIGIN, Fraction(1, 4)), Gap(ORIGIN, Fraction(3, 4)))
    backwards = SymbolicArc(Gap(ORIGIN, Fraction(3, 4)), Gap(ORIGIN, Fraction(1, 4)))
    assert measure_arc_exact(d2_action, inside) == 0
    assert measure_arc_exact(d2_action, backwards) == 1


def test_geometric_arc_measure(d2_action):
    # psi maps gap I_0 onto [0, 1/18]; an arc inside it has measure zero
    arc = Arc(CirclePoint(sympy.Rational(1, 100)), CirclePoint(sympy.Rational(1, 40)))
    assert measure_arc(d2_action, arc).contains(0)


def _geometric(action, p):
    mid = realize(action, p).midpoint
    return CirclePoint(sympy.Rational(mid.numerator, mid.denominator))


def test_geometric_orbit_arc_is_rotation_number(d2_action, rng):
    tolerance = Fraction(1, 2 ** 64)
    for _ in range(100):
        p = Gap(GapLabel(0, random_vector(rng, 2, 5)), Fraction(rng.randint(1, 7), 8))
        g = random_vector(rng, 2, 10)
        arc = Arc(_geometric(d2_action, p), _geometric(d2_action, act(d2_action, g, p)))
        measured = measure_arc(d2_action, arc)
        exact = interval_of(rotation_number(d2_action, g).value, 128)
        assert measured.width <= tolerance
        assert abs(measured.midpoint - exact.midpoint) <= tolerance


def test_integral_of_constant(d2_action):
    assert integrate_geometric(d2_action, PiecewisePolynomial.constant(1)).contains(1)


# ---------- piecewise polynomials ----------
def test_hat_function():
    hat = PiecewisePolynomial.interpolate([(0, 0), (Fraction(1, 2), 1)])
    assert hat(Fraction(1, 4)) == sympy.Rational(1, 2)
    assert hat(Fraction(3, 4)) == sympy.Rational(1, 2)
    assert hat.integral() == sympy.Rational(1, 2)


def test_shift_and_product():
    hat = PiecewisePolynomial.interpolate([(0, 0), (Fraction(1, 2), 1)])
    moved = hat.shifted(Fraction(1, 4))
    assert moved(Fraction(3, 4)) == 1
    assert (hat * hat).integral() == sympy.Rational(1, 3)
    assert (hat + -hat).is_zero()


def test_knots_must_increase():
    with pytest.raises(ValueError):
        PiecewisePolynomial((0, 0), ((1,), (2,)))


# ---------- crossed product ----------
def unitary(action, g):
    return CrossedElement(action, ((g, CoefficientFunction.constant(1)),))


def test_unitaries_multiply_like_the_group(d2_action, rng):
    for _ in range(20):
        g, h = random_vector(rng, 2, 5), random_vector(rng, 2, 5)
        product = unitary(d2_action, g) * unitary(d2_action, h)
        assert [g2 for g2, _ in product.terms] == [tuple(a + b for a, b in zip(g, h))]


def test_trace_of_unit_and_unitaries(d2_action):
    assert trace(d2_action, CrossedElement.unit(d2_action)) == 1
    assert trace(d2_action, unitary(d2_action, (1, 0))) == 0


def test_trace_is_integral_against_mu(d2_action):
    hat = PiecewisePolynomial.interpolate([(0, 0), (Fraction(1, 2), 1)])
    a = CrossedElement(d2_action, (((0, 0), CoefficientFunction(hat)),))
    assert trace(d2_action, a) == sympy.Rational(1, 2)


def test_trace_of_a_star_a_is_nonnegative(d2_action, rng):
    hat = PiecewisePolynomial.interpolate([(0, 0), (Fraction(1, 2), 1)])
    for _ in range(10):
        g = random_vector(rng, 2, 3)
        a = CrossedElement(d2_action, ((g, CoefficientFunction(hat.scaled(rng.randint(1, 5)))),))
        assert trace(d2_action, a.star() * a) > 0


def test_gap_bumps_lie_in_the_trace_ideal(d2_action, rng):
    for _ in range(50):
        c = rng.randint(1, 9)
        label = GapLabel(0, random_vector(rng, 2, 4))
        bump = CoefficientFunction.bump(label, (0, c, -c))
        a = CrossedElement(d2_action, ((random_vector(rng, 2, 4), bump),))
        assert in_trace_ideal(d2_action, a) is TraceIdealAnswer.YES
        assert trace(d2_action, a.star() * a) == 0


def test_unit_is_not_in_the_trace_ideal(d2_action):
    assert in_trace_ideal(d2_action, CrossedElement.unit(d2_action)) is TraceIdealAnswer.NO


def test_bumps_must_vanish_at_gap_ends():
    with pytest.raises(DomainError):
        CoefficientFunction.bump(ORIGIN, (1, 1))


def test_trace_ideal_needs_denjoy_action(minimal_action):
    with pytest.raises(DomainError):
        in_trace_ideal(minimal_action, CrossedElement.unit(minimal_action))


def test_elements_of_different_actions_do_not_mix(d2_action, two_orbit_action):
    with pytest.raises(DomainError):
        CrossedElement.unit(d2_action) + CrossedElement.unit(two_orbit_action)


def random_bumps(rng, gaps):
    parts = []
    for _ in range(gaps):
        a, b = rng.randint(-5, 5), rng.randint(1, 5)
        parts.append((GapLabel(0, random_vector(rng, 2, 4)), (0, a, b, -(a + b))))
    return CoefficientFunction(PiecewisePolynomial.zero(), tuple(parts))


def random_coefficient(rng):
    hat = PiecewisePolynomial.interpolate([(0, 0), (Fraction(rng.randint(1, 7), 8), rng.randint(1, 4))])
    return CoefficientFunction(hat.scaled(rng.randint(-3, 3)), random_bumps(rng, rng.randint(0, 3)).gaps)


def test_trace_of_sums(d2_action, rng):
    for _ in range(30):
        terms = [(random_vector(rng, 2, 1), random_coefficient(rng)) for _ in range(rng.randint(2, 6))]
        a = CrossedElement(d2_action, tuple(terms))
        expected = sum((f.cantor.integral() for g, f in terms if g == (0, 0)), sympy.S.Zero)
        assert exact_equal(trace(d2_action, a), expected)
        b = CrossedElement(d2_action, ((random_vector(rng, 2, 1), random_coefficient(rng)),))
        total = trace(d2_action, a) + trace(d2_action, b.scaled(3))
        assert exact_equal(trace(d2_action, a + b.scaled(3)), total)


def test_sums_of_gap_bumps_lie_in_the_trace_ideal(d2_action, rng):
    for _ in range(30):
        terms = tuple((random_vector(rng, 2, 3), random_bumps(rng, rng.randint(1, 4)))
                      for _ in range(rng.randint(2, 5)))
        a = CrossedElement(d2_action, terms)
        assert in_trace_ideal(d2_action, a) is TraceIdealAnswer.YES
        assert trace(d2_action, a.star() * a) == 0


def test_a_cantor_part_leaves_the_trace_ideal(d2_action, rng):
    hat = PiecewisePolynomial.interpolate([(0, 0), (Fraction(1, 2), 1)])
    for _ in range(10):
        terms = [(random_vector(rng, 2, 3), random_bumps(rng, 2)) for _ in range(3)]
        terms.append((random_vector(rng, 2, 3), CoefficientFunction(hat)))
        a = CrossedElement(d2_action, tuple(terms))
        assert in_trace_ideal(d2_action, a) is TraceIdealAnswer.NO


def test_opposite_bumps_cancel(d2_action):
    label = GapLabel(0, (1, -2))
    a = CrossedElement(d2_action, (((0, 1), CoefficientFunction.bump(label, (0, 2, -2))),
                                   ((0, 1), CoefficientFunction.bump(label, (0, -2, 2)))))
    assert a.terms == ()
    assert trace(d2_action, a) == 0


# ---------- complex coefficients ----------
def test_complex_constant_trace(d2_action):
    a = CrossedElement(d2_action, (((0, 0), CoefficientFunction.constant("1 + 2*I")),))
    assert exact_equal(sympy.re(trace(d2_action, a)), 1)
    assert sympy.expand(trace(d2_action, a) - 1 - 2 * sympy.I) == 0
    assert trace(d2_action, a.star() * a) == 5
    assert in_trace_ideal(d2_action, a) is TraceIdealAnswer.NO


def test_adjoint_conjugates_coefficients(d2_action):
    f = CoefficientFunction.constant(complex(0, 3))
    a = CrossedElement(d2_action, (((1, 0), f),))
    assert sympy.expand(a.star().coefficient((-1, 0)).cantor(0) + 3 * sympy.I) == 0
    assert trace(d2_action, a.star() * a) == 9


def test_complex_gap_bumps_stay_in_the_trace_ideal(d2_action):
    bump = CoefficientFunction.bump(ORIGIN, (0, sympy.I, -sympy.I))
    a = CrossedElement(d2_action, (((0, 0), bump),))
    assert in_trace_ideal(d2_action, a) is TraceIdealAnswer.YES
    assert trace(d2_action, a.star() * a) == 0

# tests/test_ktheory.py
import math
from fractions import Fraction
from itertools import combinations

import pytest
import sympy

from denjoy_invariants.circle_core import interval_of
from denjoy_invariants.denjoy_model import RotationVector
from denjoy_invariants.errors import DomainError
from denjoy_invariants.ktheory import (
    LABEL_CONVENTION_NOTE,
    KGroupDescriptor,
    Parity,
    Sign,
    SkewMatrix,
    TorusTheta,
    ZeroTest,
    build_k_report,
    certify_injective_box,
    formal_theta,
    ideal_k_data,
    is_zero_pairing,
    k_groups,
    label_trace_vector,
    pfaffian,
    pfaffian_by_matchings,
    pfaffian_by_permutations,
    pfaffian_interval,
    pfaffian_rational,
    positivity,
    range_subgroup,
    theta_submatrix,
    trace_pairing,
)

D2 = TorusTheta(RotationVector(("sqrt(2) - 1", "sqrt(3) - 1")))


def random_skew(rng, n):
    upper = {(i, j): Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for i in range(n) for j in range(i + 1, n)}
    return SkewMatrix.from_upper(n, upper)


# ---------- skew matrices and Pfaffians ----------
def test_skew_matrix_validation():
    with pytest.raises(DomainError):
        SkewMatrix(((0, 1), (1, 0)))
    with pytest.raises(DomainError):
        SkewMatrix(((1, 0), (0, 0)))


def test_small_pfaffians():
    assert pfaffian(SkewMatrix(())) == 1
    assert pfaffian(SkewMatrix.from_upper(2, {(0, 1): Fraction(7, 3)})) == sympy.Rational(7, 3)
    m = SkewMatrix.from_upper(4, {(0, 1): 1, (0, 2): 2, (0, 3): 3, (1, 2): 4, (1, 3): 5, (2, 3): 6})
    # a01 a23 - a02 a13 + a03 a12
    assert pfaffian(m) == 6 - 10 + 12


def test_odd_size_has_no_pfaffian():
    with pytest.raises(DomainError):
        pfaffian(SkewMatrix.from_upper(3, {(0, 1): 1}))


@pytest.mark.parametrize("n", [2, 4, 6])
def test_pfaffian_matches_permutation_sum(rng, n):
    for _ in range(100):
        m = random_skew(rng, n)
        pf = pfaffian(m)
        assert pf == pfaffian_by_permutations(m)
        assert sympy.expand(pf ** 2 - m.matrix().det()) == 0


@pytest.mark.slow
def test_pfaffian_matches_permutation_sum_size_8(rng):
    for _ in range(100):
        m = random_skew(rng, 8)
        pf = pfaffian(m)
        assert pf == pfaffian_by_permutations(m)
        assert sympy.expand(pf ** 2 - m.matrix().det()) == 0


@pytest.mark.parametrize("n", [8, 10])
def test_elimination_matches_matchings(rng, n):
    for _ in range(10):
        m = random_skew(rng, n)
        assert pfaffian_rational(m) == pfaffian_by_matchings(m)


def test_elimination_handles_zero_pivots():
    # first row vanishes except in the last column
    m = SkewMatrix.from_upper(4, {(0, 3): 2, (1, 2): 5})
    assert pfaffian_rational(m) == pfaffian_by_matchings(m) == 10
    singular = SkewMatrix.from_upper(4, {(1, 2): 5, (2, 3): 1})
    assert pfaffian_rational(singular) == 0


def test_interval_elimination_encloses_exact_value(rng):
    n = 10
    upper = {(i, j): sympy.sqrt(2) * rng.randint(-3, 3) + rng.randint(1, 4) for i in range(n) for j in range(i + 1, n)}
    m = SkewMatrix.from_upper(n, upper)
    exact = pfaffian_by_matchings(m)
    result = pfaffian(m)
    assert not result.is_disjoint(interval_of(exact, 512))
    assert result.width < Fraction(1, 2 ** 60)


def test_interval_elimination_of_zero_matrix():
    assert pfaffian_interval(SkewMatrix.from_upper(4, {}), 64).contains(0)


# ---------- theta ----------
def test_theta_is_skew_with_angles_in_first_row():
    entries = D2.matrix().entries
    assert entries[0][1] == sympy.sqrt(2) - 1
    assert entries[2][0] == 1 - sympy.sqrt(3)
    assert entries[1][2] == 0
    assert formal_theta(2).entries[0][1] == sympy.Symbol("gamma_1")


def test_theta_submatrix_is_one_based():
    sub = theta_submatrix(D2, (1, 3))
    assert sub.entries[0][1] == sympy.sqrt(3) - 1
    with pytest.raises(DomainError):
        theta_submatrix(D2, (1, 4))
    with pytest.raises(DomainError):
        theta_submatrix(D2, (2, 1))


def test_label_trace_vectors():
    assert label_trace_vector(2, ()) == (1, 0, 0)
    assert label_trace_vector(2, (1, 2)) == (0, 1, 0)
    assert label_trace_vector(2, (1, 3)) == (0, 0, 1)
    assert label_trace_vector(2, (2, 3)) == (0, 0, 0)
    assert label_trace_vector(3, (1, 2, 3, 4)) == (0, 0, 0, 0)
    with pytest.raises(DomainError):
        label_trace_vector(2, (1,))


# ---------- K-groups ----------
@pytest.mark.parametrize("d", range(1, 11))
def test_ranks_are_powers_of_two(d):
    k0, k1, steps = k_groups(d)
    assert k0.rank == k1.rank == 2 ** d
    assert len(steps) == d
    assert all(step.is_split_exact() for step in steps)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_labels_are_all_subsets_of_given_parity(d):
    k0, k1, _ = k_groups(d)
    universe = range(1, d + 2)
    even = {c for r in range(0, d + 2, 2) for c in combinations(universe, r)}
    odd = {c for r in range(1, d + 2, 2) for c in combinations(universe, r)}
    assert set(k0.labels) == even
    assert set(k1.labels) == odd


def test_label_order_for_d2():
    k0, k1, _ = k_groups(2)
    assert k0.labels == ((), (1, 2), (1, 3), (2, 3))
    assert k1.labels == ((1,), (2,), (3,), (1, 2, 3))
    assert k0.index((1, 3)) == 2
    with pytest.raises(DomainError):
        k0.index((1,))


def test_index_maps_for_d2():
    _, _, steps = k_groups(2)
    last = steps[-1]
    assert last.adjoined == 3
    # delta0 sends p_{(1,3)} to v_{(1,)} and p_{(2,3)} to v_{(2,)}
    assert last.delta0.toarray().tolist() == [[0, 0, 1, 0], [0, 0, 0, 1]]
    assert last.delta1.toarray().tolist() == [[0, 0, -1, 0], [0, 0, 0, -1]]


def test_descriptor_rejects_wrong_parity():
    with pytest.raises(DomainError):
        KGroupDescriptor(Parity.K0, ((1,),))


def test_dimension_limit():
    with pytest.raises(DomainError):
        k_groups(0)
    with pytest.raises(DomainError):
        k_groups(5, max_d=4)


# ---------- trace pairing and order ----------
def test_trace_pairing_is_linear():
    pairing = trace_pairing(D2, {(1, 2): 2, (): -1})
    assert pairing.formal == (-1, 2, 0)
    assert pairing.value.contains(interval_of(2 * sympy.sqrt(2) - 3, 256))


def test_trace_pairing_rejects_odd_labels():
    with pytest.raises(DomainError):
        trace_pairing(D2, {(1,): 1})


def test_zero_tests():
    assert is_zero_pairing(D2, (0, 0, 0)) is ZeroTest.ZERO
    assert is_zero_pairing(D2, (1, 0, 0)) is ZeroTest.NONZERO
    dependent = TorusTheta(RotationVector(("sqrt(2) - 1", "2*sqrt(2) - 2")))
    assert is_zero_pairing(dependent, (0, 2, -1)) is ZeroTest.UNDECIDED


def test_positivity():
    assert positivity(D2, (0, -1, 0)) is Sign.NEGATIVE
    assert positivity(D2, (-1, 1, 1)) is Sign.POSITIVE
    assert positivity(D2, (0, 0, 0)) is Sign.ZERO


def test_range_subgroup():
    rng = range_subgroup(D2)
    assert rng.rank == 3
    assert rng.generators == ((), (1, 2), (1, 3))
    assert rng.decimals[1].startswith("0.41421356237309504880168872")


def test_injective_box_small():
    cert = certify_injective_box(D2, 50)
    assert cert.injective
    assert cert.vectors == 101 ** 3 - 1


@pytest.mark.slow
def test_injective_box_thousand():
    cert = certify_injective_box(D2, 1000)
    assert cert.injective
    assert cert.rechecked == 0


def test_box_finds_a_relation():
    dependent = TorusTheta(RotationVector(("sqrt(2) - 1", "2*sqrt(2) - 2")))
    assert not certify_injective_box(dependent, 3).injective


# ---------- reports ----------
def test_d2_report():
    data = build_k_report(D2).to_json()
    assert data["ranks"] == [4, 4]
    assert data["K0_labels"] == [[], [1, 2], [1, 3], [2, 3]]
    assert [t["formal"] for t in data["trace_values"]] == [[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0]]
    assert data["trace_values"][1]["decimal"].startswith("0.41421356237309504880168872")
    assert data["trace_values"][2]["decimal"].startswith("0.73205080756887729352744634")
    assert all(step["split_exact"] for step in data["index_maps"])
    assert data["label_convention"] == LABEL_CONVENTION_NOTE
    assert [s["sign"] for s in data["order_samples"]] == ["Positive", "Negative", "Positive"]


def test_ideal_k_data():
    one = ideal_k_data(1)
    assert (one.k0_rank, one.k1_rank, one.index_map_zero) == (0, 1, True)
    assert ideal_k_data(3).k1_rank == 3
    assert "infinity" in ideal_k_data(math.inf).descriptor
    with pytest.raises(DomainError):
        ideal_k_data(0)

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aqcknap.encode import (
    LOG,
    UNARY,
    IsingModel,
    QuadraticBinaryModel,
    all_energies,
    bits_of,
    brute_force_minimizers,
    build_knapsack,
    build_log_knapsack,
    build_search_model,
    build_unary_knapsack,
    count_weight_representations,
    decode_bits,
    ising_energy,
    load_ising,
    log_slack_coefficients,
    model_energy,
    qubit_counts,
    save_ising,
    sufficient_penalty,
    to_ising,
)
from aqcknap.errors import EncodingError
from aqcknap.knapcore import solve_dp, validate_instance

from conftest import random_instance


def spins(bits):
    return [1 - 2 * b for b in bits]


def direct_unary(inst, A, B, bits):
    n, c = inst.n, inst.capacity
    x, y = bits[:n], bits[n:]
    wx = sum(w * b for w, b in zip(inst.weights, x))
    ny = sum(k * b for k, b in zip(range(1, c + 1), y))
    return A * (1 - sum(y)) ** 2 + A * (ny - wx) ** 2 - B * sum(p * b for p, b in zip(inst.profits, x))


def direct_log(inst, A, B, bits):
    n = inst.n
    _, coeffs = log_slack_coefficients(inst.capacity)
    x, y = bits[:n], bits[n:]
    wx = sum(w * b for w, b in zip(inst.weights, x))
    sy = sum(k * b for k, b in zip(coeffs, y))
    return A * (sy - wx) ** 2 - B * sum(p * b for p, b in zip(inst.profits, x))


@pytest.mark.parametrize(
    "c, M, coeffs",
    [(1, 0, [1]), (2, 1, [1, 1]), (7, 2, [1, 2, 4]), (8, 3, [1, 2, 4, 1]), (9, 3, [1, 2, 4, 2]),
     (10, 3, [1, 2, 4, 3]), (15, 3, [1, 2, 4, 8])],
)
def test_log_slack_coefficients(c, M, coeffs):
    assert log_slack_coefficients(c) == (M, coeffs)


@given(st.integers(1, 5000))
def test_log_slack_covers_exactly_zero_to_c(c):
    _, coeffs = log_slack_coefficients(c)
    reach = {0}
    for k in coeffs:
        reach |= {r + k for r in reach}
    assert reach == set(range(c + 1))


def test_qubit_counts(inst7, inst5):
    assert qubit_counts(inst7) == {UNARY: 16, LOG: 11}
    assert qubit_counts(inst5)[UNARY] == 12
    assert build_log_knapsack(inst7)[0].num_vars == 11


def test_unary_minimum_is_optimum(inst5):
    model, emap = build_unary_knapsack(inst5)
    emin, idx = brute_force_minimizers(model)
    assert emin == -28
    assert len(idx) == 1
    dec = decode_bits(emap, bits_of(idx[0], model.num_vars))
    assert dec.profit == 28 and dec.weight == 7 and dec.slack_value == 7 and dec.feasible


def test_log_degenerate_representations():
    inst = validate_instance([1, 1, 1], [4, 5, 6], 10)
    _, emap = build_log_knapsack(inst)
    assert emap.slack_coefficients == (1, 2, 4, 3)
    count, reps = count_weight_representations(emap, 6)
    assert count == 2
    assert set(reps) == {(0, 1, 1, 0), (1, 1, 0, 1)}


@given(st.integers(0, 2**32 - 1))
def test_models_match_direct_formula(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n_max=4, c_max=6)
    A, B = max(inst.profits) + 1 + int(rng.integers(0, 3)), 1
    for builder, direct in ((build_unary_knapsack, direct_unary), (build_log_knapsack, direct_log)):
        model, _ = builder(inst, A, B)
        energies = all_energies(model)
        for k in range(0, 1 << model.num_vars, max(1, (1 << model.num_vars) // 64)):
            bits = bits_of(k, model.num_vars)
            assert energies[k] == direct(inst, A, B, bits) == model_energy(model, bits)


def check_minimizers_optimal(inst, model, emap):
    emin, idx = brute_force_minimizers(model)
    best = solve_dp(inst).solution.profit
    assert emin == -best
    for k in idx:
        dec = decode_bits(emap, bits_of(k, model.num_vars))
        assert dec.feasible and dec.profit == best and dec.slack_value == dec.weight


@given(st.integers(0, 2**32 - 1))
def test_log_ground_state_decodes_to_dp(seed):
    inst = random_instance(np.random.default_rng(seed), n_max=5, c_max=8)
    check_minimizers_optimal(inst, *build_log_knapsack(inst))


@given(st.integers(0, 2**32 - 1), st.sampled_from([UNARY, LOG]))
def test_sufficient_penalty_decodes_to_dp(seed, encoding):
    inst = random_instance(np.random.default_rng(seed), n_max=5, c_max=8)
    check_minimizers_optimal(inst, *build_knapsack(inst, encoding, A=sufficient_penalty(inst.profits)))


def test_unary_default_penalty_can_tie():
    # two slack bits on cost only A = 9, and items 4, 5 add exactly 9 profit
    inst = validate_instance([7, 1, 8, 7, 2], [3, 2, 3, 4, 1], 6)
    model, emap = build_unary_knapsack(inst)
    emin, idx = brute_force_minimizers(model)
    assert emin == -15
    decs = [decode_bits(emap, bits_of(k, model.num_vars)) for k in idx]
    assert sorted(d.feasible for d in decs) == [False, True]


def test_penalty_condition_enforced(inst7):
    with pytest.raises(EncodingError) as exc:
        build_log_knapsack(inst7, A=9, B=1)
    assert exc.value.code == "PENALTY_CONDITION_VIOLATED"
    with pytest.raises(EncodingError):
        build_unary_knapsack(inst7, A=10, B=0)
    with pytest.raises(EncodingError):
        build_knapsack(inst7, "ternary")


def test_single_product_lowering():
    model = QuadraticBinaryModel.from_terms(2, quadratic=[(0, 1, 1)])
    ising = to_ising(model)
    q = Fraction(1, 4)
    assert ising.offset == q
    assert ising.h == (q, q)
    assert ising.J == {(0, 1): -q}


def test_from_terms_merges_and_folds():
    model = QuadraticBinaryModel.from_terms(3, [(0, 1), (0, 2)], [(1, 0, 3), (0, 1, -3), (2, 2, 5)], 7)
    assert model.linear == {0: 3, 2: 5}
    assert model.quadratic == {}
    assert model.constant == 7


quad_models = st.integers(1, 8).flatmap(
    lambda n: st.builds(
        QuadraticBinaryModel.from_terms,
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(-50, 50)), max_size=12),
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1),
                      st.fractions(-20, 20, max_denominator=8)),
            max_size=20,
        ),
        st.integers(-100, 100),
    )
)


@given(quad_models)
def test_ising_energy_matches_binary_exactly(model):
    ising = to_ising(model)
    for bits in itertools.product((0, 1), repeat=model.num_vars):
        assert ising_energy(ising, spins(bits)) == model_energy(model, bits)


@given(quad_models)
def test_all_energies_matches_pointwise(model):
    e = all_energies(model)
    for k in range(1 << model.num_vars):
        assert e[k] == pytest.approx(float(model_energy(model, bits_of(k, model.num_vars))), abs=1e-9)


def test_search_model_ground_state():
    model, emap = build_search_model([1, 2, 6])
    assert emap.A == 7
    emin, idx = brute_force_minimizers(model)
    assert emin == -6
    assert [bits_of(k, 3) for k in idx] == [(0, 0, 1)]


def test_search_blind_mode():
    with pytest.raises(EncodingError):
        build_search_model([1, 2, 6], A=3)
    model, _ = build_search_model([1, 2, 6], A=3, blind=True)
    # A below the maximum lets the all-on state win
    _, idx = brute_force_minimizers(build_search_model([5, 6, 7], A=2, blind=True)[0])
    assert bits_of(idx[0], 3) != (0, 0, 1)
    with pytest.raises(EncodingError):
        build_search_model([1, 2], blind=True)


def test_ising_json_roundtrip(tmp_path, inst7):
    model, emap = build_log_knapsack(inst7)
    ising = to_ising(model)
    path = tmp_path / "ising.json"
    save_ising(path, ising, emap)
    back = load_ising(path)
    assert back == ising


def test_ising_from_dict_rejects_bad_input():
    with pytest.raises(EncodingError):
        IsingModel.from_dict({"num_qubits": 2, "h": [0.0], "J": []})
    with pytest.raises(EncodingError):
        IsingModel.from_dict({"num_qubits": 2, "h": [0.0, 0.0], "J": [[1, 1, 1.0]]})

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gadgetc.circuits import Circuit, custom_gate, random_circuit, x_gate
from gadgetc.history import (
    HistoryProblem,
    NotSelfInverseError,
    build_h_clock,
    build_h_clockinit,
    build_h_in,
    build_h_prop,
    build_h_prop_term,
    build_history_state,
    build_initial,
    build_total,
    h_clock_projector_form,
    h_in_projector_form,
    h_prop_projector_form,
    h_prop_term_projector_form,
    is_legal_clock,
    unary_clock,
)
from gadgetc.pauli import realize_matrix
from gadgetc.spectral import ground_overlap


def ket(bits):
    v = np.zeros(1 << len(bits))
    v[int(bits, 2)] = 1.0
    return v


def x_circuit(T):
    return Circuit(1, tuple(x_gate(1) for _ in range(T)))


def random_instance(seed, max_n=3, max_T=4):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    T = int(rng.integers(1, max_T + 1))
    c = random_circuit(n, T, rng)
    x = "".join(str(b) for b in rng.integers(0, 2, size=n))
    return c, x


seeds = st.integers(0, 2**31 - 1)


def test_clock_words():
    assert unary_clock(2, 4) == "1100"
    assert is_legal_clock("1100") and not is_legal_clock("1010")


def test_problem_layout():
    p = HistoryProblem(x_circuit(3), "1")
    assert p.total == 4 and p.clock(1) == 2
    assert "clock=2..4" in p.header()[1]


# -- H_in ---------------------------------------------------------------------------

def test_h_in_accepts_correct_input():
    h = realize_matrix(build_h_in("0", 1, 1))
    np.testing.assert_allclose(h @ ket("00"), 0)


def test_h_in_penalizes_wrong_input():
    h = realize_matrix(build_h_in("0", 1, 1))
    np.testing.assert_allclose(h @ ket("10"), ket("10"))


@pytest.mark.parametrize("x,T", [("0", 1), ("1", 2), ("01", 3), ("110", 2)])
def test_h_in_forms_agree(x, T):
    np.testing.assert_allclose(realize_matrix(build_h_in(x, len(x), T)), h_in_projector_form(x, len(x), T), atol=1e-12)


def test_h_in_length_mismatch():
    with pytest.raises(ValueError):
        build_h_in("01", 1, 1)


# -- H_clock ----------------------------------------------------------------------------

def test_h_clock_legal_states_zero():
    h = realize_matrix(build_h_clock(3))
    for bits in ["000", "100", "110", "111"]:
        assert ket(bits) @ h @ ket(bits) == pytest.approx(0)


def test_h_clock_counts_patterns():
    h = realize_matrix(build_h_clock(3))
    np.testing.assert_allclose(h @ ket("010"), ket("010"))
    np.testing.assert_allclose(np.diag(h), [bits.count("01") for bits in (format(b, "03b") for b in range(8))])


@pytest.mark.parametrize("T", [2, 3, 4, 5])
def test_h_clock_forms_and_degeneracy(T):
    h = realize_matrix(build_h_clock(T))
    np.testing.assert_allclose(h, h_clock_projector_form(T), atol=1e-12)
    w = np.linalg.eigvalsh(h)
    assert np.sum(np.abs(w) < 1e-9) == T + 1


def test_h_clock_single_qubit_is_zero():
    assert build_h_clock(1).terms == ()


# -- H_clockinit --------------------------------------------------------------------------

def test_clockinit_values():
    h1 = realize_matrix(build_h_clockinit(1))
    np.testing.assert_allclose(h1 @ ket("0"), 0)
    np.testing.assert_allclose(h1 @ ket("1"), ket("1"))
    h2 = realize_matrix(build_h_clockinit(2))
    assert ket("10") @ h2 @ ket("10") == pytest.approx(1.0)


# -- H_prop -------------------------------------------------------------------------------

def test_h_prop_forms_agree_two_x_gates():
    c = x_circuit(2)
    np.testing.assert_allclose(realize_matrix(build_h_prop(c)), h_prop_projector_form(c), atol=1e-12)


def test_h_prop_single_gate_is_one_minus_ux():
    c = x_circuit(1)
    np.testing.assert_allclose(realize_matrix(build_h_prop(c)), np.eye(4) - np.kron([[0, 1], [1, 0]], [[0, 1], [1, 0]]))
    w, v = np.linalg.eigh(realize_matrix(build_h_prop(c)))
    target = (ket("00") + ket("11")) / math.sqrt(2)
    ground = v[:, np.abs(w - w[0]) < 1e-9]
    assert np.linalg.norm(ground.T @ target) == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_h_prop_term_forms_agree(seed):
    c, _ = random_instance(seed, max_T=5)
    for t in range(1, c.T + 1):
        np.testing.assert_allclose(
            realize_matrix(build_h_prop_term(c, t)), h_prop_term_projector_form(c, t), atol=1e-12)


def test_h_prop_rejects_non_involution():
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    with pytest.raises(NotSelfInverseError):
        build_h_prop(Circuit(1, (custom_gate(rot, [1]),)))


# -- history state ----------------------------------------------------------------------

def test_history_state_single_x():
    np.testing.assert_allclose(build_history_state(x_circuit(1), "0"), (ket("00") + ket("11")) / math.sqrt(2))


def test_history_state_two_x():
    expected = (ket("000") + ket("110") + ket("011")) / math.sqrt(3)
    np.testing.assert_allclose(build_history_state(x_circuit(2), "0"), expected)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_history_state_normalized(seed):
    c, x = random_instance(seed)
    assert np.linalg.norm(build_history_state(c, x)) == pytest.approx(1.0, abs=1e-12)


# -- totals ------------------------------------------------------------------------------

def test_total_annihilates_single_x():
    c = x_circuit(1)
    h = realize_matrix(build_total(c, "0"))
    assert np.linalg.norm(h @ build_history_state(c, "0")) <= 1e-12


def test_clockinit_breaks_annihilation():
    c = x_circuit(1)
    psi = build_history_state(c, "0")
    h = realize_matrix(build_total(c, "0", include_clockinit=True))
    assert psi @ h @ psi == pytest.approx(0.5)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_history_is_unique_ground_state(seed):
    c, x = random_instance(seed)
    h = realize_matrix(build_total(c, x))
    psi = build_history_state(c, x)
    assert np.linalg.norm(h @ psi) <= 1e-10
    w = np.linalg.eigvalsh(h)
    assert w[1] - w[0] > 1e-6
    assert ground_overlap(h, psi) >= 1 - 1e-8


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_components_positive_semidefinite(seed):
    c, x = random_instance(seed)
    n, T = c.n, c.T
    for part in (build_h_in(x, n, T), build_h_clock(T, n), build_h_clockinit(T, n), build_h_prop(c)):
        assert np.linalg.eigvalsh(realize_matrix(part))[0] >= -1e-10


def test_initial_hamiltonian_ground_state():
    c = x_circuit(2)
    h = realize_matrix(build_initial(c, "0"))
    w, v = np.linalg.eigh(h)
    assert w[0] == pytest.approx(0, abs=1e-12) and w[1] > 0.5
    assert abs(v[:, 0] @ ket("000")) == pytest.approx(1.0)

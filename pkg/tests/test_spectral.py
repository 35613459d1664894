import math

import numpy as np
import pytest

from gadgetc.gadgets import Kind, build_gadget
from gadgetc.history import build_h_clock
from gadgetc.pauli import OperatorSum, Partition, identity, pauli, realize_matrix, zero
from gadgetc.spectral import (
    NonHermitianError,
    SingularResolventError,
    eigensolve,
    exact_self_energy,
    gap_sweep,
    ground_overlap,
    perturbative_self_energy,
)


def ising_chain(n, h=0.7):
    """Open transverse-field Ising chain, used only as a solver workload."""
    op = zero(n)
    for q in range(1, n):
        op = op - pauli(n, {q: "Z", q + 1: "Z"})
    for q in range(1, n + 1):
        op = op - pauli(n, {q: "X"}, h)
    return op


def test_z_eigenvalues():
    rep = eigensolve(pauli(1, "Z"), k=2)
    np.testing.assert_allclose(rep.eigenvalues, [-1, 1])
    assert rep.gap == pytest.approx(2)


def test_clock_degeneracy_then_gap():
    rep = eigensolve(build_h_clock(3), k=5)
    np.testing.assert_allclose(rep.eigenvalues[:4], 0, atol=1e-12)
    assert rep.eigenvalues[4] == pytest.approx(1)


def test_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        eigensolve(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NonHermitianError):
        eigensolve(pauli(1, "Y", 1j))


def test_residuals_recorded():
    rep = eigensolve(ising_chain(4), k=3)
    assert all(r <= 1e-8 for r in rep.residuals.values())
    assert np.all(np.diff(rep.eigenvalues) >= 0)


@pytest.mark.parametrize("n", [10, 11])
def test_dense_and_iterative_agree(n):
    h = ising_chain(n)
    dense = eigensolve(h, k=2, method="dense")
    iterative = eigensolve(h, k=2, method="iterative")
    assert abs(dense.ground_energy - iterative.ground_energy) <= 1e-8
    assert abs(dense.gap - iterative.gap) <= 1e-8


def test_iterative_used_above_dense_limit(monkeypatch):
    monkeypatch.setenv("GADGETC_DENSE_LIMIT", "6")
    h = ising_chain(8)
    rep = eigensolve(h, k=2)
    monkeypatch.setenv("GADGETC_DENSE_LIMIT", "14")
    assert rep.ground_energy == pytest.approx(eigensolve(h, k=2).ground_energy, abs=1e-8)


def test_real_vectors_for_real_input():
    rep = eigensolve(ising_chain(5), k=2)
    assert not np.iscomplexobj(rep.vectors) or np.max(np.abs(rep.vectors.imag)) <= 1e-10


# -- overlaps ---------------------------------------------------------------------------

def test_overlap_basis():
    assert ground_overlap(-1.0 * pauli(1, "Z"), np.array([1.0, 0.0])) == pytest.approx(1.0)


def test_overlap_plus():
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    assert ground_overlap(-1.0 * pauli(1, "Z"), plus) == pytest.approx(0.5)


def test_overlap_degenerate_space():
    psi = np.zeros(8)
    psi[[0b000, 0b110]] = 1 / math.sqrt(2)
    assert ground_overlap(build_h_clock(3), psi) == pytest.approx(1.0)


# -- self-energy -----------------------------------------------------------------------

def test_self_energy_without_perturbation():
    hp = 10.0 * (identity(2) - pauli(2, {2: "Z"})) * 0.5
    keep = Partition(2, "0")
    np.testing.assert_allclose(exact_self_energy(hp, keep, 0.0), 0, atol=1e-12)


def test_block_diagonal_self_energy_is_z_independent():
    hp = 10.0 * (identity(2) - pauli(2, {2: "Z"})) * 0.5
    v1 = pauli(2, {1: "X"}, 0.3) + pauli(2, {1: "Z", 2: "Z"}, 0.2)
    keep = Partition(2, "0")
    expected = realize_matrix(v1)[::2, ::2]
    for z in (0.0, 0.5, -1.0):
        np.testing.assert_allclose(exact_self_energy(hp + v1, keep, z), expected, atol=1e-12)


@pytest.mark.parametrize("kind", list(Kind))
def test_schur_and_resolvent_agree(kind):
    g = build_gadget(kind, 1.0, 1, 2, 3, eps=0.2)
    a = exact_self_energy(g.hamiltonian, g.low, 0.0, method="schur")
    b = exact_self_energy(g.hamiltonian, g.low, 0.0, method="resolvent")
    np.testing.assert_allclose(a, b, atol=1e-8 * max(1.0, np.abs(a).max()))


def test_singular_resolvent():
    hp = 2.0 * (identity(2) - pauli(2, {2: "Z"})) * 0.5
    with pytest.raises(SingularResolventError):
        exact_self_energy(hp, Partition(2, "0"), z=2.0)


@pytest.mark.parametrize("kind", list(Kind))
def test_order_zero_term_vanishes(kind):
    g = build_gadget(kind, 1.0, 1, 2, 3, eps=0.1)
    res = perturbative_self_energy(g.Hp, g.V, g.low, 0.0)
    np.testing.assert_allclose(res.terms[0], 0, atol=1e-12)
    assert len(res.terms) == 4


@pytest.mark.parametrize("kind", list(Kind))
@pytest.mark.parametrize("eps", [0.2, 0.1, 0.05])
def test_series_residual_bound(kind, eps):
    g = build_gadget(kind, 1.0, 1, 2, 3, eps=eps)
    res = perturbative_self_energy(g.Hp, g.V, g.low, 0.0)
    norm_v = np.linalg.norm(realize_matrix(g.V), 2)
    assert res.residual <= 2 * norm_v ** 4 / g.params.delta ** 3


def test_series_order_limit():
    g = build_gadget(Kind.ZZ_FROM_ZX, 1.0, 1, 2, 3, eps=0.1)
    with pytest.raises(ValueError):
        perturbative_self_energy(g.Hp, g.V, g.low, 0.0, order=4)


# -- gap sweep ---------------------------------------------------------------------------

def test_two_level_gap_formula():
    sweep = gap_sweep(-1.0 * pauli(1, "X"), -1.0 * pauli(1, "Z"), 101)
    np.testing.assert_allclose(sweep.gaps, 2 * np.sqrt(sweep.s ** 2 + (1 - sweep.s) ** 2), atol=1e-6)
    assert sweep.argmin == pytest.approx(0.5)
    assert sweep.min_gap == pytest.approx(math.sqrt(2))


def test_constant_gap_when_equal():
    h = ising_chain(3)
    sweep = gap_sweep(h, h, 11)
    np.testing.assert_allclose(sweep.gaps, sweep.gaps[0], atol=1e-12)


def test_gap_sweep_qubit_mismatch():
    with pytest.raises(ValueError):
        gap_sweep(pauli(1, "Z"), pauli(2, "ZZ"))


def test_gap_sweep_degenerate_is_zero():
    sweep = gap_sweep(OperatorSum((), 2), OperatorSum((), 2), 3)
    np.testing.assert_array_equal(sweep.gaps, 0)

"""History-state (clock) Hamiltonians for circuits of self-inverse gates.

Register layout: logical qubits occupy 1..n and the unary clock occupies
n+1..n+T, so clock qubit ``t`` is register qubit ``n + t``.  The clock
encodes time t as ``1^t 0^(T-t)``.

Every term exists in two forms: a Pauli form (an ``OperatorSum``) used for
compilation and files, and a projector form built directly as a dense matrix
from kets and bras.  The two are compared by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, apply_circuit, validate_gate
from .pauli import OperatorSum, embed, identity, pauli, zero


class NotSelfInverseError(ValueError):
    pass


@dataclass(frozen=True)
class HistoryProblem:
    circuit: Circuit
    x: str

    def __post_init__(self):
        _check_input(self.x, self.circuit.n)

    @property
    def n(self) -> int:
        return self.circuit.n

    @property
    def T(self) -> int:
        return self.circuit.T

    @property
    def total(self) -> int:
        return self.n + self.T

    def clock(self, t: int) -> int:
        return self.n + t

    def header(self) -> list[str]:
        return [
            f"history Hamiltonian n={self.n} T={self.T} x={self.x}",
            f"layout logical=1..{self.n} clock={self.n + 1}..{self.total}",
        ]


def _check_input(x: str, n: int):
    if len(x) != n or set(x) - {"0", "1"}:
        raise ValueError(f"input {x!r} is not a bitstring of length {n}")


def unary_clock(t: int, T: int) -> str:
    return "1" * t + "0" * (T - t)


def is_legal_clock(bits: str) -> bool:
    return "01" not in bits


# -- Pauli forms -----------------------------------------------------------------

def build_h_in(x: str, n: int, T: int) -> OperatorSum:
    """Penalize a wrong input bit while the clock reads time zero."""
    _check_input(x, n)
    if T < 1:
        raise ValueError("T must be at least 1")
    N = n + T
    c1 = n + 1
    clock_zero = identity(N) + pauli(N, {c1: "Z"})
    h = zero(N)
    for i, bit in enumerate(x, start=1):
        sign = 1.0 if bit == "0" else -1.0
        h = h + 0.25 * (identity(N) - pauli(N, {i: "Z"}, sign)) @ clock_zero
    return h


def build_h_clock(T: int, n: int = 0) -> OperatorSum:
    """Count the illegal ``01`` patterns on adjacent clock qubits."""
    N = n + T
    if T < 2:
        return zero(N)
    h = identity(N, T - 1) + pauli(N, {n + 1: "Z"}) - pauli(N, {n + T: "Z"})
    for t in range(1, T):
        h = h - pauli(N, {n + t: "Z", n + t + 1: "Z"})
    return 0.25 * h


def build_h_clockinit(T: int, n: int = 0) -> OperatorSum:
    """|1><1| on the first clock qubit."""
    if T < 1:
        raise ValueError("T must be at least 1")
    N = n + T
    return 0.5 * (identity(N) - pauli(N, {n + 1: "Z"}))


def _check_gates(circuit: Circuit):
    for t, g in enumerate(circuit.gates, start=1):
        verdict = validate_gate(g)
        if not verdict:
            raise NotSelfInverseError(f"gate {t} ({g.describe()}): {', '.join(verdict.violations)}")


def build_h_prop_term(circuit: Circuit, t: int) -> OperatorSum:
    n, T = circuit.n, circuit.T
    N = n + T
    one = identity(N)

    def z(s):
        return pauli(N, {n + s: "Z"})

    def xc(s):
        return pauli(N, {n + s: "X"})

    U = embed(circuit.gates[t - 1].operator(n), N, range(1, n + 1))
    if T == 1:
        return one - U @ xc(1)
    if t == 1:
        return 0.5 * (one + z(2)) - U @ (0.5 * (xc(1) + xc(1) @ z(2)))
    if t == T:
        return 0.5 * (one - z(T - 1)) - U @ (0.5 * (xc(T) - z(T - 1) @ xc(T)))
    frame = (one - z(t - 1)) @ (one + z(t + 1))
    return 0.25 * frame - 0.25 * (U @ frame @ xc(t))


def build_h_prop(circuit: Circuit) -> OperatorSum:
    """Sum of the propagation checks for t = 1..T; gates must be self-inverse."""
    _check_gates(circuit)
    h = zero(circuit.n + circuit.T)
    for t in range(1, circuit.T + 1):
        h = h + build_h_prop_term(circuit, t)
    return h


def build_total(circuit: Circuit, x: str, include_clockinit: bool = False) -> OperatorSum:
    """H_in + H_clock + H_prop (+ H_clockinit when requested).

    Without the clock-initialization penalty the history state is annihilated.
    With it, every t >= 1 component of the history state is penalized.
    """
    n, T = circuit.n, circuit.T
    h = build_h_in(x, n, T) + build_h_clock(T, n) + build_h_prop(circuit)
    if include_clockinit:
        h = h + build_h_clockinit(T, n)
    return h


def build_initial(circuit: Circuit, x: str) -> OperatorSum:
    """Start of an adiabatic path: its unique ground state is ``|x>|0...0>``."""
    n, T = circuit.n, circuit.T
    return build_h_in(x, n, T) + build_h_clock(T, n) + build_h_clockinit(T, n)


def build_history_state(circuit: Circuit, x: str) -> np.ndarray:
    T = circuit.T
    partials = apply_circuit(circuit, x)
    psi = np.zeros(1 << (circuit.n + T), dtype=partials[-1].dtype)
    for t, phi in enumerate(partials):
        clock = np.zeros(1 << T)
        clock[int(unary_clock(t, T), 2)] = 1.0
        psi += np.kron(phi, clock)
    return psi / math.sqrt(T + 1)


# -- projector forms (dense) -------------------------------------------------------

_KET = {"0": np.array([1.0, 0.0]), "1": np.array([0.0, 1.0])}


def _clock_outer(T: int, qubits: list[int], ket: str, bra: str) -> np.ndarray:
    """|ket><bra| on the listed clock qubits, identity on the rest."""
    factors = [np.eye(2)] * T
    for q, a, b in zip(qubits, ket, bra):
        factors[q - 1] = np.outer(_KET[a], _KET[b])
    out = np.eye(1)
    for f in factors:
        out = np.kron(out, f)
    return out


def h_in_projector_form(x: str, n: int, T: int) -> np.ndarray:
    _check_input(x, n)
    clock0 = _clock_outer(T, [1], "0", "0")
    h = np.zeros((1 << (n + T),) * 2)
    for i, bit in enumerate(x, start=1):
        wrong = [np.eye(2)] * n
        wrong[i - 1] = np.eye(2) - np.outer(_KET[bit], _KET[bit])
        logical = np.eye(1)
        for f in wrong:
            logical = np.kron(logical, f)
        h += np.kron(logical, clock0)
    return h


def h_clock_projector_form(T: int) -> np.ndarray:
    h = np.zeros((1 << T,) * 2)
    for t in range(1, T):
        h += _clock_outer(T, [t, t + 1], "01", "01")
    return h


def _prop_window(t: int, T: int):
    """Clock qubits read by the t-th check and the local patterns of times t-1 and t."""
    if T == 1:
        return [1], "0", "1"
    if t == 1:
        return [1, 2], "00", "10"
    if t == T:
        return [T - 1, T], "10", "11"
    return [t - 1, t, t + 1], "100", "110"


def h_prop_term_projector_form(circuit: Circuit, t: int) -> np.ndarray:
    n, T = circuit.n, circuit.T
    qubits, before, after = _prop_window(t, T)
    U = circuit.gates[t - 1].embedded(n)
    one = np.eye(1 << n)
    return (
        np.kron(one, _clock_outer(T, qubits, before, before))
        - np.kron(U, _clock_outer(T, qubits, after, before))
        - np.kron(U.conj().T, _clock_outer(T, qubits, before, after))
        + np.kron(one, _clock_outer(T, qubits, after, after))
    )


def h_prop_projector_form(circuit: Circuit) -> np.ndarray:
    return sum(h_prop_term_projector_form(circuit, t) for t in range(1, circuit.T + 1))

"""Real, self-inverse gates and state-vector simulation of short circuits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .pauli import OperatorSum, Verdict, embed, pauli_decompose

SELF_INVERSE_TOL = 1e-12

_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
_P0 = np.diag([1.0, 0.0])
_P1 = np.diag([0.0, 1.0])

KINDS = ("X", "CNOT", "XZ", "R", "CUSTOM")


class CircuitParseError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Gate:
    """A gate matrix acting on ``qubits`` (1-based, first qubit most significant).

    For two-qubit kinds the qubit pair is ordered (control, target).
    """

    kind: str
    matrix: np.ndarray
    qubits: tuple[int, ...]
    angle: float | None = None
    source: str | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        k = len(self.qubits)
        if k not in (1, 2) or m.shape != (1 << k, 1 << k):
            raise ValueError(f"{self.kind}: matrix shape {m.shape} does not fit {k} qubit(s)")
        if len(set(self.qubits)) != k:
            raise ValueError(f"{self.kind}: repeated qubit in {self.qubits}")

    def operator(self, n: int) -> OperatorSum:
        """Pauli expansion of the gate placed on an ``n``-qubit register."""
        return embed(pauli_decompose(self.matrix), n, self.qubits)

    def embedded(self, n: int) -> np.ndarray:
        return apply_gate(np.eye(1 << n, dtype=self.matrix.dtype), self, n)

    def describe(self) -> str:
        qs = " ".join(map(str, self.qubits))
        if self.kind in ("R", "XZ"):
            return f"{self.kind} {self.angle!r} {qs}"
        if self.kind == "CUSTOM":
            return f"CUSTOM {self.source} {qs}"
        return f"{self.kind} {qs}"


def x_gate(q: int) -> Gate:
    return Gate("X", _X.copy(), (q,))


def cnot(control: int, target: int) -> Gate:
    if control == target:
        raise ValueError("CNOT needs distinct control and target")
    return Gate("CNOT", np.kron(_P0, np.eye(2)) + np.kron(_P1, _X), (control, target))


def xz_mix_gate(psi: float, q: int) -> Gate:
    """cos(psi) X + sin(psi) Z.

    Together with CNOT and X this is universal when psi is not a multiple of
    pi/4; that caveat is not checked here.
    """
    return Gate("XZ", math.cos(psi) * _X + math.sin(psi) * _Z, (q,), angle=float(psi))


def r_gate(phi: float, control: int, target: int) -> Gate:
    """Controlled (sin(phi) X + cos(phi) Z) on ``target``.

    The rotated operator acts on the target qubit; placing it on the control
    would break self-inverseness.  ``r_gate(pi/2)`` is CNOT and ``r_gate(0)``
    is controlled-Z.
    """
    if control == target:
        raise ValueError("R gate needs distinct control and target qubits")
    u = math.sin(phi) * _X + math.cos(phi) * _Z
    return Gate("R", np.kron(_P0, np.eye(2)) + np.kron(_P1, u), (control, target), angle=float(phi))


def custom_gate(matrix, qubits: Sequence[int], source: str | None = None) -> Gate:
    return Gate("CUSTOM", np.asarray(matrix), tuple(qubits), source=source)


def validate_gate(gate, tol: float = SELF_INVERSE_TOL) -> Verdict:
    """A gate passes when it is real-entried and squares to the identity."""
    m = np.asarray(gate.matrix if isinstance(gate, Gate) else gate)
    problems = []
    if np.iscomplexobj(m) and np.max(np.abs(m.imag), initial=0.0) > tol:
        problems.append("imaginary entries")
    sq = m @ m
    if np.max(np.abs(sq - np.eye(m.shape[0]))) > tol:
        problems.append("not self-inverse")
    return Verdict(not problems, tuple(problems))


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n < 1:
            raise ValueError("a circuit needs at least one qubit")
        if not self.gates:
            raise ValueError("a circuit needs at least one gate")
        for g in self.gates:
            if not all(1 <= q <= self.n for q in g.qubits):
                raise ValueError(f"gate {g.describe()} acts outside qubits 1..{self.n}")

    @property
    def T(self) -> int:
        return len(self.gates)


def basis_state(bits: str) -> np.ndarray:
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bits!r}")
    psi = np.zeros(1 << len(bits))
    psi[int(bits, 2)] = 1.0
    return psi


def apply_gate(state: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply ``gate`` to an ``n``-qubit state (or to each column of a matrix)."""
    k = len(gate.qubits)
    batch = state.shape[1:]
    psi = state.reshape((2,) * n + batch)
    axes = [q - 1 for q in gate.qubits]
    u = gate.matrix.reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(state.shape)


def apply_circuit(circuit: Circuit, x: str) -> list[np.ndarray]:
    """Partial states ``U_t ... U_1 |x>`` for t = 0..T."""
    if len(x) != circuit.n:
        raise ValueError(f"input has {len(x)} bits, circuit has {circuit.n} qubits")
    states = [basis_state(x)]
    for g in circuit.gates:
        states.append(apply_gate(states[-1], g, circuit.n))
    return states


def random_circuit(n: int, T: int, rng: np.random.Generator) -> Circuit:
    """Gates drawn uniformly from {CNOT, X, XZ, R}, angles uniform in (0, pi).

    XZ angles that land on a multiple of pi/4 are redrawn.  With one qubit
    only the single-qubit kinds are available.
    """
    kinds = ["CNOT", "X", "XZ", "R"] if n >= 2 else ["X", "XZ"]
    gates = []
    for _ in range(T):
        kind = kinds[rng.integers(len(kinds))]
        if kind in ("CNOT", "R"):
            i, j = (int(q) + 1 for q in rng.choice(n, size=2, replace=False))
            if kind == "CNOT":
                gates.append(cnot(i, j))
            else:
                gates.append(r_gate(float(rng.uniform(0.0, math.pi)), i, j))
        else:
            q = int(rng.integers(n)) + 1
            if kind == "X":
                gates.append(x_gate(q))
            else:
                psi = float(rng.uniform(0.0, math.pi))
                while abs(psi / (math.pi / 4) - round(psi / (math.pi / 4))) < 1e-9:
                    psi = float(rng.uniform(0.0, math.pi))
                gates.append(xz_mix_gate(psi, q))
    return Circuit(n, tuple(gates))


# -- file format ---------------------------------------------------------------

def _ints(parts, lineno, count):
    if len(parts) not in count:
        raise CircuitParseError(f"line {lineno}: wrong number of qubit indices")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise CircuitParseError(f"line {lineno}: qubit indices must be integers") from None


def parse_circuit(text: str, base_dir: str | Path = ".") -> Circuit:
    """Parse ``qubits <n>`` followed by one gate per line.

    Gate lines: ``R <phi> <i> <j>``, ``CNOT <i> <j>``, ``X <i>``,
    ``XZ <psi> <i>``, ``CUSTOM <file> <i> [<j>]``.  CUSTOM matrices are
    whitespace-separated real rows, resolved relative to ``base_dir``.
    """
    n = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        head = head.upper()
        try:
            if head == "QUBITS":
                if n is not None or len(rest) != 1:
                    raise CircuitParseError(f"line {lineno}: bad 'qubits' header")
                n = int(rest[0])
                continue
            if n is None:
                raise CircuitParseError(f"line {lineno}: gate before 'qubits <n>' header")
            if head == "X":
                (q,) = _ints(rest, lineno, (1,))
                gates.append(x_gate(q))
            elif head == "CNOT":
                i, j = _ints(rest, lineno, (2,))
                gates.append(cnot(i, j))
            elif head == "R":
                if len(rest) != 3:
                    raise CircuitParseError(f"line {lineno}: R needs <phi> <i> <j>")
                i, j = _ints(rest[1:], lineno, (2,))
                gates.append(r_gate(float(rest[0]), i, j))
            elif head == "XZ":
                if len(rest) != 2:
                    raise CircuitParseError(f"line {lineno}: XZ needs <psi> <i>")
                (q,) = _ints(rest[1:], lineno, (1,))
                gates.append(xz_mix_gate(float(rest[0]), q))
            elif head == "CUSTOM":
                if len(rest) not in (2, 3):
                    raise CircuitParseError(f"line {lineno}: CUSTOM needs <file> <i> [<j>]")
                qs = _ints(rest[1:], lineno, (1, 2))
                path = Path(base_dir) / rest[0]
                matrix = np.atleast_2d(np.loadtxt(path, comments="#"))
                gates.append(custom_gate(matrix, qs, source=rest[0]))
            else:
                raise CircuitParseError(f"line {lineno}: unknown gate {head!r}")
        except CircuitParseError:
            raise
        except (ValueError, OSError) as exc:
            raise CircuitParseError(f"line {lineno}: {exc}") from None
    if n is None:
        raise CircuitParseError("missing 'qubits <n>' header")
    try:
        return Circuit(n, tuple(gates))
    except ValueError as exc:
        raise CircuitParseError(str(exc)) from None


def read_circuit(path) -> Circuit:
    path = Path(path)
    with open(path) as fh:
        return parse_circuit(fh.read(), base_dir=path.parent)


def format_circuit(circuit: Circuit) -> str:
    return "\n".join([f"qubits {circuit.n}"] + [g.describe() for g in circuit.gates]) + "\n"

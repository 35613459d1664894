"""Perturbative gadgets that realize missing 2-local couplings with an ancilla.

Three gadgets are provided:

* ``ZX_FROM_ZZXX``: ``alpha Z_i X_j`` from Z, X, ZZ and XX couplings.  The
  target appears at third order in the self-energy and needs
  ``delta >= Ebar * eps**-3``.
* ``ZZ_FROM_ZX``: ``beta Z_i Z_j`` from ZX-model terms (second order,
  ``delta >= Ebar / eps``).
* ``XX_FROM_ZX``: ``gamma X_i X_j`` from ZX-model terms with the ancilla
  penalized in the x basis.

Each gadget instance is the pair ``(Hp, V)`` on an n-qubit register.  The
low-energy spectrum of ``Hp + V`` approximates ``Y + target`` where ``Y`` is
any pre-existing native coupling between qubits i and j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .pauli import (
    REAL_SUBSET,
    ZX,
    ZZXX,
    InteractionSet,
    OperatorSum,
    Partition,
    canonicalize,
    embed,
    identity,
    pauli,
    projector,
    validate_interaction_set,
    zero,
)
from .spectral import eigensolve, ground_overlap


class Kind(str, Enum):
    ZX_FROM_ZZXX = "ZX_FROM_ZZXX"
    ZZ_FROM_ZX = "ZZ_FROM_ZX"
    XX_FROM_ZX = "XX_FROM_ZX"


EXPONENT = {Kind.ZX_FROM_ZZXX: 3, Kind.ZZ_FROM_ZX: 1, Kind.XX_FROM_ZX: 1}
NATIVE = {Kind.ZX_FROM_ZZXX: ZZXX, Kind.ZZ_FROM_ZX: ZX, Kind.XX_FROM_ZX: ZX}
LOW_STATE = {Kind.ZX_FROM_ZZXX: "0", Kind.ZZ_FROM_ZX: "0", Kind.XX_FROM_ZX: "+"}
MODELS = {"zzxx": ZZXX, "zx": ZX}

# relative slack when comparing delta with Ebar * eps**-r computed in floating point
_BOUND_RTOL = 1e-12


class GadgetBoundError(ValueError):
    """Penalty gap too small for the requested error."""


class CompileError(ValueError):
    def __init__(self, message: str, violations: Sequence = ()):
        super().__init__(message)
        self.violations = tuple(violations)


@dataclass(frozen=True)
class GadgetParams:
    A: float
    B: float
    C: float | None
    D: float | None
    delta: float
    ebar: float
    eps: float
    z: float = 0.0


@dataclass(frozen=True)
class GadgetInstance:
    kind: Kind
    i: int
    j: int
    k: int
    n: int
    params: GadgetParams
    coefficient: float
    Hp: OperatorSum
    V: OperatorSum
    Y: OperatorSum
    parts: dict = field(compare=False)
    declared_shift: float = 0.0

    @property
    def hamiltonian(self) -> OperatorSum:
        return self.Hp + self.V

    @property
    def emitted(self) -> OperatorSum:
        """``Hp + V`` without the constant ``declared_shift``."""
        return self.hamiltonian - self.declared_shift

    @property
    def target(self) -> OperatorSum:
        letters = {
            Kind.ZX_FROM_ZZXX: ("Z", "X"),
            Kind.ZZ_FROM_ZX: ("Z", "Z"),
            Kind.XX_FROM_ZX: ("X", "X"),
        }[self.kind]
        return pauli(self.n, {self.i: letters[0], self.j: letters[1]}, self.coefficient)

    @property
    def effective_target(self) -> OperatorSum:
        return self.Y + self.target

    @property
    def low(self) -> Partition:
        return Partition(self.k, LOW_STATE[self.kind])


def _resolve_delta(delta, eps, ebar, r):
    if not ebar > 0:
        raise ValueError("energy scale Ebar must be positive")
    if delta is None:
        if eps is None:
            raise ValueError("give the penalty gap delta or the target error eps")
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        return ebar * eps ** (-r), eps
    if not delta > 0:
        raise ValueError("penalty gap delta must be positive")
    if eps is None:
        eps = (ebar / delta) ** (1.0 / r)
        if not eps < 1:
            raise GadgetBoundError(f"delta={delta:g} must exceed Ebar={ebar:g}")
        return float(delta), eps
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    bound = ebar * eps ** (-r)
    if delta < bound * (1 - _BOUND_RTOL):
        raise GadgetBoundError(f"delta={delta:g} is below the bound Ebar*eps^-{r} = {bound:g}")
    return float(delta), eps


def _check_sites(i, j, k, n, Y, native: InteractionSet):
    if len({i, j, k}) != 3:
        raise ValueError(f"qubits i={i}, j={j}, k={k} must be distinct")
    if n is None:
        n = max(i, j, k) if Y is None else Y.n
    if not all(1 <= q <= n for q in (i, j, k)):
        raise ValueError(f"qubits must lie in 1..{n}")
    if Y is None:
        Y = zero(n)
    if Y.n != n:
        raise ValueError(f"Y acts on {Y.n} qubits, register has {n}")
    for t in Y.terms:
        if not set(t.support) <= {i, j}:
            raise ValueError(f"Y term {t.word} acts outside qubits {i}, {j}")
    verdict = validate_interaction_set(Y, native)
    if not verdict:
        words = ", ".join(t.word for t in verdict.violations)
        raise ValueError(f"Y contains terms outside the {native.name} model: {words}")
    return n, Y


def build_zx_from_zzxx(alpha, i, j, k, delta=None, ebar=1.0, Y=None, *, eps=None, n=None, z=0.0):
    """Gadget whose low-energy sector reproduces ``Y + alpha Z_i X_j``.

    The parameter block is ``A = alpha``, ``B = (delta/Ebar)^(2/3) Ebar``,
    ``C = (alpha/2) (delta/Ebar)^(2/3)``, ``D = 2 delta^(1/3) Ebar^(2/3)``.
    With these, ``2 B^2 C / delta^2 = alpha`` and the ``-A Z_i`` term in V1
    cancels the third-order local field, while ``D`` cancels the
    second-order ``(X_j + 1)`` shift.
    """
    kind = Kind.ZX_FROM_ZZXX
    n, Y = _check_sites(i, j, k, n, Y, NATIVE[kind])
    delta, eps = _resolve_delta(delta, eps, ebar, EXPONENT[kind])
    ratio = (delta / ebar) ** (2.0 / 3.0)
    A = float(alpha)
    B = ratio * ebar
    C = 0.5 * alpha * ratio
    D = 2.0 * delta ** (1.0 / 3.0) * ebar ** (2.0 / 3.0)

    xj1 = pauli(n, {j: "X"}) + identity(n)
    zi = pauli(n, {i: "Z"})
    Hp = delta * projector(n, k, "1")
    V1 = Y + D * xj1 - A * (zi @ projector(n, k, "0"))
    V2 = B * (xj1 @ pauli(n, {k: "X"}))
    V3 = C * (zi @ projector(n, k, "1"))
    return GadgetInstance(
        kind, i, j, k, n,
        GadgetParams(A, B, C, D, delta, ebar, eps, z),
        float(alpha), Hp, V1 + V2 + V3, Y,
        parts={"V1": V1, "V2": V2, "V3": V3},
        declared_shift=D,
    )


def _zx_model_gadget(kind, coefficient, i, j, k, delta, ebar, Y, eps, n, z):
    if coefficient == 0:
        raise ValueError("target coefficient must be nonzero")
    n, Y = _check_sites(i, j, k, n, Y, NATIVE[kind])
    delta, eps = _resolve_delta(delta, eps, ebar, EXPONENT[kind])
    A = abs(float(coefficient))
    B = math.sqrt(A * delta / 2.0)
    # a negative target flips the relative sign of the mediating pair,
    # since (P_i + P_j)^2 = 2(1 + P_i P_j)
    sign = 1.0 if coefficient > 0 else -1.0
    if kind is Kind.ZZ_FROM_ZX:
        local, mediator, low, high = "Z", "X", "0", "1"
    else:
        local, mediator, low, high = "X", "Z", "+", "-"
    pair = pauli(n, {i: local}) - sign * pauli(n, {j: local})
    Hp = delta * projector(n, k, high)
    V1 = Y + A * projector(n, k, low)
    V2 = B * (pair @ pauli(n, {k: mediator}))
    return GadgetInstance(
        kind, i, j, k, n,
        GadgetParams(A, B, None, None, delta, ebar, eps, z),
        float(coefficient), Hp, V1 + V2, Y,
        parts={"V1": V1, "V2": V2},
        declared_shift=A / 2.0,
    )


def build_zz_from_zx(beta, i, j, k, delta=None, ebar=1.0, Y=None, *, eps=None, n=None, z=0.0):
    """Gadget for ``beta Z_i Z_j`` with ``A = |beta|``, ``B = sqrt(|beta| delta / 2)``."""
    return _zx_model_gadget(Kind.ZZ_FROM_ZX, beta, i, j, k, delta, ebar, Y, eps, n, z)


def build_xx_from_zx(gamma, i, j, k, delta=None, ebar=1.0, Y=None, *, eps=None, n=None, z=0.0):
    """Gadget for ``gamma X_i X_j``; the ancilla's low state is ``|+>``."""
    return _zx_model_gadget(Kind.XX_FROM_ZX, gamma, i, j, k, delta, ebar, Y, eps, n, z)


BUILDERS = {
    Kind.ZX_FROM_ZZXX: build_zx_from_zzxx,
    Kind.ZZ_FROM_ZX: build_zz_from_zx,
    Kind.XX_FROM_ZX: build_xx_from_zx,
}


def build_gadget(kind, coefficient, i, j, k, **kwargs) -> GadgetInstance:
    return BUILDERS[Kind(kind)](coefficient, i, j, k, **kwargs)


# -- dressed couplings ---------------------------------------------------------------

COUPLING_KEYS = ("h_i", "h_j", "Delta_i", "Delta_j", "J_ij", "K_ij")


def coupling_table(Y: OperatorSum, i: int, j: int, model: InteractionSet) -> dict[str, float]:
    """Read the native two-qubit couplings of ``Y`` into named coefficients.

    ``J_ij``/``K_ij`` are the ZZ/XX couplings for the ZZXX model and the
    ``Z_i X_j``/``X_i Z_j`` couplings for the ZX model.
    """
    n = Y.n
    pairs = {"ZZXX": (("Z", "Z"), ("X", "X")), "ZX": (("Z", "X"), ("X", "Z"))}[model.name]
    words = {
        "h_i": {i: "Z"}, "h_j": {j: "Z"}, "Delta_i": {i: "X"}, "Delta_j": {j: "X"},
        "J_ij": dict(zip((i, j), pairs[0])), "K_ij": dict(zip((i, j), pairs[1])),
    }
    table = {}
    for key, sites in words.items():
        word = pauli(n, sites).terms[0].word
        table[key] = float(np.real(Y.coefficient(word)))
    return table


def table_operator(table: dict[str, float], n: int, i: int, j: int, model: InteractionSet) -> OperatorSum:
    pairs = {"ZZXX": (("Z", "Z"), ("X", "X")), "ZX": (("Z", "X"), ("X", "Z"))}[model.name]
    return (
        pauli(n, {i: "Z"}, table["h_i"]) + pauli(n, {j: "Z"}, table["h_j"])
        + pauli(n, {i: "X"}, table["Delta_i"]) + pauli(n, {j: "X"}, table["Delta_j"])
        + pauli(n, dict(zip((i, j), pairs[0])), table["J_ij"])
        + pauli(n, dict(zip((i, j), pairs[1])), table["K_ij"])
    )


@dataclass(frozen=True)
class DressedCouplings:
    before: dict
    after: dict
    extras: OperatorSum
    factor: float

    def operator(self, n: int, i: int, j: int, model: InteractionSet) -> OperatorSum:
        """The dressed two-qubit interaction: modified couplings plus extras."""
        return table_operator(self.after, n, i, j, model) + self.extras


def dressed_couplings(g: GadgetInstance, Y: OperatorSum | None = None, z: float | None = None) -> DressedCouplings:
    """Closed-form coupling renormalization from virtual ancilla excitations.

    ``factor = 2 B^2 / (z - delta)^2``.  For ``ZX_FROM_ZZXX`` the local
    fields and the XX coupling are rescaled and an identity shift and a
    ``Z_i X_j`` correction proportional to ``h_i`` appear.  For the ZX-model
    gadgets only the local Z (resp. X) fields of the pair move.
    """
    Y = g.Y if Y is None else Y
    z = g.params.z if z is None else z
    model = NATIVE[g.kind]
    t = coupling_table(Y, g.i, g.j, model)
    f = 2.0 * g.params.B ** 2 / (z - g.params.delta) ** 2
    after = dict(t)
    extras = zero(g.n)
    if g.kind is Kind.ZX_FROM_ZZXX:
        after["h_i"] = t["h_i"] * (1 + f)
        after["Delta_i"] = t["Delta_i"] * (1 + f) + f * t["K_ij"]
        after["Delta_j"] = t["Delta_j"] * (1 + f)
        after["K_ij"] = t["K_ij"] * (1 + f) + f * t["Delta_i"]
        extras = identity(g.n, f * t["Delta_j"]) + pauli(g.n, {g.i: "Z", g.j: "X"}, f * t["h_i"])
    else:
        s = 1.0 if g.coefficient > 0 else -1.0
        a, b = ("h_i", "h_j") if g.kind is Kind.ZZ_FROM_ZX else ("Delta_i", "Delta_j")
        after[a] = t[a] + f * (t[a] - s * t[b])
        after[b] = t[b] + f * (t[b] - s * t[a])
    return DressedCouplings(t, after, extras, f)


# -- whole-Hamiltonian compilation -------------------------------------------------------

_REPLACE = {
    "zzxx": {"ZX": Kind.ZX_FROM_ZZXX, "XZ": Kind.ZX_FROM_ZZXX},
    "zx": {"ZZ": Kind.ZZ_FROM_ZX, "XX": Kind.XX_FROM_ZX},
}


@dataclass(frozen=True)
class CompiledHamiltonian:
    """Model-valid Hamiltonian on the system qubits followed by one ancilla per gadget.

    ``H`` omits each gadget's constant ``declared_shift``, so the target's
    energies are recovered as ``lambda(H) + total_shift``.
    """

    H: OperatorSum
    model: str
    eps: float
    ebar: float
    n_system: int
    gadgets: tuple[GadgetInstance, ...]
    ancilla_map: dict

    @property
    def total_shift(self) -> float:
        return sum(g.declared_shift for g in self.gadgets)

    def target_energy(self, energy: float) -> float:
        return energy + self.total_shift


def compile_hamiltonian(target: OperatorSum, model: str, eps: float, ebar: float = 1.0) -> CompiledHamiltonian:
    """Replace every coupling outside ``model`` by a gadget with a fresh ancilla.

    Native terms pass through unchanged; ancillas are numbered after the
    system qubits in canonical term order.
    """
    model = model.lower()
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {sorted(MODELS)}")
    verdict = validate_interaction_set(target, REAL_SUBSET)
    if not verdict:
        words = ", ".join(f"{t.coeff!r} {t.word}" for t in verdict.violations)
        raise CompileError(f"target has terms outside the real 2-local set: {words}", verdict.violations)
    native_set = MODELS[model]
    replace = _REPLACE[model]
    n = target.n
    native = []
    pending = []
    for t in canonicalize(target).terms:
        if native_set.allows(t):
            native.append(t)
        else:
            pending.append(t)
    N = n + len(pending)
    H = embed(OperatorSum(tuple(native), n), N, range(1, n + 1)) if native else zero(N)
    gadgets = []
    ancilla_map = {}
    for idx, t in enumerate(pending):
        kind = replace[t.pattern]
        a, b = t.support
        # for an X_a Z_b coupling the Z-carrying qubit plays the role of i
        i, j = (b, a) if t.pattern == "XZ" else (a, b)
        k = n + 1 + idx
        g = build_gadget(kind, float(t.coeff), i, j, k, eps=eps, ebar=ebar, n=N)
        gadgets.append(g)
        ancilla_map[t.word] = k
        H = H + g.emitted
    return CompiledHamiltonian(canonicalize(H), model, eps, ebar, n, tuple(gadgets), ancilla_map)


# -- error sweeps -------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    delta: float
    lambda_target: float
    lambda_gadget: float
    abs_error: float
    overlap: float


def gadget_accuracy(g: GadgetInstance) -> SweepRow:
    """Lowest-eigenvalue error and ground-state fidelity of one gadget instance.

    The fidelity is the weight of the gadget's ground state inside
    ``ground(Y + target) x |low>_k``, which is the ground space of
    ``Y + target + Hp``.
    """
    rep = eigensolve(g.hamiltonian, k=2)
    ref = g.effective_target + g.Hp
    lam_target = eigensolve(g.effective_target, k=1).ground_energy
    overlap = ground_overlap(ref, rep.ground)
    return SweepRow(
        g.params.eps, g.params.delta, lam_target, rep.ground_energy,
        abs(rep.ground_energy - lam_target), overlap,
    )


def epsilon_sweep(kind, coefficient: float, eps_values: Sequence[float], ebar: float = 1.0) -> list[SweepRow]:
    """Gadget on qubits (1, 2) with ancilla 3 and no background coupling, per eps."""
    rows = []
    for eps in eps_values:
        g = build_gadget(Kind(kind), coefficient, 1, 2, 3, eps=eps, ebar=ebar)
        rows.append(gadget_accuracy(g))
    return rows


def is_non_increasing(values: Sequence[float], slack: float = 1e-12) -> bool:
    """Monotone up to ``slack`` of floating-point noise."""
    return all(b <= a + slack for a, b in zip(values, values[1:]))

"""Real-coefficient Pauli-string algebra.

Qubits are numbered from 1.  The leftmost letter of a word acts on qubit 1,
which is also the leftmost (most significant) factor of the Kronecker
product, so basis index ``b`` stores qubit ``q`` in bit ``n - q``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

LETTERS = "IXYZ"
DEFAULT_DENSE_LIMIT = 14

# single-letter products: (a, b) -> (phase, a*b)
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}

PAULI_MATRICES = {
    "I": np.eye(2),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]]),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]]),
}


class DimensionError(ValueError):
    """Raised when an operator is too large to realize densely."""


class HamiltonianParseError(ValueError):
    pass


def dense_limit() -> int:
    """Largest qubit count realized as a dense matrix (env ``GADGETC_DENSE_LIMIT``)."""
    value = os.environ.get("GADGETC_DENSE_LIMIT")
    return int(value) if value else DEFAULT_DENSE_LIMIT


def _clean(coeff):
    c = complex(coeff)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError(f"non-finite coefficient {coeff!r}")
    return c.real if c.imag == 0 else c


@dataclass(frozen=True)
class PauliString:
    """``coeff`` times a tensor product of single-qubit Pauli letters."""

    coeff: Union[float, complex]
    word: str

    def __post_init__(self):
        if not self.word:
            raise ValueError("a Pauli word needs at least one letter")
        bad = set(self.word) - set(LETTERS)
        if bad:
            raise ValueError(f"invalid Pauli letters {sorted(bad)} in {self.word!r}")
        object.__setattr__(self, "coeff", _clean(self.coeff))

    @property
    def n(self) -> int:
        return len(self.word)

    @property
    def is_real(self) -> bool:
        """True when the realized matrix has only real entries."""
        return self.word.count("Y") % 2 == 0 and not isinstance(self.coeff, complex)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, a in enumerate(self.word, start=1) if a != "I")

    @property
    def pattern(self) -> str:
        """Non-identity letters in qubit order, e.g. ``"ZX"`` for ``ZIX``."""
        return self.word.replace("I", "")

    @property
    def is_identity(self) -> bool:
        return not self.pattern

    def __mul__(self, other):
        if isinstance(other, PauliString):
            if other.n != self.n:
                raise ValueError("qubit counts differ")
            phase = 1
            letters = []
            for a, b in zip(self.word, other.word):
                p, c = _PRODUCT[a, b]
                phase *= p
                letters.append(c)
            return PauliString(self.coeff * other.coeff * phase, "".join(letters))
        return PauliString(self.coeff * other, self.word)

    __rmul__ = __mul__

    def masks(self) -> tuple[int, int, int]:
        """(flip mask, sign mask, number of Y letters) in basis-index bits."""
        n = self.n
        x = z = 0
        for q, a in enumerate(self.word):
            bit = 1 << (n - 1 - q)
            if a in "XY":
                x |= bit
            if a in "ZY":
                z |= bit
        return x, z, self.word.count("Y")

    def to_matrix(self) -> np.ndarray:
        return realize_matrix(OperatorSum((self,), self.n))

    def __str__(self):
        return f"{self.coeff!r} {self.word}"


@dataclass(frozen=True)
class OperatorSum:
    """A sum of Pauli strings on ``n`` qubits.

    Arithmetic (``+``, ``-``, scalar ``*``, operator product ``@``) always
    returns canonical sums.
    """

    terms: tuple[PauliString, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.n < 1:
            raise ValueError("an operator needs n >= 1 qubits")
        for t in self.terms:
            if t.n != self.n:
                raise ValueError(f"term {t.word!r} does not act on {self.n} qubits")

    @classmethod
    def from_list(cls, items: Iterable[tuple[float, str]], n: int | None = None) -> "OperatorSum":
        terms = tuple(PauliString(c, w) for c, w in items)
        if n is None:
            if not terms:
                raise ValueError("cannot infer n from an empty term list")
            n = terms[0].n
        return cls(terms, n)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def is_real(self) -> bool:
        return all(t.is_real for t in self.terms)

    @property
    def is_hermitian(self) -> bool:
        return all(not isinstance(t.coeff, complex) for t in self.terms)

    def coefficient(self, word: str) -> complex | float:
        return sum((t.coeff for t in self.terms if t.word == word), 0.0)

    def as_dict(self) -> dict[str, float | complex]:
        return {t.word: t.coeff for t in canonicalize(self).terms}

    def _check(self, other: "OperatorSum"):
        if not isinstance(other, OperatorSum):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"qubit counts differ: {self.n} vs {other.n}")
        return None

    def __add__(self, other):
        if isinstance(other, (int, float)):
            return self + identity(self.n, other)
        if self._check(other) is NotImplemented:
            return NotImplemented
        return canonicalize(OperatorSum(self.terms + other.terms, self.n))

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorSum):
            raise TypeError("use @ for operator products")
        return canonicalize(OperatorSum(tuple(t * scalar for t in self.terms), self.n))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return canonicalize(OperatorSum(tuple(a * b for a in self.terms for b in other.terms), self.n))

    def __str__(self):
        return format_hamiltonian(self) if self.is_hermitian else repr(self)


# -- constructors ------------------------------------------------------------

def _word(n: int, sites: Union[str, Mapping[int, str]]) -> str:
    if isinstance(sites, str):
        if len(sites) != n:
            raise ValueError(f"word {sites!r} does not have length {n}")
        return sites
    letters = ["I"] * n
    for q, a in sites.items():
        if not 1 <= q <= n:
            raise ValueError(f"qubit {q} outside 1..{n}")
        letters[q - 1] = a
    return "".join(letters)


def pauli(n: int, sites: Union[str, Mapping[int, str]], coeff: float = 1.0) -> OperatorSum:
    """Single-term operator, e.g. ``pauli(3, {1: "Z", 3: "X"}, 0.5)``."""
    return OperatorSum((PauliString(coeff, _word(n, sites)),), n)


def identity(n: int, coeff: float = 1.0) -> OperatorSum:
    return canonicalize(OperatorSum((PauliString(coeff, "I" * n),), n))


def zero(n: int) -> OperatorSum:
    return OperatorSum((), n)


_PROJECTOR_SIGN = {"0": ("Z", 1.0), "1": ("Z", -1.0), "+": ("X", 1.0), "-": ("X", -1.0)}


def projector(n: int, qubit: int, state: str) -> OperatorSum:
    """Rank-1 single-qubit projector |s><s| for s in {0, 1, +, -}."""
    letter, sign = _PROJECTOR_SIGN[str(state)]
    return 0.5 * identity(n) + pauli(n, {qubit: letter}, 0.5 * sign)


def embed(op: OperatorSum, n: int, qubits: Sequence[int]) -> OperatorSum:
    """Place ``op`` (on ``len(qubits)`` qubits) onto qubits ``qubits`` of an ``n``-qubit register."""
    qubits = list(qubits)
    if len(qubits) != op.n:
        raise ValueError("need one target qubit per operator qubit")
    if len(set(qubits)) != len(qubits) or not all(1 <= q <= n for q in qubits):
        raise ValueError(f"bad target qubits {qubits} for n={n}")
    terms = []
    for t in op.terms:
        terms.append(PauliString(t.coeff, _word(n, dict(zip(qubits, t.word)))))
    return OperatorSum(tuple(terms), n)


def tensor(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """Kronecker product with ``a`` on the leading qubits."""
    terms = tuple(PauliString(s.coeff * t.coeff, s.word + t.word) for s in a.terms for t in b.terms)
    return canonicalize(OperatorSum(terms, a.n + b.n))


# -- canonical form ----------------------------------------------------------

def canonicalize(op: OperatorSum, atol: float = 1e-14) -> OperatorSum:
    """Merge equal words, drop coefficients with magnitude <= ``atol``, sort by word."""
    merged: dict[str, complex] = {}
    for t in op.terms:
        merged[t.word] = merged.get(t.word, 0.0) + t.coeff
    terms = []
    for w in sorted(merged):
        c = complex(merged[w])
        if abs(c.imag) <= atol:
            c = c.real
        if abs(c) > atol:
            terms.append(PauliString(c, w))
    return OperatorSum(tuple(terms), op.n)


# -- interaction sets --------------------------------------------------------

@dataclass(frozen=True)
class InteractionSet:
    name: str
    patterns: frozenset

    def allows(self, term: PauliString) -> bool:
        return term.is_identity or term.pattern in self.patterns


ZZXX = InteractionSet("ZZXX", frozenset({"Z", "X", "ZZ", "XX"}))
ZX = InteractionSet("ZX", frozenset({"Z", "X", "ZX", "XZ"}))
REAL_SUBSET = InteractionSet("REAL_SUBSET", frozenset({"Z", "X", "ZX", "XZ", "ZZ", "XX"}))

INTERACTION_SETS = {s.name: s for s in (ZZXX, ZX, REAL_SUBSET)}


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violations: tuple = ()

    def __bool__(self):
        return self.ok


def validate_interaction_set(op: OperatorSum, allowed: InteractionSet) -> Verdict:
    """Check that every non-identity term has an allowed letter pattern.

    Identity terms (pure energy shifts) always pass.  Complex coefficients are
    reported as violations as well.
    """
    bad = tuple(
        t for t in canonicalize(op).terms
        if not allowed.allows(t) or isinstance(t.coeff, complex)
    )
    return Verdict(not bad, bad)


# -- realization ---------------------------------------------------------------

def _term_arrays(t: PauliString, idx: np.ndarray):
    x, z, ny = t.masks()
    sign = 1 - 2 * (np.bitwise_count(idx & z) & 1).astype(np.int8)
    phase = (1j) ** ny
    return x, t.coeff * phase * sign


def _dtype(op: OperatorSum):
    return np.float64 if op.is_real else np.complex128


def realize_matrix(op: OperatorSum, limit: int | None = None) -> np.ndarray:
    """Dense ``2**n`` matrix of the operator; real dtype when no entry is complex."""
    limit = dense_limit() if limit is None else limit
    if op.n > limit:
        raise DimensionError(f"{op.n} qubits exceeds the dense limit of {limit}")
    dim = 1 << op.n
    idx = np.arange(dim, dtype=np.int64)
    out = np.zeros((dim, dim), dtype=_dtype(op))
    for t in op.terms:
        x, vals = _term_arrays(t, idx)
        out[idx ^ x, idx] += vals.real if out.dtype == np.float64 else vals
    return out


def realize_sparse(op: OperatorSum) -> sp.csr_matrix:
    dim = 1 << op.n
    idx = np.arange(dim, dtype=np.int64)
    rows, cols, data = [], [], []
    real = op.is_real
    for t in op.terms:
        x, vals = _term_arrays(t, idx)
        rows.append(idx ^ x)
        cols.append(idx)
        data.append(vals.real if real else vals)
    if not rows:
        return sp.csr_matrix((dim, dim), dtype=_dtype(op))
    return sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()


def apply_operator(op: OperatorSum, psi: np.ndarray) -> np.ndarray:
    """Term-by-term action on a state vector (or a batch of column vectors)."""
    psi = np.asarray(psi)
    dim = 1 << op.n
    if psi.shape[0] != dim:
        raise ValueError(f"state has dimension {psi.shape[0]}, expected {dim}")
    idx = np.arange(dim, dtype=np.int64)
    dtype = np.result_type(psi.dtype, _dtype(op))
    out = np.zeros(psi.shape, dtype=dtype)
    for t in op.terms:
        src = idx ^ t.masks()[0]
        _, vals = _term_arrays(t, src)
        if not np.iscomplexobj(out):
            vals = vals.real
        if psi.ndim == 1:
            out += vals * psi[src]
        else:
            out += vals[:, None] * psi[src]
    return out


def as_linear_operator(op: OperatorSum) -> LinearOperator:
    dim = 1 << op.n
    return LinearOperator(
        (dim, dim),
        matvec=lambda v: apply_operator(op, v),
        matmat=lambda m: apply_operator(op, m),
        dtype=_dtype(op),
    )


def pauli_decompose(matrix: np.ndarray, atol: float = 1e-14) -> OperatorSum:
    """Expand a ``2**n`` square matrix in the Pauli basis."""
    m = np.asarray(matrix)
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if m.shape != (dim, dim) or 1 << n != dim or n < 1:
        raise ValueError(f"expected a 2**n square matrix, got shape {m.shape}")
    idx = np.arange(dim, dtype=np.int64)
    terms = []
    for code in range(4 ** n):
        letters = "".join(LETTERS[(code >> (2 * (n - 1 - q))) & 3] for q in range(n))
        t = PauliString(1.0, letters)
        x, vals = _term_arrays(t, idx)
        # tr(P M) / dim, with P[b ^ x, b] = vals[b]
        c = np.sum(vals * m[idx, idx ^ x]) / dim
        terms.append(PauliString(c, letters))
    return canonicalize(OperatorSum(tuple(terms), n), atol=atol)


# -- subspaces -----------------------------------------------------------------

_KETS = {
    "0": np.array([1.0, 0.0]),
    "1": np.array([0.0, 1.0]),
    "+": np.array([1.0, 1.0]) / math.sqrt(2.0),
    "-": np.array([1.0, -1.0]) / math.sqrt(2.0),
}
_COMPLEMENT = {"0": "1", "1": "0", "+": "-", "-": "+"}


@dataclass(frozen=True)
class Partition:
    """Keep ancilla ``qubit`` in single-qubit state ``state`` (one of 0, 1, +, -)."""

    qubit: int
    state: str

    def __post_init__(self):
        s = str(self.state)
        if s not in _KETS:
            raise ValueError(f"kept state must be one of 0, 1, +, -; got {self.state!r}")
        if not isinstance(self.qubit, (int, np.integer)) or self.qubit < 1:
            raise ValueError(f"bad ancilla qubit {self.qubit!r}")
        object.__setattr__(self, "state", s)

    @classmethod
    def from_basis(cls, qubit: int, basis: str, value: int) -> "Partition":
        table = {("z", 0): "0", ("z", 1): "1", ("x", 0): "+", ("x", 1): "-"}
        try:
            return cls(qubit, table[basis.lower(), int(value)])
        except (KeyError, ValueError):
            raise ValueError(f"malformed partition ({basis!r}, {value!r})") from None

    @property
    def basis(self) -> str:
        return "z" if self.state in "01" else "x"

    @property
    def complement(self) -> "Partition":
        return Partition(self.qubit, _COMPLEMENT[self.state])

    def isometry(self, n: int) -> np.ndarray:
        """``2**n x 2**(n-1)`` matrix whose columns span the kept subspace."""
        if self.qubit > n:
            raise ValueError(f"ancilla {self.qubit} outside 1..{n}")
        ket = _KETS[self.state][:, None]
        return np.kron(np.kron(np.eye(1 << (self.qubit - 1)), ket), np.eye(1 << (n - self.qubit)))


def _as_matrix(op) -> np.ndarray:
    if isinstance(op, OperatorSum):
        return realize_matrix(op)
    m = np.asarray(op)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    return m


def subspace_block(op, rows: Partition, cols: Partition) -> np.ndarray:
    """``W_rows^T H W_cols`` for the isometries of two partitions of one ancilla."""
    m = _as_matrix(op)
    n = m.shape[0].bit_length() - 1
    return rows.isometry(n).T @ m @ cols.isometry(n)


def restrict_to_subspace(op, keep: Partition) -> np.ndarray:
    """``P H P`` expressed on the ``2**(n-1)``-dimensional kept subspace."""
    return subspace_block(op, keep, keep)


# -- text format -----------------------------------------------------------------

def format_hamiltonian(op: OperatorSum, header: Sequence[str] = ()) -> str:
    """One ``<coefficient> <word>`` line per term of the canonical form.

    ``repr`` of a float is the shortest string that round-trips exactly.
    """
    lines = [f"# {h}" for h in header]
    lines.append(f"# qubits {op.n}")
    for t in canonicalize(op).terms:
        if isinstance(t.coeff, complex):
            raise ValueError(f"cannot serialize complex coefficient of {t.word}")
        lines.append(f"{float(t.coeff)!r} {t.word}")
    return "\n".join(lines) + "\n"


def parse_hamiltonian(text: str) -> OperatorSum:
    n = None
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "qubits":
                try:
                    n = int(parts[1])
                except ValueError:
                    raise HamiltonianParseError(f"line {lineno}: bad qubit count") from None
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise HamiltonianParseError(f"line {lineno}: expected '<coefficient> <word>', got {raw!r}")
        try:
            coeff = float(parts[0])
            term = PauliString(coeff, parts[1].upper())
        except ValueError as exc:
            raise HamiltonianParseError(f"line {lineno}: {exc}") from None
        terms.append(term)
    if n is None:
        if not terms:
            raise HamiltonianParseError("no terms and no '# qubits <n>' header")
        n = terms[0].n
    try:
        return OperatorSum(tuple(terms), n)
    except ValueError as exc:
        raise HamiltonianParseError(str(exc)) from None


def read_hamiltonian(path) -> OperatorSum:
    with open(path) as fh:
        return parse_hamiltonian(fh.read())


def write_hamiltonian(path, op: OperatorSum, header: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(format_hamiltonian(op, header))

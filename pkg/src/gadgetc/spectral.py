"""Eigensolvers, self-energy operators, gap sweeps and ground-state overlaps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .pauli import (
    OperatorSum,
    Partition,
    as_linear_operator,
    dense_limit,
    realize_matrix,
    subspace_block,
)

RESIDUAL_TOL = 1e-8
DEGENERACY_TOL = 1e-9


class NonHermitianError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


class SingularResolventError(np.linalg.LinAlgError):
    pass


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    vectors: np.ndarray
    gap: float | None
    overlaps: dict[str, float] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)

    @property
    def ground(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])


@dataclass
class SelfEnergyResult:
    exact: np.ndarray
    terms: list[np.ndarray]
    z: float
    residual: float

    @property
    def series(self) -> np.ndarray:
        return sum(self.terms)


def _dimension(H) -> int:
    if isinstance(H, OperatorSum):
        return 1 << H.n
    return H.shape[0]


def _check_hermitian(H):
    if isinstance(H, OperatorSum):
        if not H.is_hermitian:
            raise NonHermitianError("operator has complex coefficients")
        return
    diff = H - H.conj().T
    err = abs(diff).max() if sp.issparse(diff) else np.max(np.abs(diff), initial=0.0)
    scale = max(1.0, abs(H).max() if sp.issparse(H) else np.max(np.abs(H), initial=0.0))
    if err > 1e-10 * scale:
        raise NonHermitianError(f"matrix is not Hermitian (max |H - H^dag| = {err:.3g})")


def _apply(H, v):
    if isinstance(H, OperatorSum):
        return as_linear_operator(H) @ v
    return H @ v


def eigensolve(H, k: int = 2, method: str = "auto", residual_tol: float = RESIDUAL_TOL) -> SpectralReport:
    """Lowest ``k`` eigenpairs of a Hermitian operator or matrix.

    ``method="auto"`` diagonalizes densely up to the dense qubit limit and
    falls back to implicitly restarted Lanczos (ARPACK) above it.  Real
    symmetric input yields real eigenvectors.
    """
    _check_hermitian(H)
    dim = _dimension(H)
    k = min(k, dim)
    if method == "auto":
        method = "dense" if dim <= 1 << dense_limit() else "iterative"
    if method == "dense":
        m = realize_matrix(H) if isinstance(H, OperatorSum) else H
        m = m.toarray() if sp.issparse(m) else np.asarray(m)
        w, v = np.linalg.eigh(m)
        w, v = w[:k], v[:, :k]
    elif method == "iterative":
        w, v = _lanczos(H, k, dim)
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")
    residuals = {}
    for i in range(len(w)):
        r = float(np.linalg.norm(_apply(H, v[:, i]) - w[i] * v[:, i]))
        residuals[f"pair_{i}"] = r
        if r > residual_tol:
            raise ConvergenceError(f"eigenpair {i} residual {r:.3g} exceeds {residual_tol:g}", 0)
    gap = float(w[1] - w[0]) if len(w) > 1 else None
    return SpectralReport(np.asarray(w, dtype=float), v, gap, residuals=residuals)


def _lanczos(H, k, dim):
    op = as_linear_operator(H) if isinstance(H, OperatorSum) else H
    if k >= dim - 1:
        raise ValueError("iterative solver needs k < dim - 1; use the dense path")
    maxiter = 10 * dim
    # a uniform start vector is symmetric under global spin flips and would
    # hide every odd-parity state; a fixed random vector keeps runs reproducible
    v0 = np.random.default_rng(0).standard_normal(dim)
    try:
        w, v = eigsh(op, k=k, which="SA", tol=1e-12, maxiter=maxiter, v0=v0)
    except ArpackNoConvergence as exc:
        raise ConvergenceError("Lanczos did not converge", maxiter) from exc
    order = np.argsort(w)
    return w[order], v[:, order]


def ground_space(H, tol: float = DEGENERACY_TOL) -> tuple[float, np.ndarray]:
    """Lowest eigenvalue and an orthonormal basis of its eigenspace (within ``tol``)."""
    dim = _dimension(H)
    if dim <= 1 << dense_limit():
        rep = eigensolve(H, k=dim, method="dense")
    else:
        k = 4
        while True:
            rep = eigensolve(H, k=k, method="iterative")
            w = rep.eigenvalues
            if w[-1] > w[0] + tol or k >= dim - 2:
                break
            k = min(2 * k, dim - 2)
    mask = rep.eigenvalues <= rep.eigenvalues[0] + tol
    return float(rep.eigenvalues[0]), rep.vectors[:, mask]


def ground_overlap(H, psi_ref: np.ndarray, tol: float = DEGENERACY_TOL) -> float:
    """Squared norm of the projection of ``psi_ref`` onto the ground space of ``H``."""
    psi_ref = np.asarray(psi_ref)
    _, basis = ground_space(H, tol=tol)
    amp = basis.conj().T @ psi_ref
    return float(min(1.0, np.real(np.vdot(amp, amp))))


# -- self-energy ----------------------------------------------------------------

def exact_self_energy(Htilde, keep: Partition, z: float = 0.0, method: str = "schur") -> np.ndarray:
    """Exact self-energy on the kept (low) subspace at real ``z``.

    ``schur`` evaluates ``H_-- + H_-+ (z - H_++)^-1 H_+-``; ``resolvent``
    evaluates ``z - (P (z - H)^-1 P)^-1``.  Both are the same operator
    whenever the inverses exist.
    """
    m = realize_matrix(Htilde) if isinstance(Htilde, OperatorSum) else np.asarray(Htilde)
    high = keep.complement
    if method == "schur":
        hmm = subspace_block(m, keep, keep)
        hmp = subspace_block(m, keep, high)
        hpm = subspace_block(m, high, keep)
        hpp = subspace_block(m, high, high)
        block = z * np.eye(hpp.shape[0]) - hpp
        _check_invertible(block, "z is an eigenvalue of the high-energy block")
        return hmm + hmp @ np.linalg.solve(block, hpm)
    if method == "resolvent":
        full = z * np.eye(m.shape[0]) - m
        _check_invertible(full, "z is an eigenvalue of the full operator")
        g = np.linalg.inv(full)
        gmm = subspace_block(g, keep, keep)
        _check_invertible(gmm, "projected resolvent is singular")
        return z * np.eye(gmm.shape[0]) - np.linalg.inv(gmm)
    raise ValueError(f"unknown self-energy method {method!r}")


def _check_invertible(m: np.ndarray, message: str):
    if np.linalg.cond(m) > 1e12:
        raise SingularResolventError(message)


def perturbative_self_energy(Hp, V, keep: Partition, z: float = 0.0, order: int = 3) -> SelfEnergyResult:
    """Self-energy series through ``order`` (at most 3) next to the exact value.

    Orders: ``Hp_--``, ``V_--``, ``V_-+ G V_+-`` and ``V_-+ G V_++ G V_+-``
    with ``G = (z - Hp_++)^-1`` on the penalized subspace.
    """
    if not 0 <= order <= 3:
        raise ValueError("series order must be between 0 and 3")
    hp = realize_matrix(Hp) if isinstance(Hp, OperatorSum) else np.asarray(Hp)
    v = realize_matrix(V) if isinstance(V, OperatorSum) else np.asarray(V)
    high = keep.complement
    hp_pp = subspace_block(hp, high, high)
    _check_invertible(z * np.eye(hp_pp.shape[0]) - hp_pp, "z is an eigenvalue of the penalty block")
    g = np.linalg.inv(z * np.eye(hp_pp.shape[0]) - hp_pp)
    v_mm = subspace_block(v, keep, keep)
    v_mp = subspace_block(v, keep, high)
    v_pm = subspace_block(v, high, keep)
    v_pp = subspace_block(v, high, high)
    terms = [
        subspace_block(hp, keep, keep),
        v_mm,
        v_mp @ g @ v_pm,
        v_mp @ g @ v_pp @ g @ v_pm,
    ][: order + 1]
    exact = exact_self_energy(hp + v, keep, z)
    residual = float(np.linalg.norm(exact - sum(terms), 2))
    return SelfEnergyResult(exact, terms, z, residual)


# -- adiabatic interpolation -------------------------------------------------------

@dataclass
class GapSweep:
    s: np.ndarray
    gaps: np.ndarray

    @property
    def argmin(self) -> float:
        return float(self.s[int(np.argmin(self.gaps))])

    @property
    def min_gap(self) -> float:
        return float(np.min(self.gaps))


def gap_sweep(Hi, Hf, grid=101) -> GapSweep:
    """Spectral gap of ``(1 - s) Hi + s Hf`` over a grid of ``s`` in [0, 1]."""
    s = np.linspace(0.0, 1.0, grid) if np.isscalar(grid) else np.asarray(grid, dtype=float)
    if isinstance(Hi, OperatorSum) and isinstance(Hf, OperatorSum):
        if Hi.n != Hf.n:
            raise ValueError(f"qubit counts differ: {Hi.n} vs {Hf.n}")
        a, b = realize_matrix(Hi), realize_matrix(Hf)
    else:
        a, b = np.asarray(Hi), np.asarray(Hf)
        if a.shape != b.shape:
            raise ValueError("initial and final Hamiltonians differ in dimension")
    if np.any((s < 0) | (s > 1)):
        raise ValueError("interpolation parameters must lie in [0, 1]")
    gaps = np.empty(len(s))
    for idx, si in enumerate(s):
        w = np.linalg.eigvalsh((1.0 - si) * a + si * b)
        gaps[idx] = max(0.0, w[1] - w[0]) if len(w) > 1 else 0.0
    return GapSweep(s, gaps)

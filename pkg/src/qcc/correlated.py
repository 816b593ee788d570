"""Correlated coherence and the discord classifiers built on it.

Correlated coherence is the total l1 coherence of a bipartite state minus the
l1 coherences of its two marginals, all measured in a product reference
basis. In the local eigenbases the marginal terms vanish, which makes the
value a property of the state alone, except when a marginal is degenerate:
then the eigenbasis is only fixed up to a unitary inside each degenerate
eigenspace. ``CanonicalBasisMode.MINIMIZED`` resolves this by taking the
smallest value over that family.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .coherence import _dephase_array, l1_offdiag
from .errors import DimMismatch, OptimizerDidNotConverge
from .optimize import OptimizerConfig, OptimizerReport, multistart_minimize, unitary_from_params
from .rng import CounterRNG
from .state import (
    DEGENERACY_GAP,
    DensityMatrix,
    LocalBasis,
    ProductBasisChoice,
    eigh,
    ptrace,
)
from .stategen import haar_unitary

DEFAULT_CC_CONFIG = OptimizerConfig(restarts=8, max_iters=4000, method="Nelder-Mead", target=1e-14)
DISCORD_TOL = 1e-7
_NULL_EIGENVALUE = 1e-12


class CanonicalBasisMode(enum.Enum):
    FIXED = "fixed"
    MINIMIZED = "min"


@dataclass(frozen=True)
class CCResult:
    value: float
    basis: ProductBasisChoice
    mode: CanonicalBasisMode
    optimizer_report: OptimizerReport | None = None

    def __float__(self) -> float:
        return float(self.value)


def cc_in_frame(x: np.ndarray, da: int, db: int) -> float:
    """Correlated coherence of an operator already expressed in the reference basis."""
    return (
        l1_offdiag(x)
        - l1_offdiag(ptrace(x, (da, db), [0]))
        - l1_offdiag(ptrace(x, (da, db), [1]))
    )


def _dephase_side(rho: DensityMatrix, side: int, u: np.ndarray) -> DensityMatrix:
    """Dephase the whole A side (``side=0``) or B side (``side=1``) in the columns of ``u``."""
    dims = (rho.dim_a, rho.dim_b)
    return rho.with_data(_dephase_array(rho.data, dims, side, u))


def correlated_coherence(rho: DensityMatrix, basis: ProductBasisChoice) -> float:
    """``C(rho_AB) - C(rho_A) - C(rho_B)`` with respect to the given local bases."""
    da, db = rho.dim_a, rho.dim_b
    if basis.basis_a.dim != da or basis.basis_b.dim != db:
        raise DimMismatch(f"bases ({basis.basis_a.dim}, {basis.basis_b.dim}) do not match sides ({da}, {db})")
    u = basis.matrix
    return cc_in_frame(u.conj().T @ rho.data @ u, da, db)


def local_eigenbasis(rho: DensityMatrix, side: str = "A", gap: float = DEGENERACY_GAP) -> LocalBasis:
    """Deterministic eigenbasis of one marginal, with its degeneracy blocks."""
    if side.upper() not in ("A", "B"):
        raise ValueError("side must be 'A' or 'B'")
    return LocalBasis.from_hermitian(rho.marginal(side), gap)


def _active_blocks(basis: LocalBasis) -> list[tuple[int, ...]]:
    # rotations inside the null space of a marginal never touch the state
    vals = basis.eigenvalues
    return [b for b in basis.degeneracy_blocks if len(b) > 1 and vals[b[0]] > _NULL_EIGENVALUE]


class _BlockRotations:
    """Block-diagonal unitaries acting inside the degenerate eigenspaces of both marginals."""

    def __init__(self, d: int, blocks: list[tuple[int, ...]]):
        self.d = d
        self.blocks = blocks
        self.sizes = [len(b) for b in blocks]
        self.n_params = sum(k * k for k in self.sizes)

    def assemble(self, params: np.ndarray, base: np.ndarray) -> np.ndarray:
        r = base.copy()
        pos = 0
        for b, k in zip(self.blocks, self.sizes):
            g = unitary_from_params(params[pos: pos + k * k], k)
            idx = np.array(b)
            r[np.ix_(idx, idx)] = base[np.ix_(idx, idx)] @ g
            pos += k * k
        return r

    def random_base(self, rng: CounterRNG) -> np.ndarray:
        r = np.eye(self.d, dtype=complex)
        for b, k in zip(self.blocks, self.sizes):
            idx = np.array(b)
            r[np.ix_(idx, idx)] = haar_unitary(k, rng)
        return r


def _conditional_base(x0: np.ndarray, da: int, db: int, rot: _BlockRotations, side: int, rng: CounterRNG) -> np.ndarray:
    """Diagonalise a random conditional operator inside each degenerate block.

    For a classical-classical state every operator ``Tr_B[rho (1 x Y)]`` is
    diagonal in the classical basis of A, so this lands on it directly.
    """
    dother = db if side == 0 else da
    y = rng.complex_normal((dother, dother))
    y = y + y.conj().T
    if side == 0:
        m = ptrace(x0 @ np.kron(np.eye(da), y), (da, db), [0])
    else:
        m = ptrace(x0 @ np.kron(y, np.eye(db)), (da, db), [1])
    m = 0.5 * (m + m.conj().T)
    r = np.eye(rot.d, dtype=complex)
    for b in rot.blocks:
        idx = np.array(b)
        _, v = eigh(m[np.ix_(idx, idx)])
        r[np.ix_(idx, idx)] = v
    return r


def correlated_coherence_canonical(
    rho: DensityMatrix,
    mode: CanonicalBasisMode | str = CanonicalBasisMode.MINIMIZED,
    config: OptimizerConfig | None = None,
) -> CCResult:
    """Correlated coherence in the local eigenbases.

    ``FIXED`` uses the deterministic :func:`qcc.state.eigh` eigenbases.
    ``MINIMIZED`` additionally searches unitary rotations inside every
    degenerate eigenspace (multi-restart local search) and returns the smallest
    value found; the marginals stay diagonal throughout.
    """
    mode = CanonicalBasisMode(mode)
    config = DEFAULT_CC_CONFIG if config is None else config
    da, db = rho.dim_a, rho.dim_b
    ba = local_eigenbasis(rho, "A")
    bb = local_eigenbasis(rho, "B")
    u = np.kron(ba.vectors, bb.vectors)
    x0 = u.conj().T @ rho.data @ u
    fixed_value = cc_in_frame(x0, da, db)
    blocks_a, blocks_b = _active_blocks(ba), _active_blocks(bb)
    if mode is CanonicalBasisMode.FIXED or not (blocks_a or blocks_b):
        return CCResult(fixed_value, ProductBasisChoice(ba, bb), mode)

    rot_a = _BlockRotations(da, blocks_a)
    rot_b = _BlockRotations(db, blocks_b)
    na = rot_a.n_params
    rng = CounterRNG(config.seed, stream=1)
    bases = [(np.eye(da, dtype=complex), np.eye(db, dtype=complex))]
    for _ in range(2):
        bases.append((_conditional_base(x0, da, db, rot_a, 0, rng), _conditional_base(x0, da, db, rot_b, 1, rng)))
    while len(bases) < config.restarts:
        bases.append((rot_a.random_base(rng), rot_b.random_base(rng)))
    bases = bases[: max(config.restarts, 1)]

    def make_objective(base_a, base_b):
        def objective(params):
            ra = rot_a.assemble(params[:na], base_a)
            rb = rot_b.assemble(params[na:], base_b)
            w = np.kron(ra, rb)
            return cc_in_frame(w.conj().T @ x0 @ w, da, db)
        return objective

    report = OptimizerReport()
    best = (fixed_value, np.eye(da, dtype=complex), np.eye(db, dtype=complex))
    zeros = np.zeros(na + rot_b.n_params)
    for i, (base_a, base_b) in enumerate(bases):
        obj = make_objective(base_a, base_b)
        x, sub = multistart_minimize(obj, [zeros], config, n_restarts=1)
        report.merge(sub)
        if sub.best_value < best[0]:
            best = (sub.best_value, rot_a.assemble(x[:na], base_a), rot_b.assemble(x[na:], base_b))
        if config.target is not None and sub.best_value <= config.target:
            break
    if config.require_convergence and not report.any_converged:
        raise OptimizerDidNotConverge("degenerate-block search did not converge", best[0])
    value, ra, rb = best
    basis = ProductBasisChoice(
        LocalBasis(ba.vectors @ ra, ba.degeneracy_blocks, ba.eigenvalues),
        LocalBasis(bb.vectors @ rb, bb.degeneracy_blocks, bb.eigenvalues),
    )
    return CCResult(max(value, 0.0) if value > -1e-12 else value, basis, mode, report)


def symmetric_discord_zero(
    rho: DensityMatrix, tol: float = DISCORD_TOL, config: OptimizerConfig | None = None
) -> tuple[bool, CCResult]:
    """True iff the canonical (minimised) correlated coherence is at most ``tol``.

    A true verdict means ``rho`` is classical-classical: diagonal in a product
    of local orthonormal bases.
    """
    res = correlated_coherence_canonical(rho, CanonicalBasisMode.MINIMIZED, config)
    return bool(res.value <= tol), res


def asymmetric_discord_delta(
    rho: DensityMatrix, side: str = "A", tol: float = DISCORD_TOL, config: OptimizerConfig | None = None
) -> tuple[float, bool]:
    """Correlated coherence lost when ``side`` is measured in its eigenbasis.

    Both terms use the basis pair selected for ``rho`` (minimised over
    degenerate eigenspaces). The flag is ``delta <= tol``: zero discord with
    the measurement on ``side``.
    """
    side = side.upper()
    if side not in ("A", "B"):
        raise ValueError("side must be 'A' or 'B'")
    res = correlated_coherence_canonical(rho, CanonicalBasisMode.MINIMIZED, config)
    u_side = res.basis.basis_a.vectors if side == "A" else res.basis.basis_b.vectors
    measured = _dephase_side(rho, 0 if side == "A" else 1, u_side)
    delta = res.value - correlated_coherence(measured, res.basis)
    return float(delta), bool(delta <= tol)

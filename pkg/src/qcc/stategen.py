"""Reproducible generators for the state families used in tests and demos.

All randomness goes through :class:`qcc.rng.CounterRNG`, so a given seed
yields bit-identical output on every run.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .rng import CounterRNG, as_rng
from .state import (
    DensityMatrix,
    LocalBasis,
    ProductBasisChoice,
    SeparableDecomposition,
    _dims_tuple,
    _fix_phases,
)

BELL_STATES = ("phi+", "phi-", "psi+", "psi-")


def _split_for(dims: tuple[int, ...], split: int | None) -> int | None:
    if split is None and len(dims) == 2:
        return 1
    return split


def bell(which: str = "phi+") -> DensityMatrix:
    """One of the four two-qubit Bell projectors (``phi+``, ``phi-``, ``psi+``, ``psi-``)."""
    key = which.lower().replace("Φ", "phi").replace("Ψ", "psi")
    s = 1 / math.sqrt(2)
    vecs = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    if key not in vecs:
        raise ValueError(f"unknown Bell state {which!r}; choose from {BELL_STATES}")
    v = np.array(vecs[key], dtype=complex)
    return DensityMatrix(np.outer(v, v.conj()), (2, 2), 1)


def werner(p: float) -> DensityMatrix:
    """``p |psi-><psi-| + (1 - p) I/4``; entangled iff ``p > 1/3``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("Werner parameter must lie in [0, 1]")
    rho = p * bell("psi-").data + (1 - p) * np.eye(4) / 4
    return DensityMatrix(rho, (2, 2), 1)


def haar_unitary(d: int, rng: CounterRNG) -> np.ndarray:
    """Haar unitary from the QR factor of a Ginibre matrix (Mezzadri's phase fix)."""
    z = rng.complex_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_unitary(d: int, seed=0) -> np.ndarray:
    return haar_unitary(int(d), as_rng(seed))


def random_local_basis(d: int, seed=0) -> LocalBasis:
    """Haar-random orthonormal basis with the phase convention of :func:`qcc.state.eigh`."""
    return LocalBasis(_fix_phases(haar_unitary(int(d), as_rng(seed))))


def random_product_basis(da: int, db: int, seed=0) -> ProductBasisChoice:
    rng = as_rng(seed)
    return ProductBasisChoice(
        LocalBasis(_fix_phases(haar_unitary(da, rng))),
        LocalBasis(_fix_phases(haar_unitary(db, rng))),
    )


def random_ket(d: int, seed=0) -> np.ndarray:
    v = as_rng(seed).complex_normal(int(d))
    return v / np.linalg.norm(v)


def random_pure(dims, seed=0, split: int | None = None) -> DensityMatrix:
    """Haar-random pure state (normalised complex Gaussian vector)."""
    dims = _dims_tuple(dims)
    v = random_ket(math.prod(dims), seed)
    return DensityMatrix(np.outer(v, v.conj()), dims, _split_for(dims, split))


def random_mixed(dims, rank: int | None = None, seed=0, split: int | None = None) -> DensityMatrix:
    """``G G^dagger / Tr(G G^dagger)`` with ``G`` a complex Gaussian ``D x rank`` matrix."""
    dims = _dims_tuple(dims)
    d = math.prod(dims)
    rank = d if rank is None else int(rank)
    g = as_rng(seed).complex_normal((d, rank))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return DensityMatrix(0.5 * (rho + rho.conj().T), dims, _split_for(dims, split))


def random_separable(n_terms: int, dims=(2, 2), seed=0) -> tuple[DensityMatrix, SeparableDecomposition]:
    """Random mixture of ``n_terms`` pure product states, returned with its decomposition."""
    da, db = _dims_tuple(dims)
    rng = as_rng(seed)
    w = rng.uniform(n_terms) + 0.05
    w = w / w.sum()
    alphas = rng.complex_normal((n_terms, da))
    betas = rng.complex_normal((n_terms, db))
    decomp = SeparableDecomposition(w, alphas, betas)
    return decomp.state(), decomp


def cc_state(p, basis: ProductBasisChoice | None = None) -> DensityMatrix:
    """Classical-classical state ``sum_ij p_ij |i><i| (x) |j><j|`` in the given local bases."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise ValueError("weights must be a d_A x d_B matrix")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError("weights must be non-negative and sum to 1")
    da, db = p.shape
    if basis is None:
        basis = ProductBasisChoice.computational(da, db)
    u = basis.matrix
    rho = u @ np.diag(p.reshape(-1).astype(complex)) @ u.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T), (da, db), 1)


def cq_state(weights: Sequence[float], bob_states: Sequence, basis_a: LocalBasis | None = None) -> DensityMatrix:
    """Classical-quantum state ``sum_i p_i |i><i| (x) rho_B^i``."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
        raise ValueError("weights must be non-negative and sum to 1")
    bs = [np.asarray(getattr(b, "data", b), dtype=complex) for b in bob_states]
    if len(bs) != len(w):
        raise ValueError("need one Bob state per weight")
    da, db = len(w), bs[0].shape[0]
    va = np.eye(da, dtype=complex) if basis_a is None else basis_a.vectors
    rho = np.zeros((da * db, da * db), dtype=complex)
    for i in range(da):
        proj = np.outer(va[:, i], va[:, i].conj())
        rho += w[i] * np.kron(proj, bs[i])
    return DensityMatrix(0.5 * (rho + rho.conj().T), (da, db), 1)


def random_weights(shape, rng: CounterRNG, floor: float = 0.02) -> np.ndarray:
    w = rng.uniform(shape) + floor
    return w / w.sum()


def random_cc_state(dims=(2, 2), seed=0) -> DensityMatrix:
    """cc-state with random weights in Haar-random local bases."""
    da, db = _dims_tuple(dims)
    rng = as_rng(seed)
    p = random_weights((da, db), rng)
    return cc_state(p, random_product_basis(da, db, rng))


def random_cq_state(dims=(2, 2), seed=0, commuting: bool = False) -> DensityMatrix:
    """cq-state with random weights, random registry basis and random Bob states.

    With ``commuting=True`` all Bob states share one eigenbasis, which makes
    the result a cc-state as well.
    """
    da, db = _dims_tuple(dims)
    rng = as_rng(seed)
    w = random_weights(da, rng)
    basis_a = LocalBasis(_fix_phases(haar_unitary(da, rng)))
    if commuting:
        u = haar_unitary(db, rng)
        bobs = [u @ np.diag(random_weights(db, rng)).astype(complex) @ u.conj().T for _ in range(da)]
    else:
        bobs = []
        for _ in range(da):
            g = rng.complex_normal((db, db))
            r = g @ g.conj().T
            bobs.append(r / np.trace(r).real)
    return cq_state(w, bobs, basis_a)

"""l1-norm coherence, dephasing channels and the maximal-coherence-loss check."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimMismatch
from .rng import as_rng
from .state import (
    DensityMatrix,
    LocalBasis,
    ProductBasisChoice,
    _as_array,
    _check_indices,
    _fix_phases,
    apply_left,
    kron_all,
)
from .stategen import haar_unitary

BasisSpec = Union[None, LocalBasis, ProductBasisChoice, Sequence[LocalBasis], np.ndarray]

__all__ = [
    "ProductBasisChoice",
    "basis_matrix",
    "l1_coherence",
    "l1_offdiag",
    "dephase",
    "dephase_subsystem",
    "max_loss_certificate",
    "MaxLossReport",
]


def basis_matrix(basis: BasisSpec, dim: int) -> np.ndarray:
    """Unitary whose columns are the reference basis vectors of the full space."""
    if basis is None:
        return np.eye(dim, dtype=complex)
    if isinstance(basis, LocalBasis):
        u = basis.vectors
    elif isinstance(basis, ProductBasisChoice):
        u = basis.matrix
    elif isinstance(basis, np.ndarray):
        u = basis
    else:
        u = kron_all(b.vectors for b in basis)
    if u.shape != (dim, dim):
        raise DimMismatch(f"basis of dimension {u.shape[0]} does not match state dimension {dim}")
    return u


def l1_offdiag(a: np.ndarray) -> float:
    """Sum of moduli of the off-diagonal entries of ``a``."""
    return float(np.abs(a).sum() - np.abs(np.diagonal(a)).sum())


def l1_coherence(rho, basis: BasisSpec = None) -> float:
    """``sum_{i != j} |<i|rho|j>|`` in the given reference basis.

    ``basis`` may be a :class:`LocalBasis` over the full space, a
    :class:`ProductBasisChoice`, a sequence of per-subsystem bases (combined
    A-major) or ``None`` for the computational basis.
    """
    a = _as_array(rho)
    u = basis_matrix(basis, a.shape[0])
    return l1_offdiag(u.conj().T @ a @ u)


def dephase(rho: DensityMatrix, basis: BasisSpec = None) -> DensityMatrix:
    """Complete dephasing ``sum_i |i><i| rho |i><i|`` in ``basis``."""
    u = basis_matrix(basis, rho.dim)
    diag = np.real(np.einsum("ij,jk,ki->i", u.conj().T, rho.data, u))
    return rho.with_data((u * diag) @ u.conj().T)


def _dephase_array(a: np.ndarray, dims: tuple[int, ...], k: int, u: np.ndarray) -> np.ndarray:
    # rotate subsystem k into the basis, drop coherences in that index, rotate back
    x = apply_left(a, dims, u.conj().T, [k])
    x = apply_left(x.conj().T, dims, u.conj().T, [k]).conj().T
    t = x.reshape(dims + dims)
    n = len(dims)
    shape = [1] * (2 * n)
    shape[k] = shape[n + k] = dims[k]
    t = t * np.eye(dims[k]).reshape(shape)
    x = t.reshape(a.shape)
    x = apply_left(x, dims, u, [k])
    return apply_left(x.conj().T, dims, u, [k]).conj().T


def dephase_subsystem(rho: DensityMatrix, k: int, local_basis: LocalBasis | None = None) -> DensityMatrix:
    """Projective measurement of subsystem ``k`` in ``local_basis``, outcome forgotten."""
    (k,) = _check_indices([k], rho.n_subsystems)
    d = rho.dims[k]
    u = np.eye(d, dtype=complex) if local_basis is None else local_basis.vectors
    if u.shape != (d, d):
        raise DimMismatch(f"local basis of dimension {u.shape[0]} for subsystem of dimension {d}")
    return rho.with_data(_dephase_array(rho.data, rho.dims, k, u))


@dataclass(frozen=True)
class MaxLossReport:
    min_sampled_coherence: float
    ref_coherence: float
    passed: bool
    n_samples: int
    slack: float

    def __bool__(self) -> bool:
        return self.passed


def _local_reference(rho: DensityMatrix, ref_basis) -> list[LocalBasis]:
    if isinstance(ref_basis, ProductBasisChoice):
        if rho.n_subsystems != 2:
            raise DimMismatch("a ProductBasisChoice reference needs a two-subsystem state; pass one basis per subsystem")
        locs = [ref_basis.basis_a, ref_basis.basis_b]
    elif ref_basis is None:
        locs = [LocalBasis.computational(d) for d in rho.dims]
    else:
        locs = list(ref_basis)
    if [b.dim for b in locs] != list(rho.dims):
        raise DimMismatch(f"reference bases {[b.dim for b in locs]} do not match dims {rho.dims}")
    return locs


def max_loss_certificate(
    rho: DensityMatrix,
    k: int,
    ref_basis=None,
    n_samples: int = 200,
    seed=0,
    slack: float = 1e-9,
) -> MaxLossReport:
    """Falsification harness for maximal coherence loss under local dephasing.

    Dephasing subsystem ``k`` in its own reference basis should leave no more
    l1 coherence (measured in the full product reference basis) than
    dephasing it in any other basis. ``n_samples`` Haar-random local bases are
    tried; the report passes iff the reference value is within ``slack`` of
    every sampled value.
    """
    (k,) = _check_indices([k], rho.n_subsystems)
    locs = _local_reference(rho, ref_basis)
    u_ref = kron_all(b.vectors for b in locs)
    dims = rho.dims
    ref_value = l1_offdiag(u_ref.conj().T @ _dephase_array(rho.data, dims, k, locs[k].vectors) @ u_ref)
    rng = as_rng(seed)
    sampled = np.empty(n_samples)
    for s in range(n_samples):
        lam = _fix_phases(haar_unitary(dims[k], rng))
        sampled[s] = l1_offdiag(u_ref.conj().T @ _dephase_array(rho.data, dims, k, lam) @ u_ref)
    lowest = float(sampled.min()) if n_samples else math.inf
    return MaxLossReport(lowest, ref_value, bool(ref_value <= lowest + slack), n_samples, slack)

"""Density matrices, local bases and the tensor plumbing everything else uses.

Index ordering is A-major throughout: for subsystems with dimensions
``(d_1, ..., d_n)`` the composite index is the row-major flattening, so
``kron(x, y)`` puts ``x`` on the most significant factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadSubsystemIndex,
    DimMismatch,
    NonHermitian,
    NotPSD,
    StateValidationError,
    TraceNotOne,
    Violation,
)

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
UNITARY_TOL = 1e-9
ORTHONORMAL_TOL = 1e-9
RANK_TOL = 1e-10
DEGENERACY_GAP = 1e-8

_PHASE_THRESHOLD = 1e-10
_TIE_DECIMALS = 12


# --------------------------------------------------------------------------- #
#                               array helpers                                  #
# --------------------------------------------------------------------------- #

def _dims_tuple(dims, size: int | None = None) -> tuple[int, ...]:
    if dims is None:
        if size is None:
            raise DimMismatch("dims required")
        return (int(size),)
    if np.ndim(dims) == 0:
        return (int(dims),)
    return tuple(int(d) for d in dims)


def ptrace(arr: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Partial trace of a dense operator, keeping subsystems ``keep`` in order."""
    dims = tuple(dims)
    n = len(dims)
    keep = sorted(set(keep))
    drop = [i for i in range(n) if i not in keep]
    t = np.asarray(arr).reshape(dims + dims)
    # trace dropped axes pairwise, highest first so axis numbers stay valid
    for i in sorted(drop, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + m)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(dk, dk)


def permute(arr: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: new factor ``j`` is old factor ``order[j]``."""
    dims = tuple(dims)
    n = len(dims)
    order = list(order)
    t = np.asarray(arr).reshape(dims + dims)
    t = t.transpose(order + [n + i for i in order])
    d = arr.shape[0]
    return t.reshape(d, d)


def permute_vector(vec: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    t = np.asarray(vec).reshape(tuple(dims))
    return t.transpose(list(order)).reshape(-1)


def apply_left(arr: np.ndarray, dims: Sequence[int], op: np.ndarray, on: Sequence[int]) -> np.ndarray:
    """Compute ``(op acting on subsystems on) @ arr`` without building the full operator."""
    dims = tuple(dims)
    n = len(dims)
    on = list(on)
    rest = [i for i in range(n) if i not in on]
    d_on = int(np.prod([dims[i] for i in on]))
    cols = arr.shape[1]
    t = np.asarray(arr).reshape(dims + (cols,))
    t = t.transpose(on + rest + [n])
    shape_t = t.shape
    t = (op @ t.reshape(d_on, -1)).reshape(shape_t)
    inv = np.argsort(on + rest + [n])
    return t.transpose(inv).reshape(arr.shape[0], cols)


def conjugate_local(arr: np.ndarray, dims: Sequence[int], op: np.ndarray, on: Sequence[int]) -> np.ndarray:
    """``O arr O^dagger`` with ``O`` acting on the listed subsystems."""
    x = apply_left(arr, dims, op, on)
    x = apply_left(x.conj().T, dims, op, on)
    return x.conj().T


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def swap_halves(arr: np.ndarray, d: int) -> np.ndarray:
    """Exchange the two ``d``-dimensional halves of an operator on C^d x C^d."""
    return arr.reshape(d, d, d, d).transpose(1, 0, 3, 2).reshape(d * d, d * d)


def hermitian_residual(arr: np.ndarray) -> float:
    return float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0


def unitary_residual(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and unitary_residual(u) <= tol


def orthonormal_complement(vectors: np.ndarray) -> np.ndarray:
    """Columns spanning the orthogonal complement of the column span of ``vectors``."""
    d, k = vectors.shape
    if k == 0:
        return np.eye(d, dtype=complex)
    p = np.eye(d) - vectors @ vectors.conj().T
    u, _, _ = np.linalg.svd(p)
    return u[:, : d - k]


def complete_unitary(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Unitary mapping orthonormal columns ``src`` onto ``dst`` (same count).

    The action on the complement of ``span(src)`` is an arbitrary fixed choice.
    """
    comp_src = orthonormal_complement(src)
    comp_dst = orthonormal_complement(dst)
    return dst @ src.conj().T + comp_dst @ comp_src.conj().T


# --------------------------------------------------------------------------- #
#                               domain types                                   #
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state with its ordered subsystem dimensions.

    ``split`` marks the A|B cut: subsystems ``0..split-1`` form A. It may be
    ``None`` for monopartite use; two-subsystem states then default to
    ``split=1`` wherever a bipartition is needed.
    """

    data: np.ndarray
    dims: tuple[int, ...]
    split: int | None = None
    psd_clamped: bool = False

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", _dims_tuple(self.dims, data.shape[0]))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def bipartition(self) -> int:
        if self.split is not None:
            return self.split
        if len(self.dims) == 2:
            return 1
        raise DimMismatch(f"state with dims {self.dims} has no A|B split")

    @property
    def dims_a(self) -> tuple[int, ...]:
        return self.dims[: self.bipartition()]

    @property
    def dims_b(self) -> tuple[int, ...]:
        return self.dims[self.bipartition():]

    @property
    def dim_a(self) -> int:
        return math.prod(self.dims_a)

    @property
    def dim_b(self) -> int:
        return math.prod(self.dims_b)

    def marginal(self, side: str) -> np.ndarray:
        """Reduced operator of side ``"A"`` or ``"B"`` as a plain array."""
        s = self.bipartition()
        n = len(self.dims)
        keep = range(s) if side.upper() == "A" else range(s, n)
        return ptrace(self.data, self.dims, keep)

    def with_data(self, data: np.ndarray) -> "DensityMatrix":
        return DensityMatrix(data, self.dims, self.split)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)[::-1]


@dataclass(frozen=True, eq=False)
class LocalBasis:
    """Orthonormal basis given by the columns of ``vectors``.

    ``degeneracy_blocks`` groups column indices whose source eigenvalues agree
    within ``DEGENERACY_GAP``; it is empty for bases not derived from a
    spectrum.
    """

    vectors: np.ndarray
    degeneracy_blocks: tuple[tuple[int, ...], ...] = ()
    eigenvalues: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimMismatch(f"basis must be a square matrix, got shape {v.shape}")
        res = float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[0]))))
        if res > ORTHONORMAL_TOL:
            raise DimMismatch(f"basis is not orthonormal (residual {res:.3g})", res)
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(
            self, "degeneracy_blocks", tuple(tuple(int(i) for i in b) for b in self.degeneracy_blocks)
        )

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def computational(cls, d: int) -> "LocalBasis":
        return cls(np.eye(d, dtype=complex))

    @classmethod
    def from_hermitian(cls, h: np.ndarray, gap: float = DEGENERACY_GAP) -> "LocalBasis":
        vals, vecs = eigh(h)
        return cls(vecs, degeneracy_blocks(vals, gap), vals)

    def rephased(self, phases: Sequence[float]) -> "LocalBasis":
        return LocalBasis(self.vectors * np.exp(1j * np.asarray(phases)), self.degeneracy_blocks, self.eigenvalues)


@dataclass(frozen=True, eq=False)
class ProductBasisChoice:
    """Local reference bases for the two sides of a bipartition."""

    basis_a: LocalBasis
    basis_b: LocalBasis

    @property
    def matrix(self) -> np.ndarray:
        return np.kron(self.basis_a.vectors, self.basis_b.vectors)

    @classmethod
    def computational(cls, da: int, db: int) -> "ProductBasisChoice":
        return cls(LocalBasis.computational(da), LocalBasis.computational(db))


@dataclass(frozen=True, eq=False)
class SeparableDecomposition:
    """Convex combination ``sum_i p_i |a_i><a_i| (x) |b_i><b_i|`` of pure product states."""

    weights: np.ndarray
    alphas: np.ndarray  # (n, d_A) unit rows
    betas: np.ndarray  # (n, d_B) unit rows

    def __post_init__(self):
        p = np.asarray(self.weights, dtype=float).reshape(-1)
        a = np.atleast_2d(np.asarray(self.alphas, dtype=complex))
        b = np.atleast_2d(np.asarray(self.betas, dtype=complex))
        if not (len(p) == a.shape[0] == b.shape[0]):
            raise DimMismatch("weights, alphas and betas must have the same length")
        if np.any(p <= 0):
            raise ValueError("separable weights must be strictly positive")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {p.sum()!r}, not 1")
        a = a / np.linalg.norm(a, axis=1, keepdims=True)
        b = b / np.linalg.norm(b, axis=1, keepdims=True)
        for x in (p, a, b):
            x.setflags(write=False)
        object.__setattr__(self, "weights", p)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "betas", b)

    @property
    def n_terms(self) -> int:
        return len(self.weights)

    @property
    def dims(self) -> tuple[int, int]:
        return self.alphas.shape[1], self.betas.shape[1]

    def terms(self):
        return list(zip(self.weights, self.alphas, self.betas))

    def state(self) -> DensityMatrix:
        da, db = self.dims
        rho = np.zeros((da * db, da * db), dtype=complex)
        for p, a, b in self.terms():
            v = np.kron(a, b)
            rho += p * np.outer(v, v.conj())
        return DensityMatrix(rho, (da, db), 1)


# --------------------------------------------------------------------------- #
#                               operations                                     #
# --------------------------------------------------------------------------- #

def density_report(data, dims=None) -> list[Violation]:
    """List every density-matrix invariant ``data`` violates (empty if valid)."""
    a = np.asarray(data, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return [Violation("DimMismatch", float("nan"))]
    dims = _dims_tuple(dims, a.shape[0])
    if math.prod(dims) != a.shape[0] or any(d < 1 for d in dims):
        return [Violation("DimMismatch", float(abs(math.prod(dims) - a.shape[0])))]
    out = []
    h = hermitian_residual(a)
    if h > HERMITIAN_TOL:
        out.append(Violation("NonHermitian", h))
    t = abs(np.trace(a) - 1.0)
    if t > TRACE_TOL:
        out.append(Violation("TraceNotOne", float(t)))
    w_min = float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0]) if a.size else 0.0
    if w_min < -PSD_TOL:
        out.append(Violation("NotPSD", -w_min))
    return out


_ERROR_TYPES = {"NonHermitian": NonHermitian, "TraceNotOne": TraceNotOne, "NotPSD": NotPSD}


def validate_density(data, dims=None, split: int | None = None) -> DensityMatrix:
    """Check ``data`` against the density-matrix invariants and wrap it.

    Raises the error class of the first violated invariant; the exception's
    ``violations`` attribute carries all of them. Eigenvalues in
    ``[-PSD_TOL, 0)`` are tolerated and flagged via ``psd_clamped`` (the data
    is stored unchanged; spectral consumers treat them as zero).
    """
    a = np.asarray(data, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"density matrix must be square, got shape {a.shape}")
    dims = _dims_tuple(dims, a.shape[0])
    if math.prod(dims) != a.shape[0]:
        raise DimMismatch(f"dims {dims} do not multiply to {a.shape[0]}")
    if any(d < 1 for d in dims):
        raise DimMismatch(f"subsystem dimensions must be positive, got {dims}")
    if split is not None and not 0 < split < len(dims):
        raise DimMismatch(f"split {split} invalid for {len(dims)} subsystems")
    violations = density_report(a, dims)
    if violations:
        raise _ERROR_TYPES.get(violations[0].kind, StateValidationError)(violations)
    clamped = bool(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0] < 0)
    return DensityMatrix(a, dims, split, clamped)


def pure_state(vec, dims=None, split: int | None = None) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()), _dims_tuple(dims, v.size), split)


def _as_array(x) -> np.ndarray:
    return x.data if isinstance(x, DensityMatrix) else np.asarray(x, dtype=complex)


def kron(x: DensityMatrix, y: DensityMatrix, split: int | None = None) -> DensityMatrix:
    """Tensor product with ``x`` on the left (most significant) factor."""
    return DensityMatrix(np.kron(x.data, y.data), x.dims + y.dims, split)


def _check_indices(idx: Iterable[int], n: int) -> list[int]:
    idx = list(idx)
    for i in idx:
        if not isinstance(i, (int, np.integer)) or not 0 <= i < n:
            raise BadSubsystemIndex(f"subsystem index {i!r} out of range for {n} subsystems")
    if len(set(idx)) != len(idx):
        raise BadSubsystemIndex(f"repeated subsystem index in {idx}")
    return [int(i) for i in idx]


def partial_trace(rho: DensityMatrix, drop) -> DensityMatrix:
    """Trace out the subsystems listed in ``drop``."""
    n = rho.n_subsystems
    drop = _check_indices([drop] if np.ndim(drop) == 0 else drop, n)
    keep = [i for i in range(n) if i not in drop]
    if not keep:
        raise BadSubsystemIndex("cannot trace out every subsystem")
    split = None
    if rho.split is not None or n == 2:
        s = rho.bipartition()
        new = sum(1 for i in keep if i < s)
        split = new if 0 < new < len(keep) else None
    return DensityMatrix(ptrace(rho.data, rho.dims, keep), tuple(rho.dims[i] for i in keep), split)


def degeneracy_blocks(vals: np.ndarray, gap: float = DEGENERACY_GAP) -> tuple[tuple[int, ...], ...]:
    """Group consecutive (sorted) eigenvalues closer than ``gap``."""
    blocks: list[list[int]] = []
    for i, v in enumerate(vals):
        if blocks and abs(vals[blocks[-1][-1]] - v) <= gap:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return tuple(tuple(b) for b in blocks)


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.flatnonzero(np.abs(col) > _PHASE_THRESHOLD)
        if nz.size:
            z = col[nz[0]]
            out[:, j] = col * (abs(z) / z)
    return out


def eigh(h) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic Hermitian eigendecomposition.

    Eigenvalues come out in descending order. Each eigenvector has its first
    entry above 1e-10 in modulus made real-positive, and exactly tied
    eigenvalues (equal to 12 decimals) are ordered by descending lexicographic
    comparison of their rounded entries.
    """
    a = _as_array(h)
    res = hermitian_residual(a)
    if res > HERMITIAN_TOL:
        raise NonHermitian([Violation("NonHermitian", res)])
    vals, vecs = np.linalg.eigh(0.5 * (a + a.conj().T))
    vals = vals[::-1]
    vecs = _fix_phases(vecs[:, ::-1])
    rounded = np.round(vals, _TIE_DECIMALS)
    keys = []
    for j in range(len(vals)):
        c = np.round(vecs[:, j], 10)
        entries = tuple(x for z in c for x in (-z.real, -z.imag))
        keys.append((-rounded[j],) + entries)
    order = sorted(range(len(vals)), key=lambda j: keys[j])
    return vals[order], vecs[:, order]


def apply_unitary(rho: DensityMatrix, u: np.ndarray, on) -> DensityMatrix:
    """Conjugate ``rho`` by ``u`` acting on the subsystems listed in ``on`` (in that order)."""
    on = _check_indices([on] if np.ndim(on) == 0 else on, rho.n_subsystems)
    u = np.asarray(u, dtype=complex)
    d_on = math.prod(rho.dims[i] for i in on)
    if u.shape != (d_on, d_on):
        raise DimMismatch(f"unitary of shape {u.shape} does not act on dimension {d_on}")
    res = unitary_residual(u)
    if res > UNITARY_TOL:
        raise DimMismatch(f"operator is not unitary (residual {res:.3g})", res)
    return rho.with_data(conjugate_local(rho.data, rho.dims, u, on))


def swap_bipartite(rho: DensityMatrix) -> DensityMatrix:
    """Exchange the A and B halves; requires ``dim(A) == dim(B)``."""
    s = rho.bipartition()
    da, db = rho.dim_a, rho.dim_b
    if da != db:
        raise DimMismatch(f"swap needs equal sides, got dim(A)={da}, dim(B)={db}", abs(da - db))
    data = swap_halves(rho.data, da)
    dims = rho.dims[s:] + rho.dims[:s]
    return DensityMatrix(data, dims, len(rho.dims) - s)


def numerical_rank(vals: np.ndarray, tol: float = RANK_TOL) -> int:
    return int(np.sum(vals > tol))


def purify(rho: DensityMatrix, tol: float = RANK_TOL) -> tuple[np.ndarray, int]:
    """Canonical purification ``sum_k sqrt(p_k) |e_k>|k>`` on system x ancilla.

    Returns the vector (system index most significant) and the ancilla
    dimension, equal to the numerical rank at threshold ``tol``.
    """
    vals, vecs = eigh(rho.data)
    r = max(1, numerical_rank(vals, tol))
    cols = vecs[:, :r] * np.sqrt(np.clip(vals[:r], 0.0, None))
    return cols.reshape(-1), r


def frobenius_distance(x, y) -> float:
    a, b = _as_array(x), _as_array(y)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def permute_subsystems(rho: DensityMatrix, order: Sequence[int], split: int | None = None) -> DensityMatrix:
    order = _check_indices(order, rho.n_subsystems)
    if len(order) != rho.n_subsystems:
        raise BadSubsystemIndex("order must list every subsystem once")
    return DensityMatrix(permute(rho.data, rho.dims, order), tuple(rho.dims[i] for i in order), split)

"""Extensions of bipartite states, unitary symmetry and the entanglement-of-coherence bound.

An extension of ``rho`` on ``A|B`` is a state on ``AA'|BB'`` whose partial
trace over the ancillas ``A'`` and ``B'`` returns ``rho``. Extension states
are stored with subsystems ordered ``(A..., A', B..., B')`` and the cut right
after ``A'``.

Every optimiser-produced number here is an upper bound on the quantity it
minimises, at the given ancilla dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coherence import l1_offdiag
from .correlated import (
    CanonicalBasisMode,
    cc_in_frame,
    correlated_coherence_canonical,
)
from .errors import (
    DimMismatch,
    NoSymmetricCandidateFound,
    NotClassicalOnRegistry,
    OptimizerDidNotConverge,
)
from .optimize import (
    OptimizerConfig,
    OptimizerReport,
    isometry_from_params,
    multistart_minimize,
    unitary_from_params,
)
from .rng import CounterRNG
from .state import (
    DensityMatrix,
    LocalBasis,
    ProductBasisChoice,
    SeparableDecomposition,
    _check_indices,
    conjugate_local,
    degeneracy_blocks,
    eigh,
    frobenius_distance,
    permute,
    permute_vector,
    ptrace,
    purify,
    swap_halves,
)
from .stategen import haar_unitary

__all__ = [
    "ExtensionResult",
    "SeparableDecomposition",
    "SymmetryCertificate",
    "LoccProbeReport",
    "symmetry_certificate",
    "unitary_symmetry_residual",
    "separable_extension",
    "ensemble_extension",
    "min_cc_extension",
    "eoc_upper_bound",
    "mixture_extension",
    "transport_extension",
    "restrict_extension",
    "projection_dilation",
    "classical_copy",
    "locc_round_probe",
    "equalizing_ancillas",
    "pad_to_equal_sides",
]

SYMMETRY_GATE = 1e-4
SPECTRUM_GAP = 1e-8
_ZERO_CC = 1e-12
_NULL = 1e-12

DEFAULT_SYMMETRY_CONFIG = OptimizerConfig(restarts=4, max_iters=3000, method="Powell", target=1e-12)
DEFAULT_EXTENSION_CONFIG = OptimizerConfig(restarts=32, max_iters=2000, method="Powell")
DEFAULT_ENSEMBLE_CONFIG = OptimizerConfig(restarts=8, max_iters=6000, method="Nelder-Mead")
_LIGHT_CC_CONFIG = OptimizerConfig(restarts=3, max_iters=1500, method="Nelder-Mead", target=1e-14)


# --------------------------------------------------------------------------- #
#                                result types                                  #
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class ExtensionResult:
    """A candidate extension together with its certificates.

    ``cc_value`` is the correlated coherence of ``state`` across ``AA'|BB'``
    evaluated in ``basis``, which diagonalises both marginals.
    ``symmetry_residual`` is the swap residual reached with
    ``symmetry_unitaries`` ``(U, V)``; when ``symmetry_lower_bound`` is set it
    is instead a spectral lower bound and no unitaries are attached.
    """

    state: DensityMatrix
    system: DensityMatrix
    ancilla_dims: tuple[int, int]
    cc_value: float
    basis: ProductBasisChoice
    symmetry_residual: float
    marginal_residual: float
    symmetry_unitaries: tuple[np.ndarray, np.ndarray] | None = None
    symmetry_lower_bound: bool = False
    optimizer_report: OptimizerReport | None = None
    label: str = ""

    @property
    def system_dims(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.system.dims_a, self.system.dims_b

    @property
    def value(self) -> float:
        return self.cc_value

    def marginal(self) -> DensityMatrix:
        return _drop_ancillas(self.state)

    def summary(self) -> dict:
        out = {
            "value": float(self.cc_value),
            "ancilla_dims": list(self.ancilla_dims),
            "symmetry_residual": float(self.symmetry_residual),
            "symmetry_lower_bound": bool(self.symmetry_lower_bound),
            "marginal_residual": float(self.marginal_residual),
            "label": self.label,
        }
        if self.optimizer_report is not None:
            out["restarts_used"] = self.optimizer_report.restarts_used
            out["n_evaluations"] = self.optimizer_report.n_evaluations
        return out


@dataclass(frozen=True, eq=False)
class SymmetryCertificate:
    """Outcome of the swap-symmetry search.

    With ``lower_bound`` false, ``residual`` is attained by ``(u, v)``;
    otherwise the marginal spectra differ and ``residual`` is a certified
    lower bound ``||spec_A - spec_B||_2 / sqrt(d)``.
    """

    residual: float
    u: np.ndarray | None
    v: np.ndarray | None
    lower_bound: bool
    report: OptimizerReport | None = None


@dataclass(frozen=True, eq=False)
class LoccProbeReport:
    before: float
    after: float
    monotone_ok: bool
    slack: float
    output: DensityMatrix
    before_result: ExtensionResult
    after_result: ExtensionResult


# --------------------------------------------------------------------------- #
#                              layout helpers                                  #
# --------------------------------------------------------------------------- #

def equalizing_ancillas(da: int, db: int, min_a: int = 1, min_b: int = 1) -> tuple[int, int]:
    """Smallest ancilla dims ``(a, b)`` with ``a >= min_a``, ``b >= min_b`` and ``da*a == db*b``."""
    lcm = da * db // math.gcd(da, db)
    step_a, step_b = lcm // da, lcm // db
    t = max(1, -(-min_a // step_a), -(-min_b // step_b))
    return step_a * t, step_b * t


def pad_to_equal_sides(rho: DensityMatrix) -> DensityMatrix:
    """Append pure ``|0>`` ancillas to each side until ``dim(A) == dim(B)``.

    The padding goes at the end of each side; a state whose sides already
    match is returned unchanged.
    """
    da, db = rho.dim_a, rho.dim_b
    if da == db:
        return rho
    pa, pb = equalizing_ancillas(da, db)
    s = rho.bipartition()
    n = rho.n_subsystems
    x = np.kron(np.kron(rho.data, _ket0(pa)), _ket0(pb))
    dims = rho.dims + (pa, pb)
    order = list(range(s)) + [n] + list(range(s, n)) + [n + 1]
    return DensityMatrix(permute(x, dims, order), tuple(dims[i] for i in order), s + 1)


def _ket0(d: int) -> np.ndarray:
    p = np.zeros((d, d))
    p[0, 0] = 1
    return p


def _ext_dims(system: DensityMatrix, anc: tuple[int, int]) -> tuple[tuple[int, ...], int]:
    dims = system.dims_a + (anc[0],) + system.dims_b + (anc[1],)
    return dims, len(system.dims_a) + 1


def _drop_ancillas(ext: DensityMatrix) -> DensityMatrix:
    s = ext.bipartition()
    n = ext.n_subsystems
    keep = [i for i in range(n) if i not in (s - 1, n - 1)]
    dims = tuple(ext.dims[i] for i in keep)
    return DensityMatrix(ptrace(ext.data, ext.dims, keep), dims, s - 1)


def _make_result(
    state_arr: np.ndarray,
    system: DensityMatrix,
    anc: tuple[int, int],
    cc_value: float,
    basis: ProductBasisChoice,
    sym: SymmetryCertificate,
    report: OptimizerReport | None = None,
    label: str = "",
) -> ExtensionResult:
    dims, split = _ext_dims(system, anc)
    state = DensityMatrix(0.5 * (state_arr + state_arr.conj().T), dims, split)
    marg = _drop_ancillas(state)
    return ExtensionResult(
        state=state,
        system=system,
        ancilla_dims=(int(anc[0]), int(anc[1])),
        cc_value=float(cc_value),
        basis=basis,
        symmetry_residual=float(sym.residual),
        marginal_residual=frobenius_distance(marg.data, system.data),
        symmetry_unitaries=None if sym.u is None else (sym.u, sym.v),
        symmetry_lower_bound=sym.lower_bound,
        optimizer_report=report,
        label=label,
    )


def _fast_cc(x: np.ndarray, dx: int, dy: int) -> float:
    """Correlated coherence in some (unspecified) eigenbasis pair of the marginals.

    The marginals are diagonal in that frame, so only the total l1 coherence
    is summed.
    """
    t = x.reshape(dx, dy, dx, dy)
    _, va = np.linalg.eigh(np.einsum("ajbj->ab", t))
    _, vb = np.linalg.eigh(np.einsum("iaib->ab", t))
    u = np.kron(va, vb)
    return l1_offdiag(u.conj().T @ x @ u)


def _diagonalises(x: np.ndarray, dx: int, dy: int, basis: ProductBasisChoice, tol: float = 1e-10) -> bool:
    ra = basis.basis_a.vectors.conj().T @ ptrace(x, (dx, dy), [0]) @ basis.basis_a.vectors
    rb = basis.basis_b.vectors.conj().T @ ptrace(x, (dx, dy), [1]) @ basis.basis_b.vectors
    return l1_offdiag(ra) <= tol and l1_offdiag(rb) <= tol


def _canonical_cc(
    x: np.ndarray, dx: int, dy: int, hint: ProductBasisChoice | None = None, config: OptimizerConfig | None = None
) -> tuple[float, ProductBasisChoice]:
    """Smallest correlated coherence found among the hint and the canonical search."""
    best = (math.inf, None)
    if hint is not None and _diagonalises(x, dx, dy, hint):
        u = hint.matrix
        best = (cc_in_frame(u.conj().T @ x @ u, dx, dy), hint)
        if best[0] <= _ZERO_CC:
            return best
    res = correlated_coherence_canonical(
        DensityMatrix(x, (dx, dy), 1), CanonicalBasisMode.MINIMIZED, config or _LIGHT_CC_CONFIG
    )
    if res.value < best[0]:
        best = (res.value, res.basis)
    return best


def _flag_basis(vectors: list[np.ndarray], d_sys: int, d_anc: int) -> np.ndarray:
    """Complete ``vectors`` (each ``sys (x) anc``) to an orthonormal basis, keeping their order."""
    cols = np.array(vectors).T.reshape(d_sys * d_anc, -1) if vectors else np.zeros((d_sys * d_anc, 0))
    comp = _complement(cols)
    return np.hstack([cols, comp])


def _complement(cols: np.ndarray) -> np.ndarray:
    d, k = cols.shape
    if k == 0:
        return np.eye(d, dtype=complex)
    q, _ = np.linalg.qr(np.hstack([cols, np.eye(d, dtype=complex)]))
    # columns k.. of the QR of [cols | I] span the complement of span(cols)
    return q[:, k:d]


# --------------------------------------------------------------------------- #
#                             unitary symmetry                                 #
# --------------------------------------------------------------------------- #

def _swap_residual(x: np.ndarray, s: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    w = np.kron(u, v)
    return float(np.linalg.norm(w @ s @ w.conj().T - x))


def _spectral_bound(x: np.ndarray, d: int) -> tuple[float, float]:
    la = np.linalg.eigvalsh(ptrace(x, (d, d), [0]))
    lb = np.linalg.eigvalsh(ptrace(x, (d, d), [1]))
    diff = la - lb
    return float(np.max(np.abs(diff))), float(np.linalg.norm(diff) / math.sqrt(d))


def _reduced_symmetry_search(
    x: np.ndarray, d: int, config: OptimizerConfig, candidates: Sequence[tuple[np.ndarray, np.ndarray]] = ()
) -> SymmetryCertificate:
    """Search ``U = V_A R_1 V_B^dagger``, ``V = V_B R_2 V_A^dagger`` over block unitaries ``R_i``.

    Any exact symmetry must map the eigenspaces of one marginal onto the
    matching eigenspaces of the other, so only rotations inside (non-null)
    eigenspaces are free parameters.
    """
    s = swap_halves(x, d)
    best = (math.inf, None, None)
    for u, v in candidates:
        r = _swap_residual(x, s, u, v)
        if r < best[0]:
            best = (r, u, v)
    la, va = eigh(ptrace(x, (d, d), [0]))
    lb, vb = eigh(ptrace(x, (d, d), [1]))
    gap = max(SPECTRUM_GAP, 10 * float(np.max(np.abs(la - lb))))
    blocks = [b for b in degeneracy_blocks(0.5 * (la + lb), gap) if la[b[0]] > _NULL or lb[b[0]] > _NULL]
    sizes = [len(b) for b in blocks]
    n1 = sum(k * k for k in sizes)

    def block_unitary(params, base):
        r = base.copy()
        pos = 0
        for b, k in zip(blocks, sizes):
            idx = np.array(b)
            r[np.ix_(idx, idx)] = base[np.ix_(idx, idx)] @ unitary_from_params(params[pos: pos + k * k], k)
            pos += k * k
        return r

    def pair(params, b1, b2):
        r1 = block_unitary(params[:n1], b1)
        r2 = block_unitary(params[n1:], b2)
        return va @ r1 @ vb.conj().T, vb @ r2 @ va.conj().T

    rng = CounterRNG(config.seed, stream=7)
    report = OptimizerReport()
    if best[0] > (config.target or 0.0):
        for i in range(config.restarts):
            b1 = np.eye(d, dtype=complex)
            b2 = np.eye(d, dtype=complex)
            if i > 0:
                for b, k in zip(blocks, sizes):
                    idx = np.array(b)
                    b1[np.ix_(idx, idx)] = haar_unitary(k, rng)
                    b2[np.ix_(idx, idx)] = haar_unitary(k, rng)

            def obj(p, b1=b1, b2=b2):
                u, v = pair(p, b1, b2)
                return _swap_residual(x, s, u, v)

            p, sub = multistart_minimize(obj, [np.zeros(2 * n1)], config, n_restarts=1)
            report.merge(sub)
            if sub.best_value < best[0]:
                u, v = pair(p, b1, b2)
                best = (_swap_residual(x, s, u, v), u, v)
            if config.target is not None and best[0] <= config.target:
                break
    return SymmetryCertificate(best[0], best[1], best[2], False, report)


def symmetry_certificate(
    ext: DensityMatrix,
    config: OptimizerConfig | None = None,
    candidates: Sequence[tuple[np.ndarray, np.ndarray]] = (),
) -> SymmetryCertificate:
    """Minimise ``||(U x V) swap(rho) (U x V)^dagger - rho||_F`` over local unitaries.

    When the sorted spectra of the two sides differ by more than 1e-8 the
    search is skipped and a strictly positive lower bound is returned.
    """
    config = DEFAULT_SYMMETRY_CONFIG if config is None else config
    d = ext.dim_a
    if ext.dim_b != d:
        raise DimMismatch(f"symmetry test needs equal sides, got {ext.dim_a} and {d}", abs(ext.dim_b - d))
    gap_max, bound = _spectral_bound(ext.data, d)
    if gap_max > SPECTRUM_GAP:
        return SymmetryCertificate(bound, None, None, True)
    return _reduced_symmetry_search(ext.data, d, config, candidates)


def unitary_symmetry_residual(ext: DensityMatrix, config: OptimizerConfig | None = None) -> float:
    """Swap-symmetry residual of ``ext`` across its bipartition (see :func:`symmetry_certificate`)."""
    return symmetry_certificate(ext, config).residual


def _symmetry_upper(x: np.ndarray, d: int, config: OptimizerConfig, candidates=()) -> SymmetryCertificate:
    """Attained residual (never a bare lower bound) for the acceptance gate."""
    gap_max, bound = _spectral_bound(x, d)
    if bound > SYMMETRY_GATE:
        return SymmetryCertificate(bound, None, None, True)
    return _reduced_symmetry_search(x, d, config, candidates)


# --------------------------------------------------------------------------- #
#                      structured extensions (certified)                      #
# --------------------------------------------------------------------------- #

def _check_anc(anc, need_a: int, need_b: int, what: str) -> tuple[int, int]:
    a, b = int(anc[0]), int(anc[1])
    if a < 1 or b < 1:
        raise DimMismatch(f"ancilla dims must be >= 1, got {anc}")
    if a < need_a or b < need_b:
        raise DimMismatch(f"{what} needs ancilla dims >= ({need_a}, {need_b}), got ({a}, {b})")
    return a, b


def _flagged_state(
    pieces: Sequence[np.ndarray], da: int, db: int, anc: tuple[int, int]
) -> np.ndarray:
    """``sum_k v_k v_k^dagger (x) |k><k|_A' (x) |k><k|_B'`` in the extension layout, ``v_k`` on AB."""
    a1, b1 = anc
    out = np.zeros((da, a1, db, b1), dtype=complex)
    x = np.zeros((out.size, out.size), dtype=complex)
    for k, vec in enumerate(pieces):
        out[:] = 0
        out[:, k, :, k] = vec.reshape(da, db)
        f = out.reshape(-1)
        x += np.outer(f, f.conj())
    return x


def _schmidt_flag_bases(pieces, da: int, db: int, anc: tuple[int, int]):
    """Product basis diagonalising both marginals of a flagged pure-state mixture, plus the swap unitaries."""
    a1, b1 = anc
    m = min(da, db)
    cols_a, cols_b = [], []
    for k, vec in enumerate(pieces):
        u, _, vh = np.linalg.svd(vec.reshape(da, db))
        for i in range(m):
            fa = np.zeros(a1, dtype=complex)
            fb = np.zeros(b1, dtype=complex)
            fa[k] = 1
            fb[k] = 1
            cols_a.append(np.kron(u[:, i], fa))
            cols_b.append(np.kron(vh[i, :], fb))
    ba = _flag_basis(cols_a, da, a1)
    bb = _flag_basis(cols_b, db, b1)
    basis = ProductBasisChoice(LocalBasis(ba), LocalBasis(bb))
    unitaries = None
    if da * a1 == db * b1:
        # pair the Schmidt columns one to one; complements are paired arbitrarily
        u = ba @ bb.conj().T
        unitaries = (u, u.conj().T)
    return basis, unitaries


def _flagged_result(pieces, system: DensityMatrix, anc, label, report=None, config=None) -> ExtensionResult:
    da, db = system.dim_a, system.dim_b
    x = _flagged_state(pieces, da, db, anc)
    basis, unitaries = _schmidt_flag_bases(pieces, da, db, anc)
    dx, dy = da * anc[0], db * anc[1]
    u = basis.matrix
    cc = cc_in_frame(u.conj().T @ x @ u, dx, dy)
    if dx == dy:
        s = swap_halves(x, dx)
        sym = SymmetryCertificate(_swap_residual(x, s, *unitaries), unitaries[0], unitaries[1], False)
    else:
        sym = symmetry_certificate(pad_to_equal_sides(DensityMatrix(x, (dx, dy), 1)))
    return _make_result(x, system, anc, cc, basis, sym, report, label)


def separable_extension(decomp: SeparableDecomposition, ancilla_dims: tuple[int, int] | None = None) -> ExtensionResult:
    """Flagged witness ``sum_i p_i |a_i, i><a_i, i| (x) |b_i, i><b_i, i|``.

    Its correlated coherence is zero in the product basis ``{|a_i, i>}``,
    ``{|b_i, i>}`` and it is swap symmetric up to the local unitaries mapping
    ``|b_i, i>`` to ``|a_i, i>``. Ancilla dims default to ``(n, n)``.
    """
    n = decomp.n_terms
    da, db = decomp.dims
    if ancilla_dims is None:
        ancilla_dims = equalizing_ancillas(da, db, n, n)
    anc = _check_anc(ancilla_dims, n, n, "a separable witness")
    pieces = [math.sqrt(p) * np.kron(a, b) for p, a, b in decomp.terms()]
    return _flagged_result(pieces, decomp.state(), anc, "separable-witness")


def _ensemble_pieces(psi: np.ndarray, mix: np.ndarray) -> list[np.ndarray]:
    # psi: (d_AB, r) columns sqrt(lambda_j) e_j ; mix: (K, r) isometry
    return list(mix @ psi.T)


def _ensemble_cost(psi: np.ndarray, mix: np.ndarray, da: int, db: int) -> float:
    c = (mix @ psi.T).reshape(-1, da, db)
    if da == 2 or db == 2:
        # two singular values: s1 + s2 = sqrt(s1^2 + s2^2 + 2 |det|)
        g = c @ c.conj().transpose(0, 2, 1) if da == 2 else c.conj().transpose(0, 2, 1) @ c
        det = np.abs(g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] * g[:, 1, 0])
        return float(2 * np.sum(np.sqrt(det)))
    s = np.linalg.svd(c, compute_uv=False)
    return float(np.sum(np.sum(s, axis=1) ** 2) - np.sum(s * s))


def _witness_mixing(psi: np.ndarray, decomp: SeparableDecomposition) -> np.ndarray:
    lam = np.sum(np.abs(psi) ** 2, axis=0)
    phi = np.array([math.sqrt(p) * np.kron(a, b) for p, a, b in decomp.terms()])
    return (phi @ psi.conj()) / lam


def _optimise_mixing(rho: DensityMatrix, k: int, config: OptimizerConfig) -> tuple[np.ndarray, OptimizerReport]:
    da, db = rho.dim_a, rho.dim_b
    vec, r = purify(rho)
    psi = vec.reshape(da * db, r)
    base = np.zeros((k, r), dtype=complex)
    base[:r, :r] = np.eye(r)
    rng = CounterRNG(config.seed, stream=11)

    def obj(p):
        return _ensemble_cost(psi, isometry_from_params(p, k, r), da, db)

    def random_start(_i):
        return rng.normal(2 * k * r)

    start = np.concatenate([base.real.reshape(-1), base.imag.reshape(-1)])
    p, report = multistart_minimize(obj, [start], config, random_start=random_start)
    return isometry_from_params(p, k, r), report


def ensemble_extension(
    rho: DensityMatrix,
    n_components: int | None = None,
    config: OptimizerConfig | None = None,
    ancilla_dims: tuple[int, int] | None = None,
    mixing: np.ndarray | None = None,
) -> ExtensionResult:
    """Flagged pure-state ensemble extension, optimised over decompositions.

    ``rho = sum_k |v_k><v_k|`` with ``v_k = sum_j M_kj sqrt(lambda_j) e_j``
    for an isometry ``M``; the extension ``sum_k |v_k><v_k| (x) |kk><kk|``
    is swap symmetric and has correlated coherence
    ``sum_k (||C_k||_*^2 - ||C_k||_F^2)`` (``C_k`` the coefficient matrix of
    ``v_k``). ``M`` is searched unless ``mixing`` is given.
    """
    config = DEFAULT_ENSEMBLE_CONFIG if config is None else config
    da, db = rho.dim_a, rho.dim_b
    vec, r = purify(rho)
    k = r if n_components is None else int(n_components)
    if k < r:
        raise DimMismatch(f"need at least rank = {r} components, got {k}")
    if ancilla_dims is None:
        ancilla_dims = equalizing_ancillas(da, db, k, k)
    anc = _check_anc(ancilla_dims, k, k, "an ensemble extension")
    report = None
    if mixing is None:
        mixing, report = _optimise_mixing(rho, k, config)
    mixing = np.asarray(mixing, dtype=complex)
    if mixing.shape != (k, r):
        raise DimMismatch(f"mixing isometry must have shape ({k}, {r})")
    return _flagged_result(_ensemble_pieces(vec.reshape(da * db, r), mixing), rho, anc, "ensemble", report)


# --------------------------------------------------------------------------- #
#                    purification-isometry parameterisation                    #
# --------------------------------------------------------------------------- #

class _IsometryFamily:
    """Extensions ``Tr_G[(1 x W)|psi><psi|(1 x W)^dagger]`` of a fixed state."""

    def __init__(self, rho: DensityMatrix, anc: tuple[int, int], env_dim: int):
        self.rho = rho
        self.da, self.db = rho.dim_a, rho.dim_b
        self.anc = anc
        vec, self.r = purify(rho)
        self.psi = vec.reshape(self.da * self.db, self.r)
        self.g = env_dim
        self.n = anc[0] * anc[1] * env_dim
        self.dx = self.da * anc[0]
        self.dy = self.db * anc[1]
        if self.n < self.r:
            raise DimMismatch(f"ancillas ({anc}) x environment {env_dim} too small for rank {self.r}")

    def state(self, w: np.ndarray) -> np.ndarray:
        phi = self.psi @ w.T  # (d_AB, n)
        t = phi.reshape(self.da, self.db, self.anc[0], self.anc[1], self.g).transpose(0, 2, 1, 3, 4)
        m = t.reshape(self.dx * self.dy, self.g)
        return m @ m.conj().T

    def flagged(self, mix: np.ndarray) -> np.ndarray:
        """``W |j> = sum_k M_kj |k, k, k>``: the isometry behind a flagged ensemble."""
        k = mix.shape[0]
        w = np.zeros((self.anc[0], self.anc[1], self.g, self.r), dtype=complex)
        for i in range(k):
            w[i, i, i, :] = mix[i]
        return w.reshape(self.n, self.r)

    def trivial(self) -> np.ndarray:
        w = np.zeros((self.anc[0], self.anc[1], self.g, self.r), dtype=complex)
        for j in range(self.r):
            w[0, 0, j, j] = 1
        return w.reshape(self.n, self.r)


def _random_isometry_params(rng: CounterRNG, n: int, r: int) -> np.ndarray:
    return rng.normal(2 * n * r)


def _unpack_w(p: np.ndarray, w0: np.ndarray, n: int, r: int) -> np.ndarray:
    delta = (p[: n * r] + 1j * p[n * r: 2 * n * r]).reshape(n, r)
    m = w0 + delta
    u, _, vh = np.linalg.svd(m, full_matrices=False)
    return u @ vh


@dataclass
class _Candidate:
    label: str
    w: np.ndarray | None
    x: np.ndarray
    cc: float
    basis: ProductBasisChoice | None = None
    sym: SymmetryCertificate | None = None
    extra: dict = field(default_factory=dict)


def _resolve_anc(rho: DensityMatrix, ancilla_dims, decomposition, equal: bool) -> tuple[int, int]:
    da, db = rho.dim_a, rho.dim_b
    if ancilla_dims is None:
        n = decomposition.n_terms if decomposition is not None else 0
        ancilla_dims = (max(da, n), max(db, n))
    a, b = _check_anc(ancilla_dims, 1, 1, "an extension")
    if equal and da * a != db * b:
        a, b = equalizing_ancillas(da, db, a, b)
    return a, b


def _seed_candidates(
    fam: _IsometryFamily, decomposition, config: OptimizerConfig, with_symmetry: bool, use_ensemble: bool
) -> list[_Candidate]:
    rho, anc = fam.rho, fam.anc
    out: list[_Candidate] = []
    if decomposition is not None:
        n = decomposition.n_terms
        if decomposition.dims != (fam.da, fam.db):
            raise DimMismatch("decomposition dims do not match the state")
        if n <= min(anc[0], anc[1], fam.g):
            res = separable_extension(decomposition, anc)
            mix = _witness_mixing(fam.psi, decomposition)
            out.append(_Candidate("separable-witness", fam.flagged(mix), res.state.data, res.cc_value, res.basis,
                                  _cert_from(res)))
            if res.cc_value <= _ZERO_CC and res.symmetry_residual <= SYMMETRY_GATE:
                return out
    k = fam.r
    if use_ensemble and k <= min(anc[0], anc[1], fam.g) and (fam.r > 1 or not out):
        ens_cfg = DEFAULT_ENSEMBLE_CONFIG.replace(seed=config.seed, threads=config.threads)
        mix, _ = _optimise_mixing(rho, k, ens_cfg)
        res = ensemble_extension(rho, k, ancilla_dims=anc, mixing=mix)
        out.append(_Candidate("ensemble", fam.flagged(mix), res.state.data, res.cc_value, res.basis,
                              _cert_from(res)))
    w = fam.trivial()
    x = fam.state(w)
    canon = correlated_coherence_canonical(rho, CanonicalBasisMode.MINIMIZED)
    hint = ProductBasisChoice(
        LocalBasis(np.kron(canon.basis.basis_a.vectors, np.eye(anc[0]))),
        LocalBasis(np.kron(canon.basis.basis_b.vectors, np.eye(anc[1]))),
    )
    cc, basis = _canonical_cc(x, fam.dx, fam.dy, hint)
    sym = None
    if with_symmetry:
        sym = _symmetry_upper(x, fam.dx, DEFAULT_SYMMETRY_CONFIG.replace(seed=config.seed))
    out.append(_Candidate("trivial", w, x, cc, basis, sym))
    return out


def _cert_from(res: ExtensionResult) -> SymmetryCertificate:
    u, v = res.symmetry_unitaries if res.symmetry_unitaries is not None else (None, None)
    return SymmetryCertificate(res.symmetry_residual, u, v, res.symmetry_lower_bound)


# --------------------------------------------------------------------------- #
#                         minimum-cc extension search                          #
# --------------------------------------------------------------------------- #

def min_cc_extension(
    rho: DensityMatrix,
    ancilla_dims: tuple[int, int] | None = None,
    config: OptimizerConfig | None = None,
    decomposition: SeparableDecomposition | None = None,
    env_dim: int | None = None,
) -> ExtensionResult:
    """Smallest correlated coherence found over extensions ``AA'|BB'`` (no symmetry constraint).

    Extensions are ``Tr_G[(1 x W)|psi><psi|(1 x W)^dagger]`` with ``psi`` the
    canonical purification and ``W`` an isometry into ``A'B'G`` (the polar
    factor of an unconstrained matrix). Restarts are seeded with the trivial
    extension, the separable witness when ``decomposition`` is given, and a
    flagged-ensemble extension when the ancillas fit one. The result is an
    upper bound on the minimum at these ancilla dimensions.
    """
    config = DEFAULT_EXTENSION_CONFIG if config is None else config
    anc = _resolve_anc(rho, ancilla_dims, decomposition, equal=False)
    fam = _IsometryFamily(rho, anc, _env_dim(rho, decomposition, env_dim))
    seeds = _seed_candidates(fam, decomposition, config, with_symmetry=False, use_ensemble=True)
    best = min(seeds, key=lambda c: c.cc)
    report = OptimizerReport()
    stop = max(_ZERO_CC, config.target or 0.0)
    rng = CounterRNG(config.seed, stream=21)
    nr = fam.n * fam.r
    if best.cc > stop:
        warm = [c.w for c in seeds if c.w is not None]
        for i in range(config.restarts):
            if i < len(warm):
                w0 = warm[i]
            else:
                w0 = isometry_from_params(_random_isometry_params(rng, fam.n, fam.r), fam.n, fam.r)

            def obj(p, w0=w0):
                return _fast_cc(fam.state(_unpack_w(p, w0, fam.n, fam.r)), fam.dx, fam.dy)

            p, sub = multistart_minimize(obj, [np.zeros(2 * nr)], config, n_restarts=1)
            report.merge(sub)
            if sub.best_value < best.cc:
                w = _unpack_w(p, w0, fam.n, fam.r)
                x = fam.state(w)
                best = _Candidate(f"search-{i}", w, x, sub.best_value, None)
            if best.cc <= stop:
                break
    cc, basis = _canonical_cc(best.x, fam.dx, fam.dy, best.basis)
    if config.require_convergence and report.restarts_used and not report.any_converged:
        raise OptimizerDidNotConverge("no extension search restart converged", cc)
    sym = _result_symmetry(best.x, fam.dx, fam.dy, config)
    return _make_result(best.x, rho, anc, cc, basis, sym, report, best.label)


def _env_dim(rho: DensityMatrix, decomposition, env_dim) -> int:
    if env_dim is not None:
        if int(env_dim) < 1:
            raise ValueError("env_dim must be >= 1")
        return int(env_dim)
    r = purify(rho)[1]
    n = decomposition.n_terms if decomposition is not None else 0
    return max(r, n)


def _result_symmetry(x: np.ndarray, dx: int, dy: int, config: OptimizerConfig) -> SymmetryCertificate:
    padded = pad_to_equal_sides(DensityMatrix(x, (dx, dy), 1))
    return symmetry_certificate(padded, DEFAULT_SYMMETRY_CONFIG.replace(seed=config.seed))


# --------------------------------------------------------------------------- #
#                      entanglement of coherence (upper bound)                 #
# --------------------------------------------------------------------------- #

def eoc_upper_bound(
    rho: DensityMatrix,
    ancilla_dims: tuple[int, int] | None = None,
    config: OptimizerConfig | None = None,
    decomposition: SeparableDecomposition | None = None,
    env_dim: int | None = None,
    gate: float = SYMMETRY_GATE,
    use_ensemble: bool = True,
) -> ExtensionResult:
    """Upper bound on the entanglement of coherence at fixed ancilla dimensions.

    Minimises ``cc + mu * residual**2`` jointly over the purification
    isometry ``W`` and the local unitaries ``(U, V)`` of the swap-symmetry
    test, and keeps the best point whose residual passes ``gate``. Certified
    symmetric seeds (separable witness, flagged ensemble, trivial extension)
    compete with the search. Unequal side dimensions are equalised by
    enlarging the ancillas.

    Raises :class:`NoSymmetricCandidateFound` when nothing passes the gate.
    """
    config = DEFAULT_EXTENSION_CONFIG if config is None else config
    anc = _resolve_anc(rho, ancilla_dims, decomposition, equal=True)
    fam = _IsometryFamily(rho, anc, _env_dim(rho, decomposition, env_dim))
    d = fam.dx
    seeds = _seed_candidates(fam, decomposition, config, with_symmetry=True, use_ensemble=use_ensemble)
    passing = [c for c in seeds if c.sym is not None and not c.sym.lower_bound and c.sym.residual <= gate]
    best = min(passing, key=lambda c: c.cc) if passing else None
    best_residual = min((c.sym.residual for c in seeds if c.sym is not None), default=math.inf)
    report = OptimizerReport()
    stop = max(_ZERO_CC, config.target or 0.0)
    mu = config.penalty_weight
    nr = fam.n * fam.r
    rng = CounterRNG(config.seed, stream=31)

    if best is None or best.cc > stop:
        warm = [c for c in seeds if c.w is not None]
        for i in range(config.restarts):
            if i < len(warm):
                w0 = warm[i].w
                sym = warm[i].sym
                u0 = sym.u if sym is not None and sym.u is not None else np.eye(d, dtype=complex)
                v0 = sym.v if sym is not None and sym.v is not None else np.eye(d, dtype=complex)
            else:
                w0 = isometry_from_params(_random_isometry_params(rng, fam.n, fam.r), fam.n, fam.r)
                u0, v0 = haar_unitary(d, rng), haar_unitary(d, rng)
            incumbent = {"cc": math.inf}

            def obj(p, w0=w0, u0=u0, v0=v0, incumbent=incumbent):
                w = _unpack_w(p, w0, fam.n, fam.r)
                u = u0 @ unitary_from_params(p[2 * nr: 2 * nr + d * d], d)
                v = v0 @ unitary_from_params(p[2 * nr + d * d:], d)
                x = fam.state(w)
                cc = _fast_cc(x, d, d)
                res = _swap_residual(x, swap_halves(x, d), u, v)
                if res <= gate and cc < incumbent["cc"]:
                    incumbent.update(cc=cc, x=x, w=w, u=u, v=v, res=res)
                return cc + mu * res * res

            p, sub = multistart_minimize(obj, [np.zeros(2 * nr + 2 * d * d)], config, n_restarts=1)
            report.merge(sub)
            if incumbent["cc"] < math.inf and (best is None or incumbent["cc"] < best.cc):
                cert = SymmetryCertificate(incumbent["res"], incumbent["u"], incumbent["v"], False)
                best = _Candidate(f"search-{i}", incumbent["w"], incumbent["x"], incumbent["cc"], None, cert)
            elif incumbent["cc"] == math.inf:
                w = _unpack_w(p, w0, fam.n, fam.r)
                x = fam.state(w)
                u = u0 @ unitary_from_params(p[2 * nr: 2 * nr + d * d], d)
                v = v0 @ unitary_from_params(p[2 * nr + d * d:], d)
                best_residual = min(best_residual, _swap_residual(x, swap_halves(x, d), u, v))
            if best is not None and best.cc <= stop:
                break

    if best is None:
        raise NoSymmetricCandidateFound(
            f"no candidate reached symmetry residual <= {gate:g} (best {best_residual:.3g})", best_residual
        )
    cc, basis = _canonical_cc(best.x, d, d, best.basis)
    if config.require_convergence and report.restarts_used and not report.any_converged:
        raise OptimizerDidNotConverge("no symmetric-extension search restart converged", cc)
    return _make_result(best.x, rho, anc, cc, basis, best.sym, report, best.label)


# --------------------------------------------------------------------------- #
#                       constructions on extension results                     #
# --------------------------------------------------------------------------- #

def _flag_embed(x: DensityMatrix, f: int, nflag: int, anc: tuple[int, int]) -> np.ndarray:
    """``x (x) |f><f|_A'' (x) |f><f|_B''`` with A'' merged into A' and B'' into B'."""
    proj = np.zeros((nflag, nflag))
    proj[f, f] = 1
    s = x.bipartition()
    n = x.n_subsystems
    y = np.kron(np.kron(x.data, proj), proj)
    dims = x.dims + (nflag, nflag)
    order = list(range(s)) + [n] + list(range(s, n)) + [n + 1]
    return permute(y, dims, order)


def mixture_extension(ext_rho: ExtensionResult, ext_sigma: ExtensionResult, lam: float) -> ExtensionResult:
    """``tau = lam rho* (x) |00><00| + (1 - lam) sigma* (x) |11><11|`` on flag ancillas.

    The flags are merged into the existing ancillas (A' becomes A'A'').
    ``cc(tau) = lam cc(rho*) + (1 - lam) cc(sigma*)`` holds exactly in the
    flag-block basis, and block-diagonal local unitaries carry the swap
    symmetry of both inputs over to ``tau``.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("mixing weight must lie in [0, 1]")
    if ext_rho.state.dims != ext_sigma.state.dims or ext_rho.system.dims != ext_sigma.system.dims:
        raise DimMismatch("mixture needs extensions on equal-shaped spaces")
    anc = (2 * ext_rho.ancilla_dims[0], 2 * ext_rho.ancilla_dims[1])
    x = lam * _flag_embed(ext_rho.state, 0, 2, anc) + (1 - lam) * _flag_embed(ext_sigma.state, 1, 2, anc)
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    e0, e1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])

    def flagged_basis(b0: LocalBasis, b1: LocalBasis) -> LocalBasis:
        return LocalBasis(np.hstack([np.kron(b0.vectors, e0[:, None]), np.kron(b1.vectors, e1[:, None])]))

    basis = ProductBasisChoice(
        flagged_basis(ext_rho.basis.basis_a, ext_sigma.basis.basis_a),
        flagged_basis(ext_rho.basis.basis_b, ext_sigma.basis.basis_b),
    )
    dx = ext_rho.state.dim_a * 2
    dy = ext_rho.state.dim_b * 2
    u = basis.matrix
    cc = cc_in_frame(u.conj().T @ x @ u, dx, dy)
    expected = lam * ext_rho.cc_value + (1 - lam) * ext_sigma.cc_value
    if abs(cc - expected) > 1e-9 * max(1.0, abs(expected)):
        raise DimMismatch(f"mixture identity violated: {cc!r} vs {expected!r}", abs(cc - expected))
    system = ext_rho.system.with_data(lam * ext_rho.system.data + (1 - lam) * ext_sigma.system.data)
    if ext_rho.symmetry_unitaries is not None and ext_sigma.symmetry_unitaries is not None:
        (ur, vr), (us, vs) = ext_rho.symmetry_unitaries, ext_sigma.symmetry_unitaries
        ut = np.kron(ur, p0) + np.kron(us, p1)
        vt = np.kron(vr, p0) + np.kron(vs, p1)
        sym = SymmetryCertificate(_swap_residual(x, swap_halves(x, dx), ut, vt), ut, vt, False)
    else:
        sym = symmetry_certificate(pad_to_equal_sides(DensityMatrix(x, (dx, dy), 1)))
    return _make_result(x, system, anc, cc, basis, sym, None, "mixture")


def transport_extension(ext: ExtensionResult, u_a: np.ndarray, u_b: np.ndarray) -> ExtensionResult:
    """Carry an extension of ``rho`` to one of ``(U_A x U_B) rho (U_A x U_B)^dagger``.

    The state, its basis and its swap unitaries all rotate along
    (``U' = X U Y^dagger``, ``V' = Y V X^dagger`` with ``X = U_A x 1``,
    ``Y = U_B x 1``), so the correlated coherence and the residual carry over.
    """
    sys = ext.system
    da, db = sys.dim_a, sys.dim_b
    u_a, u_b = np.asarray(u_a, dtype=complex), np.asarray(u_b, dtype=complex)
    if u_a.shape != (da, da) or u_b.shape != (db, db):
        raise DimMismatch("local unitaries do not match the system sides")
    xa = np.kron(u_a, np.eye(ext.ancilla_dims[0]))
    yb = np.kron(u_b, np.eye(ext.ancilla_dims[1]))
    w = np.kron(xa, yb)
    x = w @ ext.state.data @ w.conj().T
    basis = ProductBasisChoice(LocalBasis(xa @ ext.basis.basis_a.vectors), LocalBasis(yb @ ext.basis.basis_b.vectors))
    u_sys = np.kron(u_a, u_b)
    system = sys.with_data(u_sys @ sys.data @ u_sys.conj().T)
    cc = cc_in_frame(basis.matrix.conj().T @ x @ basis.matrix, xa.shape[0], yb.shape[0])
    if ext.symmetry_unitaries is not None:
        u, v = ext.symmetry_unitaries
        u2 = xa @ u @ yb.conj().T
        v2 = yb @ v @ xa.conj().T
        sym = SymmetryCertificate(_swap_residual(x, swap_halves(x, xa.shape[0]), u2, v2), u2, v2, False)
    else:
        sym = SymmetryCertificate(ext.symmetry_residual, None, None, ext.symmetry_lower_bound)
    return _make_result(x, system, ext.ancilla_dims, cc, basis, sym, None, "transported")


def restrict_extension(ext: ExtensionResult) -> ExtensionResult:
    """View an extension of ``rho_{A1 A2.. B}`` as an extension of ``rho_{A2.. B}``.

    The first A subsystem joins the ancilla ``A'``; nothing else changes, so
    correlated coherence and swap residual are preserved exactly.
    """
    sys = ext.system
    dims_a = sys.dims_a
    if len(dims_a) < 2:
        raise DimMismatch("restriction needs at least two subsystems on side A")
    na = len(dims_a)
    dims = ext.state.dims
    n = len(dims)
    order = list(range(1, na)) + [0, na] + list(range(na + 1, n))
    x = permute(ext.state.data, dims, order)
    side_order = list(range(1, na)) + [0, na]
    side_dims = dims_a + (ext.ancilla_dims[0],)
    pa = np.eye(math.prod(side_dims))
    pa = np.array([permute_vector(pa[:, j], side_dims, side_order) for j in range(pa.shape[1])]).T
    basis = ProductBasisChoice(LocalBasis(pa @ ext.basis.basis_a.vectors), ext.basis.basis_b)
    anc = (dims_a[0] * ext.ancilla_dims[0], ext.ancilla_dims[1])
    keep = list(range(1, sys.n_subsystems))
    system = DensityMatrix(ptrace(sys.data, sys.dims, keep), sys.dims[1:], na - 1)
    dx, dy = pa.shape[0], ext.state.dim_b
    cc = cc_in_frame(basis.matrix.conj().T @ x @ basis.matrix, dx, dy)
    if ext.symmetry_unitaries is not None:
        u, v = ext.symmetry_unitaries
        u2, v2 = pa @ u, v @ pa.conj().T
        sym = SymmetryCertificate(_swap_residual(x, swap_halves(x, dx), u2, v2), u2, v2, False)
    else:
        sym = SymmetryCertificate(ext.symmetry_residual, None, None, ext.symmetry_lower_bound)
    return _make_result(x, system, anc, cc, basis, sym, None, "restricted")


# --------------------------------------------------------------------------- #
#                         measurement and copying steps                        #
# --------------------------------------------------------------------------- #

def _shift(d: int, i: int) -> np.ndarray:
    return np.roll(np.eye(d), i, axis=0)


def projection_dilation(rho: DensityMatrix, k: int, basis: LocalBasis | None = None) -> DensityMatrix:
    """Append an ancilla ``|0>`` after subsystem ``k`` and apply ``|b_i>|0> -> |b_i>|i>``.

    Tracing the new ancilla (index ``k + 1``) leaves ``rho`` dephased on
    subsystem ``k`` in ``basis``.
    """
    (k,) = _check_indices([k], rho.n_subsystems)
    d = rho.dims[k]
    b = np.eye(d, dtype=complex) if basis is None else basis.vectors
    if b.shape != (d, d):
        raise DimMismatch(f"basis of dimension {b.shape[0]} for subsystem of dimension {d}")
    anc0 = np.zeros((d, d))
    anc0[0, 0] = 1
    dims = rho.dims[: k + 1] + (d,) + rho.dims[k + 1:]
    x = np.kron(rho.data, anc0)
    n = rho.n_subsystems
    order = list(range(k + 1)) + [n] + list(range(k + 1, n))
    x = permute(x, rho.dims + (d,), order)
    cnot = sum(np.kron(np.outer(b[:, i], b[:, i].conj()), _shift(d, i)) for i in range(d))
    x = conjugate_local(x, dims, cnot, [k, k + 1])
    split = rho.split
    if split is None and n == 2:
        split = 1
    if split is not None and k < split:
        split += 1
    return DensityMatrix(x, dims, split)


def classical_copy(rho: DensityMatrix, registry_basis: LocalBasis | None = None, tol: float = 1e-9) -> DensityMatrix:
    """Copy the classical registry (first A subsystem) to a new first subsystem of B.

    ``sum_i p_i |i><i| (x) psi_i`` becomes
    ``sum_i p_i |i><i| (x) psi_i (x) |i><i|_B1``, with ``B1`` placed at the
    start of side B in the computational basis. Raises
    :class:`NotClassicalOnRegistry` when the Frobenius mass outside the
    registry-diagonal blocks exceeds ``tol``.
    """
    s = rho.bipartition()
    d = rho.dims[0]
    b = np.eye(d, dtype=complex) if registry_basis is None else registry_basis.vectors
    if b.shape != (d, d):
        raise DimMismatch(f"registry basis of dimension {b.shape[0]} for registry of dimension {d}")
    rest = rho.dim // d
    y = conjugate_local(rho.data, rho.dims, b.conj().T, [0]).reshape(d, rest, d, rest)
    mask = np.eye(d, dtype=bool)[:, None, :, None]
    off = float(np.linalg.norm(np.where(mask, 0, y)))
    if off > tol:
        raise NotClassicalOnRegistry(f"state has off-block mass {off:.3g} on the registry", off)
    dims = rho.dims[:s] + (d,) + rho.dims[s:]
    da_rest = math.prod(rho.dims[1:s])
    dbt = math.prod(rho.dims[s:])
    blocks = y.reshape(d, da_rest, dbt, d, da_rest, dbt)
    out = np.zeros((d, da_rest, d, dbt, d, da_rest, d, dbt), dtype=complex)
    for i in range(d):
        out[i, :, i, :, i, :, i, :] = blocks[i, :, :, i, :, :]
    x = out.reshape(math.prod(dims), math.prod(dims))
    x = conjugate_local(x, dims, b, [0])
    return DensityMatrix(x, dims, s)


def _probe_channel(rho, alice_unitary, registry_basis, bob_unitaries) -> DensityMatrix:
    m = registry_basis.dim
    s = rho.bipartition()
    ket0 = np.zeros((m, m))
    ket0[0, 0] = 1
    x = DensityMatrix(np.kron(ket0, rho.data), (m,) + rho.dims, s + 1)
    u = np.asarray(alice_unitary, dtype=complex)
    if u.shape != (m * rho.dim_a,) * 2:
        raise DimMismatch(f"Alice's unitary must act on registry x A = {m * rho.dim_a}")
    x = x.with_data(conjugate_local(x.data, x.dims, u, list(range(s + 1))))
    # measure the registry by dilation, then forget the dilation ancilla
    dil = projection_dilation(x, 0, registry_basis)
    keep = [i for i in range(dil.n_subsystems) if i != 1]
    x = DensityMatrix(ptrace(dil.data, dil.dims, keep), dil.dims[:1] + dil.dims[2:], s + 1)
    x = classical_copy(x, registry_basis)
    db = rho.dim_b
    if len(bob_unitaries) != m:
        raise DimMismatch(f"need one Bob unitary per registry outcome ({m})")
    ctrl = sum(np.kron(np.diag(np.eye(m)[i]), np.asarray(bob_unitaries[i], dtype=complex)) for i in range(m))
    nb = len(rho.dims_b)
    bob_side = list(range(s + 1, s + 2 + nb))
    x = x.with_data(conjugate_local(x.data, x.dims, ctrl, bob_side))
    keep = [i for i in range(x.n_subsystems) if i not in (0, s + 1)]
    if ctrl.shape[0] != m * db:
        raise DimMismatch("Bob's unitaries do not match side B")
    return DensityMatrix(ptrace(x.data, x.dims, keep), rho.dims, s)


def locc_round_probe(
    rho: DensityMatrix,
    alice_unitary: np.ndarray,
    alice_registry_basis: LocalBasis,
    bob_conditional_unitaries: Sequence[np.ndarray],
    config: OptimizerConfig | None = None,
    ancilla_dims: tuple[int, int] | None = None,
    slack: float = 5e-2,
    before: ExtensionResult | None = None,
) -> LoccProbeReport:
    """One Alice-to-Bob round and the entanglement-of-coherence bound before and after.

    Alice appends a registry ``M_A`` in ``|0>``, applies ``alice_unitary`` on
    ``M_A x A`` and measures ``M_A`` in ``alice_registry_basis`` (by
    dilation); the outcome is copied to Bob, who applies
    ``bob_conditional_unitaries[i]`` for outcome ``i``; both registers are then
    discarded. ``monotone_ok`` is ``after <= before + slack``.
    """
    out = _probe_channel(rho, alice_unitary, alice_registry_basis, bob_conditional_unitaries)
    if before is None:
        before = eoc_upper_bound(rho, ancilla_dims, config)
    after = eoc_upper_bound(out, ancilla_dims, config)
    ok = after.cc_value <= before.cc_value + slack
    return LoccProbeReport(before.cc_value, after.cc_value, bool(ok), slack, out, before, after)

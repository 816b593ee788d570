import math

import numpy as np
import pytest

from oracles import kron_list, ptrace_loop, random_density
from qcc.errors import BadSubsystemIndex, DimMismatch, NonHermitian, NotPSD, TraceNotOne
from qcc.state import (
    DensityMatrix,
    LocalBasis,
    SeparableDecomposition,
    apply_unitary,
    degeneracy_blocks,
    eigh,
    frobenius_distance,
    kron,
    partial_trace,
    ptrace,
    purify,
    swap_bipartite,
    validate_density,
)
from qcc.stategen import random_mixed

X = np.array([[0, 1], [1, 0]], dtype=complex)


def proj(d, i):
    p = np.zeros((d, d), dtype=complex)
    p[i, i] = 1
    return p


def test_kron_of_basis_projectors():
    out = kron(DensityMatrix(proj(2, 0), (2,)), DensityMatrix(proj(2, 1), (2,)), split=1)
    assert np.array_equal(out.data, proj(4, 1))
    assert out.dims == (2, 2)


def test_kron_of_maximally_mixed():
    half = DensityMatrix(np.eye(2) / 2, (2,))
    assert np.allclose(kron(half, half).data, np.eye(4) / 4, atol=0)


def test_partial_trace_of_product_returns_factor():
    gen = np.random.default_rng(1)
    ra, rb = random_density(2, gen), random_density(3, gen)
    prod = kron(DensityMatrix(ra, (2,)), DensityMatrix(rb, (3,)), split=1)
    assert np.abs(partial_trace(prod, 1).data - ra).max() <= 1e-15
    assert np.abs(partial_trace(prod, [0]).data - rb).max() <= 1e-15


@pytest.mark.parametrize("dims,keep", [((2, 3), [0]), ((2, 3), [1]), ((2, 2, 3), [0, 2]), ((3, 2, 2), [1])])
def test_ptrace_matches_loop_oracle(dims, keep):
    a = random_density(math.prod(dims), np.random.default_rng(7))
    assert np.abs(ptrace(a, dims, keep) - ptrace_loop(a, dims, keep)).max() <= 1e-14


def test_partial_trace_composes():
    rho = random_mixed((2, 3, 2), seed=4, split=1)
    stepwise = partial_trace(partial_trace(rho, 2), 1)
    assert np.abs(stepwise.data - partial_trace(rho, [1, 2]).data).max() <= 1e-12


def test_partial_trace_adjointness():
    gen = np.random.default_rng(3)
    rho = random_mixed((3, 2), seed=9)
    x = gen.normal(size=(3, 3)) + 1j * gen.normal(size=(3, 3))
    lhs = np.trace(np.kron(x, np.eye(2)) @ rho.data)
    rhs = np.trace(x @ partial_trace(rho, 1).data)
    assert abs(lhs - rhs) <= 1e-10


def test_partial_trace_bad_index():
    with pytest.raises(BadSubsystemIndex):
        partial_trace(random_mixed((2, 2)), 2)
    with pytest.raises(BadSubsystemIndex):
        partial_trace(random_mixed((2, 2)), [0, 1])


def test_eigh_diagonal_input():
    vals, vecs = eigh(np.diag([0.7, 0.3]))
    assert np.allclose(vals, [0.7, 0.3])
    assert np.allclose(vecs, np.eye(2))


def test_eigh_ascending_input_is_reordered():
    vals, vecs = eigh(np.diag([0.2, 0.8]))
    assert vals[0] > vals[1]
    assert np.allclose(vecs, X)


def test_eigh_is_deterministic_and_phase_fixed():
    a = random_mixed((2, 2), seed=11).data
    v1, e1 = eigh(a)
    v2, e2 = eigh(a.copy())
    assert np.array_equal(v1, v2) and np.array_equal(e1, e2)
    first = e1[np.argmax(np.abs(e1) > 1e-10, axis=0), range(4)]
    assert np.all(np.abs(first.imag) <= 1e-15) and np.all(first.real > 0)


def test_eigh_ties_are_ordered():
    vals, vecs = eigh(np.eye(3) / 3)
    assert np.allclose(vecs, np.eye(3))
    assert degeneracy_blocks(vals) == ((0, 1, 2),)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        eigh(np.array([[0, 1], [0, 0]]))


def test_apply_identity_and_x():
    rho = random_mixed((2, 2), seed=2)
    assert np.allclose(apply_unitary(rho, np.eye(2), 0).data, rho.data, atol=1e-15)
    ket00 = DensityMatrix(proj(4, 0), (2, 2), 1)
    assert np.allclose(apply_unitary(ket00, X, 0).data, proj(4, 2))


def test_apply_rejects_non_unitary():
    with pytest.raises(DimMismatch):
        apply_unitary(random_mixed((2, 2)), 2 * np.eye(2), 0)


def test_swap_of_product():
    gen = np.random.default_rng(5)
    s, t = random_density(2, gen), random_density(2, gen)
    swapped = swap_bipartite(DensityMatrix(np.kron(s, t), (2, 2), 1))
    assert np.allclose(swapped.data, np.kron(t, s), atol=1e-15)


def test_swap_preserves_spectrum():
    rho = random_mixed((3, 3), seed=8)
    assert np.allclose(rho.eigenvalues(), swap_bipartite(rho).eigenvalues(), atol=1e-10)


def test_swap_needs_equal_sides():
    with pytest.raises(DimMismatch):
        swap_bipartite(random_mixed((2, 3)))


def test_purify_pure_state_has_trivial_ancilla():
    v = np.array([1, 1j, 0, 0]) / math.sqrt(2)
    rho = DensityMatrix(np.outer(v, v.conj()), (2, 2), 1)
    vec, r = purify(rho)
    assert r == 1
    assert np.allclose(np.outer(vec, vec.conj()), rho.data)


def test_purify_reproduces_state():
    rho = random_mixed((2, 3), rank=3, seed=6)
    vec, r = purify(rho)
    m = vec.reshape(6, r)
    assert r == 3
    assert np.abs(m @ m.conj().T - rho.data).max() <= 1e-14


def test_frobenius_distance_values():
    a = random_mixed((2, 2), seed=1).data
    b = random_mixed((2, 2), seed=2).data
    assert frobenius_distance(a, a) == 0
    assert frobenius_distance(proj(2, 0), proj(2, 1)) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert frobenius_distance(a, b) == frobenius_distance(b, a)


@pytest.mark.parametrize(
    "data,error",
    [
        (np.array([[0.5, 0.5], [0, 0.5]]), NonHermitian),
        (np.eye(2), TraceNotOne),
        (np.diag([1.2, -0.2]), NotPSD),
    ],
)
def test_validation_errors(data, error):
    with pytest.raises(error) as info:
        validate_density(data)
    assert info.value.violations[0].residual > 0


def test_validation_reports_every_violation():
    with pytest.raises(NonHermitian) as info:
        validate_density(np.array([[4.0, 1.0], [0.0, -1.0]]))
    kinds = {v.kind for v in info.value.violations}
    assert kinds == {"NonHermitian", "TraceNotOne", "NotPSD"}


def test_validation_flags_small_negative_eigenvalue():
    rho = validate_density(np.diag([1 + 5e-10, -5e-10]))
    assert rho.psd_clamped
    assert not validate_density(np.eye(2) / 2).psd_clamped


def test_validation_dim_mismatch():
    with pytest.raises(DimMismatch):
        validate_density(np.eye(4) / 4, (2, 3))


def test_density_matrix_is_immutable():
    rho = random_mixed((2, 2))
    with pytest.raises(ValueError):
        rho.data[0, 0] = 1


def test_local_basis_rejects_non_orthonormal():
    with pytest.raises(DimMismatch):
        LocalBasis(np.array([[1, 1], [0, 1]]))


def test_separable_decomposition_rebuilds_state():
    alphas = np.array([[1, 0], [1, 1]])
    betas = np.array([[1, 0], [1, -1]])
    d = SeparableDecomposition([0.5, 0.5], alphas, betas)
    plus, minus = np.array([1, 1]) / math.sqrt(2), np.array([1, -1]) / math.sqrt(2)
    expected = 0.5 * kron_list(proj(2, 0), proj(2, 0)) + 0.5 * kron_list(np.outer(plus, plus), np.outer(minus, minus))
    assert np.allclose(d.state().data, expected)
    with pytest.raises(ValueError):
        SeparableDecomposition([0.5, 0.6], alphas, betas)

import math

import numpy as np
import pytest

from oracles import dephase_projectors, haar_unitary_qr, l1_loop
from qcc.coherence import dephase, dephase_subsystem, l1_coherence, max_loss_certificate
from qcc.errors import BadSubsystemIndex, DimMismatch
from qcc.state import DensityMatrix, LocalBasis, ProductBasisChoice, kron
from qcc.stategen import bell, random_local_basis, random_mixed, random_product_basis

PLUS = np.full((2, 2), 0.5, dtype=complex)


def test_diagonal_state_is_incoherent():
    assert l1_coherence(np.diag([0.1, 0.2, 0.3, 0.4])) == 0


def test_plus_state_has_unit_coherence():
    assert l1_coherence(PLUS) == pytest.approx(1.0, abs=1e-15)


def test_maximally_coherent_ququart():
    v = np.ones(4) / 2
    rho = np.outer(v, v)
    assert l1_coherence(rho) == pytest.approx(3.0, abs=1e-14)
    assert l1_loop(rho) == pytest.approx(3.0, abs=1e-14)


def test_coherence_in_rotated_basis_matches_loop_oracle():
    rho = random_mixed((2, 3), seed=3)
    basis = random_product_basis(2, 3, seed=4)
    u = basis.matrix
    assert l1_coherence(rho, basis) == pytest.approx(l1_loop(u.conj().T @ rho.data @ u), abs=1e-13)


def test_basis_dimension_is_checked():
    with pytest.raises(DimMismatch):
        l1_coherence(random_mixed((2, 2)), LocalBasis.computational(3))


def test_dephase_plus_gives_maximally_mixed():
    out = dephase(DensityMatrix(PLUS, (2,)))
    assert np.allclose(out.data, np.eye(2) / 2, atol=1e-15)


def test_dephase_leaves_diagonal_state_alone():
    rho = DensityMatrix(np.diag([0.5, 0.3, 0.2]).astype(complex), (3,))
    assert np.array_equal(dephase(rho).data, rho.data)


def test_dephase_is_idempotent_and_keeps_diagonal():
    rho = random_mixed((2, 2), seed=9)
    basis = random_product_basis(2, 2, seed=1)
    once = dephase(rho, basis)
    assert np.abs(dephase(once, basis).data - once.data).max() <= 1e-15
    assert l1_coherence(once, basis) <= 1e-12
    u = basis.matrix
    assert np.allclose(np.diag(u.conj().T @ once.data @ u), np.diag(u.conj().T @ rho.data @ u), atol=1e-15)


def test_local_dephasing_of_bell_state():
    out = dephase_subsystem(bell("phi+"), 1)
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = 0.5
    assert np.abs(out.data - expected).max() <= 1e-15


def test_local_dephasing_keeps_incoherent_factor():
    gen = np.random.default_rng(0)
    a = random_mixed((2,), seed=2)
    b = DensityMatrix(np.diag(gen.dirichlet([1, 1, 1])).astype(complex), (3,))
    prod = kron(a, b, split=1)
    assert np.abs(dephase_subsystem(prod, 1).data - prod.data).max() <= 1e-15


@pytest.mark.parametrize("dims,k", [((2, 2), 0), ((2, 3), 1), ((2, 2, 2), 1), ((3, 2, 2), 2)])
def test_local_dephasing_matches_projector_oracle(dims, k):
    rho = random_mixed(dims, seed=sum(dims) + k)
    basis = random_local_basis(dims[k], seed=k)
    out = dephase_subsystem(rho, k, basis)
    assert np.abs(out.data - dephase_projectors(rho.data, dims, k, basis.vectors)).max() <= 1e-14
    assert abs(np.trace(out.data) - 1) <= 1e-12
    assert np.abs(dephase_subsystem(out, k, basis).data - out.data).max() <= 1e-14


def test_local_dephasing_rejects_bad_index():
    with pytest.raises(BadSubsystemIndex):
        dephase_subsystem(random_mixed((2, 2)), 5)


def test_certificate_on_bell_state():
    rep = max_loss_certificate(bell("phi+"), 1, n_samples=200, seed=0)
    assert rep.passed
    assert rep.ref_coherence <= 1e-15
    assert rep.n_samples == 200


def test_certificate_on_incoherent_product():
    rho = DensityMatrix(np.diag([0.4, 0.1, 0.3, 0.2]).astype(complex), (2, 2), 1)
    rep = max_loss_certificate(rho, 0, n_samples=20, seed=1)
    assert rep.passed and rep.ref_coherence == 0


def test_certificate_accepts_explicit_reference():
    rho = random_mixed((2, 2), seed=5)
    ref = ProductBasisChoice.computational(2, 2)
    assert max_loss_certificate(rho, 1, ref, 10, 3) == max_loss_certificate(rho, 1, None, 10, 3)


def test_reference_dephasing_can_keep_more_coherence_than_another_basis():
    """A concrete state where some other measurement basis on B removes more coherence.

    Both values come from explicit projector sums and loop-based l1 sums,
    using numpy's own Haar sampler, so this does not rely on the library.
    """
    rho = random_mixed((2, 2), seed=3).data
    ref = l1_loop(dephase_projectors(rho, (2, 2), 1, np.eye(2)))
    gen = np.random.default_rng(0)
    best = math.inf
    for _ in range(400):
        u = haar_unitary_qr(2, gen)
        best = min(best, l1_loop(dephase_projectors(rho, (2, 2), 1, u)))
    assert ref == pytest.approx(0.500973, abs=1e-6)
    assert best < ref - 0.15
    rep = max_loss_certificate(random_mixed((2, 2), seed=3), 1, n_samples=200, seed=0)
    assert not rep.passed
    assert rep.ref_coherence == pytest.approx(ref, abs=1e-12)

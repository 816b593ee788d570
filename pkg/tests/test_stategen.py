import itertools

import numpy as np
import pytest

from oracles import ppt_min_eig
from qcc.correlated import symmetric_discord_zero
from qcc.state import ProductBasisChoice, swap_bipartite, validate_density
from qcc.stategen import (
    BELL_STATES,
    bell,
    cc_state,
    cq_state,
    random_cc_state,
    random_cq_state,
    random_local_basis,
    random_mixed,
    random_pure,
    random_separable,
    random_unitary,
    werner,
)


def test_bell_marginals_are_maximally_mixed():
    for which in BELL_STATES:
        rho = bell(which)
        assert np.allclose(rho.marginal("A"), np.eye(2) / 2, atol=1e-15)
        assert np.allclose(rho.marginal("B"), np.eye(2) / 2, atol=1e-15)
        assert np.linalg.matrix_rank(rho.data) == 1


def test_singlet_projector_is_swap_invariant():
    rho = bell("psi-")
    assert np.allclose(swap_bipartite(rho).data, rho.data, atol=1e-15)


def test_bell_states_are_orthogonal():
    for a, b in itertools.combinations(BELL_STATES, 2):
        assert abs(np.trace(bell(a).data @ bell(b).data)) <= 1e-15


def test_bell_rejects_unknown_label():
    with pytest.raises(ValueError):
        bell("chi")


def test_werner_endpoints():
    assert np.allclose(werner(0).data, np.eye(4) / 4, atol=0)
    assert np.allclose(werner(1).data, bell("psi-").data, atol=1e-15)


def test_werner_ppt_boundary():
    assert abs(ppt_min_eig(werner(1 / 3).data, 2, 2)) <= 1e-12


@pytest.mark.parametrize("p", [0.0, 0.2, 0.33, 0.34, 0.6, 1.0])
def test_werner_entangled_iff_above_one_third(p):
    # partial-transpose spectrum has the closed-form minimum (1 - 3p) / 4
    m = ppt_min_eig(werner(p).data, 2, 2)
    assert m == pytest.approx((1 - 3 * p) / 4, abs=1e-12)
    assert (m < 0) == (p > 1 / 3)


def test_werner_rejects_out_of_range():
    with pytest.raises(ValueError):
        werner(1.5)


def test_cc_state_uniform_weights():
    rho = cc_state(np.full((2, 3), 1 / 6), ProductBasisChoice.computational(2, 3))
    assert np.allclose(rho.data, np.eye(6) / 6, atol=1e-15)


def test_cc_state_rank_one_weights():
    p = np.zeros((2, 2))
    p[1, 0] = 1
    rho = cc_state(p)
    assert np.linalg.matrix_rank(rho.data) == 1
    assert rho.data[2, 2] == 1


def test_cc_state_rejects_bad_weights():
    with pytest.raises(ValueError):
        cc_state(np.array([[0.5, 0.6], [0, 0]]))


def test_random_cc_states_classify_as_zero():
    for seed in range(5):
        assert symmetric_discord_zero(random_cc_state((2, 3), seed=seed))[0]


def test_cq_state_with_equal_bob_states_is_product():
    bob = random_mixed((3,), seed=1).data
    rho = cq_state([0.25, 0.75], [bob, bob])
    assert np.allclose(rho.data, np.kron(np.diag([0.25, 0.75]), bob), atol=1e-15)


def test_commuting_cq_states_are_classical_classical():
    for seed in range(3):
        assert symmetric_discord_zero(random_cq_state((2, 2), seed=seed, commuting=True))[0]


def test_non_commuting_cq_states_are_not():
    for seed in range(3):
        assert not symmetric_discord_zero(random_cq_state((2, 2), seed=seed))[0]


def test_random_pure_is_pure():
    rho = random_pure((2, 3), seed=4)
    assert abs(np.trace(rho.data) - 1) <= 1e-12
    assert abs(np.trace(rho.data @ rho.data) - 1) <= 1e-12


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_random_mixed_rank(rank):
    rho = random_mixed((2, 3), rank=rank, seed=rank)
    assert np.sum(np.linalg.eigvalsh(rho.data) > 1e-12) <= rank


def test_generators_are_bit_reproducible():
    for make in (
        lambda s: random_pure((2, 2), seed=s).data,
        lambda s: random_mixed((2, 3), seed=s).data,
        lambda s: random_cc_state((2, 2), seed=s).data,
        lambda s: random_cq_state((2, 3), seed=s).data,
        lambda s: random_separable(3, (2, 2), seed=s)[0].data,
        lambda s: random_unitary(3, seed=s),
    ):
        assert np.array_equal(make(17), make(17))
        assert not np.array_equal(make(17), make(18))


def test_every_generator_output_validates():
    states = [bell(w) for w in BELL_STATES] + [werner(0.4)]
    for seed in range(5):
        states += [
            random_pure((2, 3), seed=seed),
            random_mixed((3, 2), seed=seed),
            random_cc_state((2, 3), seed=seed),
            random_cq_state((3, 2), seed=seed),
            random_separable(2 + seed, (2, 3), seed=seed)[0],
        ]
    for rho in states:
        validate_density(rho.data, rho.dims, 1)


def test_random_unitary_is_unitary_and_haar_like():
    samples = [random_unitary(3, seed=s) for s in range(2000)]
    for u in samples[:10]:
        assert np.abs(u @ u.conj().T - np.eye(3)).max() <= 1e-13
    # Haar: E|U_00|^2 = 1/d
    assert np.mean([abs(u[0, 0]) ** 2 for u in samples]) == pytest.approx(1 / 3, abs=0.02)


def test_random_local_basis_has_fixed_phases():
    b = random_local_basis(3, seed=2).vectors
    first = b[0]
    assert np.all(np.abs(first.imag) <= 1e-15) and np.all(first.real > 0)


def test_separable_generator_returns_its_decomposition():
    rho, d = random_separable(4, (2, 3), seed=9)
    assert d.n_terms == 4 and d.dims == (2, 3)
    assert np.array_equal(rho.data, d.state().data)
    assert ppt_min_eig(rho.data, 2, 3) >= -1e-12

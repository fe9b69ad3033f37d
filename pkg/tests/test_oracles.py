import numpy as np
import pytest

from qee.dephasing import QubitAmplitudes, evolve_propagators
from qee.linalg import fidelity
from qee.measure import qee_state
from qee.oracles import (
    bell_block_verify,
    negativity,
    partial_transpose_qubit,
    random_density,
    random_instance,
    random_unitary,
    strict_orthogonality_instance,
    strictly_orthogonal,
)
from qee.verify import figure2_blocks

from conftest import ket, proj


def test_partial_transpose_against_einsum(rng):
    sigma = random_density(rng, 6)
    expected = sigma.reshape(2, 3, 2, 3).transpose(2, 1, 0, 3).reshape(6, 6)
    np.testing.assert_allclose(partial_transpose_qubit(sigma), expected)


def test_partial_transpose_rejects_odd():
    with pytest.raises(ValueError):
        partial_transpose_qubit(np.eye(3))


def test_bell_state_negativity():
    assert negativity(proj(ket(1, 0, 0, 1))) == pytest.approx(0.5, abs=1e-15)


def test_product_state_negativity():
    assert negativity(np.kron(proj(ket(1, 1)), np.eye(2) / 2)) == pytest.approx(0.0, abs=1e-15)


def test_werner_threshold():
    bell = proj(ket(1, 0, 0, 1))
    for p, expected in ((0.2, 0.0), (1 / 3, 0.0), (0.6, (3 * 0.6 - 1) / 4)):
        werner = p * bell + (1 - p) * np.eye(4) / 4
        assert negativity(werner) == pytest.approx(expected, abs=1e-14)


def test_negativity_invariant_under_local_unitaries(rng):
    sigma = random_density(rng, 8)
    L = np.kron(random_unitary(rng, 2), random_unitary(rng, 4))
    assert abs(negativity(L @ sigma @ L.conj().T) - negativity(sigma)) < 1e-12


def test_strictly_orthogonal():
    assert strictly_orthogonal(proj([1, 0, 0]), np.diag([0, 0.5, 0.5]))
    assert not strictly_orthogonal(np.eye(2) / 2, np.eye(2) / 2)


@pytest.mark.parametrize("n, rank", [(2, 1), (4, 1), (4, 2), (6, 3), (8, 2)])
def test_strict_orthogonality_instance(n, rank):
    R0, w0, w1 = strict_orthogonality_instance(n, rank, seed=n + rank)
    amps = QubitAmplitudes.equal(0.3)
    st = evolve_propagators(R0, amps, w0, w1)
    assert strictly_orthogonal(st.R00, st.R11)
    assert fidelity(st.R00, st.R11) < 1e-12
    assert qee_state(st) == pytest.approx(1.0, abs=1e-9)
    rep = bell_block_verify(amps, st.R00, w1 @ w0.conj().T)
    assert rep.passed, rep.line()
    assert f"rank={rank}" in rep.details


def test_bell_block_rejects_overlap():
    R = np.diag([0.5, 0.5, 0, 0])
    # maps |0> to |1>, which is populated, so the cross overlap is nonzero
    w = np.roll(np.eye(4), 1, axis=0)
    assert not bell_block_verify(QubitAmplitudes.equal(), R, w).passed


def test_bell_block_requires_equal_weights():
    with pytest.raises(ValueError, match="equal superposition"):
        bell_block_verify(QubitAmplitudes.normalized(1, 2), np.eye(2) / 2, np.eye(2))


def test_mixed_bath_strict_orthogonality():
    st, w = figure2_blocks(K=10, j=2, c0=0.6)
    assert st.env_dim == 1024
    assert qee_state(st) == pytest.approx(1.0, abs=1e-9)
    assert bell_block_verify(st.amps, st.R00, w).passed


def test_random_instance_reproducible():
    m1, a1 = random_instance(4, 2, seed=5)
    m2, a2 = random_instance(4, 2, seed=5)
    np.testing.assert_array_equal(m1.V1, m2.V1)
    np.testing.assert_array_equal(m1.initial_env, m2.initial_env)
    assert a1 == a2
    assert np.linalg.matrix_rank(m1.initial_env, tol=1e-10) == 2


def test_random_unitary_is_unitary(rng):
    U = random_unitary(rng, 7)
    np.testing.assert_allclose(U @ U.conj().T, np.eye(7), atol=1e-13)


def test_mixed_bath_blocks_match_full_generator():
    from qee.dephasing import evolve
    from qee.spinbath import SpinBathConfig, omega_schedule

    st, w = figure2_blocks(K=4, j=3, c0=0.7)
    occ = [0.7, 0.7, 1.0, 0.7]
    model = SpinBathConfig(K=4, occupations=occ).environment().to_model()
    ref = evolve(model, st.amps, np.pi / (2 * omega_schedule(4, 1.0)[2]))
    np.testing.assert_allclose(st.R00, ref.R00, atol=1e-12)
    np.testing.assert_allclose(st.R11, ref.R11, atol=1e-12)
    np.testing.assert_allclose(st.R01, ref.R01, atol=1e-12)

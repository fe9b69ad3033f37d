import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qee.dephasing import DephasingModel, QubitAmplitudes, assemble_full, evolve
from qee.linalg import purity
from qee.measure import (
    SpectrumMismatchWarning,
    coherence_factor,
    is_separable,
    pure_state_entanglement,
    qee,
    qee_factored,
    qee_from_fidelity,
    qee_state,
    qubit_purity,
    twice_linear_entropy,
)
from qee.oracles import random_instance, random_pure
from qee.verify import symmetric_instance

from conftest import fidelity_svd, proj


def linear_entropy_of_partial_trace(state):
    n = state.env_dim
    sigma = assemble_full(state).reshape(2, n, 2, n)
    rho = np.einsum("ikjk->ij", sigma)
    return 1.0 - float(np.real(np.trace(rho @ rho)))


def test_orthogonal_pure_states_give_one():
    amps = QubitAmplitudes.equal()
    assert qee(amps, proj([1, 0]), proj([0, 1])) == pytest.approx(1.0, abs=1e-15)


def test_identical_states_give_zero():
    R = np.diag([0.6, 0.4])
    assert qee(QubitAmplitudes.equal(), R, R) == pytest.approx(0.0, abs=1e-15)


def test_commuting_mixed_example():
    # weight 1, F = 0.96
    amps = QubitAmplitudes.equal()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert qee(amps, np.diag([0.6, 0.4]), np.diag([0.4, 0.6])) == pytest.approx(0.04, abs=1e-14)


def test_weight_scales_linearly():
    amps = QubitAmplitudes.normalized(1, 2)
    assert qee(amps, proj([1, 0]), proj([0, 1])) == pytest.approx(4 * 0.2 * 0.8, abs=1e-15)


def test_pointer_state_has_no_entanglement():
    assert qee(QubitAmplitudes(1, 0), proj([1, 0]), proj([0, 1])) == 0.0


def test_spectrum_mismatch_warns():
    with pytest.warns(SpectrumMismatchWarning):
        qee(QubitAmplitudes.equal(), np.diag([1.0, 0]), np.eye(2) / 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        qee(QubitAmplitudes.equal(), np.diag([1.0, 0]), np.eye(2) / 2, check_spectra=False)


def test_clamping():
    assert qee_from_fidelity(QubitAmplitudes.equal(), 1 + 1e-14) == 0.0
    assert qee_from_fidelity(QubitAmplitudes.equal(), -1e-14) == 1.0


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        qee(QubitAmplitudes.equal(), np.eye(2) / 2, np.eye(3) / 3)


@given(seed=st.integers(0, 2**32 - 1), n=st.sampled_from([2, 3, 4, 8]), t=st.floats(0, 10))
@settings(max_examples=40, deadline=None)
def test_against_svd_route(seed, n, t):
    model, amps = random_instance(n, n, seed)
    s = evolve(model, amps, t)
    expected = amps.weight * (1 - fidelity_svd(s.R00, s.R11))
    assert abs(qee_state(s) - expected) < 1e-9


@given(seed=st.integers(0, 2**32 - 1), n=st.sampled_from([2, 4, 8]), t=st.floats(0, 10))
@settings(max_examples=40, deadline=None)
def test_pure_environment_is_twice_linear_entropy(seed, n, t):
    model, amps = random_instance(n, 1, seed)
    s = evolve(model, amps, t)
    assert abs(qee_state(s) - 2 * linear_entropy_of_partial_trace(s)) < 1e-10
    assert abs(qee_state(s) - twice_linear_entropy(s)) < 1e-10


@given(seed=st.integers(0, 2**32 - 1), n=st.sampled_from([2, 4, 8]), t=st.floats(0, 10))
@settings(max_examples=40, deadline=None)
def test_symmetric_generators_are_separable(seed, n, t):
    model, amps = symmetric_instance(n, max(1, seed % n), seed)
    s = evolve(model, amps, t)
    assert qee_state(s) < 1e-12
    assert is_separable(s.R00, s.R11)


def test_pure_state_entanglement_vector_route(rng):
    psi = random_pure(rng, 5)
    model, amps = random_instance(5, 1, seed=1)
    model = DephasingModel(model.V0, model.V1, proj(psi))
    g0, g1 = model.generators
    t = 0.9
    s = evolve(model, amps, t)
    assert abs(pure_state_entanglement(amps, psi, g0.propagator(t), g1.propagator(t)) - qee_state(s)) < 1e-10
    with pytest.raises(ValueError, match="norm"):
        pure_state_entanglement(amps, 2 * psi, np.eye(5), np.eye(5))


def test_factored_product():
    amps = QubitAmplitudes.equal()
    pairs = [(np.diag([0.6, 0.4]), np.diag([0.4, 0.6]))] * 3
    assert qee_factored(amps, pairs) == pytest.approx(1 - 0.96**3, abs=1e-14)
    with pytest.raises(ValueError):
        qee_factored(amps, [])


def test_qubit_purity_and_coherence(rng):
    model, amps = random_instance(4, 2, seed=21)
    s = evolve(model, amps, 1.7)
    n = s.env_dim
    rho = np.einsum("ikjk->ij", assemble_full(s).reshape(2, n, 2, n))
    assert abs(qubit_purity(s) - purity(rho)) < 1e-12
    a, b = amps.a, amps.b
    assert abs(coherence_factor(s) - abs(rho[0, 1]) / abs(a * np.conj(b))) < 1e-12

import numpy as np
import pytest
import scipy.linalg

from qee.dephasing import evolve_factored
from qee.linalg import fidelity, kron_all, purity
from qee.spinbath import (
    SpinBathConfig,
    bath_coherence,
    bath_purity,
    component_fidelity,
    conditional_R11,
    initial_state,
    omega_schedule,
    recurrence_time,
    run_sweep,
    spin_generator,
    spin_propagator,
    time_grid,
)


def test_schedule_sums_to_max():
    om = omega_schedule(10, 2.5)
    assert om.sum() == pytest.approx(2.5, abs=1e-14)
    np.testing.assert_allclose(om / om[0], np.arange(1, 11))


def test_schedule_rejects_empty():
    with pytest.raises(ValueError):
        omega_schedule(0, 1.0)


def test_propagator_matches_generator():
    for w, t in ((0.3, 1.1), (1.0, np.pi / 2), (2.2, -0.4)):
        np.testing.assert_allclose(spin_propagator(w, t), scipy.linalg.expm(-1j * spin_generator(w) * t), atol=1e-14)


def test_propagator_eigenphases():
    w, t = 0.7, 0.9
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    U = spin_propagator(w, t)
    np.testing.assert_allclose(U @ plus, np.exp(1j * w * t) * plus, atol=1e-15)
    np.testing.assert_allclose(U @ minus, np.exp(-1j * w * t) * minus, atol=1e-15)


def test_conditional_R11():
    for c0, w, t in ((0.6, 0.3, 1.0), (1.0, 1.0, 0.4), (0.5, 2.0, 3.0)):
        U = spin_propagator(w, t)
        np.testing.assert_allclose(conditional_R11(c0, w, t), U @ initial_state(c0) @ U.conj().T, atol=1e-15)


def test_component_fidelity_grid_against_generic():
    c0s = np.linspace(0.5, 1.0, 10)
    phases = np.linspace(0, np.pi, 100)
    closed = component_fidelity(c0s[:, None], 1.0, phases[None, :])
    worst = 0.0
    for i, c0 in enumerate(c0s):
        for k, wt in enumerate(phases):
            generic = fidelity(initial_state(c0), conditional_R11(c0, 1.0, wt))
            worst = max(worst, abs(closed[i, k] - generic))
    assert worst < 1e-10


def test_component_fidelity_special_values():
    assert component_fidelity(0.5, 1.0, 0.7) == pytest.approx(1.0, abs=1e-15)
    assert component_fidelity(1.0, 1.0, np.pi / 2) == pytest.approx(0.0, abs=1e-15)
    # pure bath qubit: F = cos^2(w t)
    assert component_fidelity(1.0, 1.0, 0.3) == pytest.approx(np.cos(0.3) ** 2, abs=1e-14)
    # c0 = 0.6 at w t = pi/2: commuting diag(.6,.4) vs diag(.4,.6)
    assert component_fidelity(0.6, 1.0, np.pi / 2) == pytest.approx(0.96, abs=1e-14)


def test_coherence_against_factored_traces():
    cfg = SpinBathConfig.uniform(4, 0.7, time_grid=(0.0, 5.0, 11))
    env = cfg.environment()
    expected = [np.prod([b.tr_R01 for b in evolve_factored(env, cfg.amps, t)]) for t in cfg.times]
    np.testing.assert_allclose(bath_coherence(cfg.omegas, cfg.times), np.real(expected), atol=1e-13)
    np.testing.assert_allclose(np.imag(expected), 0, atol=1e-13)


def test_bath_purity():
    occ = [0.6, 0.9, 1.0]
    assert bath_purity(occ) == pytest.approx(purity(kron_all([initial_state(c) for c in occ])), abs=1e-14)


def test_time_grid_endpoints():
    g = time_grid(0.0, 2 * np.pi, 1000)
    assert g[0] == 0.0 and g[-1] == 2 * np.pi and len(g) == 1000


def test_half_filled_bath_never_entangles():
    res = run_sweep(SpinBathConfig.uniform(10, 0.5))
    assert np.all(res.qee == 0.0)
    assert res.coherence.min() < 0.5


def test_coherence_independent_of_occupations():
    runs = [run_sweep(SpinBathConfig.uniform(10, c0)) for c0 in (0.6, 0.8, 1.0)]
    for r in runs[1:]:
        assert np.array_equal(r.coherence, runs[0].coherence)


def test_recurrence():
    cfg = SpinBathConfig.uniform(6, 0.8)
    T = recurrence_time(cfg.omegas)
    res = run_sweep(SpinBathConfig.uniform(6, 0.8, time_grid=(T, T, 2)))
    assert res.qee[0] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        recurrence_time([1.0, np.sqrt(2)])


def test_per_component_output():
    res = run_sweep(SpinBathConfig.uniform(3, 0.7, time_grid=(0, 1, 5)), per_component=True)
    assert res.per_component_fidelity.shape == (3, 5)
    np.testing.assert_allclose(res.per_component_fidelity.prod(axis=0), res.fidelity)


@pytest.mark.parametrize("kw, match", [
    (dict(K=2, occupations=[0.5]), "occupations"),
    (dict(K=1, occupations=[1.5]), r"\[0, 1\]"),
    (dict(K=1, occupations=[0.5], explicit_omegas=[-1.0]), "positive"),
    (dict(K=1, occupations=[0.5], time_grid=(0, 1, 1)), "2 points"),
])
def test_config_validation(kw, match):
    with pytest.raises(ValueError, match=match):
        SpinBathConfig(**kw)

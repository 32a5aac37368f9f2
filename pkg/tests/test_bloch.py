import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import OMEGA_A, OMEGA_B, OMEGA_T, ginibre
from discord_forge.bloch import (
    BlochState,
    InvalidStateError,
    NotAStateError,
    from_bloch,
    partial_trace,
    purity,
    reduced_states,
    to_bloch,
    validate,
)
from discord_forge.discord import qubit_entropy, von_neumann_entropy
from discord_forge.states import maximally_mixed, product, singlet
import oracles


def test_maximally_mixed_has_zero_bloch_data():
    s = to_bloch(maximally_mixed())
    assert s == BlochState.maximally_mixed()


def test_omega_bloch_triple_matches_trace_arithmetic(omega_dm):
    s = to_bloch(omega_dm)
    np.testing.assert_allclose(s.a, OMEGA_A, atol=1e-12)
    np.testing.assert_allclose(s.b, OMEGA_B, atol=1e-12)
    np.testing.assert_allclose(s.T, OMEGA_T, atol=1e-12)


def test_singlet_correlations():
    s = to_bloch(singlet())
    np.testing.assert_allclose(s.T, -np.eye(3), atol=1e-12)
    assert np.allclose(s.a, 0) and np.allclose(s.b, 0)


def test_from_bloch_identity_and_pure_product():
    assert np.allclose(from_bloch(BlochState.maximally_mixed()), np.eye(4) / 4)
    zz = BlochState([0, 0, 1], [0, 0, 1], np.diag([0, 0, 1.0]))
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    assert np.allclose(from_bloch(zz), expected, atol=1e-12)


def test_unphysical_triple_rejected():
    bad = BlochState(np.zeros(3), np.zeros(3), np.eye(3))
    # independent check that the matrix really has a negative eigenvalue
    w = np.linalg.eigvalsh(oracles.matrix_from_triple(np.zeros(3), np.zeros(3), np.eye(3)))
    assert w.min() < -0.1
    with pytest.raises(NotAStateError):
        from_bloch(bad)


def test_vector_longer_than_one_rejected():
    with pytest.raises(NotAStateError):
        BlochState([0, 0, 1.1], [0, 0, 0], np.zeros((3, 3)))


def test_validate_flags_trace():
    d = validate(np.eye(4) * 1.1 / 4)
    assert not d.trace_ok and d.hermitian_ok and d.psd_ok and not d.ok
    with pytest.raises(InvalidStateError):
        to_bloch(np.eye(4) * 1.1 / 4)


def test_validate_flags_hermiticity_and_negativity():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 0.1
    assert not validate(m).hermitian_ok
    assert not validate(np.diag([0.6, 0.6, -0.1, -0.1])).psd_ok


def test_validate_accepts_omega(omega_dm):
    assert validate(omega_dm).ok
    assert validate(np.eye(4) / 4).ok


def test_reduced_states_examples(omega_dm):
    a, b = reduced_states(singlet())
    assert np.allclose(a, 0) and np.allclose(b, 0)
    ra, rb = np.array([0.1, -0.2, 0.3]), np.array([0.5, 0.0, -0.4])
    a, b = reduced_states(product(ra, rb))
    np.testing.assert_allclose(a, ra, atol=1e-12)
    np.testing.assert_allclose(b, rb, atol=1e-12)
    a, b = reduced_states(omega_dm)
    np.testing.assert_allclose(a, OMEGA_A, atol=1e-12)
    np.testing.assert_allclose(b, OMEGA_B, atol=1e-12)


def test_round_trip_1000_random_states():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        dm = ginibre(rng)
        worst = max(worst, np.max(np.abs(from_bloch(to_bloch(dm)) - dm)))
    assert worst <= 1e-12


def test_bloch_round_trip_other_direction():
    rng = np.random.default_rng(12)
    for _ in range(200):
        s = to_bloch(ginibre(rng))
        assert to_bloch(from_bloch(s)).max_deviation(s) <= 1e-12


def test_marginal_entropies_agree_with_partial_trace():
    rng = np.random.default_rng(13)
    for _ in range(300):
        dm = ginibre(rng)
        a, b = reduced_states(dm)
        assert abs(qubit_entropy(np.linalg.norm(a)) - von_neumann_entropy(partial_trace(dm, "A"))) <= 1e-12
        assert abs(qubit_entropy(np.linalg.norm(b)) - von_neumann_entropy(partial_trace(dm, "B"))) <= 1e-12


@given(st.integers(0, 2**32 - 1))
def test_purity_formula(seed):
    dm = ginibre(np.random.default_rng(seed))
    s = to_bloch(dm)
    assert abs(purity(s) - np.trace(dm @ dm).real) <= 1e-12
    expected = (1 + s.a @ s.a + s.b @ s.b + np.sum(s.T**2)) / 4
    assert abs(np.trace(dm @ dm).real - expected) <= 1e-12


@given(st.integers(0, 2**32 - 1))
def test_to_bloch_matches_oracle(seed):
    dm = ginibre(np.random.default_rng(seed))
    a, b, t = oracles.bloch_triple(dm)
    s = to_bloch(dm)
    assert np.allclose(s.a, a, atol=1e-12) and np.allclose(s.b, b, atol=1e-12)
    assert np.allclose(s.T, t, atol=1e-12)


def test_bloch_state_is_immutable():
    s = BlochState.maximally_mixed()
    with pytest.raises(ValueError):
        s.a[0] = 1.0


def test_swapped_exchanges_parties():
    s = to_bloch(product([0.1, 0.2, 0.3], [0.0, -0.5, 0.1]))
    w = s.swapped()
    assert np.allclose(w.a, s.b) and np.allclose(w.T, s.T.T)

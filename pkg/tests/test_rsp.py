import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ginibre
from discord_forge.bloch import BlochState, to_bloch
from discord_forge.discord import geometric_discord
from discord_forge.rsp import (
    PHI_REGIME_1,
    PHI_TRIPLES,
    EquatorialTarget,
    modified_protocol,
    phi_case_angles,
    phi_fidelity,
    rsp_fidelity,
    simulate_singlet_rsp,
)
from discord_forge.states import maximally_mixed, phi_state, singlet
from discord_forge.unitary import NonlocalAngles


def test_fidelity_examples(omega_dm):
    assert rsp_fidelity(BlochState.maximally_mixed()) == 0
    assert rsp_fidelity(to_bloch(singlet())) == pytest.approx(1.0)
    assert rsp_fidelity(to_bloch(omega_dm)) <= 5e-4


@given(st.integers(0, 2**32 - 1))
def test_fidelity_is_geometric_discord_squared(seed):
    s = to_bloch(ginibre(np.random.default_rng(seed)))
    assert rsp_fidelity(s) == geometric_discord(s) ** 2
    assert 0 <= rsp_fidelity(s) <= 1


def test_omega_modified_protocol(omega_dm):
    rep = modified_protocol(omega_dm, NonlocalAngles.of_pi("1/2", 0, "1/2"))
    assert rep.post_geo_discord == pytest.approx(0.282843, abs=1e-6)
    assert rep.fidelity == pytest.approx(0.08, abs=1e-12)
    assert rep.fidelity == pytest.approx(rep.post_geo_discord**2, abs=1e-12)
    assert rep.success


def test_maximally_mixed_never_helps():
    rep = modified_protocol(maximally_mixed(), NonlocalAngles((0.3, 1.0, 2.0)))
    assert rep.fidelity == 0 and not rep.success


def test_phi_boundary_example():
    rep = modified_protocol(phi_state([0, 0, 0.3]), PHI_REGIME_1)
    assert rep.fidelity == pytest.approx(0.01125, abs=1e-12)


def test_phi_regime_one_closed_form():
    # worked out from the Bloch rules: F = |n|^2 / 8 for any direction
    rng = np.random.default_rng(51)
    for _ in range(50):
        n = rng.standard_normal(3)
        n *= rng.uniform(0.05, 1) / np.linalg.norm(n)
        assert phi_fidelity(n, PHI_REGIME_1) == pytest.approx(np.dot(n, n) / 8, abs=1e-12)


def test_phi_case_split():
    assert phi_case_angles([0, 0, 0.3]).angles == PHI_REGIME_1
    assert phi_case_angles([0.2, 0, 0]).angles is None
    assert phi_case_angles([0, 0, 0]).angles is None
    assert phi_case_angles([0, 0, 0.3]).regime == 1
    assert len(phi_case_angles([0.1, 0, 0]).diagnostics) == 2


@given(st.tuples(*[st.floats(-1, 1)] * 3))
def test_phi_lower_regimes_unreachable(n):
    case = phi_case_angles(n)
    assert case.regime in (1, None)


def test_phi_auto_mode_uses_qc_table():
    rep = modified_protocol(phi_state([0, 0, 0.5]), "auto")
    assert rep.row_id == "IV.1" and rep.angles_used is not None


def test_phi_n1_axis_fidelities_below_one_percent_for_small_n1():
    for n1 in np.linspace(0.01, 0.28, 28):
        for triple in PHI_TRIPLES:
            assert phi_fidelity([n1, 0, 0], triple) < 1e-2


@pytest.mark.parametrize("theta", [0.0, math.pi / 2, 1.234, 5.9])
def test_singlet_simulation_is_exact(theta):
    res = simulate_singlet_rsp(EquatorialTarget(theta), 1000, seed=7)
    assert res.mean_fidelity == pytest.approx(1.0, abs=1e-12)
    assert res.min_fidelity == pytest.approx(1.0, abs=1e-12)
    assert res.max_state_error <= 1e-12
    assert res.count0 + res.count1 == 1000


def test_singlet_bit_frequencies_are_binomial():
    res = simulate_singlet_rsp(EquatorialTarget(0.4), 10_000, seed=99)
    assert res.p0 == pytest.approx(0.5, abs=1e-12)
    assert res.within_3sigma


def test_singlet_simulation_is_reproducible():
    a = simulate_singlet_rsp(EquatorialTarget(1.0), 500, seed=3)
    b = simulate_singlet_rsp(EquatorialTarget(1.0), 500, seed=3)
    assert a == b
    with pytest.raises(ValueError):
        simulate_singlet_rsp(EquatorialTarget(1.0), 0, seed=3)


def test_target_angle_is_reduced():
    assert EquatorialTarget(2 * math.pi + 0.5).theta == pytest.approx(0.5)

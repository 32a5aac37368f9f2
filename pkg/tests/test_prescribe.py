from fractions import Fraction

import numpy as np
import pytest

from discord_forge.bloch import BlochState, qubit_matrix, to_bloch
from discord_forge.canonical import CanonicalCase, classify, match_structure
from discord_forge.discord import discord
from discord_forge.prescribe import (
    TABLE_III,
    TABLE_IV,
    NoPrescriptionError,
    NotZeroDiscordInputError,
    UnmatchedCaseError,
    activate,
    lookup,
    prescribe,
    product_state_rotation,
    row_by_id,
)
from discord_forge.states import classical_quantum, maximally_mixed, product, quantum_classical, singlet
from discord_forge.unitary import LocalRotationPair, NonlocalAngles, apply_local, apply_nonlocal

RA = np.array([0.3, -0.2, 0.5])
RB = np.array([-0.4, 0.1, 0.6])


def pi(*f):
    return tuple(Fraction(x) for x in f)


def test_table_sizes_and_exact_angles():
    assert len(TABLE_III) == 20
    assert len(TABLE_IV) == 22
    for row in TABLE_III + TABLE_IV:
        assert row.angles.pi_multiples is not None


def test_cq_vector_only_row():
    case = match_structure(BlochState([0, 0, 0], [0.4, 0, 0], np.zeros((3, 3))), "CQ")
    assert lookup(case).row_id == "III.2"
    assert prescribe(case).pi_multiples == pi("1/2", "1/4", "1/4")


def test_qc_single_axis_last_row():
    case = match_structure(BlochState([0.1, 0.2, 0], [0, 0, 0.3], np.diag([0, 0, 0.2])), "QC")
    assert lookup(case).row_id == "IV.22"
    assert prescribe(case).pi_multiples == pi(0, "1/2", 0)


def test_maximally_mixed_has_no_prescription():
    case = match_structure(BlochState.maximally_mixed(), "CQ")
    with pytest.raises(NoPrescriptionError, match="no prescription: maximally mixed"):
        prescribe(case)
    with pytest.raises(NoPrescriptionError):
        activate(maximally_mixed(), "QC")


def test_unmatched_case():
    bogus = CanonicalCase("CQ", "SINGLE_AXIS", (0.0, 0.3, 0.0), (0.0, 0.0, 0.0), axis=1, s=0.2)
    with pytest.raises(UnmatchedCaseError):
        prescribe(bogus)


def test_first_match_wins():
    # m = 0, n = (n1, n2, n3) all nonzero: row III.1 (n3 != 0) precedes everything else
    case = match_structure(BlochState([0, 0, 0], [0.2, 0.2, 0.2], np.zeros((3, 3))), "CQ")
    assert lookup(case).row_id == "III.1"


def test_product_rotation_is_proper():
    for r in (RA, RB, [0.1, 0.0, -0.3], [-0.5, 0.5, 0.2]):
        q = product_state_rotation(r)
        assert np.allclose(q @ q.T, np.eye(3), atol=1e-12) and np.linalg.det(q) > 0
        np.testing.assert_allclose(q @ np.asarray(r), [0, 0, np.linalg.norm(r) * np.sign(r[2])], atol=1e-12)
    with pytest.raises(ValueError):
        product_state_rotation([0, 0.2, 0.3])


def _product_rotations():
    return LocalRotationPair(product_state_rotation(RA), product_state_rotation(RB))


def test_product_state_cq_pipeline():
    rec = activate(product(RA, RB), "CQ", rotations=_product_rotations())
    assert rec.row_id == "III.20"
    assert rec.angles.pi_multiples == pi(1, "1/2", 1)
    assert rec.output_discord > 1e-4 and rec.effective


def test_product_state_qc_pipeline():
    rec = activate(product(RA, RB), "QC", rotations=_product_rotations())
    assert rec.row_id == "IV.22"
    assert rec.angles.pi_multiples == pi(0, "1/2", 0)
    assert rec.output_discord > 1e-4
    # the (pi, pi/2, 0) choice differs by the local unitary i sigma1 (x) sigma1
    alt = activate(product(RA, RB), "QC", rotations=_product_rotations(),
                   angles=NonlocalAngles.of_pi(1, "1/2", 0))
    assert alt.output_discord == pytest.approx(rec.output_discord, abs=1e-9)


def test_default_pipeline_uses_svd_frame():
    rec = activate(product(RA, RB), "CQ")
    assert rec.row_id == "III.18" and rec.output_discord > 1e-4
    assert rec.matched_case.family == "SINGLE_AXIS" and rec.matched_case.axis == 1


def test_activation_record_invariant():
    rng = np.random.default_rng(41)
    for _ in range(20):
        u = rng.standard_normal(3)
        dm = classical_quantum(rng.uniform(), u / np.linalg.norm(u),
                               qubit_matrix(rng.uniform(-0.5, 0.5, 3)), qubit_matrix(rng.uniform(-0.5, 0.5, 3)))
        rec = activate(dm, "CQ", lattice=512)
        want = apply_nonlocal(apply_local(rec.input, rec.pre_rotations), rec.angles)
        assert rec.output.max_deviation(want) <= 1e-10
        assert rec.output_discord == discord(rec.output, "B/A", 512)


def test_non_zero_discord_input_rejected():
    with pytest.raises(NotZeroDiscordInputError):
        activate(singlet(), "CQ")


def test_mirror_qc_activation():
    rng = np.random.default_rng(42)
    for _ in range(20):
        u = rng.standard_normal(3)
        dm = quantum_classical(rng.uniform(0.1, 0.4), u / np.linalg.norm(u),
                               qubit_matrix(rng.uniform(-0.5, 0.5, 3)), qubit_matrix(rng.uniform(-0.5, 0.5, 3)))
        rec = activate(dm, "QC", lattice=512)
        assert rec.row_id.startswith("IV.") and rec.output_discord > 1e-4


def test_table_completeness_on_constructed_states():
    rng = np.random.default_rng(43)
    seen = set()
    for i in range(5000):
        u = rng.standard_normal(3)
        args = (rng.uniform(), u / np.linalg.norm(u), qubit_matrix(rng.uniform(-0.57, 0.57, 3)),
                qubit_matrix(rng.uniform(-0.57, 0.57, 3)))
        for side, dm in (("CQ", classical_quantum(*args)), ("QC", quantum_classical(*args))):
            case = classify(to_bloch(dm), side)
            assert isinstance(case, CanonicalCase)
            seen.add(lookup(case).row_id)
    assert {"III.18", "IV.20"} <= seen


def test_row_lookup_by_id():
    assert row_by_id("IV.3").angles.pi_multiples == pi("1/4", 0, "1/2")
    with pytest.raises(KeyError):
        row_by_id("V.1")

import numpy as np
import pytest

from discord_forge.bloch import to_bloch, validate
from discord_forge.canonical import is_zero_discord, match_structure
from discord_forge.prescribe import ALL_ROWS, lookup
from discord_forge.report import emit_report
from discord_forge.verify import (
    SampleSpec,
    appendix_contradiction_check,
    appendix_rows,
    bloch_map_consistency,
    draw_row_state,
    load_witness_state,
    replay_witness,
    sample,
    sample_one,
    verify_theorem,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        SampleSpec("CQ", 0)
    with pytest.raises(ValueError):
        SampleSpec("XX", 1)
    with pytest.raises(ValueError):
        SampleSpec("CQ", 1, exclusion_radius=-1)
    with pytest.raises(ValueError):
        SampleSpec("CANONICAL_SUBCASE", 1)


def test_samples_are_deterministic_and_valid():
    spec = SampleSpec("GENERIC", 20, seed=5)
    first = list(sample(spec))
    assert all(np.array_equal(x, y) for x, y in zip(first, sample(spec)))
    assert all(validate(dm).ok for dm in first)
    assert np.array_equal(sample_one(spec, 7), first[7])


def test_constructed_samples_have_zero_discord():
    for dm in sample(SampleSpec("CQ", 10, seed=1)):
        assert is_zero_discord(dm, "B/A")
    for dm in sample(SampleSpec("QC", 10, seed=1)):
        assert is_zero_discord(dm, "A/B")
    for dm in sample(SampleSpec("PRODUCT", 10, seed=1)):
        assert is_zero_discord(dm, "B/A") and is_zero_discord(dm, "A/B")


@pytest.mark.parametrize("row", [r.row_id for r in ALL_ROWS])
def test_row_draws_match_their_row(row):
    rng = np.random.default_rng(3)
    side = "CQ" if row.startswith("III") else "QC"
    for _ in range(25):
        s = draw_row_state(row, rng)
        assert lookup(match_structure(s, side)).row_id == row


def test_theorem_report_counts_and_determinism():
    spec = SampleSpec("CQ", 15, seed=2)
    a = verify_theorem(1, spec, lattice=512)
    b = verify_theorem(1, spec, lattice=512)
    assert a.total == a.passed + a.failed
    assert a.total + a.indeterminate + a.excluded == 15
    assert emit_report(a, "machine") == emit_report(b, "machine")


def test_maximally_mixed_is_excluded(monkeypatch):
    import discord_forge.verify as v

    monkeypatch.setattr(v, "sample_one", lambda spec, i: np.eye(4, dtype=complex) / 4)
    rep = v.verify_theorem(3, SampleSpec("PRODUCT", 3), lattice=512)
    assert rep.excluded == 3 and rep.failed == 0 and rep.total == 0


def test_witnesses_round_trip_and_replay(tmp_path):
    # row IV.3 never activates, so every draw leaves a witness
    rep = appendix_contradiction_check("IV.3", trials=4, seed=1, lattice=512, witness_dir=tmp_path)
    assert rep.passed == 0 and len(rep.failure_witnesses) == 4
    for path in rep.failure_witnesses:
        s = load_witness_state(path)
        assert match_structure(s, "QC") is not None
        status, _ = replay_witness(path, lattice=512)
        assert status == "fail"


def test_product_subcase_passes():
    rep = appendix_contradiction_check("product", trials=10, lattice=512)
    assert rep.passed == 10


def test_appendix_rows_cover_both_tables():
    rows = appendix_rows()
    assert len(rows) == 42 and rows[0] == "III.1" and rows[-1] == "IV.22"
    with pytest.raises(KeyError):
        appendix_contradiction_check("III.99", trials=1)


def test_consistency_harness():
    rep = bloch_map_consistency(200, seed=4)
    assert rep.passed == 200 and rep.failed == 0
    assert rep.details[0].startswith("max_spectrum_deviation=")


def test_thread_cap_env(monkeypatch):
    monkeypatch.setenv("DISCORD_FORGE_THREADS", "1")
    one = verify_theorem(2, SampleSpec("QC", 6, seed=8), lattice=512)
    monkeypatch.setenv("DISCORD_FORGE_THREADS", "0")
    auto = verify_theorem(2, SampleSpec("QC", 6, seed=8), lattice=512)
    assert emit_report(one, "machine") == emit_report(auto, "machine")


def test_canonical_subcase_sampling():
    spec = SampleSpec("CANONICAL_SUBCASE", 5, seed=1, tag="III.2")
    for dm in sample(spec):
        assert lookup(match_structure(to_bloch(dm), "CQ")).row_id == "III.2"

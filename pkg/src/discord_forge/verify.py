"""Seeded sampling and statistical verification harnesses.

Each harness returns a ``VerificationReport``. A sample passes when the
activated (or transformed) state has discord above ``tol``; discord in
(1e-6, tol] is *indeterminate*, at most 1e-6 is a failure. Samples within
``exclusion_radius`` of I/4 are never asserted against. Non-passing samples
are written as witness state files that ``replay_witness`` can re-run.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bloch import BlochState, NotAStateError, from_bloch, qubit_matrix, spectrum, to_bloch
from .canonical import (
    DISCORD_TOL,
    AmbiguousClassificationError,
    CanonicalCase,
    classify,
    discord_direction,
)
from .discord import DEFAULT_LATTICE, ZERO_SNAP, discord
from .prescribe import (
    DomainError,
    LocalRotationPair,
    activate,
    product_state_rotation,
    row_by_id,
)
from .states import classical_quantum, product, quantum_classical
from .stateio import load_state, parse_state, save_state
from .unitary import (
    NonlocalAngles,
    apply_local,
    apply_nonlocal,
    conjugate,
    nonlocal_matrix_oracle,
)

KINDS = ("GENERIC", "CQ", "QC", "PRODUCT", "CANONICAL_SUBCASE")
DRAW_LOW = 0.05
THREADS_ENV = "DISCORD_FORGE_THREADS"
PRODUCT_ANGLES = {
    "CQ": NonlocalAngles.of_pi(1, "1/2", 1),
    "QC": NonlocalAngles.of_pi(1, "1/2", 0),
}


@dataclass(frozen=True)
class SampleSpec:
    kind: str
    count: int
    seed: int = 0
    exclusion_radius: float = 1e-6
    tag: str | None = None  # row id such as "III.2" for CANONICAL_SUBCASE

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.exclusion_radius < 0:
            raise ValueError("exclusion_radius must be >= 0")
        if self.kind == "CANONICAL_SUBCASE" and self.tag is None:
            raise ValueError("CANONICAL_SUBCASE needs a row tag")


def _sphere(rng) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def _ball(rng) -> np.ndarray:
    return _sphere(rng) * rng.uniform() ** (1 / 3)


def _ginibre(rng) -> np.ndarray:
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = g @ g.conj().T
    return m / np.trace(m).real


def _component(rng, c: str) -> float:
    if c == "0" or (c == "*" and rng.uniform() < 0.5):
        return 0.0
    return float(rng.choice((-1.0, 1.0)) * rng.uniform(DRAW_LOW, 1.0))


def draw_row_state(row_id: str, rng, max_tries: int = 100_000) -> BlochState:
    """Random canonical state fitting a table row, rejecting unphysical draws.

    ``x`` components are +-U[0.05, 1], ``*`` components are 0 with
    probability 1/2 and otherwise drawn like ``x``.
    """
    row = row_by_id(row_id)
    for _ in range(max_tries):
        m = [_component(rng, c) for c in row.m]
        n = [_component(rng, c) for c in row.n]
        T = np.zeros((3, 3))
        if row.axis is not None:
            T[row.axis - 1, row.axis - 1] = _component(rng, "x")
        try:
            s = BlochState(m, n, T)
            from_bloch(s)
        except NotAStateError:
            continue
        return s
    raise RuntimeError(f"no physical draw for row {row_id} in {max_tries} tries")


def draw_product(rng, max_tries: int = 100_000) -> tuple[np.ndarray, np.ndarray]:
    """Product-state vectors with every component +-U[0.05, 1] and norm <= 1."""
    out = []
    while len(out) < 2:
        for _ in range(max_tries):
            r = np.array([_component(rng, "x") for _ in range(3)])
            if np.linalg.norm(r) <= 1:
                out.append(r)
                break
        else:
            raise RuntimeError("no product draw")
    return out[0], out[1]


def sample_one(spec: SampleSpec, index: int) -> np.ndarray:
    rng = np.random.default_rng([spec.seed, index])
    kind = spec.kind
    if kind == "GENERIC":
        return _ginibre(rng)
    if kind == "CQ":
        return classical_quantum(
            rng.uniform(), _sphere(rng), qubit_matrix(_ball(rng)), qubit_matrix(_ball(rng))
        )
    if kind == "QC":
        return quantum_classical(
            rng.uniform(), _sphere(rng), qubit_matrix(_ball(rng)), qubit_matrix(_ball(rng))
        )
    if kind == "PRODUCT":
        return product(_ball(rng), _ball(rng))
    return from_bloch(draw_row_state(spec.tag, rng))


def sample(spec: SampleSpec):
    """Deterministic stream of density matrices; sample i uses seed [seed, i]."""
    for i in range(spec.count):
        yield sample_one(spec, i)


# -- reports --------------------------------------------------------------------


@dataclass(frozen=True)
class Outcome:
    index: int
    status: str  # pass | fail | indeterminate | excluded
    discord: float | None
    detail: str = ""
    witness: str | None = None


@dataclass(frozen=True)
class VerificationReport:
    name: str
    total: int
    passed: int
    failed: int
    indeterminate: int
    excluded: int
    min_observed_discord: float | None
    failure_witnesses: tuple[str, ...]
    runtime: float
    details: tuple[str, ...] = field(default_factory=tuple)

    @property
    def requested(self) -> int:
        return self.total + self.indeterminate + self.excluded

    @property
    def all_passed(self) -> bool:
        return self.failed == 0 and self.indeterminate == 0


def _status(value: float, tol: float) -> str:
    if value > tol:
        return "pass"
    return "indeterminate" if value > ZERO_SNAP else "fail"


def _threads() -> int | None:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0")
    return None if n == 0 else n


def _run(name, count, job, started, details=()) -> VerificationReport:
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        outcomes = sorted(pool.map(job, range(count)), key=lambda o: o.index)
    seen = [o.discord for o in outcomes if o.status != "excluded" and o.discord is not None]
    by = {k: sum(o.status == k for o in outcomes) for k in ("pass", "fail", "indeterminate", "excluded")}
    notes = list(details)
    for o in outcomes:
        if o.status in ("fail", "indeterminate"):
            notes.append(f"sample {o.index}: {o.status} {o.detail}".rstrip())
    return VerificationReport(
        name=name,
        total=by["pass"] + by["fail"],
        passed=by["pass"],
        failed=by["fail"],
        indeterminate=by["indeterminate"],
        excluded=by["excluded"],
        min_observed_discord=min(seen) if seen else None,
        failure_witnesses=tuple(o.witness for o in outcomes if o.witness),
        runtime=time.perf_counter() - started,
        details=tuple(notes),
    )


def _witness(witness_dir, stem: str, state, comments) -> str | None:
    if witness_dir is None:
        return None
    d = Path(witness_dir)
    d.mkdir(parents=True, exist_ok=True)
    path = d / f"{stem}.dm"
    save_state(path, state, comments)
    return str(path)


# -- theorem harness ------------------------------------------------------------

_THEOREM_KIND = {1: "CQ", 2: "QC", 3: "PRODUCT"}
_THEOREM_SIDES = {1: ("CQ",), 2: ("QC",), 3: ("CQ", "QC")}


def activation_check(dm, sides, tol: float, lattice: int) -> tuple[float, str]:
    """Smallest activated discord over ``sides`` and a short description."""
    worst, parts = np.inf, []
    for side in sides:
        rec = activate(dm, side, lattice=lattice, tol=tol)
        worst = min(worst, rec.output_discord)
        parts.append(f"{side}:{rec.row_id}:D={rec.output_discord:.3e}")
    return float(worst), " ".join(parts)


def verify_theorem(
    which: int,
    spec: SampleSpec | None = None,
    tol: float = DISCORD_TOL,
    lattice: int = DEFAULT_LATTICE,
    witness_dir=None,
) -> VerificationReport:
    """Activate every sample and check the activated discord exceeds ``tol``.

    Check 1 uses CQ samples and D(B/A), check 2 QC samples and D(A/B),
    check 3 product states activated both ways.
    """
    if which not in _THEOREM_KIND:
        raise ValueError("theorem must be 1, 2 or 3")
    if spec is None:
        spec = SampleSpec(_THEOREM_KIND[which], 1000 if which < 3 else 500)
    sides = _THEOREM_SIDES[which]
    started = time.perf_counter()

    def job(i: int) -> Outcome:
        dm = sample_one(spec, i)
        if to_bloch(dm).norm <= spec.exclusion_radius:
            return Outcome(i, "excluded", None)
        try:
            value, detail = activation_check(dm, sides, tol, lattice)
        except (DomainError, AmbiguousClassificationError) as exc:
            value, detail = 0.0, f"error: {exc}"
        status = _status(value, tol)
        wit = None
        if status != "pass":
            wit = _witness(
                witness_dir,
                f"theorem{which}_{spec.seed}_{i}",
                dm,
                [f"check: theorem {which}", f"tol: {tol!r}", f"seed: {spec.seed} index: {i}", detail],
            )
        return Outcome(i, status, value, detail, wit)

    return _run(f"theorem {which}", spec.count, job, started)


# -- appendix harness -----------------------------------------------------------


def _row_check(s: BlochState, row_id: str, tol: float, lattice: int) -> tuple[float, str]:
    row = row_by_id(row_id)
    out = apply_nonlocal(s, row.angles)
    try:
        res = classify(out, row.side, tol=tol, lattice=lattice)
    except AmbiguousClassificationError as exc:
        return exc.value, "ambiguous"
    if isinstance(res, CanonicalCase):
        return 0.0, f"still zero-discord ({res.zero_pattern})"
    return res.discord, ""


def _product_check(dm, tol: float, lattice: int) -> tuple[float, str]:
    s = to_bloch(dm)
    rot = LocalRotationPair(product_state_rotation(s.a), product_state_rotation(s.b))
    worst, parts = np.inf, []
    for side, angles in PRODUCT_ANGLES.items():
        canon = apply_local(s, rot)
        out = apply_nonlocal(canon, angles)
        value = discord(out, discord_direction(side), lattice)
        worst = min(worst, value)
        parts.append(f"{side}:D={value:.3e}")
    return float(worst), " ".join(parts)


def appendix_rows() -> tuple[str, ...]:
    from .prescribe import ALL_ROWS

    return tuple(r.row_id for r in ALL_ROWS)


def appendix_contradiction_check(
    subcase: str,
    trials: int = 100,
    tol: float = DISCORD_TOL,
    seed: int = 0,
    lattice: int = DEFAULT_LATTICE,
    witness_dir=None,
    exclusion_radius: float = 1e-6,
) -> VerificationReport:
    """Random draws of one table row (or ``"product"``) under its angles.

    Table rows are drawn directly in canonical form and must leave the
    zero-discord set for their side. The product subcase draws r^a, r^b,
    applies the closed-form product rotations and then both prescribed
    product angles.
    """
    if subcase != "product":
        row_by_id(subcase)
    started = time.perf_counter()
    salt = sum(ord(c) * 131**k for k, c in enumerate(subcase)) % (2**32)

    def job(i: int) -> Outcome:
        rng = np.random.default_rng([seed, salt, i])
        if subcase == "product":
            dm = product(*draw_product(rng))
            value, detail = _product_check(dm, tol, lattice)
        else:
            s = draw_row_state(subcase, rng)
            dm = from_bloch(s)
            if s.norm <= exclusion_radius:
                return Outcome(i, "excluded", None)
            value, detail = _row_check(s, subcase, tol, lattice)
        status = _status(value, tol)
        wit = None
        if status != "pass":
            wit = _witness(
                witness_dir,
                f"appendix_{subcase.replace('.', '_')}_{seed}_{i}",
                dm,
                [f"check: appendix {subcase}", f"tol: {tol!r}", f"seed: {seed} index: {i}", detail],
            )
        return Outcome(i, status, value, detail, wit)

    return _run(f"appendix {subcase}", trials, job, started)


def replay_witness(path, lattice: int = DEFAULT_LATTICE) -> tuple[str, float]:
    """Re-run the check recorded in a witness file; returns (status, discord)."""
    text = Path(path).read_text(encoding="utf-8")
    meta = {}
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition(": ")
            if sep:
                meta[key] = value
    check, tol = meta["check"].split(), float(meta["tol"])
    dm = load_state(path)
    if check[0] == "theorem":
        which = int(check[1])
        try:
            value, _ = activation_check(dm, _THEOREM_SIDES[which], tol, lattice)
        except (DomainError, AmbiguousClassificationError):
            value = 0.0
    elif check[1] == "product":
        value, _ = _product_check(dm, tol, lattice)
    else:
        value, _ = _row_check(to_bloch(dm), check[1], tol, lattice)
    return _status(value, tol), value


# -- Bloch map vs matrix oracle -------------------------------------------------


def bloch_map_consistency(
    trials: int = 1000,
    seed: int = 0,
    spectrum_tol: float = 1e-10,
    oracle_tol: float = 1e-9,
) -> VerificationReport:
    """Random GENERIC state and random angles per trial; checks spectrum
    preservation of the Bloch rules and agreement with U rho U^dagger."""
    started = time.perf_counter()
    spec = SampleSpec("GENERIC", trials, seed)
    worst = {"spectrum": 0.0, "oracle": 0.0}

    def job(i: int) -> Outcome:
        dm = sample_one(spec, i)
        rng = np.random.default_rng([seed, 1, i])
        angles = NonlocalAngles(tuple(rng.uniform(0, 2 * np.pi, 3)))
        s = to_bloch(dm)
        out = apply_nonlocal(s, angles)
        d_spec = float(np.max(np.abs(spectrum(out) - spectrum(s))))
        ref = to_bloch(conjugate(dm, nonlocal_matrix_oracle(angles)), check=False)
        d_orc = out.max_deviation(ref)
        ok = d_spec <= spectrum_tol and d_orc <= oracle_tol
        return Outcome(i, "pass" if ok else "fail", None, f"spectrum={d_spec:.2e} oracle={d_orc:.2e}")

    def tracked(i: int) -> Outcome:
        o = job(i)
        spec_dev, orc_dev = (float(x.split("=")[1]) for x in o.detail.split())
        worst["spectrum"] = max(worst["spectrum"], spec_dev)
        worst["oracle"] = max(worst["oracle"], orc_dev)
        return o

    report = _run("bloch-map consistency", trials, tracked, started)
    extra = (
        f"max_spectrum_deviation={worst['spectrum']:.3e}",
        f"max_oracle_deviation={worst['oracle']:.3e}",
    )
    return VerificationReport(**{**report.__dict__, "details": extra + report.details})


def load_witness_state(path) -> BlochState:
    """Parse a witness file back into Bloch form (round-trip helper)."""
    obj = parse_state(Path(path).read_text(encoding="utf-8"))
    return obj if isinstance(obj, BlochState) else to_bloch(obj)

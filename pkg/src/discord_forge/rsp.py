"""Remote state preparation: fidelity law, the two-phase protocol with a
nonlocal preparatory step, the Phi family and an ideal singlet simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bloch import PAULI_Z, BlochState
from .discord import DEFAULT_LATTICE, as_bloch, geometric_discord
from .prescribe import activate
from .states import phi_state, singlet
from .unitary import NonlocalAngles, apply_nonlocal

SUCCESS_THRESHOLD = 1e-2
PHI_RADIUS = 0.3

PHI_REGIME_1 = NonlocalAngles.of_pi("1/4", "3/4", "3/4")
PHI_REGIME_2 = NonlocalAngles.of_pi("3/4", "3/4", "1/2")
PHI_REGIME_3 = NonlocalAngles.of_pi("1/4", "1/4", "1/2")
PHI_TRIPLES = (PHI_REGIME_1, PHI_REGIME_2, PHI_REGIME_3)


def rsp_fidelity(s: BlochState) -> float:
    """F = (lambda2 + lambda3)/2 from the eigenvalues of T^T T."""
    return geometric_discord(s) ** 2


@dataclass(frozen=True)
class RspReport:
    pre_geo_discord: float
    post_geo_discord: float
    fidelity: float
    angles_used: NonlocalAngles
    success_threshold: float = SUCCESS_THRESHOLD
    row_id: str | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def pre_fidelity(self) -> float:
        return self.pre_geo_discord**2

    @property
    def success(self) -> bool:
        return self.fidelity >= self.success_threshold


def modified_protocol(
    dm,
    angles: NonlocalAngles | str = "auto",
    lattice: int = DEFAULT_LATTICE,
    success_threshold: float = SUCCESS_THRESHOLD,
) -> RspReport:
    """Preparatory nonlocal unitary followed by the standard measurement phase.

    Explicit angles act on the state as given (no local pre-rotation). With
    ``"auto"`` the state goes through the QC activation pipeline, since the
    sender needs D(A/B) > 0.
    """
    s = as_bloch(dm)
    row_id = None
    if isinstance(angles, str):
        if angles != "auto":
            angles = NonlocalAngles.parse(angles)
    if angles == "auto":
        rec = activate(s, "QC", lattice=lattice)
        out, angles, row_id = rec.output, rec.angles, rec.row_id
    else:
        out = apply_nonlocal(s, angles)
    post = geometric_discord(out)
    return RspReport(
        pre_geo_discord=geometric_discord(s),
        post_geo_discord=post,
        fidelity=post**2,
        angles_used=angles,
        success_threshold=success_threshold,
        row_id=row_id,
    )


@dataclass(frozen=True)
class PhiCase:
    """Outcome of the Phi-family case split; ``angles`` is None for no case."""

    angles: NonlocalAngles | None
    regime: int | None
    diagnostics: tuple[str, ...]


def phi_case_angles(n) -> PhiCase:
    """Case split for (I + I (x) n.sigma)/4, conditions taken in listed order.

    Regimes 2 and 3 both ask for |n| < 0.3 together with a single component
    >= 0.3, which no real vector satisfies; they are kept as written and
    reported as unreachable.
    """
    n = np.asarray(n, dtype=np.float64)
    if n.shape != (3,) or not np.all(np.isfinite(n)):
        raise ValueError("n must be a finite 3-vector")
    norm = float(np.linalg.norm(n))
    diag = (
        "regime 2 (|n| < 0.3 and n3 >= 0.3) is unsatisfiable",
        "regime 3 (|n| < 0.3 and n1 >= 0.3) is unsatisfiable",
    )
    if norm >= PHI_RADIUS:
        return PhiCase(PHI_REGIME_1, 1, diag)
    if n[2] >= PHI_RADIUS:
        return PhiCase(PHI_REGIME_2, 2, diag)
    if n[2] < PHI_RADIUS and n[0] >= PHI_RADIUS:
        return PhiCase(PHI_REGIME_3, 3, diag)
    return PhiCase(None, None, diag)


def phi_fidelity(n, angles: NonlocalAngles) -> float:
    return rsp_fidelity(apply_nonlocal(phi_state(n), angles))


# -- ideal singlet protocol -----------------------------------------------------


@dataclass(frozen=True)
class EquatorialTarget:
    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        object.__setattr__(self, "theta", float(self.theta) % (2 * math.pi))

    def ket(self) -> np.ndarray:
        return np.array([1.0, np.exp(1j * self.theta)]) / math.sqrt(2)

    def orthogonal(self) -> np.ndarray:
        return np.array([1.0, -np.exp(1j * self.theta)]) / math.sqrt(2)


@dataclass(frozen=True)
class SingletRspResult:
    theta: float
    shots: int
    seed: int
    count0: int
    count1: int
    p0: float
    mean_fidelity: float
    min_fidelity: float
    max_state_error: float

    @property
    def frequency0(self) -> float:
        return self.count0 / self.shots

    @property
    def binomial_sigma(self) -> float:
        return math.sqrt(self.shots * self.p0 * (1 - self.p0))

    @property
    def within_3sigma(self) -> bool:
        return abs(self.count0 - self.shots * self.p0) <= 3 * self.binomial_sigma


def _branches(target: EquatorialTarget):
    """(probability, Bob's corrected state) for Alice's outcomes 0 and 1."""
    rho = singlet()
    out = []
    for bit, ket in ((0, target.ket()), (1, target.orthogonal())):
        proj = np.kron(np.outer(ket, ket.conj()), np.eye(2))
        post = proj @ rho @ proj
        p = float(np.trace(post).real)
        bob = np.einsum("ijik->jk", post.reshape(2, 2, 2, 2)) / p
        if bit == 0:
            bob = PAULI_Z @ bob @ PAULI_Z
        out.append((p, bob))
    return out


def simulate_singlet_rsp(target: EquatorialTarget, shots: int, seed: int) -> SingletRspResult:
    """Shot-by-shot run of the ideal protocol on a shared singlet.

    Alice measures {|phi>, |phi_perp>}; bit 0 means she found |phi>, in which
    case Bob applies sigma_3. Outcomes come from a Philox counter-based stream
    keyed by ``seed``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    branches = _branches(target)
    p0 = branches[0][0]
    rng = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))
    bits = (rng.random(shots) >= p0).astype(np.int8)
    target_dm = np.outer(target.ket(), target.ket().conj())
    fid = np.array([float(np.real(target.ket().conj() @ b @ target.ket())) for _, b in branches])
    err = np.array([np.max(np.abs(b - target_dm)) for _, b in branches])
    per_shot = fid[bits]
    count1 = int(bits.sum())
    return SingletRspResult(
        theta=target.theta,
        shots=shots,
        seed=int(seed),
        count0=shots - count1,
        count1=count1,
        p0=p0,
        mean_fidelity=float(per_shot.mean()),
        min_fidelity=float(per_shot.min()),
        max_state_error=float(err[bits].max()),
    )

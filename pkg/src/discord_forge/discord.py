"""Entropies, one-way quantum discord and geometric discord for two qubits.

Conventions: logarithms are base 2. ``D(B/A)`` is the discord when A is
measured (projectors (I +- u.sigma)/2 on A); ``D(A/B)`` measures B.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.optimize import minimize

from .bloch import (
    I2,
    PAULIS,
    PSD_TOL,
    BlochState,
    InvalidStateError,
    check_density_matrix,
    from_bloch,
    partial_trace,
    to_bloch,
)

Party = Literal["A", "B"]
Direction = Literal["B/A", "A/B"]

EIG_FLOOR = 1e-14
ZERO_SNAP = 1e-6
DEFAULT_LATTICE = 2048
REFINE_TOP = 5
STEP_TOL = 1e-8


class OptimizerWarning(RuntimeWarning):
    """Local refinement did not report convergence."""


def von_neumann_entropy(m) -> float:
    """-Tr(m log2 m) for a Hermitian PSD matrix; 0 log 0 = 0."""
    m = np.asarray(m, dtype=np.complex128)
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    if w.min() < -PSD_TOL:
        raise InvalidStateError(f"matrix is not PSD (eigenvalue {w.min():.3g})")
    w = np.clip(w, 0.0, 1.0)
    w = w[w > EIG_FLOOR]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def qubit_entropy(r):
    """Entropy of a qubit whose Bloch vector has length ``r`` (vectorised)."""
    r = np.clip(np.asarray(r, dtype=np.float64), 0.0, 1.0)
    p = (1 + r) / 2
    q = (1 - r) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        hp = np.where(p > EIG_FLOOR, -p * np.log2(np.where(p > 0, p, 1)), 0.0)
        hq = np.where(q > EIG_FLOOR, -q * np.log2(np.where(q > 0, q, 1)), 0.0)
    return hp + hq


def mutual_information(dm) -> float:
    """I(A:B) = S(A) + S(B) - S(AB)."""
    m = check_density_matrix(dm)
    return (
        von_neumann_entropy(partial_trace(m, "A"))
        + von_neumann_entropy(partial_trace(m, "B"))
        - von_neumann_entropy(m)
    )


def _unit(u) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    nrm = np.linalg.norm(u)
    if u.shape != (3,) or not np.isfinite(nrm) or nrm == 0:
        raise ValueError("measurement direction must be a nonzero 3-vector")
    if abs(nrm - 1) > 1e-12:
        raise ValueError(f"measurement direction must be a unit vector (|u| = {nrm!r})")
    return u


def conditional_entropy(dm, u, side: Party) -> float:
    """S(other | {Pi_u}) after a projective measurement of party ``side``.

    Computed at the matrix level: p_i = Tr[(Pi_i (x) I) rho] and the
    conditioned reduced state is renormalised; a p_i = 0 branch contributes 0.
    """
    m = check_density_matrix(dm)
    u = _unit(u)
    proj0 = (I2 + np.einsum("k,kij->ij", u, PAULIS)) / 2
    total = 0.0
    for proj in (proj0, I2 - proj0):
        if side == "A":
            op = np.kron(proj, I2)
            cond = partial_trace(op @ m @ op, "B")
        elif side == "B":
            op = np.kron(I2, proj)
            cond = partial_trace(op @ m @ op, "A")
        else:
            raise ValueError(f"side must be 'A' or 'B', got {side!r}")
        p = float(np.trace(cond).real)
        if p > EIG_FLOOR:
            total += p * von_neumann_entropy(cond / p)
    return total


# -- optimisation over measurement directions -----------------------------------


def fibonacci_hemisphere(n: int) -> np.ndarray:
    """``n`` near-uniform unit vectors with z >= 0 (u and -u are equivalent)."""
    i = np.arange(n) + 0.5
    z = i / n
    azimuth = math.pi * (1 + math.sqrt(5)) * i
    rho = np.sqrt(1 - z * z)
    return np.stack([rho * np.cos(azimuth), rho * np.sin(azimuth), z], axis=1)


def _oriented(s: BlochState, measured: Party):
    """(measured vector, other vector, T with rows indexed by measured party)."""
    if measured == "A":
        return s.a, s.b, s.T
    if measured == "B":
        return s.b, s.a, s.T.T
    raise ValueError(f"measured party must be 'A' or 'B', got {measured!r}")


def conditional_entropy_bloch(s: BlochState, dirs, measured: Party) -> np.ndarray:
    """Vectorised S(other | Pi_u) for an (n, 3) array of unit directions.

    Outcome +-u has probability p = (1 +- m.u)/2 and leaves the other party
    with Bloch vector (o +- T^T u)/(2p).
    """
    mv, ov, T = _oriented(s, measured)
    dirs = np.atleast_2d(dirs)
    mu = dirs @ mv
    tu = dirs @ T
    total = np.zeros(len(dirs))
    for sign in (1.0, -1.0):
        p = (1 + sign * mu) / 2
        r = np.linalg.norm(ov + sign * tu, axis=1)
        ok = p > EIG_FLOOR
        length = np.where(ok, r / np.where(ok, 2 * p, 1.0), 0.0)
        total += np.where(ok, p * qubit_entropy(length), 0.0)
    return total


def _h_scalar(r: float) -> float:
    r = min(max(r, 0.0), 1.0)
    out = 0.0
    for v in ((1 + r) / 2, (1 - r) / 2):
        if v > EIG_FLOOR:
            out -= v * math.log2(v)
    return out


def _scalar_objective(s: BlochState, measured: Party):
    """Plain-float version of ``conditional_entropy_bloch`` in (theta, phi);
    the refinement calls it hundreds of times, where numpy overhead dominates."""
    mv, ov, T = (x.tolist() for x in _oriented(s, measured))

    def f(x) -> float:
        th, ph = float(x[0]), float(x[1])
        st = math.sin(th)
        u = (st * math.cos(ph), st * math.sin(ph), math.cos(th))
        mu = u[0] * mv[0] + u[1] * mv[1] + u[2] * mv[2]
        tu = [u[0] * T[0][j] + u[1] * T[1][j] + u[2] * T[2][j] for j in range(3)]
        total = 0.0
        for sign in (1.0, -1.0):
            p = (1 + sign * mu) / 2
            if p > EIG_FLOOR:
                r = math.sqrt(sum((ov[j] + sign * tu[j]) ** 2 for j in range(3)))
                total += p * _h_scalar(r / (2 * p))
        return total

    return f


def _spherical(x) -> np.ndarray:
    th, ph = x
    return np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])


@dataclass(frozen=True)
class _Search:
    value: float
    direction: np.ndarray
    evals: int
    converged: bool


def _minimise_conditional(s: BlochState, measured: Party, lattice: int) -> _Search:
    """Coarse Fibonacci scan of the hemisphere, then Nelder-Mead on the best few."""
    dirs = fibonacci_hemisphere(lattice)
    coarse = conditional_entropy_bloch(s, dirs, measured)
    evals = lattice
    best = _Search(float(coarse.min()), dirs[int(np.argmin(coarse))], evals, True)
    converged = True
    objective = _scalar_objective(s, measured)
    for idx in np.argsort(coarse, kind="stable")[:REFINE_TOP]:
        u0 = dirs[idx]
        x0 = [math.acos(min(1.0, max(-1.0, u0[2]))), math.atan2(u0[1], u0[0])]
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"xatol": STEP_TOL, "fatol": 1e-15, "maxiter": 4000},
        )
        evals += res.nfev
        if res.fun < best.value:
            converged = bool(res.success)
            best = _Search(float(res.fun), _spherical(res.x), evals, converged)
    u = best.direction
    if u[2] < 0 or (u[2] == 0 and (u[1] < 0 or (u[1] == 0 and u[0] < 0))):
        u = -u
    return _Search(best.value, u, evals, converged)


def as_bloch(state) -> BlochState:
    return state if isinstance(state, BlochState) else to_bloch(state)


def classical_correlation(
    dm, side: Party, lattice: int = DEFAULT_LATTICE
) -> tuple[float, np.ndarray]:
    """J = S(other) - min_u S(other | Pi_u) when party ``side`` is measured.

    Returns (J, u*) with u* on the upper hemisphere. Warns with
    ``OptimizerWarning`` if the local refinement did not converge.
    """
    res = _classical(as_bloch(dm), side, lattice)
    if not res[3]:
        warnings.warn("classical-correlation refinement did not converge", OptimizerWarning)
    return res[0], res[1]


def _classical(s: BlochState, side: Party, lattice: int):
    _, other, _ = _oriented(s, side)
    search = _minimise_conditional(s, side, lattice)
    j = float(qubit_entropy(np.linalg.norm(other))) - search.value
    return j, search.direction, search.evals, search.converged


def _mutual_information_bloch(s: BlochState) -> float:
    return float(
        qubit_entropy(np.linalg.norm(s.a))
        + qubit_entropy(np.linalg.norm(s.b))
        - von_neumann_entropy(from_bloch(s, check=False))
    )


def _snap(d: float) -> float:
    return 0.0 if abs(d) <= ZERO_SNAP else d


def measured_party(direction: Direction) -> Party:
    if direction == "B/A":
        return "A"
    if direction == "A/B":
        return "B"
    raise ValueError(f"direction must be 'B/A' or 'A/B', got {direction!r}")


def discord(dm, side: Direction, lattice: int = DEFAULT_LATTICE) -> float:
    """One-way discord I - J; 'B/A' measures A, 'A/B' measures B.

    Values within 1e-6 of zero are reported as exactly 0.
    """
    s = as_bloch(dm)
    party = measured_party(side)
    j, _, _, ok = _classical(s, party, lattice)
    if not ok:
        warnings.warn("discord refinement did not converge", OptimizerWarning)
    return _snap(_mutual_information_bloch(s) - j)


def geometric_discord(s: BlochState) -> float:
    """sqrt((lambda2 + lambda3)/2), lambda1 >= lambda2 >= lambda3 eigenvalues of T^T T.

    This is the correlation-tensor-only quantity whose square is the RSP
    fidelity; local Bloch vectors do not enter.
    """
    lam = np.sort(np.linalg.eigvalsh(s.T.T @ s.T))[::-1]
    f = max(0.0, float(lam[1] + lam[2]) / 2)
    return math.sqrt(min(f, 1.0))


def hilbert_schmidt_discord(s: BlochState, measured: Party) -> float:
    """Squared Hilbert-Schmidt distance to the closest zero-discord state,
    (|v|^2 + ||T||^2 - k_max)/4 with v the measured party's Bloch vector and
    k_max the top eigenvalue of v v^T + T T^T (rows of T on the measured side).
    """
    v, _, T = _oriented(s, measured)
    k = np.outer(v, v) + T @ T.T
    val = (v @ v + np.sum(T * T) - np.linalg.eigvalsh(k).max()) / 4
    return max(0.0, float(val))


@dataclass(frozen=True)
class DiscordReport:
    mutual_info: float
    J_BA: float
    J_AB: float
    D_BA: float
    D_AB: float
    u_star_A: np.ndarray
    u_star_B: np.ndarray
    geo_discord: float
    hs_discord_BA: float
    hs_discord_AB: float
    optimizer_evals: int
    converged: bool
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def fidelity(self) -> float:
        return self.geo_discord**2


def analyze(dm, lattice: int = DEFAULT_LATTICE) -> DiscordReport:
    """Both one-way discords, correlations and geometric quantities."""
    s = as_bloch(dm)
    mi = _mutual_information_bloch(s)
    j_ba, u_a, ev_a, ok_a = _classical(s, "A", lattice)
    j_ab, u_b, ev_b, ok_b = _classical(s, "B", lattice)
    d_ba = _snap(mi - j_ba)
    d_ab = _snap(mi - j_ab)
    # keep D = I - J exact after snapping near-zero discord
    return DiscordReport(
        mutual_info=mi,
        J_BA=mi - d_ba,
        J_AB=mi - d_ab,
        D_BA=d_ba,
        D_AB=d_ab,
        u_star_A=u_a,
        u_star_B=u_b,
        geo_discord=geometric_discord(s),
        hs_discord_BA=hilbert_schmidt_discord(s, "A"),
        hs_discord_AB=hilbert_schmidt_discord(s, "B"),
        optimizer_evals=ev_a + ev_b,
        converged=ok_a and ok_b,
    )

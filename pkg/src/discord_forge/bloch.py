"""Density matrix <-> Bloch (a, b, T) conversions for two qubits.

Basis order is |00>, |01>, |10>, |11> (qubit A is the left tensor factor),
with sigma_1, sigma_2, sigma_3 = X, Y, Z in the computational basis.

    rho = (I + a.sigma (x) I + I (x) b.sigma + sum_ij T_ij sigma_i (x) sigma_j) / 4
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-10

I2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = np.stack([PAULI_X, PAULI_Y, PAULI_Z])

# sigma_i (x) I, I (x) sigma_i and sigma_i (x) sigma_j, precomputed
_LOCAL_A = np.stack([np.kron(p, I2) for p in PAULIS])
_LOCAL_B = np.stack([np.kron(I2, p) for p in PAULIS])
_CORR = np.stack([[np.kron(p, q) for q in PAULIS] for p in PAULIS])


class InvalidStateError(ValueError):
    """Matrix violates Hermiticity, unit trace or positivity beyond tolerance."""


class NotAStateError(InvalidStateError):
    """An (a, b, T) triple whose reconstruction has a negative eigenvalue."""


@dataclass(frozen=True)
class Diagnostics:
    trace_deviation: float
    hermiticity_deviation: float
    min_eigenvalue: float
    trace_ok: bool
    hermitian_ok: bool
    psd_ok: bool

    @property
    def ok(self) -> bool:
        return self.trace_ok and self.hermitian_ok and self.psd_ok


def validate(dm) -> Diagnostics:
    """Report invariant deviations of a 4x4 matrix without raising."""
    m = np.asarray(dm, dtype=np.complex128)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    herm = float(np.max(np.abs(m - m.conj().T)))
    tr = float(abs(np.trace(m) - 1.0))
    # eigenvalues of the Hermitian part; a non-Hermitian input fails anyway
    min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
    return Diagnostics(
        trace_deviation=tr,
        hermiticity_deviation=herm,
        min_eigenvalue=min_eig,
        trace_ok=tr <= TRACE_TOL,
        hermitian_ok=herm <= HERMITIAN_TOL,
        psd_ok=min_eig >= -PSD_TOL,
    )


def check_density_matrix(dm) -> np.ndarray:
    """Return ``dm`` as a complex array, raising InvalidStateError if unphysical."""
    m = np.asarray(dm, dtype=np.complex128)
    diag = validate(m)
    if not diag.ok:
        problems = []
        if not diag.hermitian_ok:
            problems.append(f"hermiticity deviation {diag.hermiticity_deviation:.3g}")
        if not diag.trace_ok:
            problems.append(f"trace deviation {diag.trace_deviation:.3g}")
        if not diag.psd_ok:
            problems.append(f"min eigenvalue {diag.min_eigenvalue:.3g}")
        raise InvalidStateError("invalid density matrix: " + ", ".join(problems))
    return m


def _frozen(x, shape) -> np.ndarray:
    arr = np.array(x, dtype=np.float64)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite Bloch component")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BlochState:
    """Local Bloch vectors ``a``, ``b`` and correlation tensor ``T``."""

    a: np.ndarray
    b: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a, (3,)))
        object.__setattr__(self, "b", _frozen(self.b, (3,)))
        object.__setattr__(self, "T", _frozen(self.T, (3, 3)))
        for name in ("a", "b"):
            if np.linalg.norm(getattr(self, name)) > 1 + NORM_TOL:
                raise NotAStateError(f"|{name}| exceeds 1")

    @classmethod
    def maximally_mixed(cls) -> BlochState:
        return cls(np.zeros(3), np.zeros(3), np.zeros((3, 3)))

    @property
    def norm(self) -> float:
        """Euclidean norm of the stacked (a, b, T) parameters; 0 only for I/4."""
        return float(np.sqrt(self.a @ self.a + self.b @ self.b + np.sum(self.T**2)))

    def swapped(self) -> BlochState:
        """Exchange the roles of A and B."""
        return BlochState(self.b, self.a, self.T.T)

    def max_deviation(self, other: BlochState) -> float:
        return float(
            max(
                np.max(np.abs(self.a - other.a)),
                np.max(np.abs(self.b - other.b)),
                np.max(np.abs(self.T - other.T)),
            )
        )

    def __eq__(self, other):
        if not isinstance(other, BlochState):
            return NotImplemented
        return self.max_deviation(other) == 0.0

    def __repr__(self):
        return (
            f"BlochState(a={self.a.tolist()}, b={self.b.tolist()}, T={self.T.tolist()})"
        )


def to_bloch(dm, check: bool = True) -> BlochState:
    m = check_density_matrix(dm) if check else np.asarray(dm, dtype=np.complex128)
    a = np.einsum("kij,ji->k", _LOCAL_A, m).real
    b = np.einsum("kij,ji->k", _LOCAL_B, m).real
    T = np.einsum("klij,ji->kl", _CORR, m).real
    return BlochState(a, b, T)


def from_bloch(s: BlochState, check: bool = True) -> np.ndarray:
    """Rebuild the 4x4 matrix; raises NotAStateError if it is not PSD."""
    m = (
        np.eye(4, dtype=np.complex128)
        + np.einsum("k,kij->ij", s.a, _LOCAL_A)
        + np.einsum("k,kij->ij", s.b, _LOCAL_B)
        + np.einsum("kl,klij->ij", s.T, _CORR)
    ) / 4
    if check:
        min_eig = np.linalg.eigvalsh(m).min()
        if min_eig < -PSD_TOL:
            raise NotAStateError(
                f"not a state: reconstruction has eigenvalue {min_eig:.3g}"
            )
    return m


def partial_trace(dm, keep: str) -> np.ndarray:
    """Reduced 2x2 matrix of party ``keep`` ('A' or 'B')."""
    r = np.asarray(dm, dtype=np.complex128).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def reduced_states(dm) -> tuple[np.ndarray, np.ndarray]:
    """Local Bloch vectors (a, b); the marginals are (I + v.sigma)/2."""
    s = to_bloch(dm)
    return s.a.copy(), s.b.copy()


def qubit_matrix(v) -> np.ndarray:
    """(I + v.sigma)/2 for a single-qubit Bloch vector."""
    return (I2 + np.einsum("k,kij->ij", np.asarray(v, float), PAULIS)) / 2


def spectrum(s: BlochState) -> np.ndarray:
    return np.linalg.eigvalsh(from_bloch(s, check=False))


def purity(s: BlochState) -> float:
    """Tr(rho^2) from Bloch parameters."""
    return float((1 + s.a @ s.a + s.b @ s.b + np.sum(s.T**2)) / 4)

"""Named two-qubit states used throughout the package and its tests."""

from __future__ import annotations

import numpy as np

from .bloch import BlochState, I2, qubit_matrix


def maximally_mixed() -> np.ndarray:
    return np.eye(4, dtype=np.complex128) / 4


def singlet() -> np.ndarray:
    psi = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2)
    return np.outer(psi, psi.conj())


def omega() -> np.ndarray:
    """The separable mixed state with small geometric discord used in RSP examples."""
    return np.array(
        [
            [0.2, 0.1, 0.1, 0.0],
            [0.1, 0.1, 0.0, 0.1],
            [0.1, 0.0, 0.3, 0.1],
            [0.0, 0.1, 0.1, 0.4],
        ],
        dtype=np.complex128,
    )


SWAP_MIDDLE = [0, 2, 1, 3]


def reorder_basis(dm, order=SWAP_MIDDLE) -> np.ndarray:
    """Re-index a 4x4 matrix, e.g. to read it in |00>,|10>,|01>,|11> order."""
    m = np.asarray(dm, dtype=np.complex128)
    return m[np.ix_(order, order)]


def product(ra, rb) -> np.ndarray:
    """(I + ra.sigma)/2 (x) (I + rb.sigma)/2."""
    return np.kron(qubit_matrix(ra), qubit_matrix(rb))


def product_bloch(ra, rb) -> BlochState:
    ra = np.asarray(ra, float)
    rb = np.asarray(rb, float)
    return BlochState(ra, rb, np.outer(ra, rb))


def classical_quantum(p0: float, u, rho0, rho1) -> np.ndarray:
    """p0 Pi_0 (x) rho0 + (1 - p0) Pi_1 (x) rho1 with Pi_i = (I +- u.sigma)/2."""
    u = np.asarray(u, float)
    pi0 = qubit_matrix(u)
    pi1 = I2 - pi0
    return p0 * np.kron(pi0, rho0) + (1 - p0) * np.kron(pi1, rho1)


def quantum_classical(q0: float, u, rho0, rho1) -> np.ndarray:
    """q0 rho0 (x) Pi_0 + (1 - q0) rho1 (x) Pi_1, projectors on B."""
    u = np.asarray(u, float)
    pi0 = qubit_matrix(u)
    pi1 = I2 - pi0
    return q0 * np.kron(rho0, pi0) + (1 - q0) * np.kron(rho1, pi1)


def phi_state(n) -> BlochState:
    """(I + I (x) n.sigma)/4: maximally mixed on A, Bloch vector n on B."""
    return BlochState(np.zeros(3), np.asarray(n, float), np.zeros((3, 3)))

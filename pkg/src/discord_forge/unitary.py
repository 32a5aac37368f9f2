"""Local, nonlocal and composed global unitaries acting on Bloch states.

A general two-qubit unitary is handled in the factorised form

    (U2_A (x) U2_B) . Uhat(phi1, phi2, phi3) . (U1_A (x) U1_B)

where local factors act as SO(3) rotations of (a, b, T) and the nonlocal
core acts through closed-form trigonometric rules on the Bloch components.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import expm
from scipy.spatial.transform import Rotation

from .bloch import PAULIS, BlochState, to_bloch

ORTHO_TOL = 1e-10
TWO_PI = 2 * math.pi


class RotationError(ValueError):
    """Matrix is not a proper rotation."""


class CalibrationError(RuntimeError):
    """No sign convention reproduces the Bloch-level nonlocal rules."""


def _check_rotation(q, name: str) -> np.ndarray:
    q = np.array(q, dtype=np.float64)
    if q.shape != (3, 3):
        raise RotationError(f"{name}: expected 3x3, got {q.shape}")
    dev = np.max(np.abs(q.T @ q - np.eye(3)))
    if dev > ORTHO_TOL:
        raise RotationError(f"{name} is not orthogonal (deviation {dev:.3g})")
    # a reflection on one side is a partial transpose, not a unitary
    if np.linalg.det(q) < 0:
        raise RotationError(f"{name} has determinant -1; only proper rotations are unitary")
    q.setflags(write=False)
    return q


@dataclass(frozen=True, eq=False)
class LocalRotationPair:
    QA: np.ndarray
    QB: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "QA", _check_rotation(self.QA, "QA"))
        object.__setattr__(self, "QB", _check_rotation(self.QB, "QB"))

    @classmethod
    def identity(cls) -> LocalRotationPair:
        return cls(np.eye(3), np.eye(3))

    def is_identity(self, tol: float = 1e-10) -> bool:
        return bool(
            np.max(np.abs(self.QA - np.eye(3))) <= tol
            and np.max(np.abs(self.QB - np.eye(3))) <= tol
        )

    def inverse(self) -> LocalRotationPair:
        return LocalRotationPair(self.QA.T, self.QB.T)


def _parse_angle(tok: str) -> tuple[float, Fraction | None]:
    t = tok.strip().lower().replace("π", "pi")
    if not t:
        raise ValueError("empty angle")
    if t.endswith("pi"):
        coef = t[:-2].strip().rstrip("*") or "1"
        if coef == "-":
            coef = "-1"
        try:
            frac = Fraction(coef)
        except ValueError:
            raise ValueError(f"bad angle {tok!r}") from None
        return float(frac) * math.pi, frac
    if not re.fullmatch(r"[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?", t):
        raise ValueError(f"bad angle {tok!r}")
    value = float(t)
    # a literal zero is also an exact multiple of pi
    return value, (Fraction(0) if value == 0 else None)


@dataclass(frozen=True)
class NonlocalAngles:
    """(phi1, phi2, phi3) in radians, reduced to [0, 2pi).

    ``pi_multiples`` keeps exact rational multiples of pi when the angles
    came from a table or from ``a/bpi`` syntax; it is used for display and
    to evaluate the trigonometric factors without drift.
    """

    phi: tuple[float, float, float]
    pi_multiples: tuple[Fraction, Fraction, Fraction] | None = None

    def __post_init__(self):
        if len(self.phi) != 3:
            raise ValueError("need exactly three angles")
        if not all(math.isfinite(p) for p in self.phi):
            raise ValueError("angles must be finite")
        if self.pi_multiples is not None:
            fr = tuple(Fraction(f) % 2 for f in self.pi_multiples)
            object.__setattr__(self, "pi_multiples", fr)
            object.__setattr__(self, "phi", tuple(float(f) * math.pi for f in fr))
        else:
            object.__setattr__(self, "phi", tuple(float(p) % TWO_PI for p in self.phi))

    @classmethod
    def of_pi(cls, f1, f2, f3) -> NonlocalAngles:
        """Angles given as multiples of pi, e.g. ``of_pi(Fraction(1, 2), 0, 1)``."""
        fr = (Fraction(f1), Fraction(f2), Fraction(f3))
        return cls(tuple(float(f) * math.pi for f in fr), fr)

    @classmethod
    def zero(cls) -> NonlocalAngles:
        return cls.of_pi(0, 0, 0)

    @classmethod
    def parse(cls, text: str) -> NonlocalAngles:
        """``1/2pi,1/4pi,1/4pi`` or decimal radians ``1.5708,0.7854,0.7854``."""
        toks = text.split(",")
        if len(toks) != 3:
            raise ValueError(f"expected three comma-separated angles, got {text!r}")
        parsed = [_parse_angle(t) for t in toks]
        if all(f is not None for _, f in parsed):
            return cls.of_pi(*(f for _, f in parsed))
        return cls(tuple(v for v, _ in parsed))

    def cos_sin(self) -> tuple[np.ndarray, np.ndarray]:
        if self.pi_multiples is not None:
            # exact values at multiples of pi/2 keep table results free of 1e-17 noise
            c = np.array([_cos_pi(f) for f in self.pi_multiples])
            s = np.array([_cos_pi(f - Fraction(1, 2)) for f in self.pi_multiples])
            return c, s
        phi = np.array(self.phi)
        return np.cos(phi), np.sin(phi)

    def as_array(self) -> np.ndarray:
        return np.array(self.phi)

    def __str__(self):
        if self.pi_multiples is not None:
            parts = [_fmt_pi(f) for f in self.pi_multiples]
        else:
            parts = [repr(p) for p in self.phi]
        return ",".join(parts)


def _cos_pi(f: Fraction) -> float:
    f = f % 2
    exact = {Fraction(0): 1.0, Fraction(1, 2): 0.0, Fraction(1): -1.0, Fraction(3, 2): 0.0}
    if f in exact:
        return exact[f]
    return math.cos(float(f) * math.pi)


def _fmt_pi(f: Fraction) -> str:
    if f == 0:
        return "0"
    if f == 1:
        return "pi"
    return f"{f}pi"


@dataclass(frozen=True)
class GlobalUnitarySpec:
    pre: LocalRotationPair
    core: NonlocalAngles
    post: LocalRotationPair

    @classmethod
    def nonlocal_only(cls, core: NonlocalAngles) -> GlobalUnitarySpec:
        return cls(LocalRotationPair.identity(), core, LocalRotationPair.identity())


def apply_local(s: BlochState, r: LocalRotationPair) -> BlochState:
    """a -> QA a, b -> QB b, T -> QA T QB^T."""
    return BlochState(r.QA @ s.a, r.QB @ s.b, r.QA @ s.T @ r.QB.T)


# (i, j, k) cyclic, so epsilon_ijk = +1 for each entry
_CYCLIC = ((1, 2, 0), (2, 0, 1), (0, 1, 2))


def apply_nonlocal(s: BlochState, n: NonlocalAngles) -> BlochState:
    """Closed-form action of Uhat(phi1, phi2, phi3) on (a, b, T).

    For distinct (i, j, k)::

        a'_k  = a_k c_i c_j + b_k s_i s_j + e_ijk (t_ij c_i s_j - t_ji s_i c_j)
        b'_k  = b_k c_i c_j + a_k s_i s_j + e_ijk (t_ji c_i s_j - t_ij s_i c_j)
        t'_ij = t_ij c_i c_j + t_ji s_i s_j - e_ijk (a_k c_i s_j - b_k s_i c_j)

    and t'_kk = t_kk.
    """
    c, sn = n.cos_sin()
    a, b, T = s.a, s.b, s.T
    a2 = np.empty(3)
    b2 = np.empty(3)
    T2 = T.copy()
    for i, j, k in _CYCLIC:
        a2[k] = (
            a[k] * c[i] * c[j]
            + b[k] * sn[i] * sn[j]
            + T[i, j] * c[i] * sn[j]
            - T[j, i] * sn[i] * c[j]
        )
        b2[k] = (
            b[k] * c[i] * c[j]
            + a[k] * sn[i] * sn[j]
            + T[j, i] * c[i] * sn[j]
            - T[i, j] * sn[i] * c[j]
        )
        # ordered pair (i, j): epsilon = +1; reversed pair (j, i): epsilon = -1
        T2[i, j] = (
            T[i, j] * c[i] * c[j]
            + T[j, i] * sn[i] * sn[j]
            - (a[k] * c[i] * sn[j] - b[k] * sn[i] * c[j])
        )
        T2[j, i] = (
            T[j, i] * c[j] * c[i]
            + T[i, j] * sn[j] * sn[i]
            + (a[k] * c[j] * sn[i] - b[k] * sn[j] * c[i])
        )
    return BlochState(a2, b2, T2)


def apply_global(s: BlochState, g: GlobalUnitarySpec) -> BlochState:
    return apply_local(apply_nonlocal(apply_local(s, g.pre), g.core), g.post)


# -- matrix-level oracle -----------------------------------------------------

_SIGMA_SIGMA = np.stack([np.kron(p, p) for p in PAULIS])


def _nonlocal_matrix(phi: np.ndarray, signs) -> np.ndarray:
    gen = np.einsum("k,kij->ij", np.asarray(signs) * phi, _SIGMA_SIGMA)
    return expm(0.5j * gen)


@functools.lru_cache(maxsize=1)
def nonlocal_convention() -> tuple[int, int, int]:
    """Per-axis signs s_k making exp[(i/2) sum_k s_k phi_k sigma_k (x) sigma_k]
    agree with ``apply_nonlocal``; found once by trying all 8 candidates."""
    rng = np.random.default_rng(20240601)
    trials = []
    for _ in range(4):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        trials.append((rho, NonlocalAngles(tuple(rng.uniform(0, TWO_PI, 3)))))
    for signs in itertools.product((1, -1), repeat=3):
        worst = 0.0
        for rho, n in trials:
            u = _nonlocal_matrix(n.as_array(), signs)
            lhs = to_bloch(u @ rho @ u.conj().T, check=False)
            rhs = apply_nonlocal(to_bloch(rho), n)
            worst = max(worst, lhs.max_deviation(rhs))
        if worst <= 1e-9:
            return signs
    raise CalibrationError("no sign assignment reproduces the Bloch-level rules")


def describe_convention() -> str:
    signs = nonlocal_convention()
    terms = " + ".join(
        f"{'' if sg > 0 else '-'}phi{k + 1} s{k + 1}s{k + 1}" for k, sg in enumerate(signs)
    )
    return f"Uhat = exp[(i/2)({terms})], basis |00>,|01>,|10>,|11>"


def nonlocal_matrix_oracle(n: NonlocalAngles) -> np.ndarray:
    """4x4 unitary whose conjugation reproduces ``apply_nonlocal``."""
    return _nonlocal_matrix(n.as_array(), nonlocal_convention())


def conjugate(dm, u) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    return u @ np.asarray(dm, dtype=np.complex128) @ u.conj().T


def su2_to_so3(u) -> np.ndarray:
    """Rotation R with U (v.sigma) U^dagger = (R v).sigma."""
    u = np.asarray(u, dtype=np.complex128)
    r = np.einsum("jab,bc,kcd,da->jk", PAULIS, u, PAULIS, u.conj().T).real / 2
    return r


def so3_to_su2(q) -> np.ndarray:
    """One of the two SU(2) preimages of a proper rotation."""
    rotvec = Rotation.from_matrix(np.asarray(q, float)).as_rotvec()
    return expm(-0.5j * np.einsum("k,kij->ij", rotvec, PAULIS))


def local_matrix(r: LocalRotationPair) -> np.ndarray:
    return np.kron(so3_to_su2(r.QA), so3_to_su2(r.QB))


def global_matrix(g: GlobalUnitarySpec) -> np.ndarray:
    return local_matrix(g.post) @ nonlocal_matrix_oracle(g.core) @ local_matrix(g.pre)


def apply_global_matrix(dm, g: GlobalUnitarySpec) -> np.ndarray:
    """Matrix-level counterpart of ``apply_global``; handy for cross-checks."""
    return conjugate(dm, global_matrix(g))

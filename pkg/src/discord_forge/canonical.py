"""Local-rotation canonical form and zero-discord structure detection.

A two-qubit state is classical on A (``CQ``, D(B/A) = 0) exactly when its
correlation tensor has rank <= 1 and, if the rank is 1, the Bloch vector of
A is parallel to the left singular vector. After rotating T to diagonal
form this becomes one of two shapes:

* ``VECTORS_ONLY``: T = 0, arbitrary local vectors m, n.
* ``SINGLE_AXIS``: T = diag with a single nonzero s_ii and m along axis i.

``QC`` is the mirror image with the roles of A and B exchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .bloch import BlochState
from .discord import DEFAULT_LATTICE, as_bloch, discord
from .unitary import LocalRotationPair, apply_local

Side = Literal["CQ", "QC"]

STRUCT_ZERO = 1e-9
DISCORD_TOL = 1e-4
_SV_ZERO = 1e-12


class AmbiguousClassificationError(RuntimeError):
    """Structure says 'not zero discord' but the optimised discord is below tol."""

    def __init__(self, side: Side, value: float, tol: float):
        super().__init__(
            f"ambiguous {side} classification: no zero-discord structure, "
            f"but discord {value:.3g} <= tol {tol:.3g}"
        )
        self.side = side
        self.value = value
        self.tol = tol


def normalize_side(side: str) -> Side:
    key = side.strip().upper()
    if key in ("CQ", "B/A"):
        return "CQ"
    if key in ("QC", "A/B"):
        return "QC"
    raise ValueError(f"side must be CQ (B/A) or QC (A/B), got {side!r}")


def discord_direction(side: Side) -> str:
    """The one-way discord that vanishes on the given zero-discord set."""
    return "B/A" if side == "CQ" else "A/B"


@dataclass(frozen=True, eq=False)
class CanonicalizationResult:
    canonical: BlochState
    rotations: LocalRotationPair
    singular_values: np.ndarray


def _first_nonzero_sign(v: np.ndarray) -> float:
    for x in v:
        if abs(x) > _SV_ZERO:
            return 1.0 if x > 0 else -1.0
    return 1.0


def svd_canonicalize(s: BlochState) -> CanonicalizationResult:
    """Rotate both parties so that T becomes diagonal.

    Rows of QA (QB) are the left (right) singular vectors. Diagonal entries
    are ordered by decreasing magnitude (ties: lexicographic order of the
    sign-fixed left singular vectors). Each left vector is signed so its first
    nonzero entry is positive; if that leaves a rotation with determinant -1,
    the third singular vector is flipped, so the last diagonal entry may come
    out negative. T = 0 gives identity rotations.
    """
    T = s.T
    if np.max(np.abs(T)) <= _SV_ZERO:
        return CanonicalizationResult(s, LocalRotationPair.identity(), np.zeros(3))
    u, sv, vt = np.linalg.svd(T)
    left = u.T.copy()
    right = vt.copy()
    for i in range(3):
        sg = _first_nonzero_sign(left[i])
        left[i] *= sg
        right[i] *= sg
    order = sorted(range(3), key=lambda i: (-round(sv[i], 12), tuple(np.round(left[i], 12))))
    left, right, sv = left[order], right[order], sv[order]
    if np.linalg.det(left) < 0:
        left[2] *= -1
    if np.linalg.det(right) < 0:
        right[2] *= -1
    rot = LocalRotationPair(left, right)
    canon = apply_local(s, rot)
    return CanonicalizationResult(canon, rot, np.diag(canon.T).copy())


def _pattern(v) -> str:
    return "".join("x" if x != 0 else "0" for x in v)


def _snap_zero(v, tol):
    arr = np.array(v, dtype=np.float64)
    arr[np.abs(arr) <= tol] = 0.0
    return arr


@dataclass(frozen=True)
class CanonicalCase:
    """A matched zero-discord form with its surviving parameters.

    ``m`` and ``n`` are the local Bloch vectors of A and B in the canonical
    frame (components below the structural threshold are set to 0), ``s`` the
    surviving correlation for ``SINGLE_AXIS`` and ``axis`` its 1-based index.
    """

    side: Side
    family: Literal["VECTORS_ONLY", "SINGLE_AXIS"]
    m: tuple[float, float, float]
    n: tuple[float, float, float]
    axis: int | None = None
    s: float | None = None

    @property
    def m_pattern(self) -> str:
        return _pattern(self.m)

    @property
    def n_pattern(self) -> str:
        return _pattern(self.n)

    @property
    def zero_pattern(self) -> str:
        text = f"m={self.m_pattern} n={self.n_pattern}"
        if self.family == "SINGLE_AXIS":
            text += f" S=s{self.axis}{self.axis}"
        return text

    @property
    def is_maximally_mixed(self) -> bool:
        return (
            self.family == "VECTORS_ONLY"
            and self.m_pattern == "000"
            and self.n_pattern == "000"
        )


@dataclass(frozen=True)
class NotZeroDiscord:
    side: Side
    discord: float
    structural: bool = True


def match_structure(s: BlochState, side: Side, zero_tol: float = STRUCT_ZERO):
    """Match an already-diagonal state against the CQ/QC forms; None if no match."""
    side = normalize_side(side)
    T = s.T
    if np.max(np.abs(T - np.diag(np.diag(T)))) > zero_tol:
        return None
    d = _snap_zero(np.diag(T), zero_tol)
    m = _snap_zero(s.a, zero_tol)
    n = _snap_zero(s.b, zero_tol)
    nz = np.flatnonzero(d)
    if len(nz) == 0:
        return CanonicalCase(side, "VECTORS_ONLY", tuple(m), tuple(n))
    if len(nz) > 1:
        return None
    i = int(nz[0])
    classical = m if side == "CQ" else n
    if np.any(np.delete(classical, i) != 0):
        return None
    return CanonicalCase(side, "SINGLE_AXIS", tuple(m), tuple(n), axis=i + 1, s=float(d[i]))


def structurally_zero_discord(s: BlochState, side: Side, zero_tol: float = STRUCT_ZERO) -> bool:
    """Rotation-invariant structural test, no optimisation involved."""
    return match_structure(svd_canonicalize(s).canonical, side, zero_tol) is not None


def classify(
    s: BlochState,
    side: str,
    tol: float = DISCORD_TOL,
    lattice: int = DEFAULT_LATTICE,
):
    """Return the matched ``CanonicalCase`` or ``NotZeroDiscord``.

    Without a structural match the optimised discord must exceed ``tol``;
    otherwise ``AmbiguousClassificationError`` is raised.
    """
    side = normalize_side(side)
    case = match_structure(svd_canonicalize(s).canonical, side)
    if case is not None:
        return case
    value = discord(s, discord_direction(side), lattice)
    if value > tol:
        return NotZeroDiscord(side, value)
    raise AmbiguousClassificationError(side, value, tol)


def classify_both(s: BlochState, tol: float = DISCORD_TOL, lattice: int = DEFAULT_LATTICE):
    return classify(s, "CQ", tol, lattice), classify(s, "QC", tol, lattice)


def is_zero_discord(dm, side: str, tol: float = DISCORD_TOL, lattice: int = DEFAULT_LATTICE) -> bool:
    s = as_bloch(dm)
    side = normalize_side(side)
    if structurally_zero_discord(s, side):
        return True
    return discord(s, discord_direction(side), lattice) <= tol

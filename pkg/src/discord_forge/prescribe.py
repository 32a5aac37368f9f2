"""Effective nonlocal unitaries for every canonical zero-discord form and the
activation pipeline (canonicalize, look up, apply).

Row patterns use one character per vector component: ``0`` the component
vanishes, ``x`` it is nonzero, ``*`` anything. Rows are tried in printed
order and the first match wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import BlochState
from .canonical import (
    DISCORD_TOL,
    AmbiguousClassificationError,
    CanonicalCase,
    Side,
    discord_direction,
    match_structure,
    normalize_side,
    svd_canonicalize,
)
from .discord import DEFAULT_LATTICE, as_bloch, discord
from .unitary import LocalRotationPair, NonlocalAngles, apply_local, apply_nonlocal


class DomainError(Exception):
    """Input is a valid state but the requested operation does not apply to it."""


class NoPrescriptionError(DomainError):
    def __init__(self, msg: str = "no prescription: maximally mixed"):
        super().__init__(msg)


class UnmatchedCaseError(DomainError):
    pass


class NotZeroDiscordInputError(DomainError):
    def __init__(self, side: Side, value: float):
        super().__init__(f"input is not {side}: discord {value:.6g} exceeds tolerance")
        self.side = side
        self.value = value


@dataclass(frozen=True)
class TableRow:
    """One prescription. ``axis`` is None for T = 0 rows, else the 1-based
    correlated axis; the classical party's vector then lies on that axis."""

    table: str
    index: int
    m: str
    n: str
    angles: NonlocalAngles
    axis: int | None = None

    @property
    def row_id(self) -> str:
        return f"{self.table}.{self.index}"

    @property
    def side(self) -> Side:
        return "CQ" if self.table == "III" else "QC"

    def matches(self, case: CanonicalCase) -> bool:
        if case.side != self.side:
            return False
        if self.axis is None:
            if case.family != "VECTORS_ONLY":
                return False
        elif case.family != "SINGLE_AXIS" or case.axis != self.axis:
            return False
        return _fits(self.m, case.m) and _fits(self.n, case.n)


def _fits(pattern: str, v) -> bool:
    for c, x in zip(pattern, v):
        if (c == "0" and x != 0) or (c == "x" and x == 0):
            return False
    return True


def _rows(table: str, spec) -> tuple[TableRow, ...]:
    return tuple(
        TableRow(table, i, m, n, NonlocalAngles.of_pi(*f), axis)
        for i, (m, n, axis, f) in enumerate(spec, 1)
    )


TABLE_III = _rows(
    "III",
    [
        ("000", "**x", None, ("1/4", "1/4", 0)),
        ("000", "x00", None, ("1/2", "1/4", "1/4")),
        ("000", "0x0", None, ("1/4", 0, "1/2")),
        ("000", "xx0", None, ("1/4", 0, "1/2")),
        ("00x", "x**", None, (0, "1/2", 0)),
        ("00x", "0x*", None, (0, "1/2", "1/2")),
        ("00x", "00*", None, (0, "1/4", "1/4")),
        ("0x0", "x**", None, (0, 0, "1/2")),
        ("0x0", "0x*", None, (0, "1/2", "1/4")),
        ("0x0", "00*", None, ("1/4", 0, "1/4")),
        ("x00", "x**", None, (0, "1/2", 0)),
        ("x00", "0x*", None, ("1/4", "1/2", 0)),
        ("x00", "00*", None, (0, "1/4", "1/4")),
        ("x0x", "***", None, (0, "1/2", "1/2")),
        ("xx0", "***", None, (0, "1/2", "1/2")),
        ("0xx", "***", None, (1, 1, "1/2")),
        ("xxx", "***", None, (0, "1/2", "1/2")),
        ("*00", "***", 1, (0, 0, "1/2")),
        ("0*0", "***", 2, ("1/2", "1/2", 0)),
        ("00*", "***", 3, (1, "1/2", 1)),
    ],
)

TABLE_IV = _rows(
    "IV",
    [
        ("000", "**x", None, ("1/4", 0, "1/2")),
        ("000", "x00", None, ("1/4", "1/4", 0)),
        ("000", "0x0", None, ("1/4", 0, "1/2")),
        ("000", "xx0", None, ("1/4", "1/4", 0)),
        ("00x", "*x*", None, (0, "1/2", "1/2")),
        ("00x", "*0x", None, (0, "1/2", "1/2")),
        ("00x", "*00", None, (0, "1/4", "1/4")),
        ("0x0", "x**", None, (0, 0, "1/2")),
        ("0x0", "0x*", None, (0, "1/2", "1/4")),
        ("0x0", "00x", None, ("1/4", "1/4", 0)),
        ("0x0", "000", None, ("1/4", 0, "1/2")),
        ("x00", "x**", None, (0, 0, "1/2")),
        ("x00", "0*x", None, (0, "1/2", "1/4")),
        ("x00", "0x0", None, ("1/4", "1/2", 0)),
        ("x00", "000", None, (0, "1/4", "1/2")),
        ("x0x", "***", None, (0, "1/2", "1/2")),
        ("xx0", "***", None, (0, "1/2", "1/2")),
        ("0xx", "***", None, ("1/2", 0, "1/2")),
        ("xxx", "***", None, (0, "1/2", "1/2")),
        ("***", "*00", 1, (0, 0, "1/2")),
        ("***", "0*0", 2, (0, 0, "1/2")),
        ("***", "00*", 3, (0, "1/2", 0)),
    ],
)

ALL_ROWS = TABLE_III + TABLE_IV


def table_for(side: str) -> tuple[TableRow, ...]:
    return TABLE_III if normalize_side(side) == "CQ" else TABLE_IV


def row_by_id(row_id: str) -> TableRow:
    for row in ALL_ROWS:
        if row.row_id == row_id:
            return row
    raise KeyError(f"unknown table row {row_id!r}")


def lookup(case: CanonicalCase) -> TableRow:
    if case.is_maximally_mixed:
        raise NoPrescriptionError()
    for row in table_for(case.side):
        if row.matches(case):
            return row
    raise UnmatchedCaseError(f"no table row for {case.side} case {case.zero_pattern}")


def prescribe(case: CanonicalCase) -> NonlocalAngles:
    return lookup(case).angles


def product_state_rotation(r) -> np.ndarray:
    """Rotation taking a product-state Bloch vector ``r`` onto the z axis.

    The third row is sign(r3) r/|r|; the first two rows follow the closed
    form with r1 in the denominators, re-orthonormalised because that form
    is not orthogonal when r2 r3 != 0. Requires r1 != 0 and r3 != 0.
    """
    r1, r2, r3 = (float(x) for x in r)
    if r1 == 0 or r3 == 0:
        raise ValueError("product-state rotation needs r1 != 0 and r3 != 0")
    n1 = np.hypot(1.0, r3 / r1)
    n2 = np.hypot(1.0, r2 / r1)
    n3 = np.sqrt(r1**2 + r2**2 + r3**2) / abs(r3)
    row1 = np.array([-r3 / r1, 0.0, 1.0]) / n1
    row2 = np.array([-r2 / r1, 1.0, 0.0]) / n2
    row3 = np.array([r1 / r3, r2 / r3, 1.0]) / n3
    row2 = row2 - (row2 @ row1) * row1
    row2 /= np.linalg.norm(row2)
    q = np.array([row1, row2, row3])
    if np.linalg.det(q) < 0:
        q[1] *= -1
    return q


@dataclass(frozen=True, eq=False)
class ActivationRecord:
    input: BlochState
    side: Side
    pre_rotations: LocalRotationPair
    matched_case: CanonicalCase
    row_id: str | None
    angles: NonlocalAngles
    output: BlochState
    output_discord: float
    tol: float

    @property
    def effective(self) -> bool:
        return self.output_discord > self.tol


def activate(
    dm,
    side: str,
    rotations: LocalRotationPair | None = None,
    angles: NonlocalAngles | None = None,
    lattice: int = DEFAULT_LATTICE,
    tol: float = DISCORD_TOL,
) -> ActivationRecord:
    """Rotate to canonical form, pick the table angles and apply them.

    ``rotations`` replaces the SVD frame (it must still diagonalise T) and
    ``angles`` bypasses the table. Raises ``NotZeroDiscordInputError`` if the
    input is not zero-discord on ``side``, ``NoPrescriptionError`` for I/4
    without an explicit override.
    """
    s = as_bloch(dm)
    side = normalize_side(side)
    direction = discord_direction(side)
    if rotations is None:
        rotations = svd_canonicalize(s).rotations
    canon = apply_local(s, rotations)
    case = match_structure(canon, side)
    if case is None:
        value = discord(s, direction, lattice)
        if value > tol:
            raise NotZeroDiscordInputError(side, value)
        raise AmbiguousClassificationError(side, value, tol)
    row_id = None
    if angles is None:
        row = lookup(case)
        angles, row_id = row.angles, row.row_id
    out = apply_nonlocal(canon, angles)
    return ActivationRecord(
        input=s,
        side=side,
        pre_rotations=rotations,
        matched_case=case,
        row_id=row_id,
        angles=angles,
        output=out,
        output_discord=discord(out, direction, lattice),
        tol=tol,
    )

"""Line-oriented state files.

Two formats are understood::

    # comment
    format: dm-v1
    (0.25,0) (0,0) (0,0) (0,0)
    ...                            # four rows of four (re,im) tokens

    format: bloch-v1
    a: 0 0 0.5
    b: 0.1 0 0
    T: 0 0 0 / 0 0 0 / 0 0 0.2
"""

from __future__ import annotations

import os
import re

import numpy as np

from .bloch import BlochState, check_density_matrix, from_bloch, to_bloch


class StateFormatError(ValueError):
    """Malformed state file."""


_COMPLEX = re.compile(r"^\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)$")


def _float(tok: str, where: str) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise StateFormatError(f"{where}: not a number: {tok!r}") from None
    if not np.isfinite(x):
        raise StateFormatError(f"{where}: non-finite value {tok!r}")
    return x


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def _parse_dm(lines) -> np.ndarray:
    if len(lines) != 4:
        raise StateFormatError(f"dm-v1 needs 4 matrix rows, got {len(lines)}")
    m = np.zeros((4, 4), dtype=np.complex128)
    for r, (lineno, line) in enumerate(lines):
        toks = line.split()
        if len(toks) != 4:
            raise StateFormatError(f"line {lineno}: expected 4 entries, got {len(toks)}")
        for c, tok in enumerate(toks):
            match = _COMPLEX.match(tok)
            if not match:
                raise StateFormatError(f"line {lineno}: bad entry {tok!r}, want (re,im)")
            where = f"line {lineno}"
            m[r, c] = complex(_float(match[1], where), _float(match[2], where))
    return m


def _parse_bloch(lines) -> BlochState:
    fields = {}
    for lineno, line in lines:
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or key not in ("a", "b", "T"):
            raise StateFormatError(f"line {lineno}: expected 'a:', 'b:' or 'T:'")
        if key in fields:
            raise StateFormatError(f"line {lineno}: duplicate field {key!r}")
        where = f"line {lineno}"
        if key == "T":
            rows = [r.split() for r in rest.split("/")]
            if len(rows) != 3 or any(len(r) != 3 for r in rows):
                raise StateFormatError(f"{where}: T needs 3 rows of 3 separated by '/'")
            fields[key] = [[_float(t, where) for t in r] for r in rows]
        else:
            toks = rest.split()
            if len(toks) != 3:
                raise StateFormatError(f"{where}: {key} needs 3 components")
            fields[key] = [_float(t, where) for t in toks]
    missing = {"a", "b", "T"} - fields.keys()
    if missing:
        raise StateFormatError(f"bloch-v1 missing fields: {sorted(missing)}")
    return BlochState(fields["a"], fields["b"], fields["T"])


def parse_state(text: str) -> np.ndarray | BlochState:
    """Parse either format; returns the raw object without physicality checks."""
    lines = _content_lines(text)
    if not lines:
        raise StateFormatError("empty state file")
    lineno, head = lines[0]
    key, sep, value = head.partition(":")
    if not sep or key.strip() != "format":
        raise StateFormatError(f"line {lineno}: expected 'format: dm-v1|bloch-v1'")
    fmt = value.strip()
    if fmt == "dm-v1":
        return _parse_dm(lines[1:])
    if fmt == "bloch-v1":
        return _parse_bloch(lines[1:])
    raise StateFormatError(f"line {lineno}: unknown format {fmt!r}")


def read_density_matrix(text: str) -> np.ndarray:
    """Parse either format and return a validated density matrix."""
    obj = parse_state(text)
    if isinstance(obj, BlochState):
        return from_bloch(obj)
    return check_density_matrix(obj)


def load_state(path: str | os.PathLike) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return read_density_matrix(fh.read())


def _num(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return repr(x)


def format_dm(dm, comments: list[str] | None = None) -> str:
    m = np.asarray(dm, dtype=np.complex128)
    out = [f"# {c}" for c in comments or []]
    out.append("format: dm-v1")
    for row in m:
        out.append(" ".join(f"({_num(z.real)},{_num(z.imag)})" for z in row))
    return "\n".join(out) + "\n"


def format_bloch(s: BlochState, comments: list[str] | None = None) -> str:
    out = [f"# {c}" for c in comments or []]
    out.append("format: bloch-v1")
    out.append("a: " + " ".join(_num(x) for x in s.a))
    out.append("b: " + " ".join(_num(x) for x in s.b))
    out.append("T: " + " / ".join(" ".join(_num(x) for x in row) for row in s.T))
    return "\n".join(out) + "\n"


def save_state(path, state, comments=None, fmt: str = "dm-v1") -> None:
    """Write a density matrix or BlochState in the requested format."""
    if fmt == "dm-v1":
        dm = from_bloch(state) if isinstance(state, BlochState) else state
        text = format_dm(dm, comments)
    elif fmt == "bloch-v1":
        s = state if isinstance(state, BlochState) else to_bloch(state)
        text = format_bloch(s, comments)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)

"""Text rendering of reports: ``machine`` (key=value) and ``human`` (aligned)."""

from __future__ import annotations

import math
from dataclasses import fields, is_dataclass

import numpy as np

from .bloch import BlochState
from .canonical import CanonicalCase, NotZeroDiscord
from .discord import DiscordReport
from .prescribe import ActivationRecord
from .rsp import PhiCase, RspReport, SingletRspResult
from .unitary import NonlocalAngles, describe_convention
from .verify import VerificationReport

FORMATS = ("human", "machine")


def fmt_number(x) -> str:
    """12 significant digits, positional, locale independent; -0 prints as 0."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    if x == 0:
        x = 0.0
    return np.format_float_positional(x, precision=12, unique=False, fractional=False, trim="-")


def fmt_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, str):
        return v
    if isinstance(v, NonlocalAngles):
        return str(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(fmt_value(x) for x in np.asarray(v).ravel().tolist())
    return fmt_number(v)


def _bloch_items(prefix: str, s: BlochState):
    return [(f"{prefix}_a", s.a), (f"{prefix}_b", s.b), (f"{prefix}_T", s.T)]


def _case_items(prefix: str, c):
    if isinstance(c, NotZeroDiscord):
        return [(f"{prefix}_side", c.side), (f"{prefix}_result", "not_zero_discord"),
                (f"{prefix}_discord", c.discord)]
    items = [
        (f"{prefix}_side", c.side),
        (f"{prefix}_result", "zero_discord"),
        (f"{prefix}_family", c.family),
        (f"{prefix}_zero_pattern", c.zero_pattern),
        (f"{prefix}_m", c.m),
        (f"{prefix}_n", c.n),
    ]
    if c.family == "SINGLE_AXIS":
        items += [(f"{prefix}_axis", c.axis), (f"{prefix}_s", c.s)]
    return items


def report_items(report) -> list[tuple[str, object]]:
    """Ordered (key, value) pairs; runtime-like fields are left to human output."""
    if isinstance(report, DiscordReport):
        return [
            ("mutual_info", report.mutual_info),
            ("J_BA", report.J_BA),
            ("J_AB", report.J_AB),
            ("D_BA", report.D_BA),
            ("D_AB", report.D_AB),
            ("u_star_A", report.u_star_A),
            ("u_star_B", report.u_star_B),
            ("geo_discord", report.geo_discord),
            ("fidelity", report.fidelity),
            ("hs_discord_BA", report.hs_discord_BA),
            ("hs_discord_AB", report.hs_discord_AB),
            ("optimizer_evals", report.optimizer_evals),
            ("converged", report.converged),
        ]
    if isinstance(report, RspReport):
        return [
            ("angles_used", report.angles_used),
            ("table_row", report.row_id),
            ("pre_geo_discord", report.pre_geo_discord),
            ("pre_fidelity", report.pre_fidelity),
            ("post_geo_discord", report.post_geo_discord),
            ("fidelity", report.fidelity),
            ("success_threshold", report.success_threshold),
            ("success", report.success),
            ("nonlocal_convention", describe_convention()),
        ]
    if isinstance(report, ActivationRecord):
        return [
            ("side", report.side),
            ("table_row", report.row_id),
            ("angles", report.angles),
            ("pre_rotation_A", report.pre_rotations.QA),
            ("pre_rotation_B", report.pre_rotations.QB),
            *_case_items("case", report.matched_case),
            *_bloch_items("output", report.output),
            ("output_discord", report.output_discord),
            ("effective", report.effective),
            ("nonlocal_convention", describe_convention()),
        ]
    if isinstance(report, VerificationReport):
        items = [
            ("check", report.name),
            ("total", report.total),
            ("passed", report.passed),
            ("failed", report.failed),
            ("indeterminate", report.indeterminate),
            ("excluded", report.excluded),
            ("min_observed_discord", report.min_observed_discord),
        ]
        items += [(f"witness_{i}", w) for i, w in enumerate(report.failure_witnesses)]
        items += [(f"note_{i}", d) for i, d in enumerate(report.details)]
        return items
    if isinstance(report, SingletRspResult):
        return [
            ("theta", report.theta),
            ("shots", report.shots),
            ("seed", report.seed),
            ("count0", report.count0),
            ("count1", report.count1),
            ("p0", report.p0),
            ("mean_fidelity", report.mean_fidelity),
            ("min_fidelity", report.min_fidelity),
            ("max_state_error", report.max_state_error),
            ("within_3sigma", report.within_3sigma),
        ]
    if isinstance(report, PhiCase):
        return [("phi_regime", report.regime), ("phi_angles", report.angles)] + [
            (f"diagnostic_{i}", d) for i, d in enumerate(report.diagnostics)
        ]
    if isinstance(report, (CanonicalCase, NotZeroDiscord)):
        return _case_items("case", report)
    if isinstance(report, list):
        return report
    if is_dataclass(report):
        return [(f.name, getattr(report, f.name)) for f in fields(report)]
    raise TypeError(f"cannot render {type(report).__name__}")


def render_items(items, fmt: str, extra_human=()) -> str:
    if fmt == "machine":
        return "".join(f"{k}={fmt_value(v)}\n" for k, v in items)
    if fmt != "human":
        raise ValueError(f"format must be one of {FORMATS}")
    rows = list(items) + list(extra_human)
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {fmt_value(v)}\n" for k, v in rows)


def emit_report(report, fmt: str = "human") -> str:
    extra = []
    if isinstance(report, VerificationReport) and fmt == "human":
        extra.append(("runtime_s", round(report.runtime, 3)))
    return render_items(report_items(report), fmt, extra)

"""``discord-forge`` command line driver.

Exit status: 0 success, 1 domain error (bad or unphysical state, no
prescription, input not zero-discord), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bloch import InvalidStateError, to_bloch
from .canonical import AmbiguousClassificationError, CanonicalCase, classify
from .discord import DEFAULT_LATTICE, analyze
from .prescribe import DomainError, activate, lookup
from .report import emit_report, render_items, report_items
from .rsp import (
    EquatorialTarget,
    modified_protocol,
    phi_case_angles,
    simulate_singlet_rsp,
)
from .states import phi_state
from .stateio import StateFormatError, load_state, save_state
from .unitary import NonlocalAngles
from .verify import (
    KINDS,
    SampleSpec,
    appendix_contradiction_check,
    appendix_rows,
    bloch_map_consistency,
    sample,
    verify_theorem,
)

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2
MIN_LATTICE = 256


class UsageError(Exception):
    pass


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return x


def _lattice(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < MIN_LATTICE:
        raise argparse.ArgumentTypeError(f"lattice must be >= {MIN_LATTICE}")
    return n


def _angles(text: str) -> NonlocalAngles | str:
    if text.strip().lower() == "auto":
        return "auto"
    try:
        return NonlocalAngles.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _vector(text: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad vector {text!r}") from None
    if v.shape != (3,):
        raise argparse.ArgumentTypeError("need three comma-separated numbers")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", help="state file (dm-v1 or bloch-v1)")
    common.add_argument("--out", help="output file (report, or state for activate)")
    common.add_argument("--format", choices=("human", "machine"), default="human")
    common.add_argument("--tol", type=_positive_float, default=1e-4)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--lattice", type=_lattice, default=DEFAULT_LATTICE)

    p = argparse.ArgumentParser(prog="discord-forge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="discords, correlations, geometric discord")

    c = sub.add_parser("classify", parents=[common], help="zero-discord structure")
    c.add_argument("--side", choices=("cq", "qc", "both"), default="both")

    a = sub.add_parser("activate", parents=[common], help="apply the prescribed nonlocal unitary")
    a.add_argument("--side", choices=("cq", "qc"), required=True)
    a.add_argument("--angles", type=_angles, help="override, e.g. 1/2pi,0,pi")
    a.add_argument("--report", help="write the activation report here instead of stdout")

    r = sub.add_parser("rsp", parents=[common], help="remote state preparation fidelity")
    r.add_argument("--angles", type=_angles, default=None, help="angles or 'auto'")
    r.add_argument("--phi", type=_vector, help="use (I + I x n.sigma)/4 with n=n1,n2,n3")
    r.add_argument("--simulate-singlet", action="store_true")
    r.add_argument("--theta", type=float, default=0.0)
    r.add_argument("--shots", type=int, default=1000)

    v = sub.add_parser("verify", parents=[common], help="statistical verification harnesses")
    v.add_argument("--theorem", type=int, choices=(1, 2, 3))
    v.add_argument("--samples", type=int)
    v.add_argument("--appendix", help="'all' or a row id such as III.2, IV.22, product")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--consistency", type=int, metavar="N")
    v.add_argument("--witness-dir")

    s = sub.add_parser("sample", parents=[common], help="write seeded random states")
    s.add_argument("--kind", choices=KINDS, required=True)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--tag", help="table row id for CANONICAL_SUBCASE")
    s.add_argument("--state-format", choices=("dm-v1", "bloch-v1"), default="dm-v1")
    return p


def _need_state(args) -> np.ndarray:
    if not args.state:
        raise UsageError("--state is required")
    return load_state(args.state)


def _write(args, text: str, out=None) -> None:
    dest = out if out is not None else args.out
    if dest:
        Path(dest).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    rep = analyze(_need_state(args), lattice=args.lattice)
    _write(args, emit_report(rep, args.format))
    return EXIT_OK


def cmd_classify(args) -> int:
    s = to_bloch(_need_state(args))
    sides = ("CQ", "QC") if args.side == "both" else (args.side.upper(),)
    items = []
    for side in sides:
        try:
            res = classify(s, side, tol=args.tol, lattice=args.lattice)
        except AmbiguousClassificationError as exc:
            items += [(f"{side}_result", "ambiguous"), (f"{side}_discord", exc.value)]
            continue
        items += [(f"{side}_{k.removeprefix('case_')}", v) for k, v in report_items(res)]
        if isinstance(res, CanonicalCase) and not res.is_maximally_mixed:
            try:
                items.append((f"{side}_table_row", lookup(res).row_id))
            except DomainError:
                items.append((f"{side}_table_row", "none"))
    _write(args, render_items(items, args.format))
    return EXIT_OK


def cmd_activate(args) -> int:
    dm = _need_state(args)
    angles = args.angles if isinstance(args.angles, NonlocalAngles) else None
    rec = activate(dm, args.side, angles=angles, lattice=args.lattice, tol=args.tol)
    text = emit_report(rec, args.format)
    if args.out:
        save_state(args.out, rec.output, [f"activated {rec.side} angles {rec.angles}"])
    _write(args, text, out=args.report or "")
    return EXIT_OK


def cmd_rsp(args) -> int:
    if args.simulate_singlet:
        if args.shots < 1:
            raise UsageError("--shots must be >= 1")
        res = simulate_singlet_rsp(EquatorialTarget(args.theta), args.shots, args.seed)
        _write(args, emit_report(res, args.format))
        return EXIT_OK
    extra = []
    if args.phi is not None:
        if args.state:
            raise UsageError("--phi and --state are exclusive")
        state = phi_state(args.phi)
        angles = args.angles
        if angles is None:
            case = phi_case_angles(args.phi)
            extra = report_items(case)
            if case.angles is None:
                _write(args, render_items(extra + [("fidelity", 0.0)], args.format))
                return EXIT_DOMAIN
            angles = case.angles
    else:
        state = _need_state(args)
        angles = args.angles or "auto"
    rep = modified_protocol(state, angles, lattice=args.lattice)
    _write(args, render_items(extra + report_items(rep), args.format))
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = []
    if args.theorem:
        kind = {1: "CQ", 2: "QC", 3: "PRODUCT"}[args.theorem]
        count = args.samples or (1000 if args.theorem < 3 else 500)
        spec = SampleSpec(kind, count, args.seed)
        reports.append(verify_theorem(args.theorem, spec, args.tol, args.lattice, args.witness_dir))
    if args.appendix:
        rows = appendix_rows() + ("product",) if args.appendix == "all" else (args.appendix,)
        for row in rows:
            reports.append(
                appendix_contradiction_check(
                    row, args.trials, args.tol, args.seed, args.lattice, args.witness_dir
                )
            )
    if args.consistency:
        reports.append(bloch_map_consistency(args.consistency, args.seed))
    if not reports:
        raise UsageError("nothing to verify: give --theorem, --appendix or --consistency")
    _write(args, "\n".join(emit_report(r, args.format) for r in reports))
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    spec = SampleSpec(args.kind, args.count, args.seed, tag=args.tag)
    if not args.out:
        raise UsageError("--out DIR is required for sample")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for i, dm in enumerate(sample(spec)):
        path = out / f"{args.kind.lower()}_{args.seed}_{i}.dm"
        save_state(path, dm, [f"kind: {args.kind} seed: {args.seed} index: {i}"], args.state_format)
        lines.append(f"{path}\n")
    sys.stdout.write("".join(lines))
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "classify": cmd_classify,
    "activate": cmd_activate,
    "rsp": cmd_rsp,
    "verify": cmd_verify,
    "sample": cmd_sample,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"discord-forge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StateFormatError, InvalidStateError, DomainError, AmbiguousClassificationError) as exc:
        print(f"discord-forge: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"discord-forge: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


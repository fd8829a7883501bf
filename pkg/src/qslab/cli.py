"""Command-line interface.

Subcommands: roots, qdim, reduce, krdec, grid, solve, verify, logconcave.
Precision resolution order: --precision-bits flag, then the
QSLAB_PRECISION_BITS environment variable, then a key=value config file
passed with --config, then the default of 128 bits.

Exit codes: 0 on success (including conjecture-only violations), 1 when a
proven check fails or a computation cannot be completed, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import affweyl, krchar, qsolver, report, seqanalysis
from .qnum import LevelContext, qdim, qdim_classical, qdim_line
from .rootsys import build_root_system

_ENV_PRECISION = "QSLAB_PRECISION_BITS"


def _read_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _resolve_precision(args) -> int:
    if args.precision_bits is not None:
        return args.precision_bits
    env = os.environ.get(_ENV_PRECISION)
    if env:
        return int(env)
    if getattr(args, "config", None):
        cfg = _read_config_file(args.config)
        if "precision_bits" in cfg:
            return int(cfg["precision_bits"])
    return 128


def _common_flags(p: argparse.ArgumentParser, level: bool = True) -> None:
    p.add_argument("--type", required=True, metavar="TYPE",
                   help="root system type: E6, E7 or E8")
    if level:
        p.add_argument("--level", type=int, required=True, help="restriction level")
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--format", dest="fmt", default=None,
                   choices=("json", "csv", "text", "fixture"))
    p.add_argument("--out", default=None, help="output file (written atomically)")


def _parse_weight(text: str, rank: int) -> tuple[int, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    weight = tuple(int(p) for p in parts)
    if len(weight) != rank:
        raise SystemExit(f"error: weight needs {rank} coordinates, got {len(weight)}")
    return weight


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        report.write_text_atomic(out_path, text)
    else:
        sys.stdout.write(text)


def _cmd_roots(args) -> int:
    rs = build_root_system(args.type)
    fmt = args.fmt or "fixture"
    if fmt == "json":
        import json

        rows = [{"index": i + 1, "height": sum(b), "coefficients": list(b)}
                for i, b in enumerate(rs.positive_roots)]
        text = json.dumps({"type": rs.type_label, "count": len(rows),
                           "coxeter_number": rs.coxeter_number,
                           "marks": list(rs.marks), "roots": rows}, indent=2) + "\n"
    elif fmt == "csv":
        lines = ["index,height," + ",".join(f"b{j+1}" for j in range(rs.rank))]
        for i, b in enumerate(rs.positive_roots):
            lines.append(f"{i+1},{sum(b)}," + ",".join(str(c) for c in b))
        text = "\n".join(lines) + "\n"
    else:
        text = "".join(
            f"{i+1} {sum(b)} " + " ".join(str(c) for c in b) + "\n"
            for i, b in enumerate(rs.positive_roots)
        )
    _emit(text, args.out)
    return 0


def _cmd_qdim(args) -> int:
    rs = build_root_system(args.type)
    weight = _parse_weight(args.weight, rs.rank)
    if args.classical:
        _emit(str(qdim_classical(rs, weight)) + "\n", args.out)
        return 0
    ctx = LevelContext(rs, args.level, _resolve_precision(args))
    value = qdim(weight, ctx)
    _emit(report.render_decimal(value.value, args.digits) + "\n", args.out)
    return 0


def _cmd_reduce(args) -> int:
    rs = build_root_system(args.type)
    ctx = LevelContext(rs, args.level, _resolve_precision(args))
    weight = _parse_weight(args.weight, rs.rank)
    red = affweyl.reduce_to_dominant(weight, ctx)
    if red.result_kind == "on_wall":
        text = f"on_wall (quantum dimension 0) after {red.word_length} reflections\n"
    else:
        coords = ",".join(str(c) for c in red.dominant_weight)
        text = (f"dominant {coords}  sign {red.sign:+d}  "
                f"reflections {red.word_length}\n")
    _emit(text, args.out)
    return 0


def _cmd_krdec(args) -> int:
    rs = build_root_system(args.type)
    if args.type == "E7" and args.node in (4, 5) and args.k == 1:
        dec = krchar.kleber_q1(rs, args.node)
    else:
        dec = krchar.chari_decomposition(rs, args.node, args.k)
    lines = [f"{mult} x ({','.join(str(c) for c in w)})" for mult, w in dec.terms]
    text = "\n".join(lines) + "\n"
    if args.qdim:
        if args.level is None:
            raise SystemExit("error: --qdim needs --level")
        ctx = LevelContext(rs, args.level, _resolve_precision(args))
        value = krchar.qdim_kr(dec, ctx)
        text += f"qdim {report.render_decimal(value.value, args.digits)}\n"
    _emit(text, args.out)
    return 0


def _cmd_grid(args) -> int:
    cfg = report.RunConfig(
        type_label=args.type, level=args.level,
        precision_bits=_resolve_precision(args),
        k_max=args.kmax, fmt=args.fmt or "json", checks=("grid",),
        out_path=args.out,
    )
    rep = report.run(cfg)
    content = report.write_report(rep, args.out)
    if not args.out:
        _emit(content, None)
    return rep.exit_code


def _cmd_solve(args) -> int:
    rs = build_root_system(args.type)
    ctx = LevelContext(rs, args.level, _resolve_precision(args))
    settings = qsolver.SolveSettings(tolerance=args.tol)
    try:
        grid = qsolver.solve_restricted(ctx, settings)
    except qsolver.SolverDivergence as exc:
        _emit(f"error: {exc}\n", None)
        return 1
    lines = [f"converged, residual {report.render_decimal(grid.residual_max)}"]
    for i in range(1, rs.rank + 1):
        row = " ".join(report.render_decimal(grid.value(i, k), 12)
                       for k in range(args.level + 1))
        lines.append(f"node {i}: {row}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_verify(args) -> int:
    checks = tuple(args.checks.split(",")) if args.checks else report.ALL_CHECKS
    cfg = report.RunConfig(
        type_label=args.type, level=args.level,
        precision_bits=_resolve_precision(args),
        k_max=args.kmax, fmt=args.fmt or "json",
        checks=checks, out_path=args.report or args.out,
    )
    rep = report.run(cfg)
    out_path = args.report or args.out
    content = report.write_report(rep, out_path)
    if out_path:
        sys.stdout.write(f"{rep.overall} (report written to {out_path})\n")
    else:
        sys.stdout.write(content)
    return rep.exit_code


def _cmd_logconcave(args) -> int:
    if args.seq:
        seq = seqanalysis.make_sequence([s for s in args.seq.replace(",", " ").split()])
        label = "input sequence"
    else:
        if not args.type or args.level is None or args.node is None:
            raise SystemExit("error: need --seq or all of --type/--level/--node")
        rs = build_root_system(args.type)
        ctx = LevelContext(rs, args.level, _resolve_precision(args))
        seq = seqanalysis.make_sequence(
            [qdim_line(args.node, k, ctx).value for k in range(args.level + 1)])
        label = f"{args.type} node {args.node} line, level {args.level}"
    order = seqanalysis.log_concavity_order(seq, args.max_order)
    lines = [f"{label}: {len(seq)} entries",
             f"log-concavity order >= {order} (probed up to {args.max_order})"]
    if args.branden:
        verdict = seqanalysis.branden_criterion(seq)
        suffix = f" ({verdict.witness})" if verdict.witness else ""
        lines.append(f"coefficient polynomial: {verdict.status}{suffix}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qslab",
        description="Quantum dimensions at roots of unity and restricted Q-systems "
                    "for the exceptional simply-laced types.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", help="positive-root table")
    _common_flags(p, level=False)
    p.set_defaults(fn=_cmd_roots)

    p = sub.add_parser("qdim", help="quantum dimension of a dominant weight")
    _common_flags(p)
    p.add_argument("--weight", required=True, help="comma-separated coordinates")
    p.add_argument("--classical", action="store_true", help="exact Weyl dimension")
    p.add_argument("--digits", type=int, default=30)
    p.set_defaults(fn=_cmd_qdim)

    p = sub.add_parser("reduce", help="reduce a weight into the fundamental alcove")
    _common_flags(p)
    p.add_argument("--weight", required=True)
    p.set_defaults(fn=_cmd_reduce)

    p = sub.add_parser("krdec", help="KR module decomposition")
    _common_flags(p, level=False)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--qdim", action="store_true")
    p.add_argument("--digits", type=int, default=30)
    p.set_defaults(fn=_cmd_krdec)

    p = sub.add_parser("grid", help="build the Q-grid from KR quantum dimensions")
    _common_flags(p)
    p.add_argument("--kmax", type=int, default=None)
    p.set_defaults(fn=_cmd_grid)

    p = sub.add_parser("solve", help="solve the restricted system")
    _common_flags(p)
    p.add_argument("--tol", type=float, default=1e-30)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("verify", help="run the verification suite")
    _common_flags(p)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--report", default=None, help="report output path")
    p.add_argument("--checks", default=None,
                   help="comma-separated subset of " + ",".join(report.ALL_CHECKS))
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("logconcave", help="log-concavity and rootedness probes")
    p.add_argument("--type", default=None)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--node", type=int, default=None)
    p.add_argument("--max-order", type=int, default=6)
    p.add_argument("--branden", action="store_true")
    p.add_argument("--seq", default=None, help="raw comma-separated sequence")
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_logconcave)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, LookupError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

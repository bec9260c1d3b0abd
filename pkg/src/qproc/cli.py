"""Command-line front end: ``qproc simulate|reconstruct|check-cp|regularize|diagonalize``.

Exit codes: 0 success, 1 data or reconstruction failure, 2 usage error.
The default CP tolerance (1e-9) can be overridden with ``QPROC_TOL``.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import io
from .channel import diagonal_form
from .cp import DEFAULT_TOL, is_completely_positive
from .errors import QprocError
from .reconstruct import reconstruct, two_state_compatibility
from .regularize import regularize_map
from .sim import SimConfig, exact_records, simulate


class _Usage(Exception):
    pass


def _floats(a):
    return [float(x) for x in np.ravel(a)] if np.ndim(a) == 1 else [[float(x) for x in row] for row in a]


def _default_tol():
    raw = os.environ.get("QPROC_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise _Usage(f"QPROC_TOL must be a number, got {raw!r}") from None
    if not tol >= 0:
        raise _Usage("QPROC_TOL must be nonnegative")
    return tol


def _cp_block(E, tol):
    v = is_completely_positive(E, tol)
    d = diagonal_form(E)
    block = {
        "is_positive": v.is_positive,
        "is_cp": v.is_cp,
        "min_choi_eigenvalue": v.min_choi_eigenvalue,
        "unital": E.is_unital(),
        "violated_inequalities": v.violated_inequalities,
        "lambda": _floats(d.lam),
        "tau": _floats(d.tau),
    }
    return block


def _emit(lines, doc, stream=None):
    stream = stream or sys.stdout
    for line in lines:
        print(line, file=stream)
    print(json.dumps(doc, indent=2), file=stream)


# ------------------------------------------------------------------ commands


def cmd_simulate(args):
    channel = io.load_channel(args.channel)
    inputs = io.load_inputs(args.inputs)
    if args.exact:
        records = exact_records(channel, inputs)
    else:
        if args.shots is None:
            raise _Usage("--shots is required unless --exact is given")
        records = simulate(SimConfig(channel, inputs, args.shots, args.seed))
    text = io.dump_json(io.dataset_to_dict(records), args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def report_to_dict(rep, tol):
    E = rep.channel
    doc = {
        "version": io.VERSION,
        "method": rep.method,
        "strategy": rep.strategy.value,
        "n_pairs": rep.n_pairs,
        "k": rep.k,
        "channel": _floats(E.M),
        "raw_channel": _floats(rep.raw.M),
        "frame": {"axes": _floats(rep.frame.axes), "origin_in_span": rep.frame.origin_in_span},
        "cp": _cp_block(E, tol),
        "diagonal": [1.0] + _floats(diagonal_form(E).lam) if E.is_unital(1e-12) else None,
        "matrix_diagonal": _floats(np.diag(E.M)),
        "notes": rep.notes,
    }
    return doc


def _report_lines(doc):
    cp = doc["cp"]
    lines = [
        f"strategy     {doc['method']} ({doc['strategy']})",
        f"test pairs   {doc['n_pairs']}",
        f"k            {doc['k']:.12g}",
        f"CP           {cp['is_cp']}  (min Choi eigenvalue {cp['min_choi_eigenvalue']:.3e})",
        "channel",
    ]
    lines += ["  " + "  ".join(f"{x: .9f}" for x in row) for row in doc["channel"]]
    if doc["diagonal"] is not None:
        lines.append("diagonal     {" + ", ".join(f"{x:.9g}" for x in doc["diagonal"]) + "}")
    for note in doc["notes"]:
        lines.append(f"note         {note}")
    return lines


def cmd_reconstruct(args):
    tol = args.tol if args.tol is not None else _default_tol()
    records = io.load_dataset(args.data)
    if len(records) > 4:
        raise QprocError(f"reconstruction supports at most 4 pairs, dataset has {len(records)}")
    pairs = io.dataset_pairs(records)
    if args.require_compatible and len(pairs) == 2:
        ok, witness = two_state_compatibility(*pairs)
        if not ok:
            failure = {"error": "incompatible-pairs", "witness_t": witness}
            print(json.dumps(failure), file=sys.stderr)
            return 1
    rep = reconstruct(pairs, strategy=args.strategy, tol=tol)
    doc = report_to_dict(rep, tol)
    if args.out is not None:
        io.save_channel(rep.channel, args.out)
    if args.report is not None:
        io.dump_json(doc, args.report)
    _emit(_report_lines(doc), doc)
    return 0


def cmd_check_cp(args):
    tol = _default_tol()
    E = io.load_channel(args.channel)
    block = _cp_block(E, tol)
    lines = [
        f"positive     {block['is_positive']}",
        f"CP           {block['is_cp']}",
        f"min Choi eig {block['min_choi_eigenvalue']:.12g}",
        f"violated     {block['violated_inequalities'] if block['unital'] else 'n/a (not unital)'}",
        f"lambda       {block['lambda']}",
        f"tau          {block['tau']}",
    ]
    _emit(lines, block)
    return 0


def cmd_regularize(args):
    tol = _default_tol()
    E = io.load_channel(args.channel)
    res = regularize_map(E, tol)
    io.save_channel(res.channel, args.out)
    print(f"k = {res.k:.17g}")
    print(f"mode = {res.mode.value}")
    return 0


def cmd_diagonalize(args):
    E = io.load_channel(args.channel)
    d = diagonal_form(E)
    doc = {"lambda": _floats(d.lam), "tau": _floats(d.tau), "R_U": _floats(d.R_U), "R_V": _floats(d.R_V)}
    print(json.dumps(doc, indent=2))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="qproc", description="Qubit channel reconstruction and regularization.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a dataset from a channel")
    p.add_argument("--channel", required=True)
    p.add_argument("--inputs", required=True)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="emit infinite-statistics expectations")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="estimate a CP channel from a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--strategy", type=int, choices=(1, 2), default=1)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.add_argument("--report")
    p.add_argument("--require-compatible", action="store_true", help="fail when two pairs violate contractivity")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("check-cp", help="positivity and complete-positivity report")
    p.add_argument("--channel", required=True)
    p.set_defaults(func=cmd_check_cp)

    p = sub.add_parser("regularize", help="mix a channel with the average channel until CP")
    p.add_argument("--channel", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_regularize)

    p = sub.add_parser("diagonalize", help="signed singular-value form of a channel")
    p.add_argument("--channel", required=True)
    p.set_defaults(func=cmd_diagonalize)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except QprocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

"""Command-line entry point.

Subcommands: reduce, check, simulate, convert, oracle.  Exit codes:
0 success / check passed, 1 check failed (counterexample on stderr),
2 input or parse error, 3 solver error/timeout/unknown, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
import warnings

from .encode import ReactionNetwork, rn_to_ode
from .errors import (InitMismatchWarning, NonPolynomialDrift, OdeLumpError,
                     ProtocolError, SolverNotFound, SolverTimeout,
                     SolverUnknown, TooLarge)
from .lump import (brute_force_coarsest, check_bde, check_fde,
                   coarsest_with_trace, prepartition_from_inits,
                   reduce_backward, reduce_forward)
from .parsing import ModelDocument, parse_model, serialize_model
from .partition import Partition
from .sim import compare_reduction, integrate, write_csv
from .smt import (DEFAULT_TIMEOUT_MS, build_phi_bde, build_phi_fde,
                  phi_variable_names, resolve_solver_cmd, smt_emit,
                  solver_invoke, symbolic_coarsest_with_trace)


class _InputError(Exception):
    """User-facing input problem mapped to exit code 2."""


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="odelump",
        description="Exact reduction of ODE and reaction-network models by "
                    "forward/backward differential equivalence.")
    sub = top.add_subparsers(dest="command", required=True)

    def add_mode(p):
        p.add_argument("--mode", choices=("fde", "bde"), required=True,
                       help="forward (block sums) or backward (representatives)")

    def add_backend(p):
        p.add_argument("--backend", choices=("syntactic", "smt"),
                       help="default: syntactic for polynomial drifts, smt otherwise")
        p.add_argument("--solver-cmd", metavar="C",
                       help="solver command line (default: $ODELUMP_SOLVER or 'z3 -in')")
        p.add_argument("--timeout", type=int, default=DEFAULT_TIMEOUT_MS, metavar="MS",
                       help="per solver call, milliseconds")

    p = sub.add_parser("reduce", help="compute the coarsest partition and write "
                                      "the reduced model")
    add_mode(p)
    p.add_argument("--in", dest="input", required=True, metavar="F")
    add_backend(p)
    p.add_argument("--partition", default=None,
                   choices=("file", "singletons", "one-block", "from-init"),
                   help="seed partition (default: from-init for bde, one-block for fde)")
    p.add_argument("--out", required=True, metavar="G")
    p.add_argument("--report", metavar="R.json", help="write a JSON run report")

    p = sub.add_parser("check", help="check the partition declared in the model file")
    add_mode(p)
    p.add_argument("--in", dest="input", required=True, metavar="F")
    add_backend(p)

    p = sub.add_parser("simulate", help="integrate a model, optionally comparing "
                                        "against a reduced one")
    p.add_argument("--in", dest="input", required=True, metavar="F")
    p.add_argument("--t-end", dest="t_end", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--sample", type=int, default=1, metavar="K",
                   help="record every K-th step")
    p.add_argument("--out", required=True, metavar="traj.csv")
    p.add_argument("--compare", metavar="G",
                   help="reduced model; the partition is read from --in")
    p.add_argument("--map-mode", choices=("fde", "bde"),
                   help="aggregation used by --compare")

    p = sub.add_parser("convert", help="rewrite a model as odes, reactions, or an "
                                       "SMT-LIB script")
    p.add_argument("--in", dest="input", required=True, metavar="F")
    p.add_argument("--to", dest="target", choices=("ode", "rn", "smt2"), required=True)
    p.add_argument("--out", required=True, metavar="G")
    p.add_argument("--mode", choices=("fde", "bde"),
                   help="required for --to smt2 (with a partition in the model)")

    p = sub.add_parser("oracle", help="brute-force coarsest partition (n <= 10)")
    add_mode(p)
    p.add_argument("--in", dest="input", required=True, metavar="F")
    return top


def _load(path: str) -> ModelDocument:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from None
    return parse_model(text)


def _as_ode(doc: ModelDocument):
    if isinstance(doc.system, ReactionNetwork):
        return rn_to_ode(doc.system)
    return doc.system


def _seed_partition(kind, mode, system, doc: ModelDocument) -> Partition:
    if kind is None:
        kind = "from-init" if mode == "bde" else "one-block"
    if kind == "file":
        if doc.user_partition is None:
            raise _InputError("--partition file requires a partition section "
                              "in the model")
        return doc.user_partition
    if kind == "singletons":
        return Partition.singletons(system.n)
    if kind == "one-block":
        return Partition.one_block(system.n)
    return prepartition_from_inits(system, Partition.one_block(system.n))


def _pick_backend(requested, system) -> str:
    if requested:
        if requested == "syntactic" and not system.is_polynomial:
            raise _InputError("the syntactic backend requires polynomial drifts; "
                              "use --backend smt")
        return requested
    return "syntactic" if system.is_polynomial else "smt"


def _write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _cmd_reduce(args) -> int:
    started = time.perf_counter()
    doc = _load(args.input)
    system = _as_ode(doc)
    seed = _seed_partition(args.partition, args.mode, system, doc)
    backend = _pick_backend(args.backend, system)

    if backend == "syntactic":
        part, trace = coarsest_with_trace(system, seed, args.mode)
        iterations = len(trace)
    else:
        part, iterations = symbolic_coarsest_with_trace(
            system, seed, args.mode, resolve_solver_cmd(args.solver_cmd),
            args.timeout)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", InitMismatchWarning)
        if args.mode == "fde":
            reduced = reduce_forward(system, part)
        else:
            reduced = reduce_backward(system, part)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    _write_text(args.out, serialize_model(reduced))
    elapsed_ms = int((time.perf_counter() - started) * 1000)
    print(f"{args.mode} reduction ({backend}): {system.n} -> {reduced.n} variables, "
          f"{seed.block_count} -> {part.block_count} blocks; wrote {args.out}")

    if args.report:
        report = {
            "mode": args.mode,
            "backend": backend,
            "input": args.input,
            "iterations": iterations,
            "blocks_before": seed.block_count,
            "blocks_after": part.block_count,
            "variables_before": system.n,
            "variables_after": reduced.n,
            "monomials_before": system.monomial_count(),
            "monomials_after": reduced.monomial_count(),
            "wall_time_ms": elapsed_ms,
            "warnings": [str(w.message) for w in caught],
        }
        _write_text(args.report, json.dumps(report, indent=2) + "\n")
    return 0


def _cmd_check(args) -> int:
    doc = _load(args.input)
    system = _as_ode(doc)
    if doc.user_partition is None:
        raise _InputError("check needs a partition section in the model file")
    part = doc.user_partition
    backend = _pick_backend(args.backend, system)

    if backend == "syntactic":
        result = check_bde(system, part) if args.mode == "bde" \
            else check_fde(system, part)
        if result.ok:
            print(f"ok: partition is a {args.mode.upper()}")
            return 0
        print(result.describe(system.names), file=sys.stderr)
        return 1

    formula = build_phi_bde(system, part) if args.mode == "bde" \
        else build_phi_fde(system, part)
    names = phi_variable_names(system, args.mode)
    verdict = solver_invoke(smt_emit(formula, names),
                            resolve_solver_cmd(args.solver_cmd), args.timeout)
    if verdict.kind == "unsat":
        print(f"ok: partition is a {args.mode.upper()}")
        return 0
    if verdict.kind == "unknown":
        raise SolverUnknown(verdict.reason, part)
    witness = ", ".join(f"{nm}={verdict.model[nm]}" for nm in names)
    print(f"counterexample witness: {witness}", file=sys.stderr)
    return 1


def _cmd_simulate(args) -> int:
    doc = _load(args.input)
    system = _as_ode(doc)
    trajectory = integrate(system, args.t_end, args.dt, args.sample)
    write_csv(trajectory, args.out)
    print(f"wrote {args.out} ({len(trajectory.times)} samples, {system.n} variables)")
    if args.compare:
        if args.map_mode is None:
            raise _InputError("--compare requires --map-mode fde|bde")
        if doc.user_partition is None:
            raise _InputError("--compare needs a partition section in the "
                              "original model file")
        reduced = _as_ode(_load(args.compare))
        reduced_traj = integrate(reduced, args.t_end, args.dt, args.sample)
        error = compare_reduction(trajectory, reduced_traj,
                                  doc.user_partition, args.map_mode)
        print(f"max_error={error:.6e}")
    return 0


def _cmd_convert(args) -> int:
    doc = _load(args.input)
    if args.target in ("ode", "rn"):
        _write_text(args.out, serialize_model(doc, args.target))
        print(f"wrote {args.out}")
        return 0
    if args.mode is None:
        raise _InputError("--to smt2 requires --mode fde|bde")
    if doc.user_partition is None:
        raise _InputError("--to smt2 needs a partition section in the model file")
    system = _as_ode(doc)
    formula = build_phi_bde(system, doc.user_partition) if args.mode == "bde" \
        else build_phi_fde(system, doc.user_partition)
    _write_text(args.out, smt_emit(formula, phi_variable_names(system, args.mode)))
    print(f"wrote {args.out}")
    return 0


def _cmd_oracle(args) -> int:
    doc = _load(args.input)
    system = _as_ode(doc)
    if doc.user_partition is not None:
        seed = doc.user_partition
    else:
        seed = _seed_partition(None, args.mode, system, doc)
    part = brute_force_coarsest(system, seed, args.mode)
    print(part.format(system.names))
    return 0


_DISPATCH = {
    "reduce": _cmd_reduce,
    "check": _cmd_check,
    "simulate": _cmd_simulate,
    "convert": _cmd_convert,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.command](args)
    except (SolverNotFound, SolverTimeout, SolverUnknown, ProtocolError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except (_InputError, NonPolynomialDrift, TooLarge, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OdeLumpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:  # pragma: no cover - internal invariant violation
        traceback.print_exc()
        return 4


if __name__ == "__main__":
    sys.exit(main())

"""Solver-backed equivalence checking for general drifts.

The equivalence conditions are encoded as quantifier-free formulas over
nonlinear real arithmetic and decided by an external solver process speaking
SMT-LIB 2 text over stdin/stdout (default command ``z3 -in``).  No in-process
bindings are used, so any conforming QF_NRA solver can be substituted.

Division is guarded: for every syntactic denominator d the antecedent gains
``(not (= d 0))``.  SMT-LIB leaves x/0 underspecified, so an unguarded
encoding could report spurious witnesses; the guarded one trades completeness
near the zero-denominator locus for soundness.  Witness values are parsed as
exact rationals; algebraic (root-form) model values are reported as unknown
rather than rounded, because splitting on rounded values can be unsound.
"""

from __future__ import annotations

import os
import re
import shlex
import subprocess
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .driftexpr import (Abs, Bin, Const, DriftExpr, Var, denominators,
                        poly_to_expr, rename_vars)
from .errors import (DivisionByZero, PartitionMismatch, ProtocolError,
                     SolverNotFound, SolverTimeout, SolverUnknown)
from .partition import Partition
from .system import OdeSystem

DEFAULT_SOLVER_CMD = "z3 -in"
SOLVER_ENV_VAR = "ODELUMP_SOLVER"
DEFAULT_TIMEOUT_MS = 60_000


def resolve_solver_cmd(cmd: Optional[str] = None) -> str:
    """Explicit command, else the ODELUMP_SOLVER environment variable, else z3."""
    return cmd or os.environ.get(SOLVER_ENV_VAR) or DEFAULT_SOLVER_CMD


# -- formulas -------------------------------------------------------------------


@dataclass(frozen=True)
class Eq:
    lhs: DriftExpr
    rhs: DriftExpr


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Implies:
    antecedent: "Formula"
    consequent: "Formula"


Formula = Union[Eq, Not, And, Or, Implies]

TRUE = And(())


@dataclass(frozen=True)
class SolverVerdict:
    kind: str  # "sat" | "unsat" | "unknown"
    model: Optional[dict] = None  # variable name -> Fraction, total over declared
    reason: Optional[str] = None


def _expr_drifts(system: OdeSystem) -> list:
    if system.is_polynomial:
        return [poly_to_expr(d) for d in system.drifts]
    return list(system.drifts)


def _sum_exprs(exprs) -> DriftExpr:
    total = None
    for e in exprs:
        total = e if total is None else Bin("add", total, e)
    return Const(Fraction(0)) if total is None else total


def build_phi_bde(system: OdeSystem, part: Partition) -> Formula:
    """(same-block variables equal) implies (same-block drifts equal),
    with pairs chained through each block representative."""
    if part.size != system.n:
        raise PartitionMismatch("partition does not cover the system")
    drifts = _expr_drifts(system)
    antecedent = []
    consequent = []
    for block in part.blocks:
        rep = block[0]
        for other in block[1:]:
            antecedent.append(Eq(Var(rep), Var(other)))
            consequent.append(Eq(drifts[rep], drifts[other]))
    if not antecedent:
        return TRUE
    return Implies(And(tuple(antecedent)), And(tuple(consequent)))


def build_phi_fde(system: OdeSystem, part: Partition) -> Formula:
    """Two-copy encoding: equal block sums must force equal block drift sums.

    The primed copy of variable i is variable n + i in the formula's index
    space; :func:`phi_variable_names` supplies matching names.
    """
    if part.size != system.n:
        raise PartitionMismatch("partition does not cover the system")
    n = system.n
    drifts = _expr_drifts(system)
    shift = {i: n + i for i in range(n)}
    primed = [rename_vars(d, shift) for d in drifts]
    antecedent = []
    consequent = []
    for block in part.blocks:
        antecedent.append(Eq(_sum_exprs(Var(v) for v in block),
                             _sum_exprs(Var(n + v) for v in block)))
        consequent.append(Eq(_sum_exprs(drifts[v] for v in block),
                             _sum_exprs(primed[v] for v in block)))
    return Implies(And(tuple(antecedent)), And(tuple(consequent)))


def phi_variable_names(system: OdeSystem, mode: str) -> tuple:
    """Names for the formula's variable indices (adds primed copies for fde)."""
    if mode == "bde":
        return tuple(system.names)
    taken = set(system.names)
    primed = []
    for nm in system.names:
        candidate = nm + "_p"
        while candidate in taken:
            candidate += "_"
        taken.add(candidate)
        primed.append(candidate)
    return tuple(system.names) + tuple(primed)


# -- SMT-LIB emission --------------------------------------------------------------


_SMT_RESERVED = frozenset("""
    abs min max div mod rem and or not xor ite true false let forall exists
    as par assert distinct select store to_real to_int is_int
""".split())


def _symbol(name: str) -> str:
    return f"|{name}|" if name in _SMT_RESERVED else name


def _emit_rational(value: Fraction) -> str:
    p, q = value.numerator, value.denominator
    num = str(p) if p >= 0 else f"(- {-p})"
    if q == 1:
        return num
    return f"(/ {num} {q})"


def _emit_expr(e: DriftExpr, names: Sequence[str]) -> str:
    if isinstance(e, Const):
        return _emit_rational(e.value)
    if isinstance(e, Var):
        return _symbol(names[e.index])
    if isinstance(e, Abs):
        a = _emit_expr(e.arg, names)
        return f"(ite (>= {a} 0) {a} (- {a}))"
    a = _emit_expr(e.lhs, names)
    b = _emit_expr(e.rhs, names)
    if e.op == "min":
        return f"(ite (<= {a} {b}) {a} {b})"
    if e.op == "max":
        return f"(ite (>= {a} {b}) {a} {b})"
    sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[e.op]
    return f"({sym} {a} {b})"


def _emit_formula(f: Formula, names: Sequence[str]) -> str:
    if isinstance(f, Eq):
        return f"(= {_emit_expr(f.lhs, names)} {_emit_expr(f.rhs, names)})"
    if isinstance(f, Not):
        return f"(not {_emit_formula(f.arg, names)})"
    if isinstance(f, And):
        if not f.parts:
            return "true"
        if len(f.parts) == 1:
            return _emit_formula(f.parts[0], names)
        return "(and " + " ".join(_emit_formula(p, names) for p in f.parts) + ")"
    if isinstance(f, Or):
        if not f.parts:
            return "false"
        if len(f.parts) == 1:
            return _emit_formula(f.parts[0], names)
        return "(or " + " ".join(_emit_formula(p, names) for p in f.parts) + ")"
    if isinstance(f, Implies):
        return (f"(=> {_emit_formula(f.antecedent, names)} "
                f"{_emit_formula(f.consequent, names)})")
    raise TypeError(f"not a formula: {f!r}")


def _formula_denominators(f: Formula) -> list:
    found: list = []
    def walk(g):
        if isinstance(g, Eq):
            for side in (g.lhs, g.rhs):
                for d in denominators(side):
                    if d not in found:
                        found.append(d)
        elif isinstance(g, Not):
            walk(g.arg)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p)
        elif isinstance(g, Implies):
            walk(g.antecedent)
            walk(g.consequent)
    walk(f)
    return found


def _inject_guards(f: Formula) -> Formula:
    guards = tuple(Not(Eq(d, Const(Fraction(0)))) for d in _formula_denominators(f))
    if not guards:
        return f
    if isinstance(f, Implies):
        antecedent = f.antecedent
        parts = antecedent.parts if isinstance(antecedent, And) else (antecedent,)
        return Implies(And(parts + guards), f.consequent)
    return Implies(And(guards), f)


def smt_emit(formula: Formula, names: Sequence[str]) -> str:
    """SMT-LIB 2 script asserting the negation of ``formula``.

    Declares one Real constant per name in ``names``; denominators are
    guarded in the antecedent; ends with (check-sat)(get-model), so unsat
    answers may be followed by a model-unavailable error, which the reply
    parser tolerates.
    """
    lines = ["(set-logic QF_NRA)"]
    lines.extend(f"(declare-const {_symbol(nm)} Real)" for nm in names)
    body = _emit_formula(_inject_guards(formula), names)
    lines.append(f"(assert (not {body}))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# -- solver process ------------------------------------------------------------------


_DECLARE_RE = re.compile(r"\(declare-const\s+(\|[^|]*\||[^\s()]+)\s+Real\)")


def _strip_pipes(name: str) -> str:
    if name.startswith("|") and name.endswith("|"):
        return name[1:-1]
    return name


def _sexp_tokens(text: str):
    return re.findall(r"\(|\)|\|[^|]*\||\"(?:[^\"\\]|\\.)*\"|[^\s()]+", text)


def _read_sexps(tokens):
    forms = []
    stack = [forms]
    for tok in tokens:
        if tok == "(":
            inner: list = []
            stack[-1].append(inner)
            stack.append(inner)
        elif tok == ")":
            if len(stack) == 1:
                raise ValueError("unbalanced parenthesis")
            stack.pop()
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced parenthesis")
    return forms


_NUMERAL_RE = re.compile(r"^\d+(\.\d+)?$")


def _parse_value(sexp):
    """Rational from a model value s-expression, or None for algebraic forms."""
    if isinstance(sexp, str):
        if _NUMERAL_RE.match(sexp):
            return Fraction(sexp)
        return None
    if not sexp:
        return None
    head = sexp[0]
    if head == "-" and len(sexp) == 2:
        v = _parse_value(sexp[1])
        return None if v is None else -v
    if head == "/" and len(sexp) == 3:
        a, b = _parse_value(sexp[1]), _parse_value(sexp[2])
        if a is None or b is None or b == 0:
            return None
        return a / b
    if head == "to_real" and len(sexp) == 2:
        return _parse_value(sexp[1])
    return None


def _collect_define_funs(forms, out):
    for form in forms:
        if isinstance(form, list):
            if (len(form) == 5 and form[0] == "define-fun"
                    and form[2] == [] and form[3] == "Real"):
                out.append((_strip_pipes(form[1]), form[4]))
            else:
                _collect_define_funs(form, out)


def solver_invoke(script: str, cmd: Optional[str] = None,
                  timeout_ms: int = DEFAULT_TIMEOUT_MS) -> SolverVerdict:
    """Run the external solver on ``script`` and interpret its reply.

    The first line reading sat/unsat/unknown decides the verdict; on sat the
    (get-model) s-expression is parsed into exact rationals, with variables
    missing from the model (solver don't-cares) completed with 0.  Model
    values that are not rational literals yield unknown("irrational-model").
    """
    cmd = resolve_solver_cmd(cmd)
    args = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
    try:
        proc = subprocess.run(
            args, input=script + "(exit)\n", capture_output=True, text=True,
            timeout=max(0.001, timeout_ms / 1000.0))
    except FileNotFoundError as exc:
        raise SolverNotFound(f"cannot launch solver command {cmd!r}: {exc}") from None
    except subprocess.TimeoutExpired:
        raise SolverTimeout(f"solver {cmd!r} exceeded {timeout_ms} ms") from None

    out = proc.stdout
    verdict = None
    rest_at = 0
    for m in re.finditer(r"^\s*(sat|unsat|unknown)\s*$", out, re.MULTILINE):
        verdict = m.group(1)
        rest_at = m.end()
        break
    if verdict is None:
        raise ProtocolError(out + proc.stderr)
    if verdict == "unsat":
        return SolverVerdict("unsat")
    if verdict == "unknown":
        return SolverVerdict("unknown", reason="solver reported unknown")

    try:
        forms = _read_sexps(_sexp_tokens(out[rest_at:]))
    except ValueError:
        raise ProtocolError(out) from None
    entries: list = []
    _collect_define_funs(forms, entries)
    model = {}
    for name, value_sexp in entries:
        value = _parse_value(value_sexp)
        if value is None:
            return SolverVerdict("unknown", reason="irrational-model")
        model[name] = value
    for name in _DECLARE_RE.findall(script):
        model.setdefault(_strip_pipes(name), Fraction(0))
    return SolverVerdict("sat", model=model)


# -- witness-guided refinement -----------------------------------------------------------


def _model_values(model: dict, names: Sequence[str]) -> list:
    try:
        return [model[nm] for nm in names]
    except KeyError as exc:
        raise ProtocolError(f"model is missing variable {exc}") from None


def _split_blocks(part: Partition, key_of) -> Partition:
    groups: dict = {}
    for b, block in enumerate(part.blocks):
        for v in block:
            groups.setdefault((b, key_of(v)), []).append(v)
    if len(groups) == part.block_count:
        return part
    return Partition(groups.values())


def _exact_drift(system: OdeSystem, i: int, values):
    try:
        return system.drift_value(i, values)
    except DivisionByZero:
        raise ProtocolError("model assigns a zero denominator "
                            "despite the emitted guards") from None


def _split_bde_by_witness(system: OdeSystem, part: Partition, values) -> Partition:
    for block in part.blocks:
        first = values[block[0]]
        if any(values[v] != first for v in block[1:]):
            raise ProtocolError("model violates the block-equality antecedent")
    split = _split_blocks(part, lambda v: _exact_drift(system, v, values))
    if split is part:
        raise ProtocolError("model does not falsify the current formula")
    return split


def _pair_swap_formula(system: OdeSystem, part: Partition, i: int, j: int) -> Formula:
    """Two-copy check that i and j are interchangeable: redistributing
    amounts between i and j alone must preserve every block drift sum."""
    n = system.n
    drifts = _expr_drifts(system)
    primed = [rename_vars(d, {v: n + v for v in range(n)}) for d in drifts]
    antecedent = [Eq(Bin("add", Var(i), Var(j)), Bin("add", Var(n + i), Var(n + j)))]
    antecedent.extend(Eq(Var(w), Var(n + w)) for w in range(n) if w not in (i, j))
    consequent = [Eq(_sum_exprs(drifts[v] for v in block),
                     _sum_exprs(primed[v] for v in block))
                  for block in part.blocks]
    return Implies(And(tuple(antecedent)), And(tuple(consequent)))


def _split_fde_by_witness(system: OdeSystem, part: Partition, values,
                          cmd, timeout_ms) -> Partition:
    n = system.n
    x, xp = values[:n], values[n:]
    for block in part.blocks:
        if sum((x[v] for v in block), Fraction(0)) != \
                sum((xp[v] for v in block), Fraction(0)):
            raise ProtocolError("model violates the block-sum antecedent")

    names = phi_variable_names(system, "fde")
    compatible_cache: dict = {}

    def compatible(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in compatible_cache:
            script = smt_emit(_pair_swap_formula(system, part, *key), names)
            verdict = solver_invoke(script, cmd, timeout_ms)
            if verdict.kind == "unknown":
                raise SolverUnknown(verdict.reason, part)
            compatible_cache[key] = verdict.kind == "unsat"
        return compatible_cache[key]

    new_blocks = []
    changed = False
    for block in part.blocks:
        groups: list = []
        for v in block:
            for g in groups:
                if all(compatible(v, w) for w in g):
                    g.append(v)
                    break
            else:
                groups.append([v])
        changed = changed or len(groups) > 1
        new_blocks.extend(groups)
    if changed:
        return Partition(new_blocks)

    # Pairwise checks found nothing to separate although the full formula is
    # falsifiable (possible for non-polynomial drifts): force progress by
    # fully splitting the first block whose drift sums differ at the witness.
    for b, block in enumerate(part.blocks):
        sum_x = sum((_exact_drift(system, v, x) for v in block), Fraction(0))
        sum_xp = sum((_exact_drift(system, v, xp) for v in block), Fraction(0))
        if sum_x != sum_xp and len(block) > 1:
            forced = [blk for k, blk in enumerate(part.blocks) if k != b]
            forced.extend([v] for v in block)
            return Partition(forced)
    raise ProtocolError("model does not falsify the current formula")


def symbolic_coarsest_with_trace(system: OdeSystem, seed: Partition, mode: str,
                                 cmd: Optional[str] = None,
                                 timeout_ms: int = DEFAULT_TIMEOUT_MS):
    """Witness-guided refinement loop; returns (partition, solver iterations).

    Backward splits re-evaluate all drifts at the witness and group by value.
    Forward splits run pairwise two-variable checks within blocks and group
    greedily (ascending index); the final full-formula unsat guarantees the
    result is a valid equivalence regardless of the grouping order.
    """
    if mode not in ("fde", "bde"):
        raise ValueError(f"unknown mode {mode!r}")
    if seed.size != system.n:
        raise PartitionMismatch("partition does not cover the system")
    cmd = resolve_solver_cmd(cmd)
    part = seed
    iterations = 0
    while True:
        iterations += 1
        if mode == "bde":
            formula = build_phi_bde(system, part)
        else:
            formula = build_phi_fde(system, part)
        names = phi_variable_names(system, mode)
        verdict = solver_invoke(smt_emit(formula, names), cmd, timeout_ms)
        if verdict.kind == "unsat":
            return part, iterations
        if verdict.kind == "unknown":
            raise SolverUnknown(verdict.reason, part)
        values = _model_values(verdict.model, names)
        if mode == "bde":
            part = _split_bde_by_witness(system, part, values)
        else:
            part = _split_fde_by_witness(system, part, values, cmd, timeout_ms)


def symbolic_coarsest(system: OdeSystem, seed: Partition, mode: str,
                      cmd: Optional[str] = None,
                      timeout_ms: int = DEFAULT_TIMEOUT_MS) -> Partition:
    """Coarsest equivalence refining ``seed``, decided by the external solver.

    The backward result is the coarsest such partition; the forward result is
    a valid equivalence whose coarseness is checked empirically against the
    enumeration oracle on polynomial inputs.
    """
    return symbolic_coarsest_with_trace(system, seed, mode, cmd, timeout_ms)[0]

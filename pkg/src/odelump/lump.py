"""Exact lumping of polynomial ODE systems.

Two equivalences over variable partitions are decided syntactically:

* backward (BDE): same-block variables have identical derivatives whenever a
  block-constant assignment is applied.  Checked by substituting every
  variable with its block representative and comparing normalized drifts;
  complete for polynomial drifts because two polynomials agree on all reals
  iff they are identical.

* forward (FDE): block sums obey a self-contained smaller system.  Checked
  through the gradient identity: with F_B the sum of the drifts of block B,
  the partition is an FDE iff dF_B/dx_i = dF_B/dx_j for every block B and
  every same-block pair (i, j).  A smooth function depends on its arguments
  only through the block sums exactly when its gradient is constant on each
  block, and for polynomials that is an identity of derivative polynomials.

Coarsest partitions are computed by signature refinement: split every block
by a canonical per-variable signature until nothing splits.  Any equivalence
refining the seed assigns equal signatures to its merged variables at every
iteration, so the fixpoint is the unique coarsest partition refining the
seed.  A brute-force enumeration oracle cross-checks this on small systems.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional

from .driftexpr import Bin, Const, Var, substitute_exprs, rename_vars
from .errors import (InitMismatchWarning, NonPolynomialDrift, NoUniqueCoarsest,
                     NotABde, NotAnFde, PartitionMismatch, TooLarge)
from .partition import Partition
from .poly import Polynomial
from .system import OdeSystem

_BRUTE_FORCE_LIMIT = 10


@dataclass(frozen=True)
class CheckResult:
    """Verdict of an equivalence check.

    On failure carries the offending block, the variable pair whose
    comparison failed, the nonzero difference polynomial, and (when a small
    search finds one) a rational assignment making that difference nonzero.
    """

    ok: bool
    block_index: Optional[int] = None
    pair: Optional[tuple] = None
    witness_polynomial: Optional[Polynomial] = None
    witness_assignment: Optional[tuple] = None

    @property
    def verdict(self) -> str:
        return "ok" if self.ok else "counterexample"

    def describe(self, names=None) -> str:
        if self.ok:
            return "ok"
        i, j = self.pair
        ni = names[i] if names else f"x{i}"
        nj = names[j] if names else f"x{j}"
        msg = (f"counterexample: pair ({ni}, {nj}) in block {self.block_index}, "
               f"difference {self.witness_polynomial.format(names)}")
        if self.witness_assignment is not None:
            msg += f", witness point {tuple(map(str, self.witness_assignment))}"
        return msg


def _require_polynomial(system: OdeSystem):
    if not system.is_polynomial:
        raise NonPolynomialDrift(
            "syntactic checks need polynomial drifts; use the solver backend")


def _require_cover(system: OdeSystem, part: Partition):
    if part.size != system.n:
        raise PartitionMismatch(
            f"partition covers {part.size} variables, system has {system.n}")


def _raw_drifts(system: OdeSystem):
    return [tuple((m.exps, m.coeff) for m in d.terms) for d in system.drifts]


# -- per-variable signatures ----------------------------------------------------


def _bde_signatures(raw, labels):
    """Canonical form of each drift with variables renamed to block ordinals."""
    sigs = []
    for terms in raw:
        acc: dict = {}
        for exps, c in terms:
            if not exps:
                key = ()
            elif len(exps) == 1:
                v, e = exps[0]
                key = ((labels[v], e),)
            else:
                folded: dict = {}
                for v, e in exps:
                    b = labels[v]
                    folded[b] = folded.get(b, 0) + e
                key = tuple(sorted(folded.items()))
            prev = acc.get(key)
            acc[key] = c if prev is None else prev + c
        sigs.append(tuple(sorted((k, c) for k, c in acc.items() if c != 0)))
    return sigs


def _fde_signatures(raw, blocks):
    """Per variable, the tuple of nonzero partials of every block-sum drift."""
    n = len(raw)
    per_var: list = [{} for _ in range(n)]
    for b, block in enumerate(blocks):
        block_sum: dict = {}
        for v in block:
            for exps, c in raw[v]:
                prev = block_sum.get(exps)
                block_sum[exps] = c if prev is None else prev + c
        for exps, c in block_sum.items():
            if c == 0:
                continue
            for pos in range(len(exps)):
                v, e = exps[pos]
                if e == 1:
                    dexps = exps[:pos] + exps[pos + 1:]
                else:
                    dexps = exps[:pos] + ((v, e - 1),) + exps[pos + 1:]
                target = per_var[v].setdefault(b, {})
                dc = c * e
                prev = target.get(dexps)
                target[dexps] = dc if prev is None else prev + dc
    sigs = []
    for v in range(n):
        items = []
        for b in sorted(per_var[v]):
            canon = tuple(sorted((e2, c2) for e2, c2 in per_var[v][b].items() if c2 != 0))
            if canon:
                items.append((b, canon))
        sigs.append(tuple(items))
    return sigs


def _stable(sigs, part: Partition) -> Optional[tuple]:
    """First same-block pair with differing signatures, or None if stable."""
    for b, block in enumerate(part.blocks):
        rep = block[0]
        for j in block[1:]:
            if sigs[j] != sigs[rep]:
                return b, rep, j
    return None


# -- checks ---------------------------------------------------------------------


def check_bde(system: OdeSystem, part: Partition) -> CheckResult:
    """Backward check: drifts must coincide after substituting every variable
    by its block representative (minimum index)."""
    _require_polynomial(system)
    _require_cover(system, part)
    raw = _raw_drifts(system)
    offending = _stable(_bde_signatures(raw, part.labels), part)
    if offending is None:
        return CheckResult(True)
    b, i, j = offending
    rep_map = {v: part.blocks[part.labels[v]][0] for v in range(system.n)}
    witness = system.drifts[i].rename(rep_map) - system.drifts[j].rename(rep_map)
    point = _nonzero_point(witness)
    assignment = None
    if point is not None:
        assignment = tuple(point.get(rep_map[v], Fraction(1)) for v in range(system.n))
    return CheckResult(False, b, (i, j), witness, assignment)


def check_fde(system: OdeSystem, part: Partition) -> CheckResult:
    """Forward check via the gradient identity on block-sum drifts."""
    _require_polynomial(system)
    _require_cover(system, part)
    raw = _raw_drifts(system)
    offending = _stable(_fde_signatures(raw, part.blocks), part)
    if offending is None:
        return CheckResult(True)
    b, i, j = offending
    for block in part.blocks:
        block_sum = Polynomial.zero()
        for v in block:
            block_sum = block_sum + system.drifts[v]
        witness = block_sum.partial(i) - block_sum.partial(j)
        if witness:
            point = _nonzero_point(witness)
            assignment = None
            if point is not None:
                assignment = tuple(point.get(v, Fraction(1)) for v in range(system.n))
            return CheckResult(False, b, (i, j), witness, assignment)
    raise AssertionError("signature mismatch without differing partials")


# -- coarsest partitions ----------------------------------------------------------


def _refine(raw, seed: Partition, signature_of):
    part = seed
    trace = []
    while True:
        sigs = signature_of(part)
        groups: dict = {}
        for b, block in enumerate(part.blocks):
            for v in block:
                groups.setdefault((b, sigs[v]), []).append(v)
        trace.append(part.block_count)
        if len(groups) == part.block_count:
            return part, trace
        part = Partition(groups.values())


def coarsest_with_trace(system: OdeSystem, seed: Partition, mode: str):
    """Refinement with per-iteration block counts (for reports and tests)."""
    if mode not in ("fde", "bde"):
        raise ValueError(f"unknown mode {mode!r}")
    _require_polynomial(system)
    _require_cover(system, seed)
    raw = _raw_drifts(system)
    if mode == "bde":
        return _refine(raw, seed, lambda p: _bde_signatures(raw, p.labels))
    return _refine(raw, seed, lambda p: _fde_signatures(raw, p.blocks))


def coarsest_bde(system: OdeSystem, seed: Partition) -> Partition:
    """Coarsest backward-equivalence partition refining ``seed``."""
    return coarsest_with_trace(system, seed, "bde")[0]


def coarsest_fde(system: OdeSystem, seed: Partition) -> Partition:
    """Coarsest forward-equivalence partition refining ``seed``."""
    return coarsest_with_trace(system, seed, "fde")[0]


# -- reduced models -----------------------------------------------------------------


def _macro_names(system: OdeSystem, part: Partition):
    names = []
    taken = set()
    for block in part.blocks:
        name = "_".join(system.names[v] for v in block)
        while name in taken:
            name += "_"
        taken.add(name)
        names.append(name)
    return tuple(names)


def reduce_forward(system: OdeSystem, part: Partition) -> OdeSystem:
    """One macro-variable per block, carrying the block sum.

    The macro drift is the block-sum drift with every original variable
    replaced by macro/|block|; when the partition is an FDE any block-sum
    preserving replacement gives the same function, and the uniform one keeps
    coefficients rational.  Macro initial values are block sums of the
    original ones.  Polynomial systems are checked first; for expression
    drifts the caller is responsible for having verified the partition
    (normally through the solver loop).
    """
    _require_cover(system, part)
    if system.is_polynomial:
        result = check_fde(system, part)
        if not result.ok:
            raise NotAnFde(result)
    labels = part.labels
    init = tuple(sum((system.init[v] for v in block), Fraction(0))
                 for block in part.blocks)
    obs = None
    if system.observables is not None:
        obs = frozenset(b for b, block in enumerate(part.blocks)
                        if any(v in system.observables for v in block))
    if system.is_polynomial:
        sigma = {v: Polynomial.variable(labels[v]).scale(
            Fraction(1, len(part.blocks[labels[v]]))) for v in range(system.n)}
        drifts = []
        for block in part.blocks:
            block_sum = Polynomial.zero()
            for v in block:
                block_sum = block_sum + system.drifts[v]
            drifts.append(block_sum.substitute(sigma))
    else:
        sigma = {v: Bin("mul",
                        Const(Fraction(1, len(part.blocks[labels[v]]))),
                        Var(labels[v]))
                 for v in range(system.n)}
        drifts = []
        for block in part.blocks:
            total = None
            for v in block:
                term = substitute_exprs(system.drifts[v], sigma)
                total = term if total is None else Bin("add", total, term)
            drifts.append(total)
    return OdeSystem(_macro_names(system, part), tuple(drifts), init, obs)


def reduce_backward(system: OdeSystem, part: Partition) -> OdeSystem:
    """Keep one representative (minimum index) per block and rewrite every
    occurrence of the other members to it.

    Warns with :class:`InitMismatchWarning` when a block has unequal initial
    values, in which case the reduced dynamics do not reproduce the original.
    """
    _require_cover(system, part)
    if system.is_polynomial:
        result = check_bde(system, part)
        if not result.ok:
            raise NotABde(result)
    labels = part.labels
    reps = part.representatives()
    new_index = {rep: k for k, rep in enumerate(reps)}
    mapping = {v: new_index[part.blocks[labels[v]][0]] for v in range(system.n)}
    for block in part.blocks:
        inits = {system.init[v] for v in block}
        if len(inits) > 1:
            members = ", ".join(system.names[v] for v in block)
            warnings.warn(InitMismatchWarning(
                f"block {{{members}}} has unequal initial values {sorted(inits)}; "
                "the reduced model does not preserve the original dynamics"))
    if system.is_polynomial:
        drifts = tuple(system.drifts[rep].rename(mapping) for rep in reps)
    else:
        drifts = tuple(rename_vars(system.drifts[rep], mapping) for rep in reps)
    init = tuple(system.init[rep] for rep in reps)
    names = tuple(system.names[rep] for rep in reps)
    obs = None
    if system.observables is not None:
        obs = frozenset(new_index[part.blocks[labels[v]][0]]
                        for v in system.observables)
    return OdeSystem(names, drifts, init, obs)


def prepartition_from_inits(system: OdeSystem, seed: Partition) -> Partition:
    """Refine ``seed`` by exact equality of initial values; observables are
    additionally isolated into singleton blocks."""
    _require_cover(system, seed)
    obs = system.observables or frozenset()
    labels = seed.labels
    keys = [(labels[v], system.init[v], v if v in obs else -1)
            for v in range(system.n)]
    return Partition.from_labels(keys)


# -- brute-force oracle ---------------------------------------------------------------


def _set_partitions(elems):
    if not elems:
        yield []
        return
    head = elems[0]
    for sub in _set_partitions(elems[1:]):
        for i in range(len(sub)):
            yield sub[:i] + [sub[i] + [head]] + sub[i + 1:]
        yield [[head]] + sub


def brute_force_coarsest(system: OdeSystem, seed: Partition, mode: str) -> Partition:
    """Independent oracle: enumerate every partition refining ``seed``, filter
    by the equivalence check, and return the unique coarsest survivor.

    Guarded to n <= 10 (Bell-number growth).  Raises
    :class:`NoUniqueCoarsest` if the survivors have no maximum element.
    """
    if mode not in ("fde", "bde"):
        raise ValueError(f"unknown mode {mode!r}")
    _require_polynomial(system)
    _require_cover(system, seed)
    if system.n > _BRUTE_FORCE_LIMIT:
        raise TooLarge(system.n, _BRUTE_FORCE_LIMIT)

    raw = _raw_drifts(system)
    if mode == "bde":
        def passes(p):
            return _stable(_bde_signatures(raw, p.labels), p) is None
    else:
        def passes(p):
            return _stable(_fde_signatures(raw, p.blocks), p) is None

    per_block = [list(_set_partitions(list(block))) for block in seed.blocks]
    passing = []
    for combo in product(*per_block):
        candidate = Partition(b for sub in combo for b in sub)
        if passes(candidate):
            passing.append(candidate)

    fewest = min(p.block_count for p in passing)
    for candidate in passing:
        if candidate.block_count == fewest and \
                all(p.refines(candidate) for p in passing):
            return candidate
    raise NoUniqueCoarsest(f"{mode} survivors have no unique coarsest element")


# -- numeric witnesses -------------------------------------------------------------------


def _nonzero_point(p: Polynomial) -> Optional[dict]:
    """A rational point where ``p`` is nonzero, or None if none was found.

    A nonzero polynomial cannot vanish on a grid whose size exceeds its
    per-variable degrees, so the search below always succeeds when the grid
    is tried; very wide polynomials fall back to a diagonal probe.
    """
    if p.is_zero():
        return None
    variables = sorted(p.variables())
    if not variables:
        return {}
    if len(variables) > 6:
        for t in range(1, 12):
            point = {v: Fraction(t) for v in variables}
            if p.eval(point) != 0:
                return point
        return None
    bounds = {v: 0 for v in variables}
    for m in p.terms:
        for v, e in m.exps:
            bounds[v] = max(bounds[v], e)
    grids = [range(1, bounds[v] + 2) for v in variables]
    for values in product(*grids):
        point = {v: Fraction(t) for v, t in zip(variables, values)}
        if p.eval(point) != 0:
            return point
    return None

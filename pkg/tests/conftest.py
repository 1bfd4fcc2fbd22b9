import os
import shlex
import shutil

from odelump import (OdeSystem, Partition, monomial, parse_polynomial,
                     poly_normalize)

NAMES3 = ("x1", "x2", "x3")

EQ1_TEXT = """\
begin model
begin init
  x1 = 1
  x2 = {i2}
  x3 = {i3}
end init
begin ode
  d(x1) = -x1
  d(x2) = {k1}*x1 - x2
  d(x3) = {k2}*x1 - x3
end ode
{extra}end model
"""


def cascade(k1=1, k2=1, init=(1, 0, 0), observables=None) -> OdeSystem:
    """Three-variable test system: x1 decays, x2 and x3 are fed by x1."""
    drifts = (
        parse_polynomial("-x1", NAMES3),
        parse_polynomial(f"{k1}*x1 - x2", NAMES3),
        parse_polynomial(f"{k2}*x1 - x3", NAMES3),
    )
    return OdeSystem.make(NAMES3, drifts, init, observables)


def cascade_text(k1=1, k2=1, init=(1, 0, 0), extra="") -> str:
    return EQ1_TEXT.format(k1=k1, k2=k2, i2=init[1], i3=init[2], extra=extra)


def random_poly_system(rng, n, max_degree=2, coeff_range=(-3, 3),
                       max_terms=4) -> OdeSystem:
    drifts = []
    for _ in range(n):
        terms = []
        for _ in range(rng.randint(1, max_terms)):
            coeff = rng.randint(*coeff_range)
            exps: dict = {}
            for _ in range(rng.randint(0, max_degree)):
                v = rng.randrange(n)
                exps[v] = exps.get(v, 0) + 1
            terms.append(monomial(coeff, exps))
        drifts.append(poly_normalize(terms))
    names = tuple(f"x{i}" for i in range(n))
    init = [rng.randint(0, 2) for _ in range(n)]
    return OdeSystem.make(names, drifts, init)


def permute_system(system: OdeSystem, perm) -> OdeSystem:
    """Relabel variable i as perm[i] (drifts, names, init and observables)."""
    n = system.n
    mapping = {i: perm[i] for i in range(n)}
    names = [None] * n
    drifts = [None] * n
    init = [None] * n
    for i in range(n):
        names[perm[i]] = system.names[i]
        drifts[perm[i]] = system.drifts[i].rename(mapping)
        init[perm[i]] = system.init[i]
    obs = None
    if system.observables is not None:
        obs = frozenset(perm[i] for i in system.observables)
    return OdeSystem(tuple(names), tuple(drifts), tuple(init), obs)


def permute_partition(part: Partition, perm) -> Partition:
    return Partition([[perm[v] for v in block] for block in part.blocks])


def solver_available() -> bool:
    cmd = os.environ.get("ODELUMP_SOLVER", "z3 -in")
    return shutil.which(shlex.split(cmd)[0]) is not None

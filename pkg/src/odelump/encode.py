"""Translation between polynomial ODE systems and reaction networks.

Reaction networks generalize chemical reaction networks by permitting
negative rates, which makes every polynomial ODE system expressible: each
monomial of a drift becomes a single reaction.  Both directions are exact and
mutually inverse up to polynomial normalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import NonPolynomialDrift
from .poly import Monomial, as_fraction, poly_normalize
from .system import OdeSystem

Multiset = tuple  # tuple[tuple[int, int], ...]: sorted (species, multiplicity >= 1)


def multiset(items) -> Multiset:
    """Canonicalize an iterable of (species, multiplicity) pairs or a mapping."""
    merged: dict = {}
    pairs = items.items() if hasattr(items, "items") else items
    for s, k in pairs:
        if k < 0:
            raise ValueError(f"negative multiplicity {k} for species {s}")
        if k:
            merged[s] = merged.get(s, 0) + k
    return tuple(sorted(merged.items()))


@dataclass(frozen=True)
class Reaction:
    reagents: Multiset
    products: Multiset
    rate: Fraction

    def __post_init__(self):
        if self.rate == 0:
            raise ValueError("reaction rate must be nonzero")


@dataclass(frozen=True)
class ReactionNetwork:
    names: tuple
    reactions: tuple
    init: tuple
    observables: Optional[frozenset] = None

    def __post_init__(self):
        n = len(self.names)
        if n == 0:
            raise ValueError("a network needs at least one species")
        if len(set(self.names)) != n:
            raise ValueError("species names must be unique")
        if len(self.init) != n:
            raise ValueError("init must assign every species")
        for r in self.reactions:
            for side in (r.reagents, r.products):
                for s, _ in side:
                    if not 0 <= s < n:
                        raise ValueError(f"species index {s} out of range")

    @staticmethod
    def make(names: Sequence[str], reactions, init, observables=None) -> "ReactionNetwork":
        obs = frozenset(observables) if observables is not None else None
        return ReactionNetwork(tuple(names), tuple(reactions),
                               tuple(as_fraction(v) for v in init), obs)

    @property
    def n(self) -> int:
        return len(self.names)


def rn_to_ode(rn: ReactionNetwork) -> OdeSystem:
    """Mass-action semantics: each reaction (rho -> pi, a) adds
    a * (pi(s) - rho(s)) * prod_t x_t^rho(t) to the drift of every species s."""
    contributions: list = [[] for _ in range(rn.n)]
    for r in rn.reactions:
        net = dict(r.products)
        for s, k in r.reagents:
            net[s] = net.get(s, 0) - k
        for s, change in net.items():
            if change:
                contributions[s].append(Monomial(r.rate * change, r.reagents))
    drifts = tuple(poly_normalize(terms) for terms in contributions)
    return OdeSystem(rn.names, drifts, rn.init, rn.observables)


def ode_to_rn(ode: OdeSystem) -> ReactionNetwork:
    """Emit one reaction per monomial: c * prod x^rho in drift(s) becomes
    rho -> rho + {s} at rate c.  Reactions are ordered by species, then by
    the drift's canonical term order."""
    if not ode.is_polynomial:
        raise NonPolynomialDrift("reaction form requires polynomial drifts")
    reactions = []
    for s, drift in enumerate(ode.drifts):
        for m in drift.terms:
            products = multiset(m.exps + ((s, 1),))
            reactions.append(Reaction(m.exps, products, m.coeff))
    return ReactionNetwork(ode.names, tuple(reactions), ode.init, ode.observables)

"""The ODE system container shared by every analysis in the package."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import driftexpr
from .driftexpr import drift_eval
from .poly import Polynomial, as_fraction


@dataclass(frozen=True)
class OdeSystem:
    """Variables with one drift each, initial values, and optional observables.

    Drifts are homogeneous per system: either every drift is a
    :class:`Polynomial` or every drift is a drift-expression tree.  Values are
    immutable after construction and safe to share across threads.
    """

    names: tuple
    drifts: tuple
    init: tuple
    observables: Optional[frozenset] = None

    def __post_init__(self):
        n = len(self.names)
        if n == 0:
            raise ValueError("a system needs at least one variable")
        if len(self.drifts) != n or len(self.init) != n:
            raise ValueError("names, drifts and init must have equal length")
        if len(set(self.names)) != n:
            raise ValueError("variable names must be unique")
        poly = isinstance(self.drifts[0], Polynomial)
        for d in self.drifts:
            if isinstance(d, Polynomial) != poly:
                raise ValueError("drifts must be all polynomial or all expressions")
            used = d.variables() if poly else driftexpr.expr_variables(d)
            if used and max(used) >= n:
                raise ValueError(f"drift references variable index {max(used)} >= n = {n}")
        for v in self.init:
            if not isinstance(v, Fraction):
                raise TypeError("initial values must be Fractions")
        if self.observables is not None:
            for i in self.observables:
                if not 0 <= i < n:
                    raise ValueError(f"observable index {i} out of range")

    @staticmethod
    def make(names: Sequence[str], drifts, init, observables=None) -> "OdeSystem":
        obs = frozenset(observables) if observables is not None else None
        return OdeSystem(tuple(names), tuple(drifts),
                         tuple(as_fraction(v) for v in init), obs)

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def is_polynomial(self) -> bool:
        return isinstance(self.drifts[0], Polynomial)

    def drift_value(self, index: int, values) -> Fraction:
        """Exact value of one drift at an assignment (sequence or mapping)."""
        d = self.drifts[index]
        if isinstance(d, Polynomial):
            return d.eval(values)
        return drift_eval(d, values)

    def monomial_count(self) -> Optional[int]:
        """Total monomials across drifts; None for expression drifts."""
        if not self.is_polynomial:
            return None
        return sum(d.monomial_count() for d in self.drifts)

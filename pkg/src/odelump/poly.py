"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a tuple of monomials kept in a canonical order (descending by
total degree, lexicographic within a degree), so two polynomials are equal as
functions on the reals iff their term tuples compare equal.  Coefficients are
`fractions.Fraction`, exponent maps are sparse sorted ``(variable, exponent)``
tuples with every stored exponent positive.  The zero polynomial is the empty
term tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

RationalLike = Union[Fraction, int, str]
Exps = tuple  # tuple[tuple[int, int], ...], sorted by variable, exponents > 0

_ZERO = Fraction(0)
_ONE = Fraction(1)


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, strings and fractions to Fraction (exact, lowest terms)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("refusing float coefficient; pass a Fraction, int or string")
    return Fraction(value)


class Monomial(NamedTuple):
    coeff: Fraction
    exps: Exps

    def degree(self) -> int:
        return sum(e for _, e in self.exps)


def monomial(coeff: RationalLike, exps: Union[Mapping[int, int], Iterable] = ()) -> Monomial:
    """Build a monomial, canonicalizing the exponent map.

    ``exps`` maps variable index to exponent (mapping or iterable of pairs);
    zero exponents are dropped, negative ones rejected.
    """
    items = exps.items() if isinstance(exps, Mapping) else exps
    merged: dict = {}
    for v, e in items:
        if e < 0:
            raise ValueError(f"negative exponent {e} for variable {v}")
        if v < 0:
            raise ValueError(f"negative variable index {v}")
        if e:
            merged[v] = merged.get(v, 0) + e
    return Monomial(as_fraction(coeff), tuple(sorted(merged.items())))


def _term_key(exps: Exps):
    # Descending graded order: higher total degree first, then lexicographic
    # on the exponent vector (missing variables read as exponent 0).
    return (-sum(e for _, e in exps), tuple((v, -e) for v, e in exps))


def _merge_exps(a: Exps, b: Exps) -> Exps:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for v, e in b:
        acc[v] = acc.get(v, 0) + e
    return tuple(sorted(acc.items()))


@dataclass(frozen=True)
class Polynomial:
    """Normalized polynomial; construct via :func:`poly_normalize` or the helpers."""

    terms: tuple = ()

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Polynomial":
        return _POLY_ZERO

    @staticmethod
    def constant(c: RationalLike) -> "Polynomial":
        c = as_fraction(c)
        if c == 0:
            return _POLY_ZERO
        return Polynomial((Monomial(c, ()),))

    @staticmethod
    def variable(index: int) -> "Polynomial":
        if index < 0:
            raise ValueError(f"negative variable index {index}")
        return Polynomial((Monomial(_ONE, ((index, 1),)),))

    @staticmethod
    def from_dict(coeffs: Mapping) -> "Polynomial":
        """Build from a mapping of exponent maps to coefficients."""
        return poly_normalize(monomial(c, dict(e) if not isinstance(e, Mapping) else e)
                              for e, c in coeffs.items())

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return self.terms[0].degree()

    def variables(self) -> frozenset:
        return frozenset(v for m in self.terms for v, _ in m.exps)

    def monomial_count(self) -> int:
        return len(self.terms)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = {m.exps: m.coeff for m in self.terms}
        for m in other.terms:
            acc[m.exps] = acc.get(m.exps, _ZERO) + m.coeff
        return _from_accumulator(acc)

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(Monomial(-m.coeff, m.exps) for m in self.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self.terms or not other.terms:
            return _POLY_ZERO
        acc: dict = {}
        for ma in self.terms:
            for mb in other.terms:
                e = _merge_exps(ma.exps, mb.exps)
                acc[e] = acc.get(e, _ZERO) + ma.coeff * mb.coeff
        return _from_accumulator(acc)

    def scale(self, c: RationalLike) -> "Polynomial":
        c = as_fraction(c)
        if c == 0:
            return _POLY_ZERO
        return Polynomial(tuple(Monomial(m.coeff * c, m.exps) for m in self.terms))

    def pow(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    # -- calculus and evaluation --------------------------------------------

    def partial(self, index: int) -> "Polynomial":
        """Formal partial derivative with respect to variable ``index``."""
        acc: dict = {}
        for m in self.terms:
            for pos, (v, e) in enumerate(m.exps):
                if v == index:
                    if e == 1:
                        new = m.exps[:pos] + m.exps[pos + 1:]
                    else:
                        new = m.exps[:pos] + ((v, e - 1),) + m.exps[pos + 1:]
                    acc[new] = acc.get(new, _ZERO) + m.coeff * e
                    break
        return _from_accumulator(acc)

    def substitute(self, sigma: Mapping[int, "Polynomial"]) -> "Polynomial":
        """Simultaneous substitution; variables absent from ``sigma`` stay fixed."""
        acc: dict = {}
        for m in self.terms:
            product = {(): m.coeff}
            for v, e in m.exps:
                replacement = sigma.get(v)
                if replacement is None:
                    factor = {((v, 1),): _ONE}
                else:
                    factor = {t.exps: t.coeff for t in replacement.terms}
                for _ in range(e):
                    product = _dict_mul(product, factor)
                    if not product:
                        break
                if not product:
                    break
            for e2, c2 in product.items():
                acc[e2] = acc.get(e2, _ZERO) + c2
        return _from_accumulator(acc)

    def rename(self, mapping: Mapping[int, int]) -> "Polynomial":
        """Substitution restricted to a variable-to-variable map (kept exact and fast)."""
        acc: dict = {}
        for m in self.terms:
            merged: dict = {}
            for v, e in m.exps:
                w = mapping.get(v, v)
                merged[w] = merged.get(w, 0) + e
            e2 = tuple(sorted(merged.items()))
            acc[e2] = acc.get(e2, _ZERO) + m.coeff
        return _from_accumulator(acc)

    def eval(self, values) -> Fraction:
        """Exact evaluation; ``values`` is a sequence or mapping over variables.

        Also works with floats (used by the simulator and the finite-difference
        tests); exactness then follows the input type.
        """
        lookup = values.__getitem__
        total = None
        for m in self.terms:
            t = m.coeff
            for v, e in m.exps:
                t *= lookup(v) ** e
            total = t if total is None else total + t
        return _ZERO if total is None else total

    # -- presentation --------------------------------------------------------

    def format(self, names: Sequence[str] | None = None) -> str:
        """Render in model-grammar syntax (powers as repeated multiplication)."""
        if not self.terms:
            return "0"
        parts = []
        for m in self.terms:
            factors = []
            for v, e in m.exps:
                name = names[v] if names is not None else f"x{v}"
                factors.extend([name] * e)
            mag = abs(m.coeff)
            if not factors or mag != 1:
                factors.insert(0, _format_fraction(mag))
            body = "*".join(factors)
            if not parts:
                parts.append(body if m.coeff > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if m.coeff > 0 else f"- {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.format()


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _dict_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = _merge_exps(e1, e2)
            out[e] = out.get(e, _ZERO) + c1 * c2
    return out


def _from_accumulator(acc: dict) -> Polynomial:
    terms = [Monomial(c, e) for e, c in acc.items() if c != 0]
    terms.sort(key=lambda m: _term_key(m.exps))
    return Polynomial(tuple(terms))


_POLY_ZERO = Polynomial(())


# -- module-level operation surface ------------------------------------------


def _canon_exps(exps) -> Exps:
    prev = -1
    for v, e in exps:
        if e <= 0 or v <= prev:
            break
        prev = v
    else:
        return exps if isinstance(exps, tuple) else tuple(exps)
    merged: dict = {}
    for v, e in exps:
        if e < 0:
            raise ValueError(f"negative exponent {e} for variable {v}")
        if e:
            merged[v] = merged.get(v, 0) + e
    return tuple(sorted(merged.items()))


def poly_normalize(terms: Iterable[Monomial]) -> Polynomial:
    """Merge like terms, drop zero coefficients, sort canonically. Idempotent.

    Accepts raw term sequences: unsorted or zero-exponent entries in an
    exponent map are repaired before merging.
    """
    acc: dict = {}
    for m in terms:
        if m.coeff == 0:
            continue
        e = _canon_exps(m.exps)
        acc[e] = acc.get(e, _ZERO) + m.coeff
    return _from_accumulator(acc)


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def poly_substitute(p: Polynomial, sigma: Mapping[int, Polynomial]) -> Polynomial:
    return p.substitute(sigma)


def poly_partial(p: Polynomial, index: int) -> Polynomial:
    return p.partial(index)


def poly_eval(p: Polynomial, values) -> Fraction:
    return p.eval(values)

"""Finitely supported elements of the free space over a finite metric space.

A molecule is kept in canonical form: duplicate labels merged, zero
coefficients dropped, and the base point discarded (delta(0) = 0).  Two
molecules are equal exactly when their term mappings are equal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Tuple, Union

from .errors import EqualPoints, SpaceMismatch, UnknownLabel
from .numbers import Num, number_to_json, parse_number
from .space import EXACT, FiniteMetricSpace

TermsLike = Union[Mapping[str, Num], Iterable[Tuple[str, Num]]]


class Molecule:
    """Canonical finite combination of evaluation functionals."""

    __slots__ = ("space", "terms")

    def __init__(self, space: FiniteMetricSpace, terms: Mapping[str, Num]):
        self.space = space
        self.terms = dict(terms)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Molecule) and self.space is other.space
                and self.terms == other.terms)

    def __hash__(self):
        return hash((id(self.space), tuple(sorted(self.terms.items()))))

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*d({x})" for x, c in sorted(self.terms.items()))
        return f"Molecule({body or '0'})"

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> frozenset:
        return frozenset(self.terms)

    def coefficient(self, label: str) -> Num:
        return self.terms.get(label, 0)

    # molecules form a vector space; these keep results canonical
    def __add__(self, other: "Molecule") -> "Molecule":
        if not isinstance(other, Molecule):
            return NotImplemented
        if other.space is not self.space:
            raise SpaceMismatch("molecules over different spaces")
        merged = dict(self.terms)
        for lab, c in other.terms.items():
            merged[lab] = merged.get(lab, 0) + c
        return canonicalize(self.space, merged)

    def __neg__(self) -> "Molecule":
        return Molecule(self.space, {lab: -c for lab, c in self.terms.items()})

    def __sub__(self, other: "Molecule") -> "Molecule":
        return self + (-other)

    def __rmul__(self, scalar) -> "Molecule":
        if scalar == 0:
            return Molecule(self.space, {})
        return Molecule(self.space, {lab: scalar * c
                                     for lab, c in self.terms.items()})

    def to_json_dict(self) -> dict:
        exact = self.space.mode == EXACT and all(
            isinstance(c, (Fraction, int)) for c in self.terms.values())
        return {"space": self.space.name,
                "terms": [{"point": lab, "coeff": number_to_json(Fraction(c) if exact else c, exact)}
                          for lab, c in sorted(self.terms.items())]}

    @classmethod
    def from_json_dict(cls, space: FiniteMetricSpace, data: Mapping) -> "Molecule":
        pairs = [(t["point"], parse_number(t["coeff"])) for t in data["terms"]]
        return canonicalize(space, pairs)


def canonicalize(space: FiniteMetricSpace, terms: TermsLike) -> Molecule:
    """Merge duplicates, drop zeros and the base-point term."""
    items = terms.items() if isinstance(terms, Mapping) else terms
    acc: dict = {}
    for lab, c in items:
        space.index(lab)
        acc[lab] = acc.get(lab, 0) + c
    acc.pop(space.base, None)
    return Molecule(space, {lab: c for lab, c in acc.items() if c != 0})


def delta(space: FiniteMetricSpace, x: str) -> Molecule:
    """Evaluation functional delta(x) as a molecule."""
    return canonicalize(space, {x: Fraction(1)})


def elementary(space: FiniteMetricSpace, x: str, y: str) -> Molecule:
    """Normalized difference (delta(x) - delta(y)) / d(x, y); has norm one."""
    if x == y:
        raise EqualPoints(f"elementary molecule needs x != y, got {x!r}")
    space.index(x), space.index(y)
    d = space.d(x, y)
    inv = Fraction(1, 1) / d if isinstance(d, Fraction) else 1.0 / d
    return canonicalize(space, [(x, inv), (y, -inv)])


def support(mu: Molecule) -> frozenset:
    return mu.support()


def pair(values: Mapping[str, Num], mu: Molecule) -> Num:
    """Bilinear pairing <f, mu> = sum a_x f(x) of a potential with a molecule."""
    total = 0
    for lab, c in mu.terms.items():
        if lab not in values:
            raise UnknownLabel(lab)
        total += c * values[lab]
    return total

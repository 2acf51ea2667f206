"""Polynomial tables in declared invariant generators plus a parameter slot.

A coefficient function of a catalog standard form is a polynomial in the
scenario's invariant generators ``u_1 .. u_k`` and the path parameter, stored
as a table of ``(degree tuple, coefficient)`` entries. Degree tuples have
length ``k + 1``; the last slot is the parameter degree. Opaque callables
``(u, lam) -> float`` are accepted wherever a table is (library use only,
excluded from serialization).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError


@dataclass(frozen=True)
class InvariantPolynomial:
    nvars: int  # number of invariant generators, parameter slot excluded
    terms: tuple[tuple[tuple[int, ...], float], ...]

    def __post_init__(self):
        merged: dict[tuple[int, ...], float] = {}
        for deg, c in self.terms:
            deg = tuple(int(d) for d in deg)
            if len(deg) != self.nvars + 1:
                raise ParseError(
                    f"degree tuple {deg} has length {len(deg)}, expected {self.nvars + 1}"
                )
            if any(d < 0 for d in deg):
                raise ParseError(f"negative exponent in degree tuple {deg}")
            merged[deg] = merged.get(deg, 0.0) + float(c)
        cleaned = tuple(sorted((d, c) for d, c in merged.items() if c != 0.0))
        object.__setattr__(self, "terms", cleaned)

    def __call__(self, u, lam: float = 0.0) -> float:
        u = np.atleast_1d(np.asarray(u, float))
        total = 0.0
        for deg, c in self.terms:
            term = c
            for base, d in zip(u, deg[:-1]):
                if d:
                    term *= base**d
            if deg[-1]:
                term *= lam ** deg[-1]
            total += term
        return total

    @property
    def depends_on_lambda(self) -> bool:
        return any(deg[-1] for deg, _ in self.terms)

    def fix_lambda(self, lam: float) -> "InvariantPolynomial":
        """Fold the parameter into the coefficients."""
        new = [(deg[:-1] + (0,), c * lam ** deg[-1]) for deg, c in self.terms]
        return InvariantPolynomial(self.nvars, tuple(new))

    def swap_vars(self, i: int, j: int) -> "InvariantPolynomial":
        new = []
        for deg, c in self.terms:
            d = list(deg)
            d[i], d[j] = d[j], d[i]
            new.append((tuple(d), c))
        return InvariantPolynomial(self.nvars, tuple(new))

    def __add__(self, other: "InvariantPolynomial") -> "InvariantPolynomial":
        if self.nvars != other.nvars:
            raise ParseError("cannot add tables over different generator sets")
        return InvariantPolynomial(self.nvars, self.terms + other.terms)

    def __neg__(self) -> "InvariantPolynomial":
        return InvariantPolynomial(self.nvars, tuple((d, -c) for d, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor: float) -> "InvariantPolynomial":
        return InvariantPolynomial(self.nvars, tuple((d, factor * c) for d, c in self.terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> list[dict]:
        return [{"deg": list(deg), "c": c} for deg, c in self.terms]

    @classmethod
    def from_json(cls, nvars: int, data) -> "InvariantPolynomial":
        if not isinstance(data, list):
            raise ParseError("coefficient table must be a list of {deg, c} entries")
        terms = []
        for entry in data:
            if not isinstance(entry, dict) or "deg" not in entry or "c" not in entry:
                raise ParseError(f"malformed table entry {entry!r}")
            terms.append((tuple(entry["deg"]), float(entry["c"])))
        return cls(nvars, tuple(terms))

    @classmethod
    def constant(cls, value: float, nvars: int) -> "InvariantPolynomial":
        return cls(nvars, (((0,) * (nvars + 1), float(value)),))

    @classmethod
    def zero(cls, nvars: int) -> "InvariantPolynomial":
        return cls(nvars, ())

    @classmethod
    def variable(cls, index: int, nvars: int, coeff: float = 1.0) -> "InvariantPolynomial":
        deg = [0] * (nvars + 1)
        deg[index] = 1
        return cls(nvars, ((tuple(deg), float(coeff)),))


def coeff_value(coeff, u, lam: float) -> float:
    """Evaluate a table or an opaque callable coefficient."""
    return float(coeff(u, lam))


def coeff_depends_on_lambda(coeff) -> bool:
    if isinstance(coeff, InvariantPolynomial):
        return coeff.depends_on_lambda
    return True  # opaque callables are assumed parameter-dependent

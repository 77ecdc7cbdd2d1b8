"""Invariant probability measures on the unit space.

At finite scale a measure is invariant iff it is constant on orbits, so
the invariant measures form a simplex whose vertices are the uniform
measures on single orbits.  "μ-almost every x" means "every x in the
support of μ" throughout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .algebra import AlgebraElement, expectation
from .groupoid import Groupoid, isotropy_bundle_off_units, orbits
from .result import Verdict
from .scalars import QQi, format_rational, parse_rational

__all__ = [
    "Measure",
    "MeasureError",
    "measure",
    "parse_measure_spec",
    "is_invariant",
    "invariant_vertices",
    "orbit_masses",
    "random_invariant_measure",
    "tau_mu",
    "is_essentially_free",
    "support",
]


class MeasureError(ValueError):
    pass


@dataclass(frozen=True)
class Measure:
    """A probability measure on units with exact rational weights."""

    weights: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "weights", {k: Fraction(v) for k, v in self.weights.items()})
        if any(w < 0 for w in self.weights.values()):
            raise MeasureError("measure has a negative weight")
        if sum(self.weights.values()) != 1:
            raise MeasureError(f"weights sum to {sum(self.weights.values())}, not 1")

    def __getitem__(self, x) -> Fraction:
        return self.weights.get(x, Fraction(0))

    def __hash__(self):
        return hash(tuple(sorted(self.weights.items())))

    def __eq__(self, other):
        if not isinstance(other, Measure):
            return NotImplemented
        keys = set(self.weights) | set(other.weights)
        return all(self[k] == other[k] for k in keys)

    def __str__(self):
        return "(" + ", ".join(f"{x}: {format_rational(w)}" for x, w in self.weights.items()) + ")"

    def mass(self, units) -> Fraction:
        return sum((self[x] for x in units), Fraction(0))


def measure(G: Groupoid, values: Mapping) -> Measure:
    """Measure on ``G``'s units from a (possibly partial) mapping; missing units get 0."""
    unknown = set(values) - G.unit_set
    if unknown:
        raise MeasureError(f"not a unit: {sorted(unknown)[0]}")
    w = {}
    for u in G.units:
        v = values.get(u, 0)
        w[u] = parse_rational(v) if isinstance(v, str) else Fraction(v)
    return Measure(w)


def parse_measure_spec(G: Groupoid, text: str) -> Measure:
    """Parse the inline form ``"x=1/2,y=1/2,z=0"``."""
    values = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise MeasureError(f"expected unit=weight, got {part!r}")
        unit, w = part.rsplit("=", 1)
        try:
            values[unit.strip()] = parse_rational(w)
        except ValueError as exc:
            raise MeasureError(str(exc)) from exc
    return measure(G, values)


def is_invariant(G: Groupoid, mu: Measure) -> bool:
    """``μ(s(γ)) == μ(r(γ))`` for every arrow."""
    return all(mu[G.source[a]] == mu[G.range[a]] for a in G.arrows)


def _require_invariant(G, mu):
    if not is_invariant(G, mu):
        raise MeasureError("measure is not invariant")


def invariant_vertices(G: Groupoid) -> list:
    """Uniform measures on single orbits, in orbit order."""
    out = []
    for orb in orbits(G):
        w = Fraction(1, len(orb))
        out.append(measure(G, {x: w for x in orb}))
    return out


def orbit_masses(G: Groupoid, mu: Measure) -> list:
    """Coefficients of ``μ`` in the vertex basis: the mass of each orbit."""
    return [mu.mass(orb) for orb in orbits(G)]


def random_invariant_measure(G: Groupoid, rng: random.Random, max_mass: int = 12) -> Measure:
    """Orbit-constant measure with random rational orbit masses."""
    orbs = orbits(G)
    masses = [rng.randint(0, max_mass) for _ in orbs]
    if not any(masses):
        masses[rng.randrange(len(orbs))] = 1
    total = sum(masses)
    values = {}
    for orb, m in zip(orbs, masses):
        for x in orb:
            values[x] = Fraction(m, total * len(orb))
    return measure(G, values)


def tau_mu(G: Groupoid, mu: Measure, f: AlgebraElement):
    """``τ_μ(f) = Σ_x E(f)(x) μ(x)``."""
    _require_invariant(G, mu)
    ef = expectation(f)
    total = QQi(0)
    for x in G.units:
        w = mu[x]
        if w:
            total = total + ef[x] * w
    return total


def is_essentially_free(G: Groupoid, mu: Measure) -> Verdict:
    """``μ`` gives no mass to the sources of non-unit isotropy arrows.

    On failure the witness is the first offending arrow.
    """
    _require_invariant(G, mu)
    for a in isotropy_bundle_off_units(G):
        if mu[G.source[a]] > 0:
            return Verdict(False, (a,), f"isotropy arrow {a} sits over {G.source[a]} with mass {mu[G.source[a]]}")
    return Verdict(True)


def support(mu: Measure) -> tuple:
    return tuple(x for x, w in mu.weights.items() if w > 0)

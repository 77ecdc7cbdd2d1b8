"""Finite groupoids, group actions and bisections.

A finite groupoid is stored as plain lookup tables over opaque string
identifiers.  Every iteration follows the declared arrow order, so all
derived data (orbits, fibres, decompositions) is deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

__all__ = [
    "Groupoid",
    "GroupAction",
    "GroupoidError",
    "BisectionError",
    "validate_groupoid",
    "validate_action",
    "make_transformation_groupoid",
    "transformation_arrow",
    "orbits",
    "isotropy_group",
    "isotropy_bundle_off_units",
    "is_bisection",
    "product_bisection",
    "fix_set",
    "alpha",
    "restrict",
    "is_invariant_set",
    "check_isomorphism",
    "pair_groupoid",
    "unit_groupoid",
    "group_groupoid",
    "disjoint_union",
    "pair_times_group",
]


class GroupoidError(ValueError):
    """An axiom violation, carrying the witnessing arrows."""

    def __init__(self, message, axiom="", witness=()):
        super().__init__(message)
        self.axiom = axiom
        self.witness = tuple(witness)


class BisectionError(ValueError):
    pass


@dataclass(frozen=True)
class Groupoid:
    """A finite groupoid given by its arrow tables.

    ``compose[(a, b)]`` is ``a∘b`` and is defined exactly when
    ``source[a] == range[b]``.
    """

    arrows: tuple
    units: tuple
    source: Mapping[str, str]
    range: Mapping[str, str]
    inverse: Mapping[str, str]
    compose: Mapping[tuple, str]
    name: str = field(default="", compare=False)

    def __hash__(self):
        return hash((self.arrows, self.units))

    def __len__(self):
        return len(self.arrows)

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"Groupoid({label}{len(self.arrows)} arrows, {len(self.units)} units)"

    def mul(self, a, b):
        """``a∘b`` or ``None`` when the pair is not composable."""
        return self.compose.get((a, b))

    def is_unit(self, a) -> bool:
        return a in self.unit_set

    @cached_property
    def unit_set(self) -> frozenset:
        return frozenset(self.units)

    @cached_property
    def index(self) -> dict:
        return {a: i for i, a in enumerate(self.arrows)}

    @cached_property
    def unit_index(self) -> dict:
        return {u: i for i, u in enumerate(self.units)}

    @cached_property
    def src(self) -> list:
        idx = self.index
        return [idx[self.source[a]] for a in self.arrows]

    @cached_property
    def rng(self) -> list:
        idx = self.index
        return [idx[self.range[a]] for a in self.arrows]

    @cached_property
    def inv(self) -> list:
        idx = self.index
        return [idx[self.inverse[a]] for a in self.arrows]

    @cached_property
    def composable(self) -> list:
        """All ``(i, j, k)`` with ``arrows[i]∘arrows[j] == arrows[k]`` (indices)."""
        idx = self.index
        out = []
        for (a, b), c in self.compose.items():
            out.append((idx[a], idx[b], idx[c]))
        out.sort()
        return out

    @cached_property
    def comp_table(self) -> dict:
        return {(i, j): k for i, j, k in self.composable}

    @cached_property
    def source_fibre(self) -> dict:
        """unit -> arrows with that source (``G_x``), in arrow order."""
        out = {u: [] for u in self.units}
        for a in self.arrows:
            out[self.source[a]].append(a)
        return {u: tuple(v) for u, v in out.items()}

    @cached_property
    def range_fibre(self) -> dict:
        out = {u: [] for u in self.units}
        for a in self.arrows:
            out[self.range[a]].append(a)
        return {u: tuple(v) for u, v in out.items()}

    @cached_property
    def isotropy_arrows(self) -> tuple:
        return tuple(a for a in self.arrows if self.source[a] == self.range[a])


def _fail(axiom, message, *witness):
    raise GroupoidError(message, axiom=axiom, witness=witness)


def validate_groupoid(G: Groupoid) -> Groupoid:
    """Check every groupoid axiom exhaustively; return ``G`` or raise.

    The first violation found is reported as a :class:`GroupoidError`
    whose ``witness`` holds the offending arrows.
    """
    arrows = G.arrows
    aset = set(arrows)
    if len(aset) != len(arrows):
        dup = next(a for a in arrows if arrows.count(a) > 1)
        _fail("domain", f"duplicate arrow {dup}", dup)
    if not G.units:
        _fail("domain", "unit space is empty")
    for u in G.units:
        if u not in aset:
            _fail("domain", f"unit {u} is not an arrow", u)
    for name, table in (("source", G.source), ("range", G.range)):
        for a in arrows:
            if a not in table:
                _fail("domain", f"{name} undefined at {a}", a)
            if table[a] not in G.unit_set:
                _fail("domain", f"{name} of {a} is not a unit", a)
        extra = set(table) - aset
        if extra:
            _fail("domain", f"{name} defined on unknown arrow {sorted(extra)[0]}", sorted(extra)[0])
    for a in arrows:
        if a not in G.inverse or G.inverse[a] not in aset:
            _fail("domain", f"inverse undefined at {a}", a)
    for (a, b), c in G.compose.items():
        if a not in aset or b not in aset or c not in aset:
            _fail("domain", f"compose refers to unknown arrow in {a}|{b} -> {c}", a, b)

    for u in G.units:
        if G.source[u] != u or G.range[u] != u:
            _fail("unit", f"unit axiom violated at {u}: source/range must be {u}", u)
        if G.inverse[u] != u:
            _fail("unit", f"unit axiom violated at {u}: inverse must be {u}", u)

    s, r = G.source, G.range
    for a in arrows:
        for b in arrows:
            defined = (a, b) in G.compose
            if defined != (s[a] == r[b]):
                what = "defined on non-composable" if defined else "undefined on composable"
                _fail("composable", f"compose {what} pair ({a}, {b})", a, b)
    for (a, b), c in G.compose.items():
        if s[c] != s[b] or r[c] != r[a]:
            _fail("source-range", f"source/range mismatch for {a}∘{b} = {c}", a, b)

    for a in arrows:
        if G.compose[(r[a], a)] != a or G.compose[(a, s[a])] != a:
            _fail("identity", f"units do not act as identities on {a}", a)

    for a in arrows:
        b = G.inverse[a]
        if s[b] != r[a] or r[b] != s[a] or G.compose.get((b, a)) != s[a] or G.compose.get((a, b)) != r[a]:
            _fail("inverse", f"inverse axiom violated at {a}", a)

    for a in arrows:
        for b in G.range_fibre[s[a]]:
            ab = G.compose[(a, b)]
            for c in G.range_fibre[s[b]]:
                if G.compose[(ab, c)] != G.compose[(a, G.compose[(b, c)])]:
                    _fail("associativity", f"associativity violated at ({a}, {b}, {c})", a, b, c)
    return G


@dataclass(frozen=True)
class GroupAction:
    """A finite group acting on the left of a finite set.

    ``act[(g, x)]`` is ``g·x`` and ``mul[(g, h)]`` is ``gh``.
    """

    elements: tuple
    mul: Mapping[tuple, str]
    identity: str
    space: tuple
    act: Mapping[tuple, str]
    name: str = field(default="", compare=False)

    def __hash__(self):
        return hash((self.elements, self.space))

    @cached_property
    def inverse(self) -> dict:
        out = {}
        for g in self.elements:
            for h in self.elements:
                if self.mul[(g, h)] == self.identity:
                    out[g] = h
                    break
        return out

    def fixed_points(self, g) -> tuple:
        """``Fix(g)``: the points of the space fixed by ``g``."""
        return tuple(x for x in self.space if self.act[(g, x)] == x)

    def is_trivial(self) -> bool:
        return all(self.act[(g, x)] == x for g in self.elements for x in self.space)


def validate_action(a: GroupAction) -> GroupAction:
    els = a.elements
    if not els or a.identity not in els:
        raise GroupoidError("identity is not a group element", axiom="group")
    if len(set(els)) != len(els) or len(set(a.space)) != len(a.space):
        raise GroupoidError("duplicate group element or point", axiom="domain")
    if not a.space:
        raise GroupoidError("space is empty", axiom="domain")
    eset = set(els)
    for g in els:
        for h in els:
            gh = a.mul.get((g, h))
            if gh not in eset:
                raise GroupoidError(f"mul undefined or outside group at ({g}, {h})", axiom="group", witness=(g, h))
    for g in els:
        if a.mul[(a.identity, g)] != g or a.mul[(g, a.identity)] != g:
            raise GroupoidError(f"identity law fails at {g}", axiom="group", witness=(g,))
        if not any(a.mul[(g, h)] == a.identity for h in els):
            raise GroupoidError(f"{g} has no inverse", axiom="group", witness=(g,))
    for g, h, k in itertools.product(els, repeat=3):
        if a.mul[(a.mul[(g, h)], k)] != a.mul[(g, a.mul[(h, k)])]:
            raise GroupoidError(f"group law not associative at ({g}, {h}, {k})", axiom="group", witness=(g, h, k))
    pset = set(a.space)
    for g in els:
        for x in a.space:
            if a.act.get((g, x)) not in pset:
                raise GroupoidError(f"action undefined at ({g}, {x})", axiom="action", witness=(g, x))
    for x in a.space:
        if a.act[(a.identity, x)] != x:
            raise GroupoidError(f"identity does not fix {x}", axiom="action", witness=(x,))
    for g, h in itertools.product(els, repeat=2):
        gh = a.mul[(g, h)]
        for x in a.space:
            if a.act[(g, a.act[(h, x)])] != a.act[(gh, x)]:
                raise GroupoidError(f"not a left action at ({g}, {h}, {x})", axiom="action", witness=(g, h, x))
    return a


def transformation_arrow(a: GroupAction, x, g) -> str:
    """Identifier of the arrow ``(x, g)``; ``(x, e)`` is named by the point itself."""
    return x if g == a.identity else f"({x},{g})"


def make_transformation_groupoid(a: GroupAction, name: str = "") -> Groupoid:
    """The transformation groupoid ``X ⋊ Γ``.

    ``(x, g)`` has source ``x`` and range ``g·x``; composition is
    ``(g·x, h)∘(x, g) = (x, hg)``.
    """
    validate_action(a)
    arrows = []
    source, rng, inverse = {}, {}, {}
    for x in a.space:
        for g in a.elements:
            n = transformation_arrow(a, x, g)
            arrows.append(n)
            source[n] = x
            rng[n] = a.act[(g, x)]
            inverse[n] = transformation_arrow(a, a.act[(g, x)], a.inverse[g])
    if len(set(arrows)) != len(arrows):
        raise GroupoidError("arrow identifiers collide; rename points or group elements", axiom="domain")
    compose = {}
    for x in a.space:
        for g in a.elements:
            y = a.act[(g, x)]
            for h in a.elements:
                first = transformation_arrow(a, x, g)
                second = transformation_arrow(a, y, h)
                compose[(second, first)] = transformation_arrow(a, x, a.mul[(h, g)])
    G = Groupoid(tuple(arrows), tuple(a.space), source, rng, inverse, compose, name=name or a.name)
    return validate_groupoid(G)


def orbits(G: Groupoid) -> list:
    """Partition of the units into orbits, each orbit in unit order."""
    parent = {u: u for u in G.units}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a in G.arrows:
        ra, sa = find(G.range[a]), find(G.source[a])
        if ra != sa:
            # keep the earlier unit as representative so output order is stable
            if G.unit_index[ra] < G.unit_index[sa]:
                parent[sa] = ra
            else:
                parent[ra] = sa
    classes = {}
    for u in G.units:
        classes.setdefault(find(u), []).append(u)
    return [tuple(c) for c in classes.values()]


def _check_unit(G, x):
    if x not in G.unit_set:
        raise ValueError(f"{x} is not a unit")


def isotropy_group(G: Groupoid, x) -> Groupoid:
    """The isotropy group ``G_x^x`` as a one-unit groupoid."""
    _check_unit(G, x)
    arrows = tuple(a for a in G.source_fibre[x] if G.range[a] == x)
    aset = set(arrows)
    compose = {(a, b): G.compose[(a, b)] for a in arrows for b in arrows}
    G_x = Groupoid(
        arrows,
        (x,),
        {a: x for a in arrows},
        {a: x for a in arrows},
        {a: G.inverse[a] for a in arrows},
        compose,
        name=f"{G.name}@{x}" if G.name else "",
    )
    assert all(c in aset for c in compose.values())
    return G_x


def isotropy_bundle_off_units(G: Groupoid) -> tuple:
    """``Iso(G) \\ G^(0)``: non-unit arrows whose source equals their range."""
    return tuple(a for a in G.isotropy_arrows if a not in G.unit_set)


def is_bisection(G: Groupoid, A: Iterable) -> bool:
    A = list(A)
    if any(a not in G.index for a in A):
        return False
    sources = [G.source[a] for a in A]
    ranges = [G.range[a] for a in A]
    return len(set(A)) == len(A) and len(set(sources)) == len(A) and len(set(ranges)) == len(A)


def _require_bisection(G, B):
    B = tuple(B)
    if not is_bisection(G, B):
        raise BisectionError(f"not a bisection: {sorted(B, key=G.index.get) if all(b in G.index for b in B) else B}")
    return tuple(sorted(B, key=G.index.get))


def product_bisection(G: Groupoid, A: Iterable, B: Iterable) -> tuple:
    """``AB = {a∘b : a ∈ A, b ∈ B composable}``, in arrow order."""
    A = _require_bisection(G, A)
    B = _require_bisection(G, B)
    out = {G.compose[(a, b)] for a in A for b in B if (a, b) in G.compose}
    return tuple(sorted(out, key=G.index.get))


def alpha(G: Groupoid, B: Iterable, x) -> str:
    """``α_B(x)``: the range of the unique arrow of ``B`` with source ``x``."""
    B = _require_bisection(G, B)
    for b in B:
        if G.source[b] == x:
            return G.range[b]
    raise ValueError(f"{x} is not in the source of the bisection")


def fix_set(G: Groupoid, B: Iterable) -> tuple:
    """``Fix(α_B)``: sources of arrows of ``B`` that are isotropy arrows."""
    B = _require_bisection(G, B)
    out = [G.source[b] for b in B if G.source[b] == G.range[b]]
    return tuple(sorted(out, key=G.unit_index.get))


def is_invariant_set(G: Groupoid, D: Iterable) -> bool:
    D = set(D)
    return all((G.source[a] in D) == (G.range[a] in D) for a in G.arrows)


def restrict(G: Groupoid, D: Iterable, name: str = "") -> Groupoid:
    """Reduction ``G_D = s^{-1}(D)`` to an invariant set of units."""
    D = set(D)
    for x in D:
        _check_unit(G, x)
    if not is_invariant_set(G, D):
        raise ValueError("unit subset is not invariant")
    if not D:
        raise ValueError("restriction to the empty set has no units")
    arrows = tuple(a for a in G.arrows if G.source[a] in D)
    aset = set(arrows)
    units = tuple(u for u in G.units if u in D)
    H = Groupoid(
        arrows,
        units,
        {a: G.source[a] for a in arrows},
        {a: G.range[a] for a in arrows},
        {a: G.inverse[a] for a in arrows},
        {k: v for k, v in G.compose.items() if k[0] in aset},
        name=name,
    )
    return validate_groupoid(H)


def check_isomorphism(G: Groupoid, H: Groupoid, amap: Mapping) -> bool:
    """True iff ``amap`` (arrows of G -> arrows of H) is a groupoid isomorphism."""
    if set(amap) != set(G.arrows) or set(amap.values()) != set(H.arrows) or len(G) != len(H):
        return False
    if {amap[u] for u in G.units} != set(H.units):
        return False
    for a in G.arrows:
        if amap[G.source[a]] != H.source[amap[a]] or amap[G.range[a]] != H.range[amap[a]]:
            return False
        if amap[G.inverse[a]] != H.inverse[amap[a]]:
            return False
    for (a, b), c in G.compose.items():
        if H.compose.get((amap[a], amap[b])) != amap[c]:
            return False
    return True


# --- small constructors -----------------------------------------------------


def pair_groupoid(points, name: str = "") -> Groupoid:
    """Pair groupoid on ``points``; ``(i,j)`` has range ``i`` and source ``j``.

    The unit ``(i,i)`` is named ``i``.
    """
    if isinstance(points, int):
        points = [str(i) for i in range(1, points + 1)]
    points = [str(p) for p in points]

    def nm(i, j):
        return i if i == j else f"({i},{j})"

    arrows, source, rng, inverse = [], {}, {}, {}
    for i in points:
        for j in points:
            n = nm(i, j)
            arrows.append(n)
            source[n], rng[n], inverse[n] = j, i, nm(j, i)
    compose = {(nm(i, j), nm(j, k)): nm(i, k) for i in points for j in points for k in points}
    return validate_groupoid(Groupoid(tuple(arrows), tuple(points), source, rng, inverse, compose, name=name))


def unit_groupoid(points, name: str = "") -> Groupoid:
    if isinstance(points, int):
        points = [f"u{i}" for i in range(1, points + 1)]
    points = tuple(str(p) for p in points)
    ident = {p: p for p in points}
    return validate_groupoid(
        Groupoid(points, points, ident, dict(ident), dict(ident), {(p, p): p for p in points}, name=name)
    )


def group_groupoid(elements, mul, identity, point="pt", name: str = "") -> Groupoid:
    """A finite group viewed as a groupoid with the single unit ``point``."""
    a = GroupAction(tuple(elements), mul, identity, (point,), {(g, point): point for g in elements})
    return make_transformation_groupoid(a, name=name)


def disjoint_union(parts, name: str = "") -> Groupoid:
    arrows, units = [], []
    source, rng, inverse, compose = {}, {}, {}, {}
    for G in parts:
        arrows += G.arrows
        units += G.units
        source.update(G.source)
        rng.update(G.range)
        inverse.update(G.inverse)
        compose.update(G.compose)
    if len(set(arrows)) != len(arrows):
        raise GroupoidError("components share arrow identifiers", axiom="domain")
    return validate_groupoid(Groupoid(tuple(arrows), tuple(units), source, rng, inverse, compose, name=name))


def pair_times_group(points, H: Groupoid, tag: str = "", name: str = "") -> Groupoid:
    """The transitive groupoid ``pair(points) × H`` for a one-unit groupoid ``H``.

    Arrow ``((i,j), h)`` is named ``[tag]i,j;h``, units ``[tag]i``.
    """
    if len(H.units) != 1:
        raise ValueError("second factor must be a group")
    e = H.units[0]
    points = [str(p) for p in points]

    def nm(i, j, h):
        return f"{tag}{i}" if (i == j and h == e) else f"{tag}{i},{j};{h}"

    arrows, source, rng, inverse, compose = [], {}, {}, {}, {}
    for i in points:
        for j in points:
            for h in H.arrows:
                n = nm(i, j, h)
                arrows.append(n)
                source[n], rng[n] = nm(j, j, e), nm(i, i, e)
                inverse[n] = nm(j, i, H.inverse[h])
    for i in points:
        for j in points:
            for k in points:
                for h in H.arrows:
                    for g in H.arrows:
                        compose[(nm(i, j, h), nm(j, k, g))] = nm(i, k, H.compose[(h, g)])
    units = tuple(nm(i, i, e) for i in points)
    return validate_groupoid(Groupoid(tuple(arrows), units, source, rng, inverse, compose, name=name))

"""Named example groupoids and small group constructions."""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Callable

from .groupoid import (
    GroupAction,
    Groupoid,
    make_transformation_groupoid,
    pair_groupoid,
    unit_groupoid,
    validate_action,
)

__all__ = [
    "CatalogEntry",
    "CATALOG",
    "CORE_CATALOG",
    "get",
    "names",
    "data_file",
    "cyclic_group_action",
    "perm_group_action",
    "symmetric_group_action",
    "dihedral_action",
    "trivial_action",
    "cycle_name",
]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    construction: str  # "groupoid-file" | "action-file" | "family"
    build: Callable

    def load(self):
        """``(groupoid, action or None)``."""
        G, a = self.build()
        return _named(G, self.name), a


def _named(G: Groupoid, name: str) -> Groupoid:
    return Groupoid(G.arrows, G.units, G.source, G.range, G.inverse, G.compose, name=name)


def cycle_name(perm) -> str:
    """Cycle notation for a permutation of ``0..n-1`` (points printed 1-based)."""
    seen, cycles = set(), []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        c, j = [], i
        while j not in seen:
            seen.add(j)
            c.append(str(j + 1))
            j = perm[j]
        cycles.append("(" + " ".join(c) + ")")
    return "".join(cycles) or "e"


def _compose_perm(g, h):
    # (g h)(x) = g(h(x))
    return tuple(g[h[x]] for x in range(len(h)))


def _closure(gens, n, max_order=None):
    """Elements of the generated subgroup; ``None`` once ``max_order`` is exceeded."""
    ident = tuple(range(n))
    els = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = _compose_perm(g, p)
                if q not in seen:
                    seen.add(q)
                    els.append(q)
                    nxt.append(q)
                    if max_order is not None and len(els) > max_order:
                        return None
        frontier = nxt
    return els


def perm_group_action(gens, n, points=None, names=None, name="", max_order=None) -> GroupAction:
    """Subgroup of ``S_n`` generated by ``gens`` acting naturally on ``n`` points.

    Raises ``ValueError`` if the group has more than ``max_order`` elements.
    """
    gens = [tuple(g) for g in gens]
    els = _closure(gens, n, max_order)
    if els is None:
        raise ValueError(f"generated group exceeds order {max_order}")
    points = [str(i + 1) for i in range(n)] if points is None else [str(p) for p in points]
    label = names or {}
    nm = {p: label.get(p, cycle_name(p)) for p in els}
    mul = {(nm[g], nm[h]): nm[_compose_perm(g, h)] for g in els for h in els}
    act = {(nm[g], points[x]): points[g[x]] for g in els for x in range(n)}
    return validate_action(GroupAction(tuple(nm[g] for g in els), mul, "e", tuple(points), act, name=name))


def cyclic_group_action(n, points=("pt",), name="") -> GroupAction:
    """``Z/n`` acting trivially on ``points``; elements ``e, g, g2, ...`` (``e, s`` for n=2)."""
    if n == 2:
        els = ["e", "s"]
    else:
        els = ["e"] + [("g" if k == 1 else f"g{k}") for k in range(1, n)]
    mul = {(els[i], els[j]): els[(i + j) % n] for i in range(n) for j in range(n)}
    act = {(g, x): x for g in els for x in points}
    return validate_action(GroupAction(tuple(els), mul, "e", tuple(points), act, name=name))


def symmetric_group_action(n, name="") -> GroupAction:
    return perm_group_action([tuple(p) for p in itertools.permutations(range(n))], n, name=name)


def trivial_action(a: GroupAction, points, name="") -> GroupAction:
    """The group of ``a`` acting trivially on ``points``."""
    points = tuple(str(p) for p in points)
    act = {(g, x): x for g in a.elements for x in points}
    return validate_action(GroupAction(a.elements, a.mul, a.identity, points, act, name=name))


def dihedral_action(n, name="") -> GroupAction:
    """``D_n`` on the vertices ``1..n`` of an n-gon; elements ``r^k`` and ``r^k f``."""
    r = tuple((i + 1) % n for i in range(n))
    f = tuple((-i) % n for i in range(n))
    names = {}
    p = tuple(range(n))
    for k in range(n):
        names[p] = "e" if k == 0 else ("r" if k == 1 else f"r{k}")
        names[_compose_perm(p, f)] = "f" if k == 0 else ("rf" if k == 1 else f"r{k}f")
        p = _compose_perm(r, p)
    return perm_group_action([r, f], n, names=names, name=name)


def _z2_swap():
    return perm_group_action([(1, 0)], 2, name="z2-swap")


def _data(name):
    return json.loads((resources.files("gtl") / "data" / name).read_text())


def data_file(name):
    """Path-like handle of a packaged catalog file."""
    return resources.files("gtl") / "data" / name


def _from_groupoid_file(fname):
    def build():
        from .io import groupoid_from_dict

        return groupoid_from_dict(_data(fname)), None

    return build


def _from_action_file(fname):
    def build():
        from .io import action_from_dict

        a = action_from_dict(_data(fname))
        return make_transformation_groupoid(a), a

    return build


def _family(make_action=None, make_groupoid=None):
    def build():
        if make_groupoid is not None:
            return make_groupoid(), None
        a = make_action()
        return make_transformation_groupoid(a), a

    return build


CATALOG = {
    e.name: e
    for e in [
        CatalogEntry("units3", "family", _family(make_groupoid=lambda: unit_groupoid(3))),
        CatalogEntry("pair2", "groupoid-file", _from_groupoid_file("pair2.json")),
        CatalogEntry("pair3", "family", _family(make_groupoid=lambda: pair_groupoid(3))),
        CatalogEntry("z2-on-point", "action-file", _from_action_file("z2-on-point.json")),
        CatalogEntry("z3-on-point", "family", _family(lambda: cyclic_group_action(3))),
        CatalogEntry("z2-3pt", "action-file", _from_action_file("z2-3pt.json")),
        CatalogEntry("d3-3pt", "family", _family(lambda: dihedral_action(3))),
        CatalogEntry("z2-swap", "family", _family(_z2_swap)),
        CatalogEntry("z2-trivial-1", "family", _family(lambda: cyclic_group_action(2, ("1",)))),
        CatalogEntry("z2-trivial-2", "family", _family(lambda: cyclic_group_action(2, ("1", "2")))),
        CatalogEntry("z3-trivial-1", "family", _family(lambda: cyclic_group_action(3, ("1",)))),
        CatalogEntry("z3-trivial-2", "family", _family(lambda: cyclic_group_action(3, ("1", "2")))),
        CatalogEntry("s3-trivial-1", "family", _family(lambda: trivial_action(symmetric_group_action(3), ("p",)))),
        CatalogEntry("s3-trivial-2", "family", _family(lambda: trivial_action(symmetric_group_action(3), ("p", "q")))),
    ]
}

# The groupoids every acceptance property is run over.
CORE_CATALOG = ("units3", "pair2", "pair3", "z2-on-point", "z3-on-point", "z2-3pt", "d3-3pt")

_FAMILY = re.compile(r"^(units|pair|cyclic|dihedral)\((\d+)\)$")


def names() -> list:
    return list(CATALOG)


def get(name: str):
    """Look up a catalog entry or a parametric family such as ``pair(4)``.

    Returns ``(groupoid, action or None)``.
    """
    key = name[:-5] if name.endswith(".json") else name
    if key in CATALOG:
        return CATALOG[key].load()
    m = _FAMILY.match(key)
    if m:
        fam, n = m.group(1), int(m.group(2))
        if n < 1:
            raise KeyError(name)
        if fam == "units":
            return _named(unit_groupoid(n), key), None
        if fam == "pair":
            return _named(pair_groupoid(n), key), None
        if fam == "dihedral" and n < 3:
            raise KeyError(name)
        a = cyclic_group_action(n) if fam == "cyclic" else dihedral_action(n)
        return _named(make_transformation_groupoid(a), key), a
    raise KeyError(name)

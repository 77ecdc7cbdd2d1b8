"""JSON formats for groupoids, actions, elements, measures and traces.

Pair keys use ``"a|b"``, so identifiers may not contain ``|``.  Exact
scalars are written as rational strings (``"p/q"``) and read back exactly;
floats stay floats.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .algebra import AlgebraElement
from .groupoid import GroupAction, Groupoid, make_transformation_groupoid, validate_groupoid
from .measures import Measure, measure
from .scalars import QQi, format_rational, is_exact, parse_rational
from .traces import Trace

__all__ = [
    "FormatError",
    "SEP",
    "groupoid_from_dict",
    "groupoid_to_dict",
    "action_from_dict",
    "action_to_dict",
    "element_from_dict",
    "element_to_dict",
    "measure_from_dict",
    "measure_to_dict",
    "trace_from_dict",
    "trace_to_dict",
    "parse_groupoid",
    "parse_action",
    "load_json",
    "load_structure",
    "serialize",
    "scalar_to_json",
]

SEP = "|"


class FormatError(ValueError):
    """Malformed input file (as opposed to a well-formed file violating an axiom)."""


def _ident(x, what):
    if not isinstance(x, str) or not x:
        raise FormatError(f"{what} identifier must be a non-empty string, got {x!r}")
    if SEP in x:
        raise FormatError(f"{what} identifier {x!r} contains {SEP!r}")
    return x


def _split(key, what):
    parts = key.split(SEP)
    if len(parts) != 2:
        raise FormatError(f"{what} key {key!r} must have the form 'a{SEP}b'")
    return parts[0], parts[1]


def _require(data, keys, what):
    if not isinstance(data, dict):
        raise FormatError(f"{what} must be a JSON object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise FormatError(f"{what} is missing field {missing[0]!r}")


def groupoid_from_dict(data) -> Groupoid:
    _require(data, ("arrows", "units", "source", "range", "inverse", "compose"), "groupoid")
    arrows = tuple(_ident(a, "arrow") for a in data["arrows"])
    declared = set(arrows)
    units = tuple(_ident(u, "unit") for u in data["units"])
    for u in units:
        if u not in declared:
            raise FormatError(f"unit {u!r} is not a declared arrow")
    tables = {}
    for name in ("source", "range", "inverse"):
        table = data[name]
        if not isinstance(table, dict):
            raise FormatError(f"{name} must be an object")
        for k, v in table.items():
            if k not in declared:
                raise FormatError(f"{name} key {k!r} is not a declared arrow")
            if v not in declared:
                raise FormatError(f"{name}[{k!r}] = {v!r} is not a declared arrow")
        tables[name] = dict(table)
    compose = {}
    if not isinstance(data["compose"], dict):
        raise FormatError("compose must be an object")
    for k, v in data["compose"].items():
        a, b = _split(k, "compose")
        for x in (a, b, v):
            if x not in declared:
                raise FormatError(f"compose key {k!r} refers to undeclared arrow {x!r}")
        compose[(a, b)] = v
    G = Groupoid(arrows, units, tables["source"], tables["range"], tables["inverse"], compose, name=data.get("name", ""))
    return validate_groupoid(G)


def groupoid_to_dict(G: Groupoid) -> dict:
    out = {}
    if G.name:
        out["name"] = G.name
    out.update(
        arrows=list(G.arrows),
        units=list(G.units),
        source={a: G.source[a] for a in G.arrows},
        range={a: G.range[a] for a in G.arrows},
        inverse={a: G.inverse[a] for a in G.arrows},
        compose={f"{a}{SEP}{b}": c for (a, b), c in sorted(G.compose.items(), key=lambda kv: (G.index[kv[0][0]], G.index[kv[0][1]]))},
    )
    return out


def action_from_dict(data) -> GroupAction:
    _require(data, ("group", "space", "action"), "action")
    grp = data["group"]
    _require(grp, ("elements", "mul", "id"), "group")
    elements = tuple(_ident(g, "group element") for g in grp["elements"])
    eset = set(elements)
    ident = grp["id"]
    if ident not in eset:
        raise FormatError(f"identity {ident!r} is not a declared element")
    mul = {}
    for k, v in grp["mul"].items():
        g, h = _split(k, "mul")
        for x in (g, h, v):
            if x not in eset:
                raise FormatError(f"mul key {k!r} refers to undeclared element {x!r}")
        mul[(g, h)] = v
    space = tuple(_ident(x, "point") for x in data["space"])
    pset = set(space)
    act = {}
    if not isinstance(data["action"], dict):
        raise FormatError("action must be an object")
    for g, row in data["action"].items():
        if g not in eset:
            raise FormatError(f"action refers to undeclared element {g!r}")
        for x, y in row.items():
            if x not in pset or y not in pset:
                raise FormatError(f"action[{g!r}] refers to undeclared point {x if x not in pset else y!r}")
            act[(g, x)] = y
    return GroupAction(elements, mul, ident, space, act, name=data.get("name", ""))


def action_to_dict(a: GroupAction) -> dict:
    out = {}
    if a.name:
        out["name"] = a.name
    out["group"] = {
        "elements": list(a.elements),
        "mul": {f"{g}{SEP}{h}": a.mul[(g, h)] for g in a.elements for h in a.elements},
        "id": a.identity,
    }
    out["space"] = list(a.space)
    out["action"] = {g: {x: a.act[(g, x)] for x in a.space} for g in a.elements}
    return out


def _scalar_from(pair):
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise FormatError(f"scalar must be a [re, im] pair, got {pair!r}")
    re, im = pair
    if isinstance(re, str) and isinstance(im, str):
        try:
            return QQi(parse_rational(re), parse_rational(im))
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    if isinstance(re, int) and isinstance(im, int) and not isinstance(re, bool):
        return QQi(re, im)
    try:
        return complex(float(re), float(im))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad scalar {pair!r}") from exc


def scalar_to_json(v):
    if is_exact(v):
        q = v if isinstance(v, QQi) else QQi(v)
        return [format_rational(q.re), format_rational(q.im)]
    z = complex(v)
    return [z.real, z.imag]


def element_from_dict(G: Groupoid, data) -> AlgebraElement:
    _require(data, ("coeffs",), "element")
    coeffs = {}
    for a, pair in data["coeffs"].items():
        if a not in G.index:
            raise FormatError(f"element refers to undeclared arrow {a!r}")
        coeffs[a] = _scalar_from(pair)
    return AlgebraElement(G, tuple(coeffs.get(a, QQi(0)) for a in G.arrows))


def element_to_dict(f: AlgebraElement) -> dict:
    return {"coeffs": {a: scalar_to_json(c) for a, c in zip(f.groupoid.arrows, f.coeffs) if c}}


def measure_from_dict(G: Groupoid, data) -> Measure:
    _require(data, ("weights",), "measure")
    values = {}
    for x, w in data["weights"].items():
        if x not in G.unit_set:
            raise FormatError(f"measure refers to undeclared unit {x!r}")
        try:
            values[x] = parse_rational(w)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    return measure(G, values)


def measure_to_dict(mu: Measure) -> dict:
    return {"weights": {x: format_rational(w) for x, w in mu.weights.items()}}


def trace_from_dict(G: Groupoid, data) -> Trace:
    _require(data, ("values",), "trace")
    vals = {}
    for a, pair in data["values"].items():
        if a not in G.index:
            raise FormatError(f"trace refers to undeclared arrow {a!r}")
        vals[a] = _scalar_from(pair)
    tol = float(data.get("tol", 1e-9))
    return Trace(G, tuple(vals.get(a, QQi(0)) for a in G.arrows), tol, data.get("label", ""))


def trace_to_dict(t: Trace) -> dict:
    out = {"values": {a: scalar_to_json(v) for a, v in zip(t.groupoid.arrows, t.values)}, "tol": t.tol}
    if t.label:
        out["label"] = t.label
    return out


def load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON in {path}: {exc}") from exc


def load_structure(data):
    """Build ``(groupoid, action_or_None)`` from a groupoid or action document."""
    if isinstance(data, dict) and "group" in data:
        a = action_from_dict(data)
        return make_transformation_groupoid(a), a
    return groupoid_from_dict(data), None


def parse_groupoid(path) -> Groupoid:
    """Read a groupoid file; action files are turned into their transformation groupoid."""
    return load_structure(load_json(path))[0]


def parse_action(path) -> GroupAction:
    return action_from_dict(load_json(path))


def serialize(obj, indent=2) -> str:
    if isinstance(obj, Groupoid):
        data = groupoid_to_dict(obj)
    elif isinstance(obj, GroupAction):
        data = action_to_dict(obj)
    elif isinstance(obj, AlgebraElement):
        data = element_to_dict(obj)
    elif isinstance(obj, Measure):
        data = measure_to_dict(obj)
    elif isinstance(obj, Trace):
        data = trace_to_dict(obj)
    elif isinstance(obj, Fraction):
        data = format_rational(obj)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return json.dumps(data, indent=indent, ensure_ascii=False)

"""``gtl`` command line.

Exit status: 0 on success, 1 when a check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import catalog
from .algebra import DEFAULT_TOL, AlgebraError
from .groupoid import GroupoidError, isotropy_bundle_off_units, isotropy_group, orbits
from .io import FormatError, load_json, load_structure, measure_to_dict, scalar_to_json, trace_from_dict
from .measures import MeasureError, invariant_vertices, is_essentially_free, parse_measure_spec
from .traces import (
    TraceError,
    _fmt,
    associated_measure,
    is_canonical,
    is_tracial_state,
    tau_fix,
    tau_mu_trace,
    trace_simplex,
)
from .verify import MAX_ARROWS, search, verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _default_tol():
    raw = os.environ.get("GTL_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"GTL_TOL is not a number: {raw!r}")
    if not tol > 0:
        raise UsageError("GTL_TOL must be positive")
    return tol


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _global_options(parser, suppress):
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    parser.add_argument("--tol", type=_positive_float, help="numerical tolerance (default 1e-9 or $GTL_TOL)", **kw)
    parser.add_argument("--format", choices=("text", "json"), help="output format", **kw)
    parser.add_argument("--seed", type=int, help="PRNG seed", **kw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gtl", description="Traces on finite groupoid algebras.")
    _global_options(p, suppress=False)
    p.set_defaults(tol=None, format="text", seed=0)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)

    def cmd(name, help_text, file=True):
        s = sub.add_parser(name, help=help_text, parents=[common])
        if file:
            s.add_argument("file", metavar="FILE", help="groupoid or action file, or a catalog name")
        return s

    cmd("validate", "check the groupoid axioms")
    cmd("info", "orbits, isotropy groups and isotropy arrows off the units")
    cmd("measures", "vertices of the invariant probability measures")
    cmd("traces", "extreme tracial states with their measures and canonicity")
    cmd("check-free", "is the groupoid essentially free for a measure").add_argument("--measure", required=True, metavar="M")
    cmd("tau-fix", "fixed point trace of a measure").add_argument("--measure", required=True, metavar="M")
    cmd("check-canonical", "is a trace a canonical tracial state").add_argument(
        "--trace", required=True, metavar="T", help="trace file or inline JSON"
    )
    v = cmd("verify", "run the full check suite")
    v.add_argument("--timings", action="store_true", help="include per-check runtimes")
    s = cmd("search", "verify random instances", file=False)
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--max-arrows", type=int, default=MAX_ARROWS)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--timings", action="store_true", help="include per-check runtimes")
    sub.add_parser("catalog", help="list catalog names", parents=[common])
    return p


def _load(spec):
    path = Path(spec)
    if path.is_file():
        G, a = load_structure(load_json(path))
        if not G.name:
            G = catalog._named(G, path.stem)
        return G, a
    try:
        return catalog.get(spec)
    except KeyError:
        raise UsageError(f"no such file or catalog entry: {spec}")


def _emit(args, data, text):
    if args.format == "json":
        print(json.dumps(data, ensure_ascii=False))
    else:
        print(text)


def _jsonable(v):
    return scalar_to_json(v)


def _cmd_validate(args, G, a):
    _emit(args, {"groupoid": G.name, "valid": True, "arrows": len(G.arrows), "units": len(G.units)},
          f"{G.name}: valid groupoid with {len(G.arrows)} arrows and {len(G.units)} units")
    return EXIT_OK


def _cmd_info(args, G, a):
    orbs = orbits(G)
    iso = {x: list(isotropy_group(G, x).arrows) for x in G.units}
    off = list(isotropy_bundle_off_units(G))
    data = {"groupoid": G.name, "arrows": len(G.arrows), "units": list(G.units),
            "orbits": [list(o) for o in orbs], "isotropy": iso, "isotropy_off_units": off}
    lines = [f"groupoid {G.name}: {len(G.arrows)} arrows, {len(G.units)} units"]
    lines.append("orbits: " + " ".join("{" + ",".join(o) + "}" for o in orbs))
    for x in G.units:
        lines.append(f"isotropy at {x}: order {len(iso[x])}")
    lines.append("isotropy off units: " + (", ".join(off) if off else "none"))
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def _cmd_measures(args, G, a):
    vs = invariant_vertices(G)
    _emit(args, {"groupoid": G.name, "vertices": [measure_to_dict(m)["weights"] for m in vs]},
          "\n".join(f"vertex {i}: {m}" for i, m in enumerate(vs)))
    return EXIT_OK


def _cmd_traces(args, G, a):
    ext = trace_simplex(G, args.tol, args.seed)
    rows = []
    for t in ext:
        rows.append({
            "measure": measure_to_dict(associated_measure(t))["weights"],
            "canonical": bool(is_canonical(t)),
            "block_dim": t.block_dim,
            "values": {k: _jsonable(v) for k, v in t.as_dict().items()},
        })
    lines = [f"groupoid {G.name}: {len(ext)} extreme traces"]
    for i, (t, r) in enumerate(zip(ext, rows)):
        lines.append(f"trace {i}: canonical={str(r['canonical']).lower()} block_dim={t.block_dim} measure {associated_measure(t)}")
        lines.append("  " + ", ".join(f"{k}: {_fmt(v)}" for k, v in t.as_dict().items()))
    data = {"groupoid": G.name, "seed": args.seed, "tolerance": args.tol, "traces": rows,
            "canonical": [r["canonical"] for r in rows]}
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def _cmd_check_free(args, G, a):
    mu = parse_measure_spec(G, args.measure)
    v = is_essentially_free(G, mu)
    data = {"groupoid": G.name, "measure": measure_to_dict(mu)["weights"], "essentially_free": v.ok,
            "witness": list(v.witness)}
    text = "PASS essentially free" if v.ok else f"FAIL not essentially free [witness: {', '.join(v.witness)}]"
    _emit(args, data, text)
    return EXIT_OK if v.ok else EXIT_FAIL


def _cmd_tau_fix(args, G, a):
    mu = parse_measure_spec(G, args.measure)
    t = tau_fix(G, mu, args.tol)
    canonical = t.isclose(tau_mu_trace(G, mu, args.tol))
    data = {"groupoid": G.name, "measure": measure_to_dict(mu)["weights"],
            "values": {k: _jsonable(v) for k, v in t.as_dict().items()}, "equals_tau_mu": canonical}
    lines = [f"{k}: {_fmt(v)}" for k, v in t.as_dict().items()]
    lines.append(f"equals tau_mu: {str(canonical).lower()}")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def _read_trace(G, spec, tol):
    path = Path(spec)
    if path.is_file():
        data = load_json(path)
    else:
        try:
            data = json.loads(spec)
        except json.JSONDecodeError:
            raise UsageError(f"--trace is neither a file nor valid JSON: {spec}")
    if isinstance(data, dict) and "values" not in data:
        data = {"values": data}
    t = trace_from_dict(G, data)
    return t if tol is None else type(t)(G, t.values, tol, t.label)


def _cmd_check_canonical(args, G, a):
    t = _read_trace(G, args.trace, args.tol)
    state = is_tracial_state(G, t)
    canon = is_canonical(t)
    ok = state.ok and canon.ok
    data = {"groupoid": G.name, "tracial_state": state.ok, "canonical": canon.ok,
            "message": state.message or canon.message, "witness": [str(w) for w in (state.witness or canon.witness)]}
    if not state.ok:
        text = f"FAIL not a tracial state: {state.message}"
    elif not canon.ok:
        text = f"FAIL not canonical: {canon.message}"
    else:
        text = "PASS canonical tracial state"
    _emit(args, data, text)
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_verify(args, G, a):
    r = verify(G, a, seed=args.seed, tol=args.tol, name=G.name)
    if args.format == "json":
        print(r.to_json(args.timings))
    else:
        print(r.to_text(args.timings))
    return EXIT_OK if r.ok else EXIT_FAIL


def _cmd_search(args):
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    if not 1 <= args.max_arrows <= MAX_ARROWS:
        raise UsageError(f"--max-arrows must be between 1 and {MAX_ARROWS}")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    failed = 0
    for r in search(args.seed, args.count, args.max_arrows, args.tol, jobs=args.jobs):
        failed += not r.ok
        print(r.to_json(args.timings) if args.format == "json" else r.to_text(args.timings), flush=True)
    if args.format == "text":
        print(f"search seed={args.seed} count={args.count}: {failed} violation(s)")
    return EXIT_OK if not failed else EXIT_FAIL


def _cmd_catalog(args):
    _emit(args, {"catalog": catalog.names()}, "\n".join(catalog.names()))
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "info": _cmd_info,
    "measures": _cmd_measures,
    "traces": _cmd_traces,
    "check-free": _cmd_check_free,
    "tau-fix": _cmd_tau_fix,
    "check-canonical": _cmd_check_canonical,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.tol is None:
            args.tol = _default_tol()
        if args.command == "search":
            return _cmd_search(args)
        if args.command == "catalog":
            return _cmd_catalog(args)
        try:
            G, a = _load(args.file)
        except GroupoidError as exc:
            if args.command == "validate":
                _emit(args, {"valid": False, "axiom": exc.axiom, "witness": list(exc.witness), "message": str(exc)},
                      f"FAIL {exc}")
                return EXIT_FAIL
            raise
        return _COMMANDS[args.command](args, G, a)
    except (UsageError, FormatError, GroupoidError, MeasureError, TraceError, AlgebraError) as exc:
        print(f"gtl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())

"""Theorem-verification suite and randomized self-test.

``verify`` runs every check on one groupoid and returns a report; a
failing check means the implementation disagrees with a proven identity,
i.e. a bug.  ``search`` feeds randomly generated groupoids through the
same suite, deterministically in the seed.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    I_norm,
    adjoint,
    block_decomposition,
    center_basis,
    convolve,
    delta,
    expectation,
    faithful_realization,
    mat_mul,
    random_element,
    reduced_norm,
    regular_representation,
    star,
    unit_element,
    zero,
)
from .catalog import perm_group_action
from .groupoid import (
    GroupAction,
    Groupoid,
    disjoint_union,
    group_groupoid,
    isotropy_bundle_off_units,
    isotropy_group,
    make_transformation_groupoid,
    orbits,
    pair_times_group,
    transformation_arrow,
    validate_groupoid,
)
from .measures import invariant_vertices, is_essentially_free, random_invariant_measure
from .scalars import QQi, close
from .traces import (
    associated_measure,
    check_exact_sequence,
    is_canonical,
    is_tracial_state,
    isotropy_decomposition,
    random_bisection_decomposition,
    reconstruct,
    tau_fix,
    tau_fix_via_decomposition,
    tau_mu_trace,
    trace_simplex,
    traces_with_measure,
)

__all__ = [
    "SUITE",
    "MAX_ARROWS",
    "CheckResult",
    "VerificationReport",
    "verify",
    "search",
    "random_instance",
    "conjugacy_class_count",
]

SUITE = (
    "groupoid-axioms",
    "algebra-laws",
    "block-decomposition",
    "trace-simplex",
    "tau-fix-trace",
    "tau-fix-decomposition",
    "freeness-criterion",
    "main-theorem",
    "exact-sequence",
    "isotropy-reconstruction",
    "affine-bijection",
    "group-action-fix",
    "trivial-action-corollary",
)

MAX_ARROWS = 24


class CheckFailure(Exception):
    def __init__(self, message, witness=()):
        super().__init__(message)
        self.witness = tuple(str(w) for w in witness)


class Skip(Exception):
    pass


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "skip"
    detail: str = ""
    witness: tuple = ()
    runtime_ms: float = 0.0

    def to_dict(self, timings=False) -> dict:
        out = {"name": self.name, "status": self.status, "detail": self.detail, "witness": list(self.witness)}
        if timings:
            out["runtime_ms"] = round(self.runtime_ms, 3)
        return out


@dataclass
class VerificationReport:
    groupoid_id: str
    seed: int
    tolerance: float
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def check(self, name) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self, timings=False) -> dict:
        return {
            "groupoid": self.groupoid_id,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "result": "pass" if self.ok else "fail",
            "checks": [c.to_dict(timings) for c in self.checks],
        }

    def to_json(self, timings=False) -> str:
        return json.dumps(self.to_dict(timings), ensure_ascii=False)

    def to_text(self, timings=False) -> str:
        lines = [f"groupoid {self.groupoid_id} seed={self.seed} tol={self.tolerance:g}"]
        for c in self.checks:
            line = f"  {c.status.upper():4} {c.name}"
            if c.detail:
                line += f": {c.detail}"
            if c.witness:
                line += f" [witness: {', '.join(c.witness)}]"
            if timings:
                line += f" ({c.runtime_ms:.1f} ms)"
            lines.append(line)
        lines.append(f"  result: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def conjugacy_class_count(H: Groupoid) -> int:
    """Number of conjugacy classes of a one-unit groupoid (a group)."""
    seen, count = set(), 0
    for g in H.arrows:
        if g in seen:
            continue
        count += 1
        for h in H.arrows:
            seen.add(H.compose[(H.compose[(h, g)], H.inverse[h])])
    return count


class _Context:
    """Data shared between the checks of one verification run."""

    def __init__(self, G, action, seed, tol, samples, random_measures, decompositions):
        self.G = G
        self.action = action
        self.seed = seed
        self.tol = tol
        self.samples = samples
        self.decompositions = decompositions
        rng = random.Random(seed)
        self.vertices = invariant_vertices(G)
        self.random_measures = [random_invariant_measure(G, rng) for _ in range(random_measures)]
        self._extremes = None

    def rng(self, salt):
        return random.Random(f"{self.seed}:{salt}")

    @property
    def measures(self):
        return self.vertices + self.random_measures

    @property
    def extremes(self):
        if self._extremes is None:
            self._extremes = trace_simplex(self.G, self.tol, self.seed)
        return self._extremes


def _check_groupoid_axioms(ctx):
    validate_groupoid(ctx.G)
    return f"{len(ctx.G.arrows)} arrows, {len(ctx.G.units)} units"


def _check_algebra_laws(ctx):
    G, tol = ctx.G, ctx.tol
    rng = ctx.rng("algebra")
    one = unit_element(G)
    if star(one) != one:
        raise CheckFailure("unit is not self-adjoint")
    for _ in range(ctx.samples):
        f, g, h = (random_element(G, rng) for _ in range(3))
        fg = convolve(f, g)
        if convolve(fg, h) != convolve(f, convolve(g, h)):
            raise CheckFailure("convolution is not associative")
        if star(star(f)) != f:
            raise CheckFailure("star is not involutive")
        if star(fg) != convolve(star(g), star(f)):
            raise CheckFailure("star is not anti-multiplicative")
        if convolve(one, f) != f or convolve(f, one) != f:
            raise CheckFailure("unit element is not an identity")
        for x in G.units:
            lf = regular_representation(G, x, f)
            if regular_representation(G, x, fg) != mat_mul(lf, regular_representation(G, x, g)):
                raise CheckFailure(f"λ_{x} is not multiplicative", (x,))
            if regular_representation(G, x, star(f)) != adjoint(lf):
                raise CheckFailure(f"λ_{x} does not preserve adjoints", (x,))
        nf = reduced_norm(f)
        nff = reduced_norm(convolve(star(f), f))
        if abs(nff - nf * nf) > 1e-9 * max(1.0, nf * nf):
            raise CheckFailure(f"C*-identity fails: {nff:.12g} vs {nf * nf:.12g}")
        if nf > I_norm(f) + tol:
            raise CheckFailure("reduced norm exceeds I-norm")
        ef = expectation(f)
        if expectation(ef) != ef:
            raise CheckFailure("expectation is not idempotent")
        if reduced_norm(ef) > nf + tol:
            raise CheckFailure("expectation is not contractive")
        pos = expectation(convolve(star(f), f))
        for x in G.units:
            v = pos[x]
            if v.im or v.re < 0:
                raise CheckFailure(f"E(f*f) is not nonnegative at {x}", (x,))
        if (pos == zero(G)) != (f == zero(G)):
            raise CheckFailure("expectation is not faithful")
    return f"{ctx.samples} random triples"


def _check_blocks(ctx):
    G = ctx.G
    blocks = block_decomposition(faithful_realization(G), tol=ctx.tol, seed=ctx.seed)
    if sum(d * d for d in blocks.block_dims) != len(G.arrows):
        raise CheckFailure("block dimensions squared do not sum to |G|")
    expected = sum(conjugacy_class_count(isotropy_group(G, orb[0])) for orb in orbits(G))
    if len(blocks) != expected or blocks.center_dim != expected:
        raise CheckFailure(f"{len(blocks)} blocks but {expected} (orbit, conjugacy class) pairs")
    for d, sup in zip(blocks.block_dims, blocks.supports):
        if d % len(sup):
            raise CheckFailure("block size is not a multiple of its orbit size", sup)
    return "blocks " + "+".join(f"M{d}" for d in blocks.block_dims)


def _check_trace_simplex(ctx):
    G = ctx.G
    for t in ctx.extremes:
        v = is_tracial_state(G, t)
        if not v:
            raise CheckFailure(f"extreme trace {t.label}: {v.message}", v.witness)
    return f"{len(ctx.extremes)} extreme traces"


def _check_tau_fix_trace(ctx):
    G = ctx.G
    rng = ctx.rng("taufix")
    for mu in ctx.measures:
        t = tau_fix(G, mu, ctx.tol)
        v = is_tracial_state(G, t)
        if not v:
            raise CheckFailure(f"tau_fix({mu}) is not a tracial state: {v.message}", v.witness)
        if associated_measure(t) != mu:
            raise CheckFailure(f"tau_fix({mu}) has the wrong associated measure")
    for mu in ctx.vertices:
        t = tau_fix(G, mu, ctx.tol)
        for _ in range(ctx.samples):
            a = random_element(G, rng)
            lhs = t(convolve(star(a), a))
            rhs = t(convolve(a, star(a)))
            if lhs != rhs or lhs.im or lhs.re < 0:
                raise CheckFailure(f"tau_fix(a*a) = {lhs}, tau_fix(aa*) = {rhs}")
    return f"{len(ctx.measures)} measures"


def _check_tau_fix_decomposition(ctx):
    G = ctx.G
    rng = ctx.rng("decomp")
    n = 0
    for mu in ctx.vertices + ctx.random_measures[:3]:
        closed = tau_fix(G, mu, ctx.tol)
        for _ in range(ctx.decompositions):
            f = random_element(G, rng, density=rng.choice([0.3, 0.7, 1.0]))
            parts = random_bisection_decomposition(f, rng)
            got = tau_fix_via_decomposition(G, mu, f, parts)
            if got != closed(f):
                raise CheckFailure(f"decomposition gives {got}, closed form {closed(f)}")
            n += 1
    return f"{n} decompositions"


def _check_freeness_criterion(ctx):
    G = ctx.G
    for mu in ctx.measures:
        free = is_essentially_free(G, mu).ok
        same = tau_fix(G, mu).values == tau_mu_trace(G, mu).values
        if free != same:
            raise CheckFailure(f"μ={mu}: essentially free={free} but tau_fix==tau_mu is {same}")
    return f"{len(ctx.measures)} measures"


def _check_main_theorem(ctx):
    G, tol = ctx.G, ctx.tol
    free_count = 0
    for mu in ctx.measures:
        free = is_essentially_free(G, mu)
        fib = traces_with_measure(G, mu, tol, ctx.seed, extremes=ctx.extremes)
        all_canonical = True
        witness = ()
        if fib.n_extreme_points() <= 64:
            for _, t in fib.extreme_points():
                v = is_canonical(t)
                if not v:
                    all_canonical, witness = False, v.witness
                    break
        else:
            # extreme points are sums of traces over disjoint orbits; canonicity splits
            for mass, idx in fib.groups:
                if mass > 0:
                    for i in idx:
                        v = is_canonical(fib.extremes[i])
                        if not v:
                            all_canonical, witness = False, v.witness
        singleton = fib.is_singleton()
        if singleton:
            _, only = next(fib.extreme_points())
            if not only.isclose(tau_mu_trace(G, mu, tol), tol):
                raise CheckFailure(f"μ={mu}: singleton fiber is not tau_mu")
        if not (free.ok == all_canonical == singleton):
            raise CheckFailure(
                f"μ={mu}: free={free.ok}, all extremes canonical={all_canonical}, singleton={singleton}",
                free.witness or witness,
            )
        free_count += free.ok
    return f"{len(ctx.measures)} measures, {free_count} essentially free"


def _check_exact_sequence(ctx):
    for mu in ctx.vertices:
        rep = check_exact_sequence(ctx.G, mu, ctx.tol, ctx.seed)
        if not rep:
            raise CheckFailure(f"μ={mu}: {rep.mismatches[0]}", rep.mismatches[0][1:])
    return f"{len(ctx.vertices)} vertex measures"


def _check_isotropy(ctx):
    G, tol = ctx.G, ctx.tol
    basis = [delta(G, a) for a in G.arrows]
    for t in ctx.extremes:
        mu, states = isotropy_decomposition(t)
        for st in states:
            v = st.check(tol)
            if not v:
                raise CheckFailure(f"{t.label}: isotropy state at {st.base_unit}: {v.message}")
        for a, f in zip(G.arrows, basis):
            if not close(reconstruct(G, mu, states, f), t[a], tol):
                raise CheckFailure(f"{t.label}: reconstruction fails at {a}", (a,))
    for mu in ctx.vertices:
        t = tau_fix(G, mu, tol)
        m2, states = isotropy_decomposition(t)
        if any(not st.is_trivial() for st in states):
            raise CheckFailure(f"tau_fix({mu}) does not decompose into trivial states")
        for a, f in zip(G.arrows, basis):
            if reconstruct(G, m2, states, f) != t[a]:
                raise CheckFailure(f"tau_fix reconstruction fails at {a}", (a,))
    return f"{len(ctx.extremes)} extreme traces"


def _check_affine_bijection(ctx):
    G = ctx.G
    images = [associated_measure(t) for t in ctx.extremes]
    missing = [v for v in ctx.vertices if v not in images]
    if missing:
        raise CheckFailure(f"vertex {missing[0]} is not the measure of any extreme trace")
    if isotropy_bundle_off_units(G):
        raise Skip("not essentially free for every invariant vertex")
    if len(images) != len(set(images)) or set(images) != set(ctx.vertices):
        raise CheckFailure("associated_measure is not a bijection onto the vertices")
    return f"{len(images)} extreme traces <-> {len(ctx.vertices)} vertices"


def _crossed_product_tau_fix(a: GroupAction, mu, f):
    """``Σ_g ∫_{Fix(g)} f(·, g) dμ`` for ``f`` on the transformation groupoid."""
    total = QQi(0)
    for g in a.elements:
        for x in a.fixed_points(g):
            c = f[transformation_arrow(a, x, g)]
            if c and mu[x]:
                total = total + c * QQi(mu[x])
    return total


def _check_group_action(ctx):
    a = ctx.action
    if a is None:
        raise Skip("not built from a group action")
    G = ctx.G
    rng = ctx.rng("action")
    for mu in ctx.measures:
        by_action = all(
            sum((mu[x] for x in a.fixed_points(g)), Fraction(0)) == 0 for g in a.elements if g != a.identity
        )
        if by_action != is_essentially_free(G, mu).ok:
            raise CheckFailure(f"μ={mu}: Fix(γ) criterion disagrees with essential freeness")
    for mu in ctx.vertices:
        t = tau_fix(G, mu)
        for _ in range(ctx.samples):
            f = random_element(G, rng)
            if _crossed_product_tau_fix(a, mu, f) != t(f):
                raise CheckFailure(f"μ={mu}: crossed-product formula disagrees with tau_fix")
    return f"{len(ctx.measures)} measures"


def _check_trivial_action(ctx):
    a = ctx.action
    if a is None or not a.is_trivial() or len(a.elements) < 2:
        raise Skip("not a trivial action of a nontrivial group")
    G = ctx.G
    for mu in ctx.measures:
        t = tau_fix(G, mu)
        for x in a.space:
            for g in a.elements:
                # trivial character ⊗ τ_μ on the basis element g ⊗ δ_x
                if t[transformation_arrow(a, x, g)] != QQi(1 * mu[x]):
                    raise CheckFailure(f"tau_fix is not triv ⊗ tau_mu at ({x}, {g})")
        if is_canonical(t).ok:
            raise CheckFailure(f"tau_fix({mu}) is canonical")
    if all(is_canonical(t).ok for t in ctx.extremes):
        raise CheckFailure("no noncanonical extreme trace")
    return "noncanonical trace found"


_CHECKS = {
    "groupoid-axioms": _check_groupoid_axioms,
    "algebra-laws": _check_algebra_laws,
    "block-decomposition": _check_blocks,
    "trace-simplex": _check_trace_simplex,
    "tau-fix-trace": _check_tau_fix_trace,
    "tau-fix-decomposition": _check_tau_fix_decomposition,
    "freeness-criterion": _check_freeness_criterion,
    "main-theorem": _check_main_theorem,
    "exact-sequence": _check_exact_sequence,
    "isotropy-reconstruction": _check_isotropy,
    "affine-bijection": _check_affine_bijection,
    "group-action-fix": _check_group_action,
    "trivial-action-corollary": _check_trivial_action,
}


def verify(
    G: Groupoid,
    action: GroupAction = None,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    samples: int = 20,
    random_measures: int = 50,
    decompositions: int = 10,
    name: str = None,
) -> VerificationReport:
    """Run the full check suite on ``G``; deterministic in ``(G, seed, tol)``."""
    ctx = _Context(G, action, seed, tol, samples, random_measures, decompositions)
    report = VerificationReport(name or G.name or "<anonymous>", seed, tol)
    for check in SUITE:
        start = time.perf_counter()
        try:
            detail = _CHECKS[check](ctx)
            res = CheckResult(check, "pass", detail or "")
        except Skip as s:
            res = CheckResult(check, "skip", str(s))
        except CheckFailure as exc:
            res = CheckResult(check, "fail", str(exc), exc.witness)
        except Exception as exc:  # an unexpected error is a failed check, not a crash
            res = CheckResult(check, "fail", f"{type(exc).__name__}: {exc}")
        res.runtime_ms = (time.perf_counter() - start) * 1e3
        report.checks.append(res)
    return report


# --- random instances -------------------------------------------------------


def _random_perm(rng, n):
    p = list(range(n))
    rng.shuffle(p)
    return tuple(p)


def _random_perm_group(rng, n, max_order):
    for _ in range(100):
        gens = [_random_perm(rng, n) for _ in range(rng.randint(1, 2))]
        try:
            return perm_group_action(gens, n, max_order=max_order), gens
        except ValueError:
            continue
    return perm_group_action([tuple(range(n))], n), [tuple(range(n))]


def random_instance(rng: random.Random, max_arrows: int = MAX_ARROWS):
    """A random ``(groupoid, action or None, description)`` with at most ``max_arrows`` arrows.

    Alternates between permutation-group actions on at most 6 points and
    bundles of transitive components ``pair(k) × H``.
    """
    for _ in range(1000):
        if rng.random() < 0.5:
            n = rng.randint(1, 6)
            a, gens = _random_perm_group(rng, n, max(1, max_arrows // n))
            if len(a.elements) * n > max_arrows:
                continue
            desc = f"action n={n} gens=" + ";".join("".join(str(i + 1) for i in g) for g in gens)
            return make_transformation_groupoid(a), a, desc
        comps, budget, parts = [], max_arrows, []
        for c in range(rng.randint(1, 4)):
            k = rng.randint(1, 3)
            m = rng.randint(1, 4)
            h, gens = _random_perm_group(rng, m, max(1, budget // (k * k)))
            size = k * k * len(h.elements)
            if size > budget:
                continue
            H = group_groupoid(h.elements, h.mul, h.identity, point="x")
            comps.append(pair_times_group(range(1, k + 1), H, tag=f"c{c}."))
            parts.append(f"pair({k})x<{len(h.elements)}>")
            budget -= size
        if not comps:
            continue
        G = disjoint_union(comps)
        return G, None, "bundle " + "+".join(parts)
    raise RuntimeError("could not generate an instance")


def _search_one(args):
    seed, i, max_arrows, tol, samples = args
    rng = random.Random(seed * 1_000_003 + i)
    G, a, desc = random_instance(rng, max_arrows)
    return verify(G, a, seed=seed * 1_000_003 + i, tol=tol, samples=samples, name=f"search[{seed}:{i}] {desc}")


def search(seed: int, count: int, max_arrows: int = MAX_ARROWS, tol: float = DEFAULT_TOL, samples: int = 5, jobs: int = 1):
    """Yield ``count`` reports on random instances, in index order."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if not 1 <= max_arrows <= MAX_ARROWS:
        raise ValueError(f"max_arrows must be between 1 and {MAX_ARROWS}")
    tasks = [(seed, i, max_arrows, tol, samples) for i in range(count)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            yield from ex.map(_search_one, tasks)
    else:
        for t in tasks:
            yield _search_one(t)

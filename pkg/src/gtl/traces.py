"""Tracial states on the convolution algebra of a finite groupoid.

A trace is stored by its values on the arrow basis.  Values built from
rational measures (``τ_μ``, the fixed point trace) stay exact; traces read
off the block decomposition carry complex floats and are compared with an
absolute tolerance.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    block_decomposition,
    delta,
    expectation,
    faithful_realization,
    star,
)
from .groupoid import (
    Groupoid,
    fix_set,
    is_bisection,
    isotropy_group,
    restrict,
)
from .linalg import nullspace, reduce_against, rref, span_equal
from .measures import Measure, MeasureError, is_invariant, measure, support
from .result import Verdict
from .scalars import QQi, close, is_exact

__all__ = [
    "Trace",
    "TraceError",
    "IsotropyState",
    "Fiber",
    "TracialIdeal",
    "ExactSequenceReport",
    "trace",
    "gram_matrix",
    "is_tracial_state",
    "associated_measure",
    "is_canonical",
    "tau_mu_trace",
    "tau_fix",
    "tau_fix_via_decomposition",
    "random_bisection_decomposition",
    "trace_simplex",
    "combine",
    "simplex_coordinates",
    "traces_with_measure",
    "isotropy_decomposition",
    "reconstruct",
    "tracial_ideal",
    "check_exact_sequence",
]

RATIONAL_DENOMINATOR = 10**6


class TraceError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Trace:
    """Linear functional given by ``values[i] = τ(δ_{arrows[i]})``."""

    groupoid: Groupoid
    values: tuple
    tol: float = DEFAULT_TOL
    label: str = ""
    block_dim: int = 0

    def __getitem__(self, arrow):
        return self.values[self.groupoid.index[arrow]]

    def __call__(self, f: AlgebraElement):
        total = QQi(0)
        for c, v in zip(f.coeffs, self.values):
            if c and v:
                total = total + c * v
        return total

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.values)

    def as_dict(self) -> dict:
        return dict(zip(self.groupoid.arrows, self.values))

    def isclose(self, other: "Trace", tol=None) -> bool:
        tol = self.tol if tol is None else tol
        return all(close(a, b, tol) for a, b in zip(self.values, other.values))

    def __repr__(self):
        name = f" {self.label}" if self.label else ""
        body = ", ".join(f"{a}: {_fmt(v)}" for a, v in self.as_dict().items())
        return f"Trace{name}({body})"


def _fmt(v):
    if is_exact(v):
        return str(v)
    z = complex(v)
    if abs(z.imag) < 1e-12:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}i"


def trace(G: Groupoid, values: Mapping, tol: float = DEFAULT_TOL, label: str = "") -> Trace:
    """Trace from a mapping arrow -> value; missing arrows are 0."""
    unknown = set(values) - set(G.index)
    if unknown:
        raise TraceError(f"unknown arrow {sorted(unknown)[0]}")
    vals = []
    for a in G.arrows:
        v = values.get(a, 0)
        vals.append(QQi(v) if isinstance(v, (int, Fraction)) else v)
    return Trace(G, tuple(vals), tol, label)


def gram_matrix(t: Trace):
    """``M[α, β] = τ(δ_α* ∗ δ_β)``; nonzero only when ``r(α) = r(β)``."""
    G = t.groupoid
    n = len(G.arrows)
    M = [[QQi(0)] * n for _ in range(n)]
    for i, a in enumerate(G.arrows):
        ai = G.inverse[a]
        for j in range(n):
            c = G.compose.get((ai, G.arrows[j]))
            if c is not None:
                M[i][j] = t.values[G.index[c]]
    return M


def _numeric(M) -> np.ndarray:
    return np.array([[complex(v) for v in row] for row in M], dtype=complex).reshape(len(M), len(M))


def is_tracial_state(G: Groupoid, t: Trace) -> Verdict:
    """Check normalization, hermiticity, the trace property and positivity.

    The trace property is checked on all basis pairs, ``τ(δ_a∗δ_b) = τ(δ_b∗δ_a)``
    with an undefined composite contributing 0; by bilinearity this is
    traciality on the whole algebra.
    """
    tol = t.tol
    if len(t.values) != len(G.arrows):
        return Verdict(False, (), "values not defined on every arrow")
    norm = sum((t[u] for u in G.units), QQi(0))
    if not close(norm, QQi(1), tol):
        return Verdict(False, (), f"normalization fails: sum over units is {_fmt(norm)}")
    for a in G.arrows:
        if not close(t[G.inverse[a]], t[a].conjugate(), tol):
            return Verdict(False, (a,), f"not hermitian at {a}")
    zero = QQi(0)
    for a in G.arrows:
        for b in G.arrows:
            ab = G.compose.get((a, b))
            ba = G.compose.get((b, a))
            lhs = t[ab] if ab is not None else zero
            rhs = t[ba] if ba is not None else zero
            if not close(lhs, rhs, tol):
                return Verdict(False, (a, b), f"trace property fails at ({a}, {b})")
    M = _numeric(gram_matrix(t))
    ev = np.linalg.eigvalsh((M + M.conj().T) / 2)
    if ev.size and ev[0] < -tol:
        return Verdict(False, (float(ev[0]),), f"positivity fails: eigenvalue {ev[0]:.3g}")
    return Verdict(True)


def _rationalize(v, tol) -> Fraction:
    if is_exact(v):
        q = v if isinstance(v, QQi) else QQi(v)
        if q.im:
            raise TraceError("value on a unit is not real")
        return Fraction(q.re)
    z = complex(v)
    if abs(z.imag) > tol:
        raise TraceError("value on a unit is not real")
    q = Fraction(z.real).limit_denominator(RATIONAL_DENOMINATOR)
    if abs(float(q) - z.real) > tol:
        raise TraceError(f"unit value {z.real!r} has no small-denominator rational form")
    return q


def associated_measure(t: Trace) -> Measure:
    """``μ_τ(x) = τ(δ_x)`` as an exact rational measure."""
    G = t.groupoid
    w = {}
    for u in G.units:
        q = _rationalize(t[u], t.tol)
        if q < 0:
            if q < -t.tol:
                raise TraceError(f"negative value at unit {u}")
            q = Fraction(0)
        w[u] = q
    total = sum(w.values())
    if total != 1:
        if abs(float(total) - 1) > t.tol * len(w):
            raise TraceError("unit values do not sum to 1")
        # float noise spread across units; renormalise exactly
        w = {u: q / total for u, q in w.items()}
    return measure(G, w)


def is_canonical(t: Trace) -> Verdict:
    """``τ`` vanishes on every non-unit arrow, i.e. ``τ = τ|_{C(G⁰)} ∘ E``."""
    G = t.groupoid
    for a, v in zip(G.arrows, t.values):
        if a not in G.unit_set and not close(v, QQi(0), t.tol):
            return Verdict(False, (a,), f"value {_fmt(v)} at non-unit arrow {a}")
    return Verdict(True)


def _require_invariant(G, mu):
    if not is_invariant(G, mu):
        raise MeasureError("measure is not invariant")


def tau_mu_trace(G: Groupoid, mu: Measure, tol: float = DEFAULT_TOL) -> Trace:
    """``τ_μ`` as a trace: ``μ`` on units, 0 elsewhere."""
    _require_invariant(G, mu)
    return trace(G, {u: mu[u] for u in G.units}, tol, label="tau_mu")


def tau_fix(G: Groupoid, mu: Measure, tol: float = DEFAULT_TOL) -> Trace:
    """Fixed point trace: ``μ(s(γ))`` on isotropy arrows, 0 elsewhere."""
    _require_invariant(G, mu)
    return trace(G, {a: mu[G.source[a]] for a in G.isotropy_arrows}, tol, label="tau_fix")


def tau_fix_via_decomposition(G: Groupoid, mu: Measure, f: AlgebraElement, parts: Sequence):
    """Fixed point trace of ``f`` from a decomposition ``f = Σ g_i``, ``supp g_i ⊆ B_i``.

    ``parts`` is a sequence of ``(g_i, B_i)``; each bisection contributes
    ``Σ_{x ∈ Fix(α_B)} g_i((s|_B)⁻¹(x)) μ(x)``.
    """
    _require_invariant(G, mu)
    total = None
    value = QQi(0)
    for n, (g, B) in enumerate(parts):
        B = tuple(B)
        if not is_bisection(G, B):
            raise TraceError(f"part {n} is not carried by a bisection")
        bset = set(B)
        outside = [a for a in g.support if a not in bset]
        if outside:
            raise TraceError(f"part {n} is not supported in its bisection (arrow {outside[0]})")
        total = g if total is None else total + g
        by_source = {G.source[b]: b for b in B}
        for x in fix_set(G, B):
            w = mu[x]
            if w:
                value = value + g[by_source[x]] * w
    if total is None:
        total = AlgebraElement(G, (QQi(0),) * len(G.arrows))
    if not (total == f if total.exact and f.exact else total.isclose(f)):
        raise TraceError("parts do not sum to f")
    return value


def random_bisection_decomposition(f: AlgebraElement, rng: random.Random, max_pieces: int = 3, pad: float = 0.3):
    """Random ``[(g_i, B_i)]`` with ``Σ g_i = f`` and each ``B_i`` a bisection.

    Coefficients are split into exact random pieces, pieces are grouped
    into random bisections, and bisections are padded with extra arrows
    on which their part vanishes.
    """
    G = f.groupoid
    support_ = list(f.support)
    rng.shuffle(support_)
    groups = []  # [arrows list, {arrow: coeff}]
    for a in support_:
        c = f[a]
        k = rng.randint(1, max_pieces)
        pieces = []
        rest = c
        for _ in range(k - 1):
            p = QQi(Fraction(rng.randint(-6, 6), rng.randint(1, 4)), Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
            pieces.append(p)
            rest = rest - p
        pieces.append(rest)
        for p in pieces:
            options = [grp for grp in groups if a not in grp[1] and is_bisection(G, grp[0] + [a])]
            if options and rng.random() < 0.75:
                grp = rng.choice(options)
            else:
                grp = [[], {}]
                groups.append(grp)
            grp[0].append(a)
            grp[1][a] = p
    parts = []
    for arrows, coeffs in groups:
        extra = [b for b in G.arrows if b not in arrows]
        rng.shuffle(extra)
        for b in extra:
            if rng.random() < pad and is_bisection(G, arrows + [b]):
                arrows.append(b)
        g = AlgebraElement(G, tuple(coeffs.get(b, QQi(0)) for b in G.arrows))
        parts.append((g, tuple(sorted(arrows, key=G.index.get))))
    rng.shuffle(parts)
    return parts


def trace_simplex(G: Groupoid, tol: float = DEFAULT_TOL, seed: int = 0) -> list:
    """Extreme tracial states, one per minimal central projection.

    ``τ_i(δ_γ) = Tr(p_i ρ(δ_γ)) / Tr(p_i)``.
    """
    R = faithful_realization(G)
    blocks = block_decomposition(R, tol=tol, seed=seed)
    out = []
    for i, (P, d) in enumerate(zip(blocks.projections, blocks.block_dims)):
        vals = np.einsum("ij,aji->a", P, R.images) / np.trace(P)
        vals = [complex(round(v.real, 15), round(v.imag, 15)) for v in vals]
        vals = [complex(0.0 if abs(v.real) < 1e-13 else v.real, 0.0 if abs(v.imag) < 1e-13 else v.imag) for v in vals]
        out.append(Trace(G, tuple(vals), tol, label=f"block{i}", block_dim=d))
    return out


def combine(traces: Sequence[Trace], coeffs: Sequence) -> Trace:
    """Convex combination ``Σ c_i τ_i``."""
    G = traces[0].groupoid
    vals = []
    for k in range(len(G.arrows)):
        v = QQi(0)
        for t, c in zip(traces, coeffs):
            if c:
                v = v + t.values[k] * c
        vals.append(v)
    return Trace(G, tuple(vals), traces[0].tol)


def simplex_coordinates(extremes: Sequence[Trace], t: Trace) -> np.ndarray:
    """Barycentric coordinates of ``t`` with respect to the extreme traces."""
    A = np.array([[complex(v) for v in e.values] for e in extremes]).T
    b = np.array([complex(v) for v in t.values])
    c, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.abs(A @ c - b).max() > max(t.tol, 1e-9) * 10:
        raise TraceError("trace is not in the span of the extreme traces")
    return c.real


@dataclass(frozen=True, eq=False)
class Fiber:
    """Tracial states whose associated measure is ``mu``.

    The fiber is ``{Σ c_i τ_i : c ≥ 0, Σ c_i = 1, Σ c_i μ_{τ_i} = μ}``.  The
    extreme traces' measures have disjoint supports (uniform on orbits), so
    the fiber is a product of simplices, one per orbit of positive mass.
    """

    groupoid: Groupoid
    mu: Measure
    extremes: tuple
    vertex_measures: tuple
    groups: tuple  # ((orbit mass, (extreme indices...)), ...)

    @property
    def constraints(self):
        """``(A, b)`` with ``A[unit][i] = μ_{τ_i}(unit)``, ``b[unit] = μ(unit)``; plus ``Σ c = 1``."""
        G = self.groupoid
        A = [[m[u] for m in self.vertex_measures] for u in G.units]
        A.append([Fraction(1)] * len(self.extremes))
        b = [self.mu[u] for u in G.units] + [Fraction(1)]
        return A, b

    def extreme_points(self):
        """Yield ``(coefficients, trace)`` for every vertex of the fiber."""
        active = [(mass, idx) for mass, idx in self.groups if mass > 0]
        for choice in itertools.product(*(idx for _, idx in active)):
            c = [Fraction(0)] * len(self.extremes)
            for (mass, _), i in zip(active, choice):
                c[i] = mass
            yield tuple(c), combine(self.extremes, c)

    def n_extreme_points(self) -> int:
        n = 1
        for mass, idx in self.groups:
            if mass > 0:
                n *= len(idx)
        return n

    def is_singleton(self) -> bool:
        return self.n_extreme_points() == 1

    def sample(self, rng: random.Random) -> Trace:
        c = [Fraction(0)] * len(self.extremes)
        for mass, idx in self.groups:
            if mass > 0:
                raw = [rng.randint(0, 8) for _ in idx]
                if not any(raw):
                    raw[0] = 1
                for i, r in zip(idx, raw):
                    c[i] = mass * Fraction(r, sum(raw))
        return combine(self.extremes, c)

    def contains(self, coeffs) -> bool:
        A, b = self.constraints
        if any(c < 0 for c in coeffs):
            return False
        return all(sum((a * c for a, c in zip(row, coeffs)), Fraction(0)) == bi for row, bi in zip(A, b))


def traces_with_measure(G: Groupoid, mu: Measure, tol: float = DEFAULT_TOL, seed: int = 0, extremes=None) -> Fiber:
    _require_invariant(G, mu)
    if extremes is None:
        extremes = trace_simplex(G, tol, seed)
    vms = [associated_measure(t) for t in extremes]
    groups = {}
    for i, m in enumerate(vms):
        groups.setdefault(m, []).append(i)
    seen = set()
    out = []
    for m, idx in groups.items():
        sup = set(support(m))
        if sup & seen:
            raise TraceError("extreme traces have overlapping, distinct measures")
        seen |= sup
        mass = mu.mass(sup)
        if any(mu[x] != mass * m[x] for x in sup):
            raise TraceError("measure is not a combination of extreme-trace measures")
        out.append((mass, tuple(idx)))
    if seen != set(G.units):
        raise TraceError("extreme traces do not cover the unit space")
    fib = Fiber(G, mu, tuple(extremes), tuple(vms), tuple(out))
    # τ_μ always lies in the fiber
    coords = simplex_coordinates(extremes, tau_mu_trace(G, mu, tol))
    assert coords.min() > -1e-7, "tau_mu is not in the trace simplex"
    return fib


@dataclass(frozen=True, eq=False)
class IsotropyState:
    """State ``τ_x`` on the group algebra of the isotropy group at ``base_unit``."""

    base_unit: str
    group: Groupoid
    values: Mapping

    def gram(self) -> np.ndarray:
        """``[τ_x(g⁻¹h)]`` over the isotropy group."""
        H = self.group
        return np.array(
            [[complex(self.values[H.compose[(H.inverse[g], h)]]) for h in H.arrows] for g in H.arrows],
            dtype=complex,
        )

    def check(self, tol: float = DEFAULT_TOL) -> Verdict:
        if not close(self.values[self.base_unit], QQi(1), tol):
            return Verdict(False, (self.base_unit,), "value at the unit is not 1")
        H = self.group
        for g in H.arrows:
            if not close(self.values[H.inverse[g]], self.values[g].conjugate(), tol):
                return Verdict(False, (g,), f"not conjugation symmetric at {g}")
        ev = np.linalg.eigvalsh(self.gram())
        if ev[0] < -tol:
            return Verdict(False, (float(ev[0]),), f"group Gram matrix has eigenvalue {ev[0]:.3g}")
        return Verdict(True)

    def is_trivial(self, tol: float = DEFAULT_TOL) -> bool:
        return all(close(v, QQi(1), tol) for v in self.values.values())


def isotropy_decomposition(t: Trace):
    """``(μ_τ, [τ_x for x in supp μ_τ])`` with ``τ_x(u_γ) = τ(δ_γ)/μ_τ(x)``."""
    G = t.groupoid
    mu = associated_measure(t)
    states = []
    for x in support(mu):
        H = isotropy_group(G, x)
        w = mu[x]
        vals = {}
        for g in H.arrows:
            v = t[g]
            vals[g] = v / QQi(w) if is_exact(v) else complex(v) / float(w)
        states.append(IsotropyState(x, H, vals))
    return mu, states


def reconstruct(G: Groupoid, mu: Measure, states, f: AlgebraElement):
    """``Σ_x μ(x) Σ_{γ ∈ G_x^x} f(γ) τ_x(u_γ)``."""
    total = QQi(0)
    for st in states:
        w = mu[st.base_unit]
        inner = QQi(0)
        for g, v in st.values.items():
            c = f[g]
            if c:
                inner = inner + c * v
        total = total + inner * QQi(w)
    return total


@dataclass(frozen=True, eq=False)
class TracialIdeal:
    """Basis of ``I_τ = {a : τ(a*a) = 0}`` in arrow coordinates."""

    groupoid: Groupoid
    basis: tuple
    exact: bool

    @property
    def dim(self) -> int:
        return len(self.basis)

    def elements(self) -> list:
        return [AlgebraElement(self.groupoid, tuple(v)) for v in self.basis]


def _left_mul(G, g_idx, v):
    # (δ_g ∗ v)(k) = v(g⁻¹∘k)
    out = []
    gi = G.inv[g_idx]
    for k in range(len(v)):
        j = G.comp_table.get((gi, k))
        out.append(v[j] if j is not None else 0 * v[k])
    return out


def _right_mul(G, g_idx, v):
    # (v ∗ δ_g)(k) = v(k∘g⁻¹)
    out = []
    gi = G.inv[g_idx]
    for k in range(len(v)):
        j = G.comp_table.get((k, gi))
        out.append(v[j] if j is not None else 0 * v[k])
    return out


def tracial_ideal(G: Groupoid, t: Trace, tol: float = None) -> TracialIdeal:
    """Null space of the Gram form ``(f, g) ↦ τ(g*∗f)``, verified to be a two-sided ideal."""
    tol = t.tol if tol is None else tol
    n = len(G.arrows)
    M = gram_matrix(t)
    if t.exact:
        basis = [tuple(v) for v in nullspace(M, n)]
        red, piv = rref(basis, n) if basis else ([], [])
        for v in basis:
            for g in range(n):
                for w in (_left_mul(G, g, v), _right_mul(G, g, v)):
                    if any(reduce_against(red, piv, w)):
                        raise TraceError(f"null space is not an ideal (arrow {G.arrows[g]})")
        return TracialIdeal(G, tuple(basis), True)
    Mn = _numeric(M)
    ev, vecs = np.linalg.eigh((Mn + Mn.conj().T) / 2)
    B = vecs[:, ev <= tol].T
    if B.shape[0]:
        Q = B.conj().T @ B
        for v in B:
            for g in range(n):
                for w in (_left_mul(G, g, list(v)), _right_mul(G, g, list(v))):
                    w = np.array(w, dtype=complex)
                    if np.linalg.norm(w - Q @ w) > max(tol, 1e-9) * 1e3:
                        raise TraceError(f"null space is not an ideal (arrow {G.arrows[g]})")
    return TracialIdeal(G, tuple(tuple(complex(x) for x in v) for v in B), False)


@dataclass
class ExactSequenceReport:
    ok: bool
    ideal_dim: int
    algebra_dim: int
    quotient_dim: int
    quotient_blocks: tuple
    mismatches: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_exact_sequence(G: Groupoid, mu: Measure, tol: float = DEFAULT_TOL, seed: int = 0) -> ExactSequenceReport:
    """Check ``0 → I_μ → C*(G) → C*(G_{supp μ}) → 0`` at the level of bases.

    (a) ``I_μ`` is spanned by ``δ_γ`` with ``s(γ) ∉ supp μ`` and every
    element satisfies ``E(a*a) = 0`` on ``supp μ``; (b) dimensions add up;
    (c) on the surviving arrows the quotient's structure constants are
    those of the restricted groupoid.
    """
    _require_invariant(G, mu)
    n = len(G.arrows)
    mismatches = []
    ideal = tracial_ideal(G, tau_mu_trace(G, mu, tol))
    sup = set(support(mu))
    killed = [a for a in G.arrows if G.source[a] not in sup]
    expected = [delta(G, a).coeffs for a in killed]
    if not span_equal(list(ideal.basis), expected, n):
        mismatches.append(("ideal", "tracial ideal differs from span of arrows over the complement of supp μ"))
    for a in ideal.elements():
        e = expectation(star(a) * a)
        bad = [x for x in sup if e[x]]
        if bad:
            mismatches.append(("ideal", f"E(a*a) nonzero at {bad[0]} for an ideal element"))
            break
    H = restrict(G, sup)
    if ideal.dim + len(H.arrows) != n:
        mismatches.append(("dimension", f"{ideal.dim} + {len(H.arrows)} != {n}"))
    survivors = H.arrows
    for a in survivors:
        if G.inverse[a] != H.inverse[a]:
            mismatches.append(("star", (a,)))
        for b in survivors:
            if G.compose.get((a, b)) != H.compose.get((a, b)):
                mismatches.append(("structure", (a, b, G.compose.get((a, b)))))
    blocks = block_decomposition(faithful_realization(H), tol=tol, seed=seed).block_dims
    return ExactSequenceReport(
        ok=not mismatches,
        ideal_dim=ideal.dim,
        algebra_dim=n,
        quotient_dim=len(H.arrows),
        quotient_blocks=tuple(blocks),
        mismatches=mismatches,
    )

"""Independent reference computations used by the tests.

Nothing here calls into the library's algebra, trace or measure code; the
only shared input is the groupoid's raw tables or the group action itself.
"""

from __future__ import annotations

import cmath
import itertools
from fractions import Fraction


def brute_convolve(G, f, g):
    """Σ over composable pairs (β, α) of f(β) g(α), credited to β∘α."""
    out = {a: 0 for a in G.arrows}
    for b, a in itertools.product(G.arrows, repeat=2):
        if G.source[b] == G.range[a]:
            out[G.compose[(b, a)]] += complex(f[b]) * complex(g[a])
    return out


def brute_rep(G, x, f):
    """λ_x(f) from its action on ℓ²(G_x): λ_x(f)δ_α = Σ_β f(β) δ_{βα}."""
    fibre = [a for a in G.arrows if G.source[a] == x]
    pos = {a: i for i, a in enumerate(fibre)}
    M = [[0j] * len(fibre) for _ in fibre]
    for a in fibre:
        for b in G.arrows:
            if G.source[b] == G.range[a]:
                M[pos[G.compose[(b, a)]]][pos[a]] += complex(f[b])
    return M


def action_orbits(a):
    seen, out = set(), []
    for x in a.space:
        if x in seen:
            continue
        orb = {a.act[(g, x)] for g in a.elements}
        seen |= orb
        out.append(orb)
    return out


def stabilizer(a, x):
    return [g for g in a.elements if a.act[(g, x)] == x]


def conjugacy_classes(elements, mul):
    els = list(elements)
    e = next(u for u in els if all(mul[(u, k)] == k for k in els))
    inv = {g: next(h for h in els if mul[(g, h)] == e) for g in els}
    classes, seen = [], set()
    for g in els:
        if g in seen:
            continue
        cls = {mul[(mul[(h, g)], inv[h])] for h in els}
        seen |= cls
        classes.append(cls)
    return classes


def _irrep_dims(elements, mul):
    """Irreducible degrees for the groups that occur in the tests (abelian or order 6)."""
    k = len(conjugacy_classes(elements, mul))
    n = len(elements)
    if k == n:
        return [1] * n
    if n == 6 and k == 3:
        return [1, 1, 2]
    raise NotImplementedError("oracle only knows abelian groups and S3")


def block_profile(a):
    """Matrix sizes of the simple summands of C*(X ⋊ Γ).

    One summand per (orbit, irreducible representation of the stabilizer),
    of size |orbit| × degree.
    """
    out = []
    for orb in action_orbits(a):
        x = min(orb, key=a.space.index)
        H = stabilizer(a, x)
        sub = {(g, h): a.mul[(g, h)] for g in H for h in H}
        out.extend(len(orb) * d for d in _irrep_dims(H, sub))
    return sorted(out)


def cyclic_characters(n):
    """Character table of Z/n on generator powers: rows χ_k(g^j) = ω^{jk}."""
    w = cmath.exp(2j * cmath.pi / n)
    return [[w ** (j * k) for j in range(n)] for k in range(n)]


def orbit_uniform_measures(a):
    """Uniform probability measures on each orbit of the action."""
    return [{x: (Fraction(1, len(orb)) if x in orb else Fraction(0)) for x in a.space} for orb in action_orbits(a)]

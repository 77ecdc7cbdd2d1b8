"""The convolution *-algebra of a finite groupoid.

Elements are dense coefficient vectors over the arrow basis ``δ_γ``.
Convolution, involution and the conditional expectation are carried out
in exact Gaussian-rational arithmetic; operator norms and the block
decomposition fall back to numpy.

Since every finite groupoid is amenable, all groupoid C*-norms coincide
and one algebra object stands for every completion.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from .groupoid import Groupoid
from .linalg import nullspace
from .scalars import QQi, close, is_exact

__all__ = [
    "AlgebraElement",
    "AlgebraError",
    "DegenerateSpectrumError",
    "delta",
    "element",
    "zero",
    "unit_element",
    "random_element",
    "random_unit_supported",
    "convolve",
    "star",
    "regular_representation",
    "mat_mul",
    "adjoint",
    "reduced_norm",
    "I_norm",
    "expectation",
    "coefficient_j",
    "center_basis",
    "MatrixRealization",
    "BlockDecomposition",
    "faithful_realization",
    "block_decomposition",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-9


class AlgebraError(ValueError):
    pass


class DegenerateSpectrumError(AlgebraError):
    pass


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A function on the arrows of ``groupoid`` (an element of ``C_c(G)``)."""

    groupoid: Groupoid
    coeffs: tuple

    def __getitem__(self, arrow):
        return self.coeffs[self.groupoid.index[arrow]]

    def as_dict(self, nonzero=True) -> dict:
        return {a: c for a, c in zip(self.groupoid.arrows, self.coeffs) if c or not nonzero}

    @property
    def support(self) -> tuple:
        return tuple(a for a, c in zip(self.groupoid.arrows, self.coeffs) if c)

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    def _same(self, other):
        if not isinstance(other, AlgebraElement):
            return False
        if other.groupoid is not self.groupoid and other.groupoid != self.groupoid:
            raise AlgebraError("elements live over different groupoids")
        return True

    def __add__(self, other):
        self._same(other)
        return AlgebraElement(self.groupoid, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._same(other)
        return AlgebraElement(self.groupoid, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return AlgebraElement(self.groupoid, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return convolve(self, other)
        return AlgebraElement(self.groupoid, tuple(a * other for a in self.coeffs))

    def __rmul__(self, scalar):
        return AlgebraElement(self.groupoid, tuple(scalar * a for a in self.coeffs))

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement) or not self._same(other):
            return NotImplemented
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def isclose(self, other, tol=DEFAULT_TOL) -> bool:
        self._same(other)
        return all(close(a, b, tol) for a, b in zip(self.coeffs, other.coeffs))

    def star(self):
        return star(self)

    def __repr__(self):
        terms = " + ".join(f"({c})δ[{a}]" for a, c in self.as_dict().items())
        return f"AlgebraElement({terms or '0'})"


def zero(G: Groupoid) -> AlgebraElement:
    return AlgebraElement(G, (QQi(0),) * len(G.arrows))


def delta(G: Groupoid, arrow, coeff=1) -> AlgebraElement:
    coeffs = [QQi(0)] * len(G.arrows)
    coeffs[G.index[arrow]] = coeff if not isinstance(coeff, int) else QQi(coeff)
    return AlgebraElement(G, tuple(coeffs))


def element(G: Groupoid, values: Mapping) -> AlgebraElement:
    """Element from a sparse mapping arrow -> scalar; missing arrows are 0."""
    unknown = set(values) - set(G.index)
    if unknown:
        raise AlgebraError(f"unknown arrow {sorted(unknown)[0]}")
    coeffs = []
    for a in G.arrows:
        c = values.get(a, 0)
        coeffs.append(QQi(c) if isinstance(c, int) else c)
    return AlgebraElement(G, tuple(coeffs))


def unit_element(G: Groupoid) -> AlgebraElement:
    """``Σ_x δ_x``, the identity of the algebra."""
    return element(G, {u: 1 for u in G.units})


def random_element(G: Groupoid, rng: random.Random, bound=3, density=1.0) -> AlgebraElement:
    """Random element with Gaussian-integer coefficients in ``[-bound, bound]``."""
    coeffs = []
    for _ in G.arrows:
        if rng.random() < density:
            coeffs.append(QQi(rng.randint(-bound, bound), rng.randint(-bound, bound)))
        else:
            coeffs.append(QQi(0))
    return AlgebraElement(G, tuple(coeffs))


def random_unit_supported(G: Groupoid, rng: random.Random, bound=3) -> AlgebraElement:
    return element(G, {u: QQi(rng.randint(-bound, bound), rng.randint(-bound, bound)) for u in G.units})


def convolve(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """``(f∗g)(γ) = Σ_{α ∈ G_{s(γ)}} f(γα⁻¹) g(α)``."""
    f._same(g)
    G = f.groupoid
    out = [QQi(0)] * len(G.arrows)
    fc, gc = f.coeffs, g.coeffs
    for i, j, k in G.composable:
        a = fc[i]
        if not a:
            continue
        b = gc[j]
        if b:
            out[k] = out[k] + a * b
    return AlgebraElement(G, tuple(out))


def star(f: AlgebraElement) -> AlgebraElement:
    """``f*(γ) = conj(f(γ⁻¹))``."""
    c = f.coeffs
    return AlgebraElement(f.groupoid, tuple(c[j].conjugate() for j in f.groupoid.inv))


def regular_representation(G: Groupoid, x, f: AlgebraElement, numeric=False):
    """Matrix of ``λ_x(f)`` on ``ℓ²(G_x)``: ``M[γ, α] = f(γα⁻¹)``.

    Rows and columns follow ``G.source_fibre[x]``.  Returns a list of rows
    of exact scalars, or a complex ndarray when ``numeric``.
    """
    if x not in G.unit_set:
        raise AlgebraError(f"{x} is not a unit")
    fibre = G.source_fibre[x]
    idx = G.index
    M = [[f.coeffs[idx[G.compose[(g, G.inverse[a])]]] for a in fibre] for g in fibre]
    if numeric:
        return np.array([[complex(v) for v in row] for row in M], dtype=complex)
    return M


def mat_mul(A, B):
    n, m = len(A), len(B[0]) if B else 0
    cols = list(zip(*B))
    out = []
    for i in range(n):
        row = A[i]
        out.append([sum((a * b for a, b in zip(row, cols[j]) if a and b), QQi(0)) for j in range(m)])
    return out


def adjoint(A):
    return [[A[j][i].conjugate() for j in range(len(A))] for i in range(len(A[0]))] if A else []


def _op_norm(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    ev = np.linalg.eigvalsh(M.conj().T @ M)
    return math.sqrt(max(float(ev[-1]), 0.0))


def reduced_norm(f: AlgebraElement) -> float:
    """``‖f‖_r = max_x ‖λ_x(f)‖`` via the largest eigenvalue of ``λ_x(f)†λ_x(f)``."""
    G = f.groupoid
    return max(_op_norm(regular_representation(G, x, f, numeric=True)) for x in G.units)


def I_norm(f: AlgebraElement) -> float:
    """max of the sup over units of the ℓ¹ norms of ``f`` and ``f*`` on source fibres."""
    G = f.groupoid
    fs = star(f)
    best = 0.0
    for x in G.units:
        fibre = [G.index[a] for a in G.source_fibre[x]]
        best = max(best, sum(abs(complex(f.coeffs[i])) for i in fibre), sum(abs(complex(fs.coeffs[i])) for i in fibre))
    return best


def expectation(f: AlgebraElement) -> AlgebraElement:
    """Restriction of ``f`` to the unit space."""
    G = f.groupoid
    return AlgebraElement(G, tuple(c if a in G.unit_set else QQi(0) for a, c in zip(G.arrows, f.coeffs)))


def coefficient_j(f: AlgebraElement, arrow):
    """``j(f)(γ)``; on finitely supported elements this is just ``f(γ)``."""
    return f[arrow]


def center_basis(G: Groupoid) -> list:
    """Exact basis (coefficient vectors) of the center of ``C_c(G)``.

    Solves ``z∗δ_b = δ_b∗z`` for every arrow ``b``.
    """
    n = len(G.arrows)
    table = G.comp_table
    rows = set()
    for b in range(n):
        for k in range(n):
            row = {}
            # (z∗δ_b)(k) picks z(k∘b⁻¹); (δ_b∗z)(k) picks z(b⁻¹∘k)
            i = table.get((k, G.inv[b]))
            j = table.get((G.inv[b], k))
            if i is not None and table.get((i, b)) == k:
                row[i] = row.get(i, 0) + 1
            if j is not None and table.get((b, j)) == k:
                row[j] = row.get(j, 0) - 1
            row = tuple(sorted((c, v) for c, v in row.items() if v))
            if row:
                rows.add(row)
    dense = []
    for row in sorted(rows):
        r = [0] * n
        for c, v in row:
            r[c] = v
        dense.append(r)
    return nullspace(dense, n)


@dataclass(frozen=True, eq=False)
class MatrixRealization:
    """``ρ = ⊕_x λ_x`` on ``⊕_x ℓ²(G_x)``.

    ``basis[p] = (x, γ)`` labels row/column ``p``; ``images[a]`` is
    ``ρ(δ_{arrows[a]})``.
    """

    groupoid: Groupoid
    basis: tuple
    offsets: Mapping

    @cached_property
    def images(self) -> np.ndarray:
        G = self.groupoid
        N = len(self.basis)
        pos = {b: p for p, b in enumerate(self.basis)}
        out = np.zeros((len(G.arrows), N, N), dtype=complex)
        for a_i, a in enumerate(G.arrows):
            for p, (x, al) in enumerate(self.basis):
                g = G.compose.get((a, al))
                if g is not None:
                    out[a_i, pos[(x, g)], p] = 1.0
        return out

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __call__(self, f: AlgebraElement) -> np.ndarray:
        c = np.array([complex(v) for v in f.coeffs])
        return np.tensordot(c, self.images, axes=1)

    def unit_block(self, x) -> slice:
        start = self.offsets[x]
        return slice(start, start + len(self.groupoid.source_fibre[x]))


def faithful_realization(G: Groupoid) -> MatrixRealization:
    basis, offsets = [], {}
    for x in G.units:
        offsets[x] = len(basis)
        basis.extend((x, g) for g in G.source_fibre[x])
    return MatrixRealization(G, tuple(basis), offsets)


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Minimal central projections of ``ρ(C_c(G))`` and their block sizes."""

    realization: MatrixRealization
    projections: tuple
    block_dims: tuple
    tol: float
    seed: int
    attempts: int
    center_dim: int
    supports: tuple = field(default=())

    def __len__(self):
        return len(self.projections)


def _cluster(values, tol):
    clusters = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] > tol:
            clusters.append([i])
        else:
            clusters[-1].append(i)
    return clusters


def _verify_blocks(R: MatrixRealization, projs, tol):
    N = R.dim
    eye = np.eye(N)
    total = np.zeros((N, N), dtype=complex)
    for i, P in enumerate(projs):
        if np.abs(P - P.conj().T).max() > tol:
            raise AlgebraError(f"projection {i} is not self-adjoint")
        if np.abs(P @ P - P).max() > tol:
            raise AlgebraError(f"projection {i} is not idempotent")
        for j in range(i):
            if np.abs(P @ projs[j]).max() > tol:
                raise AlgebraError(f"projections {j} and {i} are not orthogonal")
        comm = np.einsum("ij,ajk->aik", P, R.images) - np.einsum("aij,jk->aik", R.images, P)
        if comm.size and np.abs(comm).max() > tol:
            raise AlgebraError(f"projection {i} is not central")
        total += P
    if np.abs(total - eye).max() > tol:
        raise AlgebraError("projections do not sum to the identity")


def block_decomposition(R: MatrixRealization, tol: float = DEFAULT_TOL, seed: int = 0, max_retries: int = 32) -> BlockDecomposition:
    """Wedderburn decomposition of ``ρ(C_c(G))`` by spectral splitting.

    A random self-adjoint central element is diagonalised; its
    eigenprojections are the minimal central projections once the number
    of eigenvalue clusters equals the dimension of the center.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    G = R.groupoid
    centre = center_basis(G)
    k = len(centre)
    C = np.array([[complex(v) for v in vec] for vec in centre])
    central_images = np.tensordot(C, R.images, axes=1)
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_retries + 1):
        coeffs = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        z = np.tensordot(coeffs, central_images, axes=1)
        h = z + z.conj().T
        evals, evecs = np.linalg.eigh(h)
        clusters = _cluster(evals, tol)
        if len(clusters) != k:
            continue
        # reject near-collisions: clusters must be well separated relative to tol
        gaps = [evals[c[0]] - evals[p[-1]] for p, c in zip(clusters, clusters[1:])]
        if gaps and min(gaps) < 1e3 * tol:
            continue
        projs = []
        for c in clusters:
            V = evecs[:, c]
            projs.append(V @ V.conj().T)
        break
    else:
        raise DegenerateSpectrumError(f"degenerate spectrum after {max_retries} retries (tol={tol:g} too large?)")

    _verify_blocks(R, projs, max(tol, 1e-9) * max(1, R.dim))

    dims, supports, keys = [], [], []
    for P in projs:
        stack = np.einsum("ij,ajk->aik", P, R.images).reshape(len(G.arrows), -1)
        r = np.linalg.matrix_rank(stack, tol=1e-7)
        d = math.isqrt(r)
        if d * d != r:
            raise AlgebraError(f"block of rank {r} is not a full matrix algebra")
        dims.append(d)
        diag = np.real(np.diag(P))
        sup = tuple(x for x in G.units if diag[R.unit_block(x)].sum() > 0.5)
        supports.append(sup)
        tr = np.einsum("ij,aji->a", P, R.images) / np.trace(P)
        keys.append(
            (
                G.unit_index[sup[0]] if sup else -1,
                d,
                tuple(np.round(-tr.real, 6)),
                tuple(np.round(-tr.imag, 6)),
            )
        )
    if sum(d * d for d in dims) != len(G.arrows):
        raise AlgebraError("block dimensions do not account for the whole algebra")
    order = sorted(range(len(projs)), key=lambda i: keys[i])
    return BlockDecomposition(
        realization=R,
        projections=tuple(projs[i] for i in order),
        block_dims=tuple(dims[i] for i in order),
        tol=tol,
        seed=seed,
        attempts=attempt,
        center_dim=k,
        supports=tuple(supports[i] for i in order),
    )

"""Exact row reduction over Q(i).

Matrices are lists of rows; entries are anything :class:`~gtl.scalars.QQi`
accepts.  Dimensions here never exceed a few hundred rows, so plain
Gauss-Jordan elimination is fast enough and keeps every answer exact.
"""

from __future__ import annotations

from .scalars import QQi, as_exact

__all__ = ["rref", "rank", "nullspace", "span_equal", "in_span", "reduce_against"]


def rref(rows, ncols=None):
    """Reduced row echelon form.

    Returns ``(reduced_rows, pivot_columns)``; zero rows are dropped.
    """
    m = [[as_exact(x) for x in row] for row in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = QQi(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                factor = m[i][c]
                row_r = m[r]
                m[i] = [a - factor * b for a, b in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows, ncols=None) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols):
    """Basis of ``{v : A v = 0}`` as a list of exact vectors."""
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [QQi(0)] * ncols
        v[f] = QQi(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def in_span(vector, basis, ncols) -> bool:
    return rank(list(basis) + [vector], ncols) == rank(basis, ncols)


def span_equal(a, b, ncols) -> bool:
    """True iff the two lists of vectors span the same subspace."""
    ra, _ = rref(a, ncols) if a else ([], [])
    rb, _ = rref(b, ncols) if b else ([], [])
    return ra == rb


def reduce_against(reduced, pivots, vector):
    """Remainder of ``vector`` after elimination by an RREF basis; zero iff in span."""
    v = [as_exact(x) for x in vector]
    for row, p in zip(reduced, pivots):
        c = v[p]
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    return v

import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import block_profile, brute_convolve, brute_rep

from gtl.algebra import (
    AlgebraError,
    I_norm,
    adjoint,
    block_decomposition,
    coefficient_j,
    delta,
    element,
    expectation,
    faithful_realization,
    mat_mul,
    random_element,
    random_unit_supported,
    reduced_norm,
    regular_representation,
    star,
    unit_element,
    zero,
)
from gtl.catalog import CORE_CATALOG, get
from gtl.groupoid import pair_groupoid, unit_groupoid
from gtl.scalars import QQi

GROUPOIDS = {name: get(name)[0] for name in CORE_CATALOG + ("s3-trivial-2", "z2-swap")}


def test_unit_idempotent():
    G = unit_groupoid(2)
    assert delta(G, "u1") * delta(G, "u1") == delta(G, "u1")
    assert delta(G, "u1") * delta(G, "u2") == zero(G)


def test_pair_convolution():
    P = pair_groupoid(2)
    assert delta(P, "(1,2)") * delta(P, "(2,1)") == delta(P, "1")
    assert delta(P, "(2,1)") * delta(P, "(2,1)") == zero(P)


def test_z2_on_point_square():
    G = GROUPOIDS["z2-on-point"]
    f = element(G, {"pt": 1, "(pt,s)": 1})
    assert f * f == element(G, {"pt": 2, "(pt,s)": 2})


def test_star_examples():
    P = pair_groupoid(2)
    for g in P.arrows:
        assert star(delta(P, g)) == delta(P, P.inverse[g])
    h = element(P, {"1": 3, "2": -1})
    assert star(h) == h
    assert star(delta(P, "(1,2)", QQi(0, 1))) == delta(P, "(2,1)", QQi(0, -1))


@pytest.mark.parametrize("name", sorted(GROUPOIDS))
def test_convolution_matches_brute_force(name):
    G = GROUPOIDS[name]
    rng = random.Random(name)
    for _ in range(10):
        f, g = random_element(G, rng), random_element(G, rng)
        ref = brute_convolve(G, f, g)
        h = f * g
        assert all(complex(h[a]) == ref[a] for a in G.arrows)


@pytest.mark.parametrize("name", sorted(GROUPOIDS))
def test_unit_element(name):
    G = GROUPOIDS[name]
    one = unit_element(G)
    rng = random.Random(1)
    assert star(one) == one
    for _ in range(100):
        f = random_element(G, rng, density=0.5)
        assert one * f == f == f * one


def test_unit_of_pair_groupoid():
    P = pair_groupoid(2)
    assert unit_element(P) == delta(P, "1") + delta(P, "2")


def test_regular_representation_examples():
    U = unit_groupoid(1)
    assert regular_representation(U, "u1", delta(U, "u1")) == [[1]]
    G = GROUPOIDS["z2-on-point"]
    M = regular_representation(G, "pt", element(G, {"pt": 1, "(pt,s)": 1}))
    assert M == [[1, 1], [1, 1]]
    P = pair_groupoid(2)
    f = delta(P, "(1,2)")
    M = regular_representation(P, "1", f)
    assert np.allclose(np.array(M, dtype=complex), brute_rep(P, "1", f))
    # fibre over 1 is (1, (2,1)); δ_(1,2) sends δ_(2,1) to δ_1
    assert M == [[0, 1], [0, 0]]


@pytest.mark.parametrize("name", sorted(GROUPOIDS))
def test_regular_representation_oracle(name):
    G = GROUPOIDS[name]
    rng = random.Random(name)
    f = random_element(G, rng)
    for x in G.units:
        assert np.allclose(regular_representation(G, x, f, numeric=True), brute_rep(G, x, f))


def test_norm_examples():
    G = GROUPOIDS["z2-on-point"]
    f = element(G, {"pt": 1, "(pt,s)": 1})
    assert reduced_norm(f) == pytest.approx(2) and I_norm(f) == pytest.approx(2)
    for name, H in GROUPOIDS.items():
        for g in H.arrows:
            assert reduced_norm(delta(H, g)) == pytest.approx(1)
            assert I_norm(delta(H, g)) == pytest.approx(1)
        assert reduced_norm(zero(H)) == 0 == I_norm(zero(H))


@pytest.mark.parametrize("name", sorted(GROUPOIDS))
def test_reduced_norm_bounded_by_I_norm(name):
    G = GROUPOIDS[name]
    rng = random.Random(7)
    for _ in range(20):
        f = random_element(G, rng)
        assert reduced_norm(f) <= I_norm(f) + 1e-9


def test_expectation_examples():
    G = GROUPOIDS["z2-on-point"]
    assert expectation(delta(G, "(pt,s)")) == zero(G)
    assert expectation(delta(G, "pt")) == delta(G, "pt")
    f = element(G, {"pt": QQi(2, 1), "(pt,s)": QQi(-1, 3)})
    assert expectation(star(f) * f)["pt"] == 5 + 10


@pytest.mark.parametrize("name", sorted(GROUPOIDS))
def test_coefficient_map_identity(name):
    G = GROUPOIDS[name]
    rng = random.Random(name)
    for _ in range(3):
        f = random_element(G, rng)
        g, h = random_unit_supported(G, rng), random_unit_supported(G, rng)
        lhs = g * f * h
        for a in G.arrows:
            assert coefficient_j(lhs, a) == g[G.range[a]] * coefficient_j(f, a) * h[G.source[a]]
    f = random_element(G, rng)
    for u in G.units:
        assert coefficient_j(expectation(f), u) == coefficient_j(f, u)
    for a in G.arrows:
        for b in G.arrows:
            assert coefficient_j(delta(G, a), b) == (1 if a == b else 0)


@pytest.mark.parametrize(
    "name", ["units3", "pair2", "pair3", "z2-on-point", "z3-on-point", "z2-3pt", "d3-3pt", "s3-trivial-2", "z2-swap"]
)
def test_block_profile_matches_character_theory(name):
    G, a = get(name)
    B = block_decomposition(faithful_realization(G))
    if a is not None:
        assert sorted(B.block_dims) == block_profile(a)
    assert sum(d * d for d in B.block_dims) == len(G.arrows)


def test_block_examples():
    assert block_decomposition(faithful_realization(unit_groupoid(4))).block_dims == (1, 1, 1, 1)
    R = faithful_realization(pair_groupoid(2))
    assert R.dim == 4 and block_decomposition(R).block_dims == (2,)
    R = faithful_realization(GROUPOIDS["z2-3pt"])
    B = block_decomposition(R)
    assert sorted(B.block_dims) == [1, 1, 2]
    for P in B.projections:
        assert np.allclose(P @ P, P, atol=1e-9) and np.allclose(P, P.conj().T, atol=1e-9)
    assert np.allclose(sum(B.projections), np.eye(R.dim), atol=1e-9)


def test_realization_is_faithful_homomorphism():
    G = GROUPOIDS["d3-3pt"]
    R = faithful_realization(G)
    rng = random.Random(3)
    f, g = random_element(G, rng), random_element(G, rng)
    assert np.allclose(R(f * g), R(f) @ R(g))
    assert np.allclose(R(star(f)), R(f).conj().T)


def test_mixed_groupoids_rejected():
    with pytest.raises(AlgebraError):
        delta(pair_groupoid(2), "1") + delta(unit_groupoid(2), "u1")
    with pytest.raises(AlgebraError):
        element(pair_groupoid(2), {"nope": 1})


gauss = st.builds(QQi, st.integers(-4, 4), st.integers(-4, 4))


def elements_of(G):
    return st.lists(gauss, min_size=len(G.arrows), max_size=len(G.arrows)).map(
        lambda cs: element(G, dict(zip(G.arrows, cs)))
    )


@st.composite
def triples(draw):
    G = GROUPOIDS[draw(st.sampled_from(sorted(GROUPOIDS)))]
    return draw(elements_of(G)), draw(elements_of(G)), draw(elements_of(G))


@given(triples())
def test_algebra_laws_property(t):
    f, g, h = t
    assert (f * g) * h == f * (g * h)
    assert star(f * g) == star(g) * star(f)
    assert star(star(f)) == f
    assert f * (g + h) == f * g + f * h


@given(triples())
def test_regular_representation_is_star_hom(t):
    f, g, _ = t
    G = f.groupoid
    for x in G.units:
        A = regular_representation(G, x, f)
        B = regular_representation(G, x, g)
        assert regular_representation(G, x, f * g) == mat_mul(A, B)
        assert regular_representation(G, x, star(f)) == adjoint(A)


@given(triples())
def test_c_star_identity(t):
    f = t[0]
    n = reduced_norm(f)
    assert reduced_norm(star(f) * f) == pytest.approx(n * n, abs=1e-9 * max(1, n * n))

import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import orbit_uniform_measures

from gtl.algebra import delta, random_element, star, unit_element
from gtl.catalog import CORE_CATALOG, get
from gtl.groupoid import pair_groupoid, unit_groupoid
from gtl.measures import (
    Measure,
    MeasureError,
    invariant_vertices,
    is_essentially_free,
    is_invariant,
    measure,
    orbit_masses,
    parse_measure_spec,
    random_invariant_measure,
    support,
    tau_mu,
)
from gtl.traces import tau_fix, tau_mu_trace

Z23 = get("z2-3pt")[0]


def test_measure_validation():
    with pytest.raises(MeasureError):
        Measure({"a": F(1, 2)})
    with pytest.raises(MeasureError):
        Measure({"a": F(3, 2), "b": F(-1, 2)})
    with pytest.raises(MeasureError):
        measure(Z23, {"7": 1})


def test_parse_spec():
    mu = parse_measure_spec(Z23, "1=1/2,2=1/2,3=0")
    assert mu["1"] == F(1, 2) and mu["3"] == 0
    assert parse_measure_spec(Z23, "3=1") == measure(Z23, {"3": 1})
    for bad in ("1=1/2,2=x", "1", "1=1/3"):
        with pytest.raises(MeasureError):
            parse_measure_spec(Z23, bad)


def test_invariance_examples():
    U = unit_groupoid(3)
    assert is_invariant(U, measure(U, {"u1": F(1, 5), "u3": F(4, 5)}))
    P = pair_groupoid(2)
    assert is_invariant(P, measure(P, {"1": F(1, 2), "2": F(1, 2)}))
    assert not is_invariant(P, measure(P, {"1": F(1, 3), "2": F(2, 3)}))
    for k in range(5):
        a = F(k, 8)
        assert is_invariant(Z23, measure(Z23, {"1": a, "2": a, "3": 1 - 2 * a}))
    assert not is_invariant(Z23, measure(Z23, {"1": F(1, 4), "2": F(1, 2), "3": F(1, 4)}))


def test_vertex_examples():
    assert invariant_vertices(unit_groupoid(3)) == [measure(unit_groupoid(3), {u: 1}) for u in ("u1", "u2", "u3")]
    P = pair_groupoid(2)
    assert invariant_vertices(P) == [measure(P, {"1": F(1, 2), "2": F(1, 2)})]
    assert invariant_vertices(Z23) == [
        measure(Z23, {"1": F(1, 2), "2": F(1, 2)}),
        measure(Z23, {"3": 1}),
    ]


@pytest.mark.parametrize("name", ["z2-3pt", "d3-3pt", "z2-trivial-2", "s3-trivial-2"])
def test_vertices_match_action_oracle(name):
    G, a = get(name)
    got = {tuple(sorted(m.weights.items())) for m in invariant_vertices(G)}
    want = {tuple(sorted(w.items())) for w in orbit_uniform_measures(a)}
    assert got == want


@pytest.mark.parametrize("name", CORE_CATALOG)
def test_random_measures_decompose_over_vertices(name):
    G = get(name)[0]
    rng = random.Random(name)
    verts = invariant_vertices(G)
    for _ in range(50):
        mu = random_invariant_measure(G, rng)
        assert is_invariant(G, mu)
        c = orbit_masses(G, mu)
        assert all(x >= 0 for x in c) and sum(c) == 1
        for u in G.units:
            assert sum((ci * v[u] for ci, v in zip(c, verts)), F(0)) == mu[u]


def test_vertices_are_extreme():
    # a vertex is extreme iff it is the only invariant measure with its support
    for name in CORE_CATALOG:
        G = get(name)[0]
        for v in invariant_vertices(G):
            sup = set(support(v))
            others = [w for w in invariant_vertices(G) if w != v]
            assert all(not (set(support(w)) <= sup) for w in others)


def test_tau_mu_examples():
    mu = measure(Z23, {"1": F(1, 2), "2": F(1, 2)})
    assert tau_mu(Z23, mu, unit_element(Z23)) == 1
    assert tau_mu(Z23, mu, delta(Z23, "(1,s)")) == 0
    assert tau_mu(Z23, mu, delta(Z23, "3")) == 0
    with pytest.raises(MeasureError):
        tau_mu(Z23, measure(Z23, {"1": 1}), unit_element(Z23))


def test_freeness_examples():
    P = pair_groupoid(2)
    assert is_essentially_free(P, invariant_vertices(P)[0])
    G = get("z2-on-point")[0]
    v = is_essentially_free(G, measure(G, {"pt": 1}))
    assert not v and v.witness == ("(pt,s)",)
    assert is_essentially_free(Z23, measure(Z23, {"1": F(1, 2), "2": F(1, 2)}))
    v = is_essentially_free(Z23, measure(Z23, {"3": 1}))
    assert not v and v.witness == ("(3,s)",)


def test_support_examples():
    assert support(measure(Z23, {"1": F(1, 2), "2": F(1, 2)})) == ("1", "2")
    assert support(measure(Z23, {"3": 1})) == ("3",)
    full = measure(Z23, {"1": F(1, 4), "2": F(1, 4), "3": F(1, 2)})
    assert support(full) == Z23.units


@pytest.mark.parametrize("name", CORE_CATALOG + ("z2-swap", "s3-trivial-2"))
def test_freeness_iff_tau_fix_equals_tau_mu(name):
    G, a = get(name)
    rng = random.Random(name)
    mus = invariant_vertices(G) + [random_invariant_measure(G, rng) for _ in range(50)]
    for mu in mus:
        free = bool(is_essentially_free(G, mu))
        assert free == (tau_fix(G, mu).values == tau_mu_trace(G, mu).values)
        if a is not None:
            # group-action form: μ(Fix(g)) = 0 for every g ≠ e
            by_action = all(
                sum((mu[x] for x in a.space if a.act[(g, x)] == x), F(0)) == 0 for g in a.elements if g != a.identity
            )
            assert free == by_action


@given(st.sampled_from(CORE_CATALOG), st.integers(0, 10**6))
def test_tau_mu_is_positive_and_normalized(name, seed):
    G = get(name)[0]
    rng = random.Random(seed)
    mu = random_invariant_measure(G, rng)
    assert tau_mu(G, mu, unit_element(G)) == 1
    f = random_element(G, rng)
    v = tau_mu(G, mu, star(f) * f)
    assert v.im == 0 and v.re >= 0

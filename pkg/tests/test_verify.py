import importlib
import json
import random

import pytest

from gtl import catalog
from gtl.traces import trace
from gtl.verify import SUITE, random_instance, search, verify

vmod = importlib.import_module("gtl.verify")


@pytest.mark.parametrize("name", catalog.names())
def test_catalog_passes(name):
    G, a = catalog.get(name)
    r = verify(G, a, samples=5, random_measures=10, decompositions=3)
    assert r.ok, r.to_text()
    assert [c.name for c in r.checks] == list(SUITE)


def test_pair2_report():
    r = verify(*catalog.get("pair2"))
    assert r.ok
    assert "1 essentially free" in r.check("main-theorem").detail
    assert r.check("affine-bijection").status == "pass"
    assert r.check("group-action-fix").status == "skip"


def test_z2_on_point_report():
    r = verify(*catalog.get("z2-on-point"))
    assert r.ok
    assert r.check("trivial-action-corollary").status == "pass"
    assert ", 0 essentially free" in r.check("main-theorem").detail


def test_z2_3pt_report():
    r = verify(*catalog.get("z2-3pt"))
    assert r.ok
    assert r.check("block-decomposition").detail == "blocks M2+M1+M1"


def test_report_is_deterministic_and_serializable():
    G, a = catalog.get("d3-3pt")
    r1, r2 = verify(G, a, seed=5), verify(G, a, seed=5)
    assert r1.to_json() == r2.to_json() and r1.to_text() == r2.to_text()
    d = json.loads(r1.to_json(timings=True))
    assert d["seed"] == 5 and all("runtime_ms" in c for c in d["checks"])
    assert "runtime_ms" not in r1.to_json()


def test_injected_bug_is_reported(monkeypatch):
    # a τ^Fix that forgets the isotropy must break the freeness criterion
    def broken(G, mu, tol=1e-9):
        return trace(G, {u: mu[u] for u in G.units}, tol)

    monkeypatch.setattr(vmod, "tau_fix", broken)
    G, a = catalog.get("z2-3pt")
    r = verify(G, a, samples=2, random_measures=3, decompositions=1)
    assert not r.ok
    assert r.check("freeness-criterion").status == "fail"
    assert "FAIL freeness-criterion" in r.to_text()


def test_unexpected_exception_is_a_failure(monkeypatch):
    def boom(*args, **kwargs):
        raise RuntimeError("kaput")

    monkeypatch.setattr(vmod, "check_exact_sequence", boom)
    r = verify(*catalog.get("pair2"), samples=1, random_measures=1, decompositions=1)
    c = r.check("exact-sequence")
    assert c.status == "fail" and "kaput" in c.detail


def test_search_small():
    reports = list(search(1, 10, 24))
    assert len(reports) == 10 and all(r.ok for r in reports)
    again = [r.to_json() for r in search(1, 10, 24)]
    assert [r.to_json() for r in reports] == again


def test_search_parallel_order_matches_serial():
    serial = [r.to_json() for r in search(3, 4, 12)]
    parallel = [r.to_json() for r in search(3, 4, 12, jobs=2)]
    assert serial == parallel


@pytest.mark.parametrize("args", [(1, 1, 25), (1, 1, 0), (1, 0, 10)])
def test_search_argument_errors(args):
    with pytest.raises(ValueError):
        next(search(*args))


def test_random_instances_respect_size():
    rng = random.Random(0)
    for k in (1, 4, 12, 24):
        for _ in range(20):
            G, a, desc = random_instance(rng, k)
            assert 1 <= len(G.arrows) <= k and G.units

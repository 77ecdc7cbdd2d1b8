import pytest

from gtl import catalog
from gtl.groupoid import validate_groupoid


@pytest.mark.parametrize("name", catalog.names())
def test_entries_valid(name):
    G, a = catalog.get(name)
    assert validate_groupoid(G) is G and G.name == name
    if catalog.CATALOG[name].construction == "action-file":
        assert a is not None


def test_families():
    assert len(catalog.get("pair(4)")[0].arrows) == 16
    assert catalog.get("units(5)")[0].units == ("u1", "u2", "u3", "u4", "u5")
    G, a = catalog.get("cyclic(4)")
    assert len(G.arrows) == 4 and len(G.units) == 1
    G, a = catalog.get("dihedral(4)")
    assert len(a.elements) == 8 and len(G.arrows) == 32
    assert catalog.get("z2-3pt.json")[0] == catalog.get("z2-3pt")[0]


@pytest.mark.parametrize("bad", ["nope", "pair(0)", "dihedral(2)", "pair(x)"])
def test_unknown(bad):
    with pytest.raises(KeyError):
        catalog.get(bad)


def test_group_size_cap():
    with pytest.raises(ValueError):
        catalog.perm_group_action([(1, 0, 2, 3), (1, 2, 3, 0)], 4, max_order=10)


def test_cycle_names():
    assert catalog.cycle_name((0, 1, 2)) == "e"
    assert catalog.cycle_name((1, 2, 0)) == "(1 2 3)"
    assert catalog.cycle_name((1, 0, 3, 2)) == "(1 2)(3 4)"

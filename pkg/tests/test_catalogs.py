import pytest

from treegroups import tree_core
from treegroups.catalogs import (
    GroupCase,
    case_catalog,
    dihedral_vw,
    infinite_chain,
    odometer_zk,
    periodic_generators,
    periodic_normalizer,
    prep_w0,
    prep_w_chain,
    preperiodic_generators,
)
from treegroups.conjugacy import is_odometer_to_level
from treegroups.errors import SystemDefinitionError
from treegroups.level_groups import contains, model_group
from treegroups.tree_core import compose, conjugate, identity, power


def test_group_case_parse():
    assert GroupCase.parse("periodic:3") == GroupCase.periodic(3)
    assert GroupCase.parse(" prep: 2 , 3 ") == GroupCase.prep(2, 3)
    assert str(GroupCase.prep(1, 2)) == "prep:1,2"
    assert GroupCase.periodic(2).is_periodic
    assert not GroupCase.prep(1, 3).is_periodic


@pytest.mark.parametrize("text", ["periodic:2,3", "prep:3", "prep:3,3", "periodic:0", "cyclic:2", ""])
def test_group_case_parse_rejects(text):
    with pytest.raises(SystemDefinitionError):
        GroupCase.parse(text)


def test_periodic_generators_recursion():
    catalog = periodic_generators(3)
    n = 5
    a1, a2, a3 = catalog.generator_portraits(n)
    low = catalog.generator_portraits(n - 1)
    one = identity(n - 1)
    assert a1 == tree_core.pair(low[2], one, 1)
    assert a2 == tree_core.pair(low[0], one, 0)
    assert a3 == tree_core.pair(low[1], one, 0)


@pytest.mark.parametrize("s, r", [(1, 2), (1, 3), (2, 3), (2, 4)])
def test_preperiodic_generators_are_involutions(s, r):
    for g in preperiodic_generators(s, r).generator_portraits(12):
        assert tree_core.is_identity(compose(g, g))


@pytest.mark.parametrize("case", [GroupCase.periodic(1), GroupCase.periodic(2), GroupCase.periodic(3),
                                  GroupCase.prep(1, 2), GroupCase.prep(1, 3), GroupCase.prep(2, 3)],
                         ids=str)
def test_a0_is_an_odometer(case):
    assert is_odometer_to_level(case_catalog(case).evaluate('a0', 8))


def test_catalog_word_lookup():
    catalog = periodic_generators(2)
    assert catalog.word('a0') == (('a1', 1), ('a2', 1))
    assert catalog.word('a1') == (('a1', 1),)
    with pytest.raises(SystemDefinitionError):
        catalog.word('b1')
    with pytest.raises(SystemDefinitionError):
        catalog.word('a1 b1')


def test_catalog_words_over_symbols_and_names():
    catalog = periodic_generators(2)
    assert catalog.word('a1 a2^-1') == (('a1', 1), ('a2', -1))
    assert catalog.word('a0^-1 a1') == (('a2', -1), ('a1', -1), ('a1', 1))
    assert catalog.word('a0^2') == (('a1', 1), ('a2', 1)) * 2
    a1, a2 = catalog.generator_portraits(4)
    assert catalog.evaluate('a1 a2', 4) == compose(a1, a2)
    assert catalog.evaluate('a0 a2^-1', 4) == a1
    assert tree_core.is_identity(catalog.evaluate('1', 4))


@pytest.mark.parametrize("k", [3, 5, 11, -1])
def test_odometer_normalizer_relation(k):
    catalog = odometer_zk(k)
    n = 10
    z = catalog.evaluate('z', n)
    a = catalog.evaluate('a', n)
    assert conjugate(z, a) == power(a, k)
    assert tree_core.is_identity(catalog.evaluate('t', n))


def test_odometer_zk_needs_odd_k():
    with pytest.raises(SystemDefinitionError):
        odometer_zk(4)


def test_periodic_normalizer_relations():
    ks = (3, 5, 7)
    catalog = periodic_normalizer(3, ks)
    n = 9
    gens = catalog.generator_portraits(n)
    for i in range(1, 4):
        w = catalog.evaluate(f"w{i}", n)
        for j in range(1, 4):
            k = ks[(j - i - 1) % 3]
            assert conjugate(w, gens[j - 1]) == power(gens[j - 1], k)


def test_periodic_normalizer_arity():
    with pytest.raises(SystemDefinitionError):
        periodic_normalizer(2, (3,))


def test_dihedral_normalizer_relation():
    for k in (3, 5, -3):
        catalog = dihedral_vw(k)
        n = 8
        a0 = catalog.evaluate('a0', n)
        assert a0 == compose(catalog.evaluate('a1', n), catalog.evaluate('a2', n))
        assert conjugate(catalog.evaluate('w', n), a0) == power(a0, k)


def test_prep_w_chain_first_element_trivial_at_level_three():
    catalog = prep_w_chain(2, 3, 3)
    assert tree_core.is_identity(catalog.evaluate('w1', 3))
    assert not tree_core.is_identity(catalog.evaluate('w1', 5))


def test_prep_w_chain_recursion():
    catalog = prep_w_chain(2, 4, 3)
    n = 6
    w1 = catalog.evaluate('w1', n - 1)
    assert catalog.evaluate('w2', n) == tree_core.pair(w1, w1, 0)


def test_prep_w_chain_rejects_periodic_shape():
    with pytest.raises(SystemDefinitionError):
        prep_w_chain(1, 2, 2)


def test_prep_w0_is_outside_G4():
    w0 = prep_w0().evaluate('w0', 4)
    assert contains(model_group(GroupCase.prep(2, 3), 4), w0) is False
    assert tree_core.sign(w0, 3) == -1


def test_infinite_chain_generates_W4():
    from treegroups.level_groups import enumerate_group
    gens = infinite_chain(4).generator_portraits(4)
    assert enumerate_group(gens).size == 2 ** 15

import pytest

from treegroups import tree_core
from treegroups.catalogs import GroupCase, case_catalog
from treegroups.conjugacy import generator_conjugates
from treegroups.errors import LevelError, ShapeError
from treegroups.semirigidity import generates_conjugate_group, semirigidity_conjugator
from treegroups.tree_core import compose, conjugate, random_element

CASES = [GroupCase.periodic(2), GroupCase.periodic(3), GroupCase.prep(1, 3), GroupCase.prep(2, 3)]


@pytest.mark.parametrize("case", CASES, ids=str)
def test_conjugators_verify(case, rng):
    catalog = case_catalog(case)
    for _ in range(5):
        bs = generator_conjugates(case, 5, rng)
        result = semirigidity_conjugator(case, bs)
        assert result.level == 5
        gens = catalog.generator_portraits(5)
        for a, b, c in zip(gens, bs, result.conjugators()):
            assert conjugate(c, a) == b
        for z, inner in zip(result.words, result.inner):
            assert catalog.system.evaluate_word(z, 5) == inner


@pytest.mark.parametrize("case", CASES, ids=str)
def test_generated_group_is_a_conjugate_of_the_model(case, rng):
    bs = generator_conjugates(case, 4, rng)
    result = semirigidity_conjugator(case, bs)
    assert generates_conjugate_group(case, bs, result.w)


def test_first_inner_part_is_trivial(rng):
    case = GroupCase.periodic(2)
    x = random_element(4, rng)
    bs = [conjugate(x, a) for a in case_catalog(case).generator_portraits(4)]
    result = semirigidity_conjugator(case, bs)
    assert tree_core.is_identity(result.inner[0])


def test_model_generators_themselves(finite_case):
    bs = case_catalog(finite_case).generator_portraits(4)
    result = semirigidity_conjugator(finite_case, bs)
    for a, c in zip(bs, result.conjugators()):
        assert conjugate(c, a) == a


def test_shape_failure_is_reported(rng):
    case = GroupCase.prep(1, 3)
    bs = generator_conjugates(case, 4, rng)
    bs[1], bs[2] = bs[2], bs[1]
    with pytest.raises(ShapeError):
        semirigidity_conjugator(case, bs)


def test_level_limit(rng):
    case = GroupCase.periodic(2)
    bs = generator_conjugates(case, 5, rng)
    with pytest.raises(LevelError):
        semirigidity_conjugator(case, bs, max_level=4)


def test_result_serializes(rng):
    case = GroupCase.prep(2, 3)
    result = semirigidity_conjugator(case, generator_conjugates(case, 3, rng))
    data = result.to_dict()
    assert data['case'] == "prep:2,3"
    assert data['level'] == 3
    assert len(data['words']) == 3
    assert data['words'][0] == '1'
    assert tree_core.decode(data['w']) == result.w

import numpy as np
import pytest

from treegroups import tree_core
from treegroups.catalogs import GroupCase, case_catalog
from treegroups.conjugacy import (
    ConjugacyWitness,
    are_conjugate_in_Wn,
    conjugacy_canonical_form,
    conjugacy_class_size,
    find_conjugator_in_Wn,
    generator_conjugates,
    is_odometer_to_level,
    odometer_orbit,
    power_conjugator,
    rigidity_conjugator_r2,
    shape_check,
    transitive_conjugator,
    transitive_keys,
)
from treegroups.errors import CertificationError, LevelError, PrecisionError, ShapeError
from treegroups.level_groups import model_group, table_from_elements
from treegroups.tree_core import compose, conjugate, identity, pair, random_element, sigma


def test_canonical_form_matches_exhaustive_classes_on_W3():
    n = 3
    everything = tree_core.all_elements(n)
    w3 = table_from_elements(n, everything)
    portraits = tree_core.rows_to_portraits(everything, n)
    forms = [conjugacy_canonical_form(p) for p in portraits]
    for p, form in zip(portraits, forms):
        orbit = odometer_orbit(w3, p)
        same_form = {q.key for q, f in zip(portraits, forms) if f == form}
        assert orbit == same_form


def test_conjugacy_decision_and_witness(rng):
    for _ in range(30):
        p = random_element(6, rng)
        x = random_element(6, rng)
        q = conjugate(x, p)
        assert are_conjugate_in_Wn(p, q)
        witness = find_conjugator_in_Wn(p, q)
        assert conjugate(witness.conjugator, p) == q


def test_non_conjugate_elements():
    assert not are_conjugate_in_Wn(sigma(3), identity(3))
    assert find_conjugator_in_Wn(sigma(3), identity(3)) is None
    with pytest.raises(LevelError):
        are_conjugate_in_Wn(sigma(3), sigma(4))


def test_witness_verifies_itself():
    with pytest.raises(CertificationError):
        ConjugacyWitness(identity(2), sigma(2), identity(2))


@pytest.mark.parametrize("k", [3, 5, 7, 15, -1])
def test_power_conjugator(rng, k):
    for _ in range(10):
        w = random_element(8, rng)
        witness = power_conjugator(w, k)
        assert conjugate(witness.conjugator, w) == tree_core.power(w, k)


def test_power_conjugator_needs_odd_exponent():
    with pytest.raises(PrecisionError):
        power_conjugator(sigma(3), 4)


def test_odometers(odometer):
    a = odometer.evaluate('a', 6)
    assert is_odometer_to_level(a)
    assert not is_odometer_to_level(sigma(6))
    a0 = case_catalog(GroupCase.periodic(2)).evaluate('a0', 6)
    witness = transitive_conjugator(a, a0)
    assert conjugate(witness.conjugator, a) == a0
    with pytest.raises(ShapeError):
        transitive_conjugator(a, sigma(6))


def test_all_odometers_of_W3_form_one_class(odometer):
    n = 3
    w3 = table_from_elements(n, tree_core.all_elements(n))
    a = odometer.evaluate('a', n)
    assert odometer_orbit(w3, a) == transitive_keys(w3)


def test_shape_check(finite_case, rng):
    bs = generator_conjugates(finite_case, 5, rng)
    assert shape_check(finite_case, bs)
    assert not shape_check(finite_case, bs[::-1])
    with pytest.raises(ShapeError):
        shape_check(finite_case, bs[:-1])


def test_class_sizes_multiply():
    catalog = case_catalog(GroupCase.periodic(2))
    for n in (2, 3, 4):
        a1, a2 = catalog.generator_portraits(n)
        assert conjugacy_class_size(a1) * conjugacy_class_size(a2) == 1 << ((1 << n) - 2)


def test_rigidity_conjugator_r2(rng):
    catalog = case_catalog(GroupCase.periodic(2))
    for n in (3, 4):
        a1, a2 = catalog.generator_portraits(n)
        for _ in range(3):
            x = random_element(n, rng)
            b1, b2 = conjugate(x, a1), conjugate(x, a2)
            w = rigidity_conjugator_r2(b1, b2)
            assert conjugate(w, a1) == b1
            assert conjugate(w, a2) == b2
        assert rigidity_conjugator_r2(a1, identity(n)) is None


def test_normalizer_orbit_of_odometer_is_the_transitive_part():
    from treegroups.level_groups import normalizer_in_Wn
    case = GroupCase.periodic(2)
    table = model_group(case, 4)
    normalizer = normalizer_in_Wn(table)
    a0 = case_catalog(case).evaluate('a0', 4)
    assert odometer_orbit(normalizer, a0) == transitive_keys(table)

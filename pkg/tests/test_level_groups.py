from fractions import Fraction

import numpy as np
import pytest

from treegroups import tree_core
from treegroups.catalogs import GroupCase, case_catalog, infinite_chain
from treegroups.errors import LevelError, ShapeError, TableError
from treegroups.level_groups import (
    batch_in_Grplus1_by_signs,
    centralizer_in_Wn,
    closed_form_log2_order,
    contains,
    count_transitive,
    element_order_log2_formula,
    enumerate_group,
    express,
    hausdorff_exact,
    hausdorff_partial,
    in_Grplus1_by_signs,
    index,
    intersect,
    is_subgroup,
    is_transitive,
    kernel_of_signs,
    lift_to_G1,
    model_group,
    normal_closure,
    order_log2,
    pair_order_doubling_period,
    pair_order_formula,
    product_table,
    sign_image_is_full,
    sign_matrix_class,
    subgroup_H,
    subgroup_K,
    table_from_elements,
)
from treegroups.recursion_engine import parse_word


def test_full_wreath_orders():
    for n, expected in ((1, 2), (2, 8), (3, 128)):
        gens = infinite_chain(n).generator_portraits(n)
        assert enumerate_group(gens).size == expected


@pytest.mark.parametrize("case, orders", [
    (GroupCase.periodic(1), [1, 2, 3, 4, 5]),
    (GroupCase.periodic(2), [1, 3, 6, 12]),
    (GroupCase.periodic(3), [1, 3, 7]),
    (GroupCase.prep(1, 2), [1, 3, 4, 5, 6]),
    (GroupCase.prep(2, 4), [1, 3, 7, 15]),
], ids=str)
def test_enumerated_orders_match_closed_form(case, orders):
    for n, expected in enumerate(orders, start=1):
        table = model_group(case, n)
        assert order_log2(table) == expected
        assert closed_form_log2_order(case, n) == expected


def test_closed_form_values():
    assert [closed_form_log2_order(GroupCase.periodic(2), n) for n in range(1, 6)] == [1, 3, 6, 12, 23]
    assert closed_form_log2_order(GroupCase.prep(1, 3), 4) == 12
    assert closed_form_log2_order(GroupCase.prep(1, 3), 5) == 22
    assert closed_form_log2_order(GroupCase.prep(2, 3), 4) == 13
    assert closed_form_log2_order(GroupCase.prep(2, 3), 5) == 24


def test_level_five_prep_order():
    assert order_log2(model_group(GroupCase.prep(1, 2), 5)) == 6


def test_truncated_table():
    table = model_group(GroupCase.periodic(2), 4, cap=100)
    assert table.truncated
    assert table.size <= 100
    assert order_log2(table) is None
    with pytest.raises(TableError):
        count_transitive(table)


def test_mismatched_generator_levels():
    with pytest.raises(LevelError):
        enumerate_group([tree_core.sigma(2), tree_core.sigma(3)])


def test_membership_and_words():
    catalog = case_catalog(GroupCase.periodic(2))
    gens = catalog.generator_portraits(4)
    table = model_group(GroupCase.periodic(2), 4, track_words=True)
    target = tree_core.compose(tree_core.compose(gens[0], gens[1]), gens[0])
    assert contains(table, target)
    word = express(table, target)
    rebuilt = tree_core.identity(4)
    for i in word:
        rebuilt = tree_core.compose(rebuilt, gens[i])
    assert rebuilt == target
    outside = infinite_chain(4).evaluate('b4', 4)
    assert contains(table, outside) is False
    assert express(table, outside) is None


def test_express_needs_word_tracking():
    table = model_group(GroupCase.periodic(2), 3)
    with pytest.raises(TableError):
        express(table, tree_core.identity(3))


def test_subgroup_lattice():
    case = GroupCase.prep(1, 3)
    g = model_group(case, 4)
    h = subgroup_H(case, 4)
    k = subgroup_K(case, 4)
    assert is_subgroup(g, h)
    assert is_subgroup(k, h)
    assert is_subgroup(g, k)
    assert index(g, h) == 8
    assert intersect(g, h).size == h.size
    kernel = kernel_of_signs(g, [1, 3])
    assert np.array_equal(np.sort(kernel.keys), k.sorted_keys())


def test_periodic_H_subgroups():
    case = GroupCase.periodic(2)
    g = model_group(case, 4)
    for i in (1, 2):
        h = subgroup_H(case, 4, i)
        assert is_subgroup(g, h)
        assert g.size % h.size == 0


def test_normal_closure_contains_conjugates():
    gens = case_catalog(GroupCase.periodic(2)).generator_portraits(3)
    closure = normal_closure(gens, [gens[1]])
    for a in gens:
        assert contains(closure, tree_core.conjugate(a, gens[1]))


def test_product_table():
    a = model_group(GroupCase.periodic(1), 2)
    b = model_group(GroupCase.periodic(2), 2)
    prod = product_table(a, b)
    assert prod.level == 3
    assert prod.size == a.size * b.size
    assert not tree_core.batch_sign_bits(prod.element_bits(), 3)[:, 0].any()


def test_transitivity(finite_case):
    gens = case_catalog(finite_case).generator_portraits(5)
    assert is_transitive(gens, 5)
    assert not is_transitive([tree_core.sigma(3)], 2)


@pytest.mark.parametrize("case", [GroupCase.periodic(2), GroupCase.periodic(3)], ids=str)
def test_sign_image_is_full_up_to_r(case):
    gens = case_catalog(case).generator_portraits(case.r + 2)
    for m in range(1, case.r + 2):
        assert sign_image_is_full(gens, m) == (m <= case.r)


def test_hausdorff():
    expected = {
        GroupCase.periodic(2): Fraction(2, 3),
        GroupCase.periodic(3): Fraction(6, 7),
        GroupCase.prep(1, 3): Fraction(5, 8),
        GroupCase.prep(2, 3): Fraction(11, 16),
        GroupCase.prep(2, 4): Fraction(7, 8),
        GroupCase.prep(1, 2): Fraction(0),
    }
    for case, value in expected.items():
        assert hausdorff_exact(case) == value
        assert abs(float(hausdorff_partial(case, 25)) - float(value)) < 1e-6


def test_element_order_formula():
    catalog = case_catalog(GroupCase.periodic(2))
    for n in range(1, 9):
        for i, g in enumerate(catalog.generator_portraits(n), start=1):
            assert tree_core.order_log2(g) == element_order_log2_formula(2, i, n)


def test_pair_order_formula():
    assert pair_order_formula(1, 2, 1, 2) is None
    assert pair_order_formula(1, 3, 1, 2) == 8
    assert pair_order_formula(2, 3, 2, 3) == 4
    assert pair_order_formula(2, 4, 1, 3) is None
    assert pair_order_formula(2, 4, 1, 2) == 4


def test_pair_order_doubling_period():
    assert pair_order_doubling_period(1, 2, 1, 2) == 1
    assert pair_order_doubling_period(2, 4, 1, 3) == 2
    assert pair_order_doubling_period(2, 4, 2, 4) == 2
    assert pair_order_doubling_period(1, 3, 1, 2) is None


def test_prep_2_4_pair_doubles_every_other_level():
    catalog = case_catalog(GroupCase.prep(2, 4))
    orders = {}
    for n in range(2, 13):
        a1, _, a3, _ = catalog.generator_portraits(n)
        orders[n] = tree_core.order_log2(tree_core.compose(a1, a3))
    for n in range(4, 13):
        assert orders[n] == orders[n - 2] + 1
    assert any(orders[n] == orders[n - 1] for n in range(3, 13))


def test_pair_orders_stabilize():
    n = 10
    gens = case_catalog(GroupCase.prep(2, 3)).generator_portraits(n)
    assert tree_core.order_log2(tree_core.compose(gens[1], gens[2])) == 2
    gens = case_catalog(GroupCase.prep(1, 2)).generator_portraits(n)
    assert tree_core.order_log2(tree_core.compose(gens[0], gens[1])) == n


def test_odometer_counts():
    assert count_transitive(model_group(GroupCase.periodic(2), 4)) == 1024
    assert count_transitive(model_group(GroupCase.prep(1, 3), 4)) == 512


def test_centralizer_of_model_group_has_order_two():
    for n in (2, 3, 4):
        table = model_group(GroupCase.periodic(2), n)
        assert centralizer_in_Wn(table).size == 2


def test_centralizer_of_element():
    a = case_catalog(GroupCase.periodic(1)).evaluate('a1', 3)
    centralizer = centralizer_in_Wn(a)
    assert centralizer.size == 8
    assert contains(centralizer, a)


def test_brute_force_refused_above_limit():
    table = model_group(GroupCase.prep(1, 2), 5)
    with pytest.raises(LevelError):
        centralizer_in_Wn(table)


def test_sign_matrix_membership():
    case = GroupCase.prep(2, 3)
    g4 = model_group(case, 4)
    everything = tree_core.all_elements(4)
    by_signs = batch_in_Grplus1_by_signs(everything, 2, 3)
    by_table = np.isin(tree_core.batch_keys(everything, 4), g4.sorted_keys())
    assert np.array_equal(by_signs, by_table)
    sample = tree_core.rows_to_portraits(everything[::997], 4)
    for p, expected in zip(sample, by_signs[::997]):
        assert in_Grplus1_by_signs(p, 2, 3) == bool(expected)


def test_sign_matrix_needs_s_at_least_two():
    with pytest.raises(ShapeError):
        sign_matrix_class(tree_core.identity(3), 1, 2)
    with pytest.raises(LevelError):
        sign_matrix_class(tree_core.identity(3), 2, 3)


def test_lift_to_G1_has_the_right_first_section():
    from treegroups.recursion_engine import word_sections
    for case in (GroupCase.periodic(3), GroupCase.prep(1, 3), GroupCase.prep(2, 3)):
        catalog = case_catalog(case)
        x = parse_word("a1 a2 a3^-1 a2")
        lifted = lift_to_G1(case, x)
        n = 6
        left, _, bit = word_sections(catalog.system, lifted)
        assert bit == 0
        assert catalog.system.evaluate_word(left, n - 1) == catalog.system.evaluate_word(x, n - 1)


def test_table_from_elements_deduplicates():
    rows = np.stack([tree_core.sigma(2).bits, tree_core.sigma(2).bits, tree_core.identity(2).bits])
    table = table_from_elements(2, rows)
    assert table.size == 2

import pytest

from treegroups.verify import SUITES, SuiteResult, run_suite


def test_suite_result_bookkeeping():
    result = SuiteResult('demo')
    assert result.passed
    result.add("first", True)
    result.add("second", 0, "detail")
    assert not result.passed
    data = result.to_dict()
    assert data['name'] == 'demo'
    assert data['passed'] is False
    assert data['checks'][1] == {'description': 'second', 'passed': False, 'detail': 'detail',
                                 'skipped': False}


def test_skipped_checks_do_not_fail_a_suite():
    result = SuiteResult('demo')
    result.add("ran", True)
    result.skip("later", "needs level 5")
    assert result.passed
    assert result.skipped == 1
    assert result.to_dict()['checks'][1]['skipped'] is True


def test_suite_names():
    assert sorted(SUITES) == sorted(
        ['core', 'orders', 'hausdorff', 'conjugacy', 'semirigid', 'normalizer', 'odometer', 'arith'])


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite('nonsense')


def test_hausdorff_suite_passes():
    result = run_suite('hausdorff')
    assert result.passed
    assert len(result.checks) == 6


def test_arith_suite_passes_at_small_level():
    result = run_suite('arith', level=3)
    assert result.passed, [c for c in result.checks if not c.passed]


def test_odometer_suite_passes_at_small_level():
    result = run_suite('odometer', level=3)
    assert result.passed, [c for c in result.checks if not c.passed]


def test_core_suite_passes():
    result = run_suite('core', level=4)
    assert result.passed, [c for c in result.checks if not c.passed]
    pattern = [c for c in result.checks if c.description.startswith("prep:2,4: orders")]
    assert len(pattern) == 1 and pattern[0].passed


def test_orders_suite_reports_level_5_as_skipped():
    result = run_suite('orders', level=4)
    assert result.passed, [c for c in result.checks if not c.passed]
    skipped = sorted(c.description for c in result.checks if c.skipped)
    assert skipped == ["periodic:2 log2|G_5| = 23",
                       "prep:1,3 log2|G_5| = 22",
                       "prep:2,3 log2|G_5| = 24"]


@pytest.mark.parametrize("name", ['conjugacy', 'semirigid', 'normalizer'])
def test_remaining_suites_pass(name):
    result = run_suite(name, level=4)
    assert result.passed, [c for c in result.checks if not c.passed]
    assert result.skipped == 0

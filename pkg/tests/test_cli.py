import json

import pytest

from app import run


def _json(capsys, argv):
    code = run(['--json'] + argv)
    return code, json.loads(capsys.readouterr().out)


def test_classify_json(capsys):
    code, data = _json(capsys, ['classify', '--poly', '-1', '--field', 'Q'])
    assert code == 0
    assert data['class'] == 'periodic'
    assert data['r'] == 2


def test_classify_residue_picks_the_field(capsys):
    code, data = _json(capsys, ['classify', '--poly', '1 mod 3'])
    assert code == 0
    assert (data['class'], data['s'], data['r']) == ('prep', 1, 2)
    assert data['field'] == 'F_3'


def test_classify_from_coefficients(capsys):
    code, data = _json(capsys, ['classify', '--coeffs', '1,2,-2'])
    assert code == 0
    assert data['c'] == '-2'
    assert data['class'] == 'prep'


def test_hausdorff_text(capsys):
    assert run(['hausdorff', '--case', 'prep:1,3']) == 0
    assert capsys.readouterr().out.splitlines()[0] == "5/8"


def test_gens_and_eval(capsys):
    code, data = _json(capsys, ['gens', '--case', 'periodic:2', '--level', '3'])
    assert code == 0
    assert sorted(data['generators']) == ['a1', 'a2']
    code, value = _json(capsys, ['eval', '--case', 'periodic:2', '--symbol', 'a0', '--level', '3'])
    assert value['signs'] == [1, 1, 1]


def test_eval_word_against_a_case(capsys):
    code, data = _json(capsys, ['eval', '--case', 'periodic:2', '--level', '3', '--symbol', 'a1 a2'])
    assert code == 0
    code, a0 = _json(capsys, ['eval', '--case', 'periodic:2', '--level', '3', '--symbol', 'a0'])
    assert data['portrait'] == a0['portrait']
    assert run(['eval', '--case', 'periodic:2', '--level', '3', '--symbol', 'a1 b7']) == 2


def test_eval_system_file(capsys, tmp_path):
    path = tmp_path / "odometer.txt"
    path.write_text("a = (a, 1) s\n")
    code, data = _json(capsys, ['eval', '--system', str(path), '--symbol', 'a a', '--level', '4'])
    assert code == 0
    assert data['log2_order'] == 3


def test_order_agrees(capsys):
    assert run(['order', '--case', 'periodic:2', '--level', '4']) == 0
    out = capsys.readouterr().out
    assert "log2 |G_4| = 12" in out
    assert "agrees" in out


def test_conjugate(capsys):
    code, data = _json(capsys, ['conjugate', '--p', '2:02', '--q', '2:04'])
    assert code == 0
    assert data['conjugate'] is True
    assert data['witness'].startswith('2:')
    code, data = _json(capsys, ['conjugate', '--p', '2:01', '--q', '2:00'])
    assert data == {'conjugate': False, 'witness': None}


def test_power_conjugate(capsys):
    code, data = _json(capsys, ['conjugate', '--p', '3:01', '--k', '3'])
    assert code == 0
    assert data['power'] == 3


def test_arith(capsys):
    code, data = _json(capsys, ['arith', '--case', 'prep:1,3', '--k', '3'])
    assert code == 0
    assert data['index_bound'] == "2"
    code, data = _json(capsys, ['arith', '--poly', '1'])
    assert data['structure'] == "full W"


def test_odometer(capsys):
    code, data = _json(capsys, ['odometer', '--case', 'prep:2,3', '--level', '4'])
    assert code == 0
    assert data['b_infinity_is_odometer'] is True
    assert data['group_order'] == 2 ** 13
    assert 0 < data['transitive_elements'] < data['group_order']


def test_normalizer(capsys):
    code, data = _json(capsys, ['normalizer', '--case', 'periodic:2', '--level', '3'])
    assert code == 0
    assert data['centralizer_order'] == 2
    assert data['log2_order_G'] == 6


def test_enumerate_exports(capsys, tmp_path):
    table = tmp_path / "g.txt"
    report = tmp_path / "g.json"
    code, data = _json(capsys, ['enumerate', '--case', 'prep:1,2', '--level', '4',
                                '--output', str(table), '--report', str(report)])
    assert code == 0
    assert data['log2_order'] == 5
    assert len(table.read_text().split()) == 32
    assert json.loads(report.read_text())['group']['matches_formula'] is True


def test_verify_suite(capsys, tmp_path):
    out = tmp_path / "verify.txt"
    assert run(['verify', '--suite', 'hausdorff', '--output', str(out)]) == 0
    assert capsys.readouterr().out.strip().endswith("PASS")
    assert "Overall: PASS" in out.read_text()


def test_verify_core_suite_passes(capsys):
    assert run(['verify', '--suite', 'core', '--level', '4']) == 0
    out = capsys.readouterr().out
    assert "FAILED" not in out
    assert out.strip().endswith("PASS")


def test_threads_flag_is_accepted(capsys):
    assert run(['gens', '--case', 'periodic:2', '--level', '3', '--threads', '4']) == 0
    assert capsys.readouterr().out.startswith("a1 = 3:")


def test_text_output_is_stable(capsys):
    argv = ['gens', '--case', 'prep:2,3', '--level', '4']
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first


@pytest.mark.parametrize("argv", [
    [],
    ['gens', '--case', 'periodic:0', '--level', '3'],
    ['gens', '--level', '3'],
    ['classify'],
    ['conjugate', '--p', '2:zz', '--q', '2:00'],
    ['verify', '--suite', 'nonsense'],
    ['frobnicate'],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv) == 2

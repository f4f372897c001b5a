import json
import os

import numpy as np
import pytest

from export.report_generator import (
    generate_report,
    generate_report_json,
    generate_verification_report,
    table_summary,
)
from export.table_saver import load_table, save_table
from treegroups.catalogs import GroupCase
from treegroups.errors import EncodingError, TableError
from treegroups.level_groups import model_group
from treegroups.verify import SuiteResult


def test_table_round_trip(tmp_path):
    table = model_group(GroupCase.periodic(2), 3)
    path = save_table(table, str(tmp_path / "nested" / "g3.txt"))
    lines = open(path).read().split()
    assert len(lines) == table.size == 64
    assert all(line.startswith("3:") for line in lines)
    loaded = load_table(path)
    assert loaded.level == 3
    assert np.array_equal(np.sort(loaded.keys), table.sorted_keys())


def test_truncated_table_is_not_saved(tmp_path):
    table = model_group(GroupCase.periodic(2), 4, cap=10)
    with pytest.raises(TableError):
        save_table(table, str(tmp_path / "t.txt"))


def test_load_rejects_bad_lines(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2:01\nnot a portrait\n")
    with pytest.raises(EncodingError):
        load_table(str(path))
    empty = tmp_path / "empty.txt"
    empty.write_text("\n")
    with pytest.raises(TableError):
        load_table(str(empty))


def test_table_summary():
    case = GroupCase.prep(1, 3)
    summary = table_summary(model_group(case, 3), case)
    assert summary['log2_order'] == 7
    assert summary['matches_formula'] is True
    assert summary['transitive_elements'] == 16


def test_reports(tmp_path):
    case = GroupCase.periodic(2)
    table = model_group(case, 3)
    text = generate_report(table, case, 0.5, str(tmp_path / "r.txt"))
    content = open(text).read()
    assert content.startswith("=" * 60)
    assert "log2 |G_n|: 6" in content
    assert "Agreement: yes" in content
    data = json.load(open(generate_report_json(table, case, 0.5, str(tmp_path / "r.json"))))
    assert data['group']['log2_order'] == 6
    assert data['group']['case'] == "periodic:2"


def test_verification_report(tmp_path):
    good = SuiteResult('good')
    good.add("holds", True)
    bad = SuiteResult('bad')
    bad.add("fails", False, "why")
    path = generate_verification_report([good, bad], 4, 0, str(tmp_path / "v.txt"))
    content = open(path).read()
    assert "[PASS] suite good" in content
    assert "FAILED fails (why)" in content
    assert "Overall: FAIL (bad)" in content
    assert "Skipped checks: 0" in content
    data = json.load(open(generate_verification_report([good], 4, 0, str(tmp_path / "v.json"))))
    assert data['passed'] is True


def test_default_report_name(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    table = model_group(GroupCase.periodic(1), 2)
    path = generate_report(table)
    assert path.startswith("group_report_") and os.path.exists(path)


def test_verification_report_marks_skipped_checks(tmp_path):
    result = SuiteResult('orders')
    result.add("ran", True)
    result.skip("prep:1,3 log2|G_5| = 22", "formula=22")
    content = open(generate_verification_report([result], 4, 0, str(tmp_path / "v.txt"))).read()
    assert "  SKIPPED prep:1,3 log2|G_5| = 22 (formula=22)" in content
    assert "Skipped checks: 1" in content
    assert "Overall: PASS" in content

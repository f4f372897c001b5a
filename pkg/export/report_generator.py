"""
Report Generator Module

Generates text and JSON summaries for enumerated groups and verification runs.
"""

import json
from datetime import datetime
from typing import Dict, List, Optional, Sequence

from treegroups.catalogs import GroupCase
from treegroups.level_groups import (
    GroupTable,
    closed_form_log2_order,
    count_transitive,
    order_log2,
)
from treegroups.verify import SuiteResult


def table_summary(table: GroupTable, case: Optional[GroupCase] = None) -> Dict:
    """Facts about a table shared by the text and JSON reports."""
    n = table.level
    log2 = order_log2(table)
    summary = {
        'level': n,
        'elements': table.size,
        'truncated': table.truncated,
        'log2_order': log2,
        'log2_order_Wn': (1 << n) - 1,
        'generators': len(table.generators),
    }
    if not table.truncated:
        summary['transitive_elements'] = count_transitive(table)
    if case is not None:
        expected = closed_form_log2_order(case, n)
        summary['case'] = str(case)
        summary['log2_order_formula'] = expected
        summary['matches_formula'] = None if log2 is None else log2 == expected
    return summary


def generate_report(
    table: GroupTable,
    case: Optional[GroupCase] = None,
    processing_time: float = None,
    output_path: str = None
) -> str:
    """
    Generate a text report for an enumerated group.

    Args:
        table: Enumerated table
        case: Model case the table was generated from, if any
        processing_time: Time taken to enumerate (seconds)
        output_path: Path to save the report (if None, generates filename)

    Returns:
        Path where the report was saved
    """
    if output_path is None:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        output_path = f"group_report_{timestamp}.txt"

    summary = table_summary(table, case)
    log2 = summary['log2_order']

    lines = [
        "=" * 60,
        "TreeGroups - Group Enumeration Report",
        "=" * 60,
        "",
        "GROUP",
        "-" * 60,
        f"Case: {summary.get('case', 'custom generators')}",
        f"Level: {summary['level']}",
        f"Generators: {summary['generators']}",
        "",
        "ORDER",
        "-" * 60,
        f"Elements: {summary['elements']}{' (truncated at cap)' if table.truncated else ''}",
        f"log2 |G_n|: {log2 if log2 is not None else 'unknown'}",
        f"log2 |W_n|: {summary['log2_order_Wn']}",
    ]
    if case is not None:
        lines += [
            f"Closed form: {summary['log2_order_formula']}",
            f"Agreement: {'n/a' if log2 is None else ('yes' if summary['matches_formula'] else 'NO')}",
        ]
    if 'transitive_elements' in summary:
        lines += ["", f"Transitive elements (odometers): {summary['transitive_elements']}"]
    lines += [
        "",
        "PROCESSING STATISTICS",
        "-" * 60,
    ]
    if processing_time is not None:
        lines.append(f"Processing Time: {processing_time:.2f} seconds")
    lines += [
        f"Report Date: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
        "",
        "=" * 60,
    ]

    with open(output_path, 'w') as f:
        f.write('\n'.join(lines))

    return output_path


def generate_report_json(
    table: GroupTable,
    case: Optional[GroupCase] = None,
    processing_time: float = None,
    output_path: str = None
) -> str:
    """Same as generate_report, in JSON format."""
    if output_path is None:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        output_path = f"group_report_{timestamp}.json"

    report = {
        'group': table_summary(table, case),
        'processing': {
            'processing_time_seconds': processing_time,
            'report_date': datetime.now().isoformat(),
        },
    }

    with open(output_path, 'w') as f:
        json.dump(report, f, indent=2)

    return output_path


def verification_lines(results: Sequence[SuiteResult]) -> List[str]:
    """Deterministic pass/fail lines, also printed by the command line."""
    lines = []
    for result in results:
        lines.append(f"[{'PASS' if result.passed else 'FAIL'}] suite {result.name}")
        for check in result.checks:
            if check.skipped:
                mark = 'SKIPPED'
            else:
                mark = 'ok' if check.passed else 'FAILED'
            detail = f" ({check.detail})" if check.detail else ''
            lines.append(f"  {mark:6} {check.description}{detail}")
    return lines


def generate_verification_report(
    results: Sequence[SuiteResult],
    level: int,
    seed: int,
    output_path: str = None
) -> str:
    """Write a banner report of verification suites; JSON when the path ends in .json."""
    if output_path is None:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        output_path = f"verification_report_{timestamp}.txt"

    failed = [r.name for r in results if not r.passed]

    if output_path.endswith('.json'):
        with open(output_path, 'w') as f:
            json.dump({
                'level': level,
                'seed': seed,
                'passed': not failed,
                'skipped': sum(r.skipped for r in results),
                'suites': [r.to_dict() for r in results],
            }, f, indent=2)
        return output_path

    lines = [
        "=" * 60,
        "TreeGroups - Verification Report",
        "=" * 60,
        "",
        f"Level: {level}",
        f"Seed: {seed}",
        f"Suites: {len(results)}, failed: {len(failed)}",
        f"Skipped checks: {sum(r.skipped for r in results)}",
        "",
        "RESULTS",
        "-" * 60,
        *verification_lines(results),
        "",
        f"Overall: {'PASS' if not failed else 'FAIL (' + ', '.join(failed) + ')'}",
        "",
        "=" * 60,
    ]

    with open(output_path, 'w') as f:
        f.write('\n'.join(lines))

    return output_path

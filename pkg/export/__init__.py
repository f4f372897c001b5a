"""
TreeGroups Export Module

Handles group table export and report generation.
"""

from .table_saver import load_table, save_table
from .report_generator import generate_report, generate_report_json, generate_verification_report

__all__ = [
    'save_table',
    'load_table',
    'generate_report',
    'generate_report_json',
    'generate_verification_report',
]

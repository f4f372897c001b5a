"""
Table Saver Module

Saves enumerated group tables as sorted "n:HEX" lines and reads them back.
"""

import logging
import os
from datetime import datetime

from treegroups import tree_core
from treegroups.errors import EncodingError, LevelError, TableError
from treegroups.level_groups import GroupTable, table_from_keys

logger = logging.getLogger(__name__)


def save_table(table: GroupTable, output_path: str = None) -> str:
    """
    Save a table to disk, one portrait per line in key order.

    Args:
        table: Complete (not truncated) group table
        output_path: Path to save to (if None, generates unique filename)

    Returns:
        Path where the table was saved
    """
    if table.truncated:
        raise TableError("Refusing to export a truncated table")

    if output_path is None:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        output_path = f"group_level{table.level}_{timestamp}.txt"

    parent_dir = os.path.dirname(output_path)
    if parent_dir and not os.path.exists(parent_dir):
        os.makedirs(parent_dir, exist_ok=True)

    n = table.level
    with open(output_path, 'w') as f:
        for key in table.sorted_keys():
            f.write(tree_core.encode(tree_core.from_key(n, int(key))))
            f.write('\n')

    logger.info("Saved %d elements of level %d to %s", table.size, n, output_path)
    return output_path


def load_table(path: str) -> GroupTable:
    """Read a file written by save_table. Blank lines are ignored."""
    level = None
    keys = []
    with open(path, 'r') as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                p = tree_core.decode(line.strip())
            except EncodingError as e:
                raise EncodingError(f"{path}:{number}: {e}") from e
            if level is None:
                level = p.level
            elif p.level != level:
                raise LevelError(f"{path}:{number}: level {p.level} after level {level}")
            keys.append(p.key)
    if level is None:
        raise TableError(f"{path} holds no elements")
    return table_from_keys(level, keys)

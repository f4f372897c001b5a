"""
Errors Module

Exception hierarchy for tree group computations. Most classes also derive from
ValueError or RuntimeError so callers may catch the builtin types.
"""


class TreeGroupError(Exception):
    """Base class for every error raised by treegroups."""


class LevelError(TreeGroupError, ValueError):
    """Level out of range, mismatched levels or a leaf of the wrong length."""


class PrecisionError(TreeGroupError, ValueError):
    """2-adic precision too small, or an even operand where a unit is needed."""


class EncodingError(TreeGroupError, ValueError):
    """Malformed portrait text."""


class SystemDefinitionError(TreeGroupError, ValueError):
    """Invalid recursion system, word or catalog parameters."""


class ShapeError(TreeGroupError, ValueError):
    """Inputs do not have the shape an algorithm requires."""


class TableError(TreeGroupError, ValueError):
    """Operation needs a full table, word tracking or a compatible level."""


class CertificationError(TreeGroupError, RuntimeError):
    """A constructed witness failed its own verification equation."""


class OrbitError(TreeGroupError, ValueError):
    """Bad field specification or an orbit that is not a finite class."""

"""
TreeGroups Core Module

Exact computation in the automorphism groups of the binary rooted tree:
portraits, recursion systems, finite-level groups, conjugacy, semirigidity,
critical orbits and arithmetic labels.
"""

from .tree_core import Portrait, compose, decode, encode, identity, invert, sigma
from .two_adic import TwoAdic, make
from .recursion_engine import RecursionSystem, define_system, parse_system
from .catalogs import Catalog, GroupCase, case_catalog
from .level_groups import GroupTable, enumerate_group, model_group
from .conjugacy import ConjugacyWitness, are_conjugate_in_Wn, find_conjugator_in_Wn
from .semirigidity import SemirigidityResult, semirigidity_conjugator
from .dynamics import ArithReport, FieldSpec, OrbitClass, arith_description, critical_orbit
from .verify import SuiteResult, run_all, run_suite

__all__ = [
    'Portrait',
    'compose',
    'decode',
    'encode',
    'identity',
    'invert',
    'sigma',
    'TwoAdic',
    'make',
    'RecursionSystem',
    'define_system',
    'parse_system',
    'Catalog',
    'GroupCase',
    'case_catalog',
    'GroupTable',
    'enumerate_group',
    'model_group',
    'ConjugacyWitness',
    'are_conjugate_in_Wn',
    'find_conjugator_in_Wn',
    'SemirigidityResult',
    'semirigidity_conjugator',
    'ArithReport',
    'FieldSpec',
    'OrbitClass',
    'arith_description',
    'critical_orbit',
    'SuiteResult',
    'run_all',
    'run_suite',
]

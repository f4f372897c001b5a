"""
Conjugacy Module

Conjugacy in W_n. Two elements (u, v) and (u', v') without root swap are
conjugate iff their sections are conjugate in some order; two elements with a
root swap are conjugate iff the products uv and u'v' are. Every conjugator is
assembled from these rules and checked before it is returned.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Set, Union

import numpy as np

from . import settings, tree_core
from .catalogs import GroupCase, case_catalog, periodic_generators
from .errors import CertificationError, LevelError, PrecisionError, ShapeError
from .level_groups import GroupTable, centralizer_in_Wn
from .tree_core import Portrait, compose, decompose, invert, pair
from .two_adic import TwoAdic

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConjugacyWitness:
    """conjugator * lhs * conjugator^-1 == rhs, checked on construction."""

    conjugator: Portrait
    lhs: Portrait
    rhs: Portrait

    def __post_init__(self):
        if tree_core.conjugate(self.conjugator, self.lhs) != self.rhs:
            raise CertificationError(
                f"Conjugator {tree_core.encode(self.conjugator)} does not map "
                f"{tree_core.encode(self.lhs)} to {tree_core.encode(self.rhs)}"
            )

    def to_dict(self) -> dict:
        return {
            'conjugator': tree_core.encode(self.conjugator),
            'lhs': tree_core.encode(self.lhs),
            'rhs': tree_core.encode(self.rhs),
        }


@lru_cache(maxsize=1 << 16)
def conjugacy_canonical_form(p: Portrait) -> str:
    """Complete invariant of the W_n-conjugacy class of p."""
    if p.level == 0:
        return ''
    u, v, swap = decompose(p)
    if swap:
        return '[' + conjugacy_canonical_form(compose(u, v)) + ']'
    cu, cv = conjugacy_canonical_form(u), conjugacy_canonical_form(v)
    if cu > cv:
        cu, cv = cv, cu
    return '(' + cu + ',' + cv + ')'


def _same_level(p: Portrait, q: Portrait):
    if p.level != q.level:
        raise LevelError(f"Level mismatch: {p.level} vs {q.level}")


def are_conjugate_in_Wn(p: Portrait, q: Portrait) -> bool:
    _same_level(p, q)
    return conjugacy_canonical_form(p) == conjugacy_canonical_form(q)


def _conjugator(p: Portrait, q: Portrait) -> Portrait:
    # p and q are known to be conjugate
    if p.level == 0:
        return p
    u, v, swap = decompose(p)
    u2, v2, _ = decompose(q)
    if not swap:
        if (conjugacy_canonical_form(u) == conjugacy_canonical_form(u2)
                and conjugacy_canonical_form(v) == conjugacy_canonical_form(v2)):
            return pair(_conjugator(u, u2), _conjugator(v, v2), 0)
        return pair(_conjugator(v, u2), _conjugator(u, v2), 1)
    x = _conjugator(compose(u, v), compose(u2, v2))
    y = compose(compose(invert(u2), x), u)
    return pair(x, y, 0)


def find_conjugator_in_Wn(p: Portrait, q: Portrait) -> Optional[ConjugacyWitness]:
    """Witness c with c p c^-1 = q, or None when p and q are not conjugate."""
    if not are_conjugate_in_Wn(p, q):
        return None
    return ConjugacyWitness(_conjugator(p, q), p, q)


def _odd_exponent(p: Portrait, k: Union[int, TwoAdic]) -> int:
    odd = k.is_unit if isinstance(k, TwoAdic) else int(k) % 2 == 1
    if not odd:
        raise PrecisionError(f"Power conjugator needs an odd exponent, got {k}")
    return tree_core.reduce_exponent(p, k) or 1


def _power_conjugator(p: Portrait, k: int) -> Portrait:
    if p.level == 0:
        return p
    u, v, swap = decompose(p)
    if not swap:
        return pair(_power_conjugator(u, k), _power_conjugator(v, k), 0)
    # p^k = ((uv)^l u, (vu)^l v) sigma with k = 2l + 1
    uv = compose(u, v)
    x = _power_conjugator(uv, k)
    first = compose(tree_core.power(uv, (k - 1) // 2), u)
    return pair(x, compose(compose(invert(first), x), u), 0)


def power_conjugator(p: Portrait, k: Union[int, TwoAdic]) -> ConjugacyWitness:
    """
    Witness c with c p c^-1 = p^k for odd k.

    Args:
        p: Element of W_n
        k: Odd integer or 2-adic unit with enough precision for the order of p
    """
    exponent = _odd_exponent(p, k)
    return ConjugacyWitness(_power_conjugator(p, exponent), p, tree_core.power(p, exponent))


def is_odometer_to_level(p: Portrait) -> bool:
    """All signs -1, equivalently transitive on every level up to p.level."""
    return tree_core.sign_vector(p).all_negative()


def _transitive_conjugator(p: Portrait, q: Portrait) -> Portrait:
    if p.level == 0:
        return p
    u, v, _ = decompose(p)
    u2, v2, _ = decompose(q)
    low = tree_core.identity(p.level - 1)
    # (1, v^-1) conjugates (u, v) sigma to (uv, 1) sigma
    e = pair(low, invert(v), 0)
    e2 = pair(low, invert(v2), 0)
    d = _transitive_conjugator(compose(u, v), compose(u2, v2))
    return compose(compose(invert(e2), pair(d, d, 0)), e)


def transitive_conjugator(p: Portrait, q: Portrait) -> ConjugacyWitness:
    """Conjugator between two elements acting transitively on the leaves."""
    _same_level(p, q)
    for name, x in (('first', p), ('second', q)):
        if not is_odometer_to_level(x):
            raise ShapeError(f"The {name} element is not transitive on level {x.level}")
    return ConjugacyWitness(_transitive_conjugator(p, q), p, q)


def shape_check(case: GroupCase, bs: Sequence[Portrait]) -> bool:
    """
    Whether b_1..b_r satisfy the recursive conjugacy shape of the case's
    generators on every level up to theirs.

    Periodic: b_1 ~ (b_r, 1) sigma, b_i ~ (b_(i-1), 1).
    Pre-periodic: b_1 ~ sigma, b_(s+1) ~ (b_s, b_r), b_i ~ (b_(i-1), 1).
    """
    if len(bs) != case.r:
        raise ShapeError(f"Case {case} needs {case.r} elements, got {len(bs)}")
    levels = {b.level for b in bs}
    if len(levels) != 1:
        raise LevelError(f"Elements must share a level, got {sorted(levels)}")
    n = levels.pop()
    r, s = case.r, case.s
    for m in range(1, n + 1):
        top = [tree_core.truncate(b, m) for b in bs]
        low = [tree_core.truncate(b, m - 1) for b in bs]
        one = tree_core.identity(m - 1)
        targets = []
        for i in range(1, r + 1):
            if i == 1:
                targets.append(pair(low[r - 1], one, 1) if case.is_periodic else tree_core.sigma(m))
            elif not case.is_periodic and i == s + 1:
                targets.append(pair(low[s - 1], low[r - 1], 0))
            else:
                targets.append(pair(low[i - 2], one, 0))
        for i, (b, target) in enumerate(zip(top, targets), start=1):
            if not are_conjugate_in_Wn(b, target):
                logger.debug("Shape check failed for b_%d at level %d", i, m)
                return False
    return True


def conjugacy_class_size(p: Portrait, allow_large: bool = False) -> int:
    """|W_n| / |C(p)| by exhaustive centralizer computation."""
    centralizer = centralizer_in_Wn(p, allow_large=allow_large)
    return (1 << tree_core.bit_length(p.level)) // centralizer.size


def rigidity_conjugator_r2(b1: Portrait, b2: Portrait,
                           allow_large: bool = False) -> Optional[Portrait]:
    """
    A single w in W_n with b_1 = w a_1 w^-1 and b_2 = w a_2 w^-1 (periodic r=2).

    Exhaustive; the least such w in key order, or None.
    """
    _same_level(b1, b2)
    n = b1.level
    if n > settings.BRUTE_FORCE_MAX_LEVEL and not allow_large:
        raise LevelError(f"Exhaustive rigidity search refused at level {n}")
    a1, a2 = periodic_generators(2).generator_portraits(n)
    everything = tree_core.all_elements(n, allow_large=allow_large)
    keep = np.ones(everything.shape[0], dtype=bool)
    for a, b in ((a1, b1), (a2, b2)):
        keep &= (tree_core.batch_compose_right(everything, a)
                 == tree_core.batch_compose_left(b, everything)).all(axis=1)
    hits = np.flatnonzero(keep)
    if hits.size == 0:
        return None
    w = Portrait(n, everything[hits[0]])
    if tree_core.conjugate(w, a1) != b1 or tree_core.conjugate(w, a2) != b2:
        raise CertificationError("Rigidity conjugator failed verification")
    return w


def odometer_orbit(table: GroupTable, p: Portrait) -> Set[int]:
    """Keys of all t p t^-1 for t in the table."""
    if p.level != table.level:
        raise LevelError(f"Element level {p.level} vs table level {table.level}")
    elements = table.element_bits()
    conj = tree_core.batch_compose(
        tree_core.batch_compose_right(elements, p),
        tree_core.batch_invert(elements, p.level),
        p.level,
    )
    return {int(k) for k in np.unique(tree_core.batch_keys(conj, p.level))}


def transitive_keys(table: GroupTable) -> Set[int]:
    """Keys of the table's elements that act as a single cycle on the leaves."""
    bits = table.element_bits()
    signs = tree_core.batch_sign_bits(bits, table.level)
    return {int(k) for k in table.keys[signs.all(axis=1)]}


def generator_conjugates(case: GroupCase, n: int, seed=None):
    """Random W_n-conjugates x_i a_i x_i^-1 of the case's generators."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    gens = case_catalog(case).generator_portraits(n)
    return [tree_core.conjugate(tree_core.random_element(n, rng), g) for g in gens]

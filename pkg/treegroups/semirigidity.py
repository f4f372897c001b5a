"""
Semirigidity Module

Constructive conjugators for generator tuples of the model shape. Given
b_1, ..., b_r in W_n whose conjugacy classes follow the recursion of the
model generators a_1, ..., a_r, find w in W_n and words z_i in the
generators such that b_i = (w z_i) a_i (w z_i)^-1 for every i.

Both constructions work one level at a time: normalize the b_i so that
their sections line up with the generators' sections, recurse on the
sections, then assemble w and the words from the answer one level down.
The inner parts are produced as words, so their membership in G_n is
certified by construction and no enumeration is needed.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from . import settings, tree_core
from .catalogs import Catalog, GroupCase, case_catalog
from .conjugacy import are_conjugate_in_Wn, find_conjugator_in_Wn, shape_check
from .errors import CertificationError, LevelError, ShapeError
from .level_groups import enumerate_group, lift_to_G1
from .recursion_engine import (
    EMPTY,
    Word,
    format_word,
    invert_word,
    letters,
    reduce_word,
    word_sections,
)
from .tree_core import Portrait, compose, conjugate, decompose, invert, pair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SemirigidityResult:
    """
    w and the inner parts z_i, with z_i both as a generator word and as a
    portrait at the level of w.
    """

    case: GroupCase
    w: Portrait
    words: Tuple[Word, ...]
    inner: Tuple[Portrait, ...]

    @property
    def level(self) -> int:
        return self.w.level

    def conjugators(self) -> List[Portrait]:
        """The products w z_i."""
        return [compose(self.w, z) for z in self.inner]

    def to_dict(self) -> dict:
        return {
            'case': str(self.case),
            'level': self.level,
            'w': tree_core.encode(self.w),
            'words': [format_word(z) for z in self.words],
            'inner': [tree_core.encode(z) for z in self.inner],
        }


def _gen(i: int) -> Tuple[str, int]:
    return (f"a{i}", 1)


def _periodic_step(catalog: Catalog, case: GroupCase, bs: Sequence[Portrait],
                   n: int) -> Tuple[Portrait, List[Word]]:
    r = case.r
    if n == 0:
        return tree_core.identity(0), [EMPTY] * r

    gens = catalog.generator_portraits(n)
    low = catalog.generator_portraits(n - 1)
    b1 = bs[0]

    # b_i = (1, c) is moved to (c', 1) by conjugating with b_1^-1
    work = list(bs)
    swapped = [False] * r
    for i in range(1, r):
        if not tree_core.is_identity(decompose(work[i])[1]):
            work[i] = conjugate(invert(b1), work[i])
            swapped[i] = True

    witness = find_conjugator_in_Wn(gens[0], b1)
    if witness is None:
        raise ShapeError(f"b_1 is not conjugate to a_1 at level {n}")
    f = witness.conjugator
    if f.root_bit:
        f = compose(f, gens[0])
    d, e, _ = decompose(f)

    sections = [decompose(work[i])[0] for i in range(1, r)]
    sections.append(conjugate(d, low[r - 1]))
    u, xs = _periodic_step(catalog, case, sections, n - 1)

    x_r = xs[r - 1]
    p = compose(u, catalog.system.evaluate_word(x_r, n - 1))
    w = pair(p, compose(compose(e, invert(d)), p), 0)

    words = [EMPTY]
    for i in range(1, r):
        z = lift_to_G1(case, reduce_word(invert_word(x_r) + xs[i - 1]))
        if swapped[i]:
            z = (_gen(1),) + z
        words.append(reduce_word(z))
    logger.debug("Periodic step at level %d: swapped %s", n, swapped)
    return w, words


def _dihedral_word(case: GroupCase, lam: int) -> Word:
    """
    A word for (X, Y) in G^1 with X Y^-1 = (a_s a_r)^lam.

    Built from P = a_(s+1) = (a_s, a_r) and Q = a_1 a_(s+1) a_1 = (a_r, a_s).
    """
    first = (_gen(case.s + 1),)
    second = (_gen(1), _gen(case.s + 1), _gen(1))
    if lam < 0:
        first, second = second, first
    half, odd = divmod(abs(lam), 2)
    if odd:
        return first + (second + first) * half
    return (first + second) * half


def _kernel_preimage(case: GroupCase, k: Word, involutions) -> Word:
    """
    A word P in G^1, P = (X, Y), with X Y^-1 = k for k in the kernel of
    sgn_s * sgn_r.

    Every letter a_j outside {a_s, a_r} becomes D(W) a_(j+1) D(W)^-1, where W
    is the a_s/a_r part of k read so far and D sends a_s to a_(s+1) and a_r
    to a_1 a_(s+1) a_1. The a_s/a_r part itself is covered by _dihedral_word.
    """
    s, r = case.s, case.r
    a_s, a_r = f"a{s}", f"a{r}"
    image = {a_s: (_gen(s + 1),), a_r: (_gen(1), _gen(s + 1), _gen(1))}
    prefix: Word = EMPTY
    outer: Word = EMPTY
    head = []
    for name, _ in letters(k):
        if name in image:
            prefix = reduce_word(prefix + image[name], involutions)
            outer = reduce_word(outer + ((name, 1),), involutions)
        else:
            j = int(name[1:])
            head.extend(prefix + (_gen(j + 1),) + invert_word(prefix))
    if len(outer) % 2:
        raise CertificationError(
            f"Word {format_word(k)} is not in the kernel of sgn_{s} sgn_{r}"
        )
    lam = len(outer) // 2
    if outer and outer[0][0] == a_r:
        lam = -lam
    return reduce_word(tuple(head) + _dihedral_word(case, lam), involutions)


def _preperiodic_step(catalog: Catalog, case: GroupCase, bs: Sequence[Portrait],
                      n: int) -> Tuple[Portrait, List[Word]]:
    s, r = case.s, case.r
    involutions = catalog.involutions
    if n == 0:
        return tree_core.identity(0), [EMPTY] * r

    gens = catalog.generator_portraits(n)
    low = catalog.generator_portraits(n - 1)

    witness = find_conjugator_in_Wn(gens[0], bs[0])
    if witness is None:
        raise ShapeError(f"b_1 is not conjugate to sigma at level {n}")
    g = witness.conjugator
    g_inv = invert(g)
    work = [conjugate(g_inv, b) for b in bs]

    swapped = [False] * r
    for i in range(1, r):
        left, right, _ = decompose(work[i])
        if i == s:
            flip = not (are_conjugate_in_Wn(left, low[s - 1])
                        and are_conjugate_in_Wn(right, low[r - 1]))
        else:
            flip = not tree_core.is_identity(right)
        if flip:
            work[i] = conjugate(gens[0], work[i])
            swapped[i] = True

    sections = [decompose(work[i])[0] for i in range(1, r)]
    sections.append(decompose(work[s])[1])
    u, xs = _preperiodic_step(catalog, case, sections, n - 1)

    x_s, x_r = xs[s - 1], xs[r - 1]
    t = reduce_word(invert_word(x_s) + x_r, involutions)
    nu = sum(1 for name, _ in t if name in (f"a{s}", f"a{r}")) % 2
    k = reduce_word(t + (_gen(r),) * nu, involutions)
    p_word = _kernel_preimage(case, k, involutions)
    x_word, _, bit = word_sections(catalog.system, p_word, involutions)
    if bit:
        raise CertificationError(f"Kernel preimage {format_word(p_word)} swaps the root")

    v = compose(compose(u, catalog.system.evaluate_word(x_s, n - 1)),
                catalog.system.evaluate_word(x_word, n - 1))
    w = compose(g, pair(v, v, 0))

    back = invert_word(x_word) + invert_word(x_s)
    words = [EMPTY]
    for i in range(1, r):
        if i == s:
            z = invert_word(p_word)
        else:
            z = lift_to_G1(case, reduce_word(back + xs[i - 1], involutions))
        if swapped[i]:
            z = (_gen(1),) + z
        words.append(reduce_word(z, involutions))
    logger.debug("Pre-periodic step at level %d: swapped %s, nu=%d", n, swapped, nu)
    return w, words


def semirigidity_conjugator(case: GroupCase, bs: Sequence[Portrait],
                            max_level: int = None) -> SemirigidityResult:
    """
    w in W_n and words z_i with b_i = (w z_i) a_i (w z_i)^-1.

    Args:
        case: Periodic or pre-periodic model case
        bs: b_1, ..., b_r of a common level n
        max_level: Refuse above this level (default SEMIRIGID_MAX_LEVEL)

    Returns:
        SemirigidityResult, verified on every generator before it is returned

    Raises:
        ShapeError: The b_i fail the shape check
        CertificationError: The assembled conjugator does not verify
    """
    bs = list(bs)
    if max_level is None:
        max_level = settings.SEMIRIGID_MAX_LEVEL
    if not shape_check(case, bs):
        raise ShapeError(f"Elements do not have the shape of the {case} generators")
    n = bs[0].level
    if n > max_level:
        raise LevelError(f"Semirigidity refused at level {n}; limit is {max_level}")

    catalog = case_catalog(case)
    step = _periodic_step if case.is_periodic else _preperiodic_step
    w, words = step(catalog, case, bs, n)

    gens = catalog.generator_portraits(n)
    inner = tuple(catalog.system.evaluate_word(z, n) for z in words)
    for i, (a, b, z) in enumerate(zip(gens, bs, inner), start=1):
        if conjugate(compose(w, z), a) != b:
            raise CertificationError(f"Conjugator fails for b_{i} of {case} at level {n}")
    logger.info("Semirigidity conjugator for %s at level %d, word lengths %s",
                case, n, [len(z) for z in words])
    return SemirigidityResult(case, w, tuple(words), inner)


def generates_conjugate_group(case: GroupCase, bs: Sequence[Portrait], w: Portrait,
                              cap: int = None) -> bool:
    """Whether <b_1, ..., b_r> equals w G_n w^-1 as a set of elements."""
    n = w.level
    model = enumerate_group(case_catalog(case).generator_portraits(n), cap=cap, level=n)
    ours = enumerate_group(bs, cap=cap, level=n)
    if model.truncated or ours.truncated:
        raise LevelError(f"Set comparison at level {n} needs complete tables")
    moved = tree_core.batch_compose_right(
        tree_core.batch_compose_left(w, model.element_bits()), invert(w))
    expected = np.sort(tree_core.batch_keys(moved, n))
    return bool(np.array_equal(expected, ours.sorted_keys()))

"""
Level Groups Module

Finite-level subgroups of W_n: breadth-first closure of a generating set,
membership and words, normal closures, commutator subgroups, indices,
brute-force normalizers and centralizers, the closed-form orders and
Hausdorff dimensions of the model groups, and sign-based membership tests.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import settings, tree_core
from .catalogs import GroupCase, case_catalog
from .errors import LevelError, ShapeError, SystemDefinitionError, TableError
from .recursion_engine import Word, invert_word, letters
from .tree_core import Portrait

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class GroupTable:
    """
    Enumerated subgroup of W_n.

    keys holds the canonical integer key of every element in discovery order;
    when words are tracked, parents[i] and moves[i] say that element i equals
    generators[moves[i]] * element parents[i].
    """

    level: int
    generators: Tuple[Portrait, ...]
    keys: np.ndarray
    truncated: bool = False
    parents: Optional[np.ndarray] = None
    moves: Optional[np.ndarray] = None
    _order: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return int(self.keys.size)

    @property
    def tracks_words(self) -> bool:
        return self.parents is not None

    def sorted_keys(self) -> np.ndarray:
        if self._order is None:
            self._order = np.argsort(self.keys, kind='stable')
        return self.keys[self._order]

    def position(self, key) -> int:
        """Discovery index of an element key, or -1."""
        ordered = self.sorted_keys()
        target = np.array([key], dtype=ordered.dtype)
        i = int(np.searchsorted(ordered, target)[0])
        if i < ordered.size and ordered[i] == target[0]:
            return int(self._order[i])
        return -1

    def element_bits(self) -> np.ndarray:
        return tree_core.bits_from_keys(self.keys, self.level)

    def portraits(self) -> List[Portrait]:
        return tree_core.rows_to_portraits(self.element_bits(), self.level)


def _key_dtype(n: int):
    return np.uint64 if tree_core.uses_machine_keys(n) else object


def _key_array(values, n: int) -> np.ndarray:
    return np.array(list(values), dtype=_key_dtype(n))


def _common_level(gens: Sequence[Portrait], level: Optional[int]) -> int:
    levels = {g.level for g in gens}
    if level is not None:
        levels.add(tree_core.check_level(level))
    if len(levels) != 1:
        raise LevelError(f"Generators must share one level, got {sorted(levels)}")
    return levels.pop()


def enumerate_group(
    gens: Sequence[Portrait],
    cap: int = None,
    track_words: bool = False,
    level: int = None,
    progress_callback: Callable[[int, int], None] = None,
) -> GroupTable:
    """
    Breadth-first closure of a generating set.

    Args:
        gens: Generators of a common level
        cap: Stop after this many elements and flag the table as truncated
        track_words: Keep parent links so elements can be expressed as words
        level: Required when gens is empty
        progress_callback: Optional callback(found, cap)

    Returns:
        GroupTable in deterministic discovery order (frontier by frontier,
        generator index first, then frontier order)
    """
    if cap is None:
        cap = settings.DEFAULT_CAP
    gens = tuple(gens)
    n = _common_level(gens, level)
    count = tree_core.bit_length(n)

    start = np.zeros((1, count), dtype=bool)
    key_parts = [tree_core.batch_keys(start, n)]
    parent_parts = [np.array([-1], dtype=np.int64)]
    move_parts = [np.array([-1], dtype=np.int16)]
    seen = key_parts[0].copy()
    frontier = start
    frontier_index = np.array([0], dtype=np.int64)
    total = 1
    truncated = False

    while frontier.shape[0] and gens:
        cand_bits = np.concatenate([tree_core.batch_compose_left(g, frontier) for g in gens])
        cand_keys = tree_core.batch_keys(cand_bits, n)
        fresh = ~np.isin(cand_keys, seen)
        if not fresh.any():
            break
        fresh_idx = np.flatnonzero(fresh)
        _, first = np.unique(cand_keys[fresh_idx], return_index=True)
        chosen = fresh_idx[np.sort(first)]
        if total + chosen.size > cap:
            chosen = chosen[:max(cap - total, 0)]
            truncated = True
        rows = frontier.shape[0]
        new_keys = cand_keys[chosen]
        key_parts.append(new_keys)
        if track_words:
            parent_parts.append(frontier_index[chosen % rows])
            move_parts.append((chosen // rows).astype(np.int16))
        frontier_index = np.arange(total, total + chosen.size, dtype=np.int64)
        total += chosen.size
        seen = np.union1d(seen, new_keys)
        frontier = cand_bits[chosen]
        logger.debug("Level %d closure: %d elements, frontier %d", n, total, chosen.size)
        if progress_callback:
            progress_callback(total, cap)
        if truncated:
            logger.warning("Closure at level %d truncated at cap %d", n, cap)
            break

    table = GroupTable(
        level=n,
        generators=gens,
        keys=np.concatenate(key_parts),
        truncated=truncated,
        parents=np.concatenate(parent_parts) if track_words else None,
        moves=np.concatenate(move_parts) if track_words else None,
    )
    logger.info("Enumerated level-%d group: %d elements%s", n, table.size,
                " (truncated)" if truncated else "")
    return table


def table_from_keys(level: int, keys, generators: Sequence[Portrait] = ()) -> GroupTable:
    keys = np.unique(_key_array(keys, level) if not isinstance(keys, np.ndarray) else keys)
    return GroupTable(level=level, generators=tuple(generators), keys=keys)


def table_from_elements(level: int, bits: np.ndarray,
                        generators: Sequence[Portrait] = ()) -> GroupTable:
    return table_from_keys(level, tree_core.batch_keys(bits, level), generators)


def _require_full(table: GroupTable, what: str):
    if table.truncated:
        raise TableError(f"{what} needs a complete table; this one is truncated")


def order_log2(table: GroupTable) -> Optional[int]:
    """log2 of the group order, or None when the table is truncated."""
    if table.truncated:
        return None
    size = table.size
    if size & (size - 1):
        raise TableError(f"Table size {size} is not a power of two")
    return size.bit_length() - 1


def contains(table: GroupTable, p: Portrait) -> Optional[bool]:
    """Membership; None means unknown (not found in a truncated table)."""
    if p.level != table.level:
        raise LevelError(f"Element level {p.level} vs table level {table.level}")
    if table.position(p.key) >= 0:
        return True
    return None if table.truncated else False


def express(table: GroupTable, p: Portrait) -> Optional[Tuple[int, ...]]:
    """
    Shortest-discovered word for p as generator indices, product left to right.

    Returns None when p is not in the table.
    """
    if not table.tracks_words:
        raise TableError("Table was enumerated without track_words")
    index = table.position(p.key)
    if index < 0:
        return None
    word = []
    while table.parents[index] >= 0:
        word.append(int(table.moves[index]))
        index = int(table.parents[index])
    return tuple(word)


def express_word(table: GroupTable, p: Portrait, names: Sequence[str]) -> Optional[Word]:
    indices = express(table, p)
    if indices is None:
        return None
    return tuple((names[i], 1) for i in indices)


def is_subgroup(big: GroupTable, small: GroupTable) -> bool:
    """True when every element of small lies in big."""
    if big.level != small.level:
        raise LevelError(f"Tables at levels {big.level} and {small.level}")
    return bool(np.isin(small.keys, big.sorted_keys()).all())


def intersect(a: GroupTable, b: GroupTable) -> GroupTable:
    _require_full(a, "intersect")
    _require_full(b, "intersect")
    if a.level != b.level:
        raise LevelError(f"Tables at levels {a.level} and {b.level}")
    return table_from_keys(a.level, np.intersect1d(a.keys, b.keys))


def index(big: GroupTable, small: GroupTable) -> int:
    """[big : small] for a subgroup small of big."""
    _require_full(big, "index")
    _require_full(small, "index")
    if not is_subgroup(big, small):
        raise TableError("Index needs a subgroup of the ambient table")
    return big.size // small.size


def generating_set(table: GroupTable) -> Tuple[Portrait, ...]:
    """Generators of the table, or a greedy generating set if none are recorded."""
    if table.generators:
        return table.generators
    gens = []
    current = enumerate_group([], level=table.level)
    for key in table.keys:
        if current.position(key) < 0:
            gens.append(tree_core.from_key(table.level, int(key)))
            current = enumerate_group(gens, cap=table.size)
            if current.size == table.size:
                break
    return tuple(gens)


def normal_closure(ambient_gens: Sequence[Portrait], subset_gens: Sequence[Portrait],
                   cap: int = None, level: int = None) -> GroupTable:
    """Smallest subgroup containing subset_gens and closed under ambient conjugation."""
    everything = list(ambient_gens) + list(subset_gens)
    n = _common_level(everything, level) if everything else tree_core.check_level(level)
    gens = [g for g in subset_gens if not tree_core.is_identity(g)]
    while True:
        table = enumerate_group(gens, cap=cap, level=n)
        if table.truncated:
            return table
        additions = []
        for a in ambient_gens:
            for g in gens:
                c = tree_core.conjugate(a, g)
                if table.position(c.key) < 0 and c not in additions:
                    additions.append(c)
        if not additions:
            return table
        gens.extend(additions)


def commutator_subgroup(table: GroupTable, cap: int = None) -> GroupTable:
    gens = generating_set(table)
    comms = []
    for i, g in enumerate(gens):
        for h in gens[i + 1:]:
            comms.append(tree_core.compose(tree_core.compose(g, h),
                                           tree_core.invert(tree_core.compose(h, g))))
    return normal_closure(gens, comms, cap=cap, level=table.level)


def kernel_of_signs(table: GroupTable, levels: Iterable[int]) -> GroupTable:
    """Elements on which the product of sgn_m over the given levels is +1."""
    _require_full(table, "kernel_of_signs")
    levels = list(levels)
    columns = [m - 1 for m in levels]
    if any(c < 0 or c >= table.level for c in columns):
        raise LevelError(f"Sign levels {levels} outside [1, {table.level}]")
    bits = table.element_bits()
    parity = tree_core.batch_sign_bits(bits, table.level)[:, columns].sum(axis=1) & 1
    return table_from_keys(table.level, table.keys[parity == 0])


def product_table(a: GroupTable, b: GroupTable) -> GroupTable:
    """The subgroup a x b = {(x, y)} of W_(n+1) without a root swap."""
    if a.level != b.level:
        raise LevelError(f"Tables at levels {a.level} and {b.level}")
    n = a.level
    left, right = a.element_bits(), b.element_bits()
    rows = []
    for x in left:
        block = np.zeros((right.shape[0], tree_core.bit_length(n + 1)), dtype=bool)
        offset = 1
        for m in range(n):
            width = 1 << m
            block[:, offset:offset + width] = x[tree_core.level_slice(m)]
            block[:, offset + width:offset + 2 * width] = right[:, tree_core.level_slice(m)]
            offset += 2 * width
        rows.append(block)
    return table_from_elements(n + 1, np.concatenate(rows))


def is_transitive(gens: Sequence[Portrait], m: int) -> bool:
    """Whether the generated group has a single orbit on the 2^m leaves of T_m."""
    if not gens:
        return m == 0
    n = _common_level(gens, None)
    if m > n:
        raise LevelError(f"Level {m} exceeds generator level {n}")
    size = 1 << m
    if size == 1:
        return True
    source = np.arange(size)
    rows, cols = [], []
    for g in gens:
        rows.append(source)
        cols.append(tree_core.vertex_images(g, m))
    graph = coo_matrix(
        (np.ones(size * len(gens)), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    )
    components, _ = connected_components(graph, directed=True, connection='weak')
    return components == 1


def _f2_rank(vectors: Iterable[int]) -> int:
    basis = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def sign_image_is_full(gens: Sequence[Portrait], m: int) -> bool:
    """
    Whether the generators' sign vectors (sgn_1, ..., sgn_m) span F_2^m,
    which happens exactly when they generate all of W_m.
    """
    vectors = []
    for g in gens:
        if m > g.level:
            raise LevelError(f"Level {m} exceeds generator level {g.level}")
        bits = tree_core.sign_bits(g)[:m]
        vectors.append(int(sum(int(b) << i for i, b in enumerate(bits))))
    return _f2_rank(vectors) == m


def closed_form_log2_order(case: GroupCase, n: int) -> int:
    """log2 |G_n| for the model group of the given case."""
    if n < 0:
        raise LevelError(f"Level must be nonnegative, got {n}")
    r, s = case.r, case.s
    if case.is_periodic:
        return (1 << n) - 1 - sum((1 << (n - 1 - m)) * (m // r) for m in range(n))
    if n <= r:
        return (1 << n) - 1
    if (s, r) == (1, 2):
        return n + 1
    if s == 1:
        return (1 << n) - 3 * (1 << (n - r)) + 2
    if (s, r) == (2, 3):
        return (1 << n) - 5 * (1 << (n - 4)) + 2
    return (1 << n) - (1 << (n - r + 1)) + 1


def hausdorff_exact(case: GroupCase) -> Fraction:
    """Limit of log2 |G_n| / (2^n - 1)."""
    r, s = case.r, case.s
    if case.is_periodic:
        return 1 - Fraction(1, (1 << r) - 1)
    if (s, r) == (1, 2):
        return Fraction(0)
    if s == 1:
        return 1 - Fraction(3, 1 << r)
    if (s, r) == (2, 3):
        return 1 - Fraction(5, 16)
    return 1 - Fraction(2, 1 << r)


def hausdorff_partial(case: GroupCase, n: int) -> Fraction:
    if n < 1:
        raise LevelError(f"Partial dimension needs n >= 1, got {n}")
    return Fraction(closed_form_log2_order(case, n), (1 << n) - 1)


def element_order_log2_formula(r: int, i: int, n: int) -> int:
    """log2 of the order of a_i|T_n for the periodic generators."""
    return (n + r - i) // r


def pair_order_formula(s: int, r: int, i: int, j: int) -> Optional[int]:
    """Order of a_i a_j (i < j) for pre-periodic generators; None if infinite."""
    i, j = min(i, j), max(i, j)
    if j != i + s:
        return 4
    return 8 if r != 2 * s else None


def pair_order_doubling_period(s: int, r: int, i: int, j: int) -> Optional[int]:
    """
    Levels it takes the order of a_i a_j to double when it is infinite; None otherwise.

    With j = i + s and r = 2s, squaring a_i a_j moves the pair one level down
    and shifts the indices by one, so the same pair comes back after s levels:
    ord_n(a_i a_j) = 2 ord_{n-s}(a_i a_j).
    """
    if pair_order_formula(s, r, i, j) is not None:
        return None
    return s


def index_formula(case: GroupCase, n: int) -> int:
    """[G_n : H_n] for the pre-periodic model groups, valid for n >= r >= 3."""
    s, r = case.s, case.r
    if case.is_periodic or r < 3 or n < r:
        raise SystemDefinitionError(f"Index formula needs a pre-periodic case with n >= r >= 3")
    if s == 1:
        return 8
    if (s, r) == (2, 3):
        return 8 if n >= 4 else 4
    return 4


def count_transitive(table: GroupTable) -> int:
    """Number of elements acting as a single 2^n-cycle on the leaves."""
    _require_full(table, "count_transitive")
    signs = tree_core.batch_sign_bits(table.element_bits(), table.level)
    return int(signs.all(axis=1).sum())


def _conjugates_of(g: Portrait, everything: np.ndarray, inverses: np.ndarray) -> np.ndarray:
    n = g.level
    return tree_core.batch_compose(tree_core.batch_compose_right(everything, g), inverses, n)


def _brute_force_level(n: int, allow_large: bool):
    if n > settings.BRUTE_FORCE_MAX_LEVEL and not allow_large:
        raise LevelError(
            f"Brute force over W_{n} refused; limit is level {settings.BRUTE_FORCE_MAX_LEVEL}"
        )


def normalizer_in_Wn(table: GroupTable, allow_large: bool = False) -> GroupTable:
    """Exhaustive normalizer of a full table in W_n."""
    _require_full(table, "normalizer_in_Wn")
    n = table.level
    _brute_force_level(n, allow_large)
    everything = tree_core.all_elements(n, allow_large=allow_large)
    inverses = tree_core.batch_invert(everything, n)
    members = table.sorted_keys()
    keep = np.ones(everything.shape[0], dtype=bool)
    for g in generating_set(table):
        keys = tree_core.batch_keys(_conjugates_of(g, everything, inverses), n)
        keep &= np.isin(keys, members)
    return table_from_elements(n, everything[keep])


def centralizer_in_Wn(target, allow_large: bool = False) -> GroupTable:
    """Exhaustive centralizer in W_n of a table or a single element."""
    if isinstance(target, Portrait):
        gens, n = (target,), target.level
    else:
        gens, n = generating_set(target), target.level
    _brute_force_level(n, allow_large)
    everything = tree_core.all_elements(n, allow_large=allow_large)
    keep = np.ones(everything.shape[0], dtype=bool)
    for g in gens:
        keep &= (tree_core.batch_compose_right(everything, g)
                 == tree_core.batch_compose_left(g, everything)).all(axis=1)
    return table_from_elements(n, everything[keep])


@dataclass(frozen=True)
class SignMatrixClass:
    """((sgn_s(u), sgn_s(v)), (sgn_r(u), sgn_r(v))) and the root bit of p = (u, v) sigma^b."""

    matrix: Tuple[Tuple[int, int], Tuple[int, int]]
    swap: int


_IMAGE_MATRICES = {
    ((1, 1), (1, 1)),
    ((-1, 1), (1, -1)),
    ((1, -1), (-1, 1)),
    ((-1, -1), (-1, -1)),
}


def sign_matrix_class(p: Portrait, s: int, r: int) -> SignMatrixClass:
    if s < 2:
        raise ShapeError(f"Sign matrix criterion needs s >= 2, got s={s}")
    if not 1 <= s < r:
        raise ShapeError(f"Need 1 <= s < r, got s={s}, r={r}")
    if p.level != r + 1:
        raise LevelError(f"Sign matrix criterion works at level {r + 1}, got {p.level}")
    u, v, swap = tree_core.decompose(p)
    matrix = ((tree_core.sign(u, s), tree_core.sign(v, s)),
              (tree_core.sign(u, r), tree_core.sign(v, r)))
    return SignMatrixClass(matrix, swap)


def in_Grplus1_by_signs(p: Portrait, s: int, r: int) -> bool:
    """Membership in G_(r+1) read off the sign matrix (s >= 2)."""
    return sign_matrix_class(p, s, r).matrix in _IMAGE_MATRICES


def batch_in_Grplus1_by_signs(bits: np.ndarray, s: int, r: int) -> np.ndarray:
    """Row-wise in_Grplus1_by_signs for a matrix of level-(r+1) portraits."""
    if s < 2 or not s < r:
        raise ShapeError(f"Sign matrix criterion needs 2 <= s < r, got s={s}, r={r}")
    if bits.shape[1] != tree_core.bit_length(r + 1):
        raise LevelError(f"Rows are not level-{r + 1} portraits")
    # sgn_m of a section is the parity of its half of level m of the parent
    parities = []
    for m in (s, r):
        block = bits[:, tree_core.level_slice(m)]
        half = block.shape[1] // 2
        parities.append(block[:, :half].sum(axis=1) & 1)
        parities.append(block[:, half:].sum(axis=1) & 1)
    su, sv, ru, rv = parities
    # image of G_(r+1): I, A, B and AB = -1
    identity_like = (su == 0) & (sv == 0) & (ru == 0) & (rv == 0)
    first = (su == 1) & (sv == 0) & (ru == 0) & (rv == 1)
    second = (su == 0) & (sv == 1) & (ru == 1) & (rv == 0)
    negative = (su == 1) & (sv == 1) & (ru == 1) & (rv == 1)
    return identity_like | first | second | negative


def lift_to_G1(case: GroupCase, x_word: Word) -> Word:
    """
    A word in the generators whose element lies in G^1 with first section x.

    Periodic: a_j -> a_(j+1) for j < r and a_r -> a_1 a_1.
    Pre-periodic: a_j -> a_(j+1) for j not in {s, r}, a_s -> a_(s+1),
    a_r -> a_1 a_(s+1) a_1.
    """
    r, s = case.r, case.s
    table = {}
    for j in range(1, r + 1):
        if case.is_periodic:
            table[f"a{j}"] = ((f"a{j + 1}", 1),) if j < r else (("a1", 1), ("a1", 1))
        elif j == s:
            table[f"a{j}"] = ((f"a{s + 1}", 1),)
        elif j == r:
            table[f"a{j}"] = (("a1", 1), (f"a{s + 1}", 1), ("a1", 1))
        else:
            table[f"a{j}"] = ((f"a{j + 1}", 1),)
    out = []
    for name, unit in letters(x_word):
        if name not in table:
            raise SystemDefinitionError(f"Symbol {name!r} is not a generator of {case}")
        image = table[name]
        out.extend(image if unit > 0 else invert_word(image))
    return tuple(out)


def model_group(case: GroupCase, n: int, cap: int = None, track_words: bool = False,
                progress_callback=None) -> GroupTable:
    """G_n for a case, enumerated from its generators."""
    gens = case_catalog(case).generator_portraits(n)
    return enumerate_group(gens, cap=cap, track_words=track_words, level=n,
                           progress_callback=progress_callback)


def subgroup_H(case: GroupCase, n: int, i: int = 1, cap: int = None) -> GroupTable:
    """
    H^(i)_n (periodic: normal closure of a_j, j != i) or H_n
    (pre-periodic: normal closure of a_j, j not in {s, r}).
    """
    gens = case_catalog(case).generator_portraits(n)
    if case.is_periodic:
        subset = [g for j, g in enumerate(gens, start=1) if j != i]
    else:
        subset = [g for j, g in enumerate(gens, start=1) if j not in (case.s, case.r)]
    return normal_closure(gens, subset, cap=cap, level=n)


def subgroup_K(case: GroupCase, n: int, cap: int = None) -> GroupTable:
    """K_n = H_n <a_s a_r>, the kernel of sgn_s sgn_r on G_n."""
    if case.is_periodic:
        raise SystemDefinitionError("K is defined for pre-periodic cases")
    gens = case_catalog(case).generator_portraits(n)
    subset = [g for j, g in enumerate(gens, start=1) if j not in (case.s, case.r)]
    subset.append(tree_core.compose(gens[case.s - 1], gens[case.r - 1]))
    return normal_closure(gens, subset, cap=cap, level=n)


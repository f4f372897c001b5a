"""
Verify Module

Named suites that reproduce the closed-form claims at finite levels and
compare the fast algorithms against exhaustive oracles. Each suite returns
a SuiteResult holding one Check per claim.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

import numpy as np

from . import catalogs, conjugacy, dynamics, level_groups, settings, tree_core
from .catalogs import GroupCase
from .recursion_engine import is_trivial_to_level
from .semirigidity import generates_conjugate_group, semirigidity_conjugator
from .two_adic import make

logger = logging.getLogger(__name__)

FINITE_CASES = (
    GroupCase.periodic(1), GroupCase.periodic(2), GroupCase.periodic(3),
    GroupCase.prep(1, 2), GroupCase.prep(1, 3), GroupCase.prep(2, 3), GroupCase.prep(2, 4),
)


@dataclass(frozen=True)
class Check:
    description: str
    passed: bool
    detail: str = ''
    skipped: bool = False


@dataclass
class SuiteResult:
    name: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def skipped(self) -> int:
        return sum(c.skipped for c in self.checks)

    def add(self, description: str, passed, detail: str = ''):
        check = Check(description, bool(passed), detail)
        self.checks.append(check)
        log = logger.info if check.passed else logger.warning
        log("[%s] %s: %s %s", self.name, description, "pass" if check.passed else "FAIL", detail)

    def skip(self, description: str, detail: str = ''):
        """Record a check that was not run at this level; it does not fail the suite."""
        self.checks.append(Check(description, True, detail, skipped=True))
        logger.info("[%s] %s: skipped %s", self.name, description, detail)

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'passed': self.passed,
            'checks': [{'description': c.description, 'passed': c.passed, 'detail': c.detail,
                        'skipped': c.skipped}
                       for c in self.checks],
        }


def _order(case: GroupCase, n: int, cap: int) -> Tuple[int, bool]:
    table = level_groups.model_group(case, n, cap=cap)
    return level_groups.order_log2(table), table.truncated


def _vertex_swaps(n: int) -> List[tree_core.Portrait]:
    gens = []
    for v in range(tree_core.bit_length(n)):
        bits = np.zeros(tree_core.bit_length(n), dtype=bool)
        bits[v] = True
        gens.append(tree_core.Portrait(n, bits))
    return gens


def suite_core(level: int, seed: int, cap: int) -> SuiteResult:
    """|W_n|, element orders and the abelianization."""
    result = SuiteResult('core')
    for n in range(1, min(level, 4) + 1):
        table = level_groups.enumerate_group(_vertex_swaps(n), cap=cap, level=n)
        got = level_groups.order_log2(table)
        result.add(f"|W_{n}| = 2^{(1 << n) - 1}", got == (1 << n) - 1, f"log2 = {got}")

    for r in (2, 3):
        cat = catalogs.periodic_generators(r)
        bad = [(i, n) for n in range(1, 11)
               for i, g in enumerate(cat.generator_portraits(n), start=1)
               if tree_core.order_log2(g) != level_groups.element_order_log2_formula(r, i, n)]
        result.add(f"periodic r={r}: log2 ord(a_i) = floor((n+r-i)/r), n <= 10", not bad, f"{bad[:3]}")

    for case in FINITE_CASES:
        if case.is_periodic:
            continue
        gens = catalogs.case_catalog(case).generator_portraits(12)
        result.add(f"{case}: generators are involutions at level 12",
                   all(tree_core.is_identity(tree_core.compose(g, g)) for g in gens))
        _pair_orders(result, case)

    for case in (GroupCase.prep(1, 3), GroupCase.prep(2, 3)):
        gens = catalogs.case_catalog(case).generator_portraits(case.r)
        basis = [tuple(int(b) for b in tree_core.sign_bits(g)[:case.r]) for g in gens]
        expected = [tuple(int(i == j) for j in range(case.r)) for i in range(case.r)]
        result.add(f"{case}: sign vectors of the generators are the standard basis",
                   sorted(basis) == sorted(expected), f"{basis}")

    n = min(level, 4)
    case = GroupCase.periodic(2)
    table = level_groups.model_group(case, n, cap=cap)
    commutators = level_groups.commutator_subgroup(table, cap=cap)
    meet = level_groups.intersect(level_groups.subgroup_H(case, n, 1, cap=cap),
                                  level_groups.subgroup_H(case, n, 2, cap=cap))
    result.add(f"periodic r=2: [G_{n}, G_{n}] = H^(1) meet H^(2)",
               commutators.size == meet.size and level_groups.is_subgroup(meet, commutators),
               f"{commutators.size} vs {meet.size}")
    return result


def _pair_orders(result: SuiteResult, case: GroupCase, n: int = 12):
    s, r = case.s, case.r
    gens = catalogs.case_catalog(case).generator_portraits(n)
    bad = []
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            expected = level_groups.pair_order_formula(s, r, i, j)
            got = tree_core.order_log2(tree_core.compose(gens[i - 1], gens[j - 1]))
            if expected is None:
                period = level_groups.pair_order_doubling_period(s, r, i, j)
                low = catalogs.case_catalog(case).generator_portraits(n - period)
                before = tree_core.order_log2(tree_core.compose(low[i - 1], low[j - 1]))
                if got != before + 1:
                    bad.append((i, j, got))
            elif 1 << got != expected:
                bad.append((i, j, 1 << got))
    result.add(f"{case}: orders of a_i a_j follow the 4 / 8 / doubling pattern", not bad, f"{bad}")


def _closed_form_only(result: SuiteResult, case: GroupCase, n: int, expected: int, level: int):
    closed = level_groups.closed_form_log2_order(case, n)
    description = f"{case} log2|G_{n}| = {expected}"
    if closed != expected:
        result.add(description, False, f"formula={closed}")
    else:
        result.skip(description, f"formula={closed}; enumeration runs at --level {n}, got {level}")


_PERIODIC_ORDERS = {1: [1, 2, 3, 4, 5, 6], 2: [1, 3, 6, 12, 23], 3: [1, 3, 7, 14]}
_PREP_ORDERS = {(1, 3): {4: 12, 5: 22}, (2, 3): {4: 13, 5: 24}}


def suite_orders(level: int, seed: int, cap: int) -> SuiteResult:
    """Enumerated orders against the closed forms, and where signs stop being full."""
    result = SuiteResult('orders')
    for r, values in _PERIODIC_ORDERS.items():
        case = GroupCase.periodic(r)
        for n, expected in enumerate(values, start=1):
            if r > 1 and n > max(level, 4):
                _closed_form_only(result, case, n, expected, level)
                continue
            got, truncated = _order(case, n, cap)
            closed = level_groups.closed_form_log2_order(case, n)
            result.add(f"{case} log2|G_{n}| = {expected}",
                       got == expected == closed and not truncated, f"bfs={got} formula={closed}")

    case = GroupCase.prep(1, 2)
    bad = []
    for n in range(2, 9):
        got, _ = _order(case, n, cap)
        if got != n + 1 or level_groups.closed_form_log2_order(case, n) != n + 1:
            bad.append((n, got))
    result.add("prep:1,2 log2|G_n| = n + 1 for 2 <= n <= 8", not bad, f"{bad}")

    for (s, r), values in _PREP_ORDERS.items():
        case = GroupCase.prep(s, r)
        for n, expected in values.items():
            if n > level:
                _closed_form_only(result, case, n, expected, level)
                continue
            got, truncated = _order(case, n, cap)
            closed = level_groups.closed_form_log2_order(case, n)
            result.add(f"{case} log2|G_{n}| = {expected}",
                       got == expected == closed and not truncated, f"bfs={got} formula={closed}")

    case = GroupCase.prep(2, 4)
    for n in range(1, min(level, 4) + 1):
        got, _ = _order(case, n, cap)
        result.add(f"{case} log2|G_{n}| = 2^{n} - 1", got == (1 << n) - 1, f"bfs={got}")

    for case in (GroupCase.periodic(1), GroupCase.periodic(2), GroupCase.periodic(3),
                 GroupCase.prep(1, 3), GroupCase.prep(2, 3)):
        top = case.r + 2
        gens = catalogs.case_catalog(case).generator_portraits(top)
        pattern = [level_groups.sign_image_is_full(gens, m) for m in range(1, top + 1)]
        expected = [m <= case.r for m in range(1, top + 1)]
        result.add(f"{case}: sign image full exactly for n <= r", pattern == expected, f"{pattern}")
    return result


_DIMENSIONS = {
    GroupCase.periodic(2): Fraction(2, 3),
    GroupCase.periodic(3): Fraction(6, 7),
    GroupCase.prep(1, 3): Fraction(5, 8),
    GroupCase.prep(2, 3): Fraction(11, 16),
    GroupCase.prep(2, 4): Fraction(7, 8),
    GroupCase.prep(1, 2): Fraction(0),
}


def suite_hausdorff(level: int, seed: int, cap: int) -> SuiteResult:
    result = SuiteResult('hausdorff')
    for case, expected in _DIMENSIONS.items():
        exact = level_groups.hausdorff_exact(case)
        partial = level_groups.hausdorff_partial(case, 25)
        result.add(f"{case}: dimension {expected}",
                   exact == expected and abs(float(partial - expected)) < 1e-6,
                   f"exact={exact} partial(25)={float(partial):.8f}")
    return result


def _brute_conjugacy_classes(n: int) -> Tuple[np.ndarray, np.ndarray]:
    everything = tree_core.all_elements(n)
    inverses = tree_core.batch_invert(everything, n)
    labels = np.empty(everything.shape[0], dtype=np.uint64)
    for i, row in enumerate(everything):
        p = tree_core.Portrait(n, row)
        conj = tree_core.batch_compose(tree_core.batch_compose_right(everything, p), inverses, n)
        labels[i] = tree_core.batch_keys(conj, n).min()
    return everything, labels


def suite_conjugacy(level: int, seed: int, cap: int) -> SuiteResult:
    """Conjugacy decisions against exhaustive search, power conjugators, r = 2 rigidity."""
    result = SuiteResult('conjugacy')
    rng = np.random.default_rng(seed)

    everything, labels = _brute_conjugacy_classes(3)
    forms = [conjugacy.conjugacy_canonical_form(tree_core.Portrait(3, row)) for row in everything]
    pairs = set(zip(forms, labels.tolist()))
    agree = len(pairs) == len(set(forms)) == len(set(labels.tolist()))
    result.add("W_3: canonical forms match exhaustive classes on all ordered pairs", agree,
               f"{len(set(forms))} classes")

    n = 4
    all4 = tree_core.all_elements(n)
    inverses = tree_core.batch_invert(all4, n)
    mismatches = 0
    for trial in range(1000):
        p = tree_core.random_element(n, rng)
        if trial % 2:
            q = tree_core.conjugate(tree_core.random_element(n, rng), p)
        else:
            q = tree_core.random_element(n, rng)
        conj = tree_core.batch_compose(tree_core.batch_compose_right(all4, p), inverses, n)
        brute = bool(np.isin(np.array([q.key], dtype=np.uint64), tree_core.batch_keys(conj, n))[0])
        if conjugacy.are_conjugate_in_Wn(p, q) != brute:
            mismatches += 1
        elif brute:
            conjugacy.find_conjugator_in_Wn(p, q)
    result.add("W_4: 1000 random pairs agree with exhaustive search", mismatches == 0,
               f"{mismatches} mismatches")

    failures = 0
    for _ in range(100):
        w = tree_core.random_element(10, rng)
        for k in (3, 5, 7, 15):
            try:
                conjugacy.power_conjugator(w, k)
            except Exception as e:
                logger.debug("Power conjugator failed: %s", e)
                failures += 1
    result.add("W_10: power conjugators for k in 3, 5, 7, 15", failures == 0, f"{failures} failures")

    case = GroupCase.periodic(2)
    for n in (3, 4):
        if n > level:
            continue
        found = 0
        for _ in range(20):
            x = tree_core.random_element(n, rng)
            a1, a2 = catalogs.case_catalog(case).generator_portraits(n)
            w = conjugacy.rigidity_conjugator_r2(tree_core.conjugate(x, a1), tree_core.conjugate(x, a2))
            found += w is not None
        result.add(f"r=2 rigidity conjugators at level {n}", found == 20, f"{found}/20")

    for n in range(2, min(level, 4) + 1):
        a1, a2 = catalogs.case_catalog(case).generator_portraits(n)
        product = conjugacy.conjugacy_class_size(a1) * conjugacy.conjugacy_class_size(a2)
        result.add(f"r=2 class sizes multiply to 2^(2^{n} - 2) at level {n}",
                   product == 1 << ((1 << n) - 2), f"{product}")
        table = level_groups.model_group(case, n, cap=cap)
        centralizer = level_groups.centralizer_in_Wn(table)
        result.add(f"r=2 centralizer of G_{n} has order 2", centralizer.size == 2,
                   f"{centralizer.size}")
    return result


_SEMIRIGID_CASES = (GroupCase.periodic(2), GroupCase.periodic(3),
                    GroupCase.prep(1, 3), GroupCase.prep(2, 3))


def suite_semirigid(level: int, seed: int, cap: int) -> SuiteResult:
    result = SuiteResult('semirigid')
    rng = np.random.default_rng(seed)
    n = min(level + 1, 5)
    for case in _SEMIRIGID_CASES:
        failures = 0
        for _ in range(20):
            bs = conjugacy.generator_conjugates(case, n, rng)
            try:
                semirigidity_conjugator(case, bs)
            except Exception as e:
                logger.debug("Semirigidity failed for %s: %s", case, e)
                failures += 1
        result.add(f"{case}: 20 random conjugate tuples at level {n}", failures == 0,
                   f"{failures} failures")

        m = min(level, 4)
        bs = conjugacy.generator_conjugates(case, m, rng)
        answer = semirigidity_conjugator(case, bs)
        result.add(f"{case}: <b_i> = w G_{m} w^-1 at level {m}",
                   generates_conjugate_group(case, bs, answer.w, cap=cap))
    return result


def suite_normalizer(level: int, seed: int, cap: int) -> SuiteResult:
    """Explicit normalizer elements and the anatomy of N_4 for (2, 3)."""
    result = SuiteResult('normalizer')
    for k in (3, 5, 11):
        cat = catalogs.odometer_zk(k, precision=14)
        result.add(f"z_{k} a z_{k}^-1 = a^{k} at level 12", is_trivial_to_level(cat.system, cat.word('t'), 12))

    ks = (make(3), make(5), make(7))
    cat = catalogs.periodic_normalizer(3, ks)
    bad = []
    for i in range(1, 4):
        w = cat.evaluate(f"w{i}", 9)
        for j, a in enumerate(cat.generator_portraits(9), start=1):
            k = ks[(j - i - 1) % 3]
            if tree_core.conjugate(w, a) != tree_core.power(a, k):
                bad.append((i, j))
    result.add("r=3: w_i a_j w_i^-1 = a_j^(k_(j-i)) at level 9", not bad, f"{bad}")

    bad = []
    for k in (3, 5, 7, 9):
        cat = catalogs.dihedral_vw(k)
        a0 = cat.evaluate('a0', 10)
        if tree_core.conjugate(cat.evaluate('w', 10), a0) != tree_core.power(a0, k):
            bad.append(k)
    result.add("prep:1,2: w_k a_0 w_k^-1 = a_0^k at level 10", not bad, f"{bad}")

    if level >= 4:
        case = GroupCase.prep(2, 3)
        g4 = level_groups.model_group(case, 4, cap=cap)
        n4 = level_groups.normalizer_in_Wn(g4)
        w0 = catalogs.prep_w0().evaluate('w0', 4)
        coset = tree_core.batch_keys(tree_core.batch_compose_right(g4.element_bits(), w0), 4)
        union = np.union1d(g4.keys, coset)
        result.add("prep:2,3: N_4 = G_4 u G_4 w_0 with index 2",
                   level_groups.index(n4, g4) == 2 and np.array_equal(np.sort(union), n4.sorted_keys()),
                   f"|N_4| = {n4.size}, |G_4| = {g4.size}")
        w1 = catalogs.prep_w_chain(2, 3, 1).evaluate('w1', 4)
        result.add("prep:2,3: w_1 lies in G_4", level_groups.contains(g4, w1))
        everything = tree_core.all_elements(4)
        by_signs = level_groups.batch_in_Grplus1_by_signs(everything, 2, 3)
        by_table = np.isin(tree_core.batch_keys(everything, 4), g4.sorted_keys())
        result.add("prep:2,3: sign-matrix test equals membership on all of W_4",
                   np.array_equal(by_signs, by_table), f"{int((by_signs != by_table).sum())} differ")
    return result


def suite_odometer(level: int, seed: int, cap: int) -> SuiteResult:
    result = SuiteResult('odometer')
    n = min(level, 4)
    for case, expected in ((GroupCase.periodic(2), 1024), (GroupCase.prep(1, 3), 512)):
        table = level_groups.model_group(case, n, cap=cap)
        count = level_groups.count_transitive(table)
        target = table.size >> case.r
        result.add(f"{case}: transitive elements of G_{n} = |G_{n}| / 2^r", count == target,
                   f"{count}" + (f" (expected {expected})" if n == 4 else ""))

    for case in FINITE_CASES:
        orbit = dynamics.OrbitClass('periodic' if case.is_periodic else 'prep', r=case.r, s=case.s)
        b = dynamics.b_infinity(orbit, 8)
        result.add(f"{case}: b_infinity is an odometer at level 8", conjugacy.is_odometer_to_level(b))

    if level >= 4:
        for case in (GroupCase.periodic(2), GroupCase.prep(2, 3)):
            table = level_groups.model_group(case, 4, cap=cap)
            normalizer = level_groups.normalizer_in_Wn(table)
            if case.is_periodic:
                start = catalogs.case_catalog(case).evaluate('a0', 4)
            else:
                start = dynamics.b_infinity(dynamics.OrbitClass('prep', r=case.r, s=case.s), 4)
            orbit = conjugacy.odometer_orbit(normalizer, start)
            transitive = conjugacy.transitive_keys(table)
            result.add(f"{case}: N_4-orbit of the odometer = transitive part of G_4",
                       orbit == transitive, f"{len(orbit)} vs {len(transitive)}")
    return result


_CLASSIFICATION = (
    ('0', 'Q', ('periodic', 0, 1)),
    ('-1', 'Q', ('periodic', 0, 2)),
    ('-2', 'Q', ('prep', 1, 2)),
    ('1', 'F3', ('prep', 1, 2)),
    ('1', 'Q', ('infinite', 0, 0)),
)


def _kernel_condition(case: GroupCase, k: int) -> bool:
    if case.s >= 2 and case.r >= 4:
        return k % 4 == 1
    if case.s == 1:
        return k % 8 in (1, 7)
    return k % 8 == 1


def suite_arith(level: int, seed: int, cap: int) -> SuiteResult:
    result = SuiteResult('arith')
    for text, field_text, (kind, s, r) in _CLASSIFICATION:
        f = dynamics.parse_field(field_text)
        orbit = dynamics.critical_orbit(dynamics.parse_parameter(text, f), f)
        result.add(f"c={text} over {f}: {kind} s={s} r={r}",
                   (orbit.kind, orbit.s, orbit.r) == (kind, s, r), f"{orbit.to_dict()}")

    n = min(level, 4)
    chain = catalogs.infinite_chain(n).generator_portraits(n)
    table = level_groups.enumerate_group(chain, cap=cap, level=n)
    result.add(f"chain generators generate W_{n}",
               level_groups.order_log2(table) == (1 << n) - 1, f"{table.size}")

    for case in (GroupCase.prep(2, 4), GroupCase.prep(1, 3), GroupCase.prep(2, 3)):
        bad = [k for k in range(1, 16, 2)
               if dynamics.prep_coset_label(case.s, case.r, k).is_trivial != _kernel_condition(case, k)]
        result.add(f"{case}: label kernel over k mod 16", not bad, f"{bad}")

    bounds = {GroupCase.prep(2, 4): "divides 2", GroupCase.prep(1, 3): "divides 2",
              GroupCase.prep(2, 3): "divides 4"}
    for case, expected in bounds.items():
        result.add(f"{case}: index bound {expected}", dynamics.index_bound(case) == expected)

    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(100):
        k, k2 = (int(x) * 2 + 1 for x in rng.integers(0, 1 << 14, size=2))
        for r in (1, 2, 3):
            left = dynamics.periodic_coset_label(r, k) * dynamics.periodic_coset_label(r, k2)
            if left != dynamics.periodic_coset_label(r, k * k2):
                bad += 1
    result.add("diagonal labels multiply like k", bad == 0, f"{bad} failures")
    return result


SUITES: Dict[str, Callable[[int, int, int], SuiteResult]] = {
    'core': suite_core,
    'orders': suite_orders,
    'hausdorff': suite_hausdorff,
    'conjugacy': suite_conjugacy,
    'semirigid': suite_semirigid,
    'normalizer': suite_normalizer,
    'odometer': suite_odometer,
    'arith': suite_arith,
}


def run_suite(name: str, level: int = 4, seed: int = None, cap: int = None) -> SuiteResult:
    """Run one named suite; level caps the enumerated and brute-force levels."""
    if name not in SUITES:
        raise ValueError(f"Unknown suite {name!r}; choose from {sorted(SUITES)}")
    if seed is None:
        seed = settings.DEFAULT_SEED
    if cap is None:
        cap = settings.DEFAULT_CAP
    logger.info("Running suite %s at level %d", name, level)
    return SUITES[name](level, seed, cap)


def run_all(level: int = 4, seed: int = None, cap: int = None,
            progress_callback: Callable[[int, int], None] = None) -> List[SuiteResult]:
    results = []
    for i, name in enumerate(SUITES, start=1):
        results.append(run_suite(name, level=level, seed=seed, cap=cap))
        if progress_callback:
            progress_callback(i, len(SUITES))
    return results

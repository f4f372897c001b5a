"""
Catalogs Module

Named recursion systems: the odometer and its normalizer elements, the
generators of the periodic and strictly pre-periodic model groups, the
infinite chain b_i, and the explicit normalizer chains.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

from . import tree_core
from .errors import SystemDefinitionError
from .recursion_engine import (
    RecursionSystem,
    Word,
    as_word,
    define_system,
    invert_word,
    parse_word,
)
from .tree_core import Portrait
from .two_adic import TwoAdic, TwoAdicLike, as_two_adic, half_minus_one

logger = logging.getLogger(__name__)

_CASE = re.compile(r'^\s*(periodic|prep)\s*:\s*(\d+)\s*(?:,\s*(\d+))?\s*$')


@dataclass(frozen=True)
class GroupCase:
    """
    Periodic{r} (s = 0) or PrePeriodic{s, r} with 1 <= s < r.
    """

    r: int
    s: int = 0

    def __post_init__(self):
        if self.r < 1:
            raise SystemDefinitionError(f"Need r >= 1, got r={self.r}")
        if self.s and not 1 <= self.s < self.r:
            raise SystemDefinitionError(f"Need 1 <= s < r, got s={self.s}, r={self.r}")

    @property
    def is_periodic(self) -> bool:
        return self.s == 0

    @classmethod
    def periodic(cls, r: int) -> 'GroupCase':
        return cls(r=r)

    @classmethod
    def prep(cls, s: int, r: int) -> 'GroupCase':
        if s < 1:
            raise SystemDefinitionError(f"Pre-periodic case needs s >= 1, got {s}")
        return cls(r=r, s=s)

    @classmethod
    def parse(cls, text: str) -> 'GroupCase':
        """Parse "periodic:r" or "prep:s,r"."""
        match = _CASE.match(text or '')
        if not match:
            raise SystemDefinitionError(
                f"Bad case {text!r}; use 'periodic:r' or 'prep:s,r'"
            )
        kind, first, second = match.groups()
        if kind == 'periodic':
            if second is not None:
                raise SystemDefinitionError(f"Periodic case takes one parameter: {text!r}")
            return cls.periodic(int(first))
        if second is None:
            raise SystemDefinitionError(f"Pre-periodic case needs 's,r': {text!r}")
        return cls.prep(int(first), int(second))

    def __str__(self):
        return f"periodic:{self.r}" if self.is_periodic else f"prep:{self.s},{self.r}"


@dataclass(frozen=True, eq=False)
class Catalog:
    """A recursion system with its ordered generators and distinguished words."""

    system: RecursionSystem
    generators: Tuple[str, ...]
    named: Dict[str, Word] = field(default_factory=dict)
    involutions: frozenset = frozenset()

    def word(self, name: str) -> Word:
        """A named word, a symbol, or a word over both such as "a1 a0^-1"."""
        if name in self.named:
            return self.named[name]
        if name in self.system:
            return ((name, 1),)
        expanded = []
        for symbol, exponent in parse_word(name):
            if symbol in self.named:
                base = self.named[symbol] if exponent > 0 else invert_word(self.named[symbol])
                expanded.extend(base * abs(exponent))
            elif symbol in self.system:
                expanded.append((symbol, exponent))
            else:
                raise SystemDefinitionError(f"Catalog has no element {symbol!r}")
        return tuple(expanded)

    def evaluate(self, name: str, n: int) -> Portrait:
        """Evaluate a symbol or a named word at level n."""
        return self.system.evaluate_word(self.word(name), n)

    def generator_portraits(self, n: int) -> list:
        return [self.system.evaluate(g, n) for g in self.generators]


def _gen(i: int) -> str:
    return f"a{i}"


def _w(name: str, exponent=1) -> Tuple[str, object]:
    return (name, exponent)


def _product_word(names: Sequence[str]) -> Word:
    return tuple(_w(n) for n in names)


def standard_odometer() -> Catalog:
    """The adding machine a = (a, 1) sigma."""
    system = define_system({'a': ('a', (), 1)}, name='odometer')
    return Catalog(system, ('a',))


def _odd(k: TwoAdicLike, precision: int = None) -> TwoAdic:
    k = as_two_adic(k, precision)
    if not k.is_unit:
        raise SystemDefinitionError(f"Exponent k must be odd, got {k}")
    return k


def odometer_zk(k: TwoAdicLike, precision: int = None) -> Catalog:
    """
    Normalizer element z_k = (z_k, a^l z_k), l = (k - 1) / 2, with z_k a z_k^-1 = a^k.

    Named words: 'z' and the relator 't' = z a z^-1 a^-k.
    """
    k = _odd(k, precision)
    ell = half_minus_one(k)
    system = define_system({
        'a': ('a', (), 1),
        'z': ('z', (_w('a', ell), _w('z')), 0),
    }, name=f'odometer_z({k.residue})')
    relator = (_w('z'), _w('a'), _w('z', -1), _w('a', -k))
    return Catalog(system, ('a',), named={'t': relator})


def periodic_generators(r: int) -> Catalog:
    """a_1 = (a_r, 1) sigma and a_i = (a_(i-1), 1) for 1 < i <= r."""
    if r < 1:
        raise SystemDefinitionError(f"Need r >= 1, got {r}")
    equations = {_gen(1): (_gen(r), (), 1)}
    for i in range(2, r + 1):
        equations[_gen(i)] = (_gen(i - 1), (), 0)
    system = define_system(equations, name=f'periodic({r})')
    gens = tuple(_gen(i) for i in range(1, r + 1))
    return Catalog(system, gens, named={'a0': _product_word(gens)})


def preperiodic_generators(s: int, r: int) -> Catalog:
    """a_1 = sigma, a_(s+1) = (a_s, a_r) and a_i = (a_(i-1), 1) otherwise."""
    if not 1 <= s < r:
        raise SystemDefinitionError(f"Need 1 <= s < r, got s={s}, r={r}")
    equations = {_gen(1): ((), (), 1)}
    for i in range(2, r + 1):
        if i == s + 1:
            equations[_gen(i)] = (_gen(s), _gen(r), 0)
        else:
            equations[_gen(i)] = (_gen(i - 1), (), 0)
    system = define_system(equations, name=f'prep({s},{r})')
    gens = tuple(_gen(i) for i in range(1, r + 1))
    return Catalog(system, gens, named={'a0': _product_word(gens)},
                   involutions=frozenset(gens))


def infinite_chain(count: int) -> Catalog:
    """b_1 = sigma and b_i = (b_(i-1), 1)."""
    if count < 1:
        raise SystemDefinitionError(f"Chain needs at least one element, got {count}")
    equations = {'b1': ((), (), 1)}
    for i in range(2, count + 1):
        equations[f'b{i}'] = (f'b{i - 1}', (), 0)
    system = define_system(equations, name=f'chain({count})')
    return Catalog(system, tuple(f'b{i}' for i in range(1, count + 1)),
                   involutions=frozenset(equations))


def case_catalog(case: GroupCase) -> Catalog:
    if case.is_periodic:
        return periodic_generators(case.r)
    return preperiodic_generators(case.s, case.r)


def periodic_normalizer(r: int, ks: Sequence[TwoAdicLike], precision: int = None) -> Catalog:
    """
    Elements w_1, ..., w_r with w_i a_j w_i^-1 = a_j^(k_(j-i)), indices mod r.

    w_i = (w_(i-1), a_r^(l_(1-i)) w_(i-1)) where l_j = (k_j - 1) / 2 and w_0 = w_r.
    The named word 'w' is w_r.
    """
    if len(ks) != r:
        raise SystemDefinitionError(f"Need {r} exponents, got {len(ks)}")
    units = [_odd(k, precision) for k in ks]

    def k_at(j: int) -> TwoAdic:
        return units[(j - 1) % r]

    base = periodic_generators(r)
    extra = {}
    for i in range(1, r + 1):
        prev = f"w{(i - 2) % r + 1}"
        ell = half_minus_one(k_at(1 - i))
        extra[f"w{i}"] = (as_word(prev), (_w(_gen(r), ell), _w(prev)), 0)
    system = base.system.with_equations(extra, name=f'periodic_normalizer({r})')
    named = dict(base.named)
    named['w'] = ((f"w{r}", 1),)
    return Catalog(system, base.generators, named=named)


def prep_w_chain(s: int, r: int, count: int) -> Catalog:
    """
    Chain w_1, ..., w_count with w_(i+1) = (w_i, w_i).

    w_1 = (a_s, a_s) when s >= 2 and r >= 4, and w_1 = (1, (a_s a_r)^2)
    when s = 1 and r >= 3 or (s, r) = (2, 3).
    """
    if count < 1:
        raise SystemDefinitionError(f"Chain length must be positive, got {count}")
    base = preperiodic_generators(s, r)
    if s >= 2 and r >= 4:
        first = (as_word(_gen(s)), as_word(_gen(s)), 0)
    elif (s == 1 and r >= 3) or (s, r) == (2, 3):
        square = _product_word([_gen(s), _gen(r), _gen(s), _gen(r)])
        first = ((), square, 0)
    else:
        raise SystemDefinitionError(f"No w-chain for s={s}, r={r}")
    extra = {'w1': first}
    for i in range(2, count + 1):
        extra[f'w{i}'] = (f'w{i - 1}', f'w{i - 1}', 0)
    system = base.system.with_equations(extra, name=f'prep_w_chain({s},{r})')
    return Catalog(system, base.generators, named=dict(base.named),
                   involutions=base.involutions)


def prep_w0() -> Catalog:
    """w_0 = (a_2 w_0, a_3 w_0) for the case (2, 3)."""
    base = preperiodic_generators(2, 3)
    system = base.system.with_equations(
        {'w0': ('a2 w0', 'a3 w0', 0)}, name='prep_w0')
    return Catalog(system, base.generators, named=dict(base.named),
                   involutions=base.involutions)


def dihedral_vw(k: TwoAdicLike, precision: int = None) -> Catalog:
    """
    Normalizer elements of the case (1, 2).

    With a_0 = a_1 a_2 = (a_2, a_1) sigma:
    v_k = (a_0^((1-k)/2) v_k, v_k) and w_k = a_0^((1-k)/2) v_k,
    so that w_k a_0 w_k^-1 = a_0^k. The named word 'w' is w_k.
    """
    k = _odd(k, precision)
    shift = -half_minus_one(k)
    base = preperiodic_generators(1, 2)
    system = base.system.with_equations({
        'a0': ('a2', 'a1', 1),
        'v': ((_w('a0', shift), _w('v')), 'v', 0),
    }, name=f'dihedral({k.residue})')
    named = {'w': (_w('a0', shift), _w('v'))}
    return Catalog(system, base.generators, named=named,
                   involutions=base.involutions)


def generator_portraits(case: GroupCase, n: int) -> list:
    return case_catalog(case).generator_portraits(tree_core.check_level(n))

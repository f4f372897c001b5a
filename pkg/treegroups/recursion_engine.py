"""
Recursion Engine Module

Systems of wreath-recursion equations a_i = (f_i, g_i) sigma^nu_i over words in
the symbols a_j. Such a system determines unique tree automorphisms; this
module evaluates them level by level, checks triviality (numerically to a
bounded level, or syntactically for a sound proof on the whole tree) and does
symbolic section calculus on words.
"""

import logging
import re
import threading
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

from . import tree_core
from .errors import SystemDefinitionError
from .tree_core import Portrait
from .two_adic import TwoAdic

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Constant:
    """Literal portrait inside a word; usable at its own level or below."""

    portrait: Portrait


Exponent = Union[int, TwoAdic]
Token = Union[Tuple[str, Exponent], Constant]
Word = Tuple[Token, ...]

EMPTY: Word = ()

_TOKEN = re.compile(r'^([A-Za-z_][A-Za-z_0-9]*)(?:\^\(?(-?\d+)\)?)?$')
_EQUATION = re.compile(r'^\s*([A-Za-z_][A-Za-z_0-9]*)\s*=\s*\((.*)\)\s*(s|σ)?\s*$')


@dataclass(frozen=True)
class Equation:
    left: Word
    right: Word
    nu: int


@dataclass(frozen=True)
class PairExpression:
    """The element (left, right) sigma^nu built from two words."""

    left: Word
    right: Word
    nu: int = 0


def parse_word(text: str) -> Word:
    """
    Parse a word such as "a1 a2^-1 a1" or "a1*a2".

    "1", "()" and the empty string denote the empty word.
    """
    text = text.strip()
    if text in ('', '1', '()'):
        return EMPTY
    tokens = []
    for part in re.split(r'[\s*]+', text):
        if not part or part in ('1', '()'):
            continue
        match = _TOKEN.match(part)
        if not match:
            raise SystemDefinitionError(f"Cannot parse word token {part!r}")
        exponent = int(match.group(2)) if match.group(2) is not None else 1
        tokens.append((match.group(1), exponent))
    return tuple(tokens)


def as_word(value) -> Word:
    """Accept a word, a text word, a single symbol name or None."""
    if value is None:
        return EMPTY
    if isinstance(value, str):
        return parse_word(value)
    if isinstance(value, Constant):
        return (value,)
    return tuple(value)


def symbols_in(word: Word) -> set:
    return {t[0] for t in word if not isinstance(t, Constant)}


def invert_word(word: Word) -> Word:
    out = []
    for token in reversed(word):
        if isinstance(token, Constant):
            out.append(Constant(tree_core.invert(token.portrait)))
        else:
            out.append((token[0], -token[1]))
    return tuple(out)


def reduce_word(word: Word, involutions: Iterable[str] = ()) -> Word:
    """Free reduction; exponents of involution symbols are taken mod 2."""
    involutions = set(involutions)
    stack = []
    for token in word:
        if isinstance(token, Constant):
            stack.append(token)
            continue
        name, exponent = token
        if isinstance(exponent, int) and name in involutions:
            exponent %= 2
        if exponent == 0:
            continue
        top = stack[-1] if stack else None
        if (top is not None and not isinstance(top, Constant) and top[0] == name
                and isinstance(top[1], int) and isinstance(exponent, int)):
            merged = top[1] + exponent
            if name in involutions:
                merged %= 2
            stack.pop()
            if merged:
                stack.append((name, merged))
        else:
            stack.append((name, exponent))
    return tuple(stack)


def letters(word: Word) -> Word:
    """Expand integer exponents into single letters of exponent +1 or -1."""
    out = []
    for token in word:
        if isinstance(token, Constant) or not isinstance(token[1], int):
            raise SystemDefinitionError(f"Token {token!r} has no integer expansion")
        name, exponent = token
        unit = 1 if exponent > 0 else -1
        out.extend([(name, unit)] * abs(exponent))
    return tuple(out)


def format_word(word: Word) -> str:
    if not word:
        return '1'
    parts = []
    for token in word:
        if isinstance(token, Constant):
            parts.append(f"[{tree_core.encode(token.portrait)}]")
        elif token[1] == 1:
            parts.append(token[0])
        else:
            parts.append(f"{token[0]}^{token[1] if isinstance(token[1], int) else token[1].signed()}")
    return ' '.join(parts)


class RecursionSystem:
    """
    Validated set of equations, one per symbol, with a memo of evaluations.

    The memo is filled bottom-up, one complete level at a time; entries are
    written once under a lock and read freely afterwards.
    """

    def __init__(self, equations: Mapping[str, Equation], name: str = ''):
        self.name = name
        self._equations = dict(equations)
        self._memo: Dict[Tuple[str, int], Portrait] = {}
        self._levels_done = -1
        self._lock = threading.Lock()

    @property
    def symbols(self) -> Tuple[str, ...]:
        return tuple(self._equations)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._equations

    def equation(self, symbol: str) -> Equation:
        try:
            return self._equations[symbol]
        except KeyError:
            raise SystemDefinitionError(f"Unknown symbol {symbol!r}") from None

    def _word_at(self, word: Word, m: int) -> Portrait:
        result = tree_core.identity(m)
        for token in word:
            if isinstance(token, Constant):
                const = token.portrait
                if const.level < m:
                    raise SystemDefinitionError(
                        f"Constant of level {const.level} used at level {m}"
                    )
                factor = tree_core.truncate(const, m)
            else:
                name, exponent = token
                factor = self._memo[(name, m)]
                if isinstance(exponent, int) and exponent == -1:
                    factor = tree_core.invert(factor)
                elif not (isinstance(exponent, int) and exponent == 1):
                    factor = tree_core.power(factor, exponent)
            result = tree_core.compose(result, factor)
        return result

    def _fill(self, n: int):
        with self._lock:
            while self._levels_done < n:
                m = self._levels_done + 1
                if m == 0:
                    base = tree_core.identity(0)
                    for symbol in self._equations:
                        self._memo[(symbol, 0)] = base
                else:
                    level_values = {}
                    for symbol, eq in self._equations.items():
                        left = self._word_at(eq.left, m - 1)
                        right = self._word_at(eq.right, m - 1)
                        level_values[(symbol, m)] = tree_core.pair(left, right, eq.nu)
                    self._memo.update(level_values)
                logger.debug("System %s evaluated at level %d", self.name or '?', m)
                self._levels_done = m

    def evaluate(self, symbol: str, n: int) -> Portrait:
        n = tree_core.check_level(n)
        self.equation(symbol)
        self._fill(n)
        return self._memo[(symbol, n)]

    def evaluate_word(self, word, n: int) -> Portrait:
        n = tree_core.check_level(n)
        word = as_word(word)
        unknown = symbols_in(word) - set(self._equations)
        if unknown:
            raise SystemDefinitionError(f"Word uses unknown symbols {sorted(unknown)}")
        self._fill(n)
        return self._word_at(word, n)

    def with_equations(self, extra: Mapping[str, Equation], name: str = '') -> 'RecursionSystem':
        """A new system holding these equations plus the extra ones."""
        merged = dict(self._equations)
        for symbol in extra:
            if symbol in merged:
                raise SystemDefinitionError(f"Duplicate symbol {symbol!r}")
        merged.update(extra)
        return define_system(merged, name=name or self.name)


def _coerce_equation(spec) -> Equation:
    if isinstance(spec, Equation):
        return spec
    left, right, nu = spec
    if nu not in (0, 1):
        raise SystemDefinitionError(f"Root bit must be 0 or 1, got {nu!r}")
    return Equation(as_word(left), as_word(right), int(nu))


def define_system(equations, name: str = '') -> RecursionSystem:
    """
    Validate and build a recursion system.

    Args:
        equations: Mapping symbol -> (left, right, nu), or an iterable of
            (symbol, left, right, nu); words may be text or token tuples
        name: Label used in logs

    Returns:
        RecursionSystem

    Raises:
        SystemDefinitionError: duplicate symbols or references to unknown ones
    """
    items = equations.items() if isinstance(equations, Mapping) else (
        (entry[0], entry[1:]) for entry in equations
    )
    table: Dict[str, Equation] = {}
    for symbol, spec in items:
        if symbol in table:
            raise SystemDefinitionError(f"Duplicate symbol {symbol!r}")
        table[symbol] = _coerce_equation(spec)
    for symbol, eq in table.items():
        missing = (symbols_in(eq.left) | symbols_in(eq.right)) - set(table)
        if missing:
            raise SystemDefinitionError(
                f"Equation for {symbol!r} references undefined {sorted(missing)}"
            )
    return RecursionSystem(table, name=name)


def parse_system(text: str, name: str = '') -> RecursionSystem:
    """
    Parse the line syntax "a1 = (a2, 1) s".

    One equation per line, '#' starts a comment, a trailing 's' marks sigma.
    """
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        match = _EQUATION.match(line)
        if not match:
            raise SystemDefinitionError(f"Line {lineno}: cannot parse {raw.strip()!r}")
        inner = match.group(2)
        parts = inner.split(',')
        if len(parts) != 2:
            raise SystemDefinitionError(f"Line {lineno}: expected two sections in {raw.strip()!r}")
        entries.append((match.group(1), parse_word(parts[0]), parse_word(parts[1]),
                        1 if match.group(3) else 0))
    if not entries:
        raise SystemDefinitionError("System text contains no equations")
    return define_system(entries, name=name)


def evaluate(system: RecursionSystem, symbol: str, n: int) -> Portrait:
    return system.evaluate(symbol, n)


def evaluate_word(system: RecursionSystem, word, n: int) -> Portrait:
    return system.evaluate_word(word, n)


def is_trivial_to_level(system: RecursionSystem, expression, n: int) -> bool:
    """
    Numeric triviality check at level n. Not a proof for the infinite tree.

    Args:
        system: Recursion system
        expression: A symbol name, a word, or a PairExpression
        n: Level to check
    """
    if isinstance(expression, PairExpression):
        if n == 0:
            return True
        value = tree_core.pair(system.evaluate_word(expression.left, n - 1),
                               system.evaluate_word(expression.right, n - 1), expression.nu)
    elif isinstance(expression, str) and expression in system:
        value = system.evaluate(expression, n)
    else:
        value = system.evaluate_word(expression, n)
    return tree_core.is_identity(value)


def _is_conjugate_of_candidates(word: Word, candidates: set) -> bool:
    if any(isinstance(t, Constant) for t in word):
        return False
    core = list(reduce_word(word))
    # strip outer h ... h^-1 pairs; what remains is a cyclically reduced core
    while len(core) >= 2 and core[0][0] == core[-1][0] and isinstance(core[0][1], int) \
            and core[0][1] == -core[-1][1]:
        core = core[1:-1]
    return all(token[0] in candidates for token in core)


def prove_trivial_syntactic(system: RecursionSystem, symbols: Iterable[str]) -> bool:
    """
    Sound sufficient test that every given symbol is the identity.

    Each cited equation must have root bit 0 and sections that are conjugates
    of words in the cited symbols alone. Returning False means "not proved".
    """
    candidates = set(symbols)
    if not candidates or not candidates <= set(system.symbols):
        return False
    for symbol in candidates:
        eq = system.equation(symbol)
        if eq.nu != 0:
            return False
        if not (_is_conjugate_of_candidates(eq.left, candidates)
                and _is_conjugate_of_candidates(eq.right, candidates)):
            return False
    return True


def _letter_sections(system: RecursionSystem, name: str, unit: int):
    eq = system.equation(name)
    if unit > 0:
        return eq.left, eq.right, eq.nu
    halves = (eq.left, eq.right)
    return (invert_word(halves[eq.nu]), invert_word(halves[1 ^ eq.nu]), eq.nu)


def word_sections(system: RecursionSystem, word, involutions: Iterable[str] = ()):
    """
    Symbolic decomposition of a word as (word0, word1) sigma^b.

    Uses (p0, p1) s^b * (q0, q1) s^c = (p0 q_b, p1 q_(1^b)) s^(b^c).
    """
    left, right, swap = [], [], 0
    for name, unit in letters(as_word(word)):
        q0, q1, c = _letter_sections(system, name, unit)
        q = (q0, q1)
        left.extend(q[swap])
        right.extend(q[1 ^ swap])
        swap ^= c
    return reduce_word(tuple(left), involutions), reduce_word(tuple(right), involutions), swap


def system_from_text_file(path: str) -> RecursionSystem:
    with open(path, 'r') as f:
        return parse_system(f.read(), name=path)

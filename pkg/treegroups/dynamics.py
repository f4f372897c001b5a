"""
Dynamics Module

Postcritical orbit of f(x) = x^2 + c over Q or a prime field F_p, the model
group it selects, the product relation element b_infinity, and the
arithmetic monodromy description: which coset of G in its normalizer the
cyclotomic character lands in, and how large G_arith / G can be.
"""

import dataclasses
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from sympy import isprime
from sympy.ntheory import multiplicity

from . import settings, tree_core
from .catalogs import Catalog, GroupCase, case_catalog, infinite_chain
from .errors import CertificationError, OrbitError, PrecisionError
from .tree_core import Portrait
from .two_adic import TwoAdic, TwoAdicLike, as_two_adic, mul, theta1, theta2

logger = logging.getLogger(__name__)

FieldElement = Union[Fraction, int]

_PRIME_FIELD = re.compile(r'^\s*(?:F_?|GF\(?|Fp:)(\d+)\)?\s*$', re.IGNORECASE)
_MOD = re.compile(r'^\s*(-?\d+)(?:\s*/\s*(-?\d+))?\s+mod\s+(\d+)\s*$')


@dataclass(frozen=True)
class FieldSpec:
    """
    Q when p is None, otherwise F_p. q is the size of an ambient finite
    field (a power of p) whose Frobenius is evaluated by the arithmetic report.
    """

    p: Optional[int] = None
    q: Optional[int] = None

    def __post_init__(self):
        if self.p is not None:
            if self.p == 2 or not isprime(self.p):
                raise OrbitError(f"Field characteristic must be an odd prime, got {self.p}")
        if self.q is not None:
            if self.p is None:
                raise OrbitError("An ambient size q needs a prime field")
            if self.q < self.p or self.p ** multiplicity(self.p, self.q) != self.q:
                raise OrbitError(f"q={self.q} is not a power of p={self.p}")

    @property
    def is_rational(self) -> bool:
        return self.p is None

    def element(self, value) -> FieldElement:
        """Coerce an int or Fraction into the field."""
        value = Fraction(value)
        if self.is_rational:
            return value
        if value.denominator % self.p == 0:
            raise OrbitError(f"{value} has no reduction mod {self.p}")
        return value.numerator * pow(value.denominator, -1, self.p) % self.p

    def __str__(self):
        if self.is_rational:
            return "Q"
        return f"F_{self.p}" if self.q is None else f"F_{self.p} (q={self.q})"


RATIONALS = FieldSpec()


def parse_field(text: str = None, q: int = None) -> FieldSpec:
    """Parse "Q", "F7", "F_7", "GF(7)" or "Fp:7"."""
    if text is None or text.strip().upper() in ('Q', 'QQ'):
        if q is not None:
            raise OrbitError("An ambient size q needs a prime field")
        return RATIONALS
    match = _PRIME_FIELD.match(text)
    if not match:
        raise OrbitError(f"Cannot parse field {text!r}; use 'Q' or 'F<p>'")
    return FieldSpec(p=int(match.group(1)), q=q)


def parse_parameter(text: str, field: FieldSpec = RATIONALS) -> FieldElement:
    """
    Parse c as "a", "a/b" or "a mod p" (the latter must agree with a prime field).
    """
    match = _MOD.match(text)
    if match:
        num, den, p = match.groups()
        if field.is_rational or field.p != int(p):
            raise OrbitError(f"Residue {text!r} does not belong to {field}")
        return field.element(Fraction(int(num), int(den) if den else 1))
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise OrbitError(f"Cannot parse parameter {text!r}: {e}")
    return field.element(value)


def field_of_parameter(text: str, q: int = None) -> FieldSpec:
    """The prime field named by an "a mod p" parameter, else Q."""
    match = _MOD.match(text)
    return FieldSpec(p=int(match.group(3)), q=q) if match else RATIONALS


def normalize_quadratic(a, b, e, field: FieldSpec = RATIONALS) -> FieldElement:
    """
    c with a x^2 + b x + e affinely conjugate to x^2 + c.

    Conjugating by x -> x / a and then shifting by b / 2 gives
    c = a e + b / 2 - b^2 / 4.
    """
    a, b, e = field.element(a), field.element(b), field.element(e)
    if a == 0:
        raise OrbitError("Leading coefficient must be nonzero")
    if field.is_rational:
        return a * e + b / 2 - b * b / 4
    p = field.p
    half = pow(2, -1, p)
    return (a * e + b * half - b * b * half * half) % p


@dataclass(frozen=True)
class OrbitClass:
    """
    periodic (s = 0), prep (1 <= s < r), infinite (escape_index set) or
    unresolved; orbit holds p_1, p_2, ... as computed.
    """

    kind: str
    r: int = 0
    s: int = 0
    escape_index: Optional[int] = None
    steps: int = 0
    orbit: Tuple[FieldElement, ...] = dataclasses.field(default=(), repr=False)

    @property
    def is_finite(self) -> bool:
        return self.kind in ('periodic', 'prep')

    @property
    def case(self) -> GroupCase:
        if not self.is_finite:
            raise OrbitError(f"Orbit class {self.kind} has no model case")
        return GroupCase.periodic(self.r) if self.kind == 'periodic' else GroupCase.prep(self.s, self.r)

    def to_dict(self) -> dict:
        out = {'class': self.kind, 's': self.s, 'r': self.r, 'steps': self.steps}
        if self.escape_index is not None:
            out['escape_index'] = self.escape_index
        return out


def _height(value: FieldElement) -> int:
    if isinstance(value, Fraction):
        return max(abs(value.numerator).bit_length(), value.denominator.bit_length())
    return int(value).bit_length()


def critical_orbit(c, field: FieldSpec = RATIONALS, max_steps: int = None,
                   height_bound: int = None) -> OrbitClass:
    """
    Classify the orbit p_1 = c, p_(i+1) = p_i^2 + c.

    The first repeat p_j = p_i gives r = j - 1 and s = i - 1. Over Q an
    iterate with |p| >= |c| + 2 certifies escape, since from there on
    |p^2 + c| > |p|. Over F_p a repeat always occurs within p + 1 steps.

    Args:
        c: Parameter, already an element of field
        field: Q or F_p
        max_steps: Iteration budget over Q
        height_bound: Give up over Q once an iterate needs more bits than this
    """
    if max_steps is None:
        max_steps = settings.DEFAULT_MAX_STEPS
    if height_bound is None:
        height_bound = settings.DEFAULT_HEIGHT_BOUND
    if max_steps < 1:
        raise OrbitError(f"max_steps must be positive, got {max_steps}")
    c = field.element(c)
    budget = field.p + 1 if not field.is_rational else max_steps
    bound = abs(c) + 2

    seen = {}
    orbit = []
    p = c
    for j in range(1, budget + 1):
        if p in seen:
            i = seen[p]
            r, s = j - 1, i - 1
            successor = orbit[r - 1] ** 2 + c
            if not field.is_rational:
                successor %= field.p
            if successor != orbit[s]:
                raise CertificationError(f"Orbit relation p_{r + 1} = p_{s + 1} fails for c={c}")
            kind = 'periodic' if s == 0 else 'prep'
            logger.info("Critical orbit of c=%s over %s: %s s=%d r=%d", c, field, kind, s, r)
            return OrbitClass(kind, r=r, s=s, steps=j, orbit=tuple(orbit))
        seen[p] = j
        orbit.append(p)
        if field.is_rational:
            if abs(p) >= bound:
                logger.info("Critical orbit of c=%s escapes at p_%d", c, j)
                return OrbitClass('infinite', escape_index=j, steps=j, orbit=tuple(orbit))
            if _height(p) > height_bound:
                break
            p = p * p + c
        else:
            p = (p * p + c) % field.p
    logger.warning("Critical orbit of c=%s over %s unresolved after %d steps",
                   c, field, len(orbit))
    return OrbitClass('unresolved', steps=len(orbit), orbit=tuple(orbit))


def model_generators(orbit: OrbitClass, chain_length: int = None) -> Catalog:
    """Catalog of the model generators selected by an orbit class."""
    if orbit.kind == 'infinite':
        return infinite_chain(chain_length or settings.DEFAULT_CHAIN_LENGTH)
    if not orbit.is_finite:
        raise OrbitError("An unresolved orbit selects no model group")
    return case_catalog(orbit.case)


def b_infinity(orbit: OrbitClass, n: int) -> Portrait:
    """(a_1 ... a_r)^-1 at level n."""
    if not orbit.is_finite:
        raise OrbitError(f"b_infinity needs a finite orbit, got {orbit.kind}")
    product = tree_core.identity(tree_core.check_level(n))
    for g in case_catalog(orbit.case).generator_portraits(n):
        product = tree_core.compose(product, g)
    return tree_core.invert(product)


def _plus_minus(k: TwoAdic) -> TwoAdic:
    # representative of {k, -k} that is 1 mod 4
    return k if k.residue % 4 == 1 else -k


@dataclass(frozen=True)
class CosetLabel:
    """
    Image of a normalizer element in N / G.

    kind 'diagonal': units (k, ..., k) in (Z_2^x)^r.
    kind 'dihedral': units (k,) with k taken 1 mod 4, standing for k mod {+-1}.
    kind 'pattern': bits head followed by tail repeated forever, in prod F_2.
    """

    kind: str
    units: Tuple[TwoAdic, ...] = ()
    head: Tuple[int, ...] = ()
    tail: int = 0

    def __post_init__(self):
        if self.kind == 'dihedral':
            object.__setattr__(self, 'units', (_plus_minus(self.units[0]),))
        if self.kind == 'pattern':
            head = list(self.head)
            while head and head[-1] == self.tail:
                head.pop()
            object.__setattr__(self, 'head', tuple(head))

    def __mul__(self, other: 'CosetLabel') -> 'CosetLabel':
        if self.kind != other.kind or len(self.units) != len(other.units):
            raise OrbitError(f"Cannot multiply {self.kind} and {other.kind} labels")
        if self.kind == 'pattern':
            width = max(len(self.head), len(other.head))
            bits = [a ^ b for a, b in zip(self.bits(width), other.bits(width))]
            return CosetLabel('pattern', head=tuple(bits), tail=self.tail ^ other.tail)
        return CosetLabel(self.kind, units=tuple(mul(a, b) for a, b in zip(self.units, other.units)))

    @property
    def is_trivial(self) -> bool:
        if self.kind == 'pattern':
            return not any(self.head) and self.tail == 0
        return all(k.residue == 1 for k in self.units)

    def bits(self, count: int) -> Tuple[int, ...]:
        """First count entries of a pattern label."""
        return tuple(self.head[i] if i < len(self.head) else self.tail for i in range(count))

    def to_dict(self) -> dict:
        if self.kind == 'pattern':
            return {'kind': self.kind, 'head': list(self.head), 'tail': self.tail}
        return {'kind': self.kind, 'units': [k.residue for k in self.units],
                'precision': min(k.precision for k in self.units)}

    def __str__(self):
        if self.kind == 'pattern':
            head = ','.join(str(b) for b in self.head)
            return f"({head}; {self.tail},{self.tail},...)"
        if self.kind == 'dihedral':
            return f"{self.units[0].residue} mod +-1 (mod 2^{self.units[0].precision})"
        return '(' + ','.join(str(k.residue) for k in self.units) + ')'


def _unit(k: TwoAdicLike, precision: int = None) -> TwoAdic:
    k = as_two_adic(k, precision)
    if not k.is_unit:
        raise PrecisionError(f"Coset labels need an odd k, got {k}")
    return k


def periodic_coset_label(r: int, k: TwoAdicLike, precision: int = None) -> CosetLabel:
    """The diagonal label (k, ..., k) in (Z_2^x)^r."""
    if r < 1:
        raise OrbitError(f"Need r >= 1, got {r}")
    k = _unit(k, precision)
    return CosetLabel('diagonal', units=(k,) * r)


def prep_coset_label(s: int, r: int, k: TwoAdicLike, precision: int = None) -> CosetLabel:
    """
    Label of k for a strictly pre-periodic case.

    s >= 2, r >= 4: constant theta_1(k). s = 1, r >= 3: constant theta_2(k).
    (2, 3): theta_1(k) followed by constant theta_2(k). (1, 2): k mod +-1.
    """
    k = _unit(k, precision)
    if not 1 <= s < r:
        raise OrbitError(f"Need 1 <= s < r, got s={s}, r={r}")
    if (s, r) == (1, 2):
        return CosetLabel('dihedral', units=(k,))
    if (s, r) == (2, 3):
        return CosetLabel('pattern', head=(theta1(k),), tail=theta2(k))
    if s == 1:
        return CosetLabel('pattern', tail=theta2(k))
    return CosetLabel('pattern', tail=theta1(k))


def coset_label(case: GroupCase, k: TwoAdicLike, precision: int = None) -> CosetLabel:
    if case.is_periodic:
        return periodic_coset_label(case.r, k, precision)
    return prep_coset_label(case.s, case.r, k, precision)


@dataclass(frozen=True)
class ArithReport:
    orbit: OrbitClass
    field: FieldSpec
    structure: str
    index_bound: str
    label: Optional[CosetLabel] = None
    note: str = ''

    def to_dict(self) -> dict:
        return {
            'orbit': self.orbit.to_dict(),
            'case': str(self.orbit.case) if self.orbit.is_finite else None,
            'field': str(self.field),
            'structure': self.structure,
            'label': self.label.to_dict() if self.label is not None else None,
            'label_text': str(self.label) if self.label is not None else None,
            'index_bound': self.index_bound,
            'note': self.note,
        }


def structure_tag(case: GroupCase) -> str:
    if case.is_periodic:
        return "(Z2^x)^r diagonal"
    if (case.s, case.r) == (1, 2):
        return "Z2^x/{+-1}"
    return "prod F2 with theta-pattern"


def index_bound(case: GroupCase) -> str:
    """Bound on [G_arith : G_geom] over a field where the label is unrestricted."""
    if case.is_periodic or (case.s, case.r) == (1, 2):
        return "possibly infinite (out of computational scope)"
    if (case.s, case.r) == (2, 3):
        return "divides 4"
    return "divides 2"


def arith_description(orbit: OrbitClass, field: FieldSpec = RATIONALS,
                      k: TwoAdicLike = None, precision: int = None) -> ArithReport:
    """
    Arithmetic monodromy report for an orbit class.

    Over a finite field the label is that of k = q, the cyclotomic character
    of Frobenius; an explicit k overrides it. Without k the label is left
    open and the general index bound is reported.
    """
    if orbit.kind == 'unresolved':
        raise OrbitError("Arithmetic description needs a resolved orbit")
    if orbit.kind == 'infinite':
        return ArithReport(orbit, field, "full W", "1",
                           note="G_geom = G_arith = W for an infinite postcritical orbit")
    case = orbit.case
    if precision is None:
        precision = settings.DEFAULT_PRECISION
    if k is None and field.q is not None:
        k = field.q
    if k is None:
        return ArithReport(orbit, field, structure_tag(case), index_bound(case),
                           note="label ranges over the image of the cyclotomic character")

    label = coset_label(case, k, precision)
    if label.kind == 'pattern':
        bound = "1" if label.is_trivial else "2"
        note = "G_arith = G_geom" if label.is_trivial else "G_arith / G_geom has order 2"
    elif label.is_trivial:
        bound = "1"
        note = f"label trivial to precision {precision}"
    else:
        bound = "infinite"
        note = "the label has infinite order in N / G"
    logger.info("Arithmetic label for %s at k=%s: %s", case, k, label)
    return ArithReport(orbit, field, structure_tag(case), bound, label=label, note=note)

"""
Two-Adic Module

Truncated 2-adic integers: a residue modulo 2^precision. Used for exponents
k in Z_2^x, for l = (k - 1) / 2 and for the theta maps.
"""

from dataclasses import dataclass
from typing import Union

from . import settings
from .errors import PrecisionError


@dataclass(frozen=True)
class TwoAdic:
    """Residue modulo 2**precision."""

    residue: int
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise PrecisionError(f"Precision must be positive, got {self.precision}")
        object.__setattr__(self, 'residue', self.residue % (1 << self.precision))

    @property
    def modulus(self) -> int:
        return 1 << self.precision

    @property
    def is_unit(self) -> bool:
        return self.residue % 2 == 1

    def signed(self) -> int:
        """Representative in [-2^(m-1), 2^(m-1))."""
        half = self.modulus >> 1
        return self.residue - self.modulus if self.residue >= half else self.residue

    def _common(self, other: 'TwoAdicLike') -> 'TwoAdic':
        if isinstance(other, TwoAdic):
            return other
        return TwoAdic(int(other), self.precision)

    def __add__(self, other):
        other = self._common(other)
        m = min(self.precision, other.precision)
        return TwoAdic(self.residue + other.residue, m)

    def __sub__(self, other):
        other = self._common(other)
        m = min(self.precision, other.precision)
        return TwoAdic(self.residue - other.residue, m)

    def __neg__(self):
        return TwoAdic(-self.residue, self.precision)

    def __mul__(self, other):
        other = self._common(other)
        m = min(self.precision, other.precision)
        return TwoAdic(self.residue * other.residue, m)

    __rmul__ = __mul__

    def __int__(self):
        return self.residue

    def __str__(self):
        return f"{self.residue} mod 2^{self.precision}"


TwoAdicLike = Union[TwoAdic, int]


def make(value: int, precision: int = None) -> TwoAdic:
    """Reduce an integer to a TwoAdic of the given precision."""
    if precision is None:
        precision = settings.DEFAULT_PRECISION
    return TwoAdic(int(value), int(precision))


def mul(a: TwoAdic, b: TwoAdicLike) -> TwoAdic:
    return a * b


def _require_unit(k: TwoAdic, what: str):
    if not k.is_unit:
        raise PrecisionError(f"{what} needs an odd 2-adic integer, got {k}")


def inverse(k: TwoAdic) -> TwoAdic:
    """Multiplicative inverse of a 2-adic unit."""
    _require_unit(k, "inverse")
    return TwoAdic(pow(k.residue, -1, k.modulus), k.precision)


def half_minus_one(k: TwoAdic) -> TwoAdic:
    """
    The exponent l = (k - 1) / 2 of a unit k.

    One bit of precision is lost in the division.
    """
    _require_unit(k, "(k - 1) / 2")
    if k.precision < 2:
        raise PrecisionError(f"(k - 1) / 2 needs precision >= 2, got {k.precision}")
    return TwoAdic((k.residue - 1) >> 1, k.precision - 1)


def theta1(k: TwoAdic) -> int:
    """theta_1(k) = (k - 1) / 2 mod 2."""
    _require_unit(k, "theta1")
    if k.precision < 2:
        raise PrecisionError(f"theta1 needs precision >= 2, got {k.precision}")
    return ((k.residue - 1) >> 1) & 1


def theta2(k: TwoAdic) -> int:
    """theta_2(k) = (k^2 - 1) / 8 mod 2."""
    _require_unit(k, "theta2")
    if k.precision < 3:
        raise PrecisionError(f"theta2 needs precision >= 3, got {k.precision}")
    r = k.residue % 8
    return ((r * r - 1) >> 3) & 1


def as_two_adic(k: TwoAdicLike, precision: int = None) -> TwoAdic:
    if isinstance(k, TwoAdic):
        return k
    return make(k, precision)

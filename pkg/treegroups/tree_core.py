"""
Tree Core Module

Exact arithmetic in W_n = Aut(T_n), the automorphism group of the binary
rooted tree of depth n.

An element is stored as its portrait: one swap bit per internal vertex, in
breadth-first order. Within a level, vertices are ordered lexicographically by
their word (the first letter selects the child of the root), so level m
occupies indices [2^m - 1, 2^(m+1) - 1) and the child of vertex v by letter t
has index 2v + t inside the next level.

The portrait of (u, v) sigma^b has root bit b and, on every lower level, the
bits of u followed by the bits of v. Hence a bit is read at the vertex where a
letter arrives: a leaf x_1...x_n maps to y_1...y_n with
y_k = x_k xor bit[y_1...y_(k-1)]. Products p * q apply q first.
"""

import logging
import re
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from . import settings
from .errors import EncodingError, LevelError, PrecisionError
from .two_adic import TwoAdic

logger = logging.getLogger(__name__)

_ENCODING = re.compile(r'^\s*(\d+):([0-9a-fA-F]*)\s*$')


def check_level(n: int, minimum: int = 0) -> int:
    """Validate a tree depth against the configured bounds."""
    if isinstance(n, (bool, np.bool_)) or not isinstance(n, (int, np.integer)):
        raise LevelError(f"Level must be an integer, got {n!r}")
    n = int(n)
    if n < minimum or n > settings.MAX_LEVEL:
        raise LevelError(f"Level {n} outside [{minimum}, {settings.MAX_LEVEL}]")
    return n


def bit_length(n: int) -> int:
    """Number of internal vertices of T_n."""
    return (1 << n) - 1


def level_slice(m: int) -> slice:
    """Index range of the vertices on level m."""
    return slice((1 << m) - 1, (1 << (m + 1)) - 1)


class Portrait:
    """Immutable level-n tree automorphism."""

    __slots__ = ('level', 'bits', '_vertex_map', '_key')

    def __init__(self, level: int, bits):
        level = check_level(level)
        bits = np.array(bits, dtype=bool).ravel()
        if bits.size != bit_length(level):
            raise LevelError(
                f"Level {level} portrait needs {bit_length(level)} bits, got {bits.size}"
            )
        bits.flags.writeable = False
        self.level = level
        self.bits = bits
        self._vertex_map = None
        self._key = None

    def __eq__(self, other):
        if not isinstance(other, Portrait):
            return NotImplemented
        return self.level == other.level and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.level, self.key))

    def __mul__(self, other: 'Portrait') -> 'Portrait':
        return compose(self, other)

    def __repr__(self):
        return f"Portrait({encode(self)!r})"

    @property
    def key(self) -> int:
        """Integer whose bit i is portrait bit i."""
        if self._key is None:
            packed = np.packbits(self.bits, bitorder='little')
            self._key = int.from_bytes(packed.tobytes(), 'little')
        return self._key

    @property
    def root_bit(self) -> int:
        return int(self.bits[0]) if self.level else 0

    def vertex_map(self) -> np.ndarray:
        """Flat image index of every internal vertex (breadth-first numbering)."""
        if self._vertex_map is None:
            parts = [vertex_images(self, m) + bit_length(m) for m in range(self.level)]
            vmap = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
            vmap.flags.writeable = False
            self._vertex_map = vmap
        return self._vertex_map


@dataclass(frozen=True)
class SignVector:
    """Signs sgn_1, ..., sgn_n of an element of W_n."""

    level: int
    signs: Tuple[int, ...]

    def all_negative(self) -> bool:
        return all(s == -1 for s in self.signs)


def _inverse_index(vmap: np.ndarray) -> np.ndarray:
    inv = np.empty_like(vmap)
    inv[vmap] = np.arange(vmap.size)
    return inv


def identity(n: int) -> Portrait:
    n = check_level(n)
    return Portrait(n, np.zeros(bit_length(n), dtype=bool))


def sigma(n: int) -> Portrait:
    """The root swap at level n >= 1."""
    n = check_level(n, minimum=1)
    bits = np.zeros(bit_length(n), dtype=bool)
    bits[0] = True
    return Portrait(n, bits)


def is_identity(p: Portrait) -> bool:
    return not p.bits.any()


def pair(p0: Portrait, p1: Portrait, swap: int = 0) -> Portrait:
    """
    Assemble (p0, p1) sigma^swap.

    Args:
        p0: Section acting on the subtree below letter 0
        p1: Section acting on the subtree below letter 1
        swap: Root bit

    Returns:
        Portrait one level deeper than the sections
    """
    if p0.level != p1.level:
        raise LevelError(f"Cannot pair levels {p0.level} and {p1.level}")
    n = check_level(p0.level + 1)
    parts = [np.array([bool(swap)])]
    for m in range(p0.level):
        sl = level_slice(m)
        parts.append(p0.bits[sl])
        parts.append(p1.bits[sl])
    return Portrait(n, np.concatenate(parts))


def decompose(p: Portrait) -> Tuple[Portrait, Portrait, int]:
    """Split p = (p0, p1) sigma^b into (p0, p1, b)."""
    if p.level < 1:
        raise LevelError("Cannot decompose a level-0 portrait")
    left, right = [], []
    for m in range(1, p.level):
        block = p.bits[level_slice(m)]
        half = block.size // 2
        left.append(block[:half])
        right.append(block[half:])
    n = p.level - 1
    empty = np.zeros(0, dtype=bool)
    p0 = Portrait(n, np.concatenate(left) if left else empty)
    p1 = Portrait(n, np.concatenate(right) if right else empty)
    return p0, p1, int(p.bits[0])


def vertex_images(p: Portrait, m: int) -> np.ndarray:
    """Images of the 2^m level-m vertices, as lexicographic indices."""
    if m < 0 or m > p.level:
        raise LevelError(f"Level {m} outside [0, {p.level}]")
    perm = np.zeros(1, dtype=np.int64)
    for k in range(m):
        flips = p.bits[level_slice(k)][perm].astype(np.int64)
        nxt = np.empty(2 * perm.size, dtype=np.int64)
        nxt[0::2] = 2 * perm + flips
        nxt[1::2] = 2 * perm + 1 - flips
        perm = nxt
    return perm


def _require_same_level(p: Portrait, q: Portrait):
    if p.level != q.level:
        raise LevelError(f"Level mismatch: {p.level} vs {q.level}")


def compose(p: Portrait, q: Portrait) -> Portrait:
    """The product p * q (q applied first)."""
    _require_same_level(p, q)
    if p.level == 0:
        return p
    inv = _inverse_index(p.vertex_map())
    return Portrait(p.level, p.bits ^ q.bits[inv])


def invert(p: Portrait) -> Portrait:
    if p.level == 0:
        return p
    return Portrait(p.level, p.bits[p.vertex_map()])


def conjugate(c: Portrait, p: Portrait) -> Portrait:
    """c * p * c^-1."""
    return compose(compose(c, p), invert(c))


def _leaf_to_index(leaf, n: int) -> int:
    text = ''.join(str(int(t)) for t in leaf) if not isinstance(leaf, str) else leaf
    if len(text) != n or any(ch not in '01' for ch in text):
        raise LevelError(f"Leaf {leaf!r} is not a binary word of length {n}")
    return int(text, 2) if n else 0


def apply(p: Portrait, leaf: Union[str, Sequence[int]]):
    """
    Image of a leaf under p.

    Args:
        p: Tree automorphism
        leaf: Binary word of length p.level, as text ("011") or a sequence of bits

    Returns:
        The image, in the same form as the input
    """
    index = _leaf_to_index(leaf, p.level)
    image = int(vertex_images(p, p.level)[index])
    text = format(image, f'0{p.level}b') if p.level else ''
    if isinstance(leaf, str):
        return text
    return tuple(int(ch) for ch in text)


def _reverse_bits(value: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def apply_int(p: Portrait, j: int) -> int:
    """Action on leaves encoded as integers, first letter least significant."""
    n = p.level
    if not 0 <= j < (1 << n):
        raise LevelError(f"Leaf index {j} outside [0, {1 << n})")
    image = int(vertex_images(p, n)[_reverse_bits(j, n)])
    return _reverse_bits(image, n)


def truncate(p: Portrait, m: int) -> Portrait:
    """Restriction p|T_m."""
    if m < 0 or m > p.level:
        raise LevelError(f"Cannot truncate level {p.level} portrait to level {m}")
    return Portrait(m, p.bits[:bit_length(m)])


def sign_bits(p: Portrait) -> np.ndarray:
    """Entry m-1 is 1 when sgn_m(p) = -1."""
    return np.array(
        [int(p.bits[level_slice(m)].sum() & 1) for m in range(p.level)],
        dtype=np.int64,
    )


def sign(p: Portrait, m: int) -> int:
    """Parity of the permutation p induces on level m (1 <= m <= level)."""
    if m < 1 or m > p.level:
        raise LevelError(f"Sign level {m} outside [1, {p.level}]")
    return -1 if p.bits[level_slice(m - 1)].sum() & 1 else 1


def sign_vector(p: Portrait) -> SignVector:
    return SignVector(p.level, tuple(-1 if b else 1 for b in sign_bits(p)))


def order_log2(p: Portrait) -> int:
    """Smallest e with p^(2^e) = 1."""
    e = 0
    q = p
    while not is_identity(q):
        q = compose(q, q)
        e += 1
    return e


def reduce_exponent(p: Portrait, k: Union[int, TwoAdic]) -> int:
    """Exponent k reduced modulo the order of p."""
    e = order_log2(p)
    if isinstance(k, TwoAdic):
        if k.precision < e:
            raise PrecisionError(
                f"Exponent {k} too coarse for an element of order 2^{e}"
            )
        return k.residue % (1 << e)
    return int(k) % (1 << e)


def power(p: Portrait, k: Union[int, TwoAdic]) -> Portrait:
    exponent = reduce_exponent(p, k)
    result = identity(p.level)
    base = p
    while exponent:
        if exponent & 1:
            result = compose(result, base)
        base = compose(base, base)
        exponent >>= 1
    return result


def encode(p: Portrait) -> str:
    """Text form "n:HEX", bits packed least significant first."""
    packed = np.packbits(p.bits, bitorder='little')
    return f"{p.level}:{packed.tobytes().hex()}"


def decode(text: str) -> Portrait:
    match = _ENCODING.match(text or '')
    if not match:
        raise EncodingError(f"Malformed portrait {text!r}, expected 'n:HEX'")
    n = int(match.group(1))
    try:
        n = check_level(n)
    except LevelError as e:
        raise EncodingError(str(e)) from e
    count = bit_length(n)
    raw = bytes.fromhex(match.group(2)) if len(match.group(2)) % 2 == 0 else None
    if raw is None or len(raw) != (count + 7) // 8:
        raise EncodingError(
            f"Portrait {text!r} needs {(count + 7) // 8} bytes for {count} bits"
        )
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder='little')
    if bits[count:].any():
        raise EncodingError(f"Portrait {text!r} has bits beyond position {count}")
    return Portrait(n, bits[:count].astype(bool))


def random_element(n: int, seed=None) -> Portrait:
    """Uniform sample of W_n; seed may be an int or a numpy Generator."""
    n = check_level(n)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return Portrait(n, rng.integers(0, 2, size=bit_length(n)).astype(bool))


def from_key(n: int, key: int) -> Portrait:
    n = check_level(n)
    count = bit_length(n)
    raw = int(key).to_bytes((count + 7) // 8, 'little')
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder='little')
    return Portrait(n, bits[:count].astype(bool))


# Batched kernels: rows of a bool matrix are portraits of a common level.

def uses_machine_keys(n: int) -> bool:
    """Keys fit in uint64 up to level 6; deeper levels use Python ints."""
    return bit_length(n) <= 64


def batch_keys(bits: np.ndarray, n: int) -> np.ndarray:
    """Integer key of every row (bit i of the key is portrait bit i)."""
    rows = bits.shape[0]
    packed = np.packbits(bits, axis=1, bitorder='little')
    if uses_machine_keys(n):
        padded = np.zeros((rows, 8), dtype=np.uint8)
        padded[:, :packed.shape[1]] = packed
        return padded.view('<u8').ravel().astype(np.uint64)
    keys = np.empty(rows, dtype=object)
    for i in range(rows):
        keys[i] = int.from_bytes(packed[i].tobytes(), 'little')
    return keys


def bits_from_keys(keys: np.ndarray, n: int) -> np.ndarray:
    count = bit_length(n)
    if uses_machine_keys(n):
        raw = np.ascontiguousarray(keys, dtype='<u8').view(np.uint8).reshape(-1, 8)
        return np.unpackbits(raw, axis=1, bitorder='little')[:, :count].astype(bool)
    width = (count + 7) // 8
    raw = np.frombuffer(
        b''.join(int(k).to_bytes(width, 'little') for k in keys), dtype=np.uint8
    ).reshape(-1, width)
    return np.unpackbits(raw, axis=1, bitorder='little')[:, :count].astype(bool)


def batch_vertex_images(bits: np.ndarray, n: int, m: int) -> np.ndarray:
    """Row-wise images of the level-m vertices."""
    perm = np.zeros((bits.shape[0], 1), dtype=np.int64)
    for k in range(m):
        flips = np.take_along_axis(bits[:, level_slice(k)], perm, axis=1).astype(np.int64)
        nxt = np.empty((perm.shape[0], 2 * perm.shape[1]), dtype=np.int64)
        nxt[:, 0::2] = 2 * perm + flips
        nxt[:, 1::2] = 2 * perm + 1 - flips
        perm = nxt
    return perm


def batch_vertex_maps(bits: np.ndarray, n: int) -> np.ndarray:
    rows = bits.shape[0]
    parts = []
    perm = np.zeros((rows, 1), dtype=np.int64)
    for k in range(n):
        parts.append(perm + bit_length(k))
        flips = np.take_along_axis(bits[:, level_slice(k)], perm, axis=1).astype(np.int64)
        nxt = np.empty((rows, 2 * perm.shape[1]), dtype=np.int64)
        nxt[:, 0::2] = 2 * perm + flips
        nxt[:, 1::2] = 2 * perm + 1 - flips
        perm = nxt
    if not parts:
        return np.zeros((rows, 0), dtype=np.int64)
    return np.concatenate(parts, axis=1)


def _batch_inverse_index(vmaps: np.ndarray) -> np.ndarray:
    inv = np.empty_like(vmaps)
    ranks = np.broadcast_to(np.arange(vmaps.shape[1]), vmaps.shape)
    np.put_along_axis(inv, vmaps, ranks, axis=1)
    return inv


def batch_invert(bits: np.ndarray, n: int) -> np.ndarray:
    return np.take_along_axis(bits, batch_vertex_maps(bits, n), axis=1)


def batch_compose(left: np.ndarray, right: np.ndarray, n: int) -> np.ndarray:
    """Row-wise products left[i] * right[i]."""
    inv = _batch_inverse_index(batch_vertex_maps(left, n))
    return left ^ np.take_along_axis(right, inv, axis=1)


def batch_compose_left(g: Portrait, bits: np.ndarray) -> np.ndarray:
    """Rows g * x for a fixed left factor g."""
    if g.level == 0:
        return bits.copy()
    inv = _inverse_index(g.vertex_map())
    return g.bits ^ bits[:, inv]


def batch_compose_right(bits: np.ndarray, g: Portrait) -> np.ndarray:
    """Rows x * g for a fixed right factor g."""
    inv = _batch_inverse_index(batch_vertex_maps(bits, g.level))
    return bits ^ g.bits[inv]


def batch_sign_bits(bits: np.ndarray, n: int) -> np.ndarray:
    """Column m-1 is 1 where sgn_m = -1."""
    cols = [bits[:, level_slice(m)].sum(axis=1) & 1 for m in range(n)]
    if not cols:
        return np.zeros((bits.shape[0], 0), dtype=np.int64)
    return np.stack(cols, axis=1).astype(np.int64)


def all_elements(n: int, allow_large: bool = False) -> np.ndarray:
    """Every element of W_n as a bool matrix, rows in increasing key order."""
    n = check_level(n)
    if n > settings.BRUTE_FORCE_MAX_LEVEL and not allow_large:
        raise LevelError(
            f"Refusing to materialize W_{n}; limit is level {settings.BRUTE_FORCE_MAX_LEVEL}"
        )
    if not uses_machine_keys(n):
        raise LevelError(f"W_{n} is far too large to materialize")
    keys = np.arange(1 << bit_length(n), dtype=np.uint64)
    return bits_from_keys(keys, n)


def rows_to_portraits(bits: np.ndarray, n: int):
    return [Portrait(n, row) for row in bits]

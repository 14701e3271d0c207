"""Linear algebra over GF(2) and arithmetic in GF(2^m).

Field elements are ints used as bitmasks: bit ``i`` is the coefficient of
``x^i``. Each field is reduced by a fixed primitive polynomial, so the
element ``0b10`` (the class of ``x``) generates the multiplicative group.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError

# primitive polynomials over GF(2), bit i <-> x^i
PRIMITIVE_MODULI = {
    1: 0b11,  # x + 1
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10000011,  # x^7 + x + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,  # x^9 + x^4 + 1
    10: 0b10000001001,  # x^10 + x^3 + 1
    11: 0b100000000101,  # x^11 + x^2 + 1
    12: 0b1000001010011,  # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,  # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,  # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,  # x^15 + x + 1
    16: 0b10001000000001011,  # x^16 + x^12 + x^3 + x + 1
}


def _as_bit_matrix(M) -> np.ndarray:
    a = np.asarray(M)
    if a.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got shape {a.shape}")
    if a.size and not np.isin(a, (0, 1)).all():
        raise InputError("binary matrix entries must be 0 or 1")
    return a.astype(np.uint8)


def gf2_determinant(M) -> int:
    """Determinant over GF(2) by Gaussian elimination."""
    a = _as_bit_matrix(M).copy()
    rows, cols = a.shape
    if rows != cols:
        raise InputError(f"determinant needs a square matrix, got {rows}x{cols}")
    for c in range(cols):
        pivots = np.nonzero(a[c:, c])[0]
        if len(pivots) == 0:
            return 0
        r = c + pivots[0]
        if r != c:
            a[[c, r]] = a[[r, c]]
        below = np.nonzero(a[c + 1 :, c])[0] + c + 1
        a[below] ^= a[c]
    return 1


def gf2_rank(M) -> int:
    a = _as_bit_matrix(M).copy()
    rank = 0
    for c in range(a.shape[1]):
        pivots = np.nonzero(a[rank:, c])[0]
        if len(pivots) == 0:
            continue
        r = rank + pivots[0]
        a[[rank, r]] = a[[r, rank]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != rank]
        a[others] ^= a[rank]
        rank += 1
        if rank == a.shape[0]:
            break
    return rank


def all_ones_minus_identity(n: int) -> np.ndarray:
    """Adjacency matrix ``J - I`` of the loopless complete digraph."""
    return (np.ones((n, n), dtype=np.uint8) - np.eye(n, dtype=np.uint8)).astype(np.uint8)


def derangement_parity(n: int, method: str = "recurrence") -> int:
    """Parity of the number of fixed-point-free permutations of ``n`` items."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if method == "recurrence":
        d = 0  # d(1)
        for k in range(2, n + 1):
            d = (k * d + (-1) ** k) % 2
        return d
    if method == "enumerate":
        if n > 12:
            raise InputError(f"enumeration limited to n <= 12, got {n}")
        count = sum(1 for perm in itertools.permutations(range(n)) if all(perm[i] != i for i in range(n)))
        return count % 2
    raise InputError(f"unknown method {method!r}")


@dataclass(frozen=True)
class Gf2mField:
    """GF(2^m) for ``1 <= m <= 16`` with a fixed primitive modulus."""

    m: int

    def __post_init__(self):
        if self.m not in PRIMITIVE_MODULI:
            raise InputError(f"field degree m must be in 1..16, got {self.m}")

    @property
    def modulus(self) -> int:
        return PRIMITIVE_MODULI[self.m]

    @property
    def order(self) -> int:
        return 1 << self.m

    @property
    def generator(self) -> int:
        """The class of ``x``; equals 1 in GF(2)."""
        return 0b10 if self.m > 1 else 1

    def _check(self, a: int) -> None:
        if not 0 <= a < self.order:
            raise InputError(f"{a} is not an element of GF(2^{self.m})")

    def add(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        """Carry-less product reduced modulo the field polynomial."""
        self._check(a)
        self._check(b)
        result = 0
        top = self.order
        while b:
            if b & 1:
                result ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= self.modulus
        return result

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in a field")
        return self.pow(a, self.order - 2)

    # vectorized arithmetic through log/antilog tables

    @functools.cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        size = self.order - 1
        exp = np.zeros(2 * size, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(size):
            exp[i] = x
            log[x] = i
            x = self.mul(x, self.generator)
        exp[size:] = exp[:size]
        return exp, log

    def mul_array(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        exp, log = self._tables
        out = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, out)


def gf2m_matrix_det(field: Gf2mField, A: Sequence[Sequence[int]]) -> int:
    """Determinant over GF(2^m) by elimination (signs vanish in characteristic 2)."""
    rows = [list(map(int, r)) for r in A]
    k = len(rows)
    if any(len(r) != k for r in rows):
        raise InputError("determinant needs a square matrix")
    det = 1
    for c in range(k):
        r = next((i for i in range(c, k) if rows[i][c]), None)
        if r is None:
            return 0
        rows[c], rows[r] = rows[r], rows[c]
        pivot = rows[c][c]
        det = field.mul(det, pivot)
        pinv = field.inv(pivot)
        for i in range(c + 1, k):
            if rows[i][c]:
                factor = field.mul(rows[i][c], pinv)
                rows[i] = [x ^ field.mul(factor, y) for x, y in zip(rows[i], rows[c])]
    return det


def gf2m_matmul(field: Gf2mField, A, B) -> list[list[int]]:
    k, mid, cols = len(A), len(B), len(B[0])
    out = [[0] * cols for _ in range(k)]
    for i in range(k):
        for j in range(cols):
            acc = 0
            for t in range(mid):
                acc ^= field.mul(A[i][t], B[t][j])
            out[i][j] = acc
    return out

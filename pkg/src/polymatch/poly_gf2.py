"""Arithmetic in the truncated polynomial ring F2[X]/(X^w_th).

A ring element is a bit vector of length ``w_th``: bit ``i`` is the
coefficient of ``X^i``.  Python integers already store their magnitude as
little-endian machine words, so a plain ``int`` is the packed-word
representation; the top word is masked to ``w_th`` bits after every
operation.  Addition is XOR, multiplication is a sequence of shifts and
XORs, and nothing above ``X^(w_th - 1)`` is ever stored.

The printed form (hex) is LSB-first in the sense that the lowest
coefficient is the least significant hex digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

__all__ = [
    "TruncatedPoly",
    "monomial",
    "add",
    "mul",
    "min_degree",
    "clmul",
    "low_mask",
]


def low_mask(w_th: int) -> int:
    """Integer with the lowest ``w_th`` bits set."""
    return (1 << w_th) - 1


def clmul(a: int, b: int, w_th: int) -> int:
    """Carry-less product of two bit-packed polynomials, truncated to ``w_th`` bits.

    One shifted copy of the denser operand is XORed in per set bit of the
    sparser one.  Shifts at or beyond ``w_th`` are skipped since they vanish.
    """
    if not a or not b:
        return 0
    if a.bit_count() < b.bit_count():
        a, b = b, a
    mask = (1 << w_th) - 1
    a &= mask
    acc = 0
    while b:
        low = b & -b
        i = low.bit_length() - 1
        if i >= w_th:
            break
        acc ^= a << i
        b ^= low
    return acc & mask


@dataclass(frozen=True)
class TruncatedPoly:
    """Element of F2[X]/(X^w_th) stored as a packed bit vector."""

    bits: int
    w_th: int

    def __post_init__(self):
        if self.w_th < 1:
            raise ValueError(f"w_th must be positive, got {self.w_th}")
        if self.bits < 0 or self.bits >> self.w_th:
            raise ValueError("bits do not fit in w_th coefficients")

    @classmethod
    def zero(cls, w_th: int) -> "TruncatedPoly":
        return cls(0, w_th)

    @classmethod
    def one(cls, w_th: int) -> "TruncatedPoly":
        return cls(1, w_th)

    @classmethod
    def truncating(cls, bits: int, w_th: int) -> "TruncatedPoly":
        """Build from an arbitrary non-negative integer, dropping terms of degree >= w_th."""
        return cls(bits & low_mask(w_th), w_th)

    @classmethod
    def from_exponents(cls, exponents: Iterable[int], w_th: int) -> "TruncatedPoly":
        bits = 0
        for e in exponents:
            if e < w_th:
                bits ^= 1 << e
        return cls(bits, w_th)

    @classmethod
    def from_coefficients(cls, coeffs: Iterable[int], w_th: int) -> "TruncatedPoly":
        bits = 0
        for i, c in enumerate(coeffs):
            if i >= w_th:
                break
            if c & 1:
                bits |= 1 << i
        return cls(bits, w_th)

    @classmethod
    def from_hex(cls, text: str, w_th: int) -> "TruncatedPoly":
        return cls(int(text, 16), w_th)

    def to_hex(self) -> str:
        digits = (self.w_th + 3) // 4
        return format(self.bits, f"0{digits}x")

    def coefficients(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.w_th)]

    def exponents(self) -> list[int]:
        out = []
        b = self.bits
        while b:
            low = b & -b
            out.append(low.bit_length() - 1)
            b ^= low
        return out

    def is_zero(self) -> bool:
        return self.bits == 0

    def min_degree(self) -> Optional[int]:
        return min_degree(self)

    def truncate(self, w_th: int) -> "TruncatedPoly":
        """Image under the projection onto F2[X]/(X^w_th) for a smaller ``w_th``."""
        if w_th > self.w_th:
            raise ValueError("can only truncate to a smaller w_th")
        return TruncatedPoly(self.bits & low_mask(w_th), w_th)

    def __add__(self, other: "TruncatedPoly") -> "TruncatedPoly":
        return add(self, other)

    __sub__ = __add__

    def __neg__(self) -> "TruncatedPoly":
        return self

    def __mul__(self, other: "TruncatedPoly") -> "TruncatedPoly":
        return mul(self, other)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __repr__(self) -> str:
        terms = self.exponents()
        if not terms:
            body = "0"
        else:
            body = " + ".join("1" if e == 0 else ("X" if e == 1 else f"X^{e}") for e in terms)
        return f"TruncatedPoly({body}; w_th={self.w_th})"


def _check_same_ring(a: TruncatedPoly, b: TruncatedPoly) -> None:
    if a.w_th != b.w_th:
        raise ValueError(f"mismatched truncation thresholds: {a.w_th} != {b.w_th}")


def monomial(w: int, w_th: int) -> TruncatedPoly:
    """X^w, which is the zero polynomial once w >= w_th."""
    if w < 0:
        raise ValueError("exponent must be non-negative")
    if w >= w_th:
        return TruncatedPoly(0, w_th)
    return TruncatedPoly(1 << w, w_th)


def add(a: TruncatedPoly, b: TruncatedPoly) -> TruncatedPoly:
    _check_same_ring(a, b)
    return TruncatedPoly(a.bits ^ b.bits, a.w_th)


def mul(a: TruncatedPoly, b: TruncatedPoly) -> TruncatedPoly:
    _check_same_ring(a, b)
    return TruncatedPoly(clmul(a.bits, b.bits, a.w_th), a.w_th)


def min_degree(a: TruncatedPoly) -> Optional[int]:
    """Lowest exponent with a nonzero coefficient, or None for the zero polynomial."""
    if a.bits == 0:
        return None
    return (a.bits & -a.bits).bit_length() - 1

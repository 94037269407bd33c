"""Exact truncated power series over the integers.

Series are plain lists of Python ints, index = exponent. Products use
Kronecker substitution: both operands are packed into one big integer with
fixed-width signed slots, multiplied by GMP, and unpacked.
"""

from __future__ import annotations

from typing import Sequence

import gmpy2
import numpy as np

__all__ = [
    "mul_truncated",
    "pow_truncated",
    "pentagonal_series",
    "delta_series",
    "eisenstein_e4_series",
    "sigma3",
]


def _slot_bits(a: Sequence[int], b: Sequence[int]) -> int:
    amax = max((abs(int(v)) for v in a), default=0)
    bmax = max((abs(int(v)) for v in b), default=0)
    bound = amax * bmax * min(len(a), len(b))
    # sign bit plus headroom, rounded to whole hex digits
    bits = bound.bit_length() + 2
    return (bits + 3) // 4 * 4


def _pack(coeffs: Sequence[int], bits: int) -> gmpy2.mpz:
    width = bits // 4
    bias = 1 << (bits - 1)
    digits = "".join(format(int(c) + bias, f"0{width}x") for c in reversed(coeffs))
    packed = gmpy2.mpz(digits, 16)
    return packed - _bias(len(coeffs), bits)


def _bias(n: int, bits: int) -> gmpy2.mpz:
    width = bits // 4
    slot = "8" + "0" * (width - 1)
    return gmpy2.mpz(slot * n, 16)


def _unpack(value: gmpy2.mpz, bits: int, n: int) -> list[int]:
    width = bits // 4
    shifted = gmpy2.f_mod_2exp(value + _bias(n, bits), bits * n)
    digits = shifted.digits(16).rjust(width * n, "0")
    bias = 1 << (bits - 1)
    return [int(digits[len(digits) - (i + 1) * width : len(digits) - i * width], 16) - bias for i in range(n)]


def mul_truncated(a: Sequence[int], b: Sequence[int], n_terms: int) -> list[int]:
    """Product of two integer series, keeping exponents ``0 .. n_terms-1``."""
    a = list(a[:n_terms])
    b = list(b[:n_terms])
    if not a or not b:
        return [0] * n_terms
    bits = _slot_bits(a, b)
    product = _pack(a, bits) * _pack(b, bits)
    return _unpack(product, bits, n_terms)


def pow_truncated(a: Sequence[int], exponent: int, n_terms: int) -> list[int]:
    """``a**exponent`` by repeated squaring."""
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    result = [1] + [0] * (n_terms - 1)
    base = list(a[:n_terms])
    while exponent:
        if exponent & 1:
            result = mul_truncated(result, base, n_terms)
        exponent >>= 1
        if exponent:
            base = mul_truncated(base, base, n_terms)
    return result


def pentagonal_series(n_terms: int) -> list[int]:
    """``prod_{n>=1} (1 - q^n) = sum_k (-1)^k q^(k(3k-1)/2)`` over all integers k."""
    coeffs = [0] * n_terms
    k = 0
    while True:
        k_gen = [k * (3 * k - 1) // 2, k * (3 * k + 1) // 2] if k else [0]
        if min(k_gen) >= n_terms:
            break
        for e in k_gen:
            if e < n_terms:
                coeffs[e] += -1 if k % 2 else 1
        k += 1
    return coeffs


def delta_series(limit: int) -> list[int]:
    """Coefficients of ``q prod (1 - q^n)^24`` for exponents ``0 .. limit``."""
    eta24 = pow_truncated(pentagonal_series(limit), 24, limit)
    return [0] + eta24


def sigma3(limit: int) -> np.ndarray:
    """``sigma_3(n)`` for ``0 <= n <= limit`` (entry 0 is 0)."""
    if limit > 1_900_000:
        raise ValueError("sigma3 sieve limited to 1.9e6 to stay within int64")
    out = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        out[d::d] += d**3
    return out


def eisenstein_e4_series(limit: int) -> list[int]:
    """``E_4 = 1 + 240 sum sigma_3(n) q^n`` for exponents ``0 .. limit``."""
    s3 = sigma3(limit)
    return [1] + [240 * int(v) for v in s3[1:]]

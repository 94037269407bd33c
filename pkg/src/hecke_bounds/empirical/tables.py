"""Fourier coefficient tables of level-1 eigenforms and their CSV format.

CSV layout::

    # label=delta
    # weight=12
    # limit=5
    1,1
    2,-24
    ...
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .qseries import delta_series, eisenstein_e4_series, mul_truncated

__all__ = [
    "CoefficientTable",
    "TableFormatError",
    "DataIntegrityError",
    "MAX_LIMIT",
    "delta_coefficients",
    "second_form_coefficients",
    "normalized_ap",
    "primes_up_to",
    "read_table",
    "write_table",
]

MAX_LIMIT = 1_000_000


class TableFormatError(ValueError):
    """Malformed coefficient CSV."""


class DataIntegrityError(ValueError):
    """Coefficients violate an invariant every normalized eigenform satisfies."""


@dataclass(frozen=True)
class CoefficientTable:
    """Exact coefficients ``c_1 .. c_N`` of a normalized cusp form of weight ``k``."""

    label: str
    weight: int
    limit: int
    coeffs: tuple[int, ...]  # coeffs[n - 1] == c_n

    def __post_init__(self):
        if len(self.coeffs) != self.limit:
            raise ValueError(f"expected {self.limit} coefficients, got {len(self.coeffs)}")

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise IndexError(f"n={n} outside 1..{self.limit}")
        return self.coeffs[n - 1]

    def items(self) -> Iterable[tuple[int, int]]:
        return enumerate(self.coeffs, start=1)

    def truncate(self, limit: int) -> "CoefficientTable":
        if limit > self.limit:
            raise ValueError(f"cannot extend table of limit {self.limit} to {limit}")
        return CoefficientTable(self.label, self.weight, limit, self.coeffs[:limit])

    def validate(self, spot_checks: int = 200, seed: int = 0) -> None:
        """Check normalization, Deligne's bound at every prime, and multiplicativity spots."""
        if self.limit >= 1 and self[1] != 1:
            raise DataIntegrityError(f"{self.label}: c_1 = {self[1]}, expected 1")
        check_deligne(self)
        check_multiplicativity(self, spot_checks, seed)


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def check_deligne(table: CoefficientTable) -> None:
    """``c_p^2 <= 4 p^(k-1)`` exactly, for every prime ``p <= N``."""
    for p in primes_up_to(table.limit):
        p = int(p)
        c = table[p]
        if c * c > 4 * p ** (table.weight - 1):
            raise DataIntegrityError(
                f"{table.label}: |c_{p}| = {abs(c)} exceeds 2 p^((k-1)/2) with k={table.weight}"
            )


def check_multiplicativity(table: CoefficientTable, count: int = 200, seed: int = 0) -> None:
    """``c_mn = c_m c_n`` for ``count`` random coprime pairs with ``mn <= N``."""
    if table.limit < 6 or count <= 0:
        return
    rng = random.Random(seed)
    checked = 0
    while checked < count:
        m = rng.randint(2, math.isqrt(table.limit))
        n = rng.randint(2, table.limit // m)
        if math.gcd(m, n) != 1:
            continue
        if table[m * n] != table[m] * table[n]:
            raise DataIntegrityError(f"{table.label}: c_{m * n} != c_{m} c_{n}")
        checked += 1


def _check_limit(limit: int) -> None:
    if not 1 <= limit <= MAX_LIMIT:
        raise ValueError(f"limit must lie in [1, {MAX_LIMIT}], got {limit}")


def delta_coefficients(limit: int) -> CoefficientTable:
    """Ramanujan tau(n) for ``n <= limit`` from ``q prod (1 - q^n)^24``."""
    _check_limit(limit)
    series = delta_series(limit)
    table = CoefficientTable("delta", 12, limit, tuple(series[1 : limit + 1]))
    table.validate()
    return table


def second_form_coefficients(limit: int) -> CoefficientTable:
    """The weight-16 level-1 eigenform ``E_4 * Delta``."""
    _check_limit(limit)
    product = mul_truncated(eisenstein_e4_series(limit), delta_series(limit), limit + 1)
    table = CoefficientTable("e4delta", 16, limit, tuple(product[1 : limit + 1]))
    table.validate()
    return table


def normalized_ap(table: CoefficientTable, p: int) -> float:
    """``c_p / p^((k-1)/2)``, in ``[-2, 2]``."""
    if p > table.limit:
        raise ValueError(f"p={p} beyond table limit {table.limit}")
    if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
        raise ValueError(f"{p} is not prime")
    return table[p] / p ** ((table.weight - 1) / 2)


def normalized_ap_array(table: CoefficientTable, primes: Sequence[int]) -> np.ndarray:
    return np.array([table[int(p)] / int(p) ** ((table.weight - 1) / 2) for p in primes])


def write_table(table: CoefficientTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# label={table.label}\n# weight={table.weight}\n# limit={table.limit}\n")
        fh.writelines(f"{n},{c}\n" for n, c in table.items())


def read_table(path: str | Path, validate: bool = True) -> CoefficientTable:
    """Parse a coefficient CSV; malformed content raises :class:`TableFormatError` with its line number."""
    header: dict[str, str] = {}
    coeffs: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition("=")
                if not sep or coeffs:
                    raise TableFormatError(f"{path}:{lineno}: bad header line {line!r}")
                header[key.strip()] = value.strip()
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise TableFormatError(f"{path}:{lineno}: expected 'n,c_n', got {line!r}")
            try:
                n, c = int(parts[0]), int(parts[1])
            except ValueError:
                raise TableFormatError(f"{path}:{lineno}: non-integer field in {line!r}") from None
            if n != len(coeffs) + 1:
                raise TableFormatError(f"{path}:{lineno}: expected n={len(coeffs) + 1}, got n={n}")
            coeffs.append(c)
    missing = {"label", "weight", "limit"} - header.keys()
    if missing:
        raise TableFormatError(f"{path}: missing header field(s) {sorted(missing)}")
    try:
        weight, limit = int(header["weight"]), int(header["limit"])
    except ValueError:
        raise TableFormatError(f"{path}: weight and limit must be integers") from None
    if limit != len(coeffs):
        raise TableFormatError(f"{path}: header limit={limit} but {len(coeffs)} rows")
    table = CoefficientTable(header["label"], weight, limit, tuple(coeffs))
    if validate:
        table.validate()
    return table

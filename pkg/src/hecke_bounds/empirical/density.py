"""Finite-range proxies for the Dirichlet densities the bounds control.

Two proxies are reported for the same set of primes: the natural proportion
among filtered primes ``p <= N``, and the ratio of partial sums of
``p^(-s)`` at a few fixed ``s`` slightly above 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tables import CoefficientTable, normalized_ap_array, primes_up_to

__all__ = [
    "PrimeFilter",
    "AllPrimes",
    "CongruenceClass",
    "QuadraticSplit",
    "CubicSplit",
    "DensityEstimate",
    "sign_density",
    "DEFAULT_S_VALUES",
]

DEFAULT_S_VALUES = (1.1, 1.05, 1.01)
PREDICATES = ("lt", "abs-gt")


class PrimeFilter:
    name = "all"

    def mask(self, primes: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class AllPrimes(PrimeFilter):
    def mask(self, primes):
        return np.ones(len(primes), dtype=bool)

    @property
    def name(self):
        return "all"


@dataclass(frozen=True)
class CongruenceClass(PrimeFilter):
    """Primes ``p = residue (mod modulus)``."""

    modulus: int
    residue: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")

    def mask(self, primes):
        return primes % self.modulus == self.residue % self.modulus

    @property
    def name(self):
        return f"p={self.residue % self.modulus} mod {self.modulus}"


@dataclass(frozen=True)
class QuadraticSplit(PrimeFilter):
    """Primes split in ``Q(sqrt(d))``: ``p`` odd, coprime to ``d``, ``(d/p) = 1``."""

    d: int

    def mask(self, primes):
        out = np.zeros(len(primes), dtype=bool)
        for i, p in enumerate(primes):
            p = int(p)
            if p == 2 or self.d % p == 0:
                continue
            out[i] = pow(self.d % p, (p - 1) // 2, p) == 1
        return out

    @property
    def name(self):
        return f"split in Q(sqrt({self.d}))"


@dataclass(frozen=True)
class CubicSplit(PrimeFilter):
    """Primes splitting completely in ``Q(zeta_3, 2^(1/3))``, i.e. ``p = x^2 + 27 y^2``.

    Equivalent test: ``p = 1 (mod 3)`` and 2 is a cube mod p.
    """

    def mask(self, primes):
        out = np.zeros(len(primes), dtype=bool)
        for i, p in enumerate(primes):
            p = int(p)
            out[i] = p % 3 == 1 and pow(2, (p - 1) // 3, p) == 1
        return out

    @property
    def name(self):
        return "p=x^2+27y^2"


@dataclass(frozen=True)
class DensityEstimate:
    hits: int
    total: int
    proportion: float
    dirichlet_weighted: tuple[tuple[float, float], ...]
    limit: int
    predicate: str = ""
    filter: str = "all"

    def __post_init__(self):
        if not 0 <= self.hits <= self.total:
            raise ValueError(f"need 0 <= hits <= total, got {self.hits}/{self.total}")

    def to_dict(self) -> dict:
        return {
            "hits": self.hits,
            "total": self.total,
            "proportion": self.proportion,
            "dirichlet_weighted": [{"s": s, "ratio": r} for s, r in self.dirichlet_weighted],
            "limit": self.limit,
            "predicate": self.predicate,
            "filter": self.filter,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def sign_density(
    tables: Sequence[CoefficientTable],
    weights: Sequence[float],
    threshold: float = 0.0,
    prime_filter: PrimeFilter | None = None,
    limit: int | None = None,
    predicate: str = "lt",
    s_values: Sequence[float] = DEFAULT_S_VALUES,
) -> DensityEstimate:
    """Estimate the density of primes where ``sum w_i a_p(f_i)`` meets the predicate.

    ``predicate="lt"`` counts ``sum < threshold``; ``"abs-gt"`` counts
    ``|sum| > threshold``. ``a_p`` is the normalized coefficient
    ``c_p / p^((k-1)/2)``.
    """
    if len(tables) != len(weights) or not tables:
        raise ValueError("need one weight per table and at least one table")
    if predicate not in PREDICATES:
        raise ValueError(f"predicate must be one of {PREDICATES}, got {predicate!r}")
    limit = min(t.limit for t in tables) if limit is None else limit
    if any(t.limit < limit for t in tables):
        raise ValueError(f"every table must reach limit {limit}")
    if any(s <= 1 for s in s_values):
        raise ValueError("Dirichlet weights need s > 1")
    prime_filter = prime_filter or AllPrimes()
    primes = primes_up_to(limit)
    primes = primes[prime_filter.mask(primes)]
    if len(primes) == 0:
        raise ValueError(f"no primes <= {limit} pass filter {prime_filter.name}")
    combo = np.zeros(len(primes))
    for table, w in zip(tables, weights):
        combo += float(w) * normalized_ap_array(table, primes)
    hit = combo < threshold if predicate == "lt" else np.abs(combo) > threshold
    hits, total = int(hit.sum()), len(primes)
    logp = np.log(primes.astype(float))
    ratios = []
    for s in s_values:
        w = np.exp(-s * logp)
        ratios.append((float(s), float(w[hit].sum() / w.sum())))
    label = f"{'+'.join(f'{w:g}*{t.label}' for t, w in zip(tables, weights))} "
    label += f"{'<' if predicate == 'lt' else '|.|>'} {threshold:g}"
    return DensityEstimate(hits, total, hits / total, tuple(ratios), limit, label, prime_filter.name)

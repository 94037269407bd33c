"""Sato-Tate sampling and Monte-Carlo checks of the Ramanujan-case bounds.

Angles follow ``(2/pi) sin^2(theta) d theta`` on ``[0, pi]`` with CDF
``(theta - sin(theta) cos(theta)) / pi``; samples are ``a = 2 cos(theta)``.
Streams come from numpy's PCG64 seeded through ``SeedSequence([seed, stream])``
and are generated in fixed-size chunks, so results do not depend on the
thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..bounds import CombinationSpec, interval_bound, rc_real_bound

__all__ = [
    "RNG_ALGORITHM",
    "SatakeSampleBatch",
    "MonteCarloCheck",
    "sato_tate_cdf",
    "sato_tate_sample",
    "monte_carlo_bound_check",
    "SATO_TATE_ABS_GT_1",
]

RNG_ALGORITHM = "numpy.PCG64/SeedSequence"
CHUNK = 1 << 18
# Sato-Tate mass of |2 cos theta| > 1
SATO_TATE_ABS_GT_1 = 2.0 / 3.0 - math.sqrt(3.0) / (2.0 * math.pi)


@dataclass(frozen=True)
class SatakeSampleBatch:
    count: int
    seed: int
    values: np.ndarray
    stream: int = 0
    algorithm: str = RNG_ALGORITHM


@dataclass(frozen=True)
class MonteCarloCheck:
    empirical: float
    bound: float
    passed: bool
    sigma: float
    count: int
    seed: int
    event: str
    algorithm: str = RNG_ALGORITHM

    def to_dict(self) -> dict:
        return {
            "empirical": self.empirical,
            "bound": self.bound,
            "pass": self.passed,
            "sigma": self.sigma,
            "count": self.count,
            "seed": self.seed,
            "event": self.event,
            "rng": self.algorithm,
        }


def sato_tate_cdf(theta):
    theta = np.asarray(theta, dtype=float)
    return (theta - np.sin(theta) * np.cos(theta)) / np.pi


def _invert_cdf(u: np.ndarray, iterations: int = 52) -> np.ndarray:
    lo = np.zeros_like(u)
    hi = np.full_like(u, np.pi)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = sato_tate_cdf(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _chunk(seed_seq: np.random.SeedSequence, size: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    return 2.0 * np.cos(_invert_cdf(rng.random(size)))


def sato_tate_sample(count: int, seed: int, stream: int = 0, threads: int = 1) -> SatakeSampleBatch:
    """``count`` Sato-Tate distributed values ``2 cos(theta)``; deterministic in ``(seed, stream)``."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    n_chunks = -(-count // CHUNK)
    children = np.random.SeedSequence([seed, stream]).spawn(n_chunks)
    sizes = [min(CHUNK, count - i * CHUNK) for i in range(n_chunks)]
    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(_chunk, children, sizes))
    else:
        parts = [_chunk(c, s) for c, s in zip(children, sizes)]
    return SatakeSampleBatch(count, seed, np.concatenate(parts), stream)


def monte_carlo_bound_check(
    spec: CombinationSpec,
    count: int,
    seed: int,
    interval: tuple[float, float] | None = None,
    threads: int = 1,
) -> MonteCarloCheck:
    """Compare the Sato-Tate probability of an event with its density bound.

    Each representation gets an independent Sato-Tate stream. Without
    ``interval`` the event is ``sum lambda_i a_i < t`` against
    :func:`rc_real_bound`; with ``interval=(a, b)`` (two representations) it is
    ``a < lambda_1 a_1 + lambda_2 a_2 < b`` against :func:`interval_bound`.
    Passes iff ``empirical >= bound - 3 sigma`` (binomial standard error).
    """
    if any(n != 2 for n in spec.dims):
        raise ValueError("Monte-Carlo check samples GL(2) Sato-Tate angles; all dims must be 2")
    lambdas = [complex(v) for v in spec.lambdas]
    if any(v.imag != 0 for v in lambdas):
        raise ValueError("Monte-Carlo check needs real coefficients")
    combo = np.zeros(count)
    for i, lam in enumerate(lambdas):
        combo += lam.real * sato_tate_sample(count, seed, stream=i, threads=threads).values
    if interval is None:
        t = spec.real_shift()
        bound = rc_real_bound(spec)
        hits = int(np.count_nonzero(combo < t))
        event = f"sum lambda_i a_i < {t:g}"
    else:
        if spec.r != 2:
            raise ValueError("interval check needs exactly two representations")
        a, b = interval
        bound = interval_bound(lambdas[0].real, lambdas[1].real, a, b)
        hits = int(np.count_nonzero((combo > a) & (combo < b)))
        event = f"{a:g} < lambda_1 a_1 + lambda_2 a_2 < {b:g}"
    p = hits / count
    sigma = math.sqrt(p * (1 - p) / count)
    return MonteCarloCheck(p, bound, p >= bound - 3 * sigma, sigma, count, seed, event)

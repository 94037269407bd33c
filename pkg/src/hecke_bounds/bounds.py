"""Closed-form lower density bounds for sign and magnitude events of Hecke coefficients.

Every function here is a pure evaluation of a closed-form bound. Complex
coefficients are accepted throughout; the formulas only consume their
moduli (``rc_sector_bound`` additionally reads ``Re t``).

Sign conventions for the shift ``t`` differ between families and are
validated per function, never silently negated:

* ``gln_objective`` bounds the event ``sum(lambda_i a_v) < -t`` with ``t >= 0``;
* the Ramanujan-case bounds handle ``sum(lambda_i a_v) < t`` with ``t <= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "CombinationSpec",
    "ThresholdLadder",
    "Allocation",
    "DerivedConstants",
    "coef_A",
    "coef_B",
    "coef_C",
    "coef_D",
    "coef_T",
    "derived_constants",
    "ramanujan_cutoff_c",
    "envelope_B",
    "gl2_objective",
    "gl2_terms",
    "gln_objective",
    "gln_single_rep",
    "walji_shifted_bound",
    "galois_split_bound",
    "rc_sector_bound",
    "rc_real_bound",
    "rc_real_part_bound",
    "congruence_bound_rc",
    "split_bound_quadratic",
    "split_bound_cubic",
    "product_bound",
    "interval_bound",
]

BUDGET_RTOL = 1e-12


@dataclass(frozen=True)
class CombinationSpec:
    """A linear combination ``sum(lambda_i * a_v(pi_i))`` and the data the bounds need.

    ``dims`` default to 2 (GL(2)) and ``pole_orders`` to 2, the Rankin-Selberg
    pole order of a non-solvable-polyhedral GL(2) representation.
    """

    lambdas: tuple[complex, ...]
    dims: tuple[int, ...] = ()
    pole_orders: tuple[int, ...] = ()
    twist_inequivalent: bool = True
    shift_t: complex = 0.0

    def __post_init__(self):
        lambdas = tuple(self.lambdas)
        if not lambdas:
            raise ValueError("lambdas must be non-empty")
        if all(lam == 0 for lam in lambdas):
            raise ValueError("at least one lambda must be nonzero")
        r = len(lambdas)
        dims = tuple(self.dims) or (2,) * r
        poles = tuple(self.pole_orders) or (2,) * r
        if len(dims) != r or len(poles) != r:
            raise ValueError(
                f"lambdas, dims and pole_orders must share length {r} "
                f"(got {len(dims)} dims, {len(poles)} pole orders)"
            )
        if any(int(n) != n or n < 1 for n in dims):
            raise ValueError(f"dims must be positive integers, got {dims}")
        if any(int(m) != m or m < 1 for m in poles):
            raise ValueError(f"pole orders must be positive integers, got {poles}")
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "dims", tuple(int(n) for n in dims))
        object.__setattr__(self, "pole_orders", tuple(int(m) for m in poles))

    @property
    def r(self) -> int:
        return len(self.lambdas)

    @property
    def abs_lambdas(self) -> np.ndarray:
        return np.abs(np.asarray(self.lambdas, dtype=complex))

    def real_shift(self) -> float:
        t = complex(self.shift_t)
        if t.imag != 0:
            raise ValueError(f"shift t must be real here, got {self.shift_t}")
        return t.real


@dataclass(frozen=True)
class ThresholdLadder:
    """Strictly increasing cutoffs ``1 < X_0 < X_1 < ... < X_m``."""

    cutoffs: tuple[float, ...]

    def __post_init__(self):
        cutoffs = tuple(float(x) for x in self.cutoffs)
        if not cutoffs:
            raise ValueError("a ladder needs at least one cutoff")
        if not all(math.isfinite(x) for x in cutoffs):
            raise ValueError(f"ladder cutoffs must be finite, got {cutoffs}")
        if cutoffs[0] <= 1:
            raise ValueError(f"ladder must start above 1, got X_0={cutoffs[0]}")
        if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
            raise ValueError(f"ladder must be strictly increasing, got {cutoffs}")
        object.__setattr__(self, "cutoffs", cutoffs)

    @property
    def m(self) -> int:
        return len(self.cutoffs) - 1

    @property
    def base(self) -> float:
        return self.cutoffs[0]

    @property
    def top(self) -> float:
        return self.cutoffs[-1]


@dataclass(frozen=True)
class Allocation:
    """Adversarial mass: ``tail_y`` beyond the top cutoff and ``ladder_y[k-1]`` in cell k."""

    tail_y: float
    ladder_y: tuple[float, ...] = ()

    def __post_init__(self):
        ladder_y = tuple(float(v) for v in self.ladder_y)
        if self.tail_y < 0 or any(v < 0 for v in ladder_y):
            raise ValueError("allocation entries must be nonnegative")
        object.__setattr__(self, "tail_y", float(self.tail_y))
        object.__setattr__(self, "ladder_y", ladder_y)

    @property
    def total(self) -> float:
        return self.tail_y + math.fsum(self.ladder_y)

    def as_array(self) -> np.ndarray:
        """``[y, y_1, ..., y_m]``."""
        return np.array((self.tail_y,) + self.ladder_y)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "Allocation":
        values = [max(float(v), 0.0) for v in values]
        return cls(values[0], tuple(values[1:]))

    @classmethod
    def zeros(cls, m: int) -> "Allocation":
        return cls(0.0, (0.0,) * m)

    def check_budget(self, budget: float) -> None:
        if self.total > budget * (1 + BUDGET_RTOL) + BUDGET_RTOL:
            raise ValueError(f"allocation total {self.total} exceeds budget {budget}")


@dataclass(frozen=True)
class DerivedConstants:
    A: float
    B_of: Callable[[float], float] = field(repr=False)
    T: float
    C: float
    D: float


def _elementary_symmetric(values: np.ndarray, k: int) -> float:
    e = np.zeros(k + 1)
    e[0] = 1.0
    for v in values:
        e[1:] = e[1:] + v * e[:-1]
    return float(e[k])


def coef_A(spec: CombinationSpec) -> float:
    """``sum |lambda_i|^2``."""
    return float(np.sum(spec.abs_lambdas**2))


def coef_B(spec: CombinationSpec) -> float:
    """``sum |lambda_i|``; B in the GL(n) bound and the scale of the GL(2) envelope."""
    return float(np.sum(spec.abs_lambdas))


def coef_C(spec: CombinationSpec, sharp: bool = False) -> float:
    """``sum |lambda_i| sqrt(M_i)``, or ``sum |lambda_i| M_i^(1/4)`` when ``sharp``."""
    power = 0.25 if sharp else 0.5
    return float(np.sum(spec.abs_lambdas * np.asarray(spec.pole_orders, float) ** power))


def coef_D(spec: CombinationSpec) -> float:
    return float(np.sum(np.sqrt(np.asarray(spec.pole_orders, float))))


def coef_T(spec: CombinationSpec) -> float:
    """Fourth-moment constant.

    Pairwise twist-inequivalent: ``2 sum|l|^4 + 6 sum_{i<j}|l_i l_j|^2 + 24 sum_{i<j<k<l}|l_i l_j l_k l_l|``.
    Otherwise ``2 (sum |l|)^4``, which always dominates the former.
    """
    a = spec.abs_lambdas
    coarse = 2.0 * float(np.sum(a)) ** 4
    if not spec.twist_inequivalent:
        return coarse
    fine = (
        2.0 * float(np.sum(a**4))
        + 6.0 * _elementary_symmetric(a**2, 2)
        + 24.0 * _elementary_symmetric(a, 4)
    )
    assert fine <= coarse * (1 + 1e-12), (fine, coarse)
    return fine


def ramanujan_cutoff_c(x: float) -> float:
    """Largest root of ``t^4 - 3 t^2 - 1 - x``.

    If ``|a_v(Sym^4 pi)| <= x`` then ``|a_v(pi)| <= c(x)``.
    """
    if x < 0:
        raise ValueError(f"c(x) requires x >= 0, got {x}")
    return math.sqrt((3.0 + math.sqrt(13.0 + 4.0 * x)) / 2.0)


def envelope_B(spec: CombinationSpec, x: float) -> float:
    """``B(x) = c(x) * sum |lambda_i|``."""
    return ramanujan_cutoff_c(x) * coef_B(spec)


def derived_constants(spec: CombinationSpec, sharp: bool = False) -> DerivedConstants:
    scale = coef_B(spec)
    return DerivedConstants(
        A=coef_A(spec),
        B_of=lambda x: ramanujan_cutoff_c(x) * scale,
        T=coef_T(spec),
        C=coef_C(spec, sharp=sharp),
        D=coef_D(spec),
    )


@dataclass(frozen=True)
class GL2Terms:
    """The GL(2) objective written as ``(A - tail(y) - sum_k cell_k(y_k)) / denom``.

    Each piece has the form ``lin*y + p34*y**0.75 + p12*y**0.5`` with
    nonnegative coefficients; row 0 is the tail, row k the k-th ladder cell.
    """

    A: float
    denom: float
    lin: np.ndarray
    p34: np.ndarray
    p12: np.ndarray

    def value(self, y: np.ndarray) -> float:
        y = np.maximum(np.asarray(y, dtype=float), 0.0)
        loss = self.lin * y + self.p34 * y**0.75 + self.p12 * np.sqrt(y)
        return (self.A - math.fsum(loss)) / self.denom

    def gradient(self, y: np.ndarray, floor: float = 1e-18) -> np.ndarray:
        y = np.maximum(np.asarray(y, dtype=float), floor)
        slope = self.lin + 0.75 * self.p34 * y**-0.25 + 0.5 * self.p12 * y**-0.5
        return -slope / self.denom


def gl2_terms(spec: CombinationSpec, ladder: ThresholdLadder) -> GL2Terms:
    A, T = coef_A(spec), coef_T(spec)
    X = ladder.cutoffs
    B = [envelope_B(spec, x) for x in X]
    B0, Xm = B[0], ladder.top
    m = ladder.m
    lin = np.zeros(m + 1)
    p34 = np.zeros(m + 1)
    p12 = np.zeros(m + 1)
    p12[0] = math.sqrt(T) / Xm
    p34[0] = T**0.25 * B0 / Xm**1.5
    for k in range(1, m + 1):
        lower = X[k - 1]
        lin[k] = 2.0 * (B[k] ** 2 - B0**2) / lower**2
        p34[k] = T**0.25 * (B[k] - B0) / lower**1.5
    return GL2Terms(A=A, denom=2.0 * B0**2, lin=lin, p34=p34, p12=p12)


def gl2_objective(
    spec: CombinationSpec,
    ladder: ThresholdLadder,
    alloc: Allocation,
    budget: float | None = None,
) -> float:
    """Inner objective of the GL(2) max-min bound at a fixed ladder and allocation.

    ``budget`` defaults to ``spec.r``.
    """
    if len(alloc.ladder_y) != ladder.m:
        raise ValueError(
            f"allocation has {len(alloc.ladder_y)} ladder entries, ladder has m={ladder.m}"
        )
    alloc.check_budget(spec.r if budget is None else budget)
    return gl2_terms(spec, ladder).value(alloc.as_array())


def gln_objective(
    spec: CombinationSpec, X: float, y: float, sharp: bool = False
) -> float:
    """Inner objective of the GL(n) bound for the event ``sum(lambda_i a_v) < -t``.

    Requires ``X > 1``, real ``t >= 0`` and ``0 <= y <= r / X^2``.
    """
    t = spec.real_shift()
    if t < 0:
        raise ValueError(f"GL(n) bound uses t >= 0 (event < -t), got t={t}")
    if X <= 1:
        raise ValueError(f"X must exceed 1, got {X}")
    y_max = spec.r / X**2
    if y < 0 or y > y_max * (1 + BUDGET_RTOL):
        raise ValueError(f"y={y} outside [0, r/X^2] = [0, {y_max}]")
    y = min(y, y_max)
    A, B = coef_A(spec), coef_B(spec)
    C, D = coef_C(spec, sharp=sharp), coef_D(spec)
    lead = t * t + A
    num = lead - (t + X * B) * (t * (1 - y) + y**0.75 * C) - lead * (y + math.sqrt(y) * D)
    return num / (2.0 * (X * B + t) ** 2)


def gln_single_rep(M: float, X: float) -> float:
    """``1/(2X^2) - sqrt(M)/(2X^(5/2)) - sqrt(M)/(2X^3) - 1/(2X^4)``: one good representation, t=0."""
    s = math.sqrt(M)
    return 0.5 / X**2 - s / (2 * X**2.5) - s / (2 * X**3) - 0.5 / X**4


def walji_shifted_bound(lambda_shift: float, X: float) -> float:
    """Bound for ``|a_v(pi) - lambda| > sqrt(1 + lambda^2)`` at cutoff X."""
    if lambda_shift <= 0:
        raise ValueError(f"lambda must be positive, got {lambda_shift}")
    if X <= 1:
        raise ValueError(f"X must exceed 1, got {X}")
    lam = lambda_shift
    head = (1 + 4 * lam**2) * (1 - (2 + math.sqrt(6)) / X - 2 / X**2)
    tail = 2**0.75 * (2 * lam * math.sqrt(2) + math.sqrt(3)) * (1 + 2 * lam) / math.sqrt(X)
    return (head - tail) / (2 * (1 + 2 * lam) ** 2 * X**2)


def galois_split_bound(n: int, X: float) -> float:
    """GL(n)-route bound for ``a_v(pi) < 0`` at places splitting completely in E.

    Applies the GL(n) objective to ``pi``, ``theta*pi`` (pole order 2) and the
    ``n - 1`` twisted inductions (pole order at most 19), all with coefficient 1,
    at ``y = r/X^2``.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    spec = CombinationSpec(
        lambdas=(1.0,) * (n + 1),
        dims=(2, 2) + (4,) * (n - 1),
        pole_orders=(2, 2) + (19,) * (n - 1),
    )
    return gln_objective(spec, X, spec.r / X**2)


def _weighted_norm(spec: CombinationSpec) -> float:
    return float(np.sum(np.asarray(spec.dims) * spec.abs_lambdas))


def rc_sector_bound(spec: CombinationSpec, epsilon: float) -> float:
    """Ramanujan case: density of ``arg(sum lambda_i a_v - t)`` outside ``(-eps, eps)``.

    ``t`` may be complex; its real part enters through the ``Re t sec(eps)`` term.
    """
    if not 0 < epsilon < math.pi / 2:
        raise ValueError(f"epsilon must lie in (0, pi/2), got {epsilon}")
    t = complex(spec.shift_t)
    sec = 1.0 / math.cos(epsilon)
    bound = _weighted_norm(spec) + abs(t)
    return (abs(t) ** 2 + coef_A(spec) + bound * t.real * sec) / ((1 + sec) * bound**2)


def _nonpositive_shift(spec: CombinationSpec) -> float:
    t = spec.real_shift()
    if t > 0:
        raise ValueError(f"Ramanujan-case bounds need t <= 0, got t={t}")
    return t


def rc_real_bound(spec: CombinationSpec) -> float:
    """Density of ``sum lambda_i a_v < t`` for real combinations, ``t <= 0``."""
    t = _nonpositive_shift(spec)
    N = _weighted_norm(spec)
    return (coef_A(spec) + t * N) / (2 * (N + abs(t)) ** 2)


def rc_real_part_bound(spec: CombinationSpec) -> float:
    """Density of ``Re(sum lambda_i a_v) < t`` for arbitrary complex combinations."""
    t = _nonpositive_shift(spec)
    N = _weighted_norm(spec)
    return (coef_A(spec) + 2 * t * N) / (4 * (N + abs(t)) ** 2)


def congruence_bound_rc(n: int, h: int, t: float = 0.0) -> float:
    """``a_v(pi) < t`` on a ray class mod m, with h the narrow ray class number."""
    if n < 1 or h < 1:
        raise ValueError(f"n and h must be positive integers, got n={n}, h={h}")
    if t > 0:
        raise ValueError(f"t must be <= 0, got {t}")
    denom = 2 * (n + abs(t)) ** 2
    return 1 / (denom * h) + t * n / denom


def split_bound_quadratic(n: int, d: int, t: float = 0.0, magnitude: bool = False) -> float:
    """Places splitting completely in E (quadratic subextension, Gal(E/L) abelian of order n).

    With ``magnitude=True`` returns the ``|a_v(pi)| > 1`` variant ``(n+1)/(72 n^2)``,
    which coincides with ``d=3, t=0``.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if magnitude:
        return (n + 1) / (72 * n**2)
    if d not in (2, 3):
        raise ValueError(f"d must be 2 or 3, got {d}")
    if t > 0:
        raise ValueError(f"t must be <= 0, got {t}")
    dn2 = d * d * n * n
    return (n + 1 + 2 * t * dn2) / (2 * (2 + abs(t)) ** 2 * dn2)


def split_bound_cubic(n: int, t: float = 0.0) -> float:
    """Places splitting completely in E with a cubic Galois subextension."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if t > 0:
        raise ValueError(f"t must be <= 0, got {t}")
    return (n + 2 + 18 * t * n**2) / (18 * (2 + abs(t)) ** 2 * n**2)


def product_bound(lambdas: Sequence[float], nus: Sequence[float], t: float) -> float:
    """``sum lambda_i a_v(pi_i)^2 + nu_1 a_v(s_1)a_v(t_1) + nu_2 a_v(s_2)a_v(t_2) < t``."""
    lambdas = [float(v) for v in lambdas]
    if len(nus) != 2:
        raise ValueError(f"nus must be a pair, got {nus}")
    nu1, nu2 = (float(v) for v in nus)
    if all(v == 0 for v in lambdas) and nu1 == 0 and nu2 == 0:
        raise ValueError("at least one of lambdas/nus must be nonzero")
    A = math.fsum(lambdas)
    B = math.fsum(v * v for v in lambdas) + nu1**2 + nu2**2
    C = math.fsum(abs(v) for v in lambdas)
    spread = 3 * C + 4 * abs(nu1) + 6 * abs(nu2)
    s = t - A
    return (s * s + B + s * (abs(s) + spread)) / (2 * (spread + abs(t)) ** 2)


def interval_bound(lambda1: float, lambda2: float, a: float, b: float) -> float:
    """Density of ``a < lambda1 a_v(pi_1) + lambda2 a_v(pi_2) < b`` (Ramanujan case)."""
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if lambda1 == 0 and lambda2 == 0:
        raise ValueError("lambda1 and lambda2 cannot both vanish")
    l1, l2 = lambda1, lambda2
    s = abs(l1) + abs(l2)
    sq = l1 * l1 + l2 * l2
    cap = 4 * s * s + 2 * (abs(a) + abs(b)) * s + abs(a * b)
    # mean of f_v^2 and mean of f_v for f_v = (x - a)(x - b)
    f2_mean = 2 * (l1**4 + l2**4) + 6 * l1 * l1 * l2 * l2 + sq * ((a + b) ** 2 + 2 * a * b) + (a * b) ** 2
    f_mean = sq + a * b
    return f2_mean / (2 * cap * cap) - f_mean / (2 * cap)

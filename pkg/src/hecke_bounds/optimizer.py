"""Max-min searches behind the GL(2) and GL(n) density bounds.

The inner problem (adversary spreads mass over the ladder cells) is convex
and separable, so it is solved through its KKT multiplier: every cell's mass
is an explicit function of the common marginal value, and a one-dimensional
root find fixes that value so the budget is exhausted. The outer problem
(choosing the ladder) is a heuristic multi-start coordinate ascent; any
ladder it returns is a valid bound.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import optimize

from .bounds import (
    Allocation,
    CombinationSpec,
    GL2Terms,
    ThresholdLadder,
    gl2_terms,
    gln_objective,
    gln_single_rep,
    interval_bound,
    walji_shifted_bound,
)

log = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2

__all__ = [
    "SearchConfig",
    "BoundResult",
    "minimize_allocation",
    "solve_allocation",
    "projected_gradient_allocation",
    "evaluate_ladder",
    "maximize_ladder",
    "gln_inner_min",
    "gln_bound",
    "golden_section_min",
    "positivity_threshold",
    "THRESHOLD_FAMILIES",
]


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the outer ladder search and the GL(n) cutoff search."""

    ladder_length: int = 7
    x_min: float = 1.01
    x_max: float = 1.0e4
    outer_iterations: int = 400
    inner_tolerance: float = 1e-10
    seed: int = 0
    n_starts: int = 6
    threads: int = 1
    seeds: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        if self.ladder_length < 0:
            raise ValueError(f"ladder_length must be >= 0, got {self.ladder_length}")
        if not 1 < self.x_min < self.x_max:
            raise ValueError(f"need 1 < x_min < x_max, got {self.x_min}, {self.x_max}")
        if self.inner_tolerance <= 0:
            raise ValueError("inner_tolerance must be positive")
        if self.outer_iterations < 1 or self.n_starts < 0 or self.threads < 1:
            raise ValueError("outer_iterations, threads must be >= 1 and n_starts >= 0")


@dataclass(frozen=True)
class BoundResult:
    value: float
    ladder: ThresholdLadder
    allocation: Allocation
    converged: bool
    inner_residual: float
    meta: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "ladder": list(self.ladder.cutoffs),
            "allocation": {"tail_y": self.allocation.tail_y, "ladder_y": list(self.allocation.ladder_y)},
            "converged": self.converged,
            "inner_residual": self.inner_residual,
            **({"meta": self.meta} if self.meta else {}),
        }


# --------------------------------------------------------------------------
# inner problem


@dataclass(frozen=True)
class InnerSolution:
    allocation: Allocation
    value: float
    residual: float
    converged: bool


def _mass_at(terms: GL2Terms, mu: float) -> np.ndarray:
    """Per-cell mass at which the marginal loss equals ``mu`` (``mu > max(lin)``).

    Marginal loss is ``lin + 0.75*p34*u + 0.5*p12*u^2`` with ``u = y^(-1/4)``.
    """
    excess = mu - terms.lin
    a, b = 0.5 * terms.p12, 0.75 * terms.p34
    u = 2.0 * excess / (b + np.sqrt(b * b + 4.0 * a * excess))
    return u**-4.0


def _stationarity_residual(terms: GL2Terms, y: np.ndarray) -> float:
    active = y > 0
    if active.sum() <= 1:
        return 0.0
    grad = terms.gradient(y)[active]
    return float(np.max(np.abs(grad - grad.mean())))


def solve_allocation(
    spec: CombinationSpec,
    ladder: ThresholdLadder,
    budget: float | None = None,
    tol: float = 1e-10,
) -> InnerSolution:
    """Minimize the GL(2) objective over ``{y >= 0, sum(y) <= budget}``.

    The objective is strictly decreasing in every coordinate, so the budget is
    exhausted; each coordinate has infinite marginal value at 0, so every cell
    receives positive mass. Stationarity is certified by the spread of the
    gradient across coordinates (the projected gradient on the budget face).
    """
    budget = float(spec.r if budget is None else budget)
    if budget < 0:
        raise ValueError(f"budget must be nonnegative, got {budget}")
    terms = gl2_terms(spec, ladder)
    n = ladder.m + 1
    if budget == 0:
        alloc = Allocation.zeros(ladder.m)
        return InnerSolution(alloc, terms.value(np.zeros(n)), 0.0, True)
    if n == 1:
        return InnerSolution(Allocation(budget), terms.value(np.array([budget])), 0.0, True)

    floor = float(terms.lin.max())
    log_total = math.log(budget)

    def gap(s: float) -> float:
        return math.log(float(_mass_at(terms, floor + math.exp(s)).sum())) - log_total

    lo, hi = -5.0, 5.0
    while gap(lo) < 0:
        lo -= 10.0
    while gap(hi) > 0:
        hi += 10.0
    s_star = optimize.brentq(gap, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    y = _mass_at(terms, floor + math.exp(s_star))
    y *= budget / y.sum()
    residual = _stationarity_residual(terms, y)
    scale = max(1.0, float(np.mean(np.abs(terms.gradient(y)))))
    converged = residual <= tol * scale
    if not converged:
        log.warning("inner solve residual %.3g exceeds tolerance %.3g", residual, tol * scale)
    assert math.isclose(y.sum(), budget, rel_tol=1e-12), "budget must be active at the optimum"
    return InnerSolution(Allocation.from_array(y), terms.value(y), residual, converged)


def minimize_allocation(
    spec: CombinationSpec,
    ladder: ThresholdLadder,
    budget: float | None = None,
    tol: float = 1e-10,
) -> tuple[Allocation, float]:
    """Adversary's optimal allocation for a fixed ladder, and the attained value."""
    sol = solve_allocation(spec, ladder, budget=budget, tol=tol)
    return sol.allocation, sol.value


def _project_to_face(v: np.ndarray, total: float, weights: np.ndarray | None = None) -> np.ndarray:
    """Projection onto ``{y >= 0, sum(y) = total}`` in the metric ``sum w_i (y_i - v_i)^2``.

    The minimizer is ``max(v - tau / w, 0)`` for the unique ``tau`` that meets the total.
    """
    w = np.ones_like(v) if weights is None else weights
    excess = lambda tau: float(np.maximum(v - tau / w, 0.0).sum()) - total
    lo = float(np.min((v - total) * w)) - 1.0
    hi = float(np.max(v * w)) + 1.0
    tau = optimize.brentq(excess, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)
    y = np.maximum(v - tau / w, 0.0)
    return y * (total / y.sum())


def projected_gradient_allocation(
    spec: CombinationSpec,
    ladder: ThresholdLadder,
    budget: float | None = None,
    tol: float = 1e-10,
    max_iter: int = 5_000,
    floor: float = 1e-18,
) -> InnerSolution:
    """Diagonally scaled projected gradient with Armijo backtracking on the budget face.

    Coordinates are floored at ``floor`` because the ``y^(3/4)`` and ``y^(1/2)``
    terms have unbounded slope at 0. Independent of :func:`solve_allocation`.
    """
    budget = float(spec.r if budget is None else budget)
    terms = gl2_terms(spec, ladder)
    n = ladder.m + 1
    if budget == 0 or n == 1:
        return solve_allocation(spec, ladder, budget)
    y = np.full(n, budget / n)
    f = terms.value(y)
    residual = math.inf
    for _ in range(max_iter):
        g = terms.gradient(y, floor=floor)
        residual = _stationarity_residual(terms, y)
        if residual <= tol * max(1.0, float(np.mean(np.abs(g)))):
            break
        yf = np.maximum(y, floor)
        curvature = (0.1875 * terms.p34 * yf**-1.25 + 0.25 * terms.p12 * yf**-1.5) / terms.denom
        step = 1.0
        while True:
            cand = np.maximum(_project_to_face(y - step * g / curvature, budget, curvature), floor)
            fc = terms.value(cand)
            if fc <= f + 1e-4 * float(g @ (cand - y)) or step < 1e-12:
                break
            step *= 0.5
        if fc >= f and step < 1e-12:
            break
        y, f = cand, fc
    scale = max(1.0, float(np.mean(np.abs(terms.gradient(y, floor=floor)))))
    return InnerSolution(Allocation.from_array(y), f, residual, residual <= tol * scale)


def evaluate_ladder(
    spec: CombinationSpec,
    ladder: ThresholdLadder | Sequence[float],
    budget: float | None = None,
    tol: float = 1e-10,
) -> BoundResult:
    """Bound at a user-supplied ladder (inner minimization only)."""
    if not isinstance(ladder, ThresholdLadder):
        ladder = ThresholdLadder(tuple(ladder))
    sol = solve_allocation(spec, ladder, budget=budget, tol=tol)
    return BoundResult(sol.value, ladder, sol.allocation, sol.converged, sol.residual)


# --------------------------------------------------------------------------
# outer ladder search


def _to_params(cutoffs: Sequence[float]) -> np.ndarray:
    x = np.asarray(cutoffs, dtype=float)
    return np.concatenate([[math.log(x[0] - 1.0)], np.log(np.diff(np.log(x)))])


def _from_params(p: np.ndarray) -> tuple[float, ...]:
    x0 = 1.0 + math.exp(p[0])
    logs = math.log(x0) + np.concatenate([[0.0], np.cumsum(np.exp(p[1:]))])
    return tuple(float(v) for v in np.exp(logs))


@dataclass
class _Objective:
    spec: CombinationSpec
    config: SearchConfig
    budget: float | None
    evaluations: int = 0

    def ladder(self, p: np.ndarray) -> ThresholdLadder | None:
        try:
            cutoffs = _from_params(p)
        except OverflowError:
            return None
        if cutoffs[0] < self.config.x_min or cutoffs[-1] > self.config.x_max:
            return None
        if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
            return None
        return ThresholdLadder(cutoffs)

    def __call__(self, p: np.ndarray) -> float:
        ladder = self.ladder(p)
        if ladder is None:
            return -math.inf
        self.evaluations += 1
        return solve_allocation(self.spec, ladder, self.budget, self.config.inner_tolerance).value


def _coordinate_ascent(obj: _Objective, p: np.ndarray, iterations: int) -> tuple[np.ndarray, float, bool]:
    """Log-space coordinate ascent; stops once no relative move of 1e-4 gains 1e-7."""
    p = p.copy()
    best = obj(p)
    step = 0.5
    for _ in range(iterations):
        improved = False
        for i in range(len(p)):
            for direction in (1.0, -1.0):
                trial = p.copy()
                trial[i] += direction * step
                val = obj(trial)
                if val > best + 1e-7 or (val > best and step > 1e-3):
                    p, best, improved = trial, val, True
                    break
        if not improved:
            if step <= 1e-4:
                return p, best, True
            step *= 0.5
    return p, best, False


def _geometric_start(config: SearchConfig, x0: float, top: float) -> tuple[float, ...]:
    m = config.ladder_length
    x0 = max(x0, config.x_min * 1.01)
    top = min(top, config.x_max / 1.01)
    return tuple(float(v) for v in np.geomspace(x0, max(top, x0 * 1.5), m + 1))


def _starts(spec: CombinationSpec, config: SearchConfig) -> list[tuple[float, ...]]:
    from .catalog import PUBLISHED_LADDERS

    m = config.ladder_length
    starts: list[tuple[float, ...]] = [s for s in config.seeds if len(s) == m + 1]
    starts += [lad for lad in PUBLISHED_LADDERS.values() if len(lad) == m + 1]
    starts += [_geometric_start(config, 3.0, 60.0 * (m + 1)), _geometric_start(config, 10.0, 30.0 * (m + 2))]
    rng = np.random.default_rng(config.seed)
    for _ in range(config.n_starts):
        x0 = float(np.exp(rng.uniform(math.log(2.0), math.log(30.0))))
        top = x0 * float(np.exp(rng.uniform(math.log(2.0), math.log(100.0))))
        starts.append(_geometric_start(config, x0, top))
    valid = []
    for s in starts:
        if m == 0 or all(b > a for a, b in zip(s, s[1:])):
            if config.x_min <= s[0] and s[-1] <= config.x_max:
                valid.append(tuple(float(v) for v in s))
    return _dedupe(valid)


def _run_start(spec, config, budget, start) -> tuple[float, tuple[float, ...], bool, int]:
    obj = _Objective(spec, config, budget)
    p, val, ok = _coordinate_ascent(obj, _to_params(start), config.outer_iterations)
    return val, _from_params(p), ok, obj.evaluations


def _better(a: tuple[float, tuple[float, ...]], b: tuple[float, tuple[float, ...]]) -> bool:
    if a[0] != b[0]:
        return a[0] > b[0]
    return a[1] < b[1]


def maximize_ladder(
    spec: CombinationSpec, config: SearchConfig, budget: float | None = None
) -> BoundResult:
    """Search for the ladder maximizing the GL(2) max-min bound.

    Deterministic multi-start coordinate ascent in ``(log(X_0 - 1), log-gaps)``
    followed by a Nelder-Mead polish of the winner. Candidates may run on
    ``config.threads`` threads; the reduction takes the max value, breaking
    ties by the lexicographically smaller ladder.
    """
    starts = _starts(spec, config)
    if config.threads > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            runs = list(pool.map(lambda s: _run_start(spec, config, budget, s), starts))
    else:
        runs = [_run_start(spec, config, budget, s) for s in starts]
    best_val, best_ladder, best_ok, evals = runs[0]
    for val, ladder, ok, n in runs[1:]:
        evals += n
        if _better((val, ladder), (best_val, best_ladder)):
            best_val, best_ladder, best_ok = val, ladder, ok

    obj = _Objective(spec, config, budget)
    if config.ladder_length > 0:
        polish = optimize.minimize(
            lambda p: -obj(p),
            _to_params(best_ladder),
            method="Nelder-Mead",
            options={"xatol": 1e-6, "fatol": 1e-12, "maxiter": 200 * (config.ladder_length + 1)},
        )
        if -polish.fun > best_val:
            best_val, best_ladder = -polish.fun, _from_params(polish.x)
    result = evaluate_ladder(spec, best_ladder, budget=budget, tol=config.inner_tolerance)
    meta = {"starts": len(starts), "evaluations": evals + obj.evaluations}
    return replace(result, converged=result.converged and best_ok, meta=meta)


# --------------------------------------------------------------------------
# GL(n) bound


def golden_section_min(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-10
) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol * max(1.0, abs(a) + abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def gln_inner_min(
    spec: CombinationSpec, X: float, tol: float = 1e-10, sharp: bool = False
) -> tuple[float, float]:
    """``min over 0 <= y <= r/X^2`` of the GL(n) objective; returns ``(y, value)``.

    The objective is convex in y, so a golden-section search plus the two
    endpoints gives the global minimum.
    """
    hi = spec.r / X**2
    f = lambda y: gln_objective(spec, X, y, sharp=sharp)
    y, val = golden_section_min(f, 0.0, hi, tol)
    for end in (0.0, hi):
        fe = f(end)
        if fe <= val:
            y, val = end, fe
    if spec.real_shift() == 0:
        assert y == hi, "with t = 0 the inner minimum sits at y = r/X^2"
    return y, val


def gln_bound(spec: CombinationSpec, config: SearchConfig, sharp: bool = False) -> BoundResult:
    """``max over X > 1`` of the inner GL(n) minimum.

    A log grid over ``[x_min, x_max]`` locates the best cell; golden-section
    search on the neighbouring cells refines it.
    """
    if spec.real_shift() < 0:
        raise ValueError("GL(n) bound uses t >= 0 (event < -t)")
    tol = config.inner_tolerance
    grid = np.geomspace(config.x_min, config.x_max, 600)
    values = np.array([gln_inner_min(spec, x, tol, sharp)[1] for x in grid])
    i = int(np.argmax(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    x_star, neg = golden_section_min(lambda x: -gln_inner_min(spec, x, tol, sharp)[1], lo, hi, 1e-12)
    if -neg < values[i]:
        x_star = float(grid[i])
    y_star, value = gln_inner_min(spec, x_star, tol, sharp)
    interior = 0 < i < len(grid) - 1
    return BoundResult(
        value=value,
        ladder=ThresholdLadder((x_star,)),
        allocation=Allocation(y_star),
        converged=interior,
        inner_residual=0.0,
    )


# --------------------------------------------------------------------------
# sign changes


def _interval_abs(b: float) -> float:
    return interval_bound(1.0, -1.0, -b, b)


THRESHOLD_FAMILIES: dict[str, Callable[..., Callable[[float], float]]] = {
    "interval-abs": lambda: _interval_abs,
    "gln-single": lambda M=3: (lambda X: gln_single_rep(M, X)),
    "walji-shifted": lambda lam=1.0: (lambda X: walji_shifted_bound(lam, X)),
}


def positivity_threshold(family: str, lo: float, hi: float, xtol: float = 1e-6, **params) -> float:
    """Parameter value where a bound family changes sign, by bisection.

    Families: ``interval-abs`` (half-width b), ``gln-single`` (cutoff X, param
    ``M``), ``walji-shifted`` (cutoff X, param ``lam``).
    """
    try:
        f = THRESHOLD_FAMILIES[family](**params)
    except KeyError:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(THRESHOLD_FAMILIES)}") from None
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError(f"no sign change of {family} on [{lo}, {hi}]")
    return optimize.bisect(f, lo, hi, xtol=xtol)


def _dedupe(ladders: Iterable[tuple[float, ...]]) -> list[tuple[float, ...]]:
    seen, out = set(), []
    for lad in ladders:
        if lad not in seen:
            seen.add(lad)
            out.append(lad)
    return out

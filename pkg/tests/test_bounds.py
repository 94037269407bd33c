import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hecke_bounds.bounds import (
    galois_split_bound,
    Allocation,
    CombinationSpec,
    ThresholdLadder,
    coef_A,
    coef_C,
    coef_T,
    congruence_bound_rc,
    envelope_B,
    gl2_objective,
    gl2_terms,
    gln_objective,
    gln_single_rep,
    interval_bound,
    product_bound,
    ramanujan_cutoff_c,
    rc_real_bound,
    rc_real_part_bound,
    rc_sector_bound,
    split_bound_cubic,
    split_bound_quadratic,
    walji_shifted_bound,
)

from oracles import elementary_symmetric, gl2_value_direct, quartic_root_c


def spec(*lambdas, **kw):
    return CombinationSpec(tuple(lambdas), **kw)


# ---------------------------------------------------------------- validation


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(lambdas=()),
        dict(lambdas=(0.0, 0.0)),
        dict(lambdas=(1.0,), dims=(2, 2)),
        dict(lambdas=(1.0,), dims=(0,)),
        dict(lambdas=(1.0,), pole_orders=(0,)),
    ],
)
def test_spec_rejects_bad_input(kwargs):
    with pytest.raises(ValueError):
        CombinationSpec(**kwargs)


def test_ladder_must_increase_and_exceed_one():
    with pytest.raises(ValueError):
        ThresholdLadder((3.0, 3.0))
    with pytest.raises(ValueError):
        ThresholdLadder((1.0, 2.0))
    assert ThresholdLadder((2.0,)).m == 0


def test_allocation_rejects_negative_and_overspend():
    with pytest.raises(ValueError):
        Allocation(-0.1)
    alloc = Allocation(0.7, (0.4,))
    with pytest.raises(ValueError):
        gl2_objective(spec(1.0), ThresholdLadder((3.0, 5.0)), alloc)


def test_objective_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        gl2_objective(spec(1.0), ThresholdLadder((3.0, 5.0, 8.0)), Allocation(0.5, (0.5,)))


# ---------------------------------------------------------------- coefficients


def test_coef_A_examples():
    assert coef_A(spec(1.0)) == 1
    assert coef_A(spec(1.0, -1.0)) == 2
    assert coef_A(spec(*(0.25,) * 4)) == pytest.approx(0.25, abs=1e-15)


def test_coef_T_examples():
    assert coef_T(spec(1.0)) == 2
    assert coef_T(spec(1.0, -1.0)) == 10
    assert coef_T(spec(*(0.25,) * 4, twist_inequivalent=False)) == pytest.approx(2.0, abs=1e-15)


@given(st.lists(st.floats(0.01, 3.0), min_size=1, max_size=6))
def test_coef_T_matches_elementary_symmetric_oracle(mags):
    sq = [v * v for v in mags]
    expected = 2 * sum(v**4 for v in mags) + 6 * elementary_symmetric(sq, 2) + 24 * elementary_symmetric(mags, 4)
    assert coef_T(spec(*mags)) == pytest.approx(expected, rel=1e-12)
    # twist-inequivalent T never exceeds the general one
    assert coef_T(spec(*mags)) <= coef_T(spec(*mags, twist_inequivalent=False)) * (1 + 1e-12)


@given(
    st.lists(st.floats(0.01, 3.0), min_size=1, max_size=6),
    st.lists(st.floats(0.0, 2 * math.pi), min_size=6, max_size=6),
    st.randoms(use_true_random=False),
)
def test_coef_T_symmetry(mags, phases, rnd):
    base = coef_T(spec(*mags))
    shuffled = mags[:]
    rnd.shuffle(shuffled)
    rotated = [m * cmath.exp(1j * p) for m, p in zip(mags, phases)]
    assert coef_T(spec(*shuffled)) == pytest.approx(base, rel=1e-12)
    assert coef_T(spec(*rotated)) == pytest.approx(base, rel=1e-12)


def test_sharp_C_uses_fourth_root():
    s = spec(1.0, dims=(3,), pole_orders=(16,))
    assert coef_C(s) == 4.0
    assert coef_C(s, sharp=True) == 2.0


# ---------------------------------------------------------------- c(x)


def test_cutoff_c_examples():
    assert ramanujan_cutoff_c(3.0) == 2.0
    assert ramanujan_cutoff_c(0.0) == pytest.approx(math.sqrt((3 + math.sqrt(13)) / 2), rel=1e-15)
    c = ramanujan_cutoff_c(9.47)
    assert abs(c**4 - 3 * c**2 - 1 - 9.47) / 9.47 < 1e-12
    assert c == pytest.approx(quartic_root_c(9.47), rel=1e-13)
    with pytest.raises(ValueError):
        ramanujan_cutoff_c(-0.5)


def test_cutoff_c_root_property_on_log_grid():
    xs = np.geomspace(1.0 + 1e-9, 1e6, 400)
    cs = np.array([ramanujan_cutoff_c(float(x)) for x in xs])
    residual = np.abs(cs**4 - 3 * cs**2 - 1 - xs) / (1 + xs)
    assert residual.max() < 1e-10
    assert np.all(np.diff(cs) > 0)


# ---------------------------------------------------------------- GL(2) objective


def test_zero_allocation_gives_A_over_2B_squared():
    for s, lad in [(spec(1.0), (3.0, 5.0, 8.0)), (spec(1.0, -1.0), (10.0, 23.0)), (spec(2.0), (4.0,))]:
        ladder = ThresholdLadder(lad)
        value = gl2_objective(s, ladder, Allocation.zeros(ladder.m))
        assert value == pytest.approx(coef_A(s) / (2 * envelope_B(s, lad[0]) ** 2), rel=1e-14)


def test_degenerate_ladder_keeps_only_tail():
    s = spec(1.0)
    y = 0.3
    value = gl2_objective(s, ThresholdLadder((4.0,)), Allocation(y))
    c = quartic_root_c(4.0)
    expected = (1 - math.sqrt(2 * y) / 4 - (2 * y**3) ** 0.25 * c / 4**1.5) / (2 * c * c)
    assert value == pytest.approx(expected, rel=1e-12)


@settings(max_examples=60)
@given(
    st.lists(st.floats(0.05, 2.0), min_size=1, max_size=4),
    st.lists(st.floats(0.05, 1.0), min_size=2, max_size=5),
    st.floats(1.05, 10.0),
    st.booleans(),
    st.data(),
)
def test_objective_matches_direct_display(mags, log_gaps, x0, twist, data):
    s = spec(*mags, twist_inequivalent=twist)
    cutoffs = tuple(float(x0 * math.exp(g)) for g in np.cumsum([0.0] + log_gaps[:-1]))
    ladder = ThresholdLadder(cutoffs)
    weights = data.draw(st.lists(st.floats(0.0, 1.0), min_size=ladder.m + 1, max_size=ladder.m + 1))
    total = sum(weights) or 1.0
    y = [w * s.r / total for w in weights]
    alloc = Allocation(y[0], tuple(y[1:]))
    expected = gl2_value_direct(mags, cutoffs, y[0], y[1:], twist)
    assert gl2_objective(s, ladder, alloc) == pytest.approx(expected, rel=1e-11, abs=1e-13)


@settings(max_examples=60)
@given(st.lists(st.floats(1e-4, 0.5), min_size=4, max_size=4), st.integers(0, 3), st.floats(1e-6, 0.1))
def test_objective_strictly_decreasing_in_each_allocation(y, index, bump):
    s = spec(1.0, -1.0)
    ladder = ThresholdLadder((3.0, 6.0, 11.0, 30.0))
    base = Allocation(y[0], tuple(y[1:]))
    raised = list(y)
    raised[index] += bump
    assert gl2_objective(s, ladder, Allocation(raised[0], tuple(raised[1:]))) < gl2_objective(s, ladder, base)


@settings(max_examples=60)
@given(st.integers(1, 3), st.floats(1e-3, 0.5), st.floats(1e-3, 0.5), st.floats(1.001, 1.5))
def test_objective_strictly_decreasing_in_ladder_gap(k, y_cell, y_tail, stretch):
    """Widening the gap B(X_k) - B(X) with cell k loaded lowers the bound.

    Moving X_k also changes the next cell's denominator and, for k = m, the
    tail; those channels are switched off by zero allocations.
    """
    s = spec(1.0)
    cutoffs = [3.0, 6.0, 11.0, 30.0]
    wider = cutoffs[:]
    wider[k] = cutoffs[k] * stretch if k == 3 else min(cutoffs[k] * stretch, (cutoffs[k] + cutoffs[k + 1]) / 2)
    cells = [0.0, 0.0, 0.0]
    cells[k - 1] = y_cell
    tail = 0.0 if k == 3 else y_tail
    alloc = Allocation(tail, tuple(cells))
    assert gl2_objective(s, ThresholdLadder(tuple(wider)), alloc) < gl2_objective(s, ThresholdLadder(tuple(cutoffs)), alloc)


@pytest.mark.parametrize("h", [1, 2, 4, 8])
def test_congruence_class_specialization(h):
    s = spec(*(1.0 / h,) * h, twist_inequivalent=False)
    ladder = ThresholdLadder((5.0, 9.0, 20.0))
    rng = np.random.default_rng(h)
    y = rng.dirichlet(np.ones(3)) * h
    alloc = Allocation(y[0], tuple(y[1:]))
    c = [ramanujan_cutoff_c(x) for x in ladder.cutoffs]
    X = ladder.cutoffs
    num = 1 / h - math.sqrt(2 * y[0]) / X[-1] - (2 * y[0] ** 3) ** 0.25 * c[0] / X[-1] ** 1.5
    num -= 2 * sum((c[k] ** 2 - c[0] ** 2) * y[k] / X[k - 1] ** 2 for k in (1, 2))
    num -= 2**0.25 * sum((c[k] - c[0]) * y[k] ** 0.75 / X[k - 1] ** 1.5 for k in (1, 2))
    assert gl2_objective(s, ladder, alloc) == pytest.approx(num / (2 * c[0] ** 2), rel=1e-12, abs=1e-15)


def test_terms_gradient_matches_finite_difference():
    s = spec(1.0)
    terms = gl2_terms(s, ThresholdLadder((3.0, 5.0, 8.0)))
    y = np.array([0.2, 0.5, 0.3])
    g = terms.gradient(y)
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1e-7
        fd = (terms.value(y + e) - terms.value(y - e)) / 2e-7
        assert g[i] == pytest.approx(fd, rel=1e-6)


# ---------------------------------------------------------------- GL(n)


def test_gln_published_points():
    walji = spec(1.0, dims=(3,), pole_orders=(3,))
    assert gln_objective(walji, 9.47, 9.47**-2) == pytest.approx(0.001355, abs=5e-7)
    conj = spec(1.0, dims=(4,), pole_orders=(7,))
    assert gln_objective(conj, 18.0, 18.0**-2) == pytest.approx(3.49e-4, abs=5e-7)
    assert gln_objective(conj, 18.0, 18.0**-2) > 3.49e-4


def test_gln_zero_y_and_validation():
    s = spec(1.0, -0.5, pole_orders=(3, 5))
    assert gln_objective(s, 7.0, 0.0) == pytest.approx(coef_A(s) / (2 * 49 * 1.5**2), rel=1e-14)
    with pytest.raises(ValueError):
        gln_objective(s, 7.0, 1.0)
    with pytest.raises(ValueError):
        gln_objective(s, 7.0, -1e-3)
    with pytest.raises(ValueError):
        gln_objective(spec(1.0, shift_t=-0.5), 7.0, 0.01)


def test_gln_cross_evaluation_hand_value():
    s = spec(1.0, pole_orders=(1,))
    # 1/200 - 1/(2*10^2.5) - 1/(2*10^3) - 1/(2*10^4)
    expected = 0.005 - 0.5 / 10**2.5 - 0.0005 - 0.00005
    assert gln_objective(s, 10.0, 0.01) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("M", [1, 2, 3, 7, 19])
@pytest.mark.parametrize("X", [2.0, 9.47, 18.0, 100.0])
def test_single_rep_display(M, X):
    s = spec(1.0, pole_orders=(M,))
    display = 1 / (2 * X**2) - math.sqrt(M) / (2 * X**2.5) - math.sqrt(M) / (2 * X**3) - 1 / (2 * X**4)
    assert gln_objective(s, X, X**-2) == pytest.approx(display, rel=1e-12, abs=1e-16)
    assert gln_single_rep(M, X) == pytest.approx(display, rel=1e-12, abs=1e-16)


@pytest.mark.parametrize("lam", [0.1, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("X", [5.0, 10.0, 50.0, 100.0])
def test_walji_shifted_identity(lam, X):
    general = gln_objective(spec(-2 * lam, 1.0, pole_orders=(2, 3)), X, 2 / X**2)
    assert walji_shifted_bound(lam, X) == pytest.approx(general, rel=1e-12, abs=1e-16)


def test_walji_shifted_asymptotics_and_domain():
    lam = 1.0
    for X in (1e6, 1e8):
        lead = (1 + 4 * lam**2) / (2 * (1 + 2 * lam) ** 2 * X**2)
        value = walji_shifted_bound(lam, X)
        assert 0 < value < lead
        assert value / lead == pytest.approx(1.0, abs=20 / math.sqrt(X))
    with pytest.raises(ValueError):
        walji_shifted_bound(0.0, 10.0)


# ---------------------------------------------------------------- Ramanujan case


def test_rc_real_examples():
    assert rc_real_bound(spec(1.0)) == 1 / 8
    assert rc_real_bound(spec(1.0, -1.0)) == pytest.approx(1 / 16, abs=1e-15)
    assert rc_real_part_bound(spec(1.0)) == pytest.approx(1 / 16, abs=1e-15)
    with pytest.raises(ValueError):
        rc_real_bound(spec(1.0, shift_t=0.1))


def test_rc_real_with_negative_shift():
    s = spec(1.0, -2.0, dims=(2, 3), shift_t=-0.5)
    N = 2 * 1 + 3 * 2
    assert rc_real_bound(s) == pytest.approx((5 - 0.5 * N) / (2 * (N + 0.5) ** 2), rel=1e-14)
    assert rc_real_part_bound(s) == pytest.approx((5 - N) / (4 * (N + 0.5) ** 2), rel=1e-14)


def test_rc_sector_examples():
    eps = 1e-9
    assert rc_sector_bound(spec(1.0, 2.0, dims=(2, 3)), eps) == pytest.approx(5 / (2 * 64), rel=1e-12)
    for e in (0.1, 0.7, 1.4):
        assert rc_sector_bound(spec(1.0), e) == pytest.approx(1 / ((1 + 1 / math.cos(e)) * 4), rel=1e-14)
    assert rc_sector_bound(spec(1.0, -1.0), eps) == pytest.approx(1 / 16, rel=1e-12)
    with pytest.raises(ValueError):
        rc_sector_bound(spec(1.0), math.pi / 2)


def test_rc_sector_reads_real_part_of_complex_shift():
    t = complex(-0.3, 0.4)
    s = spec(1.0, dims=(2,), shift_t=t)
    sec = 1 / math.cos(0.5)
    expected = (0.25 + 1 + 2.5 * -0.3 * sec) / ((1 + sec) * 2.5**2)
    assert rc_sector_bound(s, 0.5) == pytest.approx(expected, rel=1e-14)


def test_congruence_examples():
    for h in (1, 2, 4, 6, 12):
        assert congruence_bound_rc(2, h) == pytest.approx(1 / (8 * h), abs=1e-15)
        assert congruence_bound_rc(4, h) == pytest.approx(1 / (32 * h), abs=1e-15)
    with pytest.raises(ValueError):
        congruence_bound_rc(2, 1, 0.5)


def test_split_quadratic_examples():
    assert split_bound_quadratic(1, 3) == pytest.approx(1 / 36, abs=1e-15)
    for n in range(1, 11):
        assert split_bound_quadratic(n, 3) == pytest.approx((n + 1) / (72 * n * n), abs=1e-15)
        assert split_bound_quadratic(n, 3, magnitude=True) == pytest.approx(split_bound_quadratic(n, 3), abs=1e-15)
    # m^2 + 27 n^2 primes: splitting field of x^3 - 2 over Q(sqrt(-3)), n = 3, d = 2
    assert split_bound_quadratic(3, 2) == pytest.approx(1 / 72, abs=1e-15)
    with pytest.raises(ValueError):
        split_bound_quadratic(1, 5)


def test_split_cubic_examples():
    assert split_bound_cubic(1) == pytest.approx(1 / 24, abs=1e-15)
    assert split_bound_cubic(2) == pytest.approx(1 / 72, abs=1e-15)
    # (3 - 1.8) / (18 * 2.1^2)
    assert split_bound_cubic(1, -0.1) == pytest.approx(1.2 / 79.38, rel=1e-13)


def test_product_examples():
    assert product_bound((), (1.0, 0.0), 0.0) == pytest.approx(1 / 32, abs=1e-15)
    # t - A = 0 leaves B / (2 (3C + |t|)^2) = 1 / (2 * 16)
    assert product_bound((1.0,), (0.0, 0.0), 1.0) == pytest.approx(1 / 32, abs=1e-15)
    # A = 0, B = 3, C = 2: 3 / (2 * 10^2)
    assert product_bound((1.0, -1.0), (1.0, 0.0), 0.0) == pytest.approx(0.015, abs=1e-15)
    with pytest.raises(ValueError):
        product_bound((0.0,), (0.0, 0.0), 0.0)


def abs_interval_quartic(b):
    return (b**4 + 4 * b**3 + 5 * b**2 - 8 * b - 11) / (b + 4) ** 4


@pytest.mark.parametrize("b", [1.4, 2.0, 3.0, 0.5, 10.0])
def test_interval_matches_abs_interval_quartic(b):
    assert interval_bound(1.0, -1.0, -b, b) == pytest.approx(abs_interval_quartic(b), rel=1e-12, abs=1e-15)


def test_interval_examples():
    assert interval_bound(1.0, -1.0, -2.0, 2.0) == pytest.approx(41 / 1296, rel=1e-13)
    assert abs(interval_bound(1.0, -1.0, -1.3371, 1.3371)) < 1e-4
    with pytest.raises(ValueError):
        interval_bound(1.0, -1.0, 1.0, 1.0)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("X", [50.0, 500.0])
def test_galois_split_bound_direct(n, X):
    # GL(n) objective with n+1 reps: two of degree 2 (pole order 2), n-1 of degree 4 (pole order 19)
    s = 2 * math.sqrt(2) + (n - 1) * math.sqrt(19)
    r = n + 1
    num = r * (1 - r / X**2) - r**1.75 * s * X**-0.5 - r**1.5 * s / X
    assert galois_split_bound(n, X) == pytest.approx(num / (2 * r**2 * X**2), rel=1e-12)


def test_galois_split_bound_rejects_n():
    with pytest.raises(ValueError):
        galois_split_bound(0, 10.0)

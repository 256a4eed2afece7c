from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import zeta

from spectral_ifs.errors import BadDyadicError, OutOfRangeError, UnsupportedPError
from spectral_ifs.example_p import (
    DyadicExpansion,
    conformance_suite,
    doubling_orbits,
    example_triple,
    g,
    g_exact,
    g_left,
    g_left_exact,
    g_tail_bound,
    h_int,
    h_Q,
    harmonic_sum_check,
    hurwitz_zeta2,
    invariant_set_M,
    jump,
    lambda_member,
    mu_hat_closed,
    nowhere_diff_witness,
    row_sum_check,
    segment_transitions,
    sinc_ratio,
    trig_identity_defect,
    zeta_split_check,
)
from spectral_ifs.ifs import MapFamily, attractor_points, chi_B, mu_hat

F = Fraction


def test_g_recorded_points():
    assert g(F(1, 3)) == pytest.approx(-4 / 9, abs=1e-12)
    assert g(F(2, 3)) == pytest.approx(-5 / 9, abs=1e-12)
    assert g(0) == 0
    assert g(F(1, 2)) == -0.25
    assert g_left(F(1, 2)) == -0.75
    assert g(1) == pytest.approx(-1.0, abs=1e-15)


def test_g_exact():
    assert g_exact(F(1, 3)) == F(-4, 9)
    assert g_exact(F(2, 3)) == F(-5, 9)
    assert g_exact(F(1, 2)) == F(-1, 4)
    assert g_left_exact(F(1, 2)) == F(-3, 4)
    assert g_exact(1) == -1
    # 1/5 = .(0011): period 4, value from the periodic digit sum
    bits = [0, 0, 1, 1] * 20
    assert float(g_exact(F(1, 5))) == pytest.approx(-sum(n * b / 2 ** (n + 1) for n, b in enumerate(bits, 1)))


def test_g_float_agrees_with_exact():
    for x in [F(1, 7), F(5, 12), F(3, 8), F(9, 10)]:
        assert g(x) == pytest.approx(float(g_exact(x)), abs=g_tail_bound(60) + 1e-15)


def test_g_range():
    with pytest.raises(OutOfRangeError):
        g(1.5)
    with pytest.raises(OutOfRangeError):
        g_left(0)


def test_dyadic_expansion():
    e = DyadicExpansion.of(F(1, 2), 6)
    assert e.bits == (1, 0, 0, 0, 0, 0) and e.terminating
    e = DyadicExpansion.of(F(1, 2), 6, left=True)
    assert e.bits == (0, 1, 1, 1, 1, 1) and not e.terminating
    e = DyadicExpansion.of(F(1, 3), 10)
    assert abs(e.value() - F(1, 3)) <= F(1, 2**10)


@pytest.mark.parametrize("k, n, value", [(1, 1, F(1, 2)), (1, 2, F(1, 4)), (3, 2, F(1, 4)), (5, 3, F(1, 8))])
def test_jump_values(k, n, value):
    assert jump(k, n) == value
    x = F(k, 2**n)
    assert g_exact(x) - g_left_exact(x) == value
    assert g(x) - g_left(x) == pytest.approx(float(value), abs=1e-10)


def test_jump_levels_one_to_eight_exact():
    for n in range(1, 9):
        for k in range(1, 2**n, 2):
            x = F(k, 2**n)
            assert g_exact(x) - g_left_exact(x) == jump(k, n)


def test_jump_sums_grow_without_bound():
    partial = [sum(jump(k, n) for n in range(1, m + 1) for k in range(1, 2**n, 2)) for m in (1, 4, 8)]
    assert partial == [F(1, 2), 2, 4]


def test_bad_dyadic():
    for k, n in [(2, 2), (0, 1), (5, 2), (1, 0)]:
        with pytest.raises(BadDyadicError):
            jump(k, n)


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_nowhere_differentiable_witness(n):
    ws = nowhere_diff_witness(n)
    assert len(ws) == 2**n
    for j, (x, y, q) in enumerate(ws):
        lo, hi = F(j, 2**n), F(j + 1, 2**n)
        assert lo <= y < x < hi
        assert abs(q) > F(1, 4)


def test_h_values():
    assert [h_int(k) for k in (0, 2, 3, -1, -2)] == [0, 1, 1, 1, 1]
    # k = 6 = 2 + 4: 1 + 2*2 = 5; k = -3 = -4 + 1: 4 - 2*2 + 0 = 0
    assert h_int(6) == 5 and h_int(-3) == 0


def test_h_functional_equation():
    for n in range(-10**4, 10**4 + 1):
        for j in (0, 1):
            assert 2 * h_int(n) + n == h_int(2 * n + j)


def test_lambda_member():
    assert lambda_member((0, 0), "00")
    assert lambda_member((-1, 0), "10")
    for a in range(-10, 11):
        for b in range(-10, 11):
            assert sum(lambda_member((a, b), c) for c in ("00", "10", "01", "m11")) == 1
    with pytest.raises(ValueError):
        lambda_member((0, 0), "xx")


def test_mu_hat_closed_values():
    assert mu_hat_closed(3, 0.0, 0.0) == 1
    for n in (1, -2, 5):
        assert abs(mu_hat_closed(3, float(n), 0.0)) < 1e-12


@pytest.mark.parametrize("p", [1, 3, 5])
def test_mu_hat_closed_matches_product(p):
    T = example_triple(p)
    grid = np.arange(9) / 9
    t = np.stack(np.meshgrid(grid, grid, indexing="ij"), axis=-1).reshape(-1, 2)
    assert np.max(np.abs(mu_hat(T, t) - mu_hat_closed(p, t[:, 0], t[:, 1]))) < 1e-8


def test_refinement_equation():
    T = example_triple(3)
    t = np.random.default_rng(0).uniform(-4, 4, size=(200, 2))
    s = t @ T.RT_inv_f.T
    rhs = chi_B(T, s) * mu_hat_closed(3, s[:, 0], s[:, 1])
    assert np.max(np.abs(mu_hat_closed(3, t[:, 0], t[:, 1]) - rhs)) < 1e-9


def test_row_sum():
    r = row_sum_check(3, 0.25, 0.4, 200)
    assert r["defect"] < 5e-3
    near0 = row_sum_check(3, 0.25, 1e-9, 200)
    assert near0["rhs"] == pytest.approx(1)
    assert near0["defect"] < 5e-3


def test_row_sum_defect_decays_like_one_over_n():
    d = [row_sum_check(3, 0.25, 0.4, n)["defect"] for n in (50, 100, 200, 400)]
    ratios = [a / b for a, b in zip(d, d[1:])]
    assert all(1 < r < 4 for r in ratios)


def test_harmonic_sum():
    r = harmonic_sum_check(3, (0.3, 0.25), 40)
    assert r["defect"] < 0.01
    assert r["trig_identity_defect"] < 1e-12
    assert sinc_ratio(3, 2.0) == 1 and sinc_ratio(5, -1.0) == 1
    assert sinc_ratio(4, 1.0) == -1


def test_sinc_ratio_near_integers():
    for p in (3, 5):
        for m in (0, 1, -2):
            for eps in (1e-7, 3e-9):
                exact = np.sin(p * np.pi * (m + eps)) / (p * np.sin(np.pi * (m + eps)))
                assert sinc_ratio(p, m + eps) == pytest.approx(exact, abs=1e-6)


def test_trig_identity_p3():
    assert trig_identity_defect(np.linspace(-2, 2, 401)) < 1e-12


def test_hurwitz_zeta_against_scipy():
    for t in (0.25, 0.5, 1.7, -0.3 + 1):
        assert hurwitz_zeta2(t) == pytest.approx(zeta(2, t), abs=1e-6)


def test_zeta_split():
    for t in [(0.3, 0.25), (0.1, 0.6), (0.7, -0.4)]:
        r = zeta_split_check(3, t)
        assert r["upper"]["defect"] < 0.01 and r["lower"]["defect"] < 0.01


def test_doubling_orbits():
    assert doubling_orbits(3) == [[1, 2]]
    assert doubling_orbits(5) == [[1, 2, 4, 3]]
    assert doubling_orbits(7) == [[1, 2, 4], [3, 6, 5]]
    assert doubling_orbits(9) == [[1, 2, 4, 8, 7, 5], [3, 6]]


def test_invariant_segments_p3():
    segs = invariant_set_M(3, [1, 2])
    assert [(s.height, s.left, s.right) for s in segs] == [
        (F(1, 3), F(-4, 9), F(5, 9)), (F(2, 3), F(-5, 9), F(4, 9))]


def test_segment_transitions_zigzag():
    # from height 1/3 only l with l_2 = 1 survive, from 2/3 only l_2 = 0
    for t in (-0.4, 0.0, 0.55):
        assert segment_transitions(3, (t, 1 / 3)) == [2, 3]
    for t in (-0.5, 0.2, 0.44):
        assert segment_transitions(3, (t, 2 / 3)) == [0, 1]


def test_h_Q():
    assert h_Q([0.3, 0.0]) == 0
    assert h_Q([0.0, 0.5]) == pytest.approx(8 / 9)
    with pytest.raises(UnsupportedPError):
        h_Q([0.0, 0.5], p=5)


def test_attractor_slices_lie_between_g_and_g_plus_p():
    T = example_triple(3)
    for x, y in attractor_points(MapFamily.of(T, "B"), 6):
        vals = [g_exact(x)] + ([g_left_exact(x)] if x > 0 else [])
        assert min(vals) <= y <= max(vals) + 3


def test_rejects_even_p():
    with pytest.raises(ValueError):
        example_triple(4)


@pytest.mark.parametrize("p", [3, 5])
def test_conformance_suite(p):
    rep = conformance_suite(p)
    assert all(v["pass"] for v in rep.values()), [k for k, v in rep.items() if not v["pass"]]
    assert list(rep) == sorted(rep)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1, exclude_max=True), st.sampled_from([0, 1]))
def test_g_functional_equation(x, b):
    assert g((x + b) / 2) == pytest.approx(-(x + b) / 4 + g(x) / 2, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.fractions(0, 1, max_denominator=200).filter(lambda x: x < 1), st.sampled_from([0, 1]))
def test_g_exact_functional_equation(x, b):
    assert g_exact((x + b) / 2) == -(x + b) / 4 + g_exact(x) / 2


def test_functional_equation_at_one_uses_the_left_limit():
    # 1 = .111..., so (1 + b)/2 carries the all-ones tail as well
    assert g_left_exact(F(1, 2)) == -F(1, 4) + g_exact(1) / 2
    assert g_left_exact(1) == -F(2, 4) + g_exact(1) / 2


def test_g_functional_equation_bulk():
    xs = np.random.default_rng(0).uniform(0, 1, 10**4)
    for x in xs:
        for b in (0, 1):
            assert abs(g((x + b) / 2) - (-(x + b) / 4 + g(x) / 2)) < 1e-10

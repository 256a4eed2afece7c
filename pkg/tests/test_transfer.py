import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_ifs.cycles import find_extreme_cycles
from spectral_ifs.errors import BoxNotInvariantError
from spectral_ifs.example_p import example_triple, h_Q, harmonic_target
from spectral_ifs.ifs import chi_B, mu_hat
from spectral_ifs.spectrum import completeness_function, generate_lambda
from spectral_ifs.transfer import (
    GridFunction,
    apply_transfer,
    apply_transfer_point,
    box_is_invariant,
    children,
    constant,
    harmonic_defect,
    iterate_transfer,
)


def mu2(T):
    return lambda t: np.abs(mu_hat(T, t)) ** 2


def test_constants(ex3):
    x = np.random.default_rng(0).uniform(-5, 5, size=(1000, 2))
    assert np.max(np.abs(apply_transfer(ex3, constant(1), x) - 1)) < 1e-12
    assert np.all(apply_transfer(ex3, constant(0), x) == 0)
    assert apply_transfer_point(ex3, constant(1), [0.3, 0.1]) == pytest.approx(1, abs=1e-12)


def test_children(ex3):
    ys = children(ex3, np.array([[0.0, 0.0]]))
    assert ys.shape == (1, 4, 2)
    # (R^T)^{-1} (1, 1) = (1/4, 1/2)
    assert np.allclose(ys[0, 3], [0.25, 0.5])


def test_sinc_ratio_is_harmonic(ex3):
    x = np.random.default_rng(2).uniform(-3, 3, size=(500, 2))
    rep = harmonic_defect(ex3, lambda t: harmonic_target(3, t), x)
    assert rep.sign == "harmonic" and rep.max_defect < 1e-9


def test_h_Q_is_harmonic(ex3):
    x = np.random.default_rng(3).uniform(-3, 3, size=(500, 2))
    rep = harmonic_defect(ex3, h_Q, x)
    assert rep.sign == "harmonic" and rep.max_defect < 1e-9


def test_mu2_is_subharmonic(ex3):
    x = np.random.default_rng(4).uniform(-3, 3, size=(500, 2))
    rep = harmonic_defect(ex3, mu2(ex3), x)
    assert rep.sign == "subharmonic"
    assert rep.min_delta > -1e-12 and rep.max_delta > 1e-3


def test_neither():
    T = example_triple(3)
    rep = harmonic_defect(T, lambda t: np.sin(t[..., 0]), np.random.default_rng(0).uniform(-1, 1, (50, 2)))
    assert rep.sign == "neither"


def test_one_step_on_mu2_matches_explicit_sum(ex3):
    t = np.random.default_rng(5).uniform(-2, 2, size=(100, 2))
    ys = children(ex3, t)
    explicit = (np.abs(chi_B(ex3, ys)) ** 2 * np.abs(mu_hat(ex3, ys)) ** 2).sum(axis=-1)
    assert np.max(np.abs(apply_transfer(ex3, mu2(ex3), t) - explicit)) < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3])
def test_iterates_of_mu2_are_depth_truncated_completeness(ex3, n):
    C = find_extreme_cycles(ex3)[0]
    S = generate_lambda(ex3, C, depth=n)
    f = mu2(ex3)
    for _ in range(n):
        f = (lambda g: lambda t: apply_transfer(ex3, g, t))(f)
    t = np.random.default_rng(n).uniform(-1, 1, size=(30, 2))
    assert np.max(np.abs(f(t) - completeness_function(ex3, S, t))) < 1e-12


def test_box_invariance(ex3):
    assert box_is_invariant(ex3, 3.0)
    assert not box_is_invariant(ex3, 1.0)
    g = GridFunction.sample(constant(1), 1.0, 5, 2)
    with pytest.raises(BoxNotInvariantError):
        iterate_transfer(ex3, g, 1)


def test_grid_constant_stays_constant(ex3):
    g = GridFunction.sample(constant(1), 3.0, 17, 2)
    it = iterate_transfer(ex3, g, 5)
    assert np.max(np.abs(it.final.values - 1)) < 1e-12
    assert max(it.sup_deltas) < 1e-12


def test_grid_iteration_tracks_the_spectrum(ex3):
    g0 = GridFunction.sample(mu2(ex3), 3.0, 257, 2)
    it = iterate_transfer(ex3, g0, 6)
    assert np.all(it.final.values >= 0)
    # values grow pointwise (up to interpolation error)
    assert np.min(it.final.values - g0.values) > -0.02
    S = generate_lambda(ex3, find_extreme_cycles(ex3)[0], depth=6)
    t = np.random.default_rng(11).uniform(-1, 1, size=(50, 2))
    assert np.max(np.abs(it.final(t) - completeness_function(ex3, S, t))) < 0.02
    tail = it.sup_deltas[2:]
    assert all(a >= b for a, b in zip(tail, tail[1:]))


def test_grid_interpolation_is_exact_for_affine():
    g = GridFunction.sample(lambda t: 2 * t[..., 0] - t[..., 1] + 1, 2.0, 5, 2)
    pts = np.random.default_rng(0).uniform(-2, 2, size=(20, 2))
    assert np.allclose(g(pts), 2 * pts[:, 0] - pts[:, 1] + 1)
    # clipping outside the box
    assert g(np.array([[5.0, 0.0]]))[0] == pytest.approx(5.0)


def test_grid_io(tmp_path):
    g = GridFunction.sample(lambda t: t[..., 0] ** 2, 1.5, 4, 2)
    path = tmp_path / "g.csv"
    g.write(path)
    assert path.with_suffix(".json").exists()
    back = GridFunction.read(path)
    assert back.half_width == 1.5 and back.resolution == 4
    assert np.array_equal(back.values, g.values)
    with pytest.raises(ValueError):
        GridFunction(1.0, 1, 1, [0.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4).map(lambda k: 2 * k + 1), st.floats(-3, 3), st.floats(-3, 3))
def test_positivity_and_normalisation(p, a, b):
    T = example_triple(p)
    x = np.array([[a, b]])
    assert apply_transfer(T, constant(1), x)[0] == pytest.approx(1, abs=1e-12)
    assert apply_transfer(T, mu2(T), x)[0] >= 0

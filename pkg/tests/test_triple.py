import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_ifs import _exact
from spectral_ifs.errors import IndeterminateError, InvalidTripleError, NotRegularError
from spectral_ifs.example_p import example_triple
from spectral_ifs.triple import (
    HadamardTriple,
    LatticeBasis,
    check_hadamard,
    dual_lattice,
    hadamard_matrix,
    is_expansive,
    is_extreme_point,
    load_triple,
    make_triple,
    orbit_generators,
    orbit_lattice,
    regularity_rank,
    rvec,
)


@pytest.mark.parametrize("R, expected", [
    ([[2, 0], [1, 2]], True),
    ([[1]], False),
    ([[0, 2], [1, 0]], True),
    ([[4]], True),
    ([[3, 0], [0, -2]], True),
])
def test_is_expansive(R, expected):
    assert is_expansive(R) is expected


def test_is_expansive_refuses_to_guess_on_the_circle():
    # rotation by 90 degrees: eigenvalues +-i
    with pytest.raises(IndeterminateError):
        is_expansive([[0, -1], [1, 0]])



@pytest.mark.parametrize("p", [1, 3, 5, 7, 9, 11])
def test_example_family_is_hadamard(p):
    rep = check_hadamard(example_triple(p))
    assert rep["is_hadamard"] and rep["defect"] < 1e-12


def test_example_hadamard_entries_are_fourth_roots_of_unity(ex3):
    H = hadamard_matrix(ex3) * 2
    assert np.allclose(np.round(H.real) + 1j * np.round(H.imag), H, atol=1e-12)
    assert np.allclose(np.abs(H), 1)


def test_quarter_hadamard_matrix(quarter):
    H = hadamard_matrix(quarter)
    assert np.allclose(H, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)
    assert check_hadamard(quarter)["is_hadamard"]


def test_non_hadamard_has_identical_rows(non_hadamard):
    H = hadamard_matrix(non_hadamard)
    assert np.allclose(H[1], H[0])
    rep = check_hadamard(non_hadamard)
    assert not rep["is_hadamard"] and rep["defect"] == pytest.approx(1.0)


@pytest.mark.parametrize("p", [3, 5, 7, 9])
def test_column_orthogonality_at_entry_level(p):
    T = example_triple(p)
    for i, l in enumerate(T.L):
        for l2 in T.L[i + 1:]:
            diff = [a - b for a, b in zip(l, l2)]
            s = sum(np.exp(2j * np.pi * float(_exact.dot(_exact.mat_vec(T.R_inv, b), diff))) for b in T.B)
            assert abs(s) < T.N * 1e-10


def test_regularity_rank():
    assert regularity_rank(example_triple(3)) == 2
    assert regularity_rank(make_triple([[4]], [(0,), (2,)], [(0,), (1,)])) == 1
    assert regularity_rank(make_triple([[2, 0], [0, 2]], [(0, 0), (1, 0)], [(0, 0), (1, 0)])) == 1


def test_regularity_rank_stabilises(ex3):
    ranks = [_exact.rank(orbit_generators(ex3, K)) for K in range(5)]
    assert ranks == sorted(ranks) and ranks[-1] == ranks[ex3.d]


@pytest.mark.parametrize("p", [3, 5, 7, 9])
def test_dual_lattice_example(p):
    assert dual_lattice(example_triple(p)) == LatticeBasis.integer_lattice(2)


def test_dual_lattice_quarter(quarter):
    lat = dual_lattice(quarter)
    assert lat == LatticeBasis.scaled(1, Fraction(1, 2))
    assert (Fraction(1, 2),) in lat and (Fraction(1, 4),) not in lat


def test_dual_lattice_standard_basis():
    T = make_triple([[2, 0], [0, 2]], [(0, 0), (1, 0), (0, 1), (1, 1)], [(0, 0), (1, 0), (0, 1), (1, 1)])
    assert dual_lattice(T) == LatticeBasis.integer_lattice(2)


def test_dual_lattice_not_regular():
    T = make_triple([[2, 0], [0, 2]], [(0, 0), (1, 0)], [(0, 0), (1, 0)])
    with pytest.raises(NotRegularError):
        dual_lattice(T)


@pytest.mark.parametrize("p", [3, 5])
def test_dual_lattice_pairs_integrally_with_the_orbit(p):
    T = example_triple(p)
    lat = dual_lattice(T)
    for beta in orbit_generators(T, T.d):
        for v in lat.vectors:
            assert Fraction(_exact.dot(beta, v)).denominator == 1
    for v in lat.vectors:
        assert _exact.mat_vec(T.RT, v) in lat


def test_orbit_lattice_of_quarter(quarter):
    assert orbit_lattice(quarter) == [(2,)]


def test_lattice_basis_equality_is_lattice_equality():
    a = LatticeBasis(((1, 0), (0, 1)))
    b = LatticeBasis(((1, 1), (0, 1)))
    c = LatticeBasis(((2, 0), (0, 1)))
    assert a == b and a != c
    assert a.contains_lattice(c) and not c.contains_lattice(a)


def test_extreme_point_test(ex3):
    assert is_extreme_point(ex3, rvec(-1, 1))
    assert is_extreme_point(ex3, rvec(0, "1/3"))
    assert not is_extreme_point(ex3, rvec("1/2", 0))


def test_validation_errors():
    with pytest.raises(InvalidTripleError):
        make_triple([[2, 0]], [(0, 0)], [(0, 0)])
    with pytest.raises(InvalidTripleError):
        make_triple([[2]], [(1,), (2,)], [(0,), (1,)])
    with pytest.raises(InvalidTripleError):
        make_triple([[2]], [(0,), (1,)], [(0,)])
    with pytest.raises(InvalidTripleError):
        make_triple([[0]], [(0,)], [(0,)])
    with pytest.raises(InvalidTripleError):
        make_triple([[2]], [(0,), (0,)], [(0,), (1,)])


def test_json_round_trip(tmp_path, ex3):
    path = tmp_path / "t.json"
    path.write_text(json.dumps(ex3.to_json()))
    assert load_triple(path) == ex3
    assert HadamardTriple.from_json(ex3.to_json()) == ex3


def test_json_rejects_nonzero_first_digit(tmp_path):
    obj = {"d": 1, "R": [[4]], "B": [[2], [0]], "L": [[0], [1]]}
    with pytest.raises(InvalidTripleError):
        HadamardTriple.from_json(obj)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidTripleError):
        load_triple(bad)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=2, max_size=2), min_size=2, max_size=2))
def test_charpoly_matches_numpy(rows):
    cp = _exact.charpoly(rows)
    assert np.allclose([float(c) for c in cp], np.poly(np.array(rows, dtype=float)), atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=2, max_size=2), min_size=2, max_size=4))
def test_hnf_spans_the_same_lattice(rows):
    H = _exact.hnf(rows)
    if len(H) < 2:
        return
    a = LatticeBasis(tuple(map(tuple, H)))
    for r in rows:
        assert tuple(r) in a



def test_golden_matrix_is_not_expansive():
    # eigenvalues (1 +- sqrt 5) / 2, one of them inside the disc
    assert is_expansive([[0, 1], [1, 1]]) is False


def test_eigenvalue_minus_one_is_decided_exactly():
    assert is_expansive([[-1, 0], [0, 3]]) is False

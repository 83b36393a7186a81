"""Lattice type, reduction, enumeration, CVP, saturation, duals, text IO."""

import math
from fractions import Fraction

import numpy as np
import pytest

import latstab as ls
from latstab.errors import (
    BudgetExceededError,
    DegenerateBasisError,
    LatticeParseError,
)
from latstab.intmat import bareiss_det
from conftest import random_unimodular
from oracles import box_coords, integer_gram_det, numpy_babai_distance


# -- construction and gram ---------------------------------------------------


def test_gram_identity(z2):
    assert np.array_equal(ls.gram(z2), np.eye(2))


def test_gram_diagonal():
    lat = ls.Lattice.from_rows([[2.0, 0.0], [0.0, 0.5]])
    assert np.array_equal(ls.gram(lat), np.diag([4.0, 0.25]))


def test_gram_det_equals_covolume_squared():
    for i in range(20):
        lat = ls.lll_reduce(random_unimodular(3, seed=42, stream=i))
        g = ls.gram(lat)
        # exact rational value from the integer form
        det_int = bareiss_det([list(r) for r in lat.exact_basis])
        exact = float(Fraction(det_int) ** 2) * lat.scale ** (2 * lat.dim)
        assert abs(float(np.linalg.det(g)) - exact) <= 1e-9 * max(1.0, exact)
        assert abs(lat.covolume**2 - exact) <= 1e-9 * exact


def test_rejects_degenerate():
    with pytest.raises(DegenerateBasisError):
        ls.Lattice.from_rows([[1.0, 1.0], [1.0, 1.0 + 1e-15]])
    with pytest.raises(ValueError):
        ls.Lattice.from_rows([[1.0]])


def test_exact_form_consistency_checked():
    with pytest.raises(ValueError):
        ls.Lattice(basis=np.eye(2), exact_basis=((2, 0), (0, 2)), scale=1.0)


# -- LLL ----------------------------------------------------------------------


def test_lll_fixed_point(z3):
    red = ls.lll_reduce(z3)
    assert red.exact_basis == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_lll_skewed_example():
    lat = ls.Lattice.from_exact([[1, 0], [1000, 1]], 1.0)
    red = ls.lll_reduce(lat)
    norms = np.linalg.norm(red.basis, axis=1)
    # brute-force shortest bases of this lattice: it is Z^2, so both rows
    # must have norm at most 2 (they are in fact +-unit vectors)
    assert norms.max() <= 2.0
    assert abs(red.covolume - lat.covolume) <= 1e-9


def test_lll_preserves_lattice_exactly():
    for i in range(25):
        lat = random_unimodular(4, seed=9, stream=i)
        red, u = ls.lll_reduce(lat, return_transform=True)
        assert bareiss_det([list(r) for r in u]) in (1, -1)
        m2 = np.array(u, dtype=object) @ np.array(
            [list(r) for r in lat.exact_basis], dtype=object
        )
        assert [list(r) for r in red.exact_basis] == m2.tolist()
        assert abs(red.covolume - lat.covolume) <= 1e-9 * lat.covolume


def test_lll_delta_validation(z2):
    with pytest.raises(ValueError):
        ls.lll_reduce(z2, delta=0.2)


# -- enumeration ---------------------------------------------------------------


def test_enumerate_z2_radius_1(z2):
    vs = ls.enumerate_short_vectors(z2, 1.0)
    assert sorted(v for v, _ in vs) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert all(abs(n - 1.0) < 1e-12 for _, n in vs)


def test_enumerate_z3_radius(z3):
    vs = ls.enumerate_short_vectors(z3, 1.5)
    assert len(vs) == 18
    norms = sorted(round(n**2) for _, n in vs)
    assert norms == [1] * 6 + [2] * 12
    # sorted ascending and sign-paired
    assert [n for _, n in vs] == sorted(n for _, n in vs)
    coord_set = {v for v, _ in vs}
    assert all(tuple(-c for c in v) in coord_set for v in coord_set)


def test_enumerate_below_first_minimum(z2):
    assert ls.enumerate_short_vectors(z2, 0.999) == []


def test_enumerate_requires_positive_radius(z2):
    with pytest.raises(ValueError):
        ls.enumerate_short_vectors(z2, 0.0)


def test_enumerate_budget():
    lat = ls.Lattice.identity(4)
    with pytest.raises(BudgetExceededError):
        ls.enumerate_short_vectors(lat, 40.0, budget=100)


def test_enumeration_completeness_against_box_scan():
    rng = np.random.default_rng(31)
    done = 0
    while done < 12:
        n = int(rng.integers(2, 6))
        m = rng.integers(-4, 5, size=(n, n))
        if abs(np.linalg.det(np.array(m, dtype=float))) < 0.5:
            continue
        lat = ls.Lattice.from_exact([[int(x) for x in r] for r in m], 1.0)
        radius = float(rng.uniform(1.0, 3.0))
        got = {v for v, _ in ls.enumerate_short_vectors(lat, radius)}
        # brute force over the coordinate box implied by the dual-row bound
        dual_rows = np.linalg.inv(lat.basis).T
        reach = radius * np.sqrt((dual_rows * dual_rows).sum(axis=1)).max()
        box = int(math.ceil(reach + 1e-9))
        if (2 * box + 1) ** n > 3e6:
            continue
        coords = box_coords(n, box)
        norms = np.linalg.norm(coords.astype(float) @ lat.basis, axis=1)
        expect = {tuple(int(x) for x in c)
                  for c, nn in zip(coords, norms) if nn <= radius * (1 + 1e-12)}
        assert got == expect
        done += 1


# -- CVP -----------------------------------------------------------------------


def test_cvp_rounding(z2):
    res = ls.closest_vector(z2, [0.4, 0.4])
    assert res.coords == (0, 0)
    assert abs(res.distance - math.sqrt(0.32)) < 1e-12


def test_cvp_tie_break(z2):
    res = ls.closest_vector(z2, [0.5, 0.0])
    assert abs(res.distance - 0.5) < 1e-12
    assert res.coords == (0, 0)  # lexicographically smaller than (1, 0)


def test_cvp_beats_nearest_plane():
    rng = np.random.default_rng(5)
    for i in range(20):
        lat = random_unimodular(3, seed=15, stream=i)
        target = rng.uniform(-2, 2, size=3)
        res = ls.closest_vector(lat, target)
        assert res.distance <= numpy_babai_distance(lat, target) + 1e-9
        # returned vector is consistent with its coordinates
        vec = np.array(res.coords, dtype=float) @ lat.basis
        assert np.allclose(vec, res.vector)


# -- saturation and sublattices -------------------------------------------------


def test_saturate_examples():
    assert ls.saturate([[2, 0, 0], [0, 1, 0]]) == ((1, 0, 0), (0, 1, 0))
    prim = [[1, 0, 0], [0, 1, 0]]
    assert ls.saturate(prim) == ls.canonical_form(prim)


def test_saturate_idempotent_and_generator_invariant():
    rng = np.random.default_rng(3)
    for _ in range(25):
        k, n = int(rng.integers(1, 4)), int(rng.integers(2, 6))
        if k > n:
            continue
        while True:
            a = rng.integers(-5, 6, size=(k, n)).tolist()
            if np.linalg.matrix_rank(np.array(a, dtype=float)) == k:
                break
        sat = ls.saturate(a)
        assert ls.saturate(sat) == sat
        # different generators of the same row space
        b = [a[-1]] + a[:-1]
        b[0] = [x + 2 * y for x, y in zip(b[0], a[0])] if k > 1 else b[0]
        assert ls.saturate(b) == sat
        index = ls.saturation_index(a)
        ratio_sq = integer_gram_det(a) / integer_gram_det(list(sat))
        assert ratio_sq == Fraction(index) ** 2


def test_sublattice_record(z3):
    sub = ls.sublattice(z3, [[2, 0, 0], [0, 1, 0]])
    assert sub.rank == 2
    assert not sub.primitive
    assert abs(sub.covolume - 2.0) < 1e-12
    prim = ls.sublattice(z3, [[1, 0, 0], [0, 1, 0]])
    assert prim.primitive
    g = ls.gram(z3)
    c = np.array(prim.coords, dtype=float)
    assert abs(prim.covolume - math.sqrt(np.linalg.det(c @ g @ c.T))) <= 1e-9


def test_sublattice_rejects_dependent(z3):
    with pytest.raises(ValueError):
        ls.sublattice(z3, [[1, 2, 3], [2, 4, 6]])


# -- duals -----------------------------------------------------------------------


def test_dual_self(z3):
    d = ls.dual(z3)
    assert np.allclose(d.basis, np.eye(3))


def test_dual_diagonal():
    lat = ls.Lattice.from_rows([[2.0, 0.0], [0.0, 0.5]])
    d = ls.dual(lat)
    assert np.allclose(np.sort(np.abs(d.basis).sum(axis=1)), [0.5, 2.0])
    assert abs(d.covolume * lat.covolume - 1.0) < 1e-12


def test_dual_involution_and_covolume():
    for i in range(100):
        n = 2 + (i % 4)
        lat = random_unimodular(n, seed=21, stream=i)
        d = ls.dual(lat)
        assert abs(lat.covolume * d.covolume - 1.0) <= 1e-9
        dd = ls.dual(d)
        scale_ref = max(1.0, float(np.max(np.abs(lat.basis))))
        assert np.max(np.abs(dd.basis - lat.basis)) <= 1e-9 * scale_ref


# -- text format -------------------------------------------------------------------


def test_text_roundtrip_exact(tmp_path):
    lat = random_unimodular(3, seed=5, stream=0)
    path = tmp_path / "lat.txt"
    ls.write_lattice(lat, path)
    back = ls.read_lattice(path)
    assert back.exact_basis == lat.exact_basis
    assert back.scale == lat.scale


def test_text_roundtrip_float(tmp_path):
    lat = ls.sample_exact_2d(seed=2, stream=3)
    path = tmp_path / "lat.txt"
    ls.write_lattice(lat, path)
    back = ls.read_lattice(path)
    assert np.array_equal(back.basis, lat.basis)


def test_parse_rationals():
    lat = ls.parse_lattice_text("2\n1/2 0\n0 2/1\n")
    assert np.allclose(lat.basis, [[0.5, 0.0], [0.0, 2.0]])


def test_parse_integer_rows_get_exact_form():
    lat = ls.parse_lattice_text("2\n1 0\n0 1\n")
    assert lat.exact_basis == ((1, 0), (0, 1))


def test_parse_scale_line():
    lat = ls.parse_lattice_text("2\n2 0\n0 2\nscale: 0.5\n")
    assert lat.exact_basis == ((2, 0), (0, 2))
    assert np.allclose(lat.basis, 0.5 * np.array([[2, 0], [0, 2]]))


def test_parse_errors_name_the_line():
    with pytest.raises(LatticeParseError) as err:
        ls.parse_lattice_text("2\n1 x\n0 1\n")
    assert err.value.line == 2
    with pytest.raises(LatticeParseError) as err:
        ls.parse_lattice_text("2\n1 0\n")
    assert err.value.line == 3
    with pytest.raises(LatticeParseError):
        ls.parse_lattice_text("2\n1.5 0\n0 1\nscale: 2.0\n")
    with pytest.raises(LatticeParseError):
        ls.parse_lattice_text("not-a-number\n")


def test_vector_norm(z2):
    assert ls.vector_norm(z2, (3, 4)) == 5.0

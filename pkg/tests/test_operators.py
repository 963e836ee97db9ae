from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kspheres._common import DomainError
from kspheres.lattice import SphereSpec, count_sphere, sphere_exp_sum
from kspheres.operators import (
    GridFunction, delta_partial_sums, dyadic_maximal, full_maximal, lp_threshold_probe, maximal_ratio,
    spherical_average,
)


def test_delta_average_is_uniform_on_the_sphere():
    a = spherical_average(GridFunction.delta(9, 4), SphereSpec(2, 4, 4))
    assert np.sum(np.abs(a.values - 1 / 24) < 1e-15) == 24
    assert np.abs(a.values).sum() == pytest.approx(1.0)


def test_constant_is_fixed_and_empty_sphere_rejected():
    c = GridFunction.constant(7, 2, 2.5)
    assert np.allclose(spherical_average(c, SphereSpec(2, 2, 5)).values, 2.5)
    with pytest.raises(DomainError, match="Lambda"):
        spherical_average(c, SphereSpec(2, 2, 3))


@given(st.integers(2, 3), st.integers(1, 3), st.integers(6, 14), st.integers(1, 30), st.data())
def test_characters_are_eigenfunctions(k, d, L, n, data):
    spec = SphereSpec(k, d, n)
    N = count_sphere(spec).count
    if N == 0:
        return
    p = data.draw(st.lists(st.integers(0, L - 1), min_size=d, max_size=d))
    ch = GridFunction.character(L, d, p)
    lam = sphere_exp_sum(spec, [Fraction(v, L) for v in p]).value / N
    for method in ("sparse", "fft"):
        out = spherical_average(ch, spec, method)
        assert np.abs(out.values - lam * ch.values).max() < 1e-10


@given(st.integers(2, 3), st.integers(1, 20), st.data())
def test_sparse_equals_fft(d, n, data):
    spec = SphereSpec(2, d, n)
    if count_sphere(spec).count == 0:
        return
    rng = np.random.default_rng(data.draw(st.integers(0, 1000)))
    f = GridFunction(10, d, rng.normal(size=(10,) * d))
    a = spherical_average(f, spec, "sparse").values
    b = spherical_average(f, spec, "fft").values
    assert np.abs(a - b).max() < 1e-12


def test_grid_function_io_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    g = GridFunction(5, 3, rng.normal(size=(5, 5, 5)) + 1j * rng.normal(size=(5, 5, 5)))
    path = tmp_path / "g.bin"
    g.save(path)
    h = GridFunction.load(path)
    assert np.array_equal(g.values, h.values)
    assert path.read_bytes()[:4] == b"KSGF"
    assert (tmp_path / "g.bin.json").exists()
    with pytest.raises(ValueError):
        g.values[0, 0, 0] = 1


def test_full_maximal_is_the_sup_of_dyadic_blocks():
    rng = np.random.default_rng(1)
    g = GridFunction(12, 2, rng.random((12, 12)))
    full = full_maximal(g, 2, 2, 4.5)
    mx = np.zeros((12, 12))
    for R in (1, 2, 4):
        mx = np.maximum(mx, dyadic_maximal(g, 2, 2, R, level_cap=20).values.real)
    assert np.array_equal(full.values.real, mx)


def test_maximal_dominates_each_average():
    rng = np.random.default_rng(2)
    g = GridFunction(11, 3, rng.random((11, 11, 11)))
    full = full_maximal(g, 2, 3, 3.0).values.real
    for n in (1, 2, 3, 5, 9):
        avg = np.abs(spherical_average(g, SphereSpec(2, 3, n)).values)
        assert np.all(full >= avg - 1e-12)


def test_delta_partial_sums_match_grid():
    f = GridFunction.delta(21, 3)
    A = full_maximal(f, 2, 3, 3.0)
    for p in (1.5, 2.0):
        assert A.norm(p) ** p == pytest.approx(delta_partial_sums(2, 3, p, [3.0])[0], rel=1e-12)


def test_maximal_ratio_runs_blockwise():
    rep = maximal_ratio(GridFunction.delta(16, 3), 2, 3, 4.0, 2.0)
    assert rep.block_R == [1, 2, 4]
    assert rep.partial == sorted(rep.partial)
    with pytest.raises(DomainError):
        maximal_ratio(GridFunction.delta(8, 2), 2, 2, 2.0, 1.0)


def test_probe_monotone_in_p():
    tab = lp_threshold_probe(2, 5, [1.5, 5 / 3, 2.0, 3.0], 100)
    slopes = [row.slope for row in tab.rows]
    assert slopes == sorted(slopes, reverse=True)
    assert tab.threshold == pytest.approx(5 / 3)

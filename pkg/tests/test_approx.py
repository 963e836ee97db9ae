import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kspheres._common import Budget, DomainError, loglog_slope
from kspheres.approx import (
    default_Q, error_exponent_fit, error_scan, j_and_i_multipliers, main_term, main_term_points,
    singular_series, tail_bound,
)
from kspheres.farey import FareyArc
from kspheres.lattice import SphereSpec, count_sphere
from kspheres.surface import sphere_volume


def test_default_Q():
    assert default_Q(100.0) == 10
    assert default_Q(1e9) == 200


def test_main_term_at_zero_is_singular_series_times_volume():
    spec = SphereSpec(2, 5, 144)
    mt = main_term(spec, np.zeros(5), Q=12)
    r = 12.0
    ref = r**3 * sphere_volume(2, 5) * singular_series(2, 5, 144, 12)
    assert abs(mt.value - ref) < 1e-9 * abs(ref)
    assert abs(mt.per_q.sum() - mt.value) < 1e-9 * abs(mt.value)


def test_singular_series_local_factor_q1():
    assert singular_series(2, 4, 7, 1) == 1


@given(st.integers(10, 20))
def test_waring_ratio_near_one(r):
    spec = SphereSpec(2, 5, r * r)
    ratio = main_term(spec, np.zeros(5), Q=30).value.real / count_sphere(spec).count
    assert 0.9 <= ratio <= 1.1


def test_main_term_is_periodic_and_real_symmetric():
    xi = np.array([[0.1, 0.2, 0.3], [1.1, -0.8, 0.3], [-0.1, -0.2, -0.3]])
    v = main_term_points(2, 3, 50, xi, 6)
    assert abs(v[0] - v[1]) < 1e-9
    assert abs(v[0] - np.conj(v[2])) < 1e-9


def test_tail_bound_diverges_below_two():
    assert tail_bound(2, 4, 10.0, 5) == math.inf
    assert math.isfinite(tail_bound(2, 5, 10.0, 5))
    assert tail_bound(2, 5, 10.0, 20) < tail_bound(2, 5, 10.0, 5)


def test_symmetric_scan_equals_full_grid():
    spec = SphereSpec(2, 3, 25)
    a = error_scan(spec, Q=5, M=22, mode="symmetric")
    b = error_scan(spec, Q=5, M=22, mode="full")
    assert a.sup_error == pytest.approx(b.sup_error, rel=1e-9)
    assert a.l2_error == pytest.approx(b.l2_error, rel=1e-9)
    assert a.error_at_zero == pytest.approx(b.error_at_zero, rel=1e-9, abs=1e-9)


def test_full_scan_k3_and_sampled():
    spec = SphereSpec(3, 2, 35)
    full = error_scan(spec, Q=3, mode="full")
    samp = error_scan(spec, Q=3, mode="sampled", samples=500, seed=3)
    assert samp.sup_error <= full.sup_error + 1e-9
    assert samp.mode == "sampled" and full.mode == "full"


def test_scan_resolution_guard():
    with pytest.raises(DomainError):
        error_scan(SphereSpec(2, 3, 100), M=10)


def test_exponent_fit_synthetic():
    R = [4, 8, 16, 32]
    fit = error_exponent_fit(2, 5, R, errors=[1.0, 0.5, 0.25, 0.125])
    assert fit.eps_hat == pytest.approx(1.0)
    assert error_exponent_fit(2, 5, R, errors=[0, 0, 0, 0]).inconclusive
    assert error_exponent_fit(2, 5, R[:3], errors=[1, 1, 1]).inconclusive


def test_j_converges_to_i_as_the_arc_grows():
    xi = [0.05, 0.02, 0.0, 0.0, 0.0]
    widths = [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4), Fraction(8)]
    gaps = []
    for w in widths:
        arc = FareyArc(0, 1, 4, Fraction(0), Fraction(0), -w, w, True)
        m = j_and_i_multipliers(2, 5, 3.0, arc, xi, 0.02)
        gaps.append(abs(m.J - m.I))
        # the full-line integral is the closed form r^{d-k} e^{-2 pi eps r^k} dsigma_r
        assert abs(m.I - m.I_closed) < 1e-9
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    # the tail of prod h_{t+i eps} decays like |t|^{-d/k}
    assert loglog_slope([float(w) for w in widths], gaps) == pytest.approx(-2.5, abs=0.3)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kitwpa import film, fixtures, resonator, tline

finite = dict(allow_nan=False, allow_infinity=False)


@given(st.floats(0.5, 30.0, **finite), st.floats(1.0, 1e3, **finite), st.floats(0.1, 10.0, **finite))
def test_lk_from_tc_scaling(tc, rn, k):
    base = film.lk_from_tc(tc, rn)
    assert film.lk_from_tc(tc, k * rn) == pytest.approx(k * base, rel=1e-12)
    assert film.lk_from_tc(k * tc, rn) == pytest.approx(base / k, rel=1e-12)


@given(st.floats(1e-10, 1e-7, **finite), st.floats(1e-10, 1e-8, **finite), st.floats(1e-14, 1e-11, **finite))
def test_lk_from_sim_round_trip(lk, lg, c):
    f0 = film.resonance_frequency(lk + lg, c)
    assert film.lk_from_sim(f0, lg, c) == pytest.approx(lk, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-9, 100e-9, **finite), st.floats(0.1e-3, 10e-3, **finite))
def test_istar_round_trip(lk0, i_star):
    lg, c, beta = 2e-9, 1e-13, 1e-3
    powers = np.arange(-70.0, -49.0, 2.0)
    # keep the largest current at a tenth of I* so the shift stays quadratic-only
    beta = (0.1 * i_star) ** 2 / 10 ** ((powers[-1] - 30) / 10)
    cur = [resonator.power_to_current(p, beta) for p in powers]
    f0 = [film.resonance_frequency(lk0 * (1 + (i / i_star) ** 2) + lg, c) for i in cur]
    res = resonator.extract_istar(resonator.PowerSweep.from_f0(powers, f0, beta, lg, c))
    assert res.i_star == pytest.approx(i_star, rel=1e-6)
    assert res.lk0 == pytest.approx(lk0, rel=1e-6)


@given(st.floats(-120.0, 20.0, **finite), st.floats(1e-6, 1e3, **finite), st.floats(0.01, 10.0, **finite))
def test_power_to_current_monotone_and_sqrt_beta(p, beta, dp):
    i1 = resonator.power_to_current(p, beta)
    assert resonator.power_to_current(p + dp, beta) > i1
    assert resonator.power_to_current(p, 4 * beta) == pytest.approx(2 * i1, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(5.0, 20.0, **finite), st.floats(0.05, 0.5, **finite), st.floats(1e-3, 1e3, **finite))
def test_tc_scale_invariance(tc, width, k):
    c = fixtures.tanh_transition(tc, width, 100.0, t_range=(tc - 2.0, tc + 2.0))
    assert film.extract_tc(c.scaled(k)) == pytest.approx(film.extract_tc(c), abs=1e-12)


@given(
    st.lists(st.floats(0.3, 5.0, **finite), min_size=1, max_size=12),
    st.floats(1e8, 1e12, **finite),
    st.sampled_from(["l", "c"]),
)
def test_supercell_unit_determinant(pattern, w, target):
    spec = tline.LoadedLineSpec(tline.UnitCell(100e-12, 40e-15, 1e-3), tuple(pattern), target)
    m = tline.supercell_matrix(spec, w)
    assert abs(np.linalg.det(m) - 1) < 1e-14 * max(1.0, float(np.max(np.abs(m))) ** 2)

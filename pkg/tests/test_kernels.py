import math

import numpy as np
import pytest

from kitwpa import _accel, kernels

pytestmark = pytest.mark.skipif(_accel.numba is None, reason="numba not installed")


def test_supercell_backends_agree():
    rng = np.random.default_rng(7)
    w = np.linspace(1e8, 2e12, 513)
    l = 100e-12 * rng.uniform(0.5, 3.0, 21)
    c = 40e-15 * rng.uniform(0.5, 3.0, 21)
    a = kernels._supercell_abcd_numba(w, l, c)
    b = kernels._supercell_abcd_numpy(w, l, c)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-12 * np.max(np.abs(y)))


def _ladder_args(n=12):
    lind = np.full(n + 1, 100e-12)
    lind[0] = lind[-1] = 50e-12
    cap = np.full(n, 40e-15)
    r0 = math.sqrt(100e-12 / 40e-15)
    w = np.array([2 * math.pi * 8e9, 2 * math.pi * 3e9])
    amps = np.array([2e-4, 1e-5])
    t_end = 2e-9
    return (
        lind, cap, 0.3e-3, 1e6, r0, r0, w, amps, np.zeros(2), 1e-9,
        t_end, 1e-12, 2.5e-12, 1e-8, np.full(2 * n + 1, 1e-14), 10**6,
    )


def test_ladder_backends_agree():
    args = _ladder_args()
    rec_a, steps_a, _, st_a = kernels._integrate_ladder_numba(*args)
    rec_b, steps_b, _, st_b = kernels._integrate_ladder_numpy(*args)
    assert st_a == st_b == 0
    assert steps_a == steps_b
    np.testing.assert_allclose(rec_a, rec_b, rtol=0, atol=1e-9 * np.max(np.abs(rec_b)))


def test_step_limit_reported():
    args = list(_ladder_args())
    args[-1] = 5
    _, steps, _, status = kernels._integrate_ladder_numpy(*args)
    assert status == 1 and steps == 5


def test_backend_name():
    assert kernels.BACKEND in {"numba", "numpy"}
    assert (kernels.BACKEND == "numba") == _accel.USE_NUMBA


@pytest.mark.parametrize("flag,expect", [("1", "numpy"), ("", "numba")])
def test_env_flag_selects_backend(flag, expect):
    import os
    import subprocess
    import sys

    env = {**os.environ, "KITWPA_DISABLE_NUMBA": flag}
    out = subprocess.run([sys.executable, "-c", "from kitwpa import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expect

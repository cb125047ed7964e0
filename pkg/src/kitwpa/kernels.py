"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The public names (``supercell_abcd``, ``integrate_ladder``) point at the
numba versions unless ``KITWPA_DISABLE_NUMBA`` is set; both variants are
importable under their suffixed names for benchmarking and cross-checks.

Transfer matrices of a lossless L-series / C-shunt ladder are carried as
four real numbers ``(ea, b, c, ed)`` standing for::

    [[1 + ea, j*b],
     [j*c,    1 + ed]]

Keeping ``ea`` and ``ed`` as offsets from the identity avoids cancellation
in ``(A + D)/2 - 1`` at long wavelengths, where the Bloch phase is small.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# --------------------------------------------------------------------------
# supercell transfer matrix


def _supercell_abcd_loop(omegas, l_cells, c_cells):
    n_w = omegas.shape[0]
    n_c = l_cells.shape[0]
    ea = np.zeros(n_w)
    b = np.zeros(n_w)
    c = np.zeros(n_w)
    ed = np.zeros(n_w)
    for i in range(n_w):
        w = omegas[i]
        a0 = 0.0
        b0 = 0.0
        c0 = 0.0
        d0 = 0.0
        for k in range(n_c):
            bk = w * l_cells[k]
            ck = w * c_cells[k]
            ak = -bk * ck
            # right-multiply by the cell matrix [[1+ak, j bk], [j ck, 1]]
            na = a0 + ak + a0 * ak - b0 * ck
            nb = (1.0 + a0) * bk + b0
            nc = c0 * (1.0 + ak) + (1.0 + d0) * ck
            nd = d0 - c0 * bk
            a0 = na
            b0 = nb
            c0 = nc
            d0 = nd
        ea[i] = a0
        b[i] = b0
        c[i] = c0
        ed[i] = d0
    return ea, b, c, ed


_supercell_abcd_numba = njit(_supercell_abcd_loop)


def _supercell_abcd_numpy(omegas, l_cells, c_cells):
    w = np.asarray(omegas, dtype=float)
    a0 = np.zeros_like(w)
    b0 = np.zeros_like(w)
    c0 = np.zeros_like(w)
    d0 = np.zeros_like(w)
    for lk, ck_ in zip(l_cells, c_cells):
        bk = w * lk
        ck = w * ck_
        ak = -bk * ck
        a0, b0, c0, d0 = (
            a0 + ak + a0 * ak - b0 * ck,
            (1.0 + a0) * bk + b0,
            c0 * (1.0 + ak) + (1.0 + d0) * ck,
            d0 - c0 * bk,
        )
    return a0, b0, c0, d0


# --------------------------------------------------------------------------
# nonlinear ladder, time domain
#
# State y = [i_0 .. i_n, v_0 .. v_{n-1}]: RF current through each of the n+1
# series inductors and voltage on each of the n shunt capacitors. The line is
# cut mid-series at both ends (half inductors first and last), so each end
# sees the T-section image impedance. The dc bias flows through an ideal bias
# tee and enters only through the inductance law
#     L_j(i) = lind_j * (1 + ((i_dc + i) / I*)^2).
# The source is a Thevenin generator with internal resistance r_s; the load
# r_l terminates the last inductor. The recorded output is i_n.

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


def _source_voltage(t, omegas, amps, phases, t_ramp, r_s):
    v = 0.0
    for j in range(omegas.shape[0]):
        v += amps[j] * np.cos(omegas[j] * t + phases[j])
    if t < t_ramp:
        s = np.sin(0.5 * np.pi * t / t_ramp)
        v *= s * s
    # matched generator: forward current amplitude a needs an open-circuit
    # voltage of 2 * r_s * a
    return 2.0 * r_s * v


_source_voltage_numba = njit(_source_voltage)


def _ladder_rhs_numba_src(t, y, out, lind, cap, i_dc, inv_is2, r_s, r_l, omegas, amps, phases, t_ramp):
    n = cap.shape[0]
    m = n + 1
    vs = _source_voltage_numba(t, omegas, amps, phases, t_ramp, r_s)
    v_left = vs - r_s * y[0]
    for j in range(m):
        cur = i_dc + y[j]
        ind = lind[j] * (1.0 + cur * cur * inv_is2)
        v_right = y[m + j] if j < n else r_l * y[n]
        out[j] = (v_left - v_right) / ind
        v_left = v_right
    for k in range(n):
        out[m + k] = (y[k] - y[k + 1]) / cap[k]


_ladder_rhs_numba = njit(_ladder_rhs_numba_src)


def _err_norm_loop(err_vec, y, ynew, scale, rtol):
    acc = 0.0
    dim = y.shape[0]
    for q in range(dim):
        sc = scale[q] + rtol * max(abs(y[q]), abs(ynew[q]))
        e = err_vec[q] / sc
        acc += e * e
    return np.sqrt(acc / dim)


_err_norm_numba = njit(_err_norm_loop)


def _err_norm_numpy(err_vec, y, ynew, scale, rtol):
    sc = scale + rtol * np.maximum(np.abs(y), np.abs(ynew))
    return float(np.sqrt(np.mean((err_vec / sc) ** 2)))


def _ladder_rhs_numpy(t, y, out, lind, cap, i_dc, inv_is2, r_s, r_l, omegas, amps, phases, t_ramp):
    n = cap.shape[0]
    m = n + 1
    cur = y[:m]
    volt = y[m:]
    vs = _source_voltage(t, omegas, amps, phases, t_ramp, r_s)
    ind = lind * (1.0 + (i_dc + cur) ** 2 * inv_is2)
    out[0] = (vs - r_s * cur[0] - volt[0]) / ind[0]
    out[1:n] = (volt[:-1] - volt[1:]) / ind[1:n]
    out[n] = (volt[-1] - r_l * cur[n]) / ind[n]
    out[m:] = (cur[:n] - cur[1:]) / cap


def _make_integrator(rhs, err_norm, compile_it):
    def integrate(
        lind, cap, i_dc, inv_is2, r_s, r_l, omegas, amps, phases, t_ramp,
        t_end, dt_sample, h_max, rtol, scale, max_steps,
    ):
        n = cap.shape[0]
        dim = 2 * n + 1
        n_samples = int(np.floor(t_end / dt_sample + 1e-9)) + 1
        record = np.zeros(n_samples)
        y = np.zeros(dim)
        k1 = np.zeros(dim)
        k2 = np.zeros(dim)
        k3 = np.zeros(dim)
        k4 = np.zeros(dim)
        k5 = np.zeros(dim)
        k6 = np.zeros(dim)
        k7 = np.zeros(dim)
        ytmp = np.zeros(dim)
        ynew = np.zeros(dim)
        t = 0.0
        h = min(h_max, dt_sample)
        rhs(t, y, k1, lind, cap, i_dc, inv_is2, r_s, r_l, omegas, amps, phases, t_ramp)
        record[0] = y[n]
        steps = 0
        rejected = 0
        for s in range(1, n_samples):
            t_target = s * dt_sample
            while t < t_target:
                if steps >= max_steps:
                    return record, steps, rejected, 1
                last = False
                if t + h >= t_target:
                    h = t_target - t
                    last = True
                ytmp[:] = y + h * _A21 * k1
                rhs(t + _C2 * h, ytmp, k2, lind, cap, i_dc, inv_is2, r_s, r_l, omegas, amps, phases, t_ramp)
                ytmp[:] = y + h * (_A31 * k1 + _A32 * k2)
                rhs(t + _C3 * h, ytmp, k3, lind, cap, i_dc, inv_is2, r_s, r_l, omegas, amps, phases, t_ramp)
                ytmp[:] = y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3)
                rhs(t + _C4 * h, ytmp, k4, lind, cap, i_dc, inv_is2, r_s, r_l, omegas, amps, phases, t_ramp)
                ytmp[:] = y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4)
                rhs(t + _C5 * h, ytmp, k5, lind, cap, i_dc, inv_is2, r_s, r_l, omegas, amps, phases, t_ramp)
                ytmp[:] = y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5)
                rhs(t + h, ytmp, k6, lind, cap, i_dc, inv_is2, r_s, r_l, omegas, amps, phases, t_ramp)
                ynew[:] = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
                rhs(t + h, ynew, k7, lind, cap, i_dc, inv_is2, r_s, r_l, omegas, amps, phases, t_ramp)
                ytmp[:] = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
                err = err_norm(ytmp, y, ynew, scale, rtol)
                steps += 1
                if err <= 1.0:
                    t = t_target if last else t + h
                    y[:] = ynew
                    k1[:] = k7
                    fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
                    if not last:
                        h = min(h_max, h * fac)
                    else:
                        h = h_max
                else:
                    rejected += 1
                    h = h * max(0.2, 0.9 * err ** -0.2)
                    if h < 1e-9 * dt_sample:
                        return record, steps, rejected, 2
            record[s] = y[n]
        return record, steps, rejected, 0

    if compile_it:
        return njit(integrate)
    return integrate


_integrate_ladder_numba = _make_integrator(_ladder_rhs_numba, _err_norm_numba, True)
_integrate_ladder_numpy = _make_integrator(_ladder_rhs_numpy, _err_norm_numpy, False)

if USE_NUMBA:
    supercell_abcd = _supercell_abcd_numba
    integrate_ladder = _integrate_ladder_numba
else:
    supercell_abcd = _supercell_abcd_numpy
    integrate_ladder = _integrate_ladder_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"

import math
import warnings

import numpy as np
import pytest
from conftest import BASE, F_PUMP, TAU

from kitwpa import mixing, tline
from kitwpa.errors import DataError, FrequencyInStopband, NoSignChange, NoStopbandInBand, SingularChi

V = 1.0e11


def linear_curve():
    w = np.linspace(1e6, 4e11, 4001)
    return tline.DispersionCurve.from_table(w, w / V)


def test_chi():
    assert mixing.chi(1e-3, 0.0) == pytest.approx(1e6)
    assert mixing.chi(1e-3, 0.5e-3) == pytest.approx(8e5)
    with pytest.raises(SingularChi):
        mixing.chi(0.0, 0.0)


def test_linear_mismatch():
    wp = 0.0754 * V  # k_p = 0.0754 rad/supercell
    cfg0 = mixing.MixingConfig(wp, 0.0, 0.0, 1e-3, linear_curve())
    assert abs(mixing.phase_mismatch(0.3 * wp, cfg0)) < 1e-15
    cfg = mixing.MixingConfig(wp, 1e-4, 0.0, 1e-3, linear_curve())
    assert mixing.phase_mismatch(0.3 * wp, cfg) == pytest.approx(9.425e-5, rel=1e-6)


def test_degenerate_point(biased_dispersion, design_biased):
    wp = 8.6e9 * TAU
    cfg = mixing.MixingConfig(wp, 1e-4, 0.3e-3, BASE.i_star, biased_dispersion, design_biased.spec)
    k = biased_dispersion.k_at
    kp, ks = k(wp), k(wp / 2)
    expect = (kp - 2 * ks) - cfg.chi * 1e-8 / 8 * (kp - 4 * ks)
    assert mixing.phase_mismatch(wp / 2, cfg) == pytest.approx(expect, rel=1e-12)


def test_kerr_convention_flips_only_the_kerr_term():
    wp = 2e10
    a = mixing.MixingConfig(wp, 1e-4, 0.0, 1e-3, linear_curve(), kerr_sign=mixing.KERR_PRINTED)
    b = mixing.MixingConfig(wp, 1e-4, 0.0, 1e-3, linear_curve(), kerr_sign=mixing.KERR_PHYSICAL)
    assert mixing.phase_mismatch(0.4 * wp, a) == pytest.approx(-mixing.phase_mismatch(0.4 * wp, b))


def test_config_guards():
    with pytest.raises(DataError):
        mixing.MixingConfig(1e10, 2e-3, 0.0, 1e-3, linear_curve())
    with pytest.raises(DataError):
        mixing.MixingConfig(1e10, -1.0, 0.0, 1e-3, linear_curve())
    with pytest.raises(FrequencyInStopband):
        mixing.MixingConfig(5e11, 1e-4, 0.0, 1e-3, linear_curve())


def test_stopband_tone(biased_dispersion, design_biased):
    gap = biased_dispersion.stopbands[0]
    wp = 1.9 * gap.lo  # signal at the gap centre region
    wp = min(wp, biased_dispersion.omega[-1] * 0.99)
    cfg = mixing.MixingConfig(None, 1e-4, 0.3e-3, BASE.i_star, biased_dispersion, design_biased.spec)
    # pick a passband pump and put the signal inside the first stopband
    for f in np.linspace(1.05, 1.5, 200) * gap.hi:
        if biased_dispersion.in_passband(f) and biased_dispersion.in_passband(f - 0.5 * (gap.lo + gap.hi)):
            cfg = cfg.with_pump(f)
            break
    with pytest.raises(FrequencyInStopband):
        mixing.cme_gain(cfg, [0.5 * (gap.lo + gap.hi)])


def _pumped(design_biased, biased_dispersion, i_p0=1e-4):
    cfg = mixing.MixingConfig(None, i_p0, 0.3e-3, BASE.i_star, biased_dispersion, design_biased.spec)
    place = mixing.solve_pump_placement(cfg, (TAU * F_PUMP, 1.06 * TAU * F_PUMP))
    return cfg.with_pump(place.omega_p)


def test_signal_idler_symmetry(design_biased, biased_dispersion):
    cfg = _pumped(design_biased, biased_dispersion)
    for frac in (0.4, 0.45, 0.47):
        ws = frac * cfg.omega_p
        a = mixing.cme_gain(cfg, [ws]).points[0].gain_db
        b = mixing.cme_gain(cfg, [cfg.omega_p - ws]).points[0].gain_db
        assert a == pytest.approx(b, rel=1e-9)


def test_zero_pump_gives_zero_gain(design_biased, biased_dispersion):
    cfg = _pumped(design_biased, biased_dispersion)
    off = mixing.MixingConfig(cfg.omega_p, 0.0, 0.3e-3, BASE.i_star, biased_dispersion, design_biased.spec)
    grid = np.linspace(0.4, 0.6, 9) * cfg.omega_p
    assert np.all(mixing.cme_gain(off, grid).gain_db == 0.0)
    assert np.all(mixing.cme_gain(off, grid, method="full").gain_db == 0.0)


def test_small_pump_continuity(design_biased, biased_dispersion):
    cfg = _pumped(design_biased, biased_dispersion)
    ws = 0.45 * cfg.omega_p
    geo = mixing.phase_mismatch(ws, mixing.MixingConfig(cfg.omega_p, 0.0, 0.3e-3, 1e-3, biased_dispersion))
    prev = None
    for ip in (1e-5, 1e-6, 1e-7):
        c = mixing.MixingConfig(cfg.omega_p, ip, 0.3e-3, 1e-3, biased_dispersion, design_biased.spec)
        g = mixing.cme_gain(c, [ws]).points[0]
        if prev is not None:
            assert g.gain_db <= prev + 1e-12
        prev = g.gain_db
    assert prev < 1e-4  # gain excess scales as I_p squared
    assert g.mismatch == pytest.approx(geo, rel=1e-5)


def test_undepleted_gain_regimes():
    assert mixing.undepleted_gain(0.02, 0.0, 100.0) == pytest.approx(math.cosh(2.0) ** 2)
    for g, d, n in ((0.01, 0.03, 400), (0.01, 0.021, 1000), (0.02, 0.2, 50)):
        gain = mixing.undepleted_gain(g, d, n)
        assert 1.0 <= gain <= 1.0 + g * g / (0.25 * d * d - g * g) + 1e-12
    # at the boundary both branches agree
    g = 0.01
    a = mixing.undepleted_gain(g, 2 * g * (1 - 1e-7), 100)
    b = mixing.undepleted_gain(g, 2 * g * (1 + 1e-7), 100)
    assert a == pytest.approx(b, rel=1e-5)
    assert mixing.undepleted_gain(g, 2 * g, 100) == pytest.approx(1 + 1.0)


def test_full_integration_conserves_photon_flux():
    sol = mixing.integrate_cme(1.2, 0.5, 0.7, 0.001, 400.0, 1e6, 1e-4, 3e-6, 200.0)
    assert sol.manley_rowe_drift < 1e-6
    assert sol.gain > 1.0


def test_length_for_gain(design_biased, biased_dispersion):
    cfg = _pumped(design_biased, biased_dispersion)
    ws = 0.5 * cfg.omega_p
    n = mixing.length_for_gain(cfg, ws, 20.0)
    assert n is not None
    g = mixing.cme_gain(cfg, [ws], length=n).points[0].gain_db
    assert g == pytest.approx(20.0, abs=1e-6)
    lengths = [16, 32, 64, 128, 256]
    gains = [mixing.cme_gain(cfg, [ws], length=x).points[0].gain_db for x in lengths]
    assert np.all(np.diff(gains) > 0)


def test_placement_uniform_line():
    spec = tline.LoadedLineSpec(BASE, (1.0,), n_supercells=100, dc_bias=0.3e-3)
    curve = tline.bloch_dispersion(spec, np.linspace(1e8, 2e11, 2000))
    cfg = mixing.MixingConfig(None, 1e-4, 0.3e-3, BASE.i_star, curve, spec)
    with pytest.raises(NoStopbandInBand):
        mixing.solve_pump_placement(cfg, (1e9, 2e11))


def test_placement_without_pump_zeroes_geometric_mismatch(design_biased, biased_dispersion):
    cfg = mixing.MixingConfig(None, 0.0, 0.3e-3, BASE.i_star, biased_dispersion, design_biased.spec)
    place = mixing.solve_pump_placement(cfg, (TAU * F_PUMP, 1.06 * TAU * F_PUMP))
    k = biased_dispersion.k_at
    assert place.sign_change
    assert abs(k(place.omega_p) - 2 * k(place.omega_p / 2)) < 1e-6


def test_placement_warns_without_sign_change(design_unbiased):
    spec = design_unbiased.spec
    curve = tline.bloch_dispersion(spec, np.linspace(0.005, 3.5, 20000) * TAU * F_PUMP)
    cfg = mixing.MixingConfig(None, 1e-4, 0.0, BASE.i_star, curve, spec)
    with pytest.warns(NoSignChange):
        place = mixing.solve_pump_placement(cfg, (TAU * F_PUMP, 1.06 * TAU * F_PUMP))
    assert not place.sign_change and place.warnings


def test_quantum_limit():
    assert mixing.quantum_limit_noise(TAU * 6e9) == pytest.approx(0.1440, rel=1e-3)
    assert mixing.quantum_limit_noise(0.0) == 0.0
    assert mixing.noise_benchmark(TAU * 6e9)["below_target"]


def test_gain_profile_csv(design_biased, biased_dispersion):
    cfg = _pumped(design_biased, biased_dispersion)
    prof = mixing.cme_gain(cfg, [0.45 * cfg.omega_p])
    f_s, g, f_i, dk = prof.csv_rows()[0]
    assert f_s + f_i == pytest.approx(cfg.omega_p / TAU)
    assert prof.line_length == design_biased.spec.n_supercells


def test_no_warnings_on_normal_gain(design_biased, biased_dispersion):
    cfg = _pumped(design_biased, biased_dispersion)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        mixing.cme_gain(cfg, np.linspace(0.4, 0.6, 5) * cfg.omega_p)

import math

import numpy as np
import pytest

from kitwpa import oracle, tline
from kitwpa.errors import BudgetExceeded, DataError, FrequencyInStopband, NotSteady

TAU = 2 * math.pi
LINEAR = tline.UnitCell(100e-12, 40e-15, i_star=math.inf)
NONLINEAR = tline.UnitCell(100e-12, 40e-15, i_star=1e-3)


def test_linear_line_transmits():
    spec = tline.LoadedLineSpec(LINEAR, (1.0,), n_supercells=32)
    drive = [(TAU * 8e9, 1e-5)]
    res = oracle.time_domain_oracle(spec, drive, oracle.suggest_duration(spec, drive, settle=3))
    assert res.amplitude_at(TAU * 8e9) / 1e-5 == pytest.approx(1.0, abs=0.01)
    assert res.leakage_dbc < oracle.LEAKAGE_DBC


def test_mixing_products():
    prods = dict((round(w), o) for w, o in oracle.mixing_products([2.0, 3.0], 2))
    assert prods[1] == (-1, 1)
    assert prods[5] == (1, 1)
    assert 0 not in prods


def test_budget_guard():
    spec = tline.LoadedLineSpec(LINEAR, (1.0,), n_supercells=1000)
    with pytest.raises(BudgetExceeded):
        oracle.time_domain_oracle(spec, [(TAU * 8e9, 1e-5)], 1e-5)


def test_stopband_drive(design_unbiased):
    spec = design_unbiased.spec
    gap = design_unbiased.narrow_gap
    with pytest.raises(FrequencyInStopband):
        oracle.time_domain_oracle(spec, [(0.5 * (gap.lo + gap.hi), 1e-5)], 1e-9)


def test_drive_validation():
    spec = tline.LoadedLineSpec(LINEAR, (1.0,), n_supercells=4)
    with pytest.raises(DataError):
        oracle.time_domain_oracle(spec, [], 1e-9)
    with pytest.raises(DataError):
        oracle.time_domain_oracle(spec, [(-1.0, 1e-5)], 1e-9)


def test_short_record_is_not_steady():
    spec = tline.LoadedLineSpec(LINEAR, (1.0,), n_supercells=4)
    with pytest.raises(NotSteady):
        oracle.time_domain_oracle(spec, [(TAU * 8e9, 1e-5)], 2e-10)


def test_biased_line_makes_idler():
    spec = tline.LoadedLineSpec(NONLINEAR, (1.0,), n_supercells=16, dc_bias=0.5e-3)
    wp, ws = TAU * 16e9, TAU * 7e9
    drive = [(wp, 1e-4), (ws, 1e-6)]
    res = oracle.time_domain_oracle(spec, drive, oracle.suggest_duration(spec, drive, settle=3))
    idler = res.tone_at(wp - ws)
    assert idler.order == (1, -1)
    assert idler.amplitude > 1e-3 * res.amplitude_at(ws)
    # second harmonic of the pump from the DC-biased quadratic term
    assert res.amplitude_at(2 * wp) > 0.0

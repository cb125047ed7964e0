"""Fixed matrix of pumped loaded lines where the coupled-mode gain is checked against the ladder oracle.

Each case is a three-load supercell of ``3 * period`` cells (rotated by half
a period so the line starts and ends between loads) on the 100 pH / 40 fF
cell with I* = 1 mA. Pump frequencies sit in the first passband with the
second harmonic and the pump-signal sum products inside stopbands, which is
the regime where three coupled modes describe the line. Predicted gains
stay between 4 and 9 dB.
"""

from dataclasses import dataclass

import numpy as np

from kitwpa import mixing, oracle, tline

I_STAR = 1e-3
SIGNAL_RATIO = 7 / 16  # omega_s / omega_p: commensurate, off the degenerate point
SIGNAL_BELOW_PUMP_DB = 30.0
SETTLE_TRANSITS = 12.0


@dataclass(frozen=True)
class Case:
    period: int
    multiplier: float
    asymmetry: float
    i_d: float
    n_supercells: int
    pump_over_cutoff: float
    i_p0: float

    @property
    def label(self) -> str:
        return (f"P{self.period}-m{self.multiplier:g}-Id{self.i_d * 1e3:g}mA-"
                f"N{self.n_supercells}-Ip{self.i_p0 * 1e6:g}uA")

    def spec(self) -> tline.LoadedLineSpec:
        p = list(tline.loading_pattern(self.period, self.multiplier, self.asymmetry))
        h = self.period // 2
        pattern = tuple(p[-h:] + p[:-h])
        return tline.LoadedLineSpec(tline.UnitCell(100e-12, 40e-15, I_STAR), pattern, "c", self.n_supercells, self.i_d)

    def tones(self, spec):
        wp = self.pump_over_cutoff * spec.cutoff()
        return wp, SIGNAL_RATIO * wp

    def mixing_config(self, spec) -> mixing.MixingConfig:
        wc = spec.cutoff()
        curve = tline.bloch_dispersion(spec, np.linspace(1e-4 * wc, 2.99 * wc, 60000))
        wp, _ = self.tones(spec)
        return mixing.MixingConfig(wp, self.i_p0, self.i_d, I_STAR, curve, spec)

    def cme_gain_db(self, method: str = "undepleted") -> mixing.GainPoint:
        spec = self.spec()
        cfg = self.mixing_config(spec)
        _, ws = self.tones(spec)
        return mixing.cme_gain(cfg, [ws], method=method, signal_below_pump_db=SIGNAL_BELOW_PUMP_DB).points[0]

    def oracle_gain_db(self) -> float:
        spec = self.spec()
        wp, ws = self.tones(spec)
        pump = (wp, self.i_p0)
        signal = (ws, self.i_p0 * 10 ** (-SIGNAL_BELOW_PUMP_DB / 20))
        duration = oracle.suggest_duration(spec, [pump, signal], settle=SETTLE_TRANSITS)
        gain, _, _ = oracle.oracle_gain_db(spec, pump, signal, duration=duration)
        return gain


MATRIX = (
    Case(7, 3.0, 1.0, 0.5e-3, 64, 0.1998, 5e-5),
    Case(7, 3.0, 1.0, 0.5e-3, 48, 0.1998, 6e-5),
    Case(7, 3.0, 1.0, 0.5e-3, 48, 0.1998, 7e-5),
    Case(6, 3.0, 1.0, 0.5e-3, 64, 0.2275, 4e-5),
    Case(6, 3.0, 1.0, 0.5e-3, 64, 0.2275, 6e-5),
    Case(8, 4.0, 1.0, 0.5e-3, 64, 0.1929, 4e-5),
    Case(7, 3.0, 1.0, 0.3e-3, 64, 0.1998, 6e-5),
    Case(7, 3.0, 1.0, 0.3e-3, 64, 0.1998, 9e-5),
)

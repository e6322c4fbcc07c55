"""Grid-level agreement between the simulated SBDR loop and the analytic
period model, plus the slope/floor properties of the two parameter sweeps."""

from fractions import Fraction

import pytest

from pracsim.cli import REDUCED_T_RCD, REDUCED_T_RTP
from pracsim.controller import measure_sbdr_period
from pracsim.stats import sbdr_oracle, sbdr_oracle_cycles
from pracsim.timing import preset

CLOCK_NS = Fraction(1000, 2400)  # one DRAM clock


def swept(base, **changes):
    params = base.with_fields(**changes)
    return params.with_fields(t_rc=params.t_ras + params.t_rp)


def grid_points():
    """tRP in [16, 36] and tRAS in [16, 32], each with and without the
    tRCD+tRTP = 16 ns floor configuration."""
    for reduce_floor in (False, True):
        base = preset("default")
        if reduce_floor:
            base = base.with_fields(t_rcd=REDUCED_T_RCD, t_rtp=REDUCED_T_RTP)
        for t_rp in range(16, 37):
            yield swept(base, t_rp=float(t_rp))
        for t_ras in range(16, 33):
            yield swept(base, t_ras=float(t_ras))


def test_simulated_period_matches_oracle_on_full_grid():
    # agreement is checked in engine units: at most one clock of
    # quantization slack, and in practice exact
    for params in grid_points():
        simulated = measure_sbdr_period(params)
        assert abs(simulated - sbdr_oracle_cycles(params)) <= 1


def test_simulated_period_is_exactly_quantized_oracle():
    for params in grid_points():
        assert measure_sbdr_period(params) == sbdr_oracle_cycles(params)


def test_trp_slope_is_one_per_access():
    base = preset("default")
    periods = {t_rp: measure_sbdr_period(swept(base, t_rp=float(t_rp)))
               for t_rp in range(16, 37)}
    # end to end the slope is exactly one ns per ns
    total = Fraction(periods[36] - periods[16]) * CLOCK_NS
    assert total == 36 - 16
    # each point sits on the unit-slope line to within one clock
    for t_rp, period in periods.items():
        deviation = Fraction(period - periods[16]) * CLOCK_NS - (t_rp - 16)
        assert abs(deviation) <= CLOCK_NS


def test_tras_flat_below_default_floor():
    base = preset("default")
    periods = [measure_sbdr_period(swept(base, t_ras=float(t)))
               for t in range(16, 24)]  # all below tRCD + tRTP = 23.5 ns
    assert len(set(periods)) == 1
    oracle = sbdr_oracle(swept(base, t_ras=16.0))
    assert oracle == pytest.approx(39.5)


def test_tras_slope_one_with_reduced_floor():
    base = preset("default").with_fields(t_rcd=REDUCED_T_RCD, t_rtp=REDUCED_T_RTP)
    assert base.t_rcd + base.t_rtp == 16.0
    periods = {t: measure_sbdr_period(swept(base, t_ras=float(t)))
               for t in range(16, 33)}
    anchor = periods[32]
    for t_ras, period in periods.items():
        deviation = Fraction(anchor - period) * CLOCK_NS - (32 - t_ras)
        assert abs(deviation) <= CLOCK_NS
    assert all(periods[t] <= periods[t + 1] for t in range(16, 32))


def test_tras_slope_zero_then_one_without_reduction():
    base = preset("default")
    below = [measure_sbdr_period(swept(base, t_ras=float(t))) for t in (16, 20, 23)]
    assert len(set(below)) == 1
    above = {t: measure_sbdr_period(swept(base, t_ras=float(t))) for t in (24, 28, 32)}
    for t_ras, period in above.items():
        deviation = Fraction(above[32] - period) * CLOCK_NS - (32 - t_ras)
        assert abs(deviation) <= CLOCK_NS

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arbc.beam_channel import eta_bt as channel_eta_bt
from arbc.config import SWEEP_PS_MAX_W
from arbc.core import ConfigError, DomainError, InfeasibleError, ModelError, mpp_coeffs_at
from arbc.csv_io import SWEEP_HEADER, render_csv, sweep_rows
from arbc.electro_beam import beam_power, lasing_threshold
from arbc.end_to_end import (
    battery_power,
    battery_power_at,
    eta_bt_for_range,
    eta_om,
    eta_om_curve,
    feasible_source_power,
    g_quadratic,
    optimal_source_power,
    output_power_pm,
    stage_efficiencies,
    sweep,
)
from arbc.models import ChannelSpec, LinkConfig, MppLinearCoeffs, OperatingPoint, SqrtFitCoeffs, SweepSpec

ETA_BT_LATTICE = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
TEMP_LATTICE = [0.0, 25.0, 50.0]
LATTICE = [(eta, temp) for eta in ETA_BT_LATTICE for temp in TEMP_LATTICE]


def point(ps: float, eta: float = 1.0, temp: float = 25.0) -> OperatingPoint:
    return OperatingPoint(source_power=ps, eta_bt=eta, temp=temp)


# ==============================================================================
# Power relation
# ==============================================================================

def test_output_power_at_forty_watts(default_config):
    expected = 1.6585 * math.sqrt(50.2) - 5.9698 - 0.2989
    assert output_power_pm(point(40.0), default_config) == pytest.approx(expected, abs=2e-3)
    assert output_power_pm(point(40.0), default_config) == pytest.approx(5.482, abs=1e-3)


@pytest.mark.parametrize("eta", [0.35, 0.7, 1.0])
def test_output_power_is_linear_model_of_received_beam(default_config, eta):
    coeffs = mpp_coeffs_at(default_config, 25.0)
    received = eta * beam_power(40.0, default_config.sqrt_coeffs)
    assert output_power_pm(point(40.0, eta), default_config) == pytest.approx(
        coeffs.a2 * received + coeffs.b2, rel=1e-12
    )


def test_output_power_is_zero_at_threshold(default_config):
    threshold = lasing_threshold(default_config.sqrt_coeffs)
    assert output_power_pm(point(threshold, 0.5), default_config) == 0.0
    assert output_power_pm(point(0.0), default_config) == 0.0


def test_battery_power(default_config):
    assert battery_power(10.0, default_config) == pytest.approx(8.91, rel=1e-12)
    assert battery_power(0.0, default_config) == 0.0
    lossless = LinkConfig(eta_dc=1.0, eta_ce=1.0)
    assert battery_power(7.5, lossless) == 7.5
    with pytest.raises(DomainError):
        battery_power(-1.0, default_config)


def test_battery_power_at_composes_stages(default_config):
    p = point(40.0, 0.8, 0.0)
    assert battery_power_at(p, default_config) == pytest.approx(
        output_power_pm(p, default_config) * 0.9 * 0.99, rel=1e-12
    )


def test_feasible_interval_starts_where_output_turns_positive(default_config):
    interval = feasible_source_power(0.3, 50.0, default_config)
    assert interval.lower > lasing_threshold(default_config.sqrt_coeffs)
    assert math.isinf(interval.upper)
    assert output_power_pm(point(interval.lower * 0.999, 0.3, 50.0), default_config) == 0.0
    assert output_power_pm(point(interval.lower * 1.001, 0.3, 50.0), default_config) > 0.0


def test_feasible_interval_is_threshold_when_offset_is_positive():
    config = LinkConfig(sqrt_coeffs=SqrtFitCoeffs(a1=3.0, b1=1.0, c1=0.5))
    interval = feasible_source_power(1.0, 25.0, config)
    assert interval.lower == 0.0


# ==============================================================================
# Efficiency
# ==============================================================================

def test_eta_om_spot_check_at_40_watts(default_config):
    assert eta_om(point(40.0, 0.70, 0.0), default_config) == pytest.approx(0.092, abs=0.01)
    assert eta_om(point(40.0, 0.70, 0.0), default_config) == pytest.approx(0.0922, abs=1e-4)


def test_eta_om_at_forty_watts_lossless_channel(default_config):
    assert eta_om(point(40.0), default_config) == pytest.approx(5.482 / 40.0 * 0.891, abs=1e-4)


def test_eta_om_raises_with_feasible_interval(default_config):
    with pytest.raises(InfeasibleError, match="feasible source power interval") as excinfo:
        eta_om(point(5.0, 0.3, 50.0), default_config)
    assert excinfo.value.interval.lower > 5.0
    assert excinfo.value.exit_code == 2


def test_eta_om_below_threshold_is_infeasible(default_config):
    with pytest.raises(InfeasibleError):
        eta_om(point(1.0), default_config)


@pytest.mark.parametrize("eta, temp", LATTICE)
def test_factorisation_matches_expanded_form(default_config, eta, temp):
    for ps in (20.0, 60.0, 150.0):
        p = point(ps, eta, temp)
        stages = stage_efficiencies(p, default_config)
        product = stages.eta_eb * stages.eta_bt * stages.eta_bem * stages.eta_dc * stages.eta_ce
        assert eta_om(p, default_config) == pytest.approx(product, rel=1e-12)
        assert stages.eta_om == pytest.approx(product, rel=1e-15)


def test_factorisation_without_converter_losses():
    config = LinkConfig(eta_dc=1.0, eta_ce=1.0)
    ps = 40.0
    pbt = beam_power(ps, config.sqrt_coeffs)
    coeffs = mpp_coeffs_at(config, 25.0)
    assert eta_om(point(ps), config) == pytest.approx((pbt / ps) * (coeffs.a2 + coeffs.b2 / pbt), rel=1e-12)


def test_eta_om_curve_matches_scalar_and_marks_infeasible(default_config):
    ps = np.array([1.0, 5.0, 10.0, 40.0, 120.0])
    curve = eta_om_curve(ps, 0.3, 50.0, default_config)
    assert np.isnan(curve[0]) and np.isnan(curve[1])
    for value, p in zip(curve[2:], ps[2:]):
        assert value == pytest.approx(eta_om(point(p, 0.3, 50.0), default_config), rel=1e-12)


# ==============================================================================
# Optimum
# ==============================================================================

def test_g_quadratic_values(default_config):
    assert g_quadratic(0.0, 1.0, 25.0, default_config) == pytest.approx(-3.331 * 10.2 / 2, rel=1e-12)
    assert g_quadratic(0.0, 1.0, 25.0, default_config) == pytest.approx(-16.988, abs=1e-3)
    assert g_quadratic(1e6, 1.0, 25.0, default_config) < -1e11


@pytest.mark.parametrize("eta, temp", LATTICE)
def test_g_has_exactly_one_root_above_sqrt_b1(default_config, eta, temp):
    sqrt_b1 = math.sqrt(default_config.sqrt_coeffs.b1)
    assert g_quadratic(sqrt_b1, eta, temp, default_config) > 0
    coeffs = mpp_coeffs_at(default_config, temp)
    a1, b1, c1 = 3.331, 10.2, -11.99
    linear = c1 + coeffs.b2 / (coeffs.a2 * eta)
    roots = np.roots([-a1 / 2, -linear, -a1 * b1 / 2])
    assert np.all(np.isreal(roots))
    assert sum(1 for r in roots.real if r > sqrt_b1) == 1


def test_optimum_with_default_coefficients(default_config):
    result = optimal_source_power(1.0, 25.0, default_config)
    assert result.xi == pytest.approx(5.801, abs=1e-3)
    assert result.ps_star == pytest.approx(23.45, abs=0.01)
    assert result.eta_opt == pytest.approx(0.1274, abs=1e-4)
    assert result.pb_star == pytest.approx(result.pm_star * 0.891, rel=1e-12)
    assert result.eta_opt == pytest.approx(result.pb_star / result.ps_star, rel=1e-12)


def test_optimum_argmax_invariant_to_converter_efficiency(default_config):
    lossy = optimal_source_power(1.0, 25.0, default_config)
    lossless = optimal_source_power(1.0, 25.0, LinkConfig(eta_dc=1.0, eta_ce=1.0))
    assert lossless.ps_star == lossy.ps_star
    assert lossless.eta_opt == pytest.approx(lossy.eta_opt / (0.9 * 0.99), rel=1e-12)


@given(st.floats(min_value=0.05, max_value=1.0), st.floats(min_value=0.1, max_value=1.0))
@settings(max_examples=50, deadline=None)
def test_argmax_invariance_for_any_converter_scaling(eta, scale):
    base = LinkConfig(eta_dc=1.0, eta_ce=1.0)
    scaled = LinkConfig(eta_dc=scale, eta_ce=1.0)
    a = optimal_source_power(eta, 25.0, base)
    b = optimal_source_power(eta, 25.0, scaled)
    assert b.ps_star == a.ps_star
    assert b.eta_opt == pytest.approx(a.eta_opt * scale, rel=1e-12)


@pytest.mark.parametrize("eta, temp", LATTICE)
def test_optimum_matches_grid_oracle(default_config, eta, temp):
    result = optimal_source_power(eta, temp, default_config)
    grid = np.arange(1, int(SWEEP_PS_MAX_W * 1000) + 1) * 1e-3
    curve = eta_om_curve(grid, eta, temp, default_config)
    best = int(np.nanargmax(curve))
    assert abs(grid[best] - result.ps_star) <= 2e-3
    assert abs(curve[best] - result.eta_opt) <= 1e-6
    assert result.eta_opt >= np.nanmax(curve) - 1e-12


@pytest.mark.parametrize("eta, temp", LATTICE)
def test_eta_om_is_unimodal(default_config, eta, temp):
    lower = feasible_source_power(eta, temp, default_config).lower
    ps = np.arange(math.floor(lower * 100) + 1, int(SWEEP_PS_MAX_W * 100) + 1) / 100.0
    curve = eta_om_curve(ps, eta, temp, default_config)
    assert not np.any(np.isnan(curve))
    signs = np.sign(np.diff(curve))
    assert np.all(signs != 0)
    assert signs[0] > 0 and signs[-1] < 0
    assert np.count_nonzero(np.diff(signs)) == 1


def test_optimum_rejects_config_without_interior_root():
    # c1 > 0 keeps g negative above sqrt(b1)
    config = LinkConfig(sqrt_coeffs=SqrtFitCoeffs(a1=3.0, b1=1.0, c1=5.0))
    with pytest.raises(ModelError):
        optimal_source_power(1.0, 25.0, config)


@pytest.mark.parametrize("eta", [0.0, 1.2])
def test_optimum_rejects_channel_efficiency_outside_unit_interval(default_config, eta):
    with pytest.raises(DomainError):
        optimal_source_power(eta, 25.0, default_config)


# ==============================================================================
# Sweeps
# ==============================================================================

def test_single_point_sweep_matches_point_operations(default_config):
    spec = SweepSpec(source_powers=[40.0], temps=[0.0], eta_bts=[0.7])
    (row,) = sweep(spec, default_config)
    p = point(40.0, 0.7, 0.0)
    assert row.pm_w == output_power_pm(p, default_config)
    assert row.pb_w == battery_power_at(p, default_config)
    assert row.eta_om == pytest.approx(eta_om(p, default_config), rel=1e-15)
    assert row.ps_star_w == optimal_source_power(0.7, 0.0, default_config).ps_star


def test_sweep_row_count_and_order(default_config):
    spec = SweepSpec(
        source_powers=[10.0, 20.0, 30.0],
        temps=[0.0, 25.0],
        eta_bts=[0.5, 1.0],
    )
    rows = sweep(spec, default_config)
    assert len(rows) == 12
    keys = [(r.eta_bt, r.temp_c, r.ps_w) for r in rows]
    assert keys == sorted(keys)


def test_sweep_is_independent_of_worker_count(default_config):
    spec = SweepSpec(source_powers=[5.0, 23.0, 80.0], temps=[0.0, 25.0, 50.0], eta_bts=ETA_BT_LATTICE)
    serial = sweep(spec, default_config, workers=1)
    threaded = sweep(spec, default_config, workers=4)
    assert render_csv(SWEEP_HEADER, sweep_rows(serial)) == render_csv(SWEEP_HEADER, sweep_rows(threaded))


def test_sweep_eta_opt_increases_with_channel_efficiency(default_config):
    spec = SweepSpec(source_powers=[40.0], temps=[25.0], eta_bts=ETA_BT_LATTICE)
    eta_opts = [row.eta_opt for row in sweep(spec, default_config)]
    assert all(b > a for a, b in zip(eta_opts, eta_opts[1:]))


def test_sweep_eta_opt_decreases_with_temperature(default_config):
    spec = SweepSpec(source_powers=[40.0], temps=[0.0, 25.0, 50.0], eta_bts=[0.8])
    eta_opts = [row.eta_opt for row in sweep(spec, default_config)]
    assert eta_opts[0] > eta_opts[1] > eta_opts[2]


def test_sweep_marks_infeasible_rows(default_config):
    spec = SweepSpec(source_powers=[5.0, 40.0], temps=[50.0], eta_bts=[0.3])
    infeasible, feasible = sweep(spec, default_config)
    assert infeasible.pm_w == 0.0 and infeasible.pb_w == 0.0
    assert math.isnan(infeasible.eta_om)
    assert feasible.eta_om > 0.0


def test_sweep_over_range_axis(default_config):
    spec = SweepSpec(source_powers=[40.0], temps=[25.0], ranges_km=[0.0, 1.0, 5.0])
    rows = sweep(spec, default_config)
    assert [r.eta_bt for r in rows] == [eta_bt_for_range(r, default_config) for r in (0.0, 1.0, 5.0)]
    assert rows[0].eta_bt == 1.0
    assert rows[0].eta_om > rows[1].eta_om > rows[2].eta_om


def test_eta_bt_for_range_uses_configured_channel(default_config):
    expected = channel_eta_bt(default_config.channel.model_copy(update={"range_km": 5.0}))
    assert eta_bt_for_range(5.0, default_config) == expected


def test_sweep_rejects_temperatures_outside_table(default_config):
    spec = SweepSpec(source_powers=[40.0], temps=[25.0, 75.0], eta_bts=[1.0])
    with pytest.raises(ConfigError, match="outside supported interval"):
        sweep(spec, default_config)


def test_range_axis_that_extinguishes_the_beam_is_a_config_error():
    config = LinkConfig(channel=ChannelSpec(visibility_km=0.5))
    spec = SweepSpec(source_powers=[40.0], temps=[25.0], ranges_km=[1.0, 1000.0])
    with pytest.raises(ConfigError, match="range axis"):
        sweep(spec, config)


def test_optimum_rejects_coefficients_above_unit_efficiency():
    config = LinkConfig(
        sqrt_coeffs=SqrtFitCoeffs(a1=20.0, b1=1.0, c1=-40.0),
        mpp_coeffs_by_temp={25.0: MppLinearCoeffs(a2=0.9, b2=-0.01)},
        eta_dc=1.0,
        eta_ce=1.0,
    )
    with pytest.raises(ModelError, match="efficiency above 1"):
        optimal_source_power(1.0, 25.0, config)


def test_sweep_blanks_optimum_for_coefficients_above_unit_efficiency():
    config = LinkConfig(
        sqrt_coeffs=SqrtFitCoeffs(a1=20.0, b1=1.0, c1=-40.0),
        mpp_coeffs_by_temp={25.0: MppLinearCoeffs(a2=0.9, b2=-0.01)},
    )
    (row,) = sweep(SweepSpec(source_powers=[40.0], temps=[25.0], eta_bts=[1.0]), config)
    assert math.isnan(row.ps_star_w) and math.isnan(row.eta_opt)

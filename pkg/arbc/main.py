"""Command-line front end for the ARBC link model.

Usage:
    arbc fit data.csv --method compare
    arbc channel --scenario high --lambda 1550 --range 5
    arbc pv --mpp 25 --temp 25
    arbc optimize --eta-bt 1.0 --temp 25
    arbc sweep --eta-bt 0.3:1.0:0.1 --temp 0,25,50 --ps 5:100:0.5 --output sweep.csv

Exit codes: 0 ok, 2 input or domain error, 3 numerical or calibration failure.
"""
import argparse
import logging
import sys
from collections.abc import Callable
from typing import Optional

from pydantic import ValidationError

from .beam_channel import attenuation_per_km, eta_bt, max_range, scenario_spec
from .config import DEFAULT_PS_AXIS, LOG_LEVEL
from .config_file import load_config, resolve_config_path, resolve_workers, write_config
from .core import ArbcError, ConfigError, mpp_coeffs_at
from .csv_io import (
    FIT_CURVE_HEADER,
    IV_HEADER,
    SWEEP_HEADER,
    build_manifest,
    format_float,
    iv_rows,
    read_measured_samples,
    render_csv,
    sweep_rows,
    write_manifest,
    write_text,
)
from .electro_beam import fit_linear, fit_report, fit_sqrt, predict, squared_errors
from .end_to_end import battery_power_at, eta_bt_for_range, optimal_source_power, stage_efficiencies, sweep
from .models import ChannelScenario, ChannelSpec, LinkConfig, OperatingPoint, SweepSpec
from .numerics import parse_axis
from .pv_receiver import calibrate_area_factor, ensure_calibrated, eta_bem, iv_curve, mpp, mpp_table

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace, LinkConfig], int]


def handle_error(e: Exception) -> tuple[str, int]:
    """Format an error as a one-line message and its exit code."""
    if isinstance(e, ValidationError):
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'value'}: {err['msg']}" for err in e.errors()
        )
        return f"error: invalid input: {details}", 2
    if isinstance(e, ArbcError):
        return f"error: {e}", e.exit_code
    return f"error: unexpected {type(e).__name__}: {e}", 1


def _axis(text: str, name: str) -> list[float]:
    try:
        return parse_axis(text)
    except ValueError as e:
        raise ConfigError(f"--{name}: {e}") from None


def _emit(text: str, output: Optional[str], command: str, config: LinkConfig, inputs: list[str]) -> None:
    """Write to ``output`` with a manifest sidecar, or to stdout."""
    if output is None:
        sys.stdout.write(text)
        return
    write_text(output, text)
    write_manifest(output, build_manifest(command, config, inputs=inputs, outputs=[output]))
    logger.info(f"[CLI] Wrote {output}")


def _percent(value: float) -> str:
    return f"{value * 100:.4f} %"


# ==============================================================================
# fit
# ==============================================================================

def cmd_fit(args: argparse.Namespace, config: LinkConfig) -> int:
    samples = read_measured_samples(args.input)

    if args.method == "compare":
        report = fit_report(samples)
        print(f"sqrt:   a1={format_float(report.sqrt_coeffs.a1)} b1={format_float(report.sqrt_coeffs.b1)} "
              f"c1={format_float(report.sqrt_coeffs.c1)} mse={format_float(report.sqrt_mse)}")
        print(f"linear: slope={format_float(report.linear_coeffs.slope)} "
              f"intercept={format_float(report.linear_coeffs.intercept)} mse={format_float(report.linear_mse)}")
        print("ps_W,sqrt_squared_error,linear_squared_error")
        for sample, sq, lin in zip(samples, report.sqrt_errors, report.linear_errors):
            print(f"{format_float(sample.source_power)},{format_float(sq)},{format_float(lin)}")
        model = report.sqrt_coeffs
    else:
        if args.method == "sqrt":
            model, mse = fit_sqrt(samples)
            print(f"a1 = {format_float(model.a1)}")
            print(f"b1 = {format_float(model.b1)}")
            print(f"c1 = {format_float(model.c1)}")
        else:
            model, mse = fit_linear(samples)
            print(f"slope = {format_float(model.slope)}")
            print(f"intercept = {format_float(model.intercept)}")
        print("ps_W,squared_error")
        for sample, error in zip(samples, squared_errors(samples, model)):
            print(f"{format_float(sample.source_power)},{format_float(error)}")
        print(f"mse = {format_float(mse)}")

    if args.output:
        fitted = predict(model, [s.source_power for s in samples])
        errors = squared_errors(samples, model)
        rows = [
            (s.source_power, s.beam_power, float(f), e)
            for s, f, e in zip(samples, fitted, errors)
        ]
        _emit(render_csv(FIT_CURVE_HEADER, rows), args.output, "fit", config, [args.input])
    return 0


# ==============================================================================
# channel
# ==============================================================================

def _channel_spec(args: argparse.Namespace, config: LinkConfig) -> ChannelSpec:
    wavelength = args.wavelength if args.wavelength is not None else config.channel.wavelength_nm
    range_km = args.range if args.range is not None else config.channel.range_km
    if args.scenario is not None:
        return scenario_spec(args.scenario, wavelength_nm=wavelength, range_km=range_km)
    visibility = args.visibility if args.visibility is not None else config.channel.visibility_km
    return ChannelSpec(wavelength_nm=wavelength, visibility_km=visibility, range_km=range_km)


def cmd_channel(args: argparse.Namespace, config: LinkConfig) -> int:
    spec = _channel_spec(args, config)
    print(f"wavelength_nm = {format_float(spec.wavelength_nm)}")
    print(f"visibility_km = {format_float(spec.visibility_km)}")
    print(f"attenuation_per_km = {attenuation_per_km(spec):.10g}")
    if args.target_eta is not None:
        print(f"target_eta = {format_float(args.target_eta)}")
        print(f"max_range_km = {max_range(spec, args.target_eta):.10g}")
    else:
        print(f"range_km = {format_float(spec.range_km)}")
        print(f"eta_bt = {eta_bt(spec):.10g}")
    return 0


# ==============================================================================
# pv
# ==============================================================================

def cmd_pv(args: argparse.Namespace, config: LinkConfig) -> int:
    if args.calibrate:
        params = calibrate_area_factor(config.pv)
        calibrated = config.model_copy(update={"pv": params})
        print(f"area_factor = {format_float(params.area_factor)}", file=sys.stderr)
        _emit(write_config(calibrated), args.output, "pv --calibrate", calibrated, [])
        return 0

    params = ensure_calibrated(config.pv)

    if args.table:
        temps = _axis(args.temps, "temps") if args.temps else list(config.mpp_coeffs_by_temp)
        table = mpp_table(_axis(args.pbr_axis, "pbr-axis"), temps, params)
        print("temp_C,a2,b2")
        for temp, coeffs in table.items():
            print(f"{format_float(temp)},{format_float(coeffs.a2)},{format_float(coeffs.b2)}")
        return 0

    if args.curve is not None:
        points = iv_curve(args.curve, args.temp, params, points=args.points)
        _emit(render_csv(IV_HEADER, iv_rows(points)), args.output, "pv --curve", config, [])
        return 0

    # Reject beam powers the linear MPP model maps to non-positive output
    eta_bem(args.mpp, mpp_coeffs_at(config, args.temp))
    result = mpp(args.mpp, args.temp, params)
    print(f"voltage_V = {result.voltage:.6f}")
    print(f"current_A = {result.current:.6f}")
    print(f"power_W = {result.power:.6f}")
    return 0


# ==============================================================================
# optimize / sweep
# ==============================================================================

def _eta_bt_from(args: argparse.Namespace, config: LinkConfig) -> float:
    if args.eta_bt is not None:
        return args.eta_bt
    return eta_bt_for_range(args.range, config)


def cmd_optimize(args: argparse.Namespace, config: LinkConfig) -> int:
    channel = _eta_bt_from(args, config)
    result = optimal_source_power(channel, args.temp, config)
    print(f"eta_bt = {channel:.10g}")
    print(f"temp_C = {format_float(args.temp)}")
    print(f"ps_star_W = {result.ps_star:.6f}")
    print(f"eta_opt = {_percent(result.eta_opt)}")
    print(f"pm_star_W = {result.pm_star:.6f}")
    print(f"pb_star_W = {result.pb_star:.6f}")

    if args.ps is not None:
        point = OperatingPoint(source_power=args.ps, eta_bt=channel, temp=args.temp)
        stages = stage_efficiencies(point, config)
        print(f"ps_W = {format_float(args.ps)}")
        print(f"pb_W = {battery_power_at(point, config):.6f}")
        for name in ("eta_eb", "eta_bt", "eta_bem", "eta_dc", "eta_ce", "eta_om"):
            print(f"{name} = {_percent(getattr(stages, name))}")
    return 0


def cmd_sweep(args: argparse.Namespace, config: LinkConfig) -> int:
    axes = {
        "source_powers": _axis(args.ps, "ps"),
        "temps": _axis(args.temp, "temp"),
    }
    if args.eta_bt is not None:
        axes["eta_bts"] = _axis(args.eta_bt, "eta-bt")
    else:
        axes["ranges_km"] = _axis(args.range, "range")
    try:
        spec = SweepSpec(**axes)
    except ValidationError as e:
        raise ConfigError(f"invalid sweep axes: {e.errors()[0]['msg']}") from None

    rows = sweep(spec, config, workers=args.workers)
    _emit(render_csv(SWEEP_HEADER, sweep_rows(rows)), args.output, "sweep", config, [])
    return 0


# ==============================================================================
# Parser
# ==============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arbc", description="Adaptive resonant beam charging link model")
    parser.add_argument("--config", help="Key-value config file (default: $ARBC_CONFIG, else built-in tables)")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="Logging level (default: %(default)s)")
    parser.add_argument("--workers", type=int, help="Sweep worker threads (default: $ARBC_WORKERS, else 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="Fit the electro-beam model to measured samples")
    fit.add_argument("input", help="CSV with header ps_W,pbt_W")
    fit.add_argument("--method", choices=["sqrt", "linear", "compare"], default="sqrt")
    fit.add_argument("--output", help="Write the fitted curve CSV here")
    fit.set_defaults(handler=cmd_fit)

    channel = sub.add_parser("channel", help="Beam transmission efficiency or reach")
    channel.add_argument("--lambda", "--wavelength", dest="wavelength", type=float, help="Wavelength, nm")
    where = channel.add_mutually_exclusive_group()
    where.add_argument("--visibility", type=float, help="Visibility, km")
    where.add_argument("--scenario", choices=[s.value for s in ChannelScenario])
    what = channel.add_mutually_exclusive_group()
    what.add_argument("--range", type=float, help="Range, km")
    what.add_argument("--target-eta", type=float, help="Report the longest range reaching this eta_bt")
    channel.set_defaults(handler=cmd_channel)

    pv = sub.add_parser("pv", help="Single-diode PV receiver")
    mode = pv.add_mutually_exclusive_group(required=True)
    mode.add_argument("--mpp", type=float, metavar="PBR", help="Maximum power point at this received power, W")
    mode.add_argument("--curve", type=float, metavar="PBR", help="I-V/P-V curve CSV at this received power, W")
    mode.add_argument("--calibrate", action="store_true", help="Calibrate area_factor and emit the config")
    mode.add_argument("--table", action="store_true", help="Fit P_m = a2*P_br + b2 per temperature")
    pv.add_argument("--temp", type=float, default=25.0, help="Cell temperature, °C")
    pv.add_argument("--points", type=int, default=200, help="Curve samples")
    pv.add_argument("--pbr-axis", default="5:50:5", help="Received powers for --table")
    pv.add_argument("--temps", help="Temperatures for --table (default: config table)")
    pv.add_argument("--output", help="Output file for --curve/--calibrate")
    pv.set_defaults(handler=cmd_pv)

    optimize = sub.add_parser("optimize", help="Efficiency-optimal source power")
    channel_axis = optimize.add_mutually_exclusive_group(required=True)
    channel_axis.add_argument("--eta-bt", type=float)
    channel_axis.add_argument("--range", type=float, help="Derive eta_bt from the configured channel, km")
    optimize.add_argument("--temp", type=float, required=True)
    optimize.add_argument("--ps", type=float, help="Also break down eta_om at this source power, W")
    optimize.set_defaults(handler=cmd_optimize)

    sweep_cmd = sub.add_parser("sweep", help="Plot-ready sweep CSV")
    sweep_axis = sweep_cmd.add_mutually_exclusive_group(required=True)
    sweep_axis.add_argument("--eta-bt", help="Axis: start:stop:step or comma list")
    sweep_axis.add_argument("--range", help="Range axis, km")
    sweep_cmd.add_argument("--temp", required=True, help="Temperature axis, °C")
    sweep_cmd.add_argument("--ps", default=DEFAULT_PS_AXIS, help="Source power axis, W (default: %(default)s)")
    sweep_cmd.add_argument("--output", help="CSV path (default: stdout)")
    sweep_cmd.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    handler: Handler = args.handler
    try:
        args.workers = resolve_workers(args.workers)
        config = load_config(resolve_config_path(args.config))
        return handler(args, config)
    except (ArbcError, ValidationError) as e:
        message, code = handle_error(e)
        logger.debug(f"[CLI] {args.command} failed", exc_info=True)
        print(message, file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())

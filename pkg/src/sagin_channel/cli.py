"""Command-line entry point: ``sagin-channel <command> [options]``.

Commands write CSV (header row, one record per grid point, ``.`` decimal
separator) to ``--out`` or standard output. Column order is fixed:

geometry
    theta0_deg, d_rf_simple_km, d_rf_accurate_km, ground_range_km, d_st_km,
    d_dif_km, theta_e_deg, flat_earth_km
doppler
    t_s, psi_rad, doppler_ratio, doppler_hz_at_fc
perf
    x, lambda_t, lambda_t_db, p_out, r_er, ber_bound, ber_bound_valid, r_gp,
    then p_out_mc, p_out_mc_se, r_er_mc, r_er_mc_se, mc_trials, mc_seed with --mc
fading
    x, pdf, cdf, survival, then cdf_mc, cdf_mc_se, mc_trials, mc_seed with --mc
validate
    name, expected, got, tolerance, status, note

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical-domain error.
"""

import argparse
import csv
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import fading, montecarlo, performance, refraction, validation
from .errors import ConfigError, DomainError, InvalidArgumentError
from .kinematics import normalized_doppler
from .scenario import BASELINE_SCENARIO, dump_scenario, link_budget, load_scenario, parse_override, parse_sweep

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3

GEOMETRY_COLUMNS = (
    "theta0_deg",
    "d_rf_simple_km",
    "d_rf_accurate_km",
    "ground_range_km",
    "d_st_km",
    "d_dif_km",
    "theta_e_deg",
    "flat_earth_km",
)
DOPPLER_COLUMNS = ("t_s", "psi_rad", "doppler_ratio", "doppler_hz_at_fc")
PERF_COLUMNS = ("x", "lambda_t", "lambda_t_db", "p_out", "r_er", "ber_bound", "ber_bound_valid", "r_gp")
PERF_MC_COLUMNS = ("p_out_mc", "p_out_mc_se", "r_er_mc", "r_er_mc_se", "mc_trials", "mc_seed")
FADING_COLUMNS = ("x", "pdf", "cdf", "survival")
FADING_MC_COLUMNS = ("cdf_mc", "cdf_mc_se", "mc_trials", "mc_seed")
VALIDATE_COLUMNS = ("name", "expected", "got", "tolerance", "status", "note")


def _fmt(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value) + 0.0)  # no "-0.0"
    return str(value)


def write_csv(stream, columns, rows):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _parallel_rows(func, items):
    # map() keeps input order, so rows come out in index order.
    with ThreadPoolExecutor() as pool:
        return list(pool.map(func, items))


def _mc_config(scenario, args):
    a = scenario.analysis
    trials = args.trials if args.trials is not None else a.mc_trials
    seed = args.seed if args.seed is not None else a.seed
    return montecarlo.McConfig(trials, seed, a.stream_count)


# ---------------------------------------------------------------- commands


def cmd_geometry(scenario, sweep=None):
    """One row per detected elevation: both bent-ray lengths, G, d_st, excess, true elevation, flat-Earth slant."""
    profile = scenario.profile()
    angles = [scenario.geometry.detected_elevation_deg] if sweep is None else [float(v) for v in sweep.values()]

    def row(deg):
        geom = scenario.geometry_scenario(deg)
        ray = refraction.trace_ray(profile, geom)
        simple = refraction.bending_length_simple(profile, geom)
        return (
            deg,
            simple,
            ray.bending_length_km,
            ray.ground_range_km,
            ray.straight_length_km,
            ray.excess_km,
            math.degrees(ray.true_elevation_rad),
            refraction.flat_earth_slant(geom),
        )

    return GEOMETRY_COLUMNS, _parallel_rows(row, angles)


def cmd_doppler(scenario, t_start=None, t_end=None, step=None, sweep=None):
    """Normalized Doppler over the pass, time measured from closest approach."""
    earth, sat, pg = scenario.earth(), scenario.satellite(), scenario.pass_geometry()
    d = scenario.analysis.doppler
    if sweep is not None:
        times = sweep.values()
    else:
        t_start = d.t_start_s if t_start is None else t_start
        t_end = d.t_end_s if t_end is None else t_end
        step = d.step_s if step is None else step
        if not (t_start < t_end and step > 0):
            raise InvalidArgumentError(f"bad time window [{t_start}, {t_end}] step {step}")
        count = int(math.floor((t_end - t_start) / step + 1e-9)) + 1
        times = [t_start + i * step for i in range(count)]
    f_c = scenario.carrier.frequency_ghz * 1e9
    rows = []
    for t in times:
        t = float(t)
        ratio = float(normalized_doppler(earth, sat, pg, t))
        psi = pg.relative_angular_velocity_rad_s * (t - pg.epoch_s)
        rows.append((t, psi, ratio, ratio * f_c))
    return DOPPLER_COLUMNS, rows


def cmd_perf(scenario, sweep, axis="lambda", mc=None):
    """Closed-form OP, ER, BER bound and GP over a lambda_t or transmit-power grid.

    With ``axis='power'`` the sweep runs over P_s in dBm (``dB`` scale) or
    watts (``linear``) and lambda_t follows from the scenario's link budget.
    """
    params = scenario.fading_params()
    a = scenario.analysis
    xs = [float(v) for v in sweep.values()]
    if axis == "lambda":
        lams = [float(v) for v in sweep.linear()]
    elif axis == "power":
        budget = link_budget(scenario)
        watts = [10.0 ** ((x - 30.0) / 10.0) for x in xs] if sweep.scale == "dB" else xs
        lams = [budget.with_transmit_w(w).lambda_t for w in watts]
    else:
        raise InvalidArgumentError(f"unknown axis {axis!r}")

    def row(lam):
        pin = performance.PerformanceInputs(lam, params, a.qam_order, a.outage_threshold)
        ber = performance.ber_upper_bound(pin)
        values = [
            lam,
            10.0 * math.log10(lam),
            float(performance.outage_probability(pin)),
            performance.ergodic_rate(pin),
            ber.value,
            ber.valid,
            performance.goodput_lower_bound(pin),
        ]
        if mc is not None:
            op = montecarlo.estimate_outage(params, lam, a.outage_threshold, mc)
            er = montecarlo.estimate_ergodic_rate(params, lam, mc)
            values += [op.mean, op.std_error, er.mean, er.std_error, mc.trials, mc.master_seed]
        return values

    body = _parallel_rows(row, lams)
    rows = sorted(([x] + r for x, r in zip(xs, body)), key=lambda r: r[0])
    columns = PERF_COLUMNS + (PERF_MC_COLUMNS if mc is not None else ())
    return columns, rows


def cmd_fading(scenario, sweep=None, mc=None):
    """PDF, CDF and survival of |h|^2 on a grid, optionally with the empirical CDF."""
    params = scenario.fading_params()
    if sweep is None:
        xs = [i * 5.0 / params.e_st / 100 for i in range(101)]
    else:
        xs = [float(v) for v in sweep.linear()]
    rows = []
    for x in xs:
        rows.append([x, float(fading.pdf_power(params, x)), float(fading.cdf_power(params, x)),
                     float(fading.survival_power(params, x))])
    if mc is not None:
        for r, est in zip(rows, montecarlo.estimate_cdf(params, xs, mc)):
            r += [est.mean, est.std_error, mc.trials, mc.master_seed]
    return FADING_COLUMNS + (FADING_MC_COLUMNS if mc is not None else ()), rows


def cmd_validate(scenario, cfg):
    """Run the oracle suite; returns (columns, rows, all_passed)."""
    checks = validation.run_all(scenario, cfg)
    rows = [(c.name, c.expected, c.got, c.tolerance, c.status, c.note) for c in checks]
    return VALIDATE_COLUMNS, rows, all(c.passed for c in checks)


# ---------------------------------------------------------------- argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=str(BASELINE_SCENARIO), help="scenario file (default: shipped baseline)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a scenario key, e.g. fading.m=5 (repeatable)")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--dump-config", action="store_true", help="print the resolved scenario and exit")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--trials", type=int, help="Monte-Carlo trials (default: scenario analysis.mc_trials)")
    mc.add_argument("--seed", type=int, help="master seed (default: scenario analysis.seed)")

    parser = argparse.ArgumentParser(prog="sagin-channel", description="LEO satellite channel model calculator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("geometry", parents=[common], help="refracted ray geometry")
    p.add_argument("--sweep", help="detected elevation grid in degrees, start:stop:points")

    p = sub.add_parser("doppler", parents=[common], help="normalized Doppler time series")
    p.add_argument("--sweep", help="time grid in seconds, start:stop:points")
    p.add_argument("--t-start", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--step", type=float)

    p = sub.add_parser("perf", parents=[common, mc], help="OP, ER, BER bound and goodput")
    p.add_argument("--sweep", help="start:stop:points[:linear|dB], default 0:40:9:dB on lambda_t or 30:50:21:dB on P_s")
    p.add_argument("--axis", choices=("lambda", "power"), default="lambda", help="sweep lambda_t or transmit power")
    p.add_argument("--mc", action="store_true", help="add Monte-Carlo columns")

    p = sub.add_parser("fading", parents=[common, mc], help="Shadowed-Rician |h|^2 distribution")
    p.add_argument("--sweep", help="power-gain grid, start:stop:points[:linear|dB] (default linear)")
    p.add_argument("--mc", action="store_true", help="add the empirical CDF")

    sub.add_parser("validate", parents=[common, mc], help="run the oracle suite on the scenario")
    return parser


def _emit(args, columns, rows, stdout):
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_csv(fh, columns, rows)
    else:
        write_csv(stdout, columns, rows)


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        overrides = [parse_override(s) for s in args.set]
        scenario = load_scenario(args.config, overrides)
        if args.dump_config:
            stdout.write(dump_scenario(scenario))
            return EXIT_OK
        status = EXIT_OK
        cmd = args.command
        if cmd == "geometry":
            sweep = parse_sweep(args.sweep, "linear") if args.sweep else None
            columns, rows = cmd_geometry(scenario, sweep)
        elif cmd == "doppler":
            sweep = parse_sweep(args.sweep, "linear") if args.sweep else None
            columns, rows = cmd_doppler(scenario, args.t_start, args.t_end, args.step, sweep)
        elif cmd == "perf":
            default = "0:40:9:dB" if args.axis == "lambda" else "30:50:21:dB"
            mc = _mc_config(scenario, args) if args.mc else None
            columns, rows = cmd_perf(scenario, parse_sweep(args.sweep or default), args.axis, mc)
        elif cmd == "fading":
            sweep = parse_sweep(args.sweep, "linear") if args.sweep else None
            mc = _mc_config(scenario, args) if args.mc else None
            columns, rows = cmd_fading(scenario, sweep, mc)
        else:
            start = time.perf_counter()
            columns, rows, ok = cmd_validate(scenario, _mc_config(scenario, args))
            failed = [r[0] for r in rows if r[4] != "pass"]
            summary = f"{len(rows) - len(failed)}/{len(rows)} checks passed in {time.perf_counter() - start:.1f} s"
            stderr.write(summary + ("" if ok else "; failed: " + ", ".join(failed)) + "\n")
            status = EXIT_OK if ok else EXIT_VALIDATION
        _emit(args, columns, rows, stdout)
        return status
    except ConfigError as exc:
        stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except (DomainError, InvalidArgumentError) as exc:
        stderr.write(f"numerical-domain error: {exc}\n")
        return EXIT_DOMAIN


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

"""Acceptance criteria, one test each, at their stated tolerances.

Run ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines as they
are produced; they are also repeated in the terminal summary.
"""

import io
import math
import time

import numpy as np
from scipy import optimize

from sagin_channel import fading
from sagin_channel.cli import run
from sagin_channel.fading import ShadowedRicianParams
from sagin_channel.kinematics import normalized_doppler
from sagin_channel.montecarlo import McConfig, estimate_cdf, estimate_outage
from sagin_channel.oracles import bending_length_quad, doppler_finite_difference, ergodic_rate_quad, ground_range_quad
from sagin_channel.performance import (
    PerformanceInputs,
    ergodic_rate,
    goodput_lower_bound,
    log_ber_upper_bound,
    log_goodput_gap,
    outage_probability,
)
from sagin_channel.refraction import (
    GeometryScenario,
    RefractionProfile,
    bending_length_accurate,
    bending_length_simple,
    flat_earth_slant,
    ground_range,
    straight_distance,
    trace_ray,
)
from sagin_channel.scenario import load_scenario

BASE = ShadowedRicianParams(0.1, 0.8, 4)
SEED = 20240601
ANGLES = (5.0, 15.0, 30.0, 60.0, 85.0)
SNR_GRID_DB = np.linspace(0.0, 40.0, 9)


def geom(deg):
    return GeometryScenario(detected_elevation_rad=math.radians(deg))


def test_criterion_1_outage_closed_form_vs_monte_carlo(acceptance):
    start = time.perf_counter()
    cfg = McConfig(trials=1_000_000, master_seed=SEED, stream_count=4)
    worst = 0.0
    for db in np.arange(0.0, 40.0 + 2.5, 5.0):
        lam = 10.0 ** (db / 10.0)
        p = float(outage_probability(PerformanceInputs(lam, BASE)))
        est = estimate_outage(BASE, lam, 0.1, cfg)
        sigma = math.sqrt(p * (1.0 - p) / est.trials)
        worst = max(worst, abs(est.mean - p) / sigma if sigma > 0 else (0.0 if est.mean == p else math.inf))
    elapsed = time.perf_counter() - start
    ok = worst <= 3.0 and elapsed < 60.0
    acceptance(1, ok, f"OP closed form vs MC, worst {worst:.2f} sigma (<= 3), n=1e6, 9 points", elapsed)
    assert ok


def test_criterion_2_ergodic_rate_vs_integral(acceptance):
    start = time.perf_counter()
    worst = 0.0
    for m in (1, 2, 4, 5):
        for k in (0.5, 1.0, 4.0):
            p = ShadowedRicianParams.from_rician_k(k, m)
            for lam in (1.0, 10.0, 100.0):
                inp = PerformanceInputs(lam, p)
                ref = ergodic_rate_quad(inp)
                worst = max(worst, abs(ergodic_rate(inp) - ref) / ref)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and elapsed < 30.0
    acceptance(2, ok, f"ER closed form vs integral, worst rel {worst:.2e} (< 1e-6), 36 points", elapsed)
    assert ok


def test_criterion_3_binomial_identities(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst_i1 = worst_i2 = 0.0
    for m in range(1, 21):
        for b0, om in rng.uniform(1e-3, 5.0, size=(100, 2)):
            p = ShadowedRicianParams(b0, om, m)
            worst_i1 = max(worst_i1, abs(fading.varsigma_total(p) - 1.0))
            closed = fading.mean_power_binomial_closed(p)
            worst_i2 = max(worst_i2, abs(fading.mean_power_binomial_sum(p) / closed - 1.0))
    elapsed = time.perf_counter() - start
    ok = worst_i1 < 1e-12 and worst_i2 < 1e-12
    acceptance(3, ok, f"I1 = 1 worst {worst_i1:.1e}, I2 collapse worst {worst_i2:.1e} (< 1e-12), m=1..20 x 100", elapsed)
    assert ok


def test_criterion_4_refraction_consistency(acceptance):
    start = time.perf_counter()
    vacuum = RefractionProfile(0.0, 7.5)
    air = RefractionProfile(315.0, 7.5)
    worst_vac = 0.0
    worst_rel = 0.0
    min_excess = math.inf
    for deg in ANGLES:
        g = geom(deg)
        d_st = straight_distance(g, ground_range(vacuum, g))
        for length in (bending_length_simple, bending_length_accurate):
            worst_vac = max(worst_vac, abs(length(vacuum, g) - d_st))
        min_excess = min(min_excess, trace_ray(air, g).excess_km)
        for model, length in (("simple", bending_length_simple), ("accurate", bending_length_accurate)):
            ref = bending_length_quad(air, g, model)
            worst_rel = max(worst_rel, abs(length(air, g) - ref) / ref)
        ref_g = ground_range_quad(air, g)
        worst_rel = max(worst_rel, abs(ground_range(air, g) - ref_g) / ref_g)
    elapsed = time.perf_counter() - start
    ok = worst_vac < 2e-6 and min_excess >= 0 and worst_rel < 1e-8
    acceptance(
        4,
        ok,
        f"N0=0 |d_rf - d_st| {worst_vac:.1e} km (< 2e-6); min d_dif {min_excess:.2e} km (>= 0); "
        f"vs adaptive quadrature worst rel {worst_rel:.1e} (< 1e-8)",
        elapsed,
    )
    assert ok


def test_criterion_5_quadrature_convergence(acceptance):
    start = time.perf_counter()
    g = geom(60.0)
    lo = RefractionProfile(315.0, 7.5, quadrature_order=64)
    hi = lo.with_order(128)
    d_rel = abs(bending_length_accurate(lo, g) / bending_length_accurate(hi, g) - 1.0)
    g_rel = abs(ground_range(lo, g) / ground_range(hi, g) - 1.0)
    elapsed = time.perf_counter() - start
    ok = d_rel < 1e-8 and g_rel < 1e-8
    acceptance(5, ok, f"M=64 vs 128: d_rf rel {d_rel:.2e}, G rel {g_rel:.2e} (< 1e-8)", elapsed)
    assert ok


def test_criterion_6_trends(acceptance):
    start = time.perf_counter()
    lams = 10.0 ** (SNR_GRID_DB / 10.0)
    failures = []

    def op(m, lam):
        return outage_probability(PerformanceInputs(lam, ShadowedRicianParams.from_rician_k(4.0, m)))

    for lam in lams:
        if not op(1, lam) > op(2, lam) > op(4, lam) > op(8, lam):
            failures.append(f"OP not ordered in m at lambda={lam:g}")
        er = [ergodic_rate(PerformanceInputs(lam, ShadowedRicianParams.from_rician_k(k, 4))) for k in (0.5, 1.0, 4.0)]
        if not er[0] < er[1] < er[2]:
            failures.append(f"ER not increasing in K at lambda={lam:g}")
        ber = [log_ber_upper_bound(PerformanceInputs(lam, BASE, qam_order=q)) for q in (4, 16, 64)]
        if not ber[0] < ber[1] < ber[2]:
            failures.append(f"BER bound not increasing in M at lambda={lam:g}")
        # ER - GP = ER * bound; once 1 - bound rounds to 1 the gap is only visible in log form.
        inp = PerformanceInputs(lam, BASE)
        if not (goodput_lower_bound(inp) <= ergodic_rate(inp) and math.isfinite(log_goodput_gap(inp))):
            failures.append(f"GP not below ER at lambda={lam:g}")
    gaps = [log_goodput_gap(PerformanceInputs(lam, BASE)) for lam in lams]
    if not all(b < a for a, b in zip(gaps, gaps[1:])):
        failures.append("ER - GP gap not closing")
    air = RefractionProfile(315.0, 7.5)
    angles = np.linspace(85.0, 5.0, 9)
    err = []
    for deg in angles:
        g = geom(deg)
        d_st = trace_ray(air, g).straight_length_km
        err.append(abs(flat_earth_slant(g) - d_st) / d_st)
    if not all(b > a for a, b in zip(err, err[1:])):
        failures.append("flat-Earth error not growing toward the horizon")
    elapsed = time.perf_counter() - start
    ok = not failures
    detail = "OP in m, ER in K, BER in M, GP < ER with closing gap, flat-Earth divergence on 9-point grids"
    acceptance(6, ok, detail + ("" if ok else "; " + "; ".join(failures)), elapsed)
    assert ok, failures


def test_criterion_7_doppler(acceptance):
    start = time.perf_counter()
    s = load_scenario()
    earth, sat, pg = s.earth(), s.satellite(), s.pass_geometry()
    zero = float(normalized_doppler(earth, sat, pg, pg.epoch_s))
    deltas = np.arange(1.0, 301.0)
    anti = float(np.max(np.abs(normalized_doppler(earth, sat, pg, pg.epoch_s + deltas)
                               + normalized_doppler(earth, sat, pg, pg.epoch_s - deltas))))
    t = np.concatenate([-deltas[::-1], deltas]) + pg.epoch_s
    an = normalized_doppler(earth, sat, pg, t)
    fd = doppler_finite_difference(earth, sat, pg, t)
    rel = float(np.max(np.abs(an - fd) / np.abs(fd)))
    elapsed = time.perf_counter() - start
    ok = zero == 0.0 and anti < 1e-15 and rel < 1e-6
    acceptance(7, ok, f"Doppler zero {zero + 0.0:g}, antisymmetry {anti:.1e} (< 1e-15), finite difference rel {rel:.1e} (< 1e-6)",
               elapsed)
    assert ok


def test_criterion_8_sampler_cdf(acceptance):
    start = time.perf_counter()
    probs = (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99)
    points = [optimize.brentq(lambda x, q=q: float(fading.cdf_power(BASE, x)) - q, 0.0, 50.0, xtol=1e-14) for q in probs]
    cfg = McConfig(trials=1_000_000, master_seed=SEED, stream_count=4)
    worst = 0.0
    for x, est in zip(points, estimate_cdf(BASE, points, cfg)):
        f = float(fading.cdf_power(BASE, x))
        worst = max(worst, abs(est.mean - f) / math.sqrt(f * (1.0 - f) / est.trials))
    elapsed = time.perf_counter() - start
    ok = worst <= 3.0
    acceptance(8, ok, f"sampler empirical CDF at 8 quantiles, worst {worst:.2f} sigma (<= 3), n=1e6", elapsed)
    assert ok


def test_criterion_9_validate_command(acceptance):
    start = time.perf_counter()
    out, err = io.StringIO(), io.StringIO()
    code = run(["validate"], out, err)
    elapsed = time.perf_counter() - start
    ok = code == 0 and elapsed < 180.0
    acceptance(9, ok, f"validate on shipped baseline exits {code} (0); {err.getvalue().strip()}", elapsed)
    assert ok

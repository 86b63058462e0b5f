"""Independent reference computations used to check the closed forms.

Each oracle takes a different numerical route from the code it checks:
adaptive quadrature instead of fixed Chebyshev-Gauss sums, direct
integration of the outage curve instead of special functions, plane
geometry instead of ray tracing, and finite differences of the slant range
instead of the analytic Doppler derivative.
"""

import math

import numpy as np
from scipy.integrate import quad

from . import fading, performance
from .kinematics import SPEED_OF_LIGHT_KM_S, slant_range

_QUAD = dict(epsabs=0.0, epsrel=1e-13, limit=500)


def _height_breakpoints(profile, geom):
    h0 = profile.scale_height_km
    pts = [h0 * c for c in (0.1, 0.5, 1.0, 3.0, 10.0)]
    return [p for p in pts if 0.0 < p < geom.altitude_km]


def bending_length_quad(profile, geom, model="accurate"):
    """Adaptive quadrature of the bent-ray length integrand over [0, H]."""
    r, rho0, k = geom.earth_radius_km, profile.rho0, profile.decay_rate_per_km
    n0cos = profile.surface_index * math.cos(geom.detected_elevation_rad)

    if model == "simple":

        def integrand(h):
            n = 1.0 + rho0 * math.exp(-k * h)
            ratio = n0cos / (n * (1.0 + h / r))
            return n / math.sqrt(1.0 - ratio * ratio)

    else:

        def integrand(h):
            n = 1.0 + rho0 * math.exp(-k * h)
            x = n * (1.0 + h / r)
            return n * x / math.sqrt(x * x - n0cos * n0cos)

    return quad(integrand, 0.0, geom.altitude_km, points=_height_breakpoints(profile, geom), **_QUAD)[0]


def ground_range_quad(profile, geom):
    """Adaptive quadrature of the ground-range integrand over [0, H]."""
    r, rho0, k = geom.earth_radius_km, profile.rho0, profile.decay_rate_per_km
    n0cos = profile.surface_index * math.cos(geom.detected_elevation_rad)

    def integrand(h):
        x = (1.0 + rho0 * math.exp(-k * h)) * (1.0 + h / r)
        return n0cos / ((1.0 + h / r) * math.sqrt(x * x - n0cos * n0cos))

    return quad(integrand, 0.0, geom.altitude_km, points=_height_breakpoints(profile, geom), **_QUAD)[0]


def vacuum_ray(geom):
    """Straight-ray geometry with no atmosphere: (ground range, slant range).

    The user sits at radius R, the satellite at R + H, and the ray leaves the
    ground at the detected elevation.
    """
    r, h, el = geom.earth_radius_km, geom.altitude_km, geom.detected_elevation_rad
    central = math.acos(r * math.cos(el) / (r + h)) - el
    slant = math.sqrt((r + h) ** 2 - (r * math.cos(el)) ** 2) - r * math.sin(el)
    return r * central, slant


def chord_length(earth_radius_km, altitude_km, ground_range_km):
    """Distance between (R, 0) and (R + H) at central angle G / R, from Cartesian points."""
    phi = ground_range_km / earth_radius_km
    user = np.array([earth_radius_km, 0.0])
    sat = (earth_radius_km + altitude_km) * np.array([math.cos(phi), math.sin(phi)])
    return float(np.hypot(*(sat - user)))


def doppler_finite_difference(earth, sat, pass_geom, t, step=1e-3):
    """-ds/dt / c by central differences of the slant range."""
    t = np.asarray(t, dtype=float)
    ds = (np.asarray(slant_range(earth, sat, pass_geom, t + step)) - np.asarray(slant_range(earth, sat, pass_geom, t - step))) / (
        2.0 * step
    )
    return -ds / SPEED_OF_LIGHT_KM_S


def ergodic_rate_quad(inputs):
    """(1/ln 2) int_0^inf (1 - P_out(g)) / (1 + g) dg by adaptive quadrature.

    Works in the normalised variable x = g / lambda_t. The integration range
    ends where the fading survival drops below 1e-18; the remainder is added
    from a quadrature over the infinite tail.
    """
    params = inputs.fading
    lam = inputs.lambda_t
    e = params.e_st

    def integrand(x):
        return float(fading.survival_power(params, x)) * lam / (1.0 + lam * x)

    x_end = 1.0 / e
    while float(fading.survival_power(params, x_end)) > 1e-18:
        x_end *= 2.0
    pts = {x_end}
    for c in (1.0, 10.0, 100.0, 1000.0):
        pts.add(c / lam)
    j = 0.25
    while j / e < x_end:
        pts.add(j / e)
        j *= 2.0
    edges = [0.0] + sorted(p for p in pts if 0.0 < p <= x_end)
    total = math.fsum(quad(integrand, a, b, **_QUAD)[0] for a, b in zip(edges[:-1], edges[1:]))
    tail = quad(integrand, x_end, np.inf, epsabs=1e-300, epsrel=1e-10, limit=200)[0]
    return (total + tail) / math.log(2.0)


def _pam_gray_levels(side):
    idx = np.arange(side)
    return idx ^ (idx >> 1)


def qam_ber_monte_carlo(rng, snr_scale, qam_order, trials, fading_params=None, chunk=1 << 18):
    """Bit error rate of Gray-mapped square M-QAM with coherent detection.

    Each symbol sees SNR ``snr_scale * |h|^2`` with |h|^2 drawn from
    ``fading_params`` (or 1 when None, an AWGN channel) and perfect channel
    knowledge at the receiver.

    Returns:
        (ber, std_error) over ``trials`` symbols.
    """
    side = math.isqrt(qam_order)
    bits_per_dim = side.bit_length() - 1
    gray = _pam_gray_levels(side)
    es = 2.0 * (qam_order - 1) / 3.0
    errors_sum = 0.0
    errors_sq = 0.0
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        gain2 = snr_scale * (fading.sample_power(fading_params, rng, n) if fading_params is not None else np.ones(n))
        amp = np.sqrt(gain2 / es)
        bit_errors = np.zeros(n)
        for _dim in range(2):
            tx = rng.integers(0, side, n)
            level = 2.0 * tx - (side - 1)
            noise = rng.standard_normal(n) * math.sqrt(0.5)
            y = amp * level + noise
            with np.errstate(divide="ignore", invalid="ignore"):
                est = np.where(amp > 0, y / amp, 0.0)
            rx = np.clip(np.rint((est + side - 1) / 2.0), 0, side - 1).astype(np.int64)
            diff = gray[tx] ^ gray[rx]
            for b in range(bits_per_dim):
                bit_errors += (diff >> b) & 1
        per_symbol = bit_errors / (2 * bits_per_dim)
        errors_sum += float(per_symbol.sum())
        errors_sq += float((per_symbol * per_symbol).sum())
        done += n
    mean = errors_sum / trials
    var = max(errors_sq / trials - mean * mean, 0.0)
    return mean, math.sqrt(var / trials)


def ber_bound_holds(inputs, rng, trials=200_000, fading_params=None):
    """Compare the BER bound with a simulated modem at the same operating point."""
    bound = performance.ber_upper_bound(inputs).value
    scale = inputs.lambda_t if fading_params is not None else performance.mean_snr(inputs)
    ber, se = qam_ber_monte_carlo(rng, scale, inputs.qam_order, trials, fading_params)
    return bound, ber, se

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sagin_channel.errors import DomainError, InvalidArgumentError
from sagin_channel.oracles import bending_length_quad, chord_length, ground_range_quad, vacuum_ray
from sagin_channel.refraction import (
    DEFAULT_QUADRATURE_ORDER,
    GeometryScenario,
    RefractionProfile,
    bending_length_accurate,
    bending_length_simple,
    chebyshev_gauss_nodes,
    flat_earth_slant,
    ground_range,
    refraction_excess,
    refractive_index,
    straight_distance,
    trace_ray,
    true_elevation,
)

VACUUM = RefractionProfile(0.0, 7.5)
BASE = RefractionProfile(315.0, 7.5)


def geom(deg, **kw):
    return GeometryScenario(detected_elevation_rad=math.radians(deg), **kw)


# ---------------------------------------------------------------- profile


def test_surface_index():
    assert refractive_index(BASE, 0.0) == pytest.approx(1.000315, abs=1e-15)
    assert BASE.surface_index == pytest.approx(1.000315, abs=1e-15)


def test_vacuum_index_is_one():
    assert np.all(refractive_index(VACUUM, np.linspace(0, 300, 7)) == 1.0)


def test_index_at_one_scale_height():
    assert refractive_index(BASE, 7.5) == pytest.approx(1 + 315e-6 / math.e, rel=1e-15)
    assert refractive_index(BASE, 7.5) == pytest.approx(1.00011588, abs=1e-8)


@given(st.floats(0.0, 100.0), st.floats(1e-2, 50.0))
def test_index_strictly_decreasing(h, dh):
    assert refractive_index(BASE, h + dh) < refractive_index(BASE, h)


def test_index_rejects_negative_altitude():
    with pytest.raises(InvalidArgumentError):
        refractive_index(BASE, -1.0)


def test_general_parameterisation():
    p = RefractionProfile.from_general(315e-6, 1 / 7.5)
    assert p.rho0 == pytest.approx(BASE.rho0, rel=1e-15)
    assert p.decay_rate_per_km == pytest.approx(BASE.decay_rate_per_km, rel=1e-15)
    assert BASE.rho0 == 315.0 * 1e-6
    assert BASE.decay_rate_per_km == 1.0 / 7.5


def test_profile_invariants():
    with pytest.raises(InvalidArgumentError):
        RefractionProfile(-1.0, 7.5)
    with pytest.raises(InvalidArgumentError):
        RefractionProfile(315.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        RefractionProfile(315.0, 7.5, quadrature_order=4)


# ---------------------------------------------------------------- Chebyshev-Gauss nodes


def test_nodes_order_one():
    x, w = chebyshev_gauss_nodes(1)
    assert x[0] == pytest.approx(0.0, abs=1e-16)
    assert w[0] == math.pi


def test_nodes_order_two():
    x, w = chebyshev_gauss_nodes(2)
    assert x == pytest.approx([math.sqrt(2) / 2, -math.sqrt(2) / 2], abs=1e-15)
    assert list(w) == [math.pi / 2, math.pi / 2]


@given(st.integers(1, 512))
def test_nodes_decreasing_inside_interval(m):
    x, w = chebyshev_gauss_nodes(m)
    assert len(x) == m
    assert np.all(np.diff(x) < 0)
    assert np.all(np.abs(x) < 1)
    assert np.all(w == math.pi / m)


def test_nodes_are_read_only():
    x, _ = chebyshev_gauss_nodes(8)
    with pytest.raises(ValueError):
        x[0] = 0.0


def test_weight_removed_sum_recovers_interval_length_at_order_64():
    # sum w_i sqrt(1 - x_i^2) approximates int_{-1}^{1} dx = 2.
    x, w = chebyshev_gauss_nodes(64)
    assert abs(float(np.sum(w * np.sqrt(1 - x * x))) - 2.0) < 1e-10


def test_weight_removed_sum_converges_quadratically():
    errs = []
    for m in (64, 128, 256):
        x, w = chebyshev_gauss_nodes(m)
        errs.append(abs(float(np.sum(w * np.sqrt(1 - x * x))) - 2.0))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=1e-3)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=1e-3)


# ---------------------------------------------------------------- bending length


@pytest.mark.parametrize("length", [bending_length_simple, bending_length_accurate])
def test_vertical_vacuum_ray_is_altitude(length):
    assert length(VACUUM, geom(90.0)) == pytest.approx(300.0, abs=1e-6)


@pytest.mark.parametrize("model", ["simple", "accurate"])
def test_baseline_matches_adaptive_quadrature(model):
    g = geom(60.0)
    got = bending_length_simple(BASE, g) if model == "simple" else bending_length_accurate(BASE, g)
    assert got == pytest.approx(bending_length_quad(BASE, g, model), rel=1e-8)


def test_baseline_frozen_value():
    # Adaptive-quadrature value of the bent-ray length at the baseline.
    ref = bending_length_quad(BASE, geom(60.0), "accurate")
    assert ref == pytest.approx(343.8875263, abs=1e-6)
    assert bending_length_accurate(BASE, geom(60.0)) == pytest.approx(ref, rel=1e-9)


def test_models_agree_at_high_elevation():
    g = geom(60.0)
    assert bending_length_accurate(BASE, g) == pytest.approx(bending_length_simple(BASE, g), rel=1e-4)


def test_bending_length_non_increasing_in_elevation():
    lengths = [bending_length_accurate(BASE, geom(d)) for d in np.linspace(5.0, 90.0, 35)]
    assert all(b <= a for a, b in zip(lengths, lengths[1:]))


@given(st.floats(2.0, 90.0))
def test_bending_length_at_least_altitude(deg):
    assert bending_length_accurate(BASE, geom(deg)) >= 300.0


def test_accurate_model_needs_one_and_a_half_degrees():
    with pytest.raises(InvalidArgumentError, match="1.5"):
        bending_length_accurate(BASE, geom(1.0))
    with pytest.raises(InvalidArgumentError):
        ground_range(BASE, geom(1.4))
    bending_length_accurate(BASE, geom(1.5))


def test_non_positive_radicand_names_the_node():
    # A steep, dense profile makes n(h)(1 + h/R) fall with height near the ground.
    steep = RefractionProfile.from_general(0.01, 1.0, quadrature_order=256)
    with pytest.raises(DomainError, match="node"):
        bending_length_simple(steep, geom(1.0))
    with pytest.raises(DomainError, match="node"):
        bending_length_accurate(steep, geom(2.0))


# ---------------------------------------------------------------- ground range


def test_zenith_ground_range_is_zero():
    assert ground_range(BASE, geom(90.0)) == pytest.approx(0.0, abs=1e-6)


def test_ground_range_matches_adaptive_quadrature():
    g = geom(60.0)
    assert ground_range(BASE, g) == pytest.approx(ground_range_quad(BASE, g), rel=1e-8)


def test_vacuum_ground_range_is_geometric_arc():
    g = geom(45.0)
    arc, _ = vacuum_ray(g)
    assert ground_range(VACUUM, g) == pytest.approx(arc, rel=1e-6)


# ---------------------------------------------------------------- straight distance


def test_zenith_chord_is_altitude():
    assert straight_distance(geom(60.0), 0.0) == 300.0


def test_chord_matches_cartesian_points_at_500km():
    g = geom(60.0)
    assert straight_distance(g, 500.0) == pytest.approx(chord_length(6371.393, 300.0, 500.0), rel=1e-13)


@given(st.floats(0.0, 3000.0))
def test_chord_matches_cartesian_points(gr):
    g = geom(60.0)
    assert straight_distance(g, gr) == pytest.approx(chord_length(6371.393, 300.0, gr), rel=1e-12)


@given(st.floats(0.0, 2999.0), st.floats(0.5, 100.0))
def test_chord_strictly_increasing(gr, dg):
    g = geom(60.0)
    assert straight_distance(g, gr + dg) > straight_distance(g, gr)


def test_chord_equals_sine_form():
    g = geom(60.0)
    ray = trace_ray(BASE, g)
    phi = ray.ground_range_km / 6371.393
    assert ray.straight_length_km == pytest.approx(6671.393 * math.sin(phi) / math.cos(ray.true_elevation_rad), rel=1e-12)


# ---------------------------------------------------------------- excess


def test_vacuum_excess_vanishes():
    for model in ("simple", "accurate"):
        ray = trace_ray(VACUUM, geom(60.0), model)
        assert abs(ray.excess_km) < 2e-6


def test_baseline_excess_is_metres():
    ray = trace_ray(BASE, geom(60.0))
    assert 1e-3 < ray.excess_km < 0.1
    assert ray.excess_km == pytest.approx(0.0027271, abs=1e-6)
    assert refraction_excess(ray.bending_length_km, ray.straight_length_km) == ray.excess_km


def test_excess_grows_toward_horizon():
    excess = [trace_ray(BASE, geom(d)).excess_km for d in np.linspace(60.0, 5.0, 12)]
    assert all(b > a for a, b in zip(excess, excess[1:]))


def test_excess_rejects_non_positive():
    with pytest.raises(InvalidArgumentError):
        refraction_excess(0.0, 1.0)


# ---------------------------------------------------------------- true elevation


def test_zenith_true_elevation_both_branches():
    assert true_elevation(geom(80.0), 0.0, 300.0) == pytest.approx(math.pi / 2, abs=1e-15)
    assert true_elevation(geom(30.0), 0.0, 300.0) == pytest.approx(math.pi / 2, abs=1e-7)


def test_baseline_true_elevation_below_detected():
    ray = trace_ray(BASE, geom(60.0))
    assert ray.true_elevation_rad < ray.detected_elevation_rad
    assert math.degrees(ray.true_elevation_rad) == pytest.approx(59.98986, abs=1e-5)
    assert ray.elevation_bending_rad > 0


@given(st.floats(2.0, 89.5))
def test_true_elevation_never_exceeds_detected(deg):
    ray = trace_ray(BASE, geom(deg))
    assert ray.true_elevation_rad <= ray.detected_elevation_rad


@given(st.floats(2.0, 89.0))
def test_vacuum_true_elevation_equals_detected(deg):
    ray = trace_ray(VACUUM, geom(deg))
    assert ray.true_elevation_rad == pytest.approx(math.radians(deg), abs=1e-9)


def test_branches_agree_around_forty_five_degrees():
    for deg in (45.0 - 1e-7, 45.0 + 1e-7):
        g = geom(deg)
        gr = ground_range(BASE, g)
        d_st = straight_distance(g, gr)
        low = true_elevation(geom(30.0), gr, d_st)  # law-of-cosines branch
        high = true_elevation(geom(60.0), gr, d_st)  # law-of-sines branch
        assert low == pytest.approx(high, abs=1e-9)


def test_inconsistent_inputs_raise_domain_error():
    with pytest.raises(DomainError):
        true_elevation(geom(60.0), 3000.0, 10.0)


# ---------------------------------------------------------------- flat Earth


def test_flat_earth_examples():
    assert flat_earth_slant(geom(90.0)) == 300.0
    assert flat_earth_slant(geom(30.0)) == pytest.approx(600.0, rel=1e-14)
    assert flat_earth_slant(geom(60.0)) == pytest.approx(346.410, abs=1e-3)


# ---------------------------------------------------------------- convergence


def test_doubling_default_order_changes_little():
    g = geom(60.0)
    a = trace_ray(BASE, g)
    b = trace_ray(BASE.with_order(2 * DEFAULT_QUADRATURE_ORDER), g)
    assert abs(a.bending_length_km / b.bending_length_km - 1) < 1e-8
    assert abs(a.ground_range_km / b.ground_range_km - 1) < 1e-8


def test_trace_ray_rejects_unknown_model():
    with pytest.raises(InvalidArgumentError):
        trace_ray(BASE, geom(60.0), "fancy")


def test_geometry_invariants():
    with pytest.raises(InvalidArgumentError):
        GeometryScenario(altitude_km=0.0)
    with pytest.raises(InvalidArgumentError):
        GeometryScenario(detected_elevation_rad=0.0)

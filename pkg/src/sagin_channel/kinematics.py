"""Relative motion between a LEO satellite and a user, and the Doppler profile of a pass.

Lengths are in km, speeds in km/s, angles in radians, times in seconds.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidArgumentError

SPEED_OF_LIGHT_KM_S = 299_792.458
SIDEREAL_RATE_RAD_S = 7.2921159e-5


@dataclass(frozen=True)
class EarthModel:
    radius_km: float = 6371.393
    angular_velocity_rad_s: float = SIDEREAL_RATE_RAD_S

    def __post_init__(self):
        if not self.radius_km > 0:
            raise InvalidArgumentError(f"radius_km must be positive, got {self.radius_km}")
        if self.angular_velocity_rad_s < 0:
            raise InvalidArgumentError("angular_velocity_rad_s must be non-negative")


@dataclass(frozen=True)
class SatelliteState:
    altitude_km: float
    speed_km_s: float
    inclination_rad: float = 0.0

    def __post_init__(self):
        if not self.altitude_km > 0:
            raise InvalidArgumentError(f"altitude_km must be positive, got {self.altitude_km}")
        if not self.speed_km_s > 0:
            raise InvalidArgumentError(f"speed_km_s must be positive, got {self.speed_km_s}")
        if not 0.0 <= self.inclination_rad <= math.pi:
            raise InvalidArgumentError("inclination_rad must lie in [0, pi]")

    def orbit_radius_km(self, earth):
        """Distance from the Earth's centre to the satellite, R + H."""
        return earth.radius_km + self.altitude_km


class UserKind(str, Enum):
    TERRESTRIAL = "terrestrial"
    AIRBORNE = "airborne"


@dataclass(frozen=True)
class UserKinematics:
    """A ground or airborne user.

    ``latitude_rad`` is only read for terrestrial users; ``airborne_speed_km_s``
    and ``heading_angle_rad`` (angle between the aircraft and satellite
    velocity vectors) only for airborne ones.
    """

    kind: UserKind = UserKind.TERRESTRIAL
    latitude_rad: float = 0.0
    airborne_speed_km_s: float = 0.0
    heading_angle_rad: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", UserKind(self.kind))
        if abs(self.latitude_rad) > math.pi / 2:
            raise InvalidArgumentError("latitude_rad must lie in [-pi/2, pi/2]")
        if self.airborne_speed_km_s < 0:
            raise InvalidArgumentError("airborne_speed_km_s must be non-negative")


@dataclass(frozen=True)
class PassGeometry:
    max_elevation_rad: float
    relative_angular_velocity_rad_s: float
    epoch_s: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.max_elevation_rad <= math.pi / 2:
            raise InvalidArgumentError("max_elevation_rad must lie in (0, pi/2]")
        if not self.relative_angular_velocity_rad_s > 0:
            raise InvalidArgumentError("relative_angular_velocity_rad_s must be positive")


def relative_speed_airborne(sat, user):
    """Speed of the satellite relative to an aircraft (law of cosines on the two velocities)."""
    if user.kind is not UserKind.AIRBORNE:
        raise InvalidArgumentError("relative_speed_airborne needs an airborne user")
    vs, va = sat.speed_km_s, user.airborne_speed_km_s
    sq = vs * vs + va * va - 2.0 * vs * va * math.cos(user.heading_angle_rad)
    return math.sqrt(max(sq, 0.0))


def relative_speed_terrestrial(earth, sat, user):
    """Speed of the satellite relative to a ground user carried by Earth rotation."""
    if user.kind is not UserKind.TERRESTRIAL:
        raise InvalidArgumentError("relative_speed_terrestrial needs a terrestrial user")
    vs = sat.speed_km_s
    ground = earth.radius_km * earth.angular_velocity_rad_s * math.cos(user.latitude_rad)
    sq = vs * vs + ground * ground - 2.0 * vs * ground * math.cos(sat.inclination_rad)
    return math.sqrt(max(sq, 0.0))


def relative_speed(earth, sat, user):
    if user.kind is UserKind.AIRBORNE:
        return relative_speed_airborne(sat, user)
    return relative_speed_terrestrial(earth, sat, user)


def relative_angular_velocity(earth, sat, rel_speed):
    """Angular rate of the satellite as seen from the Earth's centre, |v_rel| / (R + H)."""
    if not rel_speed > 0:
        raise InvalidArgumentError(f"rel_speed must be positive, got {rel_speed}")
    return rel_speed / sat.orbit_radius_km(earth)


def closest_approach_angle(earth, sat, max_elevation_rad):
    """Earth-central angle between the user and the satellite at closest approach.

    Solves cos(theta_max + gamma) = R cos(theta_max) / (R + H) for gamma.
    """
    h_os = sat.orbit_radius_km(earth)
    return math.acos(earth.radius_km * math.cos(max_elevation_rad) / h_os) - max_elevation_rad


def slant_range(earth, sat, pass_geom, t):
    """Satellite-user distance during the pass, in km. Accepts scalar or array ``t``."""
    r = earth.radius_km
    h_os = sat.orbit_radius_km(earth)
    cos_g0 = math.cos(closest_approach_angle(earth, sat, pass_geom.max_elevation_rad))
    psi = pass_geom.relative_angular_velocity_rad_s * (np.asarray(t, dtype=float) - pass_geom.epoch_s)
    s = np.sqrt(r * r + h_os * h_os - 2.0 * r * h_os * np.cos(psi) * cos_g0)
    return s if s.ndim else float(s)


def normalized_doppler(earth, sat, pass_geom, t):
    """Doppler shift over carrier frequency, -ds/dt / c, at time(s) ``t``.

    The pass angle grows linearly from the epoch of closest approach at the
    relative angular velocity. The result is zero at the epoch and odd about it.
    """
    r = earth.radius_km
    h_os = sat.orbit_radius_km(earth)
    omega = pass_geom.relative_angular_velocity_rad_s
    cos_g0 = math.cos(closest_approach_angle(earth, sat, pass_geom.max_elevation_rad))
    psi = omega * (np.asarray(t, dtype=float) - pass_geom.epoch_s)
    num = r * h_os * np.sin(psi) * cos_g0 * omega
    den = np.sqrt(r * r + h_os * h_os - 2.0 * r * h_os * np.cos(psi) * cos_g0)
    ratio = -num / den / SPEED_OF_LIGHT_KM_S
    return ratio if ratio.ndim else float(ratio)


def doppler_bound(earth, sat, pass_geom):
    """Upper bound omega * (R + H) / c on |normalized_doppler|."""
    return pass_geom.relative_angular_velocity_rad_s * sat.orbit_radius_km(earth) / SPEED_OF_LIGHT_KM_S


def doppler_series(earth, sat, pass_geom, t_start, t_end, step):
    """Sample the normalized Doppler on ``t_start, t_start + step, ...`` up to ``t_end``.

    Returns:
        (times, ratios) as two float arrays.
    """
    if not t_start < t_end:
        raise InvalidArgumentError(f"empty time range [{t_start}, {t_end}]")
    if not step > 0:
        raise InvalidArgumentError(f"step must be positive, got {step}")
    count = int(math.floor((t_end - t_start) / step + 1e-9)) + 1
    times = t_start + step * np.arange(count)
    return times, np.asarray(normalized_doppler(earth, sat, pass_geom, times))

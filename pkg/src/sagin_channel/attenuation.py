"""Power-domain loss factors: free-space path loss, molecular absorption, rain, fog and clouds.

Every factor is a linear multiplier on received power in (0, 1]. Decibel
inputs are converted at the configuration boundary; nothing here takes dBm.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidArgumentError

SPEED_OF_LIGHT_M_S = 299_792_458.0
COEFFICIENT_COLUMNS = ("frequency_GHz", "K_R_h", "alpha_R_h", "K_L")
DEFAULT_COEFFICIENT_TABLE = Path(__file__).parent / "data" / "coefficients.tsv"


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(value):
    return 10.0 * math.log10(value)


def dbm_to_watt(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(watt):
    return 10.0 * math.log10(watt) + 30.0


def noise_power_dbm(bandwidth_hz, density_dbm_hz=-170.0):
    """Thermal noise power over ``bandwidth_hz`` for a given noise density."""
    if not bandwidth_hz > 0:
        raise InvalidArgumentError("bandwidth must be positive")
    return density_dbm_hz + 10.0 * math.log10(bandwidth_hz)


@dataclass(frozen=True)
class CarrierSpec:
    frequency_hz: float
    path_loss_exponent: float = 2.0
    speed_of_light_m_s: float = SPEED_OF_LIGHT_M_S

    def __post_init__(self):
        if not self.frequency_hz > 0:
            raise InvalidArgumentError("frequency_hz must be positive")
        if not self.path_loss_exponent >= 2:
            raise InvalidArgumentError("path_loss_exponent must be >= 2")

    @property
    def frequency_ghz(self):
        return self.frequency_hz / 1e9


@dataclass(frozen=True)
class AbsorbingSpecies:
    name: str
    coefficient_per_m: float

    def __post_init__(self):
        if self.coefficient_per_m < 0:
            raise InvalidArgumentError(f"absorption coefficient of {self.name} must be >= 0")


@dataclass(frozen=True)
class AbsorptionSpec:
    species: tuple = ()
    path_length_m: float = 0.0
    frequency_hz: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        if self.path_length_m < 0:
            raise InvalidArgumentError("path_length_m must be >= 0")


@dataclass(frozen=True)
class RainSpec:
    k_r: float = 0.0
    alpha_r: float = 1.0
    rate_mm_h: float = 0.0
    path_km: float = 0.0


@dataclass(frozen=True)
class FogSpec:
    k_l: float = 0.0
    density_g_m3: float = 0.0
    path_km: float = 0.0


@dataclass(frozen=True)
class CloudLayer:
    columnar_water: float
    k_l: float


@dataclass(frozen=True)
class WeatherConditions:
    """Rain, fog and cloud state along the link.

    ``true_elevation_rad`` is the geometric elevation shared by all cloud
    layers; it is only needed when clouds are present.
    """

    rain: RainSpec = field(default_factory=RainSpec)
    fog: FogSpec = field(default_factory=FogSpec)
    clouds: tuple = ()
    true_elevation_rad: float = math.pi / 2

    def __post_init__(self):
        object.__setattr__(self, "clouds", tuple(self.clouds))
        values = {
            "rain.k_r": self.rain.k_r,
            "rain.alpha_r": self.rain.alpha_r,
            "rain.rate_mm_h": self.rain.rate_mm_h,
            "rain.path_km": self.rain.path_km,
            "fog.k_l": self.fog.k_l,
            "fog.density_g_m3": self.fog.density_g_m3,
            "fog.path_km": self.fog.path_km,
        }
        for i, cloud in enumerate(self.clouds):
            values[f"clouds[{i}].columnar_water"] = cloud.columnar_water
            values[f"clouds[{i}].k_l"] = cloud.k_l
        for key, value in values.items():
            if not value >= 0:
                raise InvalidArgumentError(f"{key} must be non-negative, got {value}")


def path_loss(carrier, distance_m):
    """Free-space power factor (c / (4 pi f_c))^2 d^-alpha for a distance in metres."""
    if not distance_m > 0:
        raise InvalidArgumentError("distance must be positive")
    wavelength_term = carrier.speed_of_light_m_s / (4.0 * math.pi * carrier.frequency_hz)
    return wavelength_term**2 * distance_m ** (-carrier.path_loss_exponent)


def molecular_absorption(spec):
    """Beer-Lambert transmittance exp(-sum_i kappa_i r) over the absorbing path."""
    total = sum(s.coefficient_per_m for s in spec.species)
    return math.exp(-total * spec.path_length_m)


def rain_specific_attenuation(weather):
    """gamma_R = K_R R^alpha_R in dB/km."""
    rain = weather.rain
    if rain.rate_mm_h == 0:
        return 0.0
    return rain.k_r * rain.rate_mm_h**rain.alpha_r


def fog_specific_attenuation(weather):
    """gamma_F = K_L M in dB/km."""
    return weather.fog.k_l * weather.fog.density_g_m3


def cloud_attenuations_db(weather):
    """Per-layer cloud loss L_W K_L / sin(theta_e) in dB."""
    if not weather.clouds:
        return []
    sin_e = math.sin(weather.true_elevation_rad)
    if not sin_e > 0:
        raise InvalidArgumentError("cloud attenuation needs a positive true elevation")
    return [c.columnar_water * c.k_l / sin_e for c in weather.clouds]


def rain_factor(weather):
    return 10.0 ** (-rain_specific_attenuation(weather) * weather.rain.path_km / 10.0)


def fog_factor(weather):
    return 10.0 ** (-fog_specific_attenuation(weather) * weather.fog.path_km / 10.0)


def clouds_factor(weather):
    return 1.0 / math.prod(10.0 ** (g / 10.0) for g in cloud_attenuations_db(weather))


def compose_link_budget(tx_power_w, noise_power_w, *factors):
    """Mean-SNR scale lambda_t = P_s * prod(factors) / sigma^2.

    Factors are multiplied in ascending order so the result does not depend
    on the order they are passed in.
    """
    if not (tx_power_w > 0 and noise_power_w > 0):
        raise InvalidArgumentError("transmit and noise power must be positive")
    for f in factors:
        if not 0 < f <= 1:
            raise InvalidArgumentError(f"loss factor {f!r} outside (0, 1]")
    return tx_power_w * math.prod(sorted(factors)) / noise_power_w


def itu_p838_coefficients(frequency_ghz):
    """Horizontal-polarisation rain coefficients (k_H, alpha_H) from the ITU-R P.838-3 regression."""
    lf = math.log10(frequency_ghz)
    ka = (-5.33980, -0.35351, -0.23789, -0.94158)
    kb = (-0.10008, 1.26970, 0.86036, 0.64552)
    kc = (1.13098, 0.45400, 0.15354, 0.16817)
    aa = (-0.14318, 0.29591, 0.32177, -5.37610, 16.1721)
    ab = (1.82442, 0.77564, 0.63773, -0.96230, -3.29980)
    ac = (-0.55187, 0.19822, 0.13164, 1.47828, 3.43990)
    log_k = sum(a * math.exp(-(((lf - b) / c) ** 2)) for a, b, c in zip(ka, kb, kc))
    log_k += -0.18961 * lf + 0.71147
    alpha = sum(a * math.exp(-(((lf - b) / c) ** 2)) for a, b, c in zip(aa, ab, ac))
    alpha += 0.67849 * lf - 1.95537
    return 10.0**log_k, alpha


def itu_p840_liquid_coefficient(frequency_ghz, temperature_c=0.0):
    """Cloud/fog liquid-water coefficient K_L in (dB/km)/(g/m^3), ITU-R P.840 double-Debye model."""
    theta = 300.0 / (temperature_c + 273.15)
    eps0 = 77.66 + 103.3 * (theta - 1.0)
    eps1 = 0.0671 * eps0
    eps2 = 3.52
    fp = 20.20 - 146.0 * (theta - 1.0) + 316.0 * (theta - 1.0) ** 2
    fs = 39.8 * fp
    f = frequency_ghz
    eps_re = (eps0 - eps1) / (1 + (f / fp) ** 2) + (eps1 - eps2) / (1 + (f / fs) ** 2) + eps2
    eps_im = f * (eps0 - eps1) / (fp * (1 + (f / fp) ** 2)) + f * (eps1 - eps2) / (fs * (1 + (f / fs) ** 2))
    eta = (2.0 + eps_re) / eps_im
    return 0.819 * f / (eps_im * (1.0 + eta**2))


@dataclass(frozen=True)
class CoefficientRow:
    frequency_ghz: float
    k_r: float
    alpha_r: float
    k_l: float


class CoefficientTable:
    """Rain and liquid-water coefficients tabulated against frequency.

    The file is whitespace-separated text. Lines starting with ``#`` are
    comments; the first other line must name the columns
    ``frequency_GHz K_R_h alpha_R_h K_L``.
    """

    def __init__(self, rows, source=None):
        self.rows = sorted(rows, key=lambda r: r.frequency_ghz)
        self.source = source
        if not self.rows:
            raise ConfigError("coefficient table is empty", source=source)

    @classmethod
    def load(cls, path=DEFAULT_COEFFICIENT_TABLE):
        path = Path(path)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise ConfigError(f"cannot read coefficient table: {exc}", source=path) from exc
        rows = []
        header_seen = False
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if not header_seen:
                if tuple(fields) != COEFFICIENT_COLUMNS:
                    raise ConfigError(
                        f"expected header {' '.join(COEFFICIENT_COLUMNS)!r}, got {line!r}", source=path, line=lineno
                    )
                header_seen = True
                continue
            if len(fields) != len(COEFFICIENT_COLUMNS):
                raise ConfigError(f"expected {len(COEFFICIENT_COLUMNS)} columns, got {len(fields)}", source=path, line=lineno)
            try:
                f, k_r, a_r, k_l = (float(v) for v in fields)
            except ValueError as exc:
                raise ConfigError(f"non-numeric value: {exc}", source=path, line=lineno) from exc
            if not (f > 0 and k_r >= 0 and a_r > 0 and k_l >= 0):
                raise ConfigError("coefficients must be positive (K values may be zero)", source=path, line=lineno)
            rows.append(CoefficientRow(f, k_r, a_r, k_l))
        if not header_seen:
            raise ConfigError("missing column header", source=path)
        return cls(rows, source=path)

    def lookup(self, frequency_ghz):
        """Coefficients at ``frequency_ghz``.

        Between tabulated frequencies, K_R and K_L are interpolated linearly
        in log-log space and alpha_R linearly in log frequency.
        """
        freqs = np.array([r.frequency_ghz for r in self.rows])
        if not freqs[0] <= frequency_ghz <= freqs[-1]:
            raise InvalidArgumentError(
                f"{frequency_ghz} GHz outside the coefficient table range [{freqs[0]}, {freqs[-1]}] GHz"
            )
        for row in self.rows:
            if math.isclose(row.frequency_ghz, frequency_ghz, rel_tol=1e-12):
                return row
        lf = math.log(frequency_ghz)
        lfs = np.log(freqs)

        def loglog(values):
            vals = np.array(values)
            if np.any(vals <= 0):
                return float(np.interp(lf, lfs, vals))
            return float(np.exp(np.interp(lf, lfs, np.log(vals))))

        return CoefficientRow(
            frequency_ghz,
            loglog([r.k_r for r in self.rows]),
            float(np.interp(lf, lfs, [r.alpha_r for r in self.rows])),
            loglog([r.k_l for r in self.rows]),
        )

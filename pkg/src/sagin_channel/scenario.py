"""Scenario files: a YAML key/value tree describing one link, validated at load.

Angles are written in degrees, powers in dBm and frequencies in GHz, as
link budgets are usually written. They are converted to radians, watts and
hertz once, here; the numerical modules never see decibels.

Every key is optional and falls back to the baseline value. Unknown keys,
wrong types and values that break a model invariant raise
:class:`ConfigError` carrying the file, line and dotted key path.
"""

import dataclasses
import math
import typing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import attenuation, fading, kinematics, performance, refraction
from .errors import ConfigError, SaginError

BASELINE_SCENARIO = Path(__file__).parent / "data" / "baseline.scenario"


@dataclass(frozen=True)
class GeometrySection:
    earth_radius_km: float = 6371.393
    altitude_km: float = 300.0
    detected_elevation_deg: float = 60.0
    max_elevation_deg: float = 60.0
    satellite_speed_km_s: float = 7.7297
    inclination_deg: float = 0.0
    earth_rotation_rad_s: float = kinematics.SIDEREAL_RATE_RAD_S


@dataclass(frozen=True)
class UserSection:
    kind: str = "terrestrial"
    latitude_deg: float = 0.0
    airborne_speed_km_s: float = 0.0
    heading_deg: float = 0.0


@dataclass(frozen=True)
class RefractionSection:
    surface_refractivity: float = 315.0
    scale_height_km: float = 7.5
    quadrature_order: int = refraction.DEFAULT_QUADRATURE_ORDER


@dataclass(frozen=True)
class FadingSection:
    b0: float = 0.1
    omega: float = 0.8
    m: int = 4


@dataclass(frozen=True)
class CarrierSection:
    frequency_ghz: float = 2.0
    path_loss_exponent: float = 2.0


@dataclass(frozen=True)
class PowerSection:
    """Transmit and noise power.

    Noise is either given directly (``noise_dbm``) or from a bandwidth and
    noise density. The watt values are filled in at construction.
    """

    transmit_dbm: float = 40.0
    noise_dbm: float | None = -90.0
    bandwidth_hz: float | None = 1e6
    noise_density_dbm_hz: float = -170.0
    transmit_w: float = field(init=False, compare=False, repr=False)
    noise_w: float = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.noise_dbm is not None:
            noise_dbm = self.noise_dbm
        elif self.bandwidth_hz is not None:
            noise_dbm = attenuation.noise_power_dbm(self.bandwidth_hz, self.noise_density_dbm_hz)
        else:
            raise ValueError("give either noise_dbm or bandwidth_hz")
        object.__setattr__(self, "transmit_w", attenuation.dbm_to_watt(self.transmit_dbm))
        object.__setattr__(self, "noise_w", attenuation.dbm_to_watt(noise_dbm))


@dataclass(frozen=True)
class RainSection:
    rate_mm_h: float = 0.0
    path_km: float = 0.0
    k_r: float | None = None
    alpha_r: float | None = None


@dataclass(frozen=True)
class FogSection:
    density_g_m3: float = 0.0
    path_km: float = 0.0
    k_l: float | None = None


@dataclass(frozen=True)
class CloudSection:
    columnar_water: float = 0.0
    k_l: float | None = None


@dataclass(frozen=True)
class SpeciesSection:
    name: str = "gas"
    coefficient_per_m: float = 0.0


@dataclass(frozen=True)
class WeatherSection:
    rain: RainSection = field(default_factory=RainSection)
    fog: FogSection = field(default_factory=FogSection)
    clouds: tuple = ()


@dataclass(frozen=True)
class AbsorptionSection:
    path_length_m: float = 0.0
    species: tuple = ()


@dataclass(frozen=True)
class DopplerSection:
    t_start_s: float = -300.0
    t_end_s: float = 300.0
    step_s: float = 1.0


@dataclass(frozen=True)
class AnalysisSection:
    outage_threshold: float = 0.1
    qam_order: int = 4
    mc_trials: int = 1_000_000
    seed: int = 20_240_601
    stream_count: int = 4
    coefficient_table: str | None = None
    doppler: DopplerSection = field(default_factory=DopplerSection)


@dataclass(frozen=True)
class Scenario:
    geometry: GeometrySection = field(default_factory=GeometrySection)
    user: UserSection = field(default_factory=UserSection)
    refraction: RefractionSection = field(default_factory=RefractionSection)
    fading: FadingSection = field(default_factory=FadingSection)
    carrier: CarrierSection = field(default_factory=CarrierSection)
    power: PowerSection = field(default_factory=PowerSection)
    weather: WeatherSection = field(default_factory=WeatherSection)
    absorption: AbsorptionSection = field(default_factory=AbsorptionSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)
    source: str | None = field(default=None, compare=False, repr=False)

    def earth(self):
        return kinematics.EarthModel(self.geometry.earth_radius_km, self.geometry.earth_rotation_rad_s)

    def satellite(self):
        g = self.geometry
        return kinematics.SatelliteState(g.altitude_km, g.satellite_speed_km_s, math.radians(g.inclination_deg))

    def user_kinematics(self):
        u = self.user
        return kinematics.UserKinematics(
            kinematics.UserKind(u.kind), math.radians(u.latitude_deg), u.airborne_speed_km_s, math.radians(u.heading_deg)
        )

    def pass_geometry(self):
        earth, sat = self.earth(), self.satellite()
        rel = kinematics.relative_speed(earth, sat, self.user_kinematics())
        omega = kinematics.relative_angular_velocity(earth, sat, rel)
        return kinematics.PassGeometry(math.radians(self.geometry.max_elevation_deg), omega)

    def profile(self):
        r = self.refraction
        return refraction.RefractionProfile(r.surface_refractivity, r.scale_height_km, r.quadrature_order)

    def geometry_scenario(self, detected_elevation_deg=None):
        g = self.geometry
        el = g.detected_elevation_deg if detected_elevation_deg is None else detected_elevation_deg
        return refraction.GeometryScenario(g.earth_radius_km, g.altitude_km, math.radians(el))

    def fading_params(self):
        f = self.fading
        return fading.ShadowedRicianParams(f.b0, f.omega, f.m)

    def carrier_spec(self):
        return attenuation.CarrierSpec(self.carrier.frequency_ghz * 1e9, self.carrier.path_loss_exponent)

    def coefficient_table(self):
        path = self.analysis.coefficient_table
        if path is None:
            return attenuation.CoefficientTable.load()
        path = Path(path)
        if not path.is_absolute() and self.source is not None:
            path = Path(self.source).parent / path
        return attenuation.CoefficientTable.load(path)

    def absorption_spec(self):
        a = self.absorption
        species = [attenuation.AbsorbingSpecies(s.name, s.coefficient_per_m) for s in a.species]
        return attenuation.AbsorptionSpec(species, a.path_length_m, self.carrier.frequency_ghz * 1e9)

    def weather_conditions(self, true_elevation_rad=math.pi / 2, table=None):
        """Weather state; coefficients left unset are read from the coefficient table at f_c."""
        w = self.weather
        needs_table = w.rain.k_r is None or w.rain.alpha_r is None or w.fog.k_l is None
        needs_table = needs_table or any(c.k_l is None for c in w.clouds)
        row = None
        if needs_table:
            row = (table or self.coefficient_table()).lookup(self.carrier.frequency_ghz)
        rain = attenuation.RainSpec(
            w.rain.k_r if w.rain.k_r is not None else row.k_r,
            w.rain.alpha_r if w.rain.alpha_r is not None else row.alpha_r,
            w.rain.rate_mm_h,
            w.rain.path_km,
        )
        fog = attenuation.FogSpec(w.fog.k_l if w.fog.k_l is not None else row.k_l, w.fog.density_g_m3, w.fog.path_km)
        clouds = [attenuation.CloudLayer(c.columnar_water, c.k_l if c.k_l is not None else row.k_l) for c in w.clouds]
        return attenuation.WeatherConditions(rain, fog, clouds, true_elevation_rad)


# ---------------------------------------------------------------- link budget


@dataclass(frozen=True)
class LinkBudget:
    """Transmit and noise power with the five loss factors that make up lambda_t."""

    transmit_w: float
    noise_w: float
    path_loss: float
    absorption: float
    rain: float
    fog: float
    clouds: float
    distance_km: float

    @property
    def factors(self):
        return (self.path_loss, self.absorption, self.rain, self.fog, self.clouds)

    @property
    def lambda_t(self):
        return attenuation.compose_link_budget(self.transmit_w, self.noise_w, *self.factors)

    def with_transmit_w(self, transmit_w):
        return dataclasses.replace(self, transmit_w=transmit_w)


def link_budget(scenario, table=None):
    """Compose the budget along the refracted ray at the detected elevation."""
    ray = refraction.trace_ray(scenario.profile(), scenario.geometry_scenario())
    weather = scenario.weather_conditions(ray.true_elevation_rad, table)
    return LinkBudget(
        transmit_w=scenario.power.transmit_w,
        noise_w=scenario.power.noise_w,
        path_loss=attenuation.path_loss(scenario.carrier_spec(), ray.bending_length_km * 1e3),
        absorption=attenuation.molecular_absorption(scenario.absorption_spec()),
        rain=attenuation.rain_factor(weather),
        fog=attenuation.fog_factor(weather),
        clouds=attenuation.clouds_factor(weather),
        distance_km=ray.bending_length_km,
    )


# ---------------------------------------------------------------- loading

_SECTIONS = {
    "geometry": GeometrySection,
    "user": UserSection,
    "refraction": RefractionSection,
    "fading": FadingSection,
    "carrier": CarrierSection,
    "power": PowerSection,
    "weather": WeatherSection,
    "absorption": AbsorptionSection,
    "analysis": AnalysisSection,
}
_NESTED = {
    (WeatherSection, "rain"): RainSection,
    (WeatherSection, "fog"): FogSection,
    (AnalysisSection, "doppler"): DopplerSection,
}
_LISTS = {
    (WeatherSection, "clouds"): CloudSection,
    (AbsorptionSection, "species"): SpeciesSection,
}


def _line_map(node, prefix="", out=None):
    """Map dotted key paths to 1-based source lines."""
    if out is None:
        out = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
            out[path] = key_node.start_mark.line + 1
            _line_map(value_node, path, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            path = f"{prefix}[{i}]"
            out[path] = item.start_mark.line + 1
            _line_map(item, path, out)
    return out


class _Builder:
    def __init__(self, source, lines):
        self.source = source
        self.lines = lines

    def error(self, message, path):
        line = None
        probe = path
        while probe and line is None:
            line = self.lines.get(probe)
            probe = probe.rsplit(".", 1)[0] if "." in probe else ""
        return ConfigError(message, source=self.source, path=path, line=line)

    def scalar(self, value, kind, path):
        if kind is str:
            if not isinstance(value, str):
                raise self.error(f"expected a string, got {value!r}", path)
            return value
        if isinstance(value, str) and kind is float:
            # YAML 1.1 reads exponents without a sign, such as 1.0e6, as text.
            try:
                value = float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(f"expected a number, got {value!r}", path)
        if kind is int:
            if int(value) != value:
                raise self.error(f"expected an integer, got {value!r}", path)
            return int(value)
        if not math.isfinite(value):
            raise self.error(f"expected a finite number, got {value!r}", path)
        return float(value)

    def section(self, cls, data, path):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise self.error(f"expected a mapping, got {type(data).__name__}", path)
        known = {f.name: f for f in dataclasses.fields(cls) if f.init}
        values = {}
        for key, value in data.items():
            sub = f"{path}.{key}" if path else str(key)
            if key not in known:
                raise self.error(f"unknown key {key!r}; expected one of {sorted(known)}", sub)
            if (cls, key) in _NESTED:
                values[key] = self.section(_NESTED[cls, key], value, sub)
            elif (cls, key) in _LISTS:
                if not isinstance(value, list):
                    raise self.error("expected a list", sub)
                values[key] = tuple(self.section(_LISTS[cls, key], item, f"{sub}[{i}]") for i, item in enumerate(value))
            else:
                args = typing.get_args(known[key].type)
                optional = type(None) in args
                kind = next((a for a in args if a is not type(None)), known[key].type)
                if value is None and optional:
                    values[key] = None
                else:
                    values[key] = self.scalar(value, kind, sub)
        try:
            return cls(**values)
        except (SaginError, ValueError) as exc:
            raise self.error(str(exc), _blame(path, str(exc), known)) from exc


def _blame(path, message, keys):
    # Point at the key an invariant message starts with, if any.
    head = message.split(" ", 1)[0]
    return f"{path}.{head}" if head.split(".")[0].split("[")[0] in keys else path


def _get(obj, dotted):
    for part in dotted.split("."):
        obj = getattr(obj, part)
    return obj


def _check_models(scenario, builder):
    # Build each model object once so its own invariants are enforced at load.
    checks = [
        ("geometry", scenario.earth),
        ("geometry", scenario.satellite),
        ("user", scenario.user_kinematics),
        ("geometry.max_elevation_deg", scenario.pass_geometry),
        ("refraction", scenario.profile),
        ("geometry.detected_elevation_deg", scenario.geometry_scenario),
        ("fading", scenario.fading_params),
        ("carrier", scenario.carrier_spec),
        ("absorption", scenario.absorption_spec),
        ("weather", lambda: scenario.weather_conditions(table=None)),
    ]
    for path, build in checks:
        try:
            build()
        except ConfigError:
            raise
        except (SaginError, ValueError) as exc:
            section = getattr(scenario, path.split(".")[0])
            keys = {f.name for f in dataclasses.fields(section)}
            raise builder.error(str(exc), _blame(path, str(exc), keys) if "." not in path else path) from exc
    a = scenario.analysis
    for key, ok in (
        ("outage_threshold", a.outage_threshold > 0),
        ("qam_order", performance.is_square_qam(a.qam_order)),
        ("mc_trials", a.mc_trials >= 1000),
        ("seed", 0 <= a.seed < 2**64),
        ("stream_count", a.stream_count >= 1),
        ("doppler.step_s", a.doppler.step_s > 0 and a.doppler.t_start_s < a.doppler.t_end_s),
    ):
        if not ok:
            raise builder.error(f"value out of range: {_get(a, key)!r}", f"analysis.{key}")


def _set_path(data, dotted, value):
    keys = dotted.split(".")
    node = data
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {dotted!r}: {k!r} is not a mapping", path=dotted)
    node[keys[-1]] = value


def parse_scenario(text, source=None, overrides=()):
    """Build a Scenario from YAML text.

    ``overrides`` is a sequence of ``(dotted.key, value)`` pairs applied on
    top of the file before validation.
    """
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {getattr(exc, 'problem', exc)}", source=source,
                          line=mark.line + 1 if mark else None) from exc
    lines = _line_map(node) if node is not None else {}
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", source=source, line=1)
    for dotted, value in overrides:
        _set_path(data, dotted, value)
    builder = _Builder(source, lines)
    sections = {}
    for key, value in data.items():
        if key not in _SECTIONS:
            raise builder.error(f"unknown section {key!r}; expected one of {sorted(_SECTIONS)}", str(key))
        sections[key] = builder.section(_SECTIONS[key], value, str(key))
    scenario = Scenario(**sections, source=None if source is None else str(source))
    _check_models(scenario, builder)
    return scenario


def load_scenario(path=BASELINE_SCENARIO, overrides=()):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc}", source=path) from exc
    return parse_scenario(text, source=path, overrides=overrides)


def parse_override(text):
    """``key.path=value`` with the value parsed as a YAML scalar."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like section.key=value")
    key, raw = text.split("=", 1)
    return key.strip(), yaml.safe_load(raw)


def scenario_to_dict(scenario):
    def convert(obj):
        if dataclasses.is_dataclass(obj):
            out = {}
            for f in dataclasses.fields(obj):
                if not f.init or f.name == "source":
                    continue
                value = getattr(obj, f.name)
                if value is None:
                    continue
                out[f.name] = convert(value)
            return out
        if isinstance(obj, tuple):
            return [convert(v) for v in obj]
        return obj

    return convert(scenario)


def dump_scenario(scenario):
    """YAML text that :func:`parse_scenario` turns back into an equal Scenario."""
    return yaml.safe_dump(scenario_to_dict(scenario), sort_keys=False, default_flow_style=False)


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class Sweep:
    """Evenly spaced grid ``points`` values from ``start`` to ``stop``.

    With ``scale='dB'`` the endpoints are decibel values and the grid is
    uniform in decibels; :meth:`linear` converts it.
    """

    start: float
    stop: float
    points: int
    scale: str = "dB"

    def __post_init__(self):
        if self.scale not in ("linear", "dB"):
            raise ConfigError(f"sweep scale must be 'linear' or 'dB', got {self.scale!r}", path="--sweep")
        if self.points < 1:
            raise ConfigError("sweep needs at least one point", path="--sweep")
        if self.points > 1 and self.start == self.stop:
            raise ConfigError("sweep start and stop coincide", path="--sweep")

    def values(self):
        return np.linspace(self.start, self.stop, self.points)

    def linear(self):
        v = self.values()
        return 10.0 ** (v / 10.0) if self.scale == "dB" else v


def parse_sweep(text, default_scale="dB"):
    """Parse ``start:stop:points[:scale]`` (commas also accepted)."""
    parts = [p.strip() for p in text.replace(",", ":").split(":")]
    if len(parts) not in (3, 4):
        raise ConfigError(f"sweep {text!r} must be start:stop:points[:scale]", path="--sweep")
    try:
        start, stop = float(parts[0]), float(parts[1])
        points = int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"sweep {text!r}: {exc}", path="--sweep") from exc
    scale = parts[3] if len(parts) == 4 else default_scale
    if scale.lower() == "db":
        scale = "dB"
    return Sweep(start, stop, points, scale)

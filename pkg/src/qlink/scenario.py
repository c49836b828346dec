"""JSON scenario files: schema, validation and construction of model objects.

A scenario is a JSON object with a ``name``, a required ``link`` block and
optional ``turbulence``, ``noise``, ``filter``, ``protocol``, ``pass_model``
and ``sync`` blocks. Every block field has a default; unknown keys are
rejected with the dotted path of the offending entry. Sweep axes name a
block field as ``"block.field"``::

    {
      "name": "uplink-attenuation",
      "link": {"direction": "uplink"},
      "sweep": [{"param": "link.distance_m", "start": 2e5, "stop": 2e6, "steps": 10}]
    }
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import math
import typing
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Literal, Optional

import numpy as np

from .atmosphere import LinkGeometry, TurbulenceProfile, VacuumProfile
from .keyrate import ProtocolParams
from .polarization.channel import PassModel
from .polarization.mirror import IndexTable, aluminum
from .radiometry import SKY_BRIGHTNESS, FilterWindow, NoiseEnvironment


class ScenarioError(ValueError):
    """Invalid scenario; the message starts with the path to the bad field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class LinkBlock:
    wavelength_m: float = 800e-9
    ground_aperture_m: float = 1.5
    satellite_aperture_m: float = 0.15
    distance_m: float = 500e3
    direction: Literal["uplink", "downlink"] = "uplink"
    # 0.016 degree full cone
    ground_ifov_rad: float = 2.792526803190927e-4
    satellite_ifov_rad: float = 2e-5
    eta0: float = 0.1
    ground_altitude_m: float = 0.0


@dataclass(frozen=True)
class TurbulenceBlock:
    ground_cn2: float = 1.7e-14
    wind_speed_m_s: float = 21.0
    enabled: bool = True


@dataclass(frozen=True)
class NoiseBlock:
    condition: Literal["day", "night"] = "night"
    solar_irradiance: float = 4.61e18
    earth_albedo: float = 0.3
    moon_albedo: float = 0.12
    moon_radius_m: float = 1.7374e6
    earth_moon_distance_m: float = 3.844e8
    temperature_k: float = 293.0
    sky_brightness: float = SKY_BRIGHTNESS["new_moon"]
    include_blackbody: bool = False


@dataclass(frozen=True)
class FilterBlock:
    bandwidth_nm: float = 1.0
    gate_s: float = 1e-9


@dataclass(frozen=True)
class ProtocolBlock:
    mu: float = 0.27
    mu_prime: float = 0.4
    f_ec: float = 1.22
    e_opt: float = 0.01
    rep_rate_hz: float = 1e7
    pair_rate_hz: float = 1e6
    dark_rate_hz: float = 200.0
    local_efficiency: float = 0.5
    snr_mean_photons: float = 1.0


@dataclass(frozen=True)
class PassBlock:
    altitude_m: float = 500e3
    altitudes_m: tuple[float, ...] = (500e3, 1000e3, 2000e3, 5000e3)
    elevation_min_deg: float = 30.0
    elevation_max_deg: float = 90.0
    horizon_deg: float = 20.0
    sample_step_s: float = 1.0
    bench_azimuth_deg: float = 70.0
    n_passes: int = 1000
    # None: bundled aluminum table; "ideal": perfect conductor; otherwise a file path
    index_table: Optional[str] = None
    signal_wavelength_m: float = 800e-9
    probe_wavelength_m: float = 800e-9
    probe_rate_hz: float = 1e3
    # None: one pulse per source period, i.e. rep_rate / probe_rate
    pulses_per_probe: Optional[int] = None
    probe_stride: int = 1
    histogram_bins: int = 50


@dataclass(frozen=True)
class SyncBlock:
    ranging_file: Optional[str] = None
    altitude_m: float = 400e3
    rate_hz: float = 10.0
    max_elevation_deg: float = 90.0
    min_elevation_deg: float = 10.0
    convention: Literal["one-way", "two-way"] = "two-way"
    target_accuracy_s: float = 1e-9
    histogram_bins: int = 50


@dataclass(frozen=True)
class SweepAxis:
    """One sweep dimension; ``values`` is the explicit grid."""

    param: str
    values: tuple[float, ...]

    @property
    def block(self) -> str:
        return self.param.split(".", 1)[0]

    @property
    def key(self) -> str:
        return self.param.split(".", 1)[1]


BLOCKS: dict[str, type] = {
    "link": LinkBlock,
    "turbulence": TurbulenceBlock,
    "noise": NoiseBlock,
    "filter": FilterBlock,
    "protocol": ProtocolBlock,
    "pass_model": PassBlock,
    "sync": SyncBlock,
}
REQUIRED_BLOCKS = ("link",)
TOP_LEVEL = {"name", "description", "figure", "quantity", "sweep", "output_dir", "seed", *BLOCKS}
QUANTITIES = ("attenuation", "snr", "key_rate", "entanglement", "qber_probe", "qber_multiplexed")


@dataclass(frozen=True)
class Scenario:
    name: str
    link: LinkBlock
    turbulence: TurbulenceBlock = field(default_factory=TurbulenceBlock)
    noise: NoiseBlock = field(default_factory=NoiseBlock)
    filter: FilterBlock = field(default_factory=FilterBlock)
    protocol: ProtocolBlock = field(default_factory=ProtocolBlock)
    pass_model: PassBlock = field(default_factory=PassBlock)
    sync: SyncBlock = field(default_factory=SyncBlock)
    sweep: tuple[SweepAxis, ...] = ()
    description: str = ""
    figure: Optional[str] = None
    quantity: Optional[str] = None
    output_dir: Optional[str] = None
    seed: int = 0
    source: Optional[str] = field(default=None, compare=False)

    # -- derived model objects ------------------------------------------------

    def axis(self, param: str) -> SweepAxis | None:
        for a in self.sweep:
            if a.param == param:
                return a
        return None

    def with_values(self, assignments: dict[str, float]) -> "Scenario":
        """Copy with ``{"block.field": value}`` substitutions applied."""
        blocks: dict[str, Any] = {}
        for param, value in assignments.items():
            name, key = param.split(".", 1)
            current = blocks.get(name, getattr(self, name))
            hint = _hints(type(current))[key]
            blocks[name] = dataclasses.replace(current, **{key: _coerce_number(hint, value)})
        return dataclasses.replace(self, **blocks)

    def profile(self) -> TurbulenceProfile:
        t = self.turbulence
        if not t.enabled:
            return VacuumProfile()
        return TurbulenceProfile(A=t.ground_cn2, wind_speed=t.wind_speed_m_s)

    def geometry(self, direction: str | None = None) -> LinkGeometry:
        """Link geometry; the transmitter is the ground telescope for uplinks."""
        k = self.link
        direction = direction or k.direction
        if direction == "uplink":
            tx, rx, ifov = k.ground_aperture_m, k.satellite_aperture_m, k.satellite_ifov_rad
        else:
            tx, rx, ifov = k.satellite_aperture_m, k.ground_aperture_m, k.ground_ifov_rad
        return LinkGeometry(
            wavelength=k.wavelength_m,
            tx_aperture=tx,
            distance=k.distance_m,
            direction=direction,
            rx_radius=rx / 2.0,
            ifov=ifov,
            ground_altitude=k.ground_altitude_m,
        )

    def environment(self) -> NoiseEnvironment:
        n = self.noise
        return NoiseEnvironment(
            solar_irradiance=n.solar_irradiance,
            earth_albedo=n.earth_albedo,
            moon_albedo=n.moon_albedo,
            moon_radius=n.moon_radius_m,
            earth_moon_distance=n.earth_moon_distance_m,
            temperature=n.temperature_k,
            sky_brightness=n.sky_brightness,
            include_blackbody=n.include_blackbody,
        )

    def window(self) -> FilterWindow:
        return FilterWindow(self.filter.bandwidth_nm, self.filter.gate_s)

    def protocol_params(self) -> ProtocolParams:
        p = self.protocol
        return ProtocolParams(
            mu=p.mu,
            mu_prime=p.mu_prime,
            f_ec=p.f_ec,
            e_opt=p.e_opt,
            rep_rate=p.rep_rate_hz,
            pair_rate=p.pair_rate_hz,
            dark_rate=p.dark_rate_hz,
            local_efficiency=p.local_efficiency,
            snr_mean_photons=p.snr_mean_photons,
        )

    def mirror(self) -> IndexTable | None:
        table = self.pass_model.index_table
        if table is None:
            return aluminum()
        if table == "ideal":
            return None
        path = Path(table)
        if not path.is_absolute() and self.source is not None:
            path = Path(self.source).parent / path
        return IndexTable.load(path)

    def pass_ensemble(self, altitude: float | None = None, seed: int | None = None) -> list[PassModel]:
        """Seeded ensemble with maximum elevation uniform in the configured range."""
        pm = self.pass_model
        rng = np.random.default_rng(self.seed if seed is None else seed)
        elev = rng.uniform(pm.elevation_min_deg, pm.elevation_max_deg, size=pm.n_passes)
        mirror = self.mirror()
        alt = pm.altitude_m if altitude is None else altitude
        return [
            PassModel(
                altitude=alt,
                max_elevation_deg=float(e),
                min_elevation_deg=pm.horizon_deg,
                sample_step=pm.sample_step_s,
                bench_azimuth_deg=pm.bench_azimuth_deg,
                mirror=mirror,
            )
            for e in elev
        ]

    def pulses_per_probe(self, probe_rate: float) -> int:
        n = self.pass_model.pulses_per_probe
        if n is not None:
            return n
        return max(1, int(round(self.protocol.rep_rate_hz / probe_rate)))

    def grid(self) -> list[dict[str, float]]:
        """Cartesian product of the sweep axes, last axis varying fastest."""
        if not self.sweep:
            return [{}]
        names = [a.param for a in self.sweep]
        return [dict(zip(names, combo)) for combo in itertools.product(*(a.values for a in self.sweep))]

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "seed": self.seed}
        for key in ("description", "figure", "quantity", "output_dir"):
            value = getattr(self, key)
            if value:
                out[key] = value
        for block in BLOCKS:
            out[block] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in dataclasses.asdict(getattr(self, block)).items()}
        out["sweep"] = [{"param": a.param, "values": list(a.values)} for a in self.sweep]
        return out


# -- validation -----------------------------------------------------------------


def _hints(cls: type) -> dict[str, Any]:
    return typing.get_type_hints(cls)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _coerce_number(hint: Any, value: float):
    if hint is int or (typing.get_origin(hint) is typing.Union and int in typing.get_args(hint)):
        if float(value) != int(value):
            raise ScenarioError("", f"expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _check_value(path: str, hint: Any, value: Any) -> Any:
    origin = typing.get_origin(hint)
    if origin is typing.Union:
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        if value is None:
            return None
        return _check_value(path, args[0], value)
    if origin is Literal:
        allowed = typing.get_args(hint)
        if value not in allowed:
            raise ScenarioError(path, f"expected one of {list(allowed)}, got {value!r}")
        return value
    if origin is tuple:
        if not isinstance(value, list) or not value:
            raise ScenarioError(path, "expected a non-empty list of numbers")
        return tuple(_check_value(f"{path}[{i}]", float, v) for i, v in enumerate(value))
    if hint is bool:
        if not isinstance(value, bool):
            raise ScenarioError(path, f"expected true/false, got {value!r}")
        return value
    if hint is int:
        if not _is_number(value) or float(value) != int(value):
            raise ScenarioError(path, f"expected an integer, got {value!r}")
        return int(value)
    if hint is float:
        if not _is_number(value):
            raise ScenarioError(path, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ScenarioError(path, "value must be finite")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ScenarioError(path, f"expected a string, got {value!r}")
        return value
    raise TypeError(f"unsupported field type {hint!r}")


def _parse_block(name: str, cls: type, raw: Any):
    if not isinstance(raw, dict):
        raise ScenarioError(name, "block must be a JSON object")
    hints = _hints(cls)
    kwargs = {}
    for key, value in raw.items():
        path = f"{name}.{key}"
        if key not in hints:
            raise ScenarioError(path, f"unknown key {key!r}")
        if cls is NoiseBlock and key == "sky_brightness" and isinstance(value, str):
            if value not in SKY_BRIGHTNESS:
                raise ScenarioError(path, f"unknown sky condition {value!r}; expected one of {sorted(SKY_BRIGHTNESS)}")
            value = SKY_BRIGHTNESS[value]
        kwargs[key] = _check_value(path, hints[key], value)
    block = cls(**kwargs)
    _check_ranges(name, block)
    return block


# fields allowed to be zero; bench azimuth may take any value
_NON_NEGATIVE = {
    "ground_altitude_m", "sky_brightness", "dark_rate_hz", "e_opt", "earth_albedo",
    "moon_albedo", "elevation_min_deg", "horizon_deg",
}
_FRACTIONS = {"eta0", "earth_albedo", "moon_albedo", "local_efficiency", "e_opt"}
_ANY_SIGN = {"bench_azimuth_deg"}


def _check_ranges(name: str, block) -> None:
    """Sign and ordering checks that the model objects would otherwise raise later."""
    for f in dataclasses.fields(block):
        value = getattr(block, f.name)
        path = f"{name}.{f.name}"
        if isinstance(value, bool) or not _is_number(value) or f.name in _ANY_SIGN:
            continue
        if f.name in _NON_NEGATIVE:
            if value < 0:
                raise ScenarioError(path, "must be >= 0")
        elif value <= 0:
            raise ScenarioError(path, "must be > 0")
        if f.name in _FRACTIONS and value > 1:
            raise ScenarioError(path, "must be <= 1")
    if isinstance(block, ProtocolBlock) and not block.mu < block.mu_prime:
        raise ScenarioError(f"{name}.mu_prime", "must exceed mu")
    if isinstance(block, PassBlock):
        if not block.elevation_min_deg <= block.elevation_max_deg <= 90:
            raise ScenarioError(f"{name}.elevation_max_deg", "need elevation_min_deg <= elevation_max_deg <= 90")
        if block.horizon_deg > block.elevation_min_deg:
            raise ScenarioError(f"{name}.horizon_deg", "must not exceed elevation_min_deg")
        if any(a <= 0 for a in block.altitudes_m):
            raise ScenarioError(f"{name}.altitudes_m", "altitudes must be > 0")


def _parse_axis(i: int, raw: Any, blocks: dict[str, Any]) -> SweepAxis:
    path = f"sweep[{i}]"
    if not isinstance(raw, dict):
        raise ScenarioError(path, "axis must be a JSON object")
    allowed = {"param", "start", "stop", "steps", "scale", "values"}
    for key in raw:
        if key not in allowed:
            raise ScenarioError(f"{path}.{key}", f"unknown key {key!r}")
    param = raw.get("param")
    if not isinstance(param, str) or "." not in param:
        raise ScenarioError(f"{path}.param", "expected 'block.field'")
    block, key = param.split(".", 1)
    if block not in BLOCKS or key not in _hints(BLOCKS[block]):
        raise ScenarioError(f"{path}.param", f"unknown parameter {param!r}")
    hint = _hints(BLOCKS[block])[key]
    if hint not in (float, int):
        raise ScenarioError(f"{path}.param", f"parameter {param!r} is not numeric")
    if "values" in raw:
        if any(k in raw for k in ("start", "stop", "steps", "scale")):
            raise ScenarioError(path, "give either 'values' or start/stop/steps, not both")
        values = _check_value(f"{path}.values", tuple[float, ...], raw["values"])
    else:
        for k in ("start", "stop", "steps"):
            if k not in raw:
                raise ScenarioError(f"{path}.{k}", "missing required key")
        start = _check_value(f"{path}.start", float, raw["start"])
        stop = _check_value(f"{path}.stop", float, raw["stop"])
        steps = _check_value(f"{path}.steps", int, raw["steps"])
        if steps < 1:
            raise ScenarioError(f"{path}.steps", "range is empty")
        if steps == 1 and start != stop:
            raise ScenarioError(f"{path}.steps", "a single step needs start == stop")
        scale = _check_value(f"{path}.scale", Literal["linear", "log"], raw.get("scale", "linear"))
        if scale == "log":
            if start <= 0 or stop <= 0:
                raise ScenarioError(f"{path}.start", "log axes need positive bounds")
            values = tuple(float(v) for v in np.geomspace(start, stop, steps))
        else:
            values = tuple(float(v) for v in np.linspace(start, stop, steps))
    if hint is int:
        values = tuple(float(int(round(v))) for v in values)
    # each value must produce a valid block
    for v in values:
        try:
            _check_ranges(block, dataclasses.replace(blocks[block], **{key: int(v) if hint is int else v}))
        except ScenarioError as exc:
            raise ScenarioError(f"{path}.values", f"{v!r} is invalid for {param}: {exc}") from None
    return SweepAxis(param, values)


def scenario_from_dict(raw: Any, source: str | None = None) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("", "scenario must be a JSON object")
    for key in raw:
        if key not in TOP_LEVEL:
            raise ScenarioError(key, f"unknown key {key!r}")
    if "name" not in raw:
        raise ScenarioError("name", "missing required field")
    for block in REQUIRED_BLOCKS:
        if block not in raw:
            raise ScenarioError(block, "missing required block")
    name = _check_value("name", str, raw["name"])
    blocks = {b: _parse_block(b, cls, raw[b]) if b in raw else cls() for b, cls in BLOCKS.items()}

    sweep_raw = raw.get("sweep", [])
    if not isinstance(sweep_raw, list):
        raise ScenarioError("sweep", "expected a list of axes")
    axes = tuple(_parse_axis(i, a, blocks) for i, a in enumerate(sweep_raw))
    seen = set()
    for i, a in enumerate(axes):
        if a.param in seen:
            raise ScenarioError(f"sweep[{i}].param", f"duplicate axis {a.param!r}")
        seen.add(a.param)

    quantity = raw.get("quantity")
    if quantity is not None:
        quantity = _check_value("quantity", Literal[QUANTITIES], quantity)  # type: ignore[valid-type]
    seed = _check_value("seed", int, raw.get("seed", 0))
    if seed < 0:
        raise ScenarioError("seed", "must be >= 0")
    return Scenario(
        name=name,
        sweep=axes,
        description=_check_value("description", str, raw.get("description", "")),
        figure=_check_value("figure", str, raw["figure"]) if raw.get("figure") is not None else None,
        quantity=quantity,
        output_dir=_check_value("output_dir", str, raw["output_dir"]) if raw.get("output_dir") is not None else None,
        seed=seed,
        source=source,
        **blocks,
    )


def bundled_scenarios() -> list[str]:
    root = resources.files("qlink") / "scenarios"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_scenario_path(ref: str | Path) -> Path:
    """A file path, or the name of a bundled scenario (with or without ``.json``)."""
    path = Path(ref)
    if path.exists():
        return path
    name = path.name[:-5] if path.name.endswith(".json") else path.name
    candidate = resources.files("qlink") / "scenarios" / f"{name}.json"
    if str(ref) == name or str(ref) == f"{name}.json":
        if candidate.is_file():
            return Path(str(candidate))
    raise ScenarioError("", f"scenario file not found: {ref}")


def parse_scenario(ref: str | Path) -> Scenario:
    """Load and validate a scenario file (or bundled scenario name)."""
    path = resolve_scenario_path(ref)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError("", f"cannot read {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("", f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return scenario_from_dict(raw, source=str(path))

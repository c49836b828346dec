"""Background photon rates for ground-satellite links and the resulting SNR.

Uplink noise is sunlight (day) or moonlight (night) diffused by the Earth
surface into the satellite receiver field of view. Downlink noise is the
sky brightness seen by the ground telescope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PLANCK = 6.62607015e-34
LIGHT_SPEED = 299_792_458.0
BOLTZMANN = 1.380649e-23

#: Sky background brightness (W m^-2 sr^-1 um^-1) for named conditions.
#: These are scenario inputs spanning the range quoted for satellite-to-ground
#: links, not derived constants.
SKY_BRIGHTNESS = {
    "day": 1.5e1,
    "full_moon": 1.5e-3,
    "new_moon": 1.5e-5,
}


@dataclass(frozen=True)
class NoiseEnvironment:
    """Radiometric constants for the background model.

    Attributes
    ----------
    solar_irradiance : float
        Solar spectral irradiance H_sun in photons s^-1 nm^-1 m^-2.
    earth_albedo, moon_albedo : float
        Diffuse reflectances in [0, 1].
    moon_radius, earth_moon_distance : float
        In meters.
    temperature : float
        Ground temperature (K) for black-body emission.
    sky_brightness : float
        Downlink sky brightness H_b in W m^-2 sr^-1 um^-1.
    include_blackbody : bool
        Add ground black-body emission to the night uplink noise.
    """

    solar_irradiance: float = 4.61e18
    earth_albedo: float = 0.3
    moon_albedo: float = 0.12
    moon_radius: float = 1.7374e6
    earth_moon_distance: float = 3.844e8
    temperature: float = 293.0
    sky_brightness: float = SKY_BRIGHTNESS["new_moon"]
    include_blackbody: bool = False

    def __post_init__(self):
        for name in ("earth_albedo", "moon_albedo"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        for name in ("solar_irradiance", "moon_radius", "earth_moon_distance", "temperature"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.sky_brightness < 0:
            raise ValueError(f"sky_brightness must be >= 0, got {self.sky_brightness}")


@dataclass(frozen=True)
class FilterWindow:
    """Spectral filter bandwidth (nm) and detector gate duration (s)."""

    bandwidth_nm: float = 1.0
    gate_s: float = 1e-9

    def __post_init__(self):
        if self.bandwidth_nm <= 0 or self.gate_s <= 0:
            raise ValueError("filter bandwidth and gate time must be > 0")


@dataclass(frozen=True)
class SnrReport:
    """Expected detections per gate and their ratio.

    ``snr`` is ``inf`` (and ``noiseless`` is set) when no noise reaches the gate.
    """

    signal: float
    noise: float
    snr: float
    snr_db: float
    noiseless: bool = False


def uplink_day_noise(env: NoiseEnvironment, r: float, ifov: float) -> float:
    """Earthshine photons per second per nm collected by a satellite receiver.

    Independent of the satellite distance: the imaged ground area grows as
    L^2 while the collecting solid angle shrinks as 1/L^2.
    """
    if r < 0 or ifov < 0:
        raise ValueError("aperture radius and IFOV must be >= 0")
    return env.earth_albedo * r**2 * ifov**2 * env.solar_irradiance


def moon_factor(env: NoiseEnvironment) -> float:
    """Ratio of full-Moon night to daytime ground radiance."""
    return env.moon_albedo * (env.moon_radius / env.earth_moon_distance) ** 2


def blackbody_photon_radiance(temperature: float, wavelength: float) -> float:
    """Black-body photon emission 2c/lambda^4 / (exp(hc/lambda kT) - 1).

    Units are photons s^-1 m^-2 sr^-1 per meter of bandwidth. Underflows to 0
    for large hc/lambda kT.
    """
    if wavelength <= 0:
        raise ValueError("wavelength must be > 0")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0:
        return 0.0
    x = PLANCK * LIGHT_SPEED / (wavelength * BOLTZMANN * temperature)
    if x > 700:
        return 0.0
    return 2.0 * LIGHT_SPEED / wavelength**4 / math.expm1(x)


@dataclass(frozen=True)
class BlackbodyEmission:
    per_m: float
    per_nm: float


def blackbody_surface_emission(temperature: float, wavelength: float) -> BlackbodyEmission:
    """Black-body photon emission reported per meter and per nm of bandwidth."""
    per_m = blackbody_photon_radiance(temperature, wavelength)
    return BlackbodyEmission(per_m=per_m, per_nm=per_m * 1e-9)


def uplink_night_noise(
    env: NoiseEnvironment, r: float, ifov: float, wavelength: float = 800e-9
) -> float:
    """Moonlit Earthshine photons per second per nm collected by a satellite receiver.

    When ``env.include_blackbody`` is set, ground thermal emission seen
    through the same aperture and field of view is added (per-nm convention).
    """
    n = moon_factor(env) * uplink_day_noise(env, r, ifov)
    if env.include_blackbody:
        # emitting area ifov^2 L^2 times collecting solid angle pi r^2 / L^2
        bb = blackbody_surface_emission(env.temperature, wavelength).per_nm
        n += bb * ifov**2 * math.pi * r**2
    return n


def solid_angle(ifov: float) -> float:
    """Small-angle solid angle (sr) of a cone with full angle ``ifov``."""
    return math.pi * (ifov / 2.0) ** 2


@dataclass(frozen=True)
class DownlinkNoise:
    power_w: float
    photon_rate: float


def downlink_noise_power(
    env: NoiseEnvironment,
    omega_fov: float,
    r: float,
    bandwidth_nm: float,
    wavelength: float = 800e-9,
) -> DownlinkNoise:
    """Sky background collected by a ground telescope.

    ``omega_fov`` is in sr, ``r`` the telescope radius (m), ``bandwidth_nm``
    the filter width in nm (converted to um for the brightness units).
    """
    if omega_fov < 0 or r < 0 or bandwidth_nm < 0:
        raise ValueError("field of view, radius and bandwidth must be >= 0")
    power = env.sky_brightness * omega_fov * math.pi * r**2 * (bandwidth_nm * 1e-3)
    photon_energy = PLANCK * LIGHT_SPEED / wavelength
    return DownlinkNoise(power, power / photon_energy)


def snr(
    signal_per_pulse: float,
    noise_rate: float,
    window: FilterWindow,
    dark_rate: float = 0.0,
) -> SnrReport:
    """Signal-to-noise ratio inside one detector gate.

    Parameters
    ----------
    signal_per_pulse : float
        Expected signal detections per gated pulse (mean photon number times
        link efficiency); the gate opens once per pulse.
    noise_rate : float
        Background photons per second reaching the detector after the
        spectral filter (per-nm rates must already be multiplied by the
        bandwidth).
    dark_rate : float
        Detector dark counts per second.
    """
    if signal_per_pulse < 0 or noise_rate < 0 or dark_rate < 0:
        raise ValueError("rates must be >= 0")
    noise = (noise_rate + dark_rate) * window.gate_s
    if noise == 0:
        return SnrReport(signal_per_pulse, 0.0, math.inf, math.inf, noiseless=True)
    ratio = signal_per_pulse / noise
    ratio_db = 10.0 * math.log10(ratio) if ratio > 0 else -math.inf
    return SnrReport(signal_per_pulse, noise, ratio, ratio_db)


def snr_db_grid(signal, noise_rate, window: FilterWindow, dark_rate: float = 0.0) -> np.ndarray:
    """Vectorised ``snr(...).snr_db`` over broadcastable arrays."""
    noise = (np.asarray(noise_rate, dtype=float) + dark_rate) * window.gate_s
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(signal, dtype=float) / noise)

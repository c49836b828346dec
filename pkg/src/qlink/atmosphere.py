"""Turbulence-limited Gaussian beam propagation for ground-satellite links.

Covers the three-term structure-constant profile, the Fried parameter
integrated along a vertical path, long/short-term beam widths, beam-wander
variance and the aperture collection efficiency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from .quadrature import adaptive_simpson

Direction = Literal["uplink", "downlink"]

#: Structure-constant floor below which the path integral is truncated.
CN2_NEGLIGIBLE = 1e-30


@dataclass(frozen=True)
class TurbulenceProfile:
    """Three-term altitude model of the refractive-index structure constant.

    Attributes
    ----------
    A : float
        Ground-level structure constant in m^(-2/3).
    wind_speed : float
        RMS high-altitude wind speed in m/s.
    """

    A: float = 1.7e-14
    wind_speed: float = 21.0

    def __post_init__(self):
        if self.A < 0:
            raise ValueError(f"A must be >= 0, got {self.A}")
        if self.wind_speed < 0:
            raise ValueError(f"wind_speed must be >= 0, got {self.wind_speed}")

    def cn2(self, h):
        """Structure constant at altitude ``h`` (m); scalar or array."""
        h = np.asarray(h, dtype=float)
        if np.any(h < 0):
            raise ValueError("altitude must be >= 0")
        val = (
            0.00594 * (self.wind_speed / 27.0) ** 2 * (h * 1e-5) ** 10 * np.exp(-h / 1000.0)
            + 2.7e-16 * np.exp(-h / 1500.0)
            + self.A * np.exp(-h / 100.0)
        )
        return float(val) if val.ndim == 0 else val

    @cached_property
    def cutoff_altitude(self) -> float:
        """Altitude above which Cn^2 stays below ``CN2_NEGLIGIBLE``."""
        h = np.arange(0.0, 300_001.0, 100.0)
        above = np.nonzero(self.cn2(h) >= CN2_NEGLIGIBLE)[0]
        if above.size == 0:
            return 0.0
        return float(h[min(above[-1] + 1, h.size - 1)])


class VacuumProfile(TurbulenceProfile):
    """Profile with Cn^2 identically zero."""

    def cn2(self, h):
        h = np.asarray(h, dtype=float)
        if np.any(h < 0):
            raise ValueError("altitude must be >= 0")
        val = np.zeros_like(h)
        return float(val) if val.ndim == 0 else val

    @cached_property
    def cutoff_altitude(self) -> float:
        return 0.0


def cn2_at(profile: TurbulenceProfile, h: float) -> float:
    """Structure constant (m^(-2/3)) at altitude ``h`` in meters."""
    if h < 0:
        raise ValueError(f"altitude must be >= 0, got {h}")
    return profile.cn2(h)


@dataclass(frozen=True)
class LinkGeometry:
    """Vertical ground-satellite optical path.

    The transmitter is assumed to fill its aperture, so the beam waist is
    half the transmitter diameter.

    Attributes
    ----------
    wavelength : float
        Operating wavelength (m).
    tx_aperture : float
        Transmitter aperture diameter (m).
    distance : float
        Path length L (m).
    direction : {"uplink", "downlink"}
        Uplink puts the transmitter at the ground end of the path.
    rx_radius : float
        Receiver aperture radius R (m).
    ifov : float
        Full-angle instantaneous field of view of the receiver (rad).
    ground_altitude : float
        Altitude of the ground terminal above the profile origin (m).
    """

    wavelength: float = 800e-9
    tx_aperture: float = 1.5
    distance: float = 500e3
    direction: Direction = "uplink"
    rx_radius: float = 0.075
    ifov: float = 2e-5
    ground_altitude: float = 0.0

    def __post_init__(self):
        for name in ("wavelength", "tx_aperture", "rx_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.distance < 0:
            raise ValueError(f"distance must be >= 0, got {self.distance}")
        if self.ifov < 0:
            raise ValueError(f"ifov must be >= 0, got {self.ifov}")
        if self.direction not in ("uplink", "downlink"):
            raise ValueError(f"direction must be 'uplink' or 'downlink', got {self.direction!r}")
        if self.ground_altitude < 0:
            raise ValueError("ground_altitude must be >= 0")

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def waist(self) -> float:
        return self.tx_aperture / 2.0

    @property
    def rayleigh(self) -> float:
        """Rayleigh parameter Z0 = k w0^2 / 2 (m)."""
        return self.wavenumber * self.waist**2 / 2.0

    def altitude(self, z):
        """Altitude (m) of path coordinate ``z`` measured from the transmitter."""
        z = np.asarray(z, dtype=float)
        if self.direction == "uplink":
            return self.ground_altitude + z
        return self.ground_altitude + (self.distance - z)


@dataclass(frozen=True)
class BeamWidths:
    """Squared beam widths at the receiver plane.

    Squares are stored so that ``long_term_sq - short_term_sq`` equals
    ``2 * wander_variance`` to rounding.
    """

    short_term_sq: float
    long_term_sq: float
    wander_variance: float
    fried: float

    @property
    def short_term(self) -> float:
        return math.sqrt(self.short_term_sq)

    @property
    def long_term(self) -> float:
        return math.sqrt(self.long_term_sq)


def fried_parameter(
    geom: LinkGeometry,
    profile: TurbulenceProfile,
    panels: int = 10_000,
    rtol: float = 1e-7,
) -> float:
    """Fried parameter r0 (m) integrated along the whole vertical path.

    Returns ``math.inf`` when the weighted structure-constant integral vanishes.
    """
    L = geom.distance
    if L == 0:
        return math.inf
    top = profile.cutoff_altitude - geom.ground_altitude
    if top <= 0:
        return math.inf
    span = min(L, top)
    cn2 = profile.cn2
    hg = geom.ground_altitude

    # u = distance from the ground end; the weight depends on the direction.
    if geom.direction == "uplink":
        def integrand(u):
            return cn2(hg + u) * ((L - u) / L) ** (5.0 / 3.0)
    else:
        def integrand(u):
            return cn2(hg + u) * (u / L) ** (5.0 / 3.0)

    integral = adaptive_simpson(integrand, 0.0, span, panels=panels, rtol=rtol)
    if integral <= 0:
        return math.inf
    return (0.42 * geom.wavenumber**2 * integral) ** (-3.0 / 5.0)


def beam_widths(geom: LinkGeometry, r0: float) -> BeamWidths:
    """Long- and short-term widths for a collimated beam after distance L.

    The turbulent broadening term of the short-term width is clamped at zero
    when ``r0`` is large compared with the waist.
    """
    if not r0 > 0:
        raise ValueError(f"r0 must be > 0 or inf, got {r0}")
    L = geom.distance
    w0 = geom.waist
    k = geom.wavenumber
    vacuum = w0**2 * (1.0 + (L / geom.rayleigh) ** 2)
    if math.isinf(r0) or L == 0:
        return BeamWidths(vacuum, vacuum, 0.0, r0)
    lt_term = 2.0 * (4.0 * L / (k * r0)) ** 2
    bracket = 1.0 - 0.26 * (r0 / w0) ** (1.0 / 3.0)
    st_term = 2.0 * (4.2 * L / (k * r0) * bracket) ** 2 if bracket > 0 else 0.0
    long_sq = vacuum + lt_term
    short_sq = vacuum + st_term
    if short_sq > long_sq:
        short_sq = long_sq
    return BeamWidths(short_sq, long_sq, (long_sq - short_sq) / 2.0, r0)


def link_efficiency(widths: BeamWidths, R: float, eta0: float = 0.1) -> float:
    """Fraction of transmitted power collected by a centered aperture of radius R."""
    if R <= 0:
        raise ValueError(f"R must be > 0, got {R}")
    if not 0 < eta0 <= 1:
        raise ValueError(f"eta0 must be in (0, 1], got {eta0}")
    if math.isinf(R):
        return eta0
    return eta0 * -math.expm1(-2.0 * R**2 / widths.long_term_sq)


def attenuation_db(eta: float) -> float:
    """Link attenuation in dB for efficiency ``eta``."""
    if eta <= 0:
        return math.inf
    return -10.0 * math.log10(eta)


def wander_ratio(widths: BeamWidths) -> float:
    """Beam-wander variance relative to the squared short-term width."""
    if widths.short_term_sq <= 0:
        raise ValueError("short-term width must be > 0")
    return widths.wander_variance / widths.short_term_sq


@dataclass(frozen=True)
class LinkBudget:
    """Convenience bundle of every atmospheric output for one geometry."""

    geometry: LinkGeometry
    widths: BeamWidths
    efficiency: float

    @property
    def attenuation_db(self) -> float:
        return attenuation_db(self.efficiency)

    @property
    def wander_ratio(self) -> float:
        return wander_ratio(self.widths)


def evaluate_link(
    geom: LinkGeometry, profile: TurbulenceProfile | None = None, eta0: float = 0.1
) -> LinkBudget:
    profile = profile or TurbulenceProfile()
    r0 = fried_parameter(geom, profile)
    widths = beam_widths(geom, r0)
    return LinkBudget(geom, widths, link_efficiency(widths, geom.rx_radius, eta0))

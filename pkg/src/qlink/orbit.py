"""Circular-orbit pass geometry over a ground station.

Earth rotation is neglected. The orbit lies in the x-y plane of an
Earth-centred frame; the station sits at a central-angle offset from the
ground track chosen to produce the requested maximum elevation. Time zero is
the instant of closest approach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS = 6.371e6
EARTH_GM = 3.986004418e14


@dataclass(frozen=True)
class CircularPass:
    altitude: float
    max_elevation_deg: float = 90.0
    min_elevation_deg: float = 20.0

    def __post_init__(self):
        if self.altitude <= 0:
            raise ValueError(f"altitude must be > 0, got {self.altitude}")
        if not 0 <= self.min_elevation_deg <= self.max_elevation_deg <= 90:
            raise ValueError("need 0 <= min_elevation <= max_elevation <= 90 degrees")

    @property
    def orbit_radius(self) -> float:
        return EARTH_RADIUS + self.altitude

    @property
    def angular_rate(self) -> float:
        return math.sqrt(EARTH_GM / self.orbit_radius**3)

    def _central_angle(self, elevation_deg: float) -> float:
        el = math.radians(elevation_deg)
        return math.acos(EARTH_RADIUS * math.cos(el) / self.orbit_radius) - el

    @property
    def track_offset(self) -> float:
        """Central angle between the station and the ground track (rad)."""
        return max(self._central_angle(self.max_elevation_deg), 0.0)

    @property
    def half_duration(self) -> float:
        """Time from closest approach to setting below the minimum elevation (s)."""
        c = math.cos(self._central_angle(self.min_elevation_deg)) / math.cos(self.track_offset)
        return math.acos(min(c, 1.0)) / self.angular_rate

    @property
    def station(self) -> np.ndarray:
        g = self.track_offset
        return EARTH_RADIUS * np.array([math.cos(g), 0.0, math.sin(g)])

    @property
    def up(self) -> np.ndarray:
        return self.station / EARTH_RADIUS

    def check_times(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        limit = self.half_duration * (1 + 1e-12)
        if np.any(np.abs(t) > limit):
            raise ValueError(f"time outside pass window [-{self.half_duration:.3f}, {self.half_duration:.3f}] s")
        return t

    def times(self, step: float) -> np.ndarray:
        """Uniform samples spanning the pass, symmetric about closest approach."""
        n = int(math.floor(self.half_duration / step))
        return step * np.arange(-n, n + 1, dtype=float)

    def satellite_position(self, t) -> np.ndarray:
        a = self.angular_rate * np.asarray(t, dtype=float)
        r = self.orbit_radius
        return np.stack([r * np.cos(a), r * np.sin(a), np.zeros_like(a)], axis=-1)

    def satellite_velocity(self, t) -> np.ndarray:
        a = self.angular_rate * np.asarray(t, dtype=float)
        v = self.angular_rate * self.orbit_radius
        return np.stack([-v * np.sin(a), v * np.cos(a), np.zeros_like(a)], axis=-1)

    def line_of_sight(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Unit vectors station -> satellite and the slant range (m)."""
        d = self.satellite_position(t) - self.station
        rng = np.linalg.norm(d, axis=-1)
        return d / rng[..., None], rng

    def slant_range(self, t) -> np.ndarray:
        return self.line_of_sight(t)[1]

    def range_rate(self, t) -> np.ndarray:
        """Analytic time derivative of the slant range (m/s)."""
        s, _ = self.line_of_sight(t)
        return np.sum(s * self.satellite_velocity(t), axis=-1)

    def elevation(self, t) -> np.ndarray:
        s, _ = self.line_of_sight(t)
        return np.degrees(np.arcsin(np.clip(s @ self.up, -1.0, 1.0)))

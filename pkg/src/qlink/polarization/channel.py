"""Time- and wavelength-dependent Jones matrix of a tracked LEO downlink.

The satellite is nadir-pointing and its payload emits along the orbit
anti-normal; a two-axis pointing mirror folds the beam toward the station. On
the ground a second tracking mirror folds the received beam into a fixed
horizontal bench axis. The bench azimuth is measured from the direction
pointing toward the ground track, positive toward the direction of motion.
It sets how much of the pass geometry shows up as polarization rotation;
the default of 70 degrees keeps the largest |dS2/dt| of a 500 km pass
ensemble just under 0.015 1/s.

Each mirror is a Fresnel reflection between its own (p, s) frames, and the
frame changes between payload, mirrors and bench are real rotations, so

    C = R_bench . M_ground . R_between . M_sat . R_payload.

Transverse bases:

* payload: (nadir x beam, nadir); "vertical" is the nadir component.
* bench: (f2 x d, -up), with ``d`` the bench axis; "vertical" is down.

Both bases are right-handed about the propagation direction, so an ideal
two-mirror channel is a pure rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..orbit import CircularPass
from .mirror import IndexTable, aluminum, fresnel


@dataclass(frozen=True)
class PassModel:
    """One satellite pass and the mirror material of both tracking mirrors.

    ``mirror=None`` selects ideal (perfectly conducting) mirrors.
    """

    altitude: float = 500e3
    max_elevation_deg: float = 90.0
    min_elevation_deg: float = 20.0
    sample_step: float = 1.0
    bench_azimuth_deg: float = 70.0
    mirror: IndexTable | None = field(default_factory=aluminum)

    def __post_init__(self):
        if self.sample_step <= 0:
            raise ValueError("sample_step must be > 0")
        # validates altitude and elevations
        self.geometry

    @property
    def geometry(self) -> CircularPass:
        return CircularPass(self.altitude, self.max_elevation_deg, self.min_elevation_deg)

    def times(self) -> np.ndarray:
        return self.geometry.times(self.sample_step)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sum(a * b, axis=-1)


def _frame_change(a1, a2, b1, b2) -> np.ndarray:
    """Matrix taking components in basis (a1, a2) to components in (b1, b2)."""
    out = np.empty(a1.shape[:-1] + (2, 2))
    out[..., 0, 0] = _dot(b1, a1)
    out[..., 0, 1] = _dot(b1, a2)
    out[..., 1, 0] = _dot(b2, a1)
    out[..., 1, 1] = _dot(b2, a2)
    return out


@dataclass(frozen=True)
class MirrorFrame:
    s: np.ndarray
    p_in: np.ndarray
    p_out: np.ndarray
    cos_incidence: np.ndarray


def mirror_frame(d_in: np.ndarray, d_out: np.ndarray) -> MirrorFrame:
    """s/p unit vectors and incidence cosine for a fold from ``d_in`` to ``d_out``."""
    s = _unit(np.cross(d_in, d_out))
    c = np.clip(_dot(d_in, d_out), -1.0, 1.0)
    return MirrorFrame(s, np.cross(s, d_in), np.cross(s, d_out), np.sqrt((1.0 - c) / 2.0))


@dataclass(frozen=True)
class ChannelGeometry:
    """Wavelength-independent part of the channel at a set of times."""

    times: np.ndarray
    r_payload: np.ndarray
    r_between: np.ndarray
    r_bench: np.ndarray
    cos_sat: np.ndarray
    cos_ground: np.ndarray
    vectors: dict = field(repr=False, default_factory=dict)

    def jones(self, mirror: IndexTable | None, wavelength: float) -> np.ndarray:
        """Channel matrices C(t, wavelength), shape (T, 2, 2)."""
        n = np.inf if mirror is None else mirror(wavelength)
        rs_s, rp_s = fresnel(n, self.cos_sat)
        rs_g, rp_g = fresnel(n, self.cos_ground)
        m_sat = np.zeros(self.times.shape + (2, 2), dtype=complex)
        m_sat[:, 0, 0], m_sat[:, 1, 1] = rp_s, rs_s
        m_gnd = np.zeros_like(m_sat)
        m_gnd[:, 0, 0], m_gnd[:, 1, 1] = rp_g, rs_g
        return self.r_bench @ m_gnd @ self.r_between @ m_sat @ self.r_payload


def channel_geometry(model: PassModel, t) -> ChannelGeometry:
    geo = model.geometry
    t = geo.check_times(t)
    los, _ = geo.line_of_sight(t)
    up = geo.up
    beam = np.array([0.0, 0.0, -1.0])
    # horizontal projection of the anti-normal points toward the ground track
    toward_track = _unit(beam - (beam @ up) * up)
    along_track = np.cross(up, toward_track)
    psi = np.radians(model.bench_azimuth_deg)
    bench = np.cos(psi) * toward_track + np.sin(psi) * along_track

    # payload basis (e1, nadir), right-handed about the beam
    e2 = -_unit(geo.satellite_position(t))
    e1 = np.cross(e2, beam)
    d_sat_in = np.broadcast_to(beam, e1.shape)
    sat = mirror_frame(d_sat_in, -los)
    gnd = mirror_frame(-los, np.broadcast_to(bench, los.shape))

    f2 = np.broadcast_to(-up, los.shape)
    f1 = np.cross(f2, bench)

    return ChannelGeometry(
        times=t,
        r_payload=_frame_change(e1, e2, sat.p_in, sat.s),
        r_between=_frame_change(sat.p_out, sat.s, gnd.p_in, gnd.s),
        r_bench=_frame_change(gnd.p_out, gnd.s, f1, f2),
        cos_sat=sat.cos_incidence,
        cos_ground=gnd.cos_incidence,
        vectors={"e1": e1, "e2": e2, "f1": f1, "f2": f2, "sat": sat, "ground": gnd},
    )


def channel_jones(model: PassModel, t, wavelength: float) -> np.ndarray:
    """Channel Jones matrix at time(s) ``t`` (s from closest approach).

    Returns shape (2, 2) for scalar ``t`` and (T, 2, 2) otherwise.
    """
    scalar = np.ndim(t) == 0
    c = channel_geometry(model, t).jones(model.mirror, wavelength)
    return c[0] if scalar else c


def pass_ensemble(
    altitude: float,
    n_passes: int,
    seed: int,
    elevation_range: tuple[float, float] = (30.0, 90.0),
    **kwargs,
) -> list[PassModel]:
    """Passes with maximum elevation drawn uniformly from ``elevation_range``."""
    if n_passes < 1:
        raise ValueError("ensemble must contain at least one pass")
    rng = np.random.default_rng(seed)
    mirror = kwargs.pop("mirror") if "mirror" in kwargs else aluminum()
    elev = rng.uniform(*elevation_range, size=n_passes)
    return [PassModel(altitude, float(e), mirror=mirror, **kwargs) for e in elev]

"""Laser-ranging trip-time drift and the self-synchronisation pulse rate.

Ranging files are two-column text/CSV with a ``# units:`` header::

    # units: s,s
    # convention: two-way
    epoch,range
    0.0,0.0026712
    ...

The second unit is ``s`` for a trip time or ``m`` for a one-way distance.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .orbit import CircularPass
from .radiometry import LIGHT_SPEED

CONVENTIONS = {"one-way": 1, "two-way": 2}
_UNITS_RE = re.compile(r"^#\s*units:\s*(\w+)\s*,\s*(\w+)\s*$", re.IGNORECASE)
_CONV_RE = re.compile(r"^#\s*convention:\s*([\w-]+)\s*$", re.IGNORECASE)


class RangingFormatError(ValueError):
    """Raised for malformed ranging files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class RangingSeries:
    """Validated trip-time series.

    ``range_time`` is in seconds under ``convention``; ``gaps`` holds indices
    ``i`` where the spacing between samples ``i`` and ``i+1`` exceeds 1.5x the
    median spacing.
    """

    epochs: np.ndarray
    range_time: np.ndarray
    convention: str = "two-way"
    gaps: tuple[int, ...] = field(default=())

    def __len__(self) -> int:
        return self.epochs.size


def _find_gaps(epochs: np.ndarray) -> tuple[int, ...]:
    if epochs.size < 3:
        return ()
    dt = np.diff(epochs)
    return tuple(int(i) for i in np.nonzero(dt > 1.5 * np.median(dt))[0])


def make_series(epochs, range_time, convention: str = "two-way") -> RangingSeries:
    epochs = np.asarray(epochs, dtype=float)
    range_time = np.asarray(range_time, dtype=float)
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if epochs.shape != range_time.shape or epochs.ndim != 1:
        raise ValueError("epochs and range times must be 1-D arrays of equal length")
    if np.any(np.diff(epochs) <= 0):
        raise ValueError("epochs must be strictly increasing")
    if np.any(range_time <= 0):
        raise ValueError("range times must be > 0")
    return RangingSeries(epochs, range_time, convention, _find_gaps(epochs))


def ingest_ranging(path: str | Path) -> RangingSeries:
    """Parse a ranging file, rejecting malformed rows and non-increasing epochs."""
    units = None
    convention = "two-way"
    epochs: list[float] = []
    values: list[float] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _UNITS_RE.match(line)
                if m:
                    units = (m.group(1).lower(), m.group(2).lower())
                    if units[0] != "s" or units[1] not in ("s", "m"):
                        raise RangingFormatError(f"unknown units {m.group(1)},{m.group(2)}", lineno)
                    continue
                m = _CONV_RE.match(line)
                if m:
                    convention = m.group(1).lower()
                    if convention not in CONVENTIONS:
                        raise RangingFormatError(f"unknown convention {convention!r}", lineno)
                continue
            if units is None:
                raise RangingFormatError("missing '# units:' header before data", lineno)
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise RangingFormatError(f"expected 2 columns, got {len(parts)}", lineno)
            try:
                t, v = float(parts[0]), float(parts[1])
            except ValueError:
                if not epochs and not parts[0][:1].isdigit() and parts[0][:1] not in "+-.":
                    continue  # column-name header
                raise RangingFormatError(f"non-numeric value in {line!r}", lineno) from None
            if not (math.isfinite(t) and math.isfinite(v)):
                raise RangingFormatError("non-finite value", lineno)
            if epochs and t == epochs[-1]:
                raise RangingFormatError(f"duplicate epoch {t!r}", lineno)
            if epochs and t < epochs[-1]:
                raise RangingFormatError(f"epoch {t!r} decreases from {epochs[-1]!r}", lineno)
            if v <= 0:
                raise RangingFormatError("range must be > 0", lineno)
            epochs.append(t)
            values.append(v)
    if units is None:
        raise RangingFormatError("missing '# units:' header")
    tau = np.asarray(values, dtype=float)
    if units[1] == "m":
        tau = tau * CONVENTIONS[convention] / LIGHT_SPEED
    return RangingSeries(np.asarray(epochs, dtype=float), tau, convention, _find_gaps(np.asarray(epochs)))


def write_ranging(series: RangingSeries, path: str | Path) -> None:
    """Write a series in the trip-time (``s,s``) format; values round-trip exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# units: s,s\n")
        fh.write(f"# convention: {series.convention}\n")
        fh.write("epoch,range\n")
        for t, v in zip(series.epochs.tolist(), series.range_time.tolist()):
            fh.write(f"{t!r},{v!r}\n")


def synthesize_pass(
    altitude: float = 400e3,
    rate_hz: float = 10.0,
    max_elevation_deg: float = 90.0,
    min_elevation_deg: float = 10.0,
    convention: str = "two-way",
) -> RangingSeries:
    """Trip times for a circular-orbit pass sampled at ``rate_hz``."""
    geo = CircularPass(altitude, max_elevation_deg, min_elevation_deg)
    t = geo.times(1.0 / rate_hz)
    tau = CONVENTIONS[convention] * geo.slant_range(t) / LIGHT_SPEED
    return make_series(t - t[0], tau, convention)


@dataclass(frozen=True)
class DriftStats:
    """Trip-time drift per sample and its histogram.

    ``range_rate`` is ``c * max|dtau/dt|``; ``geometric_range_rate`` divides
    out the two-way factor so it equals the actual slant-range rate.
    """

    epochs: np.ndarray
    drift: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    max_abs: float
    range_rate: float
    geometric_range_rate: float

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


def drift_statistics(series: RangingSeries, bins: int = 50) -> DriftStats:
    """Central-difference dtau/dt (one-sided at the ends) and its histogram."""
    if len(series) < 2:
        raise ValueError("need at least 2 ranging records")
    drift = np.gradient(series.range_time, series.epochs, edge_order=1)
    lo, hi = float(drift.min()), float(drift.max())
    if lo == hi:
        lo, hi = lo - 0.5e-9, hi + 0.5e-9
    counts, edges = np.histogram(drift, bins=bins, range=(lo, hi))
    m = float(np.max(np.abs(drift)))
    rr = LIGHT_SPEED * m
    return DriftStats(series.epochs, drift, edges, counts, m, rr, rr / CONVENTIONS[series.convention])


@dataclass(frozen=True)
class SyncRate:
    """Base synchronisation rate and its engineering margin band (Hz)."""

    base: float
    low: float
    high: float


MARGIN_BAND = (1.25, 2.5)


def required_sync_rate(max_drift: float, target_accuracy: float) -> SyncRate:
    """Pulse rate keeping trip-time changes between pulses below ``target_accuracy``."""
    if max_drift <= 0 or target_accuracy <= 0:
        raise ValueError("drift and accuracy must be > 0")
    base = max_drift / target_accuracy
    return SyncRate(base, base * MARGIN_BAND[0], base * MARGIN_BAND[1])

"""Polarization compensation schemes and Stokes-derivative statistics.

Two ways of tracking the channel are modelled:

* a probe beam at another wavelength measured simultaneously with the signal,
  leaving the residual ``C(lambda_p)^-1 C(lambda_s)``;
* time multiplexing, where the channel measured at a probe instant is reused
  for the pulses that follow it until the next probe.

All ensemble averages weight each pass equally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channel import PassModel, channel_geometry
from .jones import JonesVector, VERTICAL, compensation_residual, inverse, normalize, qber_terms, stokes

# pulse offsets evaluated per probe interval; longer trains are subsampled evenly
MAX_OFFSETS = 32

ChannelFn = Callable[[np.ndarray], np.ndarray]


def _check_ensemble(passes: Sequence[PassModel]) -> None:
    if len(passes) == 0:
        raise ValueError("pass ensemble is empty")


def probe_wavelength_qber_per_pass(
    passes: Sequence[PassModel], signal_wavelength: float, probe_wavelengths: Sequence[float]
) -> np.ndarray:
    """Time-averaged error rate for every (probe wavelength, pass) pair.

    The pass geometry is computed once per pass and reused for every
    wavelength. Returns an array of shape ``(len(probe_wavelengths), len(passes))``.
    """
    _check_ensemble(passes)
    probes = [float(w) for w in probe_wavelengths]
    out = np.empty((len(probes), len(passes)))
    for j, model in enumerate(passes):
        if model.mirror is not None:
            # raises for wavelengths outside the index table
            model.mirror(signal_wavelength)
            for w in probes:
                model.mirror(w)
        geo = channel_geometry(model, model.times())
        c_signal = geo.jones(model.mirror, signal_wavelength)
        for i, w in enumerate(probes):
            if w == signal_wavelength:
                out[i, j] = 0.0
                continue
            e = compensation_residual(geo.jones(model.mirror, w), c_signal)
            out[i, j] = np.mean(qber_terms(e))
    return np.clip(out, 0.0, 1.0)


def probe_wavelength_qber(passes: Sequence[PassModel], signal_wavelength: float, probe_wavelength: float) -> float:
    """Ensemble-average error rate of the probe-wavelength scheme."""
    per_pass = probe_wavelength_qber_per_pass(passes, signal_wavelength, [probe_wavelength])
    return float(per_pass.mean())


def _pulse_offsets(probe_rate: float, pulses: int) -> np.ndarray:
    """Pulse delays after the probe: i/(f_P N) for i < N, subsampled to MAX_OFFSETS."""
    period = 1.0 / probe_rate
    k = min(pulses, MAX_OFFSETS)
    if k == pulses:
        return period * np.arange(pulses) / pulses
    idx = np.floor(np.arange(k) * pulses / k)
    return period * idx / pulses


def multiplexed_qber(
    channel: ChannelFn,
    probe_times: np.ndarray,
    window_end: float,
    probe_rate: float,
    pulses: int,
) -> float:
    """Mean error over pulses compensated with the channel seen at their probe.

    ``channel`` maps an array of times to ``(T, 2, 2)`` Jones matrices.
    Each entry of ``probe_times`` stands for one probe instant; pulses whose
    time falls after ``window_end`` are dropped.
    """
    if probe_rate <= 0:
        raise ValueError("probe rate must be > 0")
    if pulses < 1:
        raise ValueError("need at least one pulse per probe interval")
    probe_times = np.asarray(probe_times, dtype=float)
    offsets = _pulse_offsets(probe_rate, pulses)
    t_pulse = probe_times[:, None] + offsets[None, :]
    keep = t_pulse <= window_end
    c_probe_inv = inverse(channel(probe_times))
    errors = []
    for k in range(offsets.size):
        rows = keep[:, k]
        if not np.any(rows):
            continue
        if offsets[k] == 0.0:
            errors.append(np.zeros(int(rows.sum())))
            continue
        e = normalize(c_probe_inv[rows] @ channel(t_pulse[rows, k]))
        errors.append(qber_terms(e))
    return float(np.clip(np.mean(np.concatenate(errors)), 0.0, 1.0))


def time_multiplexed_qber_per_pass(
    passes: Sequence[PassModel],
    probe_rate: float,
    pulses: int,
    wavelength: float = 800e-9,
    probe_stride: int = 1,
) -> np.ndarray:
    """Per-pass error rate of the time-multiplexed scheme.

    Probe instants are taken on the pass sampling grid (every
    ``probe_stride``-th sample), so the result is the average over probe
    phase relative to the pass rather than one particular probe schedule.
    """
    _check_ensemble(passes)
    if probe_stride < 1:
        raise ValueError("probe_stride must be >= 1")
    out = np.empty(len(passes))
    for j, model in enumerate(passes):
        t = model.times()
        end = float(t[-1])
        t = t[::probe_stride]

        def channel(times, model=model):
            return channel_geometry(model, times).jones(model.mirror, wavelength)

        out[j] = multiplexed_qber(channel, t, end, probe_rate, pulses)
    return out


def time_multiplexed_qber(
    passes: Sequence[PassModel],
    probe_rate: float,
    pulses: int,
    wavelength: float = 800e-9,
    probe_stride: int = 1,
) -> float:
    """Ensemble-average error rate of the time-multiplexed scheme."""
    return float(time_multiplexed_qber_per_pass(passes, probe_rate, pulses, wavelength, probe_stride).mean())


@dataclass(frozen=True)
class StokesSeries:
    """Stokes parameters of the received state and their time derivatives."""

    times: np.ndarray
    stokes: np.ndarray
    derivative: np.ndarray

    @property
    def max_abs_derivative(self) -> np.ndarray:
        return np.max(np.abs(self.derivative), axis=0)


def stokes_series(
    model: PassModel, input_state: JonesVector = VERTICAL, wavelength: float = 800e-9
) -> StokesSeries:
    """Received Stokes vector over a pass; derivatives by central differences."""
    t = model.times()
    c = channel_geometry(model, t).jones(model.mirror, wavelength)
    s = stokes(c @ input_state.array)
    if t.size < 2:
        d = np.zeros_like(s)
    else:
        d = np.gradient(s, t, axis=0, edge_order=1)
    return StokesSeries(t, s, d)


@dataclass(frozen=True)
class StokesStatistics:
    """Histograms of dS_j/dt pooled over an ensemble.

    ``counts[j]`` and ``bin_edges[j]`` belong to Stokes component ``j + 1``.
    """

    counts: np.ndarray
    bin_edges: np.ndarray
    max_abs: np.ndarray
    n_passes: int
    n_samples: int

    def bin_centers(self, component: int) -> np.ndarray:
        e = self.bin_edges[component - 1]
        return 0.5 * (e[1:] + e[:-1])


def stokes_statistics(
    passes: Sequence[PassModel],
    input_state: JonesVector = VERTICAL,
    bins: int = 50,
    wavelength: float = 800e-9,
) -> StokesStatistics:
    """Pool dS_j/dt over every sample of every pass."""
    _check_ensemble(passes)
    derivs = np.concatenate([stokes_series(p, input_state, wavelength).derivative for p in passes])
    max_abs = np.max(np.abs(derivs), axis=0)
    counts, edges = [], []
    for j in range(3):
        half = max(float(max_abs[j]), 1e-12)
        c, e = np.histogram(derivs[:, j], bins=bins, range=(-half, half))
        counts.append(c)
        edges.append(e)
    return StokesStatistics(np.array(counts), np.array(edges), max_abs, len(passes), derivs.shape[0])


def required_probe_rate(max_stokes_error: float, max_stokes_rate: float) -> float:
    """Probe repetition rate keeping first-order Stokes drift below ``max_stokes_error``."""
    if max_stokes_error <= 0 or max_stokes_rate <= 0:
        raise ValueError("both arguments must be > 0")
    if not (math.isfinite(max_stokes_error) and math.isfinite(max_stokes_rate)):
        raise ValueError("both arguments must be finite")
    return max_stokes_rate / max_stokes_error

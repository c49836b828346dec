"""Asymptotic secret-key rates and entanglement coincidence SNR.

All key rates are per transmitted pulse and assume the asymptotic
(infinitely long key) regime; finite-size corrections are not applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

ASYMPTOTIC_NOTE = "asymptotic regime assumed"


@dataclass(frozen=True)
class ProtocolParams:
    """Source, detector and post-processing parameters.

    Attributes
    ----------
    mu, mu_prime : float
        Signal and decoy mean photon numbers (``mu < mu_prime``).
    f_ec : float
        Error-correction inefficiency (>= 1).
    e_opt : float
        Intrinsic optical error probability of detected signal photons.
    rep_rate : float
        Source repetition rate (Hz).
    pair_rate : float
        Entangled-pair emission rate (pairs/s).
    dark_rate : float
        Detector dark counts per second.
    local_efficiency : float
        Detection efficiency of a receiver co-located with the pair source.
    snr_mean_photons : float
        Mean photons per pulse used for link SNR figures (1 = ideal
        single-photon source).
    """

    mu: float = 0.27
    mu_prime: float = 0.4
    f_ec: float = 1.22
    e_opt: float = 0.01
    rep_rate: float = 1e7
    pair_rate: float = 1e6
    dark_rate: float = 200.0
    local_efficiency: float = 0.5
    snr_mean_photons: float = 1.0

    def __post_init__(self):
        if not 0 < self.mu < self.mu_prime:
            raise ValueError(f"need 0 < mu < mu_prime, got mu={self.mu}, mu_prime={self.mu_prime}")
        if self.f_ec < 1:
            raise ValueError(f"f_ec must be >= 1, got {self.f_ec}")
        if not 0 <= self.e_opt <= 0.5:
            raise ValueError(f"e_opt must be in [0, 0.5], got {self.e_opt}")
        for name in ("rep_rate", "pair_rate", "dark_rate", "snr_mean_photons"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0 < self.local_efficiency <= 1:
            raise ValueError("local_efficiency must be in (0, 1]")


@dataclass(frozen=True)
class ChannelOperatingPoint:
    """Detection statistics for one link efficiency and noise level.

    ``p_exp`` is the click probability per signal pulse, ``qber`` the error
    rate among those clicks, ``S_mu``/``S_mu_prime``/``S0`` the counting rates
    for the signal, decoy and vacuum intensities.
    """

    eta: float
    noise_per_gate: float
    mu: float
    p_exp: float
    qber: float
    S_mu: float
    S_mu_prime: float
    S0: float
    zero_rate: bool = False


@dataclass(frozen=True)
class KeyRate:
    """Key rate per pulse and per second, with the reason a rate is zero."""

    per_pulse: float
    per_second: float
    mu: float
    tagged_fraction: float
    qber: float
    flag: str = ""
    regime: str = ASYMPTOTIC_NOTE


def binary_entropy(x: float) -> float:
    """H2(x) in bits, with H2(0) = H2(1) = 0."""
    if not 0 <= x <= 1:
        raise ValueError(f"binary entropy needs 0 <= x <= 1, got {x}")
    if x == 0 or x == 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def operating_point(
    eta: float, noise_per_gate: float, params: ProtocolParams, mu: float | None = None
) -> ChannelOperatingPoint:
    """Poissonian click model with additive background per gate.

    Half of the background clicks are errors; signal clicks err with
    probability ``params.e_opt``.
    """
    if not 0 < eta <= 1:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    if noise_per_gate < 0:
        raise ValueError("noise_per_gate must be >= 0")
    mu = params.mu if mu is None else mu
    p_noise = min(noise_per_gate, 1.0)
    signal = -math.expm1(-mu * eta)
    p_exp = min(signal + p_noise, 1.0)
    if p_exp == 0:
        return ChannelOperatingPoint(eta, noise_per_gate, mu, 0.0, 0.0, 0.0, 0.0, 0.0, zero_rate=True)
    qber = min((0.5 * p_noise + params.e_opt * signal) / p_exp, 0.5)
    return ChannelOperatingPoint(
        eta=eta,
        noise_per_gate=noise_per_gate,
        mu=mu,
        p_exp=p_exp,
        qber=qber,
        S_mu=min(-math.expm1(-mu * eta) + p_noise, 1.0),
        S_mu_prime=min(-math.expm1(-params.mu_prime * eta) + p_noise, 1.0),
        S0=p_noise,
    )


def bb84_ideal_rate(op: ChannelOperatingPoint, params: ProtocolParams) -> float:
    """Single-photon BB84 key rate per pulse, clamped at zero."""
    e = op.qber
    if e >= 0.5 or op.p_exp == 0:
        return 0.0
    h = binary_entropy(e)
    return max(0.0, op.p_exp / 2.0 * (1.0 - params.f_ec * h - h))


def tagged_fraction(mu: float, eta: float) -> float:
    """Worst-case fraction of detections caused by multiphoton pulses."""
    if mu <= 0:
        raise ValueError(f"mu must be > 0, got {mu}")
    if not 0 < eta <= 1:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    # 1 - e^-mu - mu e^-mu, written to stay accurate for small mu
    multi = -math.expm1(-mu) - mu * math.exp(-mu)
    clicks = -math.expm1(-eta * mu)
    return min(max(multi / clicks, 0.0), 1.0)


def _gllp(op: ChannelOperatingPoint, delta: float, params: ProtocolParams) -> tuple[float, str]:
    if op.p_exp == 0:
        return 0.0, "no detections"
    if delta >= 1:
        return 0.0, "all detections tagged"
    e = op.qber
    e_single = e / (1.0 - delta)
    if e_single > 0.5:
        return 0.0, "error rate of untagged bits above 1/2"
    rate = op.p_exp / 2.0 * (
        (1.0 - delta) - params.f_ec * binary_entropy(e) - (1.0 - delta) * binary_entropy(e_single)
    )
    if rate <= 0:
        return 0.0, "privacy amplification exceeds key"
    return rate, ""


def gllp_rate(op: ChannelOperatingPoint, delta: float, params: ProtocolParams) -> float:
    """Weak-pulse BB84 key rate per pulse given tagged fraction ``delta``."""
    if not 0 <= delta <= 1:
        raise ValueError(f"tagged fraction must be in [0, 1], got {delta}")
    return _gllp(op, delta, params)[0]


def decoy_tagged_bound(S_mu: float, S_mu_prime: float, S0: float, mu: float, mu_prime: float) -> float:
    """Upper bound on the tagged fraction from vacuum + two-intensity decoys."""
    if not 0 < mu < mu_prime:
        raise ValueError("need 0 < mu < mu_prime")
    if S_mu <= 0:
        raise ValueError("signal counting rate S_mu must be > 0")
    first = mu / (mu_prime - mu) * (
        mu * math.exp(-mu) * S_mu_prime / (mu_prime * math.exp(-mu_prime) * S_mu) - 1.0
    )
    second = mu * math.exp(-mu) * S0 / (mu_prime * S_mu)
    return min(max(first + second, 0.0), 1.0)


def weak_pulse_key_rate(
    eta: float, noise_per_gate: float, params: ProtocolParams, mu: float | None = None
) -> KeyRate:
    """Weak-pulse BB84 with the worst-case tagged fraction (no decoys)."""
    op = operating_point(eta, noise_per_gate, params, mu)
    delta = tagged_fraction(op.mu, eta)
    rate, flag = _gllp(op, delta, params)
    return KeyRate(rate, rate * params.rep_rate, op.mu, delta, op.qber, flag)


def optimal_weak_pulse_key_rate(eta: float, noise_per_gate: float, params: ProtocolParams) -> KeyRate:
    """Weak-pulse BB84 rate maximised over the mean photon number."""

    def neg(log_mu):
        return -weak_pulse_key_rate(eta, noise_per_gate, params, math.exp(log_mu)).per_pulse

    # the optimum sits near mu ~ eta; search a bracket around it on a log scale
    grid = np.linspace(math.log(1e-9), math.log(1.0), 91)
    vals = [neg(g) for g in grid]
    i = int(np.argmin(vals))
    if vals[i] == 0:
        return weak_pulse_key_rate(eta, noise_per_gate, params, math.exp(grid[i]))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    best = res.x if res.fun <= vals[i] else grid[i]
    return weak_pulse_key_rate(eta, noise_per_gate, params, math.exp(best))


def decoy_key_rate(eta: float, noise_per_gate: float, params: ProtocolParams) -> KeyRate:
    """Three-intensity (vacuum, mu, mu') decoy-state BB84 rate."""
    op = operating_point(eta, noise_per_gate, params)
    if op.S_mu == 0:
        return KeyRate(0.0, 0.0, op.mu, 1.0, op.qber, "no detections")
    delta = decoy_tagged_bound(op.S_mu, op.S_mu_prime, op.S0, params.mu, params.mu_prime)
    rate, flag = _gllp(op, delta, params)
    return KeyRate(rate, rate * params.rep_rate, op.mu, delta, op.qber, flag)


# -- entanglement distribution ------------------------------------------------

Topology = Literal["sat-two-down", "sat-local-down", "ground-two-up", "ground-local-up"]
TOPOLOGIES: tuple[Topology, ...] = ("sat-two-down", "sat-local-down", "ground-two-up", "ground-local-up")
TOPOLOGY_ARMS = {
    "sat-two-down": ("down", "down"),
    "sat-local-down": ("local", "down"),
    "ground-two-up": ("up", "up"),
    "ground-local-up": ("local", "up"),
}

#: Minimum coincidence SNR for a Bell-inequality violation.
BELL_SNR = 6.0


@dataclass(frozen=True)
class EntanglementLinks:
    """Per-arm efficiencies and background rates (counts/s) for pair distribution."""

    downlink_efficiency: float
    uplink_efficiency: float
    ground_noise_rate: float
    satellite_noise_rate: float
    gate_s: float = 1e-9


@dataclass(frozen=True)
class CoincidenceReport:
    topology: str
    coincidences: float
    accidentals: float
    snr: float
    snr_db: float
    visibility: float
    feasible: bool


def visibility_from_snr(snr: float) -> float:
    """Coincidence visibility (C - C_acc)/(C + C_acc) = (SNR - 1)/(SNR + 1).

    Maps SNR 6 to 5/7 ~ 71 %.
    """
    if math.isinf(snr):
        return 1.0
    return (snr - 1.0) / (snr + 1.0)


def entanglement_snr(topology: str, links: EntanglementLinks, params: ProtocolParams) -> CoincidenceReport:
    """Good vs accidental coincidence rates for one source/receiver topology."""
    if topology not in TOPOLOGY_ARMS:
        raise ValueError(f"unknown topology {topology!r}; expected one of {TOPOLOGIES}")
    arms = []
    for kind in TOPOLOGY_ARMS[topology]:
        if kind == "local":
            arms.append((params.local_efficiency, 0.0))
        elif kind == "down":
            arms.append((links.downlink_efficiency, links.ground_noise_rate))
        else:
            arms.append((links.uplink_efficiency, links.satellite_noise_rate))
    p0 = params.pair_rate
    (eta1, n1), (eta2, n2) = arms
    good = p0 * eta1 * eta2
    singles1 = p0 * eta1 + n1 + params.dark_rate
    singles2 = p0 * eta2 + n2 + params.dark_rate
    acc = singles1 * singles2 * links.gate_s
    ratio = good / acc if acc > 0 else math.inf
    ratio_db = 10 * math.log10(ratio) if ratio > 0 else -math.inf
    return CoincidenceReport(
        topology, good, acc, ratio, ratio_db, visibility_from_snr(ratio), ratio >= BELL_SNR
    )

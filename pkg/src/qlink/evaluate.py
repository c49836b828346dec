"""Single-point evaluations of a scenario, shared by figures and sweeps.

Receiver conventions: on an uplink the satellite telescope collects moonlit
(night) or sunlit (day) Earthshine; on a downlink the ground telescope
collects sky background. Every arm also sees ``protocol.dark_rate_hz``.
"""

from __future__ import annotations

import math

from . import atmosphere, keyrate, radiometry
from .scenario import Scenario


def link(scn: Scenario, direction: str | None = None) -> dict[str, float]:
    """Beam widths, efficiency and attenuation for the scenario link."""
    budget = atmosphere.evaluate_link(scn.geometry(direction), scn.profile(), scn.link.eta0)
    w = budget.widths
    return {
        "fried_m": w.fried,
        "w_lt_m": w.long_term,
        "w_st_m": w.short_term,
        "beta2_m2": w.wander_variance,
        "wander_ratio": budget.wander_ratio,
        "eta": budget.efficiency,
        "attenuation_db": budget.attenuation_db,
    }


def background_rate(scn: Scenario, direction: str | None = None, condition: str | None = None) -> float:
    """Filtered background photons per second reaching the receiver detector."""
    direction = direction or scn.link.direction
    condition = condition or scn.noise.condition
    env = scn.environment()
    geom = scn.geometry(direction)
    if direction == "uplink":
        if condition == "day":
            per_nm = radiometry.uplink_day_noise(env, geom.rx_radius, geom.ifov)
        else:
            per_nm = radiometry.uplink_night_noise(env, geom.rx_radius, geom.ifov, geom.wavelength)
        return per_nm * scn.filter.bandwidth_nm
    omega = radiometry.solid_angle(geom.ifov)
    return radiometry.downlink_noise_power(env, omega, geom.rx_radius, scn.filter.bandwidth_nm, geom.wavelength).photon_rate


def noise_per_gate(scn: Scenario, direction: str | None = None, condition: str | None = None) -> float:
    """Background plus dark counts expected inside one detector gate."""
    rate = background_rate(scn, direction, condition) + scn.protocol.dark_rate_hz
    return rate * scn.filter.gate_s


def snr(scn: Scenario, direction: str | None = None, condition: str | None = None) -> dict[str, float]:
    lk = link(scn, direction)
    signal = scn.protocol.snr_mean_photons * lk["eta"]
    noise_rate = background_rate(scn, direction, condition)
    rep = radiometry.snr(signal, noise_rate, scn.window(), scn.protocol.dark_rate_hz)
    return {
        "eta": lk["eta"],
        "noise_rate_hz": noise_rate,
        "signal_per_gate": rep.signal,
        "noise_per_gate": rep.noise,
        "snr": rep.snr,
        "snr_db": rep.snr_db,
    }


def key_rate(scn: Scenario, direction: str | None = None) -> dict[str, float]:
    """Weak-pulse (GLLP, protocol mu) and decoy-state key rates."""
    params = scn.protocol_params()
    eta = link(scn, direction)["eta"]
    noise = noise_per_gate(scn, direction)
    weak = keyrate.weak_pulse_key_rate(eta, noise, params)
    decoy = keyrate.decoy_key_rate(eta, noise, params)
    return {
        "eta": eta,
        "noise_per_gate": noise,
        "qber": weak.qber,
        "tagged_fraction": weak.tagged_fraction,
        "gllp_rate": weak.per_pulse,
        "gllp_bps": weak.per_second,
        "decoy_tagged_bound": decoy.tagged_fraction,
        "decoy_rate": decoy.per_pulse,
        "decoy_bps": decoy.per_second,
    }


def entanglement_links(scn: Scenario) -> keyrate.EntanglementLinks:
    """Both link directions at the scenario distance, night conditions."""
    return keyrate.EntanglementLinks(
        downlink_efficiency=link(scn, "downlink")["eta"],
        uplink_efficiency=link(scn, "uplink")["eta"],
        ground_noise_rate=background_rate(scn, "downlink"),
        satellite_noise_rate=background_rate(scn, "uplink", "night"),
        gate_s=scn.filter.gate_s,
    )


def entanglement(scn: Scenario) -> dict[str, keyrate.CoincidenceReport]:
    links = entanglement_links(scn)
    params = scn.protocol_params()
    return {t: keyrate.entanglement_snr(t, links, params) for t in keyrate.TOPOLOGIES}


def entanglement_row(scn: Scenario) -> dict[str, float]:
    out: dict[str, float] = {}
    for topo, rep in entanglement(scn).items():
        key = topo.replace("-", "_")
        out[f"snr_db_{key}"] = rep.snr_db
    return out


def qber_probe(scn: Scenario) -> dict[str, float]:
    from .polarization.schemes import probe_wavelength_qber

    pm = scn.pass_model
    passes = scn.pass_ensemble()
    return {"qber": probe_wavelength_qber(passes, pm.signal_wavelength_m, pm.probe_wavelength_m)}


def qber_multiplexed(scn: Scenario) -> dict[str, float]:
    from .polarization.schemes import time_multiplexed_qber

    pm = scn.pass_model
    passes = scn.pass_ensemble()
    n = scn.pulses_per_probe(pm.probe_rate_hz)
    q = time_multiplexed_qber(passes, pm.probe_rate_hz, n, pm.signal_wavelength_m, pm.probe_stride)
    return {"pulses_per_probe": float(n), "qber": q}


QUANTITY_FUNCS = {
    "attenuation": link,
    "snr": snr,
    "key_rate": key_rate,
    "entanglement": entanglement_row,
    "qber_probe": qber_probe,
    "qber_multiplexed": qber_multiplexed,
}


def evaluate(scn: Scenario, quantity: str) -> dict[str, float]:
    if quantity not in QUANTITY_FUNCS:
        raise ValueError(f"unknown quantity {quantity!r}")
    return QUANTITY_FUNCS[quantity](scn)


def all_finite(row: dict[str, float]) -> bool:
    return all(math.isfinite(v) for v in row.values() if isinstance(v, float))

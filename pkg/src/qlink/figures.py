"""Figure data commands: one long-format CSV plus a metadata JSON per figure.

Figures 3, 8 and 9 are schematics or single illustrative curves and have no
data command; ``qlink.polarization.stokes_series`` produces the latter.

Each figure declares the sweep axes it reads. Columns are fixed per figure
(see ``FIGURES[...].columns``) and floats are written with 12 significant
digits so that identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__, evaluate, sync
from .keyrate import ASYMPTOTIC_NOTE
from .polarization.jones import VERTICAL
from .polarization.schemes import (
    probe_wavelength_qber_per_pass,
    stokes_statistics,
    time_multiplexed_qber_per_pass,
)
from .scenario import Scenario, ScenarioError


class NumericalError(ArithmeticError):
    """A computed output was NaN or infinite."""


@dataclass(frozen=True)
class FigureResult:
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict


@dataclass(frozen=True)
class Figure:
    id: str
    title: str
    axes: tuple[str, ...]
    columns: tuple[str, ...]
    default_scenario: str
    direction: str | None
    compute: Callable[[Scenario], FigureResult]
    key_rates: bool = False


def _axis_values(scn: Scenario, param: str) -> tuple[float, ...]:
    a = scn.axis(param)
    if a is None:
        raise ScenarioError("sweep", f"axis {param!r} is required")
    return a.values


def _km(x: float) -> float:
    return x / 1e3


# -- atmosphere -------------------------------------------------------------


def _fig1(scn: Scenario) -> FigureResult:
    rows = []
    for L in _axis_values(scn, "link.distance_m"):
        for d in _axis_values(scn, "link.satellite_aperture_m"):
            r = evaluate.link(scn.with_values({"link.distance_m": L, "link.satellite_aperture_m": d}))
            rows.append((_km(L), d, r["fried_m"], r["w_lt_m"], r["eta"], r["attenuation_db"]))
    att = [r[-1] for r in rows]
    return FigureResult(FIGURES["fig1"].columns, rows, {"min_attenuation_db": min(att), "max_attenuation_db": max(att)})


def _fig2(scn: Scenario) -> FigureResult:
    rows = []
    for L in _axis_values(scn, "link.distance_m"):
        r = evaluate.link(scn.with_values({"link.distance_m": L}))
        rows.append((_km(L), r["beta2_m2"], r["wander_ratio"]))
    return FigureResult(FIGURES["fig2"].columns, rows, {"max_ratio": max(r[2] for r in rows)})


# -- radiometry -------------------------------------------------------------


def _fig4(scn: Scenario) -> FigureResult:
    rows = []
    bw, gate = scn.filter.bandwidth_nm, scn.filter.gate_s
    for cond in ("day", "night"):
        for ifov in _axis_values(scn, "link.satellite_ifov_rad"):
            rate = evaluate.background_rate(scn.with_values({"link.satellite_ifov_rad": ifov}), "uplink", cond)
            rows.append((cond, ifov * 1e6, rate / bw, rate * gate))
    n = len(rows) // 2
    ratios = [rows[n + i][2] / rows[i][2] for i in range(n) if rows[i][2] > 0]
    return FigureResult(FIGURES["fig4"].columns, rows, {"night_to_day_ratio": ratios[0] if ratios else 0.0})


def _fig5(scn: Scenario) -> FigureResult:
    rows = []
    for cond in ("day", "night"):
        for ifov in _axis_values(scn, "link.satellite_ifov_rad"):
            for L in _axis_values(scn, "link.distance_m"):
                s = scn.with_values({"link.satellite_ifov_rad": ifov, "link.distance_m": L})
                r = evaluate.snr(s, "uplink", cond)
                rows.append((cond, ifov * 1e6, _km(L), r["eta"], r["signal_per_gate"], r["noise_per_gate"], r["snr_db"]))
    summary = {}
    for cond in ("day", "night"):
        vals = [r[-1] for r in rows if r[0] == cond]
        summary[f"{cond}_max_snr_db"] = max(vals)
        summary[f"{cond}_min_snr_db"] = min(vals)
    return FigureResult(FIGURES["fig5"].columns, rows, summary)


def _fig6(scn: Scenario) -> FigureResult:
    rows = []
    sky0 = scn.noise.sky_brightness
    d0 = scn.link.satellite_aperture_m
    for L in _axis_values(scn, "link.distance_m"):
        for d in _axis_values(scn, "link.satellite_aperture_m"):
            s = scn.with_values({"link.distance_m": L, "link.satellite_aperture_m": d})
            r = evaluate.snr(s, "downlink")
            rows.append(("attenuation", _km(L), d, sky0, evaluate.link(s, "downlink")["attenuation_db"], r["snr_db"]))
    for L in _axis_values(scn, "link.distance_m"):
        for sky in _axis_values(scn, "noise.sky_brightness"):
            s = scn.with_values({"link.distance_m": L, "noise.sky_brightness": sky})
            r = evaluate.snr(s, "downlink")
            rows.append(("snr", _km(L), d0, sky, evaluate.link(s, "downlink")["attenuation_db"], r["snr_db"]))
    att = [r[4] for r in rows if r[0] == "attenuation"]
    return FigureResult(FIGURES["fig6"].columns, rows, {"min_attenuation_db": min(att), "max_attenuation_db": max(att)})


# -- sync -------------------------------------------------------------------


def ranging_series(scn: Scenario) -> sync.RangingSeries:
    cfg = scn.sync
    if cfg.ranging_file is not None:
        path = Path(cfg.ranging_file)
        if not path.is_absolute() and scn.source is not None:
            path = Path(scn.source).parent / path
        return sync.ingest_ranging(path)
    return sync.synthesize_pass(cfg.altitude_m, cfg.rate_hz, cfg.max_elevation_deg, cfg.min_elevation_deg, cfg.convention)


def sync_summary(stats: sync.DriftStats, accuracy: float, convention: str) -> dict:
    rate = sync.required_sync_rate(stats.max_abs, accuracy)
    return {
        "convention": convention,
        "max_abs_drift_s_per_s": stats.max_abs,
        "range_rate_m_s": stats.range_rate,
        "geometric_range_rate_m_s": stats.geometric_range_rate,
        "target_accuracy_s": accuracy,
        "sync_rate_hz": rate.base,
        "sync_rate_band_hz": [rate.low, rate.high],
    }


def _fig7(scn: Scenario) -> FigureResult:
    series = ranging_series(scn)
    stats = sync.drift_statistics(series, scn.sync.histogram_bins)
    rows = [("drift", t, d) for t, d in zip(stats.epochs.tolist(), stats.drift.tolist())]
    rows += [("histogram", c, int(n)) for c, n in zip(stats.bin_centers.tolist(), stats.counts.tolist())]
    summary = sync_summary(stats, scn.sync.target_accuracy_s, series.convention)
    summary["panels"] = {
        "drift": {"x": "epoch_s", "y": "dtau_dt_s_per_s"},
        "histogram": {"x": "bin_center_s_per_s", "y": "count"},
    }
    summary["gaps"] = list(series.gaps)
    return FigureResult(FIGURES["fig7"].columns, rows, summary)


# -- polarization -----------------------------------------------------------


def _fig10(scn: Scenario) -> FigureResult:
    pm = scn.pass_model
    probes = _axis_values(scn, "pass_model.probe_wavelength_m")
    mirror = scn.mirror()
    for w in (pm.signal_wavelength_m, *probes):
        if mirror is not None:
            lo, hi = mirror.span_nm
            if not lo <= w * 1e9 <= hi:
                raise ScenarioError("pass_model.probe_wavelength_m", f"{w * 1e9:g} nm outside index table [{lo:g}, {hi:g}] nm")
    passes = scn.pass_ensemble()
    per_pass = probe_wavelength_qber_per_pass(passes, pm.signal_wavelength_m, probes)
    n_s = mirror(pm.signal_wavelength_m) if mirror is not None else complex(math.inf)
    rows = []
    for w, q in zip(probes, per_pass):
        dn = abs(mirror(w) - n_s) if mirror is not None else 0.0
        rows.append((w * 1e9, dn, float(q.mean()), float(q.max())))
    return FigureResult(FIGURES["fig10"].columns, rows, {"max_qber": max(r[2] for r in rows), "n_passes": len(passes)})


def _fig11(scn: Scenario) -> FigureResult:
    pm = scn.pass_model
    rows = []
    maxima = {}
    for alt in pm.altitudes_m:
        stats = stokes_statistics(scn.pass_ensemble(alt), VERTICAL, pm.histogram_bins, pm.signal_wavelength_m)
        for j in (1, 2, 3):
            for c, n in zip(stats.bin_centers(j).tolist(), stats.counts[j - 1].tolist()):
                rows.append((_km(alt), f"S{j}", c, int(n)))
        maxima[f"{_km(alt):g}"] = {f"S{j}": float(stats.max_abs[j - 1]) for j in (1, 2, 3)}
    return FigureResult(FIGURES["fig11"].columns, rows, {"max_abs_derivative": maxima, "n_passes": pm.n_passes})


def _fig12(scn: Scenario) -> FigureResult:
    pm = scn.pass_model
    rates = _axis_values(scn, "pass_model.probe_rate_hz")
    rows = []
    for alt in pm.altitudes_m:
        passes = scn.pass_ensemble(alt)
        for f in rates:
            n = scn.pulses_per_probe(f)
            q = time_multiplexed_qber_per_pass(passes, f, n, pm.signal_wavelength_m, pm.probe_stride)
            rows.append((_km(alt), f, n, float(q.mean())))
    return FigureResult(FIGURES["fig12"].columns, rows, {"n_passes": pm.n_passes})


# -- key rates ---------------------------------------------------------------


def _fig13(scn: Scenario) -> FigureResult:
    rows = []
    for L in _axis_values(scn, "link.distance_m"):
        r = evaluate.key_rate(scn.with_values({"link.distance_m": L}))
        rows.append((scn.link.direction, _km(L), r["eta"], r["noise_per_gate"], r["qber"], r["tagged_fraction"], r["gllp_rate"], r["gllp_bps"]))
    return FigureResult(FIGURES["fig13"].columns, rows, {"mu": scn.protocol.mu, "max_rate_per_pulse": max(r[6] for r in rows)})


def _fig14(scn: Scenario) -> FigureResult:
    rows = []
    for L in _axis_values(scn, "link.distance_m"):
        r = evaluate.key_rate(scn.with_values({"link.distance_m": L}))
        rows.append((scn.link.direction, _km(L), r["eta"], r["noise_per_gate"], r["qber"], r["decoy_tagged_bound"], r["decoy_rate"], r["decoy_bps"]))
    return FigureResult(
        FIGURES["fig14"].columns,
        rows,
        {"mu": scn.protocol.mu, "mu_prime": scn.protocol.mu_prime, "max_rate_per_pulse": max(r[6] for r in rows)},
    )


def _fig15(scn: Scenario) -> FigureResult:
    rows = []
    for L in _axis_values(scn, "link.distance_m"):
        reps = evaluate.entanglement(scn.with_values({"link.distance_m": L}))
        for topo, rep in reps.items():
            rows.append((topo, _km(L), rep.coincidences, rep.accidentals, rep.snr, rep.snr_db, rep.visibility, rep.feasible))
    return FigureResult(FIGURES["fig15"].columns, rows, {"pair_rate_hz": scn.protocol.pair_rate_hz})


FIGURES: dict[str, Figure] = {
    f.id: f
    for f in (
        Figure("fig1", "uplink attenuation vs distance and receiver diameter",
               ("link.distance_m", "link.satellite_aperture_m"),
               ("L_km", "rx_diameter_m", "fried_m", "w_lt_m", "eta", "attenuation_db"),
               "default_uplink", "uplink", _fig1),
        Figure("fig2", "beam wander variance and its ratio to the short-term width",
               ("link.distance_m",), ("L_km", "beta2_m2", "ratio"), "default_uplink", "uplink", _fig2),
        Figure("fig4", "uplink background photons vs IFOV, day and night",
               ("link.satellite_ifov_rad",),
               ("condition", "ifov_urad", "photons_per_s_nm", "photons_per_gate"),
               "uplink_noise", "uplink", _fig4),
        Figure("fig5", "uplink SNR vs IFOV and distance, day and night",
               ("link.satellite_ifov_rad", "link.distance_m"),
               ("condition", "ifov_urad", "L_km", "eta", "signal_per_gate", "noise_per_gate", "snr_db"),
               "uplink_noise", "uplink", _fig5),
        Figure("fig6", "downlink attenuation and SNR vs sky brightness",
               ("link.distance_m", "link.satellite_aperture_m", "noise.sky_brightness"),
               ("panel", "L_km", "tx_diameter_m", "sky_brightness_w_m2_sr_um", "attenuation_db", "snr_db"),
               "downlink_noise", "downlink", _fig6),
        Figure("fig7", "ranging trip-time drift and its histogram",
               (), ("panel", "x", "y"), "sync_grace", None, _fig7),
        Figure("fig10", "probe-wavelength compensation error",
               ("pass_model.probe_wavelength_m",),
               ("probe_nm", "index_mismatch", "qber", "qber_max_pass"),
               "probe_wavelength", None, _fig10),
        Figure("fig11", "statistics of Stokes-parameter time derivatives",
               (), ("altitude_km", "component", "dsdt_per_s", "count"),
               "stokes_statistics", None, _fig11),
        Figure("fig12", "time-multiplexed compensation error vs probe rate",
               ("pass_model.probe_rate_hz",),
               ("altitude_km", "probe_rate_hz", "pulses_per_probe", "qber"),
               "time_multiplexed", None, _fig12),
        Figure("fig13", "weak-pulse BB84 key rate vs distance",
               ("link.distance_m",),
               ("direction", "L_km", "eta", "noise_per_gate", "qber", "tagged_fraction", "rate_per_pulse", "rate_bps"),
               "fig13_downlink", None, _fig13, key_rates=True),
        Figure("fig14", "decoy-state BB84 key rate vs distance",
               ("link.distance_m",),
               ("direction", "L_km", "eta", "noise_per_gate", "qber", "tagged_bound", "rate_per_pulse", "rate_bps"),
               "decoy_uplink", None, _fig14, key_rates=True),
        Figure("fig15", "entanglement coincidence SNR per topology",
               ("link.distance_m",),
               ("topology", "L_km", "coincidences_hz", "accidentals_hz", "snr", "snr_db", "visibility", "feasible"),
               "entanglement", None, _fig15, key_rates=True),
    )
}
NO_DATA_FIGURES = {"fig3": "uplink background geometry schematic", "fig8": "tracking-mirror schematic",
                   "fig9": "single-pass Stokes example (see stokes_series)"}


# -- output -------------------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0:
            return "0"
        return format(v, ".12g")
    return str(v)


def check_finite(rows: list[tuple], what: str) -> None:
    for i, row in enumerate(rows):
        for v in row:
            if isinstance(v, (float, np.floating)) and not math.isfinite(v):
                raise NumericalError(f"{what}: non-finite value in row {i + 1}: {row}")


def render_csv(columns: tuple[str, ...], rows: list[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def render_meta(meta: dict) -> str:
    return json.dumps(meta, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_outputs(out_dir: Path, stem: str, csv_text: str, meta_text: str) -> tuple[Path, Path]:
    """Write both files or neither: temporaries are renamed only when both exist."""
    out_dir.mkdir(parents=True, exist_ok=True)
    targets = (out_dir / f"{stem}.csv", out_dir / f"{stem}.meta.json")
    temps = [t.with_name(t.name + ".partial") for t in targets]
    try:
        for tmp, text in zip(temps, (csv_text, meta_text)):
            tmp.write_text(text, encoding="utf-8")
        for tmp, target in zip(temps, targets):
            os.replace(tmp, target)
    except BaseException:
        for p in (*temps, *targets):
            if p.exists():
                p.unlink()
        raise
    return targets


def check_compatible(fig: Figure, scn: Scenario) -> None:
    for param in fig.axes:
        if scn.axis(param) is None:
            raise ScenarioError("sweep", f"{fig.id} needs a sweep axis {param!r}")
    if fig.direction is not None and scn.link.direction != fig.direction:
        raise ScenarioError("link.direction", f"{fig.id} needs a {fig.direction} scenario")


def run_figure(figure_id: str, scn: Scenario, out_dir: str | Path) -> tuple[Path, Path]:
    """Compute one figure and write ``<id>.csv`` and ``<id>.meta.json``."""
    if figure_id in NO_DATA_FIGURES:
        raise ScenarioError("figure", f"{figure_id} ({NO_DATA_FIGURES[figure_id]}) has no data command")
    if figure_id not in FIGURES:
        raise ScenarioError("figure", f"unknown figure {figure_id!r}; expected one of {sorted(FIGURES, key=_fig_key)}")
    fig = FIGURES[figure_id]
    check_compatible(fig, scn)
    with np.errstate(over="ignore", under="ignore"):
        result = fig.compute(scn)
    check_finite(result.rows, figure_id)
    meta = {
        "figure": fig.id,
        "title": fig.title,
        "columns": list(result.columns),
        "rows": len(result.rows),
        "seed": scn.seed,
        "version": __version__,
        "scenario": scn.to_dict(),
        "summary": result.summary,
    }
    if fig.key_rates:
        meta["regime"] = ASYMPTOTIC_NOTE
    try:
        meta_text = render_meta(meta)
    except ValueError as exc:
        raise NumericalError(f"{figure_id}: non-finite summary value") from exc
    return write_outputs(Path(out_dir), fig.id, render_csv(result.columns, result.rows), meta_text)


def _fig_key(fid: str) -> int:
    return int(fid[3:])


def run_sweep(scn: Scenario, out_dir: str | Path) -> tuple[Path, Path]:
    """Cartesian sweep of ``scn.quantity`` over all axes, rows in axis order."""
    if not scn.sweep:
        raise ScenarioError("sweep", "at least one sweep axis is required")
    if scn.quantity is None:
        raise ScenarioError("quantity", f"missing; expected one of {list(evaluate.QUANTITY_FUNCS)}")
    rows = []
    columns: tuple[str, ...] | None = None
    axes = [a.param for a in scn.sweep]
    with np.errstate(over="ignore", under="ignore"):
        for point in scn.grid():
            values = evaluate.evaluate(scn.with_values(point), scn.quantity)
            if columns is None:
                columns = tuple(axes) + tuple(values)
            rows.append(tuple(point[a] for a in axes) + tuple(values.values()))
    assert columns is not None
    check_finite(rows, "sweep")
    meta = {
        "quantity": scn.quantity,
        "columns": list(columns),
        "rows": len(rows),
        "seed": scn.seed,
        "version": __version__,
        "scenario": scn.to_dict(),
    }
    if scn.quantity in ("key_rate", "entanglement"):
        meta["regime"] = ASYMPTOTIC_NOTE
    stem = f"{_safe_stem(scn.name)}.sweep"
    return write_outputs(Path(out_dir), stem, render_csv(columns, rows), render_meta(meta))


def _safe_stem(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name) or "scenario"

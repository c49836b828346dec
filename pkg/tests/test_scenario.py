import json
import math

import pytest

from qlink import evaluate, radiometry
from qlink.figures import run_sweep
from qlink.scenario import ScenarioError, bundled_scenarios, parse_scenario, scenario_from_dict


def _write(tmp_path, obj, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def test_minimal_uplink_defaults(tmp_path):
    scn = parse_scenario(_write(tmp_path, {"name": "m", "link": {"direction": "uplink"}}))
    assert scn.link.wavelength_m == 800e-9
    assert scn.geometry().rx_radius == pytest.approx(0.075)
    assert scn.sweep == ()


def test_unknown_key_named(tmp_path):
    p = _write(tmp_path, {"name": "m", "link": {"wavelenght": 8e-7}})
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(p)
    assert "wavelenght" in str(exc.value)
    assert exc.value.path == "link.wavelenght"


def test_missing_required_block():
    with pytest.raises(ScenarioError, match="link"):
        scenario_from_dict({"name": "m"})


def test_type_mismatch_path():
    with pytest.raises(ScenarioError) as exc:
        scenario_from_dict({"name": "m", "link": {"distance_m": "far"}})
    assert exc.value.path == "link.distance_m"


def test_sweep_unknown_param():
    with pytest.raises(ScenarioError, match="sweep"):
        scenario_from_dict({"name": "m", "link": {}, "sweep": [{"param": "link.nope", "values": [1]}]})


def test_empty_range_rejected():
    with pytest.raises(ScenarioError):
        scenario_from_dict({"name": "m", "link": {}, "sweep": [{"param": "link.distance_m", "values": []}]})


def test_bundled_fig13_axis():
    scn = parse_scenario("fig13_downlink")
    axis = scn.axis("link.distance_m")
    assert axis is not None
    assert (axis.values[0], axis.values[-1]) == (300e3, 2000e3)
    assert scn.link.direction == "downlink"
    assert scn.noise.sky_brightness == radiometry.SKY_BRIGHTNESS["new_moon"]


def test_all_bundled_round_trip():
    for name in bundled_scenarios():
        scn = parse_scenario(name)
        again = scenario_from_dict(json.loads(json.dumps(scn.to_dict())))
        assert again == scn, name


def test_validate_does_not_mutate(tmp_path):
    p = _write(tmp_path, {"name": "m", "link": {}})
    before = p.read_bytes()
    parse_scenario(p)
    assert p.read_bytes() == before


def _read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    return header, [dict(zip(header, l.split(","))) for l in lines[1:]]


def test_one_point_sweep_equals_direct_call(tmp_path):
    scn = scenario_from_dict(
        {"name": "one", "quantity": "attenuation", "link": {}, "sweep": [{"param": "link.distance_m", "values": [700e3]}]}
    )
    csv_path, _ = run_sweep(scn, tmp_path)
    _, rows = _read_csv(csv_path)
    direct = evaluate.link(scn.with_values({"link.distance_m": 700e3}))
    assert len(rows) == 1
    assert float(rows[0]["attenuation_db"]) == pytest.approx(direct["attenuation_db"], rel=1e-11)


def test_ten_by_ten_grid(tmp_path):
    scn = scenario_from_dict(
        {
            "name": "grid",
            "quantity": "attenuation",
            "link": {},
            "sweep": [
                {"param": "link.distance_m", "start": 500e3, "stop": 1400e3, "steps": 10},
                {"param": "link.satellite_aperture_m", "start": 0.1, "stop": 1.0, "steps": 10},
            ],
        }
    )
    csv_path, _ = run_sweep(scn, tmp_path)
    header, rows = _read_csv(csv_path)
    assert len(rows) == 100
    # lexicographic order: first axis slowest
    firsts = [float(r["link.distance_m"]) for r in rows]
    assert firsts == sorted(firsts)
    assert float(rows[0]["link.satellite_aperture_m"]) < float(rows[1]["link.satellite_aperture_m"])


def test_fig5_sweep_matches_radiometry(tmp_path):
    scn = parse_scenario("uplink_noise")
    csv_path, _ = run_sweep(scn, tmp_path)
    _, rows = _read_csv(csv_path)
    assert len(rows) == 70
    env = scn.environment()
    window = scn.window()
    for r in rows:
        ifov = float(r["link.satellite_ifov_rad"])
        L = float(r["link.distance_m"])
        point = scn.with_values({"link.satellite_ifov_rad": ifov, "link.distance_m": L})
        geom = point.geometry()
        eta = evaluate.link(point)["eta"]
        noise = radiometry.uplink_night_noise(env, geom.rx_radius, ifov) * window.bandwidth_nm
        rep = radiometry.snr(eta, noise, window, scn.protocol.dark_rate_hz)
        assert float(r["snr_db"]) == pytest.approx(rep.snr_db, rel=1e-10)


def test_log_axis():
    scn = parse_scenario("uplink_noise")
    v = scn.axis("link.satellite_ifov_rad").values
    assert v[0] == pytest.approx(1e-5) and v[-1] == pytest.approx(1e-4)
    assert v[1] / v[0] == pytest.approx(v[2] / v[1])

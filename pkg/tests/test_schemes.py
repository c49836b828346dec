import math

import numpy as np
import pytest

from qlink.polarization.channel import PassModel, pass_ensemble
from qlink.polarization.jones import rotation
from qlink.polarization.schemes import (
    MAX_OFFSETS,
    multiplexed_qber,
    probe_wavelength_qber,
    probe_wavelength_qber_per_pass,
    required_probe_rate,
    stokes_statistics,
    time_multiplexed_qber,
)

WL = 800e-9


@pytest.fixture(scope="module")
def passes():
    return pass_ensemble(500e3, 4, seed=11, sample_step=5.0)


def test_same_wavelength_is_error_free(passes):
    assert probe_wavelength_qber(passes, WL, WL) == 0.0


def test_ideal_mirrors_are_achromatic():
    ideal = pass_ensemble(500e3, 3, seed=1, mirror=None, sample_step=5.0)
    assert probe_wavelength_qber(ideal, WL, 700e-9) == pytest.approx(0.0, abs=1e-15)


def test_error_grows_with_wavelength_mismatch(passes):
    q = probe_wavelength_qber_per_pass(passes, WL, [790e-9, 750e-9, 700e-9]).mean(axis=1)
    assert q[0] < q[1] < q[2]
    assert q[2] < 1e-3


def test_frozen_channel_is_error_free():
    c = lambda t: np.broadcast_to(rotation(0.4), np.shape(t) + (2, 2))
    assert multiplexed_qber(c, np.arange(10.0), 100.0, 1.0, 8) == 0.0


def test_uniform_rotation_oracle():
    # C(t) = R(w t): residual for a pulse delayed by d is R(w d), error sin^2(w d)
    w, f, n = 0.05, 0.5, 16
    c = lambda t: rotation(w * np.asarray(t))
    offsets = np.arange(n) / (f * n)
    expected = np.mean(np.sin(w * offsets) ** 2)
    assert multiplexed_qber(c, np.arange(0.0, 50.0), 1e3, f, n) == pytest.approx(expected, rel=1e-12)


def test_subsampling_keeps_mean_close():
    w, f = 0.05, 0.5
    c = lambda t: rotation(w * np.asarray(t))
    n = 10_000
    exact = np.mean(np.sin(w * np.arange(n) / (f * n)) ** 2)
    got = multiplexed_qber(c, np.arange(0.0, 50.0), 1e3, f, n)
    assert n > MAX_OFFSETS
    assert got == pytest.approx(exact, rel=0.1)


def test_pulses_after_window_dropped():
    c = lambda t: rotation(0.05 * np.asarray(t))
    # one probe at the window end: only its zero-delay pulse survives
    assert multiplexed_qber(c, np.array([10.0]), 10.0, 0.1, 8) == 0.0


def test_time_multiplexed_monotone_in_probe_rate(passes):
    rates = [0.1, 1.0, 10.0]
    q = [time_multiplexed_qber(passes, f, 64, WL, probe_stride=4) for f in rates]
    assert q[0] > q[1] > q[2] >= 0


def test_stokes_statistics_shapes(passes):
    st = stokes_statistics(passes, bins=20)
    assert st.counts.shape == (3, 20)
    assert st.counts.sum(axis=1).tolist() == [st.n_samples] * 3
    assert st.bin_centers(2).shape == (20,)
    assert np.all(st.max_abs < 0.1)


def test_required_probe_rate():
    assert required_probe_rate(1e-5, 0.02) == pytest.approx(2000.0, rel=1e-12)
    with pytest.raises(ValueError):
        required_probe_rate(0.0, 1.0)


def test_validation(passes):
    with pytest.raises(ValueError):
        probe_wavelength_qber([], WL, WL)
    with pytest.raises(ValueError):
        time_multiplexed_qber(passes, 1.0, 10, probe_stride=0)
    with pytest.raises(ValueError):
        multiplexed_qber(lambda t: t, np.zeros(1), 1.0, 0.0, 1)

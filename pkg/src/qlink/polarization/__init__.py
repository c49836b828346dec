"""Jones-matrix model of a tracked satellite pass and compensation schemes."""

from .channel import ChannelGeometry, PassModel, channel_geometry, channel_jones, pass_ensemble
from .jones import (
    HORIZONTAL,
    VERTICAL,
    JonesVector,
    compensation_residual,
    condition_number,
    qber_from_residuals,
    qber_terms,
    rotation,
    stokes,
)
from .mirror import IndexTable, aluminum, drude_index, fresnel
from .schemes import (
    StokesSeries,
    StokesStatistics,
    probe_wavelength_qber,
    probe_wavelength_qber_per_pass,
    required_probe_rate,
    stokes_series,
    stokes_statistics,
    time_multiplexed_qber,
    time_multiplexed_qber_per_pass,
)

__all__ = [
    "ChannelGeometry",
    "HORIZONTAL",
    "IndexTable",
    "JonesVector",
    "PassModel",
    "StokesSeries",
    "StokesStatistics",
    "VERTICAL",
    "aluminum",
    "channel_geometry",
    "channel_jones",
    "compensation_residual",
    "condition_number",
    "drude_index",
    "fresnel",
    "pass_ensemble",
    "probe_wavelength_qber",
    "probe_wavelength_qber_per_pass",
    "qber_from_residuals",
    "qber_terms",
    "required_probe_rate",
    "rotation",
    "stokes",
    "stokes_series",
    "stokes_statistics",
    "time_multiplexed_qber",
    "time_multiplexed_qber_per_pass",
]

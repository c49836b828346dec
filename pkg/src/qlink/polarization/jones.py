"""Jones-calculus helpers, compensation residuals and the BB84 error rate.

Matrices are numpy arrays of shape ``(..., 2, 2)`` so that whole pass
samples can be processed in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class JonesVector:
    """Pure polarization state (A, B e^{i phi}) with A^2 + B^2 = 1."""

    A: float
    B: float
    phi: float = 0.0

    def __post_init__(self):
        if abs(self.A**2 + self.B**2 - 1.0) > 1e-12:
            raise ValueError(f"Jones vector must satisfy A^2 + B^2 = 1, got {self.A**2 + self.B**2}")

    @property
    def array(self) -> np.ndarray:
        return np.array([self.A, self.B * np.exp(1j * self.phi)], dtype=complex)


HORIZONTAL = JonesVector(1.0, 0.0)
VERTICAL = JonesVector(0.0, 1.0)


def rotation(theta) -> np.ndarray:
    """Real 2x2 rotation by ``theta`` (rad); broadcasts over arrays of angles."""
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty(np.shape(theta) + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def inverse(m: np.ndarray) -> np.ndarray:
    """Closed-form inverse of (..., 2, 2) matrices; raises if any is singular."""
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    scale = np.max(np.abs(m), axis=(-2, -1)) ** 2
    if np.any(np.abs(det) <= 1e-14 * scale) or np.any(scale == 0):
        raise np.linalg.LinAlgError("singular Jones matrix")
    inv = np.empty_like(m, dtype=complex)
    inv[..., 0, 0] = m[..., 1, 1]
    inv[..., 0, 1] = -m[..., 0, 1]
    inv[..., 1, 0] = -m[..., 1, 0]
    inv[..., 1, 1] = m[..., 0, 0]
    return inv / det[..., None, None]


def normalize(m: np.ndarray) -> np.ndarray:
    """Scale to unit determinant, removing common attenuation and global phase."""
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    return m / np.sqrt(det.astype(complex))[..., None, None]


def compensation_residual(c_probe: np.ndarray, c_signal: np.ndarray) -> np.ndarray:
    """Residual E = C_probe^-1 C_signal, normalised to unit determinant."""
    return normalize(inverse(np.asarray(c_probe, dtype=complex)) @ np.asarray(c_signal, dtype=complex))


def qber_terms(e: np.ndarray) -> np.ndarray:
    """Per-sample BB84 error probability for residuals ``e`` with equal state priors."""
    e11, e12, e21, e22 = e[..., 0, 0], e[..., 0, 1], e[..., 1, 0], e[..., 1, 1]
    correct = (
        3 * np.abs(e11) ** 2
        + 3 * np.abs(e22) ** 2
        + np.abs(e21) ** 2
        + np.abs(e12) ** 2
        + 2 * np.real(np.conj(e11) * e22)
        + 2 * np.real(np.conj(e12) * e21)
    )
    return 1.0 - correct / 8.0


def qber_from_residuals(e: np.ndarray) -> float:
    """Time-averaged BB84 error probability over a series of residual matrices."""
    e = np.asarray(e, dtype=complex)
    if e.ndim == 2:
        e = e[None]
    return float(np.clip(np.mean(qber_terms(e)), 0.0, 1.0))


def stokes(j: np.ndarray) -> np.ndarray:
    """Normalised Stokes vector (S1, S2, S3) of Jones vectors ``(..., 2)``."""
    a, b = j[..., 0], j[..., 1]
    s0 = np.abs(a) ** 2 + np.abs(b) ** 2
    s1 = np.abs(a) ** 2 - np.abs(b) ** 2
    cross = np.conj(a) * b
    return np.stack([s1, 2 * cross.real, 2 * cross.imag], axis=-1) / s0[..., None]


def condition_number(m: np.ndarray) -> np.ndarray:
    sv = np.linalg.svd(m, compute_uv=False)
    return sv[..., 0] / sv[..., -1]


def rotation_angle(m: np.ndarray) -> float:
    """Angle of a matrix proportional to a real rotation."""
    return math.atan2((m[1, 0] - m[0, 1]).real, (m[0, 0] + m[1, 1]).real)

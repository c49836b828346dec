"""Metallic mirror refractive index tables and Fresnel reflection.

Index tables are two-column text files: wavelength in nm and a complex
refractive index written the way Python's ``complex()`` parses it::

    # wavelength_nm n
    600 0.138+7.09j
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np


@dataclass(frozen=True, eq=False)
class IndexTable:
    """Complex refractive index sampled on increasing wavelengths (nm)."""

    wavelengths_nm: np.ndarray
    index: np.ndarray
    name: str = ""

    def __post_init__(self):
        wl = np.asarray(self.wavelengths_nm, dtype=float)
        n = np.asarray(self.index, dtype=complex)
        if wl.ndim != 1 or wl.shape != n.shape or wl.size < 2:
            raise ValueError("index table needs matching 1-D columns with >= 2 rows")
        if np.any(np.diff(wl) <= 0):
            raise ValueError("index table wavelengths must be strictly increasing")
        object.__setattr__(self, "wavelengths_nm", wl)
        object.__setattr__(self, "index", n)

    @property
    def span_nm(self) -> tuple[float, float]:
        return float(self.wavelengths_nm[0]), float(self.wavelengths_nm[-1])

    def __call__(self, wavelength: float) -> complex:
        """Linearly interpolated index at ``wavelength`` (m)."""
        nm = wavelength * 1e9
        lo, hi = self.span_nm
        if not lo - 1e-9 <= nm <= hi + 1e-9:
            raise ValueError(f"wavelength {nm:.3f} nm outside index table [{lo}, {hi}] nm")
        re = np.interp(nm, self.wavelengths_nm, self.index.real)
        im = np.interp(nm, self.wavelengths_nm, self.index.imag)
        return complex(re, im)

    def is_monotone(self) -> bool:
        d_re, d_im = np.diff(self.index.real), np.diff(self.index.imag)
        return bool((np.all(d_re >= 0) or np.all(d_re <= 0)) and (np.all(d_im >= 0) or np.all(d_im <= 0)))

    @classmethod
    def load(cls, path: str | Path) -> "IndexTable":
        wl, n = [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'wavelength_nm complex_n'")
                try:
                    wl.append(float(parts[0]))
                    n.append(complex(parts[1]))
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: cannot parse {line!r}") from None
        return cls(np.array(wl), np.array(n), name=Path(path).stem)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# wavelength_nm n\n")
            for w, n in zip(self.wavelengths_nm, self.index):
                fh.write(f"{w:g} {n.real:.6f}{n.imag:+.6f}j\n")


def drude_index(wavelength_nm, plasma_cm: float = 1.19e5, damping_cm: float = 660.0) -> np.ndarray:
    """Free-electron index n + ik; defaults are a free-electron fit to aluminum."""
    w = 1e7 / np.asarray(wavelength_nm, dtype=float)  # wavenumber in cm^-1
    eps = 1.0 - plasma_cm**2 / (w**2 + 1j * damping_cm * w)
    return np.sqrt(eps)


def aluminum() -> IndexTable:
    """Bundled aluminum-like table spanning 600-1000 nm."""
    ref = resources.files("qlink") / "data" / "aluminum_drude.txt"
    with resources.as_file(ref) as path:
        return IndexTable.load(path)


def fresnel(n, cos_incidence) -> tuple[np.ndarray, np.ndarray]:
    """Reflection coefficients (r_s, r_p) from vacuum onto a medium of index ``n``.

    Sign convention: p unit vectors are ``s x k`` on both sides, so a perfect
    conductor (``n = inf``) gives r_s = -1, r_p = +1. ``n = inf`` is accepted.
    """
    c = np.asarray(cos_incidence, dtype=float)
    if np.isinf(n):
        return -np.ones_like(c, dtype=complex), np.ones_like(c, dtype=complex)
    n2 = complex(n) ** 2
    nc = np.sqrt(n2 - (1.0 - c**2) + 0j)
    rs = (c - nc) / (c + nc)
    rp = (n2 * c - nc) / (n2 * c + nc)
    return rs, rp

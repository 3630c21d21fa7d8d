"""One-channel S matrix for two resonances and its double-pole limit."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "ResonancePair",
    "DoublePole",
    "LineShape",
    "s_matrix",
    "s_matrix_double_pole",
    "cross_section",
    "sample_line_shape",
    "local_maxima",
    "from_eigenvalues",
]


@dataclass(frozen=True)
class ResonancePair:
    """Energies ``E1, E2`` and widths ``G1, G2`` (Gamma, not Gamma/2), all >= 0 widths."""

    E1: float
    E2: float
    G1: float
    G2: float

    def __post_init__(self):
        for name in ("E1", "E2", "G1", "G2"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.G1 < 0 or self.G2 < 0:
            raise ValueError("widths must be non-negative")


@dataclass(frozen=True)
class DoublePole:
    E_d: float
    G_d: float

    def __post_init__(self):
        if not (math.isfinite(self.E_d) and math.isfinite(self.G_d)):
            raise ValueError("double pole parameters must be finite")
        if self.G_d <= 0:
            raise ValueError("G_d must be positive")


@dataclass(frozen=True)
class LineShape:
    E: np.ndarray
    S: np.ndarray
    sigma: np.ndarray


def from_eigenvalues(e1: complex, e2: complex) -> ResonancePair:
    """Resonance pair from complex eigenvalues ``E + i Gamma/2``; widths enter as ``|Gamma|``."""
    return ResonancePair(e1.real, e2.real, 2.0 * abs(e1.imag), 2.0 * abs(e2.imag))


def s_matrix(res: ResonancePair, E):
    """``prod_k (E - E_k + i G_k/2) / (E - E_k - i G_k/2)``; unimodular for real E."""
    E = np.asarray(E, dtype=float)
    s = np.ones_like(E, dtype=complex)
    for Ek, Gk in ((res.E1, res.G1), (res.E2, res.G2)):
        x = E - Ek
        s = s * (x + 0.5j * Gk) / (x - 0.5j * Gk)
    return s if s.ndim else complex(s)


def s_matrix_double_pole(E_d: float, G_d: float, E):
    """``1 + 2i G_d / x - G_d**2 / x**2`` with ``x = E - E_d - i G_d/2``."""
    if G_d <= 0:
        raise ValueError("G_d must be positive")
    x = np.asarray(E, dtype=float) - E_d - 0.5j * G_d
    s = 1.0 + 2j * G_d / x - G_d**2 / x**2
    return s if s.ndim else complex(s)


def cross_section(S):
    """``|1 - S|**2`` (up to the omitted kinematic prefactor)."""
    return np.abs(1.0 - np.asarray(S)) ** 2


def sample_line_shape(shape_src: Union[ResonancePair, DoublePole], E_min: float, E_max: float, n: int) -> LineShape:
    if not E_min < E_max:
        raise ValueError("need E_min < E_max")
    if n < 2:
        raise ValueError("need at least two samples")
    E = np.linspace(E_min, E_max, n)
    if isinstance(shape_src, DoublePole):
        S = s_matrix_double_pole(shape_src.E_d, shape_src.G_d, E)
    else:
        S = s_matrix(shape_src, E)
    return LineShape(E=E, S=S, sigma=cross_section(S))


def local_maxima(values) -> np.ndarray:
    """Indices of strict interior local maxima."""
    v = np.asarray(values)
    if v.size < 3:
        return np.array([], dtype=int)
    mid = v[1:-1]
    return np.nonzero((mid > v[:-2]) & (mid > v[2:]))[0] + 1

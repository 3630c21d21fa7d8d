"""Eigen-decomposition of the 2x2 families and eigenvector observables.

Conventions
-----------
* Square roots use the principal branch; when the real part is exactly zero
  the root with non-negative imaginary part is taken.  Index 0 is the ``+Z``
  branch.  Continuity along a parameter path is handled in :mod:`twolevel.sweep`.
* Eigenvectors are biorthogonal under the *bilinear* product ``x . y`` (no
  conjugation) and normalised so that ``L_k . R_k = 1``.  For a symmetric
  matrix ``L_k == R_k``.
* ``A_k = <R_k|R_k>`` uses the conjugating product; ``r_k = 1 / A_k``.
* At a defective point norms and overlaps are reported as ``inf`` instead of
  raising, so sweeps can pass straight through an exceptional point.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import Matrix2, OpenParams, Params, PtParams, PtVariant

__all__ = [
    "EigenSystem",
    "MixingCoefficients",
    "principal_sqrt",
    "wrap_phase",
    "discriminant",
    "discriminant_z",
    "eigenvalues_closed_form",
    "eigensystem",
    "phase_rigidity",
    "mixing_coefficients",
    "nonlinear_source_strength",
    "coalescence_ratio",
    "eigenvector_angle",
]

INF = math.inf
CINF = complex(math.inf, 0.0)

GAP_TOL = 1e-9
ANGLE_TOL = 1e-6


def principal_sqrt(z: complex) -> complex:
    """Square root with Re >= 0, and Im >= 0 when Re == 0."""
    s = cmath.sqrt(z)
    if s.real == 0.0 and s.imag < 0.0:
        s = -s
    return s


def wrap_phase(t: float) -> float:
    """Map an angle into (-pi, pi]."""
    t = math.remainder(t, 2.0 * math.pi)
    return math.pi if t <= -math.pi else t


def _bdot(x, y) -> complex:
    return x[0] * y[0] + x[1] * y[1]


def _cdot(x, y) -> complex:
    return x[0].conjugate() * y[0] + x[1].conjugate() * y[1]


def _norm2(x) -> float:
    return abs(x[0]) ** 2 + abs(x[1]) ** 2


def discriminant(params: Params) -> complex:
    """``D = 4 Z**2`` for the family of ``params``.

    Open: ``(eps1 - eps2)**2 + 4 omega**2``; PT balanced: ``4|w|**2 - gamma**2``;
    PT lossy: ``4|w|**2 - gamma**2 / 4``.  Evaluated in factored form so the
    value at an exceptional point is free of cancellation.
    """
    if isinstance(params, OpenParams):
        d = params.eps1 - params.eps2
        t = 2j * params.omega
        return (d + t) * (d - t)
    p = 2.0 * abs(params.w)
    g = params.gamma if params.variant is PtVariant.BALANCED else 0.5 * params.gamma
    return complex((p - g) * (p + g))


def discriminant_z(params: Params) -> complex:
    """``Z = sqrt(D) / 2`` on the principal branch (see module notes)."""
    return 0.5 * principal_sqrt(discriminant(params))


def eigenvalues_closed_form(params: Params) -> tuple[complex, complex]:
    """Closed-form eigenvalue pair ``(centre + Z, centre - Z)``."""
    z = discriminant_z(params)
    if isinstance(params, OpenParams):
        centre = 0.5 * (params.eps1 + params.eps2)
    elif params.variant is PtVariant.BALANCED:
        centre = complex(params.e)
    else:
        centre = complex(params.e, -0.25 * params.gamma)
    return centre + z, centre - z


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues and biorthogonal eigenvectors of a 2x2 matrix.

    ``right[:, k]`` and ``left[:, k]`` belong to ``eigenvalues[k]``.
    """

    matrix: Matrix2
    eigenvalues: tuple[complex, complex]
    right: np.ndarray
    left: np.ndarray
    norms: tuple[float, float]
    overlaps: tuple[complex, complex]
    rigidity: tuple[float, float]
    defective: bool
    gap: float

    @property
    def energies(self) -> tuple[float, float]:
        return self.eigenvalues[0].real, self.eigenvalues[1].real

    @property
    def half_widths(self) -> tuple[float, float]:
        """``Gamma_k / 2``, i.e. the literal imaginary parts."""
        return self.eigenvalues[0].imag, self.eigenvalues[1].imag

    def permuted(self, perm, signs=(1, 1)) -> "EigenSystem":
        """Reorder the eigenpairs and flip eigenvector signs (gauge)."""
        i, j = perm
        s = np.array([signs[0], signs[1]], dtype=float)
        return EigenSystem(
            matrix=self.matrix,
            eigenvalues=(self.eigenvalues[i], self.eigenvalues[j]),
            right=self.right[:, [i, j]] * s,
            left=self.left[:, [i, j]] * s,
            norms=(self.norms[i], self.norms[j]),
            overlaps=(self.overlaps[i], self.overlaps[j]),
            rigidity=(self.rigidity[i], self.rigidity[j]),
            defective=self.defective,
            gap=self.gap,
        )


def _null_vector(a12: complex, a21: complex, s: complex, delta: complex, k: int):
    """Null direction of ``[[delta - s, a12], [a21, -delta - s]]``.

    Picks the better conditioned of the two row-derived candidates; a zero
    matrix (scalar input) falls back to the k-th basis vector.
    """
    u = (a12, s - delta)
    v = (s + delta, a21)
    nu, nv = _norm2(u), _norm2(v)
    if nu == 0.0 and nv == 0.0:
        return (1.0 + 0j, 0j) if k == 0 else (0j, 1.0 + 0j)
    x = u if nu >= nv else v
    n = math.sqrt(max(nu, nv))
    return (x[0] / n, x[1] / n)


def _gauge_sign(x) -> int:
    """+1 if the larger component already has phase in (-pi/2, pi/2], else -1."""
    big = x[0] if abs(x[0]) >= abs(x[1]) else x[1]
    if big.real > 0.0 or (big.real == 0.0 and big.imag > 0.0):
        return 1
    return -1 if big != 0 else 1


def eigenvector_angle(sys_or_vectors) -> float:
    """Angle between the two right eigendirections (0 at coalescence)."""
    r = sys_or_vectors.right if isinstance(sys_or_vectors, EigenSystem) else sys_or_vectors
    x, y = r[:, 0], r[:, 1]
    det = abs(x[0] * y[1] - x[1] * y[0])
    return math.atan2(det, abs(_cdot(x, y)))


def eigensystem(m: Matrix2, gap_tol: float = GAP_TOL, angle_tol: float = ANGLE_TOL) -> EigenSystem:
    """Full biorthogonal eigensystem of ``m``.

    The matrix is flagged defective when ``|E1 - E2| < gap_tol * scale`` and the
    eigenvector angle is below ``angle_tol``; norms, rigidities and overlaps
    then carry the ``inf`` / 0 sentinels and the eigenvectors are unit length.
    """
    mean = 0.5 * (m.h11 + m.h22)
    delta = 0.5 * (m.h11 - m.h22)
    if m.h12 == m.h21:
        p = m.h12
    else:
        p = cmath.sqrt(m.h12) * cmath.sqrt(m.h21)
    s = principal_sqrt((delta + 1j * p) * (delta - 1j * p))
    branches = (s, -s)
    eigenvalues = (mean + s, mean - s)

    right = [_null_vector(m.h12, m.h21, sk, delta, k) for k, sk in enumerate(branches)]
    if m.is_symmetric:
        left = list(right)
    else:
        left = [_null_vector(m.h21, m.h12, sk, delta, k) for k, sk in enumerate(branches)]

    gap = abs(2.0 * s)
    R = np.array(right, dtype=complex).T
    defective = gap < gap_tol * m.scale and eigenvector_angle(R) < angle_tol
    if defective:
        return EigenSystem(
            matrix=m,
            eigenvalues=eigenvalues,
            right=R,
            left=np.array(left, dtype=complex).T,
            norms=(INF, INF),
            overlaps=(CINF, CINF),
            rigidity=(0.0, 0.0),
            defective=True,
            gap=gap,
        )

    norms, rigidity = [], []
    for k in range(2):
        c = _bdot(left[k], right[k])
        if c == 0:
            norms.append(INF)
            rigidity.append(0.0)
            continue
        root = principal_sqrt(c)
        rk = (right[k][0] / root, right[k][1] / root)
        lk = (left[k][0] / root, left[k][1] / root)
        sign = _gauge_sign(rk)
        right[k] = (sign * rk[0], sign * rk[1])
        left[k] = (sign * lk[0], sign * lk[1])
        norms.append(1.0 / abs(c))
        rigidity.append(min(1.0, abs(c)))

    overlaps = (_cdot(right[0], right[1]), _cdot(right[1], right[0]))
    return EigenSystem(
        matrix=m,
        eigenvalues=eigenvalues,
        right=np.array(right, dtype=complex).T,
        left=np.array(left, dtype=complex).T,
        norms=(norms[0], norms[1]),
        overlaps=overlaps,
        rigidity=(rigidity[0], rigidity[1]),
        defective=False,
        gap=gap,
    )


def phase_rigidity(sys: EigenSystem, k: int) -> float:
    """``r_k = |L_k . R_k| / (|L_k| |R_k|)``, equal to ``1 / A_k``; 0 at an EP."""
    if sys.defective:
        return 0.0
    r, l = sys.right[:, k], sys.left[:, k]
    return min(1.0, abs(_bdot(l, r)) / math.sqrt(_norm2(l) * _norm2(r)))


@dataclass(frozen=True)
class MixingCoefficients:
    """``b[i, j]``: component of eigenvector ``i`` on unperturbed basis state ``j``."""

    b: np.ndarray
    magnitudes: np.ndarray
    phases: np.ndarray


def mixing_coefficients(sys: EigenSystem) -> MixingCoefficients:
    b = sys.right.T.copy()
    phases = np.array([[wrap_phase(cmath.phase(z)) for z in row] for row in b])
    if sys.defective:
        mags = np.full((2, 2), INF)
    else:
        mags = np.abs(b)
    return MixingCoefficients(b=b, magnitudes=mags, phases=phases)


def nonlinear_source_strength(sys: EigenSystem, coupling: complex) -> tuple[float, float]:
    """``|<Phi_n|W|Phi_n>| * <Phi_n|Phi_n>`` for both eigenstates.

    ``W = -[[0, c], [c, 0]]``; the bracket with ``W`` is bilinear, the norm
    factor is ``A_n``.
    """
    c = complex(coupling)
    if c == 0:
        return 0.0, 0.0
    if sys.defective:
        return INF, INF
    out = []
    for n in range(2):
        r, l = sys.right[:, n], sys.left[:, n]
        w_r = (-c * r[1], -c * r[0])
        out.append(float(abs(_bdot(l, w_r)) * _norm2(r)))
    return out[0], out[1]


def coalescence_ratio(sys: EigenSystem) -> complex:
    """Best scalar ``rho`` with ``R_1 ~ rho * R_2`` (least squares).

    Tends to ``+-i`` as the two states approach an exceptional point, where
    ``Phi_1 -> +-i Phi_2``.  At a defective point the two columns of
    ``sys.right`` hold the single eigendirection and ``inf`` is returned.
    """
    if sys.defective:
        return CINF
    r1, r2 = sys.right[:, 0], sys.right[:, 1]
    return _cdot(r2, r1) / _norm2(r2)

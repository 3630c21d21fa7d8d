"""Two-level non-Hermitian Hamiltonian families and their parameter trajectories.

Three families are supported:

* ``Open``: the symmetric open-system matrix
  ``[[e1 + i*gamma1/2, omega], [omega, e2 + i*gamma2/2]]``
* ``PtBalanced``: ``[[e - i*gamma/2, w], [conj(w), e + i*gamma/2]]``
* ``PtLossy``: ``[[e - i*gamma/2, w], [conj(w), e]]``

Widths carry whatever sign the caller supplies; nothing is flipped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

__all__ = [
    "Kind",
    "PtVariant",
    "CouplingModel",
    "Matrix2",
    "OpenParams",
    "PtParams",
    "AffineLaw",
    "ParamTrajectory",
    "params_at",
    "build_matrix",
]


class Kind(str, Enum):
    OPEN = "open"
    PT_BALANCED = "pt_balanced"
    PT_LOSSY = "pt_lossy"


class PtVariant(str, Enum):
    BALANCED = "balanced"
    LOSSY = "lossy"


class CouplingModel(str, Enum):
    CONSTANT = "constant"
    GAUSSIAN = "gaussian"


def _finite_complex(value, name: str) -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {z!r}")
    return z


def _finite_real(value, name: str) -> float:
    x = float(value)
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return x


@dataclass(frozen=True)
class Matrix2:
    """A 2x2 complex matrix with finite entries."""

    h11: complex
    h12: complex
    h21: complex
    h22: complex

    def __post_init__(self):
        for name in ("h11", "h12", "h21", "h22"):
            object.__setattr__(self, name, _finite_complex(getattr(self, name), name))

    @classmethod
    def from_array(cls, m) -> "Matrix2":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 array, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def as_array(self) -> np.ndarray:
        return np.array([[self.h11, self.h12], [self.h21, self.h22]], dtype=complex)

    @property
    def is_symmetric(self) -> bool:
        return self.h12 == self.h21

    @property
    def is_pt_form(self) -> bool:
        return self.h21 == self.h12.conjugate()

    @property
    def scale(self) -> float:
        """max(1, largest entry magnitude); used for relative thresholds."""
        return max(1.0, abs(self.h11), abs(self.h12), abs(self.h21), abs(self.h22))


@dataclass(frozen=True)
class OpenParams:
    e1: float
    e2: float
    gamma1: float
    gamma2: float
    omega: complex

    def __post_init__(self):
        for name in ("e1", "e2", "gamma1", "gamma2"):
            object.__setattr__(self, name, _finite_real(getattr(self, name), name))
        object.__setattr__(self, "omega", _finite_complex(self.omega, "omega"))

    @property
    def eps1(self) -> complex:
        return complex(self.e1, 0.5 * self.gamma1)

    @property
    def eps2(self) -> complex:
        return complex(self.e2, 0.5 * self.gamma2)


@dataclass(frozen=True)
class PtParams:
    e: float
    gamma: float
    w: complex
    variant: PtVariant = PtVariant.BALANCED

    def __post_init__(self):
        object.__setattr__(self, "e", _finite_real(self.e, "e"))
        object.__setattr__(self, "gamma", _finite_real(self.gamma, "gamma"))
        object.__setattr__(self, "w", _finite_complex(self.w, "w"))
        object.__setattr__(self, "variant", PtVariant(self.variant))


Params = Union[OpenParams, PtParams]


@dataclass(frozen=True)
class AffineLaw:
    """``intercept + slope * a``."""

    intercept: float = 0.0
    slope: float = 0.0

    def __call__(self, a: float) -> float:
        return self.intercept + self.slope * a


@dataclass(frozen=True)
class ParamTrajectory:
    """One-parameter family ``a -> Hamiltonian``.

    For the PT kinds only ``e1`` (the common energy ``e``) and ``gamma1``
    (the gain/loss rate ``gamma``) are used. With the Gaussian coupling model
    the base coupling is multiplied by ``exp(-(e1(a) - e2(a))**2)``.
    """

    kind: Kind
    e1: AffineLaw = field(default_factory=AffineLaw)
    e2: AffineLaw = field(default_factory=AffineLaw)
    gamma1: AffineLaw = field(default_factory=AffineLaw)
    gamma2: AffineLaw = field(default_factory=AffineLaw)
    coupling: complex = 0j
    coupling_model: CouplingModel = CouplingModel.CONSTANT
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "coupling_model", CouplingModel(self.coupling_model))
        object.__setattr__(self, "coupling", _finite_complex(self.coupling, "coupling"))

    def coupling_at(self, a: float) -> complex:
        if self.coupling_model is CouplingModel.GAUSSIAN:
            de = self.e1(a) - self.e2(a)
            return self.coupling * math.exp(-de * de)
        return self.coupling

    def describe(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "e1": [self.e1.intercept, self.e1.slope],
            "e2": [self.e2.intercept, self.e2.slope],
            "gamma1": [self.gamma1.intercept, self.gamma1.slope],
            "gamma2": [self.gamma2.intercept, self.gamma2.slope],
            "coupling": [self.coupling.real, self.coupling.imag],
            "coupling_model": self.coupling_model.value,
        }


def params_at(traj: ParamTrajectory, a: float) -> Params:
    """Evaluate the trajectory laws at ``a``."""
    a = _finite_real(a, "a")
    c = traj.coupling_at(a)
    if traj.kind is Kind.OPEN:
        return OpenParams(traj.e1(a), traj.e2(a), traj.gamma1(a), traj.gamma2(a), c)
    variant = PtVariant.BALANCED if traj.kind is Kind.PT_BALANCED else PtVariant.LOSSY
    return PtParams(traj.e1(a), traj.gamma1(a), c, variant)


def build_matrix(params: Params) -> Matrix2:
    if isinstance(params, OpenParams):
        return Matrix2(params.eps1, params.omega, params.omega, params.eps2)
    half = 0.5 * params.gamma
    h22 = complex(params.e, half) if params.variant is PtVariant.BALANCED else complex(params.e)
    return Matrix2(complex(params.e, -half), params.w, params.w.conjugate(), h22)


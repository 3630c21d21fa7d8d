"""Exceptional points of two-level non-Hermitian Hamiltonians.

Open-system and PT-symmetric 2x2 models: eigenvalue and eigenvector
trajectories, exceptional-point location, phase rigidity, mixing
coefficients and S-matrix line shapes.
"""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    AffineLaw,
    CouplingModel,
    Kind,
    Matrix2,
    OpenParams,
    ParamTrajectory,
    PtParams,
    PtVariant,
    build_matrix,
    params_at,
)
from .spectral import (  # noqa: E402
    EigenSystem,
    discriminant_z,
    eigensystem,
    eigenvalues_closed_form,
    mixing_coefficients,
    phase_rigidity,
)
from .ep import EpRecord, RegimeTag, classify_regime, locate_eps_1d, locate_eps_2d  # noqa: E402
from .sweep import fig1_presets, run_sweep, export_table  # noqa: E402

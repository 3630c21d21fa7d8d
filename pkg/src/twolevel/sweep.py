"""Parameter sweeps with branch tracking, the two reference presets, and table export.

Branch continuity
-----------------
Consecutive eigensystems are matched by eigenvalue proximity.  When a sweep
steps across an exceptional point on a real-valued discriminant the two
pairings cost exactly the same; the tie is then broken by rotating the
previous half-splitting ``(E1 - E2)/2`` by ``-pi/2``, which is the analytic
continuation obtained by passing the branch point with an infinitesimally
positive imaginary part of ``a``.  Applied at both EPs of the open-system
preset this returns each state to its own unperturbed level beyond the EP
pair.  Eigenvector signs are carried along so that phases change smoothly.
"""
from __future__ import annotations

import cmath
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .ep import EP_TOL, EpRecord, RegimeTag, classify_regime, locate_eps_1d
from .model import AffineLaw, Kind, ParamTrajectory, build_matrix, params_at
from .spectral import EigenSystem, eigensystem, mixing_coefficients, wrap_phase

__all__ = [
    "SweepRow",
    "SweepTable",
    "BranchState",
    "BranchChoice",
    "CSV_COLUMNS",
    "LEFT_RANGE",
    "RIGHT_RANGE",
    "fig1_presets",
    "pair_branches",
    "advance_state",
    "run_sweep",
    "phase_jumps",
    "export_table",
    "parse_csv",
]

CSV_COLUMNS = (
    "a", "E1", "G1_half", "E2", "G2_half",
    "b11", "b12", "b21", "b22",
    "th11", "th12", "th21", "th22",
    "r1", "r2", "A1", "A2", "regime", "near_ep",
)

LEFT_RANGE = (0.0, 4.0)
RIGHT_RANGE = (0.0, 1.2)
NEAR_EP_FRACTION = 0.05


def fig1_presets() -> tuple[ParamTrajectory, ParamTrajectory]:
    """The (left, right) reference trajectories.

    Left: PT balanced, ``e = 0.5``, ``gamma = 0.05 a``, ``w = 0.05``.
    Right: open system, ``e1 = 1 - 0.5 a``, ``e2 = a``, ``gamma_i/2 = 0.5``,
    ``omega = 0.05i``.
    """
    left = ParamTrajectory(
        Kind.PT_BALANCED,
        e1=AffineLaw(0.5, 0.0),
        gamma1=AffineLaw(0.0, 0.05),
        coupling=0.05,
        name="fig1_left",
    )
    right = ParamTrajectory(
        Kind.OPEN,
        e1=AffineLaw(1.0, -0.5),
        e2=AffineLaw(0.0, 1.0),
        gamma1=AffineLaw(1.0, 0.0),
        gamma2=AffineLaw(1.0, 0.0),
        coupling=0.05j,
        name="fig1_right",
    )
    return left, right


@dataclass(frozen=True)
class SweepRow:
    a: float
    E1: float
    G1_half: float
    E2: float
    G2_half: float
    b: tuple[float, float, float, float]
    th: tuple[float, float, float, float]
    r1: float
    r2: float
    A1: float
    A2: float
    regime: RegimeTag
    near_ep: bool

    def values(self) -> tuple:
        return (
            self.a, self.E1, self.G1_half, self.E2, self.G2_half,
            *self.b, *self.th,
            self.r1, self.r2, self.A1, self.A2, self.regime, self.near_ep,
        )

    def as_dict(self) -> dict:
        return dict(zip(CSV_COLUMNS, self.values()))


@dataclass
class SweepTable:
    trajectory: ParamTrajectory
    a_min: float
    a_max: float
    grid_n: int
    rows: list[SweepRow]
    eps: list[EpRecord]
    systems: list[EigenSystem] = field(default_factory=list, repr=False)


class BranchState(NamedTuple):
    """What the next pairing step needs to know about the previous point."""

    eigenvalues: tuple[complex, complex]
    right: Optional[np.ndarray]
    split_ref: Optional[complex]


class BranchChoice(NamedTuple):
    perm: tuple[int, int]
    signs: tuple[int, int]


IDENTITY = (0, 1)
SWAP = (1, 0)


def _ep_passage(split_ref: Optional[complex], split: complex) -> tuple[int, int]:
    if split_ref is None:
        return IDENTITY
    target = -1j * split_ref
    score = (target.conjugate() * split).real
    return SWAP if score < 0.0 else IDENTITY


def pair_branches(
    prev: Optional[BranchState],
    sys: EigenSystem,
    tie_rtol: float = 1e-9,
) -> BranchChoice:
    """Choose the eigenpair order and eigenvector signs that continue ``prev``.

    The permutation minimises ``sum_k |E_k(now) - E_k(prev)|``; exact ties
    (an EP passage) are resolved as described in the module notes.  Signs make
    ``Re <R_k(prev)|R_k(now)> >= 0``.
    """
    if prev is None:
        return BranchChoice(IDENTITY, (1, 1))
    e, p = sys.eigenvalues, prev.eigenvalues
    c_id = abs(e[0] - p[0]) + abs(e[1] - p[1])
    c_sw = abs(e[1] - p[0]) + abs(e[0] - p[1])
    if abs(c_id - c_sw) > tie_rtol * max(c_id, c_sw):
        perm = IDENTITY if c_id < c_sw else SWAP
    else:
        perm = _ep_passage(prev.split_ref, 0.5 * (e[0] - e[1]))

    signs = [1, 1]
    if prev.right is not None and not sys.defective:
        for k in range(2):
            v = sys.right[:, perm[k]]
            overlap = np.vdot(prev.right[:, k], v)
            signs[k] = -1 if overlap.real < 0.0 else 1
    return BranchChoice(perm, (signs[0], signs[1]))


def advance_state(
    prev: Optional[BranchState], sys: EigenSystem, coalesce_floor: float = 1e-7
) -> BranchState:
    """State after accepting the already-ordered ``sys``.

    Near-coalesced points do not overwrite the reference splitting, and
    defective points do not overwrite the eigenvector reference.
    """
    split = 0.5 * (sys.eigenvalues[0] - sys.eigenvalues[1])
    split_ref = prev.split_ref if prev is not None else None
    if abs(split) > coalesce_floor * sys.matrix.scale:
        split_ref = split
    right = prev.right if prev is not None else None
    if not sys.defective:
        right = sys.right
    return BranchState(sys.eigenvalues, right, split_ref)


def _near_ep_flags(grid: np.ndarray, eps: list[EpRecord], span: float, fraction: float) -> np.ndarray:
    flags = np.zeros(grid.shape, dtype=bool)
    if not eps:
        return flags
    stars = np.array([r.a_star for r in eps])
    width = stars.max() - stars.min() if len(stars) > 1 else span
    for s in stars:
        flags |= np.abs(grid - s) < fraction * width
    return flags


def run_sweep(
    traj: ParamTrajectory,
    a_min: float,
    a_max: float,
    grid_n: int,
    tol: float = EP_TOL,
    near_ep_fraction: float = NEAR_EP_FRACTION,
) -> SweepTable:
    """Evaluate ``traj`` on ``linspace(a_min, a_max, grid_n)``.

    Eigensystems are computed pointwise, then stitched in one sequential pass
    (:func:`pair_branches`).  Exceptional points are located on a grid of at
    least 64 points and rows within ``near_ep_fraction`` of the EP spacing
    (or of the range, for a single EP) are flagged ``near_ep``.
    """
    if not a_min < a_max:
        raise ValueError("need a_min < a_max")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")

    grid = np.linspace(a_min, a_max, grid_n)
    params = [params_at(traj, a) for a in grid]
    raw = [eigensystem(build_matrix(p)) for p in params]

    systems = []
    state = None
    for sys in raw:
        choice = pair_branches(state, sys)
        sys = sys.permuted(choice.perm, choice.signs)
        state = advance_state(state, sys)
        systems.append(sys)

    eps = locate_eps_1d(traj, a_min, a_max, grid_n=max(grid_n, 64), tol=tol)
    near = _near_ep_flags(grid, eps, a_max - a_min, near_ep_fraction)

    rows = []
    for a, p, sys, flag in zip(grid, params, systems, near):
        mix = mixing_coefficients(sys)
        (e1, e2) = sys.eigenvalues
        rows.append(
            SweepRow(
                a=float(a),
                E1=e1.real,
                G1_half=e1.imag,
                E2=e2.real,
                G2_half=e2.imag,
                b=tuple(float(x) for x in mix.magnitudes.ravel()),
                th=tuple(float(x) for x in mix.phases.ravel()),
                r1=sys.rigidity[0],
                r2=sys.rigidity[1],
                A1=sys.norms[0],
                A2=sys.norms[1],
                regime=classify_regime(p, tol),
                near_ep=bool(flag),
            )
        )
    return SweepTable(traj, float(a_min), float(a_max), grid_n, rows, eps, systems)


def phase_jumps(traj: ParamTrajectory, a_star: float, h: Optional[float] = None) -> np.ndarray:
    """Change of every ``theta_ij`` across an EP, as a 2x2 array.

    The eigensystem is evaluated at ``a_star -+ h`` (default
    ``1e-6 * max(1, |a_star|)``), the second point is paired to the first and
    put in the continued gauge, and the wrapped phase differences are returned.
    """
    if h is None:
        h = 1e-6 * max(1.0, abs(a_star))
    before = eigensystem(build_matrix(params_at(traj, a_star - h)))
    after = eigensystem(build_matrix(params_at(traj, a_star + h)))
    state = advance_state(None, before)
    choice = pair_branches(state, after)
    after = after.permuted(choice.perm, choice.signs)
    out = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            out[i, j] = wrap_phase(cmath.phase(after.right[j, i]) - cmath.phase(before.right[j, i]))
    return out


def _fmt(v) -> str:
    if isinstance(v, RegimeTag):
        return v.value
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    x = float(v)
    if math.isnan(x):
        raise ValueError("NaN is not a valid table value")
    return repr(x)


def _json_value(v):
    if isinstance(v, RegimeTag):
        return v.value
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    x = float(v)
    if math.isnan(x):
        raise ValueError("NaN is not a valid table value")
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def export_table(table: SweepTable, fmt: str = "csv") -> bytes:
    """Serialise a sweep table; output depends only on the table contents."""
    fmt = fmt.lower()
    if fmt == "csv":
        buf = io.StringIO(newline="")
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for row in table.rows:
            buf.write(",".join(_fmt(v) for v in row.values()) + "\n")
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        doc = {
            "trajectory": table.trajectory.describe(),
            "grid": {"a_min": table.a_min, "a_max": table.a_max, "n": table.grid_n},
            "eps": [
                {
                    "a_star": r.a_star,
                    "eigenvalue": [r.eigenvalue.real, r.eigenvalue.imag],
                    "residual": r.residual,
                    "method": r.method.value,
                }
                for r in table.eps
            ],
            "columns": list(CSV_COLUMNS),
            "rows": [{k: _json_value(v) for k, v in row.as_dict().items()} for row in table.rows],
        }
        return (json.dumps(doc, allow_nan=False) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def parse_csv(data: bytes) -> list[dict]:
    """Read back an exported CSV table (numbers as floats, regime as text)."""
    lines = data.decode("utf-8").split("\n")
    header = lines[0].split(",")
    out = []
    for line in lines[1:]:
        if not line:
            continue
        rec = {}
        for k, v in zip(header, line.split(",")):
            if k == "regime":
                rec[k] = v
            elif k == "near_ep":
                rec[k] = v == "1"
            else:
                rec[k] = float(v)
        out.append(rec)
    return out

"""Regime classification and exceptional-point location."""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .model import CouplingModel, Kind, OpenParams, Params, ParamTrajectory, PtVariant, params_at
from .spectral import discriminant, eigenvalues_closed_form

__all__ = [
    "RegimeTag",
    "Method",
    "EpRecord",
    "Threshold",
    "UnsupportedFamily",
    "classify_regime",
    "analytic_ep_thresholds",
    "analytic_eps_1d",
    "locate_eps_1d",
    "locate_eps_2d",
    "open_difference_family",
]

log = logging.getLogger(__name__)

EP_TOL = 1e-8
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class RegimeTag(str, Enum):
    LEVEL_REPULSION = "LR"
    WIDTH_BIFURCATION = "WB"
    MIXED_COMPLEX = "MX"
    AT_EP = "EP"


class Method(str, Enum):
    ANALYTIC = "analytic"
    NUMERIC_SCAN_REFINE = "numeric_scan_refine"
    NUMERIC_NEWTON_2D = "numeric_newton_2d"


class UnsupportedFamily(ValueError):
    pass


@dataclass(frozen=True)
class EpRecord:
    """A located exceptional point.

    ``a_star`` is the parameter value; for two-parameter searches ``b_star``
    holds the second coordinate.  ``residual`` is ``|Z|`` there.
    """

    a_star: float
    eigenvalue: complex
    residual: float
    method: Method
    family: Kind
    b_star: Optional[float] = None


@dataclass(frozen=True)
class Threshold:
    quantity: str
    values: tuple[float, ...]


def _z_abs(params: Params) -> float:
    return 0.5 * math.sqrt(abs(discriminant(params)))


def _family_of(params: Params) -> Kind:
    if isinstance(params, OpenParams):
        return Kind.OPEN
    return Kind.PT_BALANCED if params.variant is PtVariant.BALANCED else Kind.PT_LOSSY


def classify_regime(params: Params, tol: float = EP_TOL) -> RegimeTag:
    """Tag the spectral regime from ``Z``: real -> LR, imaginary -> WB."""
    z = 0.5 * cmath.sqrt(discriminant(params))
    if abs(z) < tol:
        return RegimeTag.AT_EP
    if abs(z.imag) <= tol:
        return RegimeTag.LEVEL_REPULSION
    if abs(z.real) <= tol:
        return RegimeTag.WIDTH_BIFURCATION
    return RegimeTag.MIXED_COMPLEX


def analytic_ep_thresholds(kind: Kind, coupling: complex) -> Threshold:
    """Exact EP conditions for the three special families.

    * Open, imaginary ``omega = i*w0`` (equal widths): ``e1 - e2 = +-2 w0``.
    * Open, real ``omega = w0`` (equal energies): ``gamma1 - gamma2 = +-4 w0``.
    * PT balanced: ``gamma = +-2|w|``.
    * PT lossy: ``gamma = +-4|w|``.
    """
    kind = Kind(kind)
    c = complex(coupling)
    if kind is Kind.OPEN:
        if c.real == 0.0:
            w0 = abs(c.imag)
            return Threshold("e1-e2", (-2.0 * w0, 2.0 * w0))
        if c.imag == 0.0:
            w0 = abs(c.real)
            return Threshold("gamma1-gamma2", (-4.0 * w0, 4.0 * w0))
        raise UnsupportedFamily(f"no closed-form EP condition for complex coupling {c!r}")
    w = abs(c)
    factor = 2.0 if kind is Kind.PT_BALANCED else 4.0
    return Threshold("gamma", (-factor * w, factor * w))


def analytic_eps_1d(traj: ParamTrajectory, a_min: float = -math.inf, a_max: float = math.inf) -> list[float]:
    """Solve the analytic thresholds for ``a`` along an affine trajectory.

    Only trajectories whose free quantity is affine in ``a`` are handled:
    constant coupling and, for the open family, equal width laws (imaginary
    coupling) or equal energy laws (real coupling).
    """
    if traj.coupling_model is not CouplingModel.CONSTANT:
        raise UnsupportedFamily("analytic EPs need a constant coupling")
    thr = analytic_ep_thresholds(traj.kind, traj.coupling)
    if traj.kind is Kind.OPEN:
        if thr.quantity == "e1-e2":
            if traj.gamma1 != traj.gamma2:
                raise UnsupportedFamily("imaginary coupling needs equal width laws")
            p = traj.e1.intercept - traj.e2.intercept
            q = traj.e1.slope - traj.e2.slope
        else:
            if traj.e1 != traj.e2:
                raise UnsupportedFamily("real coupling needs equal energy laws")
            p = traj.gamma1.intercept - traj.gamma2.intercept
            q = traj.gamma1.slope - traj.gamma2.slope
    else:
        p, q = traj.gamma1.intercept, traj.gamma1.slope
    if q == 0.0:
        return []
    roots = sorted((v - p) / q for v in thr.values)
    return [a for a in roots if a_min <= a <= a_max]


def _golden_min(f: Callable[[float], float], lo: float, hi: float, xtol: float, max_iter: int = 400):
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = f(d)
        if not (lo < c < d < hi):
            break
    return (c, fc) if fc <= fd else (d, fd)


def _polish(disc: Callable[[float], complex], a: float, lo: float, hi: float, h: float, steps: int = 4) -> float:
    """Gauss-Newton on ``|D(a)|**2`` over real ``a``; keeps the best iterate."""
    best, best_val = a, abs(disc(a))
    x = a
    for _ in range(steps):
        dx = max(h, 1e-8 * abs(x))
        d0 = disc(x)
        dd = (disc(x + dx) - disc(x - dx)) / (2.0 * dx)
        den = abs(dd) ** 2
        if den == 0.0:
            break
        x = x - (dd.conjugate() * d0).real / den
        if not (lo <= x <= hi):
            break
        val = abs(disc(x))
        if val < best_val:
            best, best_val = x, val
    return best


def locate_eps_1d(
    traj: ParamTrajectory,
    a_min: float,
    a_max: float,
    grid_n: int = 1201,
    tol: float = EP_TOL,
) -> list[EpRecord]:
    """Scan ``|Z(a)|**2`` on a grid, refine each local minimum, keep true EPs.

    Each bracketed minimum is refined by golden-section search to
    ``1e-12 * (a_max - a_min)`` and then polished by Gauss-Newton on the
    discriminant, because ``|Z|`` only falls like ``sqrt(|a - a_star|)``.
    A minimum is accepted when ``|Z| < tol``.
    """
    if not a_min < a_max:
        raise ValueError("need a_min < a_max")
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")

    def disc(a: float) -> complex:
        return discriminant(params_at(traj, a))

    def obj(a: float) -> float:
        return abs(disc(a))

    grid = np.linspace(a_min, a_max, grid_n)
    vals = np.array([obj(a) for a in grid])
    brackets = []
    for i in range(grid_n):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i < grid_n - 1 else math.inf
        if vals[i] <= left and vals[i] < right or vals[i] < left and vals[i] <= right:
            brackets.append((grid[max(i - 1, 0)], grid[min(i + 1, grid_n - 1)]))

    span = a_max - a_min
    records = []
    for lo, hi in brackets:
        a, _ = _golden_min(obj, lo, hi, 1e-12 * span)
        a = _polish(disc, a, a_min, a_max, 1e-7 * span)
        p = params_at(traj, a)
        res = _z_abs(p)
        if res < tol:
            e1, e2 = eigenvalues_closed_form(p)
            records.append(EpRecord(float(a), 0.5 * (e1 + e2), res, Method.NUMERIC_SCAN_REFINE, traj.kind))
        else:
            log.debug("rejected |Z| minimum %.3g at a=%.12g", res, a)
    records.sort(key=lambda r: r.a_star)
    out = []
    for r in records:
        if out and abs(r.a_star - out[-1].a_star) <= 1e-9 * span:
            if r.residual < out[-1].residual:
                out[-1] = r
            continue
        out.append(r)
    return out


def open_difference_family(
    omega: complex, e_mean: float = 0.0, gamma_mean: float = 0.0
) -> Callable[[float, float], OpenParams]:
    """Open family with free ``p = e1 - e2`` and ``q = gamma1 - gamma2``."""

    def make(p: float, q: float) -> OpenParams:
        return OpenParams(e_mean + 0.5 * p, e_mean - 0.5 * p, gamma_mean + 0.5 * q, gamma_mean - 0.5 * q, omega)

    return make


def locate_eps_2d(
    family: Callable[[float, float], Params],
    box: tuple[float, float, float, float],
    tol: float = EP_TOL,
    grid_n: int = 41,
    max_iter: int = 60,
) -> list[EpRecord]:
    """Solve ``Re D = Im D = 0`` over two free parameters.

    ``family(p, q)`` builds the parameters; ``box = (p_min, p_max, q_min, q_max)``.
    Seeds are the local minima of ``|D|`` on a ``grid_n x grid_n`` grid, each
    refined by damped Newton with a finite-difference Jacobian.  Roots closer
    than 1e-8 are merged.
    """
    p_min, p_max, q_min, q_max = box
    if not (p_min < p_max and q_min < q_max):
        raise ValueError("empty search box")

    def D(p, q) -> complex:
        return discriminant(family(p, q))

    ps = np.linspace(p_min, p_max, grid_n)
    qs = np.linspace(q_min, q_max, grid_n)
    vals = np.array([[abs(D(p, q)) for q in qs] for p in ps])
    seeds = []
    for i in range(grid_n):
        for j in range(grid_n):
            nb = vals[max(i - 1, 0): i + 2, max(j - 1, 0): j + 2]
            if vals[i, j] <= nb.min():
                seeds.append((ps[i], qs[j]))

    hp = 1e-7 * (p_max - p_min)
    hq = 1e-7 * (q_max - q_min)
    found = []
    for p, q in seeds:
        root = _newton_2d(D, p, q, hp, hq, max_iter)
        if root is None:
            log.info("2d Newton did not converge from seed (%.6g, %.6g)", p, q)
            continue
        p, q = root
        if not (p_min <= p <= p_max and q_min <= q <= q_max):
            continue
        params = family(p, q)
        res = _z_abs(params)
        if res >= tol:
            continue
        if any(math.hypot(p - r.a_star, q - r.b_star) < 1e-8 for r in found):
            continue
        e1, e2 = eigenvalues_closed_form(params)
        found.append(EpRecord(float(p), 0.5 * (e1 + e2), res, Method.NUMERIC_NEWTON_2D, _family_of(params), float(q)))
    found.sort(key=lambda r: (r.a_star, r.b_star))
    return found


def _newton_2d(D, p, q, hp, hq, max_iter):
    f = D(p, q)
    for _ in range(max_iter):
        if abs(f) == 0.0:
            return p, q
        fp = (D(p + hp, q) - D(p - hp, q)) / (2 * hp)
        fq = (D(p, q + hq) - D(p, q - hq)) / (2 * hq)
        J = np.array([[fp.real, fq.real], [fp.imag, fq.imag]])
        try:
            step = np.linalg.solve(J, [-f.real, -f.imag])
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t > 1e-6:
            pn, qn = p + t * step[0], q + t * step[1]
            fn = D(pn, qn)
            if abs(fn) < abs(f):
                break
            t *= 0.5
        else:
            break
        converged = abs(pn - p) + abs(qn - q) <= 1e-15 * (1 + abs(p) + abs(q))
        p, q, f = pn, qn, fn
        if converged:
            break
    if abs(f) > 1e-12:
        return None
    return p, q

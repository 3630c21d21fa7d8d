"""Independent reference eigensolver in double-double arithmetic.

Nothing here imports :mod:`twolevel.spectral`; the two paths share no code so
that agreement between them means something.  Values are carried as
unevaluated sums ``hi + lo`` of two doubles (~106 bits), which is plenty for
2x2 problems.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import Matrix2

__all__ = [
    "DD",
    "CDD",
    "OracleReport",
    "reference_eigensystem",
    "residual_check",
    "eigenvalue_agreement",
]

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a: float, b: float):
    s = a + b
    return s, b - (s - a)


def _split(a: float):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


class DD:
    """Real double-double number."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi: float = 0.0, lo: float = 0.0):
        self.hi = hi
        self.lo = lo

    def __float__(self):
        return self.hi + self.lo

    def __repr__(self):
        return f"DD({self.hi!r}, {self.lo!r})"

    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __add__(self, o):
        if not isinstance(o, DD):
            o = DD(float(o))
        s, e = _two_sum(self.hi, o.hi)
        t, f = _two_sum(self.lo, o.lo)
        e += t
        s, e = _quick_two_sum(s, e)
        e += f
        return DD(*_quick_two_sum(s, e))

    __radd__ = __add__

    def __sub__(self, o):
        if not isinstance(o, DD):
            o = DD(float(o))
        return self + (-o)

    def __rsub__(self, o):
        return DD(float(o)) - self

    def __mul__(self, o):
        if not isinstance(o, DD):
            o = DD(float(o))
        p, e = _two_prod(self.hi, o.hi)
        e += self.hi * o.lo + self.lo * o.hi
        return DD(*_quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, o):
        if not isinstance(o, DD):
            o = DD(float(o))
        q1 = self.hi / o.hi
        r = self - o * q1
        q2 = r.hi / o.hi
        r = r - o * q2
        q3 = r.hi / o.hi
        return DD(*_quick_two_sum(q1, q2)) + q3

    def __abs__(self):
        return -self if self.hi < 0.0 else self

    def is_zero(self) -> bool:
        return self.hi == 0.0

    def sqrt(self) -> "DD":
        if self.hi <= 0.0:
            if self.hi < 0.0:
                raise ValueError("sqrt of negative DD")
            return DD()
        a = math.sqrt(self.hi)
        p, e = _two_prod(a, a)
        diff = self - DD(p, e)
        return DD(*_quick_two_sum(a, diff.hi / (2.0 * a)))


class CDD:
    """Complex number with double-double components."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        if im is None and isinstance(re, complex):
            re, im = re.real, re.imag
        self.re = re if isinstance(re, DD) else DD(float(re))
        self.im = im if isinstance(im, DD) else DD(float(im or 0.0))

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"CDD({self.re!r}, {self.im!r})"

    def __neg__(self):
        return CDD(-self.re, -self.im)

    def __add__(self, o):
        o = _c(o)
        return CDD(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        o = _c(o)
        return CDD(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        o = _c(o)
        return CDD(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __truediv__(self, o):
        o = _c(o)
        den = o.re * o.re + o.im * o.im
        return CDD(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def abs2(self) -> DD:
        return self.re * self.re + self.im * self.im

    def abs(self) -> DD:
        return self.abs2().sqrt()

    def conj(self) -> "CDD":
        return CDD(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def sqrt(self) -> "CDD":
        """Principal root, computed without cancellation in either component."""
        if self.is_zero():
            return CDD(0.0, 0.0)
        r = self.abs()
        if self.re.hi >= 0.0:
            t = ((r + self.re) * 0.5).sqrt()
            return CDD(t, self.im / (t * 2.0))
        t = ((r - self.re) * 0.5).sqrt()
        u = abs(self.im) / (t * 2.0)
        return CDD(u, t if self.im.hi >= 0.0 else -t)


def _c(x) -> CDD:
    return x if isinstance(x, CDD) else CDD(complex(x))


def _inf_norm(v) -> float:
    return max(float(x.abs()) for x in v)


@dataclass
class OracleReport:
    """Reference eigenpairs with their double-double residuals.

    ``eigenvalues_dd`` keeps the full-precision values; ``eigenvalues`` are
    rounded to double.  For a defective input both eigenvector slots hold the
    single eigendirection.
    """

    eigenvalues: tuple[complex, complex]
    eigenvectors: tuple[tuple[complex, complex], tuple[complex, complex]]
    residuals: tuple[float, float]
    gap: float
    defective: bool
    trace_error: float
    det_error: float
    eigenvalues_dd: tuple = field(repr=False, default=())


def _adjugate_apply(m, lam: CDD, v):
    """``adj(m - lam I) @ v``; one inverse-iteration step without the division."""
    a = m[0][0] - lam
    d = m[1][1] - lam
    b, c = m[0][1], m[1][0]
    return (d * v[0] - b * v[1], a * v[1] - c * v[0])


def _normalize(v):
    n = (v[0].abs2() + v[1].abs2()).sqrt()
    return (v[0] / CDD(n, 0.0), v[1] / CDD(n, 0.0))


def _eigvec(m, lam: CDD):
    # columns of adj(m - lam I) are null vectors; take the larger one
    c1 = (m[1][1] - lam, -m[1][0])
    c2 = (-m[0][1], m[0][0] - lam)
    n1 = float(c1[0].abs2() + c1[1].abs2())
    n2 = float(c2[0].abs2() + c2[1].abs2())
    if n1 == 0.0 and n2 == 0.0:
        return None
    v = _normalize(c1 if n1 >= n2 else c2)
    w = _adjugate_apply(m, lam, v)
    if float(w[0].abs2() + w[1].abs2()) > 0.0:
        v = _normalize(w)
    return v


def _residual(m, lam: CDD, v) -> float:
    r0 = m[0][0] * v[0] + m[0][1] * v[1] - lam * v[0]
    r1 = m[1][0] * v[0] + m[1][1] * v[1] - lam * v[1]
    return _inf_norm((r0, r1))


def reference_eigensystem(m: Matrix2) -> OracleReport:
    """Quadratic-formula eigenvalues and adjugate eigenvectors in double-double."""
    mm = [[CDD(m.h11), CDD(m.h12)], [CDD(m.h21), CDD(m.h22)]]
    half = CDD(0.5, 0.0)
    mean = (mm[0][0] + mm[1][1]) * half
    delta = (mm[0][0] - mm[1][1]) * half
    disc = delta * delta + mm[0][1] * mm[1][0]
    s = disc.sqrt()
    lams = (mean + s, mean - s)
    gap = float((s * CDD(2.0, 0.0)).abs())

    scale = max(1.0, abs(m.h11), abs(m.h12), abs(m.h21), abs(m.h22))
    defective = False
    vecs = []
    for k, lam in enumerate(lams):
        v = _eigvec(mm, lam)
        if v is None:
            # m is a multiple of the identity: every vector is an eigenvector
            v = (CDD(1.0, 0.0), CDD(0.0, 0.0)) if k == 0 else (CDD(0.0, 0.0), CDD(1.0, 0.0))
        vecs.append(v)
    if gap <= 1e-30 * scale:
        det = vecs[0][0] * vecs[1][1] - vecs[0][1] * vecs[1][0]
        if float(det.abs()) < 1e-15:
            defective = True
            vecs[1] = vecs[0]

    residuals = tuple(_residual(mm, lam, v) for lam, v in zip(lams, vecs))
    trace_err = float(((lams[0] + lams[1]) - (mm[0][0] + mm[1][1])).abs())
    det_m = mm[0][0] * mm[1][1] - mm[0][1] * mm[1][0]
    det_err = float(((lams[0] * lams[1]) - det_m).abs())
    return OracleReport(
        eigenvalues=(lams[0].to_complex(), lams[1].to_complex()),
        eigenvectors=tuple(tuple(x.to_complex() for x in v) for v in vecs),
        residuals=residuals,
        gap=gap,
        defective=defective,
        trace_error=trace_err,
        det_error=det_err,
        eigenvalues_dd=lams,
    )


def residual_check(m: Matrix2, eigenpair) -> float:
    """``|m v - lam v|_inf`` evaluated in double-double for a double eigenpair."""
    lam, v = eigenpair
    mm = [[CDD(m.h11), CDD(m.h12)], [CDD(m.h21), CDD(m.h22)]]
    return _residual(mm, CDD(complex(lam)), (CDD(complex(v[0])), CDD(complex(v[1]))))


def eigenvalue_agreement(report: OracleReport, eigenvalues) -> float:
    """Largest relative deviation of ``eigenvalues`` from the reference pair.

    The two candidates are matched to the reference by the cheaper pairing.
    """
    ref = report.eigenvalues_dd
    cand = [CDD(complex(z)) for z in eigenvalues]
    scale = max(1.0, max(abs(z) for z in report.eigenvalues))

    def dev(x, y):
        return float((x - y).abs()) / scale

    straight = max(dev(ref[0], cand[0]), dev(ref[1], cand[1]))
    swapped = max(dev(ref[0], cand[1]), dev(ref[1], cand[0]))
    return min(straight, swapped)

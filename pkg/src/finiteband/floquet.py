"""Transfer matrices, Floquet multipliers, discriminants and band sets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .ergodic_operator import (
    ErgodicSystem,
    ValidationError,
    build_section,
    jacobi_system,
    symbol_matrix,
)
from .numerics import Poly, poly_roots

__all__ = [
    "BandSet",
    "PeriodicJacobi",
    "companion_matrix",
    "period_monodromy",
    "floquet_multipliers",
    "in_band_by_multipliers",
    "discriminant",
    "bands_from_discriminant",
    "bands_from_symbol",
    "spectrum_bands",
    "hausdorff_to_bands",
    "dos_band_check",
]

ENDPOINT_DEDUP = 1e-9
# imaginary part (relative) under which a root of Delta -/+ 2 counts as real
REAL_ROOT_TOL = 1e-7


@dataclass(frozen=True)
class BandSet:
    """Disjoint closed intervals ``[l_i, r_i]`` in increasing order."""

    intervals: tuple = ()

    def __post_init__(self):
        ivs = tuple((float(l), float(r)) for l, r in self.intervals)
        for (l, r) in ivs:
            if l > r:
                raise ValueError(f"bad interval [{l}, {r}]")
        for (_, r), (l, _) in zip(ivs, ivs[1:]):
            if not r < l:
                raise ValueError("intervals must be disjoint and sorted")
        object.__setattr__(self, "intervals", ivs)

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return any(l - tol <= x <= r + tol for l, r in self.intervals)

    def in_interior(self, x: float, margin: float = 0.0) -> bool:
        return any(l + margin < x < r - margin for l, r in self.intervals)

    def distance(self, x: float) -> float:
        if not self.intervals:
            return np.inf
        return min(max(l - x, 0.0, x - r) for l, r in self.intervals)

    def gaps(self) -> list[tuple[float, float]]:
        return [(r, l) for (_, r), (l, _) in zip(self.intervals, self.intervals[1:])]

    def max_endpoint_deviation(self, other: "BandSet") -> float:
        if len(self) != len(other):
            return np.inf
        if not self.intervals:
            return 0.0
        a = np.array(self.intervals)
        b = np.array(other.intervals)
        return float(np.max(np.abs(a - b)))

    def to_json(self) -> list:
        return [[l, r] for l, r in self.intervals]

    @classmethod
    def from_json(cls, data) -> "BandSet":
        return cls(tuple((float(l), float(r)) for l, r in data))


@dataclass(frozen=True, eq=False)
class PeriodicJacobi:
    """Periodic tridiagonal operator ``a_n x_{n+1} + b_n x_n + a_{n-1} x_{n-1}``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        if a.shape != b.shape or a.size == 0:
            raise ValidationError("a and b must be non-empty and of equal length")
        if np.any(~np.isfinite(a)) or np.any(~np.isfinite(b)):
            raise ValidationError("coefficients must be finite")
        if np.any(a <= 0):
            raise ValidationError(f"off-diagonal coefficients must be positive, got {a}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def period(self) -> int:
        return self.a.size

    def to_system(self) -> ErgodicSystem:
        return jacobi_system(self.a, self.b)

    def to_json(self) -> dict:
        return {"a": [float(x) for x in self.a], "b": [float(x) for x in self.b]}

    @classmethod
    def from_json(cls, data: dict) -> "PeriodicJacobi":
        try:
            return cls(data["a"], data["b"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed Jacobi JSON: {exc}") from exc

    @classmethod
    def free(cls, period: int) -> "PeriodicJacobi":
        return cls(np.ones(period), np.zeros(period))


def companion_matrix(sys: ErgodicSystem, omega: int, z: complex) -> np.ndarray:
    """One-step ``2d x 2d`` transfer matrix ``A(z; omega)``.

    Acts on ``(x_{n-d}, ..., x_{n+d-1})`` and returns the window shifted by
    one, the new entry solved from row ``n = omega`` of ``J x = conj(z) x``.
    """
    d = sys.d
    A = np.zeros((2 * d, 2 * d), dtype=complex)
    A[np.arange(2 * d - 1), np.arange(1, 2 * d)] = 1.0
    top = sys.coeff(d, omega)
    for j in range(2 * d):
        k = j - d
        if k == 0:
            A[-1, j] = np.conj((z - sys.coeff(0, omega)) / top)
        else:
            A[-1, j] = -np.conj(sys.coeff(k, omega) / top)
    return A


def period_monodromy(sys: ErgodicSystem, z: complex, omega0: int = 0) -> np.ndarray:
    """``A(z; T^{p-1} omega0) ... A(z; omega0)``."""
    M = np.eye(2 * sys.d, dtype=complex)
    for j in range(sys.p):
        M = companion_matrix(sys, omega0 + j, z) @ M
    return M


def floquet_multipliers(sys: ErgodicSystem, z: complex) -> np.ndarray:
    return np.linalg.eigvals(period_monodromy(sys, z))


def in_band_by_multipliers(sys: ErgodicSystem, z: float, tol: float = 1e-8) -> bool:
    beta = floquet_multipliers(sys, z)
    return bool(np.any(np.abs(np.abs(beta) - 1.0) < tol))


def _padd(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = max(x.size, y.size)
    out = np.zeros(n, dtype=np.result_type(x, y))
    out[: x.size] += x
    out[: y.size] += y
    return out


def _discriminant_coeffs(a, b) -> np.ndarray:
    """Ascending coefficients of the trace of ``M_p ... M_1``, one-step matrices
    ``[[(z - b_n)/a_n, -a_{n-1}/a_n], [1, 0]]`` with ``a_0 = a_p``.

    Pure polynomial arithmetic on whatever dtype ``a, b`` carry (complex-step
    and extended-precision callers rely on this).
    """
    one = np.ones(1, dtype=np.result_type(a, b))
    zero = np.zeros(1, dtype=one.dtype)
    c11, c12, c21, c22 = one, zero, zero, one
    p = len(a)
    for i in range(p):
        m11 = np.array([-b[i] / a[i], 1 / a[i]])
        m12 = -a[i - 1] / a[i]
        n11 = _padd(np.convolve(m11, c11), m12 * c21)
        n12 = _padd(np.convolve(m11, c12), m12 * c22)
        c11, c12, c21, c22 = n11, n12, c11, c12
    return _padd(c11, c22)


def discriminant(J0: PeriodicJacobi) -> Poly:
    """``Delta(z)``: trace of the period transfer matrix, degree = period."""
    return Poly(_discriminant_coeffs(J0.a.astype(complex), J0.b.astype(complex)))


def _dedupe_sorted(xs: list[float], tol: float) -> list[float]:
    out: list[float] = []
    for x in sorted(xs):
        if out and abs(x - out[-1]) <= tol * max(1.0, abs(x)):
            continue
        out.append(x)
    return out


def bands_from_discriminant(delta: Poly) -> BandSet:
    """``{z in R : -2 <= Delta(z) <= 2}`` as maximal closed intervals."""
    if delta.degree < 1:
        raise ValueError("discriminant must have degree >= 1")
    if not delta.is_real(1e-12):
        raise ValueError("discriminant must have real coefficients")
    dr = Poly(delta.real_coeffs())
    pts = []
    for shift in (-2.0, 2.0):
        for r in poly_roots(dr + shift):
            if abs(r.imag) <= REAL_ROOT_TOL * max(1.0, abs(r)):
                pts.append(r.real)
    pts = _dedupe_sorted(pts, ENDPOINT_DEDUP)
    if not pts:
        return BandSet()

    def inside(x):
        return abs(dr(x).real) <= 2.0

    seg_in = [inside(0.5 * (x + y)) for x, y in zip(pts, pts[1:])]
    intervals = []
    start = None
    for i, x in enumerate(pts):
        left = seg_in[i - 1] if i > 0 else False
        right = seg_in[i] if i < len(seg_in) else False
        if not left and right:
            start = x
        elif left and not right:
            intervals.append((start, x))
        elif not left and not right:
            intervals.append((x, x))
    return BandSet(tuple(intervals))


def bands_from_symbol(sys: ErgodicSystem, n_theta: int = 1024) -> BandSet:
    """Bands as ranges of the sorted eigenvalue branches of the Bloch symbol.

    Independent of the transfer-matrix route; works for any half-bandwidth.
    Branch extrema found on a grid are refined by a bounded scalar search.
    """
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    h = theta[1] - theta[0]

    def branch(j, t):
        return np.linalg.eigvalsh(symbol_matrix(sys, np.exp(1j * t)))[j]

    vals = np.array([np.linalg.eigvalsh(symbol_matrix(sys, np.exp(1j * t))) for t in theta])
    raw = []
    for j in range(sys.p):
        i_lo, i_hi = int(np.argmin(vals[:, j])), int(np.argmax(vals[:, j]))
        lo = minimize_scalar(lambda t: branch(j, t), bounds=(theta[i_lo] - h, theta[i_lo] + h),
                             method="bounded", options={"xatol": 1e-12})
        hi = minimize_scalar(lambda t: -branch(j, t), bounds=(theta[i_hi] - h, theta[i_hi] + h),
                             method="bounded", options={"xatol": 1e-12})
        raw.append((min(lo.fun, vals[i_lo, j]), max(-hi.fun, vals[i_hi, j])))
    raw.sort()
    merged = [list(raw[0])]
    for l, r in raw[1:]:
        if l <= merged[-1][1] + ENDPOINT_DEDUP:
            merged[-1][1] = max(merged[-1][1], r)
        else:
            merged.append([l, r])
    return BandSet(tuple(map(tuple, merged)))


def spectrum_bands(obj) -> BandSet:
    """Band set of a ``PeriodicJacobi`` or ``ErgodicSystem``.

    Real tridiagonal input goes through the discriminant; everything else
    through the Bloch symbol.
    """
    if isinstance(obj, PeriodicJacobi):
        return bands_from_discriminant(discriminant(obj))
    if obj.d == 1 and np.all(obj.q.imag == 0):
        J0 = PeriodicJacobi(obj.q[1].real, obj.q[0].real)
        return bands_from_discriminant(discriminant(J0))
    return bands_from_symbol(obj)


def hausdorff_to_bands(points: np.ndarray, bands: BandSet) -> float:
    """Hausdorff distance between a finite point set and a union of intervals."""
    pts = np.sort(np.asarray(points, dtype=float))
    if pts.size == 0 or not bands.intervals:
        return np.inf

    def dist_to_pts(x):
        i = np.searchsorted(pts, x)
        cand = [abs(pts[j] - x) for j in (i - 1, i) if 0 <= j < pts.size]
        return min(cand)

    d1 = max(bands.distance(x) for x in pts)
    d2 = 0.0
    for l, r in bands.intervals:
        inner = pts[(pts >= l) & (pts <= r)]
        probes = [l, r] + list(0.5 * (inner[1:] + inner[:-1]))
        d2 = max(d2, max(dist_to_pts(x) for x in probes))
    return float(max(d1, d2))


def dos_band_check(obj, N: int, omega: int = 0) -> float:
    """Hausdorff distance between eigenvalues of the ``N x N`` section and the bands."""
    if N < 100:
        raise ValueError("N must be >= 100")
    sys = obj.to_system() if isinstance(obj, PeriodicJacobi) else obj
    J = build_section(sys, omega, N).entries
    ev = np.linalg.eigvalsh(J)
    return hausdorff_to_bands(ev, spectrum_bands(obj))

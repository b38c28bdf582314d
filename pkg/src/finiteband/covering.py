"""Monodromy of rational coverings ``f: CP^1 -> CP^1``.

Branch points are complex numbers or ``math.inf`` for the point at infinity.
Monodromy permutations act on fiber labels: ``sigma(i) = j`` when the lift of
the loop starting at fiber point ``i`` ends at fiber point ``j``.  Loops share a
hub point and are traversed in increasing order of the angle at which they
leave it, and the product ``sigma_N o ... o sigma_1`` is the identity.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .ergodic_operator import ValidationError
from .numerics import Perm, Poly, cluster_points, poly_eval, poly_roots

__all__ = [
    "INF",
    "ContinuationError",
    "PathError",
    "RationalMap",
    "BranchPoint",
    "HurwitzData",
    "branching_divisor",
    "fiber",
    "lift_loop",
    "monodromy",
    "genus",
    "is_transitive",
    "hurwitz_equivalent",
]

INF = math.inf

NEWTON_TOL = 1e-13
NEWTON_MAX_ITER = 5
MAX_HALVINGS = 20
VALUE_CLUSTER_TOL = 1e-8
BRANCH_EXCLUSION = 1e-6
MIN_ANGLE = 1e-3
LOOP_CIRCLE_VERTICES = 64


class ContinuationError(RuntimeError):
    """Analytic continuation could not follow the sheets unambiguously."""


class PathError(RuntimeError):
    """No admissible path system from the requested base point."""


def is_inf(x) -> bool:
    return isinstance(x, (float, complex)) and cmath.isinf(x)


@dataclass(frozen=True, eq=False)
class RationalMap:
    """``f = numerator / denominator`` of degree ``max(deg num, deg den)``."""

    numerator: Poly
    denominator: Poly = field(default_factory=lambda: Poly([1]))

    def __post_init__(self):
        num, den = self.numerator, self.denominator
        if den.is_zero():
            raise ValidationError("denominator is the zero polynomial")
        if num.is_zero():
            raise ValidationError("numerator is the zero polynomial")
        if den.degree >= 1:
            scale = max(abs(c) for c in num.coeffs)
            for r in set(poly_roots(den)):
                bound = 1e-8 * scale * max(1.0, abs(r)) ** num.degree
                if abs(num(r)) <= bound:
                    raise ValidationError(f"numerator and denominator share the root {r:.6g}")

    @classmethod
    def polynomial(cls, p: Poly) -> "RationalMap":
        return cls(p, Poly([1]))

    @classmethod
    def laurent(cls, d: int) -> "RationalMap":
        """``zeta^d + zeta^-d = (zeta^{2d} + 1) / zeta^d``."""
        return cls(Poly([1] + [0] * (2 * d - 1) + [1]), Poly.monomial(d))

    @property
    def degree(self) -> int:
        return max(self.numerator.degree, self.denominator.degree)

    def __call__(self, zeta):
        return poly_eval(self.numerator, zeta) / poly_eval(self.denominator, zeta)

    def value_at_infinity(self):
        n, m = self.numerator.degree, self.denominator.degree
        if n > m:
            return INF
        if n < m:
            return 0j
        return self.numerator.lead / self.denominator.lead

    def wronskian(self) -> Poly:
        """``num' den - num den'``; its zeros are the finite critical points."""
        num, den = self.numerator, self.denominator
        return num.derivative() * den - num * den.derivative()

    def to_json(self) -> dict:
        return {"numerator": self.numerator.to_json(), "denominator": self.denominator.to_json()}

    @classmethod
    def from_json(cls, data) -> "RationalMap":
        try:
            if isinstance(data, dict):
                num = Poly.from_json(data["numerator"])
                den = Poly.from_json(data.get("denominator", [1]))
            else:
                num, den = Poly.from_json(data), Poly([1])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed map JSON: {exc}") from exc
        return cls(num, den)


@dataclass(frozen=True)
class BranchPoint:
    value: complex
    indices: tuple

    @property
    def is_infinite(self) -> bool:
        return is_inf(self.value)

    def profile(self, degree: int) -> list[int]:
        """Ramification profile padded with unramified sheets."""
        extra = degree - sum(self.indices)
        return sorted(list(self.indices) + [1] * extra, reverse=True)


def _point_key(z):
    return (1, 0.0, 0.0) if is_inf(z) else (0, round(z.real, 9), round(z.imag, 9))


def branching_divisor(f: RationalMap) -> list[BranchPoint]:
    """Critical values of ``f`` with the ramification indices above each.

    A finite critical point of Wronskian multiplicity ``m`` has index
    ``m + 1`` (poles included).  The point at infinity absorbs the degree
    deficiency of the Wronskian: ``e_inf = 1 + (2D - 2 - deg W)``.
    """
    D = f.degree
    if D < 2:
        raise ValueError("branching divisor needs degree >= 2")
    W = f.wronskian()
    crit: list[tuple[complex, int]] = []
    if W.degree >= 1:
        roots = poly_roots(W)
        for group in cluster_points(roots, VALUE_CLUSTER_TOL):
            crit.append((roots[group[0]], len(group)))
    den_roots = poly_roots(f.denominator) if f.denominator.degree >= 1 else []

    entries: list[tuple[complex, int]] = []
    for zeta, mult in crit:
        is_pole = any(abs(zeta - r) <= 1e-6 * max(1.0, abs(r)) for r in den_roots)
        entries.append((INF if is_pole else complex(f(zeta)), mult + 1))
    e_inf = 1 + (2 * D - 2 - W.degree)
    if e_inf >= 2:
        entries.append((f.value_at_infinity(), e_inf))

    finite = [(v, e) for v, e in entries if not is_inf(v)]
    result = []
    for group in cluster_points([v for v, _ in finite], VALUE_CLUSTER_TOL):
        v = complex(np.mean([finite[i][0] for i in group]))
        if abs(v.imag) <= 1e-12 * max(1.0, abs(v)):
            v = complex(v.real, 0.0)
        result.append(BranchPoint(v, tuple(sorted((finite[i][1] for i in group), reverse=True))))
    inf_idx = tuple(sorted((e for v, e in entries if is_inf(v)), reverse=True))
    if inf_idx:
        result.append(BranchPoint(INF, inf_idx))
    result.sort(key=lambda bp: _point_key(bp.value))
    return result


def _canonical_order(points) -> list[complex]:
    pts = [complex(p) for p in points]
    return sorted(pts, key=lambda z: (round(cmath.phase(z), 10), abs(z)))


def fiber(f: RationalMap, w: complex, branch_points=None) -> list[complex]:
    """The ``D`` preimages of ``w``, sorted by argument then modulus."""
    if branch_points is None:
        branch_points = branching_divisor(f) if f.degree >= 2 else []
    for bp in branch_points:
        if not bp.is_infinite and abs(bp.value - w) < BRANCH_EXCLUSION:
            raise ValueError(f"w = {w} lies within {BRANCH_EXCLUSION} of branch point {bp.value}")
    g = f.numerator - f.denominator * w
    if g.degree < f.degree:
        raise ValueError(f"w = {w} has a preimage at infinity")
    pts = poly_roots(g)
    if len(cluster_points(pts, 1e-9)) != len(pts):
        raise ValueError(f"fiber over {w} is degenerate")
    return _canonical_order(pts)


class _Polyline:
    def __init__(self, vertices):
        self.v = np.asarray(vertices, dtype=complex)
        seg = np.abs(np.diff(self.v))
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])
        self.length = float(self.cum[-1])

    def __call__(self, s: float) -> complex:
        s = min(max(s, 0.0), self.length)
        i = int(np.searchsorted(self.cum, s, side="right")) - 1
        i = min(i, len(self.v) - 2)
        span = self.cum[i + 1] - self.cum[i]
        t = 0.0 if span == 0 else (s - self.cum[i]) / span
        return self.v[i] + t * (self.v[i + 1] - self.v[i])


def _continue_points(f: RationalMap, path: _Polyline, start: np.ndarray) -> np.ndarray:
    """Predictor-corrector continuation of all roots of ``num - w den`` along ``path``."""
    num, den = f.numerator, f.denominator
    dnum, dden = num.derivative(), den.derivative()
    W = f.wronskian()
    zeta = np.array(start, dtype=complex)
    s = 0.0
    h0 = path.length / 64
    h = h0
    halvings = 0
    w_cur = path(0.0)
    while s < path.length:
        h = min(h, path.length - s)
        w_new = path(s + h)
        # Euler predictor: d zeta / d w = den^2 / W
        pred = zeta + (w_new - w_cur) * poly_eval(den, zeta) ** 2 / poly_eval(W, zeta)
        cur = pred.copy()
        converged = False
        for _ in range(NEWTON_MAX_ITER):
            g = poly_eval(num, cur) - w_new * poly_eval(den, cur)
            dg = poly_eval(dnum, cur) - w_new * poly_eval(dden, cur)
            step = g / dg
            cur = cur - step
            if np.all(np.abs(step) <= NEWTON_TOL * np.maximum(1.0, np.abs(cur))):
                converged = True
                break
        ok = converged and np.all(np.isfinite(cur))
        if ok and cur.size > 1:
            sep_new = np.abs(cur[:, None] - cur[None, :])
            np.fill_diagonal(sep_new, np.inf)
            sep_old = np.abs(zeta[:, None] - zeta[None, :])
            np.fill_diagonal(sep_old, np.inf)
            ok = (sep_new.min() > 10 * NEWTON_TOL * max(1.0, np.abs(cur).max())
                  and np.all(np.abs(cur - zeta) < 0.5 * sep_old.min(axis=1)))
        if ok:
            zeta, s, w_cur = cur, s + h, w_new
            halvings = 0
            h = min(h0, 2 * h)
        else:
            halvings += 1
            if halvings > MAX_HALVINGS:
                raise ContinuationError(f"step control failed at arclength {s:.6g} (w = {w_cur})")
            h /= 2
    return zeta


def lift_loop(f: RationalMap, loop, fiber_points) -> Perm:
    """Permutation of ``fiber_points`` induced by lifting the closed polyline ``loop``."""
    path = _Polyline(loop)
    if abs(path.v[0] - path.v[-1]) > 1e-12 * max(1.0, abs(path.v[0])):
        raise ValueError("loop must be closed")
    start = np.array(fiber_points, dtype=complex)
    end = _continue_points(f, path, start)
    images = []
    for z in end:
        dist = np.abs(start - z)
        j = int(np.argmin(dist))
        if dist[j] > 1e-7 * max(1.0, abs(z)):
            raise ContinuationError("lifted loop did not return to the fiber")
        images.append(j)
    if sorted(images) != list(range(len(start))):
        raise ContinuationError("lifted endpoints are not a permutation of the fiber")
    return Perm(images)


@dataclass(frozen=True, eq=False)
class HurwitzData:
    """Branch points, loop system and monodromy permutations at a base point."""

    basepoint: complex
    branch_points: tuple
    profiles: tuple
    paths: tuple
    perms: tuple
    labels: tuple

    @property
    def degree(self) -> int:
        return len(self.labels)

    def product(self) -> Perm:
        """``sigma_N o ... o sigma_1``."""
        out = Perm.identity(self.degree)
        for s in self.perms:
            out = s * out
        return out

    def to_json(self, include_genus: bool = True) -> dict:
        data = {
            "basepoint": [self.basepoint.real, self.basepoint.imag],
            "branch_points": ["inf" if is_inf(z) else [z.real, z.imag] for z in self.branch_points],
            "perms": [p.to_json() for p in self.perms],
        }
        if include_genus:
            data["genus"] = genus(self)
        return data

    def paths_csv_rows(self):
        for i, poly in enumerate(self.paths):
            for z in poly:
                yield i, z.real, z.imag


def _directions(w0: complex, finite: list[complex]) -> list[float]:
    return [cmath.phase(z - w0) for z in finite]


def _min_angle_gap(angles: list[float]) -> float:
    if len(angles) < 2:
        return np.pi
    a = np.sort(np.mod(angles, 2 * np.pi))
    gaps = np.diff(np.concatenate([a, [a[0] + 2 * np.pi]]))
    return float(gaps.min())


def _infinity_direction(angles: list[float]) -> float:
    """Bisector of the widest angular gap left free by the finite paths."""
    if not angles:
        return 0.0
    a = np.sort(np.mod(angles, 2 * np.pi))
    ext = np.concatenate([a, [a[0] + 2 * np.pi]])
    i = int(np.argmax(np.diff(ext)))
    return float(0.5 * (ext[i] + ext[i + 1]))


def _admissible(f, w0, bps) -> bool:
    finite = [bp.value for bp in bps if not bp.is_infinite]
    if any(abs(z - w0) < BRANCH_EXCLUSION for z in finite):
        return False
    angles = _directions(w0, finite)
    if any(bp.is_infinite for bp in bps):
        angles = angles + [_infinity_direction(angles)]
    if _min_angle_gap(angles) < MIN_ANGLE:
        return False
    try:
        fiber(f, w0, bps)
    except ValueError:
        return False
    return True


def _circle(center, radius, start_angle, clockwise=False, n=LOOP_CIRCLE_VERTICES):
    t = np.linspace(0.0, 2 * np.pi, n + 1)
    sign = -1.0 if clockwise else 1.0
    pts = center + radius * np.exp(1j * (start_angle + sign * t))
    pts[-1] = pts[0]
    return pts


def _segment_clearance(a: complex, b: complex, points: list[complex]) -> float:
    """Smallest distance from ``points`` to the segment ``[a, b]``."""
    if not points:
        return math.inf
    v = b - a
    out = math.inf
    for z in points:
        t = 0.0 if v == 0 else min(max(((z - a) * v.conjugate()).real / abs(v) ** 2, 0.0), 1.0)
        out = min(out, abs(z - (a + t * v)))
    return out


def _hub(f: RationalMap, bps) -> complex:
    """Star centre of the loop system; depends on ``f`` only.

    Deterministic candidates around the centroid of the finite branch points
    (golden-angle spiral); the one seeing the branch points under the widest
    minimal angle wins.
    """
    finite = [bp.value for bp in bps if not bp.is_infinite]
    centre = complex(np.mean(finite)) if finite else 0j
    scale = max([1.0] + [abs(z - centre) for z in finite])
    best, best_gap = None, -1.0
    for k in range(48):
        h = centre + scale * (0.3 + 0.02 * k) * cmath.exp(1j * (0.5 + 2.399963229728653 * k))
        if not _admissible(f, h, bps):
            continue
        if finite and min(abs(z - h) for z in finite) < 0.1 * scale:
            continue
        angles = _directions(h, finite)
        if any(bp.is_infinite for bp in bps):
            angles = angles + [_infinity_direction(angles)]
        gap = _min_angle_gap(angles)
        if gap > best_gap:
            best, best_gap = h, gap
    if best is None:
        raise PathError("no admissible hub for the loop system")
    return best


def monodromy(f: RationalMap, w: complex | None = None, rng=None) -> HurwitzData:
    """Hurwitz data of ``f`` from base point ``w`` (random when ``None``).

    Every loop runs from the base point to a hub ``h`` chosen from ``f``
    alone, then along a straight segment from ``h`` toward its branch point,
    around a circle of radius ``min(pairwise branch-point distance,
    distance to h) / 4`` counterclockwise, and back the same way.  Infinity
    is reached along the bisector of the widest free angular sector at ``h``
    and encircled by a large clockwise circle centred at ``h``.  Since the
    star at ``h`` is shared, data from two base points differ by the
    relabeling along the segment between them, i.e. a simultaneous
    conjugation.
    """
    bps = branching_divisor(f)
    finite = [bp.value for bp in bps if not bp.is_infinite]
    has_inf = any(bp.is_infinite for bp in bps)
    hub = _hub(f, bps)
    pair = [abs(a - b) for a, b in itertools.combinations(finite, 2)]
    clearance = 0.05 * min(pair + [max([1.0] + [abs(z) for z in finite])])

    def usable(w0):
        return _admissible(f, w0, bps) and _segment_clearance(w0, hub, finite) > clearance

    if w is None:
        rng = np.random.default_rng(rng)
        R = 2 * max([1.0] + [abs(z) for z in finite])
        for _ in range(100):
            w0 = complex(R * np.exp(2j * np.pi * rng.random()))
            if usable(w0):
                break
        else:
            raise PathError("could not sample an admissible base point")
    else:
        w0 = complex(w)
        if not usable(w0):
            raise PathError(f"base point {w0} is not admissible (branching, degenerate or blocked)")

    labels = fiber(f, w0, bps)
    angles = _directions(hub, finite)
    items = []
    for z, ang in zip(finite, angles):
        r = 0.25 * min(pair + [abs(z - hub)])
        back = cmath.phase(hub - z)
        loop = np.concatenate([[w0, hub], _circle(z, r, back), [hub, w0]])
        items.append((ang % (2 * np.pi), z, loop))
    if has_inf:
        ang = _infinity_direction(angles)
        radius = 2 * (max([0.0] + [abs(z - hub) for z in finite]) + 1.0)
        loop = np.concatenate([[w0, hub], _circle(hub, radius, ang, clockwise=True), [hub, w0]])
        items.append((ang % (2 * np.pi), INF, loop))
    items.sort(key=lambda t: t[0])

    profile_of = {_point_key(bp.value): bp.profile(f.degree) for bp in bps}
    perms = tuple(lift_loop(f, loop, labels) for _, _, loop in items)
    return HurwitzData(
        basepoint=w0,
        branch_points=tuple(z for _, z, _ in items),
        profiles=tuple(tuple(profile_of[_point_key(z)]) for _, z, _ in items),
        paths=tuple(loop for _, _, loop in items),
        perms=perms,
        labels=tuple(labels),
    )


def is_transitive(perms, n: int) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for p in perms:
            j = p(i)
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == n


def genus(h: HurwitzData) -> int:
    """Riemann-Hurwitz: ``2 - 2g = 2D - sum_i sum_cycles (len - 1)``."""
    D = h.degree
    if not is_transitive(h.perms, D):
        raise ValueError("monodromy group is not transitive: covering surface is disconnected")
    total = sum(len(c) - 1 for p in h.perms for c in p.cycles())
    twice_g = 2 - 2 * D + total
    if twice_g % 2:
        raise ValueError("ramification total has the wrong parity")
    return twice_g // 2


def _match_branch_points(h1: HurwitzData, h2: HurwitzData, tol: float) -> list[int]:
    used = set()
    match = []
    for z in h1.branch_points:
        found = None
        for j, y in enumerate(h2.branch_points):
            if j in used:
                continue
            if (is_inf(z) and is_inf(y)) or (not is_inf(z) and not is_inf(y) and abs(z - y) <= tol):
                found = j
                break
        if found is None:
            raise ValueError(f"branch point {z} of the first datum has no partner")
        used.add(found)
        match.append(found)
    return match


def hurwitz_equivalent(h1: HurwitzData, h2: HurwitzData, tol: float = 1e-6) -> bool:
    """True iff one relabeling ``tau`` conjugates every ``sigma_i`` of ``h1`` to
    the permutation of ``h2`` at the same branch point (brute force, D <= 7)."""
    D = h1.degree
    if h2.degree != D:
        raise ValueError("degrees differ")
    if D > 7:
        raise ValueError("brute-force equivalence refused for degree > 7")
    if len(h1.branch_points) != len(h2.branch_points):
        raise ValueError("branch point counts differ")
    match = _match_branch_points(h1, h2, tol)
    pairs = [(h1.perms[i], h2.perms[j]) for i, j in enumerate(match)]
    if any(a.cycle_type() != b.cycle_type() for a, b in pairs):
        return False
    for images in itertools.permutations(range(D)):
        tau = Perm(images)
        if all(a.conjugate(tau) == b for a, b in pairs):
            return True
    return False

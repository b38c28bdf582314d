"""Small numerical kernel: complex polynomials, root finding and permutations.

Polynomials store coefficients in ascending degree.  Permutations act on
``{0, ..., n-1}`` and compose right-to-left, ``(p * q)(i) == p(q(i))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Poly",
    "Perm",
    "poly_eval",
    "poly_roots",
    "perm_compose",
    "perm_cycle_type",
    "cluster_points",
]

# relative distance under which eigenvalues of the companion matrix are
# treated as one multiple root; an m-fold root is perturbed by ~eps**(1/m)
ROOT_CLUSTER_TOL = 1e-6


@dataclass(frozen=True)
class Poly:
    """Dense polynomial with complex coefficients, ascending degree.

    Trailing (highest-degree) exact zeros are stripped on construction, so
    ``degree == len(coeffs) - 1`` always holds.  The zero polynomial is
    ``Poly([0])`` with degree 0.
    """

    coeffs: tuple

    def __init__(self, coeffs: Iterable[complex]):
        c = [complex(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0j]
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> "Poly":
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "Poly":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> complex:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    def is_real(self, tol: float = 0.0) -> bool:
        scale = max(abs(c) for c in self.coeffs) or 1.0
        return all(abs(c.imag) <= tol * scale for c in self.coeffs)

    def array(self, dtype=complex) -> np.ndarray:
        return np.array(self.coeffs, dtype=dtype)

    def real_coeffs(self) -> np.ndarray:
        return np.array([c.real for c in self.coeffs])

    def __call__(self, x):
        return poly_eval(self, x)

    def derivative(self, order: int = 1) -> "Poly":
        c = list(self.coeffs)
        for _ in range(order):
            c = [k * c[k] for k in range(1, len(c))] or [0]
        return Poly(c)

    def __add__(self, other) -> "Poly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0j,) * (n - len(self.coeffs))
        b = other.coeffs + (0j,) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        other = _as_poly(other)
        return Poly(np.convolve(self.array(), other.array()))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Poly":
        return Poly(c / scalar for c in self.coeffs)

    def to_json(self) -> list:
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence) -> "Poly":
        """Accept ``[[re, im], ...]`` or plain real numbers, ascending degree."""
        if not isinstance(data, (list, tuple)) or not data:
            raise ValueError("polynomial JSON must be a non-empty array")
        coeffs = []
        for item in data:
            if isinstance(item, (list, tuple)):
                if len(item) != 2:
                    raise ValueError(f"bad coefficient entry {item!r}")
                coeffs.append(complex(float(item[0]), float(item[1])))
            elif isinstance(item, (int, float)) and not isinstance(item, bool):
                coeffs.append(complex(item))
            else:
                raise ValueError(f"bad coefficient entry {item!r}")
        return cls(coeffs)

    def __repr__(self) -> str:
        terms = ", ".join(_fmt_complex(c) for c in self.coeffs)
        return f"Poly([{terms}])"


def _fmt_complex(c: complex) -> str:
    return f"{c.real:g}" if c.imag == 0 else f"{c:g}"


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly([x])


def poly_eval(p: Poly, x):
    """Horner evaluation; works elementwise on numpy arrays."""
    acc = p.coeffs[-1] * np.ones_like(x, dtype=complex) if isinstance(x, np.ndarray) else p.coeffs[-1]
    for c in reversed(p.coeffs[:-1]):
        acc = acc * x + c
    return acc


def cluster_points(points: Sequence[complex], tol: float) -> list[list[int]]:
    """Group indices of points closer than ``tol * max(1, |x|)`` (transitively)."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = max(1.0, abs(points[i]), abs(points[j]))
            if abs(points[i] - points[j]) <= tol * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def poly_roots(p: Poly, cluster_tol: float = ROOT_CLUSTER_TOL) -> list[complex]:
    """All roots of ``p`` with multiplicity.

    Eigenvalues of the companion matrix of the monic rescaling; nearby
    eigenvalues are merged into one multiple root located at their mean, and
    each root is polished by a Newton step on the derivative of order
    ``multiplicity - 1`` (where the root is simple).
    """
    if p.is_zero():
        raise ValueError("roots of the zero polynomial are undefined")
    if p.degree < 1:
        raise ValueError("polynomial of degree 0 has no roots")
    c = np.array(p.coeffs, dtype=complex)
    n_zero = 0
    while c[n_zero] == 0:
        n_zero += 1
    c = c[n_zero:]
    roots: list[complex] = [0j] * n_zero
    deg = len(c) - 1
    if deg == 0:
        return roots
    monic = c[:-1] / c[-1]
    comp = np.zeros((deg, deg), dtype=complex)
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -monic
    eig = np.linalg.eigvals(comp)

    reduced = Poly(c)
    for group in cluster_points(list(eig), cluster_tol):
        m = len(group)
        r = complex(np.mean(eig[group]))
        q = reduced.derivative(m - 1)
        dq = q.derivative()
        dv = poly_eval(dq, r)
        if dv != 0:
            cand = r - poly_eval(q, r) / dv
            if abs(poly_eval(reduced, cand)) <= abs(poly_eval(reduced, r)):
                r = cand
        roots.extend([r] * m)
    return roots


def _check_images(images: Sequence[int]) -> tuple:
    imgs = tuple(int(i) for i in images)
    n = len(imgs)
    if sorted(imgs) != list(range(n)):
        raise ValueError(f"not a permutation of range({n}): {imgs}")
    return imgs


@dataclass(frozen=True)
class Perm:
    """Permutation of ``{0, ..., n-1}`` given by its image list."""

    images: tuple

    def __init__(self, images: Iterable[int]):
        object.__setattr__(self, "images", _check_images(list(images)))

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(range(n))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Perm":
        img = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a] = b
        return cls(img)

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Perm") -> "Perm":
        return perm_compose(self, other)

    def inverse(self) -> "Perm":
        inv = [0] * self.size
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(inv)

    def conjugate(self, tau: "Perm") -> "Perm":
        """``tau * self * tau^-1``: the same permutation after relabeling by ``tau``."""
        return tau * self * tau.inverse()

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[list[int]]:
        seen = [False] * self.size
        out = []
        for start in range(self.size):
            if seen[start]:
                continue
            cyc = []
            i = start
            while not seen[i]:
                seen[i] = True
                cyc.append(i)
                i = self.images[i]
            out.append(cyc)
        return out

    def cycle_type(self) -> list[int]:
        return perm_cycle_type(self)

    def to_json(self) -> list:
        return list(self.images)

    def __repr__(self) -> str:
        nontrivial = [c for c in self.cycles() if len(c) > 1]
        if not nontrivial:
            return f"Perm(id_{self.size})"
        return "Perm(" + "".join("(" + " ".join(map(str, c)) + ")" for c in nontrivial) + ")"


def perm_compose(p: Perm, q: Perm) -> Perm:
    """``(p o q)(i) = p(q(i))``."""
    if p.size != q.size:
        raise ValueError(f"size mismatch: {p.size} vs {q.size}")
    return Perm(p.images[i] for i in q.images)


def perm_cycle_type(p: Perm) -> list[int]:
    """Cycle lengths as a partition of ``n``, largest first (fixed points included)."""
    return sorted((len(c) for c in p.cycles()), reverse=True)

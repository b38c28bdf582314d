"""Green's-function data ``(z, b, w, lambda)`` for the two models of ``S^d + S^-d``.

``TrivialModel(d)`` lives on the punctured disk with ``z = zeta^d + zeta^-d``
and ``b = zeta``.  ``TModel(T, l)`` lives on the complement of
``E = T^{-1}[-2, 2]`` with ``z = T(u)`` and ``b_l`` the ``l``-th branch of
``phi(T(u))^{-1/d}``.  In both, ``w = d log b / dz`` satisfies

    z**2 - (w d)**-2 == 4,   |(w d)**-1 + z| < 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .inverse_spectral import critical_values, validate_target
from .numerics import Poly, poly_roots

__all__ = [
    "GreenPoint",
    "TrivialModel",
    "TModel",
    "GreenBranch",
    "SeparationResult",
    "trivial_eval",
    "tmodel_eval",
    "joukowski_phi",
    "slit_sqrt",
    "z_normalization_check",
    "greens_function",
    "green_grid",
    "discrete_laplacian",
    "harmonicity_ratio",
    "trivial_basis_matrix",
    "separation_check",
]

FOURIER_NODES = 4096
BRANCH_EXCLUSION = 1e-6


class GreenPoint(NamedTuple):
    z: complex
    b: complex
    w: complex
    lam: complex


def _on_slit(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return (z.imag == 0) & (np.abs(z.real) <= 2)


def slit_sqrt(z):
    """``sqrt(z**2 - 4)`` with the branch ``~ z`` at infinity, cut on ``[-2, 2]``."""
    z = np.asarray(z, dtype=complex)
    out = np.sqrt(z - 2) * np.sqrt(z + 2)
    return out[()] if out.ndim == 0 else out


def joukowski_phi(z):
    """Conformal map of the complement of ``[-2, 2]`` onto ``|phi| > 1``."""
    if np.any(_on_slit(z)):
        raise ValueError("phi is undefined on the slit [-2, 2]")
    return 0.5 * (np.asarray(z, dtype=complex) + slit_sqrt(z))[()]


def trivial_eval(d: int, zeta: complex) -> GreenPoint:
    zeta = complex(zeta)
    if not 0 < abs(zeta) < 1:
        raise ValueError("trivial model needs 0 < |zeta| < 1")
    zd = zeta**d
    z = zd + 1 / zd
    w = 1 / (d * (zd - 1 / zd))
    return GreenPoint(z, zeta, w, z * zd)


@dataclass(frozen=True)
class TrivialModel:
    d: int

    def eval(self, zeta) -> GreenPoint:
        return trivial_eval(self.d, zeta)

    def branch_points(self) -> list[complex]:
        return [2.0, -2.0]

    def fiber(self, z: complex) -> list[complex]:
        """Points ``zeta`` of the punctured disk with ``zeta^d + zeta^-d = z``."""
        s = 1 / joukowski_phi(z)
        base = s ** (1 / self.d)
        return [base * np.exp(2j * np.pi * l / self.d) for l in range(self.d)]


@dataclass(frozen=True, eq=False)
class TModel:
    """``z = T(u)`` model; ``T`` real, degree ``d``, critical values off ``(-2, 2)``."""

    T: Poly
    l: int = 0

    def __post_init__(self):
        validate_target(self.T)

    @property
    def d(self) -> int:
        return self.T.degree

    def eval(self, u) -> GreenPoint:
        z = complex(self.T(complex(u)))
        if _on_slit(z):
            raise ValueError(f"u = {u} lies on the spectrum T^-1[-2, 2]")
        return self._at_z(z, self.l)

    def _at_z(self, z: complex, l: int) -> GreenPoint:
        d = self.d
        phi = complex(joukowski_phi(z))
        b = np.exp(2j * np.pi * l / d) * phi ** (-1 / d)
        w = -1 / (d * complex(slit_sqrt(z)))
        return GreenPoint(z, complex(b), w, z * complex(b) ** d)

    def branch_points(self) -> list[complex]:
        return [2.0, -2.0] + [complex(c) for c in critical_values(self.T)]

    def fiber(self, z: complex) -> list[complex]:
        return poly_roots(self.T - z)


GreenBranch = Union[TrivialModel, TModel]


def tmodel_eval(T: Poly, l: int, u) -> GreenPoint:
    return TModel(T, l).eval(u)


def z_normalization_check(d: int, Z=None, radius: float = 1e-4, samples: int = 16) -> float:
    """``lim_{zeta -> 0} zeta^d Z(zeta)`` estimated on a small circle."""
    if Z is None:
        def Z(zeta):
            return zeta**d + zeta ** (-d)
    zeta = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    return float(np.mean(zeta**d * Z(zeta)).real)


def _phi_modulus_log(T: Poly, u):
    z = np.asarray(T(np.asarray(u, dtype=complex)), dtype=complex)
    on = _on_slit(z)
    zz = np.where(on, 3.0, z)
    g = np.log(np.abs(0.5 * (zz + slit_sqrt(zz)))) / T.degree
    return np.where(on, 0.0, g), on


def greens_function(T: Poly, u):
    """``G(u) = log|phi(T(u))| / d``, Green's function of ``C \\ T^-1[-2,2]`` with pole at infinity."""
    g, on = _phi_modulus_log(T, u)
    if np.any(on):
        raise ValueError("G is evaluated off the spectrum only")
    return g[()] if g.ndim == 0 else g


def green_grid(T: Poly, re, im) -> np.ndarray:
    """``G`` on a grid, continued by its boundary value 0 on the spectrum."""
    U = np.asarray(re)[None, :] + 1j * np.asarray(im)[:, None]
    return _phi_modulus_log(T, U)[0]


def discrete_laplacian(T: Poly, u: complex, h: float) -> float:
    """Five-point Laplacian ``(sum of neighbours - 4 G) / h**2`` at ``u``."""
    pts = np.array([u + h, u - h, u + 1j * h, u - 1j * h, u])
    g = greens_function(T, pts)
    return float((g[:4].sum() - 4 * g[4]) / h**2)


def harmonicity_ratio(T: Poly, u: complex, h: float) -> float:
    """``L(h) / L(h/2)``; close to 4 for a harmonic ``G`` (truncation error O(h^2))."""
    return discrete_laplacian(T, u, h) / discrete_laplacian(T, u, h / 2)


def trivial_basis_matrix(d: int, window, Z=None, nodes: int = FOURIER_NODES) -> np.ndarray:
    """Matrix ``<Z zeta^n, zeta^m>`` in ``L^2`` of the unit circle over ``window``.

    Entries are Fourier coefficients ``c_{m-n}`` of ``Z`` computed with the
    trapezoid rule (exact for trigonometric polynomials of degree < nodes/2).
    """
    if isinstance(window, (int, np.integer)):
        n0, n1 = 0, int(window)
    else:
        n0, n1 = map(int, window)
    if n1 - n0 < 2 * d + 1:
        raise ValueError(f"window length {n1 - n0} < 2d+1")
    if Z is None:
        def Z(zeta):
            return zeta**d + zeta ** (-d)
    theta = 2 * np.pi * np.arange(nodes) / nodes
    c = np.fft.fft(Z(np.exp(1j * theta))) / nodes
    idx = np.arange(n0, n1)
    return c[np.mod(idx[:, None] - idx[None, :], nodes)]


@dataclass(frozen=True)
class SeparationResult:
    separated: bool
    witness: tuple | None
    branches: tuple

    def to_json(self) -> dict:
        return {
            "separated": self.separated,
            "witness": list(self.witness) if self.witness else None,
            "branches": [
                {"b": [p.b.real, p.b.imag], "w": [p.w.real, p.w.imag]} for p in self.branches
            ],
        }


def separation_check(model: GreenBranch, z: complex, tol: float = 1e-10) -> SeparationResult:
    """Do ``z`` and ``w = d log b / dz`` separate the branches above ``z``?"""
    z = complex(z)
    if _on_slit(z):
        raise ValueError("z must lie off the band set [-2, 2]")
    for c in model.branch_points():
        if abs(z - c) < BRANCH_EXCLUSION:
            raise ValueError(f"z = {z} is too close to the branch point {c}")
    if isinstance(model, TrivialModel):
        branches = [trivial_eval(model.d, zeta) for zeta in model.fiber(z)]
    else:
        branches = [model._at_z(z, l) for l in range(model.d)]
    for i in range(len(branches)):
        for j in range(i + 1, len(branches)):
            bi, bj = branches[i], branches[j]
            same_w = abs(bi.w - bj.w) <= tol * max(1.0, abs(bi.w))
            if same_w and abs(bi.b - bj.b) > tol:
                return SeparationResult(False, (i, j), tuple(branches))
    return SeparationResult(True, None, tuple(branches))

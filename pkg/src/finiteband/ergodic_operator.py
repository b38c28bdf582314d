"""Multi-diagonal ergodic operators over a cyclic base ``Z_p``.

The system stores coefficient functions ``q[k]`` for ``k = 0..d`` only.
Row ``n`` of ``J(omega)`` reads

    (J x)_n = sum_{k=-d}^{d} conj(q^(k)(omega + n)) x_{n+k},

with the negative diagonals always derived as
``q^(-k)(omega) = conj(q^(k)(omega - k))``; this makes ``J`` Hermitian by
construction.  ``T`` is the rotation ``omega -> omega + 1 (mod p)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ValidationError",
    "ErgodicSystem",
    "OperatorSection",
    "build_section",
    "commutation_residual",
    "shift_commutation_residual",
    "symbol_matrix",
    "symbol_curve_residual",
    "constant_system",
    "jacobi_system",
]


class ValidationError(ValueError):
    """Input violates a structural invariant (positivity, reality, shape)."""


@dataclass(frozen=True, eq=False)
class ErgodicSystem:
    """Finite-cyclic model ``(Z_p, T, uniform)`` with coefficients ``q[k][omega]``.

    Parameters
    ----------
    p : int
        Period, size of the cyclic base.  ``p = 1`` means constant coefficients.
    d : int
        Half-bandwidth.
    q : array_like, shape (d + 1, p)
        ``q[k, omega]`` is the coefficient function of the ``k``-th diagonal.
        ``q[d]`` must be real and positive, ``q[0]`` real.
    """

    p: int
    d: int
    q: np.ndarray

    def __post_init__(self):
        p, d = int(self.p), int(self.d)
        if p < 1 or d < 1:
            raise ValidationError(f"need p >= 1 and d >= 1, got p={p}, d={d}")
        q = np.array(self.q, dtype=complex)
        if q.shape != (d + 1, p):
            raise ValidationError(f"q must have shape {(d + 1, p)}, got {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValidationError("coefficients must be finite")
        if np.any(q[d].imag != 0) or np.any(q[d].real <= 0):
            raise ValidationError(f"q^({d}) must be positive-valued, got {q[d]}")
        if np.any(q[0].imag != 0):
            raise ValidationError(f"q^(0) must be real-valued, got {q[0]}")
        q.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "q", q)

    def coeff(self, k: int, omega) -> complex:
        """``q^(k)(omega)`` for ``-d <= k <= d``; vectorized over integer ``omega``."""
        if abs(k) > self.d:
            raise IndexError(f"|k| must be <= {self.d}")
        if k >= 0:
            return self.q[k][np.mod(omega, self.p)]
        return np.conj(self.q[-k][np.mod(np.asarray(omega) + k, self.p)])

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "d": self.d,
            "q": [[[c.real, c.imag] for c in row] for row in self.q],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ErgodicSystem":
        try:
            p, d, rows = int(data["p"]), int(data["d"]), data["q"]
            q = [[_parse_complex(c) for c in row] for row in rows]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed system JSON: {exc}") from exc
        return cls(p, d, q)


def _parse_complex(c) -> complex:
    if isinstance(c, (list, tuple)):
        re, im = c
        return complex(float(re), float(im))
    return complex(float(c))


def constant_system(d: int, coeffs) -> ErgodicSystem:
    """``p = 1`` system with ``q^(k) = coeffs[k]``."""
    return ErgodicSystem(1, d, np.asarray(coeffs, dtype=complex).reshape(d + 1, 1))


def jacobi_system(a, b) -> ErgodicSystem:
    """Tridiagonal system ``J_{n,n+1} = a_n``, ``J_{n,n} = b_n`` of period ``len(a)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValidationError("a and b must be 1-d arrays of equal length")
    return ErgodicSystem(len(a), 1, np.vstack([b, a]))


@dataclass(frozen=True, eq=False)
class OperatorSection:
    """Dense block ``J(omega)[n0:n1, n0:n1]`` of the infinite matrix."""

    window: tuple
    entries: np.ndarray

    @property
    def size(self) -> int:
        return self.window[1] - self.window[0]

    def is_hermitian(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.conj().T))


def _window(window) -> tuple:
    if isinstance(window, (int, np.integer)):
        return 0, int(window)
    n0, n1 = window
    return int(n0), int(n1)


def build_section(sys: ErgodicSystem, omega: int, window) -> OperatorSection:
    """Section of ``J(omega)`` over the half-open index range ``window``.

    ``window`` is either ``(n0, n1)`` or a length ``N`` meaning ``(0, N)``.
    """
    n0, n1 = _window(window)
    size = n1 - n0
    if size < 2 * sys.d + 1:
        raise ValueError(f"window length {size} < 2d+1 = {2 * sys.d + 1}")
    n = np.arange(n0, n1)
    J = np.zeros((size, size), dtype=complex)
    for k in range(-sys.d, sys.d + 1):
        rows = np.arange(max(0, -k), min(size, size - k))
        J[rows, rows + k] = np.conj(sys.coeff(k, omega + n[rows]))
    return OperatorSection((n0, n1), J)


def commutation_residual(J_omega: np.ndarray, J_T_omega: np.ndarray) -> float:
    """Max interior entry of ``J(omega) S - S J(T omega)`` for same-window sections.

    ``S`` is the shift ``(S x)_n = x_{n-1}``, so on a section
    ``(J S)_{n,m} = J_{n,m+1}`` and ``(S J')_{n,m} = J'_{n-1,m}``.  One layer
    of boundary rows and columns is dropped on each side.
    """
    lhs = J_omega[1:-1, 2:]
    rhs = J_T_omega[:-2, 1:-1]
    return float(np.max(np.abs(lhs - rhs)))


def shift_commutation_residual(sys: ErgodicSystem, omega: int, window) -> float:
    n0, n1 = _window(window)
    if n1 - n0 < 2 * sys.d + 3:
        raise ValueError(f"window length {n1 - n0} < 2d+3 = {2 * sys.d + 3}")
    J0 = build_section(sys, omega, (n0, n1)).entries
    J1 = build_section(sys, omega + 1, (n0, n1)).entries
    return commutation_residual(J0, J1)


def symbol_matrix(sys: ErgodicSystem, b: complex) -> np.ndarray:
    """Symbol ``sum_k diag(conj q^(k)) U^k conj(b)^k`` as a ``p x p`` matrix.

    ``(U c)(omega) = c(omega + 1)``.  Entry ``[omega, omega + k]`` collects
    ``conj(q^(k)(omega)) conj(b)^k``; for ``|b| = 1`` this is the Bloch
    matrix of ``J`` with quasi-momentum ``conj(b)``, hence Hermitian.
    """
    b = complex(b)
    if b == 0:
        raise ValueError("symbol undefined at b = 0")
    p = sys.p
    M = np.zeros((p, p), dtype=complex)
    omega = np.arange(p)
    bc = b.conjugate()
    for k in range(-sys.d, sys.d + 1):
        np.add.at(M, (omega, (omega + k) % p), np.conj(sys.coeff(k, omega)) * bc**k)
    return M


def symbol_curve_residual(sys: ErgodicSystem, b: complex, z: complex) -> float:
    """``|det(symbol(b) - conj(z) I)|``; vanishes exactly on the spectral curve."""
    M = symbol_matrix(sys, b)
    return float(abs(np.linalg.det(M - np.conj(z) * np.eye(sys.p))))

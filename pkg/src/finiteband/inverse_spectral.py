"""Periodic Jacobi matrices with a prescribed discriminant.

Given a real polynomial ``T`` of degree ``d`` whose critical values are real
and lie outside ``(-2, 2)``, find ``a_n > 0, b_n`` (period ``d``) whose
discriminant equals ``T``; then ``T(J0) = S^d + S^-d``.  The solution set
is an isospectral torus (one circle per open gap), any point of which is
returned.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .ergodic_operator import build_section
from .floquet import BandSet, PeriodicJacobi, _discriminant_coeffs, bands_from_discriminant
from .numerics import Poly, poly_roots

__all__ = [
    "TargetError",
    "FitError",
    "FitProblem",
    "critical_values",
    "validate_target",
    "fit_discriminant",
    "fit_residual",
    "open_gaps",
    "magic_formula_check",
    "magic_formula_deviation",
    "matrix_poly",
]

CRITICAL_VALUE_SLACK = 1e-12
FIT_TOL = 1e-10
N_STARTS = 20
POLISH_DPS = 40


class TargetError(ValueError):
    """Target polynomial is not the discriminant of any periodic Jacobi matrix."""


class FitError(RuntimeError):
    def __init__(self, message: str, best_residual: float):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


def critical_values(T: Poly) -> list[complex]:
    if T.degree < 2:
        return []
    return [T(c) for c in poly_roots(T.derivative())]


@dataclass(frozen=True, eq=False)
class FitProblem:
    T: Poly
    target: np.ndarray

    @property
    def d(self) -> int:
        return self.T.degree

    @property
    def lead(self) -> float:
        return float(self.target[-1])

    def residual(self, x) -> np.ndarray:
        """Coefficients of ``Delta(J0(x)) - T`` for ``x = (log a, b)``."""
        d = self.d
        a = np.exp(x[:d]) if x.dtype != object else np.array([mpmath.exp(s) for s in x[:d]], dtype=object)
        return _discriminant_coeffs(a, x[d:]) - self.target


def validate_target(T: Poly) -> FitProblem:
    """Check that ``T`` can be a discriminant: real, positive leading
    coefficient, real critical values of modulus at least 2."""
    if T.degree < 1:
        raise TargetError("target must have degree >= 1")
    if not T.is_real(1e-12):
        raise TargetError("target must have real coefficients")
    Tr = Poly(T.real_coeffs())
    if Tr.lead.real <= 0:
        raise TargetError(f"leading coefficient must be positive, got {Tr.lead.real}")
    for v in critical_values(Tr):
        if abs(v.imag) > 1e-9 * max(1.0, abs(v)):
            raise TargetError(f"critical value {v:.12g} is not real")
        if abs(v.real) < 2 - CRITICAL_VALUE_SLACK:
            raise TargetError(f"critical value {v.real:.12g} lies inside (-2, 2)")
    return FitProblem(Tr, Tr.real_coeffs())


def _jacobian(problem: FitProblem, x: np.ndarray) -> np.ndarray:
    """Complex-step derivative; exact to rounding since the residual is analytic."""
    n = x.size
    h = 1e-30
    J = np.empty((problem.d + 1, n))
    for j in range(n):
        xc = x.astype(complex)
        xc[j] += 1j * h
        J[:, j] = problem.residual(xc).imag / h
    return J


def _mp_jacobian(problem: FitProblem, x: np.ndarray) -> mpmath.matrix:
    h = mpmath.mpf(10) ** (-2 * POLISH_DPS)
    J = mpmath.matrix(problem.d + 1, x.size)
    for j in range(x.size):
        xc = np.array([mpmath.mpc(v) for v in x], dtype=object)
        xc[j] += mpmath.mpc(0, h)
        col = problem.residual(xc)
        for i in range(problem.d + 1):
            J[i, j] = mpmath.im(col[i]) / h
    return J


def _lm(problem: FitProblem, x: np.ndarray, max_iter: int, stop: float) -> tuple[np.ndarray, float]:
    """Levenberg-Marquardt with the minimum-norm damped step
    ``dx = -J^T (J J^T + mu I)^-1 r`` (the system is underdetermined)."""
    r = problem.residual(x).real
    err = np.max(np.abs(r))
    mu = 1e-3
    for _ in range(max_iter):
        if err <= stop:
            break
        J = _jacobian(problem, x)
        A = J @ J.T
        improved = False
        while mu < 1e12:
            dx = -J.T @ np.linalg.solve(A + mu * np.eye(A.shape[0]), r)
            x_new = x + dx
            r_new = problem.residual(x_new).real
            if np.all(np.isfinite(r_new)) and r_new @ r_new < r @ r:
                x, r = x_new, r_new
                err = np.max(np.abs(r))
                mu = max(mu / 3, 1e-15)
                improved = True
                break
            mu *= 4
        if not improved:
            break
    return x, err


def _mp_polish(problem: FitProblem, x: np.ndarray, iterations: int = 200) -> np.ndarray:
    """Gauss-Newton in extended precision.

    At closed gaps the solution is a degenerate zero of the residual, where
    double precision pins the parameters only to ~sqrt(eps).
    """
    with mpmath.workdps(POLISH_DPS):
        xm = np.array([mpmath.mpf(float(v)) for v in x], dtype=object)
        r = problem.residual(xm)
        norm = max(abs(v) for v in r)
        mu = mpmath.mpf("1e-6")
        floor = mpmath.mpf(10) ** (-POLISH_DPS + 5)
        for _ in range(iterations):
            if norm < floor:
                break
            J = _mp_jacobian(problem, xm)
            rv = mpmath.matrix([v for v in r])
            A = J * J.T
            improved = False
            while mu < 1e12:
                y = mpmath.lu_solve(A + mu * mpmath.eye(A.rows), rv)
                dx = -(J.T * y)
                x_new = np.array([xm[i] + dx[i] for i in range(xm.size)], dtype=object)
                r_new = problem.residual(x_new)
                n_new = max(abs(v) for v in r_new)
                if n_new < norm:
                    xm, r, norm = x_new, r_new, n_new
                    mu = max(mu / 3, mpmath.mpf(10) ** (-POLISH_DPS))
                    improved = True
                    break
                mu *= 4
            if not improved:
                break
        return np.array([float(v) for v in xm])


def _start(problem: FitProblem, rng: np.random.Generator) -> np.ndarray:
    d = problem.d
    scale = problem.lead ** (-1.0 / d)
    rho = rng.uniform(0.6, 1.6)
    a = scale * rho ** (np.arange(d) - (d - 1) / 2)
    centre = -problem.target[d - 1] / problem.lead / d
    b = centre + rng.uniform(-0.5, 0.5, size=d)
    return np.concatenate([np.log(a), b])


def fit_residual(J0: PeriodicJacobi, T: Poly) -> float:
    """``max |coeffs(Delta(J0)) - coeffs(T)|``."""
    delta = _discriminant_coeffs(J0.a, J0.b)
    t = np.asarray(T.real_coeffs())
    n = max(delta.size, t.size)
    diff = np.zeros(n)
    diff[: delta.size] += delta
    diff[: t.size] -= t
    return float(np.max(np.abs(diff)))


def fit_discriminant(problem: FitProblem | Poly, seed: int | None = 0, tol: float = FIT_TOL,
                     starts: int = N_STARTS, polish: bool = True) -> PeriodicJacobi:
    """A periodic Jacobi matrix with discriminant ``problem.T``.

    Multi-start Levenberg-Marquardt in ``(log a_n, b_n)``; the first start
    reaching ``tol`` wins and is polished in extended precision.
    """
    if isinstance(problem, Poly):
        problem = validate_target(problem)
    d = problem.d
    if d == 1:
        # Delta = (z - b) / a exactly
        c0, c1 = problem.target
        return PeriodicJacobi([1 / c1], [-c0 / c1])
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.max(np.abs(problem.target))))
    best = (np.inf, None)
    for _ in range(starts):
        x, err = _lm(problem, _start(problem, rng), max_iter=500, stop=1e-15 * scale)
        if err < best[0]:
            best = (err, x)
        if err < tol:
            break
    err, x = best
    if not err < tol:
        raise FitError(f"no start converged for T = {problem.T}", err)
    J0 = PeriodicJacobi(np.exp(x[:d]), x[d:])
    if polish:
        xp = _mp_polish(problem, x)
        Jp = PeriodicJacobi(np.exp(xp[:d]), xp[d:])
        if fit_residual(Jp, problem.T) <= fit_residual(J0, problem.T):
            J0 = Jp
    return J0


def open_gaps(T: Poly) -> list[tuple[float, float]]:
    """Open gaps of ``T^-1[-2, 2]``; each contributes one circle to the isospectral torus."""
    return bands_from_discriminant(T).gaps()


def matrix_poly(T: Poly, A: np.ndarray) -> np.ndarray:
    """``T(A)`` by Horner's scheme."""
    c = T.real_coeffs() if T.is_real() else np.array(T.coeffs)
    R = c[-1] * np.eye(A.shape[0], dtype=np.result_type(A, c))
    for ck in c[-2::-1]:
        R = R @ A
        R[np.diag_indices_from(R)] += ck
    return R


def magic_formula_deviation(J0: PeriodicJacobi, T: Poly, N: int, margin: int) -> tuple[float, tuple]:
    """Max interior deviation of ``T(J0)`` from ``S^d + S^-d`` and the entry where it occurs."""
    d = T.degree
    if margin < J0.period * d:
        raise ValueError(f"margin {margin} < d * deg(T) = {J0.period * d}")
    if N < 2 * margin + 10:
        raise ValueError(f"N = {N} < 2 * margin + 10")
    J = build_section(J0.to_system(), 0, N).entries.real
    R = matrix_poly(T, J)
    idx = np.arange(N)
    pattern = (np.abs(idx[:, None] - idx[None, :]) == d).astype(float)
    dev = np.abs(R - pattern)[margin:N - margin, margin:N - margin]
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return float(dev[i, j]), (int(i + margin), int(j + margin))


def magic_formula_check(J0: PeriodicJacobi, T: Poly, N: int, margin: int) -> float:
    return magic_formula_deviation(J0, T, N, margin)[0]

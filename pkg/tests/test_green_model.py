import math

import numpy as np
import pytest

from finiteband.ergodic_operator import build_section, constant_system
from finiteband.floquet import bands_from_discriminant
from finiteband.green_model import (
    TModel,
    TrivialModel,
    discrete_laplacian,
    green_grid,
    greens_function,
    harmonicity_ratio,
    joukowski_phi,
    separation_check,
    slit_sqrt,
    tmodel_eval,
    trivial_basis_matrix,
    trivial_eval,
    z_normalization_check,
)
from finiteband.inverse_spectral import TargetError
from finiteband.numerics import Poly

TARGETS = {"z2-2": Poly([-2, 0, 1]), "z2-3": Poly([-3, 0, 1]), "z3-3z": Poly([0, -3, 0, 1])}


def random_disk_points(rng, n):
    r = np.sqrt(rng.uniform(1e-4, 0.95**2, n))
    return r * np.exp(2j * np.pi * rng.random(n))


def random_off_spectrum(rng, T, n):
    bands = bands_from_discriminant(T)
    out = []
    while len(out) < n:
        u = complex(rng.uniform(-4, 4), rng.uniform(-3, 3))
        z = complex(T(u))
        if abs(z.imag) < 1e-6 and abs(z.real) <= 2 + 1e-6:
            continue
        if abs(u.imag) < 1e-6 and bands.distance(u.real) < 1e-3:
            continue
        out.append(u)
    return out


def test_trivial_eval_example():
    p = trivial_eval(1, 0.5)
    assert p.z == 2.5 and p.b == 0.5 and p.lam == 1.25
    assert abs(p.w + 2 / 3) < 1e-15


def test_trivial_eval_domain():
    for zeta in (0, 1, 1.2j):
        with pytest.raises(ValueError):
            trivial_eval(2, zeta)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_trivial_identity_and_side_condition(d, rng):
    for zeta in random_disk_points(rng, 100):
        p = trivial_eval(d, zeta)
        inv = 1 / (p.w * d)
        assert abs(p.z**2 - inv**2 - 4) < 1e-10 * max(1, abs(p.z) ** 2)
        assert abs(inv + p.z) < 2
        assert abs(inv + p.z - 2 * zeta**d) < 1e-10 * max(1, abs(p.z))
        assert abs(p.lam / p.b**d - p.z) < 1e-10 * max(1, abs(p.z))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_character_action(d, rng):
    mu = np.exp(2j * np.pi / d)
    for zeta in random_disk_points(rng, 10):
        p, q = trivial_eval(d, zeta), trivial_eval(d, zeta * mu)
        assert abs(p.z - q.z) < 1e-9 * abs(p.z)
        assert abs(p.w - q.w) < 1e-9 * max(1, abs(p.w))
        assert abs(q.b - mu * p.b) < 1e-15


@pytest.mark.parametrize("d", [1, 2, 3])
def test_trivial_w_is_log_derivative(d, rng):
    h = 1e-6
    for zeta in random_disk_points(rng, 5):
        zeta = 0.3 + 0.5 * zeta  # keep away from 0 and the circle
        p = trivial_eval(d, zeta)
        dz = (trivial_eval(d, zeta + h).z - trivial_eval(d, zeta - h).z) / (2 * h)
        assert abs(p.w - 1 / (zeta * dz)) < 1e-6 * max(1, abs(p.w))


def test_z_normalization():
    assert z_normalization_check(1) == pytest.approx(1.0, abs=1e-7)
    assert z_normalization_check(3) == pytest.approx(1.0, abs=1e-7)
    assert z_normalization_check(2, Z=lambda s: -s**-2) == pytest.approx(-1.0, abs=1e-12)


def test_joukowski_examples():
    assert abs(joukowski_phi(2.5) - 2) < 1e-15
    assert abs(joukowski_phi(-2.5) + 2) < 1e-15
    assert abs(joukowski_phi(1e6) / 1e6 - 1) < 1e-11
    with pytest.raises(ValueError):
        joukowski_phi(1.0)


def test_joukowski_inverts_and_expands(rng):
    z = rng.normal(scale=3, size=50) + 1j * rng.normal(scale=3, size=50)
    phi = joukowski_phi(z)
    assert np.all(np.abs(phi) > 1)
    assert np.allclose(phi + 1 / phi, z, atol=1e-12)
    # branch of sqrt(z^2 - 4) is ~ z at infinity and odd
    assert np.allclose(slit_sqrt(-z), -slit_sqrt(z), atol=1e-12)


def test_tmodel_examples():
    T = TARGETS["z2-2"]
    with pytest.raises(ValueError):
        tmodel_eval(T, 0, 2.0)
    p = tmodel_eval(T, 0, 2.1)
    assert abs(p.z - 2.41) < 1e-14
    assert abs(abs(p.b) - joukowski_phi(2.41).real ** -0.5) < 1e-15
    assert abs(p.b) < 1


def test_tmodel_rejects_bad_target():
    with pytest.raises(TargetError):
        TModel(Poly([0, 0, 1]))


@pytest.mark.parametrize("name", sorted(TARGETS))
def test_tmodel_identity_and_branches(name, rng):
    T = TARGETS[name]
    d = T.degree
    for u in random_off_spectrum(rng, T, 100):
        pts = [tmodel_eval(T, l, u) for l in range(d)]
        for p in pts:
            inv = 1 / (p.w * d)
            assert abs(p.z**2 - inv**2 - 4) < 1e-10 * max(1, abs(p.z) ** 2)
            assert abs(inv + p.z) < 2
            assert abs(p.b) < 1
            assert abs(p.lam / p.b**d - p.z) < 1e-10 * max(1, abs(p.z))
        # all branches share w; b differs by d-th roots of unity
        assert all(p.w == pts[0].w for p in pts)
        for l, p in enumerate(pts):
            assert abs(p.b - np.exp(2j * np.pi * l / d) * pts[0].b) < 1e-14


@pytest.mark.parametrize("name", sorted(TARGETS))
def test_tmodel_w_is_log_derivative(name):
    model = TModel(TARGETS[name])
    h = 1e-6
    for z in (3.1 + 0.4j, -2.7 - 1j, 0.5j):
        p = model._at_z(z, 0)
        fd = (np.log(model._at_z(z + h, 0).b) - np.log(model._at_z(z - h, 0).b)) / (2 * h)
        assert abs(fd - p.w) < 1e-6 * max(1, abs(p.w))


def test_greens_function_example():
    assert greens_function(Poly([0, 1]), 2.5) == pytest.approx(math.log(2), abs=1e-15)
    with pytest.raises(ValueError):
        greens_function(Poly([0, 1]), 0.5)


@pytest.mark.parametrize("name", sorted(TARGETS))
def test_green_positive_and_equals_minus_log_b(name, rng):
    T = TARGETS[name]
    for u in random_off_spectrum(rng, T, 50):
        G = greens_function(T, u)
        assert G > 0
        for l in range(T.degree):
            assert abs(-math.log(abs(tmodel_eval(T, l, u).b)) - G) < 1e-12


@pytest.mark.parametrize("name", sorted(TARGETS))
def test_green_decays_at_band_endpoints(name):
    T = TARGETS[name]
    for l, r in bands_from_discriminant(T).intervals:
        for e, out in ((l, -1), (r, 1)):
            values = [greens_function(T, e + out * delta) for delta in (5e-5, 1e-5, 1e-6)]
            assert max(values) < 1e-2
            assert values[0] > values[1] > values[2] > 0
            assert greens_function(T, e + 5e-5j) < 1e-2


@pytest.mark.parametrize("name", sorted(TARGETS))
def test_green_logarithmic_at_infinity(name):
    T = TARGETS[name]
    d = T.degree
    for u in (1e6, -1e6j, 7e5 + 7e5j):
        assert abs(greens_function(T, u) - math.log(abs(u)) - math.log(T.lead.real) / d) < 1e-9


@pytest.mark.parametrize("name", sorted(TARGETS))
def test_green_harmonic(name, rng):
    T = TARGETS[name]
    checked = 0
    for u in random_off_spectrum(rng, T, 20):
        if min(abs(u - e) for iv in bands_from_discriminant(T).intervals for e in iv) < 0.3:
            continue
        if abs(complex(T(u)).imag) < 0.3 and abs(complex(T(u)).real) < 2.3:
            continue
        ratio = harmonicity_ratio(T, u, 2e-2)
        assert 4 / 3 <= ratio <= 12
        assert abs(discrete_laplacian(T, u, 1e-2)) < 1e-3
        checked += 1
    assert checked >= 3


def test_green_grid_zero_on_spectrum():
    G = green_grid(Poly([0, 1]), np.linspace(-3, 3, 7), np.array([0.0, 1.0]))
    assert G.shape == (2, 7)
    assert np.all(G[0, 1:6] == 0)
    assert np.all(G[1] > 0)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_basis_matrix_is_shift_pair_section(d):
    M = trivial_basis_matrix(d, 20)
    J = build_section(constant_system(d, [0] * d + [1]), 0, 20).entries
    assert np.max(np.abs(M - J)) < 1e-12


def test_basis_matrix_d3_window12():
    M = trivial_basis_matrix(3, 12)
    idx = np.arange(12)
    on = np.abs(idx[:, None] - idx[None, :]) == 3
    assert np.allclose(M[on], 1, atol=1e-14)
    assert np.max(np.abs(M[~on])) < 1e-12


def test_basis_matrix_non_symmetric_symbol():
    M = trivial_basis_matrix(1, (-3, 5), Z=lambda s: s + 2 / s)
    # <Z zeta^n, zeta^m> = c_{m-n}: c_1 = 1, c_{-1} = 2
    assert np.allclose(np.diag(M, -1), 1, atol=1e-14)
    assert np.allclose(np.diag(M, 1), 2, atol=1e-14)
    assert not np.allclose(M, M.conj().T)
    with pytest.raises(ValueError):
        trivial_basis_matrix(3, 6)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_trivial_model_not_separated(d, rng):
    for _ in range(20):
        z = complex(rng.uniform(-4, 4), rng.uniform(0.2, 3) * rng.choice([-1, 1]))
        res = separation_check(TrivialModel(d), z)
        assert not res.separated and res.witness is not None


@pytest.mark.parametrize("name", sorted(TARGETS))
def test_tmodel_not_separated(name, rng):
    model = TModel(TARGETS[name])
    for _ in range(20):
        z = complex(rng.uniform(-4, 4), rng.uniform(0.2, 3) * rng.choice([-1, 1]))
        res = separation_check(model, z)
        assert not res.separated
        i, j = res.witness
        assert res.branches[i].w == res.branches[j].w and res.branches[i].b != res.branches[j].b


def test_single_branch_is_separated():
    res = separation_check(TrivialModel(1), 3 + 1j)
    assert res.separated and res.witness is None
    assert res.to_json()["separated"] is True


def test_trivial_fiber_lies_over_z():
    model = TrivialModel(3)
    z = 1.3 + 2.2j
    for zeta in model.fiber(z):
        assert abs(zeta) < 1
        assert abs(trivial_eval(3, zeta).z - z) < 1e-12


def test_separation_rejects_band_and_branch_points():
    with pytest.raises(ValueError):
        separation_check(TrivialModel(2), 1.0)
    with pytest.raises(ValueError):
        separation_check(TModel(TARGETS["z2-3"]), -3 + 1e-8j)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finiteband.numerics import Perm, Poly, cluster_points, perm_compose, perm_cycle_type, poly_eval, poly_roots


def test_poly_eval_examples():
    assert poly_eval(Poly([-2, 0, 1]), 2) == 2
    assert poly_eval(Poly([0, -3, 0, 1]), 2) == 2
    assert poly_eval(Poly([]), 1.7 + 3j) == 0
    assert poly_eval(Poly([5]), 123.0) == 5


def test_poly_strips_trailing_zeros():
    p = Poly([1, 2, 0, 0])
    assert p.degree == 1
    assert Poly([0, 0]).is_zero()


def test_poly_arithmetic_matches_numpy():
    p, q = Poly([1, 2, 3]), Poly([0, -1, 0, 4])
    x = 0.3 - 1.1j
    assert abs((p * q)(x) - p(x) * q(x)) < 1e-14
    assert abs((p + q)(x) - (p(x) + q(x))) < 1e-14
    assert abs((p - q)(x) - (p(x) - q(x))) < 1e-14
    assert p.derivative().coeffs == Poly([2, 6]).coeffs


def test_poly_json_round_trip():
    p = Poly([1 + 2j, -0.5, 3j])
    assert Poly.from_json(p.to_json()).coeffs == p.coeffs
    assert Poly.from_json([-2, 0, 1]).coeffs == Poly([-2, 0, 1]).coeffs


def _sorted(rs):
    return sorted(rs, key=lambda r: (round(r.real, 8), round(r.imag, 8)))


def test_roots_simple():
    rs = _sorted(poly_roots(Poly([-1, 0, 1])))
    assert np.allclose(rs, [-1, 1], atol=1e-14)


def test_roots_double():
    rs = _sorted(poly_roots(Poly([1, 0, -2, 0, 1])))
    assert len(rs) == 4
    assert np.allclose(rs, [-1, -1, 1, 1], atol=1e-12)


def test_roots_quartic_in_lambda_squared():
    # s + 1/s = 2.5 gives s = 2 or 1/2
    rs = _sorted(poly_roots(Poly([1, 0, -2.5, 0, 1])))
    expected = _sorted([math.sqrt(2), -math.sqrt(2), 1 / math.sqrt(2), -1 / math.sqrt(2)])
    assert np.allclose(rs, expected, atol=1e-13)


def test_roots_at_zero_and_rejections():
    rs = poly_roots(Poly([0, 0, -1, 1]))
    assert sorted(abs(r) for r in rs) == pytest.approx([0, 0, 1], abs=1e-14)
    with pytest.raises(ValueError):
        poly_roots(Poly([]))
    with pytest.raises(ValueError):
        poly_roots(Poly([3]))


def test_cluster_points_groups_chains():
    groups = cluster_points([0, 1e-9, 2e-9, 5], 1.5e-9)
    assert sorted(map(sorted, groups)) == [[0, 1, 2], [3]]


coeff = st.complex_numbers(min_magnitude=0, max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=8), st.complex_numbers(min_magnitude=0.1, max_magnitude=10))
def test_root_residual_bound(lower, lead):
    p = Poly(list(lower) + [lead])
    scale = max(abs(c) for c in p.coeffs)
    for r in poly_roots(p):
        assert abs(p(r)) <= 1e-10 * scale * max(1.0, abs(r)) ** p.degree


def test_perm_examples():
    p = Perm([2, 0, 1, 3])
    assert perm_compose(Perm.identity(4), p) == p
    assert perm_cycle_type(Perm.from_cycles(4, [(0, 1), (2, 3)])) == [2, 2]
    c = Perm.from_cycles(3, [(0, 1, 2)])
    assert perm_compose(c, c) == Perm.from_cycles(3, [(0, 2, 1)])


def test_perm_compose_order_and_errors():
    p, q = Perm([1, 0, 2]), Perm([0, 2, 1])
    r = perm_compose(p, q)
    assert all(r(i) == p(q(i)) for i in range(3))
    with pytest.raises(ValueError):
        perm_compose(Perm([0, 1]), Perm([0, 1, 2]))
    with pytest.raises(ValueError):
        Perm([0, 0, 1])


def test_cycle_type_includes_fixed_points():
    assert perm_cycle_type(Perm([1, 0, 2, 3, 4])) == [2, 1, 1, 1]
    assert perm_cycle_type(Perm.identity(3)) == [1, 1, 1]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(*[st.permutations(list(range(n)))] * 3)))
def test_compose_associative(triple):
    a, b, c = (Perm(t) for t in triple)
    assert perm_compose(perm_compose(a, b), c) == perm_compose(a, perm_compose(b, c))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(*[st.permutations(list(range(n)))] * 2)))
def test_cycle_type_conjugation_invariant(pair):
    p, tau = (Perm(t) for t in pair)
    assert perm_cycle_type(p.conjugate(tau)) == perm_cycle_type(p)
    assert sum(perm_cycle_type(p)) == p.size


def test_perm_inverse_and_json():
    p = Perm([3, 1, 0, 2])
    assert (p * p.inverse()).is_identity()
    assert Perm(p.to_json()) == p

"""Covariant derivatives, torsion, curvature, Koszul solving: oracle checks."""

import itertools
from fractions import Fraction

import pytest

from leibniz_geo import (
    EConnection,
    EMetric,
    ScalarField,
    courant,
    courant_pairing,
    curvature,
    levi_civita_solve,
    nonmetricity,
    second_cov_and_ricci,
    so3,
    tangent,
    torsion,
)
from leibniz_geo.connection import (
    covariant_derivative_vector,
    difference_tensor,
    frame_covariant_derivative,
    koszul_connection,
    modified_bracket_coeffs,
    projected_torsion,
    torsion_eval,
)
from leibniz_geo.tensor import ETensor
from conftest import (
    classical_christoffel,
    classical_riemann,
    eta_compatible_connection,
    make_rng,
    random_connection,
    random_constant_connection,
    random_metric,
    random_polynomial,
)


def polar_metric(A):
    x1 = A.x(1)
    return EMetric([[A.one(), A.zero()], [A.zero(), x1 * x1]], A.coords)


def hyperbolic_metric(A):
    inv = A.field("1/(x2^2)")
    return EMetric([[inv, A.zero()], [A.zero(), inv]], A.coords)


def test_covariant_derivative_leibniz_in_function():
    A = tangent(2)
    rng = make_rng(21)
    conn = random_connection(A, rng, degree=1)
    u = A.vector([random_polynomial(A, rng) for _ in range(2)])
    v = A.vector([random_polynomial(A, rng) for _ in range(2)])
    f = random_polynomial(A, rng)
    lhs = covariant_derivative_vector(A, conn, u, v.scale(f))
    rhs = covariant_derivative_vector(A, conn, u, v).scale(f) + v.scale(
        A.anchor_apply(u, f)
    )
    assert (lhs - rhs).is_zero
    # Tensorial in the direction argument.
    lhs2 = covariant_derivative_vector(A, conn, u.scale(f), v)
    rhs2 = covariant_derivative_vector(A, conn, u, v).scale(f)
    assert (lhs2 - rhs2).is_zero


def test_levi_civita_matches_classical_christoffel():
    A = tangent(2)
    for g in (polar_metric(A), hyperbolic_metric(A)):
        conn = levi_civita_solve(A, g)
        oracle = classical_christoffel(A, g)
        assert difference_tensor(A, conn, oracle).is_zero
        assert torsion(A, conn).is_zero
        assert nonmetricity(A, conn, g).is_zero


def test_levi_civita_matches_koszul_on_tangent():
    A = tangent(2)
    g = polar_metric(A)
    solved = levi_civita_solve(A, g)
    direct = koszul_connection(A, A.bracket, g)
    assert difference_tensor(A, solved, direct).is_zero


def test_curvature_matches_classical_riemann():
    A = tangent(2)
    rng = make_rng(23)
    for _ in range(3):
        conn = random_connection(A, rng, degree=1)
        R = curvature(A, conn)
        oracle = classical_riemann(A, conn)
        # On the tangent builtin L = 0 and c = 0, so the modified-bracket
        # correction vanishes and the classical formula is the whole answer.
        assert (R - oracle).is_zero


def test_flat_polar_curvature_vanishes():
    A = tangent(2)
    conn = levi_civita_solve(A, polar_metric(A))
    assert curvature(A, conn).is_zero


def test_hyperbolic_curvature_is_constant_negative():
    A = tangent(2)
    g = hyperbolic_metric(A)
    conn = levi_civita_solve(A, g)
    R = curvature(A, conn)
    for a, b, c, d in itertools.product(range(2), repeat=4):
        expected = A.zero()
        if a == b:
            expected = expected - g.matrix[c, d]
        if a == c:
            expected = expected + g.matrix[b, d]
        assert (R.comps[a, b, c, d] - expected).is_zero


def test_torsion_frame_and_section_routes_agree():
    A = courant(1)
    rng = make_rng(29)
    conn = random_connection(A, rng, degree=1)
    T = torsion(A, conn)
    u = A.vector([random_polynomial(A, rng) for _ in range(A.rank)])
    v = A.vector([random_polynomial(A, rng) for _ in range(A.rank)])
    section_route = torsion_eval(A, conn, u, v)
    for a in range(A.rank):
        frame_route = A.zero()
        for b, c in itertools.product(range(A.rank), repeat=2):
            frame_route = frame_route + T.comps[a, b, c] * u.comps[b] * v.comps[c]
        assert (section_route.comps[a] - frame_route).is_zero


def test_nonmetricity_is_symmetric_in_last_two_slots():
    A = courant(1)
    rng = make_rng(31)
    conn = random_connection(A, rng, degree=1)
    g = random_metric(A, rng)
    Q = nonmetricity(A, conn, g)
    assert (Q - Q.swap_slots(2, 3)).is_zero


def test_frame_covariant_derivative_of_metric_is_minus_nonmetricity():
    A = tangent(2)
    rng = make_rng(37)
    conn = random_connection(A, rng, degree=1)
    g = random_metric(A, rng)
    Q = nonmetricity(A, conn, g)
    nabla_g = frame_covariant_derivative(A, conn, g.lower_tensor())
    assert (Q - nabla_g).is_zero


def test_ricci_identity_all_builtins():
    builtins = [tangent(2), so3(), courant(1)]
    rng = make_rng(41)
    for A in builtins:
        for _ in range(3):
            conn = random_connection(A, rng, degree=1)
            u = A.vector([random_polynomial(A, rng) for _ in range(A.rank)])
            v = A.vector([random_polynomial(A, rng) for _ in range(A.rank)])
            w = A.vector([random_polynomial(A, rng) for _ in range(A.rank)])
            _, residual = second_cov_and_ricci(A, conn, u, v, w)
            assert residual.is_zero


def test_admissible_torsion_and_curvature_are_antisymmetric():
    A = courant(1)
    eta = courant_pairing(A)
    rng = make_rng(43)
    conn = eta_compatible_connection(A, eta, rng)
    assert A.admissibility_residual(conn).is_zero
    T = torsion(A, conn)
    assert (T + T.swap_slots(2, 3)).is_zero
    R = curvature(A, conn)
    assert (R + R.swap_slots(2, 3)).is_zero


def test_non_admissible_torsion_witness():
    A = courant(1)
    rng = make_rng(47)
    conn = random_connection(A, rng, degree=1)
    assert not A.admissibility_residual(conn).is_zero
    T = torsion(A, conn)
    assert not (T + T.swap_slots(2, 3)).is_zero


def test_projected_torsion_differs_from_torsion_off_tangent():
    A = courant(1)
    rng = make_rng(53)
    conn = random_connection(A, rng, degree=1)
    T = torsion(A, conn)
    T_hat = projected_torsion(A, conn)
    mb = modified_bracket_coeffs(A, conn)
    mb_hat = modified_bracket_coeffs(A, conn, projected=True)
    diff = ETensor(1, 2, A.rank, A.coords, mb_hat - mb)
    assert (T - T_hat - diff).is_zero


def test_so3_killing_style_levi_civita():
    A = so3()
    g = EMetric(
        [[A.one() if a == b else A.zero() for b in range(3)] for a in range(3)],
        A.coords,
    )
    conn = levi_civita_solve(A, g)
    half = ScalarField.constant(Fraction(1, 2), A.coords)
    # Over a point with antisymmetric constants, Gamma^a_{bc} = c^a_{bc} / 2.
    for a, b, c in itertools.product(range(3), repeat=3):
        assert (conn.gamma[a, b, c] - A.bracket[a, b, c] * half).is_zero
    assert torsion(A, conn).is_zero
    assert nonmetricity(A, conn, g).is_zero

import math

import numpy as np
import pytest

from k3cert.hyperkahler import (
    HKParams,
    JTriple,
    KahlerAngles,
    RotationMatrix,
    S2Point,
    angle_identity_residual,
    angle_matrices,
    angle_pairings,
    angles_from_forms,
    angles_from_pullback,
    build_Jtriple,
    build_metric,
    check_quaternion,
    metric_from_data,
    random_params,
    random_s2,
    random_so3,
    s_constancy_witness,
    solve_eq4,
    triholo_residual,
    verify_map_h,
)
from k3cert.quartic_surface import SurfacePointNum, sample_points, tangent_frame

W = np.exp(1j * np.pi / 4)


def _valid_angles(rng):
    a1 = rng.uniform(0.05, math.pi - 0.05)
    phi = rng.uniform(0, 2 * math.pi)
    s = math.sin(a1)
    return KahlerAngles(math.cos(a1), s * math.cos(phi), s * math.sin(phi))


# -- parameters and metric ---------------------------------------------------------


def test_params_validation():
    with pytest.raises(ValueError):
        HKParams(-1, 1, 1, 0j)
    with pytest.raises(ValueError):
        HKParams(1, 1, 1, 1j).require_valid()  # lam*mu = 1 but |tau|^2 + 1 = 2
    HKParams.from_tau(1, 2, 3 - 1j).require_valid()


def test_flat_metric():
    m = metric_from_data(HKParams.from_tau(2, 1, 0j), 1.0, 1.0)
    assert np.allclose(m.h, np.eye(2), atol=0)


def test_metric_determinant_and_positivity(rng):
    for _ in range(1000):
        params = random_params(rng)
        S, f1 = rng.uniform(1, 5), rng.uniform(0.1, 3)
        m = metric_from_data(params, S, f1)
        c = params.rho * S / (2 * f1)
        assert np.linalg.det(m.h).real == pytest.approx(c * c, rel=1e-10)
        assert m.is_hermitian
        assert np.linalg.eigvalsh(m.h).min() > 0
        assert np.linalg.eigvalsh(m.real_metric()).min() > 0


# -- complex structures ---------------------------------------------------------


def test_second_structure_flat_case_by_hand():
    t = build_Jtriple(HKParams.from_tau(2, 1, 0j))
    # xi -> (-conj xi2, conj xi1) on (Re xi1, Im xi1, Re xi2, Im xi2)
    expected = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
    assert np.allclose(t.J2, expected, atol=1e-15)


def test_first_structure_squares_to_minus_one_exactly():
    t = build_Jtriple(HKParams.from_tau(2, 1, 0j))
    assert np.array_equal(t.J1 @ t.J1, -np.eye(4))


def test_quaternion_relations_random(rng, fermat):
    frames = [tangent_frame(fermat, p) for p in sample_points(fermat, 50, seed=1)]
    worst = 0.0
    for k in range(1000):
        fr = frames[k % len(frames)]
        params = random_params(rng, theta1=fr.theta1)
        worst = max(worst, check_quaternion(build_Jtriple(params), build_metric(params, fr)))
    assert worst <= 1e-12


def test_quaternion_check_detects_sign_flip_and_identity():
    params = HKParams.from_tau(1.3, 0.7, 0.4 + 0.2j, 0.5)
    t = build_Jtriple(params)
    gram = metric_from_data(params, 1.4, 0.8)
    assert check_quaternion(t, gram) <= 1e-12
    # only the triple product is affected by flipping J1
    assert check_quaternion(JTriple(-t.J1, t.J2, t.J3), gram) == pytest.approx(2.0, rel=1e-12)
    ident = JTriple(np.eye(4), np.eye(4), np.eye(4))
    assert check_quaternion(ident) == pytest.approx(2.0)


def test_rejects_invalid_params():
    with pytest.raises(ValueError):
        build_Jtriple(HKParams(1, 1, 1, 1j))


# -- Kahler angles --------------------------------------------------------------


def test_angle_identity_examples():
    assert angle_identity_residual(KahlerAngles.from_angles(0, math.pi / 2, math.pi / 2)) <= 1e-15
    assert angle_identity_residual(KahlerAngles.from_angles(math.pi / 3, math.pi / 3, math.pi / 4)) <= 1e-15
    assert angle_identity_residual(KahlerAngles.from_angles(0, 0, math.pi / 2)) == pytest.approx(1.0)


def test_pairing_array_example():
    _, P2, _ = angle_pairings(KahlerAngles.from_angles(math.pi / 2, 0, math.pi / 2))
    block = np.array([[0, 1], [-1, 0]])
    expected = np.block([[block, np.zeros((2, 2))], [np.zeros((2, 2)), block]])
    assert np.allclose(P2, expected, atol=1e-15)


def test_operator_matrices_are_transposed_pairings(rng):
    a = _valid_angles(rng)
    for J, P in zip(angle_matrices(a), angle_pairings(a)):
        assert np.array_equal(J, P.T)


def test_valid_angle_triples_pass(rng):
    worst = max(check_quaternion(angle_matrices(_valid_angles(rng))) for _ in range(1000))
    assert worst <= 1e-12


def test_violating_triples_fail_by_margin(rng):
    for _ in range(200):
        a = _valid_angles(rng)
        delta = 10 ** rng.uniform(-3, -1)
        r = math.sqrt(a.cos2**2 + a.cos3**2 + delta)
        phi = math.atan2(a.cos3, a.cos2)
        bad = KahlerAngles(a.cos1, r * math.cos(phi), r * math.sin(phi))
        viol = angle_identity_residual(bad)
        assert viol == pytest.approx(delta, rel=1e-9)
        t = angle_matrices(bad)
        assert np.abs(t.J2 @ t.J2 + np.eye(4)).max() >= viol / 10
        assert check_quaternion(t) >= viol / 10


def test_degenerate_first_angle_rejected():
    with pytest.raises(ValueError):
        angle_matrices(KahlerAngles(1.0, 0.0, 0.0))


# -- chart equations and closed-form angles ---------------------------------------


def test_chart_equation_examples(rng):
    A, x = random_so3(rng), random_s2(rng)
    params = random_params(rng)
    assert triholo_residual(A, x, params, 0, 0, 0, 0) == 0
    I3 = RotationMatrix(np.eye(3))
    e1 = S2Point([1.0, 0.0, 0.0])
    for _ in range(10):
        d2, d3, p, q = rng.normal(size=4) + 1j * rng.normal(size=4)
        assert triholo_residual(I3, e1, params, d2, d3, p, q) == pytest.approx(2 * max(abs(d2), abs(d3)))


def test_solved_chart_equations(rng):
    for _ in range(1000):
        A, x, params = random_so3(rng), random_s2(rng), random_params(rng)
        p, q = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        data = solve_eq4(A, x, params, p, q)
        scale = max(1, abs(p), abs(q))
        assert triholo_residual(A, x, params, data.dphi2, data.dphi3, p, q) <= 1e-12 * scale


def test_closed_form_angles_example():
    params = HKParams.from_tau(1.5, 1.0, 0.3j)
    S = 1.7
    data = solve_eq4(RotationMatrix(np.eye(3)), S2Point([0, 0, 1.0]), params, 0.4 + 0.1j, -0.2j)
    ang = angles_from_pullback(RotationMatrix(np.eye(3)), S2Point([0, 0, 1.0]), params, S, data)
    assert ang.cosines == pytest.approx((0.0, 0.0, -2 / (params.rho * S)))


def test_closed_form_agrees_with_forms(rng, fermat):
    frames = [tangent_frame(fermat, p) for p in sample_points(fermat, 30, seed=8)]
    for k in range(300):
        A, x, params = random_so3(rng), random_s2(rng), random_params(rng)
        fr = frames[k % len(frames)]
        data = solve_eq4(A, x, params, complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
        a = angles_from_pullback(A, x, params, fr.S, data, fr.f1abs)
        b = angles_from_forms(A, x, params, fr.S, fr.f1abs, data)
        assert a.cosines == pytest.approx(b.cosines, abs=1e-10)


def test_identity_residual_expansion(rng):
    for _ in range(200):
        A, x, params = random_so3(rng), random_s2(rng), random_params(rng)
        S = rng.uniform(1, 4)
        data = solve_eq4(A, x, params, 1 + 0j, 0.5j)
        d = A.row_dots(x)
        k = 2 / (params.rho * S)
        expected = abs(d[0] ** 2 + k * k * (d[1] ** 2 + d[2] ** 2) - 1)
        got = angle_identity_residual(angles_from_pullback(A, x, params, S, data))
        assert got == pytest.approx(expected, abs=1e-13)


def test_identity_holds_for_rho_two_and_unit_S(rng):
    params = HKParams.from_tau(2, 1.4, 0.3 - 0.2j)
    for _ in range(50):
        A, x = random_so3(rng), random_s2(rng)
        data = solve_eq4(A, x, params, 0.3 + 0j, 1j)
        assert angle_identity_residual(angles_from_pullback(A, x, params, 1.0, data)) <= 1e-14


def test_rejects_data_not_solving_chart_equations(rng):
    A, x, params = random_so3(rng), random_s2(rng), random_params(rng)
    data = solve_eq4(A, x, params, 1 + 0j, 0j)
    from dataclasses import replace

    with pytest.raises(ValueError):
        angles_from_pullback(A, x, params, 1.0, replace(data, dphi2=data.dphi2 + 1))


# -- S on the Fermat quartic ---------------------------------------------------------


def test_s_constancy_on_fermat_samples(fermat, rng):
    pts = sample_points(fermat, 100, seed=2)
    out = s_constancy_witness(fermat, HKParams.from_tau(2, 1, 0j), random_so3(rng), pts)
    assert out["S_at_least_one"]
    assert out["S_min"] > 1
    assert out["holds_count"] == 0
    assert out["consistent"]


def test_s_equals_one_where_other_partials_vanish(fermat, rng):
    p = SurfacePointNum((1 + 0j, W, 0j, 0j), 0, 0.0)
    out = s_constancy_witness(fermat, HKParams.from_tau(2, 1, 0j), random_so3(rng), [p])
    assert out["S_equals_one_count"] == 1 and out["holds_count"] == 1
    assert out["rows"][0]["identity_residual"] <= 1e-14
    assert out["consistent"]


# -- the map h -------------------------------------------------------------------


def test_map_h():
    res = verify_map_h()
    assert res["symbolic_identity"] and res["composition"] == "0"
    assert res["holomorphic"]
    assert res["origin_singular"]
    assert res["z1_constant"] == "omega"
    assert res["image_at_(1,1)_residual"] <= 1e-14

import numpy as np
import pytest
import sympy as sp

from oracles import hopf_lax_test2_bruteforce
from slcweno.grid import BoundaryPolicy
from slcweno.problems import (
    BUMP_M,
    NUM_TESTS,
    bump,
    exact_test2,
    make_test,
    obstacle_test5,
    optimal_control_test2,
    source_test3,
    v0_test2,
    v0_test5,
)

# brute-force scan over 1e6 controls refined by a high-precision root solve, then frozen
V_TEST2_AT_1_HALF = -0.9111609012880788


@pytest.mark.parametrize("k", range(1, NUM_TESTS + 1))
def test_make_test_is_populated(k):
    spec, exact = make_test(k)
    g = spec.grid()
    assert g.dim == spec.dim
    spec.validate(g)
    assert (exact is None) == (k == 5)
    spec.rule.check_pairing(spec.tab)
    pts = g.points()
    assert np.all(np.isfinite(spec.v0(pts)))
    if exact is not None:
        assert np.allclose(exact(0.0, pts), spec.v0(pts), atol=1e-14)


def test_invalid_test_id():
    with pytest.raises(ValueError):
        make_test(6)


def test_problem_settings():
    t = {k: make_test(k)[0] for k in range(1, 6)}
    assert (t[1].tableau, t[1].dt_ratio, t[1].T) == ("rk3", 3.0, 1.0)
    assert (t[2].tableau, t[2].dt_ratio, t[2].T) == ("euler", 10.0, 1.0)
    assert (t[3].tableau, t[3].dt_ratio, t[3].T, t[3].policy) == ("rk3", 1.0, 0.5, BoundaryPolicy.PERIODIC)
    assert (t[4].tableau, t[4].dt_ratio, t[4].T) == ("euler", 1.25, 0.5)
    assert (t[5].tableau, t[5].dt_ratio, t[5].T) == ("rk3", 1.0, 3.0)
    assert t[5].grid((101,)).n == (101, 81)


def test_test1_returns_to_start():
    _, exact = make_test(1)
    pts = np.random.default_rng(0).random((200, 2))
    assert np.allclose(exact(1.0, pts), bump(pts), atol=1e-14)
    # a quarter turn moves the bump away from its start
    assert exact(0.25, np.array([[0.3, 0.7]]))[0] < BUMP_M


def test_bump_is_c2_at_rim():
    s = sp.symbols("s")
    p = sp.Rational(3, 20) * (1 + s**3 * (-10 + 15 * s - 6 * s**2))
    assert [p.subs(s, 1), sp.diff(p, s).subs(s, 1), sp.diff(p, s, 2).subs(s, 1)] == [0, 0, 0]
    assert sp.diff(p, s).subs(s, 0) == 0 and sp.diff(p, s, 2).subs(s, 0) == 0
    assert bump(np.array([[0.3, 0.7]]))[0] == pytest.approx(BUMP_M)
    assert bump(np.array([[0.3 + 0.15, 0.7]]))[0] == pytest.approx(0.0, abs=1e-15)


def test_test3_exact_and_pde_residual():
    _, exact = make_test(3)
    assert exact(0.5, np.array([np.pi / 2]))[0] == pytest.approx(1.0)
    rng = np.random.default_rng(1)
    t = rng.uniform(0, 1, 50)
    x = rng.uniform(0, 2 * np.pi, 50)
    vt = -np.sin(x)
    vx = (1.5 - t) * np.cos(x)
    res = vt + 0.5 * vx**2 - np.array([source_test3(ti, xi) for ti, xi in zip(t, x)])
    assert np.max(np.abs(res)) <= 1e-10


def test_test4_exact():
    _, exact = make_test(4)
    assert exact(0.5, np.array([[0.0, 0.0]]))[0] == pytest.approx(1.0)
    far = np.array([[1.2, 0.0], [0.0, -1.5], [1.0, 1.0]])
    assert np.all(exact(0.5, far) == 0)
    r = 0.4
    assert exact(0.5, np.array([[r, 0.0]]))[0] == pytest.approx((1 - r) ** 2)


def test_test2_examples():
    assert optimal_control_test2(0.7, 0.0) == pytest.approx(0.0, abs=1e-13)
    assert exact_test2(0.7, 0.0) == pytest.approx(-1.0, abs=1e-13)
    for t, x in [(0.3, 0.4), (1.0, 1.1), (0.8, 0.05)]:
        assert exact_test2(t, -x) == pytest.approx(exact_test2(t, x), abs=1e-13)
    assert exact_test2(1.0, 0.5, tol=1e-12) == pytest.approx(V_TEST2_AT_1_HALF, abs=1e-12)


def test_test2_matches_bruteforce_hopf_lax():
    xs = np.linspace(-2, 2, 21)
    for x in xs:
        assert exact_test2(1.0, float(x)) == pytest.approx(hopf_lax_test2_bruteforce(1.0, float(x)), abs=1e-8)


def test_test2_fixed_point_residual():
    from slcweno.problems import _g_test2

    for x in np.linspace(-1.9, 1.9, 15):
        a = optimal_control_test2(1.0, float(x))
        assert abs(a - _g_test2(1.0, float(x), a)) <= 1e-12


def test_test2_no_root_far_out():
    with pytest.raises(ValueError, match="no root bracketed"):
        optimal_control_test2(0.2, 5.0)
    with pytest.raises(ValueError):
        optimal_control_test2(0.0, 0.5)
    _, exact = make_test(2)
    assert exact(0.2, np.array([5.0]))[0] == 0.0


def test_test2_initial_data():
    assert v0_test2(np.array([0.0, 1.0, 1.5, -2.0])) == pytest.approx([-1.0, 0.0, 0.0, 0.0], abs=1e-15)


def test_test5_geometry():
    g = lambda x, y: obstacle_test5(np.array([[x, y]]))[0]  # noqa: E731
    assert g(0.3, 0.4) > 0 and g(-1.0, -1.5) > 0
    assert g(0.3 + 0.19, 0.4 - 0.19) > 0
    assert g(0.3 + 0.21, 0.4) < 0 and g(0.0, 0.0) == pytest.approx(-0.2)
    v0 = lambda x, y: v0_test5(np.array([[x, y]]))[0]  # noqa: E731
    assert v0(1.0, 0.0) < 0 and v0(1.24, 0.0) < 0 and v0(1.26, 0.0) > 0
    rng = np.random.default_rng(2)
    pts = np.column_stack([rng.uniform(-3, 2, 5000), rng.uniform(-2, 2, 5000)])
    inside = (np.abs(pts[:, 0] - 0.3) < 0.2) & (np.abs(pts[:, 1] - 0.4) < 0.2)
    inside |= (np.abs(pts[:, 0] + 1.0) < 0.2) & (np.abs(pts[:, 1] + 1.5) < 0.2)
    assert np.array_equal(obstacle_test5(pts) > 0, inside)
    disk = np.hypot(pts[:, 0] - 1.0, pts[:, 1]) <= 0.25
    assert np.array_equal(v0_test5(pts) <= 0, disk)


def test_periodic_validation_rejects_mismatch():
    from dataclasses import replace

    spec, _ = make_test(3)
    bad = replace(spec, v0=lambda x: np.cos(np.asarray(x).reshape(-1) / 2))
    with pytest.raises(ValueError, match="periodic"):
        bad.validate(bad.grid(33))


def test_non_square_cells_rejected():
    spec, _ = make_test(5)
    with pytest.raises(ValueError):
        spec.grid(100)

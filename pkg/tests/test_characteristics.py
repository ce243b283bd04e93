import numpy as np
import pytest

from oracles import rk_error_ratios, simpson_cost_ratios
from slcweno.characteristics import (
    ButcherTableau,
    DynamicsBlewUp,
    PairingError,
    QuadKind,
    QuadratureRule,
    cost_integral,
    trace,
    trace_foot,
)

TABS = [ButcherTableau.euler(), ButcherTableau.heun(), ButcherTableau.rk3()]


@pytest.mark.parametrize("tab", TABS, ids=lambda t: t.name)
def test_tableau_invariants(tab):
    assert sum(tab.b) == pytest.approx(1.0, abs=1e-15)
    assert tab.c[0] == 0
    for i in range(tab.nu):
        for j in range(i, tab.nu):
            assert tab.A[i][j] == 0
    rule = QuadratureRule.for_tableau(tab)
    assert sum(rule.weights) == pytest.approx(1.0, abs=1e-15)
    assert tuple(rule.nodes) == tuple(tab.c)


def test_by_name_and_unknown():
    assert ButcherTableau.by_name("rk1").name == "euler"
    with pytest.raises(ValueError):
        ButcherTableau.by_name("rk4")


def test_mismatched_pairing():
    with pytest.raises(PairingError):
        QuadratureRule.of(QuadKind.SIMPSON).check_pairing(ButcherTableau.heun())


@pytest.mark.parametrize("tab", TABS, ids=lambda t: t.name)
def test_constant_dynamics(tab):
    fr = trace_foot(tab, lambda t, x, a: np.full_like(x, 0.7), 1.0, 0.5, 0.1, [0.0] * tab.nu)
    assert fr.foot[0] == pytest.approx(1.07, abs=1e-15)
    assert np.array_equal(fr.X[0], [1.0])


def test_heun_linear_example():
    dt = 0.1
    fr = trace_foot(ButcherTableau.heun(), lambda t, x, a: x, 1.0, 0.3, dt, [0.0, 0.0])
    assert fr.foot[0] == pytest.approx(1 + dt + dt * dt / 2, abs=1e-15)


def test_rk3_control_weights():
    a = (0.3, -1.2, 2.0)
    fr = trace_foot(ButcherTableau.rk3(), lambda t, x, u: u, 0.5, 1.0, 0.2, a)
    assert fr.foot[0] == pytest.approx(0.5 + 0.2 * (a[0] / 6 + 2 * a[1] / 3 + a[2] / 6), abs=1e-15)


def test_stage_times_run_backwards():
    seen = []

    def f(t, x, a):
        seen.append(t)
        return np.zeros_like(x)

    trace_foot(ButcherTableau.rk3(), f, 0.0, 1.0, 0.2, [0.0] * 3)
    assert seen == pytest.approx([1.0, 0.9, 0.8])


def test_blow_up_reports_stage():
    f = lambda t, x, a: np.where(x > 1.05, np.inf, 1.0)  # noqa: E731
    with pytest.raises(DynamicsBlewUp, match="dynamics blew up") as exc:
        trace_foot(ButcherTableau.heun(), f, 1.0, 1.0, 0.1, [0.0, 0.0])
    assert exc.value.X[0] == pytest.approx(1.1)


def test_wrong_control_count():
    with pytest.raises(ValueError):
        trace_foot(ButcherTableau.rk3(), lambda t, x, a: x, 0.0, 1.0, 0.1, [0.0])


def test_nonpositive_dt():
    with pytest.raises(ValueError):
        trace_foot(ButcherTableau.euler(), lambda t, x, a: x, 0.0, 1.0, 0.0, [0.0])


def test_euler_exact_for_constant_velocity_batch():
    x = np.random.default_rng(0).normal(size=(50, 2))
    a = np.random.default_rng(1).uniform(-2, 2, size=(50, 2))
    fr = trace(ButcherTableau.euler(), lambda t, x, u: -u, x, 1.0, 0.25, [a])
    assert np.array_equal(fr.foot, x + 0.25 * (1.0 * -a))


@pytest.mark.parametrize("tab", TABS, ids=lambda t: t.name)
def test_unit_cost_integrates_to_dt(tab):
    rule = QuadratureRule.for_tableau(tab)
    fr = trace_foot(tab, lambda t, x, a: -a, 0.3, 1.0, 0.05, [0.5] * tab.nu)
    assert cost_integral(rule, lambda t, x, a: np.ones(len(x)), fr, [0.5] * tab.nu, 1.0, 0.05) == pytest.approx(0.05)


def test_simpson_linear_time_cost():
    tab = ButcherTableau.rk3()
    dt, tn = 0.2, 0.9
    fr = trace_foot(tab, lambda t, x, a: -a, 0.0, tn, dt, [0.0] * 3)
    got = cost_integral(QuadratureRule.for_tableau(tab), lambda t, x, a: np.full(len(x), t), fr, [0.0] * 3, tn, dt)
    assert got == pytest.approx(dt * tn - dt * dt / 2, abs=1e-15)


def test_trapezoid_uses_second_stage():
    tab = ButcherTableau.heun()
    fr = trace_foot(tab, lambda t, x, a: np.ones_like(x), 0.0, 1.0, 0.1, [0.0, 0.0])
    got = cost_integral(QuadratureRule.for_tableau(tab), lambda t, x, a: x[:, 0], fr, [0.0, 0.0], 1.0, 0.1)
    assert got == pytest.approx(0.05 * (0.0 + 0.1))


def test_cost_is_linear_in_running_cost():
    tab = ButcherTableau.rk3()
    rule = QuadratureRule.for_tableau(tab)
    fr = trace_foot(tab, lambda t, x, a: np.sin(x) + a, 0.4, 1.0, 0.1, [0.1, 0.2, 0.3])
    f = lambda t, x, a: np.cos(x[:, 0]) * t  # noqa: E731
    g = lambda t, x, a: a[:, 0] ** 2  # noqa: E731
    args = ([0.1, 0.2, 0.3], 1.0, 0.1)
    both = cost_integral(rule, lambda t, x, a: 2 * f(t, x, a) - 3 * g(t, x, a), fr, *args)
    assert both == pytest.approx(2 * cost_integral(rule, f, fr, *args) - 3 * cost_integral(rule, g, fr, *args), abs=1e-15)


@pytest.mark.parametrize("tab,p", [(TABS[0], 1), (TABS[1], 2), (TABS[2], 3)], ids=["euler", "heun", "rk3"])
def test_global_order(tab, p):
    for r in rk_error_ratios(tab):
        assert abs(r / 2**p - 1) <= 0.2


def test_simpson_cost_order():
    assert min(simpson_cost_ratios()) >= 7

import numpy as np
import pytest

from slcweno.control import (
    ControlSet,
    NMParams,
    NonFiniteObjective,
    coarse_grid,
    embed,
    minimize,
    minimize_batch,
)


def test_set_validation():
    with pytest.raises(ValueError):
        ControlSet.box(1.0, -1.0)
    with pytest.raises(ValueError):
        ControlSet.circle(0.0)
    assert ControlSet.circle(1.0).param_dim == 1 and ControlSet.circle(1.0).control_dim == 2
    assert ControlSet.box((-1, -2), (1, 2)).param_dim == 2
    assert ControlSet.empty().param_dim == 0


@pytest.mark.parametrize("kw", [dict(coarse_pts=2), dict(contraction=1.0), dict(expansion=0.5), dict(ftol=-1)])
def test_nm_params_validation(kw):
    with pytest.raises(ValueError):
        NMParams(**kw)


def test_embed_examples():
    assert embed(ControlSet.box(-1.0, 1.0), [1.7])[0] == 1.0
    assert np.allclose(embed(ControlSet.circle(1.0), [np.pi]), (-1.0, 0.0), atol=1e-15)
    assert embed(ControlSet.empty(), np.zeros(0)).size == 0


def test_coarse_grid_layout():
    g, h = coarse_grid(ControlSet.box((-1, 0), (1, 4)), 1, NMParams(coarse_pts=5))
    assert g.shape == (25, 2) and np.allclose(h, (0.5, 1.0))
    assert np.array_equal(g[1], (-1.0, 1.0))  # last parameter fastest
    gc, hc = coarse_grid(ControlSet.circle(), 2, NMParams(coarse_pts=4))
    assert gc.shape == (16, 2) and gc.max() < 2 * np.pi and hc[0] == pytest.approx(np.pi / 2)


def test_interior_quadratic():
    a, v = minimize(lambda c: float((c[0, 0] - 0.3) ** 2), ControlSet.box(-1.0, 1.0), 1)
    assert a[0, 0] == pytest.approx(0.3, abs=1e-5) and v <= 1e-10


def test_linear_over_circle():
    a, v = minimize(lambda c: float(c[0, 0]), ControlSet.circle(1.0), 1)
    ang = np.arctan2(a[0, 1], a[0, 0])
    assert abs(abs(ang) - np.pi) <= 1e-4
    assert v == pytest.approx(-1.0, abs=1e-8)


def test_two_basins_scan_oracle():
    f = lambda a: min((a + 0.8) ** 2, (a - 0.7) ** 2 + 0.01)  # noqa: E731
    scan = np.linspace(-1, 1, 10_001)
    oracle = scan[np.argmin([f(s) for s in scan])]
    a, _ = minimize(lambda c: f(c[0, 0]), ControlSet.box(-1.0, 1.0), 1)
    assert oracle == pytest.approx(-0.8, abs=1e-4)
    assert a[0, 0] == pytest.approx(oracle, abs=1e-4)


def test_empty_set_single_evaluation():
    calls = []

    def obj(c):
        calls.append(c.shape)
        return 2.5

    a, v = minimize(obj, ControlSet.empty(), 3)
    assert v == 2.5 and len(calls) == 1 and a.shape == (3, 0)


@pytest.mark.parametrize("cs", [ControlSet.box((-2, -2), (2, 2)), ControlSet.circle(1.0)], ids=["box", "circle"])
def test_feasible_monotone_deterministic(cs):
    seen = []
    target = np.array([0.4, -0.9])

    def obj(ctrl, nodes):
        seen.append(ctrl.copy())
        return np.sum((ctrl - target) ** 2, axis=(1, 2)) + 0.1 * nodes

    nodes = np.arange(30)
    r1 = minimize_batch(obj, cs, 2, nodes)
    every = np.concatenate([s.reshape(-1, 2) for s in seen])
    assert np.all(cs.contains(every))
    assert np.all(r1.values <= r1.coarse_values)
    r2 = minimize_batch(obj, cs, 2, nodes)
    assert np.array_equal(r1.controls, r2.controls) and np.array_equal(r1.values, r2.values)


def test_boundary_minimum_stays_in_box():
    seen = []

    def obj(ctrl, nodes):
        seen.append(ctrl.copy())
        return -ctrl[:, 0, 0] * 3.0

    r = minimize_batch(obj, ControlSet.box(-2.0, 2.0), 1, np.arange(4))
    assert np.allclose(r.controls[:, 0, 0], 2.0)
    assert max(s.max() for s in seen) <= 2.0


def test_tie_break_lowest_index():
    # constant objective: the first coarse point wins and the simplex stops at once
    r = minimize_batch(lambda c, n: np.zeros(len(c)), ControlSet.box(-1.0, 1.0), 2, np.arange(3))
    assert np.array_equal(r.params[0], (-1.0, -1.0))


def test_nonfinite_objective():
    with pytest.raises(NonFiniteObjective) as exc:
        minimize(lambda c: np.nan if c[0, 0] > 0.5 else 0.0, ControlSet.box(-1.0, 1.0), 1)
    assert exc.value.control is not None
